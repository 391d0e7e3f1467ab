import cmath
import math
from fractions import Fraction

import pytest

from vertexlab.embedding import (
    FreeBosonCharge,
    Parafermion,
    boson_dimensions,
    contour_sum,
    coupling,
    embed,
    line_angle,
    opening_angle,
    parafermion_from_stripped,
    parafermion_value,
    plaquette_contour,
    spin,
    strip_current,
)
from vertexlab.errors import DegenerateCoupling, GeometryError
from vertexlab.numerics import ModelParams
from vertexlab.vertex_lattice import VertexLatticeSpec, check_plaquette_conservation
from vertexlab.vertex_weights import GeneratorId

ETA = 0.05 + 0.37j


def test_line_angles_are_real_for_real_multiples_of_eta():
    assert line_angle(0.25 * ETA, ETA) == pytest.approx(-math.pi / 4)
    assert opening_angle(0.1 * ETA, 0.6 * ETA, ETA) == pytest.approx(math.pi / 2)


def test_rhombi_close_and_have_unit_sides():
    emb = embed([0.1 * ETA, 0.2 * ETA], [0.6 * ETA, 0.8 * ETA], ETA)
    for x in (1, 2):
        for y in (1, 2):
            plaq = emb.plaquette(x, y)
            assert abs(sum(d for _, _, d in plaq.values())) < 1e-14
            assert all(abs(abs(d) - 1) < 1e-14 for _, _, d in plaq.values())
            assert 0 < abs(emb.opening_angle(x, y)) < math.pi


def test_embedding_rejects_bad_parameters():
    with pytest.raises(GeometryError):
        embed([0.1 + 0.2j], [0.3], ETA)
    with pytest.raises(GeometryError):
        embed([0.2 * ETA], [1.2 * ETA], ETA)
    with pytest.raises(GeometryError):
        embed([0.1], [0.2], 0)


def test_spins():
    assert spin("vertex", 0, ETA) == pytest.approx(1 + 1j * ETA / math.pi)
    assert spin("sos", 0, ETA) == 1
    assert spin("sos_bar", 1, ETA) == pytest.approx(1 + 2j * ETA / math.pi)
    with pytest.raises(ValueError):
        Parafermion("loop", 0, ETA)


@pytest.mark.parametrize("kind,index", [("vertex", 0), ("vertex_bar", 1), ("sos", 1), ("sos_bar", 0)])
def test_stripping_reproduces_the_phase(kind, index):
    pf = Parafermion(kind, index, ETA)
    lam = 0.3 * ETA
    alpha = line_angle(lam, ETA)
    j = 0.7 - 0.2j
    assert parafermion_from_stripped(pf, alpha, strip_current(pf, lam, j)) == pytest.approx(
        parafermion_value(pf, alpha, j), rel=1e-13)


def test_contour_sum_flavours():
    deltas = [1, 1j, -1, -1j]
    assert contour_sum([1, 1, 1, 1], deltas) == 0
    assert contour_sum([1, 0, 0, 0], [1j, 0, 0, 0], antiholomorphic=True) == -1j
    with pytest.raises(ValueError):
        contour_sum([1, 2], [1])


@pytest.mark.parametrize("kind,barred", [("f", False), ("f_bar", True)])
@pytest.mark.parametrize("index", [0, 1])
def test_vertex_parafermion_contour_vanishes(kind, barred, index):
    cols, rows = [0.11 * ETA, 0.25 * ETA, 0.2 * ETA], [0.6 * ETA, 0.75 * ETA, 0.9 * ETA]
    bnd = {"top": [0] * 3, "bottom": [0] * 3, "left": [0] * 3, "right": [0] * 3}
    spec = VertexLatticeSpec(3, 3, cols, rows, bnd, ModelParams(eta=ETA))
    _, vals = check_plaquette_conservation(spec, (2, 2), GeneratorId(kind, index))
    total, scale = plaquette_contour(embed(cols, rows, ETA), (2, 2), vals, Parafermion(
        "vertex_bar" if barred else "vertex", index, ETA))
    assert scale > 0 and abs(total) <= 1e-9 * scale


def test_free_boson_dimensions():
    g = Fraction(3, 4)
    h, hb = boson_dimensions(FreeBosonCharge(Fraction(1, 2), 1, g))
    assert h == (Fraction(1, 2) + g) ** 2 / (4 * g)
    assert hb == (Fraction(1, 2) - g) ** 2 / (4 * g)
    assert h - hb == Fraction(1, 2)  # spin e m
    assert coupling(ETA) == pytest.approx(1 + 1j * ETA / math.pi)
    with pytest.raises(DegenerateCoupling):
        boson_dimensions(FreeBosonCharge(1, 0, 0j))
    assert cmath.isclose(boson_dimensions(FreeBosonCharge(1, 0, 2.0))[0], 0.125)
