import math
from fractions import Fraction

import pytest

from vertexlab.csos import (
    H13_SLOT,
    SPECTRUM_COLUMNS,
    CsosParams,
    adjacency_eigensystem,
    admissible_faces,
    central_charge,
    check_cyclic_periodicity,
    check_eigensystem,
    check_spin_identification,
    check_tl_relations,
    check_w_tl_decomposition,
    conformal_dimensions,
    coprime_pairs,
    derive_ln,
    effective_central_charge,
    electric_dimension,
    leading_exponent,
    magnetic_dimension,
    spectrum_table,
    torus_character,
)
from vertexlab.errors import ArgError, TruncationError

X0 = 0.37 + 0.11j


@pytest.mark.parametrize("p,q,ln", [(4, 3, (1, 8)), (5, 4, (1, 10)), (5, 2, (3, 10)), (3, 1, (1, 3)), (7, 3, (2, 7))])
def test_derive_ln(p, q, ln):
    assert derive_ln(p, q) == ln
    ell, n = ln
    assert CsosParams.from_pp(p, q).eta == pytest.approx(1j * math.pi * (p - q) / p)
    assert math.gcd(ell, n) == 1


def test_derive_ln_rejects_bad_pairs():
    for p, q in [(4, 2), (3, 3), (3, 5), (4, 0)]:
        with pytest.raises(ArgError):
            derive_ln(p, q)


def test_coprime_pairs():
    pairs = coprime_pairs(5)
    assert (4, 3) in pairs and (4, 2) not in pairs
    assert len(pairs) == sum(1 for p in range(2, 6) for q in range(1, p) if math.gcd(p, q) == 1)


@pytest.mark.parametrize("pq,c", [((4, 3), Fraction(1, 2)), ((5, 4), Fraction(7, 10)), ((5, 2), Fraction(-22, 5))])
def test_central_charges(pq, c):
    assert central_charge(CsosParams.from_pp(*pq)) == c


def test_h13_and_spin_identification():
    ising = CsosParams.from_pp(4, 3)
    assert conformal_dimensions(ising, *H13_SLOT)[0] == Fraction(1, 2)
    for p, q in coprime_pairs(12):
        rep = check_spin_identification(CsosParams.from_pp(p, q))
        assert rep["h13"] == Fraction(2 * q - p, p)
        assert rep["residual"] < 1e-14
        assert rep["s0_is_screening"]


def test_effective_central_charge_is_one():
    assert all(effective_central_charge(CsosParams.from_pp(p, q)) == 1 for p, q in coprime_pairs(12))


def test_electric_and_magnetic_dimensions_are_spinless_slices():
    c = CsosParams.from_pp(5, 4)
    for j in range(c.n):
        h, hb = conformal_dimensions(c, Fraction(2 * j, c.n), 0)
        assert h == hb == electric_dimension(c, j, 0)
    assert magnetic_dimension(c, 1) == conformal_dimensions(c, 0, c.n)[0]


def test_spectrum_table_for_tricritical_ising():
    c = CsosParams.from_pp(5, 4)
    rows = spectrum_table(c, 2, 2 * c.n)
    assert len(rows) == 25
    assert {r.m for r in rows} == {-2 * c.n, -c.n, 0, c.n, 2 * c.n}
    assert all(len(r.row(c)) == len(SPECTRUM_COLUMNS) for r in rows)
    assert all((r.h - r.hbar) == -r.e * r.m for r in rows)


@pytest.mark.parametrize("pq,exp", [((4, 3), Fraction(-1, 12)), ((5, 4), Fraction(-1, 20))])
def test_leading_torus_exponent(pq, exp):
    c = CsosParams.from_pp(*pq)
    assert leading_exponent(c) == exp == (central_charge(c) - 1) / 6


def test_torus_character_truncation():
    c = CsosParams.from_pp(4, 3)
    ch = torus_character(c, 0.05j)
    assert ch.error_estimate < 1e-8 and ch.value != 0
    with pytest.raises(TruncationError):
        torus_character(c, 0.9, truncation=2)


@pytest.mark.parametrize("pq", [(4, 3), (5, 4), (5, 2), (6, 5)])
def test_temperley_lieb_relations(pq):
    c = CsosParams.from_pp(*pq)
    for length in range(2, 6):
        rep = check_tl_relations(c, length, X0)
        assert max(rep.values()) < 1e-10


@pytest.mark.parametrize("pq", [(4, 3), (5, 2)])
def test_face_weight_splits_into_identity_and_tl(pq):
    c = CsosParams.from_pp(*pq)
    assert max(check_w_tl_decomposition(c, h, 0.31 - 0.12j, X0) for h in admissible_faces(c)) < 1e-12


def test_cyclic_periodicity():
    c = CsosParams.from_pp(5, 2)
    rep = check_cyclic_periodicity(c, X0, 0.2 + 0.1j)
    assert rep["face_weight"] < 1e-12 and rep["intertwiner"] < 1e-12
    assert rep["intertwiner_sign"] == (-1) ** c.ell


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_adjacency_eigensystem(n):
    rep = check_eigensystem(adjacency_eigensystem(n))
    assert rep["count"] == n
    assert rep["orthonormal"] < 1e-12 and rep["eigen"] < 1e-12
