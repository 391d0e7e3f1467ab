import cmath
import itertools

import pytest

from vertexlab.embedding import embed
from vertexlab.errors import GeometryError, ProbeInconclusive
from vertexlab.numerics import ModelParams
from vertexlab.sos_weights import SosLatticeSpec, ring_faces
from vertexlab.sos_currents import (
    SosCurrentInsertion,
    check_equivalence_6v_sos,
    check_j0_locality,
    check_sos_commutation,
    check_sos_four_term,
    check_sos_inversions,
    check_sos_plaquette,
    check_tail_ybe,
    commutation_phase,
    dressed_f,
    dressed_f_contracted,
    dressed_t,
    dressed_t_contracted,
    equivalence_factor,
    four_term_patterns,
    inversion_patterns,
    rsos_incompatibility_probe,
    sos_current_sum,
    tail_ybe_hexagons,
)
from vertexlab.vertex_lattice import TailPath

P = ModelParams(eta=0.37 + 0.21j, x0=0.43 + 0.11j)
FLAVOURS = list(itertools.product((0, 1), (False, True)))
WALK2 = [0, 1, 0, 1, 0, -1, 0, -1]
WALK3 = [0, 1, 0, 1, 2, 1, 2, 1, 0, -1, 0, -1]


def spec2(free_anchor=False):
    bnd = list(WALK2)
    if free_anchor:
        bnd[ring_faces(2, 2).index((1, 0))] = None
    return SosLatticeSpec(2, 2, [0.11, 0.23 - 0.05j], [0.31, -0.08 + 0.02j], bnd, P)


def test_closed_forms_match_contractions():
    lam = 0.29 - 0.13j
    for (i, barred), (a, b, c) in itertools.product(FLAVOURS, itertools.product(range(-2, 3), repeat=3)):
        assert abs(dressed_f(i, barred, a, b, c, lam, P) - dressed_f_contracted(i, barred, a, b, c, lam, P)) < 1e-12
    for mu, sign in itertools.product((0, 1, 0.3 + 0.2j), "-+"):
        for h in itertools.product(range(-2, 3), repeat=4):
            assert abs(dressed_t(mu, sign, *h, P) - dressed_t_contracted(mu, sign, *h, P, lam)) < 1e-12


def test_t_weights_do_not_depend_on_lambda():
    for h in [(0, 1, 2, 1), (0, -1, 0, 1), (1, 0, 1, 2)]:
        a = dressed_t_contracted(1, "-", *h, P, 0.0)
        b = dressed_t_contracted(1, "-", *h, P, 0.7 - 0.4j)
        assert a == pytest.approx(b, abs=1e-13)


def test_f_zero_off_admissible_heights():
    assert dressed_f(0, False, 0, 2, 1, 0.1, P) == 0
    assert dressed_t(0, "-", 0, 2, 1, 0, P) == 0


@pytest.mark.parametrize("sign", "-+")
@pytest.mark.parametrize("index", [0, 1])
def test_tail_through_face(sign, index):
    assert max(check_tail_ybe(sign, index, h, 0.3, -0.2 + 0.1j, P) for h in tail_ybe_hexagons()) < 1e-10


@pytest.mark.parametrize("which", [1, 2, 3, 4])
@pytest.mark.parametrize("index", [0, 1])
def test_tail_inversions(which, index):
    assert max(check_sos_inversions(which, index, h, P) for h in inversion_patterns()) < 1e-10


@pytest.mark.parametrize("which", [1, 2, 3, 4])
@pytest.mark.parametrize("index", [0, 1])
def test_tail_winding_around_insertion(which, index):
    lam = 0.29 - 0.13j
    pats = [(a, b, c) for a in (0, 1) for b in (a - 1, a + 1) for c in (a - 1, a + 1)]
    assert max(check_sos_commutation(which, index, h, lam, P) for h in pats) < 1e-10


def test_commutation_phases():
    assert all(commutation_phase(w, 0, P) == 1 for w in (1, 2, 3, 4))
    assert commutation_phase(1, 1, P) == pytest.approx(cmath.exp(-4 * P.eta))
    assert commutation_phase(3, 1, P) == pytest.approx(cmath.exp(4 * P.eta))


@pytest.mark.parametrize("index,barred", FLAVOURS)
def test_four_term_relation(index, barred):
    assert max(check_sos_four_term(barred, index, h, 0.3, -0.2 + 0.1j, P) for h in four_term_patterns()) < 1e-10


def test_equivalence_factor_signs():
    ins = SosCurrentInsertion(0, False, TailPath((1, 0), "UL"))
    assert equivalence_factor(ins, 1, P) == pytest.approx(cmath.exp(-2 * P.eta))
    bar1 = SosCurrentInsertion(1, True, TailPath((1, 0), "UL"))
    assert equivalence_factor(bar1, 1, P) == pytest.approx(cmath.exp(-2 * P.eta))


@pytest.mark.parametrize("free_anchor", [False, True])
@pytest.mark.parametrize("steps,loops", [("U", 0), ("UL", 0), ("UL", 1), ("UL", -1)])
@pytest.mark.parametrize("index,barred", FLAVOURS)
def test_vertex_and_sos_currents_agree(free_anchor, steps, loops, index, barred):
    ins = SosCurrentInsertion(index, barred, TailPath((1, 0), steps, loops))
    res, details = check_equivalence_6v_sos(spec2(free_anchor), ins)
    assert details["winding"] == loops
    assert abs(details["sos"]) > 1e-8
    assert res < 1e-9


def test_tail_rules():
    with pytest.raises(GeometryError):
        sos_current_sum(spec2(), SosCurrentInsertion(0, False, TailPath((0, 0), "UR")))
    with pytest.raises(GeometryError):
        sos_current_sum(spec2(), SosCurrentInsertion(0, False, TailPath((1, 0), "UR")))


@pytest.fixture(scope="module")
def lattice3():
    eta = 0.05 + 0.37j
    params = ModelParams(eta=eta, x0=0.43 + 0.11j)
    cols = [0.11 * eta, -0.3 * eta, 0.2 * eta]
    rows = [0.6 * eta, 0.75 * eta, 0.9 * eta]
    return SosLatticeSpec(3, 3, cols, rows, WALK3, params), embed(cols, rows, eta)


@pytest.mark.parametrize("index,barred", FLAVOURS)
def test_sos_plaquette_conservation_and_contour(lattice3, index, barred):
    spec, emb = lattice3
    res, details = check_sos_plaquette(spec, (2, 2), index, barred, emb)
    assert res < 1e-9
    assert details["contour"] < 1e-9
    assert max(abs(v) for v in details["values"].values()) > 1e-8


@pytest.mark.parametrize("steps,loops", [("UL", 0), ("UL", 1), ("UUL", 1), ("RUUL", -1), ("UU", 0)])
@pytest.mark.parametrize("barred", [False, True])
def test_j0_locality(lattice3, steps, loops, barred):
    spec, _ = lattice3
    rep = check_j0_locality(spec, SosCurrentInsertion(0, barred, TailPath((2, 0), steps, loops)))
    assert rep["equal_heights"]
    assert rep["telescoping"] < 1e-10
    assert rep["local"] < 1e-10
    assert rep["configurations"] > 0


def test_j0_locality_needs_fixed_anchor_and_index_zero(lattice3):
    spec, _ = lattice3
    with pytest.raises(ValueError):
        check_j0_locality(spec, SosCurrentInsertion(1, False, TailPath((2, 0), "UL")))
    free = SosLatticeSpec(3, 3, spec.col_lambdas, spec.row_lambdas,
                          [None if f == (2, 0) else h for f, h in zip(ring_faces(3, 3), WALK3)], spec.params)
    with pytest.raises(ValueError):
        check_j0_locality(free, SosCurrentInsertion(0, False, TailPath((2, 0), "UL")))


@pytest.mark.parametrize("p", [3, 4])
def test_rsos_probe_finds_witness(p):
    w = rsos_incompatibility_probe(p)
    assert w.out_of_range and all(not 1 <= h <= p for h in w.out_of_range)
    assert abs(w.weight) > 1e-6
    far, near = w.partition_out_of_range
    assert near <= 0.5 * far
    assert w.to_json()["p"] == p


def test_rsos_probe_rejects_small_p():
    with pytest.raises(ValueError):
        rsos_incompatibility_probe(2)
    assert issubclass(ProbeInconclusive, Exception)
