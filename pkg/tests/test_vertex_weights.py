import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab.errors import SizeError
from vertexlab.numerics import ModelParams
from vertexlab.vertex_weights import (
    KINDS,
    GeneratorId,
    check_antipode,
    check_crossing,
    check_unitarity,
    check_vertex_intertwining,
    check_winding_relation,
    check_ybe,
    coproduct_action,
    generator_on_v,
    iterated_coproduct,
    r_matrix,
    swap_matrix,
    t_power,
    winding_factor,
)

P = ModelParams(eta=0.41 - 0.17j)
small = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


def test_r_matrix_at_zero_is_scaled_swap():
    np.testing.assert_allclose(r_matrix(0.0, P), np.sinh(P.eta) * swap_matrix(), atol=1e-15)


def test_r_matrix_entries():
    lam = 0.3 + 0.2j
    r = r_matrix(lam, P)
    a, b, c = cmath.sinh(lam + P.eta), cmath.sinh(lam), cmath.sinh(P.eta)
    assert r[0, 0] == pytest.approx(a) and r[3, 3] == pytest.approx(a)
    assert {complex(r[1, 1]), complex(r[2, 2])} == {b}
    assert {complex(r[1, 2]), complex(r[2, 1])} == {c}


@settings(max_examples=40, deadline=None)
@given(small, small, small)
def test_yang_baxter_property(l1, l2, l3):
    assert check_ybe(l1, l2, l3, P) < 1e-10


@settings(max_examples=40, deadline=None)
@given(small)
def test_unitarity_and_crossing_property(lam):
    assert check_unitarity(lam, P) < 1e-10
    assert check_crossing(lam, P) < 1e-10


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("index", [0, 1])
def test_r_intertwines_every_generator(kind, index):
    assert check_vertex_intertwining(GeneratorId(kind, index), 0.2 - 0.3j, -0.5 + 0.1j, P) < 1e-10


def test_t_powers_and_winding_factor():
    np.testing.assert_allclose(t_power(1, 1, P) @ t_power(1, -1, P), np.eye(2))
    np.testing.assert_allclose(t_power(0, 1, P), t_power(1, -1, P))
    assert winding_factor(GeneratorId("f", 0), P) == pytest.approx(cmath.exp(-2 * P.eta))
    assert winding_factor(GeneratorId("f_bar", 1), P) == pytest.approx(cmath.exp(2 * P.eta))
    for i in (0, 1):
        assert check_winding_relation(i, P) < 1e-12
        assert check_winding_relation(i, P, barred=True) < 1e-12
        assert check_antipode(i, 0.1j, P) < 1e-14


def test_generators_on_a_single_site():
    lam = 0.25
    e1 = generator_on_v(GeneratorId("e", 1), lam, P)
    f1 = generator_on_v(GeneratorId("f", 1), lam, P)
    assert e1[0, 1] == pytest.approx(np.exp(lam)) and np.count_nonzero(e1) == 1
    assert f1[1, 0] == pytest.approx(np.exp(-lam)) and np.count_nonzero(f1) == 1


@pytest.mark.parametrize("kind", KINDS)
def test_closed_and_recursive_coproducts_agree(kind):
    lams = [0.1, -0.2 + 0.3j, 0.4j, 0.05]
    gen = GeneratorId(kind, 1)
    np.testing.assert_allclose(coproduct_action(gen, lams, P), iterated_coproduct(gen, lams, P), atol=1e-13)


def test_bad_generator_labels_and_sizes():
    with pytest.raises(ValueError):
        GeneratorId("h", 0)
    with pytest.raises(ValueError):
        GeneratorId("e", 2)
    with pytest.raises(SizeError):
        coproduct_action(GeneratorId("e", 0), [0.0] * 20, P)
