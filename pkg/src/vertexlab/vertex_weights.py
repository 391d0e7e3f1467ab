"""Six-vertex R-matrix, quantum-group generators on V_lambda and their coproducts.

Basis order is (+, -) per site and lexicographic over sites, so the two-site
basis is (++, +-, -+, --). Spin + is index 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import SizeError
from .numerics import ModelParams, residual

KINDS = ("e", "f", "t", "t_inv", "f_bar", "e_bar")
MAX_SITES = 12

# generator index -> (row, col) of the raising entry of e_i; f_i sits at the transpose
_E_SLOT = {1: (0, 1), 0: (1, 0)}
# t_i = diag(q^{s}, q^{-s})
_T_SIGN = {1: 1, 0: -1}


@dataclass(frozen=True)
class GeneratorId:
    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.index not in (0, 1):
            raise ValueError("generator index must be 0 or 1")

    @property
    def is_current(self) -> bool:
        return self.kind in ("f", "f_bar")


def r_matrix(lam, params: ModelParams) -> np.ndarray:
    eta = params.eta
    a, b, c = np.sinh(lam + eta), np.sinh(lam), np.sinh(eta)
    return np.array(
        [[a, 0, 0, 0], [0, b, c, 0], [0, c, b, 0], [0, 0, 0, a]], dtype=complex
    )


def swap_matrix() -> np.ndarray:
    p = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            p[2 * i + j, 2 * j + i] = 1.0
    return p


def t_power(index: int, power: int, params: ModelParams) -> np.ndarray:
    """t_index ** power as a 2x2 diagonal matrix."""
    s = _T_SIGN[index] * power
    return np.diag([np.exp(s * params.eta), np.exp(-s * params.eta)]).astype(complex)


def generator_on_v(gen: GeneratorId, lam, params: ModelParams) -> np.ndarray:
    i = gen.index
    if gen.kind == "t":
        return t_power(i, 1, params)
    if gen.kind == "t_inv":
        return t_power(i, -1, params)
    e = np.zeros((2, 2), dtype=complex)
    e[_E_SLOT[i]] = np.exp(lam)
    if gen.kind == "e":
        return e
    f = np.zeros((2, 2), dtype=complex)
    f[_E_SLOT[i][::-1]] = np.exp(-lam)
    if gen.kind == "f":
        return f
    if gen.kind == "f_bar":
        return e @ t_power(i, -1, params)
    return f @ t_power(i, 1, params)  # e_bar


def _kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats, np.ones((1, 1), dtype=complex))


def coproduct_action(gen: GeneratorId, site_lambdas, params: ModelParams) -> np.ndarray:
    """Iterated coproduct Delta^(N)(gen) on V_{l_1} x ... x V_{l_N}.

    f-type generators (f, f_bar) act as sum_j 1 x..x x_j x t^-1 x..x t^-1,
    e-type as sum_j t x..x t x x_j x 1 x..x 1, and t^{+-1} as a tensor power.
    """
    lams = list(site_lambdas)
    n = len(lams)
    if not 1 <= n <= MAX_SITES:
        raise SizeError(f"number of sites must be in [1, {MAX_SITES}]")
    i = gen.index
    eye = np.eye(2, dtype=complex)
    if gen.kind in ("t", "t_inv"):
        return _kron_all([generator_on_v(gen, lam, params) for lam in lams])
    if gen.kind in ("f", "f_bar"):
        left, right = eye, t_power(i, -1, params)
    elif gen.kind == "e":
        left, right = t_power(i, 1, params), eye
    else:  # e_bar = f t, coproduct f t x t + t x f t... built from the pieces below
        f = coproduct_action(GeneratorId("f", i), lams, params)
        t = coproduct_action(GeneratorId("t", i), lams, params)
        return f @ t
    total = np.zeros((2**n, 2**n), dtype=complex)
    for j in range(n):
        mats = [left] * j + [generator_on_v(gen, lams[j], params)] + [right] * (n - j - 1)
        total += _kron_all(mats)
    return total


def iterated_coproduct(gen: GeneratorId, site_lambdas, params: ModelParams) -> np.ndarray:
    """Delta^(N) built recursively as (Delta x 1) Delta^(N-1), for cross-checking."""
    lams = list(site_lambdas)
    if len(lams) == 1:
        return generator_on_v(gen, lams[0], params)
    if gen.kind in ("t", "t_inv"):
        return np.kron(iterated_coproduct(gen, lams[:-1], params), generator_on_v(gen, lams[-1], params))
    i = gen.index
    if gen.kind in ("f", "f_bar"):
        head = iterated_coproduct(gen, lams[:-1], params)
        tinv = GeneratorId("t_inv", i)
        return np.kron(head, generator_on_v(tinv, lams[-1], params)) + np.kron(
            np.eye(2 ** (len(lams) - 1)), generator_on_v(gen, lams[-1], params)
        )
    if gen.kind == "e":
        head = iterated_coproduct(gen, lams[:-1], params)
        t = iterated_coproduct(GeneratorId("t", i), lams[:-1], params)
        return np.kron(head, np.eye(2)) + np.kron(t, generator_on_v(gen, lams[-1], params))
    f = iterated_coproduct(GeneratorId("f", i), lams, params)
    return f @ iterated_coproduct(GeneratorId("t", i), lams, params)


def opposite_coproduct(gen: GeneratorId, l1, l2, params: ModelParams) -> np.ndarray:
    """P Delta(x) P on V_{l1} x V_{l2}, keeping each spectral parameter on its own factor."""
    p = swap_matrix()
    return p @ coproduct_action(gen, [l2, l1], params) @ p


def _embed3(r4: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    """Place a two-site operator on sites ``pair`` of three sites."""
    t = r4.reshape(2, 2, 2, 2)
    out = np.zeros((2,) * 6, dtype=complex)
    k = 3 - sum(pair)
    for idx in np.ndindex(2, 2, 2, 2, 2):
        o1, o2, i1, i2, s = idx
        rows = [0, 0, 0]
        cols = [0, 0, 0]
        rows[pair[0]], rows[pair[1]], rows[k] = o1, o2, s
        cols[pair[0]], cols[pair[1]], cols[k] = i1, i2, s
        out[tuple(rows) + tuple(cols)] = t[o1, o2, i1, i2]
    return out.reshape(8, 8)


def check_ybe(l1, l2, l3, params: ModelParams) -> float:
    r12 = _embed3(r_matrix(l1 - l2, params), (0, 1))
    r13 = _embed3(r_matrix(l1 - l3, params), (0, 2))
    r23 = _embed3(r_matrix(l2 - l3, params), (1, 2))
    return residual(r12 @ r13 @ r23, r23 @ r13 @ r12)


def check_unitarity(lam, params: ModelParams) -> float:
    p = swap_matrix()
    r21 = p @ r_matrix(-lam, params) @ p
    lhs = r21 @ r_matrix(lam, params)
    eta = params.eta
    return residual(lhs, np.sinh(lam + eta) * np.sinh(-lam + eta) * np.eye(4))


def _entry(r: np.ndarray, e1: int, e2: int, f1: int, f2: int) -> complex:
    """R^{e1 e2}_{f1 f2} with spins +-1: incoming (e1, e2), outgoing (f1, f2)."""
    idx = lambda s: 0 if s == 1 else 1  # noqa: E731
    return r[2 * idx(f1) + idx(f2), 2 * idx(e1) + idx(e2)]


def check_crossing(lam, params: ModelParams) -> float:
    r = r_matrix(lam, params)
    rc = r_matrix(-lam - params.eta, params)
    worst = 0.0
    for e1 in (1, -1):
        for e2 in (1, -1):
            for f1 in (1, -1):
                for f2 in (1, -1):
                    sign = (-1) ** ((e1 + f1) // 2)
                    lhs = _entry(r, e1, e2, f1, f2)
                    rhs = sign * _entry(rc, e2, -f1, f2, -e1)
                    worst = max(worst, abs(lhs - rhs))
    return worst


def check_vertex_intertwining(gen: GeneratorId, l1, l2, params: ModelParams) -> float:
    r = r_matrix(l1 - l2, params)
    delta = coproduct_action(gen, [l1, l2], params)
    return residual(r @ delta, opposite_coproduct(gen, l1, l2, params) @ r)


def winding_factor(gen: GeneratorId, params: ModelParams) -> complex:
    """Scalar c with t x t^-1 = c x for x = f_i (c = q^-2) or f_bar_i (c = q^2)."""
    return np.exp(-2 * params.eta) if gen.kind == "f" else np.exp(2 * params.eta)


def check_winding_relation(gen_index: int, params: ModelParams, barred: bool = False) -> float:
    """Residuals of t x t^-1 = c x and t^-1 x t = c^-1 x for x = f_i or f_bar_i."""
    gen = GeneratorId("f_bar" if barred else "f", gen_index)
    x = generator_on_v(gen, 0.3 - 0.2j, params)
    t, tinv = t_power(gen_index, 1, params), t_power(gen_index, -1, params)
    c = winding_factor(gen, params)
    return max(residual(t @ x @ tinv, c * x), residual(tinv @ x @ t, x / c))


def check_antipode(gen_index: int, lam, params: ModelParams) -> float:
    """e_bar_i equals -S(f_i) = f_i t_i."""
    f = generator_on_v(GeneratorId("f", gen_index), lam, params)
    return residual(generator_on_v(GeneratorId("e_bar", gen_index), lam, params), f @ t_power(gen_index, 1, params))
