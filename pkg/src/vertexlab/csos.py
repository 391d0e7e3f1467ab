"""Cyclic SOS model: restriction arithmetic, Temperley-Lieb structure and the scaling spectrum.

Exact quantities (central charge, conformal dimensions, spins) use
``fractions.Fraction``; lattice objects use complex floats.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ArgError, TruncationError
from .numerics import ModelParams
from .sos_weights import _sinh_height, face_weight, height_step, intertwiner


@dataclass(frozen=True)
class CsosParams:
    p: int
    pprime: int
    ell: int
    n: int

    @classmethod
    def from_pp(cls, p: int, pprime: int) -> "CsosParams":
        ell, n = derive_ln(p, pprime)
        return cls(p, pprime, ell, n)

    @property
    def eta(self) -> complex:
        return 2j * math.pi * self.ell / self.n

    def model_params(self, x0) -> ModelParams:
        return ModelParams(eta=self.eta, x0=x0)


def derive_ln(p: int, pprime: int) -> tuple[int, int]:
    """The integers (l, n) with eta = i pi (p - p') / p = 2 i pi l / n."""
    if not (isinstance(p, int) and isinstance(pprime, int)) or not 0 < pprime < p:
        raise ArgError("need integers 0 < p' < p")
    if math.gcd(p, pprime) != 1:
        raise ArgError(f"p={p} and p'={pprime} are not coprime")
    diff = p - pprime
    ell, n = (diff // 2, p) if diff % 2 == 0 else (diff, 2 * p)
    if Fraction(2 * ell, n) != Fraction(diff, p) or math.gcd(ell, n) != 1:
        raise AssertionError("inconsistent (l, n)")  # unreachable for coprime input
    return ell, n


def coprime_pairs(p_max: int):
    """All (p, p') with 2 <= p <= p_max, 1 <= p' < p and gcd 1."""
    return [(p, q) for p in range(2, p_max + 1) for q in range(1, p) if math.gcd(p, q) == 1]


# ---------------------------------------------------------------------------
# lattice level


def _admissible_faces(n):
    for a in range(n):
        for b in ((a + 1) % n, (a - 1) % n):
            for c in ((b + 1) % n, (b - 1) % n):
                for d in ((c + 1) % n, (c - 1) % n):
                    if height_step(d, a, n):
                        yield a, b, c, d


def check_cyclic_periodicity(csos: CsosParams, x0, lam) -> dict:
    """Deviation of W and psi under the simultaneous shift a -> a + n.

    W must be periodic; psi picks up (-1)^l. Returns the two deviations and
    the sign used.
    """
    params = csos.model_params(x0)
    n = csos.n
    w_dev = 0.0
    for a in range(-1, n + 1):
        for b, d in itertools.product((a - 1, a + 1), repeat=2):
            for c in (b - 1, b + 1):
                if abs(c - d) != 1:
                    continue
                w0 = face_weight(a, b, c, d, lam, params)
                w1 = face_weight(a + n, b + n, c + n, d + n, lam, params)
                w_dev = max(w_dev, abs(w1 - w0) / (1.0 + abs(w0)))
    sign = (-1) ** csos.ell
    psi_dev = 0.0
    for a in range(n):
        for b in (a - 1, a + 1):
            v0 = intertwiner("psi", a, b, lam, params)
            v1 = intertwiner("psi", a + n, b + n, lam, params)
            psi_dev = max(psi_dev, float(np.max(np.abs(v1 - sign * v0))))
    return {"face_weight": float(w_dev), "intertwiner": psi_dev, "intertwiner_sign": sign}


def height_rows(n: int, length: int) -> list[tuple[int, ...]]:
    """All cyclic height walks a_0 .. a_length with steps +-1 mod n."""
    rows = []
    for start in range(n):
        for steps in itertools.product((1, -1), repeat=length):
            row = [start]
            for s in steps:
                row.append((row[-1] + s) % n)
            rows.append(tuple(row))
    return sorted(set(rows))


def tl_generator(csos: CsosParams, length: int, j: int, x0, rows=None) -> np.ndarray:
    """Matrix of E_j on height walks of ``length`` steps; E_j only changes a_j.

    Entry [new, old] is -e_new e_old sinh(a_j' eta) / sinh(a_{j-1} eta) when
    a_{j-1} = a_{j+1}, with e = a_j - a_{j-1} = +-1.
    """
    if not 1 <= j <= length - 1:
        raise ValueError("need 1 <= j <= length - 1")
    if length > 8:
        raise ValueError("row length is limited to 8")
    n = csos.n
    params = csos.model_params(x0)
    rows = rows if rows is not None else height_rows(n, length)
    index = {r: k for k, r in enumerate(rows)}
    mat = np.zeros((len(rows), len(rows)), dtype=complex)
    for r in rows:
        left, mid, right = r[j - 1], r[j], r[j + 1]
        if left != right:
            continue
        e_old = height_step(left, mid, n)
        for new in ((left + 1) % n, (left - 1) % n):
            e_new = height_step(left, new, n)
            target = r[:j] + (new,) + r[j + 1:]
            mat[index[target], index[r]] = (
                -e_new * e_old * _sinh_height(new, params) / _sinh_height(left, params)
            )
    return mat


def check_tl_relations(csos: CsosParams, length: int, x0) -> dict:
    """Residuals of E^2 = -2 cosh(eta) E, E_j E_{j+-1} E_j = E_j and far commutativity.

    Every E_j fixes both end heights, so the relations are checked block by
    block over the sectors of fixed (a_0, a_length).
    """
    sectors = {}
    for r in height_rows(csos.n, length):
        sectors.setdefault((r[0], r[-1]), []).append(r)
    beta = -2 * cmath.cosh(csos.eta)

    def rel(a, b):
        return float(np.max(np.abs(a - b)) / (1.0 + np.max(np.abs(b))))

    out = {"loop": 0.0, "braid": 0.0, "commute": 0.0}
    for rows in sectors.values():
        gens = {j: tl_generator(csos, length, j, x0, rows) for j in range(1, length)}
        for j, e in gens.items():
            out["loop"] = max(out["loop"], rel(e @ e, beta * e))
            for k, f in gens.items():
                if abs(j - k) == 1:
                    out["braid"] = max(out["braid"], rel(e @ f @ e, e))
                elif abs(j - k) >= 2:
                    out["commute"] = max(out["commute"], rel(e @ f, f @ e))
    return out


def tl_entry(a, b, c, d, params: ModelParams, n: int) -> complex:
    """E(a b; d c): non-zero only for a = c."""
    if a % n != c % n:
        return 0j
    e1, e2 = height_step(a, b, n), height_step(a, d, n)
    if not (e1 and e2):
        return 0j
    return complex(-e1 * e2 * _sinh_height(b, params) / _sinh_height(a, params))


def check_w_tl_decomposition(csos: CsosParams, heights, lam, x0) -> float:
    """|W(a,b,c,d) - sinh(lam + eta) delta_bd - sinh(lam) E(a b; d c)|."""
    a, b, c, d = heights
    params = csos.model_params(x0)
    n = csos.n
    w = face_weight(a, b, c, d, lam, params, n)
    rhs = cmath.sinh(lam + csos.eta) * (b % n == d % n) + cmath.sinh(lam) * tl_entry(a, b, c, d, params, n)
    return float(abs(w - rhs) / (1.0 + abs(w)))


def admissible_faces(csos: CsosParams):
    return list(_admissible_faces(csos.n))


# ---------------------------------------------------------------------------
# adjacency spectrum


@dataclass(frozen=True)
class EigSystem:
    n: int
    sines: dict
    cosines: dict
    norms: dict

    def vectors(self):
        return [self.sines[j] for j in sorted(self.sines)] + [self.cosines[j] for j in sorted(self.cosines)]

    def eigenvalue(self, j: int) -> float:
        return 2 * math.cos(2 * math.pi * j / self.n)


def adjacency_matrix(n: int) -> np.ndarray:
    a = np.zeros((n, n))
    for k in range(n):
        a[k, (k + 1) % n] = a[k, (k - 1) % n] = 1
    return a


def adjacency_eigensystem(n: int) -> EigSystem:
    """Sine vectors S^(j) and cosine vectors T^(j) of the cyclic adjacency matrix."""
    if n < 3:
        raise ValueError("n must be at least 3")
    a = np.arange(n)
    top = n // 2
    norms = {j: math.sqrt((1 if j == 0 or 2 * j == n else 2) / n) for j in range(top + 1)}
    s_range = range(1, (n - 1) // 2 + 1) if n % 2 else range(1, n // 2)
    t_range = range((n - 1) // 2 + 1) if n % 2 else range(n // 2 + 1)
    sines = {j: norms[j] * np.sin(2 * np.pi * a * j / n) for j in s_range}
    cosines = {j: norms[j] * np.cos(2 * np.pi * a * j / n) for j in t_range}
    return EigSystem(n, sines, cosines, norms)


def check_eigensystem(eig: EigSystem) -> dict:
    vecs = np.array(eig.vectors())
    gram = vecs @ vecs.T
    adj = adjacency_matrix(eig.n)
    eigen = 0.0
    for family in (eig.sines, eig.cosines):
        for j, v in family.items():
            eigen = max(eigen, float(np.max(np.abs(adj @ v - eig.eigenvalue(j) * v))))
    return {"count": len(vecs), "orthonormal": float(np.max(np.abs(gram - np.eye(len(vecs))))), "eigen": eigen}


# ---------------------------------------------------------------------------
# scaling spectrum


def central_charge(csos: CsosParams) -> Fraction:
    p, q = csos.p, csos.pprime
    return 1 - Fraction(6 * (p - q) ** 2, p * q)


def conformal_dimensions(csos: CsosParams, e, m: int) -> tuple[Fraction, Fraction]:
    """(h_em, hbar_em) for electric charge e (exact rational) and magnetic charge m."""
    p, q = csos.p, csos.pprime
    e = Fraction(e)
    shift = Fraction((p - q) ** 2)
    denom = 4 * p * q
    return ((e * p - m * q) ** 2 - shift) / denom, ((e * p + m * q) ** 2 - shift) / denom


def electric_dimension(csos: CsosParams, j: int, k: int) -> Fraction:
    """h = hbar of the local height operator with charge e = 2j/n + k."""
    p, q = csos.p, csos.pprime
    e = Fraction(2 * j, csos.n) + k
    return e**2 / Fraction(4 * q, p) - Fraction((p - q) ** 2, 4 * p * q)


def magnetic_dimension(csos: CsosParams, m: int) -> Fraction:
    """h = hbar of the height defect a -> a + m n."""
    p, q = csos.p, csos.pprime
    return Fraction(q, 4 * p) * (m * csos.n) ** 2 - Fraction((p - q) ** 2, 4 * p * q)


def effective_central_charge(csos: CsosParams) -> Fraction:
    h0, hb0 = conformal_dimensions(csos, 0, 0)
    return central_charge(csos) - 12 * (h0 + hb0)


def sos_spin(csos: CsosParams, index: int) -> complex:
    return 1 + 0j if index == 0 else 1 + 2j * csos.eta / math.pi


H13_SLOT = (1, 3)


def check_spin_identification(csos: CsosParams) -> dict:
    """|s_1 - h_13| with h_13 read from the (e, m) = (1, 3) slot, and s_0 against 1."""
    h13, _ = conformal_dimensions(csos, *H13_SLOT)
    s1 = sos_spin(csos, 1)
    return {
        "h13": h13,
        "s1": s1,
        "residual": float(abs(s1 - float(h13))),
        "s0_is_screening": sos_spin(csos, 0) == 1,
    }


@dataclass(frozen=True)
class SpectrumEntry:
    e: Fraction
    m: int
    h: Fraction
    hbar: Fraction

    def row(self, csos: CsosParams) -> list:
        return [csos.p, csos.pprime, self.e.numerator, self.e.denominator, self.m,
                float(self.h), 0.0, float(self.hbar), 0.0]


SPECTRUM_COLUMNS = ["p", "pprime", "e_num", "e_den", "m", "h_re", "h_im", "hbar_re", "hbar_im"]


def spectrum_table(csos: CsosParams, e_max, m_max: int, e_den: int = 1) -> list[SpectrumEntry]:
    """Entries with e in (1/e_den) Z, |e| <= e_max and m in n Z, |m| <= m_max."""
    e_max = Fraction(e_max)
    ks = range(-math.floor(e_max * e_den), math.floor(e_max * e_den) + 1)
    ms = [k * csos.n for k in range(-(m_max // csos.n), m_max // csos.n + 1)]
    out = []
    for k in ks:
        e = Fraction(k, e_den)
        for m in ms:
            h, hb = conformal_dimensions(csos, e, m)
            out.append(SpectrumEntry(e, m, h, hb))
    return out


def leading_exponent(csos: CsosParams) -> Fraction:
    """Smallest power of |q| in the torus sum: h_00 + hbar_00 + c/12 - 1/12."""
    h0, hb0 = conformal_dimensions(csos, 0, 0)
    return h0 + hb0 + central_charge(csos) / 12 - Fraction(1, 12)


@dataclass(frozen=True)
class TorusCharacter:
    value: complex
    error_estimate: float
    truncation: int


def torus_character(csos: CsosParams, q, truncation: int = 8, tol: float = 1e-8) -> TorusCharacter:
    """Truncated (q qbar)^{c/24} |eta_D(q)|^-2 sum_{e, m} q^h qbar^hbar.

    e runs over 2j/n + k (j < n, |k| <= truncation), m over n Z with
    |m| <= truncation n, and the Dedekind product over ``truncation**2``
    factors. The error estimate is the largest term on the outermost shell
    relative to the total; above ``tol`` a ``TruncationError`` is raised.
    """
    q = complex(q)
    r = abs(q)
    if not 0 < r < 1:
        raise ValueError("need 0 < |q| < 1")
    theta = cmath.phase(q)
    c = central_charge(csos)

    def power(h, hb):
        # q^h qbar^hbar with integer spin h - hbar
        return r ** float(h + hb) * cmath.exp(1j * theta * float(h - hb))

    total, shell = 0j, 0.0
    n = csos.n
    for j, k, mm in itertools.product(range(n), range(-truncation, truncation + 1),
                                      range(-truncation, truncation + 1)):
        e = Fraction(2 * j, n) + k
        h, hb = conformal_dimensions(csos, e, mm * n)
        term = power(h, hb)
        total += term
        if abs(k) == truncation or abs(mm) == truncation:
            shell = max(shell, abs(term))
    eta_sq = 1.0 + 0j
    for k in range(1, truncation**2 + 1):
        eta_sq *= abs(1 - q**k) ** 2
    prefactor = r ** (2 * float(c) / 24 - 2 / 24)
    value = prefactor * total / eta_sq
    err = shell / abs(total) if total else 0.0
    tail = r ** (truncation**2 + 1)
    err = max(err, tail)
    if err > tol:
        raise TruncationError(f"truncation {truncation} leaves relative error {err:.2e} at |q| = {r}")
    return TorusCharacter(complex(value), float(err), truncation)
