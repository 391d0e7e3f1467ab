"""Rhombic embedding of the lattice and discrete contour sums of parafermions.

Each lattice line gets the angle ``alpha = -pi * lam / eta``; column lines
contribute unit steps ``exp(i alpha_col)`` and row lines ``-exp(i alpha_row)``
to the position of the dual points, so every vertex becomes a rhombus with
unit sides. Current insertions sit at midpoints of rhombus sides.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateCoupling, GeometryError

PLAQUETTE_SLOTS = ("top", "left", "bottom", "right")
KINDS = ("vertex", "vertex_bar", "sos", "sos_bar")


@dataclass(frozen=True)
class EmbeddingMap:
    eta: complex
    col_angles: tuple
    row_angles: tuple

    def alpha(self, edge) -> complex:
        kind, x, y = edge
        return self.col_angles[x - 1] if kind == "v" else self.row_angles[y - 1]

    def face_point(self, i: int, j: int) -> complex:
        """Dual point of face (i, j)."""
        return sum(cmath.exp(1j * a) for a in self.col_angles[:i]) - sum(
            cmath.exp(1j * a) for a in self.row_angles[:j]
        )

    def point(self, edge) -> complex:
        """Embedded midpoint of an edge: the centre of the rhombus side it crosses."""
        kind, x, y = edge
        if kind == "v":
            return 0.5 * (self.face_point(x - 1, y) + self.face_point(x, y))
        return 0.5 * (self.face_point(x, y - 1) + self.face_point(x, y))

    def opening_angle(self, x: int, y: int) -> float:
        return float((self.col_angles[x - 1] - self.row_angles[y - 1]).real)

    def plaquette(self, x: int, y: int):
        """Edges and anticlockwise side vectors around vertex (x, y).

        Returns ``{slot: (edge, point, delta)}`` for the top, left, bottom
        and right sides of the rhombus.
        """
        a = cmath.exp(1j * self.col_angles[x - 1])
        b = cmath.exp(1j * self.row_angles[y - 1])
        edges = {
            "top": ("v", x, y),
            "left": ("h", x - 1, y),
            "bottom": ("v", x, y - 1),
            "right": ("h", x, y),
        }
        deltas = {"top": -a, "left": b, "bottom": a, "right": -b}
        return {k: (edges[k], self.point(edges[k]), deltas[k]) for k in PLAQUETTE_SLOTS}


def line_angle(lam, eta) -> complex:
    return -math.pi * complex(lam) / complex(eta)


def embed(col_lambdas, row_lambdas, eta) -> EmbeddingMap:
    """Canonical embedding of a lattice with the given spectral parameters.

    Every rhombus must be non-degenerate, i.e. each column/row angle
    difference reduced mod 2 pi must be real and strictly between 0 and pi
    in absolute value.
    """
    eta = complex(eta)
    if eta == 0:
        raise GeometryError("eta must be non-zero")
    cols = tuple(line_angle(l, eta) for l in col_lambdas)
    rows = tuple(line_angle(l, eta) for l in row_lambdas)
    for ac in cols:
        for ar in rows:
            theta = ac - ar
            if abs(theta.imag) > 1e-12:
                raise GeometryError("complex opening angle: spectral parameters must be real multiples of eta")
            s = math.sin(theta.real)
            if abs(s) < 1e-12:
                raise GeometryError("degenerate rhombus")
    return EmbeddingMap(eta, cols, rows)


def opening_angle(l1, l2, eta) -> complex:
    """pi (l2 - l1) / eta, the rhombus angle between lines with parameters l1, l2."""
    return math.pi * (complex(l2) - complex(l1)) / complex(eta)


# ---------------------------------------------------------------------------
# parafermions


def spin(kind: str, index: int, eta) -> complex:
    """Lattice spin of the parafermion of the given kind."""
    eta = complex(eta)
    if kind in ("vertex", "vertex_bar"):
        return 1 + 1j * eta / math.pi
    if kind in ("sos", "sos_bar"):
        return 1 + 2j * eta / math.pi if index == 1 else 1 + 0j
    raise ValueError(f"unknown parafermion kind {kind!r}")


@dataclass(frozen=True)
class Parafermion:
    kind: str
    index: int
    eta: complex

    def __post_init__(self):
        if self.kind not in KINDS or self.index not in (0, 1):
            raise ValueError("bad parafermion label")

    @property
    def barred(self) -> bool:
        return self.kind.endswith("bar")

    @property
    def spin(self) -> complex:
        return spin(self.kind, self.index, self.eta)

    def stripped_exponent(self) -> complex:
        """Power p with current = exp(p * lam) * stripped current."""
        if self.kind == "vertex":
            return -1
        if self.kind == "vertex_bar":
            return 1
        if self.kind == "sos":
            return -2 if self.index == 1 else 0
        return 2 if self.index == 1 else 0


def parafermion_value(pf: Parafermion, alpha, current) -> complex:
    """exp(-+ i alpha) times the current (upper sign for unbarred)."""
    sign = 1 if pf.barred else -1
    return cmath.exp(sign * 1j * complex(alpha)) * complex(current)


def parafermion_from_stripped(pf: Parafermion, alpha, stripped) -> complex:
    """exp(-+ i s alpha) times the spectral-parameter-free current."""
    sign = 1 if pf.barred else -1
    return cmath.exp(sign * 1j * pf.spin * complex(alpha)) * complex(stripped)


def strip_current(pf: Parafermion, lam, current) -> complex:
    """Remove the explicit exp(p lam) dependence of a current value."""
    return complex(current) * cmath.exp(-pf.stripped_exponent() * complex(lam))


def contour_sum(values, deltas, antiholomorphic: bool = False) -> complex:
    """sum_k dz_k phi_k, or with conjugated dz_k for the antiholomorphic flavour."""
    values = np.asarray(values, dtype=complex)
    deltas = np.asarray(deltas, dtype=complex)
    if values.shape != deltas.shape:
        raise ValueError("one value per side is required")
    if antiholomorphic:
        deltas = np.conj(deltas)
    return complex(np.sum(values * deltas))


def plaquette_contour(emb: EmbeddingMap, vertex, currents: dict, pf: Parafermion):
    """Contour sum of a parafermion around one vertex rhombus.

    ``currents`` maps the slots top/left/bottom/right to current values.
    Returns ``(sum, scale)`` with scale the largest summand magnitude.
    """
    plaq = emb.plaquette(*vertex)
    terms = []
    for slot in PLAQUETTE_SLOTS:
        edge, _, delta = plaq[slot]
        phi = parafermion_value(pf, emb.alpha(edge), currents[slot])
        d = np.conj(delta) if pf.barred else delta
        terms.append(d * phi)
    return complex(sum(terms)), float(max(abs(t) for t in terms))


# ---------------------------------------------------------------------------
# free boson


@dataclass(frozen=True)
class FreeBosonCharge:
    e: complex
    m: int
    g: complex


def coupling(eta) -> complex:
    return 1 + 1j * complex(eta) / math.pi


def boson_dimensions(charge: FreeBosonCharge):
    """(Delta, Delta_bar) = ((e + m g)^2 / 4g, (e - m g)^2 / 4g)."""
    g = charge.g
    if isinstance(g, Fraction):
        if g == 0:
            raise DegenerateCoupling("coupling vanishes")
        e = Fraction(charge.e)
        return (e + charge.m * g) ** 2 / (4 * g), (e - charge.m * g) ** 2 / (4 * g)
    g = complex(g)
    if abs(g) == 0:
        raise DegenerateCoupling("coupling vanishes")
    e = complex(charge.e)
    return (e + charge.m * g) ** 2 / (4 * g), (e - charge.m * g) ** 2 / (4 * g)
