"""Baxter intertwiners, trigonometric SOS face weights and the vertex-face correspondence.

Heights are integer offsets ``k`` standing for ``x0 + k`` (or residues mod ``n``
in cyclic mode). A face weight ``W(a, b, c, d | lam)`` lists the heights of the
NW, NE, SE and SW corners of a face; on the lattice the face sits on the
crossing of column line ``x`` and row line ``y`` with ``lam = lam_col - lam_row``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, SingularHeight, SizeError
from .kernels import FactorGraph, eliminate_sum, enumerate_sum
from .numerics import ModelParams, residual
from .vertex_weights import r_matrix

VARIANTS = ("psi", "psi_star", "psi_prime")
MAX_FACES = 16


def height_step(a: int, b: int, n: int | None = None) -> int:
    """+1 or -1 if b is a neighbour of a (mod n in cyclic mode), else 0."""
    if n:
        diff = (b - a) % n
        if n > 2 and diff == 1:
            return 1
        if n > 2 and diff == n - 1:
            return -1
        return 0
    diff = b - a
    return diff if diff in (1, -1) else 0


def _sinh_height(a, params: ModelParams):
    value = np.sinh(params.height(a) * params.eta)
    if abs(value) < params.tol.singularity_guard:
        raise SingularHeight(f"sinh((x0 + {a}) eta) vanishes")
    return value


def intertwiner(variant: str, a: int, b: int, lam, params: ModelParams, n: int | None = None) -> np.ndarray:
    """Components of psi(a, b | lam), psi*(a, b | lam) or psi'(a, b | lam)."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown intertwiner variant {variant!r}")
    s = height_step(a, b, n)
    if s == 0:
        raise ValueError(f"heights {a} and {b} are not adjacent")
    arg = s * params.height(a) * params.eta
    if variant == "psi":
        return np.array([np.exp((-lam + arg) / 2), np.exp((lam - arg) / 2)], dtype=complex)
    star = s / (2 * _sinh_height(a, params)) * np.array(
        [np.exp((lam + arg) / 2), -np.exp((-lam - arg) / 2)], dtype=complex
    )
    if variant == "psi_star":
        return star
    ratio = _sinh_height(a, params) / _sinh_height(b, params)
    return ratio * star * np.array([np.exp(params.eta), np.exp(-params.eta)])


def face_weight(a: int, b: int, c: int, d: int, lam, params: ModelParams, n: int | None = None) -> complex:
    steps = (height_step(a, b, n), height_step(b, c, n), height_step(c, d, n), height_step(d, a, n))
    if 0 in steps:
        return 0j
    eta = params.eta
    if b != d:
        if a != c:
            return 0j
        return complex(np.sinh(lam) * np.sinh(params.height(b) * eta) / _sinh_height(a, params))
    if a != c:
        return complex(np.sinh(lam + eta))
    s = steps[0]
    return complex(np.sinh(eta) * np.sinh(params.height(a) * eta - s * lam) / _sinh_height(a, params))


def face_table(lam, params: ModelParams, lo: int, hi: int, n: int | None = None) -> np.ndarray:
    """W over a height window: ``table[a - lo, b - lo, c - lo, d - lo]``."""
    size = hi - lo + 1
    out = np.zeros((size,) * 4, dtype=complex)
    for a in range(lo, hi + 1):
        for sb, sd in itertools.product((1, -1), repeat=2):
            b, d = _wrap(a + sb, n), _wrap(a + sd, n)
            for sc in (1, -1):
                c = _wrap(b + sc, n)
                if not all(lo <= h <= hi for h in (b, c, d)):
                    continue
                out[a - lo, b - lo, c - lo, d - lo] = face_weight(a, b, c, d, lam, params, n)
    return out


def _wrap(h, n):
    return h % n if n else h


# ---------------------------------------------------------------------------
# local identities


def check_virf(direction: int, heights, l1, l2, params: ModelParams) -> float:
    """Vertex-face intertwining relations.

    direction 1: R(l1-l2) psi(a,b|l1) x psi(b,c|l2) = sum_d W(a,b,c,d) psi(d,c|l1) x psi(a,d|l2),
    with ``heights = (a, b, c)``.
    direction 2: psi*(d,c|l1) x psi*(a,d|l2) R(l1-l2) = sum_b W(a,b,c,d) psi*(a,b|l1) x psi*(b,c|l2),
    with ``heights = (a, d, c)``.
    """
    r = r_matrix(l1 - l2, params)
    lam = l1 - l2
    if direction == 1:
        a, b, c = heights
        lhs = r @ np.kron(intertwiner("psi", a, b, l1, params), intertwiner("psi", b, c, l2, params))
        rhs = sum(
            face_weight(a, b, c, d, lam, params)
            * np.kron(intertwiner("psi", d, c, l1, params), intertwiner("psi", a, d, l2, params))
            for d in (a - 1, a + 1)
            if height_step(d, c)
        )
    elif direction == 2:
        a, d, c = heights
        lhs = np.kron(intertwiner("psi_star", d, c, l1, params), intertwiner("psi_star", a, d, l2, params)) @ r
        rhs = sum(
            face_weight(a, b, c, d, lam, params)
            * np.kron(intertwiner("psi_star", a, b, l1, params), intertwiner("psi_star", b, c, l2, params))
            for b in (a - 1, a + 1)
            if height_step(b, c)
        )
    else:
        raise ValueError("direction must be 1 or 2")
    return residual(lhs, np.zeros(4) + rhs)


def check_inversions(which: str, a: int, lam, params: ModelParams) -> float:
    """Inversion and completeness relations of the intertwiners around height ``a``.

    ``a``: psi*(a,c) psi(a,b) = delta_bc; ``b``: sum_b psi(a,b) psi*(a,b) = 1;
    ``c``: psi'(c,a) psi(b,a) = delta_bc; ``d``: sum_b psi(b,a) psi'(b,a) = 1.
    """
    nbrs = (a - 1, a + 1)
    if which == "a":
        got = [intertwiner("psi_star", a, c, lam, params) @ intertwiner("psi", a, b, lam, params) for b in nbrs for c in nbrs]
        return residual(np.array(got), np.array([b == c for b in nbrs for c in nbrs], dtype=complex))
    if which == "c":
        got = [intertwiner("psi_prime", c, a, lam, params) @ intertwiner("psi", b, a, lam, params) for b in nbrs for c in nbrs]
        return residual(np.array(got), np.array([b == c for b in nbrs for c in nbrs], dtype=complex))
    if which == "b":
        tot = sum(np.outer(intertwiner("psi", a, b, lam, params), intertwiner("psi_star", a, b, lam, params)) for b in nbrs)
        return residual(tot, np.eye(2))
    if which == "d":
        tot = sum(np.outer(intertwiner("psi", b, a, lam, params), intertwiner("psi_prime", b, a, lam, params)) for b in nbrs)
        return residual(tot, np.eye(2))
    raise ValueError("which must be one of a, b, c, d")


def check_sos_ybe(heights, l1, l2, l3, params: ModelParams) -> float:
    """Face Yang-Baxter equation around the hexagon ``(a, b, c, d, e, f)``."""
    a, b, c, d, e, f = heights
    l12, l13, l23 = l1 - l2, l1 - l3, l2 - l3
    gs = range(min(heights) - 2, max(heights) + 3)
    w = face_weight
    lhs = sum(w(f, g, d, e, l12, params) * w(a, b, g, f, l13, params) * w(b, c, d, g, l23, params) for g in gs)
    rhs = sum(w(a, g, e, f, l23, params) * w(g, c, d, e, l13, params) * w(a, b, c, g, l12, params) for g in gs)
    scale = max(abs(lhs), abs(rhs))
    return float(abs(lhs - rhs) / (1.0 + scale))


def admissible_hexagons(a: int):
    """All hexagons (a, ..., f) that close as a +-1 walk starting from ``a``."""
    for steps in itertools.product((1, -1), repeat=5):
        hs = [a]
        for s in steps:
            hs.append(hs[-1] + s)
        if abs(hs[-1] - a) == 1:
            yield tuple(hs)


# ---------------------------------------------------------------------------
# lattices


def ring_faces(n_cols: int, n_rows: int) -> list[tuple[int, int]]:
    """Boundary faces anticlockwise from the bottom-left corner face."""
    ring = [(i, 0) for i in range(n_cols + 1)]
    ring += [(n_cols, j) for j in range(1, n_rows + 1)]
    ring += [(i, n_rows) for i in range(n_cols - 1, -1, -1)]
    ring += [(0, j) for j in range(n_rows - 1, 0, -1)]
    return ring


def edge_between(f1, f2):
    """The lattice edge separating two neighbouring faces."""
    (i1, j1), (i2, j2) = f1, f2
    if j1 == j2 and abs(i1 - i2) == 1:
        return ("v", max(i1, i2), j1)
    if i1 == i2 and abs(j1 - j2) == 1:
        return ("h", i1, max(j1, j2))
    raise GeometryError(f"faces {f1} and {f2} are not neighbours")


@dataclass
class SosLatticeSpec:
    """SOS lattice with ``n_cols x n_rows`` weighted faces.

    ``boundary`` lists the heights of the outer ring of height cells
    anticlockwise from the bottom-left corner (see :func:`ring_faces`);
    ``None`` marks a free boundary height that is summed over.
    """

    n_cols: int
    n_rows: int
    col_lambdas: list
    row_lambdas: list
    boundary: list
    params: ModelParams = field(default_factory=ModelParams)
    cyclic_n: int | None = None

    def __post_init__(self):
        if len(self.col_lambdas) != self.n_cols or len(self.row_lambdas) != self.n_rows:
            raise ValueError("one spectral parameter per line is required")
        self.col_lambdas = [complex(z) for z in self.col_lambdas]
        self.row_lambdas = [complex(z) for z in self.row_lambdas]
        ring = ring_faces(self.n_cols, self.n_rows)
        if len(self.boundary) != len(ring):
            raise ValueError(f"boundary needs {len(ring)} heights")
        if self.cyclic_n is not None and self.cyclic_n < 3:
            raise ValueError("cyclic mode needs n >= 3")
        if self.cyclic_n:
            self.boundary = [None if h is None else h % self.cyclic_n for h in self.boundary]
        for k, h in enumerate(self.boundary):
            h2 = self.boundary[(k + 1) % len(ring)]
            if h is not None and h2 is not None and not height_step(h, h2, self.cyclic_n):
                raise ValueError("boundary heights must form a closed +-1 walk")
        if self.n_cols * self.n_rows > MAX_FACES:
            raise SizeError(f"at most {MAX_FACES} faces are supported")

    def face_lambda(self, x: int, y: int) -> complex:
        return self.col_lambdas[x - 1] - self.row_lambdas[y - 1]

    def fixed_heights(self) -> dict:
        return {f: h for f, h in zip(ring_faces(self.n_cols, self.n_rows), self.boundary) if h is not None}

    def to_json(self) -> dict:
        return {
            "n_cols": self.n_cols,
            "n_rows": self.n_rows,
            "col_lambdas": [[z.real, z.imag] for z in self.col_lambdas],
            "row_lambdas": [[z.real, z.imag] for z in self.row_lambdas],
            "boundary": list(self.boundary),
            "cyclic_n": self.cyclic_n,
        }

    @classmethod
    def from_json(cls, data: dict, params: ModelParams | None = None) -> "SosLatticeSpec":
        return cls(
            n_cols=int(data["n_cols"]),
            n_rows=int(data["n_rows"]),
            col_lambdas=[complex(*z) for z in data["col_lambdas"]],
            row_lambdas=[complex(*z) for z in data["row_lambdas"]],
            boundary=list(data["boundary"]),
            params=params or ModelParams(),
            cyclic_n=data.get("cyclic_n"),
        )


def boundary_extends(n_cols: int, n_rows: int, walk) -> bool:
    """Whether pinned ring heights admit a +-1 height function on the interior.

    On the grid of cells this holds exactly when no two pinned cells differ by
    more than their Manhattan distance. ``None`` entries are unpinned.
    """
    pinned = [(f, h) for f, h in zip(ring_faces(n_cols, n_rows), walk) if h is not None]
    return all(abs(h1 - h2) <= abs(x1 - x2) + abs(y1 - y2)
               for k, ((x1, y1), h1) in enumerate(pinned) for (x2, y2), h2 in pinned[k + 1:])


def random_boundary_walk(n_cols: int, n_rows: int, rng: np.random.Generator, start: int = 0) -> list[int]:
    """Uniformly drawn closed +-1 walk around the ring that extends to the interior."""
    length = len(ring_faces(n_cols, n_rows))
    ups = length // 2
    steps = np.array([1] * ups + [-1] * (length - ups))
    while True:
        rng.shuffle(steps)
        walk = [start + int(h) for h in np.concatenate(([0], np.cumsum(steps[:-1])))]
        if boundary_extends(n_cols, n_rows, walk):
            return walk


@dataclass
class HeightModel:
    """Height variables on cells with +-1 constraints along a spanning forest.

    ``cells`` is a list of hashable cell ids, ``adjacent`` maps each cell to
    the cells across a lattice line, and ``fixed`` gives pinned heights.
    """

    cells: list
    adjacent: dict
    fixed: dict
    cyclic_n: int | None = None
    graph: FactorGraph = None
    var: dict = None

    def build(self, elimination_key=None):
        depth = {c: 0 for c in self.fixed}
        parent = {}
        queue = deque(c for c in self.cells if c in self.fixed)
        if not queue:
            raise GeometryError("at least one height must be fixed")
        while queue:
            c = queue.popleft()
            for nb in self.adjacent[c]:
                if nb not in depth:
                    depth[nb] = depth[c] + 1
                    parent[nb] = c
                    queue.append(nb)
        missing = [c for c in self.cells if c not in depth]
        if missing:
            raise GeometryError(f"cells {missing[:3]} are not connected to a fixed height")
        if self.cyclic_n:
            g = FactorGraph(lo=0, hi=self.cyclic_n - 1, modulus=self.cyclic_n)
        else:
            reach = max(depth.values())
            g = FactorGraph(lo=min(self.fixed.values()) - reach, hi=max(self.fixed.values()) + reach)
        var = {}
        for c in sorted(self.cells, key=lambda c: depth[c]):
            var[c] = g.fixed(self.fixed[c]) if c in self.fixed else g.relative(var[parent[c]])
        self.graph, self.var = g, var
        self.order = None
        if elimination_key is not None:
            self.order = [var[c] for c in sorted(self.cells, key=elimination_key)]
        return g

    def add_face(self, corners, table):
        self.graph.add_factor(tuple(self.var[c] for c in corners), table)

    def total(self, method: str = "both", tol: float = 1e-11) -> complex:
        from .errors import InternalInconsistency

        if method == "enumerate":
            return enumerate_sum(self.graph)
        if method == "eliminate":
            return eliminate_sum(self.graph, self.order)
        a, b = enumerate_sum(self.graph), eliminate_sum(self.graph, self.order)
        if abs(a - b) > tol * (1.0 + abs(a)):
            raise InternalInconsistency(f"enumeration {a} and contraction {b} disagree")
        return a


def _plain_height_model(spec: SosLatticeSpec) -> HeightModel:
    cells = [(i, j) for j in range(spec.n_rows + 1) for i in range(spec.n_cols + 1)]
    adjacent = {c: [] for c in cells}
    for i, j in cells:
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (i + di, j + dj)
            if nb in adjacent:
                adjacent[(i, j)].append(nb)
    fixed = spec.fixed_heights()
    ring = ring_faces(spec.n_cols, spec.n_rows)
    # free boundary cells are pinned only through their ring neighbours
    for k, f in enumerate(ring):
        if f not in fixed:
            adjacent[f] = [g for g in adjacent[f] if g in (ring[k - 1], ring[(k + 1) % len(ring)])] + [
                g for g in adjacent[f] if g not in ring
            ]
    model = HeightModel(cells, adjacent, fixed, spec.cyclic_n)
    model.build()
    return model


def plain_face_model(spec: SosLatticeSpec) -> HeightModel:
    """Height model of the lattice with every face weight attached."""
    model = _plain_height_model(spec)
    g = model.graph
    for y in range(1, spec.n_rows + 1):
        for x in range(1, spec.n_cols + 1):
            tab = face_table(spec.face_lambda(x, y), spec.params, g.lo, g.hi, spec.cyclic_n)
            model.add_face(((x - 1, y), (x, y), (x, y - 1), (x - 1, y - 1)), tab)
    return model


def sos_partition_function(spec: SosLatticeSpec, method: str | None = None) -> complex:
    """Sum over interior (and free boundary) heights of the product of face weights."""
    model = plain_face_model(spec)
    if method is None:
        method = "both" if model.graph.n_free() <= 20 else "eliminate"
    return model.total(method)


# ---------------------------------------------------------------------------
# vertex-face correspondence for partition functions


def dressing_vectors(n_cols, n_rows, col_lambdas, row_lambdas, heights: dict, params: ModelParams,
                     bottom_variant=None, edge_heights=None):
    """Boundary weight vectors of the dressed six-vertex lattice.

    ``heights`` maps every ring cell to its height. Incoming edges (top,
    right) carry psi, outgoing edges (bottom, left) carry psi*.
    ``bottom_variant`` optionally maps a column to ``"psi_prime"`` for
    bottom edges that use the primed dual intertwiner instead.
    ``edge_heights`` optionally maps an edge to the (inner, outer) height
    pair to use there in place of the two ring cells it separates.
    """
    bottom_variant = bottom_variant or {}
    edge_heights = edge_heights or {}

    def vec(variant, edge, a, b, lam):
        a, b = edge_heights.get(edge, (a, b))
        return intertwiner(variant, a, b, lam, params)

    out = {}
    for x in range(1, n_cols + 1):
        lam = col_lambdas[x - 1]
        top, bottom = ("v", x, n_rows), ("v", x, 0)
        out[top] = vec("psi", top, heights[(x - 1, n_rows)], heights[(x, n_rows)], lam)
        out[bottom] = vec(bottom_variant.get(x, "psi_star"), bottom, heights[(x - 1, 0)], heights[(x, 0)], lam)
    for y in range(1, n_rows + 1):
        lam = row_lambdas[y - 1]
        right, left = ("h", n_cols, y), ("h", 0, y)
        out[right] = vec("psi", right, heights[(n_cols, y)], heights[(n_cols, y - 1)], lam)
        out[left] = vec("psi_star", left, heights[(0, y)], heights[(0, y - 1)], lam)
    return out


def free_boundary_assignments(boundary: list, n: int | None = None):
    """All completions of a ring walk with free entries."""
    length = len(boundary)
    free = [k for k, h in enumerate(boundary) if h is None]
    for choice in itertools.product((1, -1), repeat=len(free)):
        walk = list(boundary)
        for k, s in zip(free, choice):
            prev = walk[k - 1]
            if prev is None:
                break
            walk[k] = _wrap(prev + s, n)
        else:
            if all(height_step(walk[k], walk[(k + 1) % length], n) for k in range(length)):
                yield walk


def dressed_vertex_partition(spec: SosLatticeSpec, bottom_variant=None) -> complex:
    """Six-vertex partition function with boundary spins dressed by intertwiners."""
    from .vertex_lattice import VertexLatticeSpec, partition_function

    ring = ring_faces(spec.n_cols, spec.n_rows)
    total = 0j
    blank = {"top": [0] * spec.n_cols, "bottom": [0] * spec.n_cols, "left": [0] * spec.n_rows, "right": [0] * spec.n_rows}
    seen = set()
    for walk in free_boundary_assignments(spec.boundary):
        if tuple(walk) in seen:
            continue
        seen.add(tuple(walk))
        heights = dict(zip(ring, walk))
        dress = dressing_vectors(
            spec.n_cols, spec.n_rows, spec.col_lambdas, spec.row_lambdas, heights, spec.params, bottom_variant
        )
        vspec = VertexLatticeSpec(
            spec.n_cols, spec.n_rows, spec.col_lambdas, spec.row_lambdas,
            {k: list(v) for k, v in blank.items()}, spec.params, dress,
        )
        total += partition_function(vspec)
    return total


def check_partition_correspondence(spec: SosLatticeSpec) -> float:
    """|Z_6V(dressed) - Z_SOS| / max(|Z_SOS|, tiny)."""
    if spec.cyclic_n:
        raise ValueError("the correspondence check uses unrestricted heights")
    z_sos = sos_partition_function(spec)
    z_v = dressed_vertex_partition(spec)
    return float(abs(z_v - z_sos) / max(abs(z_sos), abs(z_v), 1e-300))
