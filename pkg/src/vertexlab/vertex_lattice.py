"""Finite six-vertex lattices with quasi-local current insertions.

Geometry
--------
Vertical lines sit at x = 1..n_cols and point down; horizontal lines sit at
y = 1..n_rows and point left. The lattice occupies the box
[0.5, n_cols + 0.5] x [0.5, n_rows + 0.5], so every line ends in a boundary
edge of half length. Faces are labelled ``(i, j)`` with centre
``(i + 0.5, j + 0.5)``, ``0 <= i <= n_cols``, ``0 <= j <= n_rows``; the outer
ring of faces touches the box boundary.

Edges are ``("v", x, y)`` (line x, between rows y and y + 1) and
``("h", x, y)`` (line y, between columns x and x + 1).

A tail is a polyline from a point on the box boundary to the midpoint of the
insertion edge, stored in integer units of 1/SCALE of the lattice spacing.
Crossing a vertical line leftwards or a horizontal line upwards applies
t_i^-1 to that edge; the opposite directions apply t_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNormalization, GeometryError, InternalInconsistency, SizeError
from .kernels import FactorGraph, eliminate_sum, enumerate_sum
from .numerics import ModelParams
from .vertex_weights import GeneratorId, generator_on_v, r_matrix, t_power

SCALE = 20
MAX_EDGES = 26
MAX_WINDING = 3
DIRS = {"U": (0, 1), "D": (0, -1), "L": (-1, 0), "R": (1, 0)}


def rot_cw(d):
    return (d[1], -d[0])


def rot_ccw(d):
    return (-d[1], d[0])


# ---------------------------------------------------------------------------
# lattice description


@dataclass
class VertexLatticeSpec:
    """A rectangular six-vertex lattice.

    ``boundary`` maps ``"top"``, ``"bottom"`` (left to right) and ``"left"``,
    ``"right"`` (bottom to top) to lists of +1, -1 or 0, where 0 marks a
    summed boundary edge. ``dressing`` optionally attaches a weight 2-vector
    to summed boundary edges.
    """

    n_cols: int
    n_rows: int
    col_lambdas: list
    row_lambdas: list
    boundary: dict
    params: ModelParams = field(default_factory=ModelParams)
    dressing: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_cols < 1 or self.n_rows < 1:
            raise SizeError("lattice needs at least one row and one column")
        if len(self.col_lambdas) != self.n_cols or len(self.row_lambdas) != self.n_rows:
            raise ValueError("one spectral parameter per line is required")
        self.col_lambdas = [complex(z) for z in self.col_lambdas]
        self.row_lambdas = [complex(z) for z in self.row_lambdas]
        for side, n in (("top", self.n_cols), ("bottom", self.n_cols), ("left", self.n_rows), ("right", self.n_rows)):
            vals = list(self.boundary.get(side, [0] * n))
            if len(vals) != n or any(v not in (1, -1, 0) for v in vals):
                raise ValueError(f"bad boundary data on side {side!r}")
            self.boundary[side] = vals
        if self.n_edges > MAX_EDGES:
            raise SizeError(f"{self.n_edges} edges exceed the limit of {MAX_EDGES}")

    @property
    def n_edges(self) -> int:
        return (self.n_rows + 1) * self.n_cols + (self.n_cols + 1) * self.n_rows

    def boundary_value(self, edge):
        kind, x, y = edge
        if kind == "v" and y == 0:
            return self.boundary["bottom"][x - 1]
        if kind == "v" and y == self.n_rows:
            return self.boundary["top"][x - 1]
        if kind == "h" and x == 0:
            return self.boundary["left"][y - 1]
        if kind == "h" and x == self.n_cols:
            return self.boundary["right"][y - 1]
        return None

    def is_boundary_edge(self, edge) -> bool:
        return self.boundary_value(edge) is not None

    def edges(self):
        """All edges, numbered top row first so that elimination sweeps row by row."""
        out = []
        for y in range(self.n_rows, -1, -1):
            out += [("v", x, y) for x in range(1, self.n_cols + 1)]
            if y >= 1:
                out += [("h", x, y) for x in range(self.n_cols, -1, -1)]
        return out

    def line_lambda(self, edge) -> complex:
        kind, x, y = edge
        return self.col_lambdas[x - 1] if kind == "v" else self.row_lambdas[y - 1]

    def to_json(self) -> dict:
        return {
            "n_cols": self.n_cols,
            "n_rows": self.n_rows,
            "col_lambdas": [[z.real, z.imag] for z in self.col_lambdas],
            "row_lambdas": [[z.real, z.imag] for z in self.row_lambdas],
            "boundary": {k: list(v) for k, v in self.boundary.items()},
            "eta": [self.params.eta.real, self.params.eta.imag],
        }

    @classmethod
    def from_json(cls, data: dict, params: ModelParams | None = None) -> "VertexLatticeSpec":
        if params is None:
            eta = data.get("eta")
            params = ModelParams(eta=complex(*eta)) if eta else ModelParams()
        return cls(
            n_cols=int(data["n_cols"]),
            n_rows=int(data["n_rows"]),
            col_lambdas=[complex(*z) for z in data["col_lambdas"]],
            row_lambdas=[complex(*z) for z in data["row_lambdas"]],
            boundary={k: list(v) for k, v in data["boundary"].items()},
            params=params,
        )


def random_boundary(n_cols: int, n_rows: int, rng: np.random.Generator) -> dict:
    """Seeded boundary on which Z and every current insertion can be non-zero.

    The ice rule conserves the + count, so fixed spins would allow only one
    charge sector. Spins are drawn with equal + counts on the incoming
    (top, right) and outgoing (bottom, left) edges, then one incoming + edge
    and one outgoing + edge are released to be summed. The net charge can
    then be -1, 0 or +1, which covers Z, f_0 and f_1 insertions.
    """
    n_in = n_cols + n_rows
    if n_in < 2:
        raise SizeError("random boundaries need at least two edges per side pair")
    k = int(rng.integers(2, n_in)) if n_in > 2 else 1
    inc = np.array([1] * k + [-1] * (n_in - k))
    out = inc.copy()
    rng.shuffle(inc)
    rng.shuffle(out)
    inc[rng.choice(np.flatnonzero(inc == 1))] = 0
    out[rng.choice(np.flatnonzero(out == 1))] = 0
    return {
        "top": [int(s) for s in inc[:n_cols]],
        "right": [int(s) for s in inc[n_cols:]],
        "bottom": [int(s) for s in out[:n_cols]],
        "left": [int(s) for s in out[n_cols:]],
    }


# ---------------------------------------------------------------------------
# tails


@dataclass(frozen=True)
class TailPath:
    """Dual path from a boundary face to an insertion edge.

    ``steps`` is a string over U/D/L/R; each step moves to the neighbouring
    face, and the edge crossed by the final step carries the insertion.
    ``loops`` adds that many anticlockwise (positive) or clockwise
    (negative) turns around the insertion point just before it is reached.
    """

    anchor: tuple[int, int]
    steps: str
    loops: int = 0

    def faces(self) -> list[tuple[int, int]]:
        i, j = self.anchor
        out = [(i, j)]
        for s in self.steps[:-1]:
            dx, dy = DIRS[s]
            i, j = i + dx, j + dy
            out.append((i, j))
        return out

    def insertion_edge(self):
        i, j = self.faces()[-1]
        last = self.steps[-1]
        return {"L": ("v", i, j), "R": ("v", i + 1, j), "U": ("h", i, j + 1), "D": ("h", i, j)}[last]

    @property
    def final_direction(self):
        return DIRS[self.steps[-1]]


def insertion_point(edge) -> tuple[int, int]:
    kind, x, y = edge
    if kind == "v":
        return (SCALE * x, SCALE * y + SCALE // 2)
    return (SCALE * x + SCALE // 2, SCALE * y)


def face_centre(n_cols, n_rows, face) -> tuple[int, int]:
    """Point the tail passes through in ``face``.

    Faces of the outer ring are clipped by the box, so their points sit a
    quarter spacing inside the boundary.
    """
    i, j = face
    lo, quarter = SCALE // 2 + SCALE // 4, SCALE // 4
    x = min(max(SCALE * i + SCALE // 2, lo), SCALE * n_cols + quarter)
    y = min(max(SCALE * j + SCALE // 2, lo), SCALE * n_rows + quarter)
    return (x, y)


def _anchor_point(n_cols, n_rows, anchor):
    i, j = anchor
    cx, cy = face_centre(n_cols, n_rows, anchor)
    if j == 0:
        return (cx, SCALE // 2)
    if j == n_rows:
        return (cx, SCALE * n_rows + SCALE // 2)
    if i == 0:
        return (SCALE // 2, cy)
    if i == n_cols:
        return (SCALE * n_cols + SCALE // 2, cy)
    raise GeometryError(f"anchor {anchor} is not a boundary face")


def _loop_points(p, back, loops, along):
    """Spiral of |loops| turns around p, entered from the point p + along * back."""
    side = rot_ccw(back) if loops > 0 else rot_cw(back)
    pts = []
    unit = SCALE // 10
    for k in range(abs(loops)):
        r = (4 - k) * unit
        pts.append((p[0] + along * back[0] + r * side[0], p[1] + along * back[1] + r * side[1]))
        pts.append((p[0] - r * back[0] + r * side[0], p[1] - r * back[1] + r * side[1]))
        pts.append((p[0] - r * back[0] - r * side[0], p[1] - r * back[1] - r * side[1]))
        pts.append((p[0] + r * back[0] - r * side[0], p[1] + r * back[1] - r * side[1]))
        along = r
    if loops:
        pts.append((p[0] + along * back[0], p[1] + along * back[1]))
    return pts


def tail_polyline(tail: TailPath, n_cols: int, n_rows: int) -> list[tuple[int, int]]:
    """Polyline vertices (integer units) from the anchor point to the insertion point."""
    if not tail.steps:
        raise GeometryError("a tail needs at least one step")
    if any(s not in DIRS for s in tail.steps):
        raise GeometryError(f"unknown step in {tail.steps!r}")
    if abs(tail.loops) > MAX_WINDING:
        raise GeometryError(f"at most {MAX_WINDING} loops are supported")
    for a, b in zip(tail.steps, tail.steps[1:]):
        if DIRS[a] == tuple(-c for c in DIRS[b]):
            raise GeometryError("tails may not backtrack")
    faces = tail.faces()
    for f in faces:
        if not (0 <= f[0] <= n_cols and 0 <= f[1] <= n_rows):
            raise GeometryError(f"tail leaves the lattice at face {f}")
    if len(set(faces)) != len(faces):
        raise GeometryError("tail visits a face twice")
    pts = [_anchor_point(n_cols, n_rows, tail.anchor)]
    pts += [face_centre(n_cols, n_rows, f) for f in faces]
    edge = tail.insertion_edge()
    p = insertion_point(edge)
    d = tail.final_direction
    back = (-d[0], -d[1])
    last = pts[-1]
    if (last[0] - p[0]) * d[1] != (last[1] - p[1]) * d[0]:
        raise GeometryError("final face centre is not aligned with the insertion point")
    along = abs(last[0] - p[0]) + abs(last[1] - p[1])
    pts += _loop_points(p, back, tail.loops, along)
    pts.append(p)
    pts = _simplify(pts)
    _check_simple(pts)
    return pts


def _simplify(pts):
    out = [pts[0]]
    for q in pts[1:]:
        if q == out[-1]:
            continue
        if len(out) >= 2:
            a, b = out[-2], out[-1]
            if (b[0] - a[0]) * (q[1] - b[1]) == (b[1] - a[1]) * (q[0] - b[0]):
                out[-1] = q
                continue
        out.append(q)
    return out


def _segments(pts):
    return list(zip(pts, pts[1:]))


def _seg_cells(a, b):
    """Unit sub-segments of an axis-parallel segment, as sorted endpoint pairs."""
    (x0, y0), (x1, y1) = a, b
    if x0 != x1 and y0 != y1:
        raise GeometryError("tail segments must be axis parallel")
    out = []
    if x0 == x1:
        for y in range(min(y0, y1), max(y0, y1)):
            out.append(((x0, y), (x0, y + 1)))
    else:
        for x in range(min(x0, x1), max(x0, x1)):
            out.append(((x, y0), (x + 1, y0)))
    return out


def _check_simple(pts):
    seen = {}
    for k, (a, b) in enumerate(_segments(pts)):
        for u in _seg_cells(a, b):
            if u in seen:
                raise GeometryError("tail overlaps itself")
            seen[u] = k
    visits = {}
    for k, (a, b) in enumerate(_segments(pts)):
        for u in _seg_cells(a, b):
            for q in u:
                visits.setdefault(q, set()).add(k)
    for q, ks in visits.items():
        if len(ks) > 2 or (len(ks) == 2 and max(ks) - min(ks) != 1):
            raise GeometryError(f"tail crosses itself near {q}")


def _wrap(angle: float) -> float:
    """Representative of an angle in (-pi, pi]."""
    w = (angle + math.pi) % (2 * math.pi) - math.pi
    return math.pi if w == -math.pi else w


def winding_number(pts) -> int:
    """Full anticlockwise turns of the polyline around its end point.

    The angle swept around the end point is compared with the shortest
    rotation from the anchor direction to the final approach direction, so
    tails with equal anchor, approach direction and winding are homotopic
    in the plane punctured at the insertion.
    """
    p = pts[-1]
    fine = []
    for a, b in _segments(pts[:-1]):
        n = max(abs(b[0] - a[0]), abs(b[1] - a[1]))
        fine += [(a[0] + (b[0] - a[0]) * t / n, a[1] + (b[1] - a[1]) * t / n) for t in range(n)]
    fine.append(pts[-2])
    angles = [math.atan2(q[1] - p[1], q[0] - p[0]) for q in fine]
    sweep = sum(_wrap(a1 - a0) for a0, a1 in zip(angles, angles[1:]))
    m = (sweep - _wrap(angles[-1] - angles[0])) / (2 * math.pi)
    if abs(m - round(m)) > 1e-9:
        raise InternalInconsistency("winding computation produced a non-integer")
    return int(round(m))


@dataclass(frozen=True)
class Crossing:
    edge: tuple
    position: int  # coordinate along the line, integer units
    line_dir: tuple[int, int]
    tail_dir: tuple[int, int]

    @property
    def inverse(self) -> bool:
        """True when the crossing applies t^-1 (tail direction = line direction turned clockwise)."""
        return self.tail_dir == rot_cw(self.line_dir)


def tail_crossings(pts, n_cols, n_rows) -> list[Crossing]:
    out = []
    for a, b in _segments(pts):
        d = (int(np.sign(b[0] - a[0])), int(np.sign(b[1] - a[1])))
        if d[1] == 0:  # horizontal segment crosses vertical lines
            y = a[1]
            lo, hi = sorted((a[0], b[0]))
            for x in range(1, n_cols + 1):
                X = SCALE * x
                if lo < X < hi:
                    if y % SCALE == 0:
                        raise GeometryError("tail runs along a lattice line")
                    out.append(Crossing(("v", x, y // SCALE), y, (0, -1), d))
        else:
            x = a[0]
            lo, hi = sorted((a[1], b[1]))
            for yy in range(1, n_rows + 1):
                Y = SCALE * yy
                if lo < Y < hi:
                    if x % SCALE == 0:
                        raise GeometryError("tail runs along a lattice line")
                    out.append(Crossing(("h", x // SCALE, yy), x, (-1, 0), d))
    return out


# ---------------------------------------------------------------------------
# insertions and factor graphs


@dataclass(frozen=True)
class CurrentInsertion:
    gen: GeneratorId
    tail: TailPath

    def __post_init__(self):
        if not self.gen.is_current:
            raise ValueError("current insertions use f or f_bar generators")

    @property
    def barred(self) -> bool:
        return self.gen.kind == "f_bar"


def winding_of(ins: CurrentInsertion, spec: VertexLatticeSpec) -> int:
    return winding_number(tail_polyline(ins.tail, spec.n_cols, spec.n_rows))


def _edge_operators(spec: VertexLatticeSpec, ins: CurrentInsertion | None):
    """Per-edge operator lists ordered from upstream to downstream."""
    ops: dict = {}
    if ins is None:
        return ops, None
    pts = tail_polyline(ins.tail, spec.n_cols, spec.n_rows)
    edge = ins.tail.insertion_edge()
    if spec.is_boundary_edge(edge):
        raise GeometryError("insertion edge lies on the boundary")
    i = ins.gen.index
    for c in tail_crossings(pts, spec.n_cols, spec.n_rows):
        ops.setdefault(c.edge, []).append((c.position, t_power(i, -1 if c.inverse else 1, spec.params)))
    p = insertion_point(edge)
    pos = p[1] if edge[0] == "v" else p[0]
    ops.setdefault(edge, []).append((pos, None))
    for e in ops:
        ops[e].sort(key=lambda item: -item[0])  # upstream first: larger coordinate
    return ops, edge


def build_factor_graph(spec: VertexLatticeSpec, ins: CurrentInsertion | None = None) -> FactorGraph:
    g = FactorGraph(lo=0, hi=1)
    ops, ins_edge = _edge_operators(spec, ins)
    var_in, var_out = {}, {}
    for e in spec.edges():
        b = spec.boundary_value(e)
        if b is not None and b != 0:
            v = g.fixed(0 if b == 1 else 1)
        else:
            v = g.binary()
            if e in spec.dressing:
                g.add_factor((v,), np.asarray(spec.dressing[e], dtype=complex))
        var_in[e] = var_out[e] = v
        if e == ins_edge:
            if b is not None:
                raise GeometryError("insertion edge lies on the boundary")
            var_out[e] = g.binary()
    for e, lst in ops.items():
        downstream = False
        for _, mat in lst:
            if mat is None:
                x = generator_on_v(ins.gen, spec.line_lambda(e), spec.params)
                g.add_factor((var_in[e], var_out[e]), x.T)  # table[in, out] = x[out, in]
                downstream = True
                continue
            v = var_out[e] if downstream else var_in[e]
            g.add_factor((v,), np.diag(mat))
    for y in range(1, spec.n_rows + 1):
        for x in range(1, spec.n_cols + 1):
            r = r_matrix(spec.col_lambdas[x - 1] - spec.row_lambdas[y - 1], spec.params)
            tab = r.reshape(2, 2, 2, 2).transpose(2, 3, 0, 1)  # [top, right, bottom, left]
            top, right = ("v", x, y), ("h", x, y)
            bottom, left = ("v", x, y - 1), ("h", x - 1, y)
            g.add_factor((var_out[top], var_out[right], var_in[bottom], var_in[left]), tab)
    return g


def _evaluate(g: FactorGraph, method: str, tol: float) -> complex:
    if method == "eliminate":
        return eliminate_sum(g)
    if method == "enumerate":
        return enumerate_sum(g)
    a, b = enumerate_sum(g), eliminate_sum(g)
    if abs(a - b) > tol * (1.0 + abs(a)):
        raise InternalInconsistency(f"enumeration {a} and contraction {b} disagree")
    return a


def _default_method(g: FactorGraph) -> str:
    return "both" if g.n_free() <= 20 else "eliminate"


def partition_function(spec: VertexLatticeSpec, method: str | None = None) -> complex:
    """Configuration sum, cross-checked by enumeration and row-by-row contraction."""
    g = build_factor_graph(spec)
    return _evaluate(g, method or _default_method(g), 1e-12)


def configuration_sum(spec: VertexLatticeSpec, ins: CurrentInsertion | None, method: str | None = None) -> complex:
    """Unnormalised sum with the insertion and its tail factors included."""
    g = build_factor_graph(spec, ins)
    return _evaluate(g, method or _default_method(g), 1e-11)


def current_expectation(spec: VertexLatticeSpec, ins: CurrentInsertion, method: str | None = None) -> complex:
    z = partition_function(spec, method)
    if abs(z) < spec.params.tol.singularity_guard * 1e-6:
        raise DegenerateNormalization("partition function vanishes")
    return configuration_sum(spec, ins, method) / z


# ---------------------------------------------------------------------------
# lattice laws


def plaquette_insertions(spec: VertexLatticeSpec, vertex, gen: GeneratorId, prefix: str | None = None):
    """Insertions on the top, left, bottom and right edges of ``vertex``.

    The four tails share a prefix ending in the face south-east of the
    vertex and then pass around the vertex as in the four-term relation.
    """
    x, y = vertex
    if not (2 <= x <= spec.n_cols - 1 and 2 <= y <= spec.n_rows - 1):
        raise GeometryError(f"vertex {vertex} has a boundary edge or no interior south-east face")
    anchor = (x, 0)
    if prefix is None:
        prefix = "U" * (y - 1)
    names = {"top": "UL", "left": "LU", "bottom": "L", "right": "U"}
    return {k: CurrentInsertion(gen, TailPath(anchor, prefix + s)) for k, s in names.items()}


def check_plaquette_conservation(spec: VertexLatticeSpec, vertex, gen: GeneratorId, method: str | None = None):
    """j(top) - j(left) - j(bottom) + j(right), normalised by the largest term.

    Returns ``(residual, values)`` with ``values`` keyed by edge position.
    """
    ins = plaquette_insertions(spec, vertex, gen)
    expected = {"top": ("v", vertex[0], vertex[1]), "left": ("h", vertex[0] - 1, vertex[1]),
                "bottom": ("v", vertex[0], vertex[1] - 1), "right": ("h", vertex[0], vertex[1])}
    for k, e in expected.items():
        if ins[k].tail.insertion_edge() != e:
            raise GeometryError("insertion points are not around a single vertex")
    z = partition_function(spec, method)
    if abs(z) == 0:
        raise DegenerateNormalization("partition function vanishes")
    vals = {k: configuration_sum(spec, v, method) / z for k, v in ins.items()}
    terms = [vals["top"], -vals["left"], -vals["bottom"], vals["right"]]
    scale = max(abs(t) for t in terms)
    res = abs(sum(terms)) / scale if scale > 0 else 0.0
    return float(res), vals


def unwind(ins: CurrentInsertion, params: ModelParams, spec: VertexLatticeSpec | None = None):
    """Equivalent insertion with M = 0 and the scalar picked up by unwinding.

    expectation(ins) == factor * expectation(unwound).
    """
    if spec is not None:
        m = winding_of(ins, spec)
    else:
        m = ins.tail.loops
    unwound = CurrentInsertion(ins.gen, TailPath(ins.tail.anchor, ins.tail.steps, 0))
    if spec is not None and winding_of(unwound, spec) != 0:
        raise GeometryError("base path already winds around the insertion")
    sign = -1 if ins.gen.kind == "f" else 1
    return unwound, complex(np.exp(2 * sign * m * params.eta))


def check_path_independence(spec: VertexLatticeSpec, a: CurrentInsertion, b: CurrentInsertion) -> float:
    if a.tail.insertion_edge() != b.tail.insertion_edge() or a.gen != b.gen:
        raise GeometryError("tails must end on the same edge with the same generator")
    if a.tail.anchor != b.tail.anchor or a.tail.final_direction != b.tail.final_direction:
        raise GeometryError("tails must share the anchor and the approach direction")
    if winding_of(a, spec) != winding_of(b, spec):
        raise GeometryError("tails differ in winding number")
    va, vb = configuration_sum(spec, a), configuration_sum(spec, b)
    return abs(va - vb) / max(abs(va), abs(vb), 1e-300)
