"""Dressed generators of the SOS model and quasi-local SOS currents.

Local weights
    ``F_i(a; b, c)`` and ``Fbar_i(a; b, c)`` dress a current generator with
    intertwiners, ``T^-_i(a, b, c, d)`` and ``T^+_i(a, b, c, d)`` dress the
    tail operators t_i^-1 and t_i.

Lattice currents
    The tail polyline and the lattice lines cut the box into regions; every
    region carries a height. Lattice-line crossings carry face weights W, tail
    crossings carry T^-/T^+, the insertion point carries F (or Fbar), and
    left-to-down or down-to-left turns of the tail carry a sinh ratio of the
    heights inside and outside the turn.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNormalization, GeometryError, ProbeInconclusive
from .numerics import ModelParams
from .sos_weights import (
    HeightModel,
    SosLatticeSpec,
    _sinh_height,
    dressing_vectors,
    face_table,
    face_weight,
    height_step,
    intertwiner,
    ring_faces,
    sos_partition_function,
)
from .vertex_lattice import (
    SCALE,
    CurrentInsertion,
    TailPath,
    VertexLatticeSpec,
    configuration_sum,
    rot_cw,
    tail_crossings,
    tail_polyline,
    winding_number,
)
from .vertex_weights import GeneratorId, generator_on_v

MU = {0: 1, 1: -1}


def _adjacent(a, b) -> bool:
    return abs(a - b) == 1


# ---------------------------------------------------------------------------
# dressed generators


def dressed_f(index: int, barred: bool, a, b, c, lam, params: ModelParams) -> complex:
    """Closed form of F_i(a; b, c) or Fbar_i(a; b, c); zero off the admissible set."""
    if not (_adjacent(a, b) and _adjacent(a, c)):
        return 0j
    if barred:
        return complex(np.exp(2 * lam + params.eta)) * dressed_f(1 - index, False, a, b, c, lam, params)
    s, t = b - a, c - a
    big_a = _sinh_height(a, params)
    arg = params.height(a) * params.eta
    if index == 0:
        val = s / (2 * big_a) if s == t else t * np.exp(t * arg) / (2 * big_a)
    else:
        val = -s * np.exp(-2 * lam) / (2 * big_a) if s == t else -t * np.exp(-2 * lam - t * arg) / (2 * big_a)
    return complex(val)


def dressed_f_contracted(index: int, barred: bool, a, b, c, lam, params: ModelParams) -> complex:
    """psi*(a, c) x psi(a, b) with x = f_i or fbar_i, evaluated as 2-vector algebra."""
    if not (_adjacent(a, b) and _adjacent(a, c)):
        return 0j
    gen = GeneratorId("f_bar" if barred else "f", index)
    x = generator_on_v(gen, lam, params)
    return complex(intertwiner("psi_star", a, c, lam, params) @ x @ intertwiner("psi", a, b, lam, params))


def _mu(index_or_mu) -> complex:
    if isinstance(index_or_mu, (int, np.integer)) and index_or_mu in MU:
        return MU[int(index_or_mu)]
    return complex(index_or_mu)


def dressed_t(index_or_mu, sign: str, a, b, c, d, params: ModelParams) -> complex:
    """Closed form of T^sign(a, b, c, d) (or tau^sign_mu for a complex mu).

    ``index_or_mu`` is 0 or 1 for T_0, T_1 (mu = 1, -1); any other number is
    used as mu directly. The weights do not depend on the spectral parameter.
    """
    if sign == "+":
        return dressed_t(index_or_mu, "-", b, a, d, c, params)
    if sign != "-":
        raise ValueError("sign must be '+' or '-'")
    if not (_adjacent(a, b) and _adjacent(c, d)):
        return 0j
    mu = _mu(index_or_mu)
    s, t = b - a, c - d
    eta = params.eta
    ha, hd = params.height(a), params.height(d)
    num = np.sinh((hd + ha + 2 * s * mu) * eta / 2) if s == t else np.sinh((hd - ha + 2 * t * mu) * eta / 2)
    return complex(num / _sinh_height(d, params))


def dressed_t_contracted(index_or_mu, sign: str, a, b, c, d, params: ModelParams, lam=0.0) -> complex:
    """psi*(d,c) diag(e^{mu eta}, e^{-mu eta}) psi(a,b) for minus; psi' with the inverse diagonal for plus."""
    if not (_adjacent(a, b) and _adjacent(c, d)):
        return 0j
    mu = _mu(index_or_mu)
    eta = params.eta
    if sign == "-":
        diag = np.diag([np.exp(mu * eta), np.exp(-mu * eta)])
        left = intertwiner("psi_star", d, c, lam, params)
    else:
        diag = np.diag([np.exp(-mu * eta), np.exp(mu * eta)])
        left = intertwiner("psi_prime", d, c, lam, params)
    return complex(left @ diag @ intertwiner("psi", a, b, lam, params))


def _sh(h, params):
    return _sinh_height(h, params)


# ---------------------------------------------------------------------------
# local identities


def _near(*hs):
    return range(min(hs) - 2, max(hs) + 3)


def _tail_ybe_residual(sign, index_or_mu, heights, l1, l2, params):
    a, b, c, d, e, f = heights
    lam = l1 - l2

    def t(*h):
        return dressed_t(index_or_mu, sign, *h, params)

    w = face_weight
    gs = _near(*heights)
    lhs = sum(w(f, g, d, e, lam, params) * t(a, b, g, f) * t(b, c, d, g) for g in gs)
    rhs = sum(t(a, g, e, f) * t(g, c, d, e) * w(a, b, c, g, lam, params) for g in gs)
    return lhs, rhs


def check_tail_ybe(sign: str, index_or_mu, heights, l1, l2, params: ModelParams) -> float:
    """Moving a tail segment through a face weight.

    Both signs use ``sum_g W(f,g,d,e) T(a,b,g,f) T(b,c,d,g) = sum_g T(a,g,e,f) T(g,c,d,e) W(a,b,c,g)``.
    """
    lhs, rhs = _tail_ybe_residual(sign, index_or_mu, heights, l1, l2, params)
    return float(abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs))))


def tail_ybe_hexagons():
    """Height data (a, b, c, d, e, f) with a +-1 walk a-b-c-d and free e, f."""
    a = 0
    for sb, sc in itertools.product((1, -1), repeat=2):
        b = a + sb
        c = b + sc
        for d in (c - 1, c + 1):
            for e in range(-3, 4):
                for f in range(-3, 4):
                    yield (a, b, c, d, e, f)


def check_sos_inversions(which: int, index: int, heights, params: ModelParams) -> float:
    """Tail inversion relations for heights ``(a, b, c, d)`` with b, c neighbours of a."""
    a, b, c, d = heights
    es = _near(*heights)

    def tm(*h):
        return dressed_t(index, "-", *h, params)

    def tp(*h):
        return dressed_t(index, "+", *h, params)

    delta = 1.0 if b == c else 0.0
    if which == 1:
        got = sum(tp(d, e, a, c) * tm(b, a, e, d) for e in es)
        want = delta
    elif which == 2:
        got = sum(_sh(e, params) / _sh(a, params) * tm(d, e, a, c) * tp(b, a, e, d) for e in es if _adjacent(e, d))
        want = _sh(d, params) / _sh(b, params) * delta
    elif which == 3:
        got = sum(tm(e, d, c, a) * tp(a, b, d, e) for e in es)
        want = delta
    elif which == 4:
        got = sum(_sh(e, params) / _sh(a, params) * tp(e, d, c, a) * tm(a, b, d, e) for e in es if _adjacent(e, d))
        want = _sh(d, params) / _sh(b, params) * delta
    else:
        raise ValueError("which must be 1..4")
    return float(abs(got - want) / (1.0 + abs(want)))


def inversion_patterns(a: int = 0):
    for b in (a - 1, a + 1):
        for c in (a - 1, a + 1):
            for d in (a - 2, a, a + 2):
                yield (a, b, c, d)


def commutation_phase(which: int, index: int, params: ModelParams) -> complex:
    """Phase on the right-hand side of the tail/insertion commutation relations.

    Relations 1 and 2 act on F, 3 and 4 on Fbar. For index 1 the phases of
    each pair are the reverse of the naive exp(+-2(1 - mu) eta) assignment.
    """
    mu = MU[index]
    eta = params.eta
    phases = {1: np.exp(2 * (mu - 1) * eta), 2: np.exp(2 * (1 - mu) * eta),
              3: np.exp(2 * (1 - mu) * eta), 4: np.exp(2 * (mu - 1) * eta)}
    return complex(phases[which])


def check_sos_commutation(which: int, index: int, heights, lam, params: ModelParams) -> float:
    """Winding a tail once around the insertion triangle ``(a; b, c)``."""
    a, b, c = heights
    barred = which in (3, 4)
    hs = _near(a, b, c)

    def tm(*h):
        return dressed_t(index, "-", *h, params)

    def tp(*h):
        return dressed_t(index, "+", *h, params)

    def f(*h):
        return dressed_f(index, barred, *h, lam, params)

    if which in (1, 3):
        got = sum(
            _sh(d, params) / _sh(a, params) * tp(d, e, c, a) * f(d, c, e) * tm(a, b, c, d)
            for d in hs for e in hs if _adjacent(e, d)
        )
    else:
        got = sum(
            _sh(e, params) / _sh(b, params) * tm(d, b, c, a) * f(d, e, b) * tp(a, b, e, d)
            for d in hs for e in hs if _adjacent(e, d)
        )
    want = commutation_phase(which, index, params) * f(a, b, c)
    return float(abs(got - want) / (1.0 + abs(want)))


def check_sos_four_term(barred: bool, index: int, heights, l1, l2, params: ModelParams) -> float:
    """Four-term relation of F (or Fbar) with a face weight, heights ``(a, b, c, d, e)``."""
    a, b, c, d, e = heights
    lam = l1 - l2
    gs = _near(*heights)
    w = face_weight

    def f(x, y, z, sp):
        return dressed_f(index, barred, x, y, z, sp, params)

    def tm(*h):
        return dressed_t(index, "-", *h, params)

    lhs = sum(w(a, g, d, e, lam, params) * f(a, b, g, l1) * tm(b, c, d, g) for g in gs)
    lhs += w(a, b, d, e, lam, params) * f(b, c, d, l2)
    rhs = sum(f(a, g, e, l2) * tm(g, c, d, e) * w(a, b, c, g, lam, params) for g in gs)
    rhs += f(e, c, d, l1) * w(a, b, c, e, lam, params)
    return float(abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs))))


def four_term_patterns(a: int = 0):
    """Height tuples ``(a, b, c, d, e)`` near a on which the relation is non-trivial."""
    for b, c, d, e in itertools.product(range(a - 3, a + 4), repeat=4):
        if (_adjacent(a, b) or _adjacent(a, e)) and (_adjacent(c, d) or _adjacent(b, c)):
            yield (a, b, c, d, e)


# ---------------------------------------------------------------------------
# region arrangement


@dataclass(frozen=True)
class SosCurrentInsertion:
    index: int
    barred: bool
    tail: TailPath

    def __post_init__(self):
        if self.index not in (0, 1):
            raise ValueError("current index must be 0 or 1")

    def vertex_insertion(self) -> CurrentInsertion:
        return CurrentInsertion(GeneratorId("f_bar" if self.barred else "f", self.index), self.tail)


def _cell(p, direction):
    """Unit raster cell touching point p on the side ``direction`` (components +-1)."""
    return (p[0] if direction[0] > 0 else p[0] - 1, p[1] if direction[1] > 0 else p[1] - 1)


class Arrangement:
    """Regions of the box cut by lattice lines and an optional tail polyline."""

    def __init__(self, n_cols: int, n_rows: int, tail_pts=None):
        self.n_cols, self.n_rows = n_cols, n_rows
        lo = SCALE // 2
        self.xlim = (lo, SCALE * n_cols + lo)
        self.ylim = (lo, SCALE * n_rows + lo)
        vwalls, hwalls = set(), set()
        for k in range(1, n_cols + 1):
            vwalls.update((SCALE * k, y) for y in range(*self.ylim))
        for k in range(1, n_rows + 1):
            hwalls.update((x, SCALE * k) for x in range(*self.xlim))
        self.line_vwalls, self.line_hwalls = set(vwalls), set(hwalls)
        if tail_pts is not None:
            for a, b in zip(tail_pts, tail_pts[1:]):
                if a[0] == b[0]:
                    vwalls.update((a[0], y) for y in range(min(a[1], b[1]), max(a[1], b[1])))
                else:
                    hwalls.update((x, a[1]) for x in range(min(a[0], b[0]), max(a[0], b[0])))
        self.label = self._flood(vwalls, hwalls)
        self.n_regions = max(self.label.values()) + 1

    def _flood(self, vwalls, hwalls):
        label = {}
        x0, x1 = self.xlim
        y0, y1 = self.ylim
        nxt = 0
        for start in itertools.product(range(x0, x1), range(y0, y1)):
            if start in label:
                continue
            label[start] = nxt
            queue = deque([start])
            while queue:
                x, y = queue.popleft()
                for nb, wall, walls in (
                    ((x + 1, y), (x + 1, y), vwalls),
                    ((x - 1, y), (x, y), vwalls),
                    ((x, y + 1), (x, y + 1), hwalls),
                    ((x, y - 1), (x, y), hwalls),
                ):
                    if not (x0 <= nb[0] < x1 and y0 <= nb[1] < y1) or nb in label or wall in walls:
                        continue
                    label[nb] = nxt
                    queue.append(nb)
            nxt += 1
        return label

    def region(self, p, direction) -> int:
        return self.label[_cell(p, direction)]

    def line_adjacency(self):
        adj = {r: set() for r in range(self.n_regions)}
        for x, y in self.line_vwalls:
            if x < self.xlim[1]:
                r1, r2 = self.label[(x - 1, y)], self.label[(x, y)]
                adj[r1].add(r2)
                adj[r2].add(r1)
        for x, y in self.line_hwalls:
            if y < self.ylim[1]:
                r1, r2 = self.label[(x, y - 1)], self.label[(x, y)]
                adj[r1].add(r2)
                adj[r2].add(r1)
        return {r: sorted(v) for r, v in adj.items()}

    def perimeter_faces(self):
        """Map region -> set of boundary faces whose outer side it touches."""
        x0, x1 = self.xlim
        y0, y1 = self.ylim
        out = {}
        cells = [(x, y0) for x in range(x0, x1)] + [(x, y1 - 1) for x in range(x0, x1)]
        cells += [(x0, y) for y in range(y0, y1)] + [(x1 - 1, y) for y in range(y0, y1)]
        for c in cells:
            face = (c[0] // SCALE, c[1] // SCALE)
            out.setdefault(self.label[c], set()).add(face)
        return out


def _line_direction(edge):
    return (0, -1) if edge[0] == "v" else (-1, 0)


def _crossing_point(c):
    kind, x, y = c.edge
    return (SCALE * x, c.position) if kind == "v" else (c.position, SCALE * y)


def _sum_directions(*ds):
    return tuple(int(np.sign(sum(d[k] for d in ds))) for k in (0, 1))


def _t_heights(arr: Arrangement, p, u):
    """Regions (a, b, c, d) around a tail crossing of a line with direction u."""
    right = rot_cw(u)
    left = (-right[0], -right[1])
    up = (-u[0], -u[1])
    return (
        arr.region(p, _sum_directions(right, up)),
        arr.region(p, _sum_directions(left, up)),
        arr.region(p, _sum_directions(left, u)),
        arr.region(p, _sum_directions(right, u)),
    )


def _corner_turns(pts):
    """(point, incoming direction, outgoing direction) at every turn of the polyline."""
    out = []
    for a, b, c in zip(pts, pts[1:], pts[2:]):
        d1 = (int(np.sign(b[0] - a[0])), int(np.sign(b[1] - a[1])))
        d2 = (int(np.sign(c[0] - b[0])), int(np.sign(c[1] - b[1])))
        out.append((b, d1, d2))
    return out


LEFT, DOWN = (-1, 0), (0, -1)


@dataclass
class SosCurrentModel:
    """Factor graph of an SOS lattice with (optionally) a current insertion."""

    spec: SosLatticeSpec
    ins: SosCurrentInsertion | None = None

    def __post_init__(self):
        spec = self.spec
        if spec.cyclic_n:
            raise ValueError("currents are defined on unrestricted heights")
        pts = None
        if self.ins is not None:
            tail = self.ins.tail
            if tail.anchor[1] != 0 or tail.anchor[0] in (0, spec.n_cols):
                raise GeometryError("SOS tails start from a bottom boundary face away from the corners")
            pts = tail_polyline(tail, spec.n_cols, spec.n_rows)
            edge = tail.insertion_edge()
            if edge[0] == "v" and not 1 <= edge[2] <= spec.n_rows - 1 or edge[0] == "h" and not 1 <= edge[1] <= spec.n_cols - 1:
                raise GeometryError("insertion edge lies on the boundary")
            if tail.final_direction != rot_cw(_line_direction(edge)):
                raise GeometryError("the tail must reach the insertion moving clockwise of the line direction")
        self.pts = pts
        self.arr = Arrangement(spec.n_cols, spec.n_rows, pts)
        self._build()

    def _build(self):
        spec, arr = self.spec, self.arr
        ring = ring_faces(spec.n_cols, spec.n_rows)
        ring_height = dict(zip(ring, spec.boundary))
        fixed = {}
        for region, faces in arr.perimeter_faces().items():
            heights = {ring_height[f] for f in faces}
            if len(heights) != 1:
                raise GeometryError(f"region touches boundary arcs with heights {heights}")
            h = heights.pop()
            if h is not None:
                fixed[region] = h
        self.fixed = fixed
        model = HeightModel(list(range(arr.n_regions)), arr.line_adjacency(), fixed)
        model.build()
        self.model = model
        g = model.graph
        lo, hi = g.lo, g.hi
        params = spec.params
        for y in range(1, spec.n_rows + 1):
            for x in range(1, spec.n_cols + 1):
                p = (SCALE * x, SCALE * y)
                corners = [arr.region(p, d) for d in ((-1, 1), (1, 1), (1, -1), (-1, -1))]
                model.add_face(corners, face_table(spec.face_lambda(x, y), params, lo, hi))
        self.tail_faces, self.corners, self.insertion = [], [], None
        if self.ins is None:
            return
        ins = self.ins
        self.anchor_regions = sorted({arr.region(self.pts[0], (sx, 1)) for sx in (-1, 1)})
        tables = {}
        for c in tail_crossings(self.pts, spec.n_cols, spec.n_rows):
            u = _line_direction(c.edge)
            sign = "-" if c.inverse else "+"
            if sign not in tables:
                tables[sign] = _t_table(ins.index, sign, params, lo, hi)
            regions = _t_heights(arr, _crossing_point(c), u)
            self.tail_faces.append((regions, sign))
            model.add_face(regions, tables[sign])
        edge = ins.tail.insertion_edge()
        u = _line_direction(edge)
        p = self.pts[-1]
        delta = rot_cw(u)
        back = (-delta[0], -delta[1])
        a = arr.region(p, _sum_directions(delta, u))
        if arr.region(p, _sum_directions(delta, (-u[0], -u[1]))) != a:
            raise GeometryError("far side of the insertion is split")
        b = arr.region(p, _sum_directions(back, (-u[0], -u[1])))
        c = arr.region(p, _sum_directions(back, u))
        lam = spec.col_lambdas[edge[1] - 1] if edge[0] == "v" else spec.row_lambdas[edge[2] - 1]
        self.insertion = (a, b, c)
        model.add_face((a, b, c), _f_table(ins.index, ins.barred, lam, params, lo, hi))
        for q, d1, d2 in _corner_turns(self.pts):
            if (d1, d2) in ((LEFT, DOWN), (DOWN, LEFT)):
                inner = arr.region(q, _sum_directions((-d1[0], -d1[1]), d2))
                outer = arr.region(q, _sum_directions(d1, (-d2[0], -d2[1])))
                self.corners.append((inner, outer))
                model.add_face((inner, outer), _ratio_table(params, lo, hi))

    def total(self, method=None) -> complex:
        g = self.model.graph
        if method is None:
            method = "both" if g.n_free() <= 20 else "eliminate"
        return self.model.total(method)

    @property
    def winding(self) -> int:
        return winding_number(self.pts) if self.pts is not None else 0

    def configurations(self):
        from .kernels import enumerate_configurations

        vals, weights = enumerate_configurations(self.model.graph)
        idx = [self.model.var[r] for r in range(self.arr.n_regions)]
        return vals[:, idx], weights


def _t_table(index, sign, params, lo, hi):
    size = hi - lo + 1
    out = np.zeros((size,) * 4, dtype=complex)
    for a in range(lo, hi + 1):
        for d in range(lo, hi + 1):
            for b in (a - 1, a + 1):
                for c in (d - 1, d + 1):
                    if lo <= b <= hi and lo <= c <= hi:
                        out[a - lo, b - lo, c - lo, d - lo] = dressed_t(index, sign, a, b, c, d, params)
    return out


def _f_table(index, barred, lam, params, lo, hi):
    size = hi - lo + 1
    out = np.zeros((size,) * 3, dtype=complex)
    for a in range(lo, hi + 1):
        for b in (a - 1, a + 1):
            for c in (a - 1, a + 1):
                if lo <= b <= hi and lo <= c <= hi:
                    out[a - lo, b - lo, c - lo] = dressed_f(index, barred, a, b, c, lam, params)
    return out


def _ratio_table(params, lo, hi):
    sh = np.array([_sh(h, params) for h in range(lo, hi + 1)])
    return sh[:, None] / sh[None, :]


# ---------------------------------------------------------------------------
# expectations and the vertex correspondence


def sos_current_sum(spec: SosLatticeSpec, ins: SosCurrentInsertion, method=None) -> complex:
    return SosCurrentModel(spec, ins).total(method)


def sos_current_expectation(spec: SosLatticeSpec, ins: SosCurrentInsertion, method=None) -> complex:
    """Current configuration sum divided by the SOS partition function."""
    z = sos_partition_function(spec, method)
    if abs(z) < spec.params.tol.singularity_guard * 1e-6:
        raise DegenerateNormalization("SOS partition function vanishes")
    return sos_current_sum(spec, ins, method) / z


def _split_ring(spec: SosLatticeSpec, anchor):
    """Ring cells with the anchor cell split into its west and east halves."""
    ring = ring_faces(spec.n_cols, spec.n_rows)
    cells, heights = [], []
    for f, h in zip(ring, spec.boundary):
        if f == anchor:
            cells += [(f, "w"), (f, "e")]
            heights += [h, h]
        else:
            cells.append((f, None))
            heights.append(h)
    return cells, heights


def _ring_completions(heights, skip_pair):
    """All +-1 completions of a ring walk; the pair ``skip_pair`` is unconstrained.

    The ring is walked starting just after the skipped pair, so every free
    entry except possibly the first is one step from its predecessor.
    """
    n = len(heights)
    start = skip_pair[1] % n
    order = [(start + k) % n for k in range(n)]
    known = [h for h in heights if h is not None]
    if not known:
        raise GeometryError("at least one boundary height must be fixed")
    window = range(min(known) - n, max(known) + n + 1)
    out = set()

    def extend(pos, walk):
        if pos == n:
            if all((k, (k + 1) % n) == tuple(skip_pair) or height_step(walk[k], walk[(k + 1) % n])
                   for k in range(n)):
                out.add(tuple(walk))
            return
        k = order[pos]
        if walk[k] is not None:
            if pos == 0 or height_step(walk[order[pos - 1]], walk[k]):
                extend(pos + 1, walk)
            return
        options = window if pos == 0 else (walk[order[pos - 1]] - 1, walk[order[pos - 1]] + 1)
        for h in options:
            walk[k] = h
            extend(pos + 1, walk)
        walk[k] = None

    extend(0, list(heights))
    return sorted(out)


def dressed_vertex_current_sum(spec: SosLatticeSpec, ins: SosCurrentInsertion, bottom_right="psi_prime") -> complex:
    """Six-vertex current sum with boundary spins dressed by intertwiners.

    Bottom edges west of the anchor carry psi*; those east of it carry
    ``bottom_right`` (psi' by default).
    """
    anchor = ins.tail.anchor
    cells, heights = _split_ring(spec, anchor)
    k_w = cells.index((anchor, "w"))
    total = 0j
    blank = {"top": [0] * spec.n_cols, "bottom": [0] * spec.n_cols, "left": [0] * spec.n_rows, "right": [0] * spec.n_rows}
    variant = {x: bottom_right for x in range(anchor[0] + 1, spec.n_cols + 1)}
    for walk in _ring_completions(heights, (k_w, k_w + 1)):
        h = {}
        for (f, half), val in zip(cells, walk):
            h[(f, half)] = val
        face_h = {f: h[(f, None)] for f, half in cells if half is None}
        face_h[anchor] = h[(anchor, "w")]
        east_edge = ("v", anchor[0] + 1, 0)
        dress = dressing_vectors(
            spec.n_cols, spec.n_rows, spec.col_lambdas, spec.row_lambdas, face_h, spec.params, variant,
            {east_edge: (h[(anchor, "e")], face_h[(anchor[0] + 1, 0)])},
        )
        vspec = VertexLatticeSpec(
            spec.n_cols, spec.n_rows, spec.col_lambdas, spec.row_lambdas,
            {k: list(v) for k, v in blank.items()}, spec.params, dress,
        )
        total += configuration_sum(vspec, ins.vertex_insertion())
    return total


def equivalence_factor(ins: SosCurrentInsertion, winding: int, params: ModelParams) -> complex:
    """exp(-2 M mu_i eta) for J_i and exp(2 M mu_i eta) for Jbar_i, M counting anticlockwise turns."""
    sign = 1 if ins.barred else -1
    return complex(np.exp(sign * 2 * winding * MU[ins.index] * params.eta))


def check_equivalence_6v_sos(spec: SosLatticeSpec, ins: SosCurrentInsertion, bottom_right="psi_prime"):
    """Residual of the vertex current against the SOS current times the winding phase.

    Both sides are normalised by the same SOS partition function, so the
    comparison is between configuration sums. Returns ``(residual, details)``.
    """
    model = SosCurrentModel(spec, ins)
    j_sos = model.total()
    j_v = dressed_vertex_current_sum(spec, ins, bottom_right)
    factor = equivalence_factor(ins, model.winding, spec.params)
    scale = max(abs(j_v), abs(factor * j_sos))
    res = abs(j_v - factor * j_sos) / scale if scale > 0 else 0.0
    return float(res), {"vertex": j_v, "sos": j_sos, "factor": factor, "winding": model.winding}


# ---------------------------------------------------------------------------
# conservation around a plaquette


PLAQUETTE_TAILS = {"top": "UL", "left": "LU", "bottom": "L", "right": "U"}


def sos_plaquette_insertions(spec: SosLatticeSpec, vertex, index: int, barred: bool):
    """Insertions on the four edges around ``vertex`` sharing a straight prefix from the bottom."""
    x, y = vertex
    if not (2 <= x <= spec.n_cols - 1 and 2 <= y <= spec.n_rows - 1):
        raise GeometryError(f"vertex {vertex} has a boundary edge or no interior south-east face")
    prefix = "U" * (y - 1)
    return {k: SosCurrentInsertion(index, barred, TailPath((x, 0), prefix + s)) for k, s in PLAQUETTE_TAILS.items()}


def check_sos_plaquette(spec: SosLatticeSpec, vertex, index: int, barred: bool, emb=None):
    """Four-term relation J(top) - J(left) - J(bottom) + J(right) at one vertex.

    With an embedding ``emb`` the parafermion contour sum is evaluated as
    well. Returns ``(residual, details)``; the residual is the larger of the
    two normalised sums.
    """
    from .embedding import Parafermion, plaquette_contour

    ins = sos_plaquette_insertions(spec, vertex, index, barred)
    z = sos_partition_function(spec)
    if abs(z) < spec.params.tol.singularity_guard * 1e-6:
        raise DegenerateNormalization("SOS partition function vanishes")
    vals = {k: sos_current_sum(spec, v) / z for k, v in ins.items()}
    terms = [vals["top"], -vals["left"], -vals["bottom"], vals["right"]]
    scale = max(abs(t) for t in terms)
    res = abs(sum(terms)) / scale if scale > 0 else 0.0
    details = {"values": vals, "four_term": float(res)}
    if emb is not None:
        pf = Parafermion("sos_bar" if barred else "sos", index, spec.params.eta)
        total, cscale = plaquette_contour(emb, vertex, vals, pf)
        details["contour"] = float(abs(total) / cscale) if cscale > 0 else 0.0
        res = max(res, details["contour"])
    return float(res), details


# ---------------------------------------------------------------------------
# locality of J_0


def _insertion_cells(edge, direction):
    """(far-side face, tail-side face) of an insertion edge on the plain face grid."""
    kind, x, y = edge
    if kind == "v":
        west, east = (x - 1, y), (x, y)
        return (west, east) if direction == LEFT else (east, west)
    south, north = (x, y - 1), (x, y)
    return (north, south) if direction == (0, 1) else (south, north)


def local_j0_sum(spec: SosLatticeSpec, ins: SosCurrentInsertion, method=None) -> complex:
    """Tail-free configuration sum with F_0(a; b, b) sinh(h_anchor eta) / sinh(b eta) at the insertion."""
    from .sos_weights import plain_face_model

    if ins.index != 0:
        raise ValueError("the local form applies to J_0 and Jbar_0")
    tail = ins.tail
    edge = tail.insertion_edge()
    far, near = _insertion_cells(edge, tail.final_direction)
    lam = spec.col_lambdas[edge[1] - 1] if edge[0] == "v" else spec.row_lambdas[edge[2] - 1]
    model = plain_face_model(spec)
    g = model.graph
    params = spec.params
    cells = [tail.anchor, far, near]
    uniq = list(dict.fromkeys(cells))
    size = g.hi - g.lo + 1
    table = np.zeros((size,) * len(uniq), dtype=complex)
    for combo in itertools.product(range(g.lo, g.hi + 1), repeat=len(uniq)):
        h = dict(zip(uniq, combo))
        a, b, anc = h[far], h[near], h[tail.anchor]
        if not _adjacent(a, b):
            continue
        table[tuple(v - g.lo for v in combo)] = (
            dressed_f(0, ins.barred, a, b, b, lam, params) * _sh(anc, params) / _sh(b, params)
        )
    model.add_face(uniq, table)
    if method is None:
        method = "both" if g.n_free() <= 20 else "eliminate"
    return model.total(method)


def check_j0_locality(spec: SosLatticeSpec, ins: SosCurrentInsertion, tol: float = 1e-12) -> dict:
    """Report on the three facts behind the local form of J_0.

    ``equal_heights``: every configuration with non-negligible weight has
    equal heights across each tail face. ``telescoping``: the largest
    deviation of (tail faces x corner factors) from
    sinh(h_anchor eta) / sinh(b eta). ``local``: relative difference between
    the full and the local configuration sums.
    """
    if ins.index != 0:
        raise ValueError("locality holds for J_0 and Jbar_0")
    if spec.boundary[ring_faces(spec.n_cols, spec.n_rows).index(ins.tail.anchor)] is None:
        raise ValueError("locality needs a fixed anchor height: free anchor halves may differ across the tail")
    model = SosCurrentModel(spec, ins)
    params = spec.params
    vals, weights = model.configurations()
    live = np.abs(weights) > tol * max(1.0, float(np.abs(weights).max(initial=0.0)))
    equal, worst = True, 0.0
    for v in vals[live]:
        prod = 1.0 + 0j
        for (a, b, c, d), sign in model.tail_faces:
            equal &= bool(v[a] == v[d] and v[b] == v[c])
            prod *= dressed_t(0, sign, v[a], v[b], v[c], v[d], params)
        for inner, outer in model.corners:
            prod *= _sh(v[inner], params) / _sh(v[outer], params)
        anchor_h = {v[r] for r in model.anchor_regions}
        target = _sh(anchor_h.pop(), params) / _sh(v[model.insertion[1]], params)
        worst = max(worst, abs(prod - target) / abs(target))
    full = model.total()
    local = local_j0_sum(spec, ins)
    scale = max(abs(full), abs(local))
    return {
        "equal_heights": equal,
        "telescoping": float(worst),
        "local": float(abs(full - local) / scale) if scale > 0 else 0.0,
        "configurations": int(live.sum()),
        "winding": model.winding,
    }


# ---------------------------------------------------------------------------
# RSOS restriction


@dataclass(frozen=True)
class RsosWitness:
    """A current configuration with a height outside 1..p next to the tail."""

    p: int
    boundary: tuple
    index: int
    barred: bool
    steps: str
    heights: tuple
    out_of_range: tuple
    weight: complex
    partition_out_of_range: tuple

    def to_json(self) -> dict:
        return {
            "p": self.p, "boundary": list(self.boundary), "index": self.index, "barred": self.barred,
            "tail": self.steps, "heights": list(self.heights), "out_of_range": list(self.out_of_range),
            "weight": [self.weight.real, self.weight.imag],
            "partition_out_of_range": list(self.partition_out_of_range),
        }


RSOS_X0 = (1e-4, 1e-5)
RSOS_LAMBDAS = ([0.13, 0.31], [-0.07, 0.21])


def _rsos_params(p, x0):
    from .numerics import ToleranceConfig

    return ModelParams(eta=1j * np.pi / (p + 1), x0=x0, tol=ToleranceConfig(singularity_guard=1e-14))


def _rsos_walks(p):
    for start in range(1, p + 1):
        for steps in itertools.product((1, -1), repeat=7):
            walk = [start]
            for s in steps:
                walk.append(walk[-1] + s)
            if abs(walk[-1] - walk[0]) == 1 and all(1 <= h <= p for h in walk):
                yield walk


def partition_out_of_range(p: int, boundary, x0_values=RSOS_X0) -> tuple:
    """|sum of plain 2x2 configuration weights with a height outside 1..p| at each x0."""
    from .kernels import enumerate_configurations
    from .sos_weights import plain_face_model

    out = []
    for x0 in x0_values:
        spec = SosLatticeSpec(2, 2, *RSOS_LAMBDAS, list(boundary), _rsos_params(p, x0))
        model = plain_face_model(spec)
        vals, w = enumerate_configurations(model.graph)
        vals = vals[:, [model.var[c] for c in model.cells]]
        mask = np.array([any(not 1 <= h <= p for h in v) for v in vals])
        out.append(float(abs(w[mask].sum())) if mask.any() else 0.0)
    return tuple(out)


def rsos_incompatibility_probe(p: int, guard: float = 1e-6, x0_values=RSOS_X0) -> RsosWitness:
    """Search 2x2 lattices at eta = i pi / (p + 1) for a current configuration breaking the restriction.

    Weights are evaluated at two small x0 approaching the restricted point
    x0 = 0, where individual factors are 0/0. A witness has a height outside
    1..p on a tail face, weight above ``guard``
    and a weight that has converged between the two x0 values. The plain
    partition function for the same boundary is checked to lose its
    out-of-range part as x0 -> 0.
    """
    if p < 3:
        raise ValueError("p must be at least 3")
    for walk in _rsos_walks(p):
        for index, barred, steps in itertools.product((0, 1), (False, True), ("UL",)):
            ins = SosCurrentInsertion(index, barred, TailPath((1, 0), steps))
            runs = []
            for x0 in x0_values:
                spec = SosLatticeSpec(2, 2, *RSOS_LAMBDAS, list(walk), _rsos_params(p, x0))
                model = SosCurrentModel(spec, ins)
                runs.append(model.configurations())
            vals = runs[0][0]
            near = {r for face, _ in model.tail_faces for r in face}
            for k, v in enumerate(vals):
                out = tuple(sorted({int(v[r]) for r in near if not 1 <= v[r] <= p}))
                w_far, w_near = runs[0][1][k], runs[-1][1][k]
                if out and abs(w_near) > guard and abs(w_far - w_near) < 1e-2 * abs(w_near):
                    z_out = partition_out_of_range(p, walk, x0_values)
                    if z_out[-1] > z_out[0] * 0.5 and z_out[-1] > guard:
                        continue
                    return RsosWitness(p, tuple(walk), index, barred, steps, tuple(int(h) for h in v),
                                       out, complex(w_near), z_out)
    raise ProbeInconclusive(f"no out-of-range witness found on 2x2 lattices for p={p}")
