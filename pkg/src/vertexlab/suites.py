"""Named batteries of checks run by the command-line driver.

A suite is a generator of :class:`Check` objects. Each check carries a
stable id, a JSON-serialisable parameter record and a zero-argument callable
returning a residual, optionally with a short display value. Checks are
evaluated lazily so the driver can stop at a wall-time budget.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from . import csos as cs
from . import sos_currents as sc
from . import sos_weights as sw
from . import vertex_lattice as vl
from . import vertex_weights as vw
from .embedding import Parafermion, embed, parafermion_from_stripped, parafermion_value, plaquette_contour, strip_current
from .errors import ArgError, GeometryError, UsageError
from .numerics import DEFAULT_X0, ModelParams, ParamSampler

IDENTITY_SETS = 100
CLOSED_FORM_SETS = 20
SUITE_ETAS = (0.45 - 0.2j, 0.3 + 0.4j, 0.05 + 0.37j, -0.25 + 0.15j)
GUARD_HEIGHTS = (-8, 8)


@dataclass(frozen=True)
class Check:
    id: str
    params: dict
    run: Callable[[], object]
    tol: float


@dataclass
class SuiteOptions:
    seed: int
    eta: complex | None = None
    pp: tuple[int, int] | None = None
    size: tuple[int, int] | None = None
    tol: float | None = None
    extras: dict = field(default_factory=dict)

    def etas(self):
        return (self.eta,) if self.eta is not None else SUITE_ETAS

    def tolerance(self, default: float) -> float:
        return self.tol if self.tol is not None else default


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _draw_x0(rng: np.random.Generator, eta: complex, guard: float = 1e-6) -> complex:
    ks = np.arange(GUARD_HEIGHTS[0], GUARD_HEIGHTS[1] + 1)
    for _ in range(1000):
        x0 = complex(rng.uniform(0.1, 0.9), rng.uniform(-0.3, 0.3))
        if np.all(np.abs(np.sinh((x0 + ks) * eta)) > guard):
            return x0
    return DEFAULT_X0


def _parameter_sets(opts: SuiteOptions, n: int, n_lambdas: int, salt: int):
    """Seeded (lambdas, params) pairs with a per-set height reference x0."""
    sampler = ParamSampler(seed=opts.seed + salt, eta_list=opts.etas(), n_lambdas=n_lambdas,
                           height_range=GUARD_HEIGHTS)
    rng = np.random.default_rng([opts.seed, salt])
    return [(lams, ModelParams(eta=eta, x0=_draw_x0(rng, eta))) for lams, eta in sampler.sample(n)]


def _set_record(lams, params: ModelParams) -> dict:
    return {"lambdas": [_c(z) for z in lams], "eta": _c(params.eta), "x0": _c(params.x0)}


def _max(values) -> float:
    return float(max(values, default=0.0))


# ---------------------------------------------------------------------------
# six-vertex identities


GENERATORS = [vw.GeneratorId(k, i) for k in vw.KINDS for i in (0, 1)]


def vertex_identities(opts: SuiteOptions) -> Iterator[Check]:
    tol = opts.tolerance(1e-9)
    for k, (lams, params) in enumerate(_parameter_sets(opts, IDENTITY_SETS, 3, 1)):
        rec = _set_record(lams, params)
        l1, l2, l3 = lams
        tag = f"{k:03d}"
        yield Check(f"ybe/{tag}", rec, lambda l1=l1, l2=l2, l3=l3, p=params: vw.check_ybe(l1, l2, l3, p), tol)
        yield Check(f"unitarity/{tag}", rec, lambda l1=l1, p=params: vw.check_unitarity(l1, p), tol)
        yield Check(f"crossing/{tag}", rec, lambda l1=l1, p=params: vw.check_crossing(l1, p), tol)
        for gen in GENERATORS:
            yield Check(
                f"intertwining/{gen.kind}{gen.index}/{tag}", rec,
                lambda g=gen, l1=l1, l2=l2, p=params: vw.check_vertex_intertwining(g, l1, l2, p), tol,
            )
        for i in (0, 1):
            yield Check(f"antipode/{i}/{tag}", rec, lambda i=i, l1=l1, p=params: vw.check_antipode(i, l1, p), tol)
            for barred in (False, True):
                yield Check(
                    f"winding/{'fbar' if barred else 'f'}{i}/{tag}", rec,
                    lambda i=i, b=barred, p=params: vw.check_winding_relation(i, p, b), tol,
                )


# ---------------------------------------------------------------------------
# six-vertex lattice laws


def _embeddable_lambdas(rng: np.random.Generator, eta: complex, n_cols: int, n_rows: int):
    """Real multiples of eta whose rhombi have opening angles inside (0.1 pi, 0.9 pi)."""
    cols = [complex(rng.uniform(0.0, 0.3) * eta) for _ in range(n_cols)]
    rows = [complex(rng.uniform(0.4, 0.9) * eta) for _ in range(n_rows)]
    return cols, rows


def _released_boundary(rng: np.random.Generator, n_cols: int, n_rows: int) -> dict:
    """A seeded charge-sector boundary with extra edges released to be summed."""
    bnd = vl.random_boundary(n_cols, n_rows, rng)
    return {side: [0 if rng.random() < 0.4 else s for s in spins] for side, spins in bnd.items()}


def _vertex_lattices(opts: SuiteOptions, salt: int):
    n_cols, n_rows = opts.size or (3, 3)
    rng = np.random.default_rng([opts.seed, salt])
    summed = {"top": [0] * n_cols, "bottom": [0] * n_cols, "left": [0] * n_rows, "right": [0] * n_rows}
    out = []
    for k, eta in enumerate(opts.etas()[:2]):
        params = ModelParams(eta=eta, x0=_draw_x0(rng, eta))
        cols, rows = _embeddable_lambdas(rng, eta, n_cols, n_rows)
        for name, bnd in (("summed", summed), ("seeded", _released_boundary(rng, n_cols, n_rows))):
            spec = vl.VertexLatticeSpec(n_cols, n_rows, cols, rows, bnd, params)
            out.append((f"{k}{name}", spec))
    return out


def _interior_vertices(n_cols: int, n_rows: int):
    return [(x, y) for y in range(2, n_rows) for x in range(2, n_cols)]


def _vertex_record(spec: vl.VertexLatticeSpec, **extra) -> dict:
    return {**spec.to_json(), "eta": _c(spec.params.eta), "x0": _c(spec.params.x0), **extra}


def _conservation_cache():
    cache = {}

    def values(spec, vertex, gen):
        key = (id(spec), vertex, gen)
        if key not in cache:
            cache[key] = vl.check_plaquette_conservation(spec, vertex, gen)
        return cache[key]

    return values


CURRENTS = [vw.GeneratorId(k, i) for k in ("f", "f_bar") for i in (0, 1)]

# pairs of homotopic tails from the bottom face under column x ending on the west edge of face (x, 1)
HOMOTOPIC_TAILS = (("UL", "RULL"), ("UL", "RUULDL"))


def _homotopy_residual(spec, gen, anchor, a_steps, b_steps, loops):
    a = vl.CurrentInsertion(gen, vl.TailPath(anchor, a_steps, loops))
    b = vl.CurrentInsertion(gen, vl.TailPath(anchor, b_steps, loops))
    return vl.check_path_independence(spec, a, b), f"|sum|={abs(vl.configuration_sum(spec, a)):.6g}"


def _unwind_residual(spec, gen, tail):
    ins = vl.CurrentInsertion(gen, tail)
    unwound, factor = vl.unwind(ins, spec.params, spec)
    full = vl.configuration_sum(spec, ins)
    base = vl.configuration_sum(spec, unwound)
    scale = max(abs(full), abs(factor * base))
    return abs(full - factor * base) / scale if scale > 0 else 0.0


def unwinding_exponent(gen: vw.GeneratorId, winding: int) -> int:
    """Integer k with unwinding factor exp(k eta): -2M for f_i, +2M for fbar_i."""
    return -2 * winding if gen.kind == "f" else 2 * winding


def _measured_exponent(spec, gen, tail) -> tuple[float, str]:
    """Compare the lattice ratio of wound and unwound sums with exp(k eta) for small integers k."""
    ins = vl.CurrentInsertion(gen, tail)
    unwound, _ = vl.unwind(ins, spec.params, spec)
    ratio = vl.configuration_sum(spec, ins) / vl.configuration_sum(spec, unwound)
    best = min(range(-8, 9), key=lambda k: abs(ratio - cmath.exp(k * spec.params.eta)))
    want = unwinding_exponent(gen, vl.winding_of(ins, spec))
    return (0.0 if best == want else 1.0), f"{best}/{want}"


def vertex_conservation(opts: SuiteOptions) -> Iterator[Check]:
    tol = opts.tolerance(1e-9)
    values = _conservation_cache()
    for name, spec in _vertex_lattices(opts, 2):
        for vertex in _interior_vertices(spec.n_cols, spec.n_rows):
            for gen in CURRENTS:
                rec = _vertex_record(spec, vertex=list(vertex), current=[gen.kind, gen.index])
                yield Check(
                    f"plaquette/{name}/{gen.kind}{gen.index}/{vertex[0]}-{vertex[1]}", rec,
                    lambda s=spec, v=vertex, g=gen: values(s, v, g)[0], tol,
                )
        if spec.n_cols < 3 or spec.n_rows < 1:
            continue
        anchor = (2, 0)
        for gen in CURRENTS:
            for (a, b), loops in itertools.product(HOMOTOPIC_TAILS, (0, 1, -1)):
                rec = _vertex_record(spec, current=[gen.kind, gen.index], tails=[a, b], loops=loops)
                yield Check(
                    f"homotopy/{name}/{gen.kind}{gen.index}/{a}-{b}/{loops:+d}", rec,
                    lambda s=spec, g=gen, a=a, b=b, m=loops: _homotopy_residual(s, g, anchor, a, b, m),
                    opts.tolerance(1e-10),
                )
            for loops in (1, -1, 2):
                tail = vl.TailPath(anchor, "UL", loops)
                rec = _vertex_record(spec, current=[gen.kind, gen.index], tail="UL", loops=loops)
                yield Check(
                    f"unwind/{name}/{gen.kind}{gen.index}/{loops:+d}", rec,
                    lambda s=spec, g=gen, t=tail: _unwind_residual(s, g, t), opts.tolerance(1e-10),
                )
                yield Check(
                    f"unwind-exponent/{name}/{gen.kind}{gen.index}/{loops:+d}", rec,
                    lambda s=spec, g=gen, t=tail: _measured_exponent(s, g, t), 0.0,
                )


def _vertex_contour(spec, emb, vertex, gen, values):
    _, vals = values(spec, vertex, gen)
    pf = Parafermion("vertex_bar" if gen.kind == "f_bar" else "vertex", gen.index, spec.params.eta)
    total, scale = plaquette_contour(emb, vertex, vals, pf)
    return abs(total) / scale if scale > 0 else 0.0


def _stripping_residual(spec, emb, vertex, gen, values):
    """The parafermion built from the spectral-parameter-free current equals exp(-+i alpha) j."""
    _, vals = values(spec, vertex, gen)
    pf = Parafermion("vertex_bar" if gen.kind == "f_bar" else "vertex", gen.index, spec.params.eta)
    worst = 0.0
    for slot, (edge, _, _) in emb.plaquette(*vertex).items():
        lam = spec.line_lambda(edge)
        alpha = emb.alpha(edge)
        direct = parafermion_value(pf, alpha, vals[slot])
        rebuilt = parafermion_from_stripped(pf, alpha, strip_current(pf, lam, vals[slot]))
        worst = max(worst, abs(direct - rebuilt) / (1.0 + abs(direct)))
    return worst


def vertex_parafermion(opts: SuiteOptions) -> Iterator[Check]:
    tol = opts.tolerance(1e-9)
    values = _conservation_cache()
    for name, spec in _vertex_lattices(opts, 2):
        emb = embed(spec.col_lambdas, spec.row_lambdas, spec.params.eta)
        for vertex in _interior_vertices(spec.n_cols, spec.n_rows):
            for gen in CURRENTS:
                rec = _vertex_record(spec, vertex=list(vertex), current=[gen.kind, gen.index])
                label = f"{name}/{gen.kind}{gen.index}/{vertex[0]}-{vertex[1]}"
                yield Check(f"contour/{label}", rec,
                            lambda s=spec, e=emb, v=vertex, g=gen: _vertex_contour(s, e, v, g, values), tol)
                yield Check(f"stripped/{label}", rec,
                            lambda s=spec, e=emb, v=vertex, g=gen: _stripping_residual(s, e, v, g, values), tol)


# ---------------------------------------------------------------------------
# SOS identities


def _sos_set_checks(tag, lams, params, tol) -> Iterator[Check]:
    rec = _set_record(lams, params)
    l1, l2, l3 = lams
    p = params
    for direction in (1, 2):
        yield Check(f"virf{direction}/{tag}", rec, lambda d=direction: _max(
            sw.check_virf(d, (a, b, c), l1, l2, p)
            for a in (-1, 0, 1) for b in (a - 1, a + 1) for c in (b - 1, b + 1)), tol)
    for which in "abcd":
        yield Check(f"inv-{which}/{tag}", rec,
                    lambda w=which: _max(sw.check_inversions(w, a, l1, p) for a in (-1, 0, 1)), tol)
    yield Check(f"ybe-sos/{tag}", rec,
                lambda: _max(sw.check_sos_ybe(h, l1, l2, l3, p) for h in sw.admissible_hexagons(0)), tol)
    for sign, i in itertools.product("-+", (0, 1)):
        name = "ybt1" if sign == "-" else "ybt2"
        yield Check(f"{name}/{i}/{tag}", rec, lambda s=sign, i=i: _max(
            sc.check_tail_ybe(s, i, h, l1, l2, p) for h in sc.tail_ybe_hexagons()), tol)
    for which, i in itertools.product((1, 2, 3, 4), (0, 1)):
        yield Check(f"sosinv{which}/{i}/{tag}", rec, lambda w=which, i=i: _max(
            sc.check_sos_inversions(w, i, h, p) for h in sc.inversion_patterns()), tol)
    for which, i in itertools.product((1, 2, 3, 4), (0, 1)):
        yield Check(f"soscr{which}/{i}/{tag}", rec, lambda w=which, i=i: _max(
            sc.check_sos_commutation(w, i, (a, b, c), l1, p)
            for a in (0, 1) for b in (a - 1, a + 1) for c in (a - 1, a + 1)), tol)
    for barred, i in itertools.product((False, True), (0, 1)):
        name = "sosint2" if barred else "sosint1"
        yield Check(f"{name}/{i}/{tag}", rec, lambda b=barred, i=i: _max(
            sc.check_sos_four_term(b, i, h, l1, l2, p) for h in sc.four_term_patterns()), tol)
    yield Check(f"t-symmetry/{tag}", rec, lambda: _max(
        abs(sc.dressed_t(i, "+", a, b, c, d, p) - sc.dressed_t_contracted(i, "+", a, b, c, d, p, l1))
        / (1.0 + abs(sc.dressed_t(i, "+", a, b, c, d, p)))
        for i in (0, 1) for a, b, c, d in itertools.product(range(-2, 3), repeat=4)), tol)


def _closed_form_checks(tag, lams, params, tol) -> Iterator[Check]:
    rec = _set_record(lams, params)
    lam = lams[0]
    p = params

    def rel(x, y):
        return abs(x - y) / (1.0 + abs(y))

    for i, barred in itertools.product((0, 1), (False, True)):
        name = f"closed-f/{'fbar' if barred else 'f'}{i}/{tag}"
        yield Check(name, rec, lambda i=i, b=barred: _max(
            rel(sc.dressed_f(i, b, a, bb, c, lam, p), sc.dressed_f_contracted(i, b, a, bb, c, lam, p))
            for a in (-1, 0, 1) for bb in (a - 1, a + 1) for c in (a - 1, a + 1)), tol)
    for i, sign in itertools.product((0, 1), "-+"):
        yield Check(f"closed-t/{sign}{i}/{tag}", rec, lambda i=i, s=sign: _max(
            rel(sc.dressed_t(i, s, a, b, c, d, p), sc.dressed_t_contracted(i, s, a, b, c, d, p, lam))
            for a in (-1, 0, 1) for b in (a - 1, a + 1) for d in (a - 2, a, a + 2) for c in (d - 1, d + 1)), tol)


def sos_identities(opts: SuiteOptions) -> Iterator[Check]:
    tol = opts.tolerance(1e-9)
    for k, (lams, params) in enumerate(_parameter_sets(opts, IDENTITY_SETS, 3, 3)):
        yield from _sos_set_checks(f"{k:03d}", lams, params, tol)
    for k, (lams, params) in enumerate(_parameter_sets(opts, CLOSED_FORM_SETS, 1, 4)):
        yield from _closed_form_checks(f"{k:03d}", lams, params, opts.tolerance(1e-12))


# ---------------------------------------------------------------------------
# SOS lattice currents


def _sos_record(spec: sw.SosLatticeSpec, **extra) -> dict:
    return {**spec.to_json(), "eta": _c(spec.params.eta), "x0": _c(spec.params.x0), **extra}


def _sos_lattices(opts: SuiteOptions, salt: int):
    """Seeded 3x3-face lattices; the free variant leaves the anchor cell under column 2 summed."""
    n_cols, n_rows = opts.size or (3, 3)
    rng = np.random.default_rng([opts.seed, salt])
    out = []
    for k, eta in enumerate(opts.etas()[:2]):
        params = ModelParams(eta=eta, x0=_draw_x0(rng, eta))
        cols, rows = _embeddable_lambdas(rng, eta, n_cols, n_rows)
        walk = sw.random_boundary_walk(n_cols, n_rows, rng)
        out.append((f"{k}fixed", sw.SosLatticeSpec(n_cols, n_rows, cols, rows, walk, params)))
        free = list(walk)
        free[sw.ring_faces(n_cols, n_rows).index((2, 0))] = None
        out.append((f"{k}free", sw.SosLatticeSpec(n_cols, n_rows, cols, rows, free, params)))
    return out


J0_TAILS = (("UL", 0), ("UL", 1), ("UL", -1), ("UUL", 1), ("RUUL", -1), ("UU", 0))


def sos_currents(opts: SuiteOptions) -> Iterator[Check]:
    tol = opts.tolerance(1e-9)
    cache = {}

    def plaquette(spec, emb, vertex, i, barred):
        key = (id(spec), vertex, i, barred)
        if key not in cache:
            cache[key] = sc.check_sos_plaquette(spec, vertex, i, barred, emb)
        return cache[key]

    for name, spec in _sos_lattices(opts, 5):
        emb = embed(spec.col_lambdas, spec.row_lambdas, spec.params.eta)
        for vertex in _interior_vertices(spec.n_cols, spec.n_rows):
            for i, barred in itertools.product((0, 1), (False, True)):
                rec = _sos_record(spec, vertex=list(vertex), index=i, barred=barred)
                label = f"{name}/{'Jbar' if barred else 'J'}{i}/{vertex[0]}-{vertex[1]}"
                yield Check(f"sos-plaquette/{label}", rec,
                            lambda s=spec, e=emb, v=vertex, i=i, b=barred: plaquette(s, e, v, i, b)[1]["four_term"], tol)
                yield Check(f"sos-contour/{label}", rec,
                            lambda s=spec, e=emb, v=vertex, i=i, b=barred: plaquette(s, e, v, i, b)[1]["contour"], tol)
        if not name.endswith("fixed"):
            continue
        for (steps, loops), barred in itertools.product(J0_TAILS, (False, True)):
            try:
                ins = sc.SosCurrentInsertion(0, barred, vl.TailPath((2, 0), steps, loops))
                sc.SosCurrentModel(spec, ins)
            except GeometryError:
                continue
            rec = _sos_record(spec, tail=steps, loops=loops, barred=barred)
            label = f"{name}/{'Jbar' if barred else 'J'}0/{steps}{loops:+d}"
            report = {}

            def get(key, s=spec, ins=ins, report=report):
                if not report:
                    report.update(sc.check_j0_locality(s, ins))
                return report[key]

            yield Check(f"j0-equal-heights/{label}", rec,
                        lambda get=get: (0.0 if get("equal_heights") else 1.0, str(get("configurations"))), 0.0)
            yield Check(f"j0-telescoping/{label}", rec, lambda get=get: get("telescoping"), opts.tolerance(1e-10))
            yield Check(f"j0-local/{label}", rec, lambda get=get: get("local"), opts.tolerance(1e-10))


# ---------------------------------------------------------------------------
# vertex-face correspondence


EQUIVALENCE_TAILS = (("U", 0), ("UL", 0), ("UL", 1), ("UL", -1))


def _sos_small_lattices(opts: SuiteOptions, salt: int):
    rng = np.random.default_rng([opts.seed, salt])
    out = []
    for k, eta in enumerate(opts.etas()):
        params = ModelParams(eta=eta, x0=_draw_x0(rng, eta))
        cols = [complex(*rng.uniform(-0.5, 0.5, 2)) for _ in range(2)]
        rows = [complex(*rng.uniform(-0.5, 0.5, 2)) for _ in range(2)]
        walk = sw.random_boundary_walk(2, 2, rng)
        out.append((f"{k}fixed", sw.SosLatticeSpec(2, 2, cols, rows, walk, params)))
        free = list(walk)
        free[sw.ring_faces(2, 2).index((1, 0))] = None
        out.append((f"{k}free", sw.SosLatticeSpec(2, 2, cols, rows, free, params)))
    return out


def equivalence(opts: SuiteOptions) -> Iterator[Check]:
    tol = opts.tolerance(1e-9)
    for name, spec in _sos_small_lattices(opts, 6):
        yield Check(f"partition/{name}", _sos_record(spec), lambda s=spec: sw.check_partition_correspondence(s), tol)
        for (steps, loops), i, barred in itertools.product(EQUIVALENCE_TAILS, (0, 1), (False, True)):
            ins = sc.SosCurrentInsertion(i, barred, vl.TailPath((1, 0), steps, loops))
            rec = _sos_record(spec, tail=steps, loops=loops, index=i, barred=barred)
            label = f"{name}/{'Jbar' if barred else 'J'}{i}/{steps}{loops:+d}"

            def run(s=spec, ins=ins):
                res, d = sc.check_equivalence_6v_sos(s, ins)
                return res, f"M={d['winding']}"

            yield Check(f"current/{label}", rec, run, tol)


# ---------------------------------------------------------------------------
# cyclic SOS arithmetic


KNOWN_CENTRAL_CHARGES = {(4, 3): Fraction(1, 2), (5, 4): Fraction(7, 10), (5, 2): Fraction(-22, 5)}
TL_MAX_N = 12
TL_MAX_LENGTH = 6
CSOS_X0 = 0.37 + 0.11j


def _exact(ok: bool, value) -> tuple[float, str]:
    return (0.0 if ok else 1.0), str(value)


def _ln_row(p, q):
    ell, n = cs.derive_ln(p, q)
    ok = Fraction(2 * ell, n) == Fraction(p - q, p) and math.gcd(ell, n) == 1 and n in (p, 2 * p)
    return _exact(ok, f"{ell}/{n}")


def _tl_row(csos, length):
    rep = cs.check_tl_relations(csos, length, CSOS_X0)
    return max(rep.values()), f"n={csos.n}"


def _w_tl_row(csos, lam):
    return _max(cs.check_w_tl_decomposition(csos, h, lam, CSOS_X0) for h in cs.admissible_faces(csos))


def _periodicity_row(csos, lam):
    rep = cs.check_cyclic_periodicity(csos, CSOS_X0, lam)
    return max(rep["face_weight"], rep["intertwiner"])


def csos_spectrum(opts: SuiteOptions) -> Iterator[Check]:
    tol = opts.tolerance(1e-10)
    pairs = cs.coprime_pairs(12)
    for p, q in pairs:
        rec = {"p": p, "pprime": q}
        yield Check(f"ln/{p:02d}-{q:02d}", rec, lambda p=p, q=q: _ln_row(p, q), 0.0)
        csos = cs.CsosParams.from_pp(p, q)
        yield Check(f"spin-h13/{p:02d}-{q:02d}", rec,
                    lambda c=csos: (cs.check_spin_identification(c)["residual"],
                                    str(cs.check_spin_identification(c)["h13"])), 1e-14)
        yield Check(f"c-eff/{p:02d}-{q:02d}", rec,
                    lambda c=csos: _exact(cs.effective_central_charge(c) == 1, cs.effective_central_charge(c)), 0.0)
        yield Check(f"electric-magnetic/{p:02d}-{q:02d}", rec, lambda c=csos: _exact(
            all(cs.electric_dimension(c, j, k) == cs.conformal_dimensions(c, Fraction(2 * j, c.n) + k, 0)[0]
                for j in range(c.n) for k in (-1, 0, 1))
            and all(cs.magnetic_dimension(c, m) == cs.conformal_dimensions(c, 0, m * c.n)[0] for m in (-1, 1)),
            "ok"), 0.0)
        if csos.n <= TL_MAX_N:
            for length in range(2, TL_MAX_LENGTH + 1):
                yield Check(f"tl/{p:02d}-{q:02d}/L{length}", {**rec, "length": length},
                            lambda c=csos, L=length: _tl_row(c, L), tol)
            lam = 0.31 - 0.12j
            yield Check(f"w-tl/{p:02d}-{q:02d}", {**rec, "lambda": _c(lam)}, lambda c=csos: _w_tl_row(c, lam), tol)
            yield Check(f"periodicity/{p:02d}-{q:02d}", {**rec, "lambda": _c(lam)},
                        lambda c=csos: _periodicity_row(c, lam), tol)
    for (p, q), c in sorted(KNOWN_CENTRAL_CHARGES.items()):
        csos = cs.CsosParams.from_pp(p, q)
        yield Check(f"central-charge/{p:02d}-{q:02d}", {"p": p, "pprime": q},
                    lambda s=csos, c=c: _exact(cs.central_charge(s) == c, cs.central_charge(s)), 0.0)
    for n in range(3, 13):
        yield Check(f"adjacency/{n:02d}", {"n": n}, lambda n=n: _eig_row(n), tol)
    p, q = opts.pp or (4, 3)
    csos = _csos_or_usage(p, q)
    rec = {"p": p, "pprime": q}
    yield Check(f"selected/central-charge/{p:02d}-{q:02d}", rec,
                lambda: _exact(True, cs.central_charge(csos)), 0.0)
    yield Check(f"selected/h13/{p:02d}-{q:02d}", rec,
                lambda: _exact(True, cs.conformal_dimensions(csos, *cs.H13_SLOT)[0]), 0.0)
    yield Check(f"selected/leading-exponent/{p:02d}-{q:02d}", rec,
                lambda: _exact(cs.leading_exponent(csos) == (cs.central_charge(csos) - 1) / 6,
                               cs.leading_exponent(csos)), 0.0)
    yield Check(f"selected/torus/{p:02d}-{q:02d}", {**rec, "q": _c(0.05j)}, lambda: _torus_row(csos), 1e-8)


def _csos_or_usage(p, q):
    try:
        return cs.CsosParams.from_pp(p, q)
    except ArgError as exc:
        raise UsageError(str(exc)) from exc


def _eig_row(n):
    rep = cs.check_eigensystem(cs.adjacency_eigensystem(n))
    return max(rep["orthonormal"], rep["eigen"], 0.0 if rep["count"] == n else 1.0), f"count={rep['count']}"


def _torus_row(csos):
    ch = cs.torus_character(csos, 0.05j)
    return ch.error_estimate, f"{ch.value.real:.12g}"


# ---------------------------------------------------------------------------
# RSOS restriction probe


def _rsos_row(p):
    w = sc.rsos_incompatibility_probe(p)
    z_far, z_near = w.partition_out_of_range
    ok = abs(w.weight) > 1e-6 and z_near <= 0.5 * z_far
    return (0.0 if ok else 1.0), f"heights={list(w.heights)} out={list(w.out_of_range)} tail={w.steps}"


def rsos_probe(opts: SuiteOptions) -> Iterator[Check]:
    ps = (opts.pp[0],) if opts.pp else (3, 4, 5)
    for p in ps:
        if p < 3:
            raise UsageError("the RSOS probe needs p >= 3")
        yield Check(f"witness/p{p}", {"p": p}, lambda p=p: _rsos_row(p), 0.0)


SUITES = {
    "vertex-identities": vertex_identities,
    "vertex-conservation": vertex_conservation,
    "vertex-parafermion": vertex_parafermion,
    "sos-identities": sos_identities,
    "sos-currents": sos_currents,
    "equivalence": equivalence,
    "csos-spectrum": csos_spectrum,
    "rsos-probe": rsos_probe,
}
