"""End-to-end acceptance battery.

Each test evaluates one criterion from fresh suite reports, records a
PASS/FAIL line (shown in the pytest terminal summary) and asserts. Run the
file directly to print the lines without pytest.
"""

import re
import sys
import time
from collections import defaultdict

import pytest

from vertexlab.cli import SuiteConfig, render, run

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # pragma: no cover - direct execution outside the tests directory
    ACCEPTANCE_LINES = {}

SEED = 20240611
_REPORTS = {}


def report(suite, **kw):
    key = (suite, tuple(sorted(kw.items())))
    if key not in _REPORTS:
        start = time.perf_counter()
        rep = run(SuiteConfig(suite, seed=SEED, **kw))
        _REPORTS[key] = (rep, time.perf_counter() - start)
    return _REPORTS[key]


def record(number, title, ok, detail):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def rows_with(rep, pattern):
    rx = re.compile(pattern)
    return [r for r in rep["rows"] if rx.match(r["id"])]


def worst(rows):
    return max((r["residual"] if r["residual"] is not None else float("inf") for r in rows), default=float("nan"))


IDENTITY_FAMILIES = {
    "vertex-identities": ["ybe", "unitarity", "crossing"] + [f"intertwining/{k}{i}" for k in
                         ("e", "f", "t", "t_inv", "f_bar", "e_bar") for i in (0, 1)],
    "sos-identities": ["virf1", "virf2", "inv-a", "inv-b", "inv-c", "inv-d", "ybe-sos"]
    + [f"{n}/{i}" for n in ("ybt1", "ybt2", "sosinv1", "sosinv2", "sosinv3", "sosinv4",
                            "soscr1", "soscr2", "soscr3", "soscr4", "sosint1", "sosint2") for i in (0, 1)]
    + ["t-symmetry"],
}


def test_criterion_1_identity_battery():
    elapsed, bad, thin, worst_res = 0.0, [], [], 0.0
    for suite, families in IDENTITY_FAMILIES.items():
        rep, t = report(suite)
        elapsed += t
        for fam in families:
            rows = rows_with(rep, re.escape(fam) + r"/\d{3}$")
            if len(rows) < 100:
                thin.append(fam)
            worst_res = max(worst_res, worst(rows))
            bad += [r["id"] for r in rows if r["residual"] is None or r["residual"] > 1e-9]
    ok = not bad and not thin and elapsed <= 60
    record(1, "identity battery", ok,
           f"max residual {worst_res:.2e}, {len(bad)} over 1e-9, families under 100 sets {thin}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_closed_forms_vs_contractions():
    rep, _ = report("sos-identities")
    rows = rows_with(rep, r"closed-[ft]/")
    sets = {r["id"].rsplit("/", 1)[1] for r in rows}
    labels = {r["id"].rsplit("/", 1)[0] for r in rows}
    ok = len(sets) >= 20 and len(labels) == 8 and worst(rows) <= 1e-12
    record(2, "closed forms vs contraction", ok, f"{len(sets)} sets x {len(labels)} weights, max {worst(rows):.2e}")
    assert ok


def test_criterion_3_lattice_conservation():
    rv, tv = report("vertex-conservation")
    rp, tp = report("vertex-parafermion")
    rs, ts = report("sos-currents")
    groups = {
        "6v four-term": rows_with(rv, r"plaquette/"),
        "6v contour": rows_with(rp, r"contour/"),
        "sos four-term": rows_with(rs, r"sos-plaquette/"),
        "sos contour": rows_with(rs, r"sos-contour/"),
    }
    flavours = {
        "6v four-term": {r["id"].split("/")[2] for r in groups["6v four-term"]},
        "sos four-term": {r["id"].split("/")[2] for r in groups["sos four-term"]},
    }
    elapsed = tv + tp + ts
    ok = (all(g and worst(g) <= 1e-9 for g in groups.values())
          and len(flavours["6v four-term"]) == 4 and len(flavours["sos four-term"]) == 4 and elapsed <= 120)
    detail = ", ".join(f"{k} {worst(g):.1e} ({len(g)})" for k, g in groups.items())
    record(3, "lattice conservation", ok, f"{detail}, {elapsed:.1f}s")
    assert ok


def test_criterion_4_correspondence():
    rep, _ = report("equivalence")
    z = rows_with(rep, r"partition/")
    cur = rows_with(rep, r"current/")
    windings = {r.get("value") for r in cur}
    ok = z and cur and worst(z) <= 1e-9 and worst(cur) <= 1e-9 and {"M=0", "M=1", "M=-1"} <= windings
    record(4, "vertex-face correspondence", ok,
           f"Z max {worst(z):.1e} ({len(z)}), currents max {worst(cur):.1e} ({len(cur)}), windings {sorted(windings)}")
    assert ok


def test_criterion_5_path_and_winding_laws():
    rep, _ = report("vertex-conservation")
    homotopy = rows_with(rep, r"homotopy/")
    unwind = rows_with(rep, r"unwind/")
    exponent = rows_with(rep, r"unwind-exponent/")
    ok = (homotopy and unwind and exponent and worst(homotopy) <= 1e-10 and worst(unwind) <= 1e-10
          and all(r["residual"] == 0.0 for r in exponent))
    record(5, "path and winding laws", ok,
           f"homotopy {worst(homotopy):.1e}, unwind {worst(unwind):.1e}, exact exponents {len(exponent)}")
    assert ok


def test_criterion_6_j0_locality():
    rep, _ = report("sos-currents")
    equal = rows_with(rep, r"j0-equal-heights/")
    tele = rows_with(rep, r"j0-telescoping/")
    local = rows_with(rep, r"j0-local/")
    ok = (equal and all(r["pass"] for r in equal) and worst(tele) <= 1e-10 and worst(local) <= 1e-10)
    record(6, "J0 locality", ok, f"{len(equal)} tails, telescoping {worst(tele):.1e}, local {worst(local):.1e}")
    assert ok


def test_criterion_7_csos_arithmetic():
    rep, _ = report("csos-spectrum")
    ln = rows_with(rep, r"ln/")
    cc = rows_with(rep, r"central-charge/")
    spin = rows_with(rep, r"spin-h13/")
    ceff = rows_with(rep, r"c-eff/")
    tl = rows_with(rep, r"tl/")
    n_pairs = sum(1 for p in range(2, 13) for q in range(1, p) if __import__("math").gcd(p, q) == 1)
    lengths = {int(r["id"].rsplit("L", 1)[1]) for r in tl}
    by_value = {r["id"]: r.get("value") for r in cc}
    ok = (len(ln) == n_pairs and all(r["pass"] for r in ln)
          and by_value == {"central-charge/04-03": "1/2", "central-charge/05-04": "7/10", "central-charge/05-02": "-22/5"}
          and all(r["pass"] for r in cc) and len(spin) == n_pairs and worst(spin) <= 1e-14
          and len(ceff) == n_pairs and all(r["pass"] for r in ceff)
          and tl and worst(tl) <= 1e-10 and max(lengths) == 6)
    record(7, "CSOS arithmetic", ok,
           f"{len(ln)} pairs, s1-h13 max {worst(spin):.1e}, TL max {worst(tl):.1e} over {len(tl)} (n,L) cases")
    assert ok


def test_criterion_8_rsos_probe():
    rep, _ = report("rsos-probe")
    rows = rows_with(rep, r"witness/p")
    ps = sorted(int(r["id"].rsplit("p", 1)[1]) for r in rows)
    ok = ps == [3, 4, 5] and all(r["pass"] for r in rows)
    record(8, "RSOS probe", ok, "; ".join(f"{r['id']}: {r.get('value') or r.get('error')}" for r in rows))
    assert ok


SUITE_NAMES = ["vertex-identities", "vertex-conservation", "vertex-parafermion", "sos-identities",
               "sos-currents", "equivalence", "csos-spectrum", "rsos-probe"]


def test_criterion_9_determinism():
    differing = defaultdict(list)
    for suite in SUITE_NAMES:
        first, _ = report(suite)
        again = run(SuiteConfig(suite, seed=SEED))
        for fmt in ("json", "csv"):
            if render(first, fmt) != render(again, fmt):
                differing[suite].append(fmt)
    ok = not differing
    record(9, "determinism", ok, f"{len(SUITE_NAMES)} suites rerun, differing: {dict(differing) or 'none'}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
