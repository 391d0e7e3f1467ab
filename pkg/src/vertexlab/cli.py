"""Command-line batch driver: run check suites and emit reports or tables."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import csos as cs
from .errors import ArgError, UsageError
from .numerics import DEFAULT_ETA, DEFAULT_X0, ModelParams, default_seed, params_digest
from .sos_weights import face_weight, height_step
from .suites import SUITES, SuiteOptions

DEFAULT_BUDGET = 300.0
REPORT_VERSION = 1
ROW_FIELDS = ["id", "digest", "residual", "tol", "pass", "value", "error"]


@dataclass
class SuiteConfig:
    suite: str
    seed: int = field(default_factory=default_seed)
    eta: complex | None = None
    pp: tuple[int, int] | None = None
    size: tuple[int, int] | None = None
    tol: float | None = None
    out: str | None = None
    format: str = "json"
    budget: float = DEFAULT_BUDGET
    timing: bool = False

    def __post_init__(self):
        if self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.format not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        if self.size is not None and (min(self.size) < 1 or self.size[0] * self.size[1] > 16):
            raise UsageError("lattice size must be NxM with N, M >= 1 and N*M <= 16")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("tolerance must be positive")
        if self.budget <= 0:
            raise UsageError("budget must be positive")

    def options(self) -> SuiteOptions:
        return SuiteOptions(seed=self.seed, eta=self.eta, pp=self.pp, size=self.size, tol=self.tol)

    def record(self) -> dict:
        return {
            "eta": None if self.eta is None else [self.eta.real, self.eta.imag],
            "pp": None if self.pp is None else list(self.pp),
            "size": None if self.size is None else list(self.size),
            "tol": self.tol,
        }


def _finite(x: float) -> float | None:
    return float(x) if math.isfinite(x) else None


def _evaluate(check) -> dict:
    row = {"id": check.id, "digest": params_digest(check.params), "tol": check.tol}
    try:
        out = check.run()
    except Exception as exc:  # a failing check must not abort the report
        row.update(residual=None, error=f"{type(exc).__name__}: {exc}")
        row["pass"] = False
        return row
    value = None
    if isinstance(out, tuple):
        out, value = out
    res = float(out)
    row["residual"] = _finite(res)
    row["pass"] = bool(math.isfinite(res) and res <= check.tol)
    if value is not None:
        row["value"] = value
    return row


def run(config: SuiteConfig) -> dict:
    """Execute a suite and return its report; rows are sorted by check id."""
    start = time.perf_counter()
    rows, skipped = [], 0
    for check in SUITES[config.suite](config.options()):
        if time.perf_counter() - start > config.budget:
            skipped += 1
            continue
        rows.append(_evaluate(check))
    rows.sort(key=lambda r: r["id"])
    residuals = [r["residual"] for r in rows if r["residual"] is not None]
    summary = {
        "count": len(rows),
        "passed": sum(r["pass"] for r in rows),
        "failed": sum(not r["pass"] for r in rows),
        "max_residual": max(residuals, default=0.0),
        "truncated": skipped > 0,
        "skipped": skipped,
    }
    if config.timing:
        summary["wall_time_s"] = round(time.perf_counter() - start, 3)
    return {
        "version": REPORT_VERSION,
        "suite": config.suite,
        "seed": config.seed,
        "config": config.record(),
        "rows": rows,
        "summary": summary,
    }


def report_ok(report: dict) -> bool:
    s = report["summary"]
    return s["failed"] == 0 and not s["truncated"]


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=ROW_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in report["rows"]:
        writer.writerow({k: _csv_cell(row.get(k)) for k in ROW_FIELDS})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------------------
# tables


def spectrum_rows(p: int, pprime: int, e_max=2, m_max: int | None = None, e_den: int = 1) -> list[list]:
    csos = cs.CsosParams.from_pp(p, pprime)
    m_max = 2 * csos.n if m_max is None else m_max
    return [entry.row(csos) for entry in cs.spectrum_table(csos, e_max, m_max, e_den)]


WEIGHT_COLUMNS = ["a", "b", "c", "d", "w_re", "w_im"]


def weight_rows(eta=DEFAULT_ETA, x0=DEFAULT_X0, lam=0.3 - 0.1j, spread: int = 3) -> list[list]:
    params = ModelParams(eta=eta, x0=x0)
    rows = []
    for a in range(-spread, spread + 1):
        for b in (a - 1, a + 1):
            for d in (a - 1, a + 1):
                for c in (b - 1, b + 1):
                    if not height_step(c, d):
                        continue
                    w = face_weight(a, b, c, d, lam, params)
                    rows.append([a, b, c, d, w.real, w.imag])
    return rows


def emit_tables(kind: str, params: dict, path) -> Path:
    """Write a spectrum or face-weight table; ``.json`` paths get JSON, anything else CSV."""
    if kind == "spectrum":
        columns = cs.SPECTRUM_COLUMNS
        rows = spectrum_rows(**params)
    elif kind == "weights":
        columns = WEIGHT_COLUMNS
        rows = weight_rows(**params)
    else:
        raise UsageError(f"unknown table kind {kind!r}")
    path = Path(path)
    if path.suffix == ".json":
        text = json.dumps({"kind": kind, "columns": columns, "rows": rows}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows([[repr(v) if isinstance(v, float) else v for v in r] for r in rows])
        text = buf.getvalue()
    path.write_text(text)
    return path


# ---------------------------------------------------------------------------
# argument handling


def _pair(text: str, conv, sep=",", what="pair"):
    parts = str(text).lower().split(sep)
    if len(parts) != 2:
        raise UsageError(f"expected a {what} like a{sep}b, got {text!r}")
    try:
        return conv(parts[0]), conv(parts[1])
    except ValueError as exc:
        raise UsageError(f"bad {what} {text!r}") from exc


def _parse_eta(v):
    if v is None or isinstance(v, complex):
        return v
    re_, im = _pair(",".join(map(str, v)) if isinstance(v, list) else v, float, what="complex number")
    return complex(re_, im)


def _parse_pp(v):
    if v is None:
        return None
    p, q = _pair(",".join(map(str, v)) if isinstance(v, list) else v, int, what="p,pprime pair")
    try:
        cs.derive_ln(p, q)
    except ArgError as exc:
        raise UsageError(str(exc)) from exc
    return p, q


def _parse_size(v):
    if v is None:
        return None
    if isinstance(v, list):
        v = f"{v[0]}x{v[1]}"
    return _pair(v, int, sep="x", what="size NxM")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="vertexlab", description="Run numerical check suites for six-vertex and SOS lattice models.")
    ap.add_argument("--suite", help=f"one of: {', '.join(SUITES)}")
    ap.add_argument("--seed", type=int, help="sampling seed (default: $VERTEXLAB_SEED or built-in)")
    ap.add_argument("--eta", help="anisotropy as re,im")
    ap.add_argument("--pp", help="coprime pair p,pprime")
    ap.add_argument("--size", help="lattice size NxM (columns x rows)")
    ap.add_argument("--tol", type=float, help="override every check tolerance")
    ap.add_argument("--out", help="report path (default: stdout)")
    ap.add_argument("--format", choices=("json", "csv"), help="report format (default json)")
    ap.add_argument("--config", help="JSON file; its keys override the corresponding flags")
    ap.add_argument("--budget", type=float, help=f"wall-time budget in seconds (default {DEFAULT_BUDGET:g})")
    ap.add_argument("--timing", action="store_true", help="record wall time in the report summary")
    ap.add_argument("--table", choices=("spectrum", "weights"), help="write a table instead of running a suite")
    return ap


CONFIG_KEYS = {"suite", "seed", "eta", "pp", "size", "tol", "out", "format", "budget", "timing", "table"}


def _merged(args: argparse.Namespace) -> dict:
    merged = {k: v for k, v in vars(args).items() if k != "config"}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict) or set(data) - CONFIG_KEYS:
            raise UsageError(f"config keys must be among {sorted(CONFIG_KEYS)}")
        merged.update(data)
    return merged


def config_from_args(argv=None) -> tuple[dict, SuiteConfig | None]:
    m = _merged(build_parser().parse_args(argv))
    if m.get("table"):
        return m, None
    if not m.get("suite"):
        raise UsageError("--suite is required")
    cfg = SuiteConfig(
        suite=m["suite"],
        seed=default_seed() if m.get("seed") is None else int(m["seed"]),
        eta=_parse_eta(m.get("eta")),
        pp=_parse_pp(m.get("pp")),
        size=_parse_size(m.get("size")),
        tol=m.get("tol"),
        out=m.get("out"),
        format=m.get("format") or "json",
        budget=DEFAULT_BUDGET if m.get("budget") is None else float(m["budget"]),
        timing=bool(m.get("timing")),
    )
    return m, cfg


def _table(m: dict) -> int:
    if not m.get("out"):
        raise UsageError("--table needs --out")
    if m["table"] == "spectrum":
        p, q = _parse_pp(m.get("pp")) or (4, 3)
        params = {"p": p, "pprime": q}
    else:
        eta = _parse_eta(m.get("eta"))
        params = {} if eta is None else {"eta": eta}
    emit_tables(m["table"], params, m["out"])
    return 0


def main(argv=None) -> int:
    try:
        m, cfg = config_from_args(argv)
        if cfg is None:
            return _table(m)
        report = run(cfg)
    except UsageError as exc:
        print(f"vertexlab: {exc}", file=sys.stderr)
        return 2
    text = render(report, cfg.format)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    s = report["summary"]
    line = f"{cfg.suite}: {s['passed']}/{s['count']} passed, max residual {s['max_residual']:.3g}"
    if s["truncated"]:
        line += f", truncated at budget with {s['skipped']} checks not run"
    print(line, file=sys.stderr)
    return 0 if report_ok(report) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
