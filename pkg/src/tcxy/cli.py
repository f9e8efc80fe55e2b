"""Command-line front end: ``tcxy <experiment> --config <path> [--out <path>]``.

Each run writes a CSV (header row, LF endings, floats as shortest round-trip
decimals, rows ordered by the sweep key) and a ``.manifest.json`` next to it.

Exit codes: 0 success, 2 configuration error, 3 validity failure under
``--strict``, 4 oracle-check failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import EXPERIMENTS, INTEGER_KEYS, RunConfig, load_config
from .dynamics import compare_dynamics
from .edoracle import jz_moments_ed
from .errors import ConfigurationError, TcxyError
from .freefermion import SECTORS, XYParams, has_zero_mode, jz_moments, phase_classify
from .hamiltonians import validity_report
from .metrology import detect_regime, moments_for, qfi_analytic, qfi_regime

EXIT_OK, EXIT_CONFIG, EXIT_VALIDITY, EXIT_ORACLE = 0, 2, 3, 4

DEFAULT_ORACLE_N = [4, 6, 8, 10, 12]
DEFAULT_ORACLE_GAMMA = [0.0, 0.5, 1.0, 2.0]
DEFAULT_ORACLE_H = [0.0, 0.3, 0.5, 0.9, 1.5]


@dataclass
class SweepResult:
    header: list
    rows: list
    manifest: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK


class StrictValidityError(TcxyError):
    pass


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    buf.write(",".join(result.header) + "\n")
    for row in result.rows:
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def worker_count() -> int:
    raw = os.environ.get("TCXY_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _pmap(fn, items):
    items = list(items)
    workers = min(worker_count(), max(len(items), 1))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _require_axis(cfg: RunConfig, axis: str, scale: str | None = None):
    sweep = cfg.sweep()
    if sweep is None or sweep.axis != axis:
        raise ConfigurationError(f"this experiment needs sweep_axis = {axis}", key="sweep_axis", line=cfg.lines.get("sweep_axis"))
    if scale == "log" and "sweep_values" not in cfg.values and cfg.get("sweep_scale", "linear") != "log":
        raise ConfigurationError("this experiment needs sweep_scale = log", key="sweep_scale", line=cfg.lines.get("sweep_scale"))
    return sweep


# --- experiments ------------------------------------------------------------------


def run_dynamics(cfg: RunConfig, strict: bool = False) -> SweepResult:
    p = cfg.params()
    report = validity_report(p)
    if strict and not report.passed:
        raise StrictValidityError(f"validity conditions fail: {report.as_dict()}")
    t_max = float(cfg.get("t_max", 20e-6))
    n_times = int(cfg.get("n_times", 200))
    times = np.linspace(0.0, t_max, n_times)
    cmp_ = compare_dynamics(p, times)
    rows = [
        [t, a, b, abs(a - b)]
        for t, a, b in zip(times.tolist(), cmp_.series_full.values.tolist(), cmp_.series_eff.values.tolist())
    ]
    extra = {
        "validity": report.as_dict(),
        "max_abs_dev": cmp_.max_abs_dev,
        "mean_abs_dev": cmp_.mean_abs_dev,
        "fock_cutoff": p.hilbert.fock_cutoff,
        "hilbert_dim": p.hilbert.dim,
    }
    return SweepResult(["t_seconds", "jphi_full", "jphi_eff", "abs_dev"], rows, extra)


def run_qfi_sweep(cfg: RunConfig, sector: str) -> SweepResult:
    sweep = _require_axis(cfg, "n_bar", "log")
    series_axis = cfg.get("series_axis")
    series = [None]
    if series_axis:
        cast = int if series_axis in INTEGER_KEYS else float
        series = [cast(x) for x in cfg.get("series_values", [])]
        if not series:
            raise ConfigurationError("series_axis needs series_values", key="series_values")

    def point(args):
        sval, nb = args
        over = {"n_bar": nb}
        if series_axis:
            over[series_axis] = sval
        p = cfg.params(**over)
        f = qfi_analytic(p, 1.0, sector).value
        regime = detect_regime(p)
        freg = qfi_regime(p, 1.0, regime).value if regime else None
        row = [nb, f, 1.0 / math.sqrt(f) if f > 0 else math.inf, freg, regime or ""]
        return ([sval] if series_axis else []) + row

    grid = [(s, nb) for nb in sweep.values for s in sorted(series)] if series_axis else [(None, nb) for nb in sweep.values]
    rows = _pmap(point, grid)
    header = ["n_bar", "qfi_analytic", "sensitivity", "qfi_regime", "regime_label"]
    if series_axis:
        header = [series_axis] + header
    return SweepResult(header, rows, {"qfi_units": "t^2", "sensitivity_units": "1/t"})


def run_phase_scan(cfg: RunConfig, sector: str) -> SweepResult:
    sweep = _require_axis(cfg, "h")

    def point(h):
        p = cfg.params(h=h)
        m = moments_for(p, sector)
        f = qfi_analytic(p, 1.0, sector).value
        return [h, f, m.variance, m.second, phase_classify(p.xy).value]

    rows = _pmap(point, sweep.values)
    return SweepResult(["h", "qfi", "var_jz", "jz2"] + ["phase_label"], rows, {"qfi_units": "t^2"})


def run_gamma_scan(cfg: RunConfig, sector: str) -> SweepResult:
    sweep = _require_axis(cfg, "gamma")

    def point(gamma):
        p = cfg.params(gamma=gamma)
        return [gamma, jz_moments(p.xy, sector).variance / p.n_spins]

    return SweepResult(["gamma", "var_jz_over_N"], _pmap(point, sweep.values))


def run_validity(cfg: RunConfig, strict: bool = False) -> SweepResult:
    sweep = cfg.sweep()
    threshold = float(cfg.get("threshold", 10.0))
    keys = ["detuning", "r1", "r2", "r3", "r4", "threshold", "pass"]

    def point(val):
        p = cfg.params(**({sweep.axis: val} if sweep else {}))
        r = validity_report(p, threshold)
        row = [p.detuning, r.r1, r.r2, r.r3, r.r4, r.threshold, r.passed]
        return ([val] if sweep else []) + row

    rows = _pmap(point, sweep.values if sweep else [None])
    header = ([sweep.axis] if sweep else []) + keys
    result = SweepResult(header, rows)
    if strict and not all(row[-1] for row in rows):
        result.exit_code = EXIT_VALIDITY
    return result


def oracle_case(n: int, lam: float, gamma: float, h: float, tol: float) -> list:
    xy = XYParams(lam, gamma, h, n)
    if abs(h - lam) <= 1e-12 * max(lam, 1.0) or has_zero_mode(xy, "antiperiodic"):
        return [n, gamma, h, "skipped", None, None, None]
    a = jz_moments(xy, "antiperiodic")
    b = jz_moments_ed(xy)
    d = [abs(a.mean - b.mean), abs(a.second - b.second), abs(a.variance - b.variance)]
    return [n, gamma, h, "pass" if max(d) <= tol else "fail", *d]


def run_oracle_check(cfg: RunConfig) -> SweepResult:
    ns = [int(x) for x in cfg.get("oracle_n", DEFAULT_ORACLE_N)]
    gammas = [float(x) for x in cfg.get("oracle_gamma", DEFAULT_ORACLE_GAMMA)]
    hs = [float(x) for x in cfg.get("oracle_h", DEFAULT_ORACLE_H)]
    lam = cfg.resolved("lambda")
    tol = float(cfg.get("tolerance", 1e-10))
    header = ["n_spins", "gamma", "h", "status", "d_mean", "d_second", "d_variance"]
    cases = [(n, g, h) for n in sorted(ns) for g in sorted(gammas) for h in sorted(hs)]
    if not cases:
        print("warning: oracle-check grid is empty; nothing to check", file=sys.stderr)
        return SweepResult(header, [])
    rows = _pmap(lambda c: oracle_case(c[0], lam, c[1], c[2], tol), cases)
    failed = [r for r in rows if r[3] == "fail"]
    for r in failed:
        print(f"oracle mismatch: N={r[0]} gamma={r[1]} h={r[2]} deltas={r[4:]}", file=sys.stderr)
    result = SweepResult(header, rows, {"tolerance": tol, "failed": len(failed)})
    result.exit_code = EXIT_ORACLE if failed else EXIT_OK
    return result


def run_experiment(cfg: RunConfig, experiment: str, sector: str | None = None, strict: bool = False) -> SweepResult:
    sector = sector or cfg.sector
    if sector not in SECTORS:
        raise ConfigurationError(f"sector must be one of {SECTORS}", key="sector")
    if experiment == "dynamics":
        return run_dynamics(cfg, strict)
    if experiment == "qfi-sweep":
        return run_qfi_sweep(cfg, sector)
    if experiment == "phase-scan":
        return run_phase_scan(cfg, sector)
    if experiment == "gamma-scan":
        return run_gamma_scan(cfg, sector)
    if experiment == "validity":
        return run_validity(cfg, strict)
    if experiment == "oracle-check":
        return run_oracle_check(cfg)
    raise ConfigurationError(f"unknown experiment {experiment!r}", key="experiment")


def manifest(cfg: RunConfig, experiment: str, sector: str, result: SweepResult, elapsed: float) -> dict:
    sweep = cfg.sweep()
    return {
        "tool": "tcxy",
        "version": __version__,
        "experiment": experiment,
        "config_source": cfg.source,
        "config_values": cfg.values,
        "units": cfg.unit_flag,
        "sector": sector,
        "resolved_params_angular": cfg.manifest_params(),
        "sweep": None if sweep is None else {"axis": sweep.axis, "count": sweep.count},
        "columns": result.header,
        "n_rows": len(result.rows),
        "started_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_clock_seconds": elapsed,
        **result.manifest,
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tcxy", description="QFI of the XY-chain Tavis-Cummings model.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", required=True, help="config file, or name of a shipped config (fig2, fig4a, ...)")
    ap.add_argument("--out", default=None, help="CSV output path (manifest goes next to it)")
    ap.add_argument("--sector", choices=SECTORS, default=None)
    ap.add_argument("--strict", action="store_true", help="fail (exit 3) when validity conditions do not hold")
    ap.add_argument("--version", action="version", version=f"tcxy {__version__}")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if cfg.experiment is not None and cfg.experiment != args.experiment:
            print(
                f"note: config declares experiment '{cfg.experiment}', running '{args.experiment}'",
                file=sys.stderr,
            )
        sector = args.sector or cfg.sector
        start = time.perf_counter()
        result = run_experiment(cfg, args.experiment, sector, args.strict)
        elapsed = time.perf_counter() - start
    except StrictValidityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out or cfg.output_path or f"{args.experiment}.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_csv(result))
    man = _jsonable(manifest(cfg, args.experiment, sector, result, elapsed))
    out.with_suffix(".manifest.json").write_text(json.dumps(man, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(result.rows)} rows)", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
