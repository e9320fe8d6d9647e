"""Command-line entry point: run, sweep, verify, calibrate, report.

Exit codes are a stable contract: 0 success, 1 validation error (the message
names the offending parameter), 2 runtime failure (calibration miss, failed
verification, I/O trouble). Values resolve as flag > config file > default,
and the full effective configuration is echoed into every persisted record.
--seed only affects the randomized test fields in verify; simulations are
deterministic regardless.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import regularity
from .experiments import SweepPlan, make_datum, parse_datum, sweep
from .operators import CalibrationError, calibrate_cgamma
from .records import append_record, load_records
from .regularity import RegularityConstants
from .report import report
from .solver import DiagnosticPlan, ModelParams, StepControl, run
from .torus import TorusGrid
from .verify import format_table, verify_suite


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here reserves 2 for
    runtime failures, so remap usage problems to exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _pick(*candidates):
    for value in candidates:
        if value is not None:
            return value
    return None


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ValueError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ValueError(f"config file {path} must contain a JSON object")
    return cfg


def _constants_from(cfg: dict) -> RegularityConstants:
    known = {"k1", "k2", "c0", "C_star", "C1", "C3"}
    unknown = set(cfg) - known
    if unknown:
        raise ValueError(f"unknown constants keys {sorted(unknown)}, expected among {sorted(known)}")
    return RegularityConstants(**{k: float(v) for k, v in cfg.items()})


def _out_dir(args) -> Path:
    return Path(_pick(args.out_dir, os.environ.get("CCF_OUT_DIR"), "."))


def _holder_alphas(gamma: float, alpha: float | None, dissipation_on: bool) -> tuple[float, ...]:
    """Tracked Holder exponents: the explicit --alpha, validated against the
    schedule constraint, or the policy value when the schedule applies."""
    if alpha is not None:
        if not 0.0 < gamma < 1.0:
            raise ValueError(
                f"gamma={gamma:g} is outside (0, 1): the regularity schedule that "
                f"--alpha parameterizes needs a supercritical gamma"
            )
        if not (1.0 - gamma) <= alpha < 1.0:
            raise ValueError(
                f"alpha must lie in [1-gamma, 1) = [{1.0 - gamma:g}, 1), got {alpha:g}"
            )
        return (float(alpha),)
    if dissipation_on and 0.0 < gamma < 1.0:
        return (regularity.alpha_policy(gamma),)
    return ()


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    gamma = float(_pick(args.gamma, cfg.get("gamma"), 0.9))
    n = int(_pick(args.n, cfg.get("n"), 256))
    t_end = float(_pick(args.t_end, cfg.get("t_end"), 1.0))
    dt_max = float(_pick(args.dt_max, cfg.get("dt_max"), 0.01))
    cfl = float(_pick(args.cfl, cfg.get("cfl"), 0.4))
    snap = float(_pick(args.snapshot_every, cfg.get("snapshot_every"), t_end / 50.0))
    inviscid = bool(_pick(args.inviscid or None, cfg.get("inviscid"), False))
    dealias = not args.no_dealias and bool(cfg.get("dealias", True))
    alpha = _pick(args.alpha, cfg.get("alpha"))
    alphas = _holder_alphas(gamma, None if alpha is None else float(alpha), not inviscid)

    datum = parse_datum(str(_pick(args.datum, cfg.get("datum"), "cosine:1,1")))
    params = ModelParams(gamma=gamma, n=n, dissipation_on=not inviscid, dealias_on=dealias)
    control = StepControl(t_end=t_end, dt_max=dt_max, cfl=cfl, snapshot_every=snap)
    theta0 = make_datum(datum, TorusGrid(n))
    constants = _constants_from(cfg.get("constants", {}))

    record = run(
        theta0,
        params,
        control,
        plan=DiagnosticPlan(alphas),
        constants=constants,
        datum=datum.to_config(),
    )
    out_dir = _out_dir(args)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "runs.jsonl"
    append_record(path, record)
    print(f"{record.outcome.value}: {record.outcome_detail}")
    print(f"record {record.config_hash} appended to {path}")
    return 0


def _parse_list(text: str | None, cast):
    if text is None:
        return None
    return tuple(cast(part) for part in text.split(",") if part.strip())


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    scfg = cfg.get("sweep", {})
    gammas = _pick(_parse_list(args.gamma, float), _parse_list_cfg(scfg.get("gamma_values")), (0.6, 0.9))
    ns = _pick(_parse_list(args.n, int), _parse_list_cfg(scfg.get("resolutions"), int), (128, 256))
    datum_texts = _pick(args.datum or None, scfg.get("data"), ["cosine:1,1"])
    t_end = float(_pick(args.t_end, scfg.get("t_end"), 1.0))
    jobs = int(_pick(args.jobs, scfg.get("parallelism"), 1))
    inviscid = bool(_pick(args.inviscid or None, scfg.get("inviscid"), False))
    dealias = not args.no_dealias and bool(scfg.get("dealias", True))
    snap = float(_pick(scfg.get("snapshot_every"), t_end / 50.0))

    alphas = ()
    if not inviscid:
        alphas = tuple(sorted({regularity.alpha_policy(g) for g in gammas if 0.0 < g < 1.0}))
    plan = SweepPlan(
        gamma_values=tuple(gammas),
        data=tuple(parse_datum(str(t)) for t in datum_texts),
        resolutions=tuple(ns),
        constants=_constants_from(cfg.get("constants", {})),
        control=StepControl(t_end=t_end, snapshot_every=snap),
        dissipation_on=not inviscid,
        dealias_on=dealias,
        holder_alphas=alphas,
        parallelism=jobs,
    )
    out_dir = _out_dir(args)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "sweep.jsonl"
    records = sweep(plan, path)
    for record in records:
        model = record.config["model"]
        print(
            f"gamma={model['gamma']:g} n={model['n']} "
            f"datum={record.config['datum'].get('kind')} -> {record.outcome.value}"
        )
    print(f"{len(records)} records in {path}")
    return 0


def _parse_list_cfg(values, cast=float):
    if values is None:
        return None
    return tuple(cast(v) for v in values)


def _cmd_verify(args) -> int:
    rows = verify_suite(n=int(args.n or 256), seed=int(args.seed or 0))
    print(format_table(rows))
    if all(row.passed for row in rows):
        return 0
    print("verification failed: residual above tolerance", file=sys.stderr)
    return 2


def _cmd_calibrate(args) -> int:
    grid = TorusGrid(int(args.n or 256))
    cal = calibrate_cgamma(float(args.gamma), grid)
    print(
        f"gamma={cal.gamma:g} n={grid.n} c_gamma={cal.c_gamma!r} "
        f"relative_residual={cal.residual:.3e}"
    )
    return 0


def _cmd_report(args) -> int:
    records_path = Path(args.records)
    if not records_path.exists():
        raise ValueError(f"records file not found: {records_path}")
    records = load_records(records_path)
    if not records:
        raise ValueError(f"records file {records_path} holds no records")
    bundle = report(records, _out_dir(args))
    print(f"wrote {bundle.csv_path}")
    for chart in bundle.chart_paths:
        print(f"wrote {chart}")
    return 0


def _add_common(sub, *, config=True, out_dir=True):
    if config:
        sub.add_argument("--config", help="path to a JSON config file (flags override it)")
    if out_dir:
        sub.add_argument("--out-dir", help="output directory (fallback: env CCF_OUT_DIR, then .)")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="ccflab",
        description="Pseudospectral laboratory for 1D nonlocal transport with fractional dissipation.",
    )
    subs = parser.add_subparsers(dest="subcommand", metavar="{run,sweep,verify,calibrate,report}")

    p_run = subs.add_parser("run", help="integrate one configuration and append its record")
    p_run.add_argument("--gamma", type=float, help="dissipation exponent in (0, 2]")
    p_run.add_argument("--n", type=int, help="grid size (even, >= 32)")
    p_run.add_argument("--t-end", type=float, help="final time")
    p_run.add_argument("--alpha", type=float, help="Holder exponent to track; needs gamma in (0,1)")
    p_run.add_argument("--datum", help="cosine:a,b | von_mises:kappa | li_rodrigo:scale | custom:path")
    p_run.add_argument("--inviscid", action="store_true", help="disable dissipation")
    p_run.add_argument("--no-dealias", action="store_true", help="disable the 2/3-rule filter")
    p_run.add_argument("--dt-max", type=float, help="step ceiling")
    p_run.add_argument("--cfl", type=float, help="CFL number in (0, 1]")
    p_run.add_argument("--snapshot-every", type=float, help="diagnostics cadence")
    _add_common(p_run)
    p_run.set_defaults(handler=_cmd_run)

    p_sweep = subs.add_parser("sweep", help="run a (datum, gamma, n) grid, resumable")
    p_sweep.add_argument("--gamma", help="comma-separated gamma values")
    p_sweep.add_argument("--n", help="comma-separated grid sizes")
    p_sweep.add_argument("--datum", action="append", help="datum spec; repeat for several")
    p_sweep.add_argument("--t-end", type=float, help="final time per cell")
    p_sweep.add_argument("--inviscid", action="store_true", help="disable dissipation")
    p_sweep.add_argument("--no-dealias", action="store_true", help="disable the 2/3-rule filter")
    p_sweep.add_argument("--jobs", type=int, help="max concurrent cells (default 1)")
    _add_common(p_sweep)
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_verify = subs.add_parser("verify", help="operator residual table")
    p_verify.add_argument("--n", type=int, help="grid size (default 256)")
    p_verify.add_argument("--seed", type=int, help="seed for random test fields (default 0)")
    p_verify.set_defaults(handler=_cmd_verify)

    p_cal = subs.add_parser("calibrate", help="fit the quadrature normalization c_gamma")
    p_cal.add_argument("--gamma", type=float, required=True, help="dissipation exponent in (0, 2)")
    p_cal.add_argument("--n", type=int, help="grid size (default 256)")
    p_cal.set_defaults(handler=_cmd_calibrate)

    p_rep = subs.add_parser("report", help="CSV summary and SVG charts from a record file")
    p_rep.add_argument("records", help="path to a JSONL record file")
    _add_common(p_rep, config=False)
    p_rep.set_defaults(handler=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    if getattr(args, "subcommand", None) is None:
        parser.print_help()
        return 1
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
