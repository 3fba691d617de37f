"""Command-line entry point.

Subcommands: run, sweep, qcr-search, validate, export-figure-data. Exit codes:
0 success, 1 runtime error, 2 config error; failures also emit a JSON error
object on stderr. QNPHASE_THREADS is the fallback for --threads. Without
--paper-scale, realization counts are reduced to desk scale (20 per scenario,
200 for the parameter search).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .config import ConfigError, ScenarioConfig, load_config_file
from .export import FIGURE_IDS, export_figure_data
from .harness import run_qcr_search, run_scenario
from .validate import run_invariant_suite

__all__ = ["main", "cli_entry"]

DESK_REALIZATIONS = 20
DESK_QCR_REALIZATIONS = 200


def _emit_error(kind: str, message: str, field: str | None = None) -> None:
    payload = {"error": {"type": kind, "message": message}}
    if field is not None:
        payload["error"]["field"] = field
    print(json.dumps(payload), file=sys.stderr)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("QNPHASE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError("QNPHASE_THREADS", f"not an integer: {env!r}") from exc
    return 1


def _apply_scale(config: ScenarioConfig, args, desk_cap: int) -> ScenarioConfig:
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if not args.paper_scale and config.n_realizations > desk_cap:
        config = replace(config, n_realizations=desk_cap)
    return config


def _cmd_run(args, require_sweep: bool) -> int:
    scenarios = load_config_file(args.config)
    threads = _threads(args)
    for config in scenarios:
        if require_sweep and len(config.sweep.grid) < 2:
            raise ConfigError("sweep.grid", f"scenario {config.name!r}: sweep needs a grid with >= 2 points")
        config = _apply_scale(config, args, DESK_REALIZATIONS)
        result = run_scenario(config, threads=threads)
        target = result.write(args.out_dir, overwrite=args.overwrite)
        print(f"{config.name}: {len(result.rows)} rows -> {target} ({result.wall_clock_s:.1f}s)")
    return 0


def _cmd_qcr(args) -> int:
    scenarios = load_config_file(args.config)
    threads = _threads(args)
    for config in scenarios:
        config = _apply_scale(config, args, DESK_QCR_REALIZATIONS)
        search = run_qcr_search(config, threads=threads)
        target = search.write(args.out_dir, overwrite=args.overwrite)
        for entry in search.entries:
            print(
                f"{config.name} {entry['axis']}={entry['axis_value']}: "
                f"dphi_ave={entry['dphi_ave']:.4g} dphi_min={entry['dphi_min']:.4g} "
                f"bound={entry['qcr_bound']:.4g}"
            )
        print(f"{config.name}: -> {target}")
    return 0


def _cmd_validate(_args) -> int:
    results = run_invariant_suite()
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: {detail}")
        failed += 0 if ok else 1
    if failed:
        _emit_error("runtime", f"{failed} invariant check(s) failed")
        return 1
    return 0


def _cmd_export(args) -> int:
    target = export_figure_data(args.result_dir, args.figure_id, args.out_dir, overwrite=args.overwrite)
    print(f"{args.figure_id}: -> {target}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qnphase", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default="results"):
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--out-dir", default=out_default)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--overwrite", action="store_true")
        p.add_argument("--paper-scale", action="store_true",
                       help="keep the configured realization counts instead of desk scale")

    p_run = sub.add_parser("run", help="execute scenario(s) from a config file")
    p_run.add_argument("config")
    common(p_run)

    p_sweep = sub.add_parser("sweep", help="like run, but requires a sweep grid with >= 2 points")
    p_sweep.add_argument("config")
    common(p_sweep)

    p_qcr = sub.add_parser("qcr-search", help="random parameter search vs the Cramer-Rao bound")
    p_qcr.add_argument("config")
    common(p_qcr)

    sub.add_parser("validate", help="run the quick invariant suite")

    p_exp = sub.add_parser("export-figure-data", help="assemble figure CSVs from results")
    p_exp.add_argument("result_dir")
    p_exp.add_argument("figure_id", choices=FIGURE_IDS)
    p_exp.add_argument("--out-dir", default="figure-data")
    p_exp.add_argument("--overwrite", action="store_true")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "run":
            return _cmd_run(args, require_sweep=False)
        if args.command == "sweep":
            return _cmd_run(args, require_sweep=True)
        if args.command == "qcr-search":
            return _cmd_qcr(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "export-figure-data":
            return _cmd_export(args)
        raise RuntimeError(f"unhandled command {args.command!r}")
    except ConfigError as exc:
        _emit_error("config", str(exc), field=exc.field)
        return 2
    except FileNotFoundError as exc:
        _emit_error("runtime", str(exc))
        return 1
    except FileExistsError as exc:
        _emit_error("runtime", str(exc))
        return 1
    except (ValueError, RuntimeError) as exc:
        _emit_error("runtime", str(exc))
        return 1


cli_entry = main

if __name__ == "__main__":
    raise SystemExit(main())
