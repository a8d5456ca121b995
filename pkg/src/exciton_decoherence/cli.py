"""Command line front end.

    exciton-decoherence fig1 --config scenario.ini --out results/
    exciton-decoherence fig2 b
    exciton-decoherence validate --grid-j 8001 --grid-w-mult 100
    exciton-decoherence sweep --axis xi --values 0,5,10
    exciton-decoherence coeffs

Exit codes: 0 ok, 1 validation failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from . import harness
from .config import ConfigError, ScenarioConfig, load_config

log = logging.getLogger("exciton_decoherence")


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario file ([section] / key = value)")
    common.add_argument("--out", help="output directory (default: output.dir of the config)")
    common.add_argument("--grid-j", type=int, help="bath mode count (odd, >= 101)")
    common.add_argument("--grid-w-mult", type=float, help="bath half-width in units of gamma (>= 20)")
    common.add_argument("--dt-rule", type=float, help="RK4 step as a fraction of hbar / fastest rate (<= 0.01)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="exciton-decoherence", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("fig1", parents=[common], help="mean exciton number, driven vs undriven")
    f2 = sub.add_parser("fig2", parents=[common], help="phase of the decoherence factor")
    f2.add_argument("variant", choices=["a", "b", "c"])
    sub.add_parser("validate", parents=[common], help="cross-check closed forms against the oracles")
    sw = sub.add_parser("sweep", parents=[common], help="summary observables along one parameter")
    sw.add_argument("--axis", required=True, choices=harness.SWEEP_AXES)
    sw.add_argument("--values", required=True, help="comma-separated values")
    sub.add_parser("coeffs", parents=[common], help="dump u, w, A, B over the run range")
    return ap


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    return cfg.with_overrides(grid_j=args.grid_j, grid_w_mult=args.grid_w_mult, dt_rule=args.dt_rule, out_dir=args.out)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _load(args)
        if args.command == "sweep":
            values = [float(v) for v in args.values.split(",") if v.strip()]
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = cfg.output.dir
    fmts = cfg.output.formats
    try:
        if args.command == "fig1":
            written = harness.write_table(harness.run_fig1(cfg), out, fmts)
        elif args.command == "fig2":
            written = harness.write_table(harness.run_fig2(cfg, args.variant), out, fmts)
        elif args.command == "coeffs":
            written = harness.write_table(harness.run_coeffs(cfg), out, fmts)
        elif args.command == "sweep":
            written = harness.write_table(harness.run_sweep(cfg, args.axis, values), out, fmts)
        else:
            reports, table = harness.run_validate(cfg)
            written = harness.write_table(table, out, fmts)
            written.append(harness.emit_reports_jsonl(reports, os.path.join(out, "validation.jsonl")))
            failed = False
            for r in reports:
                status = "PASS" if r.passed else "FAIL"
                detail = ", ".join(f"{k}={v['max_abs_error']:.3g}" for k, v in r.errors.items())
                print(f"{status} {r.name}: {detail}")
                if not r.passed:
                    failed = True
                    print(f"  failing: {', '.join(r.failing())}", file=sys.stderr)
            for path in written:
                log.info("wrote %s", path)
            return 1 if failed else 0
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
