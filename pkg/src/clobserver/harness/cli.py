"""Command-line entry point.

    clobserver run CONFIG [--seed N] [--out DIR] [--paper-scale]
    clobserver compare CONFIG [...]
    clobserver check CONFIG [...]

Exit codes: 0 success, 1 config error, 2 divergence-tagged run.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

import numpy as np

from ..observers import InfeasibleBoundsError, stack_bounds
from .config import ConfigError, load_config, paper_scale
from .experiment import observer_config, run_comparison, run_configured, selection_bounds
from .metrics import compare_report
from .outputs import write_outputs

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clobserver", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [("run", "simulate the configured observer mode(s)"),
                        ("compare", "simulate CL and conventional observers on one scenario"),
                        ("check", "print the stack bounds without simulating")]:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="TOML experiment config")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
        sp.add_argument("--out", default=None, help="override the output directory")
        sp.add_argument("--paper-scale", action="store_true",
                        help="n=67, h=1e-4, T=5 instead of the desk-scale sizes")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _resolve(args):
    cfg = load_config(args.config)
    if args.paper_scale:
        cfg = paper_scale(cfg)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_dir=args.out)
    if args.command == "compare":
        cfg = dataclasses.replace(cfg, mode="both")
    return cfg.validate()


def _check(cfg) -> int:
    ocfg = observer_config(cfg, "cl")
    try:
        stack_bounds(ocfg)
    except InfeasibleBoundsError as exc:
        print(f"infeasible: {exc}")
        return EXIT_CONFIG
    S_L, S_U = selection_bounds(ocfg, cfg.observer_time)
    np.set_printoptions(precision=6, suppress=False, linewidth=100)
    print(f"h*omega = {cfg.h * cfg.omega:g} (<= 0.25 required)")
    print(f"S_L diagonal: {np.diag(S_L)}")
    print(f"S_U diagonal: {np.diag(S_U)}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolve(args)
        if args.command == "check":
            return _check(cfg)
        runs = run_comparison(cfg) if cfg.mode == "both" else run_configured(cfg)
    except (ConfigError, InfeasibleBoundsError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = compare_report(runs)
    paths = write_outputs(runs, report, cfg)
    print(f"wrote {len(paths)} files under {cfg.output_dir}")
    for mode, traj in runs.items():
        s = report[mode]
        tag = f" DIVERGED at step {traj.divergence_step}" if traj.diverged else ""
        if s["steps"] == 0:
            print(f"{mode:>12}: no steps")
            continue
        print(f"{mode:>12}: steps={s['steps']} rmse={s['rmse_overall']:.4g} "
              f"rmse_singular={s['rmse_singular']:.4g} depth_max={s['depth_max']}{tag}")
    if "comparison" in report:
        print(f"singular-window RMSE ratio (cl/conventional): "
              f"{report['comparison']['rmse_singular_ratio']:.4g}")
    return EXIT_DIVERGED if any(t.diverged for t in runs.values()) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
