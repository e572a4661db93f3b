"""Desk-scale CL vs conventional comparison plus the compensated run.

Writes both result directories and prints the headline numbers.

    python scripts/run_desk_scale.py [--out runs] [--seed N]
"""
import argparse
import dataclasses
from pathlib import Path

from clobserver.harness.config import load_config
from clobserver.harness.experiment import run_comparison, run_configured
from clobserver.harness.metrics import compare_report
from clobserver.harness.outputs import write_outputs

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default="runs")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()

    for name in ("desk", "compensate"):
        cfg = load_config(CONFIGS / f"{name}.toml")
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        cfg = dataclasses.replace(cfg, output_dir=str(Path(args.out) / name))
        runs = run_comparison(cfg) if cfg.mode == "both" else run_configured(cfg)
        report = compare_report(runs)
        write_outputs(runs, report, cfg)
        print(f"[{name}] -> {cfg.output_dir}")
        for mode, s in report.items():
            if mode == "comparison":
                print(f"  singular-window RMSE ratio {s['rmse_singular_ratio']:.3f}")
                continue
            print(f"  {mode:>12}: rmse {s['rmse_overall']:.3f}  singular rmse {s['rmse_singular']:.3f}  "
                  f"max depth {s['depth_max']} at t={s['t_depth_max']:.2f}  "
                  f"infection minimum at t={s['t_min_infection']:.2f}  "
                  f"final mean infection {s['mean_infection_final']:.4f}")


if __name__ == "__main__":
    main()
