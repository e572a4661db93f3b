"""Ultimate-bound check on a persistently excited SIS run.

Complete uniform graph with states held near 1/2, so the stack stays between
its bounds. Prints the observed final-half error next to the discrete radius
evaluated with the accumulated-error sup as is, and with it divided by h.

    python scripts/uub_check.py [--n 5] [--weight 1.0] [--delta 2.0]
"""
import argparse

import numpy as np

from clobserver.diagnostics import uub_radius_discrete
from clobserver.harness.config import ExperimentConfig
from clobserver.harness.experiment import run_experiment
from clobserver.harness.scenario import DisturbanceProfile, Scenario
from clobserver.systems import SISModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--weight", type=float, default=1.0)
    ap.add_argument("--delta", type=float, default=2.0)
    ap.add_argument("--amplitude", type=float, default=0.3)
    args = ap.parse_args()
    n = args.n
    cfg = ExperimentConfig(n=n, mode="cl")
    W = args.weight * (np.ones((n, n)) - np.eye(n))
    profile = DisturbanceProfile(np.full(n, args.amplitude), np.linspace(0.1, 0.2, n),
                                 np.linspace(0.0, np.pi, n), np.full(n, 1.0))
    scenario = Scenario(SISModel(W, np.full(n, args.delta), cfg.h), profile, np.full(n, 0.5))
    traj = run_experiment(cfg, "cl", scenario, track_xi=True)
    half = len(traj) // 2
    xi_bar = float(np.max(traj.xi_norm))
    sup_err = float(traj.err_norm[half:].max())
    print(f"state range [{traj.x.min():.3f}, {traj.x.max():.3f}], "
          f"stack condition held on {np.mean(traj.lower_ok[half:] & traj.upper_ok[half:]):.0%} of the final half")
    print(f"sup error over final half     {sup_err:.4f}")
    print(f"radius, xi_bar as accumulated {uub_radius_discrete(cfg.omega, cfg.h, xi_bar, 1.0):.4f}")
    print(f"radius, xi_bar / h            {uub_radius_discrete(cfg.omega, cfg.h, xi_bar / cfg.h, 1.0):.4f}")


if __name__ == "__main__":
    main()
