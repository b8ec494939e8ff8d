"""Rayleigh throughput sweep: solver curve plus a Monte Carlo sweep.

The solver curve uses the default constants; ``--k`` only sets the
interference constant of the simulated sweep.

Writes ``solver.csv`` and ``sweep.csv`` under ``--out-dir`` and prints the
log fit of both.

    python scripts/rayleigh_scaling.py --trials 2000 --k 2.5 --out-dir runs/rayleigh
"""

import argparse
import math
from pathlib import Path

from fadingnet import ChannelModel, ExperimentConfig, TheoremParams
from fadingnet.asymptotics import max_feasible_m
from fadingnet.cli import SWEEP_HEADER
from fadingnet.experiments import fit_log_scaling, run_throughput_sweep
from fadingnet.output import write_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--k", type=float, default=2.5)
    ap.add_argument("--seed", type=int, default=20240)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out-dir", default="runs/rayleigh")
    args = ap.parse_args()
    out = Path(args.out_dir)
    model = ChannelModel.rayleigh(1.0)
    params = TheoremParams(k_const=args.k)

    solver_grid = [10**e for e in range(3, 8)]
    ms = [max_feasible_m(model, n, 0.0) for n in solver_grid]
    write_csv(out / "solver.csv", ("n", "max_m", "m_over_ln_n"),
              [(n, m, m / math.log(n)) for n, m in zip(solver_grid, ms)])
    slope, intercept, r2 = fit_log_scaling(list(zip(solver_grid, ms)))
    print(f"solver: m={ms} slope={slope:.4f} intercept={intercept:.4f} r2={r2:.4f}")

    cfg = ExperimentConfig(model=model, n_grid=[2**e for e in range(10, 18)], trials=args.trials,
                           seed=args.seed, params=params)
    res = run_throughput_sweep(cfg, workers=args.threads)
    write_csv(out / "sweep.csv", SWEEP_HEADER,
              [(r.n, r.m, r.zeta, r.trials, r.mean_throughput, r.sd_throughput, r.p_all_intended_success)
               for r in res.rows])
    for r in res.rows:
        print(f"n={r.n:>7} m={r.m} mean={r.mean_throughput:.4f} p_all={r.p_all_intended_success:.4f}")
    print(f"simulated: slope={res.slope:.4f} r2={res.r_squared:.4f}")


if __name__ == "__main__":
    main()
