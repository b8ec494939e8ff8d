"""Pareto-type throughput exponent from the solver and from simulation.

    python scripts/pareto_scaling.py --alpha 2.5 --trials 1000 --out-dir runs/pareto25
"""

import argparse
from pathlib import Path

from fadingnet import ChannelModel, ExperimentConfig, TheoremParams
from fadingnet.asymptotics import max_feasible_m
from fadingnet.cli import SWEEP_HEADER
from fadingnet.experiments import fit_power_scaling, run_throughput_sweep
from fadingnet.output import write_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=2.5)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--k", type=float, default=1.5)
    ap.add_argument("--seed", type=int, default=31)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out-dir", default="runs/pareto")
    args = ap.parse_args()
    out = Path(args.out_dir)
    model = ChannelModel.pareto(args.alpha)
    params = TheoremParams(k_const=args.k)
    target = 1 / (1 + args.alpha)

    solver_grid = [10**e for e in range(3, 8)]
    ms = [max_feasible_m(model, n, 0.0, params) for n in solver_grid]
    write_csv(out / "solver.csv", ("n", "max_m"), list(zip(solver_grid, ms)))
    e, _, r2 = fit_power_scaling(list(zip(solver_grid, ms)))
    print(f"solver: m={ms} exponent={e:.4f} r2={r2:.4f} target={target:.4f}")

    grid = [1000, 3000, 10_000, 30_000, 100_000, 300_000, 10**6]
    cfg = ExperimentConfig(model=model, n_grid=grid, trials=args.trials, seed=args.seed, params=params)
    res = run_throughput_sweep(cfg, workers=args.threads)
    write_csv(out / "sweep.csv", SWEEP_HEADER,
              [(r.n, r.m, r.zeta, r.trials, r.mean_throughput, r.sd_throughput, r.p_all_intended_success)
               for r in res.rows])
    print(f"simulated: exponent={res.slope:.4f} r2={res.r_squared:.4f} target={target:.4f}")


if __name__ == "__main__":
    main()
