"""Command-line entry point: ``fadingnet <command> [options]``."""

from __future__ import annotations

import argparse
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptotics as asy
from . import experiments as ex
from .config import ConfigError, load_file, merge, config_from_mapping
from .distributions import DomainError
from .output import csv_text, write_csv, write_manifest
from .simulation import apply_feedback_noise, draw_direct_gains, evaluate_slot, select_strongest

VERIFIERS = ("lemma1", "lemma2", "lemma3", "lemma4", "falk", "corollary")

SWEEP_HEADER = ("n", "m", "zeta", "trials", "mean_throughput", "sd_throughput", "p_all_success")
VERIFY_HEADER = ("n", "statistic", "empirical_value", "bound_or_target")


class UsageError(Exception):
    pass


def _grid(text):
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n grid {text!r}") from None


def _on_off(text):
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run")
    g.add_argument("--config", help="TOML or JSON file of flat key-value settings")
    g.add_argument("--seed", type=int)
    g.add_argument("--out-dir", default=None, help="directory for CSV outputs and manifest")
    g.add_argument("--threads", type=int, default=1, help="worker count; never changes output bytes")
    m = common.add_argument_group("model and network")
    m.add_argument("--dist", choices=("rayleigh", "pareto"))
    m.add_argument("--mu", type=float)
    m.add_argument("--alpha", type=float)
    m.add_argument("--n", type=int, help="single network size")
    m.add_argument("--n-grid", type=_grid, help="comma-separated ascending sizes")
    m.add_argument("--trials", type=int)
    m.add_argument("--beta", type=float)
    m.add_argument("--n0", type=float)
    m.add_argument("--k", dest="k_const", type=float)
    m.add_argument("--delta1", type=float)
    m.add_argument("--delta2", type=float)
    m.add_argument("--delta3", type=float)
    m.add_argument("--m-min", type=int)
    m.add_argument("--m-rule", choices=ex.M_RULES)
    m.add_argument("--m", dest="m_value", type=float, help="value for the fixed / c_log / c_power m rule")
    m.add_argument("--m-exponent", type=float)
    m.add_argument("--zeta", type=float, help="constant feedback flip probability")
    m.add_argument("--zeta-rule", choices=ex.ZETA_RULES)
    m.add_argument("--zeta-value", type=float)
    m.add_argument("--zeta-shape", choices=ex.ZETA_SHAPES)
    m.add_argument("--zeta-exponent", type=float)
    m.add_argument("--count-unexpected", type=_on_off, metavar="on|off")

    parser = argparse.ArgumentParser(prog="fadingnet", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    s = sub.add_parser("slot", parents=[common], help="single-slot debug dump")
    s.add_argument("--lazy", action="store_true", help="skip interference of certain failures")
    s = sub.add_parser("sweep", parents=[common], help="throughput sweep over n")
    s.add_argument("--dump-trials", action="store_true", help="also write per-trial values")
    sub.add_parser("solve-m", parents=[common], help="largest feasible m per n")
    sub.add_parser("tolerance", parents=[common], help="noiseless order and feedback error tolerance")
    s = sub.add_parser("verify", parents=[common], help="statistical check of one lemma")
    s.add_argument("which", choices=VERIFIERS)
    return parser


_FLAG_KEYS = ("dist", "mu", "alpha", "trials", "beta", "n0", "k_const", "delta1", "delta2", "delta3",
              "m_min", "m_rule", "m_value", "m_exponent", "zeta_rule", "zeta_value", "zeta_shape",
              "zeta_exponent", "count_unexpected", "seed")


def overrides_from_args(args) -> dict:
    out = {k: getattr(args, k) for k in _FLAG_KEYS if getattr(args, k, None) is not None}
    if args.n is not None and args.n_grid is not None:
        raise UsageError("give --n or --n-grid, not both")
    if args.n is not None:
        out["n_grid"] = [args.n]
    elif args.n_grid is not None:
        out["n_grid"] = args.n_grid
    if args.zeta is not None:
        if args.zeta_rule is not None:
            raise UsageError("give --zeta or --zeta-rule, not both")
        out.update(zeta_rule="constant", zeta_value=args.zeta, zeta_shape=None, zeta_exponent=None)
    return out


def resolve_config(args, fallback=None):
    """File, then flags, then ``fallback`` for keys a command does not need."""
    values = load_file(args.config) if args.config else {}
    merged = merge(values, overrides_from_args(args))
    for k, v in (fallback or {}).items():
        merged.setdefault(k, v)
    return config_from_mapping(merged)


_NO_RUN = {"trials": 1, "seed": 0}


def _out_dir(args) -> Path:
    path = Path(args.out_dir or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_slot(args):
    cfg = resolve_config(args, {"trials": 1})
    n = cfg.n_grid[0]
    m, zeta = cfg.point(n)
    stream = ex.trial_stream(cfg.seed, 0, 0)
    real = draw_direct_gains(cfg.model, n, stream)
    intended = select_strongest(real, m)
    act = apply_feedback_noise(intended, n, zeta, stream)
    out = evaluate_slot(real, act, cfg.beta, cfg.n0, cfg.count_unexpected, lazy=args.lazy)
    on_i = np.zeros(n, dtype=bool)
    on_i[act.intended] = True
    on_a = np.zeros(n, dtype=bool)
    on_a[act.noisy] = True
    rows = []
    for i in range(n):
        s = out.sinr.get(i)
        success = on_a[i] and s is not None and s >= cfg.beta
        rows.append((i, real.direct_gains[i], on_i[i], on_a[i], "" if s is None else s, success))
    path = write_csv(_out_dir(args) / "slot.csv",
                     ("pair_index", "direct_gain", "intended", "active", "sinr", "success"), rows)
    print(f"n={n} m={m} zeta={zeta} e1={act.e1} e2={act.e2} successes={out.successes} "
          f"all_intended_success={out.all_intended_success} -> {path}")
    return [path], cfg


def cmd_sweep(args):
    cfg = resolve_config(args)
    points = [ex.simulate_point(cfg, k, workers=args.threads) for k in range(len(cfg.n_grid))]
    rows = [p.row() for p in points]
    out = _out_dir(args)
    files = [write_csv(out / "sweep.csv", SWEEP_HEADER,
                       [(r.n, r.m, r.zeta, r.trials, r.mean_throughput, r.sd_throughput,
                         r.p_all_intended_success) for r in rows])]
    if args.dump_trials:
        raw = [(p.n, t, s, a) for p in points for t, (s, a) in enumerate(zip(p.successes, p.all_success))]
        files.append(write_csv(out / "trials.csv", ("n", "trial", "successes", "all_success"), raw))
    sys.stdout.write((out / "sweep.csv").read_text())
    return files, cfg


def cmd_solve_m(args):
    cfg = resolve_config(args, _NO_RUN)
    rows = []
    for n in cfg.n_grid:
        zeta = cfg.zeta_rule.resolve(cfg.model, n)
        m = asy.max_feasible_m(cfg.model, n, zeta, cfg.params)
        if m:
            r = asy.theorem_margin(cfg.model, n, m, zeta, cfg.params)
            rows.append((n, zeta, m, r.lhs, r.rhs, r.phi, r.l_value))
        else:
            rows.append((n, zeta, 0, float("nan"), float("nan"), float("nan"), float("nan")))
    return _emit(args, cfg, "solve_m.csv", ("n", "zeta", "max_m", "lhs_at_max", "rhs_at_max", "phi", "l"), rows)


def cmd_tolerance(args):
    cfg = resolve_config(args, _NO_RUN)
    rows = [(r.n, r.t_n, r.zeta_threshold) for r in asy.corollary_tolerance(cfg.model, cfg.n_grid, cfg.params)]
    return _emit(args, cfg, "tolerance.csv", ("n", "t_n", "zeta_threshold"), rows)


def _emit(args, cfg, name, header, rows):
    sys.stdout.write(csv_text(header, rows))
    if args.out_dir is None:
        return [], cfg
    return [write_csv(_out_dir(args) / name, header, rows)], cfg


def cmd_verify(args):
    cfg = resolve_config(args)
    w = args.threads
    run = {
        "lemma1": lambda: ex.verify_error_concentration(cfg, "first", workers=w),
        "lemma2": lambda: ex.verify_error_concentration(cfg, "second", workers=w),
        "lemma3": lambda: ex.verify_direct_power(cfg, workers=w),
        "lemma4": lambda: ex.verify_interference(cfg, workers=w),
        "falk": lambda: ex.verify_falk_normality(cfg, workers=w),
        "corollary": lambda: ex.verify_tolerance(cfg, workers=w),
    }[args.which]
    rep = run()
    rows = [(r.n, r.statistic, r.empirical_value, r.bound_or_target) for r in rep.rows]
    path = write_csv(_out_dir(args) / f"verify_{args.which}.csv", VERIFY_HEADER, rows)
    sys.stdout.write(path.read_text())
    return [path], cfg


COMMANDS = {"slot": cmd_slot, "sweep": cmd_sweep, "solve-m": cmd_solve_m,
            "tolerance": cmd_tolerance, "verify": cmd_verify}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    try:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        files, cfg = COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"fadingnet: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError, OSError) as exc:
        print(f"fadingnet: {exc}", file=sys.stderr)
        return 1
    if files:
        write_manifest(Path(files[0]).parent / "manifest.json", cfg.to_dict(), cfg.seed, __version__,
                       started, round(time.perf_counter() - t0, 3), files)
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
