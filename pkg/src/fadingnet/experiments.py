"""Monte Carlo harness: throughput sweeps, scaling fits and lemma verifiers.

Every trial draws from its own generator keyed by ``(seed, n index, trial
index)``, so results do not depend on the number of workers or on the
order in which trials finish.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special, stats

from . import asymptotics as asy
from .asymptotics import TheoremParams
from .distributions import PARETO, RAYLEIGH, ChannelModel, DomainError
from .simulation import (
    apply_feedback_noise,
    draw_direct_gains,
    evaluate_slot,
    interference,
    select_strongest,
)

M_RULES = ("solver", "fixed", "c_log", "c_power")
ZETA_RULES = ("zero", "constant", "scaled")
ZETA_SHAPES = ("log_n_over_n", "power_n")


@dataclass(frozen=True)
class MRule:
    kind: str = "solver"
    value: float | None = None
    exponent: float | None = None

    def __post_init__(self):
        if self.kind not in M_RULES:
            raise DomainError(f"unknown m rule {self.kind!r}")
        if self.kind != "solver" and (self.value is None or self.value < 0):
            raise DomainError(f"m rule {self.kind!r} needs a nonnegative value")
        if self.kind == "fixed" and int(self.value) != self.value:
            raise DomainError("fixed m must be an integer")
        if self.kind == "c_power" and self.exponent is None:
            raise DomainError("c_power m rule needs an exponent")

    def resolve(self, model: ChannelModel, n: int, zeta: float, params: TheoremParams) -> int:
        if self.kind == "solver":
            m = asy.max_feasible_m(model, n, zeta, params)
        elif self.kind == "fixed":
            m = int(self.value)
        elif self.kind == "c_log":
            m = math.floor(self.value * math.log(n))
        else:
            m = math.floor(self.value * n**self.exponent)
        if m > n:
            raise DomainError(f"m rule {self.kind!r} gives m={m} > n={n}")
        return m


@dataclass(frozen=True)
class ZetaRule:
    kind: str = "zero"
    value: float = 0.0
    shape: str | None = None
    exponent: float | None = None

    def __post_init__(self):
        if self.kind not in ZETA_RULES:
            raise DomainError(f"unknown zeta rule {self.kind!r}")
        if self.kind == "constant" and not 0 <= self.value <= 1:
            raise DomainError(f"constant zeta must lie in [0, 1], got {self.value}")
        if self.kind == "scaled":
            if self.shape not in ZETA_SHAPES:
                raise DomainError(f"scaled zeta needs a shape in {ZETA_SHAPES}, got {self.shape!r}")
            if self.value < 0:
                raise DomainError("scaled zeta needs a nonnegative constant")

    def resolve(self, model: ChannelModel, n: int) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return float(self.value)
        return min(1.0, self.value * threshold_shape(model, n, self.shape, self.exponent))


def threshold_shape(model: ChannelModel, n: int, shape: str | None = None, exponent: float | None = None) -> float:
    """Tolerance scale ``T(n) / n`` up to constants.

    ``log_n_over_n`` is the Rayleigh scale; ``power_n`` is ``n ** -exponent``
    with the exponent defaulting to ``alpha / (1 + alpha)`` for pareto gains.
    """
    if shape is None:
        shape = "log_n_over_n" if model.dist == RAYLEIGH else "power_n"
    if shape == "log_n_over_n":
        return math.log(n) / n
    if exponent is None:
        if model.dist != PARETO:
            raise DomainError("power_n shape needs an explicit exponent for rayleigh gains")
        exponent = model.alpha / (1.0 + model.alpha)
    return n ** (-exponent)


@dataclass(frozen=True)
class ExperimentConfig:
    model: ChannelModel
    n_grid: tuple
    trials: int
    seed: int
    m_rule: MRule = MRule()
    zeta_rule: ZetaRule = ZetaRule()
    beta: float = 1.0
    n0: float = 1.0
    params: TheoremParams = TheoremParams()
    count_unexpected: bool = True

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if not self.n_grid:
            raise DomainError("n_grid is empty")
        if any(n < 2 for n in self.n_grid):
            raise DomainError("every n must be at least 2")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise DomainError("n_grid must be strictly ascending")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if not self.n0 > 0:
            raise DomainError("n0 must be positive")
        if not self.beta >= 0:
            raise DomainError("beta must be nonnegative")
        # one SINR threshold drives both the simulation and the inequality;
        # beta = 0 (every active receiver succeeds) leaves the solver's beta alone
        if self.beta > 0 and self.params.beta != self.beta:
            object.__setattr__(self, "params", self.params.replace(beta=self.beta))

    def replace(self, **changes) -> "ExperimentConfig":
        fields = {f: getattr(self, f) for f in self.__dataclass_fields__}
        fields.update(changes)
        return ExperimentConfig(**fields)

    def point(self, n: int) -> tuple[int, float]:
        """``(m, zeta)`` used at network size ``n``."""
        zeta = self.zeta_rule.resolve(self.model, n)
        return self.m_rule.resolve(self.model, n, zeta, self.params), zeta

    def to_dict(self) -> dict:
        d = {
            **self.model.to_dict(),
            "n_grid": list(self.n_grid),
            "trials": self.trials,
            "seed": self.seed,
            "m_rule": self.m_rule.kind,
            "zeta_rule": self.zeta_rule.kind,
            "beta": self.beta,
            "n0": self.n0,
            "count_unexpected": self.count_unexpected,
        }
        if self.m_rule.value is not None:
            d["m_value"] = self.m_rule.value
        if self.m_rule.exponent is not None:
            d["m_exponent"] = self.m_rule.exponent
        if self.zeta_rule.kind != "zero":
            d["zeta_value"] = self.zeta_rule.value
        if self.zeta_rule.shape is not None:
            d["zeta_shape"] = self.zeta_rule.shape
        if self.zeta_rule.exponent is not None:
            d["zeta_exponent"] = self.zeta_rule.exponent
        p = asdict(self.params)
        del p["beta"]
        d.update(p)
        return d


def trial_stream(seed: int, n_index: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(n_index, trial))))


def map_trials(fn, seed: int, n_index: int, trials: int, workers: int = 1) -> list:
    """``[fn(stream_t) for t in range(trials)]`` with per-trial streams, in trial order."""
    def run(t):
        return fn(trial_stream(seed, n_index, t))

    if workers <= 1:
        return [run(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(trials), chunksize=max(1, trials // (8 * workers))))


# -- throughput sweep -----------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    n: int
    m: int
    zeta: float
    trials: int
    mean_throughput: float
    sd_throughput: float
    p_all_intended_success: float


@dataclass
class ScalingResult:
    rows: list
    fit_kind: str
    slope: float = math.nan
    intercept: float = math.nan
    r_squared: float = math.nan


@dataclass
class PointTrials:
    """Raw per-trial values behind one sweep row."""

    n: int
    m: int
    zeta: float
    successes: np.ndarray
    all_success: np.ndarray

    def row(self) -> SweepRow:
        s = self.successes
        sd = float(np.std(s, ddof=1)) if s.size > 1 else 0.0
        return SweepRow(self.n, self.m, self.zeta, int(s.size), float(np.mean(s)), sd,
                        float(np.mean(self.all_success)))


def simulate_point(config: ExperimentConfig, n_index: int, m: int | None = None,
                   zeta: float | None = None, workers: int = 1) -> PointTrials:
    """Run ``config.trials`` independent slots at ``config.n_grid[n_index]``.

    ``m`` and ``zeta`` default to the config's rules.
    """
    n = config.n_grid[n_index]
    if m is None or zeta is None:
        dm, dz = config.point(n)
        m = dm if m is None else m
        zeta = dz if zeta is None else zeta
    if m > n:
        raise DomainError(f"m={m} exceeds n={n}")

    def one(stream):
        real = draw_direct_gains(config.model, n, stream)
        act = apply_feedback_noise(select_strongest(real, m), n, zeta, stream)
        out = evaluate_slot(real, act, config.beta, config.n0, config.count_unexpected, lazy=True)
        return out.successes, out.all_intended_success

    res = map_trials(one, config.seed, n_index, config.trials, workers)
    return PointTrials(n, m, zeta, np.array([r[0] for r in res]), np.array([r[1] for r in res]))


def run_throughput_sweep(config: ExperimentConfig, workers: int = 1) -> ScalingResult:
    rows = [simulate_point(config, k, workers=workers).row() for k in range(len(config.n_grid))]
    kind = "log" if config.model.dist == RAYLEIGH else "power"
    result = ScalingResult(rows=rows, fit_kind=kind)
    fit = fit_log_scaling if kind == "log" else fit_power_scaling
    try:
        result.slope, result.intercept, result.r_squared = fit(rows)
    except DomainError:
        pass
    return result


def _xy(rows):
    pts = [(r.n, r.mean_throughput) if hasattr(r, "mean_throughput") else tuple(r) for r in rows]
    if len(pts) < 3:
        raise DomainError("need at least 3 rows to fit")
    n, t = (np.array(v, dtype=float) for v in zip(*pts))
    return n, t


def _ols(x, y):
    if np.ptp(x) == 0:
        raise DomainError("regressor is constant")
    xm, ym = x.mean(), y.mean()
    slope = float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))
    intercept = float(ym - slope * xm)
    ss_res = float(np.sum((y - intercept - slope * x) ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 if ss_tot == 0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return slope, intercept, r2


def fit_log_scaling(rows):
    """OLS of throughput on ``ln n``: returns ``(slope, intercept, r_squared)``.

    ``rows`` are sweep rows or ``(n, throughput)`` pairs.
    """
    n, t = _xy(rows)
    return _ols(np.log(n), t)


def fit_power_scaling(rows):
    """OLS of ``ln throughput`` on ``ln n``: returns ``(exponent, intercept, r_squared)``."""
    n, t = _xy(rows)
    if np.any(t <= 0):
        raise DomainError("power fit needs positive throughputs")
    return _ols(np.log(n), np.log(t))


# -- verifiers --------------------------------------------------------------

@dataclass(frozen=True)
class VerifierRow:
    n: int
    statistic: str
    empirical_value: float
    bound_or_target: float = math.nan


@dataclass
class Report:
    name: str
    rows: list = field(default_factory=list)

    def add(self, n, statistic, value, bound=math.nan):
        self.rows.append(VerifierRow(int(n), statistic, float(value), float(bound)))

    def value(self, statistic: str, n: int | None = None) -> float:
        hits = [r for r in self.rows if r.statistic == statistic and (n is None or r.n == n)]
        if len(hits) != 1:
            raise KeyError(f"{statistic!r} at n={n}: {len(hits)} matches")
        return hits[0].empirical_value

    def row(self, statistic: str, n: int | None = None) -> VerifierRow:
        hits = [r for r in self.rows if r.statistic == statistic and (n is None or r.n == n)]
        if len(hits) != 1:
            raise KeyError(f"{statistic!r} at n={n}: {len(hits)} matches")
        return hits[0]


def binomial_tails(count: int, p: float, upper: float, lower: float) -> tuple[float, float]:
    """Exact ``Pr{X > upper}`` and ``Pr{X < lower}`` for ``X ~ Binomial(count, p)``."""
    up = float(stats.binom.sf(math.floor(upper), count, p))
    lo = float(stats.binom.cdf(math.ceil(lower) - 1, count, p)) if lower > 0 else 0.0
    return up, lo


def verify_error_concentration(config: ExperimentConfig, kind: str = "first", workers: int = 1) -> Report:
    """Tails of the first- or second-kind error count against Chernoff and exact binomial."""
    if kind not in ("first", "second"):
        raise DomainError(f"kind must be 'first' or 'second', got {kind!r}")
    d3 = config.params.delta3
    rep = Report(f"errors_{kind}")
    for k, n in enumerate(config.n_grid):
        m, zeta = config.point(n)
        base = m if kind == "first" else n - m

        def one(stream):
            real = draw_direct_gains(config.model, n, stream)
            act = apply_feedback_noise(select_strongest(real, m), n, zeta, stream)
            return act.e1 if kind == "first" else act.e2

        e = np.array(map_trials(one, config.seed, k, config.trials, workers))
        hi, lo = (1 + d3) * zeta * base, (1 - d3) * zeta * base
        p_hi, p_lo = float(np.mean(e > hi)), float(np.mean(e < lo))
        t = e.size
        exact_hi, exact_lo = binomial_tails(base, zeta, hi, lo) if base > 0 else (0.0, 0.0)
        rep.add(n, "m", m)
        rep.add(n, "zeta", zeta)
        rep.add(n, "mean_errors", e.mean(), zeta * base)
        rep.add(n, "upper_tail", p_hi, asy.first_kind_tail_bound(zeta, base, d3) if base > 0 else 1.0)
        rep.add(n, "upper_tail_exact", exact_hi)
        rep.add(n, "upper_tail_se", math.sqrt(max(exact_hi * (1 - exact_hi), 0.0) / t))
        rep.add(n, "lower_tail", p_lo, asy.lower_tail_bound(zeta, base, d3) if base > 0 else 1.0)
        rep.add(n, "lower_tail_exact", exact_lo)
        rep.add(n, "lower_tail_se", math.sqrt(max(exact_lo * (1 - exact_lo), 0.0) / t))
    return rep


def verify_direct_power(config: ExperimentConfig, workers: int = 1) -> Report:
    """Frequency with which every intended direct gain exceeds ``beta * phi``."""
    rep = Report("direct_power")
    p = config.params
    for k, n in enumerate(config.n_grid):
        m, zeta = config.point(n)
        l_value = m + (1 + p.delta2) * zeta * (n - m)
        phi = p.k_const * config.model.mean() * l_value

        def one(stream):
            real = draw_direct_gains(config.model, n, stream)
            chosen = real.direct_gains[select_strongest(real, m)]
            return bool(chosen.size == 0 or chosen.min() > config.beta * phi)

        freq = np.mean(map_trials(one, config.seed, k, config.trials, workers))
        rep.add(n, "m", m)
        rep.add(n, "phi", phi)
        rep.add(n, "p_direct_above_beta_phi", freq, 1.0)
    return rep


def verify_interference(config: ExperimentConfig, workers: int = 1, k_const: float | None = None) -> Report:
    """Frequency with which no active receiver sees interference above ``phi``.

    Interference excludes noise and sums over the sources that actually
    transmit after feedback errors. ``k_const`` overrides the constant in
    ``phi`` without validation, for contrast runs with ``K <= 1``.
    """
    rep = Report("interference")
    p = config.params
    k_phi = p.k_const if k_const is None else k_const
    for k, n in enumerate(config.n_grid):
        m, zeta = config.point(n)
        l_value = m + (1 + p.delta2) * zeta * (n - m)
        phi = k_phi * config.model.mean() * l_value

        def one(stream):
            real = draw_direct_gains(config.model, n, stream)
            act = apply_feedback_noise(select_strongest(real, m), n, zeta, stream)
            total, over = interference(real, act.noisy, give_up=lambda s, idx: s > phi)
            return bool(not over.any() and np.all(total <= phi))

        freq = np.mean(map_trials(one, config.seed, k, config.trials, workers))
        rep.add(n, "m", m)
        rep.add(n, "phi", phi)
        rep.add(n, "p_interference_below_phi", freq, 1.0)
    return rep


def normal_cdf(x):
    return special.ndtr(x)


def ks_statistic(samples, cdf) -> float:
    """One-sample Kolmogorov-Smirnov distance between ``samples`` and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise DomainError("no samples")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_critical(n: int, level: float = 0.01) -> float:
    """Critical KS distance for ``n`` samples at significance ``level``."""
    return float(stats.kstwo.isf(level, n))


def default_i_rule(n: int) -> int:
    return math.ceil(math.sqrt(n))


def standardized_order_statistics(model: ChannelModel, n: int, i: int, seed: int, n_index: int,
                                  trials: int, workers: int = 1) -> np.ndarray:
    """``(X_(n-i+1) - a_n) / b_n`` over independent replicates."""
    a, b = asy.falk_constants(model, n, i)

    def one(stream):
        g = model.sample(stream, n)
        return np.partition(g, n - i)[n - i]

    x = np.array(map_trials(one, seed, n_index, trials, workers))
    return (x - a) / b


def verify_falk_normality(config: ExperimentConfig, i_rule=default_i_rule, tolerance: float = 0.05,
                          workers: int = 1) -> Report:
    """KS distance of the standardized intermediate order statistic to N(0, 1)."""
    rep = Report("falk")
    for k, n in enumerate(config.n_grid):
        i = i_rule(n)
        a, b = asy.falk_constants(config.model, n, i)
        z = standardized_order_statistics(config.model, n, i, config.seed, k, config.trials, workers)
        rep.add(n, "i", i)
        rep.add(n, "a_over_b", a / b)
        rep.add(n, "mean_z", z.mean(), 0.0)
        rep.add(n, "sd_z", z.std(ddof=1) if z.size > 1 else 0.0, 1.0)
        rep.add(n, "ks_distance", ks_statistic(z, normal_cdf), tolerance)
        rep.add(n, "ks_critical_1pct", ks_critical(z.size))
    return rep


def verify_tolerance(config: ExperimentConfig, sub_c: float = 0.1, super_zeta: float = 0.05,
                     workers: int = 1) -> Report:
    """Noiseless versus sub- and super-threshold feedback error at the noiseless ``m``.

    All three arms reuse the same per-trial streams.
    """
    rep = Report("tolerance")
    for k, n in enumerate(config.n_grid):
        t_n = asy.max_feasible_m(config.model, n, 0.0, config.params)
        arms = {
            "zero": 0.0,
            "sub": min(1.0, sub_c * threshold_shape(config.model, n)),
            "super": super_zeta,
        }
        res = {name: simulate_point(config, k, m=t_n, zeta=z, workers=workers).row() for name, z in arms.items()}
        rep.add(n, "m", t_n)
        for name, row in res.items():
            rep.add(n, f"zeta_{name}", row.zeta)
            rep.add(n, f"mean_throughput_{name}", row.mean_throughput)
            rep.add(n, f"p_all_success_{name}", row.p_all_intended_success)
        base_t, base_p = res["zero"].mean_throughput, res["sub"].p_all_intended_success
        rep.add(n, "throughput_ratio_sub", _ratio(res["sub"].mean_throughput, base_t), 0.9)
        rep.add(n, "throughput_ratio_super", _ratio(res["super"].mean_throughput, base_t))
        rep.add(n, "p_all_ratio_super_to_sub", _ratio(res["super"].p_all_intended_success, base_p), 0.5)
    return rep


def _ratio(a, b):
    if b == 0:
        return 1.0 if a == 0 else math.inf
    return a / b
