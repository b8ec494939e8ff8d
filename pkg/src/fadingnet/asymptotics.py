"""Closed-form side of the achievability result.

The feasibility inequality compares the activation cut-off gain against the
interference scale::

    (1 - delta1) * F^-1(1 - m/n)  >  beta * K * mu * (m + (1 + delta2) * zeta * (n - m))

with ``l = m + (1 + delta2) * zeta * (n - m)`` effective interferers and
interference cap ``phi = K * mu * l``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .distributions import ChannelModel, DomainError


@dataclass(frozen=True)
class TheoremParams:
    beta: float = 1.0
    k_const: float = 1.5
    delta1: float = 0.05
    delta2: float = 0.05
    delta3: float = 0.05
    m_min: int = 1

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if not self.k_const > 1:
            raise DomainError(f"k_const must exceed 1, got {self.k_const}")
        for name in ("delta1", "delta2", "delta3"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise DomainError(f"{name} must lie in [0, 1), got {v}")
        if self.m_min < 1 or int(self.m_min) != self.m_min:
            raise DomainError(f"m_min must be a positive integer, got {self.m_min}")

    def replace(self, **changes) -> "TheoremParams":
        return TheoremParams(**{**asdict(self), **changes})


@dataclass(frozen=True)
class FeasibilityReport:
    n: int
    m: int
    zeta: float
    lhs: float
    rhs: float
    l_value: float
    phi: float
    feasible: bool


def _check_model(model: ChannelModel):
    if not model.theorem_admissible:
        raise DomainError(f"alpha must exceed 2 for the throughput theorem, got {model.alpha}")


def _sides(model, n, m, zeta, params):
    m = np.asarray(m, dtype=float)
    lhs = (1.0 - params.delta1) * model.quantile_upper(m / n)
    l_value = m + (1.0 + params.delta2) * zeta * (n - m)
    rhs = params.beta * params.k_const * model.mean() * l_value
    return lhs, rhs, l_value


def theorem_margin(model: ChannelModel, n: int, m: int, zeta: float,
                   params: TheoremParams = TheoremParams()) -> FeasibilityReport:
    _check_model(model)
    if not 1 <= m <= n:
        raise DomainError(f"m must lie in [1, n={n}], got {m}")
    if not 0 <= zeta <= 1:
        raise DomainError(f"zeta must lie in [0, 1], got {zeta}")
    lhs, rhs, l_value = _sides(model, n, m, zeta, params)
    lhs, rhs, l_value = float(lhs), float(rhs), float(l_value)
    return FeasibilityReport(
        n=int(n), m=int(m), zeta=float(zeta), lhs=lhs, rhs=rhs, l_value=l_value,
        phi=params.k_const * model.mean() * l_value, feasible=lhs > rhs,
    )


def max_feasible_m(model: ChannelModel, n: int, zeta: float,
                   params: TheoremParams = TheoremParams(), method: str = "auto") -> int:
    """Largest ``m`` in ``[m_min, n]`` satisfying the inequality, 0 if none.

    ``auto`` bisects when the right side is nondecreasing in ``m`` (then the
    feasible set is a prefix) and scans every ``m`` otherwise.
    """
    _check_model(model)
    if not 0 <= zeta <= 1:
        raise DomainError(f"zeta must lie in [0, 1], got {zeta}")
    lo = params.m_min
    if lo > n:
        return 0
    if method == "auto":
        method = "bisect" if (1.0 + params.delta2) * zeta < 1.0 else "scan"
    if method == "scan":
        best = 0
        step = 1 << 20
        for start in range(lo, n + 1, step):
            ms = np.arange(start, min(n, start + step - 1) + 1)
            lhs, rhs, _ = _sides(model, n, ms, zeta, params)
            hits = np.flatnonzero(lhs > rhs)
            if hits.size:
                best = int(ms[hits[-1]])
        return best
    if method != "bisect":
        raise ValueError(f"unknown method {method!r}")

    def ok(m):
        lhs, rhs, _ = _sides(model, n, m, zeta, params)
        return bool(lhs > rhs)

    if not ok(lo):
        return 0
    hi = n
    if ok(hi):
        return hi
    # invariant: ok(lo) and not ok(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def falk_constants(model: ChannelModel, n: int, i: int) -> tuple[float, float]:
    """Centering and scale for the ``i``-th largest of ``n`` draws."""
    if not 1 <= i <= n:
        raise DomainError(f"i must lie in [1, n={n}], got {i}")
    a = float(model.quantile_upper(i / n))
    f = float(model.pdf(a))
    if not (f > 0 and math.isfinite(f)):
        raise DomainError(f"density vanishes at a_n={a}")
    return a, math.sqrt(i) / (n * f)


def chernoff_exponent(delta3: float) -> float:
    """``(1 + d) log(1 + d) - d``, the upper-tail Chernoff rate."""
    if not delta3 > 0:
        raise DomainError(f"delta3 must be positive, got {delta3}")
    return (1.0 + delta3) * math.log1p(delta3) - delta3


def lower_chernoff_exponent(delta3: float) -> float:
    """``(1 - d) log(1 - d) + d``, the matching lower-tail rate for ``0 < d < 1``."""
    if not 0 < delta3 < 1:
        raise DomainError(f"delta3 must lie in (0, 1), got {delta3}")
    return (1.0 - delta3) * math.log1p(-delta3) + delta3


def first_kind_tail_bound(zeta: float, m: int, delta3: float) -> float:
    """Upper bound on ``Pr{E > (1 + delta3) zeta m}`` for ``E ~ Binomial(m, zeta)``.

    Pass ``n - m`` as ``m`` for second-kind errors.
    """
    if not 0 <= zeta <= 1:
        raise DomainError(f"zeta must lie in [0, 1], got {zeta}")
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    return math.exp(-zeta * m * chernoff_exponent(delta3))


def lower_tail_bound(zeta: float, m: int, delta3: float) -> float:
    """Upper bound on ``Pr{E < (1 - delta3) zeta m}``."""
    if not 0 <= zeta <= 1:
        raise DomainError(f"zeta must lie in [0, 1], got {zeta}")
    return math.exp(-zeta * m * lower_chernoff_exponent(delta3))


@dataclass(frozen=True)
class ToleranceRow:
    n: int
    t_n: int
    zeta_threshold: float


def corollary_tolerance(model: ChannelModel, n_grid, params: TheoremParams = TheoremParams()) -> list[ToleranceRow]:
    """Noiseless achievable ``m`` per ``n`` and the error scale ``t_n / n`` it tolerates."""
    n_grid = list(n_grid)
    if not n_grid:
        raise DomainError("n_grid is empty")
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise DomainError("n_grid must be strictly ascending")
    rows = []
    for n in n_grid:
        t = max_feasible_m(model, n, 0.0, params)
        rows.append(ToleranceRow(n=int(n), t_n=t, zeta_threshold=t / n))
    return rows


def corollary_transfer_check(model: ChannelModel, n: int, params: TheoremParams = TheoremParams(),
                             c1: float = 0.5, zeta_scale: float = 0.1) -> bool:
    """Whether ``m = c1 * T`` stays feasible at ``zeta = zeta_scale * T / n``.

    ``T`` is the noiseless maximum. ``c1 * T`` is floored, but never below 1.
    """
    if not 0 < c1 <= 1:
        raise DomainError(f"c1 must lie in (0, 1], got {c1}")
    if zeta_scale < 0:
        raise DomainError("zeta_scale must be nonnegative")
    t = max_feasible_m(model, n, 0.0, params)
    if t == 0:
        return False
    m = max(1, math.floor(c1 * t))
    zeta = min(1.0, zeta_scale * t / n)
    return theorem_margin(model, n, m, zeta, params).feasible
