"""Channel power-gain distributions.

Two fading families are supported, both on the support ``[0, inf)``:

* ``rayleigh``: exponential power gain, ``F(x) = 1 - exp(-x / mu)``
* ``pareto``: Pareto-type (Lomax) tail, ``F(x) = 1 - (1 + x) ** -alpha``

Every function accepts scalars or numpy arrays and returns the same shape.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

RAYLEIGH = "rayleigh"
PARETO = "pareto"

# largest probability handed to a closed-form quantile
P_CAP = 1.0 - 1e-15


class DomainError(ValueError):
    """Argument outside the domain of a distribution function."""


@dataclass(frozen=True)
class ChannelModel:
    """Immutable description of the i.i.d. link power-gain law.

    Use :meth:`rayleigh` or :meth:`pareto` rather than the raw constructor.
    """

    dist: str
    mu: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.dist == RAYLEIGH:
            if self.mu is None or not self.mu > 0 or not math.isfinite(self.mu):
                raise DomainError(f"mu must be a positive finite number, got {self.mu!r}")
            if self.alpha is not None:
                raise DomainError("alpha is not a rayleigh parameter")
        elif self.dist == PARETO:
            if self.alpha is None or not self.alpha > 1 or not math.isfinite(self.alpha):
                raise DomainError(f"alpha must exceed 1 for a finite mean, got {self.alpha!r}")
            if self.mu is not None:
                raise DomainError("mu is derived from alpha for the pareto model")
            if self.alpha <= 2:
                warnings.warn(
                    f"pareto alpha={self.alpha} <= 2: the distribution is valid but the "
                    "throughput theorem does not apply",
                    stacklevel=3,
                )
        else:
            raise DomainError(f"unknown distribution {self.dist!r}")

    @classmethod
    def rayleigh(cls, mu: float = 1.0) -> "ChannelModel":
        return cls(RAYLEIGH, mu=float(mu))

    @classmethod
    def pareto(cls, alpha: float) -> "ChannelModel":
        return cls(PARETO, alpha=float(alpha))

    @property
    def theorem_admissible(self) -> bool:
        """False for pareto tails too heavy for the achievability result (alpha <= 2)."""
        return self.dist == RAYLEIGH or self.alpha > 2

    def to_dict(self) -> dict:
        if self.dist == RAYLEIGH:
            return {"dist": RAYLEIGH, "mu": self.mu}
        return {"dist": PARETO, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelModel":
        if d.get("dist") == RAYLEIGH:
            return cls.rayleigh(d.get("mu", 1.0))
        if d.get("dist") == PARETO:
            if "alpha" not in d:
                raise DomainError("pareto model needs alpha")
            return cls.pareto(d["alpha"])
        raise DomainError(f"unknown distribution {d.get('dist')!r}")

    # -- evaluation -------------------------------------------------------

    def cdf(self, x):
        x = _support(x)
        if self.dist == RAYLEIGH:
            out = -np.expm1(-x / self.mu)
        else:
            out = -np.expm1(-self.alpha * np.log1p(x))
        return _like(out, x)

    def sf(self, x):
        """Survival function ``1 - F(x)``, accurate in the far tail."""
        x = _support(x)
        if self.dist == RAYLEIGH:
            out = np.exp(-x / self.mu)
        else:
            out = np.exp(-self.alpha * np.log1p(x))
        return _like(out, x)

    def pdf(self, x):
        x = _support(x)
        if self.dist == RAYLEIGH:
            out = np.exp(-x / self.mu) / self.mu
        else:
            out = self.alpha * np.exp(-(self.alpha + 1.0) * np.log1p(x))
        return _like(out, x)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(np.isnan(p)) or np.any(p < 0) or np.any(p >= 1):
            raise DomainError("quantile needs 0 <= p < 1")
        return self._quantile_unchecked(np.minimum(p, P_CAP))

    def _quantile_unchecked(self, p):
        # -log1p(-p) keeps full relative precision for small p
        if self.dist == RAYLEIGH:
            out = -self.mu * np.log1p(-p)
        else:
            out = np.expm1(-np.log1p(-p) / self.alpha)
        return _like(out, p)

    def quantile_upper(self, q):
        """``F^-1(1 - q)`` computed from the tail probability ``q`` directly.

        Avoids forming ``1 - q`` so that ``q = m / n`` with huge ``n`` keeps
        all significant digits.
        """
        q = np.asarray(q, dtype=float)
        if np.any(np.isnan(q)) or np.any(q <= 0) or np.any(q > 1):
            raise DomainError("quantile_upper needs 0 < q <= 1")
        q = np.maximum(q, 1.0 - P_CAP)
        if self.dist == RAYLEIGH:
            out = -self.mu * np.log(q)
        else:
            out = np.expm1(-np.log(q) / self.alpha)
        return _like(out, q)

    def mean(self) -> float:
        if self.dist == RAYLEIGH:
            return self.mu
        return 1.0 / (self.alpha - 1.0)

    def variance(self) -> float:
        if self.dist == RAYLEIGH:
            return self.mu**2
        a = self.alpha
        if a <= 2:
            return math.inf
        return a / ((a - 1.0) ** 2 * (a - 2.0))

    # -- sampling ---------------------------------------------------------

    def sample(self, stream: np.random.Generator, size=None):
        """Inverse-transform draws ``quantile(U)`` with ``U ~ Uniform[0, 1)``."""
        return self.from_uniform(stream.random(size))

    def from_uniform(self, u):
        """Map uniforms on ``[0, 1)`` to gains without re-validating them."""
        return self._quantile_unchecked(np.minimum(u, P_CAP))


def quantile_by_bisection(
    cdf: Callable[[float], float], p: float, rtol: float = 1e-12, upper: float = 1.0
) -> float:
    """Invert a nondecreasing cdf on ``[0, inf)`` by bisection.

    The upper bracket doubles until ``cdf(upper) >= p``. Fallback for models
    without a closed-form quantile.
    """
    if not 0 <= p < 1:
        raise DomainError("quantile needs 0 <= p < 1")
    if p == 0:
        return 0.0
    lo, hi = 0.0, upper
    while cdf(hi) < p:
        lo, hi = hi, 2.0 * hi
        if not math.isfinite(hi):
            raise DomainError(f"cdf never reaches {p}")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _support(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("gain must be nonnegative")
    return x


def _like(out, ref):
    if np.ndim(ref) == 0:
        return float(out)
    return out
