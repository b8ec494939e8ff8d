"""One time slot of the one-hop network.

A slot draws the ``n`` direct gains, activates the ``m`` strongest pairs,
passes each pair's one-bit on/off decision through a binary symmetric
feedback channel, and evaluates the SINR of every source that ends up
transmitting.

Cross-link gains are never materialized as an ``n x n`` matrix. Each
``gamma[k, i]`` is the ``(k * n + i)``-th output of a SplitMix64 counter
stream keyed by the slot, so a link's gain is a pure function of
``(slot key, k, i)``: the same link always returns the same draw, distinct
links are independent, and only links between active pairs are ever
evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import ChannelModel, DomainError

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(s) for s in (30, 27, 31, 11))
_INV53 = 1.0 / 9007199254740992.0

# sources summed per pass when accumulating interference: the first pass is
# small so lazy evaluation can discard hopeless receivers cheaply
FIRST_BLOCK = 32
MAX_BLOCK = 1024
# cap on link gains evaluated at once
_MAX_CELLS = 1 << 22


def counter_uniforms(key: int, counters) -> np.ndarray:
    """Uniforms on [0, 1) at the given positions of a SplitMix64 stream."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key) + (c + np.uint64(1)) * _GOLDEN
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
        z = z ^ (z >> _S31)
    return (z >> _S11).astype(np.float64) * _INV53


@dataclass
class SlotRealization:
    model: ChannelModel
    n: int
    direct_gains: np.ndarray
    key: int
    cross_gain_cache: dict = field(default_factory=dict, repr=False)
    # link gains evaluated so far (direct + cross)
    draws: int = 0

    def cross_gains(self, sources, dests) -> np.ndarray:
        """Gain matrix ``G[a, b] = gamma[sources[a], dests[b]]``.

        Entries where source equals destination are zero so that column sums
        are interference sums.
        """
        s = np.asarray(sources, dtype=np.int64)
        d = np.asarray(dests, dtype=np.int64)
        counters = s[:, None].astype(np.uint64) * np.uint64(self.n) + d[None, :].astype(np.uint64)
        g = self.model.from_uniform(counter_uniforms(self.key, counters))
        g = np.atleast_2d(g)
        same = s[:, None] == d[None, :]
        g[same] = 0.0
        self.draws += g.size - int(same.sum())
        return g


@dataclass
class ActivationState:
    """Intended (receiver-side) and noisy (transmitter-side) activation sets.

    Both sets are sorted index arrays.
    """

    m: int
    intended: np.ndarray
    noisy: np.ndarray
    e1: int
    e2: int


@dataclass
class SlotOutcome:
    sinr: dict
    successes: int
    all_intended_success: bool
    # None when the slot was evaluated lazily
    max_active_interference: float | None
    activation: ActivationState | None = None
    # active receivers dropped early as certain failures (lazy mode only)
    unresolved: tuple = ()


def draw_direct_gains(model: ChannelModel, n: int, stream: np.random.Generator) -> SlotRealization:
    if n < 1:
        raise DomainError(f"need at least one pair, got n={n}")
    gains = model.sample(stream, n)
    key = int(stream.integers(0, 2**64, dtype=np.uint64))
    return SlotRealization(model=model, n=int(n), direct_gains=gains, key=key, draws=int(n))


def select_strongest(realization: SlotRealization, m: int) -> np.ndarray:
    """Indices of the ``m`` largest direct gains, ties to the smaller index.

    Uses a linear-time partition rather than a full sort.
    """
    n = realization.n
    if not 0 <= m <= n:
        raise DomainError(f"m must lie in [0, {n}], got {m}")
    if m == 0:
        return np.empty(0, dtype=np.int64)
    if m == n:
        return np.arange(n, dtype=np.int64)
    g = realization.direct_gains
    cut = np.partition(g, n - m)[n - m]
    above = np.flatnonzero(g > cut)
    ties = np.flatnonzero(g == cut)[: m - above.size]
    return np.sort(np.concatenate([above, ties]))


def apply_feedback_noise(intended, n: int, zeta: float, stream: np.random.Generator) -> ActivationState:
    """Flip each of the ``n`` feedback bits independently with probability ``zeta``."""
    if not 0.0 <= zeta <= 1.0:
        raise DomainError(f"zeta must lie in [0, 1], got {zeta}")
    if isinstance(intended, (set, frozenset)):
        intended = sorted(intended)
    intended = np.unique(np.asarray(intended, dtype=np.int64))
    if intended.size and (intended[0] < 0 or intended[-1] >= n):
        raise DomainError("intended indices out of range")
    on = np.zeros(n, dtype=bool)
    on[intended] = True
    flips = stream.random(n) < zeta
    noisy = np.flatnonzero(on ^ flips)
    e1 = int(np.count_nonzero(on & flips))
    e2 = int(np.count_nonzero(~on & flips))
    return ActivationState(m=int(intended.size), intended=intended, noisy=noisy, e1=e1, e2=e2)


def cross_gain(realization: SlotRealization, k: int, i: int) -> float:
    n = realization.n
    if not (0 <= k < n and 0 <= i < n):
        raise DomainError(f"link ({k}, {i}) out of range for n={n}")
    if k == i:
        raise DomainError("direct gains live in direct_gains")
    cache = realization.cross_gain_cache
    if (k, i) not in cache:
        cache[(k, i)] = float(realization.cross_gains([k], [i])[0, 0])
    return cache[(k, i)]


def interference(realization: SlotRealization, active, dests=None, give_up=None):
    """Interference sums at ``dests`` from every source in ``active``.

    ``give_up(partial, idx)`` may flag destinations (by position ``idx``)
    whose partial sum already settles their fate; those stop accumulating,
    their sums are only lower bounds, and they are marked in the returned
    mask.
    """
    active = np.asarray(active, dtype=np.int64)
    dests = active if dests is None else np.asarray(dests, dtype=np.int64)
    total = np.zeros(dests.size)
    dropped = np.zeros(dests.size, dtype=bool)
    if active.size == 0 or dests.size == 0:
        return total, dropped
    start, block = 0, FIRST_BLOCK
    while start < active.size:
        live = np.flatnonzero(~dropped)
        if live.size == 0:
            break
        src = active[start:start + block]
        chunk = max(1, _MAX_CELLS // src.size)
        for c0 in range(0, live.size, chunk):
            cols = live[c0:c0 + chunk]
            # row-contiguous sums keep the addition order independent of len(cols)
            block_gains = np.ascontiguousarray(realization.cross_gains(src, dests[cols]).T)
            total[cols] += block_gains.sum(axis=1)
        start += src.size
        block = min(2 * block, MAX_BLOCK)
        if give_up is not None and start < active.size:
            dropped[live] = give_up(total[live], live)
    return total, dropped


def evaluate_slot(
    realization: SlotRealization,
    activation: ActivationState,
    beta: float,
    n0: float,
    count_unexpected: bool = True,
    lazy: bool = False,
) -> SlotOutcome:
    """SINR of every transmitting source and the slot's success counts.

    ``count_unexpected`` decides whether a receiver whose source transmits by
    mistake (second-kind error) counts toward throughput when its SINR
    clears ``beta``. ``lazy`` stops summing interference at a receiver once
    failure is certain; those receivers get no SINR entry.
    """
    if not n0 > 0:
        raise DomainError(f"n0 must be positive, got {n0}")
    if not beta >= 0:
        raise DomainError(f"beta must be nonnegative, got {beta}")
    active = activation.noisy
    g = realization.direct_gains[active]
    give_up = None
    if lazy and beta > 0:
        # interference only grows, so a partial sum already failing is final
        def give_up(partial, idx):
            return g[idx] / (n0 + partial) < beta
    total, dropped = interference(realization, active, give_up=give_up)
    sinr = g / (n0 + total)
    ok = (sinr >= beta) & ~dropped
    expected = np.isin(active, activation.intended, assume_unique=True)
    counted = ok if count_unexpected else ok & expected
    resolved = ~dropped
    return SlotOutcome(
        sinr={int(i): float(s) for i, s, r in zip(active, sinr, resolved) if r},
        successes=int(np.count_nonzero(counted)),
        all_intended_success=bool(np.all(ok[expected])),
        max_active_interference=None if lazy else (float(total.max()) if total.size else 0.0),
        activation=activation,
        unresolved=tuple(int(i) for i in active[dropped]),
    )


def run_slot(
    model: ChannelModel,
    n: int,
    m: int,
    zeta: float,
    beta: float,
    n0: float,
    stream: np.random.Generator,
    count_unexpected: bool = True,
    lazy: bool = False,
) -> SlotOutcome:
    realization = draw_direct_gains(model, n, stream)
    intended = select_strongest(realization, m)
    activation = apply_feedback_noise(intended, n, zeta, stream)
    return evaluate_slot(realization, activation, beta, n0, count_unexpected, lazy)
