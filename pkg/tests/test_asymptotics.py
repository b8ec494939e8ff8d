import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from fadingnet.asymptotics import (
    TheoremParams,
    chernoff_exponent,
    corollary_tolerance,
    corollary_transfer_check,
    falk_constants,
    first_kind_tail_bound,
    lower_chernoff_exponent,
    lower_tail_bound,
    max_feasible_m,
    theorem_margin,
)
from fadingnet.distributions import ChannelModel, DomainError

from conftest import pareto

R1 = ChannelModel.rayleigh(1.0)
EXACT = TheoremParams(beta=1.0, k_const=1.5, delta1=0.0, delta2=0.0)


def scan_oracle(model, n, zeta, p):
    """Plain-python integer scan over every m."""
    best = 0
    mu = model.mean()
    for m in range(p.m_min, n + 1):
        if model.dist == "rayleigh":
            lhs = (1 - p.delta1) * -mu * math.log(m / n)
        else:
            lhs = (1 - p.delta1) * ((n / m) ** (1 / model.alpha) - 1)
        rhs = p.beta * p.k_const * mu * (m + (1 + p.delta2) * zeta * (n - m))
        if lhs > rhs:
            best = m
    return best


def test_margin_examples():
    r = theorem_margin(R1, 10_000, 5, 0.0, EXACT)
    assert r.lhs == pytest.approx(math.log(2000), abs=1e-12)
    assert r.lhs == pytest.approx(7.6009, abs=1e-4)
    assert r.rhs == pytest.approx(7.5, abs=1e-12)
    assert r.feasible
    r = theorem_margin(R1, 10_000, 6, 0.0, EXACT)
    assert r.lhs == pytest.approx(7.4186, abs=1e-4)
    assert r.rhs == pytest.approx(9.0)
    assert not r.feasible


def test_margin_full_noise_fails():
    r = theorem_margin(R1, 10_000, 5, 1.0, EXACT)
    assert r.l_value == pytest.approx(10_000)
    assert not r.feasible


def test_report_identities():
    p = TheoremParams(beta=2.0, k_const=1.7, delta2=0.1)
    model = ChannelModel.pareto(3.0)
    r = theorem_margin(model, 5000, 12, 0.003, p)
    assert r.l_value == 12 + 1.1 * 0.003 * (5000 - 12)
    assert r.phi == pytest.approx(1.7 * model.mean() * r.l_value, rel=1e-15)
    assert r.rhs == pytest.approx(2.0 * r.phi, rel=1e-15)


def test_margin_preconditions():
    with pytest.raises(DomainError):
        theorem_margin(R1, 100, 0, 0.0)
    with pytest.raises(DomainError):
        theorem_margin(R1, 100, 101, 0.0)
    with pytest.raises(DomainError):
        theorem_margin(R1, 100, 5, 1.5)
    with pytest.raises(DomainError, match="alpha must exceed 2"):
        theorem_margin(pareto(2.0), 100, 5, 0.0)
    with pytest.raises(DomainError, match="alpha must exceed 2"):
        max_feasible_m(pareto(1.5), 100, 0.0)


def test_params_validation():
    with pytest.raises(DomainError):
        TheoremParams(k_const=1.0)
    with pytest.raises(DomainError):
        TheoremParams(beta=0.0)
    with pytest.raises(DomainError):
        TheoremParams(delta1=1.0)
    with pytest.raises(DomainError):
        TheoremParams(m_min=0)
    assert TheoremParams().replace(k_const=3.0).k_const == 3.0


def test_max_feasible_examples():
    assert max_feasible_m(R1, 10_000, 0.0, EXACT) == 5
    assert scan_oracle(R1, 10_000, 0.0, EXACT) == 5
    assert max_feasible_m(R1, 10_000, 0.0, EXACT.replace(beta=1e9)) == 0
    assert max_feasible_m(R1, 10, 0.0, EXACT.replace(m_min=11)) == 0


@given(
    st.sampled_from([R1, ChannelModel.rayleigh(3.0), ChannelModel.pareto(2.5), ChannelModel.pareto(4.0)]),
    st.integers(2, 3000),
    st.floats(0, 0.02),
    st.floats(1.01, 4.0),
    st.floats(0.1, 3.0),
    st.floats(0, 0.5),
)
def test_bisect_matches_scan(model, n, zeta, k, beta, d):
    p = TheoremParams(beta=beta, k_const=k, delta1=d, delta2=d)
    b = max_feasible_m(model, n, zeta, p, method="bisect")
    assert b == max_feasible_m(model, n, zeta, p, method="scan")
    assert b == scan_oracle(model, n, zeta, p)


@given(st.integers(100, 10**6), st.floats(0, 0.9))
def test_sides_are_monotone(n, zeta):
    p = TheoremParams()
    ms = np.unique(np.linspace(1, n - 1, 200).astype(int))
    reports = [theorem_margin(R1, n, int(m), zeta, p) for m in ms]
    lhs = np.array([r.lhs for r in reports])
    rhs = np.array([r.rhs for r in reports])
    assert np.all(np.diff(lhs) < 0)
    assert np.all(np.diff(rhs) > 0)


def test_scan_handles_large_zeta():
    # (1 + delta2) * zeta >= 1: rhs decreasing in m, scan path
    p = TheoremParams(delta2=0.5)
    assert max_feasible_m(R1, 500, 0.8, p) == scan_oracle(R1, 500, 0.8, p) == 0


def test_rayleigh_order_band():
    ratios = [max_feasible_m(R1, 10**e, 0.0) / math.log(10**e) for e in range(3, 8)]
    assert min(ratios) > 0.3 and max(ratios) < 0.7


@pytest.mark.parametrize("alpha", [2.5, 3.0])
def test_pareto_exponent_at_ten_million(alpha):
    m = max_feasible_m(ChannelModel.pareto(alpha), 10**7, 0.0)
    assert abs(math.log(m) / math.log(10**7) - 1 / (1 + alpha)) <= 0.05


# -- order statistic constants ----------------------------------------------

def test_falk_examples():
    a, b = falk_constants(R1, 10_000, 100)
    assert a == pytest.approx(math.log(100), rel=1e-13)
    assert b == pytest.approx(0.1, rel=1e-12)
    a, _ = falk_constants(R1, 50, 50)
    assert a == 0.0
    a, b = falk_constants(R1, 10_000, 100)
    assert a / b == pytest.approx(46.05, abs=0.01)
    a6, b6 = falk_constants(R1, 10**6, 1000)
    assert a6 / b6 > a / b
    with pytest.raises(DomainError):
        falk_constants(R1, 10, 0)


def test_falk_pareto_hand_value():
    model = ChannelModel.pareto(3.0)
    n, i = 10**5, 317
    a, b = falk_constants(model, n, i)
    a_ref = (n / i) ** (1 / 3) - 1
    assert a == pytest.approx(a_ref, rel=1e-12)
    assert b == pytest.approx(math.sqrt(i) / (n * 3 * (1 + a_ref) ** -4), rel=1e-12)


@pytest.mark.parametrize("model", [R1, ChannelModel.pareto(3.0), ChannelModel.pareto(2.5)])
def test_falk_ratio_increasing(model):
    grid = [10**3, 3 * 10**3, 10**4, 10**5, 10**6, 10**7]
    r = []
    for n in grid:
        a, b = falk_constants(model, n, math.ceil(math.sqrt(n)))
        r.append(a / b)
    assert all(y > x for x, y in zip(r, r[1:]))


# -- Chernoff bounds ----------------------------------------------------------

def test_chernoff_examples():
    assert chernoff_exponent(math.e - 1) == pytest.approx(1.0, rel=1e-14)
    assert chernoff_exponent(0.5) == pytest.approx(0.108198, abs=1e-6)
    assert chernoff_exponent(1e-8) < 1e-15
    for bad in (0.0, -0.1):
        with pytest.raises(DomainError):
            chernoff_exponent(bad)


def test_chernoff_positive_increasing_convex():
    x = np.linspace(1e-3, 10, 2000)
    v = np.array([chernoff_exponent(t) for t in x])
    assert np.all(v > 0)
    assert np.all(np.diff(v) > 0)
    assert np.all(np.diff(v, 2) > -1e-12)


def test_tail_bound_examples():
    assert first_kind_tail_bound(0.0, 1000, 0.5) == 1.0
    assert first_kind_tail_bound(0.01, 1000, 0.5) == pytest.approx(math.exp(-1.08198), rel=1e-5)
    assert first_kind_tail_bound(0.01, 1000, 0.5) == pytest.approx(0.3389, abs=1e-4)
    with pytest.raises(DomainError):
        first_kind_tail_bound(0.1, 0, 0.5)


@given(st.floats(0, 1), st.integers(1, 5000), st.floats(1e-3, 3.0))
def test_tail_bound_dominates_binomial(zeta, m, d):
    exact = stats.binom.sf(math.floor((1 + d) * zeta * m), m, zeta)
    assert first_kind_tail_bound(zeta, m, d) >= exact - 1e-12


@given(st.floats(0, 1), st.integers(1, 5000), st.floats(1e-3, 0.999))
def test_lower_tail_bound_dominates_binomial(zeta, m, d):
    cut = (1 - d) * zeta * m
    exact = stats.binom.cdf(math.ceil(cut) - 1, m, zeta)
    assert lower_tail_bound(zeta, m, d) >= exact - 1e-12
    assert lower_chernoff_exponent(d) > 0


# -- tolerance ----------------------------------------------------------------

def test_tolerance_rayleigh_band():
    rows = corollary_tolerance(R1, [10**3, 10**4, 10**5])
    z = [r.zeta_threshold for r in rows]
    assert z[0] > z[1] > z[2]
    ratios = [r.zeta_threshold / (math.log(r.n) / r.n) for r in rows]
    assert max(ratios) / min(ratios) < 2.0
    for r in rows:
        assert r.t_n == max_feasible_m(R1, r.n, 0.0)


def test_tolerance_pareto_band():
    alpha = 2.5
    rows = corollary_tolerance(ChannelModel.pareto(alpha), [10**3, 10**4, 10**5, 10**6])
    ratios = [r.zeta_threshold / r.n ** (-alpha / (1 + alpha)) for r in rows]
    assert max(ratios) / min(ratios) < 2.0


def test_tolerance_infeasible_threshold_zero():
    rows = corollary_tolerance(R1, [100, 1000], TheoremParams(beta=1e6))
    assert all(r.t_n == 0 and r.zeta_threshold == 0.0 for r in rows)


def test_tolerance_grid_validation():
    with pytest.raises(DomainError):
        corollary_tolerance(R1, [])
    with pytest.raises(DomainError):
        corollary_tolerance(R1, [1000, 100])


def test_transfer_examples():
    assert corollary_transfer_check(R1, 10**5, c1=1.0, zeta_scale=0.0)
    assert corollary_transfer_check(R1, 10**5, c1=0.5, zeta_scale=0.1)
    for n in (10**5, 10**6, 10**7):
        t = max_feasible_m(R1, n, 0.0)
        assert not theorem_margin(R1, n, t, 10 * t / n).feasible
    assert not corollary_transfer_check(R1, 1000, TheoremParams(beta=1e6))
    with pytest.raises(DomainError):
        corollary_transfer_check(R1, 1000, c1=0.0)
