import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from fadingnet.distributions import ChannelModel, DomainError, quantile_by_bisection
from fadingnet.experiments import ks_critical, ks_statistic

from conftest import FixedStream, pareto

MODELS = [ChannelModel.rayleigh(1.0), ChannelModel.rayleigh(2.5), ChannelModel.pareto(2.5), ChannelModel.pareto(3.0)]
model_st = st.sampled_from(MODELS)


def test_cdf_examples(rayleigh):
    assert rayleigh.cdf(0.0) == 0.0
    assert rayleigh.cdf(math.log(2)) == pytest.approx(0.5, abs=1e-15)
    assert pareto(2).cdf(9.0) == pytest.approx(0.99, abs=1e-15)


def test_pdf_examples(rayleigh, pareto3):
    assert rayleigh.pdf(0.0) == 1.0
    assert ChannelModel.rayleigh(2.0).pdf(0.0) == 0.5
    assert pareto3.pdf(0.0) == 3.0


def test_quantile_examples(rayleigh):
    assert rayleigh.quantile(0.0) == 0.0
    q = rayleigh.quantile(0.9)
    assert q == pytest.approx(2.302585, abs=1e-6)
    assert q == pytest.approx(quantile_by_bisection(rayleigh.cdf, 0.9), rel=1e-11)
    assert pareto(2).quantile(0.99) == pytest.approx(9.0, rel=1e-12)


def test_mean_examples(pareto3):
    assert ChannelModel.rayleigh(1.7).mean() == 1.7
    assert pareto3.mean() == 0.5
    for alpha in (2.5, 3.0):
        model = ChannelModel.pareto(alpha)
        # E[X] = integral of the survival function
        oracle, _ = integrate.quad(lambda x: (1 + x) ** -alpha, 0, np.inf)
        assert model.mean() == pytest.approx(oracle, rel=1e-9)
    assert ChannelModel.pareto(2.5).mean() == pytest.approx(0.666667, abs=1e-6)


def test_sample_examples(rayleigh):
    assert rayleigh.sample(FixedStream(0.0)) == 0.0
    assert rayleigh.sample(FixedStream(0.5)) == pytest.approx(0.693147, abs=1e-6)
    assert pareto(2).sample(FixedStream(0.75)) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("bad", [-1e-9, -1.0, np.nan])
def test_negative_gain_is_domain_error(rayleigh, bad):
    with pytest.raises(DomainError):
        rayleigh.cdf(bad)
    with pytest.raises(DomainError):
        rayleigh.pdf(bad)


@pytest.mark.parametrize("p", [-0.1, 1.0, 1.5])
def test_quantile_domain(rayleigh, p):
    with pytest.raises(DomainError):
        rayleigh.quantile(p)


def test_model_validation():
    with pytest.raises(DomainError):
        ChannelModel.rayleigh(0.0)
    with pytest.raises(DomainError):
        ChannelModel.pareto(1.0)
    with pytest.raises(DomainError):
        ChannelModel("nakagami")
    with pytest.warns(UserWarning, match="alpha"):
        m = ChannelModel.pareto(1.5)
    assert not m.theorem_admissible
    assert ChannelModel.pareto(2.5).theorem_admissible


def test_quantile_cap_near_one(rayleigh):
    top = np.nextafter(1.0, 0.0)
    assert top > 1 - 1e-15
    assert math.isfinite(rayleigh.quantile(top))
    assert rayleigh.quantile(top) == rayleigh.quantile(1 - 1e-15)


def test_dict_roundtrip():
    for m in MODELS:
        assert ChannelModel.from_dict(m.to_dict()) == m
    assert ChannelModel.rayleigh(1.0).to_dict() == {"dist": "rayleigh", "mu": 1.0}
    assert ChannelModel.pareto(3.0).to_dict() == {"dist": "pareto", "alpha": 3.0}


def test_roundtrip_dense_grid():
    p = np.linspace(0.0, 1 - 1e-12, 10_001)
    for m in MODELS:
        assert np.max(np.abs(m.cdf(m.quantile(p)) - p)) <= 1e-9


@given(model_st, st.floats(0, 1 - 1e-12))
def test_roundtrip_property(model, p):
    assert abs(model.cdf(model.quantile(p)) - p) <= 1e-9


@given(model_st, st.lists(st.floats(0, 1 - 1e-12), min_size=2, max_size=50, unique=True))
def test_quantile_strictly_increasing(model, ps):
    q = model.quantile(np.sort(ps))
    assert np.all(np.diff(q) > 0)


@given(model_st, st.floats(0.05, 30.0))
def test_pdf_matches_cdf_derivative(model, x):
    h = 1e-5 * max(1.0, x)
    slope = (model.cdf(x + h) - model.cdf(x - h)) / (2 * h)
    assert slope == pytest.approx(model.pdf(x), rel=1e-6)


def test_cdf_limits():
    x = np.linspace(0, 50, 2001)
    for m in MODELS:
        c = m.cdf(x)
        assert c[0] == 0.0
        assert np.all(np.diff(c) >= 0)
    assert ChannelModel.rayleigh(1.0).cdf(1e3) == 1.0
    assert ChannelModel.pareto(3.0).cdf(1e8) == pytest.approx(1.0, abs=1e-20)


def test_quantile_upper_matches_quantile():
    q = np.array([1e-3, 0.1, 0.5, 1.0])
    for m in MODELS:
        np.testing.assert_allclose(m.quantile_upper(q), m.quantile(1 - q), rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.dist + str(m.mu or m.alpha))
def test_sampling_fidelity(model):
    rng = np.random.default_rng(20240601)
    x = model.sample(rng, 100_000)
    d = ks_statistic(x, model.cdf)
    assert d < 0.01
    assert d < ks_critical(x.size, 0.01)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.dist + str(m.mu or m.alpha))
def test_sample_mean_within_three_standard_errors(model):
    rng = np.random.default_rng(99)
    x = model.sample(rng, 200_000)
    if math.isfinite(model.variance()):
        se = math.sqrt(model.variance() / x.size)
        assert abs(x.mean() - model.mean()) < 3 * se


def test_bisection_generic_fallback():
    # a tabulated-style model: Weibull(k=2) cdf has no entry in ChannelModel
    cdf = lambda x: 1 - math.exp(-(x**2))
    for p in (0.01, 0.3, 0.999):
        assert quantile_by_bisection(cdf, p) == pytest.approx(math.sqrt(-math.log1p(-p)), rel=1e-11)
    assert quantile_by_bisection(cdf, 0.0) == 0.0
    with pytest.raises(DomainError):
        quantile_by_bisection(cdf, 1.0)


def test_ks_statistic_matches_scipy():
    rng = np.random.default_rng(3)
    x = rng.exponential(size=500)
    model = ChannelModel.rayleigh(1.0)
    assert ks_statistic(x, model.cdf) == pytest.approx(stats.kstest(x, "expon").statistic, rel=1e-12)
