import dataclasses
import math

import numpy as np
import pytest

from tailfit.errors import GofFailure
from tailfit.gof import GofResult, gof_pvalue, synthesize
from tailfit.models import PowerLaw, Yule
from tailfit.plfit import CountSample, FitConfig, PowerLawFit, estimate_xmin


@pytest.fixture(scope="module")
def spliced():
    rng = np.random.default_rng(8)
    body = rng.integers(0, 20, 4000)
    tail = PowerLaw(2.8, 20).sample(1000, rng)
    s = CountSample.from_counts("spliced", np.concatenate([body, tail]))
    return s, estimate_xmin(s)


def test_synthesize_size_and_determinism(spliced):
    s, fit = spliced
    a = synthesize(s, fit, 5)
    b = synthesize(s, fit, 5)
    assert a.n == s.n
    np.testing.assert_array_equal(a.counts, b.counts)
    body = set(s.values[s.values < fit.x0].tolist())
    assert set(a.values[a.values < fit.x0].tolist()) <= body


def test_synthesize_pure_tail_is_parametric():
    s = CountSample.from_counts("pl", PowerLaw(3.0, 1).sample(2000, 1))
    fit = PowerLawFit(PowerLaw(3.0, 1), n_tail=s.n, n_total=s.n, ks=0.01)
    out = synthesize(s, fit, 9)
    assert out.n == s.n
    np.testing.assert_array_equal(out.counts, np.sort(PowerLaw(3.0, 1).sample(
        2000, np.random.default_rng(9))))


def test_synthesize_body_only():
    s = CountSample.from_counts("b", [1, 1, 2])
    fit = PowerLawFit(PowerLaw(2.0, 3), n_tail=0, n_total=3, ks=0.5)
    out = synthesize(s, fit, 1)
    assert out.n == 3 and set(out.values.tolist()) <= {1, 2}


def test_synthetic_tail_fraction_concentrates(spliced):
    s, fit = spliced
    p = fit.n_tail / s.n
    fracs = [synthesize(s, fit, seed).n_tail(fit.x0) / s.n for seed in range(1000)]
    se = math.sqrt(p * (1 - p) / (s.n * 1000))
    assert abs(np.mean(fracs) - p) <= 3 * se


def test_gof_accounting_and_determinism(spliced):
    s, fit = spliced
    a = gof_pvalue(s, fit, 100, seed=3)
    assert a == gof_pvalue(s, fit, 100, seed=3)
    assert a == gof_pvalue(s, fit, 100, seed=3, workers=2)
    assert isinstance(a, GofResult)
    assert a.p_value * a.n_sims == a.n_exceed
    assert a.reject == (a.p_value < 0.1)
    assert 0 <= a.p_value <= 1 and a.k == fit.ks


def test_gof_monotone_in_observed_statistic(spliced):
    s, fit = spliced
    counts = [gof_pvalue(s, dataclasses.replace(fit, ks=k), 100, seed=4).n_exceed
              for k in (0.0, fit.ks, 0.05, 1.0)]
    assert counts == sorted(counts, reverse=True)
    assert counts[0] == 100  # ties count toward exceedance


def test_gof_rejects_misfit():
    # a large floor forces the whole Yule sample into the tail, where its
    # curvature at small counts is plain to see
    s = CountSample.from_counts("yule", Yule(2.0, 1).sample(20_000, 3))
    cfg = FitConfig(min_tail=15_000)
    fit = estimate_xmin(s, cfg)
    res = gof_pvalue(s, fit, 100, seed=1, config=cfg)
    assert fit.x0 == 1 and res.reject and res.p_value < 0.05


def test_gof_errors():
    s = CountSample.from_histogram("fragile", [0, 1, 2, 3, 5], [1000, 30, 10, 6, 4])
    fit = estimate_xmin(s)
    with pytest.raises(GofFailure):
        gof_pvalue(s, fit, 100, seed=1)
    with pytest.raises(ValueError):
        gof_pvalue(s, fit, 99, seed=1)
    with pytest.raises(ValueError):
        gof_pvalue(s, fit, 100, seed=1, threshold=1.0)


def test_rendering_partition():
    accept = GofResult(0.02, 1000, 825, 0.825, False)
    reject = GofResult(0.05, 1000, 5, 0.005, True)
    assert not accept.reject and reject.reject
