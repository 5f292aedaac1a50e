import math

import numpy as np
import pytest

from seedscope import (
    DkwConfig,
    L1BoundInputs,
    corollary_bound,
    l1_bound,
    one_sample_threshold,
    theorem1_epsilon,
    two_sample_constant,
    two_sample_threshold,
)

# frozen from a 40-digit mpmath evaluation of the closed forms
THR_8000_001 = 0.025734989232919927
THR_458_005 = 0.089745874290765226
EPSB_800_8000_005 = 6.7973668084665424e-15


def test_two_sample_threshold_values():
    assert abs(two_sample_threshold(8000, 0.01) - THR_8000_001) < 1e-15
    assert abs(two_sample_threshold(458, 0.05) - THR_458_005) < 1e-15


def test_constant_switch_at_458():
    assert two_sample_constant(458) == 2.0
    assert two_sample_constant(457) == math.e
    assert DkwConfig(458).constant == 2.0
    assert DkwConfig(457).constant == math.e
    lo = two_sample_threshold(457, 0.05)
    assert abs(lo - math.sqrt((1 + math.log(20)) / 457)) < 1e-15


def test_two_sample_threshold_domain():
    with pytest.raises(ValueError):
        two_sample_threshold(100, 1.0)
    with pytest.raises(ValueError):
        two_sample_threshold(100, 0.0)
    with pytest.raises(ValueError):
        two_sample_threshold(0, 0.05)


def test_two_sample_threshold_monotonicity():
    ns = [10, 50, 458, 1000, 8000, 100000]
    vals = [two_sample_threshold(n, 0.01) for n in ns]
    # the C switch at 458 only lowers the threshold, so decrease is strict
    assert all(a > b for a, b in zip(vals, vals[1:]))
    eps = [0.2, 0.1, 0.05, 0.01, 0.001]
    vals = [two_sample_threshold(1000, e) for e in eps]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_theorem1_epsilon():
    assert abs(theorem1_epsilon(800, 8000, 0.05, clamp=False) - EPSB_800_8000_005) < 1e-28
    # vacuous edge clamps to 1
    assert theorem1_epsilon(1, 10, 1e-9) == 1.0
    # linear in M before the clamp
    a = theorem1_epsilon(3, 50, 0.1, clamp=False)
    b = theorem1_epsilon(6, 50, 0.1, clamp=False)
    assert b == 2 * a
    with pytest.raises(ValueError):
        theorem1_epsilon(0, 10, 0.1)
    with pytest.raises(ValueError):
        theorem1_epsilon(1, 10, 0.0)


def test_corollary_bound():
    value = corollary_bound(800, 8000, 0.05, 0.05, floor=False)
    assert abs(value - (1.0 - EPSB_800_8000_005 - 2 * math.exp(-20.0))) < 1e-15
    # tiny radii make the raw bound negative; reported value floors at 0
    assert corollary_bound(800, 8000, 1e-6, 1e-6) == 0.0
    # monotone nondecreasing in N
    ns = [458, 600, 1000, 4000, 8000]
    vals = [corollary_bound(20, n, 0.05, 0.05) for n in ns]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        corollary_bound(20, 457, 0.05, 0.05)


def test_l1_bound():
    inputs = L1BoundInputs(alpha=0.05, gamma=0.01, delta_b=0.01, delta_c=0.01, support_len=16.0)
    nu, eps = l1_bound(inputs, n_samples=8000, n_models=800)
    assert abs(nu - 0.53) < 1e-12
    assert eps == min(
        2 * math.exp(-2 * 8000 * 0.01**2) + 1600 * math.exp(-2 * 8000 * 0.01**2), 1.0
    )
    # degenerate: everything zero except alpha
    nu, _ = l1_bound(L1BoundInputs(0.2, 0.0, 0.0, 0.0, 16.0), 100, 5)
    assert nu == 0.2
    # additive in alpha
    nu1, _ = l1_bound(L1BoundInputs(0.1, 0.01, 0.01, 0.01, 16.0), 100, 5)
    nu2, _ = l1_bound(L1BoundInputs(0.3, 0.01, 0.01, 0.01, 16.0), 100, 5)
    assert abs((nu2 - nu1) - 0.2) < 1e-12
    with pytest.raises(ValueError):
        L1BoundInputs(1.0, 0.0, 0.0, 0.0, 16.0)
    with pytest.raises(ValueError):
        L1BoundInputs(0.1, -0.01, 0.0, 0.0, 16.0)


def test_one_sample_dkw_coverage_monte_carlo():
    # uniform samples, N=500: empirical violation rate of the eps=0.05 band
    # stays at or below 0.05 over 2000 trials; near-tight bound, pinned path
    rng = np.random.default_rng(2)
    n, trials = 500, 2000
    delta = one_sample_threshold(n, 0.05)
    x = np.sort(rng.random((trials, n)), axis=1)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    ks = np.maximum((hi - x).max(axis=1), (x - lo).max(axis=1))
    assert np.mean(ks > delta) <= 0.05


def test_theorem1_union_bound_monte_carlo():
    # M=20 known normal-mixture components, N=500 samples each: the pooled
    # eCDF never strays more than delta_b from the analytic average CDF
    from scipy.stats import norm

    rng = np.random.default_rng(2024)
    m, n, trials, delta_b = 20, 500, 500, 0.05
    mus = rng.normal(0.0, 0.3, size=m)
    sigmas = 1.0 + 0.2 * rng.random(m)
    violations = 0
    for _ in range(trials):
        samples = mus[:, None] + sigmas[:, None] * rng.standard_normal((m, n))
        pooled = np.sort(samples.ravel())
        fbar = norm.cdf((pooled[None, :] - mus[:, None]) / sigmas[:, None]).mean(axis=0)
        k = pooled.size
        hi = np.arange(1, k + 1) / k
        lo = np.arange(0, k) / k
        dist = max(np.max(hi - fbar), np.max(fbar - lo))
        violations += dist > delta_b
    assert violations == 0
    # and the bound itself is honest about being loose here
    assert theorem1_epsilon(m, n, delta_b, clamp=False) > violations / trials
