import numpy as np
import pytest
from oracles import trimmed_ks_grid, trimmed_ks_lp, trimmed_ks_oracle

from seedscope import (
    build_envelope,
    ecdf_of,
    interpolate,
    optimal_weights,
    robust_test,
    sup_distance,
    trimmed_ks,
    trimming_membership,
    two_sample_threshold,
)

ALPHAS = (0.0, 0.125, 0.25, 0.5)


def lattice_sample(rng, max_n=8):
    return rng.integers(0, 12, size=int(rng.integers(1, max_n + 1))) / 2.0


def pooled_grid_ks(cand_values, ref):
    """Classical statistic evaluated at the pooled points, computed afresh."""
    cand = ecdf_of(cand_values)
    z = np.union1d(cand.support, ref.knots)
    return float(np.max(np.abs(cand.evaluate(z) - ref.evaluate(z))))


def test_worked_example_exact():
    ref = interpolate(ecdf_of([1, 2, 3, 4]))
    cand = ecdf_of([1, 2, 3, 100])
    assert abs(trimmed_ks(cand, ref, 0.0) - 0.25) <= 1e-12
    assert abs(trimmed_ks(cand, ref, 0.25) - 0.125) <= 1e-12


def test_identity_any_alpha():
    ref = interpolate(ecdf_of([0.5, 1.5, 2.0]))
    cand = ecdf_of([0.5, 1.5, 2.0])
    for alpha in (0.0, 0.3, 0.7, 0.99):
        assert trimmed_ks(cand, ref, alpha) <= 1e-12


def test_alpha_domain():
    ref = interpolate(ecdf_of([1, 2]))
    cand = ecdf_of([1, 2])
    for bad in (1.0, 1.5, -0.1):
        with pytest.raises(ValueError):
            trimmed_ks(cand, ref, bad)
        with pytest.raises(ValueError):
            build_envelope(cand, ref, bad)


def test_envelope_structure():
    ref = interpolate(ecdf_of([1, 2, 3, 4]))
    cand = ecdf_of([1, 2, 3, 100])
    for alpha in (0.0, 0.25, 0.6):
        env = build_envelope(cand, ref, alpha)
        r = 1.0 / (1.0 - alpha)
        assert env.h_alpha[0] == 0.0
        assert env.h_alpha[-1] == 1.0
        dh = np.diff(env.h_alpha)
        du = np.diff(env.grid)
        assert np.all(dh >= -1e-12)
        assert np.all(dh <= r * du + 1e-12)
        assert np.all(env.U_vals >= env.B_vals - 1e-15)
        assert np.all(env.B_vals >= env.L_vals - 1e-15)
        # the envelope arrays are double precision, the statistic is exact
        assert abs(env.statistic - trimmed_ks(cand, ref, alpha)) <= 1e-12


def test_alpha_zero_at_identity_gamma():
    # candidate equals the reference's own sample: Gamma(u) = u on the grid,
    # the envelope collapses and the statistic vanishes
    env = build_envelope(ecdf_of([1, 2, 3]), interpolate(ecdf_of([1, 2, 3])), 0.0)
    assert np.allclose(env.B_vals, 0.0)
    assert np.allclose(env.U_vals, 0.0)
    assert np.allclose(env.L_vals, 0.0)
    assert np.allclose(env.h_tilde, 0.0)
    assert np.allclose(env.h_alpha, env.grid)
    assert env.statistic == 0.0


def test_oracle_equivalence_random_instances():
    rng = np.random.default_rng(42)
    for _ in range(200):
        cand = lattice_sample(rng)
        ref = interpolate(ecdf_of(lattice_sample(rng)))
        for alpha in ALPHAS:
            got = trimmed_ks(ecdf_of(cand), ref, alpha)
            want = trimmed_ks_oracle(cand, ref, alpha)
            assert abs(got - want) <= 1e-9


def test_lp_equivalence_n4():
    rng = np.random.default_rng(99)
    done = 0
    while done < 40:
        cand = rng.choice(np.arange(0, 12) / 2.0, size=4, replace=False)
        ref = interpolate(ecdf_of(lattice_sample(rng)))
        for alpha in ALPHAS:
            got = trimmed_ks(ecdf_of(cand), ref, alpha)
            assert abs(got - trimmed_ks_lp(cand, ref, alpha)) <= 1e-9
        done += 1


def test_dense_grid_cross_check_n4():
    rng = np.random.default_rng(7)
    for _ in range(5):
        cand = rng.choice(np.arange(0, 12) / 2.0, size=4, replace=False)
        ref = interpolate(ecdf_of(lattice_sample(rng)))
        for alpha in (0.0, 0.25):
            got = trimmed_ks(ecdf_of(cand), ref, alpha)
            grid_min, step = trimmed_ks_grid(cand, ref, alpha)
            assert grid_min >= got - 1e-12
            assert grid_min <= got + step


def test_alpha_zero_reduction_exact():
    rng = np.random.default_rng(5)
    for _ in range(100):
        cand = lattice_sample(rng)
        ref = interpolate(ecdf_of(lattice_sample(rng)))
        assert trimmed_ks(ecdf_of(cand), ref, 0.0) == pooled_grid_ks(cand, ref)


def test_statistic_monotone_in_alpha():
    rng = np.random.default_rng(17)
    grid = np.linspace(0.0, 0.95, 39)
    for _ in range(100):
        cand = ecdf_of(rng.normal(size=rng.integers(2, 30)))
        ref = interpolate(ecdf_of(rng.normal(size=rng.integers(2, 30))))
        stats = [trimmed_ks(cand, ref, a) for a in grid]
        assert all(a >= b for a, b in zip(stats, stats[1:]))


def test_high_alpha_bounded_by_reference_jump_over_gaps():
    # with nearly all mass trimmable, only reference variation across the
    # candidate's support gaps is left
    rng = np.random.default_rng(23)
    for _ in range(20):
        cand_vals = np.sort(rng.normal(size=6))
        ref_vals = rng.normal(size=8)
        lo, hi = cand_vals[0], cand_vals[-1]
        ref_vals = np.clip(ref_vals, lo, hi)  # common support hull
        ref = interpolate(ecdf_of(ref_vals))
        got = trimmed_ks(ecdf_of(cand_vals), ref, 0.999)
        want = trimmed_ks_oracle(cand_vals, ref, 0.999)
        assert abs(got - want) <= 1e-9
        gaps = np.concatenate([[lo], cand_vals, [hi]])
        jump = max(
            float(ref.evaluate(b) - ref.evaluate(a)) / 2
            for a, b in zip(gaps, gaps[1:])
        ) if cand_vals.size else 0.0
        assert got <= jump + 1e-9


def test_robust_test_accepts_identity():
    sample = [0.1, 0.7, 1.3, 2.0]
    result = robust_test(ecdf_of(sample), ecdf_of(sample), 0.0, 0.05, 4)
    assert result.accept
    assert result.statistic == 0.0
    assert not result.degenerate_reference


def test_robust_test_rejects_disjoint_supports():
    cand = ecdf_of(np.arange(10.0, 20.0))
    ref = ecdf_of(np.arange(0.0, 1.0, 0.1))
    result = robust_test(cand, ref, 0.0, 0.01, 10)
    assert result.statistic == 1.0
    assert not result.accept


def test_robust_test_worked_case_threshold():
    cand = ecdf_of([1, 2, 3, 100])
    ref = ecdf_of([1, 2, 3, 4])
    result = robust_test(cand, ref, 0.25, 0.01, 4)
    want_threshold = two_sample_threshold(4, 0.01) + 0.25
    assert abs(result.statistic - 0.125) <= 1e-12
    assert abs(result.threshold - want_threshold) <= 1e-15
    # N=4 keeps C=e: sqrt(ln(e/0.01)/4) + 1/4, a vacuous threshold
    assert abs(want_threshold - (np.sqrt((1 + np.log(100)) / 4) + 0.25)) <= 1e-15
    assert result.accept


def test_robust_test_sample_count_guard():
    with pytest.raises(ValueError):
        robust_test(ecdf_of([1, 2]), ecdf_of([1, 2]), 0.0, 0.05, 3)


def test_robust_test_degenerate_reference_flagged():
    result = robust_test(ecdf_of([7.0, 7.5]), ecdf_of([7.0, 7.0]), 0.0, 0.05, 2)
    assert result.degenerate_reference


def test_trimming_membership():
    assert trimming_membership(np.ones(5), 0.0, 5)
    assert trimming_membership(np.ones(5), 0.9, 5)
    # full removal of one point at alpha >= 1/n
    w = np.array([0.0, 1.25, 1.25, 1.25, 1.25])
    assert trimming_membership(w, 0.25, 5)
    assert not trimming_membership(np.array([0.0, 1.3, 1.25, 1.25, 1.25]), 0.25, 5)
    assert not trimming_membership(np.array([1.2, 1.0, 0.8, 1.0, 1.0]), 0.1, 5)


def test_optimal_weights_membership_and_duality():
    rng = np.random.default_rng(31)
    for _ in range(50):
        values = rng.integers(0, 10, size=int(rng.integers(2, 9))) / 2.0
        cand = ecdf_of(values)
        ref = interpolate(ecdf_of(lattice_sample(rng)))
        for alpha in (0.1, 0.25, 0.5):
            support, masses = optimal_weights(cand, ref, alpha)
            assert np.array_equal(support, cand.support)
            assert abs(masses.sum() - 1.0) <= 1e-9
            # per-point factors form an impartial trimming
            counts = np.rint(cand.jumps * cand.n_samples).astype(int)
            factors = np.repeat(masses / counts * cand.n_samples, counts)
            assert trimming_membership(factors, alpha, cand.n_samples)
            # duality: the original eCDF is an alpha-mixture around the
            # trimmed optimum, so the residual is itself a distribution
            orig = cand.jumps
            residual = orig - (1 - alpha) * masses
            assert np.all(residual >= -1e-9)
            assert abs(residual.sum() - alpha) <= 1e-9


def test_envelope_csv_dump(tmp_path):
    env = build_envelope(ecdf_of([1, 2, 3, 100]), interpolate(ecdf_of([1, 2, 3, 4])), 0.25)
    path = env.to_csv(tmp_path / "envelope.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "u,gamma,b,upper,lower,h_alpha"
    assert len(lines) == env.grid.size + 1
