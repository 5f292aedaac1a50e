"""Robust trimmed Kolmogorov-Smirnov testing.

The candidate eCDF may be reweighted by any impartial alpha-trimming:
each sample point's mass scaled by a factor in [0, 1/(1-alpha)] while the
total stays 1.  The trimmed KS statistic is the smallest sup-norm distance
from the (interpolated) reference achievable by such a reweighting,
evaluated at the pooled breakpoints of the two curves.

Computation runs through a monotone-envelope construction on the grid of
candidate cumulative levels u with matching reference levels Gamma(u)
(the reference composed with the candidate's generalized inverse,
``inf {t : F(t) >= u}``).  Writing r = 1/(1-alpha):

    B(u) = Gamma(u) - r*u
    U(u) = suffix max of B,  L(u) = prefix min of B
    h~(u) = clip((U+L)/2, -alpha*r, 0)
    h(u)  = h~(u) + r*u

h is nondecreasing from 0 to 1 with increments at most r*du, i.e. the
cumulative of a feasible trimming, and ||h - Gamma|| = ||h~ - B|| attains
the minimum over all feasible trimmings.  Equality with an independent
LP oracle is part of the acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate

import numpy as np

from .bounds import two_sample_threshold
from .ecdf import Ecdf, InterpolatedCdf, interpolate

__all__ = [
    "TrimmingEnvelope",
    "RobustTestResult",
    "build_envelope",
    "trimmed_ks",
    "robust_test",
    "trimming_membership",
    "optimal_weights",
]

_MEMBERSHIP_TOL = 1e-12


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    return alpha


def _pair_curve(candidate: Ecdf, reference: InterpolatedCdf):
    """(abscissa, u, v) triples over the pooled breakpoints.

    u is the candidate level, v the reference level, both right-continuous
    at each pooled point; (0,0) and (1,1) boundary pairs anchor the ends.
    """
    z = np.union1d(candidate.support, reference.knots)
    u = candidate.evaluate(z)
    v = reference.evaluate(z)
    abscissa = np.concatenate(([-np.inf], z, [np.inf]))
    u = np.concatenate(([0.0], u, [1.0]))
    v = np.concatenate(([0.0], v, [1.0]))
    return abscissa, u, v


def _envelope_arrays(u: np.ndarray, v: np.ndarray, alpha: float):
    r = 1.0 / (1.0 - alpha)
    b = v - r * u
    upper = np.flip(np.maximum.accumulate(np.flip(b)))
    lower = np.minimum.accumulate(b)
    h_tilde = np.clip(0.5 * (upper + lower), -alpha * r, 0.0)
    return b, upper, lower, h_tilde


# The statistic is exactly nonincreasing in alpha, and callers (the alpha
# estimator's early exit, the monotonicity properties) rely on that holding
# for the computed doubles too.  Double evaluation wobbles by a few ulps
# where the true value is flat in alpha, so small curves are evaluated in
# exact rational arithmetic (every input is a dyadic rational) and rounded
# once; large curves take the vectorized double path, whose ulp-level noise
# is irrelevant against O(1e-2) thresholds.
_EXACT_EVAL_MAX_POINTS = 256


def _statistic_exact(u: np.ndarray, v: np.ndarray, alpha: float) -> float:
    r = 1 / (1 - Fraction(alpha))
    b = [Fraction(vj) - r * Fraction(uj) for uj, vj in zip(u.tolist(), v.tolist())]
    upper = list(accumulate(reversed(b), max))[::-1]
    lower = list(accumulate(b, min))
    zero, floor = Fraction(0), 1 - r
    best = Fraction(0)
    for uj, lj, bj in zip(upper, lower, b):
        h = max(min((uj + lj) / 2, zero), floor)
        best = max(best, abs(h - bj))
    return float(best)


def _statistic_from_pairs(u: np.ndarray, v: np.ndarray, alpha: float) -> float:
    if u.size <= _EXACT_EVAL_MAX_POINTS:
        return _statistic_exact(u, v, alpha)
    b, _, _, h_tilde = _envelope_arrays(u, v, alpha)
    return float(np.abs(h_tilde - b).max())


@dataclass(frozen=True)
class TrimmingEnvelope:
    """Envelope functions on the candidate-level grid.

    grid: candidate cumulative levels u at the pooled breakpoints (0 and 1
    appended); gamma_vals: matching reference levels; B_vals, U_vals,
    L_vals, h_tilde, h_alpha: the construction above; abscissa: the pooled
    breakpoint behind each grid entry (+-inf for the boundary pairs).
    """

    grid: np.ndarray
    gamma_vals: np.ndarray
    B_vals: np.ndarray
    U_vals: np.ndarray
    L_vals: np.ndarray
    h_tilde: np.ndarray
    h_alpha: np.ndarray
    alpha: float
    abscissa: np.ndarray

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.h_tilde - self.B_vals)

    @property
    def statistic(self) -> float:
        return float(self.errors.max())

    @property
    def witness(self) -> float:
        """Grid level attaining the maximum."""
        return float(self.grid[int(np.argmax(self.errors))])

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("u,gamma,b,upper,lower,h_alpha\n")
            for row in zip(
                self.grid, self.gamma_vals, self.B_vals, self.U_vals, self.L_vals, self.h_alpha
            ):
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
        return path


def build_envelope(candidate: Ecdf, reference: InterpolatedCdf, alpha: float) -> TrimmingEnvelope:
    """Envelope construction for the trimmed KS statistic."""
    alpha = _check_alpha(alpha)
    abscissa, u, v = _pair_curve(candidate, reference)
    b, upper, lower, h_tilde = _envelope_arrays(u, v, alpha)
    r = 1.0 / (1.0 - alpha)
    return TrimmingEnvelope(
        grid=u,
        gamma_vals=v,
        B_vals=b,
        U_vals=upper,
        L_vals=lower,
        h_tilde=h_tilde,
        h_alpha=h_tilde + r * u,
        alpha=alpha,
        abscissa=abscissa,
    )


def trimmed_ks(candidate: Ecdf, reference: InterpolatedCdf, alpha: float) -> float:
    """Minimal sup-norm distance from the reference over alpha-trimmings.

    At alpha=0 the feasible set collapses to the candidate itself and the
    value equals the classical pooled-grid KS statistic.
    """
    alpha = _check_alpha(alpha)
    _, u, v = _pair_curve(candidate, reference)
    return _statistic_from_pairs(u, v, alpha)


@dataclass(frozen=True)
class RobustTestResult:
    """Outcome of the robust two-sample test at one trimming level."""

    statistic: float
    threshold: float
    accept: bool
    alpha: float
    witness: float
    n_samples: int
    epsilon_a: float
    degenerate_reference: bool = False


def robust_test(
    candidate: Ecdf, reference: Ecdf, alpha: float, epsilon_a: float, n_samples: int
) -> RobustTestResult:
    """Accept/reject for the trimmed two-sample comparison.

    The reference eCDF is linearly interpolated; the threshold is the
    two-sample DKW value plus 1/N, the 1/N absorbing the interpolation
    error of a reference built from N-point samples.  ``n_samples`` must
    match the candidate's sample count.
    """
    alpha = _check_alpha(alpha)
    if n_samples != candidate.n_samples:
        raise ValueError(
            f"n_samples {n_samples} does not match candidate sample count {candidate.n_samples}"
        )
    interp = interpolate(reference)
    envelope = build_envelope(candidate, interp, alpha)
    statistic = _statistic_from_pairs(envelope.grid, envelope.gamma_vals, alpha)
    threshold = two_sample_threshold(n_samples, epsilon_a) + 1.0 / n_samples
    return RobustTestResult(
        statistic=statistic,
        threshold=threshold,
        accept=bool(statistic <= threshold),
        alpha=alpha,
        witness=envelope.witness,
        n_samples=n_samples,
        epsilon_a=epsilon_a,
        degenerate_reference=interp.degenerate,
    )


def trimming_membership(weights, alpha: float, n: int) -> bool:
    """True iff per-point factors form an impartial alpha-trimming.

    Requires 0 <= w_i <= 1/(1-alpha) and (1/n) sum w_i = 1, within 1e-12.
    """
    alpha = _check_alpha(alpha)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    w = np.asarray(weights, dtype=np.float64)
    if w.size != n:
        return False
    cap = 1.0 / (1.0 - alpha)
    if np.any(w < -_MEMBERSHIP_TOL) or np.any(w > cap + _MEMBERSHIP_TOL):
        return False
    return bool(abs(w.sum() / n - 1.0) <= _MEMBERSHIP_TOL)


def optimal_weights(candidate: Ecdf, reference: InterpolatedCdf, alpha: float):
    """Per-breakpoint trimmed masses of the optimal reweighting.

    Returns (support, masses): the candidate's breakpoints and the mass the
    optimal trimming places on each (differences of h_alpha across the
    candidate's cumulative levels).  Per-point factors for
    ``trimming_membership`` follow as n * mass / multiplicity.
    """
    envelope = build_envelope(candidate, reference, alpha)
    # Last grid entry at each candidate level; h_alpha is constant within a
    # level, so any representative works.
    levels = np.concatenate(([0.0], candidate.cum))
    idx = np.searchsorted(envelope.grid, levels, side="left")
    h_at = envelope.h_alpha[idx]
    return candidate.support, np.diff(h_at)
