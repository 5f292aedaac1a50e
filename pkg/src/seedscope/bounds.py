"""Closed-form DKW threshold and probability-bound calculators.

One-sample and two-sample finite-sample bounds, the union bound over a
pool of models, the resulting coverage corollary, and the L1 discrepancy
bound that ties the trimming level to a contamination radius.  No
asymptotics anywhere: every bound holds at finite N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DkwConfig",
    "two_sample_constant",
    "two_sample_threshold",
    "one_sample_threshold",
    "theorem1_epsilon",
    "corollary_bound",
    "L1BoundInputs",
    "l1_bound",
]

# Smallest N at which the sharper two-sample constant 2 applies; below it
# the safe constant is e.
_C2_MIN_N = 458


def two_sample_constant(n_samples: int) -> float:
    """Two-sample DKW constant: 2 for N >= 458, e otherwise."""
    if n_samples < 1:
        raise ValueError(f"N must be >= 1, got {n_samples}")
    return 2.0 if n_samples >= _C2_MIN_N else math.e


@dataclass(frozen=True)
class DkwConfig:
    """Bound inputs: sample size N, pool size M, failure probability epsilon.

    The two-sample constant C is selected from N (2 only when N >= 458).
    """

    n_samples: int
    n_models: int = 1
    epsilon: float = 0.05

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.n_models < 1:
            raise ValueError(f"n_models must be >= 1, got {self.n_models}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")

    @property
    def constant(self) -> float:
        return two_sample_constant(self.n_samples)


def two_sample_threshold(n_samples: int, epsilon_a: float) -> float:
    """Two-sample test threshold: sqrt(ln(C/eps_a)/N), C per the N >= 458 rule."""
    if n_samples < 1:
        raise ValueError(f"N must be >= 1, got {n_samples}")
    if not 0.0 < epsilon_a < 1.0:
        raise ValueError(f"epsilon_a must be in (0, 1), got {epsilon_a}")
    c = two_sample_constant(n_samples)
    return math.sqrt(math.log(c / epsilon_a) / n_samples)


def one_sample_threshold(n_samples: int, epsilon: float) -> float:
    """One-sample DKW band half-width: sqrt(ln(2/eps)/(2N))."""
    if n_samples < 1:
        raise ValueError(f"N must be >= 1, got {n_samples}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    return math.sqrt(math.log(2.0 / epsilon) / (2.0 * n_samples))


def theorem1_epsilon(n_models: int, n_samples: int, delta_b: float, *, clamp: bool = True) -> float:
    """Union-bound failure probability 2*M*exp(-2*N*delta_b^2).

    Bounds the chance that the pooled reference strays more than delta_b
    in sup norm from the average of the models' population CDFs.  Clamped
    to <= 1 for reporting unless ``clamp=False``.
    """
    if n_models < 1 or n_samples < 1:
        raise ValueError("M and N must be >= 1")
    if not delta_b > 0:
        raise ValueError(f"delta_b must be positive, got {delta_b}")
    raw = 2.0 * n_models * math.exp(-2.0 * n_samples * delta_b * delta_b)
    return min(raw, 1.0) if clamp else raw


def corollary_bound(
    n_models: int, n_samples: int, delta_a: float, delta_b: float, *, floor: bool = True
) -> float:
    """Coverage lower bound 1 - 2M exp(-2N db^2) - 2 exp(-N da^2), for N >= 458.

    Floored at 0 for reporting unless ``floor=False``.
    """
    if n_samples < _C2_MIN_N:
        raise ValueError(f"the corollary is stated for N >= {_C2_MIN_N}, got {n_samples}")
    if n_models < 1:
        raise ValueError(f"M must be >= 1, got {n_models}")
    if not (delta_a > 0 and delta_b > 0):
        raise ValueError("delta_a and delta_b must be positive")
    raw = (
        1.0
        - 2.0 * n_models * math.exp(-2.0 * n_samples * delta_b * delta_b)
        - 2.0 * math.exp(-n_samples * delta_a * delta_a)
    )
    return max(raw, 0.0) if floor else raw


@dataclass(frozen=True)
class L1BoundInputs:
    """Inputs to the L1 discrepancy bound.

    alpha: trimming level in [0, 1); gamma: test threshold; delta_b,
    delta_c: DKW radii for the reference and candidate sides;
    support_len: length |S| of the (clipped) gap support.
    """

    alpha: float
    gamma: float
    delta_b: float
    delta_c: float
    support_len: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha}")
        for name in ("gamma", "delta_b", "delta_c"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not self.support_len > 0:
            raise ValueError(f"support_len must be positive, got {self.support_len}")


def l1_bound(
    inputs: L1BoundInputs, n_samples: int, n_models: int, *, clamp: bool = True
) -> tuple[float, float]:
    """L1 discrepancy bound and its failure probability.

    Returns (nu, eps): when the trimmed test accepts at level alpha with
    threshold gamma, the candidate's population CDF is within L1 distance
    nu = alpha + |S|*(gamma + delta_b + delta_c) of the pool average, with
    probability at least 1 - eps, eps = 2 exp(-2N dc^2) + 2M exp(-2N db^2).
    """
    if n_samples < 1 or n_models < 1:
        raise ValueError("N and M must be >= 1")
    nu = inputs.alpha + inputs.support_len * (inputs.gamma + inputs.delta_b + inputs.delta_c)
    eps = 2.0 * math.exp(-2.0 * n_samples * inputs.delta_c**2) + 2.0 * n_models * math.exp(
        -2.0 * n_samples * inputs.delta_b**2
    )
    if clamp:
        eps = min(eps, 1.0)
    return nu, eps
