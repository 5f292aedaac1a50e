"""Empirical CDF algebra.

Right-continuous step eCDFs, the pooled (equally weighted) reference
function, linear interpolation, and exact sup-norm distances.  All types
are immutable and all operations pure.

The reference function is stored as one weighted pooled eCDF, mass
1/(M*N) per value, rather than M separate curves: at every real t the
pooled eCDF equals the arithmetic mean of the member eCDFs, and pooling
costs one O(MN log MN) sort.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Ecdf",
    "InterpolatedCdf",
    "ecdf_of",
    "ecdf_from_values",
    "reference_of",
    "interpolate",
    "sup_distance",
]

_RENORM_TOL = 1e-12


@dataclass(frozen=True)
class Ecdf:
    """Right-continuous step CDF: value on [support[i], support[i+1]) is cum[i].

    ``support`` is strictly increasing, ``cum`` nondecreasing with final
    value exactly 1 (renormalized when within 1e-12).  ``n_samples`` is the
    number of pooled sample values the function was built from.
    """

    support: np.ndarray
    cum: np.ndarray
    n_samples: int

    def __post_init__(self):
        support = np.ascontiguousarray(np.asarray(self.support, dtype=np.float64))
        cum = np.ascontiguousarray(np.asarray(self.cum, dtype=np.float64))
        if support.ndim != 1 or support.size == 0 or support.shape != cum.shape:
            raise ValueError("support and cum must be matching nonempty 1-D arrays")
        if not np.all(np.diff(support) > 0):
            raise ValueError("support must be strictly increasing")
        if np.any(np.diff(cum) < 0) or cum[0] <= 0:
            raise ValueError("cum must be nondecreasing with positive first mass")
        if abs(cum[-1] - 1.0) > _RENORM_TOL:
            raise ValueError(f"cum must end at 1 (got {cum[-1]!r})")
        if cum[-1] != 1.0:
            cum = cum / cum[-1]
        cum[-1] = 1.0
        support.setflags(write=False)
        cum.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "cum", cum)

    def evaluate(self, t) -> np.ndarray:
        """F(t), right-continuous."""
        idx = np.searchsorted(self.support, t, side="right")
        return np.concatenate(([0.0], self.cum))[idx]

    def evaluate_left(self, t) -> np.ndarray:
        """F(t-), the left limit."""
        idx = np.searchsorted(self.support, t, side="left")
        return np.concatenate(([0.0], self.cum))[idx]

    @property
    def jumps(self) -> np.ndarray:
        return np.diff(np.concatenate(([0.0], self.cum)))

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,value\n")
            for t, v in zip(self.support, self.cum):
                fh.write(f"{float(t)!r},{float(v)!r}\n")
        return path


@dataclass(frozen=True)
class InterpolatedCdf:
    """Continuous piecewise-linear CDF through (knots, values).

    Evaluation interpolates linearly between knots and is constant outside
    them.  Degenerate single-knot case: a step, 0 below the knot and 1 at
    or above it.
    """

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        knots = np.ascontiguousarray(np.asarray(self.knots, dtype=np.float64))
        values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if knots.ndim != 1 or knots.size == 0 or knots.shape != values.shape:
            raise ValueError("knots and values must be matching nonempty 1-D arrays")
        if not np.all(np.diff(knots) > 0):
            raise ValueError("knots must be strictly increasing")
        if np.any(np.diff(values) < 0) or values[0] < 0 or values[-1] != 1.0:
            raise ValueError("values must be nondecreasing in [0, 1] ending at 1")
        knots.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    @property
    def degenerate(self) -> bool:
        return self.knots.size == 1

    def evaluate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if self.degenerate:
            return np.where(t >= self.knots[0], 1.0, 0.0)
        return np.interp(t, self.knots, self.values)

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,value\n")
            for t, v in zip(self.knots, self.values):
                fh.write(f"{float(t)!r},{float(v)!r}\n")
        return path


def ecdf_from_values(values) -> Ecdf:
    """Equal-weight eCDF of a raw value array; ties merge into one breakpoint."""
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(values)):
        raise ValueError("sample contains non-finite values")
    support, counts = np.unique(values, return_counts=True)
    cum = np.cumsum(counts) / values.size
    return Ecdf(support, cum, n_samples=int(values.size))


def ecdf_of(sample) -> Ecdf:
    """eCDF of a ScoreVector (or any 1-D value array)."""
    return ecdf_from_values(getattr(sample, "gaps", sample))


def reference_of(pool, member_ids, indices=None) -> Ecdf:
    """Equally weighted average of member eCDFs over the given test indices.

    Implemented as the pooled eCDF of all M*N member values, each with
    mass 1/(M*N); equals the mean of the member eCDFs at every t.
    ``indices`` may repeat (bootstrap resampling); None means the full
    test set.
    """
    member_ids = list(member_ids)
    if not member_ids:
        raise ValueError("reference needs at least one member")
    matrix = pool.gap_matrix(member_ids)
    if indices is not None:
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size == 0:
            raise ValueError("empty index set")
        matrix = matrix[:, indices]
    return ecdf_from_values(matrix.ravel())


def interpolate(ref: Ecdf) -> InterpolatedCdf:
    """Piecewise-linear CDF through the step corners of ``ref``.

    The sup distance to ``ref`` is bounded by its largest single jump
    (at most 1/N for an eCDF of N distinct values), which is what the
    robust test's threshold adjustment accounts for.
    """
    return InterpolatedCdf(ref.support, ref.cum)


def sup_distance(a: Ecdf, b: Ecdf) -> float:
    """Exact sup over the reals of |a - b| for two step CDFs.

    Both functions are evaluated, together with their left limits, at the
    union of breakpoints; step functions attain their sup there.
    """
    grid = np.union1d(a.support, b.support)
    d_right = np.abs(a.evaluate(grid) - b.evaluate(grid))
    d_left = np.abs(a.evaluate_left(grid) - b.evaluate_left(grid))
    return float(max(d_right.max(), d_left.max()))
