"""Bootstrap estimation of the minimal accepting trimming level.

For each bootstrap replicate, two independent with-replacement index
samples of size N are drawn from the test set; the reference eCDF is
rebuilt from the pool members on the first, the candidate eCDF on the
second, and the trimming grid is searched for the smallest level at which
the robust test accepts.  The estimate alpha_hat is the mean of the
per-replicate levels.  Replicates that never accept saturate at the top
of the grid and are counted separately, never silently averaged in.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bounds import two_sample_threshold
from .ecdf import ecdf_from_values, interpolate
from .parallel import map_indexed
from .pool import ModelPool, PoolError
from .rng import stream
from .trimming import _pair_curve, _statistic_from_pairs

__all__ = ["AlphaConfig", "AlphaEstimate", "estimate_alpha", "pairwise_alpha"]


def default_alpha_grid() -> np.ndarray:
    """51 evenly spaced levels from 0 to 0.25."""
    return np.linspace(0.0, 0.25, 51)


@dataclass(frozen=True)
class AlphaConfig:
    """Estimator settings: trimming grid, bootstrap count, test parameters."""

    alpha_grid: np.ndarray = field(default_factory=default_alpha_grid)
    n_bootstrap: int = 100
    epsilon_a: float = 0.01
    rng_seed: int = 0
    resample_size: int | None = None  # None: n_test // 2

    def __post_init__(self):
        grid = np.asarray(self.alpha_grid, dtype=np.float64)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("alpha_grid must be a nonempty 1-D array")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("alpha_grid must be strictly increasing")
        if grid[0] < 0 or grid[-1] >= 1:
            raise ValueError("alpha_grid must lie in [0, 1)")
        if self.n_bootstrap < 1:
            raise ValueError(f"n_bootstrap must be >= 1, got {self.n_bootstrap}")
        if not 0.0 < self.epsilon_a < 1.0:
            raise ValueError(f"epsilon_a must be in (0, 1), got {self.epsilon_a}")
        if self.resample_size is not None and self.resample_size < 1:
            raise ValueError(f"resample_size must be >= 1, got {self.resample_size}")
        grid.setflags(write=False)
        object.__setattr__(self, "alpha_grid", grid)


@dataclass(frozen=True)
class AlphaEstimate:
    """Estimator output: mean level, per-replicate detail, saturation count."""

    candidate: str
    alpha_hat: float
    per_replicate: tuple[tuple[float, bool], ...]
    saturated_count: int
    grid: np.ndarray
    n_bootstrap: int
    resample_size: int
    epsilon_a: float
    threshold: float
    rng_seed: int

    def to_payload(self) -> dict:
        """JSON-ready report."""
        return {
            "candidate": self.candidate,
            "alpha_hat": self.alpha_hat,
            "B": self.n_bootstrap,
            "grid": [float(a) for a in self.grid],
            "saturated": self.saturated_count,
            "per_replicate": [
                {"alpha": a, "accepted": ok} for a, ok in self.per_replicate
            ],
            "resample_size": self.resample_size,
            "epsilon_a": self.epsilon_a,
            "threshold": self.threshold,
            "seed": self.rng_seed,
        }


def _statistic(u, v, alpha) -> float:
    return _statistic_from_pairs(u, v, alpha)


def _smallest_accepting(u, v, grid, threshold) -> tuple[int, bool]:
    """Index of the smallest accepting grid level, or (last, False) if none.

    The statistic is nonincreasing in alpha, so acceptance is monotone up
    the grid and binary search returns the same level a linear sweep would.
    """
    if _statistic(u, v, grid[0]) <= threshold:
        return 0, True
    if len(grid) == 1 or _statistic(u, v, grid[-1]) > threshold:
        return len(grid) - 1, False
    lo, hi = 1, len(grid) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _statistic(u, v, grid[mid]) <= threshold:
            hi = mid
        else:
            lo = mid + 1
    return lo, True


def _replicate(reference_matrix, candidate_gaps, cfg: AlphaConfig, b: int, n_resample: int):
    n_test = candidate_gaps.size
    rng = stream(cfg.rng_seed, "alpha", b)
    idx_ref = rng.integers(0, n_test, size=n_resample)
    idx_cand = rng.integers(0, n_test, size=n_resample)
    reference = ecdf_from_values(reference_matrix[:, idx_ref].ravel())
    candidate = ecdf_from_values(candidate_gaps[idx_cand])
    _, u, v = _pair_curve(candidate, interpolate(reference))
    threshold = two_sample_threshold(n_resample, cfg.epsilon_a) + 1.0 / n_resample
    idx, accepted = _smallest_accepting(u, v, cfg.alpha_grid, threshold)
    return float(cfg.alpha_grid[idx]), accepted


def estimate_alpha_from_arrays(
    reference_matrix: np.ndarray, candidate_gaps: np.ndarray, cfg: AlphaConfig, candidate_id: str
) -> AlphaEstimate:
    """Estimator core over raw gap arrays (rows of ``reference_matrix`` are members)."""
    reference_matrix = np.asarray(reference_matrix, dtype=np.float64)
    candidate_gaps = np.asarray(candidate_gaps, dtype=np.float64)
    if reference_matrix.ndim != 2 or reference_matrix.shape[1] != candidate_gaps.size:
        raise ValueError("reference matrix and candidate gaps must share the test axis")
    n_resample = cfg.resample_size or max(candidate_gaps.size // 2, 1)
    results = map_indexed(
        lambda b: _replicate(reference_matrix, candidate_gaps, cfg, b, n_resample),
        range(cfg.n_bootstrap),
    )
    levels = np.array([a for a, _ in results])
    saturated = sum(1 for _, ok in results if not ok)
    return AlphaEstimate(
        candidate=candidate_id,
        alpha_hat=float(levels.mean()),
        per_replicate=tuple(results),
        saturated_count=saturated,
        grid=cfg.alpha_grid,
        n_bootstrap=cfg.n_bootstrap,
        resample_size=n_resample,
        epsilon_a=cfg.epsilon_a,
        threshold=two_sample_threshold(n_resample, cfg.epsilon_a) + 1.0 / n_resample,
        rng_seed=cfg.rng_seed,
    )


def estimate_alpha(
    pool: ModelPool,
    reference_ids,
    candidate_id: str,
    cfg: AlphaConfig,
    *,
    allow_candidate_in_reference: bool = False,
) -> AlphaEstimate:
    """Bootstrap estimate of the smallest trimming level accepting the candidate."""
    reference_ids = list(reference_ids)
    if not reference_ids:
        raise PoolError("reference needs at least one member")
    if candidate_id in reference_ids:
        if not allow_candidate_in_reference:
            raise PoolError(
                f"candidate {candidate_id!r} is in the reference pool; "
                "pass allow_candidate_in_reference=True to override"
            )
        warnings.warn(
            f"candidate {candidate_id!r} is also a reference member", stacklevel=2
        )
    reference_matrix = pool.gap_matrix(reference_ids)
    candidate_gaps = pool.model(candidate_id).gaps
    return estimate_alpha_from_arrays(reference_matrix, candidate_gaps, cfg, candidate_id)


def pairwise_alpha(pool: ModelPool, ids, cfg: AlphaConfig, mode: str = "pairwise") -> np.ndarray:
    """Matrix of alpha_hat estimates over ordered (reference, candidate) pairs.

    mode="pairwise": entry (i, j) tests candidate ids[j] against the
    single-model reference {ids[i]}; the diagonal is the self-test.
    mode="vs-pool": entry (i, j) tests ids[j] against the pool of all other
    ids (constant down each column).
    """
    ids = list(ids)
    if len(ids) < 2:
        raise PoolError("pairwise_alpha needs at least two ids")
    if mode not in ("pairwise", "vs-pool"):
        raise ValueError(f"unknown mode {mode!r}")
    n = len(ids)

    if mode == "vs-pool":
        def pool_cell(j):
            refs = [m for m in ids if m != ids[j]]
            return estimate_alpha(pool, refs, ids[j], cfg).alpha_hat

        column = map_indexed(pool_cell, range(n))
        return np.tile(np.asarray(column, dtype=np.float64), (n, 1))

    def cell(pair):
        i, j = pair
        with warnings.catch_warnings():
            if i == j:  # the diagonal self-test overlaps by construction
                warnings.simplefilter("ignore")
            est = estimate_alpha(
                pool, [ids[i]], ids[j], cfg, allow_candidate_in_reference=(i == j)
            )
        return est.alpha_hat

    values = map_indexed(cell, [(i, j) for i in range(n) for j in range(n)])
    return np.asarray(values, dtype=np.float64).reshape(n, n)
