"""Synthetic model pools and the ensemble-size sweep harness.

The generators stand in for seed-to-seed training variability.  In the
gaussian-mixture family each test point j carries a latent difficulty
scale s_j (lognormal, shared by all models: easy points have large
confident gaps, hard points small ones), and model k draws

    gap_jk ~ Normal(s_j * y_j * mu_k, sigma_k)

with mu_k and sigma_k jittered per model.  The shared s_j * y_j * mu term
is what makes logit averaging work the way it does for real pools: the
across-point spread survives ensembling while the per-model noise and the
per-model mean offset shrink, so ensemble eCDFs approach the pooled
reference as the member count grows.  With all jitters and the noise
scale at zero every model is identical.

The logistic-teacher family draws a teacher logit t_j, labels from the
teacher's posterior, and per-model gaps as noisy rescalings of t_j.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .alpha import AlphaConfig, estimate_alpha_from_arrays
from .bounds import two_sample_threshold
from .ecdf import ecdf_from_values, sup_distance
from .metrics import accuracy, churn, ece
from .pool import ModelPool, PoolError, ScoreVector, SplitPlan
from .rng import stream

__all__ = [
    "SynthSpec",
    "SweepRow",
    "SweepResult",
    "generate_pool",
    "ensemble_sweep",
    "table1_summary",
    "paper_cnn_analogue",
    "FAMILIES",
]

FAMILIES = ("gaussian-mixture-per-seed", "logistic-teacher")


@dataclass(frozen=True)
class SynthSpec:
    """Generator settings for a synthetic pool.

    mean_gap: base class-conditional mean (teacher logit scale for the
    logistic-teacher family); mean_jitter / bias_jitter / scale_jitter:
    per-model spread of the class mean, of an additive offset, and of the
    noise scale; noise_scale: per-model sampling noise; point_spread:
    lognormal sigma of the per-point difficulty scale.
    """

    n_models: int
    n_test: int
    family: str = "gaussian-mixture-per-seed"
    mean_gap: float = 1.2
    mean_jitter: float = 0.12
    bias_jitter: float = 0.2
    noise_scale: float = 0.15
    scale_jitter: float = 0.05
    point_spread: float = 0.6
    label_rule: str = "balanced"
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_models < 1 or self.n_test < 1:
            raise ValueError("n_models and n_test must be positive")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r} (expected one of {FAMILIES})")
        for name in ("mean_jitter", "bias_jitter", "noise_scale", "scale_jitter", "point_spread"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.label_rule not in ("balanced", "iid"):
            raise ValueError(f"unknown label_rule {self.label_rule!r}")


def paper_cnn_analogue(rng_seed: int = 0) -> SynthSpec:
    """Desk-scale pool preset: 200 models x 4000 test points."""
    return SynthSpec(n_models=200, n_test=4000, rng_seed=rng_seed)


def _labels(spec: SynthSpec) -> np.ndarray:
    rng = stream(spec.rng_seed, "labels")
    if spec.label_rule == "balanced":
        labels = np.ones(spec.n_test, dtype=np.int64)
        labels[spec.n_test // 2 :] = -1
        return labels[rng.permutation(spec.n_test)]
    return rng.choice(np.array([-1, 1]), size=spec.n_test)


def generate_pool(spec: SynthSpec) -> ModelPool:
    """Deterministic synthetic pool; model k depends only on (seed, k)."""
    if spec.family == "gaussian-mixture-per-seed":
        labels = _labels(spec)
        points = stream(spec.rng_seed, "points")
        scales = np.exp(spec.point_spread * points.standard_normal(spec.n_test))
        base = scales * labels * 1.0
        models = []
        for k in range(spec.n_models):
            rng = stream(spec.rng_seed, "model", k)
            mu_k = spec.mean_gap + spec.mean_jitter * rng.standard_normal()
            bias_k = spec.bias_jitter * rng.standard_normal()
            sigma_k = spec.noise_scale * np.exp(spec.scale_jitter * rng.standard_normal())
            gaps = base * mu_k + bias_k + sigma_k * rng.standard_normal(spec.n_test)
            models.append(ScoreVector(f"m{k:04d}", gaps))
    else:  # logistic-teacher
        points = stream(spec.rng_seed, "points")
        teacher = spec.mean_gap * points.standard_normal(spec.n_test)
        label_rng = stream(spec.rng_seed, "labels")
        p_pos = 1.0 / (1.0 + np.exp(-teacher))
        labels = np.where(label_rng.random(spec.n_test) < p_pos, 1, -1).astype(np.int64)
        models = []
        for k in range(spec.n_models):
            rng = stream(spec.rng_seed, "model", k)
            gain_k = 1.0 + spec.mean_jitter * rng.standard_normal()
            bias_k = spec.bias_jitter * rng.standard_normal()
            sigma_k = spec.noise_scale * np.exp(spec.scale_jitter * rng.standard_normal())
            gaps = gain_k * teacher + bias_k + sigma_k * rng.standard_normal(spec.n_test)
            models.append(ScoreVector(f"m{k:04d}", gaps))
    provenance = {"generator": "seedscope.synth", **asdict(spec)}
    return ModelPool(tuple(models), labels, provenance=provenance)


@dataclass(frozen=True)
class SweepRow:
    """One (ensemble size, repetition) cell of the sweep."""

    size: int
    rep: int
    sup_distance: float
    alpha_hat: float
    saturated: int
    accuracy: float
    churn_vs_full: int
    ece: float


@dataclass(frozen=True)
class SweepResult:
    sizes: tuple[int, ...]
    repetitions: int
    rows: tuple[SweepRow, ...]
    delta_a: float
    resample_size: int
    n_bootstrap: int
    member_replacement: bool
    split_mode: str

    def by_size(self, metric: str) -> dict[int, np.ndarray]:
        out: dict[int, list[float]] = {s: [] for s in self.sizes}
        for row in self.rows:
            out[row.size].append(getattr(row, metric))
        return {s: np.asarray(v, dtype=np.float64) for s, v in out.items()}

    def tidy_rows(self):
        """(size, rep, metric, value) rows for plotting."""
        metrics = ("sup_distance", "alpha_hat", "saturated", "accuracy", "churn_vs_full", "ece")
        for row in self.rows:
            for metric in metrics:
                yield row.size, row.rep, metric, getattr(row, metric)


def ensemble_sweep(
    pool: ModelPool,
    sizes,
    repetitions: int,
    cfg: AlphaConfig,
    split: SplitPlan | None = None,
    *,
    member_replacement: bool = False,
) -> SweepResult:
    """Ensemble-size sweep against a first-half reference.

    The reference pools the first half of the models; for every size and
    repetition an ensemble is sampled from the second half (without
    replacement within one ensemble unless ``member_replacement``), and its
    sup distance to the reference, alpha_hat, and companion metrics are
    recorded.  ``split`` restricts the sup-distance comparison to the
    plan's index sets; the alpha estimator always bootstraps per its own
    algorithm.
    """
    sizes = [int(s) for s in sizes]
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    ids = pool.model_ids
    half = len(ids) // 2
    if half < 1:
        raise PoolError("sweep needs at least two models")
    ref_ids, cand_ids = ids[:half], ids[half:]
    if max(sizes) > len(cand_ids) and not member_replacement:
        raise PoolError(
            f"largest size {max(sizes)} exceeds candidate half ({len(cand_ids)} models)"
        )
    ref_matrix = pool.gap_matrix(ref_ids)
    cand_matrix = pool.gap_matrix(cand_ids)
    ref_idx = slice(None) if split is None else split.reference_indices
    ens_idx = slice(None) if split is None else split.candidate_indices
    ref_ecdf = ecdf_from_values(ref_matrix[:, ref_idx].ravel())
    full_ensemble = cand_matrix.mean(axis=0)
    rows = []
    for si, size in enumerate(sizes):
        for rep in range(repetitions):
            rng = stream(cfg.rng_seed, "sweep", si, rep)
            members = rng.choice(len(cand_ids), size=size, replace=member_replacement)
            ens_gaps = cand_matrix[members].mean(axis=0)
            est = estimate_alpha_from_arrays(
                ref_matrix, ens_gaps, cfg, f"ensemble[size={size},rep={rep}]"
            )
            rows.append(
                SweepRow(
                    size=size,
                    rep=rep,
                    sup_distance=sup_distance(ecdf_from_values(ens_gaps[ens_idx]), ref_ecdf),
                    alpha_hat=est.alpha_hat,
                    saturated=est.saturated_count,
                    accuracy=accuracy(ens_gaps, pool.labels),
                    churn_vs_full=churn(ens_gaps, full_ensemble),
                    ece=ece(ens_gaps, pool.labels),
                )
            )
    n_resample = cfg.resample_size or max(pool.n_test // 2, 1)
    return SweepResult(
        sizes=tuple(sizes),
        repetitions=repetitions,
        rows=tuple(rows),
        delta_a=two_sample_threshold(n_resample, cfg.epsilon_a),
        resample_size=n_resample,
        n_bootstrap=cfg.n_bootstrap,
        member_replacement=member_replacement,
        split_mode="full-test" if split is None else split.mode,
    )


def table1_summary(result: SweepResult, alpha_cut: float = 0.05) -> list[dict]:
    """Per-size summary: % of ensembles with alpha_hat <= cut, metric means/stds."""
    if not result.rows:
        raise ValueError("empty sweep result")
    alpha = result.by_size("alpha_hat")
    acc = result.by_size("accuracy")
    ch = result.by_size("churn_vs_full")
    cal = result.by_size("ece")
    rows = []
    for size in result.sizes:
        rows.append(
            {
                "size": size,
                "pct_alpha_le_cut": float(100.0 * np.mean(alpha[size] <= alpha_cut)),
                "alpha_cut": alpha_cut,
                "alpha_median": float(np.median(alpha[size])),
                "accuracy_mean": float(acc[size].mean()),
                "accuracy_std": float(acc[size].std()),
                "churn_mean": float(ch[size].mean()),
                "churn_std": float(ch[size].std()),
                "ece_mean": float(cal[size].mean()),
                "ece_std": float(cal[size].std()),
            }
        )
    return rows
