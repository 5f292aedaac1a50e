"""Companion metrics: accuracy, churn, calibration.

The prediction is the sign of the logit gap (ties at 0 resolve to +1).
The confidence of the predicted class under the two-logit softmax is
1/(1 + exp(-|gap|)), always in [0.5, 1).  Churn counts test points where
two models' predictions differ; it is reported as a raw count.  ECE bins
confidences into R equal right-closed intervals over [0.5, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pool import DimensionMismatchError, ModelPool, ensemble_gaps

__all__ = [
    "MetricsRecord",
    "BinStats",
    "predict",
    "predictions",
    "confidence",
    "accuracy",
    "churn",
    "reliability_bins",
    "ece",
    "metrics_report",
]

DEFAULT_BINS = 15


def predict(gap: float) -> int:
    """Predicted label: +1 when the gap is >= 0, else -1."""
    if not math.isfinite(gap):
        raise ValueError(f"gap must be finite, got {gap}")
    return 1 if gap >= 0 else -1


def predictions(gaps) -> np.ndarray:
    gaps = np.asarray(getattr(gaps, "gaps", gaps), dtype=np.float64)
    return np.where(gaps >= 0, 1, -1).astype(np.int64)


def confidence(gap) -> np.ndarray | float:
    """Posterior probability of the predicted class, in [0.5, 1)."""
    gap = np.asarray(gap, dtype=np.float64)
    out = 1.0 / (1.0 + np.exp(-np.abs(gap)))
    return float(out) if out.ndim == 0 else out


def _aligned(model, labels) -> tuple[np.ndarray, np.ndarray]:
    gaps = np.asarray(getattr(model, "gaps", model), dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if gaps.size == 0:
        raise ValueError("empty sample")
    if gaps.shape != labels.shape:
        raise DimensionMismatchError(
            f"{gaps.size} gaps vs {labels.size} labels"
        )
    return gaps, labels


def accuracy(model, labels) -> float:
    """Fraction of test points whose predicted label matches."""
    gaps, labels = _aligned(model, labels)
    return float(np.mean(predictions(gaps) == labels))


def churn(a, b) -> int:
    """Number of test points where the two models' predictions differ."""
    pa = predictions(a)
    pb = predictions(b)
    if pa.shape != pb.shape:
        raise DimensionMismatchError(f"{pa.size} vs {pb.size} predictions")
    return int(np.sum(pa != pb))


@dataclass(frozen=True)
class BinStats:
    """One confidence bin: index, count, accuracy, mean confidence."""

    bin_index: int
    count: int
    bin_accuracy: float
    bin_confidence: float


def reliability_bins(model, labels, n_bins: int = DEFAULT_BINS) -> list[BinStats]:
    """Per-bin accuracy and mean confidence over [0.5, 1] in R equal bins.

    Bins are right-closed; the left edge 0.5 belongs to the first bin.
    Empty bins are omitted.
    """
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    gaps, labels = _aligned(model, labels)
    conf = confidence(gaps)
    correct = predictions(gaps) == labels
    edges = np.linspace(0.5, 1.0, n_bins + 1)
    idx = np.digitize(conf, edges, right=True)
    idx = np.clip(idx, 1, n_bins)
    stats = []
    for r in range(1, n_bins + 1):
        mask = idx == r
        count = int(mask.sum())
        if count == 0:
            continue
        stats.append(
            BinStats(
                bin_index=r,
                count=count,
                bin_accuracy=float(correct[mask].mean()),
                bin_confidence=float(conf[mask].mean()),
            )
        )
    return stats


def ece(model, labels, n_bins: int = DEFAULT_BINS) -> float:
    """Expected calibration error: bin-weighted |accuracy - confidence| gap."""
    gaps, _ = _aligned(model, labels)
    n = gaps.size
    return float(
        sum(
            (b.count / n) * abs(b.bin_accuracy - b.bin_confidence)
            for b in reliability_bins(model, labels, n_bins)
        )
    )


@dataclass(frozen=True)
class MetricsRecord:
    """Per-model summary row."""

    model_id: str
    accuracy: float
    churn_vs_ensemble: int
    avg_pairwise_churn: float
    ece: float


def metrics_report(
    pool: ModelPool, ensemble_ids=None, n_bins: int = DEFAULT_BINS
) -> list[MetricsRecord]:
    """Accuracy, churn against the ensemble, average pairwise churn, and ECE.

    ``ensemble_ids`` defaults to every model in the pool.
    """
    ids = pool.model_ids if ensemble_ids is None else list(ensemble_ids)
    ens = ensemble_gaps(pool, ids)
    preds = {m.model_id: predictions(m.gaps) for m in pool.models}
    records = []
    for m in pool.models:
        others = [
            int(np.sum(preds[m.model_id] != preds[other.model_id]))
            for other in pool.models
            if other.model_id != m.model_id
        ]
        records.append(
            MetricsRecord(
                model_id=m.model_id,
                accuracy=accuracy(m, pool.labels),
                churn_vs_ensemble=churn(m, ens),
                avg_pairwise_churn=float(np.mean(others)) if others else 0.0,
                ece=ece(m, pool.labels, n_bins),
            )
        )
    return records
