"""Model pools: per-model logit-gap vectors over a shared test set.

A pool holds one gap vector per trained model, every vector evaluated on
the same ordered test set, together with the {-1,+1} labels of that test
set.  Index alignment across models is mandatory: churn and pooled tests
compare models point by point.  Pools are immutable; every mutating
operation returns a new pool.

On-disk formats
---------------
Long CSV (canonical): header ``model_id,sample_index,label,gap``, one row
per model x sample, UTF-8, ``.`` decimal, LF endings.  ``save_pool``
writes models sorted by id with shortest round-trip float formatting, so
save(load(f)) is byte-identical for canonical files.

Wide CSV: header ``sample_index,label,gap:<model_id>,...``, one row per
sample.

JSONL: one object per model ``{"model_id": ..., "gaps": [...]}`` plus a
sidecar ``labels.json`` ``{"labels": [...]}`` in the same directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .rng import stream

__all__ = [
    "PoolError",
    "PoolParseError",
    "DimensionMismatchError",
    "NonFiniteValueError",
    "ScoreVector",
    "ModelPool",
    "SplitPlan",
    "load_pool",
    "save_pool",
    "clip_pool",
    "make_split",
    "ensemble_gaps",
    "pool_manifest",
    "DEFAULT_S_MAX",
]

# sigmoid(25) saturates double precision; recorded in output so results
# stay reproducible even when the caller never picks a clip range.
DEFAULT_S_MAX = 25.0


class PoolError(ValueError):
    """Base class for pool ingest and validation failures."""


class PoolParseError(PoolError):
    """Malformed file content; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DimensionMismatchError(PoolError):
    """Gap vectors and labels disagree in length, or rows are ragged."""


class NonFiniteValueError(PoolError):
    """A gap is NaN or infinite."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScoreVector:
    """One model's logit gaps, index-aligned with the pool's test set."""

    model_id: str
    gaps: np.ndarray

    def __post_init__(self):
        gaps = np.asarray(self.gaps, dtype=np.float64)
        if gaps.ndim != 1 or gaps.size == 0:
            raise DimensionMismatchError(
                f"model {self.model_id!r}: gaps must be a nonempty 1-D vector"
            )
        if not np.all(np.isfinite(gaps)):
            bad = int(np.flatnonzero(~np.isfinite(gaps))[0])
            raise NonFiniteValueError(
                f"model {self.model_id!r}: non-finite gap at sample {bad}"
            )
        object.__setattr__(self, "gaps", _readonly(gaps))

    def __len__(self) -> int:
        return self.gaps.size


@dataclass(frozen=True)
class ModelPool:
    """Immutable collection of ScoreVectors plus shared labels and metadata."""

    models: tuple[ScoreVector, ...]
    labels: np.ndarray
    s_max: float | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        models = tuple(self.models)
        if not models:
            raise PoolError("pool must contain at least one model")
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1:
            raise PoolError("labels must be a 1-D vector")
        if not np.all(np.isin(labels, (-1, 1))):
            raise PoolParseError("labels must be -1 or +1")
        n = labels.size
        for m in models:
            if len(m) != n:
                raise DimensionMismatchError(
                    f"model {m.model_id!r} has {len(m)} gaps but labels list {n}"
                )
        ids = [m.model_id for m in models]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise PoolError(f"duplicate model ids: {dup}")
        if self.s_max is not None and not self.s_max > 0:
            raise PoolError(f"s_max must be positive, got {self.s_max}")
        object.__setattr__(self, "models", models)
        object.__setattr__(self, "labels", _readonly(labels))

    @property
    def n_test(self) -> int:
        return self.labels.size

    @property
    def model_ids(self) -> list[str]:
        return [m.model_id for m in self.models]

    def model(self, model_id: str) -> ScoreVector:
        for m in self.models:
            if m.model_id == model_id:
                return m
        raise KeyError(f"unknown model id {model_id!r}")

    def gap_matrix(self, model_ids=None) -> np.ndarray:
        """(n_models, n_test) gap matrix, rows in the requested id order."""
        if model_ids is None:
            return np.vstack([m.gaps for m in self.models])
        return np.vstack([self.model(i).gaps for i in model_ids])


@dataclass(frozen=True)
class SplitPlan:
    """Two index draws over [n_test]: disjoint halves or bootstrap resamples."""

    reference_indices: np.ndarray
    candidate_indices: np.ndarray
    rng_seed: int
    mode: str = "bootstrap"

    def __post_init__(self):
        object.__setattr__(
            self, "reference_indices", _readonly(np.asarray(self.reference_indices, np.int64))
        )
        object.__setattr__(
            self, "candidate_indices", _readonly(np.asarray(self.candidate_indices, np.int64))
        )


# ---------------------------------------------------------------------------
# ingest / emit


def _parse_label(text: str, line: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise PoolParseError(f"label {text!r} is not an integer", line) from None
    if value not in (-1, 1):
        raise PoolParseError(f"label {value} outside {{-1,+1}}", line)
    return value


def _parse_gap(text: str, model_id: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise PoolParseError(f"gap {text!r} is not a number", line) from None
    if not np.isfinite(value):
        raise NonFiniteValueError(f"model {model_id!r}: non-finite gap {text!r}", line)
    return value


def _load_csv(path: Path) -> ModelPool:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise PoolParseError("empty file", 1)
    header = lines[0].strip()
    if header.startswith("model_id,"):
        return _load_csv_long(lines)
    if header.startswith("sample_index,label,gap:"):
        return _load_csv_wide(lines)
    raise PoolParseError(f"unrecognized CSV header {header!r}", 1)


def _load_csv_long(lines: list[str]) -> ModelPool:
    if lines[0].strip() != "model_id,sample_index,label,gap":
        raise PoolParseError(f"bad long-form header {lines[0]!r}", 1)
    per_model: dict[str, dict[int, float]] = {}
    labels: dict[int, int] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != 4:
            raise PoolParseError(f"expected 4 fields, got {len(parts)}", lineno)
        model_id, idx_text, label_text, gap_text = parts
        try:
            idx = int(idx_text)
        except ValueError:
            raise PoolParseError(f"sample_index {idx_text!r} is not an integer", lineno) from None
        if idx < 0:
            raise PoolParseError(f"negative sample_index {idx}", lineno)
        label = _parse_label(label_text, lineno)
        if idx in labels and labels[idx] != label:
            raise PoolParseError(
                f"conflicting labels for sample {idx}: {labels[idx]} vs {label}", lineno
            )
        labels[idx] = label
        gaps = per_model.setdefault(model_id, {})
        if idx in gaps:
            raise PoolParseError(f"duplicate row for model {model_id!r} sample {idx}", lineno)
        gaps[idx] = _parse_gap(gap_text, model_id, lineno)
    if not labels:
        raise PoolParseError("no data rows", len(lines))
    n = max(labels) + 1
    if sorted(labels) != list(range(n)):
        missing = sorted(set(range(n)) - set(labels))[:5]
        raise DimensionMismatchError(f"sample indices not contiguous; missing {missing}")
    label_vec = np.array([labels[j] for j in range(n)], dtype=np.int64)
    models = []
    for model_id, gaps in per_model.items():
        if sorted(gaps) != list(range(n)):
            raise DimensionMismatchError(
                f"model {model_id!r} has {len(gaps)} gaps but labels list {n}"
            )
        models.append(ScoreVector(model_id, np.array([gaps[j] for j in range(n)])))
    return ModelPool(tuple(models), label_vec)


def _load_csv_wide(lines: list[str]) -> ModelPool:
    header = lines[0].split(",")
    if header[:2] != ["sample_index", "label"] or not all(
        c.startswith("gap:") for c in header[2:]
    ):
        raise PoolParseError(f"bad wide-form header {lines[0]!r}", 1)
    ids = [c[len("gap:"):] for c in header[2:]]
    if not ids:
        raise PoolParseError("wide form needs at least one gap:<model_id> column", 1)
    rows: list[tuple[int, int, list[float]]] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != len(header):
            raise PoolParseError(
                f"expected {len(header)} fields, got {len(parts)}", lineno
            )
        idx = int(parts[0])
        label = _parse_label(parts[1], lineno)
        gaps = [_parse_gap(g, ids[k], lineno) for k, g in enumerate(parts[2:])]
        rows.append((idx, label, gaps))
    rows.sort(key=lambda r: r[0])
    if [r[0] for r in rows] != list(range(len(rows))):
        raise DimensionMismatchError("sample indices not contiguous from 0")
    label_vec = np.array([r[1] for r in rows], dtype=np.int64)
    gap_matrix = np.array([r[2] for r in rows], dtype=np.float64).T
    models = tuple(ScoreVector(i, gap_matrix[k]) for k, i in enumerate(ids))
    return ModelPool(models, label_vec)


def _load_jsonl(path: Path, labels_path: Path | None) -> ModelPool:
    if labels_path is None:
        labels_path = path.parent / "labels.json"
    try:
        with open(labels_path, encoding="utf-8") as fh:
            labels = json.load(fh)["labels"]
    except FileNotFoundError:
        raise PoolError(f"labels sidecar not found: {labels_path}") from None
    except (json.JSONDecodeError, KeyError) as exc:
        raise PoolParseError(f"bad labels sidecar {labels_path}: {exc}") from None
    models = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
                model_id, gaps = obj["model_id"], obj["gaps"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise PoolParseError(str(exc), lineno) from None
            gaps = np.asarray(gaps, dtype=np.float64)
            if len(gaps) != len(labels):
                raise DimensionMismatchError(
                    f"model {model_id!r} has {len(gaps)} gaps but labels list {len(labels)}"
                )
            if not np.all(np.isfinite(gaps)):
                raise NonFiniteValueError(f"model {model_id!r}: non-finite gap", lineno)
            models.append(ScoreVector(str(model_id), gaps))
    if not models:
        raise PoolParseError("no models in file", 1)
    return ModelPool(tuple(models), np.asarray(labels, dtype=np.int64))


def load_pool(path, format: str | None = None, labels_path=None) -> ModelPool:
    """Load and validate a pool from CSV or JSONL.

    ``format`` is inferred from the extension when omitted.  Rejects ragged
    rows, non-finite gaps, and labels outside {-1,+1}, with line numbers
    where available.
    """
    path = Path(path)
    if not path.exists():
        raise PoolError(f"pool file not found: {path}")
    if format is None:
        format = "jsonl" if path.suffix == ".jsonl" else "csv"
    if format == "csv":
        return _load_csv(path)
    if format == "jsonl":
        return _load_jsonl(path, Path(labels_path) if labels_path else None)
    raise PoolError(f"unknown format {format!r} (expected csv or jsonl)")


def save_pool(pool: ModelPool, path, format: str = "csv"):
    """Write a pool in canonical form (models sorted by id, repr floats)."""
    path = Path(path)
    if format == "csv":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("model_id,sample_index,label,gap\n")
            for m in sorted(pool.models, key=lambda m: m.model_id):
                for j in range(pool.n_test):
                    fh.write(
                        f"{m.model_id},{j},{pool.labels[j]},{float(m.gaps[j])!r}\n"
                    )
    elif format == "jsonl":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for m in sorted(pool.models, key=lambda m: m.model_id):
                fh.write(
                    json.dumps(
                        {"model_id": m.model_id, "gaps": [float(g) for g in m.gaps]},
                        sort_keys=True,
                    )
                    + "\n"
                )
        with open(path.parent / "labels.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump({"labels": [int(y) for y in pool.labels]}, fh)
            fh.write("\n")
    else:
        raise PoolError(f"unknown format {format!r} (expected csv or jsonl)")
    return path


def pool_manifest(pool: ModelPool) -> dict:
    """Pool manifest payload: clip range, test size, model ids."""
    return {
        "s_max": pool.s_max,
        "n_test": pool.n_test,
        "models": sorted(pool.model_ids),
    }


# ---------------------------------------------------------------------------
# operations


def clip_pool(pool: ModelPool, s_max: float = DEFAULT_S_MAX) -> ModelPool:
    """Clamp every gap to [-s_max, +s_max] and record s_max in the pool."""
    if not s_max > 0:
        raise PoolError(f"s_max must be positive, got {s_max}")
    models = tuple(
        ScoreVector(m.model_id, np.clip(m.gaps, -s_max, s_max)) for m in pool.models
    )
    return ModelPool(models, pool.labels, s_max=float(s_max), provenance=dict(pool.provenance))


def make_split(n_test: int, mode: str, rng_seed: int) -> SplitPlan:
    """Draw the two index sets used for reference and candidate eCDFs.

    Disjoint mode partitions a random permutation of [n_test] into two
    sorted halves of size n_test//2.  Bootstrap mode draws two independent
    with-replacement index samples of size n_test//2, in draw order.  The
    stream contract: indices come from ``stream(rng_seed, "split")``, the
    permutation (or the reference draw) first.
    """
    if mode == "disjoint":
        if n_test < 2:
            raise PoolError("disjoint split needs n_test >= 2")
        rng = stream(rng_seed, "split")
        half = n_test // 2
        perm = rng.permutation(n_test)
        return SplitPlan(
            np.sort(perm[:half]), np.sort(perm[half : 2 * half]), rng_seed, mode
        )
    if mode == "bootstrap":
        if n_test < 1:
            raise PoolError("bootstrap split needs n_test >= 1")
        rng = stream(rng_seed, "split")
        half = max(n_test // 2, 1)
        ref = rng.integers(0, n_test, size=half)
        cand = rng.integers(0, n_test, size=half)
        return SplitPlan(ref, cand, rng_seed, mode)
    raise PoolError(f"unknown split mode {mode!r} (expected disjoint or bootstrap)")


def ensemble_gaps(pool: ModelPool, member_ids) -> ScoreVector:
    """Pointwise mean of the members' gap vectors (the logit-averaged ensemble)."""
    member_ids = list(member_ids)
    if not member_ids:
        raise PoolError("ensemble needs at least one member")
    gaps = pool.gap_matrix(member_ids).mean(axis=0)
    name = "ensemble(" + "+".join(sorted(member_ids)) + ")"
    return ScoreVector(name, gaps)
