"""seedscope: run-to-run variability analysis for binary classifiers.

Compares the empirical CDFs of logit-gap samples from independently
trained models through a robust (impartially trimmed) two-sample KS test
with finite-sample DKW thresholds, estimates the minimal trimming level
alpha_hat at which a candidate is accepted, and reports companion
metrics (accuracy, churn, expected calibration error) plus a synthetic
ensemble-size harness.
"""

__version__ = "0.1.0"

from .alpha import AlphaConfig, AlphaEstimate, estimate_alpha, pairwise_alpha
from .bounds import (
    DkwConfig,
    L1BoundInputs,
    corollary_bound,
    l1_bound,
    one_sample_threshold,
    theorem1_epsilon,
    two_sample_constant,
    two_sample_threshold,
)
from .ecdf import (
    Ecdf,
    InterpolatedCdf,
    ecdf_from_values,
    ecdf_of,
    interpolate,
    reference_of,
    sup_distance,
)
from .metrics import (
    BinStats,
    MetricsRecord,
    accuracy,
    churn,
    confidence,
    ece,
    metrics_report,
    predict,
    predictions,
    reliability_bins,
)
from .pool import (
    DEFAULT_S_MAX,
    DimensionMismatchError,
    ModelPool,
    NonFiniteValueError,
    PoolError,
    PoolParseError,
    ScoreVector,
    SplitPlan,
    clip_pool,
    ensemble_gaps,
    load_pool,
    make_split,
    pool_manifest,
    save_pool,
)
from .synth import (
    SweepResult,
    SynthSpec,
    ensemble_sweep,
    generate_pool,
    paper_cnn_analogue,
    table1_summary,
)
from .trimming import (
    RobustTestResult,
    TrimmingEnvelope,
    build_envelope,
    optimal_weights,
    robust_test,
    trimmed_ks,
    trimming_membership,
)

__all__ = [
    "__version__",
    "AlphaConfig",
    "AlphaEstimate",
    "estimate_alpha",
    "pairwise_alpha",
    "DkwConfig",
    "L1BoundInputs",
    "corollary_bound",
    "l1_bound",
    "one_sample_threshold",
    "theorem1_epsilon",
    "two_sample_constant",
    "two_sample_threshold",
    "Ecdf",
    "InterpolatedCdf",
    "ecdf_from_values",
    "ecdf_of",
    "interpolate",
    "reference_of",
    "sup_distance",
    "BinStats",
    "MetricsRecord",
    "accuracy",
    "churn",
    "confidence",
    "ece",
    "metrics_report",
    "predict",
    "predictions",
    "reliability_bins",
    "DEFAULT_S_MAX",
    "DimensionMismatchError",
    "ModelPool",
    "NonFiniteValueError",
    "PoolError",
    "PoolParseError",
    "ScoreVector",
    "SplitPlan",
    "clip_pool",
    "ensemble_gaps",
    "load_pool",
    "make_split",
    "pool_manifest",
    "save_pool",
    "SweepResult",
    "SynthSpec",
    "ensemble_sweep",
    "generate_pool",
    "paper_cnn_analogue",
    "table1_summary",
    "RobustTestResult",
    "TrimmingEnvelope",
    "build_envelope",
    "optimal_weights",
    "robust_test",
    "trimmed_ks",
    "trimming_membership",
]
