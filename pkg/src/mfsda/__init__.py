"""Model-free variable selection with FDR control via data splitting."""

from .dataset import Dataset
from .errors import (
    ColumnNotFound,
    DatasetError,
    DegenerateInput,
    DegenerateSlicing,
    DuplicateHeader,
    InsufficientDistinctResponses,
    InsufficientSamples,
    InternalContractViolation,
    InvalidLevel,
    InvalidScenario,
    MfsdaError,
    MissingInputFile,
    MissingValue,
    SingularGram,
)
from .lasso import (
    LassoFit,
    ScreenConfig,
    cv_lambda,
    kkt_violation,
    lambda_grid,
    lambda_max,
    lasso_fit,
    lasso_path,
    screen_fits,
    screen_support,
)
from .linalg import (
    SpdFactor,
    center_columns,
    factor_spd,
    multi_response_ols,
    spd_inverse_diagonal,
    spd_solve,
)
from .selector import (
    RULES,
    RankingStats,
    SelectionResult,
    SplitFit,
    SplitPair,
    fdp_threshold,
    fit_split,
    ranking_statistics,
    run_mfsda,
    split_data,
)
from .simbench import (
    BenchResult,
    CovariateSpec,
    MethodConfig,
    RepMetrics,
    ScenarioSpec,
    aggregate_csv,
    ar1_covariance,
    baseline_topk,
    detail_csv,
    evaluate,
    gen_covariates,
    gen_response,
    run_replication,
    run_replications,
    sweep_csv,
    write_aggregate_csv,
)
from .transforms import (
    FAMILIES,
    SliceBoundaries,
    TransformSpec,
    apply_transform,
    make_slice_boundaries,
    slice_memberships,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "MfsdaError", "DegenerateInput", "SingularGram", "InsufficientSamples",
    "InsufficientDistinctResponses", "DegenerateSlicing", "InvalidLevel",
    "InvalidScenario", "InternalContractViolation", "DatasetError",
    "MissingInputFile", "MissingValue", "ColumnNotFound", "DuplicateHeader",
    "SpdFactor", "center_columns", "factor_spd", "multi_response_ols",
    "spd_inverse_diagonal", "spd_solve",
    "FAMILIES", "TransformSpec", "SliceBoundaries", "make_slice_boundaries",
    "apply_transform", "slice_memberships",
    "LassoFit", "ScreenConfig", "lasso_fit", "lasso_path", "lambda_max",
    "lambda_grid", "cv_lambda", "kkt_violation", "screen_fits", "screen_support",
    "RULES", "SplitPair", "SplitFit", "RankingStats", "SelectionResult",
    "split_data", "fit_split", "ranking_statistics", "fdp_threshold", "run_mfsda",
    "CovariateSpec", "ScenarioSpec", "RepMetrics", "MethodConfig", "BenchResult",
    "ar1_covariance", "gen_covariates", "gen_response", "evaluate",
    "baseline_topk", "run_replication", "run_replications",
    "aggregate_csv", "write_aggregate_csv", "detail_csv", "sweep_csv",
]
