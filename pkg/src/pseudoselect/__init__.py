"""Decision-theoretic pseudo-label selection for semi-supervised
binary classification.

The package implements the full self-training loop around a Newton
logistic learner, with a menu of candidate-selection criteria headed by
the pseudo posterior predictive (an evidence-style score that guards
against confirmation bias), plus robust multi-objective and
optimistic/pessimistic superset variants, reproducible synthetic data,
and a paired benchmark harness exposed through the ``bench`` CLI.
"""

from .bench import (
    CriterionSummary,
    CsvSource,
    ExperimentConfig,
    ExperimentResult,
    RunRecord,
    classification_accuracy,
    load_config,
    parse_config,
    run_experiment,
    summarize,
    summarize_result_dir,
)
from .criteria import (
    CandidateScore,
    CriterionSpec,
    ObjectiveSpec,
    augmented_likelihood_score,
    confidence_score,
    multi_objective_score,
    predictive_variance_score,
    pseudo_posterior_predictive,
    superset_score,
)
from .data import (
    SplitResult,
    SplitSpec,
    SyntheticSpec,
    generate,
    load_csv,
    save_csv,
    split,
)
from .engine import (
    SelectionTrace,
    StoppingRule,
    TraceStep,
    run_pseudo_labeling,
    score_all_candidates,
    select_best,
)
from .estimator import SelfTrainingLogisticClassifier
from .exceptions import (
    ConfigError,
    CsvFormatError,
    DimensionMismatchError,
    DivergedError,
    EmptyPoolError,
    InvalidSpecError,
    MissingValueError,
    NoSuccessfulRunsError,
    NotPositiveDefiniteError,
    PseudoSelectError,
    ScoringError,
    SelectionAbortedError,
    SizeOverflowError,
    UnknownColumnError,
)
from .glm import (
    LabeledSet,
    LogisticNewtonLearner,
    ModelFit,
    PriorSpec,
    UnlabeledPool,
    fisher_information,
    fit,
    log_likelihood,
    per_point_log_likelihood,
    predict_proba,
    predict_proba_rows,
)
from .linalg import CholeskyFactor, SpdMatrix, cholesky, log_det_spd, solve_spd

__version__ = "0.1.0"

__all__ = [
    "CandidateScore",
    "CholeskyFactor",
    "ConfigError",
    "CriterionSpec",
    "CriterionSummary",
    "CsvFormatError",
    "CsvSource",
    "DimensionMismatchError",
    "DivergedError",
    "EmptyPoolError",
    "ExperimentConfig",
    "ExperimentResult",
    "InvalidSpecError",
    "LabeledSet",
    "LogisticNewtonLearner",
    "MissingValueError",
    "ModelFit",
    "NoSuccessfulRunsError",
    "NotPositiveDefiniteError",
    "ObjectiveSpec",
    "PriorSpec",
    "PseudoSelectError",
    "RunRecord",
    "ScoringError",
    "SelectionAbortedError",
    "SelectionTrace",
    "SelfTrainingLogisticClassifier",
    "SizeOverflowError",
    "SpdMatrix",
    "SplitResult",
    "SplitSpec",
    "StoppingRule",
    "SyntheticSpec",
    "TraceStep",
    "UnknownColumnError",
    "UnlabeledPool",
    "augmented_likelihood_score",
    "cholesky",
    "classification_accuracy",
    "confidence_score",
    "fisher_information",
    "fit",
    "generate",
    "load_config",
    "load_csv",
    "log_det_spd",
    "log_likelihood",
    "multi_objective_score",
    "parse_config",
    "per_point_log_likelihood",
    "predict_proba",
    "predict_proba_rows",
    "predictive_variance_score",
    "pseudo_posterior_predictive",
    "run_experiment",
    "run_pseudo_labeling",
    "save_csv",
    "score_all_candidates",
    "select_best",
    "solve_spd",
    "split",
    "summarize",
    "summarize_result_dir",
    "superset_score",
]
