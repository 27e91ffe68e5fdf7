"""Selection criteria for pseudo-labeling.

Every criterion maps a candidate (feature row, provisional label) to a
real score under argmax-is-better semantics. The menu:

``pseudo_posterior_predictive``
    The decision-theoretic criterion this package exists for: the joint
    marginal likelihood of labeled data plus the pseudo-labeled
    candidate, approximated by a second-order (Laplace-style) expansion
    around the penalized maximizer. Concretely, refit on the augmented
    set and score ``log_lik(theta_hat) - 0.5 * log det I(theta_hat)``
    where I is the information matrix. The determinant term penalizes
    candidates that make the fit overconfident, which is what counters
    confirmation bias from an overfit initial model.

``confidence`` / ``predictive_variance``
    Classic fit-once baselines: the winning predicted probability, and
    the negated Bernoulli variance -p(1-p). Both rank candidates by how
    far the prediction sits from 1/2, so their argmaxes coincide.

``augmented_likelihood``
    Ablation of the main criterion: the refit log-likelihood alone,
    dropping the determinant correction.

``multi_objective``
    A vector of utilities aggregated into one score, for robustness to
    modeling assumptions. Objective families: refits under alternative
    feature subsets (model choice), log-likelihood on the originally
    labeled rows only (guards against error accumulation), and
    user-weighted per-point log-likelihood (covariate shift).
    Aggregations: worst-case ``min``, convex ``weighted_sum``, and
    pool-level ``rank_sum``.

``superset``
    Optimistic or pessimistic wrapper: score an inner criterion at every
    label in the label space and take the max (max-max action) or min
    (min-max action) instead of trusting the predicted label.

Scoring is deterministic: label ties resolve to the smaller label, and
the pool-level argmax (in the selection engine) resolves score ties to
the smaller pool index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidSpecError
from .glm import (
    DEFAULT_LEARNER,
    LabeledSet,
    ModelFit,
    PriorSpec,
    predict_proba,
)
from .linalg import cholesky, log_det_spd

PSEUDO_POSTERIOR_PREDICTIVE = "pseudo_posterior_predictive"
CONFIDENCE = "confidence"
AUGMENTED_LIKELIHOOD = "augmented_likelihood"
PREDICTIVE_VARIANCE = "predictive_variance"
MULTI_OBJECTIVE = "multi_objective"
SUPERSET = "superset"

CRITERION_KINDS = (
    PSEUDO_POSTERIOR_PREDICTIVE,
    CONFIDENCE,
    AUGMENTED_LIKELIHOOD,
    PREDICTIVE_VARIANCE,
    MULTI_OBJECTIVE,
    SUPERSET,
)

# Criteria that refit the model per candidate; the others reuse one fit.
REFIT_KINDS = (PSEUDO_POSTERIOR_PREDICTIVE, AUGMENTED_LIKELIHOOD, MULTI_OBJECTIVE, SUPERSET)

MODEL_SUBSET = "model_subset"
LABELED_ONLY_LIKELIHOOD = "labeled_only_likelihood"
WEIGHTED_LIKELIHOOD = "weighted_likelihood"

OBJECTIVE_KINDS = (MODEL_SUBSET, LABELED_ONLY_LIKELIHOOD, WEIGHTED_LIKELIHOOD)

AGGREGATION_MIN = "min"
AGGREGATION_WEIGHTED_SUM = "weighted_sum"
AGGREGATION_RANK_SUM = "rank_sum"

AGGREGATIONS = (AGGREGATION_MIN, AGGREGATION_WEIGHTED_SUM, AGGREGATION_RANK_SUM)

OPTIMISTIC = "optimistic"
PESSIMISTIC = "pessimistic"

BINARY_LABELS = (0, 1)


@dataclass(frozen=True)
class ObjectiveSpec:
    """One utility inside a multi-objective criterion."""

    kind: str
    feature_subset: tuple[int, ...] | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise InvalidSpecError(f"unknown objective kind {self.kind!r}")
        if self.kind == MODEL_SUBSET:
            if not self.feature_subset:
                raise InvalidSpecError("model_subset objective needs a feature subset")
            subset = tuple(int(i) for i in self.feature_subset)
            if 0 not in subset:
                raise InvalidSpecError("feature subset must keep the intercept column 0")
            if len(set(subset)) != len(subset) or any(i < 0 for i in subset):
                raise InvalidSpecError("feature subset indices must be unique and >= 0")
            object.__setattr__(self, "feature_subset", subset)
        elif self.feature_subset is not None:
            raise InvalidSpecError(f"{self.kind} objective takes no feature subset")
        if self.kind == WEIGHTED_LIKELIHOOD:
            if not self.weights:
                raise InvalidSpecError("weighted_likelihood objective needs weights")
            weights = tuple(float(w) for w in self.weights)
            if any(not np.isfinite(w) or w <= 0 for w in weights):
                raise InvalidSpecError("likelihood weights must be positive and finite")
            object.__setattr__(self, "weights", weights)
        elif self.weights is not None:
            raise InvalidSpecError(f"{self.kind} objective takes no weights")


@dataclass(frozen=True)
class CriterionSpec:
    """Which criterion to evaluate, with its parameters."""

    kind: str
    prior: PriorSpec = field(default_factory=PriorSpec)
    objectives: tuple[ObjectiveSpec, ...] = ()
    aggregation: str | None = None
    aggregation_weights: tuple[float, ...] | None = None
    inner: "CriterionSpec | None" = None
    mode: str | None = None

    def __post_init__(self):
        if self.kind not in CRITERION_KINDS:
            raise InvalidSpecError(f"unknown criterion kind {self.kind!r}")
        object.__setattr__(self, "objectives", tuple(self.objectives))

        if self.kind == MULTI_OBJECTIVE:
            if len(self.objectives) < 2:
                raise InvalidSpecError("multi_objective needs at least two objectives")
            if self.aggregation not in AGGREGATIONS:
                raise InvalidSpecError(f"unknown aggregation {self.aggregation!r}")
            if self.aggregation == AGGREGATION_WEIGHTED_SUM:
                if self.aggregation_weights is None:
                    raise InvalidSpecError("weighted_sum aggregation needs weights")
                weights = tuple(float(w) for w in self.aggregation_weights)
                if len(weights) != len(self.objectives):
                    raise InvalidSpecError("need one aggregation weight per objective")
                if any(w < 0 for w in weights):
                    raise InvalidSpecError("aggregation weights must be nonnegative")
                if abs(sum(weights) - 1.0) > 1e-12:
                    raise InvalidSpecError("aggregation weights must sum to 1")
                object.__setattr__(self, "aggregation_weights", weights)
            elif self.aggregation_weights is not None:
                raise InvalidSpecError(f"{self.aggregation} aggregation takes no weights")
        else:
            if self.objectives or self.aggregation or self.aggregation_weights:
                raise InvalidSpecError(f"{self.kind} takes no objectives or aggregation")

        if self.kind == SUPERSET:
            if self.inner is None or self.mode not in (OPTIMISTIC, PESSIMISTIC):
                raise InvalidSpecError(
                    "superset needs an inner criterion and a mode of "
                    "'optimistic' or 'pessimistic'"
                )
            if self.inner.kind == SUPERSET:
                raise InvalidSpecError("superset cannot wrap another superset")
            if (
                self.inner.kind == MULTI_OBJECTIVE
                and self.inner.aggregation == AGGREGATION_RANK_SUM
            ):
                raise InvalidSpecError(
                    "rank_sum aggregation is pool-level and cannot sit inside superset"
                )
        elif self.inner is not None or self.mode is not None:
            raise InvalidSpecError(f"{self.kind} takes no inner criterion or mode")


@dataclass(frozen=True)
class CandidateScore:
    """Score for one (pool row, provisional label) pair."""

    pool_index: int
    pseudo_label: int
    score: float
    objective_values: tuple[float, ...] | None = None


def pseudo_posterior_predictive(
    data: LabeledSet,
    candidate_x: np.ndarray,
    candidate_y: int,
    prior: PriorSpec,
    learner=None,
    warm_start: np.ndarray | None = None,
) -> float:
    """Refit on the augmented set; score log_lik - 0.5 * log det(information).

    Up to an additive constant shared by all candidates this is the
    second-order approximation of the log joint marginal likelihood of
    the augmented data, so maximizing it picks the candidate whose
    pseudo-label the whole dataset supports best.
    """
    learner = learner or DEFAULT_LEARNER
    augmented = data.with_row(candidate_x, candidate_y)
    model = learner.fit(augmented, prior, warm_start=warm_start)
    return model.log_lik - 0.5 * log_det_spd(cholesky(model.fisher))


def augmented_likelihood_score(
    data: LabeledSet,
    candidate_x: np.ndarray,
    candidate_y: int,
    prior: PriorSpec,
    learner=None,
    warm_start: np.ndarray | None = None,
) -> float:
    """Refit log-likelihood alone, without the determinant correction."""
    learner = learner or DEFAULT_LEARNER
    augmented = data.with_row(candidate_x, candidate_y)
    return learner.fit(augmented, prior, warm_start=warm_start).log_lik


def confidence_score(fit_on_data: ModelFit, candidate_x: np.ndarray) -> tuple[float, int]:
    """Winning predicted probability and its label; ties go to label 0."""
    p = predict_proba(fit_on_data, candidate_x)
    if p > 0.5:
        return p, 1
    return 1.0 - p, 0


def predictive_variance_score(fit_on_data: ModelFit, candidate_x: np.ndarray) -> float:
    """Negated Bernoulli variance -p(1-p); argmax picks the least uncertain."""
    p = predict_proba(fit_on_data, candidate_x)
    return -p * (1.0 - p)


def predicted_label(fit_on_data: ModelFit, candidate_x: np.ndarray) -> int:
    """Model prediction for a row; the exact-tie p = 0.5 goes to label 0."""
    return 1 if predict_proba(fit_on_data, candidate_x) > 0.5 else 0


def multi_objective_score(
    data: LabeledSet,
    candidate_x: np.ndarray,
    candidate_y: int,
    spec: CriterionSpec,
    learner=None,
    warm_start: np.ndarray | None = None,
    pool_index: int = -1,
) -> CandidateScore:
    """Evaluate every objective at the candidate and aggregate.

    With rank_sum aggregation the ranks are only defined across a pool,
    so the returned score is a placeholder 0.0 and the raw objective
    values carry the information; the selection engine aggregates them.
    """
    if spec.kind != MULTI_OBJECTIVE:
        raise InvalidSpecError(f"expected a multi_objective spec, got {spec.kind!r}")
    learner = learner or DEFAULT_LEARNER
    candidate_x = np.asarray(candidate_x, dtype=float)

    augmented_fit: ModelFit | None = None
    values: list[float] = []
    for objective in spec.objectives:
        if objective.kind == MODEL_SUBSET:
            cols = objective.feature_subset
            if max(cols) >= data.d:
                raise InvalidSpecError(
                    f"feature subset {cols} exceeds dimension {data.d}"
                )
            sub_data = LabeledSet(data.x[:, cols], data.y, check_intercept=False)
            values.append(
                pseudo_posterior_predictive(
                    sub_data, candidate_x[list(cols)], candidate_y, spec.prior, learner
                )
            )
            continue
        if augmented_fit is None:
            augmented = data.with_row(candidate_x, candidate_y)
            augmented_fit = learner.fit(augmented, spec.prior, warm_start=warm_start)
        if objective.kind == LABELED_ONLY_LIKELIHOOD:
            values.append(learner.log_likelihood(augmented_fit.theta_hat, data))
        else:  # WEIGHTED_LIKELIHOOD, candidate's weight is the last entry
            weights = np.asarray(objective.weights, dtype=float)
            if weights.shape[0] != data.n + 1:
                raise InvalidSpecError(
                    f"weighted_likelihood needs {data.n + 1} weights, got {weights.shape[0]}"
                )
            per_point = learner.per_point_log_likelihood(
                augmented_fit.theta_hat, data.with_row(candidate_x, candidate_y)
            )
            values.append(float(weights @ per_point))

    if spec.aggregation == AGGREGATION_MIN:
        score = min(values)
    elif spec.aggregation == AGGREGATION_WEIGHTED_SUM:
        score = float(np.dot(spec.aggregation_weights, values))
    else:  # rank_sum: pool-level, placeholder until aggregation across candidates
        score = 0.0
    return CandidateScore(
        pool_index=pool_index,
        pseudo_label=int(candidate_y),
        score=score,
        objective_values=tuple(values),
    )


def rank_sum_scores(objective_rows: list[tuple[float, ...]]) -> list[float]:
    """Pool-level rank_sum aggregation.

    A candidate's rank for one objective is the number of candidates
    with a strictly smaller value (ties share a rank), so higher ranks
    are better and the aggregate is the sum of ranks across objectives.
    """
    if not objective_rows:
        return []
    matrix = np.asarray(objective_rows, dtype=float)
    scores = np.zeros(matrix.shape[0])
    for j in range(matrix.shape[1]):
        column = matrix[:, j]
        scores += np.sum(column[None, :] < column[:, None], axis=1)
    return [float(s) for s in scores]


def _inner_value(
    data: LabeledSet,
    candidate_x: np.ndarray,
    label: int,
    inner: CriterionSpec,
    learner,
    fit_on_data: ModelFit | None,
    warm_start: np.ndarray | None,
) -> float:
    """Inner-criterion value at a fixed candidate label."""
    if inner.kind == PSEUDO_POSTERIOR_PREDICTIVE:
        return pseudo_posterior_predictive(
            data, candidate_x, label, inner.prior, learner, warm_start=warm_start
        )
    if inner.kind == AUGMENTED_LIKELIHOOD:
        return augmented_likelihood_score(
            data, candidate_x, label, inner.prior, learner, warm_start=warm_start
        )
    if inner.kind == MULTI_OBJECTIVE:
        return multi_objective_score(
            data, candidate_x, label, inner, learner, warm_start=warm_start
        ).score
    if fit_on_data is None:
        fit_on_data = learner.fit(data, inner.prior)
    p = predict_proba(fit_on_data, candidate_x)
    if inner.kind == CONFIDENCE:
        return p if label == 1 else 1.0 - p
    # predictive_variance: label-independent
    return -p * (1.0 - p)


def superset_score(
    data: LabeledSet,
    candidate_x: np.ndarray,
    spec: CriterionSpec,
    learner=None,
    fit_on_data: ModelFit | None = None,
    warm_start: np.ndarray | None = None,
) -> tuple[float, int]:
    """Best (optimistic) or worst (pessimistic) inner value over all labels.

    Returns the extreme value and the label attaining it; ties resolve
    to the smaller label.
    """
    if spec.kind != SUPERSET:
        raise InvalidSpecError(f"expected a superset spec, got {spec.kind!r}")
    learner = learner or DEFAULT_LEARNER
    best_value: float | None = None
    best_label = BINARY_LABELS[0]
    for label in BINARY_LABELS:
        value = _inner_value(
            data, candidate_x, label, spec.inner, learner, fit_on_data, warm_start
        )
        if best_value is None:
            best_value, best_label = value, label
        elif spec.mode == OPTIMISTIC and value > best_value:
            best_value, best_label = value, label
        elif spec.mode == PESSIMISTIC and value < best_value:
            best_value, best_label = value, label
    return best_value, best_label


def score_candidate(
    data: LabeledSet,
    candidate_x: np.ndarray,
    spec: CriterionSpec,
    learner=None,
    fit_on_data: ModelFit | None = None,
    warm_start: np.ndarray | None = None,
    pool_index: int = -1,
) -> CandidateScore:
    """Evaluate one candidate under any criterion kind.

    Refit criteria are scored at the label the current model predicts;
    superset mode searches all labels instead. ``fit_on_data`` is the
    model fitted on the labeled rows and is required by the fit-once
    criteria and by label prediction; when omitted it is fitted here.
    """
    learner = learner or DEFAULT_LEARNER
    candidate_x = np.asarray(candidate_x, dtype=float)

    if spec.kind == SUPERSET:
        score, label = superset_score(
            data, candidate_x, spec, learner, fit_on_data, warm_start
        )
        return CandidateScore(pool_index=pool_index, pseudo_label=label, score=score)

    if fit_on_data is None:
        fit_on_data = learner.fit(data, spec.prior)

    if spec.kind == CONFIDENCE:
        score, label = confidence_score(fit_on_data, candidate_x)
        return CandidateScore(pool_index=pool_index, pseudo_label=label, score=score)
    if spec.kind == PREDICTIVE_VARIANCE:
        label = predicted_label(fit_on_data, candidate_x)
        score = predictive_variance_score(fit_on_data, candidate_x)
        return CandidateScore(pool_index=pool_index, pseudo_label=label, score=score)

    label = predicted_label(fit_on_data, candidate_x)
    if spec.kind == PSEUDO_POSTERIOR_PREDICTIVE:
        score = pseudo_posterior_predictive(
            data, candidate_x, label, spec.prior, learner, warm_start=warm_start
        )
        return CandidateScore(pool_index=pool_index, pseudo_label=label, score=score)
    if spec.kind == AUGMENTED_LIKELIHOOD:
        score = augmented_likelihood_score(
            data, candidate_x, label, spec.prior, learner, warm_start=warm_start
        )
        return CandidateScore(pool_index=pool_index, pseudo_label=label, score=score)
    return multi_objective_score(
        data, candidate_x, label, spec, learner, warm_start=warm_start, pool_index=pool_index
    )
