"""Binary logistic regression fitted by Newton's method.

This is the default learner behind every selection criterion. The model
is p(y=1 | x) = sigmoid(theta' x) with an optional Gaussian prior
theta ~ N(0, I / precision). Fitting maximizes

    sum_i [y_i log p_i + (1 - y_i) log(1 - p_i)] - precision/2 * ||theta||^2

so theta_hat is the maximum-likelihood estimate when precision is zero
and the posterior mode otherwise. The reported ``log_lik`` is always the
unpenalized data term at theta_hat, which is what the selection criteria
consume; the prior enters them only through the information matrix.

The information matrix is sum_i p_i (1 - p_i) x_i x_i' + precision * I,
the negative Hessian of the penalized objective. For logistic regression
with the canonical link the observed and expected information coincide,
so there is no ambiguity about which one is returned.

Design notes:

* The intercept is an explicit constant first column of the design
  matrix and is penalized exactly like every other coefficient. That is
  a deliberate deviation from the common leave-the-intercept-unpenalized
  practice: it keeps the information matrix in one-to-one correspondence
  with the full parameter vector.
* Probabilities are clamped to [1e-12, 1 - 1e-12] so log-likelihoods
  stay finite on near-separable fits.
* With zero prior precision and separable data no finite maximizer
  exists. The fit detects this either through a complete-separation
  certificate (every margin strictly positive at an iterate that meets
  the gradient tolerance) or by exhausting its iteration budget, and
  raises DivergedError. Callers should retry with positive precision.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass

import numpy as np

from .exceptions import DimensionMismatchError, DivergedError, NotPositiveDefiniteError
from .linalg import SpdMatrix, _cholesky_lower, _solve_from_lower

PROB_CLAMP = 1e-12
GRADIENT_TOL = 1e-6
# Newton converges quadratically, so polishing past the contractual
# tolerance costs about one extra iteration and buys fits that agree
# with exact-optimum reference computations to ~1e-9.
GRADIENT_TOL_POLISH = 1e-9
MAX_NEWTON_ITERATIONS = 100
MAX_STEP_HALVINGS = 20


@dataclass(frozen=True)
class LabeledSet:
    """Design matrix plus binary labels.

    By convention column 0 of ``x`` is the intercept constant 1; pass
    ``check_intercept=False`` to construct sets for intercept-free
    models (the learner itself does not require the convention).
    """

    x: np.ndarray
    y: np.ndarray
    check_intercept: InitVar[bool] = True

    def __post_init__(self, check_intercept: bool):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=int)
        if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
            raise DimensionMismatchError(
                f"features {x.shape} and labels {y.shape} do not align"
            )
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise DimensionMismatchError("need at least one row and one feature column")
        if not np.all((y == 0) | (y == 1)):
            raise DimensionMismatchError("labels must be 0 or 1")
        if check_intercept and not np.all(x[:, 0] == 1.0):
            raise DimensionMismatchError("column 0 must be the intercept constant 1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def with_row(self, x_row: np.ndarray, y_value: int) -> "LabeledSet":
        """Return a copy with one extra observation appended last."""
        x_row = np.asarray(x_row, dtype=float)
        if x_row.shape != (self.d,):
            raise DimensionMismatchError(
                f"candidate has shape {x_row.shape}, expected ({self.d},)"
            )
        return LabeledSet(
            np.vstack([self.x, x_row]),
            np.append(self.y, int(y_value)),
            check_intercept=False,
        )


@dataclass(frozen=True)
class UnlabeledPool:
    """Feature rows awaiting pseudo-labels, plus the label space."""

    x: np.ndarray
    label_space: tuple[int, ...] = (0, 1)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 2:
            raise DimensionMismatchError(f"pool features must be 2-d, got shape {x.shape}")
        if len(self.label_space) == 0:
            raise DimensionMismatchError("label space must be nonempty")
        if len(set(self.label_space)) != len(self.label_space):
            raise DimensionMismatchError("label space must be duplicate-free")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "label_space", tuple(self.label_space))

    @property
    def m(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class PriorSpec:
    """Gaussian prior precision; zero means a flat prior."""

    precision: float = 0.0

    def __post_init__(self):
        p = float(self.precision)
        if not np.isfinite(p) or p < 0:
            raise DimensionMismatchError("prior precision must be finite and >= 0")
        object.__setattr__(self, "precision", p)


@dataclass(frozen=True)
class ModelFit:
    """Fitted parameter vector with the quantities criteria consume."""

    theta_hat: np.ndarray
    log_lik: float
    fisher: SpdMatrix
    converged: bool
    iterations: int

    @property
    def d(self) -> int:
        return self.theta_hat.shape[0]


def _clamped_probs(eta: np.ndarray) -> np.ndarray:
    # sigmoid(x) == (1 + tanh(x/2)) / 2, overflow-free for all inputs
    return np.clip(0.5 * (1.0 + np.tanh(0.5 * eta)), PROB_CLAMP, 1.0 - PROB_CLAMP)


def _data_log_lik(probs: np.ndarray, y: np.ndarray) -> float:
    return float(np.sum(np.where(y == 1, np.log(probs), np.log1p(-probs))))


def per_point_log_likelihood(theta: np.ndarray, data: LabeledSet) -> np.ndarray:
    """Per-observation log-likelihood contributions at theta."""
    theta = _check_theta(theta, data.d)
    probs = _clamped_probs(data.x @ theta)
    return np.where(data.y == 1, np.log(probs), np.log1p(-probs))


def log_likelihood(theta: np.ndarray, data: LabeledSet) -> float:
    """Data log-likelihood at theta (prior term excluded)."""
    theta = _check_theta(theta, data.d)
    return _data_log_lik(_clamped_probs(data.x @ theta), data.y)


def fisher_information(theta: np.ndarray, data: LabeledSet, prior: PriorSpec) -> SpdMatrix:
    """Information matrix at theta: X' diag(p(1-p)) X + precision * I."""
    theta = _check_theta(theta, data.d)
    probs = _clamped_probs(data.x @ theta)
    info = _information(data.x, probs, prior.precision)
    return SpdMatrix(info)


def _information(x: np.ndarray, probs: np.ndarray, precision: float) -> np.ndarray:
    weights = probs * (1.0 - probs)
    info = (x * weights[:, None]).T @ x
    if precision > 0:
        info = info + precision * np.eye(x.shape[1])
    # BLAS summation order can leave tiny asymmetries; store exactly symmetric
    return (info + info.T) / 2.0


def _check_theta(theta: np.ndarray, d: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (d,):
        raise DimensionMismatchError(f"parameter has shape {theta.shape}, expected ({d},)")
    return theta


def predict_proba(fit: ModelFit, x: np.ndarray) -> float:
    """Predicted probability of label 1 for a single feature row."""
    x = np.asarray(x, dtype=float)
    if x.shape != (fit.d,):
        raise DimensionMismatchError(f"row has shape {x.shape}, expected ({fit.d},)")
    return float(_clamped_probs(np.array([x @ fit.theta_hat]))[0])


def predict_proba_rows(fit: ModelFit, rows: np.ndarray) -> np.ndarray:
    """Predicted probabilities of label 1 for a matrix of feature rows."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != fit.d:
        raise DimensionMismatchError(f"rows have shape {rows.shape}, expected (*, {fit.d})")
    return _clamped_probs(rows @ fit.theta_hat)


def _completely_separated(x: np.ndarray, y: np.ndarray, theta: np.ndarray) -> bool:
    """True when theta classifies every point correctly with strict margin.

    That is a certificate that the data are completely separable, in
    which case the unpenalized likelihood has no finite maximizer.
    """
    margins = (2 * y - 1) * (x @ theta)
    return bool(np.all(margins > 0))


def fit(data: LabeledSet, prior: PriorSpec, warm_start: np.ndarray | None = None) -> ModelFit:
    """Fit by Newton's method with step halving.

    Starts from zero (or ``warm_start``), stops when the penalized
    gradient infinity-norm drops below GRADIENT_TOL or after
    MAX_NEWTON_ITERATIONS updates. Raises DivergedError when no finite
    maximizer exists (zero precision, separable data).
    """
    x, y = data.x, data.y
    lam = prior.precision
    if warm_start is not None:
        theta = _check_theta(warm_start, data.d).copy()
    else:
        theta = np.zeros(data.d)

    probs = _clamped_probs(x @ theta)
    objective = _data_log_lik(probs, y) - 0.5 * lam * float(theta @ theta)
    converged = False
    iterations = 0
    ridge = lam * np.eye(data.d) if lam > 0 else None

    for _ in range(MAX_NEWTON_ITERATIONS):
        gradient = x.T @ (y - probs) - lam * theta
        gradient_norm = np.max(np.abs(gradient))
        within_tol = gradient_norm < GRADIENT_TOL
        if within_tol:
            if lam == 0.0 and _completely_separated(x, y, theta):
                raise DivergedError(
                    "data are completely separated and prior precision is zero; "
                    "no finite maximizer exists"
                )
            if gradient_norm < GRADIENT_TOL_POLISH:
                converged = True
                break

        weights = probs * (1.0 - probs)
        info = (x * weights[:, None]).T @ x
        if ridge is not None:
            info = info + ridge
        try:
            step = _solve_from_lower(_cholesky_lower(info), gradient)
        except NotPositiveDefiniteError as err:
            if lam == 0.0:
                raise DivergedError(
                    "information matrix became numerically singular with zero "
                    "prior precision; data are likely separable"
                ) from err
            raise

        scale = 1.0
        moved = False
        # Inside the contractual tolerance a failed full step means the
        # objective cannot make float progress: converged, skip halving.
        halvings = 0 if within_tol else MAX_STEP_HALVINGS
        for _ in range(halvings + 1):
            candidate = theta + scale * step
            cand_probs = _clamped_probs(x @ candidate)
            cand_objective = _data_log_lik(cand_probs, y) - 0.5 * lam * float(
                candidate @ candidate
            )
            if cand_objective > objective:
                theta, probs, objective = candidate, cand_probs, cand_objective
                moved = True
                break
            scale /= 2.0
        if not moved:
            if within_tol:
                converged = True
            break
        iterations += 1

    if not converged:
        gradient = x.T @ (y - probs) - lam * theta
        if np.max(np.abs(gradient)) < GRADIENT_TOL and not (
            lam == 0.0 and _completely_separated(x, y, theta)
        ):
            converged = True
        elif lam == 0.0:
            raise DivergedError(
                f"no convergence after {iterations} Newton updates with zero prior "
                "precision; data are likely separable, refit with precision > 0"
            )

    return ModelFit(
        theta_hat=theta,
        log_lik=_data_log_lik(probs, y),
        fisher=SpdMatrix(_information(x, probs, lam)),
        converged=converged,
        iterations=iterations,
    )


class LogisticNewtonLearner:
    """The learner interface criteria and the selection loop call.

    Alternative model families can be plugged in by providing an object
    with these four methods (plus ``per_point_log_likelihood`` if the
    weighted-likelihood objective is used).
    """

    def fit(
        self, data: LabeledSet, prior: PriorSpec, warm_start: np.ndarray | None = None
    ) -> ModelFit:
        return fit(data, prior, warm_start=warm_start)

    def predict_proba(self, model: ModelFit, x: np.ndarray) -> float:
        return predict_proba(model, x)

    def log_likelihood(self, theta: np.ndarray, data: LabeledSet) -> float:
        return log_likelihood(theta, data)

    def per_point_log_likelihood(self, theta: np.ndarray, data: LabeledSet) -> np.ndarray:
        return per_point_log_likelihood(theta, data)

    def fisher_information(
        self, theta: np.ndarray, data: LabeledSet, prior: PriorSpec
    ) -> SpdMatrix:
        return fisher_information(theta, data, prior)


DEFAULT_LEARNER = LogisticNewtonLearner()
