"""Scikit-learn estimator facade over the selection loop.

``SelfTrainingLogisticClassifier`` follows the sklearn semi-supervised
convention: pass the full design to ``fit`` with unlabeled rows marked
by -1 in ``y``. The estimator adds the intercept column itself, runs
the pseudo-labeling loop under the configured criterion, and then
behaves like any binary classifier (``predict``, ``predict_proba``,
``get_params``/``set_params``, clone-compatible).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .criteria import CRITERION_KINDS, SUPERSET, CriterionSpec
from .engine import StoppingRule, run_pseudo_labeling
from .glm import LabeledSet, PriorSpec, UnlabeledPool, predict_proba_rows


class SelfTrainingLogisticClassifier(BaseEstimator, ClassifierMixin):
    """Binary self-training classifier with decision-theoretic selection.

    Parameters
    ----------
    criterion : str or CriterionSpec, default "pseudo_posterior_predictive"
        Which selection criterion scores pool candidates. A string names
        one of the built-in kinds; pass a CriterionSpec for
        multi-objective or superset setups.
    prior_precision : float, default 1.0
        Gaussian prior precision for the logistic fits. Keep it positive
        unless you know the labeled data are not separable.
    max_added : int or None, default None
        Cap on the number of pseudo-labels added; None exhausts the pool.
    score_threshold : float or None, default None
        Stop before the first addition whose score falls below this.
        Mutually exclusive with max_added.
    jobs : int, default 1
        Worker threads for candidate scoring within one iteration.

    Attributes
    ----------
    classes_ : ndarray of shape (2,)
        Always [0, 1].
    coef_, intercept_ : fitted coefficients (without / for the constant).
    trace_ : SelectionTrace of the additions made during fit.
    """

    def __init__(
        self,
        criterion: str | CriterionSpec = "pseudo_posterior_predictive",
        prior_precision: float = 1.0,
        max_added: int | None = None,
        score_threshold: float | None = None,
        jobs: int = 1,
    ):
        self.criterion = criterion
        self.prior_precision = prior_precision
        self.max_added = max_added
        self.score_threshold = score_threshold
        self.jobs = jobs

    def _criterion_spec(self) -> CriterionSpec:
        if isinstance(self.criterion, CriterionSpec):
            return self.criterion
        if self.criterion not in CRITERION_KINDS or self.criterion == SUPERSET:
            raise ValueError(
                f"criterion must be a CriterionSpec or one of "
                f"{[k for k in CRITERION_KINDS if k != SUPERSET]}, got {self.criterion!r}"
            )
        return CriterionSpec(kind=self.criterion, prior=PriorSpec(self.prior_precision))

    def _stopping_rule(self) -> StoppingRule:
        if self.max_added is not None and self.score_threshold is not None:
            raise ValueError("set at most one of max_added and score_threshold")
        if self.max_added is not None:
            return StoppingRule.max_iterations(self.max_added)
        if self.score_threshold is not None:
            return StoppingRule.score_threshold(self.score_threshold)
        return StoppingRule.exhaust_pool()

    def fit(self, X, y):
        """Fit on a partially labeled design; y == -1 marks unlabeled rows."""
        X, y = check_X_y(X, y, dtype=float)
        y_int = np.asarray(y).astype(int)
        if not np.all(y_int == np.asarray(y, dtype=float)) or not np.all(
            np.isin(y_int, (-1, 0, 1))
        ):
            raise ValueError("y must contain only 0, 1, and -1 (unlabeled)")
        y = y_int
        labeled_mask = y != -1
        if not np.any(labeled_mask):
            raise ValueError("need at least one labeled row")

        design = np.hstack([np.ones((X.shape[0], 1)), X])
        labeled = LabeledSet(design[labeled_mask], y[labeled_mask])
        pool = UnlabeledPool(design[~labeled_mask])

        final_fit, trace, final_set = run_pseudo_labeling(
            labeled,
            pool,
            self._criterion_spec(),
            self._stopping_rule(),
            jobs=self.jobs,
        )

        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        self.model_fit_ = final_fit
        self.trace_ = trace
        self.labeled_set_ = final_set
        self.intercept_ = np.array([final_fit.theta_hat[0]])
        self.coef_ = final_fit.theta_hat[1:].reshape(1, -1)
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "model_fit_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        design = np.hstack([np.ones((X.shape[0], 1)), X])
        p1 = predict_proba_rows(self.model_fit_, design)
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] > 0.5).astype(int)
