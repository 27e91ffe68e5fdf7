import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from pseudoselect.criteria import (
    CONFIDENCE,
    LABELED_ONLY_LIKELIHOOD,
    MODEL_SUBSET,
    MULTI_OBJECTIVE,
    CriterionSpec,
    ObjectiveSpec,
)
from pseudoselect.estimator import SelfTrainingLogisticClassifier
from pseudoselect.glm import PriorSpec


def semi_supervised_problem(seed=0, n=60, labeled=15, d=3):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    theta = rng.uniform(-1.5, 1.5, size=d)
    y_true = (rng.uniform(size=n) < 1 / (1 + np.exp(-(X @ theta)))).astype(int)
    y = y_true.copy()
    y[labeled:] = -1
    return X, y, y_true


def test_get_params_round_trip_and_clone():
    est = SelfTrainingLogisticClassifier(criterion="confidence", prior_precision=2.0,
                                         max_added=5)
    params = est.get_params()
    assert params["criterion"] == "confidence"
    assert params["prior_precision"] == 2.0
    cloned = clone(est)
    assert cloned.get_params() == params
    est.set_params(prior_precision=3.0)
    assert est.get_params()["prior_precision"] == 3.0


def test_fit_predict_shapes_and_classes():
    X, y, _ = semi_supervised_problem()
    est = SelfTrainingLogisticClassifier(criterion="confidence").fit(X, y)
    assert np.array_equal(est.classes_, [0, 1])
    assert est.coef_.shape == (1, X.shape[1])
    assert est.intercept_.shape == (1,)
    probs = est.predict_proba(X)
    assert probs.shape == (X.shape[0], 2)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-12)
    preds = est.predict(X)
    assert set(np.unique(preds)) <= {0, 1}


def test_fit_absorbs_whole_pool_by_default():
    X, y, _ = semi_supervised_problem(labeled=20)
    est = SelfTrainingLogisticClassifier(criterion="confidence").fit(X, y)
    assert len(est.trace_) == int(np.sum(y == -1))
    assert est.labeled_set_.n == X.shape[0]


def test_max_added_caps_additions():
    X, y, _ = semi_supervised_problem()
    est = SelfTrainingLogisticClassifier(criterion="confidence", max_added=4).fit(X, y)
    assert len(est.trace_) == 4


def test_all_labeled_matches_plain_supervised_fit():
    X, y, _ = semi_supervised_problem()
    labeled = y != -1
    est = SelfTrainingLogisticClassifier(criterion="confidence").fit(
        X[labeled], y[labeled]
    )
    from pseudoselect.glm import LabeledSet, fit as glm_fit

    design = np.hstack([np.ones((labeled.sum(), 1)), X[labeled]])
    direct = glm_fit(LabeledSet(design, y[labeled]), PriorSpec(1.0))
    assert np.max(np.abs(est.model_fit_.theta_hat - direct.theta_hat)) < 1e-12


def test_criterion_spec_instance_accepted():
    X, y, _ = semi_supervised_problem(n=40, labeled=14, d=2)
    spec = CriterionSpec(
        MULTI_OBJECTIVE,
        prior=PriorSpec(1.0),
        objectives=(
            ObjectiveSpec(MODEL_SUBSET, feature_subset=(0, 1)),
            ObjectiveSpec(LABELED_ONLY_LIKELIHOOD),
        ),
        aggregation="min",
    )
    est = SelfTrainingLogisticClassifier(criterion=spec, max_added=3).fit(X, y)
    assert len(est.trace_) == 3


def test_unfitted_predict_raises():
    with pytest.raises(NotFittedError):
        SelfTrainingLogisticClassifier().predict_proba(np.ones((2, 3)))


def test_invalid_labels_rejected():
    X = np.ones((4, 2))
    with pytest.raises(ValueError):
        SelfTrainingLogisticClassifier().fit(X, np.array([0, 1, 2, -1]))
    with pytest.raises(ValueError):
        SelfTrainingLogisticClassifier().fit(X, np.array([-1, -1, -1, -1]))


def test_invalid_criterion_name_rejected():
    X, y, _ = semi_supervised_problem()
    with pytest.raises(ValueError):
        SelfTrainingLogisticClassifier(criterion="wat").fit(X, y)


def test_conflicting_stopping_params_rejected():
    X, y, _ = semi_supervised_problem()
    est = SelfTrainingLogisticClassifier(max_added=2, score_threshold=0.5)
    with pytest.raises(ValueError):
        est.fit(X, y)


def test_feature_count_checked_at_predict():
    X, y, _ = semi_supervised_problem(d=3)
    est = SelfTrainingLogisticClassifier(criterion="confidence", max_added=1).fit(X, y)
    with pytest.raises(ValueError):
        est.predict(np.ones((2, 5)))


def test_pseudo_labels_improve_over_tiny_supervised_fit():
    # sanity: with a strong signal and a handful of labels, absorbing the
    # pool should not catastrophically break the classifier
    X, y, y_true = semi_supervised_problem(seed=3, n=120, labeled=25, d=2)
    est = SelfTrainingLogisticClassifier(criterion=CONFIDENCE).fit(X, y)
    accuracy = np.mean(est.predict(X) == y_true)
    assert accuracy > 0.6
