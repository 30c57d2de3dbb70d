"""Simple-classifier trainers for the frozen-representation setting.

The workhorse is one-hot least squares with L2 regularization: the weight
matrix W minimizes

    sum_i || W r_i - e_{y_i} ||^2 + lambda ||W||^2

solved exactly through the normal equations (R^T R + lambda I) W^T = R^T Y.
Prediction is the argmax of the k affine scores, ties broken toward the
smallest class index (numpy's argmax already does this).

Also here: a brute-force empirical-risk minimizer over explicit finite
hypothesis classes, margin profiles of linear classifiers, and the trivial
trainers (constant, table-interpolating, membership-gated) used as probes
by the audit and certification suites.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .datasets import LabeledEmbeddings
from .errors import ContractViolationError, SingularSystemError
from .noise import Classifier, TrainerHandle

_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class RidgeConfig:
    """Configuration of the least-squares head.

    ``lam = 0`` is allowed only when the Gram matrix is non-singular.
    ``fit_bias`` appends a constant-1 feature; ``standardize`` normalizes
    each feature to zero mean / unit variance using train statistics.
    """

    lam: float = 1e-6
    fit_bias: bool = True
    standardize: bool = False

    def __post_init__(self):
        if self.lam < 0:
            raise ContractViolationError("lambda must be non-negative")


@dataclass(frozen=True)
class LinearClassifier:
    """Affine multiclass scorer; predicts the first argmax of the k scores."""

    weights: np.ndarray  # k x D where D = d (+1 with bias)
    fit_bias: bool
    feature_mean: Optional[np.ndarray] = None
    feature_scale: Optional[np.ndarray] = None

    def _design(self, features: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if self.feature_mean is not None:
            X = (X - self.feature_mean) / self.feature_scale
        if self.fit_bias:
            X = np.hstack([X, np.ones((X.shape[0], 1))])
        return X

    def scores(self, features: np.ndarray) -> np.ndarray:
        """(m, k) matrix of affine scores."""
        return self._design(features) @ self.weights.T

    def __call__(self, features: np.ndarray) -> np.ndarray:
        return np.argmax(self.scores(features), axis=1)


def _design_matrix(
    features: np.ndarray, config: RidgeConfig
) -> tuple[np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
    X = np.asarray(features, dtype=np.float64)
    mean = scale = None
    if config.standardize:
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        X = (X - mean) / scale
    if config.fit_bias:
        X = np.hstack([X, np.ones((X.shape[0], 1))])
    return X, mean, scale


def ridge_fit(
    data: LabeledEmbeddings,
    labels: Optional[Sequence[int]] = None,
    config: RidgeConfig = RidgeConfig(),
) -> LinearClassifier:
    """Exact minimizer of the regularized one-hot least-squares objective.

    Deterministic; raises ``SingularSystemError`` (naming the deficient rank)
    when ``lam = 0`` and the Gram matrix is singular. The solution always
    satisfies the normal-equation residual bound
    ``||G W^T - R^T Y|| <= 1e-8 * (1 + ||R^T Y||)``.
    """
    labs = data.labels if labels is None else np.asarray(labels, dtype=np.int64)
    if labs.shape != (data.n,):
        raise ContractViolationError("labels override must have one entry per row")
    if labs.min() < 0 or labs.max() >= data.num_classes:
        raise ContractViolationError("labels must lie in {0, ..., k-1}")
    X, mean, scale = _design_matrix(data.features, config)
    D = X.shape[1]
    onehot = np.zeros((data.n, data.num_classes))
    onehot[np.arange(data.n), labs] = 1.0
    gram = X.T @ X + config.lam * np.eye(D)
    rhs = X.T @ onehot
    if config.lam == 0.0:
        rank = np.linalg.matrix_rank(gram, hermitian=True)
        if rank < D:
            raise SingularSystemError(rank=int(rank), size=D)
    wt = np.linalg.solve(gram, rhs)  # D x k
    residual = np.linalg.norm(gram @ wt - rhs)
    if residual > _RESIDUAL_TOL * (1.0 + np.linalg.norm(rhs)):
        raise SingularSystemError(rank=int(np.linalg.matrix_rank(gram)), size=D)
    return LinearClassifier(
        weights=wt.T, fit_bias=config.fit_bias, feature_mean=mean, feature_scale=scale
    )


def ridge_trainer(config: RidgeConfig = RidgeConfig()) -> TrainerHandle:
    """Trainer handle wrapping ``ridge_fit`` (the seed is unused: exact solve)."""

    def fit(data: LabeledEmbeddings, labels: np.ndarray, seed: int) -> Classifier:
        return ridge_fit(data, labels, config)

    return fit


# ---------------------------------------------------------------------------
# finite hypothesis classes and brute-force ERM


@dataclass(frozen=True)
class FiniteHypothesisClass:
    """An explicit, enumerable set of classifiers.

    Each hypothesis maps an (m, d) feature matrix to m class indices. ERM
    ties are broken by enumeration order, so the ordering is part of the
    class definition.
    """

    hypotheses: tuple[Classifier, ...]

    def __post_init__(self):
        if len(self.hypotheses) == 0:
            raise ContractViolationError("hypothesis class must be non-empty")

    def __len__(self) -> int:
        return len(self.hypotheses)


def erm_fit(
    data: LabeledEmbeddings,
    labels: Optional[Sequence[int]],
    hclass: FiniteHypothesisClass,
) -> Classifier:
    """Hypothesis with minimal empirical 0-1 error; first minimum wins."""
    labs = data.labels if labels is None else np.asarray(labels, dtype=np.int64)
    best, best_errors = None, None
    for h in hclass.hypotheses:
        errors = int(np.sum(np.asarray(h(data.features)) != labs))
        if best_errors is None or errors < best_errors:
            best, best_errors = h, errors
    return best


def erm_trainer(hclass: FiniteHypothesisClass) -> TrainerHandle:
    def fit(data: LabeledEmbeddings, labels: np.ndarray, seed: int) -> Classifier:
        return erm_fit(data, labels, hclass)

    return fit


def threshold_hypotheses(
    values: Sequence[float], coordinate: int = 0
) -> FiniteHypothesisClass:
    """All 1-D threshold rules on one coordinate, both polarities (k=2).

    Thresholds sit at midpoints between consecutive distinct values, plus one
    below and one above everything; for n distinct values this enumerates
    2(n+1) hypotheses.
    """
    vals = np.unique(np.asarray(values, dtype=np.float64))
    cuts = [vals[0] - 1.0]
    cuts.extend((vals[:-1] + vals[1:]) / 2.0)
    cuts.append(vals[-1] + 1.0)

    def make(cut: float, polarity: int) -> Classifier:
        def h(features: np.ndarray) -> np.ndarray:
            above = np.atleast_2d(features)[:, coordinate] >= cut
            return np.where(above, polarity, 1 - polarity).astype(np.int64)

        return h

    hyps = [make(c, p) for c in cuts for p in (1, 0)]
    return FiniteHypothesisClass(hypotheses=tuple(hyps))


# ---------------------------------------------------------------------------
# margins


class MarginProfile:
    """Fraction of train points whose top score beats the runner-up by >= gamma."""

    def __init__(self, classifier: LinearClassifier, data: LabeledEmbeddings):
        if data.num_classes < 2:
            raise ContractViolationError("need at least 2 classes")
        scores = classifier.scores(data.features)
        part = np.sort(scores, axis=1)
        self.margins = part[:, -1] - part[:, -2]

    def __call__(self, gamma: float) -> float:
        if gamma < 0:
            raise ContractViolationError("gamma must be >= 0")
        return float(np.mean(self.margins >= gamma))


def margin_profile(
    classifier: LinearClassifier, data: LabeledEmbeddings
) -> MarginProfile:
    """Monotone non-increasing map gamma -> fraction of points at margin >= gamma."""
    return MarginProfile(classifier, data)


# ---------------------------------------------------------------------------
# probe trainers


def constant_trainer(class_index: int) -> TrainerHandle:
    """Ignores labels and features; always predicts ``class_index``."""

    def fit(data: LabeledEmbeddings, labels: np.ndarray, seed: int) -> Classifier:
        def predict(features: np.ndarray) -> np.ndarray:
            return np.full(np.atleast_2d(features).shape[0], class_index, dtype=np.int64)

        return predict

    return fit


def interpolating_trainer() -> TrainerHandle:
    """Memorizes the (possibly noisy) training labels of each feature row.

    Rows seen at fit time reproduce their given label exactly; unseen rows
    fall back to the label of the nearest training row (Euclidean). On
    distinct train rows this interpolates, so its accuracy on corrupted
    samples, measured against clean labels, is exactly zero.
    """

    def fit(data: LabeledEmbeddings, labels: np.ndarray, seed: int) -> Classifier:
        table = {row.tobytes(): int(lab) for row, lab in zip(data.features, labels)}
        train_feats = data.features
        labs = np.asarray(labels, dtype=np.int64)

        def predict(features: np.ndarray) -> np.ndarray:
            X = np.atleast_2d(np.asarray(features, dtype=np.float64))
            out = np.empty(X.shape[0], dtype=np.int64)
            for i, row in enumerate(X):
                hit = table.get(row.tobytes())
                if hit is None:
                    dist = np.linalg.norm(train_feats - row, axis=1)
                    hit = int(labs[np.argmin(dist)])
                out[i] = hit
            return out

        return predict

    return fit


def membership_gated_trainer(
    inner: TrainerHandle, fallback_class: int = 0
) -> TrainerHandle:
    """Adversarial wrapper: useful representation only for training members.

    The returned classifier answers with the inner model's prediction on any
    feature row that appeared in the training set, and with the trivial
    constant ``fallback_class`` everywhere else. This emulates an
    over-parameterized representation that collapses every unseen input to a
    trivial value: train-side behavior (and hence memorization) is untouched
    while test accuracy becomes trivial, producing a large rationality gap.
    Inference-time retraining with the query point inserted into the train
    set defeats the gate, which is exactly what the performance-on-the-table
    experiment exercises.
    """

    def fit(data: LabeledEmbeddings, labels: np.ndarray, seed: int) -> Classifier:
        members = {row.tobytes() for row in data.features}
        inner_clf = inner(data, labels, seed)

        def predict(features: np.ndarray) -> np.ndarray:
            X = np.atleast_2d(np.asarray(features, dtype=np.float64))
            preds = np.asarray(inner_clf(X), dtype=np.int64).copy()
            for i, row in enumerate(X):
                if row.tobytes() not in members:
                    preds[i] = fallback_class
            return preds

        return predict

    return fit
