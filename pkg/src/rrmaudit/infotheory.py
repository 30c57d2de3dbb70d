"""Discrete entropy / mutual information machinery and complexity estimates.

All quantities are in nats (natural log); converting to bits is a display
concern only. The bound certification downstream relies on the Pinsker step,
which is valid for KL divergence in nats, so no internal value may silently
switch units.

Two complexity measures of a noisy-retraining procedure are estimated from a
trial sequence, with n train samples, K trials and k classes:

* deviation complexity ("cdc"): n * I(D; N) where D = (prediction - clean
  label) mod k and N = (noisy label - clean label) mod k, the pair pooled
  over all trials AND all sample indices (the index is part of the sample
  space). One k x k histogram with K*n observations.
* prediction complexity ("cpc"): sum over sample indices i of
  I(prediction_i; noisy_label_i), each estimated from a per-index k x k
  histogram with K observations. Needs K >= 2 to be meaningful.

Plug-in estimation is the default; the Miller-Madow bias correction
(+ (nonzero cells - 1) / (2 * observations) per entropy term) is opt-in.
The third measure, the entropy of the trained model itself, is exactly
computable only by the enumeration oracle and is never estimated here.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ContractViolationError, IndependenceError, InsufficientTrialsError
from .noise import NoisyTrial

logger = logging.getLogger(__name__)

_CLAMP_LOG_THRESHOLD = 1e-9


class Estimator(enum.Enum):
    PLUG_IN = "plug-in"
    PLUG_IN_MILLER_MADOW = "plug-in-miller-madow"
    EXACT = "exact"


@dataclass(frozen=True)
class JointHistogram:
    """An a x b table of non-negative counts of paired observations."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2:
            raise ContractViolationError("counts must be a 2-D table")
        if counts.min() < 0:
            raise ContractViolationError("counts must be non-negative")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_pairs(
        cls, a: Sequence[int], b: Sequence[int], a_size: int, b_size: int
    ) -> "JointHistogram":
        a = np.asarray(a, dtype=np.int64).ravel()
        b = np.asarray(b, dtype=np.int64).ravel()
        if a.shape != b.shape:
            raise ContractViolationError("paired observations must align")
        if a.min() < 0 or a.max() >= a_size or b.min() < 0 or b.max() >= b_size:
            raise ContractViolationError("observation outside alphabet range")
        flat = np.bincount(a * b_size + b, minlength=a_size * b_size)
        return cls(counts=flat.reshape(a_size, b_size))


@dataclass(frozen=True)
class ComplexityEstimate:
    """A complexity value in nats together with its estimation provenance."""

    value: float
    estimator: Estimator
    sample_count: int
    per_index: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.value < 0:
            raise ContractViolationError("complexity must be non-negative")


def entropy(dist: Sequence[float]) -> float:
    """Shannon entropy -sum p log p in nats, with 0 log 0 = 0.

    The input must be a probability vector: non-negative entries summing to 1
    within 1e-9.
    """
    p = np.asarray(dist, dtype=np.float64).ravel()
    if p.size < 1:
        raise ContractViolationError("empty distribution")
    if p.min() < 0:
        raise ContractViolationError("negative probability entry")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ContractViolationError(f"probabilities sum to {p.sum()}, not 1")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def _entropy_unnormalized(weights: np.ndarray) -> float:
    """Entropy of weights / weights.sum() without revalidation."""
    total = weights.sum()
    nz = weights[weights > 0] / total
    return float(-np.sum(nz * np.log(nz)))


def _support(weights: np.ndarray) -> int:
    return int(np.count_nonzero(weights))


def mutual_information_probs(joint: np.ndarray) -> float:
    """Plug-in MI of an exact 2-D probability table, clamped at zero."""
    q = np.asarray(joint, dtype=np.float64)
    if q.ndim != 2:
        raise ContractViolationError("joint must be a 2-D table")
    if q.min() < -1e-15:
        raise ContractViolationError("negative joint probability")
    if abs(q.sum() - 1.0) > 1e-9:
        raise ContractViolationError(f"joint sums to {q.sum()}, not 1")
    h_row = _entropy_unnormalized(q.sum(axis=1))
    h_col = _entropy_unnormalized(q.sum(axis=0))
    h_joint = _entropy_unnormalized(q.ravel())
    return _finalize_mi(h_row, h_col, h_joint)


def _finalize_mi(h_row: float, h_col: float, h_joint: float) -> float:
    mi = h_row + h_col - h_joint
    upper = min(h_row, h_col)
    if mi > upper + 1e-9:
        raise ContractViolationError(
            f"MI {mi} exceeds marginal entropy bound {upper}"
        )
    if mi < 0:
        if mi < -_CLAMP_LOG_THRESHOLD:
            logger.warning("clamping negative MI residue %.3e to 0", mi)
        mi = 0.0
    return min(mi, upper) if upper > 0 else mi


def mutual_information(hist: JointHistogram, miller_madow: bool = False) -> float:
    """Plug-in MI of an empirical joint histogram, in nats.

    I = H(row marginal) + H(col marginal) - H(joint), clamped at 0 against
    negative floating residue. With ``miller_madow`` each entropy term gets
    the (support - 1) / (2 * total) bias correction; the corrected MI is also
    clamped into [0, min marginal entropy].
    """
    if hist.total < 1:
        raise ContractViolationError("histogram must contain at least one count")
    counts = hist.counts.astype(np.float64)
    row, col = counts.sum(axis=1), counts.sum(axis=0)
    h_row = _entropy_unnormalized(row)
    h_col = _entropy_unnormalized(col)
    h_joint = _entropy_unnormalized(counts.ravel())
    if miller_madow:
        n = hist.total
        h_row += (_support(row) - 1) / (2.0 * n)
        h_col += (_support(col) - 1) / (2.0 * n)
        h_joint += (_support(counts) - 1) / (2.0 * n)
    return _finalize_mi(h_row, h_col, h_joint)


def _check_trials(trials: Sequence[NoisyTrial], clean_labels: np.ndarray, k: int):
    if len(trials) < 1:
        raise ContractViolationError("need at least one trial")
    if k < 2:
        raise ContractViolationError("need at least 2 classes")
    if clean_labels.min() < 0 or clean_labels.max() >= k:
        raise ContractViolationError("labels must lie in {0, ..., k-1}")


def cdc_estimate(
    trials: Sequence[NoisyTrial],
    clean_labels: Sequence[int],
    k: int,
    miller_madow: bool = False,
) -> ComplexityEstimate:
    """Deviation-complexity estimate: n * I(D; N) pooled over trials and indices."""
    labs = np.asarray(clean_labels, dtype=np.int64)
    _check_trials(trials, labs, k)
    n = labs.size
    counts = np.zeros((k, k), dtype=np.int64)
    for trial in trials:
        delta = (trial.train_predictions - labs) % k
        flat = np.bincount(delta * k + trial.noise_deviations, minlength=k * k)
        counts += flat.reshape(k, k)
    hist = JointHistogram(counts=counts)
    mi = mutual_information(hist, miller_madow=miller_madow)
    return ComplexityEstimate(
        value=n * mi,
        estimator=Estimator.PLUG_IN_MILLER_MADOW if miller_madow else Estimator.PLUG_IN,
        sample_count=hist.total,
    )


def cpc_estimate(
    trials: Sequence[NoisyTrial],
    clean_labels: Sequence[int],
    k: int,
    miller_madow: bool = False,
) -> ComplexityEstimate:
    """Prediction-complexity estimate: sum over indices of I(prediction_i; noisy_i).

    Needs at least two trials; a single repetition gives every per-index
    histogram one observation and the plug-in MI degenerates to zero.
    """
    labs = np.asarray(clean_labels, dtype=np.int64)
    _check_trials(trials, labs, k)
    if len(trials) < 2:
        raise InsufficientTrialsError(
            "prediction complexity needs >= 2 trials; got "
            f"{len(trials)} (per-index joints need repetitions)"
        )
    preds = np.stack([t.train_predictions for t in trials])  # K x n
    noisy = (np.stack([t.noise_deviations for t in trials]) + labs[None, :]) % k
    per_index = []
    for i in range(labs.size):
        hist = JointHistogram.from_pairs(preds[:, i], noisy[:, i], k, k)
        per_index.append(mutual_information(hist, miller_madow=miller_madow))
    return ComplexityEstimate(
        value=float(np.sum(per_index)),
        estimator=Estimator.PLUG_IN_MILLER_MADOW if miller_madow else Estimator.PLUG_IN,
        sample_count=len(trials) * labs.size,
        per_index=tuple(per_index),
    )


def pinsker_gap_bound(joint: np.ndarray) -> tuple[float, float]:
    """Both sides of the Bernoulli conditional-shift bound, computed exactly.

    ``joint`` is the 2x2 probability table of (Z rows, B cols). Returns
    (|E[Z] - E[Z|B=1]|, sqrt(I(Z;B)/2) / E[B]); the first never exceeds the
    second. Requires E[B] > 0.
    """
    q = np.asarray(joint, dtype=np.float64)
    if q.shape != (2, 2):
        raise ContractViolationError("joint must be a 2x2 table")
    if q.min() < 0 or abs(q.sum() - 1.0) > 1e-9:
        raise ContractViolationError("joint must be a probability table")
    e_b = q[:, 1].sum()
    if e_b <= 0:
        raise ContractViolationError("E[B] must be positive")
    e_z = q[1, :].sum()
    e_z_given_b = q[1, 1] / e_b
    lhs = abs(e_z - e_z_given_b)
    rhs = float(np.sqrt(mutual_information_probs(q) / 2.0) / e_b)
    return lhs, rhs


def mi_superadditivity_check(joint_wxy: np.ndarray, atol: float = 1e-12) -> bool:
    """Check I(W; X,Y) >= I(W; X) + I(W; Y) for marginally independent X, Y.

    ``joint_wxy`` is a 3-D probability table with axes (W, X, Y). Raises
    ``IndependenceError`` if the (X, Y) marginal is not a product within
    ``atol``; otherwise returns whether the inequality holds up to ``atol``.
    """
    p = np.asarray(joint_wxy, dtype=np.float64)
    if p.ndim != 3:
        raise ContractViolationError("need a 3-D joint over (W, X, Y)")
    if p.min() < 0 or abs(p.sum() - 1.0) > 1e-9:
        raise ContractViolationError("joint must be a probability table")
    p_xy = p.sum(axis=0)
    p_x = p_xy.sum(axis=1)
    p_y = p_xy.sum(axis=0)
    if np.max(np.abs(p_xy - np.outer(p_x, p_y))) > atol:
        raise IndependenceError("X and Y are not marginally independent")
    w_size = p.shape[0]
    i_w_xy = mutual_information_probs(p.reshape(w_size, -1))
    i_w_x = mutual_information_probs(p.sum(axis=2))
    i_w_y = mutual_information_probs(p.sum(axis=1))
    return i_w_xy >= i_w_x + i_w_y - atol
