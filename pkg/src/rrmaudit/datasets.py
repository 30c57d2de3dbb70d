"""Core domain types: datasets, accuracy measurements, and the gap algebra.

The object of study is a training pipeline audited under label noise. Four
accuracies are measured, always against the original clean labels:

* ``train``        - accuracy of the clean-trained classifier on the train set
* ``test``         - accuracy of the clean-trained classifier on held-out data
* ``train_noisy``  - accuracy of the noisy-trained classifier on the train set
* ``ntrain_noisy`` - the same, restricted to the samples whose label was
  actually corrupted (undefined if no corruption occurred in any trial)

From these, three clamped gaps and their sum:

    robustness    = max(train - train_noisy, 0)
    rationality   = max(ntrain_noisy - test, 0)
    memorization  = max(train_noisy - ntrain_noisy, 0)
    rrm_bound     = robustness + rationality + memorization

and the unclamped generalization gap ``train - test``, which satisfies
``generalization <= rrm_bound`` identically (clamping makes each summand at
least as large as its raw value).

Everything here is an immutable value; operations are pure functions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import ContractViolationError, NTrainUndefinedError


class NoiseKind(enum.Enum):
    """How a corrupted label is redrawn.

    UNIFORM_ALL redraws uniformly over all k classes (so the realized flip
    probability is eta*(k-1)/k); UNIFORM_OTHER redraws uniformly over the k-1
    wrong classes (realized flip probability exactly eta).
    """

    UNIFORM_ALL = "uniform-all"
    UNIFORM_OTHER = "uniform-other"


class DenominatorMode(enum.Enum):
    """Denominator used in the memorization-gap bound.

    ETA uses the nominal noise level; EMPIRICAL uses the noise model's exact
    flip probability (they coincide under UNIFORM_OTHER).
    """

    ETA = "eta"
    EMPIRICAL = "empirical"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True, order="C")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LabeledEmbeddings:
    """A fixed representation of a dataset: feature rows plus class labels.

    ``features`` is an (n, d) float matrix, ``labels`` length-n integers in
    {0, ..., num_classes-1}. ``group_ids`` (optional, length n, non-negative)
    tie together rows that are augmented copies of one base point.
    Labels must use the canonical 0..k-1 encoding; the deviation arithmetic
    downstream is modular in the class index.
    """

    features: np.ndarray
    labels: np.ndarray
    num_classes: int
    group_ids: Optional[np.ndarray] = None

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if feats.ndim != 2:
            raise ContractViolationError("features must be a 2-D matrix")
        n, d = feats.shape
        if n < 1 or d < 1:
            raise ContractViolationError("need n >= 1 rows and d >= 1 columns")
        if not np.all(np.isfinite(feats)):
            raise ContractViolationError("features contain non-finite values")
        if labels.shape != (n,):
            raise ContractViolationError(
                f"labels length {labels.shape} does not match {n} feature rows"
            )
        if self.num_classes < 2:
            raise ContractViolationError("num_classes must be >= 2")
        if labels.min() < 0 or labels.max() >= self.num_classes:
            raise ContractViolationError(
                "labels must lie in {0, ..., num_classes-1}"
            )
        object.__setattr__(self, "features", _frozen(feats))
        object.__setattr__(self, "labels", _frozen(labels))
        if self.group_ids is not None:
            groups = np.asarray(self.group_ids, dtype=np.int64)
            if groups.shape != (n,):
                raise ContractViolationError("group_ids length must equal n")
            if groups.min() < 0:
                raise ContractViolationError("group_ids must be non-negative")
            object.__setattr__(self, "group_ids", _frozen(groups))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


def accuracy(predictions: Sequence[int], labels: Sequence[int]) -> float:
    """Fraction of positions where prediction equals label."""
    preds = np.asarray(predictions)
    labs = np.asarray(labels)
    if preds.shape != labs.shape or preds.ndim != 1:
        raise ContractViolationError(
            f"predictions {preds.shape} and labels {labs.shape} must be equal-length 1-D"
        )
    if preds.size < 1:
        raise ContractViolationError("accuracy of an empty sequence is undefined")
    return float(np.mean(preds == labs))


@dataclass(frozen=True)
class AccuracyQuad:
    """The four accuracy measurements of one audit.

    ``ntrain_noisy`` is ``None`` when no sample was corrupted across all
    trials; that state is a flagged value, never NaN.
    """

    train: float
    test: float
    train_noisy: float
    ntrain_noisy: Optional[float]

    def __post_init__(self):
        for name in ("train", "test", "train_noisy"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ContractViolationError(f"{name}={v} outside [0, 1]")
        if self.ntrain_noisy is not None and not (0.0 <= self.ntrain_noisy <= 1.0):
            raise ContractViolationError(
                f"ntrain_noisy={self.ntrain_noisy} outside [0, 1]"
            )

    @property
    def ntrain_defined(self) -> bool:
        return self.ntrain_noisy is not None


class GapDecomposition(NamedTuple):
    robustness: float
    rationality: float
    memorization: float
    generalization: float
    rrm_bound: float


def assemble_gaps(acc: AccuracyQuad) -> GapDecomposition:
    """Clamped gap decomposition of an accuracy quad.

    Requires ``ntrain_noisy`` to be defined; the generalization gap is
    reported unclamped (it can be negative, e.g. with augmentation).
    """
    if acc.ntrain_noisy is None:
        raise NTrainUndefinedError(
            "no corrupted sample occurred in any trial; gaps involving "
            "NTrain(eta) are undefined"
        )
    robustness = max(acc.train - acc.train_noisy, 0.0)
    rationality = max(acc.ntrain_noisy - acc.test, 0.0)
    memorization = max(acc.train_noisy - acc.ntrain_noisy, 0.0)
    generalization = acc.train - acc.test
    return GapDecomposition(
        robustness=robustness,
        rationality=rationality,
        memorization=memorization,
        generalization=generalization,
        rrm_bound=robustness + rationality + memorization,
    )


@dataclass(frozen=True)
class TrialSummary:
    """Per-trial facts carried into the report file."""

    trial_index: int
    flip_count: int
    train_noisy: float
    ntrain_correct: int


@dataclass(frozen=True)
class GapReport:
    """Complete result of one audit.

    ``rationality_gap``, ``memorization_gap`` and ``rrm_bound`` are ``None``
    exactly when ``accuracies.ntrain_noisy`` is undefined. ``cdc`` and
    ``cpc`` are plug-in complexity estimates in nats; ``thm2_bound`` is the
    square-root information bound on the memorization gap and
    ``thm2_bound_capped`` its value capped at 1.
    """

    eta: float
    trials: int
    accuracies: AccuracyQuad
    robustness_gap: float
    rationality_gap: Optional[float]
    memorization_gap: Optional[float]
    generalization_gap: float
    rrm_bound: Optional[float]
    noise_model: NoiseKind
    bound_denominator: DenominatorMode
    base_seed: int
    cdc: Optional[float] = None
    cpc: Optional[float] = None
    thm2_bound: Optional[float] = None
    thm2_bound_capped: Optional[float] = None
    trial_summaries: tuple[TrialSummary, ...] = field(default=())

    def __post_init__(self):
        if not (0.0 < self.eta < 1.0):
            raise ContractViolationError("eta must lie in (0, 1)")
        if self.trials < 1:
            raise ContractViolationError("trials must be >= 1")
        if self.accuracies.ntrain_defined:
            if self.rrm_bound is None:
                raise ContractViolationError(
                    "rrm_bound must be set when NTrain(eta) is defined"
                )
            # structural identity, asserted on every report
            if self.generalization_gap > self.rrm_bound + 1e-12:
                raise ContractViolationError(
                    f"generalization gap {self.generalization_gap} exceeds "
                    f"RRM bound {self.rrm_bound}"
                )

    @property
    def ntrain_defined(self) -> bool:
        return self.accuracies.ntrain_defined
