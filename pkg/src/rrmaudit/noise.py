"""The noisy-label experiment: corruption, per-trial training, accuracies.

One trial of the eta-noisy experiment redraws each training label
independently with probability eta (per the chosen ``NoiseKind``), retrains
the classifier on the corrupted labels, and records its predictions on the
full train set together with the per-sample noise deviations

    N_i = (noisy_label_i - clean_label_i) mod k.

Accuracies are always measured against the clean labels. Trials are mutually
independent; trial ``t`` draws from the random substream
``(base_seed, STREAM_NOISE_TRIAL, t)``, so a trial sequence is bit-identical
regardless of worker count or execution order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .datasets import LabeledEmbeddings, NoiseKind, _frozen, accuracy
from .errors import ContractViolationError, TrainerFailureError
from .rng import STREAM_NOISE_TRIAL, substream

# A classifier maps an (m, d) feature matrix to m class indices; a trainer
# maps (data, labels-override, seed) to a classifier and must be a pure
# function of those three arguments.
Classifier = Callable[[np.ndarray], np.ndarray]
TrainerHandle = Callable[[LabeledEmbeddings, np.ndarray, int], Classifier]


@dataclass(frozen=True)
class NoiseModel:
    """Label corruption model: keep with probability 1-eta, redraw otherwise."""

    kind: NoiseKind
    eta: float

    def __post_init__(self):
        if not (0.0 < self.eta < 1.0):
            raise ContractViolationError("eta must lie strictly in (0, 1)")

    def flip_probability(self, k: int) -> float:
        """Exact probability that a corrupted draw differs from the clean label."""
        if k < 2:
            raise ContractViolationError("need at least 2 classes")
        if self.kind is NoiseKind.UNIFORM_ALL:
            return self.eta * (k - 1) / k
        return self.eta

    def deviation_probabilities(self, k: int) -> np.ndarray:
        """Distribution of the deviation N over {0, ..., k-1}."""
        if k < 2:
            raise ContractViolationError("need at least 2 classes")
        if self.kind is NoiseKind.UNIFORM_ALL:
            p = np.full(k, self.eta / k)
            p[0] += 1.0 - self.eta
        else:
            p = np.full(k, self.eta / (k - 1))
            p[0] = 1.0 - self.eta
        return p


@dataclass(frozen=True)
class NoisyTrial:
    """One realization of the noisy experiment.

    ``noise_deviations[i] = (noisy_i - clean_i) mod k``; ``flip_mask`` marks
    the corrupted positions (deviation nonzero); ``train_predictions`` are
    the noisy-trained classifier's outputs on the full train set.
    """

    trial_index: int
    noise_deviations: np.ndarray
    train_predictions: np.ndarray
    flip_mask: np.ndarray

    def __post_init__(self):
        dev = np.asarray(self.noise_deviations, dtype=np.int64)
        preds = np.asarray(self.train_predictions, dtype=np.int64)
        mask = np.asarray(self.flip_mask, dtype=bool)
        if not (dev.shape == preds.shape == mask.shape):
            raise ContractViolationError("trial arrays must share one length")
        if dev.min(initial=0) < 0:
            raise ContractViolationError("deviations must be non-negative residues")
        if not np.array_equal(mask, dev != 0):
            raise ContractViolationError("flip_mask must equal (deviation != 0)")
        object.__setattr__(self, "noise_deviations", _frozen(dev))
        object.__setattr__(self, "train_predictions", _frozen(preds))
        object.__setattr__(self, "flip_mask", _frozen(mask))


def corrupt_labels(
    labels: Sequence[int],
    k: int,
    model: NoiseModel,
    seed: Union[int, np.random.Generator],
) -> tuple[np.ndarray, np.ndarray]:
    """Corrupt labels i.i.d. per the noise model; returns (noisy, deviations).

    ``seed`` may be an integer (root stream) or an already-derived generator.
    """
    if k < 2:
        raise ContractViolationError("need at least 2 classes")
    labs = np.asarray(labels, dtype=np.int64)
    if labs.ndim != 1 or labs.size < 1:
        raise ContractViolationError("labels must be a non-empty 1-D sequence")
    if labs.min() < 0 or labs.max() >= k:
        raise ContractViolationError("labels must lie in {0, ..., k-1}")
    rng = seed if isinstance(seed, np.random.Generator) else substream(seed)
    n = labs.size
    redraw = rng.random(n) < model.eta
    if model.kind is NoiseKind.UNIFORM_ALL:
        replacement = rng.integers(0, k, size=n)
    else:
        # uniform over the k-1 wrong classes, as an offset 1..k-1
        replacement = (labs + rng.integers(1, k, size=n)) % k
    noisy = np.where(redraw, replacement, labs)
    deviations = (noisy - labs) % k
    return noisy, deviations


def run_clean(
    trainer: TrainerHandle,
    train: LabeledEmbeddings,
    test: LabeledEmbeddings,
    seed: int,
) -> tuple[float, float]:
    """Train once on clean labels; return (train accuracy, test accuracy)."""
    if train.dim != test.dim:
        raise ContractViolationError(
            f"train dim {train.dim} != test dim {test.dim}"
        )
    if train.num_classes != test.num_classes:
        raise ContractViolationError("train and test disagree on class count")
    clf = trainer(train, train.labels, seed)
    train_acc = accuracy(clf(train.features), train.labels)
    test_acc = accuracy(clf(test.features), test.labels)
    return train_acc, test_acc


def _one_trial(
    trainer: TrainerHandle,
    train: LabeledEmbeddings,
    model: NoiseModel,
    base_seed: int,
    t: int,
) -> NoisyTrial:
    rng = substream(base_seed, STREAM_NOISE_TRIAL, t)
    noisy, deviations = corrupt_labels(train.labels, train.num_classes, model, rng)
    # trainer seed drawn from the trial's own stream, after the corruption draws
    trainer_seed = int(rng.integers(2**63))
    try:
        clf = trainer(train, noisy, trainer_seed)
        preds = np.asarray(clf(train.features), dtype=np.int64)
    except Exception as exc:  # noqa: BLE001 - repackaged with trial index
        raise TrainerFailureError(t, exc) from exc
    return NoisyTrial(
        trial_index=t,
        noise_deviations=deviations,
        train_predictions=preds,
        flip_mask=deviations != 0,
    )


def run_noisy_trials(
    trainer: TrainerHandle,
    train: LabeledEmbeddings,
    model: NoiseModel,
    trials: int,
    base_seed: int,
    workers: int = 1,
) -> list[NoisyTrial]:
    """Run ``trials`` independent noisy trials; deterministic in ``base_seed``.

    With ``workers > 1`` trials run on a thread pool; results are ordered by
    trial index either way, so the output is identical for any worker count.
    """
    if trials < 1:
        raise ContractViolationError("need at least one trial")
    if workers <= 1:
        return [_one_trial(trainer, train, model, base_seed, t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_one_trial, trainer, train, model, base_seed, t)
            for t in range(trials)
        ]
        return [f.result() for f in futures]


def noisy_accuracies(
    trials: Sequence[NoisyTrial],
    clean_labels: Sequence[int],
) -> tuple[float, Optional[float]]:
    """Pooled (Train(eta), NTrain(eta)) over a trial sequence.

    Train(eta) averages correctness against the clean labels over all trials
    and samples. NTrain(eta) pools only the corrupted positions across all
    trials (each corrupted sample weighted equally); it is ``None`` when the
    pool is empty.
    """
    if len(trials) < 1:
        raise ContractViolationError("need at least one trial")
    labs = np.asarray(clean_labels, dtype=np.int64)
    correct_total = 0
    flipped_total = 0
    flipped_correct = 0
    for trial in trials:
        correct = trial.train_predictions == labs
        correct_total += int(correct.sum())
        flipped_total += int(trial.flip_mask.sum())
        flipped_correct += int((correct & trial.flip_mask).sum())
    train_eta = correct_total / (len(trials) * labs.size)
    if flipped_total == 0:
        return train_eta, None
    return train_eta, flipped_correct / flipped_total
