"""Inference-time retraining: trading a rationality gap for test accuracy.

The transformation stores the training set and, per query point x, draws an
eta-noisy copy of the stored labels, replaces one uniformly chosen sample
with (x, random label), retrains, and answers with the retrained
classifier's prediction at x. If the audited trainer does better on
corrupted train points than on fresh test points (a positive rationality
gap), this procedure recovers that surplus: its test accuracy approaches
NTrain(eta) as n grows, at the price of one retraining per query.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .datasets import LabeledEmbeddings, NoiseKind, accuracy
from .errors import ContractViolationError
from .noise import NoiseModel, TrainerHandle, corrupt_labels, noisy_accuracies, run_clean, run_noisy_trials
from .rng import STREAM_INSERTED_POINT, substream


@dataclass(frozen=True)
class PotlConfig:
    """Settings of the inference-time retraining experiment.

    ``trials_per_test_point`` > 1 repeats the draw and majority-votes
    (an extension; 1 reproduces the basic procedure).
    """

    eta: float
    seed: int
    trials_per_test_point: int = 1

    def __post_init__(self):
        if not (0.0 < self.eta < 1.0):
            raise ContractViolationError("eta must lie in (0, 1)")
        if self.trials_per_test_point < 1:
            raise ContractViolationError("need at least one draw per test point")


def procedure_s_predict(
    trainer: TrainerHandle,
    stored_train: LabeledEmbeddings,
    x: np.ndarray,
    config: PotlConfig,
    kind: NoiseKind = NoiseKind.UNIFORM_ALL,
) -> int:
    """Predict one point by inserting it into a noisy copy of the train set.

    Each draw: corrupt the stored labels at level eta, pick i uniformly,
    replace (x_i, y~_i) with (x, uniform random label), retrain, evaluate at
    x. With multiple draws the majority class wins, ties toward the smallest
    index. A label-independent trainer makes this equal its ordinary
    prediction for every x.
    """
    if stored_train.n < 1:
        raise ContractViolationError("stored train set must be non-empty")
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape != (stored_train.dim,):
        raise ContractViolationError(
            f"query point has dim {x.shape}, train rows have {stored_train.dim}"
        )
    k = stored_train.num_classes
    model = NoiseModel(kind=kind, eta=config.eta)
    votes = np.zeros(k, dtype=np.int64)
    for m in range(config.trials_per_test_point):
        rng = substream(config.seed, STREAM_INSERTED_POINT, m)
        noisy, _ = corrupt_labels(stored_train.labels, k, model, rng)
        i = int(rng.integers(stored_train.n))
        feats = stored_train.features.copy()
        feats[i] = x
        noisy = noisy.copy()
        noisy[i] = int(rng.integers(k))  # inserted label uniform over all classes
        modified = LabeledEmbeddings(
            feats, stored_train.labels, k, group_ids=stored_train.group_ids
        )
        trainer_seed = int(rng.integers(2**63))
        clf = trainer(modified, noisy, trainer_seed)
        pred = int(np.asarray(clf(x.reshape(1, -1)))[0])
        votes[pred] += 1
    return int(np.argmax(votes))


@dataclass(frozen=True)
class PotlResult:
    """Both sides of the recovered-accuracy comparison plus context."""

    test_s: float
    test_s_sigma: float
    ntrain_eta: Optional[float]
    train_eta: float
    test_t: float
    margin: Optional[float]  # test_s - ntrain_eta
    assumption_ok: bool  # empirical Train(eta) >= NTrain(eta)
    n_test: int


def potl_experiment(
    trainer: TrainerHandle,
    train: LabeledEmbeddings,
    test: LabeledEmbeddings,
    config: PotlConfig,
    kind: NoiseKind = NoiseKind.UNIFORM_ALL,
    assumption_trials: int = 10,
) -> PotlResult:
    """Run the retraining procedure on every test point.

    First estimates Train(eta) and NTrain(eta) of the audited trainer to
    check the premise Train(eta) >= NTrain(eta); a violation is flagged in
    the result but the experiment still runs. ``margin`` is the observed
    slack test_s - NTrain(eta), the quantity the recovery statement says
    vanishes from below with n.
    """
    model = NoiseModel(kind=kind, eta=config.eta)
    _, test_t = run_clean(trainer, train, test, config.seed)
    trials = run_noisy_trials(trainer, train, model, assumption_trials, config.seed)
    train_eta, ntrain_eta = noisy_accuracies(trials, train.labels)
    assumption_ok = ntrain_eta is not None and train_eta >= ntrain_eta
    preds = np.empty(test.n, dtype=np.int64)
    for j in range(test.n):
        point_seed = int(
            substream(config.seed, STREAM_INSERTED_POINT, j).integers(2**63)
        )
        point_config = PotlConfig(
            eta=config.eta,
            seed=point_seed,
            trials_per_test_point=config.trials_per_test_point,
        )
        preds[j] = procedure_s_predict(trainer, train, test.features[j], point_config, kind)
    test_s = accuracy(preds, test.labels)
    sigma = float(np.sqrt(max(test_s * (1 - test_s), 1e-12) / test.n))
    return PotlResult(
        test_s=test_s,
        test_s_sigma=sigma,
        ntrain_eta=ntrain_eta,
        train_eta=train_eta,
        test_t=test_t,
        margin=None if ntrain_eta is None else test_s - ntrain_eta,
        assumption_ok=assumption_ok,
        n_test=test.n,
    )
