"""Bound assembly: the full audit and the robustness certifications.

``audit`` is the package's main entry point. It runs one clean training pass
and K noisy trials, measures the four accuracies, decomposes the gaps,
estimates the deviation complexity, and evaluates the memorization-gap bound

    sqrt(cdc / (2 n)) / denominator

where the denominator is the nominal noise level or the model's exact flip
probability. The bound is reported both raw and capped at 1 (a vacuous bound
prints as 100%).

The two robustness checks replay the classical guarantees for least-squares
heads (margin-based retention under label noise) and for empirical risk
minimization over a finite class (clean-accuracy degradation at most twice
the noise level), as Monte Carlo experiments with binomial error bars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .datasets import (
    AccuracyQuad,
    DenominatorMode,
    GapReport,
    LabeledEmbeddings,
    NoiseKind,
    TrialSummary,
    accuracy,
    assemble_gaps,
)
from .errors import ContractViolationError
from .infotheory import ComplexityEstimate, cdc_estimate, cpc_estimate
from .noise import (
    NoiseModel,
    TrainerHandle,
    corrupt_labels,
    noisy_accuracies,
    run_clean,
    run_noisy_trials,
)
from .rng import STREAM_ROBUSTNESS, substream
from .trainers import FiniteHypothesisClass, RidgeConfig, erm_fit, margin_profile, ridge_fit


@dataclass(frozen=True)
class Thm2Bound:
    """Memorization-gap bound value and the quantities that produced it."""

    cdc: float
    n: int
    eta_denominator: float
    value: float
    capped_value: float


def thm2_bound(
    cdc: Union[float, ComplexityEstimate],
    n: int,
    model: NoiseModel,
    denominator_mode: DenominatorMode = DenominatorMode.ETA,
    k: Optional[int] = None,
) -> Thm2Bound:
    """Evaluate sqrt(cdc / (2n)) / denominator, plus its value capped at 1.

    ``denominator_mode.ETA`` divides by the nominal noise level;
    ``EMPIRICAL`` divides by the model's exact flip probability, which needs
    the class count ``k`` (the two coincide for UNIFORM_OTHER noise).
    """
    value = cdc.value if isinstance(cdc, ComplexityEstimate) else float(cdc)
    if value < 0:
        raise ContractViolationError("cdc must be non-negative")
    if n < 1:
        raise ContractViolationError("n must be >= 1")
    if denominator_mode is DenominatorMode.ETA:
        denom = model.eta
    else:
        if k is None:
            raise ContractViolationError("empirical denominator needs the class count")
        denom = model.flip_probability(k)
    bound = math.sqrt(value / (2.0 * n)) / denom
    return Thm2Bound(
        cdc=value,
        n=n,
        eta_denominator=denom,
        value=bound,
        capped_value=min(bound, 1.0),
    )


def audit(
    trainer: TrainerHandle,
    train: LabeledEmbeddings,
    test: LabeledEmbeddings,
    model: NoiseModel,
    trials: int,
    seed: int,
    compute_cpc: bool = False,
    denominator_mode: DenominatorMode = DenominatorMode.ETA,
    miller_madow: bool = False,
    workers: int = 1,
) -> GapReport:
    """Run the complete audit and return its ``GapReport``.

    When no sample was corrupted in any trial (possible for tiny eta * n * K)
    the NTrain-dependent gaps are ``None`` and the report carries the flag;
    everything else is still computed.
    """
    train_acc, test_acc = run_clean(trainer, train, test, seed)
    trial_list = run_noisy_trials(trainer, train, model, trials, seed, workers=workers)
    train_noisy, ntrain_noisy = noisy_accuracies(trial_list, train.labels)
    quad = AccuracyQuad(
        train=train_acc,
        test=test_acc,
        train_noisy=train_noisy,
        ntrain_noisy=ntrain_noisy,
    )
    if quad.ntrain_defined:
        gaps = assemble_gaps(quad)
        robustness = gaps.robustness
        rationality: Optional[float] = gaps.rationality
        memorization: Optional[float] = gaps.memorization
        rrm = gaps.rrm_bound
    else:
        robustness = max(train_acc - train_noisy, 0.0)
        rationality = memorization = rrm = None
    cdc = cdc_estimate(trial_list, train.labels, train.num_classes, miller_madow)
    cpc = (
        cpc_estimate(trial_list, train.labels, train.num_classes, miller_madow)
        if compute_cpc
        else None
    )
    bound = thm2_bound(cdc, train.n, model, denominator_mode, k=train.num_classes)
    summaries = tuple(
        TrialSummary(
            trial_index=t.trial_index,
            flip_count=int(t.flip_mask.sum()),
            train_noisy=accuracy(t.train_predictions, train.labels),
            ntrain_correct=int(
                np.sum((t.train_predictions == train.labels) & t.flip_mask)
            ),
        )
        for t in trial_list
    )
    return GapReport(
        eta=model.eta,
        trials=trials,
        accuracies=quad,
        robustness_gap=robustness,
        rationality_gap=rationality,
        memorization_gap=memorization,
        generalization_gap=train_acc - test_acc,
        rrm_bound=rrm,
        noise_model=model.kind,
        bound_denominator=denominator_mode,
        base_seed=seed,
        cdc=cdc.value,
        cpc=cpc.value if cpc is not None else None,
        thm2_bound=bound.value,
        thm2_bound_capped=bound.capped_value,
        trial_summaries=summaries,
    )


# ---------------------------------------------------------------------------
# robustness certifications


@dataclass(frozen=True)
class RetentionRow:
    """One gamma row of the least-squares retention table."""

    gamma: float
    margin_fraction: float
    predicted_retention: float  # margin_fraction - 4 * flip / gamma^2
    observed_retention: float
    sigma: float
    passed: bool


def least_squares_robustness_check(
    data: LabeledEmbeddings,
    config: RidgeConfig,
    model: NoiseModel,
    gammas: Sequence[float],
    trials: int,
    seed: int,
) -> list[RetentionRow]:
    """Margin-based noise retention of the least-squares head.

    For each queried margin gamma: the clean fit retains the clean-label
    argmax on at least ``p(gamma) - 4 * flip_rate / gamma^2`` of the train
    points after noisy retraining, in expectation. The observed retention is
    pooled over ``trials`` Monte Carlo corruptions and compared at 3 sigma
    (binomial standard error). Rows with a non-positive prediction are
    vacuous and always pass.
    """
    if trials < 1:
        raise ContractViolationError("need at least one trial")
    clean = ridge_fit(data, None, config)
    profile = margin_profile(clean, data)
    flip = model.flip_probability(data.num_classes)
    retained = 0
    total = 0
    for t in range(trials):
        rng = substream(seed, STREAM_ROBUSTNESS, t)
        noisy, _ = corrupt_labels(data.labels, data.num_classes, model, rng)
        noisy_clf = ridge_fit(data, noisy, config)
        retained += int(np.sum(noisy_clf(data.features) == data.labels))
        total += data.n
    observed = retained / total
    sigma = math.sqrt(max(observed * (1 - observed), 1e-12) / total)
    rows = []
    for gamma in gammas:
        if gamma <= 0:
            raise ContractViolationError("gamma must be positive")
        p = profile(gamma)
        predicted = p - 4.0 * flip / gamma**2
        rows.append(
            RetentionRow(
                gamma=float(gamma),
                margin_fraction=p,
                predicted_retention=predicted,
                observed_retention=observed,
                sigma=sigma,
                passed=(predicted <= 0) or (observed >= predicted - 3 * sigma),
            )
        )
    return rows


@dataclass(frozen=True)
class ErmRobustnessResult:
    """Monte Carlo robustness gap of brute-force ERM against the 2*eta bound."""

    gap_estimate: float
    bound: float  # 2 * eta
    sigma: float
    passed: bool


def erm_robustness_check(
    data: LabeledEmbeddings,
    hclass: FiniteHypothesisClass,
    eta: float,
    trials: int,
    seed: int,
    kind: NoiseKind = NoiseKind.UNIFORM_OTHER,
) -> ErmRobustnessResult:
    """Estimate Train - Train(eta) for ERM and compare against 2 * eta.

    The minimizer of training error loses at most twice the realized flip
    fraction of clean-label accuracy, so the expected gap is at most 2 * eta
    under UNIFORM_OTHER noise; the check asserts estimate <= 2*eta + 3 sigma.
    """
    if trials < 1:
        raise ContractViolationError("need at least one trial")
    model = NoiseModel(kind=kind, eta=eta)
    clean_clf = erm_fit(data, None, hclass)
    clean_train = accuracy(clean_clf(data.features), data.labels)
    correct = 0
    total = 0
    for t in range(trials):
        rng = substream(seed, STREAM_ROBUSTNESS, t)
        noisy, _ = corrupt_labels(data.labels, data.num_classes, model, rng)
        clf = erm_fit(data, noisy, hclass)
        correct += int(np.sum(clf(data.features) == data.labels))
        total += data.n
    noisy_train = correct / total
    gap = clean_train - noisy_train
    sigma = math.sqrt(max(noisy_train * (1 - noisy_train), 1e-12) / total)
    bound = 2.0 * eta
    return ErmRobustnessResult(
        gap_estimate=gap,
        bound=bound,
        sigma=sigma,
        passed=gap <= bound + 3 * sigma,
    )
