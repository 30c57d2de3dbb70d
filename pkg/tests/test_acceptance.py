"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see one line per
criterion. Every tolerance is fixed here; nothing is calibrated at runtime.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from rrmaudit import (
    ExactScenario,
    LabeledEmbeddings,
    NoiseKind,
    NoiseModel,
    PotlConfig,
    RidgeConfig,
    audit,
    augment,
    cdc_estimate,
    cpc_estimate,
    certify_chain,
    enumerate_scenario,
    erm_robustness_check,
    gaussian_clusters,
    interpolating_rule,
    interpolating_trainer,
    least_squares_robustness_check,
    majority_rule,
    margin_fixture,
    membership_gated_trainer,
    noisy_accuracies,
    oracle_trainer_handle,
    pinsker_grid_certification,
    potl_experiment,
    ridge_trainer,
    run_noisy_trials,
    superadditivity_certification,
    threshold_hypotheses,
    threshold_rule,
    trivial_rep_fixture,
)
from rrmaudit.cli import _erm_fixture
from rrmaudit.rng import substream


@contextmanager
def criterion(number: int, name: str, budget_seconds: float):
    start = time.time()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:2d} FAIL {name} ({time.time() - start:.1f}s)")
        raise
    elapsed = time.time() - start
    print(f"ACCEPTANCE {number:2d} PASS {name} ({elapsed:.1f}s)")
    assert elapsed < budget_seconds, f"criterion {number} exceeded {budget_seconds}s"


def test_criterion_1_rrm_structural_identity():
    with criterion(1, "RRM identity on 50 randomized audits", 120):
        rng = np.random.default_rng(2024)
        ks = [2, 3, 10]
        etas = [0.01, 0.05, 0.2]
        for i in range(50):
            n = int(rng.integers(100, 2001))
            k = ks[i % 3]
            eta = etas[(i // 3) % 3]
            sep = float(rng.uniform(0.0, 6.0))
            train, test = gaussian_clusters(
                n, max(60, n // 4), k, max(k, 12), sep, seed=1000 + i
            )
            model = NoiseModel(NoiseKind.UNIFORM_ALL, eta)
            report = audit(ridge_trainer(), train, test, model, trials=10, seed=i)
            assert report.ntrain_defined, f"audit {i}: NTrain undefined"
            assert report.generalization_gap <= report.rrm_bound


def test_criterion_2_complexity_chain():
    with criterion(2, "complexity chain on 100 exact scenarios", 60):
        result = certify_chain(100, seed=7)
        assert result.passed, result.failures
        assert result.checked == 100


def test_criterion_3_memorization_bound_exact():
    with criterion(3, "memorization bound exact on every scenario", 60):
        rng = substream(7, 2)  # STREAM_SCENARIO_GEN, same stream as suite 2
        from rrmaudit.oracle import random_scenario

        for _ in range(100):
            scenario = random_scenario(rng)
            q = enumerate_scenario(scenario)
            assert q.memorization_gap <= q.thm2_rhs, scenario.trainer.name


def test_criterion_4_bernoulli_bound_grid():
    with criterion(4, "Bernoulli conditional-shift bound on 0.01 grid", 30):
        result = pinsker_grid_certification(step=0.01, min_eb=0.01)
        assert result.passed, result.failures
        assert result.checked > 100_000


def test_criterion_5_mi_superadditivity():
    with criterion(5, "MI super-additivity on 200 random joints", 10):
        result = superadditivity_certification(200, seed=11)
        assert result.passed, result.failures
        assert result.checked == 200


def test_criterion_6_erm_robustness():
    with criterion(6, "ERM robustness gap <= 2 eta + 3 sigma", 30):
        data = _erm_fixture(3, n=100)
        hclass = threshold_hypotheses(data.features[:, 0])
        result = erm_robustness_check(data, hclass, eta=0.1, trials=200, seed=3)
        assert result.gap_estimate <= 2 * 0.1 + 3 * result.sigma
        assert result.passed


def test_criterion_7_least_squares_retention():
    with criterion(7, "least-squares margin retention >= 0.8 - 3 sigma", 60):
        data, _ = margin_fixture([(1.0, 1.0)], 100, seed=5)
        config = RidgeConfig(lam=0.0, fit_bias=False)
        model = NoiseModel(NoiseKind.UNIFORM_OTHER, 0.05)
        rows = least_squares_robustness_check(data, config, model, [1.0], 100, seed=5)
        row = rows[0]
        assert row.margin_fraction == 1.0
        assert row.predicted_retention == pytest.approx(1.0 - 4 * 0.05)
        assert row.observed_retention >= 0.8 - 3 * row.sigma


def test_criterion_8_rationality_gap_recovery():
    with criterion(8, "inference-time retraining recovers the gap", 300):
        train, test = trivial_rep_fixture(gap=0.2, n_train=200, n_test=500, seed=42)
        trainer = membership_gated_trainer(ridge_trainer(RidgeConfig(lam=1e-6)))
        config = PotlConfig(eta=0.05, seed=77, trials_per_test_point=1)
        result = potl_experiment(trainer, train, test, config, assumption_trials=20)
        assert result.assumption_ok
        assert result.test_s >= result.ntrain_eta - 0.05
        assert result.test_s - result.test_t >= 0.15


def _consistency_scenarios():
    rng = np.random.default_rng(0)
    f4 = rng.standard_normal((4, 1))
    f5 = rng.standard_normal((5, 1))
    f6 = rng.standard_normal((6, 2))
    uo = NoiseKind.UNIFORM_OTHER
    return [
        ExactScenario(
            LabeledEmbeddings(f4, [0, 1, 0, 1], 2),
            interpolating_rule(),
            NoiseModel(uo, 0.1),
        ),
        ExactScenario(
            LabeledEmbeddings(f6, [0, 1, 0, 1, 1, 0], 2),
            interpolating_rule(),
            NoiseModel(uo, 0.2),
        ),
        ExactScenario(
            LabeledEmbeddings(f4, [0, 1, 2, 1], 3),
            interpolating_rule(),
            NoiseModel(uo, 0.15),
        ),
        ExactScenario(
            LabeledEmbeddings(np.sort(f5, axis=0), [0, 0, 1, 0, 1], 2),
            threshold_rule(),
            NoiseModel(uo, 0.2),
        ),
        ExactScenario(
            LabeledEmbeddings(f5, [0, 0, 1, 0, 1], 2),
            majority_rule(),
            NoiseModel(uo, 0.4),
        ),
    ]


def test_criterion_9_estimator_consistency():
    with criterion(9, "Monte Carlo estimates match exact values", 180):
        for scenario in _consistency_scenarios():
            exact = enumerate_scenario(scenario)
            handle = oracle_trainer_handle(scenario.trainer)
            trials = run_noisy_trials(
                handle, scenario.train, scenario.noise, 100_000, base_seed=5
            )
            labels = scenario.train.labels
            est = cdc_estimate(trials, labels, scenario.train.num_classes)
            assert abs(est.value - exact.cdc) / exact.cdc < 0.01, scenario.trainer.name

            train_mc, ntrain_mc = noisy_accuracies(trials, labels)
            per_trial = np.array(
                [np.mean(t.train_predictions == labels) for t in trials]
            )
            sigma_train = per_trial.std(ddof=1) / math.sqrt(len(trials))
            assert abs(train_mc - exact.train_eta) <= 3 * sigma_train + 1e-12

            num = np.array(
                [
                    int(np.sum((t.train_predictions == labels) & t.flip_mask))
                    for t in trials
                ],
                dtype=float,
            )
            den = np.array([int(t.flip_mask.sum()) for t in trials], dtype=float)
            ratio = num.sum() / den.sum()
            sigma_ntrain = math.sqrt(np.sum((num - ratio * den) ** 2)) / den.sum()
            assert abs(ntrain_mc - exact.ntrain_eta) <= 3 * sigma_ntrain + 1e-12


def test_criterion_10_trial_convergence():
    with criterion(10, "deviation complexity converges within 20 trials", 60):
        train, _ = gaussian_clusters(1000, 100, 2, 600, 1.0, seed=11)
        model = NoiseModel(NoiseKind.UNIFORM_ALL, 0.05)
        trainer = ridge_trainer(RidgeConfig(lam=1e-6))
        trials = run_noisy_trials(trainer, train, model, 20, base_seed=3)
        k, n = train.num_classes, train.n
        cdc_15 = cdc_estimate(trials[:15], train.labels, k).value
        cdc_20 = cdc_estimate(trials[:20], train.labels, k).value
        assert abs(cdc_20 - cdc_15) / cdc_20 < 0.10
        for K in range(2, 21):
            cdc_k = cdc_estimate(trials[:K], train.labels, k).value
            cpc_k = cpc_estimate(trials[:K], train.labels, k).value
            # allowance: summed per-index plug-in bias of the prediction
            # complexity, n * (k-1)^2 / (2K)
            allowance = n * (k - 1) ** 2 / (2 * K)
            assert cdc_k <= cpc_k + allowance, f"K={K}"


def test_criterion_11_interpolator_signature():
    with criterion(11, "interpolator: NTrain = 0, gap >= 0.85, capped bound", 30):
        train, test = gaussian_clusters(400, 100, 10, 12, 1.0, seed=13)
        model = NoiseModel(NoiseKind.UNIFORM_ALL, 0.05)
        report = audit(interpolating_trainer(), train, test, model, trials=8, seed=14)
        assert report.accuracies.ntrain_noisy == 0.0
        assert report.memorization_gap >= 0.85
        assert report.thm2_bound_capped == 1.0


def _per_trial_memorization_sigma(report):
    gaps = []
    for summary in report.trial_summaries:
        if summary.flip_count == 0:
            continue
        gaps.append(summary.train_noisy - summary.ntrain_correct / summary.flip_count)
    gaps = np.asarray(gaps)
    return gaps.std(ddof=1) / math.sqrt(len(gaps))


def test_criterion_12_augmentation_direction():
    with criterion(12, "augmentation shrinks memorization and the bound", 180):
        base_train, test = gaussian_clusters(150, 300, 2, 64, 2.0, seed=21)
        model = NoiseModel(NoiseKind.UNIFORM_ALL, 0.05)
        trainer = ridge_trainer(RidgeConfig(lam=1e-6))
        reports = {}
        for t in (1, 10):
            train_t = augment(base_train, t, jitter=0.1, seed=33)
            reports[t] = audit(trainer, train_t, test, model, trials=20, seed=4)
        sigma = math.sqrt(
            _per_trial_memorization_sigma(reports[1]) ** 2
            + _per_trial_memorization_sigma(reports[10]) ** 2
        )
        assert reports[10].memorization_gap <= reports[1].memorization_gap + 3 * sigma
        assert reports[10].thm2_bound < reports[1].thm2_bound
