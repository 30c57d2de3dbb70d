"""Inference-time retraining experiment."""

import math

import numpy as np
import pytest

from rrmaudit import (
    ContractViolationError,
    LabeledEmbeddings,
    PotlConfig,
    constant_trainer,
    gaussian_clusters,
    interpolating_trainer,
    membership_gated_trainer,
    potl_experiment,
    procedure_s_predict,
    ridge_trainer,
    trivial_rep_fixture,
)


class TestProcedureSPredict:
    def test_label_independent_trainer_unchanged(self):
        train, test = gaussian_clusters(30, 20, 3, 4, 1.0, seed=0)
        config = PotlConfig(eta=0.1, seed=1)
        for x in test.features[:10]:
            assert procedure_s_predict(constant_trainer(2), train, x, config) == 2

    def test_single_point_training_set(self):
        train = LabeledEmbeddings(np.array([[0.5, -0.5]]), [0], 2)
        config = PotlConfig(eta=0.3, seed=2)
        pred = procedure_s_predict(
            interpolating_trainer(), train, np.array([1.0, 1.0]), config
        )
        assert pred in (0, 1)

    def test_deterministic(self):
        train, test = gaussian_clusters(40, 10, 2, 4, 3.0, seed=3)
        config = PotlConfig(eta=0.05, seed=4, trials_per_test_point=3)
        x = test.features[0]
        a = procedure_s_predict(ridge_trainer(), train, x, config)
        b = procedure_s_predict(ridge_trainer(), train, x, config)
        assert a == b

    def test_dimension_checked(self):
        train, _ = gaussian_clusters(10, 10, 2, 4, 1.0, seed=5)
        with pytest.raises(ContractViolationError):
            procedure_s_predict(
                ridge_trainer(), train, np.zeros(3), PotlConfig(eta=0.1, seed=0)
            )


class TestPotlExperiment:
    def test_zero_gap_regime_no_gain(self):
        # well-behaved ridge on separable data: nothing left to recover
        train, test = gaussian_clusters(150, 300, 2, 16, 10.0, seed=6)
        config = PotlConfig(eta=0.05, seed=7)
        res = potl_experiment(ridge_trainer(), train, test, config)
        combined_sigma = math.sqrt(2) * max(res.test_s_sigma, 1e-3)
        assert abs(res.test_s - res.test_t) <= 3 * combined_sigma
        assert res.assumption_ok

    def test_engineered_gap_recovered(self):
        # smaller sibling of the acceptance-suite criterion
        train, test = trivial_rep_fixture(gap=0.2, n_train=120, n_test=200, seed=8)
        trainer = membership_gated_trainer(ridge_trainer())
        config = PotlConfig(eta=0.05, seed=9)
        res = potl_experiment(trainer, train, test, config, assumption_trials=10)
        assert res.assumption_ok
        assert res.test_s >= res.ntrain_eta - 0.05
        assert res.test_s - res.test_t >= 0.15

    def test_interpolator_case_split(self):
        """The memorizer answers the inserted label itself, so accuracy is
        P(inserted label is the clean one) = 1/k exactly; this is the
        half-noisy / half-clean split for k=2 with NTrain = 0."""
        train, test = gaussian_clusters(50, 400, 2, 6, 1.0, seed=10)
        config = PotlConfig(eta=0.1, seed=11)
        res = potl_experiment(interpolating_trainer(), train, test, config)
        sigma = math.sqrt(0.25 / test.n)
        assert abs(res.test_s - 0.5) <= 3 * sigma
        assert res.ntrain_eta == 0.0

    def test_determinism(self):
        train, test = gaussian_clusters(40, 60, 2, 4, 3.0, seed=12)
        config = PotlConfig(eta=0.05, seed=13)
        a = potl_experiment(ridge_trainer(), train, test, config)
        b = potl_experiment(ridge_trainer(), train, test, config)
        assert a == b
