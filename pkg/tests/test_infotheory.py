"""Entropy, mutual information, complexity estimates, and the MI lemmas."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rrmaudit import (
    ContractViolationError,
    IndependenceError,
    InsufficientTrialsError,
    JointHistogram,
    cdc_estimate,
    constant_trainer,
    cpc_estimate,
    entropy,
    gaussian_clusters,
    interpolating_trainer,
    mi_superadditivity_check,
    mutual_information,
    mutual_information_probs,
    pinsker_gap_bound,
    run_noisy_trials,
)
from rrmaudit.datasets import NoiseKind
from rrmaudit.infotheory import _entropy_unnormalized
from rrmaudit.noise import NoiseModel

# independent four-term oracle for 2x2 MI: sum p * log(p / (p_row * p_col))
def _mi_four_term(q):
    q = np.asarray(q, dtype=np.float64)
    rows = q.sum(axis=1)
    cols = q.sum(axis=0)
    total = 0.0
    for i in range(2):
        for j in range(2):
            if q[i, j] > 0:
                total += q[i, j] * math.log(q[i, j] / (rows[i] * cols[j]))
    return total


class TestEntropy:
    def test_deterministic(self):
        assert entropy([1.0, 0.0]) == 0.0

    def test_fair_coin(self):
        assert entropy([0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-12)

    def test_uniform_four(self):
        assert entropy([0.25] * 4) == pytest.approx(math.log(4), abs=1e-12)

    def test_invalid_distribution(self):
        with pytest.raises(ContractViolationError):
            entropy([0.5, 0.6])
        with pytest.raises(ContractViolationError):
            entropy([-0.1, 1.1])


class TestMutualInformation:
    def test_product_joint_is_zero(self):
        counts = np.outer([30, 10], [20, 50])  # exact product of marginals
        assert mutual_information(JointHistogram(counts=counts)) <= 1e-12

    def test_diagonal_is_log2(self):
        hist = JointHistogram(counts=[[50, 0], [0, 50]])
        assert mutual_information(hist) == pytest.approx(math.log(2), abs=1e-12)

    def test_large_count_matches_four_term_formula(self):
        q = np.array([[0.4, 0.1], [0.1, 0.4]])
        counts = (q * 1_000_000).astype(np.int64)
        got = mutual_information(JointHistogram(counts=counts))
        assert got == pytest.approx(_mi_four_term(q), abs=1e-4)

    def test_symmetry_under_transpose(self):
        counts = np.array([[13, 7, 2], [4, 25, 9]])
        a = mutual_information(JointHistogram(counts=counts))
        b = mutual_information(JointHistogram(counts=counts.T))
        assert a == pytest.approx(b, abs=1e-12)

    @given(
        counts=arrays(np.int64, (3, 3), elements=st.integers(0, 40)).filter(
            lambda c: c.sum() > 0
        )
    )
    @settings(max_examples=150, deadline=None)
    def test_bounded_by_marginal_entropies(self, counts):
        hist = JointHistogram(counts=counts)
        mi = mutual_information(hist)
        h_row = _entropy_unnormalized(counts.sum(axis=1).astype(float))
        h_col = _entropy_unnormalized(counts.sum(axis=0).astype(float))
        assert 0.0 <= mi <= min(h_row, h_col) + 1e-12


class TestComplexityEstimates:
    def _trials(self, trainer, n=300, k=3, eta=0.1, count=6, seed=0):
        train, _ = gaussian_clusters(n, 10, k, 8, 1.0, seed=seed)
        model = NoiseModel(kind=NoiseKind.UNIFORM_OTHER, eta=eta)
        return train, run_noisy_trials(trainer, train, model, count, base_seed=seed)

    def test_cdc_constant_trainer_near_zero(self):
        train, trials = self._trials(constant_trainer(0))
        est = cdc_estimate(trials, train.labels, train.num_classes)
        k = train.num_classes
        bias = (k - 1) ** 2 / (2 * est.sample_count)
        assert est.value / train.n <= 3 * bias + 1e-9

    def test_cdc_interpolator_equals_pooled_deviation_entropy(self):
        train, trials = self._trials(interpolating_trainer())
        est = cdc_estimate(trials, train.labels, train.num_classes)
        pooled = np.concatenate([t.noise_deviations for t in trials])
        counts = np.bincount(pooled, minlength=train.num_classes).astype(float)
        h_n = _entropy_unnormalized(counts)
        assert est.value == pytest.approx(train.n * h_n, abs=1e-9)

    def test_cpc_interpolator_equals_per_index_label_entropy(self):
        train, trials = self._trials(interpolating_trainer(), n=50, count=40)
        est = cpc_estimate(trials, train.labels, train.num_classes)
        k = train.num_classes
        total = 0.0
        for i in range(train.n):
            noisy_i = np.array(
                [(t.noise_deviations[i] + train.labels[i]) % k for t in trials]
            )
            counts = np.bincount(noisy_i, minlength=k).astype(float)
            total += _entropy_unnormalized(counts)
        assert est.value == pytest.approx(total, abs=1e-9)

    def test_cpc_constant_with_miller_madow_near_zero(self):
        train, trials = self._trials(constant_trainer(1), n=40, count=50)
        est = cpc_estimate(trials, train.labels, train.num_classes, miller_madow=True)
        k = train.num_classes
        allowance = (k - 1) ** 2 / (2 * len(trials))
        assert est.value / train.n <= allowance + 1e-9

    def test_cpc_needs_two_trials(self):
        train, trials = self._trials(constant_trainer(0), count=1)
        with pytest.raises(InsufficientTrialsError):
            cpc_estimate(trials[:1], train.labels, train.num_classes)

    def test_cdc_le_cpc_on_shared_trials(self):
        train, trials = self._trials(interpolating_trainer(), n=80, count=12)
        cdc = cdc_estimate(trials, train.labels, train.num_classes).value
        cpc = cpc_estimate(trials, train.labels, train.num_classes).value
        k = train.num_classes
        allowance = train.n * (k - 1) ** 2 / (2 * len(trials))
        assert cdc <= cpc + allowance


class TestPinskerGapBound:
    def test_independent_joint(self):
        q = np.outer([0.3, 0.7], [0.5, 0.5])
        lhs, rhs = pinsker_gap_bound(q)
        assert lhs == pytest.approx(0.0, abs=1e-12)
        assert rhs == pytest.approx(0.0, abs=1e-9)

    def test_worked_example(self):
        q = np.array([[0.4, 0.1], [0.1, 0.4]])
        lhs, rhs = pinsker_gap_bound(q)
        assert lhs == pytest.approx(0.3, abs=1e-12)
        assert rhs == pytest.approx(math.sqrt(_mi_four_term(q) / 2) / 0.5, abs=1e-12)
        assert lhs <= rhs

    def test_zero_conditioning_mass_rejected(self):
        with pytest.raises(ContractViolationError):
            pinsker_gap_bound(np.array([[0.5, 0.0], [0.5, 0.0]]))


class TestSuperadditivity:
    def test_pair_of_fair_bits_equality(self):
        # W = (X, Y): I(W; X,Y) = 2 ln 2 = I(W;X) + I(W;Y)
        p = np.zeros((4, 2, 2))
        for x in range(2):
            for y in range(2):
                p[2 * x + y, x, y] = 0.25
        assert mi_superadditivity_check(p)
        i_joint = mutual_information_probs(p.reshape(4, 4))
        assert i_joint == pytest.approx(2 * math.log(2), abs=1e-12)

    def test_constant_w(self):
        p = np.zeros((1, 2, 2))
        p[0] = np.outer([0.4, 0.6], [0.3, 0.7])
        assert mi_superadditivity_check(p)

    def test_dependence_detected(self):
        p = np.zeros((2, 2, 2))
        p[0, 0, 0] = 0.5
        p[1, 1, 1] = 0.5  # X and Y perfectly correlated
        with pytest.raises(IndependenceError):
            mi_superadditivity_check(p)
