"""Exact enumeration of the noisy experiment for tiny deterministic scenarios.

For a scenario with n train samples, k classes and a trainer that is a pure
function of the label vector, the noise sample space is the k^n grid of
deviation patterns. Iterating it with exact per-pattern probabilities
(rational arithmetic over the binary-rational noise level) yields every
audited quantity with zero statistical error:

* Train(eta) and NTrain(eta) as exact rationals,
* the deviation complexity n * I(D; N) from the exact (D, N) joint law,
* the prediction complexity sum_i I(pred_i; noisy_i) from per-index laws,
* the description length H(model) from the exact law of the fitted model,
* the memorization gap and the square-root bound on it.

Every scenario must satisfy the certified chain

    deviation complexity <= prediction complexity <= description length

and, with the exact flip probability in the denominator, the memorization
gap bound; ``certify_chain`` samples random scenarios and checks both,
dumping any violator. Entropies are floats with 1e-12 tolerances;
probabilities stay exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Hashable, Optional

import numpy as np

from .datasets import LabeledEmbeddings, NoiseKind
from .errors import ContractViolationError, EnumerationLimitError
from .infotheory import entropy, mutual_information_probs
from .noise import Classifier, NoiseModel, TrainerHandle
from .rng import STREAM_SCENARIO_GEN, substream

_PATTERN_LIMIT = 3**10

# An oracle trainer maps (features, labels) to (train-set predictions,
# canonical model description); it must be deterministic with no seed.
OracleFit = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, Hashable]]


@dataclass(frozen=True)
class OracleTrainer:
    name: str
    fit: OracleFit


def constant_rule(class_index: int) -> OracleTrainer:
    """Ignores the labels entirely; the model law is a point mass."""

    def fit(features, labels):
        return np.full(len(labels), class_index, dtype=np.int64), ("const", class_index)

    return OracleTrainer(name=f"constant-{class_index}", fit=fit)


def majority_rule() -> OracleTrainer:
    """Predicts the most frequent label, ties toward the smallest class."""

    def fit(features, labels):
        c = int(np.argmax(np.bincount(labels, minlength=int(labels.max()) + 1)))
        return np.full(len(labels), c, dtype=np.int64), ("majority", c)

    return OracleTrainer(name="majority", fit=fit)


def interpolating_rule() -> OracleTrainer:
    """Reproduces its given labels exactly (table lookup)."""

    def fit(features, labels):
        labs = np.asarray(labels, dtype=np.int64)
        return labs.copy(), ("table", tuple(int(v) for v in labs))

    return OracleTrainer(name="interpolator", fit=fit)


def threshold_rule(coordinate: int = 0) -> OracleTrainer:
    """Brute-force risk minimization over 1-D thresholds, both polarities."""

    def fit(features, labels):
        x = np.asarray(features, dtype=np.float64)[:, coordinate]
        labs = np.asarray(labels, dtype=np.int64)
        vals = np.unique(x)
        cuts = np.concatenate([[vals[0] - 1.0], (vals[:-1] + vals[1:]) / 2.0, [vals[-1] + 1.0]])
        best = None
        for ci, cut in enumerate(cuts):
            for polarity in (1, 0):
                preds = np.where(x >= cut, polarity, 1 - polarity).astype(np.int64)
                errors = int(np.sum(preds != labs))
                if best is None or errors < best[0]:
                    best = (errors, preds, ("threshold", ci, polarity))
        return best[1], best[2]

    return OracleTrainer(name=f"threshold-{coordinate}", fit=fit)


def oracle_trainer_handle(otrainer: OracleTrainer) -> TrainerHandle:
    """Adapt an oracle trainer to the Monte Carlo pipeline's interface.

    The returned classifier answers by exact row lookup, which covers the
    train-set predictions the noisy experiment needs.
    """

    def fit(data: LabeledEmbeddings, labels: np.ndarray, seed: int) -> Classifier:
        preds, _ = otrainer.fit(data.features, np.asarray(labels, dtype=np.int64))
        table = {row.tobytes(): int(p) for row, p in zip(data.features, preds)}

        def predict(features: np.ndarray) -> np.ndarray:
            X = np.atleast_2d(np.asarray(features, dtype=np.float64))
            try:
                return np.array([table[row.tobytes()] for row in X], dtype=np.int64)
            except KeyError:
                raise ContractViolationError(
                    "oracle trainers only predict on their train rows"
                ) from None

        return predict

    return fit


@dataclass(frozen=True)
class ExactScenario:
    """A fully enumerable instance: tiny train set, deterministic trainer."""

    train: LabeledEmbeddings
    trainer: OracleTrainer
    noise: NoiseModel

    def __post_init__(self):
        n, k = self.train.n, self.train.num_classes
        if k**n > _PATTERN_LIMIT:
            raise EnumerationLimitError(
                f"{k}^{n} noise patterns exceed the {_PATTERN_LIMIT} budget"
            )


@dataclass(frozen=True)
class ExactQuantities:
    """Exactly computed audit quantities for one scenario.

    ``train_eta_exact``/``ntrain_eta_exact``/``memorization_gap_exact`` are
    rationals; entropic values are floats in nats.
    """

    train_eta: float
    ntrain_eta: float
    cdc: float
    cpc: float
    cmdl: float
    memorization_gap: float
    thm2_rhs: float
    flip_probability: float
    train_eta_exact: Fraction
    ntrain_eta_exact: Fraction
    memorization_gap_exact: Fraction

    @property
    def chain_holds(self) -> bool:
        return self.cdc <= self.cpc + 1e-12 and self.cpc <= self.cmdl + 1e-12

    @property
    def thm2_holds(self) -> bool:
        return self.memorization_gap <= self.thm2_rhs


def _deviation_probabilities_exact(model: NoiseModel, k: int) -> list[Fraction]:
    eta = Fraction(model.eta)  # exact value of the binary float
    if model.kind is NoiseKind.UNIFORM_ALL:
        p_nz = eta / k
        return [1 - eta + p_nz] + [p_nz] * (k - 1)
    return [1 - eta] + [eta / (k - 1)] * (k - 1)


def enumerate_scenario(scenario: ExactScenario) -> ExactQuantities:
    """Iterate every noise pattern with its exact probability."""
    train = scenario.train
    n, k = train.n, train.num_classes
    y = train.labels
    dev_probs = _deviation_probabilities_exact(scenario.noise, k)
    # pattern probability depends only on the zero / nonzero split
    pow_zero = [dev_probs[0] ** j for j in range(n + 1)]
    pow_nz = [dev_probs[1] ** j for j in range(n + 1)]

    total = Fraction(0)
    train_num = Fraction(0)
    ntrain_num = Fraction(0)
    ntrain_den = Fraction(0)
    dc_joint = [[Fraction(0)] * k for _ in range(k)]
    pc_joints = [[[Fraction(0)] * k for _ in range(k)] for _ in range(n)]
    model_law: dict[Hashable, Fraction] = {}

    for pattern in itertools.product(range(k), repeat=n):
        N = np.asarray(pattern, dtype=np.int64)
        nz = int(np.count_nonzero(N))
        prob = pow_zero[n - nz] * pow_nz[nz]
        noisy = (y + N) % k
        preds, desc = scenario.trainer.fit(train.features, noisy)
        preds = np.asarray(preds, dtype=np.int64)
        correct = preds == y
        delta = (preds - y) % k

        total += prob
        train_num += prob * Fraction(int(correct.sum()), n)
        ntrain_num += prob * int((correct & (N != 0)).sum())
        ntrain_den += prob * nz
        for i in range(n):
            dc_joint[delta[i]][N[i]] += prob
            pc_joints[i][preds[i]][noisy[i]] += prob
        model_law[desc] = model_law.get(desc, Fraction(0)) + prob

    if total != 1:
        raise ContractViolationError(f"pattern probabilities sum to {total}, not 1")

    dc = np.array([[float(v) for v in row] for row in dc_joint]) / n
    cdc = n * mutual_information_probs(dc)
    cpc = float(
        sum(
            mutual_information_probs(np.array([[float(v) for v in row] for row in joint]))
            for joint in pc_joints
        )
    )
    cmdl = entropy(np.array([float(v) for v in model_law.values()]))

    train_eta = train_num
    ntrain_eta = ntrain_num / ntrain_den
    mem = max(train_eta - ntrain_eta, Fraction(0))
    flip = ntrain_den / n  # exact E[B]
    thm2_rhs = float(np.sqrt(cdc / (2.0 * n)) / float(flip))
    return ExactQuantities(
        train_eta=float(train_eta),
        ntrain_eta=float(ntrain_eta),
        cdc=cdc,
        cpc=cpc,
        cmdl=cmdl,
        memorization_gap=float(mem),
        thm2_rhs=thm2_rhs,
        flip_probability=float(flip),
        train_eta_exact=train_eta,
        ntrain_eta_exact=ntrain_eta,
        memorization_gap_exact=mem,
    )


# ---------------------------------------------------------------------------
# certification suites


@dataclass(frozen=True)
class CertificationResult:
    passed: bool
    checked: int
    failures: tuple[str, ...] = ()


def random_scenario(rng: np.random.Generator, n_max: int = 6, k_max: int = 3) -> ExactScenario:
    """A random tiny scenario for chain certification.

    Noise is UNIFORM_OTHER so the exact flip probability equals eta and the
    nominal-denominator bound is certified too.
    """
    n = int(rng.integers(2, n_max + 1))
    k = int(rng.integers(2, k_max + 1))
    d = int(rng.integers(1, 3))
    features = rng.standard_normal((n, d))
    labels = rng.integers(0, k, size=n)
    eta = float(rng.choice([0.05, 0.1, 0.2, 0.3]))
    if k == 2:
        pool = [
            constant_rule(int(rng.integers(k))),
            majority_rule(),
            interpolating_rule(),
            threshold_rule(0),
        ]
    else:
        pool = [
            constant_rule(int(rng.integers(k))),
            majority_rule(),
            interpolating_rule(),
        ]
    trainer = pool[int(rng.integers(len(pool)))]
    return ExactScenario(
        train=LabeledEmbeddings(features, labels, k),
        trainer=trainer,
        noise=NoiseModel(kind=NoiseKind.UNIFORM_OTHER, eta=eta),
    )


def _dump_scenario(scenario: ExactScenario, q: ExactQuantities, directory: Path, idx: int) -> str:
    from .fileio import write_embeddings  # local import to avoid a cycle

    directory.mkdir(parents=True, exist_ok=True)
    emb = directory / f"counterexample-{idx}.emb"
    sidecar = directory / f"counterexample-{idx}.txt"
    write_embeddings(scenario.train, emb)
    sidecar.write_text(
        f"trainer = {scenario.trainer.name}\n"
        f"noise_model = {scenario.noise.kind.value}\n"
        f"eta = {scenario.noise.eta!r}\n"
        f"cdc = {q.cdc!r}\ncpc = {q.cpc!r}\ncmdl = {q.cmdl!r}\n"
        f"memorization_gap = {q.memorization_gap!r}\nthm2_rhs = {q.thm2_rhs!r}\n",
        encoding="utf-8",
    )
    return str(emb)


def certify_chain(
    count: int,
    seed: int,
    dump_dir: Optional[Path] = None,
    n_max: int = 6,
    k_max: int = 3,
) -> CertificationResult:
    """Exactly certify the complexity chain and the memorization bound.

    Draws ``count`` random scenarios, enumerates each, and requires
    cdc <= cpc <= cmdl (tolerance 1e-12) and memorization gap <= bound.
    Any violating scenario is dumped (embedding file plus sidecar).
    """
    if count < 1:
        raise ContractViolationError("count must be >= 1")
    rng = substream(seed, STREAM_SCENARIO_GEN)
    failures = []
    for idx in range(count):
        scenario = random_scenario(rng, n_max=n_max, k_max=k_max)
        q = enumerate_scenario(scenario)
        if not (q.chain_holds and q.thm2_holds):
            if dump_dir is not None:
                failures.append(_dump_scenario(scenario, q, Path(dump_dir), idx))
            else:
                failures.append(
                    f"scenario {idx}: trainer={scenario.trainer.name} "
                    f"cdc={q.cdc} cpc={q.cpc} cmdl={q.cmdl} "
                    f"mem={q.memorization_gap} rhs={q.thm2_rhs}"
                )
    return CertificationResult(
        passed=not failures, checked=count, failures=tuple(failures)
    )


def pinsker_grid_certification(step: float = 0.01, min_eb: float = 0.01) -> CertificationResult:
    """Exhaustive grid check of the Bernoulli conditional-shift bound.

    Sweeps all 2x2 joint tables on the given probability grid with
    E[B] >= ``min_eb`` and verifies |E[Z] - E[Z|B=1]| <= sqrt(I/2) / E[B]
    everywhere (tolerance 1e-12), vectorized over the whole grid.
    """
    m = round(1.0 / step)
    grid = np.arange(m + 1) / m
    p00, p01, p10 = np.meshgrid(grid, grid, grid, indexing="ij")
    p11 = 1.0 - p00 - p01 - p10
    valid = p11 > -1e-12
    p00, p01, p10, p11 = (a[valid] for a in (p00, p01, p10, p11))
    p11 = np.clip(p11, 0.0, 1.0)
    e_b = p01 + p11
    keep = e_b >= min_eb - 1e-12
    p00, p01, p10, p11, e_b = (a[keep] for a in (p00, p01, p10, p11, e_b))
    e_z = p10 + p11
    lhs = np.abs(e_z - p11 / e_b)

    def plogp(x):
        out = np.zeros_like(x)
        nz = x > 0
        out[nz] = x[nz] * np.log(x[nz])
        return out

    h_rows = -(plogp(1 - e_z) + plogp(e_z))
    h_cols = -(plogp(1 - e_b) + plogp(e_b))
    h_joint = -(plogp(p00) + plogp(p01) + plogp(p10) + plogp(p11))
    mi = np.maximum(h_rows + h_cols - h_joint, 0.0)
    rhs = np.sqrt(mi / 2.0) / e_b
    violations = int(np.sum(lhs > rhs + 1e-12))
    return CertificationResult(
        passed=violations == 0,
        checked=int(e_b.size),
        failures=() if violations == 0 else (f"{violations} grid points violate the bound",),
    )


def superadditivity_certification(count: int, seed: int) -> CertificationResult:
    """Random-construction check of MI super-additivity over independent parts.

    Each case draws alphabet sizes <= 3, random marginals for the independent
    pair (X, Y), and a random conditional law for W given (X, Y); the check
    is exact up to 1e-12.
    """
    from .infotheory import mi_superadditivity_check

    rng = substream(seed, STREAM_SCENARIO_GEN, 1)
    failures = []
    for idx in range(count):
        sizes = rng.integers(2, 4, size=3)
        p_x = rng.random(sizes[1]) + 0.05
        p_x /= p_x.sum()
        p_y = rng.random(sizes[2]) + 0.05
        p_y /= p_y.sum()
        w_given = rng.random((sizes[0], sizes[1], sizes[2])) + 0.01
        w_given /= w_given.sum(axis=0, keepdims=True)
        joint = w_given * p_x[None, :, None] * p_y[None, None, :]
        if not mi_superadditivity_check(joint):
            failures.append(f"case {idx} violates super-additivity")
    return CertificationResult(passed=not failures, checked=count, failures=tuple(failures))
