"""Synthetic dataset generators and representation-space augmentation.

Three presets cover the audit'r test needs:

* ``gaussian``  - unit-variance isotropic clusters with configurable pairwise
  mean separation (in sigma units); separation 10 is effectively noiseless,
  separation 0 makes the classes indistinguishable.
* ``trivialrep`` - the adversarial large-rationality-gap fixture. Train and
  test are drawn from the same cluster distribution, with the class balance
  skewed so that a trainer answering the trivial constant class 0 on
  non-members lands a prescribed distance below the noisy-train accuracy.
  Pair it with ``membership_gated_trainer(ridge_trainer())``: memorization
  stays small while the generalization gap is large.
* ``margins``   - blocks of duplicated basis-vector features whose label mix
  forces the unregularized least-squares fit to exact prescribed score
  margins (class weight alpha = (1+gamma)/2 within a block gives margin
  gamma). Fit these with ``RidgeConfig(lam=0, fit_bias=False)``; the bias
  column lies in the span of the block indicators and would be singular.

All generators are deterministic functions of their spec and seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .datasets import LabeledEmbeddings
from .errors import ContractViolationError
from .rng import STREAM_DATAGEN, substream

# expected noisy-train accuracy of the paired membership-gated ridge trainer
# on a well-separated fixture; the trivialrep class balance is tuned to it
_EXPECTED_NTRAIN = 0.98


@dataclass(frozen=True)
class SynthSpec:
    """Declarative description of a synthetic dataset pair."""

    preset: str
    n_train: int
    n_test: int
    seed: int
    dim: int = 16
    classes: int = 2
    sep: float = 10.0
    gap: float = 0.2
    margins: tuple[tuple[float, float], ...] = ((1.0, 1.0),)

    def __post_init__(self):
        if self.preset not in ("gaussian", "trivialrep", "margins"):
            raise ContractViolationError(f"unknown preset {self.preset!r}")
        if self.n_train < 1 or self.n_test < 1:
            raise ContractViolationError("need at least one train and test row")
        if self.classes < 2:
            raise ContractViolationError("need at least 2 classes")
        if self.sep < 0:
            raise ContractViolationError("separation must be non-negative")


def _cluster_sample(
    rng: np.random.Generator,
    counts: Sequence[int],
    means: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    rows = []
    labels = []
    for c, count in enumerate(counts):
        rows.append(means[c] + rng.standard_normal((count, means.shape[1])))
        labels.append(np.full(count, c, dtype=np.int64))
    feats = np.vstack(rows)
    labs = np.concatenate(labels)
    order = rng.permutation(labs.size)
    return feats[order], labs[order]


def _class_counts(n: int, probs: Sequence[float]) -> list[int]:
    """Deterministic per-class counts proportional to ``probs`` summing to n."""
    raw = [p * n for p in probs]
    counts = [int(np.floor(r)) for r in raw]
    shortfall = n - sum(counts)
    remainders = np.argsort([c - r for c, r in zip(counts, raw)])
    for idx in remainders[:shortfall]:
        counts[idx] += 1
    if min(counts) < 1:
        raise ContractViolationError("every class needs at least one sample")
    return counts


def gaussian_clusters(
    n_train: int,
    n_test: int,
    k: int,
    d: int,
    sep: float,
    seed: int,
    class_probs: Optional[Sequence[float]] = None,
) -> tuple[LabeledEmbeddings, LabeledEmbeddings]:
    """Isotropic unit-variance clusters at pairwise mean distance ``sep``."""
    if d < k and sep > 0:
        raise ContractViolationError("need dim >= classes to separate the means")
    probs = [1.0 / k] * k if class_probs is None else list(class_probs)
    if len(probs) != k or abs(sum(probs) - 1.0) > 1e-9:
        raise ContractViolationError("class_probs must be a length-k distribution")
    means = np.zeros((k, d))
    if sep > 0:
        for c in range(k):
            means[c, c] = sep / np.sqrt(2.0)  # pairwise distance exactly sep
    rng_train = substream(seed, STREAM_DATAGEN, 0)
    rng_test = substream(seed, STREAM_DATAGEN, 1)
    train_f, train_y = _cluster_sample(rng_train, _class_counts(n_train, probs), means)
    test_f, test_y = _cluster_sample(rng_test, _class_counts(n_test, probs), means)
    return (
        LabeledEmbeddings(train_f, train_y, k),
        LabeledEmbeddings(test_f, test_y, k),
    )


def trivial_rep_fixture(
    gap: float,
    n_train: int,
    n_test: int,
    seed: int,
    d: int = 16,
    sep: float = 10.0,
) -> tuple[LabeledEmbeddings, LabeledEmbeddings]:
    """Two-class fixture whose paired trainer exhibits rationality gap ~ ``gap``.

    The membership-gated trainer answers class 0 on every non-member, so its
    test accuracy equals the class-0 frequency; setting that frequency to
    (expected noisy-train accuracy - gap) engineers the gap. Train and test
    share one distribution, as the inference-time retraining theorem assumes.
    """
    if not (0.0 < gap < 0.8):
        raise ContractViolationError("target rationality gap must lie in (0, 0.8)")
    q0 = float(np.clip(_EXPECTED_NTRAIN - gap, 0.55, 0.95))
    return gaussian_clusters(
        n_train, n_test, k=2, d=d, sep=sep, seed=seed, class_probs=[q0, 1.0 - q0]
    )


def margin_fixture(
    margins: Sequence[tuple[float, float]],
    n: int,
    seed: int,
) -> tuple[LabeledEmbeddings, LabeledEmbeddings]:
    """Data whose lam=0, bias-free least-squares fit has exact margins.

    ``margins`` lists (gamma, fraction) pairs with fractions summing to 1 and
    gamma in (0, 1]. Each gamma must make (1+gamma)/2 a small-denominator
    rational; block sizes are that denominator, and the row count is rounded
    to a feasible multiple. Returns (train, test) with test = train.
    """
    if not margins:
        raise ContractViolationError("need at least one (gamma, fraction) pair")
    if abs(sum(f for _, f in margins) - 1.0) > 1e-9:
        raise ContractViolationError("margin fractions must sum to 1")
    blocks: list[tuple[int, int]] = []  # (block size m, majority count)
    for gamma, fraction in margins:
        if not (0.0 < gamma <= 1.0):
            raise ContractViolationError("gamma must lie in (0, 1]")
        alpha = Fraction(1 + Fraction(gamma).limit_denominator(1000), 2)
        m = alpha.denominator
        if m > 64:
            raise ContractViolationError(
                f"margin {gamma} needs block size {m}; use a coarser value"
            )
        n_groups = max(1, round(n * fraction / m))
        blocks.extend([(m, int(alpha * m))] * n_groups)
    total = sum(m for m, _ in blocks)
    d = len(blocks)
    feats = np.zeros((total, d))
    labels = np.zeros(total, dtype=np.int64)
    row = 0
    for j, (m, majority) in enumerate(blocks):
        feats[row : row + m, j] = 1.0
        # alternate the majority class across blocks so both classes appear
        cls = j % 2
        labels[row : row + m] = 1 - cls
        labels[row : row + majority] = cls
        row += m
    rng = substream(seed, STREAM_DATAGEN, 2)
    order = rng.permutation(total)
    data = LabeledEmbeddings(feats[order], labels[order], 2)
    return data, data


def synth(spec: SynthSpec) -> tuple[LabeledEmbeddings, LabeledEmbeddings]:
    """Materialize the dataset pair described by ``spec``."""
    if spec.preset == "gaussian":
        return gaussian_clusters(
            spec.n_train, spec.n_test, spec.classes, spec.dim, spec.sep, spec.seed
        )
    if spec.preset == "trivialrep":
        return trivial_rep_fixture(
            spec.gap, spec.n_train, spec.n_test, spec.seed, d=spec.dim, sep=spec.sep
        )
    return margin_fixture(list(spec.margins), spec.n_train, spec.seed)


def augment(
    data: LabeledEmbeddings,
    t: int,
    jitter: float,
    seed: int,
) -> LabeledEmbeddings:
    """Expand each row into ``t`` jittered copies sharing a group id.

    Copies keep the clean label; the jitter is i.i.d. Gaussian per coordinate
    with standard deviation ``jitter`` (0 reproduces the rows exactly). The
    group id is the base row index, so every group has exactly ``t`` members.
    Downstream noisy experiments corrupt each copy independently.
    """
    if t < 1:
        raise ContractViolationError("need at least one copy per point")
    if jitter < 0:
        raise ContractViolationError("jitter must be non-negative")
    feats = np.repeat(data.features, t, axis=0)
    labels = np.repeat(data.labels, t)
    groups = np.repeat(np.arange(data.n, dtype=np.int64), t)
    if jitter > 0:
        rng = substream(seed, STREAM_DATAGEN, 3)
        feats = feats + jitter * rng.standard_normal(feats.shape)
    return LabeledEmbeddings(feats, labels, data.num_classes, group_ids=groups)
