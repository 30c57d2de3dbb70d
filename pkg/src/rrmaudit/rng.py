"""Deterministic random-stream derivation.

All randomness in the package flows through numpy's PCG64 generator seeded
with a ``SeedSequence``. Independent substreams (one per noisy trial, one per
test point in the inference-time experiment, and so on) are derived from a
single 64-bit base seed through ``SeedSequence(base_seed, spawn_key=...)``,
numpy's documented splittable mechanism. The derivation is therefore
platform-stable: identical (base_seed, stream, index) always yields the same
bit stream for a given numpy version.

Stream ids keep unrelated consumers from colliding on the same spawn key.
"""

from __future__ import annotations

import numpy as np

# spawn-key stream ids; never reuse a value for a new consumer
STREAM_NOISE_TRIAL = 0
STREAM_INSERTED_POINT = 1
STREAM_SCENARIO_GEN = 2
STREAM_DATAGEN = 3
STREAM_ROBUSTNESS = 4

_MASK64 = (1 << 64) - 1


def seed_sequence(base_seed: int, *key: int) -> np.random.SeedSequence:
    """SeedSequence for ``base_seed`` refined by a spawn-key path."""
    return np.random.SeedSequence(entropy=base_seed & _MASK64, spawn_key=tuple(key))


def substream(base_seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator on the substream addressed by ``key``.

    ``substream(s)`` with an empty key is the root stream for seed ``s``;
    ``substream(s, STREAM_NOISE_TRIAL, t)`` is the stream of trial ``t``.
    """
    return np.random.Generator(np.random.PCG64(seed_sequence(base_seed, *key)))
