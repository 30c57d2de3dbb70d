"""Dataset loading by identifier string.

Supported identifiers:

* ``cifar10:<root>``    - the torchvision CIFAR-10 train/test splits from a
  local copy (nothing is downloaded).
* ``synthetic:<n_train>:<n_test>:<k>[:<size>]`` - deterministic colored-noise
  images with class-dependent tint, for pipeline tests without any external
  data.

Each loader returns ((train_images, train_labels), (test_images,
test_labels), num_classes) with PIL images.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from .writer import ExportError


def _synthetic_split(n: int, k: int, size: int, rng: np.random.Generator):
    images, labels = [], []
    tints = np.linspace(40, 215, k)
    for i in range(n):
        label = i % k
        base = np.full((size, size, 3), tints[label])
        noise = rng.normal(0, 40, size=(size, size, 3))
        arr = np.clip(base + noise, 0, 255).astype(np.uint8)
        images.append(Image.fromarray(arr))
        labels.append(label)
    return images, labels


def load_dataset(dataset_id: str, seed: int):
    kind, _, rest = dataset_id.partition(":")
    if kind == "synthetic":
        parts = rest.split(":")
        if len(parts) not in (3, 4):
            raise ExportError(
                "synthetic id must be 'synthetic:<n_train>:<n_test>:<k>[:<size>]'"
            )
        n_train, n_test, k = (int(p) for p in parts[:3])
        size = int(parts[3]) if len(parts) == 4 else 32
        if k < 2 or n_train < 1 or n_test < 1:
            raise ExportError("need k >= 2 and non-empty splits")
        rng_train = np.random.default_rng([seed, 0])
        rng_test = np.random.default_rng([seed, 1])
        return (
            _synthetic_split(n_train, k, size, rng_train),
            _synthetic_split(n_test, k, size, rng_test),
            k,
        )
    if kind == "cifar10":
        if not rest:
            raise ExportError("cifar10 id must be 'cifar10:<root>'")
        try:
            from torchvision.datasets import CIFAR10

            train = CIFAR10(rest, train=True, download=False)
            test = CIFAR10(rest, train=False, download=False)
        except RuntimeError as exc:
            raise ExportError(f"CIFAR-10 not available under {rest!r}: {exc}") from exc
        train_images = [img for img, _ in train]
        train_labels = [int(lab) for _, lab in train]
        test_images = [img for img, _ in test]
        test_labels = [int(lab) for _, lab in test]
        return (train_images, train_labels), (test_images, test_labels), 10
    raise ExportError(f"unknown dataset kind {kind!r}")
