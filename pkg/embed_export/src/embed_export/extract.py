"""Frozen-model feature extraction with optional pixel augmentations.

The representation is the model's penultimate pooled activation (the input
of the classification head), obtained by swapping the head for an identity.
Augmented copies of one base image share a group id; the base index is the
group. Everything is seeded: per-image augmentation randomness derives from
(seed, split, image index, copy index), so a frozen model and a fixed seed
give byte-identical exports.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import torch
from torch import nn
from torchvision import models as tv_models
from torchvision import transforms

from .writer import ExportError, write_embedding_file

_ARCHS = {
    "resnet18": tv_models.resnet18,
    "resnet34": tv_models.resnet34,
    "resnet50": tv_models.resnet50,
}


def load_feature_extractor(model_id: str) -> tuple[nn.Module, str]:
    """Build the frozen trunk for ``<arch>:<checkpoint>``.

    ``checkpoint`` is a path to a saved ``state_dict``, or ``random-<seed>``
    for a seeded random initialization (useful for pipeline tests). The
    returned module maps image batches to penultimate pooled features.
    """
    arch, _, source = model_id.partition(":")
    if arch not in _ARCHS:
        raise ExportError(f"unknown architecture {arch!r}; know {sorted(_ARCHS)}")
    if not source:
        raise ExportError("model id must be '<arch>:<checkpoint path>' or '<arch>:random-<seed>'")
    if source.startswith("random-"):
        torch.manual_seed(int(source.split("-", 1)[1]))
        model = _ARCHS[arch](weights=None)
        note = f"{arch}, random init ({source})"
    else:
        path = Path(source)
        if not path.exists():
            raise ExportError(f"checkpoint not found: {path}")
        model = _ARCHS[arch](weights=None)
        state = torch.load(path, map_location="cpu", weights_only=True)
        # tolerate a missing classification head in the checkpoint
        missing, unexpected = model.load_state_dict(state, strict=False)
        real_missing = [k for k in missing if not k.startswith("fc.")]
        if real_missing or unexpected:
            raise ExportError(
                f"checkpoint does not match {arch}: missing {real_missing}, "
                f"unexpected {list(unexpected)}"
            )
        note = f"{arch}, checkpoint {path.name}"
    model.fc = nn.Identity()
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model, note + "; features = penultimate pooled activations"


def augmentation_transform(size: int) -> transforms.Compose:
    """Contrastive-style pixel augmentation pipeline."""
    return transforms.Compose(
        [
            transforms.RandomResizedCrop(size, scale=(0.2, 1.0), antialias=True),
            transforms.RandomHorizontalFlip(),
            transforms.RandomApply(
                [transforms.ColorJitter(0.4, 0.4, 0.4, 0.1)], p=0.8
            ),
            transforms.RandomGrayscale(p=0.2),
            transforms.ToTensor(),
        ]
    )


_PLAIN = transforms.ToTensor()


@dataclass(frozen=True)
class ExportSpec:
    """One export job: frozen model + dataset -> embedding file pair."""

    model: str
    dataset: str
    augmentations: int  # t; 0 = plain single copy of each train image
    train_out: str
    test_out: str
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.augmentations < 0:
            raise ExportError("augmentations must be >= 0")
        if self.batch_size < 1:
            raise ExportError("batch size must be >= 1")


def _batched_features(model: nn.Module, tensors: list[torch.Tensor], batch_size: int):
    chunks = []
    with torch.no_grad():
        for start in range(0, len(tensors), batch_size):
            batch = torch.stack(tensors[start : start + batch_size])
            chunks.append(model(batch).cpu().numpy())
    return np.concatenate(chunks, axis=0)


def extract_split(
    model: nn.Module,
    images: Sequence,
    labels: Sequence[int],
    num_classes: int,
    t: int,
    seed: int,
    split_id: int,
    batch_size: int,
) -> tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """Features for one split; ``t >= 1`` makes t augmented copies per image."""
    if len(images) == 0:
        raise ExportError("empty split")
    size = images[0].size[0]
    aug = augmentation_transform(size)
    tensors: list[torch.Tensor] = []
    out_labels: list[int] = []
    groups: list[int] = []
    for idx, (img, label) in enumerate(zip(images, labels)):
        if t == 0:
            tensors.append(_PLAIN(img))
            out_labels.append(int(label))
        else:
            for copy in range(t):
                # explicit integer mix; stable across processes and platforms
                draw_seed = (
                    seed * 1_000_003 + split_id * 8_191 + idx * 131 + copy
                ) & 0x7FFFFFFF
                torch.manual_seed(draw_seed)
                tensors.append(aug(img))
                out_labels.append(int(label))
                groups.append(idx)
    feats = _batched_features(model, tensors, batch_size)
    group_arr = np.asarray(groups, dtype=np.uint32) if t > 0 else None
    return feats, np.asarray(out_labels, dtype=np.uint32), group_arr


def export(spec: ExportSpec) -> tuple[str, str]:
    """Run the export; returns the two output paths.

    The train split receives the augmentation expansion; the test split is
    always written plain. A sidecar text note records the model identity and
    which layer the features come from.
    """
    from .data import load_dataset

    model, note = load_feature_extractor(spec.model)
    (train_images, train_labels), (test_images, test_labels), k = load_dataset(
        spec.dataset, spec.seed
    )
    feats, labels, groups = extract_split(
        model, train_images, train_labels, k, spec.augmentations,
        spec.seed, 0, spec.batch_size,
    )
    write_embedding_file(spec.train_out, feats, labels, k, groups)
    feats, labels, _ = extract_split(
        model, test_images, test_labels, k, 0, spec.seed, 1, spec.batch_size
    )
    write_embedding_file(spec.test_out, feats, labels, k, None)
    Path(str(spec.train_out) + ".note.txt").write_text(
        f"model = {note}\ndataset = {spec.dataset}\n"
        f"augmentations_per_image = {spec.augmentations}\nseed = {spec.seed}\n",
        encoding="utf-8",
    )
    return str(spec.train_out), str(spec.test_out)
