"""Writer for the audit toolkit's binary embedding container.

Wire format (independent implementation of the published layout; integers
little-endian):

    bytes 0-7    magic "RRMEMB01"
    bytes 8-23   u32 n, u32 d, u32 k, u32 flags (bit 0: group ids present)
    then         n*d float32 features, row-major
    then         n u32 labels
    then         n u32 group ids, only when flagged
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np

MAGIC = b"RRMEMB01"
_HEADER = struct.Struct("<4I")

PathLike = Union[str, Path]


class ExportError(Exception):
    """Invalid export inputs or malformed output."""


def write_embedding_file(
    path: PathLike,
    features: np.ndarray,
    labels: np.ndarray,
    num_classes: int,
    group_ids: Optional[np.ndarray] = None,
) -> None:
    features = np.ascontiguousarray(features, dtype="<f4")
    labels = np.ascontiguousarray(labels, dtype="<u4")
    if features.ndim != 2 or features.shape[0] != labels.shape[0]:
        raise ExportError("features must be (n, d) with one label per row")
    n, d = features.shape
    if n < 1 or d < 1:
        raise ExportError("need at least one row and one feature column")
    if num_classes < 2 or labels.max() >= num_classes:
        raise ExportError("labels must lie in {0, ..., num_classes-1}")
    flags = 0
    if group_ids is not None:
        group_ids = np.ascontiguousarray(group_ids, dtype="<u4")
        if group_ids.shape != (n,):
            raise ExportError("group ids must have one entry per row")
        flags |= 1
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(n, d, num_classes, flags))
        fh.write(features.tobytes())
        fh.write(labels.tobytes())
        if group_ids is not None:
            fh.write(group_ids.tobytes())


def parse_embedding_file(path: PathLike):
    """Self-check parser for round-trip tests; returns (features, labels, k, groups)."""
    blob = Path(path).read_bytes()
    if blob[:8] != MAGIC:
        raise ExportError(f"bad magic {blob[:8]!r}")
    n, d, k, flags = _HEADER.unpack(blob[8:24])
    offset = 24
    feats = np.frombuffer(blob[offset : offset + 4 * n * d], dtype="<f4").reshape(n, d)
    offset += 4 * n * d
    labels = np.frombuffer(blob[offset : offset + 4 * n], dtype="<u4")
    offset += 4 * n
    groups = None
    if flags & 1:
        groups = np.frombuffer(blob[offset : offset + 4 * n], dtype="<u4")
        offset += 4 * n
    if offset != len(blob):
        raise ExportError("file length does not match header")
    return feats, labels, int(k), groups
