"""File formats: binary embeddings, a CSV variant, and audit reports.

Embedding container (all integers little-endian):

    bytes 0-7    magic "RRMEMB01"
    bytes 8-23   u32 n, u32 d, u32 k, u32 flags (bit 0: group ids present)
    then         n*d float32 features, row-major
    then         n u32 labels
    then         n u32 group ids, only if flagged

Features are stored as 32-bit floats for compactness; everything in memory
is 64-bit. Validation failures name the offending byte offset.

Reports are human-readable ``key = value`` text with a fixed key set and a
per-trial section; float values are written with ``repr`` so a round trip
reproduces them bit-exactly. Undefined NTrain-dependent fields are written
as the explicit marker ``null``.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Union

import numpy as np

from .datasets import (
    AccuracyQuad,
    DenominatorMode,
    GapReport,
    LabeledEmbeddings,
    NoiseKind,
    TrialSummary,
)
from .errors import EmbeddingFormatError, ReportFormatError

MAGIC = b"RRMEMB01"
_HEADER = struct.Struct("<4I")

PathLike = Union[str, Path]


def write_embeddings(data: LabeledEmbeddings, path: PathLike) -> None:
    """Serialize to the binary container; ``read_embeddings`` inverts exactly
    up to the float32 storage precision of the features."""
    grouped = data.group_ids is not None
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(data.n, data.dim, data.num_classes, 1 if grouped else 0))
        fh.write(data.features.astype("<f4").tobytes())
        fh.write(data.labels.astype("<u4").tobytes())
        if grouped:
            fh.write(data.group_ids.astype("<u4").tobytes())


def _take(blob: bytes, offset: int, size: int, what: str) -> bytes:
    end = offset + size
    if end > len(blob):
        raise EmbeddingFormatError(
            f"truncated file: {what} needs bytes {offset}..{end}, "
            f"file has {len(blob)}"
        )
    return blob[offset:end]


def read_embeddings(path: PathLike) -> LabeledEmbeddings:
    """Parse and validate the binary container."""
    blob = Path(path).read_bytes()
    if blob[:8] != MAGIC:
        raise EmbeddingFormatError(
            f"bad magic at byte 0: {blob[:8]!r}, expected {MAGIC!r}"
        )
    n, d, k, flags = _HEADER.unpack(_take(blob, 8, 16, "header"))
    if n < 1 or d < 1:
        raise EmbeddingFormatError(f"invalid shape n={n}, d={d} in header at byte 8")
    if k < 2:
        raise EmbeddingFormatError(f"invalid class count {k} in header at byte 16")
    grouped = bool(flags & 1)
    offset = 24
    feats = np.frombuffer(
        _take(blob, offset, 4 * n * d, "features"), dtype="<f4"
    ).reshape(n, d).astype(np.float64)
    offset += 4 * n * d
    labels_off = offset
    labels = np.frombuffer(_take(blob, offset, 4 * n, "labels"), dtype="<u4").astype(
        np.int64
    )
    offset += 4 * n
    bad = np.nonzero(labels >= k)[0]
    if bad.size:
        idx = int(bad[0])
        raise EmbeddingFormatError(
            f"label {int(labels[idx])} >= k={k} at index {idx} "
            f"(byte {labels_off + 4 * idx})"
        )
    groups = None
    if grouped:
        groups = np.frombuffer(
            _take(blob, offset, 4 * n, "group ids"), dtype="<u4"
        ).astype(np.int64)
        offset += 4 * n
    if offset != len(blob):
        raise EmbeddingFormatError(
            f"trailing garbage: expected {offset} bytes, file has {len(blob)}"
        )
    return LabeledEmbeddings(feats, labels, int(k), group_ids=groups)


def write_embeddings_csv(data: LabeledEmbeddings, path: PathLike) -> None:
    """Interoperability CSV with header ``label,group,f0,...``."""
    with open(path, "w", encoding="utf-8") as fh:
        cols = ",".join(f"f{j}" for j in range(data.dim))
        fh.write(f"label,group,{cols}\n")
        for i in range(data.n):
            group = "" if data.group_ids is None else str(int(data.group_ids[i]))
            feats = ",".join(repr(float(v)) for v in data.features[i])
            fh.write(f"{int(data.labels[i])},{group},{feats}\n")


def read_embeddings_csv(path: PathLike, num_classes: int) -> LabeledEmbeddings:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines or not lines[0].startswith("label,group,"):
        raise EmbeddingFormatError("CSV must start with a 'label,group,f0,...' header")
    labels, groups, rows = [], [], []
    for line in lines[1:]:
        parts = line.split(",")
        labels.append(int(parts[0]))
        groups.append(int(parts[1]) if parts[1] else -1)
        rows.append([float(v) for v in parts[2:]])
    group_arr = np.asarray(groups)
    grouped = bool(np.all(group_arr >= 0))
    return LabeledEmbeddings(
        np.asarray(rows),
        np.asarray(labels),
        num_classes,
        group_ids=group_arr if grouped else None,
    )


# ---------------------------------------------------------------------------
# report files

_REPORT_HEADER = "rrm-audit-report v1"
_SCALAR_KEYS = (
    "eta",
    "trials",
    "noise_model",
    "bound_denominator",
    "train_acc",
    "test_acc",
    "train_noisy",
    "ntrain_noisy",
    "robustness_gap",
    "rationality_gap",
    "memorization_gap",
    "generalization_gap",
    "rrm_bound",
    "cdc_nats",
    "cpc_nats",
    "thm2_bound",
    "thm2_bound_capped",
    "base_seed",
)


def _fmt(value) -> str:
    return "null" if value is None else repr(value) if isinstance(value, float) else str(value)


def write_report(report: GapReport, path: PathLike) -> None:
    acc = report.accuracies
    values = {
        "eta": report.eta,
        "trials": report.trials,
        "noise_model": report.noise_model.value,
        "bound_denominator": report.bound_denominator.value,
        "train_acc": acc.train,
        "test_acc": acc.test,
        "train_noisy": acc.train_noisy,
        "ntrain_noisy": acc.ntrain_noisy,
        "robustness_gap": report.robustness_gap,
        "rationality_gap": report.rationality_gap,
        "memorization_gap": report.memorization_gap,
        "generalization_gap": report.generalization_gap,
        "rrm_bound": report.rrm_bound,
        "cdc_nats": report.cdc,
        "cpc_nats": report.cpc,
        "thm2_bound": report.thm2_bound,
        "thm2_bound_capped": report.thm2_bound_capped,
        "base_seed": report.base_seed,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_REPORT_HEADER + "\n")
        for key in _SCALAR_KEYS:
            fh.write(f"{key} = {_fmt(values[key])}\n")
        fh.write("[trials]\n")
        for t in report.trial_summaries:
            fh.write(
                f"trial {t.trial_index}: flips = {t.flip_count}, "
                f"train_noisy = {_fmt(t.train_noisy)}, "
                f"ntrain_correct = {t.ntrain_correct}\n"
            )


def _parse_scalar(raw: str):
    return None if raw == "null" else raw


def _parse_float(raw: str):
    return None if raw == "null" else float(raw)


def read_report(path: PathLike) -> GapReport:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != _REPORT_HEADER:
        raise ReportFormatError(f"missing header line {_REPORT_HEADER!r}")
    fields: dict[str, str] = {}
    trial_lines: list[str] = []
    in_trials = False
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.strip() == "[trials]":
            in_trials = True
            continue
        if in_trials:
            trial_lines.append(line)
        elif " = " in line:
            key, _, raw = line.partition(" = ")
            fields[key.strip()] = raw.strip()
    missing = [k for k in _SCALAR_KEYS if k not in fields]
    if missing:
        raise ReportFormatError(f"missing keys: {', '.join(missing)}")
    summaries = []
    for line in trial_lines:
        try:
            head, _, rest = line.partition(":")
            idx = int(head.split()[1])
            parts = dict(p.strip().split(" = ") for p in rest.split(","))
            summaries.append(
                TrialSummary(
                    trial_index=idx,
                    flip_count=int(parts["flips"]),
                    train_noisy=float(parts["train_noisy"]),
                    ntrain_correct=int(parts["ntrain_correct"]),
                )
            )
        except (IndexError, KeyError, ValueError) as exc:
            raise ReportFormatError(f"bad trial line {line!r}") from exc
    quad = AccuracyQuad(
        train=float(fields["train_acc"]),
        test=float(fields["test_acc"]),
        train_noisy=float(fields["train_noisy"]),
        ntrain_noisy=_parse_float(fields["ntrain_noisy"]),
    )
    return GapReport(
        eta=float(fields["eta"]),
        trials=int(fields["trials"]),
        accuracies=quad,
        robustness_gap=float(fields["robustness_gap"]),
        rationality_gap=_parse_float(fields["rationality_gap"]),
        memorization_gap=_parse_float(fields["memorization_gap"]),
        generalization_gap=float(fields["generalization_gap"]),
        rrm_bound=_parse_float(fields["rrm_bound"]),
        noise_model=NoiseKind(fields["noise_model"]),
        bound_denominator=DenominatorMode(fields["bound_denominator"]),
        base_seed=int(fields["base_seed"]),
        cdc=_parse_float(fields["cdc_nats"]),
        cpc=_parse_float(fields["cpc_nats"]),
        thm2_bound=_parse_float(fields["thm2_bound"]),
        thm2_bound_capped=_parse_float(fields["thm2_bound_capped"]),
        trial_summaries=tuple(summaries),
    )
