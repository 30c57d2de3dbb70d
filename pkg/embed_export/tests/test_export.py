"""Exporter tests: format conformance, determinism, primary-side round trip."""

import shutil
import subprocess

import numpy as np
import pytest
import torch
from torchvision.models import resnet18

from embed_export import (
    ExportError,
    ExportSpec,
    export,
    load_feature_extractor,
    parse_embedding_file,
    write_embedding_file,
)


@pytest.fixture(scope="module")
def checkpoint(tmp_path_factory):
    torch.manual_seed(0)
    model = resnet18(weights=None)
    path = tmp_path_factory.mktemp("ckpt") / "resnet18.pt"
    torch.save(model.state_dict(), path)
    return path


def _spec(checkpoint, out_dir, t=0, dataset="synthetic:12:8:3:32", seed=0):
    return ExportSpec(
        model=f"resnet18:{checkpoint}",
        dataset=dataset,
        augmentations=t,
        train_out=str(out_dir / "train.emb"),
        test_out=str(out_dir / "test.emb"),
        batch_size=16,
        seed=seed,
    )


class TestWriter:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        feats = rng.normal(size=(10, 5)).astype(np.float32)
        labels = rng.integers(0, 3, size=10)
        groups = rng.integers(0, 4, size=10)
        path = tmp_path / "x.emb"
        write_embedding_file(path, feats, labels, 3, groups)
        f, l, k, g = parse_embedding_file(path)
        assert np.array_equal(f, feats) and np.array_equal(l, labels)
        assert k == 3 and np.array_equal(g, groups)

    def test_byte_layout(self, tmp_path):
        path = tmp_path / "x.emb"
        write_embedding_file(path, np.zeros((4, 2), np.float32), np.zeros(4, int), 2)
        assert path.stat().st_size == 8 + 16 + 4 * 4 * 2 + 4 * 4
        assert path.read_bytes()[:8] == b"RRMEMB01"

    def test_label_range_checked(self, tmp_path):
        with pytest.raises(ExportError):
            write_embedding_file(
                tmp_path / "x.emb", np.zeros((2, 2), np.float32), [0, 5], 2
            )


class TestFeatureExtractor:
    def test_checkpoint_loading(self, checkpoint):
        model, note = load_feature_extractor(f"resnet18:{checkpoint}")
        with torch.no_grad():
            out = model(torch.zeros(2, 3, 32, 32))
        assert out.shape == (2, 512)  # penultimate pooled features
        assert "penultimate" in note

    def test_unknown_arch(self):
        with pytest.raises(ExportError):
            load_feature_extractor("vgg99:random-0")

    def test_missing_checkpoint(self, tmp_path):
        with pytest.raises(ExportError):
            load_feature_extractor(f"resnet18:{tmp_path / 'none.pt'}")


class TestExport:
    def test_plain_export_structure(self, checkpoint, tmp_path):
        export(_spec(checkpoint, tmp_path, t=0))
        feats, labels, k, groups = parse_embedding_file(tmp_path / "train.emb")
        assert feats.shape == (12, 512) and k == 3 and groups is None
        feats, labels, k, groups = parse_embedding_file(tmp_path / "test.emb")
        assert feats.shape == (8, 512) and groups is None
        assert (tmp_path / "train.emb.note.txt").exists()

    def test_augmented_groups(self, checkpoint, tmp_path):
        export(_spec(checkpoint, tmp_path, t=3))
        feats, labels, k, groups = parse_embedding_file(tmp_path / "train.emb")
        assert feats.shape == (36, 512)
        ids, counts = np.unique(groups, return_counts=True)
        assert len(ids) == 12 and np.all(counts == 3)
        # copies of one image share the base image's label
        base_labels = labels[::3]
        assert np.array_equal(labels, np.repeat(base_labels, 3))

    def test_deterministic(self, checkpoint, tmp_path):
        a_dir = tmp_path / "a"
        b_dir = tmp_path / "b"
        a_dir.mkdir()
        b_dir.mkdir()
        export(_spec(checkpoint, a_dir, t=2, seed=5))
        export(_spec(checkpoint, b_dir, t=2, seed=5))
        assert (a_dir / "train.emb").read_bytes() == (b_dir / "train.emb").read_bytes()
        assert (a_dir / "test.emb").read_bytes() == (b_dir / "test.emb").read_bytes()

    def test_seed_changes_augmented_features(self, checkpoint, tmp_path):
        a_dir = tmp_path / "a"
        b_dir = tmp_path / "b"
        a_dir.mkdir()
        b_dir.mkdir()
        export(_spec(checkpoint, a_dir, t=2, seed=5))
        export(_spec(checkpoint, b_dir, t=2, seed=6))
        assert (a_dir / "train.emb").read_bytes() != (b_dir / "train.emb").read_bytes()


@pytest.mark.skipif(
    shutil.which("rrmaudit") is None, reason="primary toolkit CLI not installed"
)
class TestPrimaryRoundTrip:
    def test_audit_cli_accepts_export(self, checkpoint, tmp_path):
        export(_spec(checkpoint, tmp_path, t=0, dataset="synthetic:24:16:2:32"))
        result = subprocess.run(
            [
                "rrmaudit", "audit",
                "--train", str(tmp_path / "train.emb"),
                "--test", str(tmp_path / "test.emb"),
                "--eta", "0.1", "--trials", "4", "--seed", "1",
                "--out", str(tmp_path / "audit.report"),
            ],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0, result.stderr
        assert "rrm_bound=" in result.stdout
        assert (tmp_path / "audit.report").exists()
