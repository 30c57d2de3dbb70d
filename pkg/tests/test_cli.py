"""Command-line surface: exit codes, files, and summary records."""

import struct

import pytest

from rrmaudit import read_embeddings, read_report
from rrmaudit.cli import main
from rrmaudit.fileio import MAGIC


@pytest.fixture()
def dataset_dir(tmp_path):
    rc = main(
        [
            "synth", "--preset", "gaussian", "--n", "200", "--n-test", "100",
            "--dim", "8", "--classes", "2", "--sep", "6", "--seed", "7",
            "--out", str(tmp_path / "d"),
        ]
    )
    assert rc == 0
    return tmp_path / "d"


class TestSynth:
    def test_writes_both_files(self, dataset_dir):
        train = read_embeddings(dataset_dir / "train.emb")
        test = read_embeddings(dataset_dir / "test.emb")
        assert train.n == 200 and test.n == 100 and train.dim == 8

    def test_trivialrep_preset(self, tmp_path):
        rc = main(
            [
                "synth", "--preset", "trivialrep", "--n", "100", "--gap", "0.2",
                "--seed", "1", "--out", str(tmp_path / "f"),
            ]
        )
        assert rc == 0
        assert (tmp_path / "f" / "train.emb").exists()

    def test_augment_flags(self, tmp_path):
        rc = main(
            [
                "synth", "--preset", "gaussian", "--n", "30", "--seed", "2",
                "--augment", "4", "--jitter", "0.1", "--out", str(tmp_path / "a"),
            ]
        )
        assert rc == 0
        train = read_embeddings(tmp_path / "a" / "train.emb")
        assert train.n == 120 and train.group_ids is not None

    def test_missing_out_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["synth", "--preset", "gaussian", "--n", "10"])
        assert err.value.code == 2
        assert "usage" in capsys.readouterr().err


class TestAudit:
    def test_audit_writes_report(self, dataset_dir, tmp_path, capsys):
        out = tmp_path / "audit.report"
        rc = main(
            [
                "audit", "--train", str(dataset_dir / "train.emb"),
                "--test", str(dataset_dir / "test.emb"),
                "--eta", "0.05", "--trials", "5", "--seed", "3",
                "--out", str(out),
            ]
        )
        assert rc == 0
        report = read_report(out)
        assert report.generalization_gap <= report.rrm_bound
        line = capsys.readouterr().out.splitlines()[0]
        assert line.startswith("audit ") and "rrm_bound=" in line

    def test_deterministic_given_flags(self, dataset_dir, tmp_path):
        args = [
            "audit", "--train", str(dataset_dir / "train.emb"),
            "--test", str(dataset_dir / "test.emb"),
            "--trials", "4", "--seed", "9",
        ]
        a, b = tmp_path / "a.report", tmp_path / "b.report"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_single_trial_with_cpc_fails(self, dataset_dir, tmp_path, capsys):
        rc = main(
            [
                "audit", "--train", str(dataset_dir / "train.emb"),
                "--test", str(dataset_dir / "test.emb"),
                "--trials", "1", "--cpc", "on",
                "--out", str(tmp_path / "r"),
            ]
        )
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_unreadable_input(self, tmp_path):
        rc = main(
            [
                "audit", "--train", str(tmp_path / "missing.emb"),
                "--test", str(tmp_path / "missing.emb"),
                "--out", str(tmp_path / "r"),
            ]
        )
        assert rc == 1


class TestOracle:
    def test_all_suites_pass(self, capsys):
        rc = main(["oracle", "--suite", "all", "--count", "25", "--seed", "1"])
        assert rc == 0
        out = capsys.readouterr().out
        for suite in ("chain", "pinsker", "lemma-a2", "erm"):
            assert f"suite={suite}" in out

    def test_invalid_suite_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["oracle", "--suite", "bogus"])
        assert err.value.code == 2


class TestPotl:
    def test_runs_on_gaussian(self, dataset_dir, tmp_path, capsys):
        out = tmp_path / "potl.txt"
        rc = main(
            [
                "potl", "--train", str(dataset_dir / "train.emb"),
                "--test", str(dataset_dir / "test.emb"),
                "--eta", "0.05", "--seed", "5", "--out", str(out),
            ]
        )
        assert rc == 0
        assert "test_s=" in capsys.readouterr().out
        assert "test_s = " in out.read_text()

    def test_empty_train_file_fails(self, tmp_path):
        bad = tmp_path / "zero.emb"
        bad.write_bytes(MAGIC + struct.pack("<4I", 0, 4, 2, 0))
        rc = main(
            ["potl", "--train", str(bad), "--test", str(bad)]
        )
        assert rc == 1


class TestRobustness:
    def test_ls_check(self, capsys):
        rc = main(
            ["robustness", "--check", "ls", "--n", "60", "--eta", "0.05",
             "--trials", "30", "--gammas", "1.0", "--seed", "2"]
        )
        assert rc == 0
        assert "passed=True" in capsys.readouterr().out

    def test_erm_check(self, capsys):
        rc = main(
            ["robustness", "--check", "erm", "--n", "80", "--eta", "0.1",
             "--trials", "60", "--seed", "3"]
        )
        assert rc == 0


class TestPlotdata:
    def test_rows_and_identity(self, dataset_dir, tmp_path):
        reports = []
        for idx, eta in enumerate(("0.05", "0.1")):
            out = tmp_path / f"r{idx}.report"
            main(
                [
                    "audit", "--train", str(dataset_dir / "train.emb"),
                    "--test", str(dataset_dir / "test.emb"),
                    "--eta", eta, "--trials", "4", "--seed", str(idx),
                    "--out", str(out),
                ]
            )
            reports.append(str(out))
        csv = tmp_path / "plot.csv"
        rc = main(["plotdata", "--reports", *reports, "--out", str(csv), "--sort"])
        assert rc == 0
        lines = csv.read_text().strip().splitlines()
        assert len(lines) == 3
        header = lines[0].split(",")
        assert header[0] == "name" and "rrm_bound" in header
        gaps = []
        for line in lines[1:]:
            cells = line.split(",")
            parts = dict(zip(header, cells))
            total = (
                float(parts["robustness_gap"])
                + float(parts["rationality_gap"])
                + float(parts["memorization_gap"])
            )
            assert total == pytest.approx(float(parts["rrm_bound"]), abs=1e-5)
            gaps.append(float(parts["generalization_gap"]))
        assert gaps == sorted(gaps)

    def test_unreadable_report(self, tmp_path):
        rc = main(["plotdata", "--reports", str(tmp_path / "nope"), "--out",
                   str(tmp_path / "o.csv")])
        assert rc == 1
