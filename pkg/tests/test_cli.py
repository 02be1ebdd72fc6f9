"""End-to-end CLI tests on a tiny configuration."""

import json

import pytest

from sourcecount.cli import main
from sourcecount.experiments import read_csv, read_dataset

TINY_CONFIG = """
# desk-scale settings for fast CLI runs
num_train = 150
num_test = 50
epochs = 4
seed = 3
snapshot_axis = 5,10
snr_axis_db = 0,10
detectors = ernet,aic
"""


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY_CONFIG, encoding="utf-8")
    return path


def run(*argv):
    return main([str(a) for a in argv])


class TestGenTrainEval:
    def test_full_detector_cycle(self, tmp_path, config_file, capsys):
        out = tmp_path / "run"
        assert run("gen-data", "--config", config_file, "--out", out,
                   "--detector", "ernet") == 0
        dataset = out / "dataset-ernet-train.csv"
        feats, labels, info = read_dataset(dataset)
        assert feats.shape == (150, 10)
        assert info["seed"] == "3"

        assert run("train", "--config", config_file, "--out", out,
                   "--detector", "ernet") == 0
        assert (out / "model-ernet.json").exists()
        loss_lines = (out / "loss-ernet.csv").read_text().splitlines()
        assert loss_lines[0] == "epoch,loss"
        assert len(loss_lines) == 1 + 4  # four epochs

        assert run("eval", "--config", config_file, "--out", out,
                   "--detector", "ernet") == 0
        report = json.loads((out / "eval-ernet.json").read_text())
        assert 0.0 <= report["accuracy"] <= 1.0
        assert report["num_trials"] == 50
        assert "accuracy" in capsys.readouterr().out

        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] == 3

    def test_classical_eval_needs_no_model(self, tmp_path, config_file):
        out = tmp_path / "run"
        assert run("eval", "--config", config_file, "--out", out,
                   "--detector", "mdl", "--snr-db", "20") == 0
        report = json.loads((out / "eval-mdl.json").read_text())
        assert report["snr_db"] == 20.0

    def test_fbss_cycle(self, tmp_path, config_file):
        out = tmp_path / "run"
        assert run("gen-data", "--config", config_file, "--out", out,
                   "--detector", "ecnet", "--fbss", "5") == 0
        feats, _, info = read_dataset(out / "dataset-fbss-ecnet-train.csv")
        assert feats.shape == (150, 5)
        assert info["feature_dim"] == "5"
        assert run("train", "--config", config_file, "--out", out,
                   "--detector", "ecnet", "--fbss", "5") == 0
        assert run("eval", "--config", config_file, "--out", out,
                   "--detector", "ecnet", "--fbss", "5") == 0
        assert (out / "eval-fbss-ecnet.json").exists()

    def test_train_without_dataset_fails(self, tmp_path, config_file, capsys):
        assert run("train", "--config", config_file, "--out", tmp_path / "empty",
                   "--detector", "ernet") == 2
        assert "gen-data" in capsys.readouterr().err

    def test_eval_without_model_fails(self, tmp_path, config_file):
        assert run("eval", "--config", config_file, "--out", tmp_path / "empty",
                   "--detector", "ecnet") == 2

    def test_train_classical_rejected(self, tmp_path, config_file):
        assert run("train", "--config", config_file, "--out", tmp_path,
                   "--detector", "aic") == 2


class TestSweepCommands:
    def test_sweep_snr(self, tmp_path, config_file):
        out = tmp_path / "sweep"
        assert run("sweep-snr", "--config", config_file, "--out", out) == 0
        result = read_csv(out / "sweep-snr.csv")
        assert result.axis == (0.0, 10.0)
        assert result.detectors == ("ernet", "aic")

    def test_sweep_snapshots(self, tmp_path, config_file):
        out = tmp_path / "sweep"
        assert run("sweep-snapshots", "--config", config_file, "--out", out) == 0
        result = read_csv(out / "sweep-snapshots.csv")
        assert result.axis == (5.0, 10.0)

    def test_sweep_snr_coherent(self, tmp_path, config_file):
        out = tmp_path / "sweep"
        assert run("sweep-snr-coherent", "--config", config_file, "--out", out) == 0
        result = read_csv(out / "sweep-snr-coherent.csv")
        assert result.detectors == ("fbss-ernet", "fbss-aic")

    def test_seed_override_changes_results(self, tmp_path, config_file):
        out_a, out_b, out_c = (tmp_path / n for n in ("a", "b", "c"))
        run("sweep-snr", "--config", config_file, "--out", out_a)
        run("sweep-snr", "--config", config_file, "--out", out_b, "--seed", "99")
        run("sweep-snr", "--config", config_file, "--out", out_c)
        base = (out_a / "sweep-snr.csv").read_bytes()
        reseeded = (out_b / "sweep-snr.csv").read_bytes()
        repeat = (out_c / "sweep-snr.csv").read_bytes()
        assert base == repeat  # same config, bit-identical
        assert base != reseeded


class TestBenchCommand:
    def test_bench_complexity(self, tmp_path, capsys):
        out = tmp_path / "bench"
        assert run("bench-complexity", "--out", out) == 0
        doc = json.loads((out / "bench-complexity.json").read_text())
        methods = {row["method"]: row for row in doc}
        assert methods["ernet"]["table"]["mul_div"] == 88
        assert methods["ecnet"]["table"]["mul_div"] == 160
        assert methods["aic"]["table"]["log"] == 20
        assert "us/decision" in capsys.readouterr().out
