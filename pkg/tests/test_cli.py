import json
import os

import numpy as np
import pytest

from evopipe.cli import main
from evopipe.reports import read_json, strip_timing
from conftest import make_gaussian_dataset


def write_dataset_csv(path, n_rows=40, seed=0, name="ds"):
    d = make_gaussian_dataset(n_rows=n_rows, n_features=3, seed=seed, name=name)
    lines = ["f0,f1,f2,label"]
    for row, label in zip(d.features, d.labels):
        lines.append(",".join(f"{v:.6f}" for v in row) + f",{label}")
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def csv_path(tmp_path):
    return write_dataset_csv(tmp_path / "ds.csv")


def run_flags(csv_path, out, extra=()):
    return ["run", "--data", str(csv_path), "--generations", "2", "--pop", "4",
            "--k", "3", "--seed", "7", "--out", str(out), *extra]


class TestCmdRun:
    def test_writes_reports(self, csv_path, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(run_flags(csv_path, out)) == 0
        doc = read_json(out / "run_report.json", "run")
        assert doc["run"]["generations_completed"] == 2
        assert (out / "final_pipeline.txt").read_text().strip() == doc["run"]["final_pipeline"]
        lines = (out / "generations.jsonl").read_text().splitlines()
        assert len(lines) == 3  # gen 0..2
        json.loads(lines[0])

    def test_missing_file_exit_2(self, tmp_path):
        assert main(run_flags(tmp_path / "nope.csv", tmp_path)) == 2

    def test_no_budget_exit_2(self, csv_path, tmp_path, capsys):
        code = main(["run", "--data", str(csv_path), "--generations", "0",
                     "--time-budget", "0", "--out", str(tmp_path)])
        assert code == 2

    def test_insufficient_time_budget_exit_3(self, csv_path, tmp_path):
        code = main(["run", "--data", str(csv_path), "--generations", "5",
                     "--time-budget", "0.000001", "--pop", "4", "--k", "3",
                     "--out", str(tmp_path)])
        assert code == 3

    def test_config_file_with_flag_override(self, csv_path, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"data={csv_path}\ngenerations=1\npop=4\nk=3\nseed=7\n"
                       f"out={tmp_path / 'cfgout'}\n")
        assert main(["run", "--config", str(cfg), "--generations", "2"]) == 0
        doc = read_json(tmp_path / "cfgout" / "run_report.json", "run")
        assert doc["run"]["generations_completed"] == 2


class TestCmdCompare:
    def compare_flags(self, csv_path, out, workers="1"):
        return ["compare", "--data", str(csv_path), "--generations", "2",
                "--pop", "4", "--k", "3", "--seed", "3", "--workers", workers,
                "--out", str(out)]

    def test_produces_comparison_document(self, csv_path, tmp_path, capsys):
        out = tmp_path / "cmp"
        assert main(self.compare_flags(csv_path, out)) == 0
        doc = read_json(out / "comparison.json", "comparison")["comparison"]
        assert doc["n_datasets"] == 1
        assert "error" in doc["wilcoxon"]  # a single dataset cannot be tested
        assert (out / "comparison.txt").exists()
        assert (out / "dominance_plot.csv").exists()
        assert (out / "seed_sensitivity.csv").read_text().splitlines()[0] == "seed,score_a,score_b"

    def test_single_mode_rejected(self, csv_path, tmp_path):
        code = main(self.compare_flags(csv_path, tmp_path) + ["--modes", "dynamic"])
        assert code == 2

    def test_rerun_determinism_across_worker_counts(self, csv_path, tmp_path, capsys):
        docs = []
        for i, workers in enumerate(["1", "4"]):
            out = tmp_path / f"cmp{i}"
            assert main(self.compare_flags(csv_path, out, workers)) == 0
            docs.append(strip_timing(read_json(out / "comparison.json", "comparison")))
        assert docs[0] == docs[1]


class TestCmdReport:
    def test_renders_stored_comparison(self, csv_path, tmp_path, capsys):
        out = tmp_path / "cmp"
        assert main(TestCmdCompare().compare_flags(csv_path, out)) == 0
        os.remove(out / "comparison.txt")
        assert main(["report", "--out", str(out)]) == 0
        assert (out / "comparison.txt").exists()
        assert "Wilcoxon" in capsys.readouterr().out

    def test_renders_run_report(self, csv_path, tmp_path, capsys):
        out = tmp_path / "runout"
        assert main(run_flags(csv_path, out)) == 0
        assert main(["report", "--out", str(out)]) == 0
        assert "final pipeline" in capsys.readouterr().out

    def test_empty_directory_error(self, tmp_path):
        assert main(["report", "--out", str(tmp_path)]) == 2

    def test_version_mismatch_names_file(self, csv_path, tmp_path, capsys):
        out = tmp_path / "cmp"
        assert main(TestCmdCompare().compare_flags(csv_path, out)) == 0
        path = out / "comparison.json"
        doc = json.loads(path.read_text())
        doc["format_version"] = 99
        path.write_text(json.dumps(doc))
        assert main(["report", "--out", str(out)]) == 2
        assert "comparison.json" in capsys.readouterr().err
