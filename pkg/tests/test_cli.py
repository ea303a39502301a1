import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from mvsapce.mvsa_engine import save_model
from mvsapce.polynomial_basis import DistributionSpec, Marginal
from mvsapce.regression import write_data_csv

from conftest import build_model


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "mvsapce.cli", *map(str, args)],
        capture_output=True,
        text=True,
    )


def last_json_line(proc):
    return json.loads(proc.stdout.strip().splitlines()[-1])


@pytest.fixture(scope="module")
def fit_assets(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    spec = DistributionSpec.of([Marginal.normal(0.0, 1.0), Marginal.normal(0.0, 1.0)])
    rng = np.random.default_rng(0)
    x = rng.normal(size=(40, 2))
    y = 3.0 + x[:, :1]  # exactly representable, so the fit interpolates
    data = root / "data.csv"
    write_data_csv(data, x, y)
    dist = root / "dist.json"
    dist.write_text(json.dumps(spec.to_json()))
    model = root / "model.json"
    proc = run_cli(
        "fit", "--data", data, "--inputs", 2, "--outputs", 1,
        "--dist", dist, "--out", model,
    )
    assert proc.returncode == 0, proc.stderr
    return {"root": root, "spec": spec, "x": x, "y": y, "data": data, "dist": dist, "model": model}


class TestFit:
    def test_success_writes_model_and_diagnostics(self, fit_assets):
        assert fit_assets["model"].exists()
        proc = run_cli(
            "fit", "--data", fit_assets["data"], "--inputs", 2, "--outputs", 1,
            "--dist", fit_assets["dist"], "--out", fit_assets["root"] / "model2.json",
        )
        assert proc.returncode == 0
        payload = last_json_line(proc)
        assert payload["status"] == "ok"
        assert payload["basis_size"] >= 2
        assert payload["condition_number"] <= 100.0
        assert "fit_seconds" in payload

    def test_width_mismatch_exits_2(self, fit_assets, tmp_path):
        dist3 = tmp_path / "dist3.json"
        dist3.write_text(json.dumps([{"kind": "normal", "params": [0.0, 1.0]}] * 3))
        proc = run_cli(
            "fit", "--data", fit_assets["data"], "--inputs", 3, "--outputs", 1,
            "--dist", dist3, "--out", tmp_path / "m.json",
        )
        assert proc.returncode == 2
        assert "x1,x2,x3" in proc.stderr and "x1,x2" in proc.stderr

    def test_bad_kappa_exits_3(self, fit_assets, tmp_path):
        proc = run_cli(
            "fit", "--data", fit_assets["data"], "--inputs", 2, "--outputs", 1,
            "--dist", fit_assets["dist"], "--out", tmp_path / "m.json", "--kappa", 0.5,
        )
        assert proc.returncode == 3
        assert "kappa" in proc.stderr

    def test_unknown_flag_exits_3(self, fit_assets, tmp_path):
        proc = run_cli(
            "fit", "--data", fit_assets["data"], "--inputs", 2, "--outputs", 1,
            "--dist", fit_assets["dist"], "--out", tmp_path / "m.json", "--bogus", 1,
        )
        assert proc.returncode == 3
        assert last_json_line(proc)["status"] == "error"

    def test_td_init(self, fit_assets, tmp_path):
        proc = run_cli(
            "fit", "--data", fit_assets["data"], "--inputs", 2, "--outputs", 1,
            "--dist", fit_assets["dist"], "--out", tmp_path / "m.json", "--init", "td:1",
        )
        assert proc.returncode == 0


class TestPredict:
    def test_round_trip_on_training_data(self, fit_assets, tmp_path):
        out = tmp_path / "preds.csv"
        proc = run_cli("predict", "--model", fit_assets["model"], "--data", fit_assets["data"], "--out", out)
        assert proc.returncode == 0
        with out.open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["y1"]
        got = np.array([[float(v) for v in row] for row in rows[1:]])
        assert np.max(np.abs(got - fit_assets["y"])) < 1e-8

    def test_missing_model_exits_2(self, fit_assets, tmp_path):
        proc = run_cli("predict", "--model", tmp_path / "none.json", "--data", fit_assets["data"], "--out", tmp_path / "o.csv")
        assert proc.returncode == 2

    def test_header_only_input_gives_header_only_output(self, fit_assets, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("x1,x2\n")
        out = tmp_path / "out.csv"
        proc = run_cli("predict", "--model", fit_assets["model"], "--data", empty, "--out", out)
        assert proc.returncode == 0
        assert out.read_bytes() == b"y1\r\n"


class TestUq:
    def test_writes_three_reports(self, fit_assets, tmp_path):
        prefix = tmp_path / "run_"
        proc = run_cli("uq", "--model", fit_assets["model"], "--out-prefix", prefix)
        assert proc.returncode == 0
        for name in ("moments", "sobol", "generalized"):
            assert (tmp_path / f"run_{name}.csv").exists()

    def test_single_output_generalized_equals_sobol(self, fit_assets, tmp_path):
        prefix = tmp_path / "s_"
        run_cli("uq", "--model", fit_assets["model"], "--out-prefix", prefix)
        with (tmp_path / "s_sobol.csv").open() as handle:
            sobol = list(csv.DictReader(handle))
        with (tmp_path / "s_generalized.csv").open() as handle:
            gen = list(csv.DictReader(handle))
        for s_row, g_row in zip(sobol, gen):
            assert float(s_row["first_y1"]) == pytest.approx(float(g_row["generalized_first"]), abs=1e-14)
            assert float(s_row["total_y1"]) == pytest.approx(float(g_row["generalized_total"]), abs=1e-14)

    def test_mean_only_model_masks_everything(self, tmp_path):
        spec = DistributionSpec.of([Marginal.normal(0.0, 1.0)] * 2)
        model = build_model(spec, [(0, 0)], [[4.0, -1.0]])
        path = tmp_path / "mean_only.json"
        save_model(model, path)
        proc = run_cli("uq", "--model", path, "--out-prefix", tmp_path / "m_")
        assert proc.returncode == 0
        payload = last_json_line(proc)
        assert payload["zero_variance_outputs"] == 2
        assert payload["generalized_defined"] is False
        with (tmp_path / "m_moments.csv").open() as handle:
            rows = list(csv.DictReader(handle))
        assert all(row["zero_variance"] == "1" for row in rows)
        assert all(float(row["variance"]) == 0.0 for row in rows)


class TestBenchmarkCommands:
    def test_seeds_flag_is_required(self, tmp_path):
        proc = run_cli("benchmark-beam", "--Q", "30", "--M", 6, "--out-dir", tmp_path)
        assert proc.returncode == 3

    def test_small_run_produces_report_files(self, tmp_path):
        proc = run_cli(
            "benchmark-beam", "--Q", "30", "--M", 6, "--seeds", "0,1",
            "--test-size", 40, "--mcs-samples", 600, "--out-dir", tmp_path / "out",
        )
        assert proc.returncode == 0, proc.stderr
        payload = last_json_line(proc)
        assert payload["failures"] == 0
        for name in ("rmse", "moments", "timing", "degrees", "summary"):
            assert payload["files"][name].startswith(str(tmp_path / "out"))
        summary = json.loads(open(payload["files"]["summary"]).read())
        assert list(summary["aggregates"].keys()) == ["mvsa"]

    def test_td_only_run_is_valid(self, tmp_path):
        proc = run_cli(
            "benchmark-beam", "--Q", "25", "--M", 5, "--seeds", "2",
            "--methods", "td:2", "--test-size", 30, "--mcs-samples", 400,
            "--out-dir", tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        summary = json.loads(open(last_json_line(proc)["files"]["summary"]).read())
        assert set(summary["aggregates"]) == {"td:2"}
        assert summary["failures"] == []

    def test_compare_defaults_include_td_baselines(self, tmp_path):
        proc = run_cli(
            "compare", "--Q", "25", "--M", 5, "--seeds", "3",
            "--test-size", 30, "--mcs-samples", 400, "--out-dir", tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        summary = json.loads(open(last_json_line(proc)["files"]["summary"]).read())
        assert set(summary["aggregates"]) == {"mvsa", "td:2", "td:3"}

    def test_repeat_runs_are_byte_identical_except_timing(self, tmp_path):
        args = (
            "benchmark-beam", "--Q", "30", "--M", 6, "--seeds", "0,1",
            "--test-size", 40, "--mcs-samples", 600,
        )
        first = run_cli(*args, "--out-dir", tmp_path / "a")
        second = run_cli(*args, "--out-dir", tmp_path / "b")
        assert first.returncode == 0 and second.returncode == 0
        files_a = last_json_line(first)["files"]
        files_b = last_json_line(second)["files"]
        for name in ("rmse", "moments", "degrees", "summary"):
            with open(files_a[name], "rb") as fa, open(files_b[name], "rb") as fb:
                assert fa.read() == fb.read(), name
