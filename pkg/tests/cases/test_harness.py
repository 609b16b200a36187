"""
Test: Experiment Harness and CLI
================================

Grid loading, cell seeding, result tables, CSV round-trips and the
command line exit codes.

Run with: pytest tests/cases/test_harness.py
"""

import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_array_equal
from pydantic import ValidationError

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

import run_calibration
from develop.config import load_grid, resolve_workers
from develop.core.errors import ConfigurationError, ParseError
from develop.core.knowledge import THREADS_VARIABLE
from develop.core.models import (
    CalSummarySeries, GainKind, Md2Sampling, RefSet, SimConfig, TruthCase,
)
from simulation.experiment import (
    RESULT_COLUMNS, ResultRow, all_failed, results_frame, run_experiment, write_results,
)
from simulation.generator import gen_dataset, read_dataset_csv, write_dataset_csv
from simulation.plot_data import emit_plot_data, read_plot_data
from simulation.schemas import Cell, ExperimentGrid
from simulation.tables import read_table


def small_grid(**overrides) -> ExperimentGrid:
    values = dict(gains=["constant_zero"], refs=["two"], obs_vars=[0.0001], sys_vars=[0.00001],
                  methods=["MD1", "MF2"], replicates=2, T=40, n_proposals=60, n_samples=20,
                  seed=5)
    values.update(overrides)
    return ExperimentGrid(**values)


# ============================================================
# CONFIGURACIÓN
# ============================================================

class TestGridConfig:

    def test_default_file(self):
        grid = ExperimentGrid(**load_grid())
        assert len(grid.cells()) == 36
        assert grid.seed == 20130
        assert grid.include_timing is False
        assert grid.md2_sampling is Md2Sampling.PER_SAMPLE

    def test_precedence(self, tmp_path):
        path = tmp_path / "grid.json"
        path.write_text(json.dumps({"replicates": 3, "T": 80, "seed": 1}), encoding="utf-8")
        values = load_grid(path, preset="desk", seed=9, T=None)
        assert values["replicates"] == 20
        assert values["T"] == 500
        assert values["seed"] == 9

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "grid.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_grid(path)

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            load_grid(preset="huge")

    def test_grid_validation(self):
        with pytest.raises(ValidationError):
            small_grid(burn_in=40)
        with pytest.raises(ValidationError):
            small_grid(colour="blue")
        with pytest.raises(ValidationError):
            small_grid(obs_vars=[0.0])

    def test_cell_key_and_snr(self):
        cell = Cell(case="interpolation", gain="stepped", refs="five", obs_var=0.01, sys_var=0.00005)
        assert cell.snr == 200
        assert cell.key == "interpolation|stepped|200|five"

    def test_worker_cap(self, monkeypatch):
        monkeypatch.setenv(THREADS_VARIABLE, "2")
        assert resolve_workers(8) == 2
        assert resolve_workers(1) == 1
        monkeypatch.setenv(THREADS_VARIABLE, "many")
        with pytest.raises(ConfigurationError):
            resolve_workers(4)
        monkeypatch.delenv(THREADS_VARIABLE)
        with pytest.raises(ConfigurationError):
            resolve_workers(0)


# ============================================================
# REJILLA EXPERIMENTAL
# ============================================================

class TestExperiment:

    def test_deterministic(self):
        first = run_experiment(small_grid(), workers=1)
        second = run_experiment(small_grid(), workers=1)
        pd.testing.assert_frame_equal(first, second)
        assert list(first.columns) == RESULT_COLUMNS
        assert list(first["method"]) == ["MD1", "MF2"]
        assert (first["wall_ms"] == 0).all()

    def test_cells_are_independent(self):
        alone = run_experiment(small_grid(), workers=1)
        together = run_experiment(small_grid(obs_vars=[0.0001, 0.001]), workers=1)
        shared = together[together["r"] == 10].reset_index(drop=True)
        pd.testing.assert_frame_equal(alone, shared)

    def test_process_pool_matches_serial(self, monkeypatch):
        monkeypatch.delenv(THREADS_VARIABLE, raising=False)
        grid = small_grid(refs=["two", "five"])
        pd.testing.assert_frame_equal(run_experiment(grid, workers=1), run_experiment(grid, workers=2))

    def test_standardized_metric_scale(self):
        # x_ref = (20, 100): sd poblacional 40
        original = run_experiment(small_grid(methods=["MF2"]), workers=1)
        standardized = run_experiment(small_grid(methods=["MF2"], metric_scale="standardized"), workers=1)
        assert standardized["av_mse"].iloc[0] * 40.0 ** 2 == pytest.approx(original["av_mse"].iloc[0],
                                                                             rel=1e-9)
        assert standardized["av_iw"].iloc[0] * 40.0 == pytest.approx(original["av_iw"].iloc[0], rel=1e-9)
        assert standardized["av_cp"].iloc[0] == original["av_cp"].iloc[0]

    def test_empty_methods(self):
        frame = run_experiment(small_grid(methods=[]))
        assert frame.empty
        assert list(frame.columns) == RESULT_COLUMNS

    def test_error_rows(self):
        rows = [ResultRow(case="interpolation", gain="stepped", r=10.0, refs="two", method="MB1",
                          error="DegeneratePosteriorError: sigma_hat = 0")]
        frame = results_frame(rows)
        assert "error" in frame.columns
        assert all_failed(frame)
        assert not all_failed(results_frame([]))

    def test_rows_are_sorted(self):
        rows = [
            ResultRow(case="interpolation", gain="stepped", r=10.0, refs="two", method="MF1"),
            ResultRow(case="interpolation", gain="constant_zero", r=200.0, refs="two", method="MD2"),
            ResultRow(case="interpolation", gain="constant_zero", r=10.0, refs="two", method="MD2"),
            ResultRow(case="interpolation", gain="constant_zero", r=10.0, refs="two", method="MD1"),
        ]
        frame = results_frame(rows)
        assert list(zip(frame["gain"], frame["r"], frame["method"])) == [
            ("constant_zero", 10.0, "MD1"), ("constant_zero", 10.0, "MD2"),
            ("constant_zero", 200.0, "MD2"), ("stepped", 10.0, "MF1"),
        ]

    def test_write_results(self, tmp_path):
        frame = run_experiment(small_grid(methods=["MF1"]))
        path = write_results(frame, tmp_path / "results.csv")
        text = path.read_bytes().decode("utf-8")
        assert text.startswith(",".join(RESULT_COLUMNS) + "\n")
        assert "\r" not in text


# ============================================================
# ARCHIVOS CSV
# ============================================================

class TestFiles:

    def test_dataset_roundtrip(self, tmp_path):
        config = SimConfig(refs=RefSet.FIVE, T=25, gain=GainKind.SINUSOIDAL,
                           truth=TruthCase.EXTRAPOLATION, seed=3)
        data = gen_dataset(config)
        restored = read_dataset_csv(write_dataset_csv(data, tmp_path / "data.csv"))
        assert_array_equal(restored.design, data.design)
        assert_array_equal(restored.y_refs, data.y_refs)
        assert_array_equal(restored.y0_obs, data.y0_obs)
        assert_array_equal(restored.x0_truth, data.x0_truth)

    def test_plot_data_roundtrip(self, tmp_path):
        truth = np.linspace(60, 61, 10)
        summary = CalSummarySeries(median=truth + 0.1, lower=truth - 1, upper=truth + 1).trimmed(3)
        path = emit_plot_data(summary, truth, tmp_path / "plot.csv")
        frame, _ = read_table(path, required=["t", "median", "lower", "upper", "truth"])
        assert frame["t"].iloc[0] == 4
        restored, restored_truth = read_plot_data(path)
        assert restored.start == 3
        assert_array_equal(restored.median, summary.median)
        assert_array_equal(restored_truth, truth[3:])

    def test_numeric_columns_keep_every_bit(self, tmp_path):
        values = np.random.default_rng(11).normal(13.0, 5.0, 500)
        path = tmp_path / "values.csv"
        path.write_text("v\n" + "\n".join(repr(float(v)) for v in values) + "\n", encoding="utf-8")
        frame, _ = read_table(path, required=["v"])
        assert_array_equal(frame["v"].to_numpy(), values)

    def test_parse_error_line_numbers(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("#x_ref=20,100\nt,x0_truth\n1,60\n2,abc\n", encoding="utf-8")
        with pytest.raises(ParseError) as info:
            read_table(path, required=["t", "x0_truth"])
        assert info.value.line == 4

    def test_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,median\n1,2\n", encoding="utf-8")
        with pytest.raises(ParseError) as info:
            read_plot_data(path)
        assert info.value.line == 1

    def test_missing_references(self, tmp_path):
        data = gen_dataset(SimConfig(T=5, seed=1))
        path = write_dataset_csv(data, tmp_path / "data.csv")
        path.write_text("\n".join(path.read_text(encoding="utf-8").splitlines()[1:]) + "\n",
                        encoding="utf-8")
        with pytest.raises(ParseError):
            read_dataset_csv(path)


# ============================================================
# CLI
# ============================================================

class TestCli:

    @pytest.fixture
    def dataset_path(self, tmp_path):
        path = tmp_path / "data.csv"
        assert run_calibration.main(["-q", "gen-data", "--output", str(path), "--T", "60",
                                     "--seed", "4"]) == 0
        return path

    def test_calibrate(self, dataset_path, tmp_path):
        plot = tmp_path / "plot.csv"
        code = run_calibration.main(["-q", "calibrate", "--data", str(dataset_path), "--method", "MD1",
                                     "-M", "50", "-N", "20", "--seed", "1", "--plot-output", str(plot)])
        assert code == 0
        summary, truth = read_plot_data(plot)
        assert len(summary) == 60
        assert truth is not None

    def test_plot_data_respects_burn_in(self, dataset_path, tmp_path):
        plot = tmp_path / "plot.csv"
        code = run_calibration.main(["-q", "plot-data", "--data", str(dataset_path), "--method", "MF1",
                                     "--burn-in", "10", "--output", str(plot)])
        assert code == 0
        summary, _ = read_plot_data(plot)
        assert summary.start == 10
        assert len(summary) == 50

    def test_simulate_to_stdout(self, tmp_path, capsys):
        config = tmp_path / "grid.json"
        config.write_text(json.dumps(small_grid(methods=["MF2"]).model_dump(mode="json")),
                          encoding="utf-8")
        assert run_calibration.main(["simulate", "--config", str(config)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(RESULT_COLUMNS)
        assert len(lines) == 2

    def test_full_scale_alias(self):
        alias = run_calibration.parse_args(["simulate", "--paper-scale"])
        full = run_calibration.parse_args(["simulate", "--full-scale"])
        assert alias.full_scale and full.full_scale
        assert run_calibration.parse_args(["simulate", "--timing"]).timing
        assert run_calibration.main(["simulate", "--paper-scale", "--desk-scale"]) == 1

    def test_configuration_errors(self, dataset_path):
        assert run_calibration.main([]) == 1
        assert run_calibration.main(["calibrate", "--data", str(dataset_path), "--method", "MX"]) == 1
        assert run_calibration.main(["-q", "calibrate", "--data", str(dataset_path),
                                     "--burn-in", "60", "--method", "MF1"]) == 1
        assert run_calibration.main(["simulate", "--obs-vars", "abc"]) == 1
        assert run_calibration.main(["simulate", "--methods", "MD9"]) == 1

    def test_io_errors(self, tmp_path):
        missing = tmp_path / "missing.csv"
        assert run_calibration.main(["calibrate", "--data", str(missing)]) == 3
        bad = tmp_path / "bad.csv"
        bad.write_text("t,v_cold\n1,2\n", encoding="utf-8")
        assert run_calibration.main(["radiometer", "--input", str(bad)]) == 3

    def test_numerical_error(self, tmp_path):
        flat = tmp_path / "flat.csv"
        lines = ["#x_ref=20,100", "t,x0_truth,y0_obs,y_ref_1,y_ref_2,beta0,beta1,gain"]
        lines += [f"{t},60,14,14,14,14,0,0" for t in range(1, 11)]
        flat.write_text("\n".join(lines) + "\n", encoding="utf-8")
        assert run_calibration.main(["-q", "calibrate", "--data", str(flat), "--method", "MF1"]) == 2
