import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from pilotopt import ConfigurationError, ExperimentConfig, SystemConfig
from pilotopt.harness import ConvergenceResult, SweepRow, convergence_trace
from pilotopt.optimizer import OptimizerTrace
from pilotopt.report import (
    SWEEP_HEADER,
    TRACE_HEADER,
    emit,
    read_sweep_csv,
    read_trace_csv,
    write_json,
    write_svg,
    write_sweep_csv,
    write_trace_csv,
)


def sample_rows():
    return [
        SweepRow(0.0, 4, "proposed", 0.759712345678901, 0.76012, 0.0021, 500, 3),
        SweepRow(0.0, 4, "conventional", 0.789304, 0.78877, 0.0022, 500, None),
        SweepRow(10.0, 4, "proposed", 0.549, 0.5493, 0.0017, 500, 2),
        SweepRow(10.0, 4, "conventional", 1.0436, 1.0429, 0.0031, 500, None),
    ]


def sample_traces():
    t1 = OptimizerTrace(np.array([2.5, 2.4, 2.35, 2.35]), 2, True, 2.8)
    t2 = OptimizerTrace(np.array([2.45, 2.36, 2.35, 2.35]), 2, True, 3.1)
    return [
        ConvergenceResult("dft-reuse", 0.0, t1, 2.35, 3),
        ConvergenceResult("dft-k", 0.0, t2, 2.35, 3),
    ]


class TestSweepCsv:
    def test_header_only_when_empty(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_sweep_csv([], path)
        assert path.read_text() == ",".join(SWEEP_HEADER) + "\n"

    def test_round_trip_exact(self, tmp_path):
        path = tmp_path / "rows.csv"
        rows = sample_rows()
        write_sweep_csv(rows, path)
        back = read_sweep_csv(path)
        assert len(back) == len(rows)
        for a, b in zip(rows, back):
            assert b.snr_db == a.snr_db
            assert b.n == a.n
            assert b.algorithm == a.algorithm
            # repr-based formatting round-trips doubles exactly, which is
            # stronger than the 12-significant-digit requirement
            assert b.wsmse_analytic == a.wsmse_analytic
            assert b.wsmse_empirical == a.wsmse_empirical
            assert b.stderr == a.stderr
            assert b.trials == a.trials
            assert b.sweeps == a.sweeps

    def test_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n")
        with pytest.raises(ConfigurationError):
            read_sweep_csv(path)


class TestTraceCsv:
    def test_layout_and_round_trip(self, tmp_path):
        path = tmp_path / "trace.csv"
        write_trace_csv(sample_traces(), path)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(TRACE_HEADER)
        assert lines[1].startswith("dft-reuse,0,")
        parsed = read_trace_csv(path)
        assert parsed["dft-reuse"] == [2.8, 2.5, 2.4, 2.35, 2.35]
        assert parsed["dft-k"][0] == 3.1


class TestJson:
    def test_sweep_fields_mirrored(self, tmp_path):
        path = tmp_path / "rows.json"
        write_json(sample_rows(), path)
        data = json.loads(path.read_text())
        assert data[0] == {
            "snr_db": 0.0,
            "n": 4,
            "algorithm": "proposed",
            "wsmse_analytic": 0.759712345678901,
            "wsmse_empirical": 0.76012,
            "stderr": 0.0021,
            "trials": 500,
            "sweeps": 3,
        }
        assert data[1]["sweeps"] is None

    def test_trace_fields(self, tmp_path):
        path = tmp_path / "traces.json"
        write_json(sample_traces(), path)
        data = json.loads(path.read_text())
        assert data[0]["init"] == "dft-reuse"
        assert data[0]["objective_per_update"] == [2.5, 2.4, 2.35, 2.35]
        assert data[0]["converged"] is True


class TestSvg:
    def test_wellformed_one_polyline_per_series(self, tmp_path):
        path = tmp_path / "chart.svg"
        series = [
            ("proposed", [0, 10, 20], [0.76, 0.55, 0.51]),
            ("conventional", [0, 10, 20], [0.79, 1.04, 2.49]),
        ]
        write_svg(path, series, x_label="SNR (dB)", y_label="normalized WSMSE")
        root = ET.fromstring(path.read_text())
        tag = "{http://www.w3.org/2000/svg}polyline"
        polylines = root.findall(f".//{tag}")
        assert len(polylines) == 2
        for pl in polylines:
            assert pl.get("points")

    def test_nonpositive_values_fall_back_to_linear(self, tmp_path):
        path = tmp_path / "linear.svg"
        write_svg(path, [("zero", [0, 1], [0.0, 1.0])])
        ET.fromstring(path.read_text())


class TestEmit:
    def test_dispatch_by_format(self, tmp_path):
        rows = sample_rows()
        emit(rows, "csv", tmp_path / "r.csv")
        emit(rows, "json", tmp_path / "r.json")
        emit(rows, "svg", tmp_path / "r.svg", x_field="snr_db")
        assert (tmp_path / "r.csv").exists()
        assert (tmp_path / "r.json").exists()
        root = ET.fromstring((tmp_path / "r.svg").read_text())
        tag = "{http://www.w3.org/2000/svg}polyline"
        assert len(root.findall(f".//{tag}")) == 2

    def test_traces_svg_one_polyline_per_init(self, tmp_path):
        base = SystemConfig(antennas=8, users=4, pilot_len=2, sigma2=1.0,
                            gains=[0.8, 0.5, 0.3, 0.9])
        ecfg = ExperimentConfig(base=base, snr_db_list=[0.0], trials=10, seed=2)
        results = convergence_trace(ecfg)
        emit(results, "svg", tmp_path / "t.svg")
        root = ET.fromstring((tmp_path / "t.svg").read_text())
        tag = "{http://www.w3.org/2000/svg}polyline"
        assert len(root.findall(f".//{tag}")) == 3

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ConfigurationError):
            emit(sample_rows(), "xlsx", tmp_path / "r.xlsx")
