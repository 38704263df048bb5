"""End-to-end CLI tests: round-trips, report shapes, exit codes."""
import json

import numpy as np
import pytest

import tierbounds as tb
from tierbounds.cli import main


def run(tmp_path, *argv):
    return main(list(argv))


class TestSimulateCommand:
    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "data.csv"
        assert run(tmp_path, "simulate", "--n", "300", "--seed", "3",
                   "-o", str(path)) == 0
        table = tb.ObservationTable.from_csv(path)
        direct, _ = tb.simulate(300, 3)
        np.testing.assert_allclose(table.y, direct.y)
        np.testing.assert_array_equal(table.x, direct.x)
        np.testing.assert_allclose(table.w["w1"], direct.w["w1"])

    def test_oracle_columns(self, tmp_path):
        path = tmp_path / "data.csv"
        run(tmp_path, "simulate", "--n", "50", "--seed", "3", "--with-oracle",
            "-o", str(path))
        header = path.read_text().splitlines()[0].split(",")
        assert header == ["w1", "w2", "x", "a", "y", "y0", "y1"]

    def test_same_seed_byte_identical(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run(tmp_path, "simulate", "--n", "200", "--seed", "5", "-o", str(p1))
        run(tmp_path, "simulate", "--n", "200", "--seed", "5", "-o", str(p2))
        assert p1.read_bytes() == p2.read_bytes()


class TestOracleCommand:
    def test_report_structure(self, tmp_path):
        path = tmp_path / "oracle.json"
        assert run(tmp_path, "oracle", "--method", "quadrature",
                   "-o", str(path)) == 0
        report = json.loads(path.read_text())
        assert set(report["strata"]) == {"0", "1"}
        rec = report["strata"]["0"]
        assert rec["lower_true"] <= rec["pb_true"] <= rec["upper_true"]
        assert report["config"]["thresholds"] == [-1.42, 1.09]


class TestWitnessCommand:
    def test_worked_margins(self, tmp_path):
        path = tmp_path / "witness.json"
        assert run(tmp_path, "witness", "--k", "3",
                   "--margins0", "0.5,0.3,0.2", "--margins1", "0.2,0.3,0.5",
                   "-o", str(path)) == 0
        report = json.loads(path.read_text())
        assert report["pb_b"] - report["pb_a"] > 1e-6
        assert not report["unique_solution"]

    def test_infeasible_margins_exit_code(self, tmp_path):
        assert run(tmp_path, "witness", "--k", "3",
                   "--margins0", "0,0,1", "--margins1", "1,0,0") == 2


class TestEstimateCommand:
    @pytest.fixture()
    def csv_path(self, tmp_path):
        path = tmp_path / "data.csv"
        run(tmp_path, "simulate", "--n", "1200", "--seed", "8", "-o", str(path))
        return path

    def test_all_estimators(self, csv_path, tmp_path):
        out = tmp_path / "est.json"
        assert run(tmp_path, "estimate", str(csv_path),
                   "--thresholds=-1.42,1.09",
                   "--estimators", "plug-in,1s,1s-gelu:0.05,s1s",
                   "--split", "0.5", "--l", "500", "--harm",
                   "-o", str(out)) == 0
        report = json.loads(out.read_text())
        assert set(report["estimates"]) == {"plug-in", "1s", "1s-gelu:0.05", "s1s"}
        for name, per in report["estimates"].items():
            for s in ("0", "1"):
                rec = per[s]
                assert rec["lower"] <= rec["upper"]
                assert "region" in rec
                assert rec["region"]["lo"] <= rec["lower"]
                assert rec["region"]["hi"] >= rec["upper"]
        assert report["harm"]["0"]["method"] == "harm-plug-in"

    def test_split_required_for_one_step(self, csv_path, tmp_path):
        assert run(tmp_path, "estimate", str(csv_path),
                   "--thresholds=-1.42,1.09", "--estimators", "1s") == 2

    def test_batch_size_required_for_sequential(self, csv_path, tmp_path):
        assert run(tmp_path, "estimate", str(csv_path),
                   "--thresholds=-1.42,1.09", "--estimators", "s1s") == 2

    def test_missing_file_exit_code(self, tmp_path):
        assert run(tmp_path, "estimate", str(tmp_path / "nope.csv"),
                   "--thresholds", "0.0") == 3

    def test_malformed_csv_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("u,v\n1,2\n")
        assert run(tmp_path, "estimate", str(bad), "--thresholds", "0.0") == 3

    def test_config_file_fills_defaults(self, csv_path, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"split": 0.5}))
        out = tmp_path / "est.json"
        assert run(tmp_path, "estimate", str(csv_path),
                   "--thresholds=-1.42,1.09", "--estimators", "1s",
                   "--config", str(cfg), "-o", str(out)) == 0
        report = json.loads(out.read_text())
        assert report["config"]["split"] == 0.5

    def test_unknown_config_key(self, csv_path, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        assert run(tmp_path, "estimate", str(csv_path),
                   "--thresholds", "0.0", "--config", str(cfg)) == 2


class TestBenchmarkCommand:
    def test_csv_and_json_outputs(self, tmp_path):
        prefix = tmp_path / "bench"
        assert run(tmp_path, "benchmark", "--reps", "2", "--n", "400",
                   "--l", "150", "--estimators", "plug-in,s1s",
                   "-o", str(prefix)) == 0
        lines = (tmp_path / "bench.csv").read_text().splitlines()
        assert lines[0].split(",")[:5] == ["estimator", "stratum",
                                           "cov_lower_pct", "cov_upper_pct",
                                           "cov_joint_pct"]
        assert len(lines) == 1 + 2 * 2
        report = json.loads((tmp_path / "bench.json").read_text())
        assert report["config"]["reps"] == 2
        assert "truth" in report

    def test_worker_count_does_not_change_output(self, tmp_path):
        outs = []
        for workers, tag in ((1, "w1"), (8, "w8")):
            prefix = tmp_path / tag
            assert run(tmp_path, "benchmark", "--reps", "4", "--n", "400",
                       "--l", "150", "--estimators", "plug-in,1s",
                       "--seed", "17", "--workers", str(workers),
                       "-o", str(prefix)) == 0
            outs.append((tmp_path / f"{tag}.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_bad_estimator_exit_code(self, tmp_path):
        assert run(tmp_path, "benchmark", "--reps", "1",
                   "--estimators", "tmle") == 2
