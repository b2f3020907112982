import json
import os

import numpy as np
import pytest
import yaml

from cpgame import generate_synthetic_day, SyntheticProfileParams
from cpgame.cli import main
from cpgame.files import (
    load_manifest,
    read_series,
    read_table,
    write_series,
)
from cpgame.rng import derive_rng


class TestSeriesRoundTrip:
    def test_lossless(self, tmp_path):
        rng = derive_rng(51, 0)
        values = rng.uniform(0.0, 90000.0, 96)
        path = tmp_path / "series.csv"
        write_series(path, values)
        back = read_series(str(path))
        assert np.array_equal(values, back)

    def test_header_enforced(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,mw\n1,5.0\n")
        from cpgame import ScenarioError

        with pytest.raises(ScenarioError):
            read_series(str(path))

    def test_dense_indices_enforced(self, tmp_path):
        path = tmp_path / "gap.csv"
        path.write_text("interval,value\n1,5.0\n3,6.0\n")
        from cpgame import ScenarioError

        with pytest.raises(ScenarioError):
            read_series(str(path))


class TestSyntheticDay:
    def test_range_pinned(self):
        params = SyntheticProfileParams()
        baseline, prices = generate_synthetic_day(params, seed=0)
        assert baseline.max() == pytest.approx(params.peak_mw, abs=1e-9)
        assert baseline.min() == pytest.approx(params.trough_mw, abs=1e-9)
        assert (prices > 0).all()

    def test_zero_noise_bit_identical(self):
        params = SyntheticProfileParams(intervals=24, noise_fraction=0.0)
        b1, p1 = generate_synthetic_day(params, seed=0)
        b2, p2 = generate_synthetic_day(params, seed=99)
        assert np.array_equal(b1, b2)
        assert np.array_equal(p1, p2)

    def test_seed_changes_noise(self):
        params = SyntheticProfileParams()
        b1, _ = generate_synthetic_day(params, seed=0)
        b2, _ = generate_synthetic_day(params, seed=1)
        assert not np.array_equal(b1, b2)

    def test_invalid_params_rejected(self):
        from cpgame import ScenarioError

        with pytest.raises(ScenarioError):
            SyntheticProfileParams(peak_mw=1000.0, trough_mw=2000.0)


class TestScenarioConfig:
    def test_yaml_with_csv_references(self, tmp_path):
        baseline, prices = generate_synthetic_day(SyntheticProfileParams(intervals=24), 0)
        write_series(tmp_path / "baseline.csv", baseline)
        write_series(tmp_path / "prices.csv", prices)
        config = {
            "grid": {"intervals": 24, "duration_minutes": 60},
            "baseline_csv": "baseline.csv",
            "prices_csv": "prices.csv",
            "cost_C": 5.72e9,
            "tie_tolerance": 1e-6,
            "seed": 7,
            "agents": [
                {"id": f"lfl{i}", "baseline_mw": 1000.0, "upper_mw": 1500.0}
                for i in range(5)
            ],
        }
        config_path = tmp_path / "scenario.yaml"
        config_path.write_text(yaml.safe_dump(config))
        from cpgame.files import scenario_from_config_file

        scenario = scenario_from_config_file(str(config_path))
        assert scenario.n_agents == 5
        assert np.array_equal(scenario.baseline, baseline)
        assert scenario.charge_total == 5.72e9


def run_cli(args):
    return main(args)


class TestCli:
    def test_gen_data_and_replay_bit_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        args = ["gen-data", "--intervals", "24", "--seed", "5"]
        assert run_cli(args + ["--out", str(out1)]) == 0
        assert run_cli(args + ["--out", str(out2)]) == 0
        for name in ("baseline.csv", "prices.csv", "manifest.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_counterexample_report(self, tmp_path, capsys):
        out = tmp_path / "ce"
        assert run_cli(["counterexample", "--case", "brd-oscillation", "--out", str(out)]) == 0
        report = (out / "report.txt").read_text()
        assert "oscillation_period=2" in report

    def test_simulate_writes_artifacts(self, tmp_path):
        out = tmp_path / "sim"
        code = run_cli(
            [
                "simulate", "--players", "2", "--cap", "1500", "--intervals", "24",
                "--dynamics", "brd", "--actions", "coarse", "--out", str(out),
            ]
        )
        assert code == 0
        for name in ("trajectory.csv", "peak_series.csv", "final_profile.csv",
                     "library_agent1.csv", "manifest.json"):
            assert (out / name).exists()
        manifest = load_manifest(out / "manifest.json")
        assert manifest["command"] == "simulate"
        assert "config_hash" in manifest
        header, rows = read_table(out / "peak_series.csv")
        assert header == ["round", "peak_mw"]
        assert len(rows) == 25  # init + one per epoch

    def test_report_on_empty_dir_fails(self, tmp_path):
        empty = tmp_path / "nothing"
        empty.mkdir()
        assert run_cli(["report", "--in", str(empty)]) == 1

    def test_invalid_schedule_exits_1_and_cleans_up(self, tmp_path):
        out = tmp_path / "bad"
        code = run_cli(
            ["simulate", "--players", "2", "--intervals", "24",
             "--schedule", "sometimes", "--out", str(out)]
        )
        assert code == 1
        assert not any(out.iterdir())

    def test_ip_single_fraction(self, tmp_path):
        out = tmp_path / "ip"
        code = run_cli(
            ["ip", "--players", "4", "--runs", "2", "--aware-fraction", "0.5",
             "--intervals", "24", "--out", str(out), "--seed", "3"]
        )
        assert code == 0
        header, rows = read_table(out / "ip_sweep.csv")
        assert len(rows) == 1
        assert float(rows[0][0]) == 0.5

    def test_round_robin_update_flag(self, tmp_path):
        out = tmp_path / "rr"
        code = run_cli(
            ["simulate", "--players", "2", "--cap", "1500", "--intervals", "24",
             "--dynamics", "brd", "--update", "round-robin", "--actions", "coarse",
             "--out", str(out)]
        )
        assert code == 0

    def test_ip_scaling_mode(self, tmp_path):
        out = tmp_path / "scale"
        code = run_cli(
            ["ip", "--scale-players", "4,8", "--runs", "2", "--intervals", "24",
             "--out", str(out)]
        )
        assert code == 0
        header, rows = read_table(out / "ip_scaling.csv")
        assert [r[0] for r in rows] == ["4", "8"]

    def test_sweep_small_grid(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        code = run_cli(
            ["sweep", "--caps", "1500", "--players", "2,3", "--intervals", "24",
             "--out", str(out)]
        )
        assert code == 0
        header, rows = read_table(out / "sweep_rows.csv")
        assert len(rows) == 4  # 2 dynamics x 1 cap x 2 player counts
        assert (out / "summary.txt").exists()
        # report re-renders from the stored rows
        assert run_cli(["report", "--in", str(out)]) == 0
