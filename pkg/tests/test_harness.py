import json
from pathlib import Path

import numpy as np
import pytest

from instructmpc.harness import (
    ConfigError,
    load_config,
    read_trace,
    run_experiment,
    serialize_config,
    sweep,
    trace_file_digest,
    write_trace,
)
from instructmpc.harness.config import save_config
from instructmpc.harness.verify import REPORT_SCHEMA, criterion_a1, verify_suite
from instructmpc.sims.episode import run_episode
from instructmpc.sims.presets import robot_setup, theory_setup


class TestConfig:
    def test_minimal_robot_defaults(self):
        config = load_config({"run": {"scenario": "robot"}})
        assert config.t_len == 240
        assert config.k == 5
        assert config.tuner["projection"] is True
        assert config.tuner["threshold"] == 240
        assert config.l2d["model"] == "softmax"

    def test_invalid_k_names_the_key(self):
        with pytest.raises(ConfigError) as err:
            load_config({"run": {"scenario": "robot", "k": 0}})
        assert "run.k" in str(err.value)

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ConfigError) as err:
            load_config({"run": {"scenario": "warp-drive"}})
        assert "run.scenario" in str(err.value)

    def test_external_model_needs_cmd(self):
        with pytest.raises(ConfigError) as err:
            load_config({"run": {"scenario": "robot"}, "l2d": {"model": "external"}})
        assert "l2d.cmd" in str(err.value)

    def test_round_trip_identity(self, tmp_path):
        doc = {
            "run": {"scenario": "theory", "T": 300, "k": "auto",
                    "seeds": {"count": 3, "base": 5}},
            "tuner": {"kind": "tailored-ogd", "D": 2.5},
        }
        first = load_config(doc)
        dumped = serialize_config(first)
        second = load_config(dumped)
        assert serialize_config(second) == dumped
        assert second.seeds == [5, 6, 7]
        path = tmp_path / "config.json"
        save_config(first, path)
        assert serialize_config(load_config(path)) == dumped

    def test_toml_documents_parse(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(
            '[run]\nscenario = "robot"\nT = 120\nseeds = [1, 2]\n'
            '[tuner]\nkind = "frozen"\n'
        )
        config = load_config(path)
        assert config.t_len == 120 and config.seeds == [1, 2]
        assert config.tuner["kind"] == "frozen"


class TestTraces:
    def test_write_read_round_trip(self, tmp_path):
        setup = theory_setup(t_len=40)
        result = run_episode(setup, "tuned", 0)
        path = tmp_path / "trace.csv"
        write_trace(result, path)
        data = read_trace(path)
        assert data["version"] == 1
        assert np.allclose(data["x0"], result.trace.x[:-1, 0])
        assert np.allclose(data["stage_cost"], result.trace.stage_costs)
        assert np.allclose(np.diff(data["cum_cost"]), result.trace.stage_costs[1:])
        assert data["context_id"][0] == result.trace.context_ids[0]

    def test_reader_rejects_foreign_files(self, tmp_path):
        path = tmp_path / "bogus.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            read_trace(path)


class TestExperiment:
    def test_summary_matches_traces(self, tmp_path):
        config = load_config(
            {"run": {"scenario": "theory", "T": 80, "seeds": [0, 1],
                     "variants": ["classic", "tuned"]}}
        )
        summary = run_experiment(config, out_dir=str(tmp_path), certify=False)
        for variant, block in summary["variants"].items():
            finals = []
            for entry in block["episodes"]:
                data = read_trace(tmp_path / entry["trace"])
                # the stored cost includes the terminal-state term
                assert entry["cost"] >= data["cum_cost"][-1] - 1e-9
                finals.append(entry["cost"])
            assert block["mean_cost"] == pytest.approx(np.mean(finals))

    def test_rerun_is_bit_exact(self, tmp_path):
        config = load_config(
            {"run": {"scenario": "robot", "T": 100, "seeds": [0],
                     "variants": ["untuned"]}}
        )
        run_experiment(config, out_dir=str(tmp_path / "a"), certify=False)
        run_experiment(config, out_dir=str(tmp_path / "b"), certify=False)
        da = trace_file_digest(tmp_path / "a" / "trace_untuned_0.csv")
        db = trace_file_digest(tmp_path / "b" / "trace_untuned_0.csv")
        assert da == db

    def test_certified_theory_run_reports_bounds(self, tmp_path):
        config = load_config(
            {"run": {"scenario": "theory", "T": 120, "seeds": [0],
                     "variants": ["tuned"]},
             "l2d": {"model": "affine"},
             "tuner": {"kind": "tailored-ogd"}}
        )
        summary = run_experiment(config, out_dir=str(tmp_path))
        report = summary["variants"]["tuned"]["episodes"][0]["regret_report"]
        assert report["regret"] <= report["theorem1_rhs"]
        assert report["regret"] >= -1e-6 * max(1.0, report["j_hindsight"])

    def test_sweep_over_k(self, tmp_path):
        config = load_config(
            {"run": {"scenario": "theory", "T": 60, "seeds": [0],
                     "variants": ["classic"]}}
        )
        table = sweep(config, "k=2..4", out_dir=str(tmp_path))
        assert [row["k"] for row in table["values"]] == [2, 3, 4]
        assert (tmp_path / "sweep.json").exists()


class TestVerify:
    def test_fault_injection_fails_residual_check(self):
        result = criterion_a1(dare_tol=1e-2)
        assert not result.passed
        assert result.measured["robot_residual"] > 1e-10

    def test_report_schema_validates(self):
        import jsonschema

        report = verify_suite(name_filter="A1")
        jsonschema.validate(report, REPORT_SCHEMA)
        assert report["criteria"][0]["id"] == "A1"

    def test_filter_selects_single_criterion(self):
        report = verify_suite(name_filter="A4")
        assert [c["id"] for c in report["criteria"]] == ["A4"]


class TestCli:
    def test_run_and_verify_commands(self, tmp_path):
        from click.testing import CliRunner

        from instructmpc.cli import main

        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(
            {"run": {"scenario": "theory", "T": 60, "seeds": [0],
                     "variants": ["classic"]}}
        ))
        runner = CliRunner()
        result = runner.invoke(
            main, ["run", "--config", str(config_path), "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 0, result.output
        assert "classic: mean cost" in result.output

        result = runner.invoke(main, ["verify", "--filter", "A4"])
        assert result.exit_code == 0, result.output
        assert "[PASS] A4" in result.output

    def test_config_error_exit_code(self, tmp_path):
        from click.testing import CliRunner

        from instructmpc.cli import main

        config_path = tmp_path / "bad.json"
        config_path.write_text(json.dumps({"run": {"scenario": "robot", "k": 0}}))
        runner = CliRunner()
        result = runner.invoke(main, ["run", "--config", str(config_path)])
        assert result.exit_code == 2
