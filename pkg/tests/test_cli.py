import json
import subprocess
import sys
from pathlib import Path

import pytest

from casoratian.cli import emit_report, main, report_json
from casoratian.config import parse_config
from casoratian.errors import ConfigError
from casoratian.experiments import Check, RunResult, run_experiment

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, cfg: dict) -> Path:
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def run_cli(path, out_dir, *extra) -> int:
    return main(["run", str(path), "--out-dir", str(out_dir), "--quiet", *extra])


class TestConfig:
    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            parse_config({"experiment": "plot"})

    def test_missing_field(self):
        with pytest.raises(ConfigError, match="missing"):
            parse_config({"experiment": "verify-identities", "M": 1, "m": 2})

    def test_simulate_needs_model_or_seed(self):
        with pytest.raises(ConfigError, match="model|seed"):
            parse_config({"experiment": "simulate", "M": 1, "m": 2, "n_max": 3,
                          "delta": {"kind": "constant", "value": "1"}})

    def test_seed_length(self):
        with pytest.raises(ConfigError, match="seed"):
            parse_config({"experiment": "simulate", "M": 1, "m": 2, "n_max": 3, "seed": [1, 2],
                          "delta": {"kind": "constant", "value": "1"}})

    def test_bad_poles(self):
        with pytest.raises(ConfigError):
            parse_config({"experiment": "asymptotics", "n_max": 5, "model": {"poles": [1, 2]},
                          "fits": [{"k": 0, "j": 1}]})

    def test_identities_need_exact(self):
        raw = json.loads((CONFIGS / "verify_identities.json").read_text())
        raw["mode"] = "float"
        with pytest.raises(ConfigError):
            parse_config(raw)

    def test_unknown_tolerance(self):
        raw = json.loads((CONFIGS / "asymptotics_tail.json").read_text())
        raw["tolerances"] = {"slack": 1}
        with pytest.raises(ConfigError):
            parse_config(raw)

    def test_rationals_survive_echo(self):
        raw = json.loads((CONFIGS / "asymptotics_tail.json").read_text())
        assert parse_config(raw).echo()["model"]["tail_poles"] == [["1/2"]]

    def test_nonzero_exit_and_stderr(self, tmp_path, capsys):
        assert run_cli(write(tmp_path, {"experiment": "simulate"}), tmp_path) == 2
        assert "config error" in capsys.readouterr().err
        assert not (tmp_path / "report.json").exists()


class TestRun:
    def test_verify_identities(self, tmp_path):
        assert run_cli(CONFIGS / "verify_identities.json", tmp_path) == 0
        report = json.loads((tmp_path / "verify_identities.json").read_text())
        names = [c["name"] for c in report["checks"]]
        assert names == ["lemma2", "tau-factorization", "g-equals-casorati", "round-trip", "step-consistency"]
        assert all(c["status"] == "PASS" and c["tolerance"] == "0" for c in report["checks"])

    def test_zero_seed_csv(self, tmp_path):
        assert run_cli(CONFIGS / "simulate_zero.json", tmp_path) == 0
        lines = (tmp_path / "simulate_zero.csv").read_text().splitlines()
        assert lines[0] == "n,u0,u1,u2,u3,u4,v1,v2,v3,v4,v5"
        assert len(lines) == 14
        assert all(set(line.split(",")[1:]) == {"0"} for line in lines[1:])

    def test_tail_free_rate_is_exact(self, tmp_path):
        assert run_cli(CONFIGS / "asymptotics_tailfree.json", tmp_path) == 0
        report = json.loads((tmp_path / "asymptotics_tailfree.json").read_text())
        for fit in report["fits"]:
            assert fit["observed_rate"] == fit["theoretical_rate"] == "8"

    def test_full_pipeline(self, tmp_path):
        assert run_cli(CONFIGS / "full_pipeline.json", tmp_path) == 0
        report = json.loads((tmp_path / "full_pipeline.json").read_text())
        assert len(report["checks"]) == 6
        assert len(report["fits"]) == 2
        assert report["status"] == "PASS"

    def test_mode_override(self, tmp_path):
        # float64 determinants cannot resolve j = 3 at n = 40
        assert run_cli(CONFIGS / "asymptotics_tail.json", tmp_path, "--mode", "float") == 1
        report = json.loads((tmp_path / "asymptotics_tail.json").read_text())
        statuses = {(f["indices"]["j"], f["status"]) for f in report["fits"]}
        assert (1, "PASS") in statuses and (3, "INCONCLUSIVE") in statuses

    def test_degenerate_seed_surfaces_payload(self, tmp_path):
        cfg = {"experiment": "simulate", "M": 1, "m": 2, "n_max": 12, "model": {"poles": [3]},
               "delta": {"kind": "constant", "value": "1"}}
        assert run_cli(write(tmp_path, cfg), tmp_path) == 1
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["checks"][0]["error"]["error"] == "ZeroCasorati"

    def test_out_of_scope_not_asserted(self, tmp_path):
        cfg = {"experiment": "simulate", "M": 1, "m": 2, "n_max": 20, "model": {"poles": [9, 5]},
               "delta": {"kind": "sequence", "values": [1] * 30}}
        assert run_cli(write(tmp_path, cfg), tmp_path) == 0
        check = json.loads((tmp_path / "report.json").read_text())["checks"][0]
        assert check["status"] == "OUT_OF_SCOPE" and check["asserted"] is False

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "casoratian", "run", str(CONFIGS / "simulate_zero.json"),
             "--out-dir", str(tmp_path)],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0, proc.stderr
        assert "PASS" in proc.stdout


class TestEmit:
    def test_empty_result(self, tmp_path):
        emit_report(RunResult(), tmp_path, "r.json", "t.csv")
        data = json.loads((tmp_path / "r.json").read_text())
        assert data["checks"] == [] and data["fits"] == []
        assert (tmp_path / "t.csv").read_text() == "n\n"

    def test_single_check_is_stable(self):
        result = RunResult({"experiment": "x"}, [Check("one", lhs=1, rhs=1)])
        text = report_json(result)
        assert text == report_json(result)
        assert len(json.loads(text)["checks"]) == 1

    @pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.json")))
    def test_repeat_runs_identical(self, tmp_path, name):
        outputs = []
        for attempt in range(2):
            out = tmp_path / str(attempt)
            run_cli(CONFIGS / name, out)
            outputs.append(sorted((p.name, p.read_bytes()) for p in out.iterdir()))
        assert outputs[0] == outputs[1]

    def test_report_matches_direct_run(self, tmp_path):
        cfg = parse_config(json.loads((CONFIGS / "simulate_zero.json").read_text()))
        run_cli(CONFIGS / "simulate_zero.json", tmp_path)
        assert (tmp_path / "simulate_zero.json").read_text() == report_json(run_experiment(cfg))
