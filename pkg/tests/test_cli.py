import json
import subprocess
import sys

import pytest

from conesum.cli import main

SQRT3_CONFIG = {
    "field": {"min_poly": [-3, 0, 1]},
    "module": {
        "basis": [["1", "0"], ["0", "1/3"]],
        "rho": ["0", "0"],
        "units": [["2", "1"]],
    },
    "fan": {"type": "quadratic-auto"},
    "x0": ["3", "1"],
    "N_max": 8,
    "tolerance": 1e-6,
    "precision_bits": 128,
    "seed": 0,
    "format": "csv",
}

CUBIC_CONFIG = {
    "field": {"min_poly": [1, -2, -1, 1]},
    "module": {
        "basis": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
        "rho": ["0", "0", "0"],
        "units": [["0", "0", "1"], ["1", "-2", "1"]],
    },
    "unitsearch": {"a": "13/10", "b": "5/2", "radius": 4, "window": 3},
    "seed": 0,
    "format": "json",
}


@pytest.fixture
def sqrt3_cfg(tmp_path):
    path = tmp_path / "sqrt3.json"
    path.write_text(json.dumps(SQRT3_CONFIG))
    return str(path)


@pytest.fixture
def cubic_cfg(tmp_path):
    path = tmp_path / "cubic.json"
    path.write_text(json.dumps(CUBIC_CONFIG))
    return str(path)


class TestConverge:
    def test_csv_output_and_exit_zero(self, sqrt3_cfg, capsys):
        code = main(["converge", sqrt3_cfg])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "N,partial_sum_decimal,target_decimal,abs_error"
        assert lines[1].startswith("1,")
        final_err = float(lines[-1].split(",")[-1])
        assert final_err < 1e-6

    def test_json_output_has_exact_strings(self, sqrt3_cfg, capsys):
        code = main(["converge", sqrt3_cfg, "--format", "json"])
        out = capsys.readouterr().out
        assert code == 0
        payload = json.loads(out)
        assert payload["target"] == "1/6"
        assert payload["rows"][0]["partial_sum"] == "4/5/√12"

    def test_non_totally_positive_x0_exits_2(self, sqrt3_cfg, capsys):
        code = main(["converge", sqrt3_cfg, "--x0", "0,1"])
        err = capsys.readouterr().err
        assert code == 2
        assert json.loads(err)["kind"] == "config"

    def test_unreachable_tolerance_exits_1(self, sqrt3_cfg, capsys):
        code = main(["converge", sqrt3_cfg, "--N-max", "2", "--tol", "1e-9"])
        capsys.readouterr()
        assert code == 1

    def test_deterministic_output(self, sqrt3_cfg, capsys):
        main(["converge", sqrt3_cfg, "--format", "json"])
        first = capsys.readouterr().out
        main(["converge", sqrt3_cfg, "--format", "json"])
        second = capsys.readouterr().out
        assert first == second

    def test_missing_config_exits_2(self, capsys):
        code = main(["converge", "/nonexistent/config.json"])
        assert code == 2

    def test_malformed_config_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["converge", str(bad)]) == 2

    def test_bad_min_poly_exits_2(self, tmp_path, capsys):
        cfg = dict(SQRT3_CONFIG)
        cfg["field"] = {"min_poly": [1, 0, 1]}  # complex roots
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert main(["converge", str(path)]) == 2


class TestVerify:
    def test_goodfan_passes(self, sqrt3_cfg, capsys):
        code = main(["verify", "goodfan", sqrt3_cfg])
        out = capsys.readouterr().out
        assert code == 0
        assert "FAIL" not in out

    def test_goodfan_json_report_shape(self, sqrt3_cfg, capsys):
        code = main(["verify", "goodfan", sqrt3_cfg, "--format", "json"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["suite"] == "goodfan"
        assert payload["seed"] == 0
        assert all({"name", "pass"} <= set(r) for r in payload["results"])

    def test_lemma1_passes(self, sqrt3_cfg, capsys):
        code = main(["verify", "lemma1", sqrt3_cfg])
        capsys.readouterr()
        assert code == 0

    def test_unknown_suite_exits_2(self, sqrt3_cfg, capsys):
        code = main(["verify", "nosuchsuite", sqrt3_cfg])
        capsys.readouterr()
        assert code == 2

    def test_failing_suite_exits_1(self, tmp_path, capsys):
        cfg = {
            "field": {"min_poly": [-3, 0, 1]},
            "module": SQRT3_CONFIG["module"],
            # two overlapping cones: the fan validation must fail
            "fan": {
                "type": "explicit",
                "cones": [
                    [["1", "0"], ["1", "1"]],
                    [["2", "1"], ["0", "1"]],
                ],
                "unit_action": [],
            },
            "seed": 0,
        }
        path = tmp_path / "bad_fan.json"
        path.write_text(json.dumps(cfg))
        code = main(["verify", "goodfan", str(path)])
        out = capsys.readouterr().out
        assert code == 1
        assert "FAIL" in out

    def test_lemma3_revalidates_found_set(self, cubic_cfg, capsys):
        code = main(["verify", "lemma3", cubic_cfg, "--format", "json"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert all(r["pass"] for r in payload["results"])


class TestUnitsearch:
    def test_finds_candidate(self, cubic_cfg, capsys):
        code = main(["unitsearch", cubic_cfg])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["found"] is True
        assert len(payload["units"]) == 3
        assert payload["bound_conditions"]["passed"]
        assert payload["limit_pair_conditions"]["passed"]
        for chart in payload["charts"]:
            assert chart["vertices_certified"]
            assert all(lo > 0 for lo, _ in chart["exponent_intervals"])

    def test_radius_zero_exits_3(self, cubic_cfg, capsys):
        code = main(["unitsearch", cubic_cfg, "--radius", "0"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 3
        assert payload["found"] is False

    def test_quadratic_field_exits_1_with_record(self, sqrt3_cfg, capsys):
        code = main(["unitsearch", sqrt3_cfg])
        err = capsys.readouterr().err
        assert code == 1
        assert json.loads(err)["kind"] == "DegreeTooSmall"


class TestConsoleScript:
    def test_entry_point_runs(self, sqrt3_cfg):
        proc = subprocess.run(
            [sys.executable, "-m", "conesum.cli", "converge", sqrt3_cfg],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith("N,partial_sum_decimal")
