"""Command-line front end: exit codes, determinism, report contents."""

import json

import numpy as np
from numpy.testing import assert_allclose

from hkqk.cli import CHECKS, format_float, main, to_json


def run_json(tmp_path, args, name="out.json"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out


class TestConfigValidation:
    def test_zero_samples_rejected(self, tmp_path, capsys):
        code = main(["verify", "--samples", "0"])
        assert code == 2
        assert "samples" in capsys.readouterr().err

    def test_fd_step_out_of_range(self):
        assert main(["verify", "--fd-step", "0.5"]) == 2
        assert main(["verify", "--fd-step", "1e-10"]) == 2

    def test_negative_c_rejected(self):
        assert main(["verify", "--c", "-1"]) == 2

    def test_unknown_tol_override_name(self):
        assert main(["verify", "--tol-override", "bogus=1"]) == 2

    def test_malformed_tol_override(self):
        assert main(["verify", "--tol-override", "quaternion_relations"]) == 2


class TestVerify:
    def test_reference_run_passes(self, tmp_path):
        code, out = run_json(tmp_path, ["verify", "--m", "1", "--c", "1",
                                        "--seed", "42", "--samples", "20"])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["summary"]["failed"] == 0
        assert payload["summary"]["passed"] == len(payload["results"])
        names = {r["name"] for r in payload["results"]}
        assert "rtilde_direct_vs_closed" in names
        assert "norm_frame_vs_closed_rel" in names
        for r in payload["results"]:
            assert r["passed"], f"{r['name']} residual {r['max_residual']}"

    def test_corrupted_form_fails_quaternion_check(self, tmp_path):
        code, out = run_json(tmp_path, ["verify", "--m", "0", "--c", "0.5",
                                        "--samples", "2", "--corrupt-omega2"])
        assert code == 1
        payload = json.loads(out.read_text())
        by_name = {r["name"]: r for r in payload["results"]}
        assert not by_name["quaternion_relations"]["passed"]
        assert payload["summary"]["failed"] >= 1

    def test_byte_identical_reruns(self, tmp_path):
        args = ["verify", "--m", "0", "--c", "1", "--seed", "7", "--samples", "2"]
        _, first = run_json(tmp_path, args, "a.json")
        _, second = run_json(tmp_path, args, "b.json")
        assert first.read_bytes() == second.read_bytes()

    def test_seed_changes_residuals(self, tmp_path):
        _, first = run_json(tmp_path, ["verify", "--samples", "2", "--seed", "1"], "a.json")
        _, second = run_json(tmp_path, ["verify", "--samples", "2", "--seed", "2"], "b.json")
        assert first.read_bytes() != second.read_bytes()

    def test_csv_format(self, tmp_path):
        code, out = run_json(tmp_path, ["verify", "--m", "0", "--samples", "2",
                                        "--format", "csv"], "out.csv")
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "name,anchor,max_residual,tolerance,passed,points"
        assert len(lines) > 40
        assert all(",true," in line or ",false," in line for line in lines[1:])

    def test_every_result_carries_anchor(self, tmp_path):
        _, out = run_json(tmp_path, ["verify", "--m", "0", "--samples", "1"])
        payload = json.loads(out.read_text())
        for r in payload["results"]:
            assert r["anchor"] == CHECKS[r["name"]][1]
            assert r["points"] >= 1

    def test_tol_scale_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HKQK_TOL_SCALE", "1e-12")
        code, out = run_json(tmp_path, ["verify", "--m", "0", "--samples", "1"])
        assert code == 1
        payload = json.loads(out.read_text())
        assert payload["summary"]["failed"] > 0
        assert payload["config"]["tol_scale"] == 1e-12

    def test_tol_override_can_force_failure(self, tmp_path):
        code, out = run_json(tmp_path, [
            "verify", "--m", "0", "--samples", "1",
            "--tol-override", "moment_map_f_z=1e-30"])
        assert code == 1
        payload = json.loads(out.read_text())
        by_name = {r["name"]: r for r in payload["results"]}
        assert not by_name["moment_map_f_z"]["passed"]
        assert by_name["moment_map_f_z"]["tolerance"] == 1e-30


class TestNorm:
    def test_reference_point_report(self, tmp_path):
        code, out = run_json(tmp_path, ["norm", "--m", "0", "--c", "1",
                                        "--point", "2,0,0,0"])
        assert code == 0
        report = json.loads(out.read_text())["report"]
        assert_allclose(report["norm_closed"], 6.279936, rtol=1e-12)
        assert_allclose(report["norm_frame"], 6.279936, rtol=1e-9)
        assert_allclose(report["rho"], 3.0)
        assert_allclose(report["scal"], -12.0, rtol=1e-9)
        assert_allclose(report["nu"], -1.0, rtol=1e-9)

    def test_undeformed_value_any_point(self, tmp_path):
        code, out = run_json(tmp_path, ["norm", "--m", "1", "--c", "0", "--seed", "3"])
        assert code == 0
        report = json.loads(out.read_text())["report"]
        assert_allclose(report["norm_closed"], 40.0, rtol=1e-12)
        assert_allclose(report["norm_frame"], 40.0, rtol=1e-8)

    def test_out_of_domain_point(self, capsys):
        code = main(["norm", "--m", "0", "--c", "1", "--point", "0.5,0,0,0"])
        assert code == 1
        assert "domain" in capsys.readouterr().err

    def test_wrong_point_length(self):
        assert main(["norm", "--m", "1", "--point", "1,0,0,0"]) == 2


class TestSweep:
    def test_undeformed_sweep_is_constant(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--m", "1", "--c", "0", "--rho-min", "0.5",
                     "--rho-max", "5", "--steps", "10", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "rho,f_z,f_h,norm_closed,norm_frame"
        assert lines[-1] == "# monotonicity: constant"
        values = [float(line.split(",")[3]) for line in lines[1:-1]]
        assert_allclose(values, 40.0, rtol=1e-12)  # 4q(2q+1) at q = 2
        frame_values = [float(line.split(",")[4]) for line in lines[1:-1]]
        assert_allclose(frame_values, 40.0, rtol=1e-8)

    def test_deformed_sweep_is_strictly_monotone(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--m", "0", "--c", "1", "--rho-min", "0.1",
                     "--rho-max", "10", "--steps", "100", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[-1] == "# monotonicity: strictly increasing"
        values = np.array([float(line.split(",")[3]) for line in lines[1:-1]])
        assert np.all(np.diff(values) > 0.0)

    def test_bad_range_rejected(self):
        assert main(["sweep", "--m", "0", "--rho-min", "5", "--rho-max", "1",
                     "--steps", "10"]) == 2
        assert main(["sweep", "--m", "0", "--rho-min", "1", "--rho-max", "5",
                     "--steps", "1"]) == 2

    def test_deterministic_output(self, tmp_path):
        args = ["sweep", "--m", "0", "--c", "0.5", "--rho-min", "1",
                "--rho-max", "2", "--steps", "5", "--seed", "11"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestDecompose:
    def test_reference_report(self, tmp_path):
        code, out = run_json(tmp_path, ["decompose", "--m", "1", "--c", "0", "--seed", "5"])
        assert code == 0
        report = json.loads(out.read_text())["report"]
        assert report["nu"] == -1.0
        assert report["hk_type_commutator"] < 1e-8
        assert report["remainder_frobenius"] > 1e-3
        assert_allclose(report["remainder_frobenius"], 8.485281374238571, rtol=1e-9)

    def test_out_of_domain_point(self):
        assert main(["decompose", "--m", "0", "--c", "1", "--point", "0.1,0,0,0"]) == 1


class TestSerialization:
    def test_float_formatting_round_trips(self):
        for value in (6.279936, -2.5, 1e-300, 0.1 + 0.2):
            assert float(format_float(value)) == value

    def test_json_nesting_and_ordering(self):
        text = to_json({"b": [1, 2.5, {"x": True}], "a": None})
        parsed = json.loads(text)
        assert parsed == {"b": [1, 2.5, {"x": True}], "a": None}
        assert text.index('"b"') < text.index('"a"')  # insertion order kept
