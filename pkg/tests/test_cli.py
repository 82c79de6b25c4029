import json
import math

import pytest

from idealcstar.cli import dispatch


@pytest.fixture()
def swap_json(tmp_path):
    path = tmp_path / "swap.json"
    payload = {
        "group": "Z", "points": 2, "action": {"a": [1, 0]},
        "measure": [1 / 3, 2 / 3],
    }
    path.write_text(json.dumps(payload))
    return str(path)


def run(args, capsys):
    code = dispatch(args)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


class TestExitCodes:
    def test_pd_check_pass(self, capsys):
        code, report = run(["pd-check", "--group", "F2",
                            "--function", "haagerup:n=1", "--radius", "3"], capsys)
        assert code == 0
        assert report["result"]["passed"] is True
        assert report["result"]["min_eigenvalue"] >= -1e-8

    def test_pd_check_fail(self, capsys, tmp_path):
        table = tmp_path / "f.json"
        table.write_text(json.dumps({
            "values": {"e": 1.0, "a": 0.9, "a^-1": 0.9, "aa": -0.8,
                       "a^-1a^-1": -0.8},
            "certificate": {"kind": "finite_support", "radius": 2},
        }))
        code, report = run(["pd-check", "--group", "F2",
                            "--function", f"@{table}", "--radius", "1"], capsys)
        assert code == 1
        assert report["result"]["passed"] is False

    def test_usage_error_unknown_group(self, capsys):
        code = dispatch(["pd-check", "--group", "E8",
                         "--function", "haagerup:n=1"])
        assert code == 2

    def test_malformed_json_system(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = dispatch(["dynamics", "--system", str(bad)])
        assert code == 2

    def test_missing_field_system(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"group": "Z", "points": 2,
                                   "action": {"a": [1, 0]}}))
        code = dispatch(["dynamics", "--system", str(bad)])
        assert code == 2

    def test_budget_exceeded_is_usage_error(self, capsys):
        code = dispatch(["pd-check", "--group", "F2",
                         "--function", "haagerup:n=1", "--radius", "14"])
        assert code == 2

    def test_certificate_reject_is_one(self, capsys):
        code, _ = run(["certificate", "--group", "F2", "--ideal", "cc",
                       "--family", "haagerup:n=1..6", "--conv-radius", "2"],
                      capsys)
        assert code == 1


class TestReports:
    def test_determinism_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        for out in (out1, out2):
            code = dispatch(["--seed", "3", "--output", str(out), "norm-gap",
                             "--group", "F2", "--element", "gensum",
                             "--radius", "4", "--gns-radius", "2"])
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_norm_gap_fields(self, capsys):
        code, report = run(["norm-gap", "--group", "F2", "--element", "gensum",
                            "--radius", "6", "--gns-radius", "3",
                            "--ideal", "c0"], capsys)
        assert code == 0
        result = report["result"]
        assert result["trivial"]["value"] == pytest.approx(4.0)
        assert result["reduced_upper"]["value"] <= 3.4642
        assert result["gap_full_vs_reduced"] is True
        assert report["schema"] == 1

    def test_dn_report_fields(self, capsys, swap_json):
        code, report = run(["dynamics", "--system", swap_json,
                            "--op", "dn-report"], capsys)
        assert code == 0
        result = report["result"]
        assert result["rho_upper"] == [2.0, 1.0]
        assert result["fixed_vector_exists"] is True

    def test_cocycle_op(self, capsys, swap_json):
        code, report = run(["dynamics", "--system", swap_json,
                            "--op", "cocycle", "--element", "a"], capsys)
        assert code == 0
        assert report["result"]["rho"] == [2.0, 0.5]

    def test_growth(self, capsys):
        code, report = run(["growth", "--group", "Z2", "--max-k", "6"], capsys)
        assert code == 0
        assert report["result"]["growth_constant"] == pytest.approx(4.0)
        assert report["result"]["sphere_counts"] == [4, 8, 12, 16, 20, 24]

    def test_lp_norm_report(self, capsys):
        code, report = run(["lp-norm", "--group", "F2",
                            "--function", "haagerup:n=1", "--p", "2",
                            "--radius", "20"], capsys)
        assert code == 0
        expected = 1 + 4 * math.exp(-2) / (1 - 3 * math.exp(-2))
        assert report["result"]["total"] == pytest.approx(expected, rel=1e-9)

    def test_lp_norm_divergent_exit(self, capsys):
        code, report = run(["lp-norm", "--group", "F2",
                            "--function", "haagerup:n=1", "--p", "1",
                            "--radius", "5"], capsys)
        assert code == 1
        assert report["result"]["status"] == "divergent"

    def test_ideal_command(self, capsys):
        code, report = run(["ideal", "--group", "F2",
                            "--function", "haagerup:n=2", "--ideal", "c0"],
                           capsys)
        assert code == 0
        assert report["result"]["verdict"] == "member"
        code, _ = run(["ideal", "--group", "F2",
                       "--function", "haagerup:n=2", "--ideal", "cc"], capsys)
        assert code == 1

    def test_gns_command(self, capsys):
        code, report = run(["gns", "--group", "F2",
                            "--function", "haagerup:n=1",
                            "--radius", "3", "--pad", "1"], capsys)
        assert code == 0
        assert report["result"]["coefficient_recovery_exact"] is True

    def test_coproduct_command(self, capsys):
        code, report = run(["coproduct", "--group", "Z", "--radius", "2"],
                           capsys)
        assert code == 0
        assert report["result"]["density"]["rank"] == 25

    def test_cnd_command(self, capsys):
        code, report = run(["cnd-check", "--group", "Dinf",
                            "--function", "wordlength", "--radius", "3"], capsys)
        assert code == 0

    def test_certificate_accept(self, capsys):
        code, report = run(["certificate", "--group", "Z2", "--ideal", "cc",
                            "--family", "folner:boxes=2..8",
                            "--conv-radius", "2"], capsys)
        assert code == 0
        assert report["result"]["label"] == "amenability witness"

    def test_csv_format(self, capsys):
        code, text = run(["--format", "csv", "growth", "--group", "F2",
                          "--max-k", "3"], capsys)
        assert code == 0
        assert text.startswith("key,value")
        assert "result.growth_constant,4.0" in text

    def test_norm_sweep_csv_table(self, capsys):
        code, text = run(["--format", "csv", "norm-gap", "--group", "F2",
                          "--element", "gensum", "--radius", "4",
                          "--gns-radius", "2", "--sweep", "2..4"], capsys)
        assert code == 0
        assert "result.reduced_lower_sweep.0.radius,2" in text
        assert "result.reduced_lower_sweep.2.radius,4" in text

    def test_json_table_function_with_certificate(self, capsys, tmp_path):
        table = tmp_path / "delta.json"
        table.write_text(json.dumps({
            "values": {"e": 1.0},
            "certificate": {"kind": "finite_support", "radius": 0},
        }))
        code, report = run(["ideal", "--group", "F2",
                            "--function", f"@{table}", "--ideal", "cc"], capsys)
        assert code == 0
        assert report["result"]["verdict"] == "member"

    def test_random_pd_function_spec(self, capsys):
        code, report = run(["pd-check", "--group", "F2",
                            "--function", "random_pd:dim=3,seed=5",
                            "--radius", "2"], capsys)
        assert code == 0
