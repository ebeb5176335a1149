import io
import json
import subprocess
import sys

import pytest

from subgrad_newton.cli import run_cli


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


class TestExitCodes:
    def test_list(self):
        code, out, _ = call("list-problems")
        assert code == 0
        for name in ("klatte-kummer", "abs-square", "oscillatory", "mech-eq", "lasso"):
            assert name in out

    def test_solve_converged(self):
        code, out, _ = call("solve", "--problem", "mech-eq", "--x0", "0.3333333333333333",
                            "--lambda", "0.5")
        assert code == 0 and json.loads(out)["status"] == "Converged"

    def test_solve_cycle(self, tmp_path):
        script = tmp_path / "script.json"
        script.write_text("[[1, -0.7], [-1, 0.7]]")
        code, out, _ = call("solve", "--problem", "abs-square", "--x0", "0,0.7",
                            "--select", "scripted", "--script", str(script))
        assert code == 2 and json.loads(out)["status"] == "Cycle"

    def test_solve_max_iterations(self):
        code, out, _ = call("solve", "--problem", "klatte-kummer", "--x0", "0.3,0.1",
                            "--max-iter", "0")
        assert code == 2 and json.loads(out)["status"] == "MaxIterations"

    def test_solve_ssn(self):
        code, out, _ = call("solve", "--problem", "abs-square", "--solver", "ssn", "--x0", "1,1")
        assert code == 0

    @pytest.mark.parametrize("argv", [
        ("solve", "--problem", "nope", "--x0", "1"),
        ("solve", "--problem", "abs-square", "--x0", "1,2,3"),
        ("solve", "--problem", "abs-square", "--x0", "a,b"),
        ("solve", "--problem", "abs-square", "--x0", "1,1", "--select", "scripted"),
        ("solve", "--problem", "lasso", "--x0", "1"),
        ("solve", "--problem", "mech-eq", "--x0", "0.2", "--lambda", "2"),
        ("solve", "--problem", "fixture-3-2", "--x0", "1"),
        ("solve", "--x0", "1"),
        ("solve", "--problem", "mech-eq", "--instance", "i.json", "--x0", "1"),
        ("normal-cone", "--problem", "abs-square", "--point", "1,2,3"),
        ("rate", "--trace", "/nonexistent/trace.json", "--xstar", "0"),
        ("bogus",),
        (),
    ])
    def test_usage_errors(self, argv):
        code, _, err = call(*argv)
        assert code == 1 and err

    def test_malformed_trace(self, tmp_path):
        bad = tmp_path / "t.json"
        bad.write_text("{not json")
        assert call("rate", "--trace", str(bad), "--xstar", "0")[0] == 1


class TestOutputs:
    def test_trace_json_byte_identical(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            call("solve", "--problem", "oscillatory", "--x0", "0.01", "--tol", "1e-8",
                 "--out", str(p))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_rate_from_saved_trace(self, tmp_path):
        path = tmp_path / "kk.json"
        call("solve", "--problem", "klatte-kummer", "--x0", "0.05,0.02", "--out", str(path))
        code, out, _ = call("rate", "--trace", str(path), "--xstar", "0,0")
        assert code == 0 and json.loads(out)["classification"] == "FiniteTermination"

    def test_rate_none_exits_two(self, tmp_path):
        path = tmp_path / "cyc.json"
        script = tmp_path / "s.json"
        script.write_text("[[1, -0.7], [-1, 0.7]]")
        call("solve", "--problem", "abs-square", "--x0", "0,0.7", "--select", "scripted",
             "--script", str(script), "--out", str(path))
        code, out, _ = call("rate", "--trace", str(path), "--xstar", "0,0")
        assert code == 2 and json.loads(out)["classification"] == "None"

    def test_csv_output(self, tmp_path):
        path = tmp_path / "t.csv"
        call("solve", "--problem", "mech-eq", "--x0", "0.3333333333333333", "--out", str(path))
        assert path.read_text().splitlines()[0] == "k,x_1,residual_norm,ratio"

    def test_lasso_instance(self, tmp_path):
        inst = tmp_path / "inst.json"
        inst.write_text(json.dumps({"A": [[2, 0, 0], [0, 25, 0], [0, 0, 7]], "b": [1, 4, -5],
                                    "mu": 1 / 3}))
        code, out, _ = call("solve", "--problem", "lasso", "--instance", str(inst),
                            "--x0", "-2,0,0", "--lambda", "1")
        doc = json.loads(out)
        assert code == 0 and doc["iterations"] == 2

    def test_negative_vector_values(self):
        code, out, _ = call("solve", "--problem", "klatte-kummer", "--x0", "-0.05,0.02")
        assert code == 0 and json.loads(out)["status"] == "Converged"

    def test_normal_cone(self):
        code, out, _ = call("normal-cone", "--problem", "mech-eq", "--point", "0,0.6666666666666666")
        doc = json.loads(out)
        assert code == 0 and doc["kind"] == "limiting" and len(doc["pieces"]) >= 1

    @pytest.mark.parametrize("kind", ["regular", "tangent"])
    def test_normal_cone_kinds(self, kind):
        code, out, _ = call("normal-cone", "--problem", "fixture-3-2", "--point", "1,0.5",
                            "--kind", kind)
        assert code == 0 and json.loads(out)["kind"] == kind

    def test_diagnose(self):
        code, out, _ = call("diagnose", "--problem", "oscillatory", "--point",
                            repr(1 / (2 * 3.141592653589793 * 10)), "--reference", "0")
        doc = json.loads(out)
        assert code == 0 and doc["semismoothstar_residual"] >= 0.9
        code, out, _ = call("diagnose", "--problem", "fixture-3-2", "--point", "1,0.5")
        assert json.loads(out)["coderivative_kernel_trivial"] is True

    def test_compare(self):
        code, out, _ = call("compare", "--problem", "klatte-kummer", "--solvers", "c11,ssn",
                            "--x0", "0.05,0.02")
        rows = json.loads(out)["rows"]
        assert [r["solver"] for r in rows] == ["c11", "ssn"]
        assert rows[1]["witness"]["pair"] == [0, 1]

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "subgrad_newton", "list-problems"],
                             capture_output=True, text=True)
        assert res.returncode == 0 and "mech-eq" in res.stdout
