import json

import pytest

from lop.cli import main

PP = r"(\x.(x x (+) T)) (\x.(x x (+) T))"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestEval:
    def test_pp(self, capsys):
        code, out, _ = run(capsys, "eval", "--calculus", "cbv", "--strategy", "full-surface",
                           "--obs", "values-upto-beta", "-e", PP, "--json")
        data = json.loads(out)
        assert code == 0 and data["converged"]
        (cls,) = data["classes"]
        assert cls["repr"] == r"\x. \y. x"
        num, den = map(int, cls["mass"].split("/"))
        assert num * 1024 >= 1023 * den

    def test_cbn_head(self, capsys):
        code, out, _ = run(capsys, "eval", "--calculus", "cbn", "--strategy", "full-head", "--obs", "hnf",
                           "-e", r"(\x.y)(D D)", "--json")
        data = json.loads(out)
        assert code == 0 and data["steps"] == 1
        assert data["classes"] == [{"repr": "hnf", "mass": "1/1", "resolved": True}]

    def test_divergence(self, capsys):
        code, out, _ = run(capsys, "eval", "--calculus", "cbv", "--strategy", "full-left", "--obs", "values",
                           "-e", "D D", "--max-steps", "200")
        assert code == 2
        assert "residual: 1" in out and "converged: no" in out

    def test_incompatible_strategy(self, capsys):
        code, _, err = run(capsys, "eval", "--calculus", "cbv", "--strategy", "full-head", "-e", "x")
        assert code == 1 and "full-head" in err

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "eval", "-e", "(x")
        assert code == 1 and "1:3" in err

    def test_reserved_name(self, capsys):
        code, _, _ = run(capsys, "eval", "-e", "__z")
        assert code == 1

    def test_multidist_input_and_trace(self, capsys, tmp_path):
        trace = tmp_path / "t.json"
        src = json.dumps({"entries": [{"p": "1/2", "term": "T (+) F"}, {"p": "1/2", "term": "I"}]})
        code, out, _ = run(capsys, "eval", "-e", src, "--obs", "values", "--json", "--trace", str(trace))
        assert code == 0 and json.loads(out)["classes"][0]["mass"] == "1/1"
        assert json.loads(trace.read_text())["steps"][-1]["multidist"]["entries"]

    def test_prelude_file(self, capsys, tmp_path):
        defs = tmp_path / "defs.lop"
        defs.write_text("ID2 = I I\n")
        code, out, _ = run(capsys, "--prelude", str(defs), "eval", "-e", "ID2", "--obs", "values", "--json")
        assert code == 0 and json.loads(out)["steps"] == 1


class TestStep:
    def test_flags(self, capsys):
        code, out, _ = run(capsys, "step", "--show-redexes", "-e", "x (I I) (I I)", "--json")
        data = json.loads(out)
        assert code == 0
        assert [(r["position"], r["surface"], r["left"]) for r in data["redexes"]] == [
            (["fun", "arg"], True, True),
            (["arg"], True, False),
        ]

    def test_normal_form(self, capsys):
        code, out, _ = run(capsys, "step", "-e", r"\x. x")
        assert code == 0 and "no redexes" in out

    def test_pick_out_of_range(self, capsys):
        code, _, err = run(capsys, "step", "-e", "x (I I) (I I)", "--pick", "7")
        assert code == 1 and "out of range" in err

    def test_trace_file_grows(self, capsys, tmp_path):
        trace = tmp_path / "trace.json"
        assert run(capsys, "step", "-e", "(T (+) F) (I I)", "--pick", "0", "--trace", str(trace))[0] == 0
        assert run(capsys, "step", "--pick", "0", "--trace", str(trace))[0] == 0
        data = json.loads(trace.read_text())
        assert len(data["steps"]) == 3
        assert len(data["steps"][-1]["multidist"]["entries"]) == 2


class TestTranslate:
    def test_cbn(self, capsys):
        code, out, _ = run(capsys, "translate", "--from", "cbn", "-e", r"\x.x")
        assert code == 0 and out.strip() == r"\!x. x"

    def test_cbv_variant(self, capsys):
        code, out, _ = run(capsys, "translate", "--variant", "surface-preserving", "-e", "x (+) y")
        assert out.strip() == r"__z (\__w. x) (\__w. y)"

    def test_not_affine(self, capsys):
        code, _, err = run(capsys, "translate", "--from", "bang", "-e", r"\x. x x")
        assert code == 1 and "affine" in err


class TestCheck:
    def test_regressions(self, capsys):
        code, out, err = run(capsys, "check", "regressions")
        lines = [json.loads(x) for x in out.splitlines()]
        assert code == 0 and len(lines) == 2 and all(x["verdict"] == "pass" for x in lines)
        assert "2 checked, 0 failed" in err

    def test_diamond(self, capsys):
        code, out, _ = run(capsys, "check", "diamond", "--calculus", "cbv", "--size", "7")
        lines = [json.loads(x) for x in out.splitlines()]
        assert code == 0 and lines and all(x["verdict"] == "pass" for x in lines)

    def test_failures_set_exit_code(self, capsys):
        code, out, err = run(capsys, "check", "confluence", "--calculus", "bang", "--size", "6")
        assert code == 1 and '"fail"' in out

    def test_output_file_and_jobs(self, capsys, tmp_path):
        path = tmp_path / "report.jsonl"
        code, _, _ = run(capsys, "check", "simulate", "--which", "cbn", "--size", "5", "--jobs", "2",
                         "--output", str(path))
        assert code == 0 and all(json.loads(x)["verdict"] == "pass" for x in path.read_text().splitlines())

    def test_postpone_requires_cbv(self, capsys):
        assert run(capsys, "check", "postpone", "--calculus", "cbn", "--size", "3")[0] == 1

    def test_standardize(self, capsys):
        code, out, _ = run(capsys, "check", "standardize", "--calculus", "cbn", "--count", "20", "--seed", "4")
        assert code == 0 and len(out.splitlines()) == 20
