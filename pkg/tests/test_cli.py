import json

import numpy as np
import pytest
from jsonschema import Draft202012Validator

from kappa.cli import load_schema, main, validate_problem
from kappa.forms import cf_matrices, inertia, pick_matrix
from kappa.instances import KINDS, generate, rational_payload, uncplx
from kappa.rational import RationalFunction

REPORT = Draft202012Validator(load_schema("report"))


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(tmp_path, problem, *flags):
    src = write(tmp_path, "problem.json", problem)
    out = tmp_path / "report.out"
    code = main(["run", src, "--out", str(out), *flags])
    if not out.exists():
        return code, None
    text = out.read_text()
    return code, text if "csv" in flags else json.loads(text)


class TestRunExamples:
    def test_pick_single_node(self, tmp_path):
        code, rep = run(tmp_path, {"kind": "pick", "z": [[0, 0]], "w": [[2, 0]], "solve": True})
        assert code == 0 and rep["status"] == "Solved" and rep["kappa"] == 1
        np.testing.assert_allclose(uncplx(rep["solution"]["B"]["zeros"]), [0.0], atol=1e-12)
        np.testing.assert_allclose(uncplx(rep["solution"]["f"]["num"]), 0.0, atol=1e-12)
        assert REPORT.is_valid(rep)

    def test_cf_spectrum(self, tmp_path):
        code, rep = run(tmp_path, {"kind": "cf", "w": [[0, 0], [2, 0]]})
        assert code == 0 and rep["kappa"] == 1
        np.testing.assert_allclose(rep["certificate"]["spectrum"], [-3.0, 1.0])

    def test_csv(self, tmp_path):
        code, text = run(tmp_path, {"kind": "cf", "w": [[0, 0], [2, 0]]}, "--format", "csv")
        text = text.splitlines()
        assert code == 0 and text[0] == "field,index,value"
        assert "spectrum,0,-3.0" in text

    def test_kappa_max_infeasible(self, tmp_path):
        code, rep = run(tmp_path, {"kind": "pick", "z": [[0, 0]], "w": [[2, 0]], "kappa_max": 0})
        assert code == 2 and rep["status"] == "Infeasible"


class TestMalformed:
    def test_unknown_field(self, tmp_path, capsys):
        code, rep = run(tmp_path, {"kind": "pick", "z": [[0, 0]], "w": [[2, 0]], "colour": 1})
        assert code == 1 and rep is None
        assert "colour" in capsys.readouterr().err

    def test_bad_complex(self, tmp_path, capsys):
        code, _ = run(tmp_path, {"kind": "pick", "z": [[0, 0, 0]], "w": [[2, 0]]})
        assert code == 1
        assert "$.z[0]" in capsys.readouterr().err

    def test_unknown_kind(self, tmp_path):
        assert run(tmp_path, {"kind": "hamburger"})[0] == 1

    def test_not_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert main(["run", str(p)]) == 1

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json")]) == 1

    def test_length_mismatch(self, tmp_path):
        assert run(tmp_path, {"kind": "pick", "z": [[0, 0], [0.5, 0]], "w": [[2, 0]]})[0] == 1

    def test_validate_lists_paths(self):
        errs = validate_problem({"kind": "cf", "w": "x"})
        assert errs and all(e.startswith("$") for e in errs)


class TestGen:
    def gen(self, tmp_path, kind, kappa, size, seed):
        path = tmp_path / f"{kind}.json"
        assert main(["gen", str(path), "--kind", kind, "--kappa", str(kappa),
                     "--size", str(size), "--seed", str(seed)]) == 0
        truth = json.loads((tmp_path / f"{kind}.truth.json").read_text())
        return json.loads(path.read_text()), truth, path

    def test_pick(self, tmp_path):
        p, truth, _ = self.gen(tmp_path, "pick", 1, 5, 7)
        assert inertia(pick_matrix(uncplx(p["z"]), uncplx(p["w"]))).n_neg == 1
        assert truth["kappa"] == 1 and "pair" in truth

    def test_cf(self, tmp_path):
        p, _, _ = self.gen(tmp_path, "cf", 0, 4, 1)
        assert cf_matrices(uncplx(p["w"])).inertia.n_neg == 0

    def test_loewner(self, tmp_path):
        p, _, path = self.gen(tmp_path, "loewner", 2, 16, 3)
        out = tmp_path / "r.json"
        assert main(["run", str(path), "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["kappa"] == 2 and rep["refined"]["n_neg"] == 2

    def test_valid_problem(self, tmp_path):
        for kind in KINDS:
            p, _, _ = self.gen(tmp_path, kind, 1, 6, 0)
            assert validate_problem(p) == []

    def test_library_matches_file(self, tmp_path):
        p, _, _ = self.gen(tmp_path, "pick", 1, 5, 7)
        q, _ = generate("pick", seed=7, kappa=1, size=5)
        np.testing.assert_allclose(uncplx(p["z"]), uncplx(q["z"]))


@pytest.mark.parametrize("kind", KINDS)
def test_end_to_end(tmp_path, kind):
    kappa = 1
    path = tmp_path / "p.json"
    assert main(["gen", str(path), "--kind", kind, "--kappa", str(kappa), "--size", "6", "--seed", "2"]) == 0
    truth = json.loads((tmp_path / "p.truth.json").read_text())
    flags = ["--solve"] if kind in ("pick", "cf", "sarason", "nudelman") else []
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        code = main(["run", str(path), "--out", str(out), "--grid", "1024", *flags])
        assert code == 0
        outs.append(out.read_bytes())
    # byte-identical reports for identical input and version
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert REPORT.is_valid(rep), list(REPORT.iter_errors(rep))[:3]
    assert rep["kappa"] == truth["kappa"]
    if flags:
        assert rep["status"] == "Solved" and len(rep["solution"]["B"]["zeros"]) == kappa


def test_search_failure_exit_code(tmp_path):
    # a one-start, one-iteration search on data whose z^2 start is infeasible
    p, _ = generate("pick", seed=4, kappa=2, size=8)
    p["search"] = {"multistart": 1, "max_iter": 1}
    code, rep = run(tmp_path, p, "--solve")
    assert code == 3 and rep["status"] == "SearchFailed"


def test_numerical_failure_exit_code(tmp_path):
    # singular values straddle the rank threshold gap_tol * sup|S| within a
    # factor below 10; weights stay far above the cancellation tolerance
    pole = lambda a: RationalFunction([1.0], [-a, 1.0])
    S = pole(0.5) + pole(-0.5) * 3e-4 + pole(0.5j) * 5e-4
    problem = {"kind": "hankel", "S": rational_payload(S), "m": 16, "gap_tol": 1e-4}
    code, rep = run(tmp_path, problem, "--grid", "1024")
    assert code == 3 and rep["status"] == "NoCleanGap"
    assert REPORT.is_valid(rep)
