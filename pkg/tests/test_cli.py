import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from gptkit.cli import run

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "validate_firefly": ["validate", "firefly"],
    "states_firefly": ["states", "firefly", "--vertices"],
    "states_pyramid_projection": ["states", "pyramid", "--vertices", "--project", "u,v,w"],
    "logic_firefly": ["logic", "firefly", "--orthocoherent", "--boolean"],
    "linearize_gbit": ["linearize", "gbit"],
    "check_ns_prbox": ["check-ns", "prbox"],
    "separability_prbox": ["separability", "prbox"],
    "compose_product_bits": ["compose", "bit", "bit", "--product"],
    "boxworld_1": ["boxworld", "1"],
}


def gpt(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), io.StringIO(stdin), out, err)
    return code, out.getvalue(), err.getvalue()


def assert_no_floats(doc):
    if isinstance(doc, float):
        raise AssertionError(f"float in output: {doc}")
    if isinstance(doc, dict):
        for v in doc.values():
            assert_no_floats(v)
    elif isinstance(doc, list):
        for v in doc:
            assert_no_floats(v)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, out, err = gpt(*CASES[name])
    assert code == 0, err
    assert out == (GOLDEN / f"{name}.json").read_text()


@pytest.mark.parametrize("name", sorted(CASES))
def test_reports_are_exact_and_deterministic(name):
    _, first, _ = gpt(*CASES[name])
    _, second, _ = gpt(*CASES[name])
    assert first == second
    doc = json.loads(first)
    assert doc["exact"] is True
    assert doc["command"] == CASES[name][0]
    assert_no_floats(doc)


def test_firefly_values():
    doc = json.loads(gpt("states", "firefly", "--vertices")[1])["result"]
    assert doc["count"] == 5 and doc["dispersion_free"] == 4
    assert ["1/2", "1/2", "1/2", "0", "0", "0"] in doc["vertices"]


def test_pipeline_compose_into_separability():
    code, out, err = gpt("compose", "gbit", "gbit", "--ns", "--vertices")
    assert code == 0, err
    code, out, err = gpt("separability", "-", stdin=out)
    assert code == 0, err
    doc = json.loads(out)["result"]
    assert (doc["separable"], doc["entangled"]) == (16, 8)


def test_model_file_and_stdin(tmp_path):
    model = {"tests": [["a", "b"], ["b", "c"]]}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(model))
    from_file = json.loads(gpt("validate", str(path))[1])
    from_stdin = json.loads(gpt("validate", "-", stdin=json.dumps(model))[1])
    assert from_file == from_stdin
    assert from_file["result"]["tests"] == [["a", "b"], ["b", "c"]]


def test_generated_states(tmp_path):
    model = {"tests": [["x", "x'"], ["y", "y'"]], "states": [["1", "0", "1", "0"], ["0", "1", "0", "1"]]}
    doc = json.loads(gpt("states", "-", "--vertices", stdin=json.dumps(model))[1])["result"]
    assert doc["count"] == 2


def test_remote_eval(tmp_path):
    doc = {"alpha": ["1", "1/2"], "f": [["1", "0"], ["0", "2"]], "omega": [["1/3"], ["1"]], "e": ["3"]}
    code, out, _ = gpt("remote-eval", "-", stdin=json.dumps(doc))
    assert code == 0
    res = json.loads(out)["result"]
    assert res["lhs"] == res["rhs"] == "4" and res["equal"] is True


def test_dot_is_plain_text_unless_json():
    code, out, _ = gpt("dot", "chain", "--name", "C")
    assert code == 0 and out.startswith('graph "C" {')
    doc = json.loads(gpt("dot", "chain", "--json")[1])
    assert doc["result"]["dot"].startswith('graph "M" {')


@pytest.mark.parametrize(
    "argv,stdin,kind",
    [
        (["validate", "/nonexistent/model.json"], "", "ParseError"),
        (["validate", "-"], "{not json", "ParseError"),
        (["validate", "-"], '{"tests": [["a", "b"], ["a"]]}', "IrredundanceError"),
        (["logic", "-"], '{"tests": [["a", "b"], ["a", "c"], ["c", "d"]]}', "NotAlgebraic"),
        (["linearize", "empty"], "", "EmptyStateSpace"),
        (["boxworld", "3"], "", "BudgetExceeded"),
        (["validate", "firefly", "--budget", "0"], "", "ParseError"),
        (["remote-eval", "-"], '{"alpha": [0.5], "f": [], "omega": [], "e": []}', "ParseError"),
    ],
)
def test_errors_exit_two_with_diagnostic(argv, stdin, kind):
    code, out, err = gpt(*argv, stdin=stdin)
    assert code == 2
    assert out == ""
    assert json.loads(err)["error"]["type"] == kind


def test_usage_error():
    assert gpt("no-such-command")[0] == 2


def test_installed_entry_point():
    env = dict(os.environ, PYTHONPATH=str(Path(__file__).parents[1] / "src"))
    proc = subprocess.run(
        [sys.executable, "-m", "gptkit.cli", "validate", "firefly"], capture_output=True, text=True, env=env
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["algebraic"] is True
    proc = subprocess.run(
        [sys.executable, "-m", "gptkit.cli", "validate", "nowhere.json"], capture_output=True, text=True, env=env
    )
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"]["type"] == "ParseError"


def test_thin_wrapper_matches_library():
    from gptkit.composites import gbit
    from gptkit.fixtures import firefly
    from gptkit.logic import build_logic
    from gptkit.ordvec import linearize
    from gptkit.rational import fmt_vec
    from gptkit.states import polytope_vertices

    logic = json.loads(gpt("logic", "firefly")[1])["result"]["logic"]
    assert logic == build_logic(firefly().space).to_dict()
    lin = json.loads(gpt("linearize", "gbit")[1])["result"]
    assert lin == linearize(gbit()).to_dict()
    verts = json.loads(gpt("states", "firefly", "--vertices")[1])["result"]["vertices"]
    assert verts == [fmt_vec(v.values) for v in polytope_vertices(firefly().space)]


def test_flags_before_operands():
    a = gpt("compose", "--ns", "gbit", "gbit", "--vertices")[1]
    b = gpt("compose", "gbit", "gbit", "--ns", "--vertices")[1]
    assert a == b and json.loads(a)["result"]["tables"]


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("GPT_BUDGET", "3")
    code, _, err = gpt("validate", "firefly")
    assert code == 2 and json.loads(err)["error"]["type"] == "BudgetExceeded"
    monkeypatch.delenv("GPT_BUDGET")
    assert gpt("validate", "firefly")[0] == 0
