"""``gpt``: command-line front end.

Every subcommand prints one JSON report ``{command, inputs, result, exact}``
with sorted keys and rationals written as strings. Inputs are fixture names,
paths to JSON documents, or ``-`` for standard input; a report piped from
another subcommand is unwrapped automatically.

Exit status is 0 on success, 2 for invalid input or domain errors, and 1 for
anything unexpected.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from typing import Any

from gptkit import composites, logic, ordvec, states
from gptkit.errors import GPTError, ParseError
from gptkit.fixtures import FIXTURES, fixture
from gptkit.rational import fmt, fmt_vec
from gptkit.testspace import (
    Model,
    dot,
    is_algebraic,
    is_semiclassical,
    parse_model,
    product,
    _parse_rational,
)


def _canonical(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _digest(doc: Any) -> str:
    return "sha256:" + hashlib.sha256(_canonical(doc).encode()).hexdigest()


def _read_doc(source: str, stdin) -> Any:
    if source == "-":
        text = stdin.read()
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc}") from None
    # a report from another subcommand carries its payload under "result"
    if isinstance(doc, dict) and "result" in doc and "command" in doc:
        doc = doc["result"]
    return doc


def _load_model(source: str, stdin) -> tuple[Model, Any]:
    if source in FIXTURES and not os.path.exists(source):
        model = fixture(source)
        return model, model.to_dict()
    doc = _read_doc(source, stdin)
    if isinstance(doc, dict) and "model" in doc and "tests" not in doc:
        doc = doc["model"]
    return parse_model(doc), doc


def _rat(q) -> Fraction:
    try:
        return _parse_rational(q)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {q!r}: {exc}") from None


def _rat_matrix(rows) -> tuple:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError("expected a matrix as a list of rows")
    return tuple(tuple(_rat(q) for q in r) for r in rows)


def _rat_vector(v) -> tuple:
    if not isinstance(v, list):
        raise ParseError("expected a vector as a list")
    return tuple(_rat(q) for q in v)


def _joint_from_doc(doc) -> composites.JointWeight:
    if not isinstance(doc, dict) or not {"A", "B", "table"} <= set(doc):
        raise ParseError("joint weight needs 'A', 'B' and 'table'")
    return composites.JointWeight(parse_model(doc["A"]), parse_model(doc["B"]), _rat_matrix(doc["table"]))


def _load_joint(source: str, stdin) -> tuple[composites.JointWeight, Any]:
    if source == "prbox" and not os.path.exists(source):
        w = composites.pr_box()
        return w, w.to_dict()
    doc = _read_doc(source, stdin)
    return _joint_from_doc(doc), doc


# ---------------------------------------------------------------- commands


def _weight_doc(values) -> list[str]:
    return fmt_vec(values)


def cmd_validate(args, stdin) -> tuple[dict, dict]:
    model, doc = _load_model(args.model, stdin)
    M = model.space
    result = {
        "outcomes": list(M.outcomes),
        "tests": [M.labels(t) for t in M.tests],
        "semiclassical": is_semiclassical(M),
        "algebraic": is_algebraic(M, args.budget),
        "states": "full" if model.is_full else len(model.generators),
    }
    return {"model": _digest(doc)}, result


def cmd_states(args, stdin):
    model, doc = _load_model(args.model, stdin)
    M = model.space
    verts = states.state_vertices(model)
    result: dict[str, Any] = {
        "outcomes": list(M.outcomes),
        "count": len(verts),
        "dispersion_free": sum(1 for v in verts if states.is_dispersion_free(v)),
    }
    if model.is_full:
        result["affine_dimension"] = states.StatePolytope.of(M).affine_dimension()
    if args.vertices:
        result["vertices"] = [_weight_doc(v.values) for v in verts]
    if args.project:
        labels = [s.strip() for s in args.project.split(",") if s.strip()]
        idx = [M.index[lab] if lab in M.index else None for lab in labels]
        if None in idx:
            missing = [lab for lab, i in zip(labels, idx) if i is None]
            raise ParseError(f"unknown outcomes in --project: {missing}")
        proj = sorted({tuple(v.values[i] for i in idx) for v in verts})
        result["projection"] = {"labels": labels, "points": [fmt_vec(p) for p in proj]}
    return {"model": _digest(doc)}, result


def cmd_logic(args, stdin):
    model, doc = _load_model(args.model, stdin)
    L = logic.build_logic(model.space, args.budget)
    result: dict[str, Any] = {"size": L.size}
    if args.orthocoherent:
        w = logic.orthocoherence_counterexample(L)
        result["orthocoherent"] = w is None
        result["witness"] = None if w is None else [L.elements[p] for p in w]
    if args.boolean:
        result["boolean"] = logic.is_boolean(L)
    if not (args.orthocoherent or args.boolean):
        result["logic"] = L.to_dict()
    return {"model": _digest(doc)}, result


def cmd_linearize(args, stdin):
    model, doc = _load_model(args.model, stdin)
    L = ordvec.linearize(model)
    return {"model": _digest(doc)}, L.to_dict()


def cmd_compose(args, stdin):
    A, da = _load_model(args.models[0], stdin)
    B, db = _load_model(args.models[1], stdin)
    inputs = {"A": _digest(da), "B": _digest(db)}
    result: dict[str, Any] = {"mode": args.mode, "A": A.to_dict(), "B": B.to_dict()}
    if args.mode == "product":
        model = Model(product(A.space, B.space))
    elif args.mode == "forward":
        model = Model(composites.forward_product(A, B, args.budget).space)
    elif args.mode == "bilateral":
        model = composites.bilateral_model(A, B, args.budget)
    else:
        P = composites.ns_polytope(A, B)
        result["constraints"] = {"equalities": len(P.A_eq), "inequalities": len(P.G)}
        if not args.vertices:
            result["outcomes"] = list(P.space.outcomes)
            return inputs, result
        model = Model.generated(P.space, P.vertices())
    result["model"] = model.to_dict()
    if args.vertices:
        if args.mode == "ns":
            verts = list(model.generators)
        else:
            verts = states.state_vertices(model)
        result["vertices"] = [_weight_doc(v.values) for v in verts]
        if args.mode == "ns":
            result["tables"] = [
                [fmt_vec(r) for r in composites.JointWeight.from_weight(A, B, v).table] for v in verts
            ]
    return inputs, result


def cmd_check_ns(args, stdin):
    w, doc = _load_joint(args.joint, stdin)
    sw = composites.signaling_witness(w)
    result: dict[str, Any] = {"nonsignaling": sw is None}
    if sw is not None:
        result["witness"] = {"direction": sw.direction, "outcome": sw.outcome, "tests": list(sw.tests)}
    else:
        m1, m2 = composites.marginals(w)
        result["marginals"] = {"A": fmt_vec(m1.values), "B": fmt_vec(m2.values)}
        result["joint_state"] = composites.is_joint_state(w)
    return {"joint": _digest(doc)}, result


def _separability_entry(w: composites.JointWeight, LA, LB) -> dict:
    T = composites.bilinear_extension(w, LA, LB)
    sep = composites.min_cone_member(LA, LB, T)
    entry: dict[str, Any] = {"separable": sep.separable}
    if sep.separable:
        entry["decomposition"] = [[i, j, fmt(lam)] for (i, j), lam in sorted(sep.weights.items())]
    else:
        entry["witness"] = [fmt_vec(r) for r in composites.witness_table(sep.witness, LA, LB)]
    return entry


def cmd_separability(args, stdin):
    if args.input == "prbox" and not os.path.exists("prbox"):
        doc = composites.pr_box().to_dict()
    else:
        doc = _read_doc(args.input, stdin)
    if not isinstance(doc, dict):
        raise ParseError("separability input must be a JSON object")
    A, B = parse_model(doc.get("A")), parse_model(doc.get("B"))
    if "tables" in doc:
        tables = [_rat_matrix(t) for t in doc["tables"]]
    elif "table" in doc:
        tables = [_rat_matrix(doc["table"])]
    else:
        raise ParseError("expected 'table' or 'tables' (e.g. from compose --ns --vertices)")
    LA, LB = ordvec.linearize(A), ordvec.linearize(B)
    entries = []
    for t in tables:
        w = composites.JointWeight(A, B, t)
        entries.append(_separability_entry(w, LA, LB))
    n_sep = sum(1 for e in entries if e["separable"])
    result = {"separable": n_sep, "entangled": len(entries) - n_sep, "states": entries}
    return {"input": _digest(doc)}, result


def cmd_remote_eval(args, stdin):
    doc = _read_doc(args.input, stdin)
    if not isinstance(doc, dict) or not {"alpha", "f", "omega", "e"} <= set(doc):
        raise ParseError("remote-eval needs 'alpha', 'f', 'omega' and 'e'")
    r = composites.remote_evaluate(
        _rat_vector(doc["alpha"]), _rat_matrix(doc["f"]), _rat_matrix(doc["omega"]), _rat_vector(doc["e"])
    )
    result = {"lhs": fmt(r.lhs), "rhs": fmt(r.rhs), "equal": r.equal, "channel": [fmt_vec(row) for row in r.channel]}
    return {"input": _digest(doc)}, result


def cmd_boxworld(args, stdin):
    model = composites.boxworld(args.n, args.states)
    return {"n": str(args.n), "states": args.states}, {"model": model.to_dict()}


def cmd_dot(args, stdin):
    model, doc = _load_model(args.model, stdin)
    return {"model": _digest(doc)}, {"dot": dot(model.space, args.name)}


COMMANDS = {
    "validate": cmd_validate,
    "states": cmd_states,
    "logic": cmd_logic,
    "linearize": cmd_linearize,
    "compose": cmd_compose,
    "check-ns": cmd_check_ns,
    "separability": cmd_separability,
    "remote-eval": cmd_remote_eval,
    "boxworld": cmd_boxworld,
    "dot": cmd_dot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report (the default except for dot)")
    common.add_argument("--budget", type=int, default=None, help="cap on enumerated subsets (overrides GPT_BUDGET)")

    parser = argparse.ArgumentParser(prog="gpt", description="Exact analysis of finite probabilistic models.")
    sub = parser.add_subparsers(dest="command", required=True)
    where = "fixture name, path to a JSON model, or - for stdin"

    p = sub.add_parser("validate", parents=[common], help="check a model and summarize it")
    p.add_argument("model", help=where)

    p = sub.add_parser("states", parents=[common], help="state space summary and vertices")
    p.add_argument("model", help=where)
    p.add_argument("--vertices", action="store_true", help="list the extreme states")
    p.add_argument("--project", metavar="LABELS", help="comma-separated outcomes to project vertices onto")

    p = sub.add_parser("logic", parents=[common], help="the orthoalgebra of an algebraic test space")
    p.add_argument("model", help=where)
    p.add_argument("--orthocoherent", action="store_true", help="decide orthocoherence, with a witness")
    p.add_argument("--boolean", action="store_true", help="decide whether the logic is Boolean")

    p = sub.add_parser("linearize", parents=[common], help="coordinates for the span of the states")
    p.add_argument("model", help=where)

    p = sub.add_parser("compose", parents=[common], help="build a composite of two models")
    p.add_argument("models", nargs=2, metavar="MODEL", help=where)
    mode = p.add_mutually_exclusive_group(required=True)
    for name in ("product", "forward", "bilateral", "ns"):
        mode.add_argument(f"--{name}", dest="mode", action="store_const", const=name)
    p.add_argument("--vertices", action="store_true", help="enumerate the composite's extreme states")

    p = sub.add_parser("check-ns", parents=[common], help="no-signaling check of a joint weight")
    p.add_argument("joint", help="path, - for stdin, or prbox")

    p = sub.add_parser("separability", parents=[common], help="min-cone membership with witnesses")
    p.add_argument("input", help="joint weight, compose --ns --vertices report, - or prbox")

    p = sub.add_parser("remote-eval", parents=[common], help="check the remote evaluation identity")
    p.add_argument("input", help="document with alpha, f, omega, e in coordinates")

    p = sub.add_parser("boxworld", parents=[common], help="emit the boxworld model on n gbits")
    p.add_argument("n", type=int)
    p.add_argument("--states", choices=("ns", "full"), default="ns")

    p = sub.add_parser("dot", parents=[common], help="Graphviz rendering of the test space")
    p.add_argument("model", help=where)
    p.add_argument("--name", default="M")
    return parser


def run(argv: list[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.budget is not None and args.budget <= 0:
        stderr.write(json.dumps({"error": {"type": "ParseError", "message": "--budget must be positive"}}) + "\n")
        return 2
    try:
        inputs, result = COMMANDS[args.command](args, stdin)
    except GPTError as exc:
        diag = {"command": args.command, "error": {"type": type(exc).__name__, "message": str(exc)}}
        stderr.write(json.dumps(diag, sort_keys=True) + "\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        diag = {"command": args.command, "error": {"type": "InternalError", "message": f"{type(exc).__name__}: {exc}"}}
        stderr.write(json.dumps(diag, sort_keys=True) + "\n")
        return 1
    if args.command == "dot" and not args.json:
        stdout.write(result["dot"])
        return 0
    report = {"command": args.command, "inputs": inputs, "result": result, "exact": True}
    stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
