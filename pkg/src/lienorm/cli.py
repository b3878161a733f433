"""Command line driver: ``lienorm {validate,straighten,normalize,verify}``.

Exit codes: 0 success, 2 validation failure, 3 arithmetic failure,
4 normalization or verification failure, 5 parse / I/O error.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone

from . import __version__
from .document import (
    RESULT_FORMAT,
    LieProblem,
    canonical_json,
    coordinate_names,
    field_doc,
    load_json,
    map_doc,
    parse_field_doc,
    parse_map_doc,
    parse_problem,
    problem_doc,
    problem_hash,
    render_field,
    render_map,
)
from .errors import DocumentError, LieNormError, StageError, ValidationFailed
from .formal import format_monomial
from .lie import NonlinearRep, ValidationReport, validate_input
from .normal_form import commutator_residues, normalize_full, verify_normal_form
from .scalar import parse_scalar
from .straightening import straighten


def _read(path):
    try:
        if path in (None, "-"):
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from exc


def _with_degree(problem: LieProblem, degree) -> LieProblem:
    if degree is None:
        return problem
    if degree < 1:
        raise DocumentError("--degree must be at least 1")
    fields = tuple(f.with_trusted_degree(degree) for f in problem.rep.fields)
    return LieProblem(problem.n, degree, problem.algebra, problem.decomposition, NonlinearRep(degree, fields))


def _load_problem(args) -> LieProblem:
    return _with_degree(parse_problem(load_json(_read(args.input))), args.degree)


def _stamp() -> dict:
    return {"generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"), "version": __version__}


# ------------------------------------------------------------ commands ---

def cmd_validate(args):
    problem = _load_problem(args)
    report = validate_input(problem.algebra, problem.decomposition, problem.rep)
    doc = {"kind": "validation", "problem_sha256": problem_hash(problem), "report": report.to_dict()}
    text = "validation\n" + report.render()
    return (0 if report.ok else 2), doc, text


def cmd_straighten(args):
    problem = _load_problem(args)
    g, D = problem.algebra, problem.decomposition
    report = validate_input(g, D, problem.rep)
    if not report.ok:
        raise StageError("validate", ValidationFailed("input fails validation", report))
    try:
        st = straighten(problem.rep, g, D, problem.K)
    except LieNormError as exc:
        raise StageError("straighten", exc) from exc
    names = coordinate_names(st.p, st.q)
    doc = {
        "kind": "straightening",
        "problem_sha256": problem_hash(problem),
        "p": st.p,
        "q": st.q,
        "a": [[str(c) for c in row] for row in st.a],
        "section": [[str(c) for c in v] for v in st.section],
        "phi": map_doc(st.phi),
        "flow_map": map_doc(st.psi),
        "representation": {nm: field_doc(f) for nm, f in zip(g.names, st.fields)},
    }
    lines = [f"straightening  p={st.p} q={st.q}", "phi (new coordinates in terms of old):",
             render_map(st.phi, [f"z{k + 1}" for k in range(problem.n)]), "straightened representation:"]
    for nm, f in zip(g.names, st.fields):
        lines += [f"T_{nm}:", render_field(f, names)]
    return 0, doc, "\n".join(lines)


def _residue_doc(fields, D, names):
    out = {}
    for a, res in commutator_residues(fields, D).items():
        out[names[a]] = field_doc(res)["terms"]
    return out


def result_document(result) -> dict:
    problem = result.problem
    g, D = problem.algebra, problem.decomposition
    names = g.names
    spec = result.spectral
    fstr = lambda form: [str(c) for c in form]
    res = result.resonance
    return {
        "format": RESULT_FORMAT,
        "problem": problem_doc(problem),
        "problem_sha256": problem_hash(problem),
        "K": problem.K,
        "p": result.p,
        "q": result.q,
        "transformation": map_doc(result.phi_total),
        "stages": [dict(name=nm, **map_doc(m)) for nm, m in result.stages],
        "normal_form": {nm: field_doc(f) for nm, f in zip(names, result.fields)},
        "a": [[str(c) for c in row] for row in result.a],
        "spectral": {
            "radical": [names[k] for k in D.r],
            "mu": [fstr(f) for f in spec.mu],
            "nu": [fstr(f) for f in spec.nu],
            "roots": [fstr(f) for f in spec.roots],
        },
        "resonance": {
            "R": [{"alpha_y": list(b), "target": i + 1, "form": fstr(res.matched[("x", b, i)])} for b, i in res.R],
            "R_prime": [{"alpha_y": list(b), "target": i + 1, "form": fstr(res.matched[("y", b, i)])}
                        for b, i in res.Rp],
        },
        "X0": None if result.X0 is None else [str(c) for c in result.X0],
        "commutator_residues": _residue_doc(result.fields, D, names),
        "report": result.report.to_dict(),
    }


def result_text(result) -> str:
    problem = result.problem
    names = problem.algebra.names
    coords = coordinate_names(result.p, result.q)
    lines = [f"normal form  n={problem.n} K={problem.K} p={result.p} q={result.q}",
             f"problem sha256 {problem_hash(problem)}"]
    if result.X0 is not None:
        lines.append("X0 = " + " + ".join(f"({c})*{names[a]}" for c, a in zip(result.X0, problem.decomposition.r)))
    lines.append("transformation (new coordinates in terms of old):")
    lines.append(render_map(result.phi_total, [f"z{k + 1}" for k in range(problem.n)]))
    rendered = result.resonance.render(result.p, result.q)
    if rendered:
        lines += ["resonant pairs:", rendered]
    for nm, f in zip(names, result.fields):
        lines += [f"T'_{nm}  (trusted to degree {f.trusted_degree}):", render_field(f, coords)]
    lines += ["verification:", result.report.render()]
    return "\n".join(lines)


def cmd_normalize(args):
    problem = _load_problem(args)
    result = normalize_full(problem, max_search_box=args.max_search_box)
    return 0, result_document(result), result_text(result)


def verify_document(doc) -> ValidationReport:
    """Re-certify a result document from scratch."""
    if not isinstance(doc, dict) or doc.get("format") != RESULT_FORMAT:
        raise DocumentError(f"not a result document (expected format {RESULT_FORMAT!r})")
    for key in ("problem", "problem_sha256", "transformation", "normal_form"):
        if key not in doc:
            raise DocumentError(f"result document lacks '{key}'")
    problem = parse_problem(doc["problem"])
    names = problem.algebra.names
    rep = ValidationReport()
    ok = problem_hash(problem) == doc["problem_sha256"]
    rep.add("problem_hash", ok, None if ok else "embedded problem does not match its recorded hash")
    nf = doc["normal_form"]
    if not isinstance(nf, dict) or set(nf) != set(names):
        raise DocumentError("normal_form must list every basis element")
    fields = [parse_field_doc(nf[nm], problem.n, f"normal_form.{nm}") for nm in names]
    phi = parse_map_doc(doc["transformation"], problem.n, "transformation")
    X0 = doc.get("X0")
    if X0 is not None:
        if not isinstance(X0, list) or len(X0) != len(problem.decomposition.r):
            raise DocumentError("X0 must list one coordinate per radical basis element")
        X0 = tuple(parse_scalar(str(c)) for c in X0)
    elif problem.decomposition.r:
        rep.add("resonance_vector", False, "radical is nonzero but no X0 recorded")
    p = len(problem.decomposition.m)
    final = verify_normal_form(problem.algebra, problem.decomposition, problem.rep, phi, fields, p, X0=X0)
    rep.checks.extend(final.checks)
    return rep


def cmd_verify(args):
    doc = load_json(_read(args.input))
    report = verify_document(doc)
    out = {"kind": "verification", "problem_sha256": doc.get("problem_sha256"), "report": report.to_dict()}
    return (0 if report.ok else 4), out, "verification\n" + report.render()


COMMANDS = {
    "validate": cmd_validate,
    "straighten": cmd_straighten,
    "normalize": cmd_normalize,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lienorm", description="Exact normal forms of nonlinear Lie algebra representations.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("validate", "check the hypotheses on a problem"),
                           ("straighten", "make the abelian ideal act by constant fields"),
                           ("normalize", "run the full normalization pipeline"),
                           ("verify", "re-certify a result document")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--input", "-i", help="input document (default: standard input)")
        sp.add_argument("--output", "-o", help="output path (default: standard output)")
        sp.add_argument("--degree", type=int, help="override the truncation degree K")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--max-search-box", type=int, default=16,
                        help="bound on integer coordinates tried for the resonance vector")
        sp.add_argument("--stamp", action="store_true", help="add a generation timestamp under 'stamp'")
    return ap


def _error_payload(exc: LieNormError) -> dict:
    cause = exc.cause if isinstance(exc, StageError) else exc
    err = {"type": type(cause).__name__, "exit_code": exc.exit_code, "message": str(cause)}
    if isinstance(exc, StageError):
        err["stage"] = exc.stage
    if getattr(cause, "report", None) is not None:
        err["report"] = cause.report.to_dict()
    if getattr(cause, "residues", None):
        err["residues"] = [{"element": nm, "alpha": list(alpha), "target": i + 1, "coeff": str(c)}
                           for nm, alpha, i, c in cause.residues]
    if getattr(cause, "degree", None) is not None:
        err["degree"] = cause.degree
    if getattr(cause, "position", None) is not None:
        err["position"] = cause.position
    return {"error": err}


def _error_text(payload) -> str:
    err = payload["error"]
    stage = f" in stage {err['stage']}" if "stage" in err else ""
    lines = [f"error{stage}: {err['type']} (exit {err['exit_code']}): {err['message']}"]
    if "report" in err:
        for c in err["report"]["checks"]:
            if not c["passed"]:
                lines.append(f"  [FAIL] {c['name']}: {c['witness']}")
    for r in err.get("residues", []):
        lines.append(f"  T_{r['element']}: {r['coeff']} * {format_monomial(tuple(r['alpha']))} d/dz{r['target']}")
    return "\n".join(lines)


def _emit(args, payload, text):
    if args.format == "json":
        if args.stamp:
            payload = dict(payload, stamp=_stamp())
        out = canonical_json(payload)
    else:
        out = text + "\n"
        if args.stamp:
            out += f"# generated {_stamp()['generated_at']}\n"
    if args.output in (None, "-"):
        sys.stdout.write(out)
    else:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(out)
        except OSError as exc:
            sys.stderr.write(f"error: cannot write {args.output}: {exc.strerror}\n")
            return 5
    return 0


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, payload, text = COMMANDS[args.command](args)
    except LieNormError as exc:
        payload = _error_payload(exc)
        code = exc.exit_code
        text = _error_text(payload)
    except RecursionError:
        payload = {"error": {"type": "RecursionError", "exit_code": 5, "message": "input nested too deeply"}}
        code, text = 5, _error_text(payload)
    io = _emit(args, payload, text)
    return io or code


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
