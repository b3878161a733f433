"""Problem and result documents (JSON with scalars as canonical strings).

Targets are 1-based in documents and 0-based in memory.  Decomposition
arrays may hold basis names or 0-based indices.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import DocumentError, LieNormError, ParseError
from .formal import FormalMap, FormalVectorField, format_monomial, monomial_key, term_key
from .lie import Decomposition, LieAlgebra, NonlinearRep
from .scalar import GaussianRational, parse_scalar

RESULT_FORMAT = "lienorm-result/1"


@dataclass(frozen=True)
class LieProblem:
    n: int
    K: int
    algebra: LieAlgebra
    decomposition: Decomposition
    rep: NonlinearRep

    @property
    def names(self):
        return self.algebra.names


def _require(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise DocumentError(f"{where}: missing '{key}'")
    val = obj[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise DocumentError(f"{where}.{key}: expected an integer")
    if kind is not int and not isinstance(val, kind):
        raise DocumentError(f"{where}.{key}: expected {kind.__name__}")
    return val


def _scalar(text, where) -> GaussianRational:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise DocumentError(f"{where}: scalars must be strings")
    try:
        return parse_scalar(str(text))
    except ParseError as exc:
        raise ParseError(f"{where}: {exc}", exc.position) from exc


def parse_terms(items, n: int, where: str) -> dict:
    if not isinstance(items, list):
        raise DocumentError(f"{where}: expected a list of terms")
    out = {}
    for k, t in enumerate(items):
        w = f"{where}[{k}]"
        alpha = _require(t, "alpha", list, w)
        if len(alpha) != n or any(isinstance(a, bool) or not isinstance(a, int) or a < 0 for a in alpha):
            raise DocumentError(f"{w}.alpha: expected {n} non-negative integers")
        target = _require(t, "target", int, w)
        if not 1 <= target <= n:
            raise DocumentError(f"{w}.target: {target} outside 1..{n}")
        c = _scalar(_require(t, "coeff", (str, int), w), f"{w}.coeff")
        key = (tuple(alpha), target - 1)
        out[key] = out.get(key, GaussianRational(0)) + c
    return out


def parse_problem(doc) -> LieProblem:
    """Build a LieProblem from a decoded JSON object."""
    if not isinstance(doc, dict):
        raise DocumentError("problem document must be an object")
    n = _require(doc, "n", int, "problem")
    K = _require(doc, "K", int, "problem")
    if n < 1 or K < 1:
        raise DocumentError("problem: n and K must be positive")
    alg = _require(doc, "algebra", dict, "problem")
    names = _require(alg, "basis", list, "algebra")
    if not names or len(set(names)) != len(names) or not all(isinstance(x, str) and x for x in names):
        raise DocumentError("algebra.basis: expected distinct non-empty names")
    triples = []
    for k, t in enumerate(_require(alg, "structure_constants", list, "algebra")):
        if not isinstance(t, list) or len(t) != 4:
            raise DocumentError(f"algebra.structure_constants[{k}]: expected [a, b, c, coeff]")
        triples.append((*t[:3], _scalar(t[3], f"algebra.structure_constants[{k}]")))
    try:
        g = LieAlgebra.from_triples(names, triples)
    except LieNormError as exc:
        raise DocumentError(f"algebra: {exc}") from exc
    idx = {nm: k for k, nm in enumerate(names)}

    def indices(key):
        arr = _require(_require(doc, "decomposition", dict, "problem"), key, list, "decomposition")
        out = []
        for x in arr:
            if isinstance(x, str) and x in idx:
                out.append(idx[x])
            elif isinstance(x, int) and not isinstance(x, bool) and 0 <= x < len(names):
                out.append(x)
            else:
                raise DocumentError(f"decomposition.{key}: unknown element {x!r}")
        return tuple(out)

    D = Decomposition(indices("m"), indices("g0"), indices("r"), indices("s"))
    rep = _require(doc, "representation", dict, "problem")
    unknown = set(rep) - set(names)
    if unknown:
        raise DocumentError(f"representation: unknown basis element(s) {sorted(unknown)}")
    fields = tuple(FormalVectorField(n, K, parse_terms(rep.get(nm, []), n, f"representation.{nm}"))
                   for nm in names)
    return LieProblem(n, K, g, D, NonlinearRep(K, fields))


# -------------------------------------------------------------- output ---

def terms_doc(field: FormalVectorField) -> list:
    return [{"alpha": list(alpha), "target": i + 1, "coeff": str(c)} for (alpha, i), c in field.sorted_terms()]


def field_doc(field: FormalVectorField) -> dict:
    return {"trusted_degree": field.trusted_degree, "terms": terms_doc(field)}


def map_doc(phi: FormalMap) -> dict:
    return {
        "trusted_degree": phi.trusted_degree,
        "components": [[{"alpha": list(a), "coeff": str(comp[a])} for a in sorted(comp, key=monomial_key)]
                       for comp in phi.components],
    }


def parse_field_doc(doc, n: int, where: str) -> FormalVectorField:
    d = _require(doc, "trusted_degree", int, where)
    if d < 0:
        raise DocumentError(f"{where}.trusted_degree: negative")
    return FormalVectorField(n, d, parse_terms(_require(doc, "terms", list, where), n, f"{where}.terms"))


def parse_map_doc(doc, n: int, where: str) -> FormalMap:
    d = _require(doc, "trusted_degree", int, where)
    comps = _require(doc, "components", list, where)
    if len(comps) != n:
        raise DocumentError(f"{where}.components: expected {n} components")
    out = []
    for i, comp in enumerate(comps):
        if not isinstance(comp, list):
            raise DocumentError(f"{where}.components[{i}]: expected a list")
        series = {}
        for k, t in enumerate(comp):
            w = f"{where}.components[{i}][{k}]"
            alpha = _require(t, "alpha", list, w)
            if len(alpha) != n or any(isinstance(a, bool) or not isinstance(a, int) or a < 0 for a in alpha):
                raise DocumentError(f"{w}.alpha: expected {n} non-negative integers")
            series[tuple(alpha)] = _scalar(_require(t, "coeff", (str, int), w), f"{w}.coeff")
        out.append(series)
    try:
        return FormalMap(n, d, out)
    except (ValueError, LieNormError) as exc:
        raise DocumentError(f"{where}: {exc}") from exc


def problem_doc(problem: LieProblem) -> dict:
    """Canonical re-serialization; equal problems give equal documents."""
    g, D = problem.algebra, problem.decomposition
    names = list(g.names)
    return {
        "n": problem.n,
        "K": problem.K,
        "algebra": {
            "basis": names,
            "structure_constants": [[names[a], names[b], names[c], str(v)] for a, b, c, v in g.triples()],
        },
        "decomposition": {key: [names[k] for k in getattr(D, key)] for key in ("m", "g0", "r", "s")},
        "representation": {nm: terms_doc(f) for nm, f in zip(names, problem.rep.fields)},
    }


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def problem_hash(problem: LieProblem) -> str:
    payload = json.dumps(problem_doc(problem), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from exc


def coordinate_names(p: int, q: int) -> list:
    return [f"x{k + 1}" for k in range(p)] + [f"y{k + 1}" for k in range(q)]


def render_field(field: FormalVectorField, names) -> str:
    lines = []
    for (alpha, i), c in field.sorted_terms():
        lines.append(f"  {c} * {format_monomial(alpha, names)} d/d{names[i]}")
    return "\n".join(lines) if lines else "  0"


def render_map(phi: FormalMap, names) -> str:
    lines = []
    for i, comp in enumerate(phi.components):
        body = " + ".join(f"({comp[a]})*{format_monomial(a, names)}" for a in sorted(comp, key=monomial_key))
        lines.append(f"  {names[i]} <- {body or '0'}")
    return "\n".join(lines)


__all__ = [
    "LieProblem", "parse_problem", "problem_doc", "problem_hash", "canonical_json", "load_json",
    "field_doc", "map_doc", "parse_field_doc", "parse_map_doc", "terms_doc", "term_key",
    "coordinate_names", "render_field", "render_map", "RESULT_FORMAT",
]
