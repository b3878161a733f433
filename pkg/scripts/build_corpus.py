"""Regenerate the JSON problems under corpus/ (except the hand-written aff1.json)."""

from __future__ import annotations

import sys
from pathlib import Path

from lienorm.document import LieProblem, canonical_json, problem_doc
from lienorm.formal import FormalMap, FormalVectorField, push_all
from lienorm.lie import Decomposition, LieAlgebra, NonlinearRep
from lienorm.scalar import GaussianRational as Q


def field(n, K, terms):
    """terms: (alpha, 1-based target, coeff)"""
    return FormalVectorField(n, K, {(tuple(a), t - 1): Q(c) for a, t, c in terms})


def problem(names, triples, m, g0, r, s, fields, K, chi=None):
    g = LieAlgebra.from_triples(names, triples)
    idx = {nm: k for k, nm in enumerate(names)}
    D = Decomposition(*(tuple(idx[x] for x in part) for part in (m, g0, r, s)))
    fs = [fields[nm] for nm in names]
    if chi is not None:
        fs = push_all(fs, chi)
    n = fs[0].dim
    return LieProblem(n, K, g, D, NonlinearRep(K, tuple(fs)))


def chi_map(n, K, comps):
    return FormalMap(n, K, [{tuple(a): Q(c) for a, c in comp} for comp in comps])


SL2 = [("H", "E", "E", 2), ("H", "F", "F", -2), ("E", "F", "H", 1),
       ("E", "P2", "P1", 1), ("F", "P1", "P2", 1), ("H", "P1", "P1", 1), ("H", "P2", "P2", -1)]


def sl2_linear(K):
    return {
        "P1": field(3, K, [((0, 0, 0), 1, 1)]),
        "P2": field(3, K, [((0, 0, 0), 2, 1)]),
        "E": field(3, K, [((0, 1, 0), 1, -1)]),
        "F": field(3, K, [((1, 0, 0), 2, -1)]),
        "H": field(3, K, [((1, 0, 0), 1, -1), ((0, 1, 0), 2, 1)]),
    }


def sl2_chi(K):
    return chi_map(3, K, [
        [((1, 0, 0), 1), ((0, 0, 2), 1), ((0, 0, 3), "1/2")],
        [((0, 1, 0), 1), ((0, 0, 2), -2), ((0, 0, 4), "1+1i")],
        [((0, 0, 1), 1)],
    ])


def build() -> dict:
    out = {}
    out["aff1_normal"] = problem(
        ["X0", "X1"], [("X0", "X1", "X1", 1)], ["X1"], ["X0"], ["X0"], [],
        {"X1": field(2, 6, [((0, 0), 1, 1)]),
         "X0": field(2, 6, [((1, 0), 1, -1), ((0, 1), 2, "-1/2"), ((0, 2), 1, 1)])}, 6)

    out["sl2_c2"] = problem(["E", "F", "H", "P1", "P2"], SL2, ["P1", "P2"], ["E", "F", "H"], [],
                            ["E", "F", "H"], sl2_linear(4), 4, chi=sl2_chi(4))

    gl2 = sl2_linear(4)
    gl2["Z"] = field(3, 4, [((1, 0, 0), 1, -1), ((0, 1, 0), 2, -1), ((0, 0, 1), 3, "-1/2")])
    chi = chi_map(3, 4, [
        [((1, 0, 0), 1), ((0, 0, 2), 3), ((0, 0, 3), 1)],
        [((0, 1, 0), 1), ((0, 0, 3), -1)],
        [((0, 0, 1), 1), ((0, 0, 2), "1/2")],
    ])
    out["gl2_c2"] = problem(["E", "F", "H", "Z", "P1", "P2"],
                            SL2 + [("Z", "P1", "P1", 1), ("Z", "P2", "P2", 1)],
                            ["P1", "P2"], ["E", "F", "H", "Z"], ["Z"], ["E", "F", "H"], gl2, 4, chi=chi)

    out["aff1_q2"] = problem(
        ["X0", "X1"], [("X0", "X1", "X1", 1)], ["X1"], ["X0"], ["X0"], [],
        {"X1": field(3, 5, [((0, 0, 0), 1, 1)]),
         "X0": field(3, 5, [((1, 0, 0), 1, -1), ((0, 1, 0), 2, "-1/2"), ((0, 0, 1), 2, 3),
                            ((0, 0, 1), 3, "-1/4"), ((0, 1, 0), 1, 5),
                            ((0, 2, 0), 1, 1), ((0, 1, 1), 1, -2), ((0, 1, 2), 1, 7),
                            ((0, 0, 2), 2, "2/3"), ((0, 0, 4), 1, "1i"), ((0, 3, 0), 2, 1)])}, 5)

    out["hyperbolic"] = problem(
        ["X0", "P1", "P2"], [("X0", "P1", "P2", 1), ("X0", "P2", "P1", 1)],
        ["P1", "P2"], ["X0"], ["X0"], [],
        {"P1": field(3, 5, [((0, 0, 0), 1, 1)]),
         "P2": field(3, 5, [((0, 0, 0), 2, 1)]),
         "X0": field(3, 5, [((0, 1, 0), 1, -1), ((1, 0, 0), 2, -1), ((0, 0, 1), 3, "1/2"),
                            ((0, 0, 2), 1, 1), ((0, 0, 3), 2, -3), ((0, 0, 1), 1, 2),
                            ((0, 0, 4), 3, 1)])}, 5)
    return out


def main(argv=None) -> int:
    dest = Path(argv[0] if argv else Path(__file__).resolve().parent.parent / "corpus")
    dest.mkdir(exist_ok=True)
    for name, prob in build().items():
        (dest / f"{name}.json").write_text(canonical_json(problem_doc(prob)))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
