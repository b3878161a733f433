"""The ten acceptance criteria, each timed against its budget."""

import json
from fractions import Fraction
from math import factorial
import random
import subprocess
import sys

import sympy as sp

from conftest import CORPUS, criterion, random_field, random_invertible_map, random_scalar
from lienorm.cli import run_cli
from lienorm.document import LieProblem, load_json, parse_problem
from lienorm.formal import (
    FormalMap,
    FormalVectorField,
    bracket,
    compose_maps,
    invert_map,
    push_all,
    pushforward,
    star,
)
from lienorm.lie import Decomposition, LieAlgebra, NonlinearRep
from lienorm.normal_form import certify_radical, normalize_full
from lienorm.scalar import GaussianRational as Q
from lienorm.straightening import straighten


def load(name) -> LieProblem:
    return parse_problem(load_json((CORPUS / name).read_text()))


# 1 ---------------------------------------------------------------------
def test_c01_algebra_laws():
    rng = random.Random(1)
    with criterion(1, "antisymmetry and Jacobi on 500 random triples", 10):
        for _ in range(500):
            n = rng.randint(1, 3)
            U, V, W = (random_field(rng, n, 5, 6) for _ in range(3))
            uv, vu = bracket(U, V), bracket(V, U)
            assert (uv + vu).is_zero(upto=min(uv.trusted_degree, vu.trusted_degree))
            jac = bracket(U, bracket(V, W)) + bracket(V, bracket(W, U)) + bracket(W, bracket(U, V))
            assert jac.is_zero(upto=jac.trusted_degree)
        print("criterion 1: PASS")


# 2 ---------------------------------------------------------------------
def _sym(c: Q):
    return sp.Rational(c.re_num, c.re_den) + sp.I * sp.Rational(c.im_num, c.im_den)


def _components(F: FormalVectorField, xs):
    comps = [sp.Integer(0)] * F.dim
    for (alpha, i), c in F.terms.items():
        comps[i] += _sym(c) * sp.Mul(*[x ** a for x, a in zip(xs, alpha)])
    return comps


def test_c02_star_matches_differentiation():
    rng = random.Random(2)
    with criterion(2, "star product vs symbolic differentiation, 200 pairs", 5):
        for _ in range(200):
            n = rng.randint(1, 3)
            xs = sp.symbols(f"x1:{n + 1}")
            V = random_field(rng, n, 4, 5, trusted=40)
            W = random_field(rng, n, 4, 5, trusted=40)
            S = star(V, W)
            assert S.trusted_degree >= 8
            v, w, s = _components(V, xs), _components(W, xs), _components(S, xs)
            for j in range(n):
                oracle = sum(v[i] * sp.diff(w[j], xs[i]) for i in range(n))
                assert sp.expand(oracle - s[j]) == 0
        print("criterion 2: PASS")


# 3 ---------------------------------------------------------------------
def test_c03_map_inversion():
    rng = random.Random(3)
    with criterion(3, "compose(phi, inverse(phi)) = identity on 100 maps; Catalan fixture", 10):
        for _ in range(100):
            n = rng.randint(1, 3)
            phi = random_invertible_map(rng, n, 6)
            assert compose_maps(phi, invert_map(phi)).is_identity(upto=6)
        phi = FormalMap(1, 6, [{(1,): 1, (2,): 1}])
        inv = invert_map(phi)
        assert [inv.components[0][(k,)] for k in range(1, 6)] == [1, -1, 2, -5, 14]
        print("criterion 3: PASS")


# 4 ---------------------------------------------------------------------
def _single_ideal_problem(field):
    g = LieAlgebra.from_triples(["X"], [])
    return NonlinearRep(field.trusted_degree, (field,)), g, Decomposition((0,), (), (), ())


def test_c04_straightening_fixtures():
    with criterion(4, "log series and y*exp(x^2/2) straightening fixtures", 5):
        T, g, D = _single_ideal_problem(FormalVectorField(1, 8, {((0,), 0): 1, ((1,), 0): 1}))
        st = straighten(T, g, D, 8)
        phi = st.phi.components[0]
        assert st.phi.trusted_degree >= 8
        for k in range(1, 9):
            assert phi[(k,)] == Q(Fraction((-1) ** (k + 1), k))
        assert set(phi) == {(k,) for k in range(1, 9)}

        T, g, D = _single_ideal_problem(FormalVectorField(2, 8, {((0, 0), 0): 1, ((1, 1), 1): 1}))
        st = straighten(T, g, D, 8)
        second = st.psi.components[1]
        expected = {(2 * m, 1): Q(Fraction(1, 2 ** m * factorial(m))) for m in range(4)}
        assert second == expected
        print("criterion 4: PASS")


# 5 ---------------------------------------------------------------------
def test_c05_straightening_postcondition():
    rng = random.Random(5)
    with criterion(5, "straightened fields are constant on 50 perturbed frames", 30):
        for _ in range(50):
            n = rng.randint(1, 3)
            p = rng.randint(1, n)
            K = 5
            consts = [FormalVectorField.constant([Q(1) if t == i else Q(0) for t in range(n)], K)
                      for i in range(p)]
            chi = random_invertible_map(rng, n, K, nterms=4)
            fields = push_all(consts, chi)
            d = min(f.trusted_degree for f in fields)
            g = LieAlgebra.from_triples([f"P{i}" for i in range(p)], [])
            D = Decomposition(tuple(range(p)), (), (), ())
            st = straighten(NonlinearRep(d, tuple(fields)), g, D, d)
            for f in fields:
                pushed = pushforward(f, st.phi, st.psi)
                assert all(sum(alpha) == 0 for alpha, _ in pushed.terms)
                assert pushed.trusted_degree >= d - 1
        print("criterion 5: PASS")


# 6 ---------------------------------------------------------------------
def test_c06_aff1_end_to_end():
    with criterion(6, "aff(1) corpus problem at K = 6", 5):
        prob = load("aff1.json")
        res = normalize_full(prob)
        x0, x1 = prob.names.index("X0"), prob.names.index("X1")
        expected = FormalVectorField(2, 6, {((1, 0), 0): -1, ((0, 1), 1): "-1/2", ((0, 2), 0): 1})
        assert res.fields[x0].terms == expected.terms
        assert res.fields[x1].terms == {((0, 0), 0): Q(1)}
        factor = dict(res.stages)["degree-3"]
        assert factor == FormalMap.from_field(FormalVectorField(2, 6, {((0, 3), 0): 2}), 6)
        for a in (x0, x1):
            pushed = pushforward(prob.rep.fields[a], res.phi_total)
            upto = min(pushed.trusted_degree, res.fields[a].trusted_degree)
            assert not pushed.residue(res.fields[a], upto)
        assert res.report.ok
        print("criterion 6: PASS")


# 7 ---------------------------------------------------------------------
def random_aff1(rng, K=5) -> LieProblem:
    nu = rng.choice([Q("-1/2"), Q("-1/3"), Q("-2/3"), Q("1/2"), Q("-1/4"), Q(2), Q(-1), Q("3/2")])
    terms = {((1, 0), 0): Q(-1), ((0, 1), 1): nu}
    for _ in range(rng.randint(2, 6)):
        k = rng.randint(1, K)
        target = rng.randrange(2) if k >= 2 else 0
        terms[((0, k), target)] = random_scalar(rng)
    g = LieAlgebra.from_triples(["X0", "X1"], [("X0", "X1", "X1", 1)])
    fields = (FormalVectorField(2, K, terms), FormalVectorField(2, K, {((0, 0), 0): 1}))
    return LieProblem(2, K, g, Decomposition((1,), (0,), (0,), ()), NonlinearRep(K, fields))


def test_c07_resonant_only_support():
    rng = random.Random(7)
    with criterion(7, "50 random aff(1)-type problems certify resonant-only support", 60):
        for _ in range(50):
            prob = random_aff1(rng)
            res = normalize_full(prob)
            assert res.report.ok
            assert certify_radical(res.fields, prob.decomposition, res.resonance, res.p) == []
            for (alpha, i), _ in res.fields[0].terms.items():
                if alpha[0] == 0:
                    assert res.resonance.contains(alpha[1:], i, res.p)
        print("criterion 7: PASS")


# 8 ---------------------------------------------------------------------
SL2 = [("H", "E", "E", 2), ("H", "F", "F", -2), ("E", "F", "H", 1),
       ("E", "P2", "P1", 1), ("F", "P1", "P2", 1), ("H", "P1", "P1", 1), ("H", "P2", "P2", -1)]


def test_c08_semisimple_round_trip():
    K = 4
    names = ["E", "F", "H", "P1", "P2"]
    linear = [
        FormalVectorField(3, K, {((0, 1, 0), 0): -1}),
        FormalVectorField(3, K, {((1, 0, 0), 1): -1}),
        FormalVectorField(3, K, {((1, 0, 0), 0): -1, ((0, 1, 0), 1): 1}),
        FormalVectorField(3, K, {((0, 0, 0), 0): 1}),
        FormalVectorField(3, K, {((0, 0, 0), 1): 1}),
    ]
    chi = FormalMap(3, K, [
        {(1, 0, 0): 1, (0, 0, 2): 3, (0, 0, 3): Q("1/2"), (0, 0, 4): Q(0, 1)},
        {(0, 1, 0): 1, (0, 0, 2): -2, (0, 0, 3): Q("5/7")},
        {(0, 0, 1): 1, (0, 0, 2): 1},
    ])
    g = LieAlgebra.from_triples(names, SL2)
    D = Decomposition((3, 4), (0, 1, 2), (), (0, 1, 2))
    with criterion(8, "sl(2) x C^2 round trip at K = 4", 60):
        conj = push_all(linear, chi)
        assert any(sum(alpha) > 1 for f in conj[:3] for alpha, _ in f.terms)
        res = normalize_full(LieProblem(3, K, g, D, NonlinearRep(K, tuple(conj))))
        for a in (0, 1, 2):
            assert all(sum(alpha) == 1 for alpha, _ in res.fields[a].terms)
            assert res.fields[a].terms == linear[a].terms
        for a in (3, 4):
            assert all(sum(alpha) == 0 for alpha, _ in res.fields[a].terms)
        assert res.report.ok
        assert [c.name for c in res.report.checks if c.name == "equivalence"]
        print("criterion 8: PASS")


# 9 ---------------------------------------------------------------------
def test_c09_idempotence():
    with criterion(9, "normalizing an output returns the identity and the same fields", 30):
        for path in sorted(CORPUS.glob("*.json")):
            prob = parse_problem(load_json(path.read_text()))
            res = normalize_full(prob)
            again = normalize_full(LieProblem(prob.n, prob.K, prob.algebra, prob.decomposition,
                                              NonlinearRep(prob.K, tuple(res.fields))))
            assert again.phi_total.is_identity(), path.name
            assert again.phi_total == FormalMap.identity(prob.n, prob.K), path.name
            assert list(again.fields) == list(res.fields), path.name
        print("criterion 9: PASS")


# 10 --------------------------------------------------------------------
def _mutations(outputs):
    """Ten semantically broken copies of corpus outputs."""
    def edit(name, fn):
        doc = json.loads(outputs[name])
        fn(doc)
        return doc

    def first_term(doc, elem):
        return doc["normal_form"][elem]["terms"][0]

    return [
        edit("aff1", lambda d: first_term(d, "X0").update(coeff="-2")),
        edit("aff1", lambda d: d["normal_form"]["X0"]["terms"].append({"alpha": [0, 3], "target": 1, "coeff": "1"})),
        edit("aff1", lambda d: d["transformation"]["components"][0][1].update(coeff="3")),
        edit("aff1", lambda d: d["problem"]["representation"]["X0"][0].update(coeff="-3")),
        edit("aff1", lambda d: d.update(problem_sha256="0" * 64)),
        edit("aff1", lambda d: d.update(X0=["0"])),
        edit("sl2_c2", lambda d: d["normal_form"]["E"]["terms"].pop()),
        edit("gl2_c2", lambda d: d["normal_form"]["Z"]["terms"][-1].update(coeff="-1/3")),
        edit("hyperbolic", lambda d: first_term(d, "P1").update(coeff="2")),
        edit("aff1_q2", lambda d: d["normal_form"]["X0"]["terms"].append(
            {"alpha": [0, 1, 0], "target": 1, "coeff": "1"})),
    ]


def test_c10_cli_determinism_and_verify(tmp_path):
    with criterion(10, "byte-identical CLI output; verify accepts outputs and rejects 10 mutants", 30):
        outputs = {}
        for path in sorted(CORPUS.glob("*.json")):
            runs = []
            for k in range(2):
                out = tmp_path / f"{path.stem}.{k}.json"
                assert run_cli(["normalize", "--input", str(path), "--output", str(out)]) == 0
                runs.append(out.read_bytes())
            assert runs[0] == runs[1], path.name
            outputs[path.stem] = runs[0].decode()
            assert run_cli(["verify", "--input", str(tmp_path / f"{path.stem}.0.json"),
                            "--output", str(tmp_path / "v.json")]) == 0
        # one real subprocess run, through the installed entry point module
        proc = subprocess.run([sys.executable, "-m", "lienorm.cli", "normalize", "--input", str(CORPUS / "aff1.json")],
                              capture_output=True, check=False)
        assert proc.returncode == 0 and proc.stdout.decode() == outputs["aff1"]
        for k, doc in enumerate(_mutations(outputs)):
            bad = tmp_path / f"mutant{k}.json"
            bad.write_text(json.dumps(doc))
            code = run_cli(["verify", "--input", str(bad), "--output", str(tmp_path / f"mutant{k}.out")])
            assert code == 4, (k, (tmp_path / f"mutant{k}.out").read_text())
        print("criterion 10: PASS")
