import pytest

from conftest import CORPUS
from lienorm.document import LieProblem, load_json, parse_problem
from lienorm.errors import (
    ConstrainedCocycleInfeasible,
    NonResonantResidue,
    NotTriangular,
    ShapeViolation,
    StageError,
)
from lienorm.formal import FormalMap, FormalVectorField as F, push_all
from lienorm.lie import NonlinearRep
from lienorm.normal_form import (
    ab_split,
    commutator_residues,
    fixes_coordinate_fields,
    homological_step,
    linearize_semisimple,
    normalize_at_X0,
    normalize_full,
    normalize_radical,
    split_linear,
    verify_normal_form,
)
from lienorm.scalar import GaussianRational as Q

LAM = (Q(-1), Q("-1/2"))


def load(name):
    return parse_problem(load_json((CORPUS / name).read_text()))


def test_split_linear_examples():
    s = split_linear(F(2, 3, {((1, 0), 0): -1, ((0, 1), 1): "-1/2"}), 1)
    assert s.N.is_zero() and len(s.S.terms) == 2
    s = split_linear(F(3, 3, {((1, 0, 0), 0): -1, ((0, 1, 0), 1): -1, ((0, 1, 0), 0): 1}), 2)
    assert s.N.terms == {((0, 1, 0), 0): Q(1)}
    assert s.S.terms == {((1, 0, 0), 0): Q(-1), ((0, 1, 0), 1): Q(-1)}
    with pytest.raises(NotTriangular):
        split_linear(F(2, 3, {((1, 0), 1): 1}), 2)


def test_ab_split_rejects_x_dependence():
    parts = ab_split(F(2, 4, {((1, 0), 0): -1, ((0, 2), 0): 1, ((0, 1), 1): 3}), 1)
    assert parts.A.terms == {((0, 2), 0): Q(1)}
    assert parts.H.terms == {((0, 1), 1): Q(3)}
    with pytest.raises(ShapeViolation):
        ab_split(F(2, 4, {((1, 1), 0): 1}), 1)


def test_homological_step_cubic():
    T = F(2, 6, {((1, 0), 0): -1, ((0, 2), 0): 1, ((0, 3), 0): 1, ((0, 1), 1): "-1/2"})
    W, N = homological_step(T, 3, LAM, 1)
    assert W.terms == {((0, 3), 0): Q(2)}
    assert N.is_zero()
    W, N = homological_step(T, 2, LAM, 1)
    assert W.is_zero() and N.terms == {((0, 2), 0): Q(1)}
    # rerunning reproduces the same factor
    assert homological_step(T, 3, LAM, 1)[0] == homological_step(T, 3, LAM, 1)[0]


def test_homological_step_linear():
    T = F(2, 6, {((1, 0), 0): -1, ((0, 1), 0): 1, ((0, 1), 1): "-1/2"})
    W, _ = homological_step(T, 1, LAM, 1)
    assert W.terms == {((0, 1), 0): Q(-2)}


def test_normalize_at_x0_factors_fix_dx():
    T = F(2, 6, {((1, 0), 0): -1, ((0, 1), 0): 3, ((0, 2), 0): 1, ((0, 3), 0): 1,
                 ((0, 4), 1): 2, ((0, 1), 1): "-1/2"})
    phi, Tn, factors = normalize_at_X0(T, LAM, 1, 6)
    assert Tn.terms == {((1, 0), 0): Q(-1), ((0, 1), 1): Q("-1/2"), ((0, 2), 0): Q(1)}
    assert [k for k, _ in factors][:3] == [1, 3, 4]
    assert all(fixes_coordinate_fields(f, 1) for _, f in factors)


def test_normalize_at_x0_is_identity_on_normal_input():
    T = F(2, 6, {((1, 0), 0): -1, ((0, 2), 0): 1, ((0, 1), 1): "-1/2"})
    phi, Tn, factors = normalize_at_X0(T, LAM, 1, 6)
    assert factors == [] and phi.is_identity() and Tn == T


def test_injected_non_resonant_term_is_caught():
    prob = load("aff1.json")
    res = normalize_full(prob)
    fields = list(res.fields)
    fields[0] = fields[0] + F(2, 6, {((0, 3), 0): 1})
    with pytest.raises(NonResonantResidue) as info:
        normalize_radical(fields, FormalMap.identity(2, 6), prob.decomposition, res.resonance, 1)
    assert info.value.residues[0][1:3] == ((0, 3), 0)


def test_linearize_without_semisimple_part_is_identity():
    prob = load("aff1.json")
    psi, fields, factors = linearize_semisimple(list(prob.rep.fields), prob.decomposition, LAM, 1, 6)
    assert psi.is_identity() and factors == []


def test_constrained_cocycle_infeasible():
    prob = load("sl2_c2.json")
    # an X0 spectrum with no kernel monomials leaves no admissible unknowns
    with pytest.raises(ConstrainedCocycleInfeasible) as info:
        linearize_semisimple(list(prob.rep.fields), prob.decomposition, (Q(1), Q(2), Q(7)), 2, 4)
    assert info.value.degree == 2


def test_gl2_pipeline():
    res = normalize_full(load("gl2_c2.json"))
    names = res.problem.names
    z = res.fields[names.index("Z")]
    assert z.terms == {((1, 0, 0), 0): Q(-1), ((0, 1, 0), 1): Q(-1), ((0, 0, 1), 2): Q("-1/2")}
    assert all(sum(a) == 1 for k in ("E", "F", "H") for a, _ in res.fields[names.index(k)].terms)
    assert all(r.is_zero() for r in commutator_residues(res.fields, res.problem.decomposition).values())


def test_invalid_problem_wrapped_with_stage():
    prob = load("aff1.json")
    fields = (prob.rep.fields[0], F(2, 6, {((1, 0), 0): 1}))
    bad = LieProblem(2, 6, prob.algebra, prob.decomposition, NonlinearRep(6, fields))
    with pytest.raises(StageError) as info:
        normalize_full(bad)
    assert info.value.stage == "validate" and info.value.exit_code == 2


def test_verifier_detects_wrong_transformation():
    prob = load("aff1.json")
    res = normalize_full(prob)
    wrong = FormalMap(2, 6, [{(1, 0): 1, (0, 3): 3}, {(0, 1): 1}])
    report = verify_normal_form(prob.algebra, prob.decomposition, prob.rep, wrong, res.fields, 1, X0=res.X0)
    assert [c.name for c in report.failures()] == ["equivalence"]


def test_conjugated_problem_returns_to_same_normal_form():
    prob = load("aff1.json")
    base = normalize_full(prob)
    chi = FormalMap(2, 6, [{(1, 0): 1, (0, 2): 5, (0, 4): 1}, {(0, 1): 1, (0, 3): "1/3"}])
    moved = LieProblem(2, 6, prob.algebra, prob.decomposition, NonlinearRep(6, tuple(push_all(prob.rep.fields, chi))))
    again = normalize_full(moved)
    assert again.fields[0].terms == base.fields[0].terms
