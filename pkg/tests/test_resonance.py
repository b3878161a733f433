import pytest

from conftest import CORPUS
from lienorm.document import load_json, parse_problem
from lienorm.errors import SearchExhausted
from lienorm.lie import Decomposition, LieAlgebra, roots_of_radical, spectral_data
from lienorm.resonance import (
    centralizer_basis,
    find_resonance_vector,
    is_resonance_vector,
    lambda_form,
    resonance_sets,
)
from lienorm.scalar import GaussianRational as Q


@pytest.fixture
def aff1():
    prob = parse_problem(load_json((CORPUS / "aff1.json").read_text()))
    roots = roots_of_radical(prob.algebra, prob.decomposition)
    spec = spectral_data(prob.rep.fields, prob.decomposition, 1, roots)
    return prob, spec, roots


def test_lambda_forms(aff1):
    _, spec, _ = aff1
    assert lambda_form((0, 3), 0, spec) == (Q("-1/2"),)
    assert lambda_form((0, 2), 0, spec) == (Q(0),)
    assert lambda_form((0, 1), 0, spec) == (Q("1/2"),)


def test_resonant_sets(aff1):
    _, spec, roots = aff1
    res = resonance_sets(spec, roots, 6)
    assert res.R == (((2,), 0),)
    assert res.Rp == (((1,), 0),)
    assert res.contains((2,), 0, 1) and res.contains((1,), 1, 1)
    assert not res.contains((3,), 0, 1)
    assert "R: (y1^2 | d/dx1" in res.render(1, 1)


def test_resonance_vector(aff1):
    prob, spec, roots = aff1
    assert find_resonance_vector(prob.algebra, prob.decomposition, spec, roots, 6).coords == (Q(1),)
    ok, witness = is_resonance_vector((Q(0),), spec, roots, 6)
    assert not ok and witness is not None


def test_centralizer_of_s_in_r():
    prob = parse_problem(load_json((CORPUS / "gl2_c2.json").read_text()))
    assert centralizer_basis(prob.algebra, prob.decomposition) == [[Q(1)]]


def test_search_exhausted_cases():
    g = LieAlgebra.from_triples(["A"], [])
    with pytest.raises(SearchExhausted):
        find_resonance_vector(g, Decomposition((), (0,), (), ()), None, [], 3)
    # r = C^2 carrying the standard sl(2) action: nothing in r commutes with s
    names = ["E", "F", "H", "A", "B"]
    g = LieAlgebra.from_triples(names, [("H", "E", "E", 2), ("H", "F", "F", -2), ("E", "F", "H", 1),
                                        ("E", "B", "A", 1), ("F", "A", "B", 1), ("H", "A", "A", 1),
                                        ("H", "B", "B", -1)])
    with pytest.raises(SearchExhausted):
        find_resonance_vector(g, Decomposition((), (0, 1, 2, 3, 4), (3, 4), (0, 1, 2)), None, [], 3)
