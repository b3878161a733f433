import random
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pytest

from lienorm import linalg
from lienorm.formal import FormalMap, FormalVectorField, monomials, unit
from lienorm.scalar import GaussianRational as Q

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

_ACCEPTANCE = []


def random_scalar(rng: random.Random, bound: int = 9, gaussian: bool = True) -> Q:
    re = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
    im = Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) if gaussian and rng.random() < 0.3 else 0
    q = Q(re, im)
    return q if q else Q(1)


def random_field(rng, n, maxdeg=5, nterms=6, trusted=None, mindeg=0) -> FormalVectorField:
    terms = {}
    for _ in range(rng.randint(1, nterms)):
        d = rng.randint(mindeg, maxdeg)
        alpha = rng.choice(monomials(n, d))
        terms[(alpha, rng.randrange(n))] = random_scalar(rng)
    return FormalVectorField(n, maxdeg if trusted is None else trusted, terms)


def random_invertible_map(rng, n, K, nterms=5) -> FormalMap:
    while True:
        lin = [[random_scalar(rng, 3, gaussian=False) if rng.random() < 0.4 or i == j else Q(0)
                for j in range(n)] for i in range(n)]
        if linalg.det(lin):
            break
    comps = [{unit(n, j): lin[i][j] for j in range(n) if lin[i][j]} for i in range(n)]
    for _ in range(nterms):
        d = rng.randint(2, K)
        alpha = rng.choice(monomials(n, d))
        i = rng.randrange(n)
        comps[i][alpha] = comps[i].get(alpha, Q(0)) + random_scalar(rng, 5)
    return FormalMap(n, K, comps)


@pytest.fixture
def rng():
    return random.Random(20240611)


@contextmanager
def criterion(number: int, title: str, limit: float):
    """Time a block, record PASS/FAIL for the end-of-run summary, enforce the runtime limit."""
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        within = elapsed < limit
        _ACCEPTANCE.append((number, title, ok and within, elapsed, limit))
    assert within, f"criterion {number} took {elapsed:.2f}s (limit {limit}s)"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, elapsed, limit in sorted(_ACCEPTANCE):
        terminalreporter.write_line(
            f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {elapsed:6.2f}s / {limit:g}s  {title}")
