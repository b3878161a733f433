"""Resonance forms, the resonant sets and the search for a resonance vector.

Linear forms on the radical are tuples of GaussianRational, one entry per
radical basis element.  Pairs ``(alpha, i)`` use exponents over the y-block
only and a 0-based target index inside the x-block (R) or y-block (R').
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from . import linalg
from .errors import IndexOutOfRange, SearchExhausted
from .formal import format_monomial, monomials
from .lie import Decomposition, LieAlgebra, SpectralData
from .scalar import ZERO


def form_sub(f, g) -> tuple:
    return tuple(a - b for a, b in zip(f, g))


def form_eval(f, X0) -> object:
    return sum((a * b for a, b in zip(f, X0) if a and b), ZERO)


def lambda_form(alpha, j: int, spectral: SpectralData) -> tuple:
    """sum_i alpha_i lambda_i - lambda_j over all n coordinates (x-block first)."""
    lams = spectral.lambdas
    n = len(lams)
    if len(alpha) != n:
        raise IndexOutOfRange(f"exponent has length {len(alpha)}, expected {n}")
    if not 0 <= j < n:
        raise IndexOutOfRange(f"target {j} out of range")
    r = len(lams[0]) if lams else 0
    out = [ZERO] * r
    for a, lam in zip(alpha, lams):
        if a:
            out = [o + a * x for o, x in zip(out, lam)]
    return tuple(o - x for o, x in zip(out, lams[j]))


def _y_alpha(spectral, beta):
    return (0,) * spectral.p + tuple(beta)


@dataclass(frozen=True)
class ResonanceSet:
    K: int
    R: tuple        # ((alpha_y, i), ...) x-targets whose form is a root
    Rp: tuple       # y-targets whose form is a root
    R0: tuple       # x-targets whose form vanishes identically
    R0p: tuple      # y-targets whose form vanishes identically
    matched: dict   # (block, alpha, i) -> form, for rendering

    def contains(self, alpha_y, target: int, p: int) -> bool:
        """Is the y-only monomial x^alpha d/d(target) resonant?  target is global 0-based."""
        if target < p:
            return (tuple(alpha_y), target) in self._Rset
        return (tuple(alpha_y), target - p) in self._Rpset

    def __post_init__(self):
        object.__setattr__(self, "_Rset", frozenset(self.R))
        object.__setattr__(self, "_Rpset", frozenset(self.Rp))

    def render(self, p: int, q: int) -> str:
        ynames = [f"y{k + 1}" for k in range(q)]
        lines = []
        for label, pairs, block in (("R", self.R, "x"), ("R'", self.Rp, "y")):
            for alpha, i in pairs:
                form = self.matched[(block, alpha, i)]
                lines.append(f"{label}: ({format_monomial(alpha, ynames)} | d/d{block}{i + 1} | "
                             f"{[str(c) for c in form]} | root)")
        return "\n".join(lines)


def resonance_sets(spectral: SpectralData, roots, K: int) -> ResonanceSet:
    """Enumerate y-monomials of degree 1..K against every target."""
    p, q = spectral.p, spectral.q
    roots = [tuple(r) for r in roots]
    R, Rp, R0, R0p = [], [], [], []
    matched = {}
    for d in range(1, K + 1):
        for beta in monomials(q, d) if q else []:
            alpha = _y_alpha(spectral, beta)
            for i in range(p):
                f = lambda_form(alpha, i, spectral)
                matched[("x", beta, i)] = f
                if f in roots:
                    R.append((beta, i))
                if not any(f):
                    R0.append((beta, i))
            for i in range(q):
                f = lambda_form(alpha, p + i, spectral)
                matched[("y", beta, i)] = f
                if f in roots:
                    Rp.append((beta, i))
                if not any(f):
                    R0p.append((beta, i))
    return ResonanceSet(K, tuple(R), tuple(Rp), tuple(R0), tuple(R0p), matched)


@dataclass(frozen=True)
class ResonanceVector:
    coords: tuple   # over the radical basis


def centralizer_basis(g: LieAlgebra, D: Decomposition) -> list:
    """Basis (over the radical basis) of {X in r : [X, s] = 0}."""
    r = list(D.r)
    eqs = []
    for b in D.s:
        for e in range(g.dim):
            eqs.append([g.C[a][b][e] for a in r])
    return linalg.nullspace(eqs, len(r))


def _forms_to_check(spectral: SpectralData, K: int):
    p, q = spectral.p, spectral.q
    n = p + q
    for d in range(1, K + 1):
        for beta in monomials(q, d) if q else []:
            alpha = _y_alpha(spectral, beta)
            for j in range(n):
                yield alpha, j, lambda_form(alpha, j, spectral)


def is_resonance_vector(X0, spectral: SpectralData, roots, K: int):
    """Check lambda(X0) = v(X0) => lambda = v for every y-monomial of degree <= K.

    Returns (ok, witness).
    """
    roots = [tuple(v) for v in roots]
    root_vals = [(v, form_eval(v, X0)) for v in roots]
    for alpha, j, lam in _forms_to_check(spectral, K):
        val = form_eval(lam, X0)
        for v, vv in root_vals:
            if val == vv and lam != v:
                return False, (alpha, j, v)
    return True, None


def _value_order(box: int) -> list:
    vals = [1, 0, -1]
    for k in range(2, box + 1):
        vals += [k, -k]
    return vals


def find_resonance_vector(g: LieAlgebra, D: Decomposition, spectral: SpectralData, roots, K: int,
                          max_box: int = 16) -> ResonanceVector:
    """First integer combination of the centralizer basis that is a resonance vector."""
    if not D.r:
        raise SearchExhausted("the radical is zero: there is no resonance vector to find")
    basis = centralizer_basis(g, D)
    if not basis:
        raise SearchExhausted("the centralizer of s in r is zero")
    roots = [tuple(v) for v in roots]
    lam_forms = {lam for _, _, lam in _forms_to_check(spectral, K)}
    diffs = {form_sub(lam, v) for lam in lam_forms for v in roots if lam != v}
    # each difference pulled back to coordinates on the centralizer
    pulled = []
    for dform in diffs:
        coeffs = tuple(form_eval(dform, b) for b in basis)
        if not any(coeffs):
            raise SearchExhausted(
                f"a coincidence hyperplane contains the whole centralizer (form {[str(c) for c in dform]})")
        pulled.append(coeffs)
    dim = len(basis)
    for box in range(1, max_box + 1):
        for t in product(_value_order(box), repeat=dim):
            if max(abs(x) for x in t) != box:
                continue
            if any(not form_eval(c, t) for c in pulled):
                continue
            X0 = tuple(sum((tk * b[k] for tk, b in zip(t, basis)), ZERO) for k in range(len(D.r)))
            ok, _ = is_resonance_vector(X0, spectral, roots, K)
            if ok:
                return ResonanceVector(X0)
    raise SearchExhausted(f"no resonance vector with integer coordinates up to {max_box}")
