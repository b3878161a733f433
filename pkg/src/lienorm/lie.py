"""Lie algebra data, hypothesis checks, adjoint action and simultaneous triangularization."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import linalg
from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotSimultaneouslyTriangularizable,
)
from .formal import FormalVectorField, bracket, format_monomial, linear_combination
from .scalar import ONE, ZERO, GaussianRational

Form = tuple  # linear form on the radical: coefficient per radical basis element


@dataclass(frozen=True)
class LieAlgebra:
    """Structure constants ``C[a][b][c]`` with ``[X_a, X_b] = sum_c C[a][b][c] X_c``."""

    names: tuple
    C: tuple

    @property
    def dim(self) -> int:
        return len(self.names)

    @classmethod
    def from_triples(cls, names, triples) -> "LieAlgebra":
        """Build from ``(a, b, c, coeff)`` entries; the entry for ``[X_b, X_a]``
        is implied by antisymmetry unless it is listed explicitly."""
        names = tuple(names)
        n = len(names)
        idx = {nm: k for k, nm in enumerate(names)}

        def pos(x):
            if isinstance(x, str):
                if x not in idx:
                    raise IndexOutOfRange(f"unknown basis element {x!r}")
                return idx[x]
            if not 0 <= x < n:
                raise IndexOutOfRange(f"basis index {x} out of range")
            return x

        C = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
        explicit = set()
        for a, b, c, coeff in triples:
            a, b, c = pos(a), pos(b), pos(c)
            C[a][b][c] = C[a][b][c] + GaussianRational(coeff)
            explicit.add((a, b, c))
        for a, b, c in list(explicit):
            if (b, a, c) not in explicit and a != b:
                C[b][a][c] = -C[a][b][c]
        return cls(names, tuple(tuple(tuple(row) for row in plane) for plane in C))

    def bracket_basis(self, a: int, b: int) -> list:
        return list(self.C[a][b])

    def bracket_vec(self, u, v) -> list:
        n = self.dim
        out = [ZERO] * n
        for a in range(n):
            if not u[a]:
                continue
            for b in range(n):
                if not v[b]:
                    continue
                f = u[a] * v[b]
                row = self.C[a][b]
                for c in range(n):
                    if row[c]:
                        out[c] = out[c] + f * row[c]
        return out

    def triples(self) -> list:
        """Nonzero structure constants with a < b, as (a, b, c, coeff)."""
        n = self.dim
        return [(a, b, c, self.C[a][b][c]) for a in range(n) for b in range(a + 1, n)
                for c in range(n) if self.C[a][b][c]]


@dataclass(frozen=True)
class Decomposition:
    m: tuple
    g0: tuple
    r: tuple
    s: tuple


@dataclass(frozen=True)
class NonlinearRep:
    K: int
    fields: tuple

    @property
    def dim(self) -> int:
        return self.fields[0].dim if self.fields else 0

    def combination(self, coeffs, indices) -> FormalVectorField:
        return linear_combination(coeffs, [self.fields[k] for k in indices])


# ------------------------------------------------------------ validation ---

@dataclass
class Check:
    name: str
    passed: bool
    witness: str | None = None


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, passed, witness=None):
        self.checks.append(Check(name, bool(passed), witness))

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"name": c.name, "passed": c.passed, "witness": c.witness} for c in self.checks],
        }

    def render(self) -> str:
        lines = []
        for c in self.checks:
            line = f"[{'PASS' if c.passed else 'FAIL'}] {c.name}"
            if c.witness:
                line += f": {c.witness}"
            lines.append(line)
        return "\n".join(lines)


def _span_rank(vectors) -> int:
    vectors = [v for v in vectors if any(v)]
    return linalg.rank(vectors) if vectors else 0


def _basis_vec(n, k):
    v = [ZERO] * n
    v[k] = ONE
    return v


def _derived_solvable(g: LieAlgebra, indices) -> tuple[bool, int]:
    """Is span(indices) solvable?  Returns (answer, derived length explored)."""
    n = g.dim
    current = [_basis_vec(n, k) for k in indices]
    steps = 0
    while current:
        brackets = [g.bracket_vec(u, v) for u, v in combinations(current, 2)]
        brackets = [b for b in brackets if any(b)]
        if not brackets:
            return True, steps
        r, piv = linalg.rref(brackets)
        nxt = [row for row in r[: len(piv)]]
        if len(nxt) >= len(current):
            return False, steps
        current = nxt
        steps += 1
    return True, steps


def _outside(vec, allowed) -> list:
    return [c for c, x in enumerate(vec) if x and c not in allowed]


def killing_form(g: LieAlgebra, indices) -> list:
    """Killing form of the subalgebra spanned by ``indices`` (assumed closed)."""
    idx = list(indices)
    ads = [[[g.C[a][b][c] for b in idx] for c in idx] for a in idx]
    k = len(idx)
    out = linalg.zeros(k, k)
    for i in range(k):
        for j in range(k):
            prod = linalg.matmul(ads[i], ads[j])
            out[i][j] = sum((prod[t][t] for t in range(k)), ZERO)
    return out


def validate_input(g: LieAlgebra, D: Decomposition, T: NonlinearRep) -> ValidationReport:
    """Check every hypothesis the normalization relies on; never raises."""
    rep = ValidationReport()
    n = g.dim
    nm = g.names
    C = g.C

    bad = next(((a, b, c) for a in range(n) for b in range(a, n) for c in range(n)
                if C[a][b][c] + C[b][a][c]), None)
    rep.add("antisymmetry", bad is None,
            None if bad is None else f"C[{nm[bad[0]]},{nm[bad[1]]}] component {nm[bad[2]]} is not antisymmetric")

    jac_bad = None
    for a, b, c in combinations(range(n), 3):
        x, y, z = (_basis_vec(n, k) for k in (a, b, c))
        t1 = g.bracket_vec(g.bracket_vec(x, y), z)
        t2 = g.bracket_vec(g.bracket_vec(y, z), x)
        t3 = g.bracket_vec(g.bracket_vec(z, x), y)
        if any(p + q + r for p, q, r in zip(t1, t2, t3)):
            jac_bad = (nm[a], nm[b], nm[c])
            break
    rep.add("jacobi", jac_bad is None, None if jac_bad is None else f"Jacobi fails on triple {jac_bad}")

    M, G0, R, S = set(D.m), set(D.g0), set(D.r), set(D.s)
    allidx = set(range(n))
    part_ok = (M | G0 == allidx and not (M & G0) and R | S == G0 and not (R & S)
               and len(D.m) == len(M) and len(D.g0) == len(G0))
    rep.add("partition", part_ok,
            None if part_ok else "m and g0 must partition the basis; r and s must partition g0")

    wit = None
    for a in range(n):
        for b in D.m:
            out = _outside(C[a][b], M) if a not in M else [c for c in range(n) if C[a][b][c]]
            if out:
                wit = f"[{nm[a]},{nm[b]}] leaves m" if a not in M else f"[{nm[a]},{nm[b]}] != 0 inside m"
                break
        if wit:
            break
    rep.add("abelian_ideal", wit is None, wit)

    wit = next((f"[{nm[a]},{nm[b]}] leaves g0" for a in D.g0 for b in D.g0 if _outside(C[a][b], G0)), None)
    rep.add("g0_subalgebra", wit is None, wit)

    wit = next((f"[{nm[a]},{nm[b]}] leaves r" for a in D.g0 for b in D.r if _outside(C[a][b], R)), None)
    rep.add("radical_ideal", wit is None, wit)

    solv, _ = _derived_solvable(g, D.r)
    rep.add("radical_solvable", solv, None if solv else "derived series of r does not reach 0")

    wit = next((f"[{nm[a]},{nm[b]}] leaves s" for a in D.s for b in D.s if _outside(C[a][b], S)), None)
    if wit is None and D.s:
        kf = killing_form(g, D.s)
        if not linalg.det(kf):
            wit = "Killing form of s is degenerate"
    rep.add("semisimple", wit is None, wit)

    # representation-side checks
    fields = T.fields
    dims_ok = len(fields) == n and all(f.dim == fields[0].dim for f in fields)
    rep.add("dimensions", dims_ok, None if dims_ok else "one field per basis element, all on the same C^n")
    if not dims_ok:
        return rep
    dimE = fields[0].dim

    wit = None
    for a in D.g0:
        cv = fields[a].constant_vector()
        if any(cv):
            wit = f"T_{nm[a]} has nonzero constant term {[str(x) for x in cv]}"
            break
    rep.add("regularity_g0", wit is None, wit)

    consts = [fields[a].constant_vector() for a in D.m]
    rk = _span_rank(consts)
    ok = rk == len(D.m)
    rep.add("regularity_m", ok,
            None if ok else f"constant parts of T on m have rank {rk} < {len(D.m)}")

    wit = None
    for a, b in combinations(range(n), 2):
        lhs = bracket(fields[a], fields[b])
        coeffs = C[a][b]
        used = [c for c in range(n) if coeffs[c]]
        if used:
            rhs = linear_combination([coeffs[c] for c in used], [fields[c] for c in used])
        else:
            rhs = FormalVectorField.zero(dimE, T.K)
        upto = min(lhs.trusted_degree, rhs.trusted_degree)
        res = lhs.residue(rhs, upto)
        if res:
            key = min(res, key=lambda k: (sum(k[0]), k[0], k[1]))
            alpha, i = key
            wit = (f"[T_{nm[a]},T_{nm[b]}] != T_[{nm[a]},{nm[b]}] at degree {sum(alpha)}: "
                   f"term {format_monomial(alpha)} d/dx{i + 1} differs by {res[key]}")
            break
    rep.add("representation", wit is None, wit)
    return rep


# -------------------------------------------------------------- adjoint ---

def adjoint_matrices(g: LieAlgebra, subset) -> list:
    """ad X_a on all of g; entry (c, b) = C[a][b][c]."""
    out = []
    n = g.dim
    for a in subset:
        if not 0 <= a < n:
            raise IndexOutOfRange(f"basis index {a} out of range")
        out.append([[g.C[a][b][c] for b in range(n)] for c in range(n)])
    return out


def _is_common_eigenvector(mats, v) -> bool:
    for M in mats:
        w = linalg.matvec(M, v)
        k = next(i for i, x in enumerate(v) if x)
        lam = w[k] / v[k]
        if any(wi != lam * vi for wi, vi in zip(w, v)):
            return False
    return True


def _common_eigenvector(mats, m: int):
    e1 = [ONE] + [ZERO] * (m - 1)
    if _is_common_eigenvector(mats, e1):
        return e1
    eig = [linalg.distinct_eigenvalues(M) for M in mats]

    def search(k, eqs):
        if k == len(mats):
            basis = linalg.nullspace(eqs, m) if eqs else [e1]
            return basis[0] if basis else None
        for lam in eig[k]:
            shifted = [[x - lam if i == j else x for j, x in enumerate(row)] for i, row in enumerate(mats[k])]
            new = eqs + shifted
            if not linalg.nullspace(new, m):
                continue
            got = search(k + 1, new)
            if got is not None:
                return got
        return None

    return search(0, [])


def simultaneous_triangularize(mats) -> tuple[list, list]:
    """Return (P, forms): P^-1 M P is upper triangular for every M in ``mats``
    and ``forms[k][j]`` is the k-th diagonal entry of the j-th conjugated matrix."""
    mats = [linalg.copy(M) for M in mats]
    if not mats:
        return [], []
    m = len(mats[0])
    if any(len(M) != m or any(len(row) != m for row in M) for M in mats):
        raise DimensionMismatch("matrices must be square of equal size")
    if m == 0:
        return [], []
    v = _common_eigenvector(mats, m)
    if v is None:
        raise NotSimultaneouslyTriangularizable("no common eigenvector: the matrices do not span a solvable algebra")
    cols = [v]
    for k in range(m):
        if len(cols) == m:
            break
        e = _basis_vec(m, k)
        if linalg.rank(cols + [e]) == len(cols) + 1:
            cols.append(e)
    P0 = linalg.transpose(cols)
    P0inv = linalg.inverse(P0)
    conj = [linalg.matmul(linalg.matmul(P0inv, M), P0) for M in mats]
    first = tuple(Mc[0][0] for Mc in conj)
    if m == 1:
        return P0, [first]
    subs = [[row[1:] for row in Mc[1:]] for Mc in conj]
    P1, rest = simultaneous_triangularize(subs)
    big = linalg.identity(m)
    for i in range(m - 1):
        for j in range(m - 1):
            big[i + 1][j + 1] = P1[i][j]
    P = linalg.matmul(P0, big)
    return P, [first] + rest


def roots_of_radical(g: LieAlgebra, D: Decomposition) -> list:
    """Distinct weights of ad r acting on all of g, in flag order."""
    if not D.r:
        return []
    _, forms = simultaneous_triangularize(adjoint_matrices(g, D.r))
    out = []
    for f in forms:
        if f not in out:
            out.append(f)
    return out


# ------------------------------------------------------------- spectral ---

@dataclass(frozen=True)
class SpectralData:
    """Eigen-forms of the linear part on the radical, in triangularizing coordinates.

    ``change`` is the block-diagonal matrix P with old = P new.
    """

    p: int
    q: int
    change: tuple
    mu: tuple
    nu: tuple
    roots: tuple

    @property
    def lambdas(self) -> tuple:
        return tuple(self.mu) + tuple(self.nu)


def block_matrices(field: FormalVectorField, p: int) -> tuple[list, list]:
    """(K, H): the x-block and y-block linear parts of a field."""
    L = field.linear_matrix()
    n = len(L)
    Kx = [row[:p] for row in L[:p]]
    Hy = [row[p:] for row in L[p:n]]
    return Kx, Hy


def spectral_data(fields, D: Decomposition, p: int, roots) -> SpectralData:
    """Triangularize the x-block and y-block linear parts over the radical basis."""
    n = fields[0].dim if fields else p
    q = n - p
    Ks, Hs = [], []
    for a in D.r:
        Kx, Hy = block_matrices(fields[a], p)
        Ks.append(Kx)
        Hs.append(Hy)
    r = len(D.r)
    if r:
        Px, mu = simultaneous_triangularize(Ks) if p else ([], [])
        Py, nu = simultaneous_triangularize(Hs) if q else ([], [])
    else:
        Px, mu = linalg.identity(p), [() for _ in range(p)]
        Py, nu = linalg.identity(q), [() for _ in range(q)]
    P = linalg.identity(n)
    for i in range(p):
        for j in range(p):
            P[i][j] = Px[i][j]
    for i in range(q):
        for j in range(q):
            P[p + i][p + j] = Py[i][j]
    return SpectralData(p, q, tuple(tuple(row) for row in P), tuple(mu), tuple(nu), tuple(roots))
