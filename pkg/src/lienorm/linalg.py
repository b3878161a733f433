"""Small exact linear algebra over Q(i).

Matrices are lists of rows of GaussianRational.  Sizes here are tiny (the
dimension of a Lie algebra or of the ambient space, or a few hundred
unknowns in a homological system), so plain Gauss-Jordan elimination is
all that is needed.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import mpmath

from .errors import DimensionMismatch, EigenvalueNotGaussianRational, SingularMatrix
from .scalar import ONE, ZERO, GaussianRational

Matrix = list  # list[list[GaussianRational]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def as_matrix(rows) -> Matrix:
    return [[GaussianRational(x) for x in row] for row in rows]


def copy(m: Matrix) -> Matrix:
    return [list(row) for row in m]


def transpose(m: Matrix) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise DimensionMismatch(f"cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{len(b[0])}")
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        acc = out[i]
        for k, aik in enumerate(row):
            if not aik:
                continue
            bk = b[k]
            for j in range(cols):
                if bk[j]:
                    acc[j] = acc[j] + aik * bk[j]
    return out


def matvec(a: Matrix, v) -> list:
    return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in a]


def is_zero_matrix(m: Matrix) -> bool:
    return all(not x for row in m for x in row)


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (left-most pivot first)."""
    a = copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c].inverse()
        a[r] = [x * inv if x else ZERO for x in a[r]]
        pr = a[r]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                ai = a[i]
                a[i] = [x - f * y if y else x for x, y in zip(ai, pr)]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Matrix) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def nullspace(m: Matrix, ncols: int | None = None) -> list[list]:
    """Basis of {v : m v = 0}; one vector per free column, free entry 1."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    if not m:
        basis = []
        for f in range(ncols):
            v = [ZERO] * ncols
            v[f] = ONE
            basis.append(v)
        return basis
    r, pivots = rref(m)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, pc in enumerate(pivots):
            if r[row][f]:
                v[pc] = -r[row][f]
        basis.append(v)
    return basis


def solve(a: Matrix, b: list, ncols: int | None = None) -> list | None:
    """A particular solution of ``a x = b`` (free variables set to zero), or None."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    if not a:
        return [ZERO] * ncols
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    r, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for row, pc in enumerate(pivots):
        x[pc] = r[row][ncols]
    return x


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [list(row) + idrow for row, idrow in zip(m, identity(n))]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix("matrix is singular")
    return [row[n:] for row in r]


def det(m: Matrix) -> GaussianRational:
    a = copy(m)
    n = len(a)
    result = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return ZERO
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            result = -result
        p = a[c][c]
        result = result * p
        inv = p.inverse()
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return result


def is_upper_triangular(m: Matrix) -> bool:
    return all(not m[i][j] for i in range(len(m)) for j in range(i))


def is_scalar_matrix(m: Matrix) -> bool:
    n = len(m)
    return all(not m[i][j] for i in range(n) for j in range(n) if i != j) and all(
        m[i][i] == m[0][0] for i in range(n)
    )


# polynomials: coefficient lists, lowest degree first ----------------------

def charpoly(m: Matrix) -> list:
    """Coefficients of det(t I - m), lowest degree first (Faddeev-LeVerrier)."""
    n = len(m)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    mk = zeros(n, n)
    for k in range(1, n + 1):
        prev = matmul(m, mk) if k > 1 else zeros(n, n)
        c_prev = coeffs[n - k + 1]
        mk = [[prev[i][j] + (c_prev if i == j else ZERO) for j in range(n)] for i in range(n)]
        amk = matmul(m, mk)
        tr = sum((amk[i][i] for i in range(n)), ZERO)
        coeffs[n - k] = -tr / k
    return coeffs


def _trim(p: list) -> list:
    p = list(p)
    while len(p) > 1 and not p[-1]:
        p.pop()
    return p


def poly_divmod(p: list, q: list) -> tuple[list, list]:
    p, q = _trim(p), _trim(q)
    if len(q) == 1 and not q[0]:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    quot = [ZERO] * max(len(p) - len(q) + 1, 1)
    lead_inv = q[-1].inverse()
    while len(rem) >= len(q) and any(rem):
        shift = len(rem) - len(q)
        f = rem[-1] * lead_inv
        quot[shift] = f
        for i, qc in enumerate(q):
            rem[i + shift] = rem[i + shift] - f * qc
        rem.pop()
        rem = _trim(rem) if rem else [ZERO]
    return _trim(quot), _trim(rem) if rem else [ZERO]


def poly_gcd(p: list, q: list) -> list:
    a, b = _trim(p), _trim(q)
    while not (len(b) == 1 and not b[0]):
        _, r = poly_divmod(a, b)
        a, b = b, r
    inv = a[-1].inverse()
    return [c * inv for c in a]


def poly_deriv(p: list) -> list:
    if len(p) <= 1:
        return [ZERO]
    return [c * k for k, c in enumerate(p) if k > 0]


def poly_eval(p: list, x: GaussianRational) -> GaussianRational:
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _nearest_gaussian(z, bound: int) -> GaussianRational:
    re = Fraction(str(mpmath.nstr(z.real, 60, strip_zeros=False))).limit_denominator(bound)
    im = Fraction(str(mpmath.nstr(z.imag, 60, strip_zeros=False))).limit_denominator(bound)
    return GaussianRational(re, im)


def distinct_eigenvalues(m: Matrix) -> list[GaussianRational]:
    """Distinct eigenvalues of m, all of which must lie in Q(i).

    Roots of the square-free part of the characteristic polynomial are
    located numerically, snapped to the only possible denominators and
    then certified by exact evaluation.  Anything that fails the exact
    check raises EigenvalueNotGaussianRational.
    """
    n = len(m)
    if n == 0:
        return []
    cp = charpoly(m)
    sqfree, _ = poly_divmod(cp, poly_gcd(cp, poly_deriv(cp)))
    deg = len(sqfree) - 1
    if deg == 0:
        return []
    # clear denominators so the polynomial has Gaussian-integer coefficients
    den = 1
    for c in sqfree:
        den = lcm(den, c.re_den, c.im_den)
    ints = [c * den for c in sqfree]
    lead = ints[-1]
    lead_norm = int(lead.norm())
    # a root p/q (p, q Gaussian integers, q | lead) has rational parts with
    # denominator dividing N(q), which divides N(lead)
    bound = max(lead_norm, 1)
    roots: list[GaussianRational] = []
    if deg == 1:
        roots = [-sqfree[0] / sqfree[1]]
    else:
        with mpmath.workdps(80):
            approx = mpmath.polyroots(
                [mpmath.mpc(mpmath.mpf(c.re_num) / c.re_den, mpmath.mpf(c.im_num) / c.im_den)
                 for c in reversed(ints)],
                maxsteps=400,
                extraprec=400,
            )
            for z in approx:
                cand = _nearest_gaussian(z, bound)
                if poly_eval(sqfree, cand):
                    raise EigenvalueNotGaussianRational(
                        f"characteristic polynomial has a root near {mpmath.nstr(z, 12)} outside Q(i)"
                    )
                roots.append(cand)
    distinct: list[GaussianRational] = []
    for r in roots:
        if r not in distinct:
            distinct.append(r)
    if len(distinct) != deg:
        raise EigenvalueNotGaussianRational("could not certify all eigenvalues in Q(i)")
    return sorted(distinct, key=lambda z: (z.real, z.imag))
