"""Formal flow-box: make the fields of the abelian ideal constant.

Given commuting fields U_1..U_p whose values at 0 are independent and a
linear section iota(y) transverse to them, the map

    Psi(x, y) = exp(x_1 U_1 + ... + x_p U_p) (iota(y))

sends the coordinate fields d/dx_i to U_i.  Its inverse is the straightening
change of coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import linalg
from .errors import DegenerateFrame, NonCommuting, StraighteningResidue
from .formal import (
    FormalMap,
    _derive,
    bracket,
    invert_map,
    linear_combination,
    push_all,
    substitute_series,
)
from .lie import Decomposition, LieAlgebra, NonlinearRep
from .scalar import ONE, ZERO


@dataclass(frozen=True)
class StraightenedIdeal:
    phi: FormalMap          # new = phi(old)
    psi: FormalMap          # old = psi(new), the flow map
    p: int
    q: int
    a: tuple                # a[i][j] = a_i(X_j) for the j-th basis element of m
    section: tuple
    fields: tuple           # the whole representation in the new coordinates


def build_flow_map(V, section, K: int) -> FormalMap:
    """Psi(x, y) = exp(sum x_i V_i)(iota(y)) truncated at degree K.

    ``section`` lists the q vectors spanning the image of iota; new
    coordinates are ordered (x_1..x_p, y_1..y_q).
    """
    V = list(V)
    section = [list(v) for v in section]
    if not V and not section:
        raise DegenerateFrame("empty frame")
    n = V[0].dim if V else len(section[0])
    p = len(V)
    for i, j in combinations(range(p), 2):
        br = bracket(V[i], V[j])
        if not br.is_zero(upto=br.trusted_degree):
            raise NonCommuting(f"fields {i + 1} and {j + 1} do not commute up to degree {br.trusted_degree}")
    frame = [v.constant_vector() for v in V] + section
    if len(frame) != n or linalg.rank(frame) != n:
        raise DegenerateFrame("constant parts and section do not span the ambient space")

    # ring with variables (t_1..t_p, z_1..z_n); D = sum_i t_i V_i(z) . grad_z
    big = p + n
    by_target = [[] for _ in range(big)]
    for i, v in enumerate(V):
        for (alpha, j), c in v.terms.items():
            key = tuple(1 if k == i else 0 for k in range(p)) + alpha
            by_target[p + j].append((key, sum(alpha) + 1, c))
    for lst in by_target:
        lst.sort(key=lambda t: t[1])

    # substitution t_i -> x_i, z_c -> sum_k section[k][c] y_k
    images = []
    for i in range(p):
        images.append({tuple(1 if k == i else 0 for k in range(n)): ONE})
    for c in range(n):
        img = {}
        for k, vec in enumerate(section):
            if vec[c]:
                img[tuple(1 if t == p + k else 0 for t in range(n))] = vec[c]
        images.append(img)

    comps = []
    for j in range(n):
        f = {tuple(1 if k == p + j else 0 for k in range(big)): ONE}
        total = dict(f)
        for m in range(1, K + 1):
            f = _derive(by_target, f, K)
            if not f:
                break
            f = {a: c / m for a, c in f.items()}
            for a, c in f.items():
                total[a] = total.get(a, ZERO) + c
        comps.append(substitute_series(total, images, n, K))
    return FormalMap._raw(n, K, comps)


def complete_frame(vectors, n: int) -> list:
    """Extend with standard basis vectors, greedily in index order."""
    basis = [list(v) for v in vectors]
    added = []
    for k in range(n):
        if len(basis) == n:
            break
        e = [ONE if t == k else ZERO for t in range(n)]
        if linalg.rank(basis + [e]) == len(basis) + 1:
            basis.append(e)
            added.append(e)
    return added


def straighten(T: NonlinearRep, g: LieAlgebra, D: Decomposition, K: int | None = None) -> StraightenedIdeal:
    """Build the flow-box change for the ideal and push the whole representation through it."""
    K = T.K if K is None else K
    fields = list(T.fields)
    n = T.dim
    p = len(D.m)
    V = [fields[a] for a in D.m]
    consts = [v.constant_vector() for v in V]
    section = complete_frame(consts, n)
    if p:
        # reduced echelon combination: U_i(0) has a 1 in the i-th pivot and 0 in the others
        aug = [list(c) + [ONE if i == j else ZERO for j in range(p)] for i, c in enumerate(consts)]
        r, piv = linalg.rref(aug)
        if len([c for c in piv if c < n]) != p:
            raise DegenerateFrame("constant parts of the ideal fields are dependent")
        E = [row[n:] for row in r]
        U = [linear_combination(E[i], V) for i in range(p)]
    else:
        U = []
    # one extra degree: d/dx of the degree-(K+1) part of Psi lands in degree K
    psi = build_flow_map(U, section, K + 1)
    if psi.is_identity():
        phi = psi
        new_fields = fields
    else:
        phi = invert_map(psi)
        new_fields = push_all(fields, phi, psi)
    phi, psi = phi.truncate(K), psi.truncate(K)

    a = [[ZERO] * p for _ in range(p)]
    for j, idx in enumerate(D.m):
        f = new_fields[idx]
        for (alpha, i), c in f.terms.items():
            if sum(alpha) > 0 or i >= p:
                raise StraighteningResidue(
                    f"T_{g.names[idx]} keeps term {c} * x^{alpha} d/dx{i + 1} after straightening")
            a[i][j] = c
    if p and not linalg.det(a):
        raise StraighteningResidue("straightened constants a_i(X_j) are not invertible")
    return StraightenedIdeal(phi, psi, p, n - p, tuple(tuple(row) for row in a),
                             tuple(tuple(v) for v in section), tuple(new_fields))
