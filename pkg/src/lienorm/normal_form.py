"""Normalization of the representation on g0 = r + s, and the full pipeline.

Coordinates after straightening are ordered (x_1..x_p, y_1..y_q).  For a
diagonal linear field S = sum lam_k z_k d/dz_k, ``ad S`` acts on the basis
field z^alpha d/dz_i by the scalar ``sum_k alpha_k lam_k - lam_i``; this
number is called the eigenvalue of the monomial below.

Conjugating T by I + W with W homogeneous of degree k >= 2 changes the
degree-k part of T by exactly [T^1, W]; that identity drives every
homological solve here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .errors import (
    ConstrainedCocycleInfeasible,
    NonResonantResidue,
    NotTriangular,
    RepresentationBroken,
    ShapeViolation,
    SingularHomologicalSystem,
    StageError,
    ValidationFailed,
)
from .formal import (
    FormalMap,
    FormalVectorField,
    bracket,
    compose_maps,
    format_monomial,
    invert_map,
    linear_combination,
    monomials,
    push_all,
    pushforward,
    unit,
)
from .lie import (
    Decomposition,
    LieAlgebra,
    NonlinearRep,
    SpectralData,
    ValidationReport,
    roots_of_radical,
    spectral_data,
    validate_input,
)
from .resonance import (
    ResonanceSet,
    find_resonance_vector,
    form_eval,
    is_resonance_vector,
    resonance_sets,
)
from .scalar import ONE, ZERO, GaussianRational
from .straightening import straighten


def is_y_only(alpha, p: int) -> bool:
    return not any(alpha[:p])


def monomial_eigenvalue(alpha, i: int, lam) -> GaussianRational:
    acc = -lam[i]
    for a, l in zip(alpha, lam):
        if a:
            acc = acc + a * l
    return acc


# -------------------------------------------------------------- splits ---

@dataclass(frozen=True)
class ABSplit:
    A: FormalVectorField          # y-only monomials, x-block targets
    B: FormalVectorField          # everything else: K + H + higher y-block terms
    H: FormalVectorField          # linear y-block
    K: FormalVectorField          # linear x-block


def ab_split(T_X: FormalVectorField, p: int) -> ABSplit:
    """Sort terms by block; any term outside the admissible shape raises ShapeViolation.

    Admissible: y-only monomials of degree >= 1 (either block), and linear
    x_j d/dx_i.  Anything else contradicts [d/dx_j, T^k] = 0 for k >= 2.
    """
    n, d = T_X.dim, T_X.trusted_degree
    A, B, H, K = {}, {}, {}, {}
    for (alpha, i), c in T_X.terms.items():
        deg = sum(alpha)
        if deg == 0:
            raise ShapeViolation(f"constant term {c} d/dz{i + 1} on an element of g0")
        if is_y_only(alpha, p):
            if i < p:
                A[(alpha, i)] = c
            else:
                B[(alpha, i)] = c
                if deg == 1:
                    H[(alpha, i)] = c
        elif deg == 1 and i < p:
            B[(alpha, i)] = c
            K[(alpha, i)] = c
        else:
            raise ShapeViolation(
                f"term {c} * {format_monomial(alpha)} d/dz{i + 1} depends on x where it must not")
    mk = lambda t: FormalVectorField._raw(n, d, t)
    return ABSplit(mk(A), mk(B), mk(H), mk(K))


@dataclass(frozen=True)
class LinearSplit:
    S: FormalVectorField
    N: FormalVectorField
    A: FormalVectorField


def split_linear(T_X: FormalVectorField, p: int) -> LinearSplit:
    """Diagonal / strictly upper split of the block-diagonal linear part B^1."""
    n, d = T_X.dim, T_X.trusted_degree
    L = T_X.linear_matrix()
    S, N, A = {}, {}, {}
    for i in range(n):
        for j in range(n):
            c = L[i][j]
            if not c:
                continue
            key = (unit(n, j), i)
            if i < p <= j:
                A[key] = c
            elif i == j:
                S[key] = c
            elif i < j:
                N[key] = c
            else:
                raise NotTriangular(f"linear part has entry {c} at row {i + 1}, column {j + 1} below the diagonal")
    mk = lambda t: FormalVectorField._raw(n, d, t)
    return LinearSplit(mk(S), mk(N), mk(A))


# -------------------------------------------------------- homological ---

def _basis_field(n, alpha, i, d):
    return FormalVectorField._raw(n, d, {(alpha, i): ONE})


def _linear_unknowns(n: int, p: int, lam) -> list:
    """Strictly upper, y-only linear monomials with nonzero eigenvalue."""
    out = []
    for j in range(p, n):
        alpha = unit(n, j)
        for i in range(n):
            if i < p or p <= i < j:
                if monomial_eigenvalue(alpha, i, lam):
                    out.append((alpha, i))
    return out


def _y_monomials(n: int, p: int, k: int) -> list:
    return [(0,) * p + beta for beta in monomials(n - p, k)] if n > p else []


def homological_step(T: FormalVectorField, k: int, lam, p: int):
    """Solve for W_k cancelling the degree-k terms outside ker ad S.

    Returns (W, N): W homogeneous of degree k supported on y-only monomials
    with nonzero eigenvalue, and N the degree-k part T^k + [T^1, W] that
    survives (it lies in ker ad S).
    """
    n, d = T.dim, T.trusted_degree
    if k == 1:
        unknowns = _linear_unknowns(n, p, lam)
    else:
        unknowns = [(alpha, i) for alpha in _y_monomials(n, p, k) for i in range(n)
                    if monomial_eigenvalue(alpha, i, lam)]
    Tk = T.homogeneous(k)
    if not unknowns:
        return FormalVectorField.zero(n, d), Tk
    T1 = T.homogeneous(1)
    index = {u: r for r, u in enumerate(unknowns)}
    m = len(unknowns)
    mat = linalg.zeros(m, m)
    for col, (alpha, i) in enumerate(unknowns):
        img = bracket(T1, _basis_field(n, alpha, i, d))
        for key, c in img.terms.items():
            row = index.get(key)
            if row is not None:
                mat[row][col] = c
    rhs = [-Tk.terms.get(u, ZERO) for u in unknowns]
    sol = linalg.solve(mat, rhs)
    if sol is None or linalg.rank(mat) < m:
        raise SingularHomologicalSystem(f"homological system of degree {k} is singular")
    W = FormalVectorField._raw(n, d, {u: c for u, c in zip(unknowns, sol) if c})
    N = (Tk + bracket(T1, W).homogeneous(k)).homogeneous(k)
    return W, N


def _nonkernel_residue(T: FormalVectorField, k: int, lam, p: int) -> dict:
    out = {}
    for (alpha, i), c in T.terms.items():
        if sum(alpha) != k or not is_y_only(alpha, p):
            continue
        if k == 1 and i >= p and i >= alpha.index(1):
            continue
        if monomial_eigenvalue(alpha, i, lam):
            out[(alpha, i)] = c
    return out


def fixes_coordinate_fields(phi: FormalMap, p: int) -> bool:
    """Does pushing d/dx_i through phi give back d/dx_i exactly, for i <= p?"""
    n = phi.dim
    inv = invert_map(phi)
    for i in range(p):
        dx = FormalVectorField.constant([ONE if t == i else ZERO for t in range(n)], phi.trusted_degree)
        pushed = pushforward(dx, phi, inv)
        if pushed.residue(dx, pushed.trusted_degree):
            return False
    return True


def normalize_at_X0(T_X0: FormalVectorField, lam, p: int, K: int):
    """Degree-by-degree normalization of one field of the radical.

    ``lam`` holds the diagonal entries of its linear part.  Returns
    (phi, T', factors) with factors a list of (degree, I + W_k).
    """
    n = T_X0.dim
    T = T_X0
    factors = []
    # degree 1: iterate, since the linear conjugation is only first-order exact
    lin = None
    for _ in range(n + 1):
        if not _nonkernel_residue(T, 1, lam, p):
            break
        W, _ = homological_step(T, 1, lam, p)
        step = FormalMap.from_field(W, K)
        T = pushforward(T, step)
        lin = step if lin is None else compose_maps(step, lin)
    else:
        if _nonkernel_residue(T, 1, lam, p):
            raise SingularHomologicalSystem("linear normalization did not converge")
    if lin is not None:
        factors.append((1, lin))
    for k in range(2, K + 1):
        for (alpha, i), c in T.terms.items():
            if sum(alpha) == k and not is_y_only(alpha, p):
                raise ShapeViolation(f"degree-{k} term {c} * {format_monomial(alpha)} d/dz{i + 1} depends on x")
        if not _nonkernel_residue(T, k, lam, p):
            continue
        W, _ = homological_step(T, k, lam, p)
        step = FormalMap.from_field(W, K)
        T = pushforward(T, step)
        if _nonkernel_residue(T, k, lam, p):
            raise SingularHomologicalSystem(f"degree-{k} residue survived its homological step")
        factors.append((k, step))
    phi = FormalMap.identity(n, K)
    for _, f in factors:
        phi = compose_maps(f, phi)
    return phi, T, factors


# ---------------------------------------------------------- conjugation ---

def representation_residue(g: LieAlgebra, fields) -> str | None:
    """First failure of [T_a, T_b] = T_[a,b], or None."""
    n = g.dim
    for a in range(n):
        for b in range(a + 1, n):
            lhs = bracket(fields[a], fields[b])
            used = [c for c in range(n) if g.C[a][b][c]]
            if used:
                rhs = linear_combination([g.C[a][b][c] for c in used], [fields[c] for c in used])
            else:
                rhs = FormalVectorField.zero(lhs.dim, lhs.trusted_degree)
            res = lhs.residue(rhs, min(lhs.trusted_degree, rhs.trusted_degree))
            if res:
                (alpha, i), c = min(res.items(), key=lambda kv: (sum(kv[0][0]), kv[0]))
                return f"[T_{g.names[a]},T_{g.names[b]}] off by {c} at {format_monomial(alpha)} d/dz{i + 1}"
    return None


def conjugate_rep(fields, phi: FormalMap, g: LieAlgebra | None = None) -> list:
    """Push every field through phi; with ``g`` given, re-check the representation."""
    if phi.is_identity():
        return list(fields)
    out = push_all(fields, phi)
    if g is not None:
        wit = representation_residue(g, out)
        if wit:
            raise RepresentationBroken(wit)
    return out


def certify_radical(fields, D: Decomposition, resonance: ResonanceSet, p: int, names=None) -> list:
    """Terms of T_X (X in the radical basis) outside the admissible normal-form support.

    Admissible: y-only terms with (alpha, i) in R or R', and the upper
    triangular linear x-block x_j d/dx_i (i <= j).
    """
    bad = []
    for a in D.r:
        for (alpha, i), c in fields[a].sorted_terms():
            deg = sum(alpha)
            if deg == 0:
                ok = False
            elif is_y_only(alpha, p):
                ok = resonance.contains(alpha[p:], i, p)
            else:
                ok = deg == 1 and i < p and alpha.index(1) >= i
            if not ok:
                name = names[a] if names else str(a)
                bad.append((name, alpha, i, c))
    return bad


def normalize_radical(fields, phi: FormalMap, D: Decomposition, resonance: ResonanceSet, p: int,
                      g: LieAlgebra | None = None) -> list:
    out = conjugate_rep(fields, phi, g)
    bad = certify_radical(out, D, resonance, p, g.names if g else None)
    if bad:
        raise NonResonantResidue(_residue_message(bad), bad)
    return out


def _residue_message(bad) -> str:
    parts = [f"T_{nm}: {c} * {format_monomial(alpha)} d/dz{i + 1}" for nm, alpha, i, c in bad[:5]]
    more = f" (+{len(bad) - 5} more)" if len(bad) > 5 else ""
    return "non-resonant terms survive: " + "; ".join(parts) + more


def linearize_semisimple(fields, D: Decomposition, lam, p: int, K: int):
    """Make T|s linear by y-only corrections lying in ker ad S (all monomials if lam is None).

    Returns (psi, fields, factors).
    """
    fields = list(fields)
    n = fields[0].dim if fields else 0
    factors = []
    if not D.s:
        return FormalMap.identity(n, K), fields, factors
    S_fields = [fields[a] for a in D.s]
    for k in range(2, K + 1):
        rows_per = [(alpha, i) for alpha in _y_monomials(n, p, k) for i in range(n)]
        for X, f in zip(D.s, S_fields):
            for (alpha, i), c in f.terms.items():
                if sum(alpha) == k and not is_y_only(alpha, p):
                    raise ShapeViolation(f"degree-{k} term of a semisimple field depends on x")
        if all(f.homogeneous(k).is_zero() for f in S_fields):
            continue
        unknowns = [(alpha, i) for alpha, i in rows_per
                    if lam is None or not monomial_eigenvalue(alpha, i, lam)]
        row_index = {}
        for b in range(len(S_fields)):
            for u in rows_per:
                row_index[(b, u)] = len(row_index)
        mat = linalg.zeros(len(row_index), len(unknowns))
        rhs = [ZERO] * len(row_index)
        for b, f in enumerate(S_fields):
            T1 = f.homogeneous(1)
            for col, (alpha, i) in enumerate(unknowns):
                img = bracket(T1, _basis_field(n, alpha, i, f.trusted_degree))
                for key, c in img.terms.items():
                    r = row_index.get((b, key))
                    if r is not None:
                        mat[r][col] = c
            for key, c in f.homogeneous(k).terms.items():
                rhs[row_index[(b, key)]] = -c
        sol = linalg.solve(mat, rhs, len(unknowns)) if unknowns else None
        if sol is None:
            raise ConstrainedCocycleInfeasible(
                f"degree {k}: the constrained coboundary equation has no solution "
                f"({len(row_index)} equations, {len(unknowns)} unknowns)",
                degree=k, residual=[str(x) for x in rhs if x])
        W = FormalVectorField._raw(n, K, {u: c for u, c in zip(unknowns, sol) if c})
        step = FormalMap.from_field(W, K)
        S_fields = push_all(S_fields, step)
        if any(not f.homogeneous(k).is_zero() for f in S_fields):
            raise ConstrainedCocycleInfeasible(f"degree {k} survived its correction", degree=k)
        factors.append((k, step))
    psi = FormalMap.identity(n, K)
    for _, f in factors:
        psi = compose_maps(f, psi)
    out = conjugate_rep(fields, psi)
    return psi, out, factors


# ------------------------------------------------------------ pipeline ---

@dataclass
class NormalizationResult:
    problem: object
    p: int
    q: int
    phi_total: FormalMap
    fields: list
    stages: list                  # (name, FormalMap)
    a: tuple
    spectral: SpectralData
    resonance: ResonanceSet
    X0: tuple | None
    report: ValidationReport
    info: dict = field(default_factory=dict)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:  # wrap everything with the stage that raised it
        if not hasattr(exc, "exit_code"):
            raise
        raise StageError(name, exc) from exc


def _triangularizing_map(spec: SpectralData, K: int) -> FormalMap:
    # old = P new  =>  new = P^-1 old
    return FormalMap.linear(linalg.inverse([list(r) for r in spec.change]), K)


def normalize_full(problem, max_search_box: int = 16) -> NormalizationResult:
    """validate -> straighten -> triangularize -> X0 -> radical -> semisimple -> verify."""
    g, D, T, K = problem.algebra, problem.decomposition, problem.rep, problem.K
    n = T.dim

    report = validate_input(g, D, T)
    if not report.ok:
        raise StageError("validate", ValidationFailed(
            "input fails validation: " + "; ".join(c.name for c in report.failures()), report))

    st = _stage("straighten", straighten, T, g, D, K)
    p, q = st.p, st.q
    fields = list(st.fields)
    stages = [("straighten", st.phi)]

    def shape_check():
        for a in D.g0:
            ab_split(fields[a], p)
    _stage("shape", shape_check)

    def triangularize():
        roots = roots_of_radical(g, D)
        spec = spectral_data(fields, D, p, roots)
        tri = _triangularizing_map(spec, K)
        return spec, tri, conjugate_rep(fields, tri)
    spec, tri, fields = _stage("triangularize", triangularize)
    stages.append(("triangularize", tri))

    def check_triangular():
        for a in D.r:
            split_linear(fields[a], p)
    _stage("triangularize", check_triangular)

    resonance = _stage("resonance", resonance_sets, spec, spec.roots, K)
    X0 = None
    info = {}
    if D.r:
        X0 = _stage("resonance", find_resonance_vector, g, D, spec, spec.roots, K, max_search_box).coords
        lam = [form_eval(l, X0) for l in spec.lambdas]
        T_X0 = linear_combination(X0, [fields[a] for a in D.r])
        phi_rad, T_X0_norm, factors = _stage("normalize_X0", normalize_at_X0, T_X0, lam, p, K)
        for k, f in factors:
            if not fixes_coordinate_fields(f, p):
                raise StageError("normalize_X0", ShapeViolation(f"degree-{k} factor moves d/dx"))
        fields = _stage("normalize_radical", normalize_radical, fields, phi_rad, D, resonance, p)
        combo = linear_combination(X0, [fields[a] for a in D.r])
        if combo.residue(T_X0_norm):
            raise StageError("normalize_radical", RepresentationBroken("X0 combination disagrees with its normal form"))
        stages.extend((f"degree-{k}", f) for k, f in factors)
        info["x0_factors"] = [k for k, _ in factors]
    else:
        lam = None
        info["x0_skipped"] = "radical is zero"

    m_before = [fields[a] for a in D.m]
    psi, fields, sfactors = _stage("linearize", linearize_semisimple, fields, D, lam, p, K)
    stages.extend((f"semisimple-degree-{k}", f) for k, f in sfactors)

    def post_linearize():
        bad = certify_radical(fields, D, resonance, p, g.names)
        if bad:
            raise NonResonantResidue(_residue_message(bad), bad)
        for a, before in zip(D.m, m_before):
            if fields[a].residue(before):
                raise RepresentationBroken(f"T_{g.names[a]} moved during linearization")
    _stage("linearize", post_linearize)

    phi_total = FormalMap.identity(n, K)
    for _, f in stages:
        phi_total = compose_maps(f, phi_total)

    final = verify_normal_form(g, D, T, phi_total, fields, p, X0=X0)
    if not final.ok:
        from .errors import VerificationFailed
        raise StageError("verify", VerificationFailed(
            "final verification failed: " + "; ".join(c.name for c in final.failures()), final))
    a = tuple(tuple(fields[D.m[j]].constant_vector()[i] for j in range(p)) for i in range(p))
    return NormalizationResult(problem, p, q, phi_total, fields, stages, a, spec, resonance, X0, final, info)


# ------------------------------------------------------------ verifier ---

def radical_spectral(fields, D: Decomposition, p: int, roots) -> SpectralData:
    """Read mu, nu off the diagonals of already-triangular linear parts."""
    n = fields[0].dim if fields else p
    mu = [tuple(fields[a].linear_matrix()[i][i] for a in D.r) for i in range(p)]
    nu = [tuple(fields[a].linear_matrix()[i][i] for a in D.r) for i in range(p, n)]
    return SpectralData(p, n - p, tuple(tuple(r) for r in linalg.identity(n)), tuple(mu), tuple(nu),
                        tuple(tuple(r) for r in roots))


def commutator_residues(fields, D: Decomposition) -> dict:
    """[S^1_X, N_X] per radical basis element (S^1 = diagonal linear part)."""
    out = {}
    for a in D.r:
        f = fields[a]
        L = f.linear_matrix()
        S = FormalVectorField._raw(f.dim, f.trusted_degree,
                                   {(unit(f.dim, i), i): L[i][i] for i in range(f.dim)})
        res = bracket(S, f - S)
        out[a] = res
    return out


def verify_normal_form(g: LieAlgebra, D: Decomposition, T: NonlinearRep, phi_total: FormalMap,
                       fields, p: int, X0=None) -> ValidationReport:
    """Re-certify every clause of the normal form and the equivalence from scratch."""
    rep = ValidationReport()
    names = g.names
    n = T.dim
    K = T.K
    fields = list(fields)
    ok = len(fields) == g.dim and all(f.dim == n for f in fields)
    rep.add("shape_of_output", ok, None if ok else "one field per basis element on C^n expected")
    if not ok:
        return rep
    try:
        linalg.inverse(phi_total.linear_part)
        rep.add("phi_invertible", True)
    except Exception:
        rep.add("phi_invertible", False, "linear part of the transformation is singular")
        return rep

    # (a) ideal fields constant, valued in the x-block, with invertible constants
    wit = None
    for a in D.m:
        for (alpha, i), c in fields[a].sorted_terms():
            if sum(alpha) or i >= p:
                wit = f"T_{names[a]} has term {c} * {format_monomial(alpha)} d/dz{i + 1}"
                break
        if wit:
            break
    if wit is None and p:
        amat = [[fields[D.m[j]].constant_vector()[i] for j in range(p)] for i in range(p)]
        if not linalg.det(amat):
            wit = "constants a_i(X_j) are singular"
    if wit is None and len(D.m) != p:
        wit = f"ideal has dimension {len(D.m)} but the x-block has {p} coordinates"
    rep.add("clause_a_ideal_constant", wit is None, wit)

    # (b) semisimple part linear
    wit = None
    for a in D.s:
        for (alpha, i), c in fields[a].sorted_terms():
            if sum(alpha) != 1:
                wit = f"T_{names[a]} has term {c} * {format_monomial(alpha)} d/dz{i + 1}"
                break
        if wit:
            break
    rep.add("clause_b_semisimple_linear", wit is None, wit)

    # shape of g0 fields
    wit = None
    for a in D.g0:
        try:
            ab_split(fields[a], p)
        except ShapeViolation as exc:
            wit = f"T_{names[a]}: {exc}"
            break
    rep.add("g0_shape", wit is None, wit)

    # (c) radical supported on the resonant sets
    wit = None
    try:
        for a in D.r:
            split_linear(fields[a], p)
        roots = roots_of_radical(g, D)
        spec = radical_spectral(fields, D, p, roots)
        res = resonance_sets(spec, roots, K)
        bad = certify_radical(fields, D, res, p, names)
        if bad:
            wit = _residue_message(bad)
    except Exception as exc:
        wit = f"{type(exc).__name__}: {exc}"
        spec = None
    rep.add("clause_c_radical_resonant", wit is None, wit)

    if X0 is not None and spec is not None:
        ok, w = is_resonance_vector(tuple(X0), spec, spec.roots, K)
        comm = any(any(v) for v in _x0_brackets(g, D, X0))
        wit = None
        if not ok:
            wit = f"coincidence at {w}"
        elif comm:
            wit = "X0 does not commute with s"
        rep.add("resonance_vector", wit is None, wit)

    wit = representation_residue(g, fields)
    rep.add("representation", wit is None, wit)

    wit = None
    inv = invert_map(phi_total)
    for a in range(g.dim):
        pushed = pushforward(T.fields[a], phi_total, inv)
        upto = min(pushed.trusted_degree, fields[a].trusted_degree)
        res = pushed.residue(fields[a], upto)
        if res:
            (alpha, i), c = min(res.items(), key=lambda kv: (sum(kv[0][0]), kv[0]))
            wit = (f"T_{names[a]}: pushforward differs by {c} at {format_monomial(alpha)} d/dz{i + 1} "
                   f"(degree {sum(alpha)})")
            break
    rep.add("equivalence", wit is None, wit)
    return rep


def _x0_brackets(g: LieAlgebra, D: Decomposition, X0):
    full = [ZERO] * g.dim
    for a, c in zip(D.r, X0):
        full[a] = c
    for b in D.s:
        e = [ZERO] * g.dim
        e[b] = ONE
        yield g.bracket_vec(full, e)
