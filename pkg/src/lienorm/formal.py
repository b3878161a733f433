"""Truncated formal vector fields and formal maps on C^n in the monomial basis.

A field is a sparse map ``(alpha, i) -> c`` meaning ``c * x^alpha d/dx_i``
(``i`` is 0-based internally, 1-based in every rendering).  Each object
carries a ``trusted_degree``: coefficients above it are unknown and never
stored.  Every operation computes the tight trusted degree of its result
from the trusted degrees and valuations of its inputs, so truncation can
never silently corrupt a retained coefficient.

Trusted-degree rules (``d`` = trusted degree, ``v`` = valuation, i.e. the
lowest degree that may carry a nonzero term):

* ``V * W`` and ``[V, W]``: ``min(dV + vW, dW + vV) - 1``;
* ``T o phi``: ``min(dT, dphi + v1(T) - 1)`` where ``v1`` ignores constants;
* ``phi o chi``: ``min(dphi, dchi + vphi - 1)``.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Iterable, Mapping

from .errors import DimensionMismatch, SingularLinearPart, SingularMatrix
from . import linalg
from .scalar import ONE, ZERO, GaussianRational

Alpha = tuple  # tuple[int, ...]


def degree(alpha: Alpha) -> int:
    return sum(alpha)


def unit(n: int, i: int) -> Alpha:
    return tuple(1 if k == i else 0 for k in range(n))


def monomials(n: int, deg: int) -> list[Alpha]:
    """All exponent vectors of total degree ``deg``, in canonical (graded lex) order."""
    out = []
    for combo in combinations_with_replacement(range(n), deg):
        a = [0] * n
        for k in combo:
            a[k] += 1
        out.append(tuple(a))
    out.sort(key=lambda a: tuple(-x for x in a))
    return out


def monomial_key(alpha: Alpha):
    """Graded lexicographic order: by degree, then larger x1 power first, ..."""
    return (sum(alpha), tuple(-x for x in alpha))


def term_key(key):
    alpha, i = key
    return (sum(alpha), tuple(-x for x in alpha), i)


def format_monomial(alpha: Alpha, names: list[str] | None = None) -> str:
    names = names or [f"x{k + 1}" for k in range(len(alpha))]
    parts = []
    for name, e in zip(names, alpha):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return " ".join(parts) if parts else "1"


# ---------------------------------------------------------------- series ---

def _series_items(s: Mapping) -> list:
    items = [(a, sum(a), c) for a, c in s.items()]
    items.sort(key=lambda t: t[1])
    return items


def series_mul(a: Mapping, b: Mapping, maxdeg: int) -> dict:
    """Product of two polynomials, dropping every degree above ``maxdeg``."""
    if not a or not b:
        return {}
    bi = _series_items(b)
    out: dict = {}
    for alpha, ca in a.items():
        da = sum(alpha)
        room = maxdeg - da
        if room < 0:
            continue
        for beta, db, cb in bi:
            if db > room:
                break
            key = tuple(x + y for x, y in zip(alpha, beta))
            prev = out.get(key)
            prod = ca * cb
            out[key] = prod if prev is None else prev + prod
    return {k: v for k, v in out.items() if v}


def _series_mul_items(a_items, b_items, maxdeg):
    out: dict = {}
    for alpha, da, ca in a_items:
        room = maxdeg - da
        if room < 0:
            break
        for beta, db, cb in b_items:
            if db > room:
                break
            key = tuple(x + y for x, y in zip(alpha, beta))
            prev = out.get(key)
            prod = ca * cb
            out[key] = prod if prev is None else prev + prod
    return {k: v for k, v in out.items() if v}


def _accumulate(out: dict, series: Mapping, coeff) -> None:
    for k, v in series.items():
        prev = out.get(k)
        val = v * coeff
        out[k] = val if prev is None else prev + val


def _derive(field_by_target, f: Mapping, maxdeg: int) -> dict:
    """Apply a vector field, as a derivation, to the polynomial f."""
    out: dict = {}
    for beta, d in f.items():
        bdeg = sum(beta) - 1
        for j, bj in enumerate(beta):
            if bj == 0:
                continue
            vj = field_by_target[j]
            if not vj:
                continue
            room = maxdeg - bdeg
            if room < 0:
                continue
            base = list(beta)
            base[j] -= 1
            db = d * bj
            for alpha, adeg, c in vj:
                if adeg > room:
                    break
                key = tuple(x + y for x, y in zip(alpha, base))
                prev = out.get(key)
                val = c * db
                out[key] = val if prev is None else prev + val
    return {k: v for k, v in out.items() if v}


# --------------------------------------------------------- vector fields ---

class FormalVectorField:
    """Truncated formal vector field ``sum c * x^alpha d/dx_i`` on C^n."""

    __slots__ = ("dim", "trusted_degree", "terms", "_by_target")

    def __init__(self, dim: int, trusted_degree: int, terms: Mapping | Iterable = ()):
        if dim < 1:
            raise DimensionMismatch("field dimension must be positive")
        if trusted_degree < 0:
            raise ValueError("trusted_degree must be >= 0")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        for (alpha, i), c in items:
            alpha = tuple(int(x) for x in alpha)
            if len(alpha) != dim or any(x < 0 for x in alpha):
                raise DimensionMismatch(f"bad exponent {alpha} for dimension {dim}")
            if not 0 <= i < dim:
                raise DimensionMismatch(f"target index {i} out of range for dimension {dim}")
            c = GaussianRational(c)
            if c and sum(alpha) <= trusted_degree:
                key = (alpha, i)
                if key in clean:
                    c = clean[key] + c
                    if not c:
                        del clean[key]
                        continue
                clean[key] = c
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "trusted_degree", trusted_degree)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_by_target", None)

    def __setattr__(self, name, value):
        raise AttributeError("FormalVectorField is immutable")

    @classmethod
    def _raw(cls, dim, trusted_degree, terms):
        obj = object.__new__(cls)
        object.__setattr__(obj, "dim", dim)
        object.__setattr__(obj, "trusted_degree", trusted_degree)
        object.__setattr__(obj, "terms", {k: v for k, v in terms.items() if v and sum(k[0]) <= trusted_degree})
        object.__setattr__(obj, "_by_target", None)
        return obj

    @classmethod
    def zero(cls, dim: int, trusted_degree: int) -> "FormalVectorField":
        return cls._raw(dim, trusted_degree, {})

    @classmethod
    def constant(cls, vector, trusted_degree: int) -> "FormalVectorField":
        n = len(vector)
        zero = (0,) * n
        return cls(n, trusted_degree, {(zero, i): c for i, c in enumerate(vector)})

    @classmethod
    def linear(cls, matrix, trusted_degree: int) -> "FormalVectorField":
        """The field x -> M x, i.e. sum M[i][j] x_j d/dx_i."""
        n = len(matrix)
        return cls(n, trusted_degree, {(unit(n, j), i): matrix[i][j] for i in range(n) for j in range(n)})

    @classmethod
    def from_components(cls, components, trusted_degree: int) -> "FormalVectorField":
        n = len(components)
        terms = {}
        for i, comp in enumerate(components):
            for alpha, c in comp.items():
                terms[(alpha, i)] = c
        return cls._raw(n, trusted_degree, terms)

    # structure -----------------------------------------------------------
    def by_target(self):
        bt = self._by_target
        if bt is None:
            bt = [[] for _ in range(self.dim)]
            for (alpha, i), c in self.terms.items():
                bt[i].append((alpha, sum(alpha), c))
            for lst in bt:
                lst.sort(key=lambda t: t[1])
            object.__setattr__(self, "_by_target", bt)
        return bt

    def components(self) -> list[dict]:
        comps = [dict() for _ in range(self.dim)]
        for (alpha, i), c in self.terms.items():
            comps[i][alpha] = c
        return comps

    def valuation(self) -> int:
        if not self.terms:
            return self.trusted_degree + 1
        return min(sum(alpha) for alpha, _ in self.terms)

    def valuation_nonconstant(self) -> int:
        degs = [sum(alpha) for alpha, _ in self.terms if sum(alpha) > 0]
        return min(degs) if degs else self.trusted_degree + 1

    def max_degree(self) -> int:
        return max((sum(alpha) for alpha, _ in self.terms), default=-1)

    def homogeneous(self, k: int) -> "FormalVectorField":
        return FormalVectorField._raw(self.dim, self.trusted_degree,
                                      {key: c for key, c in self.terms.items() if sum(key[0]) == k})

    def truncate(self, d: int) -> "FormalVectorField":
        d = min(d, self.trusted_degree)
        return FormalVectorField._raw(self.dim, d, self.terms)

    def with_trusted_degree(self, d: int) -> "FormalVectorField":
        """Same terms, declared trusted to ``d`` (terms above ``d`` dropped)."""
        return FormalVectorField._raw(self.dim, d, self.terms)

    def constant_vector(self) -> list:
        zero = (0,) * self.dim
        return [self.terms.get((zero, i), ZERO) for i in range(self.dim)]

    def linear_matrix(self) -> list:
        n = self.dim
        m = linalg.zeros(n, n)
        for (alpha, i), c in self.terms.items():
            if sum(alpha) == 1:
                m[i][alpha.index(1)] = c
        return m

    # arithmetic ----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, FormalVectorField):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimension {self.dim} vs {other.dim}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        d = min(self.trusted_degree, other.trusted_degree)
        out = {k: v for k, v in self.terms.items() if sum(k[0]) <= d}
        for k, v in other.terms.items():
            if sum(k[0]) <= d:
                prev = out.get(k)
                out[k] = v if prev is None else prev + v
        return FormalVectorField._raw(self.dim, d, out)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __neg__(self):
        return FormalVectorField._raw(self.dim, self.trusted_degree, {k: -v for k, v in self.terms.items()})

    def scale(self, c) -> "FormalVectorField":
        c = GaussianRational(c)
        if not c:
            return FormalVectorField.zero(self.dim, self.trusted_degree)
        return FormalVectorField._raw(self.dim, self.trusted_degree, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, FormalVectorField):
            return NotImplemented
        return (self.dim == other.dim and self.trusted_degree == other.trusted_degree
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.dim, self.trusted_degree, frozenset(self.terms.items())))

    def agrees_with(self, other: "FormalVectorField", upto: int | None = None) -> bool:
        return not self.residue(other, upto)

    def residue(self, other: "FormalVectorField", upto: int | None = None) -> dict:
        """Nonzero coefficients of self - other on degrees <= upto (default: common trust)."""
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimension {self.dim} vs {other.dim}")
        if upto is None:
            upto = min(self.trusted_degree, other.trusted_degree)
        out = {}
        for k in set(self.terms) | set(other.terms):
            if sum(k[0]) <= upto:
                diff = self.terms.get(k, ZERO) - other.terms.get(k, ZERO)
                if diff:
                    out[k] = diff
        return out

    def is_zero(self, upto: int | None = None) -> bool:
        if upto is None:
            return not self.terms
        return all(sum(a) > upto for a, _ in self.terms)

    # text ------------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: term_key(kv[0]))

    def render(self, names: list[str] | None = None) -> str:
        names = names or [f"x{k + 1}" for k in range(self.dim)]
        lines = [f"{c} * {format_monomial(alpha, names)} d/d{names[i]}" for (alpha, i), c in self.sorted_terms()]
        return "\n".join(lines) if lines else "0"

    def __repr__(self):
        body = " + ".join(f"({c})*{format_monomial(a)}*d{i + 1}" for (a, i), c in self.sorted_terms()) or "0"
        return f"FormalVectorField(n={self.dim}, K={self.trusted_degree}: {body})"


def linear_combination(coeffs, fields) -> FormalVectorField:
    fields = list(fields)
    if not fields:
        raise ValueError("empty combination")
    out = FormalVectorField.zero(fields[0].dim, min(f.trusted_degree for f in fields))
    for c, f in zip(coeffs, fields):
        if c:
            out = out + f.scale(c)
    return out


def star(V: FormalVectorField, W: FormalVectorField) -> FormalVectorField:
    """V applied, as a derivation, to each coefficient function of W.

    On basis terms: ``(x^a d_i) * (x^b d_j) = b_i x^(a+b-1_i) d_j``.
    """
    if V.dim != W.dim:
        raise DimensionMismatch(f"dimension {V.dim} vs {W.dim}")
    d = min(V.trusted_degree + W.valuation(), W.trusted_degree + V.valuation()) - 1
    if d < 0:
        raise ValueError("product has no trusted degree left")
    by_t = V.by_target()
    out = {}
    for j, comp in enumerate(W.components()):
        if comp:
            for alpha, c in _derive(by_t, comp, d).items():
                out[(alpha, j)] = c
    return FormalVectorField._raw(V.dim, d, out)


def bracket(V: FormalVectorField, W: FormalVectorField) -> FormalVectorField:
    """Lie bracket [V, W] = V*W - W*V."""
    return star(V, W) - star(W, V)


# ------------------------------------------------------------------ maps ---

class FormalMap:
    """Truncated formal map ``phi = sum_{k>=1} phi^k`` with phi(0) = 0."""

    __slots__ = ("dim", "trusted_degree", "components")

    def __init__(self, dim: int, trusted_degree: int, components):
        if len(components) != dim:
            raise DimensionMismatch(f"expected {dim} components, got {len(components)}")
        if trusted_degree < 1:
            raise ValueError("a formal map must be trusted at least to degree 1")
        comps = []
        for comp in components:
            clean = {}
            for alpha, c in comp.items():
                alpha = tuple(int(x) for x in alpha)
                if len(alpha) != dim:
                    raise DimensionMismatch(f"bad exponent {alpha} for dimension {dim}")
                c = GaussianRational(c)
                if not c or sum(alpha) > trusted_degree:
                    continue
                if sum(alpha) == 0:
                    raise ValueError("formal maps must have zero constant term")
                clean[alpha] = c
            comps.append(clean)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "trusted_degree", trusted_degree)
        object.__setattr__(self, "components", tuple(comps))

    def __setattr__(self, name, value):
        raise AttributeError("FormalMap is immutable")

    @classmethod
    def _raw(cls, dim, trusted_degree, components):
        obj = object.__new__(cls)
        object.__setattr__(obj, "dim", dim)
        object.__setattr__(obj, "trusted_degree", trusted_degree)
        object.__setattr__(obj, "components", tuple(
            {a: c for a, c in comp.items() if c and sum(a) <= trusted_degree} for comp in components))
        return obj

    @classmethod
    def identity(cls, n: int, trusted_degree: int) -> "FormalMap":
        return cls._raw(n, trusted_degree, [{unit(n, i): ONE} for i in range(n)])

    @classmethod
    def linear(cls, matrix, trusted_degree: int) -> "FormalMap":
        n = len(matrix)
        return cls._raw(n, trusted_degree, [
            {unit(n, j): GaussianRational(matrix[i][j]) for j in range(n)} for i in range(n)])

    @classmethod
    def from_field(cls, field: FormalVectorField, trusted_degree: int | None = None) -> "FormalMap":
        """x + W(x) for a field W with no constant term."""
        d = field.trusted_degree if trusted_degree is None else trusted_degree
        ident = cls.identity(field.dim, d)
        comps = [dict(c) for c in ident.components]
        for (alpha, i), c in field.terms.items():
            if sum(alpha) == 0:
                raise ValueError("I + W needs W without constant terms")
            comps[i][alpha] = comps[i].get(alpha, ZERO) + c
        return cls._raw(field.dim, d, comps)

    @property
    def linear_part(self) -> list:
        n = self.dim
        m = linalg.zeros(n, n)
        for i, comp in enumerate(self.components):
            for alpha, c in comp.items():
                if sum(alpha) == 1:
                    m[i][alpha.index(1)] = c
        return m

    def valuation(self) -> int:
        degs = [sum(a) for comp in self.components for a in comp]
        return min(degs) if degs else self.trusted_degree + 1

    def as_field(self) -> FormalVectorField:
        return FormalVectorField.from_components(self.components, self.trusted_degree)

    def is_identity(self, upto: int | None = None) -> bool:
        upto = self.trusted_degree if upto is None else upto
        n = self.dim
        for i, comp in enumerate(self.components):
            for alpha, c in comp.items():
                if sum(alpha) > upto:
                    continue
                if alpha == unit(n, i):
                    if c != ONE:
                        return False
                else:
                    return False
            if comp.get(unit(n, i)) != ONE:
                return False
        return True

    def truncate(self, d: int) -> "FormalMap":
        return FormalMap._raw(self.dim, min(d, self.trusted_degree), self.components)

    def residue(self, other: "FormalMap", upto: int | None = None) -> dict:
        if upto is None:
            upto = min(self.trusted_degree, other.trusted_degree)
        out = {}
        for i, (a, b) in enumerate(zip(self.components, other.components)):
            for k in set(a) | set(b):
                if sum(k) <= upto:
                    diff = a.get(k, ZERO) - b.get(k, ZERO)
                    if diff:
                        out[(k, i)] = diff
        return out

    def __eq__(self, other):
        if not isinstance(other, FormalMap):
            return NotImplemented
        return (self.dim == other.dim and self.trusted_degree == other.trusted_degree
                and self.components == other.components)

    def __hash__(self):
        return hash((self.dim, self.trusted_degree, tuple(frozenset(c.items()) for c in self.components)))

    def render(self, names: list[str] | None = None) -> str:
        names = names or [f"x{k + 1}" for k in range(self.dim)]
        lines = []
        for i, comp in enumerate(self.components):
            for alpha in sorted(comp, key=monomial_key):
                lines.append(f"{names[i]}: {comp[alpha]} * {format_monomial(alpha, names)}")
        return "\n".join(lines)

    def __repr__(self):
        parts = []
        for i, comp in enumerate(self.components):
            body = " + ".join(f"({comp[a]})*{format_monomial(a)}" for a in sorted(comp, key=monomial_key)) or "0"
            parts.append(body)
        return f"FormalMap(n={self.dim}, K={self.trusted_degree}: [{'; '.join(parts)}])"


def _check_dims(a, b):
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension {a.dim} vs {b.dim}")


class _Substituter:
    """Caches the monomials x^alpha evaluated on a map, truncated at maxdeg."""

    def __init__(self, phi: FormalMap, maxdeg: int):
        self.maxdeg = maxdeg
        self.phi_items = [_series_items(c) for c in phi.components]
        self.n = phi.dim
        self.cache = {(0,) * self.n: {(0,) * self.n: ONE}}

    def mono(self, alpha: Alpha) -> dict:
        got = self.cache.get(alpha)
        if got is not None:
            return got
        r = next(k for k, e in enumerate(alpha) if e)
        prev = list(alpha)
        prev[r] -= 1
        base = self.mono(tuple(prev))
        res = _series_mul_items(_series_items(base), self.phi_items[r], self.maxdeg)
        self.cache[alpha] = res
        return res

    def substitute(self, series: Mapping) -> dict:
        out: dict = {}
        for alpha, c in series.items():
            if sum(alpha) > self.maxdeg:
                continue
            _accumulate(out, self.mono(alpha), c)
        return {k: v for k, v in out.items() if v}


def apply_derivation(T: FormalVectorField, phi: FormalMap) -> FormalVectorField:
    """Component i is T applied as a derivation to phi_i (i.e. D phi . T)."""
    _check_dims(T, phi)
    d = min(T.trusted_degree + phi.valuation(), phi.trusted_degree + T.valuation()) - 1
    if d < 0:
        raise ValueError("no trusted degree left")
    by_t = T.by_target()
    comps = [_derive(by_t, comp, d) for comp in phi.components]
    return FormalVectorField.from_components(comps, d)


def compose_field_map(T: FormalVectorField, phi: FormalMap, _subst: _Substituter | None = None) -> FormalVectorField:
    """Substitute phi into each coefficient function of T."""
    _check_dims(T, phi)
    d = min(T.trusted_degree, phi.trusted_degree + T.valuation_nonconstant() - 1)
    sub = _subst if _subst is not None and _subst.maxdeg >= d else _Substituter(phi, d)
    comps = []
    for comp in T.components():
        res = sub.substitute(comp)
        comps.append({a: c for a, c in res.items() if sum(a) <= d})
    return FormalVectorField.from_components(comps, d)


def compose_maps(phi: FormalMap, chi: FormalMap) -> FormalMap:
    """(phi o chi)_i = phi_i(chi(x))."""
    _check_dims(phi, chi)
    d = min(phi.trusted_degree, chi.trusted_degree + phi.valuation() - 1)
    sub = _Substituter(chi, d)
    return FormalMap._raw(phi.dim, d, [sub.substitute(comp) for comp in phi.components])


def invert_map(phi: FormalMap, degree: int | None = None) -> FormalMap:
    """Compositional inverse, built degree by degree from psi = A^-1 (x - N(psi))."""
    n = phi.dim
    D = phi.trusted_degree if degree is None else min(degree, phi.trusted_degree)
    A = phi.linear_part
    try:
        Ainv = linalg.inverse(A)
    except SingularMatrix:
        raise SingularLinearPart("linear part of the map is not invertible") from None
    nonlin = FormalMap._raw(n, phi.trusted_degree,
                            [{a: c for a, c in comp.items() if sum(a) >= 2} for comp in phi.components])
    psi = FormalMap.linear(Ainv, D)
    if not any(nonlin.components):
        return psi
    for k in range(2, D + 1):
        sub = _Substituter(psi, k)
        np_comps = [sub.substitute(comp) for comp in nonlin.components]
        comps = []
        for i in range(n):
            acc = {}
            for j in range(n):
                if Ainv[i][j]:
                    _accumulate(acc, np_comps[j], -Ainv[i][j])
            # linear part stays A^-1 x
            for j in range(n):
                if Ainv[i][j]:
                    u = unit(n, j)
                    acc[u] = acc.get(u, ZERO) + Ainv[i][j]
            comps.append(acc)
        psi = FormalMap._raw(n, D, comps)
    return psi


def pushforward(T: FormalVectorField, phi: FormalMap, phi_inv: FormalMap | None = None) -> FormalVectorField:
    """The field T' with D phi . T = T' o phi, i.e. (D phi . T) o phi^-1."""
    _check_dims(T, phi)
    if phi_inv is None:
        phi_inv = invert_map(phi)
    return compose_field_map(apply_derivation(T, phi), phi_inv)


def substitute_series(series: Mapping, images, out_dim: int, maxdeg: int) -> dict:
    """Substitute variable k -> images[k], polynomials in ``out_dim`` other variables."""
    items = [_series_items(im) for im in images]
    zero = (0,) * out_dim
    cache = {(0,) * len(images): {zero: ONE}}

    def mono(alpha):
        got = cache.get(alpha)
        if got is not None:
            return got
        r = next(k for k, e in enumerate(alpha) if e)
        prev = list(alpha)
        prev[r] -= 1
        res = _series_mul_items(_series_items(mono(tuple(prev))), items[r], maxdeg)
        cache[alpha] = res
        return res

    out: dict = {}
    for alpha, c in series.items():
        _accumulate(out, mono(alpha), c)
    return {k: v for k, v in out.items() if v and sum(k) <= maxdeg}


def push_all(fields, phi: FormalMap, phi_inv: FormalMap | None = None) -> list:
    """Push every field forward by phi, sharing one inverse."""
    if phi_inv is None:
        phi_inv = invert_map(phi)
    return [pushforward(f, phi, phi_inv) for f in fields]
