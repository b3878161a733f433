"""Exact Gaussian-rational scalars, the coefficient field for every other module.

A value is stored as ``(a + b*i) / d`` with ``d > 0`` and ``gcd(a, b, d) == 1``,
which keeps arithmetic down to one gcd per operation.  The four rational
parts are exposed as properties.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import DivisionByZero, ParseError

__all__ = ["GaussianRational", "parse_scalar", "ZERO", "ONE", "I"]


def _make(a: int, b: int, d: int) -> "GaussianRational":
    if d < 0:
        a, b, d = -a, -b, -d
    if a == 0 and b == 0:
        return ZERO
    g = gcd(a, b, d)
    obj = object.__new__(GaussianRational)
    if g != 1:
        a //= g
        b //= g
        d //= g
    object.__setattr__(obj, "_a", a)
    object.__setattr__(obj, "_b", b)
    object.__setattr__(obj, "_d", d)
    return obj


class GaussianRational:
    """A complex number with rational real and imaginary parts.

    Accepts ints, Fractions, strings in canonical form, or another
    GaussianRational.  ``GaussianRational(1, 2)`` is ``1 + 2i``.
    """

    __slots__ = ("_a", "_b", "_d")

    def __new__(cls, re=0, im=0):
        if isinstance(re, GaussianRational) and im == 0:
            return re
        if isinstance(re, str):
            if im != 0:
                raise TypeError("string input takes no imaginary part")
            return parse_scalar(re)
        re = _as_fraction(re)
        im = _as_fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        return _make(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # rational parts -------------------------------------------------------
    @property
    def real(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def imag(self) -> Fraction:
        return Fraction(self._b, self._d)

    @property
    def re_num(self) -> int:
        return self.real.numerator

    @property
    def re_den(self) -> int:
        return self.real.denominator

    @property
    def im_num(self) -> int:
        return self.imag.numerator

    @property
    def im_den(self) -> int:
        return self.imag.denominator

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if o._d == self._d:
            return _make(self._a + o._a, self._b + o._b, self._d)
        return _make(self._a * o._d + o._a * self._d, self._b * o._d + o._b * self._d, self._d * o._d)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if o._d == self._d:
            return _make(self._a - o._a, self._b - o._b, self._d)
        return _make(self._a * o._d - o._a * self._d, self._b * o._d - o._b * self._d, self._d * o._d)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if type(other) is int:
            if other == 0:
                return ZERO
            return _make(self._a * other, self._b * other, self._d)
        o = _coerce(other)
        if o is NotImplemented:
            return o
        a, b, d = self._a, self._b, self._d
        c, e, f = o._a, o._b, o._d
        if b == 0 and e == 0:
            return _make(a * c, 0, d * f)
        return _make(a * c - b * e, a * e + b * c, d * f)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __neg__(self):
        if self._a == 0 and self._b == 0:
            return self
        return _make(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "GaussianRational":
        a, b, d = self._a, self._b, self._d
        norm = a * a + b * b
        if norm == 0:
            raise DivisionByZero("division by zero Gaussian rational")
        # d/(a+bi) = d(a-bi)/(a^2+b^2)
        return _make(d * a, -d * b, norm)

    def conjugate(self) -> "GaussianRational":
        return _make(self._a, -self._b, self._d)

    def norm(self) -> Fraction:
        """|z|^2 as a Fraction."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    # comparisons ----------------------------------------------------------
    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __bool__(self):
        return self._a != 0 or self._b != 0

    def is_real(self) -> bool:
        return self._b == 0

    def __complex__(self):
        return complex(self._a / self._d, self._b / self._d)

    # text -----------------------------------------------------------------
    def __str__(self):
        re, im = self.real, self.imag
        if im == 0:
            return _rat_str(re)
        im_text = _rat_str(abs(im)) + "i"
        if re == 0:
            return ("-" if im < 0 else "") + im_text
        return _rat_str(re) + ("-" if im < 0 else "+") + im_text

    def __repr__(self):
        return f"GaussianRational('{self}')"

    def __reduce__(self):
        return (parse_scalar, (str(self),))


def _rat_str(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, GaussianRational):
        if x._b != 0:
            raise TypeError("expected a real part, got a non-real Gaussian rational")
        return Fraction(x._a, x._d)
    raise TypeError(f"cannot build an exact scalar from {type(x).__name__}")


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return _make(x, 0, 1) if x else ZERO
    if isinstance(x, Fraction):
        return _make(x.numerator, 0, x.denominator)
    return NotImplemented


ZERO = object.__new__(GaussianRational)
object.__setattr__(ZERO, "_a", 0)
object.__setattr__(ZERO, "_b", 0)
object.__setattr__(ZERO, "_d", 1)
ONE = _make(1, 0, 1)
I = _make(0, 1, 1)


# parsing ------------------------------------------------------------------

def _read_int(text: str, pos: int) -> tuple[int, int]:
    start = pos
    while pos < len(text) and text[pos].isdigit():
        pos += 1
    if pos == start:
        raise ParseError(f"expected digits at position {start} in {text!r}", start)
    return int(text[start:pos]), pos


def _read_rat(text: str, pos: int) -> tuple[Fraction, int]:
    num, pos = _read_int(text, pos)
    den = 1
    if pos < len(text) and text[pos] == "/":
        den_pos = pos + 1
        den, pos = _read_int(text, den_pos)
        if den == 0:
            raise ParseError(f"zero denominator at position {den_pos} in {text!r}", den_pos)
    return Fraction(num, den), pos


def _read_coef(text: str, pos: int) -> tuple[Fraction, int]:
    # a bare 'i' has coefficient 1
    if pos < len(text) and text[pos] == "i":
        return Fraction(1), pos
    return _read_rat(text, pos)


def parse_scalar(text: str) -> GaussianRational:
    """Parse ``[sign] rat [sign [rat] 'i'] | [sign] [rat] 'i'`` with ``rat = int['/'int]``.

    Blanks are ignored; positions in errors refer to the text without them.
    Raises ParseError carrying the offending position.
    """
    if not isinstance(text, str):
        raise ParseError(f"scalar must be a string, got {type(text).__name__}", 0)
    text = "".join(text.split())
    pos = 0
    sign = 1
    if pos < len(text) and text[pos] in "+-":
        sign = -1 if text[pos] == "-" else 1
        pos += 1
    first, pos = _read_coef(text, pos)
    if pos == len(text):
        return GaussianRational(sign * first)
    if text[pos] == "i":
        if pos + 1 != len(text):
            raise ParseError(f"unexpected trailing input at position {pos + 1} in {text!r}", pos + 1)
        return GaussianRational(0, sign * first)
    if text[pos] not in "+-":
        raise ParseError(f"unexpected character {text[pos]!r} at position {pos} in {text!r}", pos)
    im_sign = -1 if text[pos] == "-" else 1
    pos += 1
    second, pos = _read_coef(text, pos)
    if pos >= len(text) or text[pos] != "i":
        raise ParseError(f"expected 'i' at position {pos} in {text!r}", pos)
    if pos + 1 != len(text):
        raise ParseError(f"unexpected trailing input at position {pos + 1} in {text!r}", pos + 1)
    return GaussianRational(sign * first, im_sign * second)
