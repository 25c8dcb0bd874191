"""Coefficient fields: rationals, real quadratic extensions Q(sqrt d), binary64.

Rationals are plain ``int`` or :class:`fractions.Fraction` values (a
Fraction with denominator 1 is collapsed to ``int`` by :func:`canon`).
Elements of Q(sqrt d) are :class:`QuadExt` instances, and any QuadExt whose
irrational part vanishes is collapsed back to a rational, so every value
lives in the smallest field containing it.  Floats form the numeric backend;
exact values embed into it, but two extensions with different ``d`` never mix.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import FieldMismatch

__all__ = [
    "QuadExt",
    "canon",
    "fdiv",
    "is_exact",
    "is_zero",
    "sign",
    "to_float",
    "coef_to_json",
    "coef_from_json",
    "field_tag_of",
    "merge_tags",
    "parse_scalar",
]


def _squarefree(d):
    if d < 2:
        raise ValueError(f"d must be a square-free integer >= 2, got {d}")
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            raise ValueError(f"d = {d} is not square-free")
        k += 1
    return d


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"not a rational: {x!r}")


class QuadExt:
    """An element (A + B*sqrt(d)) / den of Q(sqrt d), stored with integers.

    ``QuadExt(a, b, d)`` builds a + b*sqrt(d) for rationals a, b.  Arithmetic
    returns a plain rational whenever the sqrt(d) part cancels.
    """

    __slots__ = ("_A", "_B", "_den", "d")

    def __init__(self, a=0, b=0, d=5):
        fa, fb = _as_fraction(a), _as_fraction(b)
        den = fa.denominator * fb.denominator // math.gcd(fa.denominator, fb.denominator)
        self._set(fa.numerator * (den // fa.denominator), fb.numerator * (den // fb.denominator), den, _squarefree(d))

    def _set(self, A, B, den, d):
        g = math.gcd(math.gcd(A, B), den)
        if g != 1:
            A, B, den = A // g, B // g, den // g
        self._A, self._B, self._den, self.d = A, B, den, d

    @classmethod
    def _raw(cls, A, B, den, d):
        # returns a rational when B == 0; den may be negative on entry
        if den < 0:
            A, B, den = -A, -B, -den
        if B == 0:
            return A // den if A % den == 0 else Fraction(A, den)
        obj = cls.__new__(cls)
        obj._set(A, B, den, d)
        return obj

    @classmethod
    def sqrt(cls, d):
        return cls(0, 1, d)

    @property
    def a(self):
        return Fraction(self._A, self._den)

    @property
    def b(self):
        return Fraction(self._B, self._den)

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise FieldMismatch(f"Q(sqrt {self.d}) and Q(sqrt {other.d}) do not mix")
            return other._A, other._B, other._den
        if isinstance(other, int):
            return other, 0, 1
        if isinstance(other, Fraction):
            return other.numerator, 0, other.denominator
        return None

    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        A2, B2, D2 = o
        D1 = self._den
        return QuadExt._raw(self._A * D2 + A2 * D1, self._B * D2 + B2 * D1, D1 * D2, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt._raw(-self._A, -self._B, self._den, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        A2, B2, D2 = o
        D1 = self._den
        return QuadExt._raw(self._A * D2 - A2 * D1, self._B * D2 - B2 * D1, D1 * D2, self.d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        A2, B2, D2 = o
        A1, B1 = self._A, self._B
        return QuadExt._raw(A1 * A2 + self.d * B1 * B2, A1 * B2 + B1 * A2, self._den * D2, self.d)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadExt._raw(self._A, -self._B, self._den, self.d)

    def norm(self):
        """Field norm a^2 - d b^2 (a rational)."""
        return Fraction(self._A * self._A - self.d * self._B * self._B, self._den * self._den)

    def inverse(self):
        # 1/x = conj(x) / N(x), all in integers
        A, B, D = self._A, self._B, self._den
        n = A * A - self.d * B * B
        if n == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt._raw(A * D, -B * D, n, self.d)

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        if isinstance(other, QuadExt):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("QuadExt division by zero")
            f = Fraction(other)
            return QuadExt._raw(self._A * f.denominator, self._B * f.denominator, self._den * f.numerator, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        if self._coerce(other) is None:
            return NotImplemented
        return self.inverse() * other

    def __pow__(self, e):
        if not isinstance(e, int):
            return float(self) ** e
        if e < 0:
            return self.inverse() ** (-e)
        result, base = 1, self
        while e:
            if e & 1:
                result = base * result
            e >>= 1
            if e:
                base = base * base
        return result

    def sign(self):
        """Exact sign of A + B sqrt(d)."""
        A, B = self._A, self._B
        if A == 0 and B == 0:
            return 0
        if A >= 0 and B >= 0:
            return 1
        if A <= 0 and B <= 0:
            return -1
        # opposite signs: compare A^2 with d B^2
        lhs, rhs = A * A, self.d * B * B
        if A > 0:
            return 1 if lhs > rhs else -1
        return -1 if lhs > rhs else 1

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return self.d == other.d and self._A == other._A and self._B == other._B and self._den == other._den
        if isinstance(other, (int, Fraction)):
            return self._B == 0 and Fraction(self._A, self._den) == other
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __hash__(self):
        if self._B == 0:
            return hash(Fraction(self._A, self._den))
        return hash((self._A, self._B, self._den, self.d))

    def __lt__(self, other):
        return sign(self - other) < 0

    def __le__(self, other):
        return sign(self - other) <= 0

    def __gt__(self, other):
        return sign(self - other) > 0

    def __ge__(self, other):
        return sign(self - other) >= 0

    def __abs__(self):
        return self if self.sign() > 0 else -self

    def __float__(self):
        return (self._A + self._B * math.sqrt(self.d)) / self._den

    def __bool__(self):
        return self._A != 0 or self._B != 0

    def __repr__(self):
        return f"QuadExt({self.a}, {self.b}, {self.d})"

    def __str__(self):
        a, b = self.a, self.b
        bs = f"{b}*sqrt{self.d}" if b != 1 else f"sqrt{self.d}"
        if b == -1:
            bs = f"-sqrt{self.d}"
        if a == 0:
            return bs
        return f"({a}{'+' if b > 0 else ''}{bs})"


def canon(x):
    """Collapse integral Fractions to int; leave everything else untouched."""
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def fdiv(a, b):
    """Field division that never silently turns two rationals into a float."""
    if isinstance(a, float) or isinstance(b, float):
        return float(a) / float(b)
    if isinstance(a, QuadExt) or isinstance(b, QuadExt):
        return a / b
    if isinstance(b, int) and isinstance(a, int) and a % b == 0:
        return a // b
    return canon(Fraction(a) / Fraction(b))


def is_exact(x):
    return not isinstance(x, float)


def is_zero(x, tol=0.0):
    if isinstance(x, float):
        return abs(x) <= tol
    return x == 0


def sign(x, tol=0.0):
    if isinstance(x, QuadExt):
        return x.sign()
    if isinstance(x, float):
        if abs(x) <= tol:
            return 0
        return 1 if x > 0 else -1
    return (x > 0) - (x < 0)


def to_float(x):
    return float(x)


# field tags: ("Rational",), ("QuadExt", d), ("Numeric",)
RATIONAL = ("Rational",)
NUMERIC = ("Numeric",)


def field_tag_of(x):
    if isinstance(x, QuadExt):
        return ("QuadExt", x.d)
    if isinstance(x, float):
        return NUMERIC
    return RATIONAL


def merge_tags(t1, t2):
    """Smallest field containing both tags; raises FieldMismatch on Q(sqrt d) clashes."""
    if t1 == t2:
        return t1
    if t1 == NUMERIC or t2 == NUMERIC:
        return NUMERIC
    if t1 == RATIONAL:
        return t2
    if t2 == RATIONAL:
        return t1
    raise FieldMismatch(f"incompatible fields {t1} and {t2}")


def tag_to_str(tag):
    if tag[0] == "QuadExt":
        return f"QuadExt({tag[1]})"
    return tag[0]


def coef_to_json(c):
    if isinstance(c, QuadExt):
        return {"a": str(c.a), "b": str(c.b), "d": c.d}
    if isinstance(c, float):
        return c
    return str(Fraction(c))


def coef_from_json(obj):
    if isinstance(obj, dict):
        return canon_quad(Fraction(str(obj["a"])), Fraction(str(obj["b"])), int(obj["d"]))
    if isinstance(obj, bool):
        raise TypeError("boolean is not a coefficient")
    if isinstance(obj, float):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, str):
        return canon(Fraction(obj))
    raise TypeError(f"cannot read coefficient {obj!r}")


def canon_quad(a, b, d):
    if b == 0:
        return canon(Fraction(a))
    return QuadExt(a, b, d)


def parse_scalar(text):
    """Parse '3' or '-1/2' exactly; decimal or exponent notation gives a float."""
    text = text.strip()
    if any(ch in text for ch in ".eE") and "/" not in text:
        return float(text)
    return canon(Fraction(text))
