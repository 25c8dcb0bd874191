"""Exact sparse multivariate polynomials.

Monomials are packed into a single integer key::

    key = deg << (SHIFT*n) | e_1 << (SHIFT*(n-1)) | ... | e_n

so that integer comparison of keys *is* graded-lex order (x_1 > x_2 > ...),
monomial multiplication is key addition, and the leading term is ``max``.
Coefficients are ints, Fractions, :class:`~reflection_workbench.fields.QuadExt`
values or floats (numeric backend).
"""

from __future__ import annotations

import heapq
import math
from fractions import Fraction
from itertools import combinations

from .errors import ArityMismatch, FieldMismatch, NotDivisible
from .fields import (
    NUMERIC,
    RATIONAL,
    QuadExt,
    canon,
    coef_from_json,
    coef_to_json,
    fdiv,
    field_tag_of,
    merge_tags,
)
from . import linalg

SHIFT = 12
MASK = (1 << SHIFT) - 1
MAX_DEGREE = MASK


class _Infinity:
    """Degree/order sentinel. Comparable with ints, refuses arithmetic."""

    __slots__ = ("_sign",)

    def __init__(self, sign):
        self._sign = sign

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self._sign < other._sign
        return self._sign < 0

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self._sign > other._sign
        return self._sign > 0

    def __ge__(self, other):
        return self == other or self > other

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other._sign == self._sign

    def __hash__(self):
        return hash(("inf", self._sign))

    def __repr__(self):
        return "POS_INF" if self._sign > 0 else "NEG_INF"

    def __str__(self):
        return "inf" if self._sign > 0 else "-inf"


NEG_INF = _Infinity(-1)
POS_INF = _Infinity(1)


def pack(exps):
    n = len(exps)
    key = sum(exps) << (SHIFT * n)
    for i, e in enumerate(exps):
        key |= e << (SHIFT * (n - 1 - i))
    return key


def unpack(key, n):
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = key & MASK
        key >>= SHIFT
    return tuple(out)


def _var_key(i, n):
    return (1 << (SHIFT * n)) | (1 << (SHIFT * (n - 1 - i)))


class SparsePoly:
    """Immutable polynomial in ``nvars`` variables with no zero terms stored."""

    __slots__ = ("nvars", "_t")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        self._t = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != nvars:
                    raise ArityMismatch(f"exponent {exps} has wrong length for {nvars} variables")
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent {exps}")
                k = pack(exps)
                v = canon(self._t.get(k, 0) + c)
                if v == 0:
                    self._t.pop(k, None)
                else:
                    self._t[k] = v

    @classmethod
    def _from_packed(cls, nvars, t):
        p = cls.__new__(cls)
        p.nvars = nvars
        p._t = t
        return p

    @classmethod
    def zero(cls, nvars):
        return cls._from_packed(nvars, {})

    @classmethod
    def const(cls, c, nvars):
        c = canon(c)
        return cls._from_packed(nvars, {} if c == 0 else {0: c})

    @classmethod
    def var(cls, i, nvars):
        if not 0 <= i < nvars:
            raise ArityMismatch(f"variable {i} out of range for {nvars} variables")
        return cls._from_packed(nvars, {_var_key(i, nvars): 1})

    @classmethod
    def linear(cls, coeffs, constant=0):
        n = len(coeffs)
        t = {}
        for i, c in enumerate(coeffs):
            c = canon(c)
            if c != 0:
                t[_var_key(i, n)] = c
        if constant != 0:
            t[0] = canon(constant)
        return cls._from_packed(n, t)

    @classmethod
    def monomial(cls, exps, c=1):
        c = canon(c)
        return cls._from_packed(len(exps), {} if c == 0 else {pack(exps): c})

    # -- inspection -----------------------------------------------------

    def terms(self):
        """(exponent tuple, coefficient) pairs in descending graded-lex order."""
        n = self.nvars
        return [(unpack(k, n), self._t[k]) for k in sorted(self._t, reverse=True)]

    def as_dict(self):
        n = self.nvars
        return {unpack(k, n): c for k, c in self._t.items()}

    def __len__(self):
        return len(self._t)

    def is_zero(self):
        return not self._t

    def coefficient(self, exps):
        return self._t.get(pack(exps), 0)

    @property
    def degree(self):
        if not self._t:
            return NEG_INF
        return max(self._t) >> (SHIFT * self.nvars)

    @property
    def min_degree(self):
        if not self._t:
            return POS_INF
        return min(self._t) >> (SHIFT * self.nvars)

    def is_constant(self):
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_term(self):
        return self._t.get(0, 0)

    def is_homogeneous(self):
        s = SHIFT * self.nvars
        return len({k >> s for k in self._t}) <= 1

    def homogeneous_parts(self):
        s = SHIFT * self.nvars
        parts = {}
        for k, c in self._t.items():
            parts.setdefault(k >> s, {})[k] = c
        return {deg: SparsePoly._from_packed(self.nvars, t) for deg, t in sorted(parts.items())}

    def leading_term(self):
        k = max(self._t)
        return unpack(k, self.nvars), self._t[k]

    @property
    def field_tag(self):
        tag = RATIONAL
        for c in self._t.values():
            tag = merge_tags(tag, field_tag_of(c))
        return tag

    def is_numeric(self):
        return any(isinstance(c, float) for c in self._t.values())

    # -- arithmetic -----------------------------------------------------

    def _check(self, other):
        if other.nvars != self.nvars:
            raise ArityMismatch(f"{self.nvars} vs {other.nvars} variables")

    def _lift(self, other):
        if isinstance(other, SparsePoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, float, QuadExt)):
            return SparsePoly.const(other, self.nvars)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        t = dict(self._t)
        for k, c in other._t.items():
            v = t.get(k)
            if v is None:
                t[k] = c
            else:
                v = canon(v + c)
                if v == 0:
                    del t[k]
                else:
                    t[k] = v
        return SparsePoly._from_packed(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly._from_packed(self.nvars, {k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = canon(c)
        if c == 0:
            return SparsePoly.zero(self.nvars)
        t = {}
        for k, v in self._t.items():
            w = canon(v * c)
            if w != 0:
                t[k] = w
        return SparsePoly._from_packed(self.nvars, t)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, float, QuadExt)):
            return self.scale(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        self._check(other)
        a, b = self._t, other._t
        if not a or not b:
            return SparsePoly.zero(self.nvars)
        if self.degree + other.degree > MAX_DEGREE:
            raise OverflowError("degree exceeds packing limit")
        if len(a) < len(b):
            a, b = b, a
        out = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        t = {}
        for k, v in out.items():
            v = canon(v)
            if v != 0:
                t[k] = v
        return SparsePoly._from_packed(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = SparsePoly.const(1, self.nvars)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.nvars == other.nvars and self._t == other._t
        if isinstance(other, (int, Fraction, float, QuadExt)):
            return self._t == SparsePoly.const(other, self.nvars)._t
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self._t.items())))

    def almost_equal(self, other, tol=1e-9):
        diff = self - other
        return all(abs(float(c)) <= tol for c in diff._t.values())

    def to_float(self):
        return SparsePoly._from_packed(self.nvars, {k: float(c) for k, c in self._t.items()})

    def chop(self, tol=1e-12):
        """Drop float coefficients with magnitude <= tol."""
        return SparsePoly._from_packed(
            self.nvars, {k: c for k, c in self._t.items() if not (isinstance(c, float) and abs(c) <= tol)}
        )

    # -- calculus / evaluation -----------------------------------------

    def diff(self, var):
        n = self.nvars
        if not 0 <= var < n:
            raise ArityMismatch(f"variable {var} out of range for {n} variables")
        sh = SHIFT * (n - 1 - var)
        dk = _var_key(var, n)
        t = {}
        for k, c in self._t.items():
            e = (k >> sh) & MASK
            if e:
                t[k - dk] = canon(c * e)
        return SparsePoly._from_packed(n, t)

    def diff_multi(self, q):
        p = self
        for i, qi in enumerate(q):
            for _ in range(qi):
                p = p.diff(i)
        return p

    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point):
        n = self.nvars
        if len(point) != n:
            raise ArityMismatch(f"point of length {len(point)} for {n} variables")
        numeric = any(isinstance(x, float) for x in point)
        pts = [canon(x) if not isinstance(x, float) else x for x in point]
        powers = [dict() for _ in range(n)]
        acc = 0
        for k, c in self._t.items():
            if numeric and not isinstance(c, float):
                c = float(c)
            term = c
            kk = k
            for i in range(n - 1, -1, -1):
                e = kk & MASK
                kk >>= SHIFT
                if e:
                    pw = powers[i].get(e)
                    if pw is None:
                        pw = pts[i] ** e
                        powers[i][e] = pw
                    term = term * pw
            acc = acc + term
        return canon(acc)

    def compose(self, polys):
        """Substitute ``polys[i]`` for variable i."""
        return compose(self, polys)

    # -- presentation -----------------------------------------------------

    def to_json(self):
        return {
            "nvars": self.nvars,
            "terms": [{"exp": list(e), "coef": coef_to_json(c)} for e, c in self.terms()],
        }

    @classmethod
    def from_json(cls, obj):
        n = int(obj["nvars"])
        terms = {}
        for term in obj["terms"]:
            e = tuple(int(x) for x in term["exp"])
            terms[e] = canon(terms.get(e, 0) + coef_from_json(term["coef"]))
        return cls(n, terms)

    def to_str(self, names=None):
        names = names or default_names(self.nvars)
        if not self._t:
            return "0"
        pieces = []
        for exps, c in self.terms():
            mono = "*".join(
                (names[i] if e == 1 else f"{names[i]}^{e}") for i, e in enumerate(exps) if e
            )
            if not mono:
                pieces.append(_coef_str(c))
            elif c == 1:
                pieces.append(mono)
            elif c == -1:
                pieces.append("-" + mono)
            else:
                pieces.append(f"{_coef_str(c)}*{mono}")
        out = " + ".join(pieces)
        return out.replace("+ -", "- ")

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"SparsePoly({self.nvars}, {self.to_str()!r})"


def _coef_str(c):
    if isinstance(c, Fraction):
        return f"({c})"
    return str(c)


def default_names(n, prefix="x"):
    if n <= 4 and prefix == "x":
        return ["x", "y", "z", "w"][:n]
    return [f"{prefix}{i + 1}" for i in range(n)]


# ---------------------------------------------------------------------------
# module-level operations


def arith(f, g, op):
    if f.nvars != g.nvars:
        raise ArityMismatch(f"{f.nvars} vs {g.nvars} variables")
    merge_tags(f.field_tag, g.field_tag)
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


def differentiate(f, var):
    return f.diff(var)


def evaluate(f, point):
    ptag = RATIONAL
    for x in point:
        ptag = merge_tags(ptag, field_tag_of(x))
    merge_tags(f.field_tag, ptag)
    return f.evaluate(point)


def compose(F, polys):
    """F(P_1, ..., P_n) with powers of each P_i cached."""
    polys = list(polys)
    n = F.nvars
    if len(polys) != n:
        raise ArityMismatch(f"{F.nvars}-variate polynomial composed with {len(polys)} polynomials")
    if not polys:
        raise ArityMismatch("cannot compose a 0-variate polynomial")
    m = polys[0].nvars
    if any(p.nvars != m for p in polys):
        raise ArityMismatch("inner polynomials must share the same number of variables")
    cache = [{0: SparsePoly.const(1, m), 1: p} for p in polys]

    def power(i, e):
        c = cache[i]
        if e not in c:
            half = power(i, e // 2)
            c[e] = half * half if e % 2 == 0 else half * half * polys[i]
        return c[e]

    # group terms by the exponent prefix so shared partial products are reused
    out = {}
    prefix_cache = {}
    for k, c in F._t.items():
        exps = unpack(k, n)
        prod = None
        for i in range(n):
            key = exps[: i + 1]
            cached = prefix_cache.get(key)
            if cached is not None:
                prod = cached
                continue
            if prod is None:
                prod = power(i, exps[i])
            elif exps[i]:
                prod = prod * power(i, exps[i])
            prefix_cache[key] = prod
        for kk, v in prod._t.items():
            out[kk] = out.get(kk, 0) + c * v
    t = {}
    for k, v in out.items():
        v = canon(v)
        if v != 0:
            t[k] = v
    return SparsePoly._from_packed(m, t)


def linear_substitute(f, matrix):
    """f(M x): variable i is replaced by the linear form sum_j M[i][j] x_j."""
    n = f.nvars
    rows = [list(r) for r in matrix]
    if all(sum(1 for x in r if x != 0) == 1 for r in rows):
        # monomial matrix: permute exponents and multiply signs/scales
        target = []
        for r in rows:
            j = next(idx for idx, x in enumerate(r) if x != 0)
            target.append((j, r[j]))
        t = {}
        for k, c in f._t.items():
            exps = unpack(k, n)
            new = [0] * n
            coef = c
            for i, e in enumerate(exps):
                if e:
                    j, s = target[i]
                    new[j] += e
                    coef = coef * (s ** e)
            nk = pack(new)
            t[nk] = canon(t.get(nk, 0) + coef)
        return SparsePoly._from_packed(n, {k: v for k, v in t.items() if v != 0})
    return compose(f, [SparsePoly.linear(r) for r in rows])


def polynomial_matrix_jacobian(polys):
    n = polys[0].nvars
    return [[p.diff(j) for j in range(n)] for p in polys]


def determinant(M, method="cofactor"):
    """Determinant of a square matrix of polynomials.

    ``method='cofactor'`` is Laplace expansion with memoised sub-determinants;
    ``method='bareiss'`` is fraction-free elimination with exact divisions.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix is not square")
    if n == 0:
        raise ValueError("empty matrix")
    if method == "bareiss":
        return _bareiss(M)
    if method != "cofactor":
        raise ValueError(f"unknown method {method!r}")
    nv = M[0][0].nvars
    memo = {}

    def det(row, cols):
        # expansion of rows row..n-1 over the column tuple cols
        if len(cols) == 1:
            return M[row][cols[0]]
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = SparsePoly.zero(nv)
        for idx, c in enumerate(cols):
            entry = M[row][c]
            if entry.is_zero():
                continue
            sub = det(row + 1, cols[:idx] + cols[idx + 1:])
            term = entry * sub
            acc = acc + term if idx % 2 == 0 else acc - term
        memo[key] = acc
        return acc

    return det(0, tuple(range(n)))


def _bareiss(M):
    n = len(M)
    A = [list(r) for r in M]
    nv = A[0][0].nvars
    sign = 1
    prev = SparsePoly.const(1, nv)
    for k in range(n - 1):
        if A[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not A[i][k].is_zero()), None)
            if swap is None:
                return SparsePoly.zero(nv)
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j] = divide_exact(num, prev)
        prev = A[k][k]
    d = A[n - 1][n - 1]
    return d if sign == 1 else -d


def minor(M, row, col):
    """Determinant of M with the given row and column deleted."""
    sub = [[x for j, x in enumerate(r) if j != col] for i, r in enumerate(M) if i != row]
    if not sub:
        return SparsePoly.const(1, M[0][0].nvars)
    return determinant(sub)


def divide_with_remainder(f, g, tol=0.0):
    """Single-divisor multivariate division in graded-lex order: f = q g + r."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    f._check(g)
    n = f.nvars
    ltk = max(g._t)
    ltc = g._t[ltk]
    lt_exps = unpack(ltk, n)
    rest = [(k, c) for k, c in g._t.items() if k != ltk]
    rem = dict(f._t)
    heap = [-k for k in rem]
    heapq.heapify(heap)
    quot, remainder = {}, {}
    while heap:
        k = -heapq.heappop(heap)
        c = rem.pop(k, None)
        if c is None:
            continue
        c = canon(c)
        if c == 0 or (tol and isinstance(c, float) and abs(c) <= tol):
            continue
        exps = unpack(k, n)
        if all(a >= b for a, b in zip(exps, lt_exps)):
            qk = k - ltk
            qc = fdiv(c, ltc)
            quot[qk] = canon(quot.get(qk, 0) + qc)
            for gk, gc in rest:
                nk = qk + gk
                if nk not in rem:
                    heapq.heappush(heap, -nk)
                    rem[nk] = -qc * gc
                else:
                    rem[nk] = rem[nk] - qc * gc
        else:
            remainder[k] = c
    q = SparsePoly._from_packed(n, {k: v for k, v in quot.items() if v != 0})
    r = SparsePoly._from_packed(n, remainder)
    return q, r


def divide_exact(f, g, tol=None):
    """Return q with f = q*g; raise NotDivisible (carrying the remainder) otherwise."""
    if tol is None:
        tol = 1e-9 if (f.is_numeric() or g.is_numeric()) else 0.0
    q, r = divide_with_remainder(f, g, tol)
    if not r.is_zero():
        raise NotDivisible(f"{g} does not divide {f}: remainder {r}", remainder=r)
    return q


# ---------------------------------------------------------------------------
# flats


class Flat:
    """A linear subspace {x : forms(x) = 0} with a coordinate split.

    ``direction`` spans the flat, ``normal`` spans a complement, and every x
    is written x = sum t_a direction[a] + sum u_b normal[b].  Built from forms
    through reduced row echelon form, normals are unit vectors at the pivot
    columns, which keeps the substitution in :func:`vanishing_order` sparse.
    """

    __slots__ = ("n", "forms", "direction", "normal", "basepoint")

    def __init__(self, n, direction, normal, forms=()):
        self.n = n
        self.direction = [list(v) for v in direction]
        self.normal = [list(v) for v in normal]
        self.forms = [list(f) for f in forms]
        self.basepoint = [0] * n
        if len(self.direction) + len(self.normal) != n:
            raise ValueError("direction and normal bases must together have n vectors")
        if n and linalg.rank(self.direction + self.normal) != n:
            raise ValueError("direction and normal bases do not span the space")

    @classmethod
    def from_forms(cls, forms, n):
        forms = [list(f) for f in forms]
        if not forms:
            return cls(n, [[1 if i == j else 0 for i in range(n)] for j in range(n)], [], [])
        r, pivots = linalg.rref(forms)
        direction = linalg.nullspace(forms, n)
        normal = [[1 if i == p else 0 for i in range(n)] for p in pivots]
        return cls(n, direction, normal, forms)

    @property
    def dim(self):
        return len(self.direction)

    @property
    def codim(self):
        return len(self.normal)

    def point(self, coords):
        """Point of the flat with the given direction coordinates."""
        out = [0] * self.n
        for t, v in zip(coords, self.direction):
            for i, x in enumerate(v):
                if x != 0 and t != 0:
                    out[i] = canon(out[i] + t * x)
        return out

    def contains(self, x, tol=None):
        if not self.forms:
            return True
        for f in self.forms:
            val = linalg.dot(f, x)
            if isinstance(val, float):
                if abs(val) > (tol if tol is not None else 1e-9):
                    return False
            elif val != 0:
                return False
        return True


def vanishing_order(f, flat):
    """Minimal total normal-degree of f after the split x = T t + N u.

    Returns POS_INF for the zero polynomial.  f is (m-1)-flat on the flat
    iff the result is >= m.
    """
    if f.is_zero():
        return POS_INF
    n = f.nvars
    if flat.n != n:
        raise ArityMismatch("flat and polynomial live in different dimensions")
    a, c = flat.dim, flat.codim
    if c == 0:
        return 0
    subs = []
    for i in range(n):
        coeffs = [v[i] for v in flat.direction] + [v[i] for v in flat.normal]
        subs.append(SparsePoly.linear(coeffs))
    g = compose(f, subs)
    # normal coordinates are the last c variables: their packed bits are the low ones
    low = SHIFT * c
    low_mask = (1 << low) - 1
    best = None
    for k in g._t:
        ku = k & low_mask
        deg_u = 0
        while ku:
            deg_u += ku & MASK
            ku >>= SHIFT
        if best is None or deg_u < best:
            best = deg_u
            if best == 0:
                break
    return best


def random_poly(rng, nvars, max_degree, nterms, coef_range=5, field=None):
    """Random polynomial with small rational coefficients (for property tests)."""
    terms = {}
    for _ in range(nterms):
        deg = rng.randint(0, max_degree)
        cuts = sorted(rng.randint(0, deg) for _ in range(nvars - 1))
        exps = tuple(b - a for a, b in zip([0] + cuts, cuts + [deg]))
        num = rng.randint(-coef_range, coef_range)
        den = rng.randint(1, 3)
        c = canon(Fraction(num, den))
        if field is not None and field[0] == "QuadExt" and rng.random() < 0.5:
            c = QuadExt(c, Fraction(rng.randint(-coef_range, coef_range), rng.randint(1, 3)), field[1])
            c = canon(c + 0)
        terms[exps] = canon(terms.get(exps, 0) + c)
    return SparsePoly(nvars, terms)


def total_degree_in_var(f, var):
    n = f.nvars
    sh = SHIFT * (n - 1 - var)
    if f.is_zero():
        return NEG_INF
    return max((k >> sh) & MASK for k in f._t)


def binomial(n, k):
    return math.comb(n, k)


def multi_indices(n, max_order):
    """All exponent tuples of length n with total degree <= max_order, graded."""
    out = []
    for deg in range(max_order + 1):
        for cuts in combinations(range(deg + n - 1), n - 1):
            prev = -1
            exps = []
            for c in cuts:
                exps.append(c - prev - 1)
                prev = c
            exps.append(deg + n - 2 - prev)
            out.append(tuple(exps))
    return out
