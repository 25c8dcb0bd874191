"""Integrity bases, the Chevalley map P and the algebra built on it.

Covers the Jacobian factorization J_P = c * prod(lambda_tau), the
discriminant, rewriting invariants as polynomials in P, and the Cramer
solution of the gradient system  df/dz_i = sum_j dp_j/dz_i * g_j.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .coxeter import ReflectionGroup, build_group, icosahedral_axes
from .errors import (
    DivisibilityFailure,
    FactorizationFailure,
    NotDivisible,
    NotInvariant,
    RewriteInconsistent,
    UnsupportedFamily,
)
from .fields import canon, fdiv, is_zero
from .linalg import matmul
from .polyalg import (
    SparsePoly,
    compose,
    determinant,
    divide_exact,
    linear_substitute,
    minor,
    polynomial_matrix_jacobian,
    random_poly,
    unpack,
)


@dataclass
class JacobianFactorization:
    c: object
    factors: list
    J: SparsePoly
    exact: bool = True
    max_residual: float = 0.0
    n_points: int = 0


@dataclass
class RewriteResult:
    F: SparsePoly
    weighted_degree: object


@dataclass(eq=False)
class ChevalleyMap:
    group: ReflectionGroup
    p: list
    degrees: tuple
    d: int
    s_j: tuple
    s: int
    h: int
    power_sum_top: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self):
        return len(self.p)

    @property
    def exact(self):
        return self.group.is_exact

    def jacobian_matrix(self):
        if "jac" not in self._cache:
            self._cache["jac"] = polynomial_matrix_jacobian(self.p)
        return self._cache["jac"]

    def jacobian(self):
        if "J" not in self._cache:
            self._cache["J"] = determinant(self.jacobian_matrix())
        return self._cache["J"]

    def minors(self):
        """M[i][j]: Jacobian (rows p_a, columns z_b) with row j and column i removed."""
        if "minors" not in self._cache:
            jac = self.jacobian_matrix()
            n = self.n
            self._cache["minors"] = [[minor(jac, j, i) for j in range(n)] for i in range(n)]
        return self._cache["minors"]

    def evaluate(self, x):
        return tuple(pi.evaluate(x) for pi in self.p)

    def bookkeeping(self):
        """Degree identities; returns a list of violation strings (empty = pass)."""
        out = []
        if self.d != sum(k - 1 for k in self.degrees):
            out.append(f"d = {self.d} != sum(k_i - 1) = {sum(k - 1 for k in self.degrees)}")
        if self.h != 1 + self.d - self.s:
            out.append(f"h = {self.h} != 1 + d - s = {1 + self.d - self.s}")
        if self.h != max(self.degrees):
            out.append(f"h = {self.h} != k_n = {max(self.degrees)}")
        if math.prod(self.degrees) != self.group.spec.order:
            out.append(f"prod k_i = {math.prod(self.degrees)} != |W| = {self.group.spec.order}")
        if self.degrees[0] != 2:
            out.append(f"k_1 = {self.degrees[0]} != 2")
        return out


def _power_sum(forms, k, n):
    acc = SparsePoly.zero(n)
    for f in forms:
        acc = acc + SparsePoly.linear(f) ** k
    return acc


def _primitive(f):
    """Divide an integer polynomial by the gcd of its coefficients."""
    g = 0
    for _, c in f.terms():
        g = math.gcd(g, int(c))
    return f.scale(Fraction(1, g)) if g > 1 else f


def _re_z_power(k):
    # Re((x + i y)^k) = sum over even j of C(k, j) (-1)^(j/2) x^(k-j) y^j
    terms = {}
    for j in range(0, k + 1, 2):
        terms[(k - j, j)] = math.comb(k, j) * (-1) ** (j // 2)
    return SparsePoly(2, terms)


def basic_invariants(G, power_sum_top=False):
    """Canonical integrity basis for G, sorted by increasing degree.

    ``power_sum_top`` swaps the top invariant for one that vanishes only at
    the origin, as the loss-of-differentiability probe needs: for D_n this is
    sum x_i^(2(n-1)) (already the canonical top element), for I2(k) with k
    even it is (x^2+y^2)^(k/2) + Re((x+iy)^k)/2.  Other families already
    use power sums over an invariant set of linear forms.
    """
    if isinstance(G, str):
        G = build_group(G)
    spec = G.spec
    n = G.n
    xs = [SparsePoly.var(i, n) for i in range(n)]
    fam = spec.family
    if fam == "A":
        last = -sum(xs[1:], xs[0])
        p = [_primitive(sum((x ** k for x in xs[1:]), xs[0] ** k) + last ** k) for k in range(2, n + 2)]
    elif fam == "B":
        p = [sum((x ** (2 * i) for x in xs[1:]), xs[0] ** (2 * i)) for i in range(1, n + 1)]
    elif fam == "D":
        p = [sum((x ** (2 * i) for x in xs[1:]), xs[0] ** (2 * i)) for i in range(1, n)]
        prod = xs[0]
        for x in xs[1:]:
            prod = prod * x
        p.append(prod)
    elif fam == "I2":
        k = spec.k
        top = _re_z_power(k)
        if power_sum_top and k % 2 == 0:
            top = (xs[0] ** 2 + xs[1] ** 2) ** (k // 2) + top.scale(Fraction(1, 2))
        p = [xs[0] ** 2 + xs[1] ** 2, top]
    elif fam == "H3":
        axes = icosahedral_axes()
        p = [_power_sum(axes, k, 3) for k in (2, 6, 10)]
    else:
        raise UnsupportedFamily(f"no integrity basis for {spec}")
    p = sorted(p, key=lambda q: q.degree)  # stable: D_n keeps the power sum before prod(x)
    degrees = tuple(q.degree for q in p)
    d = len(G.reflections)
    s_j = tuple(sum(k - 1 for u, k in enumerate(degrees) if u != j) for j in range(n))
    s = min(s_j)
    h = 1 + d - s
    return ChevalleyMap(G, p, degrees, d, s_j, s, h, power_sum_top)


def _is_monomial_matrix(w):
    return all(sum(1 for x in row if x != 0) == 1 for row in w)


def _coset_data(G):
    """Monomial subgroup H of W and right coset representatives (W = union of H r)."""
    data = getattr(G, "_reynolds_cosets", None)
    if data is not None:
        return data
    elements = G.elements()
    H = [w for w in elements if _is_monomial_matrix(w)]
    covered, reps = set(), []
    for w in elements:
        if G._key(w) in covered:
            continue
        reps.append(w)
        for h in H:
            covered.add(G._key(tuple(tuple(r) for r in matmul(h, w))))
    if len(H) * len(reps) != len(elements):
        H, reps = [G.identity], list(elements)
    G._reynolds_cosets = (H, reps)
    return H, reps


def reynolds(G, f):
    """(1/|W|) sum_w f(w x).

    Summed as sum_r (sum_h f o h) o r over the monomial subgroup H and
    coset representatives r, so most substitutions are cheap permutations.
    """
    H, reps = _coset_data(G)
    inner = SparsePoly.zero(f.nvars)
    for h in H:
        inner = inner + linear_substitute(f, h)
    acc = SparsePoly.zero(f.nvars)
    for r in reps:
        acc = acc + linear_substitute(inner, r)
    order = len(H) * len(reps)
    if G.is_exact:
        return acc.scale(Fraction(1, order))
    return acc.scale(1.0 / order).chop(1e-12)


def is_invariant(G, f, tol=1e-9):
    """f(s x) = f(x) for every simple reflection s (these generate W)."""
    for s in G.generators:
        g = linear_substitute(f, s)
        if G.is_exact and not (f.is_numeric() or g.is_numeric()):
            if g != f:
                return False
        elif not g.almost_equal(f, tol):
            return False
    return True


def random_invariant(G, rng, max_degree, nterms=3):
    """Reynolds average of a random sparse polynomial; retried until nonzero."""
    for _ in range(50):
        f = random_poly(rng, G.n, max_degree, rng.randint(1, nterms))
        g = reynolds(G, f)
        if not g.is_zero():
            return g
    return SparsePoly.const(1, G.n)


def jacobian_factorization(C, n_points=100, seed=0):
    """Factor J_P into c * prod(lambda_tau) over the group's normalized forms.

    Exact backends divide J exactly by each form; the numeric backend checks
    |J(x) - c prod lambda(x)| <= 1e-9 at random unit points instead.
    """
    G = C.group
    J = C.jacobian()
    forms = [list(f) for f in G.forms]
    if G.is_exact:
        q = J
        for f in forms:
            try:
                q = divide_exact(q, SparsePoly.linear(f))
            except NotDivisible as exc:
                raise FactorizationFailure(f"form {f} does not divide the Jacobian") from exc
        if not q.is_constant() or q.is_zero():
            raise FactorizationFailure(f"quotient {q} is not a nonzero constant")
        return JacobianFactorization(q.constant_term(), forms, J, True)
    rng = random.Random(seed)

    def prod_forms(x):
        out = 1.0
        for f in forms:
            out *= sum(float(a) * xi for a, xi in zip(f, x))
        return out

    def unit_point():
        v = [rng.gauss(0.0, 1.0) for _ in range(G.n)]
        r = math.sqrt(sum(t * t for t in v))
        return [t / r for t in v]

    x0 = unit_point()
    while abs(prod_forms(x0)) < 1e-3:
        x0 = unit_point()
    c = float(J.evaluate(x0)) / prod_forms(x0)
    worst = 0.0
    for _ in range(n_points):
        x = unit_point()
        worst = max(worst, abs(float(J.evaluate(x)) - c * prod_forms(x)))
    return JacobianFactorization(c, forms, J, False, worst, n_points)


# ---------------------------------------------------------------------------
# rewriting


def weight_monomials(degrees, r):
    """All m with sum m_i k_i = r, in lexicographic order."""
    out = []

    def rec(i, left, acc):
        if i == len(degrees):
            if left == 0:
                out.append(tuple(acc))
            return
        for mi in range(left // degrees[i] + 1):
            acc.append(mi)
            rec(i + 1, left - mi * degrees[i], acc)
            acc.pop()

    rec(0, r, [])
    return out


def _p_power(C, m):
    cache = C._cache.setdefault("pm", {})
    if m in cache:
        return cache[m]
    if sum(m) == 0:
        val = SparsePoly.const(1, C.n)
    else:
        i = max(idx for idx, mi in enumerate(m) if mi)
        prev = list(m)
        prev[i] -= 1
        val = _p_power(C, tuple(prev)) * C.p[i]
    cache[m] = val
    return val


def _echelon(C, r):
    """Echelon form of {p^m : weight r}; each pivot stores its combination of the m."""
    cache = C._cache.setdefault("echelon", {})
    if r in cache:
        return cache[r]
    ms = weight_monomials(C.degrees, r)
    numeric = not C.exact
    pivots = []
    for idx, m in enumerate(ms):
        vec = dict(_p_power(C, m)._t)
        comb = {idx: 1}
        vec, comb = _reduce(vec, comb, pivots, numeric)
        if not vec:
            raise RewriteInconsistent(f"basis products of weight {r} are linearly dependent")
        key = max(vec, key=lambda k: abs(float(vec[k]))) if numeric else max(vec)
        pv = vec[key]
        vec = {k: canon(fdiv(c, pv)) for k, c in vec.items()}
        comb = {k: canon(fdiv(c, pv)) for k, c in comb.items()}
        pivots.append((key, vec, comb))
    cache[r] = (ms, pivots)
    return cache[r]


def _reduce(vec, comb, pivots, numeric, tol=1e-12):
    vec = dict(vec)
    comb = dict(comb)
    for key, pvec, pcomb in pivots:
        c = vec.get(key)
        if c is None:
            continue
        for k, v in pvec.items():
            nv = canon(vec.get(k, 0) - c * v)
            if is_zero(nv, tol if numeric else 0.0):
                vec.pop(k, None)
            else:
                vec[k] = nv
        for k, v in pcomb.items():
            nv = canon(comb.get(k, 0) - c * v)
            if nv == 0:
                comb.pop(k, None)
            else:
                comb[k] = nv
        vec.pop(key, None)
    return vec, comb


def rewrite_invariant(C, f, tol=1e-9):
    """Solve f = F(p_1, ..., p_n) degree by degree with exact elimination.

    A successful exact solve certifies W-invariance (F o P is invariant);
    when the solve fails, invariance under the simple reflections decides
    between NotInvariant and RewriteInconsistent.
    """
    n = C.n
    if f.nvars != C.group.n:
        raise ValueError("polynomial dimension does not match the group")
    numeric = not C.exact or f.is_numeric()
    F_terms = {}
    for r, part in f.homogeneous_parts().items():
        ms, pivots = _echelon(C, r)
        if not ms:
            _diagnose(C, f)
        # reducing -part leaves the combination expressing +part
        neg = {k: -c for k, c in part._t.items()}
        rem, comb = _reduce(neg, {}, pivots, numeric, tol if numeric else 0.0)
        if rem:
            _diagnose(C, f)
        for idx, c in comb.items():
            m = ms[idx]
            F_terms[m] = canon(F_terms.get(m, 0) + c)
    F = SparsePoly(n, F_terms)
    wd = max((sum(mi * ki for mi, ki in zip(m, C.degrees)) for m, _ in F.terms()), default=None)
    return RewriteResult(F, wd if wd is not None else F.degree)


def _diagnose(C, f):
    if not is_invariant(C.group, f):
        raise NotInvariant("polynomial is not invariant under the group")
    raise RewriteInconsistent("no exact solution: the invariants are not an integrity basis")


def discriminant(C):
    """Delta with Delta(P(x)) = J(x)^2."""
    J = C.jacobian()
    J2 = J * J
    delta = rewrite_invariant(C, J2).F
    if compose(delta, C.p) != J2:
        raise RewriteInconsistent("discriminant round trip failed")
    return delta


def gradient_system(C, f, return_rhs=False):
    """Cramer solution g_j = RHS_j / (c prod lambda) of the gradient system.

    RHS_j = sum_i (-1)^(i+j) M_{i,j} df/dz_i, where M_{i,j} deletes the p_j
    row and the z_i column of the Jacobian.  Every normalized form must
    divide every RHS_j exactly.
    """
    if not C.exact:
        raise DivisibilityFailure("the Cramer system needs an exact backend")
    fact = C._cache.get("factorization")
    if fact is None:
        fact = jacobian_factorization(C)
        C._cache["factorization"] = fact
    M = C.minors()
    n = C.n
    grads = [f.diff(i) for i in range(n)]
    out, rhs_list = [], []
    for j in range(n):
        rhs = SparsePoly.zero(f.nvars)
        for i in range(n):
            term = M[i][j] * grads[i]
            rhs = rhs + term if (i + j) % 2 == 0 else rhs - term
        rhs_list.append(rhs)
        q = rhs
        for form in fact.factors:
            try:
                q = divide_exact(q, SparsePoly.linear(form))
            except NotDivisible as exc:
                raise DivisibilityFailure(f"lambda = {form} does not divide RHS_{j + 1}") from exc
        out.append(q.scale(fdiv(1, fact.c)))
    if return_rhs:
        return out, rhs_list
    return out


def gradient_from_rewrite(C, F):
    """compose(dF/du_j, p) for each j: the rewrite-route gradient."""
    return [compose(F.diff(j), C.p) for j in range(C.n)]


def orbit_separation_check(C, x, y, tol=1e-9):
    """(same P value, same orbit) for two points."""
    px, py = C.evaluate(x), C.evaluate(y)
    exact = C.exact and not any(isinstance(v, float) for v in list(x) + list(y))
    if exact:
        same_p = px == py
    else:
        same_p = all(abs(float(a) - float(b)) <= tol * max(1.0, abs(float(a))) for a, b in zip(px, py))
    G = C.group
    same_orbit = False
    for w in G.elements():
        img = G.act(w, x)
        if exact:
            if tuple(img) == tuple(y):
                same_orbit = True
                break
        elif all(abs(float(a) - float(b)) <= 1e-7 for a, b in zip(img, y)):
            same_orbit = True
            break
    return same_p, same_orbit


def weighted_derivative_orders(C, m):
    """sum m_i k_i: the weight that governs continuity of d^|m| F / dP^m."""
    if len(m) != C.n:
        raise ValueError("multi-index length must equal the number of invariants")
    return sum(mi * ki for mi, ki in zip(m, C.degrees))


def degree_in_last(F):
    """Degree of F in u_n (the variable paired with the top invariant)."""
    if F.is_zero():
        return 0
    return max(e[-1] for e, _ in F.terms())
