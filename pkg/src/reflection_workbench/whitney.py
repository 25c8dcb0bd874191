"""Whitney jets on finite samples, Faa di Bruno derivatives and the C^k probe.

Conventions follow the usual Whitney-field notation: a jet of order m on a
finite set E assigns numbers a_k(x) to every x in E and |k| <= m, and

    (D^q A)_x(x') = sum_{k >= q, |k| <= m} a_k(x) / (k - q)! * (x' - x)^(k - q)
    (R_x A)^q(x') = (D^q A)_{x'}(x') - (D^q A)_x(x').
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    DegenerateFit,
    EmptyCompact,
    InsufficientFlatness,
    NonpositiveBase,
    NotDivisible,
    PointNotInField,
    RayOnMirror,
    UnsupportedGroupForProbe,
)
from .fields import canon, fdiv
from .polyalg import (
    Flat,
    SparsePoly,
    compose,
    divide_exact,
    multi_indices,
    vanishing_order,
)

_SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _mfact(k):
    return math.prod(math.factorial(e) for e in k)


def _mpow(v, k):
    out = 1
    for vi, ki in zip(v, k):
        if ki:
            out = out * vi ** ki
    return out


def _geq(k, q):
    return all(a >= b for a, b in zip(k, q))


def _sub(k, q):
    return tuple(a - b for a, b in zip(k, q))


def _as_point(x):
    if isinstance(x, (int, float, Fraction)):
        return (x,)
    return tuple(x)


# ---------------------------------------------------------------------------
# jets


@dataclass
class JetField:
    """Jet of order m on a finite point list; ``coeffs[i][k]`` is a_k(points[i])."""

    n: int
    m: int
    points: list
    coeffs: list

    def __post_init__(self):
        expected = math.comb(self.n + self.m, self.m)
        for c in self.coeffs:
            if len(c) != expected:
                raise ValueError(f"jet of order {self.m} needs {expected} coefficients per point")

    @classmethod
    def from_function(cls, func, points, m):
        """Jet with a_k(x) = func(k, x) for every multi-index |k| <= m."""
        pts = [_as_point(x) for x in points]
        n = len(pts[0])
        ks = multi_indices(n, m)
        return cls(n, m, pts, [{k: func(k, x) for k in ks} for x in pts])

    def index(self, x):
        """Position of a point in the sample list."""
        x = _as_point(x)
        for i, p in enumerate(self.points):
            if p == x:
                return i
        raise PointNotInField(f"{x} is not a sample point of the field")

    def a(self, x, k):
        return self.coeffs[self.index(x)][tuple(k)]

    def polynomial_at(self, x, q=None):
        """(D^q A)_x as a function of x'."""
        i = self.index(x)
        q = tuple(q) if q is not None else (0,) * self.n
        base = self.points[i]
        c = self.coeffs[i]

        def poly(xp):
            h = [canon(a - b) for a, b in zip(_as_point(xp), base)]
            acc = 0
            for k, ak in c.items():
                if ak != 0 and _geq(k, q):
                    d = _sub(k, q)
                    acc = acc + fdiv(ak, _mfact(d)) * _mpow(h, d)
            return canon(acc)

        return poly


def taylor_field(f, E, m):
    """a_k(x) = D^k f(x) exactly, for |k| <= m."""
    if m < 0:
        raise ValueError("jet order must be nonnegative")
    pts = [_as_point(x) for x in E]
    n = f.nvars
    ks = multi_indices(n, m)
    ders = {k: f.diff_multi(k) for k in ks}
    return JetField(n, m, pts, [{k: ders[k].evaluate(x) for k in ks} for x in pts])


def remainder(A, x, xp, q):
    """(R_x A)^q(x') = a_q(x') - (D^q A)_x(x')."""
    q = tuple(q) if not isinstance(q, int) else (q,)
    if sum(q) > A.m:
        raise ValueError("|q| exceeds the jet order")
    return _remainder_idx(A, A.index(x), A.index(xp), q)


def _remainder_idx(A, i, j, q):
    return canon(A.coeffs[j][q] - A.polynomial_at(A.points[i], q)(A.points[j]))


def _distance(x, y):
    d2 = 0
    for a, b in zip(x, y):
        d2 = d2 + (a - b) * (a - b)
    if isinstance(d2, (int, Fraction)):
        fr = Fraction(d2)
        rn, rd = math.isqrt(fr.numerator), math.isqrt(fr.denominator)
        if rn * rn == fr.numerator and rd * rd == fr.denominator:
            return canon(Fraction(rn, rd))
    return math.sqrt(float(d2))


def seminorm(A, K, r, m=None):
    """sup_{x in K, |k|<=m} |a_k(x)/k!| + sup_{x != x' in K, |k|<=r} |R_x^k(x')| / |x-x'|^(r-|k|)."""
    m = A.m if m is None else m
    if r > m or m > A.m:
        raise ValueError("need r <= m <= jet order")
    idx = [A.index(x) for x in K]
    if not idx:
        raise EmptyCompact("the compact sample set is empty")
    first = 0
    for i in idx:
        for k, ak in A.coeffs[i].items():
            if sum(k) <= m:
                first = max(first, abs(fdiv(ak, _mfact(k))))
    second = 0
    ks = [k for k in multi_indices(A.n, r)]
    for i in idx:
        for j in idx:
            if i == j or A.points[i] == A.points[j]:
                continue
            dist = _distance(A.points[i], A.points[j])
            for k in ks:
                val = abs(_remainder_idx(A, i, j, k))
                if val:
                    second = max(second, fdiv(val, dist ** (r - sum(k))))
    return canon(first + second)


@dataclass
class LogLogFit:
    slope: float
    intercept: float
    residual: float


def fit_loglog(xs, ys):
    """Least-squares slope of log|y| against log x; residual is the rms misfit."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.abs(np.asarray(ys, dtype=float)))
    if len(lx) < 2 or np.ptp(lx) == 0:
        raise DegenerateFit("need at least two distinct abscissae")
    slope, intercept = np.polyfit(lx, ly, 1)
    res = ly - (slope * lx + intercept)
    return LogLogFit(float(slope), float(intercept), float(np.sqrt(np.mean(res ** 2))))


def regularity_exponent(A, pairs, q, min_pairs=10, min_decades=2.0, return_fit=False):
    """Fitted exponent of |(R_x A)^q(x')| against |x - x'| over a sampling plan.

    Returns +inf when every remainder vanishes.
    """
    q = tuple(q) if not isinstance(q, int) else (q,)
    if len(pairs) < min_pairs:
        raise DegenerateFit(f"need at least {min_pairs} pairs, got {len(pairs)}")
    seps, vals = [], []
    for x, xp in pairs:
        i, j = A.index(x), A.index(xp)
        seps.append(float(_distance(A.points[i], A.points[j])))
        vals.append(float(_remainder_idx(A, i, j, q)))
    if max(seps) / min(seps) < 10 ** min_decades * (1 - 1e-9):
        raise DegenerateFit(f"separations span fewer than {min_decades} decades")
    keep = [(s, v) for s, v in zip(seps, vals) if v != 0]
    if not keep:
        fit = LogLogFit(math.inf, 0.0, 0.0)
    elif len(keep) < 2:
        raise DegenerateFit("fewer than two nonzero remainders")
    else:
        fit = fit_loglog([s for s, _ in keep], [v for _, v in keep])
    return fit if return_fit else fit.slope


def power_field(gamma, points, m):
    """Jet of x -> x^gamma (x >= 0) on 1-D samples, order m."""

    def a(k, x):
        j = k[0]
        x = float(x[0])
        coef = math.prod(gamma - i for i in range(j))
        if x == 0:
            return 0.0 if gamma > j else (float(math.factorial(j)) if gamma == j else math.inf)
        return coef * x ** (gamma - j)

    return JetField.from_function(a, points, m)


# ---------------------------------------------------------------------------
# Faa di Bruno


@lru_cache(maxsize=None)
def _mu_tuples(k):
    """All (mu_1..mu_k) with sum j mu_j = k."""
    out = []

    def rec(j, left, acc):
        if j > k:
            if left == 0:
                out.append(tuple(acc))
            return
        for mu in range(left // j + 1):
            acc.append(mu)
            rec(j + 1, left - j * mu, acc)
            acc.pop()

    rec(1, k, [])
    return tuple(out)


def _is_integer(beta):
    if isinstance(beta, int):
        return True
    if isinstance(beta, Fraction):
        return beta.denominator == 1
    return False


def ray_restriction(p, x, v):
    """Coefficients c_j of t -> p(x + t v) (so the j-th derivative is j! c_j)."""
    subs = [SparsePoly.linear([vi], xi) for xi, vi in zip(x, v)]
    g = compose(p, subs)
    deg = max(g.degree, 0)
    return [g.coefficient((j,)) for j in range(deg + 1)]


def faa_di_bruno(p, beta, k, x, v=None, precise=False):
    """k-th derivative of p^beta at x along direction v (default: e_1 in 1-D).

    Exact when beta is an integer and x, v are exact; binary64 otherwise.
    ``precise`` runs the combinatorial sum in exact arithmetic (float inputs
    are converted exactly) and rounds only y^beta, which avoids the heavy
    cancellation of high orders.
    """
    if not isinstance(k, int):
        k = tuple(k)
        if len(k) != 1:
            raise ValueError("multivariate orders are taken along a ray: pass an int and a direction")
        k = k[0]
    x = _as_point(x)
    if v is None:
        if p.nvars != 1:
            raise ValueError("a direction is required in more than one variable")
        v = (1,)
    if precise and not _is_integer(beta):
        return _faa_precise(p, Fraction(beta), k, x, v)
    c = ray_restriction(p, x, v)
    y = c[0]
    exact = _is_integer(beta) and not isinstance(y, float)
    if exact:
        beta = int(beta)
    if not exact:
        y = float(y)
        c = [float(ci) for ci in c]
        beta = float(beta)
        if y <= 0 and not beta.is_integer():
            raise NonpositiveBase(f"p(x) = {y} <= 0 with non-integer exponent {beta}")
    if k == 0:
        return canon(y ** beta) if exact else y ** beta
    # float path with y != 0: factor out y^beta and use c_j / y, which stays
    # bounded where y^(beta - p) alone would overflow near the origin
    scaled = not exact and y != 0
    if scaled:
        c = [ci / y for ci in c]
    total = 0
    kf = math.factorial(k)
    for mu in _mu_tuples(k):
        npart = sum(mu)
        falling = 1
        for i in range(npart):
            falling = falling * (beta - i)
        if falling == 0:
            continue
        if scaled:
            outer = falling
        elif y == 0 and beta - npart < 0:
            raise NonpositiveBase("p(x) = 0 with a negative power")
        elif exact and beta - npart < 0:
            outer = falling * fdiv(1, y ** (npart - beta))
        else:
            outer = falling * y ** (beta - npart)
        term = fdiv(kf, math.prod(math.factorial(m) for m in mu)) * outer
        for j, mj in enumerate(mu, start=1):
            if mj:
                cj = c[j] if j < len(c) else 0
                term = term * cj ** mj
        total = total + term
    if scaled:
        return total * y ** beta
    return canon(total)


def _exact_ratios(p, x, v):
    x = [Fraction(xi) if isinstance(xi, float) else xi for xi in x]
    v = [Fraction(vi) if isinstance(vi, float) else vi for vi in v]
    c = ray_restriction(p, x, v)
    y = c[0]
    if not y > 0:
        raise NonpositiveBase(f"p(x) = {float(y)} <= 0 with a non-integer exponent")
    return y, [fdiv(ci, y) for ci in c]


def _faa_from_ratios(y, ratios, beta, k):
    # D^k(p^beta) = y^beta * sum_mu k!/prod(mu_j!) beta_(p) prod (c_j / y)^mu_j
    if k == 0:
        return float(y) ** float(beta)
    total = 0
    kf = math.factorial(k)
    for mu in _mu_tuples(k):
        falling = 1
        for i in range(sum(mu)):
            falling = falling * (beta - i)
        term = Fraction(kf, math.prod(math.factorial(m) for m in mu)) * falling
        for j, mj in enumerate(mu, start=1):
            if mj:
                term = term * (ratios[j] if j < len(ratios) else 0) ** mj
        total = total + term
    return float(total) * float(y) ** float(beta)


def _faa_precise(p, beta, k, x, v):
    y, ratios = _exact_ratios(p, x, v)
    return _faa_from_ratios(y, ratios, beta, k)


# ---------------------------------------------------------------------------
# counterexample probe


@dataclass
class ProbeRow:
    k: int
    slope: float
    expected: float
    residual: float
    verdict: str


@dataclass
class ProbeReport:
    group: str
    s: int
    alpha: float
    k_n: int
    ray: list
    t_grid: list
    rows: list
    max_vanishing_order: int
    first_blowup: object
    verdict: str
    slope_law_ok: bool
    inconclusive: bool = False

    def to_json(self):
        return {
            "group": self.group,
            "s": self.s,
            "alpha": self.alpha,
            "k_n": self.k_n,
            "ray": self.ray,
            "t_min": self.t_grid[0],
            "t_max": self.t_grid[-1],
            "samples": len(self.t_grid),
            "rows": [r.__dict__ for r in self.rows],
            "max_vanishing_order": self.max_vanishing_order,
            "first_blowup": self.first_blowup,
            "verdict": self.verdict,
            "slope_law_ok": self.slope_law_ok,
        }

    def to_csv(self):
        lines = ["k,slope,residual,verdict"]
        for r in self.rows:
            lines.append(f"{r.k},{r.slope:.6f},{r.residual:.3e},{r.verdict}")
        return "\n".join(lines) + "\n"


def c_label(k):
    return "C" + str(k).translate(_SUPERSCRIPTS)


SLOPE_DEADBAND = 0.05
SLOPE_TOL = 0.05


def counterexample_probe(C, s, alpha, ray=None, t_grid=None, deadband=SLOPE_DEADBAND):
    """Slopes of log|D^k p_n^(s+alpha)| along a ray, for k = 0 .. k_n s + 1."""
    G = C.group
    spec = G.spec
    k_n = C.degrees[-1]
    if k_n % 2:
        raise UnsupportedGroupForProbe(f"{spec}: top degree {k_n} is odd, p_n changes sign")
    if spec.family == "I2" and not C.power_sum_top:
        raise UnsupportedGroupForProbe(f"{spec}: build the invariants with power_sum_top=True")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    n = G.n
    if ray is None:
        ray = [1.0] * n
    ray = [float(r) for r in ray]
    norm = math.sqrt(sum(r * r for r in ray))
    if norm == 0:
        raise ValueError("ray must be nonzero")
    ray = [r / norm for r in ray]
    p_n = C.p[-1]
    top = float(p_n.evaluate(ray))
    if top <= 0:
        raise RayOnMirror(f"p_n(v) = {top} <= 0 along the ray")
    if t_grid is None:
        t_grid = list(np.logspace(-3, -1, 25))
    beta = s + alpha
    exact_top = not p_n.is_numeric()
    rows = []
    boundary = abs(k_n * alpha - round(k_n * alpha)) < 1e-12
    if exact_top:
        restricted = [_exact_ratios(p_n, [t * r for r in ray], ray) for t in t_grid]
    for k in range(0, k_n * s + 2):
        if exact_top:
            vals = [_faa_from_ratios(y, ratios, Fraction(beta), k) for y, ratios in restricted]
        else:
            vals = [faa_di_bruno(p_n, beta, k, [t * r for r in ray], ray) for t in t_grid]
        expected = k_n * beta - k
        if any(v == 0 or not math.isfinite(v) for v in vals):
            rows.append(ProbeRow(k, math.nan, expected, math.nan, "inconclusive"))
            continue
        fit = fit_loglog(t_grid, vals)
        if boundary:
            verdict = "inconclusive"
        elif fit.slope > deadband:
            verdict = "tends to 0"
        elif fit.slope < -deadband:
            verdict = "blow-up"
        else:
            verdict = "inconclusive"
        rows.append(ProbeRow(k, fit.slope, expected, fit.residual, verdict))
    slope_law_ok = all(math.isfinite(r.slope) and abs(r.slope - r.expected) <= SLOPE_TOL for r in rows)
    K = -1
    for r in rows:
        if r.verdict != "tends to 0":
            break
        K = r.k
    first_blowup = next((r.k for r in rows if r.verdict == "blow-up"), None)
    if boundary:
        verdict = "inconclusive"
    elif first_blowup is not None and first_blowup == K + 1:
        verdict = f"{c_label(K)} not {c_label(K + 1)}"
    elif K == rows[-1].k:
        verdict = f"{c_label(K)} (no blow-up up to order {K})"
    else:
        verdict = "inconclusive"
    return ProbeReport(str(spec), s, alpha, k_n, ray, [float(t) for t in t_grid], rows, K, first_blowup,
                       verdict, slope_law_ok, boundary)


def expected_verdict(k_n, s, alpha):
    if alpha < 1 / k_n:
        return f"{c_label(k_n * s)} not {c_label(k_n * s + 1)}"
    return None


# ---------------------------------------------------------------------------
# product and division lemmas on polynomial instances


@dataclass
class Lemma1Report:
    r: int
    s: int
    checks: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def _t_order(g):
    if g.is_zero():
        return math.inf
    return g.min_degree


def _restrict(f, z0, v):
    return compose(f, [SparsePoly.linear([vi], zi) for zi, vi in zip(z0, v)])


def lemma1_product_check(Q, A, flat, r, s, base_points, rays, flat_rays=None, check_flatness=True):
    """Remainders of the product jet QA (A truncated at order r) at points of the flat.

    Along z = z0 + t v every remainder is an exact polynomial in t.  For
    |q| <= r its t-order must reach r - |q| + s + 1 for any ray; along
    rays inside the flat it must reach r + s - |q| + 1 for |q| <= r + s.
    """
    if check_flatness and vanishing_order(Q, flat) < s:
        raise InsufficientFlatness(f"Q vanishes to order {vanishing_order(Q, flat)} < s = {s} on the flat")
    n = Q.nvars
    top = r + s
    ks = multi_indices(n, top)
    dq = {p: Q.diff_multi(p) for p in ks}
    da = {j: A.diff_multi(j) for j in multi_indices(n, r)}

    def product_poly(k):
        # B_k = sum_{p <= k} C(k, p) D^p Q * a_{k-p}, with a_j = 0 beyond order r
        acc = SparsePoly.zero(n)
        for p in ks:
            if not _geq(k, p):
                continue
            j = _sub(k, p)
            if sum(j) > r:
                continue
            coef = math.prod(math.comb(a, b) for a, b in zip(k, p))
            acc = acc + (dq[p] * da[j]).scale(coef)
        return acc

    bpoly = {k: product_poly(k) for k in ks}
    report = Lemma1Report(r, s)
    tvar = SparsePoly.var(0, 1)
    plans = [(v, r, r + s + 1, False) for v in rays]
    plans += [(v, top, None, True) for v in (flat_rays or [])]
    for z0 in base_points:
        if not flat.contains(z0):
            raise ValueError(f"base point {z0} is not on the flat")
        bz0 = {k: bpoly[k].evaluate(z0) for k in ks}
        for v, qmax, _, inside in plans:
            for q in multi_indices(n, qmax):
                # (D^q B)_z(z) - (D^q B)_{z0}(z) along z = z0 + t v
                lhs = _restrict(bpoly[q], z0, v)
                rhs = SparsePoly.zero(1)
                for k in ks:
                    if _geq(k, q) and bz0[k] != 0:
                        d = _sub(k, q)
                        rhs = rhs + (tvar ** sum(d)).scale(fdiv(bz0[k] * _mpow(v, d), _mfact(d)))
                order = _t_order(lhs - rhs)
                need = (top - sum(q) + 1) if inside else (r - sum(q) + s + 1)
                row = {"z0": [str(c) for c in z0], "ray": [str(c) for c in v], "q": list(q),
                       "order": order if order != math.inf else "inf", "required": need}
                report.checks.append(row)
                if order < need:
                    report.violations.append(row)
    return report


@dataclass
class Lemma2Report:
    B: SparsePoly
    ratio: float
    norm_A: float
    norm_B: float


def lemma2_division_check(form, A, sample, r=1):
    """Divide A by a linear form vanishing set-wise on it; compare seminorms of the Taylor fields.

    Returns (B, report) where report.ratio = ||B||^{r-1} / ||A||^r on the sample.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    n = A.nvars
    lam = SparsePoly.linear(list(form))
    hyper = Flat.from_forms([list(form)], n)
    if not A.is_zero() and vanishing_order(A, hyper) < 1:
        raise NotDivisible(f"A does not vanish on the hyperplane of {list(form)}")
    B = divide_exact(A, lam)
    if lam * B != A:
        raise NotDivisible("A != lambda * B after division")
    pts = [_as_point(x) for x in sample]
    na = seminorm(taylor_field(A, pts, r), pts, r)
    nb = seminorm(taylor_field(B, pts, r - 1), pts, r - 1)
    ratio = float(nb) / float(na) if na else (math.inf if nb else 0.0)
    return B, Lemma2Report(B, ratio, float(na), float(nb))

