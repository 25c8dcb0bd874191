"""End-to-end acceptance criteria, one test per criterion."""

import math
import random
import time
from fractions import Fraction

from reflection_workbench.chevalley import (
    basic_invariants,
    degree_in_last,
    gradient_from_rewrite,
    gradient_system,
    jacobian_factorization,
    orbit_separation_check,
    random_invariant,
    rewrite_invariant,
)
from reflection_workbench.coxeter import build_group
from reflection_workbench.errors import NotDivisible
from reflection_workbench.polyalg import SparsePoly, compose, divide_exact, random_poly
from reflection_workbench.strata import intersection_lattice, minor_flatness_check, monotonicity_check
from reflection_workbench.whitney import (
    counterexample_probe,
    lemma1_product_check,
    power_field,
    regularity_exponent,
    remainder,
    taylor_field,
)

BOOKKEEPING_GROUPS = ["A2", "A3", "B2", "B3", "B4", "D4", "I2(4)", "I2(6)", "H3"]
EXACT_GROUPS = ["A1"] + BOOKKEEPING_GROUPS
NUMERIC_GROUPS = ["I2(5)", "I2(7)"]

_invariants = {}


def chevalley(spec):
    if spec not in _invariants:
        _invariants[spec] = basic_invariants(spec)
    return _invariants[spec]


def test_criterion_1_degree_bookkeeping(criterion):
    t0 = time.perf_counter()
    bad = []
    for spec in BOOKKEEPING_GROUPS:
        C = chevalley(spec)
        if C.d != len(C.group.reflections) or C.d != sum(k - 1 for k in C.degrees) or C.h != 1 + C.d - C.s:
            bad.append(spec)
        if C.bookkeeping():
            bad.append(spec)
    H3 = chevalley("H3")
    h3 = (H3.d, H3.s, H3.h)
    elapsed = time.perf_counter() - t0
    ok = not bad and h3 == (15, 6, 10) and elapsed < 10
    criterion("1 degree bookkeeping", ok, f"H3 (d,s,h)={h3}, failures={bad}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_jacobian_factorization(criterion):
    t0 = time.perf_counter()
    bad = []
    for spec in EXACT_GROUPS:
        C = chevalley(spec)
        fac = jacobian_factorization(C)
        q = C.jacobian()
        try:
            for form in fac.factors:
                q = divide_exact(q, SparsePoly.linear(form))
        except NotDivisible:
            bad.append(spec)
            continue
        if q.degree != 0 or q.is_zero() or len(fac.factors) != C.d or q != SparsePoly.const(fac.c, C.n):
            bad.append(spec)
    B2 = jacobian_factorization(chevalley("B2"))
    b2_forms = sorted(SparsePoly.linear(f).to_str() for f in B2.factors)
    b2_ok = B2.c == -8 and b2_forms == sorted(["x", "y", "x - y", "x + y"])
    worst = 0.0
    rng = random.Random(2)
    for spec in NUMERIC_GROUPS:
        C = basic_invariants(spec)
        fac = jacobian_factorization(C)
        J = C.jacobian()
        lams = [SparsePoly.linear(f) for f in fac.factors]
        for _ in range(100):
            a = rng.uniform(0, 2 * math.pi)
            pt = (math.cos(a), math.sin(a))
            prod = fac.c * math.prod(float(l.evaluate(pt)) for l in lams)
            worst = max(worst, abs(float(J.evaluate(pt)) - prod))
    elapsed = time.perf_counter() - t0
    ok = not bad and b2_ok and worst <= 1e-9 and elapsed < 60
    criterion("2 jacobian factorization", ok,
              f"B2 c={B2.c} forms={b2_forms}, numeric max |J - c prod| = {worst:.1e}, failures={bad}, {elapsed:.1f}s")
    assert ok


def _invariant_suite():
    out = {}
    for spec in EXACT_GROUPS:
        G = chevalley(spec).group
        rng = random.Random(1000 + EXACT_GROUPS.index(spec))
        max_degree = 20 if spec == "A1" else 12
        out[spec] = [random_invariant(G, rng, max_degree) for _ in range(50)]
    return out


_suite = {}


def invariant_suite():
    if not _suite:
        _suite.update(_invariant_suite())
    return _suite


_rewrites = {}


def test_criterion_3_rewrite_round_trip(criterion):
    t0 = time.perf_counter()
    suite = invariant_suite()
    bad = []
    for spec, fs in suite.items():
        C = chevalley(spec)
        for f in fs:
            R = rewrite_invariant(C, f)
            _rewrites[(spec, id(f))] = R.F
            if compose(R.F, C.p) != f or degree_in_last(R.F) > max(f.degree, 0) // C.h:
                bad.append((spec, f.to_str()))
    elapsed = time.perf_counter() - t0
    n = sum(len(v) for v in suite.values())
    ok = not bad and elapsed < 120
    criterion("3 rewrite round trip", ok, f"{n} invariants over {len(suite)} groups, {len(bad)} failures, {elapsed:.1f}s")
    assert ok


def test_criterion_4_gradient_system(criterion):
    suite = invariant_suite()
    bad = []
    for spec, fs in suite.items():
        C = chevalley(spec)
        lams = [SparsePoly.linear(f) for f in jacobian_factorization(C).factors]
        for f in fs:
            F = _rewrites.get((spec, id(f))) or rewrite_invariant(C, f).F
            g, rhs = gradient_system(C, f, return_rhs=True)
            if g != gradient_from_rewrite(C, F):
                bad.append((spec, "route mismatch"))
            for r in rhs:
                for lam in lams:
                    try:
                        divide_exact(r, lam)
                    except NotDivisible:
                        bad.append((spec, "not divisible"))
    ok = not bad
    criterion("4 gradient system consistency", ok, f"{len(bad)} failures")
    assert ok


def test_criterion_5_stratification(criterion):
    counts = {}
    total = 0
    for spec in ["B2", "A3", "B3", "D4"]:
        C = chevalley(spec)
        L = intersection_lattice(C.group)
        fl = minor_flatness_check(C, L)
        mo = monotonicity_check(L)
        counts[spec] = (len(L.strata), len(fl.violations), len(mo.violations))
        total += len(fl.violations) + len(mo.violations)
    ok = total == 0
    criterion("5 stratification", ok, f"(flats, flatness violations, monotonicity violations) = {counts}")
    assert ok


def test_criterion_6_counterexample_exponents(criterion):
    t0 = time.perf_counter()
    a1 = counterexample_probe(basic_invariants("A1", power_sum_top=True), 1, 0.2)
    a1_slopes = [a1.rows[k].slope for k in range(4)]
    a1_ok = all(abs(a1_slopes[k] - (2.4 - k)) <= 0.05 for k in range(4)) and a1.verdict == "C² not C³"
    b2 = counterexample_probe(basic_invariants("B2", power_sum_top=True), 1, 0.2, [1, 1])
    b2_slope = b2.rows[5].slope
    b2_ok = abs(b2_slope + 0.2) <= 0.05 and b2.verdict == "C⁴ not C⁵"
    elapsed = time.perf_counter() - t0
    ok = a1_ok and b2_ok and elapsed < 30
    criterion("6 counterexample exponents", ok,
              f"A1 slopes {[round(s, 3) for s in a1_slopes]} '{a1.verdict}', "
              f"B2 k=5 slope {b2_slope:.3f} '{b2.verdict}', {elapsed:.1f}s")
    assert ok


def _taylor_zero_remainders(rng, cases=40):
    nonzero = 0
    for _ in range(cases):
        n = rng.randint(1, 3)
        f = random_poly(rng, n, 5, rng.randint(1, 5))
        m = max(f.degree, 0) + rng.randint(0, 2)
        pts = list({tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)) for _ in range(4)})
        A = taylor_field(f, pts, m)
        for a in pts:
            for b in pts:
                nonzero += sum(remainder(A, a, b, q) != 0 for q in A.coeffs[0])
    return nonzero


def _regularity_errors():
    ts = [10 ** (-3 + 2 * i / 24) for i in range(25)]
    worst = 0.0
    for gamma in (1.5, 2.5, 3.3, 4.7, 5.25):
        F = power_field(gamma, [0.0] + ts, int(gamma))
        for q in range(int(gamma) + 1):
            slope = regularity_exponent(F, [(0.0, t) for t in ts], q)
            worst = max(worst, abs(slope - (gamma - q)))
    return worst


def _lemma1_failures(spec, instances=20):
    C = chevalley(spec)
    G = C.group
    L = intersection_lattice(G)
    M = C.minors()
    rng = random.Random(3000 + EXACT_GROUPS.index(spec))
    bad = 0
    for _ in range(instances):
        stratum = rng.choice(L.strata[1:])
        Q = M[rng.randrange(C.n)][rng.randrange(C.n)]
        r = rng.randint(0, 2)
        A = random_poly(rng, G.n, r + 2, 3)
        base = [[0] * G.n, stratum.flat.point([rng.randint(-2, 2) for _ in range(stratum.flat.dim)])]
        rays = [[rng.randint(-3, 3) or 1 for _ in range(G.n)]]
        inside = [stratum.flat.direction[0]] if stratum.flat.dim else []
        bad += not lemma1_product_check(Q, A, stratum.flat, r, stratum.s_z, base, rays, inside).ok
    return bad


def test_criterion_7_whitney_machinery(criterion):
    nonzero = _taylor_zero_remainders(random.Random(77))
    worst = _regularity_errors()
    lemma_bad = {spec: _lemma1_failures(spec) for spec in EXACT_GROUPS}
    ok = nonzero == 0 and worst <= 0.02 and not any(lemma_bad.values())
    criterion("7 whitney machinery", ok,
              f"nonzero remainders={nonzero}, worst exponent error={worst:.4f}, "
              f"lemma1 failures={sum(lemma_bad.values())}/{20 * len(lemma_bad)}")
    assert ok


def _random_point(rng, n, exact):
    if exact:
        return tuple(Fraction(rng.randint(-12, 12), rng.randint(1, 5)) for _ in range(n))
    return tuple(rng.uniform(-2, 2) for _ in range(n))


def test_criterion_8_orbit_separation(criterion):
    mismatches = {}
    counts = {}
    for spec in EXACT_GROUPS + NUMERIC_GROUPS:
        C = chevalley(spec) if spec in EXACT_GROUPS else basic_invariants(spec)
        G = C.group
        elements = G.elements()
        rng = random.Random(8000 + len(counts))
        bad = same = 0
        for i in range(200):
            x = _random_point(rng, G.n, C.exact)
            if i % 2 == 0:
                # a point in the same orbit
                y = tuple(G.act(rng.choice(elements), x))
            elif i % 4 == 1:
                # a coordinate sign flip, which may or may not stay in the orbit
                y = tuple(-v if k == 0 else v for k, v in enumerate(x))
            else:
                y = _random_point(rng, G.n, C.exact)
            same_p, same_orbit = orbit_separation_check(C, x, y)
            same += same_orbit
            bad += same_p != same_orbit
        mismatches[spec] = bad
        counts[spec] = same
    ok = not any(mismatches.values())
    criterion("8 orbit separation", ok,
              f"200 pairs per group over {len(mismatches)} groups, mismatches={sum(mismatches.values())}")
    assert ok
