"""Deterministic property suites behind ``workbench selftest``.

Each suite returns (results, violations).  Results hold only seed-determined
data, so two runs with the same seed give identical reports.
"""

from __future__ import annotations

import math
import random

from .chevalley import (
    basic_invariants,
    gradient_from_rewrite,
    gradient_system,
    jacobian_factorization,
    random_invariant,
    rewrite_invariant,
)
from .coxeter import build_group, classify
from .fields import QuadExt
from .polyalg import (
    SparsePoly,
    compose,
    determinant,
    divide_exact,
    divide_with_remainder,
    random_poly,
)
from .strata import intersection_lattice, isotropy_types_by_codim, minor_flatness_check, monotonicity_check
from .whitney import counterexample_probe, remainder, seminorm, taylor_field

SUITES = ("algebra", "groups", "strata", "whitney")
SUITE_GROUPS = ("A1", "A2", "A3", "B2", "B3", "D4", "I2(6)", "H3")


def _record(results, violations, name, ok, detail=None):
    results[name] = "pass" if ok else "fail"
    if not ok:
        violations.append({"check": name, "detail": detail})


def suite_algebra(seed, cases=25):
    rng = random.Random(seed)
    results, violations = {}, []
    bad = {"ring": 0, "division": 0, "exact_division": 0, "compose": 0, "determinant": 0, "quadext": 0}
    for _ in range(cases):
        n = rng.randint(1, 3)
        f, g, h = (random_poly(rng, n, 4, rng.randint(1, 4)) for _ in range(3))
        if (f + g) * h != f * h + g * h or (f * g) * h != f * (g * h) or f * g != g * f or f - f != SparsePoly.zero(n):
            bad["ring"] += 1
        if not g.is_zero():
            qs, rem = divide_with_remainder(f, g)
            if qs * g + rem != f:
                bad["division"] += 1
            if divide_exact(f * g, g) != f:
                bad["exact_division"] += 1
        x = [SparsePoly.var(i, n) for i in range(n)]
        if compose(f, x) != f:
            bad["compose"] += 1
        m = [[random_poly(rng, n, 2, 2) for _ in range(3)] for _ in range(3)]
        if determinant(m, "cofactor") != determinant(m, "bareiss"):
            bad["determinant"] += 1
        a = QuadExt(rng.randint(-5, 5), rng.randint(1, 5), 5)
        if a * a.inverse() != 1 or (a + 1) * (a - 1) != a * a - 1:
            bad["quadext"] += 1
    for name, count in bad.items():
        _record(results, violations, name, count == 0, f"{count} failing cases")
    results["cases"] = cases
    return results, violations


def suite_groups(seed, invariants_per_group=5):
    rng = random.Random(seed)
    results, violations = {}, []
    for spec in SUITE_GROUPS:
        G = build_group(spec)
        C = basic_invariants(G)
        out = {
            "order": len(G.elements()),
            "reflections": len(G.reflections),
            "degrees": list(C.degrees),
            "d_s_h": [C.d, C.s, C.h],
        }
        ok = out["order"] == math.prod(C.degrees) and not C.bookkeeping()
        ok = ok and [str(t) for t in classify(G.coxeter_graph())] == [str(G.spec.canonical())]
        fac = jacobian_factorization(C)
        out["c"] = str(fac.c)
        round_trips = 0
        for _ in range(invariants_per_group):
            f = random_invariant(G, rng, 8)
            R = rewrite_invariant(C, f)
            if compose(R.F, C.p) == f and gradient_system(C, f) == gradient_from_rewrite(C, R.F):
                round_trips += 1
        out["round_trips"] = f"{round_trips}/{invariants_per_group}"
        ok = ok and round_trips == invariants_per_group
        results[spec] = out
        _record(results, violations, f"{spec}_consistent", ok, out)
    return results, violations


def suite_strata(seed):
    results, violations = {}, []
    expected = {"A1": 2, "A2": 5, "B2": 6, "A3": 15, "B3": 24}
    for spec in ("A1", "A2", "B2", "A3", "B3", "D4"):
        G = build_group(spec)
        C = basic_invariants(G)
        L = intersection_lattice(G)
        fl = minor_flatness_check(C, L)
        mo = monotonicity_check(L)
        origin = L.strata[-1]
        results[spec] = {
            "flats": len(L.strata),
            "types": {str(p): v for p, v in isotropy_types_by_codim(L).items()},
            "flatness_violations": len(fl.violations),
            "monotonicity_violations": len(mo.violations),
        }
        ok = fl.ok and mo.ok and (origin.d_z, origin.s_z, origin.h_z) == (C.d, C.s, C.h)
        if spec in expected:
            ok = ok and len(L.strata) == expected[spec]
        _record(results, violations, f"{spec}_lattice", ok, results[spec])
    results["seed"] = seed
    return results, violations


def suite_whitney(seed, cases=10):
    rng = random.Random(seed)
    results, violations = {}, []
    nonzero = 0
    for _ in range(cases):
        n = rng.randint(1, 2)
        deg = rng.randint(0, 3)
        f = random_poly(rng, n, deg, 3)
        m = max(f.degree, 0)
        pts = [tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(3)]
        pts = list(dict.fromkeys(pts))
        A = taylor_field(f, pts, m)
        for x in pts:
            for y in pts:
                for q in A.coeffs[0]:
                    if remainder(A, x, y, q) != 0:
                        nonzero += 1
    _record(results, violations, "taylor_exact", nonzero == 0, f"{nonzero} nonzero remainders")
    x = SparsePoly.var(0, 1)
    val = seminorm(taylor_field(x ** 2, [-1, 0, 1], 1), [-1, 0, 1], 1, 1)
    results["seminorm_x2"] = str(val)
    _record(results, violations, "seminorm_x2", val == 6, str(val))
    for spec, ray, k_check, want in (("A1", None, 3, -0.6), ("B2", [1, 1], 5, -0.2)):
        rep = counterexample_probe(basic_invariants(spec, power_sum_top=True), 1, 0.2, ray)
        slope = rep.rows[k_check].slope
        results[f"probe_{spec}"] = {"verdict": rep.verdict, "slope": round(slope, 6)}
        _record(results, violations, f"probe_{spec}", rep.slope_law_ok and abs(slope - want) <= 0.05, results[f"probe_{spec}"])
    return results, violations


def run_suite(name, seed):
    fn = {"algebra": suite_algebra, "groups": suite_groups, "strata": suite_strata, "whitney": suite_whitney}[name]
    return fn(seed)


def run_selftest(suite="all", seed=0):
    names = SUITES if suite == "all" else (suite,)
    results, violations = {}, []
    for name in names:
        r, v = run_suite(name, seed)
        results[name] = r
        violations.extend({"suite": name, **item} for item in v)
    return results, violations
