import random
from fractions import Fraction

import pytest

from reflection_workbench.chevalley import (
    ChevalleyMap,
    basic_invariants,
    degree_in_last,
    discriminant,
    gradient_from_rewrite,
    gradient_system,
    is_invariant,
    jacobian_factorization,
    orbit_separation_check,
    random_invariant,
    reynolds,
    rewrite_invariant,
    weighted_derivative_orders,
)
from reflection_workbench.coxeter import build_group
from reflection_workbench.errors import (
    DivisibilityFailure,
    FactorizationFailure,
    NotInvariant,
    RewriteInconsistent,
)
from reflection_workbench.fields import coef_from_json
from reflection_workbench.polyalg import SparsePoly, compose

x, y = SparsePoly.var(0, 2), SparsePoly.var(1, 2)
t = SparsePoly.var(0, 1)
u1, u2 = SparsePoly.var(0, 2), SparsePoly.var(1, 2)

EXACT = ["A1", "A2", "A3", "B2", "B3", "B4", "D4", "I2(4)", "I2(6)", "H3"]


def test_b2_basis():
    C = basic_invariants("B2")
    assert C.p == [x**2 + y**2, x**4 + y**4]
    assert (C.degrees, C.d, C.s_j, C.s, C.h) == ((2, 4), 4, (3, 1), 1, 4)


def test_a1_and_h3_bookkeeping():
    C = basic_invariants("A1")
    assert C.p == [t**2] and C.degrees == (2,) and C.d == 1 and C.h == 2
    H = basic_invariants("H3")
    assert (H.degrees, H.d, H.s, H.h) == ((2, 6, 10), 15, 6, 10)


def test_d4_basis_order():
    C = basic_invariants("D4")
    assert C.degrees == (2, 4, 4, 6)
    xs = [SparsePoly.var(i, 4) for i in range(4)]
    assert C.p[1] == sum((v**4 for v in xs[1:]), xs[0] ** 4)
    assert C.p[2] == xs[0] * xs[1] * xs[2] * xs[3]
    assert C.p[3] == sum((v**6 for v in xs[1:]), xs[0] ** 6)


@pytest.mark.parametrize("spec", EXACT + ["I2(5)", "I2(7)"])
def test_basis_is_invariant_and_bookkept(spec):
    C = basic_invariants(spec)
    assert all(is_invariant(C.group, p) for p in C.p)
    assert all(p.is_homogeneous() for p in C.p)
    assert C.bookkeeping() == []


def test_reynolds_examples():
    A1 = build_group("A1")
    assert reynolds(A1, t).is_zero()
    assert reynolds(A1, t**2) == t**2
    B2 = build_group("B2")
    assert reynolds(B2, x**4) == (x**4 + y**4).scale(Fraction(1, 2))


def test_reynolds_idempotent_h3():
    G = build_group("H3")
    f = random_invariant(G, random.Random(5), 6)
    assert reynolds(G, f) == f


def test_jacobian_examples():
    fac = jacobian_factorization(basic_invariants("B2"))
    assert fac.c == -8
    assert fac.J == 8 * x * y**3 - 8 * x**3 * y
    assert sorted(map(tuple, fac.factors)) == sorted([(1, 0), (0, 1), (1, -1), (1, 1)])
    fac = jacobian_factorization(basic_invariants("A1"))
    assert fac.c == 2 and fac.J == 2 * t


def test_h3_jacobian_constant_golden(golden):
    fac = jacobian_factorization(basic_invariants("H3"))
    assert len(fac.factors) == 15
    assert fac.c == coef_from_json(golden("h3_jacobian_constant.json")["c"])


@pytest.mark.parametrize("spec", ["I2(5)", "I2(7)"])
def test_numeric_jacobian_pointwise(spec):
    fac = jacobian_factorization(basic_invariants(spec))
    assert not fac.exact and fac.n_points == 100
    assert fac.max_residual <= 1e-9


def test_bad_basis_is_detected():
    G = build_group("B2")
    p = [x**2 + y**2, (x**2 + y**2) ** 2]
    C = ChevalleyMap(G, p, (2, 4), 4, (3, 1), 1, 4)
    with pytest.raises(FactorizationFailure):
        jacobian_factorization(C)
    with pytest.raises(RewriteInconsistent):
        rewrite_invariant(C, x**4 + y**4)


def test_rewrite_examples():
    C = basic_invariants("B2")
    assert rewrite_invariant(C, x**4 + y**4).F == u2
    assert rewrite_invariant(C, x**2 * y**2).F == (u1**2 - u2).scale(Fraction(1, 2))
    A1 = basic_invariants("A1")
    R = rewrite_invariant(A1, t**6)
    assert R.F == t**3 and degree_in_last(R.F) == 3 == 6 // A1.h
    with pytest.raises(NotInvariant):
        rewrite_invariant(C, x**2)


def test_discriminant_examples():
    A1 = basic_invariants("A1")
    assert discriminant(A1) == 4 * t
    C = basic_invariants("B2")
    delta = discriminant(C)
    assert compose(delta, C.p) == (C.jacobian()) ** 2
    # on a mirror the discriminant vanishes
    assert delta.evaluate(C.evaluate((1, 1))) == 0
    assert delta.evaluate(C.evaluate((1, 2))) != 0


def test_gradient_examples():
    A1 = basic_invariants("A1")
    assert gradient_system(A1, t**4) == [2 * t**2]
    C = basic_invariants("B2")
    assert gradient_system(C, x**4 + y**4) == [SparsePoly.zero(2), SparsePoly.const(1, 2)]
    g = gradient_system(C, x**2 * y**2)
    assert g == [x**2 + y**2, SparsePoly.const(Fraction(-1, 2), 2)]


def test_gradient_rejects_non_invariant():
    C = basic_invariants("B2")
    with pytest.raises(DivisibilityFailure):
        gradient_system(C, x**3 * y)


@pytest.mark.parametrize("spec", EXACT)
def test_rewrite_and_gradient_property(spec):
    C = basic_invariants(spec)
    rng = random.Random(11)
    jac = C.jacobian_matrix()
    for _ in range(6):
        f = random_invariant(C.group, rng, 8)
        R = rewrite_invariant(C, f)
        assert compose(R.F, C.p) == f
        assert R.weighted_degree <= f.degree
        assert degree_in_last(R.F) <= f.degree // C.h
        g = gradient_system(C, f)
        assert g == gradient_from_rewrite(C, R.F)
        for i in range(C.group.n):
            lhs = sum((jac[j][i] * g[j] for j in range(C.n)), SparsePoly.zero(C.group.n))
            assert lhs == f.diff(i)


def test_orbit_separation_examples():
    C = basic_invariants("B2")
    assert orbit_separation_check(C, (1, 2), (-2, 1)) == (True, True)
    assert orbit_separation_check(C, (1, 2), (1, 3)) == (False, False)
    assert orbit_separation_check(C, (3, 5), (3, 5)) == (True, True)


def test_weighted_orders():
    C = basic_invariants("B2")
    assert weighted_derivative_orders(C, (1, 0)) == 2
    assert weighted_derivative_orders(C, (0, 1)) == 4
    assert weighted_derivative_orders(basic_invariants("H3"), (1, 1, 1)) == 18


def test_power_sum_top_flag():
    C = basic_invariants("I2(6)", power_sum_top=True)
    top = C.p[-1]
    assert all(is_invariant(C.group, p) for p in C.p)
    # positive away from the origin: sample the unit circle
    import math

    for j in range(24):
        a = 2 * math.pi * j / 24
        assert top.to_float().evaluate((math.cos(a), math.sin(a))) > 0
    # D_n already uses the power sum on top
    assert basic_invariants("D4", power_sum_top=True).p == basic_invariants("D4").p
