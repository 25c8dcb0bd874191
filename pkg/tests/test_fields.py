import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reflection_workbench.errors import FieldMismatch
from reflection_workbench.fields import (
    NUMERIC,
    RATIONAL,
    QuadExt,
    canon,
    coef_from_json,
    coef_to_json,
    fdiv,
    merge_tags,
    parse_scalar,
    sign,
)

TAU = QuadExt(Fraction(1, 2), Fraction(1, 2), 5)

rationals = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 1000)
quads = st.builds(lambda a, b: QuadExt(a, b, 5) if b else canon(a), rationals, rationals)


def test_golden_ratio_identity():
    assert TAU * TAU - TAU - 1 == 0
    assert TAU.inverse() == TAU - 1
    assert math.isclose(float(TAU), (1 + math.sqrt(5)) / 2)


def test_collapse_to_rational():
    s5 = QuadExt.sqrt(5)
    assert s5 * s5 == 5
    assert isinstance(s5 * s5, int)
    assert (s5 + 1) - s5 == 1


def test_exact_sign():
    assert QuadExt(-2, 1, 5).sign() == 1  # sqrt5 > 2
    assert QuadExt(3, -1, 5).sign() == 1
    assert QuadExt(2, -1, 5).sign() == -1
    assert sign(QuadExt(0, 0, 5)) == 0


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        QuadExt(0, 1, 5) + QuadExt(0, 1, 3)
    with pytest.raises(FieldMismatch):
        merge_tags(("QuadExt", 5), ("QuadExt", 3))
    assert merge_tags(RATIONAL, ("QuadExt", 5)) == ("QuadExt", 5)
    assert merge_tags(("QuadExt", 5), NUMERIC) == NUMERIC


def test_float_mixing_is_numeric():
    assert isinstance(TAU * 1.0, float)


def test_fdiv_keeps_rationals_exact():
    assert fdiv(1, 3) == Fraction(1, 3)
    assert fdiv(6, 3) == 2 and isinstance(fdiv(6, 3), int)


def test_json_round_trip():
    for c in (3, Fraction(-1, 2), TAU, 0.25):
        assert coef_from_json(coef_to_json(c)) == c
    assert coef_to_json(Fraction(-1, 2)) == "-1/2"


def test_parse_scalar():
    assert parse_scalar("-1/2") == Fraction(-1, 2)
    assert parse_scalar("4") == 4
    assert isinstance(parse_scalar("0.5"), float)


@given(quads, quads, quads)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if b != 0:
        assert (a / b) * b == a


@given(quads)
def test_norm_multiplicative(a):
    if isinstance(a, QuadExt):
        assert (a * a.conjugate()) == a.norm()
        assert math.isclose(float(a) * float(a.conjugate()), float(a.norm()), rel_tol=1e-9, abs_tol=1e-9)


@given(quads, quads)
def test_sign_matches_float(a, b):
    d = a - b
    f = float(d)
    if abs(f) > 1e-9:
        assert sign(d) == (1 if f > 0 else -1)
