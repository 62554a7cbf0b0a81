import random
from fractions import Fraction

import pytest

from padicdendro import (
    FieldMismatchError,
    FieldSpec,
    INF,
    IndeterminateError,
    InputError,
    PadicNumber,
    ProjPoint,
    format_scalar,
    parse_scalar,
    val,
)
from conftest import F4, Q2, Q3, random_exact_number


def n2(x) -> PadicNumber:
    return PadicNumber.from_int(Q2, x)


def test_valuation_examples():
    assert val(n2(64)) == 6
    assert val(PadicNumber.zero(Q2)) == INF
    assert val(n2(3) - n2(1)) == 1


def test_addition_examples():
    assert (n2(4) + n2(16)).equals(n2(20))
    x = random_exact_number(random.Random(7), Q2)
    assert (x + PadicNumber.zero(Q2)).equals(x)
    diff = n2(12) - n2(4)
    assert diff.equals(n2(8))
    assert val(diff) == 3


def test_division_examples():
    x = n2(12)
    assert (x / x).equals(PadicNumber.one(Q2))
    half = PadicNumber.one(Q2) / n2(2)
    assert half.exact
    assert half.v0 == -1 and half.digits == (1,)
    third = PadicNumber.one(Q2) / n2(3)
    assert not third.exact
    assert len(third.digits) == Q2.precision
    # the digits really are an inverse of 3 modulo 2^precision
    approx = sum(d << k for k, d in enumerate(third.digits))
    assert (approx * 3) % (1 << Q2.precision) == 1
    # internally the quotient is still exact
    assert (third * n2(3)).equals(PadicNumber.one(Q2))


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        n2(1) / PadicNumber.zero(Q2)


def test_val_products_and_sums():
    rng = random.Random(11)
    for _ in range(200):
        x = random_exact_number(rng, Q2)
        y = random_exact_number(rng, Q2)
        assert val(x * y) == val(x) + val(y)
        s = x + y
        if not s.is_zero():
            assert val(s) >= min(val(x), val(y))
        if val(x) != val(y):
            assert val(s) == min(val(x), val(y))


def test_ultrametric_inequality():
    rng = random.Random(13)
    for field in (Q2, Q3, F4):
        for _ in range(100):
            x, y, z = (random_exact_number(rng, field) for _ in range(3))
            dxy = (x - y).valuation()
            dxz = (x - z).valuation()
            dzy = (z - y).valuation()
            assert dxy >= min(dxz, dzy)


def test_extension_field_arithmetic():
    w = PadicNumber(F4, [2])
    one = PadicNumber.one(F4)
    # the residue generator lifts to a cube root of unity: w^2 = -1 - w
    assert (w * w).equals(-(one + w))
    assert (w * w * w).equals(one)
    assert not (w * w).exact
    assert (w * w).digits[:3] == (3, 3, 3)
    assert val(w) == 0 and val(w * PadicNumber.from_int(F4, 2)) == 1


def test_negative_integers_are_exact_values_with_truncated_digits():
    minus_two = n2(-2)
    assert not minus_two.exact
    assert val(minus_two) == 1
    assert minus_two.digits == (1,) * Q2.precision
    assert minus_two.equals(n2(0) - n2(2))
    assert (minus_two + n2(2)).is_zero()


def test_from_digit_positions():
    x = PadicNumber.from_digit_positions(Q2, {0: 1, 2: 1, 5: 1})
    assert x.equals(n2(1 + 4 + 32))
    assert PadicNumber.from_digit_positions(Q2, {}).is_zero()


def test_zero_is_canonical():
    z = PadicNumber(Q2, [0, 0, 0], v0=4)
    assert z.is_zero() and z.digits == () and z.v0 == 0 and z.exact


def test_leading_digit_nonzero_after_arithmetic():
    rng = random.Random(17)
    for _ in range(100):
        x = random_exact_number(rng, Q3)
        y = random_exact_number(rng, Q3)
        s = x - y
        if not s.is_zero():
            assert s.digits[0] != 0


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        n2(1) + PadicNumber.from_int(Q3, 1)
    assert not n2(1).equals(PadicNumber.from_int(Q3, 1))


def test_truncated_equality_semantics():
    t1 = parse_scalar("2^1:0:1,1~", Q2).finite()
    t2 = parse_scalar("2^1:0:1,1~", Q2).finite()
    with pytest.raises(IndeterminateError):
        t1.equals(t2)
    t3 = parse_scalar("2^1:0:1,0~", Q2).finite()
    assert t1.equals(t3) is False
    exact_three = n2(3)
    with pytest.raises(IndeterminateError):
        t1.equals(exact_three)  # 3 = 1 + 2 agrees on both known digits
    assert t1.equals(n2(2)) is False  # valuations differ
    assert t1.equals(PadicNumber.zero(Q2)) is False


def test_truncated_arithmetic_tracks_precision():
    t = parse_scalar("2^1:0:1,0,1~", Q2).finite()  # known below index 3
    s = t * n2(4)
    assert not s.exact
    assert s.v0 == 2 and len(s.digits) == 3
    with pytest.raises(IndeterminateError):
        _ = t - t  # all shared digits cancel
    u = t + n2(2)  # flips the index-1 digit, still truncated
    assert not u.exact and u.digits == (1, 1, 1)
    q = n2(1) / t
    assert not q.exact and q.v0 == 0 and len(q.digits) == 3


def test_truncated_all_zero_rejected():
    with pytest.raises(IndeterminateError):
        PadicNumber(Q2, [0, 0], v0=0, exact=False)


def test_scalar_format_round_trips():
    samples = [
        "inf",
        "2^1:0:",
        "2^1:6:1",
        "2^1:-1:1",
        "2^1:2:1,0,1",
        "2^1:0:1,1~",
    ]
    for text in samples:
        point = parse_scalar(text, Q2)
        assert format_scalar(point) == text
    w_text = "2^2:0:2,3"
    assert format_scalar(parse_scalar(w_text, F4)) == w_text


def test_scalar_literal_conveniences():
    assert parse_scalar("20", Q2).finite().equals(n2(20))
    assert parse_scalar("1/2", Q2).finite().equals(PadicNumber.one(Q2) / n2(2))
    assert parse_scalar("inf", Q2).is_infinity


def test_scalar_parse_errors():
    for bad in ["", "2^2:0:1", "2^1:x:1", "2^1:0:9", "a:b", "1/0"]:
        with pytest.raises(InputError):
            parse_scalar(bad, Q2)


def test_exact_expansion_longer_than_precision_is_allowed():
    big = PadicNumber.from_int(Q2, (1 << 100) + 1)
    assert big.exact and len(big.digits) == 101


def test_projpoint_equality():
    assert ProjPoint.infinity().equals(ProjPoint.infinity())
    assert not ProjPoint.infinity().equals(ProjPoint.from_int(Q2, 0))
    assert ProjPoint.from_int(Q2, 5).equals(ProjPoint.from_int(Q2, 5))
    with pytest.raises(InputError):
        ProjPoint.infinity().finite()


def test_as_fraction():
    assert n2(-7).as_fraction() == Fraction(-7)
    with pytest.raises(IndeterminateError):
        parse_scalar("2^1:0:1~", Q2).finite().as_fraction()
