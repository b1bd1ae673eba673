import mpmath
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from chromalab.precision import (
    certified_floor,
    real_from_json,
    real_json,
    working_precision,
)


def test_certified_floor_plain_value():
    res = certified_floor(lambda: mpf("2.5"))
    assert res.value == 2 and not res.ambiguous


def test_certified_floor_just_below_integer():
    # 3 - 2^-80: certified floor must see through double-precision fog
    res = certified_floor(lambda: mpf(3) - mpf(2) ** -80)
    assert res.value == 2 and not res.ambiguous


def test_certified_floor_just_above_integer():
    res = certified_floor(lambda: mpf(3) + mpf(2) ** -80)
    assert res.value == 3 and not res.ambiguous


def test_certified_floor_exact_integer_is_ambiguous():
    res = certified_floor(lambda: mpf(7))
    assert res.ambiguous
    assert res.candidates == (6, 7) or res.candidates == (7, 8)


@given(st.floats(min_value=-1e6, max_value=1e6,
                 allow_nan=False, allow_infinity=False))
@settings(max_examples=100)
def test_certified_floor_matches_math_floor_generic(v):
    res = certified_floor(lambda: mpf(v))
    if not res.ambiguous:
        assert res.value == int(mpmath.floor(mpf(v)))


def test_real_json_roundtrip():
    with working_precision():
        x = mpf(2) ** mpf("0.5") * 1000
    d = real_json(x)
    assert set(d) == {"dec", "hex"}
    back = real_from_json(d)
    assert abs(back - x) < mpf(10) ** -28


def test_working_precision_restores_context():
    before = mpmath.mp.dps
    with working_precision(30):
        assert mpmath.mp.dps >= 80
    assert mpmath.mp.dps == before
