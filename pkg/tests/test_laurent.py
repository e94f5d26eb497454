from fractions import Fraction

import pytest

from padicrtf.laurent import Laurent, ONE, ZERO, laurent_from_string_parts, serialize_laurent


def test_ring_ops():
    c = Laurent.symbol("c")
    x = 2 * c + 1
    y = c ** -1 - 3
    assert (x * y) == 2 + c ** -1 - 6 * c - 3
    assert x - x == ZERO
    assert (c ** 3) * (c ** -3) == ONE


def test_pow_nonmonomial_negative():
    c = Laurent.symbol("c")
    with pytest.raises(ValueError):
        (c + 1) ** -1


def test_substitute_and_specialize():
    c = Laurent.symbol("c")
    t = Laurent.symbol("t")
    v = 3 * c ** 2 * t - c ** -1
    assert v.specialize_c(1) == 3 * t - 1
    assert v.specialize_c(-1) == 3 * t + 1
    assert v.substitute({"t": Laurent.rational(2)}) == 6 * c ** 2 - c ** -1


def test_reduce_square():
    t = Laurent.symbol("t")
    v = t ** 4 + t ** 3 + 1
    r = v.reduce_square("t", 9)
    assert r == 81 + 9 * t + 1


def test_serialize_roundtrip():
    c = Laurent.symbol("c")
    e = Laurent.symbol("e0")
    v = Fraction(1, 2) * c ** 2 * e ** -1 + 7
    d = serialize_laurent(v)
    assert laurent_from_string_parts(d) == v
    assert serialize_laurent(ZERO) == {}


def test_str():
    c = Laurent.symbol("c")
    assert str(ZERO) == "0"
    assert str(2 * c ** -2 + 1) in ("1 + 2*c^-2", "2*c^-2 + 1")
