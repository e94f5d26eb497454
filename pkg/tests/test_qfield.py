import random
from fractions import Fraction

import pytest

from padicrtf.laurent import Laurent, ONE
from padicrtf.qfield import (
    EElement,
    FieldSpec,
    INF,
    reduce_mod_pk,
    solve_norm_minus_one,
    vp,
)


F3 = FieldSpec(3, -1)
F5 = FieldSpec(5, 2)
F7 = FieldSpec(7, -1)
FIELDS = [F3, F5, F7]


def rand_e(field, rng, val_range=(-2, 2)):
    p = field.p
    while True:
        a = Fraction(rng.randint(-9, 9), rng.randint(1, 9)) * Fraction(p) ** rng.randint(*val_range)
        b = Fraction(rng.randint(-9, 9), rng.randint(1, 9)) * Fraction(p) ** rng.randint(*val_range)
        x = field.e(a, b)
        if not x.is_zero():
            return x


def test_val_basics():
    assert F3.val(F3.e(3)) == 1
    assert F3.val(F3.e(1, 1)) == 0  # norm(1+r) = 1 - (-1) = 2, a unit
    assert F3.val(F3.e(0)) == INF
    assert F3.val(Fraction(1, 9)) == -2


def test_norm_conj():
    x = F3.e(1, 1)
    assert x.norm() == 2
    assert F3.e(3).norm() == 9
    rng = random.Random(1)
    for _ in range(50):
        x = rand_e(F3, rng)
        assert x.conj().conj() == x
        assert x.norm() == (x * x.conj()).a
        assert (x * x.conj()).b == 0


def test_multiplicativity():
    rng = random.Random(2)
    for field in FIELDS:
        chi = field.char_chi()
        for _ in range(200):
            x, y = rand_e(field, rng), rand_e(field, rng)
            assert field.val(x * y) == field.val(x) + field.val(y)
            assert (x * y).norm() == x.norm() * y.norm()
            assert field.eval_char(chi, x * y) == field.eval_char(chi, x) * field.eval_char(chi, y)


def test_galois_compatible():
    rng = random.Random(3)
    eta_t = F3.char_eta_tilde()
    for _ in range(100):
        x = rand_e(F3, rng)
        assert F3.val(x.conj()) == F3.val(x)
        assert F3.eval_char(eta_t, x.conj()) == F3.eval_char(eta_t, x)


def test_eval_char_examples():
    eta = F3.char_eta()
    assert F3.eval_char(eta, 3) == Laurent.rational(-1)
    assert F3.eval_char(eta, Fraction(1, 9)) == ONE
    chi = F3.char_chi()
    assert F3.eval_char(chi, 9) == Laurent.symbol("c", 2)
    with pytest.raises(ZeroDivisionError):
        F3.eval_char(eta, 0)


def test_field_division():
    rng = random.Random(4)
    for _ in range(50):
        x = rand_e(F5, rng)
        y = rand_e(F5, rng)
        assert (x / y) * y == x
        assert x * x.inv() == F5.e(1)


def test_norm_class():
    assert F3.is_norm_class(2) is True
    assert F3.is_norm_class(3) is False
    framified = FieldSpec(3, -1, eps=3)
    assert framified.is_norm_class(3, eps_twist=True) is True
    assert framified.eps_is_split() is False
    assert F3.eps_is_split() is True


def test_norm_class_matches_hensel_witness():
    rng = random.Random(5)
    for field in FIELDS:
        hits = 0
        for _ in range(50):
            x = Fraction(rng.randint(1, 40), rng.randint(1, 40)) * Fraction(field.p) ** rng.randint(-2, 2)
            w = field.norm_witness(x, precision=8)
            if field.is_norm_class(x):
                assert w is not None
                a, b = w
                # witness solves the norm equation to the stated precision
                assert vp(a * a - field.u * b * b - x, field.p) >= vp(x, field.p) + 6
                hits += 1
            else:
                assert w is None
        assert hits > 0


def test_solve_norm_minus_one():
    for field in FIELDS:
        d = solve_norm_minus_one(field, precision=10)
        assert field.val(d) == 0
        assert vp(d.norm() + 1, field.p) >= 10


def test_reduce_mod_pk():
    assert reduce_mod_pk(Fraction(1, 2), 3, 2) == 5  # 1/2 = 5 mod 9
    assert reduce_mod_pk(Fraction(10), 3, 2) == 1
    assert reduce_mod_pk(Fraction(1, 3), 3, 1) == Fraction(1, 3)
    r = reduce_mod_pk(Fraction(7, 15), 3, 3)
    assert vp(Fraction(7, 15) - r, 3) >= 3


def test_parse_roundtrip():
    x = F3.parse("1/2+3*r")
    assert x == F3.e(Fraction(1, 2), 3)
    assert F3.parse("-2") == F3.e(-2)
    assert F3.parse("1+1i") == F3.e(1, 1)
    assert F3.parse("-r") == F3.e(0, -1)
    assert F3.parse(["1/2", "-3"]) == F3.e(Fraction(1, 2), -3)


def test_fieldspec_validation():
    with pytest.raises(ValueError):
        FieldSpec(4, -1)
    with pytest.raises(ValueError):
        FieldSpec(5, -1)  # -1 is a square mod 5
    with pytest.raises(ValueError):
        FieldSpec(3, 3)  # not a unit
    spec = FieldSpec.from_json({"p": 3, "u": "-1", "eps": "1"})
    assert spec.p == 3 and spec.u == -1 and spec.eps == 1
    assert spec.to_json() == {"p": 3, "u": "-1", "eps": "1"}
