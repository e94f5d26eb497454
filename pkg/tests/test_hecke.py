import random
from fractions import Fraction

import pytest

from padicrtf.hecke import (
    HeckeElement,
    bc,
    chi_convolution,
    constant_term,
    convolve,
    dagger,
    dual_lambda,
    dual_twist,
    hecke_from_json,
    pm_split,
    satake,
    satake_tensor,
)
from padicrtf.laurent import Laurent, ONE, ZERO
from padicrtf.qfield import FieldSpec

F3 = FieldSpec(3, -1)
C = Laurent.symbol("c")


def T(lam, tag="F"):
    return HeckeElement.basis(tag, lam)


def rand_elt(rng, m, tag="F", radius=2):
    d = {}
    for _ in range(rng.randint(1, 3)):
        lam = sorted((rng.randint(-radius, radius) for _ in range(m)), reverse=True)
        d[tuple(lam)] = Laurent.rational(rng.randint(-3, 3))
    return HeckeElement.make(tag, m, d)


def test_unit_is_identity():
    one = HeckeElement.unit("F", 2)
    f = T((2, -1)) + T((1, 1)).scale(3)
    assert convolve(F3, one, f).as_dict() == f.as_dict()
    assert convolve(F3, f, one).as_dict() == f.as_dict()


def test_gl1_group_algebra():
    a, b = T((2,)), T((-3,))
    assert convolve(F3, a, b).as_dict() == T((-1,)).as_dict()


def test_convolution_table_m2():
    # T_(1,0)^2 = T_(2,0) + (q+1) T_(1,1)
    f = T((1, 0))
    sq = convolve(F3, f, f)
    assert sq.coeff((2, 0)) == ONE
    assert sq.coeff((1, 1)) == Laurent.rational(4)
    # over E the residue field has q^2 elements
    fe = T((1, 0), tag="E")
    sqe = convolve(F3, fe, fe)
    assert sqe.coeff((1, 1)) == Laurent.rational(10)


def test_satake_m1_m2_table():
    t = Laurent.symbol("t")
    X1, X2 = Laurent.symbol("X1"), Laurent.symbol("X2")
    assert satake(F3, T((3,), tag="F").scale(2)) == 2 * X1 ** 3
    assert satake(F3, HeckeElement.unit("F", 2)) == ONE
    assert satake(F3, T((1, 0))) == t * (X1 + X2)
    assert satake(F3, T((1, 1))) == X1 * X2
    # S(T_(2,0)) = q(X1^2+X2^2) + (q-1) X1X2
    assert satake(F3, T((2, 0))) == 3 * (X1 ** 2 + X2 ** 2) + 2 * X1 * X2


def test_satake_homomorphism_random():
    rng = random.Random(31)
    for m in (1, 2):
        for _ in range(30):
            f, g = rand_elt(rng, m), rand_elt(rng, m)
            lhs = satake(F3, convolve(F3, f, g))
            rhs = (satake(F3, f) * satake(F3, g)).reduce_square("t", 3)
            assert lhs == rhs


def test_satake_homomorphism_e_side():
    rng = random.Random(32)
    for _ in range(5):
        f, g = rand_elt(rng, 2, tag="E", radius=1), rand_elt(rng, 2, tag="E", radius=1)
        lhs = satake(F3, convolve(F3, f, g))
        rhs = (satake(F3, f) * satake(F3, g)).reduce_square("t", 9)
        assert lhs == rhs


def test_satake_injective_on_window():
    rng = random.Random(33)
    seen = {}
    for _ in range(40):
        f = rand_elt(rng, 2)
        s = satake(F3, f)
        key = tuple(sorted((k, str(v)) for k, v in s.terms.items()))
        if key in seen:
            assert seen[key].as_dict() == f.as_dict()
        seen[key] = f


def test_dual_twist():
    assert dual_lambda((1, 0)) == (0, -1)
    one = HeckeElement.unit("F", 2)
    assert dual_twist(one, C).as_dict() == one.as_dict()
    tw = dual_twist(T((1, 0)), C)
    assert tw.coeff((0, -1)) == C ** -1
    rng = random.Random(34)
    for _ in range(50):
        f = rand_elt(rng, 2)
        assert dual_twist(dual_twist(f, C), C).as_dict() == f.as_dict()


def test_dual_twist_is_algebra_automorphism():
    rng = random.Random(35)
    for _ in range(10):
        f, g = rand_elt(rng, 2, radius=1), rand_elt(rng, 2, radius=1)
        lhs = dual_twist(convolve(F3, f, g), C)
        rhs = convolve(F3, dual_twist(f, C), dual_twist(g, C))
        assert lhs.as_dict() == rhs.as_dict()


def test_pm_split():
    one = HeckeElement.unit("F", 2)
    plus, minus = pm_split(one, C)
    assert plus.as_dict() == one.as_dict() and minus.is_zero()
    plus, minus = pm_split(T((1, 0)), Laurent.rational(1))
    half = Laurent.rational(Fraction(1, 2))
    assert plus.coeff((1, 0)) == half and plus.coeff((0, -1)) == half
    assert minus.coeff((1, 0)) == half and minus.coeff((0, -1)) == -half
    rng = random.Random(36)
    for _ in range(20):
        f = rand_elt(rng, 2)
        plus, minus = pm_split(f, C)
        assert (plus + minus).as_dict() == f.as_dict()
        assert dual_twist(plus, C).as_dict() == plus.as_dict()
        assert dual_twist(minus, C).as_dict() == minus.scale(-1).as_dict()
        p2, m2 = pm_split(plus, C)
        assert p2.as_dict() == plus.as_dict() and m2.is_zero()


def test_bc_plus_space_closure():
    rng = random.Random(37)
    for _ in range(20):
        f1, _ = pm_split(rand_elt(rng, 2, radius=1), C)
        f2, _ = pm_split(rand_elt(rng, 2, radius=1), C)
        out = bc(F3, f1, f2)
        _, minus = pm_split(out, C)
        assert minus.is_zero()
    assert bc(F3, HeckeElement.unit("F", 2), HeckeElement.unit("F", 2)).as_dict() == HeckeElement.unit("F", 2).as_dict()
    f = T((1, 0)) + T((1, 1)).scale(2)
    assert bc(F3, f, HeckeElement.unit("F", 2)).as_dict() == f.as_dict()


def test_chi_convolution_equals_bc_on_plus_parts():
    rng = random.Random(38)
    for _ in range(10):
        f1, _ = pm_split(rand_elt(rng, 2, radius=1), C)
        f2, _ = pm_split(rand_elt(rng, 2, radius=1), C)
        assert chi_convolution(F3, f1, f2, C).as_dict() == bc(F3, f1, f2).as_dict()


def test_dagger():
    one = HeckeElement.unit("E", 2)
    cc = C * C
    assert dagger(one, cc).as_dict() == one.as_dict()
    rng = random.Random(39)
    for _ in range(30):
        f = rand_elt(rng, 2, tag="E")
        assert dagger(dagger(f, cc), cc).as_dict() == f.as_dict()
    # trivial chi*chi^c: dagger is the plain involution lambda -> lambda*
    f = T((2, 1), tag="E")
    assert dagger(f, ONE).as_dict() == T((-1, -2), tag="E").as_dict()
    with pytest.raises(ValueError):
        dagger(T((1, 0), tag="F"), ONE)


def test_constant_term_unit_and_minuscule():
    one4 = HeckeElement.unit("E", 4)
    ct = constant_term(F3, one4, (2, 2))
    assert ct.as_dict() == {((0, 0), (0, 0)): ONE}
    # GL2 over F: T_(1,0) -> t*(T_1 x T_0 + T_0 x T_1)
    t = Laurent.symbol("t")
    ct2 = constant_term(F3, T((1, 0)), (1, 1))
    assert ct2.as_dict() == {((1,), (0,)): t, ((0,), (1,)): t}


def test_constant_term_satake_compatibility():
    rng = random.Random(40)
    for _ in range(12):
        f = rand_elt(rng, 2, radius=2)
        ct = constant_term(F3, f, (1, 1))
        assert satake_tensor(F3, ct) == satake(F3, f)


def test_constant_term_satake_compatibility_m3():
    f = HeckeElement.basis("F", (1, 0, 0)) + HeckeElement.unit("F", 3).scale(2)
    ct = constant_term(F3, f, (2, 1))
    assert satake_tensor(F3, ct) == satake(F3, f)
    ct2 = constant_term(F3, f, (1, 2))
    assert satake_tensor(F3, ct2) == satake(F3, f)


def test_json_roundtrip():
    f = T((1, 0)).scale(C) + T((1, 1)).scale(2)
    data = f.to_json()
    back = hecke_from_json(data, "F", 2)
    assert back.as_dict() == f.as_dict()
