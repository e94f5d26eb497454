import random
from fractions import Fraction

from padicrtf.grpspace import EMatrix
from padicrtf.integrate.hnf import (
    divisor_profile,
    double_coset_reps,
    enum_cosets,
    hnf_key,
    hnf_rep,
)
from padicrtf.qfield import FieldSpec

F3 = FieldSpec(3, -1)
F5 = FieldSpec(5, 2)


def rand_unit_mat(field, rng, n, e_side=True):
    """Random element of GL_n(o)."""
    p = field.p
    while True:
        rows = [
            [
                field.e(
                    rng.randint(-8, 8) + Fraction(p) * rng.randint(-2, 2),
                    (rng.randint(-8, 8) if e_side else 0),
                )
                for _ in range(n)
            ]
            for _ in range(n)
        ]
        m = EMatrix(rows)
        d = m.det()
        if not d.is_zero() and field.val(d) == 0 and m.is_integral(field):
            return m


def rand_gl(field, rng, n):
    while True:
        rows = [
            [
                field.e(
                    Fraction(rng.randint(-9, 9), rng.randint(1, 5)) * Fraction(field.p) ** rng.randint(-1, 1),
                    Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
                )
                for _ in range(n)
            ]
            for _ in range(n)
        ]
        m = EMatrix(rows)
        if not m.det().is_zero():
            return m


def test_hnf_idempotent_and_coset_invariant():
    rng = random.Random(11)
    for n in (1, 2, 3):
        for _ in range(25):
            g = rand_gl(F3, rng, n)
            h = hnf_rep(g, F3)
            k = rand_unit_mat(F3, rng, n)
            assert hnf_rep(g * k, F3) == h
            assert hnf_rep(h, F3) == h


def test_hnf_separates_cosets():
    rng = random.Random(12)
    for _ in range(25):
        g1, g2 = rand_gl(F3, rng, 2), rand_gl(F3, rng, 2)
        same_key = hnf_key(g1, F3) == hnf_key(g2, F3)
        quot = g1.inv() * g2
        in_k = quot.is_integral(F3) and F3.val(quot.det()) == 0
        assert same_key == in_k


def test_divisor_profile_examples():
    m = EMatrix.from_rational_rows([[9, 1], [0, 3]], F3.u)
    assert divisor_profile(m, F3) == (3, 0)
    m2 = EMatrix.from_rational_rows([[9, 0], [0, 3]], F3.u)
    assert divisor_profile(m2, F3) == (2, 1)
    m3 = EMatrix.from_rational_rows([[Fraction(1, 3), 0], [0, 3]], F3.u)
    assert divisor_profile(m3, F3) == (1, -1)


def test_enum_cosets_gl1():
    reps = list(enum_cosets(F3, 1, -1, 1, e_side=True))
    vals = sorted(r.divisors[0] for r in reps)
    assert vals == [-1, 0, 1]


def test_enum_cosets_count_window_01():
    # F-side count over divisors in {0,1}: 1 + (q+1) + 1
    for field in (F3, F5):
        reps = list(enum_cosets(field, 2, 0, 1, e_side=False))
        by_profile = {}
        for r in reps:
            by_profile.setdefault(r.divisors, []).append(r)
        assert len(by_profile[(0, 0)]) == 1
        assert len(by_profile[(1, 0)]) == field.p + 1
        assert len(by_profile[(1, 1)]) == 1
    # E-side residue field has q^2 elements
    reps_e = list(enum_cosets(F3, 2, 0, 1, e_side=True))
    by = {}
    for r in reps_e:
        by.setdefault(r.divisors, 0)
        by[r.divisors] += 1
    assert by[(1, 0)] == 9 + 1


def test_double_coset_counts():
    # |K diag(p,1) K / K| = q+1 over F
    assert len(double_coset_reps(F3, 2, (1, 0), e_side=False)) == 4
    # minuscule (1,0,0,0) on GL4(F): (q^4-1)/(q-1)
    assert len(double_coset_reps(F3, 4, (1, 0, 0, 0), e_side=False)) == 40
    assert len(double_coset_reps(F3, 1, (2,), e_side=False)) == 1


def test_distinct_cosets_distinct_keys():
    reps = list(enum_cosets(F3, 2, -1, 1, e_side=False))
    keys = {hnf_key(r.mat, F3) for r in reps}
    assert len(keys) == len(reps)
