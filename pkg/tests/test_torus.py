import random
from fractions import Fraction

import pytest

from padicrtf.grpspace import EMatrix
from padicrtf.integrate.hnf import divisor_profile, hnf_key
from padicrtf.integrate.torus import Torus
from padicrtf.qfield import FieldSpec, vp

F3 = FieldSpec(3, -1)


def mat(rows):
    return EMatrix.from_rational_rows(rows, F3.u)


def torus_from(rows):
    return Torus.centralizer(F3, mat(rows))


def test_centralizer_classes():
    # distinct rational eigenvalues, (2-5)^2 = 9: disc a square
    t_split = torus_from([[2, 0], [0, 5]])
    assert t_split.qp_class == "split"
    # irreducible with unit nonsquare disc: x^2 - x - 1 over Q_3, disc 5... 5 is nonsquare mod 3? 5 = 2 mod 3, QR(2,3): 2^1=2 != 1: nonresidue
    t_unram = torus_from([[0, 1], [1, 1]])
    assert t_unram.qp_class == "unramified"
    # disc with odd valuation: x^2 - 3
    t_ram = torus_from([[0, 3], [1, 0]])
    assert t_ram.qp_class == "ramified"
    for t in (t_split, t_unram, t_ram):
        assert t.J * t.J == EMatrix.scalar(F3.e(t.d), 2)


def test_torus_contains_generators():
    for rows in ([[2, 0], [0, 5]], [[0, 1], [1, 1]], [[0, 3], [1, 0]]):
        t = torus_from(rows)
        assert t.contains(mat(rows))
        for g in t.lattice_generators():
            assert t.contains(g)
            assert not g.det().is_zero()


def test_split_lattice_generator_valuations():
    t = torus_from([[2, 0], [0, 5]])
    gens = t.lattice_generators()
    assert len(gens) == 2
    g = gens[1]
    assert vp(g.det().a, 3) == 1
    # eigenvalue valuations are (1, 0): char poly t^2 - tr t + det with
    # val(tr) = 0 (Newton polygon has slopes 0 and 1)
    cp = g.char_poly()
    assert vp(cp[1].a, 3) == 0 and vp(cp[0].a, 3) == 1


def test_ramified_lattice_generator():
    t = torus_from([[0, 3], [1, 0]])
    (g,) = t.lattice_generators()
    assert vp(g.det().a, 3) == 1


def rand_coset(rng, lo=-1, hi=1):
    while True:
        m = EMatrix.from_rational_rows(
            [[rng.randint(-9, 9) * Fraction(3) ** rng.randint(lo, hi) for _ in range(2)] for _ in range(2)],
            F3.u,
        )
        if not m.det().is_zero():
            return m


def test_weight_closed_form_matches_bruteforce():
    rng = random.Random(21)
    for rows in ([[2, 0], [0, 5]], [[0, 1], [1, 1]], [[0, 3], [1, 0]]):
        t = torus_from(rows)
        for _ in range(6):
            h = rand_coset(rng)
            assert t.weight(h) == t.weight_bruteforce(h)


def test_weight_identity_coset():
    # J integral for these: identity coset has full compact stabilizer
    for rows in ([[0, 1], [1, 1]], [[0, 3], [1, 0]]):
        t = torus_from(rows)
        assert t.weight(EMatrix.identity(2, F3.u)) == 1


def test_weight_invariant_along_orbit():
    rng = random.Random(22)
    for rows in ([[2, 0], [0, 5]], [[0, 1], [1, 1]], [[0, 3], [1, 0]]):
        t = torus_from(rows)
        h = rand_coset(rng)
        w = t.weight(h)
        translates = t.lattice_generators() + [f.to_ematrix(F3) for f in t.compact_residues(2)]
        for g in translates:
            assert t.weight(g * h) == w


def test_orbit_key_invariance():
    rng = random.Random(23)
    for rows in ([[2, 0], [0, 5]], [[0, 1], [1, 1]], [[0, 3], [1, 0]]):
        t = torus_from(rows)
        h = rand_coset(rng, 0, 1)
        lo, hi = -3, 4
        key = t.orbit_key([h], [None], lo, hi)
        translates = t.lattice_generators() + [f.to_ematrix(F3) for f in t.compact_residues(1)]
        for g in translates:
            prof = divisor_profile(g * h, F3)
            if prof[0] <= hi and prof[-1] >= lo:
                assert t.orbit_key([g * h], [None], lo, hi) == key


def test_orbit_key_separates():
    # cosets in genuinely different orbits get different keys
    t = torus_from([[0, 1], [1, 1]])
    h1 = EMatrix.identity(2, F3.u)
    h2 = mat([[1, 0], [0, 3]])
    k1 = t.orbit_key([h1], [None], -2, 3)
    k2 = t.orbit_key([h2], [None], -2, 3)
    assert k1 != k2


def test_scalar_torus():
    t = Torus(F3, 1)
    h = EMatrix([[F3.e(9)]])
    assert t.weight(h) == 1
    # single orbit on GL_1(E)/K within a window
    k0 = t.orbit_key([EMatrix([[F3.e(1)]])], [None], -2, 2)
    k1 = t.orbit_key([EMatrix([[F3.e(3, 3)]])], [None], -2, 2)
    assert k0 == k1


def test_pair_weight_uses_both_components():
    t = torus_from([[0, 1], [1, 1]])
    h_deep = mat([[1, 0], [0, 9]])
    one = EMatrix.identity(2, F3.u)
    w_pair = t.weight_pair([one, h_deep], [None, None])
    assert w_pair == t.weight(h_deep)
    assert w_pair > 1
