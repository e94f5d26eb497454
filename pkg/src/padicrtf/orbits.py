"""Regular semisimple orbits on both sides of the comparison.

An S'-side orbit is recorded by alpha (the canonical representative is
s'(alpha)), a G-side orbit by beta together with the splitting datum eps
(representative g(beta)).  Descriptors cache the categorical-quotient
invariants, the scale exponents behind the case analysis, regularity,
ellipticity, matchability, and - for generated orbits - an exact witness
on the other side.

Matched pairs are produced exactly: a rational point (x, y) on the quadric
N(x) + eps N(y) = 1 gives alpha = x^{-1}, beta = y with
(1 - (alpha conj(alpha))^{-1}) = eps beta conj(beta) on the nose; the
elliptic n = 2 version runs the same construction over L = Q(sqrt(d))
inside the 2x2 matrix model of L."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .grpspace import EMatrix, GPoint, SPrimePoint, s_of_g, theta
from .integrate.torus import Torus
from .laurent import Laurent, ONE
from .qfield import EElement, FieldSpec, INF, vp, rational_is_square


# -- invariants -----------------------------------------------------------------


def invariants_sprime(s: SPrimePoint):
    """char poly of 2 A conj(A) - 1 (A the upper-left block): the
    categorical-quotient coordinates, constant on twisted orbits."""
    m = s.mat
    n = m.n // 2
    A = m.block(0, 0, n, n)
    two_aab = A * A.conj() * 2 - EMatrix.identity(n, m.u)
    cp = two_aab.char_poly()
    return tuple(_rat(c) for c in cp)


def invariants_g(g: GPoint):
    """char poly of the upper-left block of g theta(g)^{-1}."""
    s = s_of_g(g.mat)
    n = g.mat.n // 2
    A = s.mat.block(0, 0, n, n)
    return tuple(_rat(c) for c in A.char_poly())


def _rat(e: EElement) -> Fraction:
    if e.b != 0:
        raise ValueError("invariant is not F-rational; point not in standard position")
    return e.a


def _char_separable(cp, field) -> bool:
    """Separability of a monic quadratic/linear with rational coefficients."""
    n = len(cp) - 1
    if n == 1:
        return True
    if n == 2:
        disc = cp[1].a * cp[1].a - 4 * cp[0].a
        return disc != 0
    raise ValueError("regularity test implemented for n <= 2")


def _newton_slopes_quadratic(c0: Fraction, c1: Fraction, p: int):
    """Valuations of the two roots of t^2 + c1 t + c0 over Q_p (Newton
    polygon; exact integers or half-integers)."""
    v0 = vp(c0, p)
    v1 = vp(c1, p) if c1 != 0 else INF
    if v1 is INF or 2 * v1 >= v0:
        return (Fraction(v0, 2), Fraction(v0, 2))
    return (Fraction(v1), Fraction(v0 - v1))


# -- matchability ------------------------------------------------------------------


def _norm_class_quadratic(field: FieldSpec, X: EMatrix, eps_twist: bool):
    """Whether a regular F-rational X (n <= 2) lies in eps^k N GL_n(E),
    decided on the centralizer torus; returns True/False/None (undecided)."""
    p = field.p
    v_eps = vp(field.eps, p) if eps_twist else 0
    if X.n == 1:
        v = field.val(X.rows[0][0])
        return (v - v_eps) % 2 == 0
    cp = X.char_poly()
    c0, c1 = cp[0].a, cp[1].a
    disc = c1 * c1 - 4 * c0
    if disc == 0:
        return None
    dv = vp(disc, p)
    if dv % 2 == 0 and rational_is_square(disc, p):
        # split centralizer: both root valuations must be even mod eps
        s1, s2 = _newton_slopes_quadratic(c0, c1, p)
        if s1.denominator != 1 or s2.denominator != 1:
            return None
        return (int(s1) - v_eps) % 2 == 0 and (int(s2) - v_eps) % 2 == 0
    if dv % 2 == 0:
        # centralizer is the unramified quadratic field, i.e. E itself;
        # E tensor E splits, so every such element is a twisted norm
        return True
    # ramified centralizer L: L(sqrt u)/L is unramified; val_L = val_p(det);
    # eps lands at even val_L, so only the determinant parity matters
    return vp(c0, p) % 2 == 0


@dataclass
class OrbitSPrime:
    field: FieldSpec
    alpha: EMatrix
    aabar: EMatrix = None
    inv_vector: tuple = None
    xr_exp: int = None
    yr_exp: int = None
    regular: bool = None
    elliptic: bool = None
    matchable: object = None
    torus: Torus = None
    witness_beta: EMatrix = None
    label: str = ""

    def __post_init__(self):
        field = self.field
        n = self.alpha.n
        if self.alpha.det().is_zero():
            raise ValueError("alpha must be invertible")
        self.aabar = self.alpha * self.alpha.conj()
        if not self.aabar.is_rational():
            raise ValueError("alpha*conj(alpha) must have F-rational entries")
        cp = self.aabar.char_poly()
        self.regular = _char_separable(cp, field)
        one = EMatrix.identity(n, field.u)
        dX = (one - self.aabar).det()
        if dX.is_zero():
            raise ValueError("det(alpha conj(alpha) - 1) must not vanish")
        v_A = int(field.val(self.aabar.det()))
        v_X = int(field.val(dX))
        self.xr_exp = v_A
        self.yr_exp = v_A - v_X
        two = self.aabar * 2 - one
        self.inv_vector = tuple(_rat(c) for c in two.char_poly())
        if self.regular:
            self.torus = Torus.centralizer(field, self.aabar)
            self.elliptic = n == 1 or self.torus.qp_class != "split"
            Xm = one - _matrix_inverse(self.aabar)
            self.matchable = _norm_class_quadratic(field, Xm, eps_twist=True)

    def canonical_point(self) -> SPrimePoint:
        return SPrimePoint.canonical(self.alpha)

    def to_json(self):
        return {
            "side": "sprime",
            "alpha": self.alpha.to_json(),
            "invariants": [str(x) for x in self.inv_vector],
            "x_r_exp": self.xr_exp,
            "y_r_exp": self.yr_exp,
            "regular": self.regular,
            "elliptic": self.elliptic,
            "matchable": self.matchable,
            "label": self.label,
        }


@dataclass
class OrbitG:
    field: FieldSpec
    beta: EMatrix
    bbbar: EMatrix = None
    inv_vector: tuple = None
    regular: bool = None
    elliptic: bool = None
    matchable: object = None
    torus: Torus = None
    witness_alpha: EMatrix = None
    label: str = ""

    def __post_init__(self):
        field = self.field
        n = self.beta.n
        if self.beta.det().is_zero():
            raise ValueError("beta must be invertible")
        self.bbbar = self.beta * self.beta.conj()
        if not self.bbbar.is_rational():
            raise ValueError("beta*conj(beta) must have F-rational entries")
        self.regular = _char_separable(self.bbbar.char_poly(), field)
        one = EMatrix.identity(n, field.u)
        W = one - self.bbbar * field.eps
        if W.det().is_zero():
            raise ValueError("det(1 - eps beta conj(beta)) must not vanish")
        A = _matrix_inverse(W) * (one + self.bbbar * field.eps)
        self.inv_vector = tuple(_rat(c) for c in A.char_poly())
        if self.regular:
            self.torus = Torus.centralizer(field, self.bbbar)
            self.elliptic = n == 1 or self.torus.qp_class != "split"
            self.matchable = _norm_class_quadratic(field, _matrix_inverse(W), eps_twist=False)

    def canonical_point(self) -> GPoint:
        return GPoint.canonical(self.beta, self.field.eps)

    def to_json(self):
        return {
            "side": "g",
            "beta": self.beta.to_json(),
            "eps": str(self.field.eps),
            "invariants": [str(x) for x in self.inv_vector],
            "regular": self.regular,
            "elliptic": self.elliptic,
            "matchable": self.matchable,
            "label": self.label,
        }


def _matrix_inverse(m: EMatrix) -> EMatrix:
    return m.inv()


def match(o1: OrbitSPrime, o2: OrbitG) -> bool:
    """The concrete matching predicate: -(1 - a abar)(a abar)^{-1} and
    eps b bbar share a characteristic polynomial; equivalently the q/q'
    invariant vectors agree."""
    field = o1.field
    n = o1.alpha.n
    one = EMatrix.identity(n, field.u)
    lhs = (one - o1.aabar) * _matrix_inverse(o1.aabar) * Fraction(-1)
    rhs = o2.bbbar * field.eps
    same_char = lhs.char_poly() == rhs.char_poly()
    same_inv = o1.inv_vector == o2.inv_vector
    assert same_char == same_inv, "invariant-vector route disagrees with char-poly route"
    return same_char


def matchable_sprime(o: OrbitSPrime):
    return o.matchable


def matchable_g(o: OrbitG):
    return o.matchable


# -- transfer factors ---------------------------------------------------------------


def kappa_sprime(field: FieldSpec, s: SPrimePoint, chi_symbol: str = "c") -> Laurent:
    """chi(det(tau D')) eta~(det B') on a regular point of S'."""
    m = s.mat
    n = m.n // 2
    _A, B, _C, D = m.four_blocks()
    dB = B.det()
    dD = D.det()
    if dB.is_zero() or dD.is_zero():
        raise ValueError("transfer factor needs invertible blocks")
    tau = field.sqrt_u()
    v_tau_d = n * field.val(tau) + field.val(dD)
    c = Laurent.symbol(chi_symbol)
    sign = -1 if field.val(dB) % 2 else 1
    return (c ** v_tau_d if v_tau_d else ONE) * sign


def kappa_g(field: FieldSpec, g: GPoint, chi_symbol: str = "c") -> Laurent:
    """chi(det y1) with g^{-1} = [[y1, eps y2], [conj(y2), conj(y1)]]."""
    gi = g.mat.inv()
    n = g.mat.n // 2
    y1 = gi.block(0, 0, n, n)
    d = y1.det()
    if d.is_zero():
        raise ValueError("transfer factor needs an invertible y1 block")
    v = field.val(d)
    c = Laurent.symbol(chi_symbol)
    return c ** v if v else ONE


def kappa_gprime(field: FieldSpec, x: EMatrix, chi_symbol: str = "c") -> Laurent:
    """chi(det a4) eta~(det(tau a2)) on the blocks of x conj(x)^{-1}."""
    s = x * x.conj().inv()
    n = x.n // 2
    _a1, a2, _a3, a4 = s.four_blocks()
    if a2.det().is_zero() or a4.det().is_zero():
        raise ValueError("transfer factor needs invertible blocks")
    tau = field.sqrt_u()
    v4 = field.val(a4.det())
    v2 = n * field.val(tau) + field.val(a2.det())
    c = Laurent.symbol(chi_symbol)
    sign = -1 if v2 % 2 else 1
    return (c ** v4 if v4 else ONE) * sign


# -- exact matched-pair generators ----------------------------------------------------


def _quadric_point(field: FieldSpec, dx: EElement, dy: EElement, eps: Fraction):
    """Rational point (x, y) != (1, 0) on N(x) + eps N(y) = 1 along the
    direction (dx, dy) through (1, 0)."""
    tr = dx.trace()
    qd = dx.norm() + eps * dy.norm()
    if tr == 0 or qd == 0:
        return None
    t = -tr / qd
    x = field.e(1) + dx * t
    y = dy * t
    if x.is_zero() or y.is_zero():
        return None
    if x.norm() == 0 or x.norm() == 1:
        return None
    return x, y


def _rand_e(field, rng, scale_lo=-1, scale_hi=1, height=6):
    sc = Fraction(field.p) ** rng.randint(scale_lo, scale_hi)
    return field.e(
        Fraction(rng.randint(-height, height), rng.randint(1, height)) * sc,
        Fraction(rng.randint(-height, height), rng.randint(1, height)) * sc,
    )


def _height_frac(fr) -> int:
    return max(abs(fr.numerator), fr.denominator)


def _height_orbit(o) -> int:
    return max(_height_frac(x) for x in o.inv_vector)


def gen_matched_pair_n1(field: FieldSpec, rng: random.Random, tries: int = 2000, height_cap: int = 10 ** 5):
    """(OrbitSPrime, OrbitG) with exact matching at n = 1; rejection keeps
    the invariant heights desk-scale so downstream sums stay fast."""
    for _ in range(tries):
        pt = _quadric_point(field, _rand_e(field, rng, -2, 2, 4), _rand_e(field, rng, -2, 2, 4), field.eps)
        if pt is None:
            continue
        x, y = pt
        alpha = x.inv()
        beta = y
        try:
            o1 = OrbitSPrime(field, EMatrix([[alpha]]))
            o2 = OrbitG(field, EMatrix([[beta]]))
        except ValueError:
            continue
        if not (o1.regular and o2.regular):
            continue
        if _height_orbit(o1) > height_cap:
            continue
        o1.witness_beta = EMatrix([[beta]])
        o2.witness_alpha = EMatrix([[alpha]])
        assert match(o1, o2)
        assert o1.matchable is True and o2.matchable is True
        return o1, o2
    raise RuntimeError("matched-pair sampling exhausted its tries")


def _orbit_scale(field, o1, o2) -> int:
    vals = [
        abs(o1.xr_exp),
        abs(o1.yr_exp),
        abs(o1.xr_exp - o1.yr_exp),
        -min(0, _mv(field, o1.alpha)),
        -min(0, _mv(field, o2.beta)),
    ]
    return max(vals)


def _mv(field, m):
    v = m.min_val(field)
    return 0 if v is None else int(v) if v != float("inf") else 0


def gen_matched_split_n2(field: FieldSpec, rng: random.Random, tries: int = 400, height_cap: int = 200, scale_cap: int = 2):
    """Block-diagonal matched pair whose stabilizer splits over F; the
    scale cap keeps enumeration windows desk-sized."""
    for _ in range(tries):
        a1, b1 = gen_matched_pair_n1(field, rng, height_cap=height_cap)
        a2, b2 = gen_matched_pair_n1(field, rng, height_cap=height_cap)
        if a1.inv_vector == a2.inv_vector:
            continue
        alpha = EMatrix.block_diag(a1.alpha, a2.alpha)
        beta = EMatrix.block_diag(b1.beta, b2.beta)
        try:
            o1 = OrbitSPrime(field, alpha)
            o2 = OrbitG(field, beta)
        except ValueError:
            continue
        if not (o1.regular and o2.regular):
            continue
        if scale_cap is not None and _orbit_scale(field, o1, o2) > scale_cap:
            continue
        o1.witness_beta = beta
        o2.witness_alpha = alpha
        assert match(o1, o2)
        return o1, o2
    raise RuntimeError("split-pair sampling exhausted its tries")


class _Lq:
    """Arithmetic in M = L(sqrt u), L = Q(sqrt d): elements s + t sqrt(d)
    with s, t in E."""

    def __init__(self, field: FieldSpec, d: Fraction):
        self.field = field
        self.d = Fraction(d)

    def mul(self, z, w):
        s1, t1 = z
        s2, t2 = w
        return (s1 * s2 + t1 * t2 * self.d, s1 * t2 + t1 * s2)

    def conj_e(self, z):
        return (z[0].conj(), z[1].conj())

    def norm_ml(self, z):
        """N_{M/L}: z * conj_E(z), an element of L (rational components)."""
        return self.mul(z, self.conj_e(z))

    def trace_ml(self, z):
        s, t = z
        return (s + s.conj(), t + t.conj())

    def l_rational(self, z) -> bool:
        return z[0].b == 0 and z[1].b == 0

    def l_inv(self, z):
        a, b = z[0].a, z[1].a  # rational components of an L-element
        nrm = a * a - self.d * b * b
        if nrm == 0:
            raise ZeroDivisionError
        return (self.field.e(a / nrm), self.field.e(-b / nrm))

    def inv(self, z):
        n = self.norm_ml(z)
        return self.mul(self.conj_e(z), self.l_inv(n))

    def embed(self, z) -> EMatrix:
        s, t = z
        return EMatrix([[s, t * self.d], [t, s]])


def _l_mul(z, w, d):
    """(a + b sqrt d)(a' + b' sqrt d) on rational pairs."""
    return (z[0] * w[0] + d * z[1] * w[1], z[0] * w[1] + z[1] * w[0])


def _l_inv_pair(z, d):
    nrm = z[0] * z[0] - d * z[1] * z[1]
    if nrm == 0:
        raise ZeroDivisionError
    return (z[0] / nrm, -z[1] / nrm)


def gen_matched_elliptic_n2(field: FieldSpec, rng: random.Random, d=None, tries: int = 800):
    """Matched elliptic pair at n = 2 through the quadric over L = Q(sqrt d)."""
    if d is None:
        d = rng.choice([field.u, Fraction(field.p), field.u * field.p])
    d = Fraction(d)
    M = _Lq(field, d)
    height_cap = 10 ** 4
    for _ in range(tries):
        dx = (_rand_e(field, rng, -1, 1, 3), _rand_e(field, rng, -1, 1, 3))
        dy = (_rand_e(field, rng, -1, 1, 3), _rand_e(field, rng, -1, 1, 3))
        tr_m = M.trace_ml(dx)
        qd_m = M.norm_ml(dx)
        qy_m = M.norm_ml(dy)
        # all three live in L; extract rational pairs
        tr = (tr_m[0].a, tr_m[1].a)
        qd = (
            qd_m[0].a + field.eps * qy_m[0].a,
            qd_m[1].a + field.eps * qy_m[1].a,
        )
        try:
            t = _l_mul(_l_inv_pair(qd, d), (-tr[0], -tr[1]), d)
        except ZeroDivisionError:
            continue
        t_m = (field.e(t[0]), field.e(t[1]))  # L-scalar inside M
        xt = M.mul(dx, t_m)
        x = (field.e(1) + xt[0], xt[1])
        y = M.mul(dy, t_m)
        if (y[0].is_zero() and y[1].is_zero()) or (x[0].is_zero() and x[1].is_zero()):
            continue
        nx = M.norm_ml(x)  # in L
        if nx[1].a == 0:
            continue  # N(x) rational: the orbit degenerates out of the model
        try:
            alpha = M.embed(M.inv(x))
            beta = M.embed(y)
            o1 = OrbitSPrime(field, alpha)
            o2 = OrbitG(field, beta)
        except (ValueError, ZeroDivisionError):
            continue
        if not (o1.regular and o2.regular and o1.elliptic):
            continue
        if _height_orbit(o1) > height_cap:
            continue
        if _orbit_scale(field, o1, o2) > 2:
            continue
        o1.witness_beta = beta
        o2.witness_alpha = alpha
        if not match(o1, o2):
            continue
        return o1, o2
    raise RuntimeError("elliptic-pair sampling exhausted its tries")


def gen_nonmatchable_sprime(field: FieldSpec, rng: random.Random, n: int = 1, tries: int = 600):
    for _ in range(tries):
        if n == 1:
            alpha = EMatrix([[_rand_e(field, rng, -2, 2)]])
        else:
            M = _Lq(field, Fraction(field.p))
            z = (_rand_e(field, rng, -1, 1, 4), _rand_e(field, rng, -1, 1, 4))
            alpha = M.embed(z)
        try:
            o = OrbitSPrime(field, alpha)
        except (ValueError, ZeroDivisionError):
            continue
        if o.regular and o.matchable is False:
            return o
    raise RuntimeError("non-matchable sampling exhausted its tries")


def gen_nonmatchable_g(field: FieldSpec, rng: random.Random, n: int = 1, tries: int = 600):
    for _ in range(tries):
        if n == 1:
            beta = EMatrix([[_rand_e(field, rng, -2, 2)]])
        else:
            M = _Lq(field, Fraction(field.p))
            z = (_rand_e(field, rng, -1, 1, 4), _rand_e(field, rng, -1, 1, 4))
            beta = M.embed(z)
        try:
            o = OrbitG(field, beta)
        except (ValueError, ZeroDivisionError):
            continue
        if o.regular and o.matchable is False:
            return o
    raise RuntimeError("non-matchable sampling exhausted its tries")


def gen_matched_pair_tagged(field: FieldSpec, rng: random.Random, tag: str, tries: int = 2000):
    """Matched n = 1 pair with a prescribed case tag."""
    for _ in range(tries):
        o1, o2 = gen_matched_pair_n1(field, rng)
        if case_tag(o1) == tag:
            return o1, o2
    raise RuntimeError(f"no orbit with tag {tag} found")


def case_tag(o: OrbitSPrime) -> str:
    if o.xr_exp < 0:
        return "vanish_xr_lt_1"
    if o.xr_exp == 0:
        return "kottwitz_case"
    return "big_valuation_case"
