r"""Orbital integral engines.

Every integral here is a finite weighted coset sum: an outer sum over a
stabilizer-torus quotient T\GL_n(E) (or a pair quotient) and an inner free
coset sum.  Integrands are indicators of integrality conditions twisted by
unramified characters, so values live in the exact Laurent coefficient
ring and identities are checked exactly.

Coset enumeration for n = 2 walks the off-diagonal Hermite parameter digit
by digit.  A subtree is discarded only when some integrality condition
already fails at the current depth by more than the exact perturbation
reach of the remaining digits: the parameter enters every condition through
a nilpotent correction (1 - d N) with N^2 = 0, so the per-entry reach is a
sharp ultrametric bound and the discard is provably sound.  Windows are
certified by recomputation with all bounds enlarged by the margin.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from ..grpspace import EMatrix
from ..laurent import Laurent, ONE, ZERO
from ..qfield import FieldSpec, INF
from .fmat import FMat, sigma_integral_check, vp_int
from .hnf import double_coset_reps
from .torus import Torus
from .windows import CertificationError, EnumerationWindow

_BIG = 10 ** 9


@dataclass
class OrbitalResult:
    value: Laurent
    window: EnumerationWindow
    certified: bool
    visited: int
    wall_ms: float

    def to_json(self):
        from ..laurent import serialize_laurent

        return {
            "value": serialize_laurent(self.value),
            "value_str": str(self.value),
            "window": self.window.to_json(),
            "certified": self.certified,
            "visited_cosets": self.visited,
            "wall_ms": round(self.wall_ms, 3),
        }


@dataclass(frozen=True)
class ConjCondition:
    """Require minval(twist(M, H)) >= threshold along the enumeration.

    modes: "bar" H^{-1} M conj(H) | "revbar" conj(H)^{-1} M H |
    "plain" H^{-1} M H | "lmul" M conj(H) | "lmul_plain" M H |
    "invmul" H^{-1} M | "invmul_bar" conj(H)^{-1} M.
    """

    M: FMat
    mode: str
    threshold: int


def _apply_cond(cond: ConjCondition, H: FMat, Hinv: FMat) -> FMat:
    m = cond.mode
    if m == "bar":
        return Hinv.mul(cond.M).mul(H.conj())
    if m == "revbar":
        return Hinv.conj().mul(cond.M).mul(H)
    if m == "plain":
        return Hinv.mul(cond.M).mul(H)
    if m == "lmul":
        return cond.M.mul(H.conj())
    if m == "lmul_plain":
        return cond.M.mul(H)
    if m == "invmul":
        return Hinv.mul(cond.M)
    if m == "invmul_bar":
        return Hinv.conj().mul(cond.M)
    raise ValueError(m)


def _passes(cond: ConjCondition, H: FMat, Hinv: FMat, p: int) -> bool:
    return _apply_cond(cond, H, Hinv).min_val(p) >= cond.threshold


def _prunes(cond: ConjCondition, H: FMat, Hinv: FMat, level: int, a1: int, p: int) -> bool:
    """True when the condition fails for every refinement of the current
    off-diagonal class (x known modulo p^level, diagonal (p^a1, p^a2))."""
    C = _apply_cond(cond, H, Hinv)
    thr = cond.threshold
    mode = cond.mode
    if mode in ("bar", "revbar", "plain"):
        c21 = C.entry_val(1, 0, p)
        if c21 < thr:
            return True  # this entry never moves
        d = level - a1
        pert_diag = d + c21
        pert_12 = min(d + C.entry_val(0, 0, p), d + C.entry_val(1, 1, p), 2 * d + c21)
        for (i, j), pert in (((0, 0), pert_diag), ((1, 1), pert_diag), ((0, 1), pert_12)):
            v = C.entry_val(i, j, p)
            if v < thr and v < pert:
                return True
        return False
    if mode in ("lmul", "lmul_plain"):
        for i in range(2):
            v0 = C.entry_val(i, 0, p)
            if v0 < thr:
                return True  # column 1 never moves
            v1 = C.entry_val(i, 1, p)
            if v1 < thr and v1 < level + cond.M.entry_val(i, 0, p):
                return True
        return False
    if mode in ("invmul", "invmul_bar"):
        d = level - a1
        for j in range(2):
            v2 = C.entry_val(1, j, p)
            if v2 < thr:
                return True  # row 2 never moves
            v1 = C.entry_val(0, j, p)
            if v1 < thr and v1 < d + v2:
                return True
        return False
    raise ValueError(mode)


@dataclass
class EnumStats:
    visited: int = 0


def enum_pruned(field: FieldSpec, n: int, lo: int, hi: int, det_vals, conds, stats: EnumStats):
    """Canonical coset reps of GL_n(E)/K with all elementary divisors in
    [lo, hi] and det valuation in det_vals (None = unconstrained) that pass
    every condition.  Yields (H, Hinv, divisors, det_val) with H, Hinv fast
    matrices."""
    p = field.p
    u = int(field.u)
    if hi < lo:
        return
    if n == 1:
        for a in range(lo, hi + 1):
            if det_vals is not None and a not in det_vals:
                continue
            stats.visited += 1
            H = FMat(1, u, 1, [p ** a], [0]) if a >= 0 else FMat(1, u, p ** (-a), [1], [0])
            Hinv = FMat(1, u, 1, [p ** (-a)], [0]) if a <= 0 else FMat(1, u, p ** a, [1], [0])
            if all(_passes(c, H, Hinv, p) for c in conds):
                yield H, Hinv, (a,), a
        return
    if n != 2:
        raise ValueError("pruned enumeration supports n <= 2")
    scale_exp = max(0, -lo)
    scale = p ** scale_exp
    for a1 in range(lo, hi + 1):
        for a2 in range(lo, hi + 1):
            if det_vals is not None and (a1 + a2) not in det_vals:
                continue
            den_exp = max(0, -a1, -a2, scale_exp)
            den = p ** den_exp
            e11 = p ** (a1 + den_exp)
            e22 = p ** (a2 + den_exp)
            xden = den // scale  # x = (xa + xb r)/scale; entry = x * den
            idn_exp = max(a1, a2, a1 + a2 + scale_exp, 0)
            iden = p ** idn_exp
            i11 = p ** (idn_exp - a1)
            i22 = p ** (idn_exp - a2)
            ix = p ** (idn_exp - a1 - a2 - scale_exp)
            # DFS over digit classes of x in p^lo o_E mod p^a1
            stack = [(lo, 0, 0)]
            while stack:
                level, xa, xb = stack.pop()
                H = FMat(2, u, den, [e11, xa * xden, 0, e22], [0, xb * xden, 0, 0])
                Hinv = FMat(2, u, iden, [i11, -xa * ix, 0, i22], [0, -xb * ix, 0, 0])
                stats.visited += 1
                if level >= a1:
                    xv = _xval(xa, xb, scale_exp, p)
                    mv = min(a1, a2, xv)
                    divs = (a1 + a2 - mv, mv)
                    if divs[0] > hi or divs[1] < lo:
                        continue
                    if all(_passes(c, H, Hinv, p) for c in conds):
                        yield H, Hinv, divs, a1 + a2
                    continue
                if any(_prunes(c, H, Hinv, level, a1, p) for c in conds):
                    continue
                step = p ** (level + scale_exp)
                for ta in range(p):
                    for tb in range(p):
                        stack.append((level + 1, xa + ta * step, xb + tb * step))


def _xval(xa, xb, scale_exp, p):
    if xa == 0 and xb == 0:
        return _BIG
    return min(vp_int(xa, p), vp_int(xb, p)) - scale_exp


# -- test-function wrappers ------------------------------------------------------


class UnitTilde:
    """The symmetric-space projection of the unit: the indicator of the
    integral points of S'."""

    radius = 0

    def __call__(self, field, blocks) -> Laurent:
        p = field.p
        for b in blocks:
            if not b.is_integral(p):
                return ZERO
        return ONE


class HeckeTilde:
    """f~ built from a bi-K-invariant f' on GL_{2n}(E): at a point s the
    value is a count over left cosets yK in the support of f' whose Galois
    coset meets s (y^{-1} s conj(y) integral), each weighted by
    coeff * ((-1) c)^{-|lambda|} from the (chi eta~)^{-1} twist along the
    fiber."""

    def __init__(self, field: FieldSpec, helt, chi_symbol: str = "c"):
        if helt.field_tag != "E":
            raise ValueError("tilde functions come from Hecke elements over E")
        self.field = field
        self.helt = helt
        self.m = helt.m
        self.radius = helt.support_radius()
        self._memo = {}
        c = Laurent.symbol(chi_symbol)
        self._packs = []
        for lam, coeff in helt.coeffs:
            reps = double_coset_reps(field, self.m, lam, e_side=True)
            pairs = []
            for rep in reps:
                yinv = FMat.from_ematrix(rep.mat.inv()).normalized(field.p)
                ybar = FMat.from_ematrix(rep.mat.conj()).normalized(field.p)
                pairs.append((yinv, ybar))
            tot = sum(lam)
            factor = coeff * ((-1) ** (tot % 2)) * (c ** (-tot) if tot else ONE)
            self._packs.append((pairs, factor, max(lam) - min(lam)))

    def __call__(self, field, blocks) -> Laurent:
        p = field.p
        point = _assemble(blocks).normalized(p)
        memo_key = (point.den, tuple(point.a), tuple(point.b))
        cached = self._memo.get(memo_key)
        if cached is not None:
            return cached
        mv = point.min_val(p)
        out = ZERO
        for pairs, factor, spread in self._packs:
            if mv < -spread:
                continue
            count = 0
            for yinv, ybar in pairs:
                if sigma_integral_check(yinv, ybar, point, p):
                    count += 1
            if count:
                out = out + factor * count
        self._memo[memo_key] = out
        return out


def _assemble(blocks) -> FMat:
    B11, B12, B21, B22 = blocks
    n = B11.n
    u = B11.u
    den = 1
    for b in blocks:
        den = den * b.den // _gcd2(den, b.den)
    a = [0] * (4 * n * n)
    bb = [0] * (4 * n * n)
    for bi, blk in ((0, B11), (1, B12), (2, B21), (3, B22)):
        r0 = (bi // 2) * n
        c0 = (bi % 2) * n
        s = den // blk.den
        for i in range(n):
            for j in range(n):
                a[(r0 + i) * 2 * n + (c0 + j)] = blk.a[i * n + j] * s
                bb[(r0 + i) * 2 * n + (c0 + j)] = blk.b[i * n + j] * s
    return FMat(2 * n, u, den, a, bb)


def _gcd2(x, y):
    while y:
        x, y = y, x % y
    return x


def tilde_of_unit(field: FieldSpec) -> UnitTilde:
    return UnitTilde()


def tilde_of_hecke(field: FieldSpec, helt, chi_symbol: str = "c") -> HeckeTilde:
    return HeckeTilde(field, helt, chi_symbol)


@dataclass(frozen=True)
class GFunc:
    """Test function on G supported on central shifts of G(o):
    sum_k coeff_k 1_{p^k G(o)}."""

    shifts: tuple

    def radius(self) -> int:
        return max((abs(k) for k, _ in self.shifts), default=0)

    def kmin(self):
        return min(k for k, _ in self.shifts)

    def kmax(self):
        return max(k for k, _ in self.shifts)


def gfunc_of_unit(field: FieldSpec = None) -> GFunc:
    return GFunc(((0, ONE),))


def gfunc_central_shift(field: FieldSpec, k: int, coeff=None) -> GFunc:
    return GFunc(((k, coeff if coeff is not None else ONE),))


# -- certification ----------------------------------------------------------------


def _run_certified(compute, window: EnumerationWindow, certify: bool, autogrow: bool, max_grow: int = 3):
    t0 = time.time()
    value, visited = compute(window)
    if not certify:
        return value, window, False, visited, (time.time() - t0) * 1000
    grown = window.grow()
    value2, v2 = compute(grown)
    visited += v2
    tries = 0
    while value2 != value:
        if not autogrow or tries >= max_grow:
            raise CertificationError(
                f"undersized window {window.to_json()}: {value} became {value2}"
            )
        window, value = grown, value2
        grown = window.grow()
        value2, v2 = compute(grown)
        visited += v2
        tries += 1
    return value, window, True, visited, (time.time() - t0) * 1000


_OUTER_DET_VALS = (0, 1)  # every torus orbit of cosets meets these det values


def _femb(Q):
    if Q is None:
        return None
    return (FMat.from_ematrix(Q), FMat.from_ematrix(Q.inv()))


def _int_or(v, default):
    return default if v is INF else int(v)


# -- canonical-point engines -------------------------------------------------------


def orbital_sprime_canonical(
    field: FieldSpec,
    alpha: EMatrix,
    tilde,
    torus: Torus = None,
    window: EnumerationWindow = None,
    certify: bool = True,
) -> OrbitalResult:
    """O^{S'}(s'(alpha), f~): outer sum over the twisted-centralizer
    quotient, inner free coset sum with the eta~(det h1) twist."""
    n = alpha.n
    p = field.p
    abar = alpha.conj()
    aab = alpha * abar
    if not aab.is_rational():
        raise ValueError("alpha*conj(alpha) must be F-rational")
    X0 = EMatrix.identity(n, field.u) - aab
    dX0 = X0.det()
    if dX0.is_zero():
        raise ValueError("degenerate orbit: det(1 - alpha conj(alpha)) = 0")
    v_X = _int_or(field.val(dX0), 0)
    v_a = _int_or(field.val(alpha.det()), 0)
    if torus is None:
        torus = Torus.centralizer(field, aab)
    s0 = tilde.radius
    autogrow = window is None
    if window is None:
        m0 = max(1, abs(v_a), abs(v_X), -_int_or(alpha.min_val(field), 0))
        window = EnumerationWindow(
            inner_lo=-(s0 + max(v_X, 0) + 1),
            inner_hi=s0,
            outer_lo=-(m0 + s0 + 1),
            outer_hi=m0 + s0 + 1,
        )
    alpha_f = FMat.from_ematrix(alpha)
    abar_f = FMat.from_ematrix(abar)
    X0_f = FMat.from_ematrix(X0)

    def compute(win: EnumerationWindow):
        stats = EnumStats()
        total = ZERO
        outer_conds = [
            ConjCondition(abar_f, "bar", -s0),
            ConjCondition(alpha_f, "revbar", -s0 + win.inner_lo - win.inner_hi),
            ConjCondition(X0_f, "plain", -s0 - win.inner_hi),
        ]
        det_range = range(-n * s0 - v_X, n * s0 + 1)
        seen = set()
        for H2, H2inv, _d2, _dv2 in enum_pruned(
            field, n, win.outer_lo, win.outer_hi, _OUTER_DET_VALS, outer_conds, stats
        ):
            Y = H2inv.conj().mul(alpha_f).mul(H2).normalized(p)
            X = H2inv.mul(X0_f).mul(H2).normalized(p)
            Z = H2inv.mul(abar_f).mul(H2.conj()).normalized(p)
            Zneg = FMat(Z.n, Z.u, Z.den, [-x for x in Z.a], [-x for x in Z.b])
            inner_conds = [
                ConjCondition(Y, "bar", -s0),
                ConjCondition(X, "lmul", -s0),
            ]
            inner = ZERO
            for R, Rinv, rdivs, rdv in enum_pruned(
                field, n, win.inner_lo, win.inner_hi, det_range, inner_conds, stats
            ):
                if rdivs[0] > s0:
                    continue  # h1^{-1} must stay in the support shell
                blocks = (
                    Rinv.mul(Y).mul(R.conj()),
                    Rinv,
                    X.mul(R.conj()),
                    Zneg,
                )
                val = tilde(field, blocks)
                if not val.is_zero():
                    inner = inner + (val if rdv % 2 == 0 else -val)
            if inner.is_zero():
                continue  # whole orbit contributes zero: no key needed
            key = torus.orbit_key_f([(H2, H2inv)], [None], win.outer_lo, win.outer_hi)
            if key in seen:
                continue
            seen.add(key)
            wgt = torus.weight_f([(H2, H2inv)], [None])
            total = total + inner * wgt
        return total, stats.visited

    value, win, certified, visited, ms = _run_certified(compute, window, certify, autogrow)
    return OrbitalResult(value, win, certified, visited, ms)


def orbital_g_canonical(
    field: FieldSpec,
    beta: EMatrix,
    gfunc: GFunc,
    torus: Torus = None,
    window: EnumerationWindow = None,
    certify: bool = True,
) -> OrbitalResult:
    """O^G(g(beta), f): the chi^{-1} twist enters as c^{-val det w}."""
    n = beta.n
    p = field.p
    bb = beta * beta.conj()
    if not bb.is_rational():
        raise ValueError("beta*conj(beta) must be F-rational")
    W0 = EMatrix.identity(n, field.u) - bb * field.eps
    dW0 = W0.det()
    if dW0.is_zero():
        raise ValueError("degenerate orbit: det(1 - eps beta conj(beta)) = 0")
    v_W = _int_or(field.val(dW0), 0)
    v_eps = _int_or(field.val(field.eps), 0)
    if torus is None:
        torus = Torus.centralizer(field, bb)
    kmin, kmax = gfunc.kmin(), gfunc.kmax()
    # det target per shift k: 2 val det w + v_W = 2nk
    targets = {}
    for k, coeff in gfunc.shifts:
        num = 2 * n * k - v_W
        if num % 2 == 0:
            targets.setdefault(num // 2, []).append((k, coeff))
    autogrow = window is None
    if window is None:
        m0 = max(1, abs(_int_or(field.val(beta.det()), 0)), abs(v_W), -_int_or(beta.min_val(field), 0))
        hi_t = max(targets) - (n - 1) * kmin if targets else kmax + 1
        window = EnumerationWindow(
            inner_lo=kmin,
            inner_hi=max(kmax, hi_t) + 1,
            outer_lo=-(m0 + gfunc.radius() + 1),
            outer_hi=m0 + gfunc.radius() + 1,
        )
    beta_f = FMat.from_ematrix(beta)
    c = Laurent.symbol("c")

    def compute(win: EnumerationWindow):
        stats = EnumStats()
        total = ZERO
        if not targets:
            return ZERO, stats.visited  # parity obstruction: empty support
        det_range = range(min(targets), max(targets) + 1)
        outer_conds = [ConjCondition(beta_f, "bar", kmin - v_eps - win.inner_hi)]
        seen = set()
        for Hg, Hginv, _dg, _dvg in enum_pruned(
            field, n, win.outer_lo, win.outer_hi, _OUTER_DET_VALS, outer_conds, stats
        ):
            B = Hginv.mul(beta_f).mul(Hg.conj()).normalized(p)
            inner_conds = [ConjCondition(B, "lmul", min(kmin - v_eps, kmin))]
            inner = ZERO
            for R, Rinv, rdivs, rdv in enum_pruned(
                field, n, win.inner_lo, win.inner_hi, det_range, inner_conds, stats
            ):
                if rdv not in targets:
                    continue
                bw = B.mul(R.conj())
                acc = ZERO
                for k, coeff in targets[rdv]:
                    if rdivs[-1] >= k and bw.min_val(p) >= max(k - v_eps, k):
                        acc = acc + coeff
                if not acc.is_zero():
                    inner = inner + acc * (c ** (-rdv) if rdv else ONE)
            if inner.is_zero():
                continue  # whole orbit contributes zero: no key needed
            key = torus.orbit_key_f([(Hg, Hginv)], [None], win.outer_lo, win.outer_hi)
            if key in seen:
                continue
            seen.add(key)
            wgt = torus.weight_f([(Hg, Hginv)], [None])
            total = total + inner * wgt
        return total, stats.visited

    value, win, certified, visited, ms = _run_certified(compute, window, certify, autogrow)
    return OrbitalResult(value, win, certified, visited, ms)


def twisted_conj_integral(
    field: FieldSpec,
    M: EMatrix,
    torus: Torus,
    predicate,
    prune_threshold: int,
    window=None,
    certify: bool = True,
) -> OrbitalResult:
    """int over T\\GL_n(E) of predicate(h^{-1} M conj(h)); the reduced forms
    of the elliptic case analysis are all of this shape."""
    n = M.n
    p = field.p
    autogrow = window is None
    if window is None:
        m0 = max(1, abs(_int_or(field.val(M.det()), 0)), -_int_or(M.min_val(field), 0))
        window = EnumerationWindow(0, 0, -(m0 + 1), m0 + 1)
    M_f = FMat.from_ematrix(M)

    def compute(win: EnumerationWindow):
        stats = EnumStats()
        total = ZERO
        conds = [ConjCondition(M_f, "bar", prune_threshold)]
        seen = set()
        for H, Hinv, _d, _dv in enum_pruned(
            field, n, win.outer_lo, win.outer_hi, _OUTER_DET_VALS, conds, stats
        ):
            X = Hinv.mul(M_f).mul(H.conj()).normalized(p)
            if not predicate(X):
                continue
            key = torus.orbit_key_f([(H, Hinv)], [None], win.outer_lo, win.outer_hi)
            if key in seen:
                continue
            seen.add(key)
            total = total + Laurent.rational(torus.weight_f([(H, Hinv)], [None]))
        return total, stats.visited

    value, win, certified, visited, ms = _run_certified(compute, window, certify, autogrow)
    return OrbitalResult(value, win, certified, visited, ms)


# -- general-point pair engines ------------------------------------------------------


def orbital_sprime_at(
    field: FieldSpec,
    s_mat: EMatrix,
    torus: Torus,
    embeddings,
    tilde,
    window: EnumerationWindow = None,
    certify: bool = True,
) -> OrbitalResult:
    """O^{S'}(s, f~) at an arbitrary regular point of S'(F): pairs (h1, h2)
    modulo the stabilizer embedded through `embeddings` = (Q1, Q2)."""
    n = s_mat.n // 2
    p = field.p
    A, B, Cb, D = s_mat.four_blocks()
    for blk, name in ((A, "A"), (B, "B"), (Cb, "C"), (D, "D")):
        if blk.det().is_zero():
            raise ValueError(f"non-regular point of S': singular {name} block")
    s0 = tilde.radius
    v_B = _int_or(field.val(B.det()), 0)
    v_C = _int_or(field.val(Cb.det()), 0)
    autogrow = window is None
    if window is None:
        m0 = max(1, abs(v_B), abs(v_C), -_int_or(s_mat.min_val(field), 0))
        window = EnumerationWindow(
            inner_lo=-(m0 + s0 + 1),
            inner_hi=m0 + s0 + 1,
            outer_lo=-(m0 + s0 + 1),
            outer_hi=m0 + s0 + 1,
        )
    Af, Bf, Cf, Df = (FMat.from_ematrix(x) for x in (A, B, Cb, D))
    Q1, Q2 = (_femb(q) for q in embeddings)

    def compute(win: EnumerationWindow):
        stats = EnumStats()
        total = ZERO
        key_lo = min(win.inner_lo, win.outer_lo)
        key_hi = max(win.inner_hi, win.outer_hi)
        outer_conds = [
            ConjCondition(Df, "bar", -s0),
            ConjCondition(Bf, "lmul", -s0 + win.inner_lo),
            ConjCondition(Cf, "invmul", -s0 - win.inner_hi),
        ]
        seen = set()
        for H2, H2inv, _d2, dv2 in enum_pruned(
            field, n, win.outer_lo, win.outer_hi, _OUTER_DET_VALS, outer_conds, stats
        ):
            B2 = Bf.mul(H2.conj()).normalized(p)
            C2 = H2inv.mul(Cf).normalized(p)
            D2 = H2inv.mul(Df).mul(H2.conj()).normalized(p)
            if D2.min_val(p) < -s0:
                continue
            det_range = range(dv2 - v_C - n * s0, dv2 + v_B + n * s0 + 1)
            inner_conds = [
                ConjCondition(Af, "bar", -s0),
                ConjCondition(B2, "invmul", -s0),
                ConjCondition(C2, "lmul", -s0),
            ]
            for H1, H1inv, _d1, dv1 in enum_pruned(
                field, n, win.inner_lo, win.inner_hi, det_range, inner_conds, stats
            ):
                blocks = (
                    H1inv.mul(Af).mul(H1.conj()),
                    H1inv.mul(B2),
                    C2.mul(H1.conj()),
                    D2,
                )
                val = tilde(field, blocks)
                if val.is_zero():
                    continue
                key = torus.orbit_key_f([(H1, H1inv), (H2, H2inv)], [Q1, Q2], key_lo, key_hi)
                if key in seen:
                    continue
                seen.add(key)
                wgt = torus.weight_f([(H1, H1inv), (H2, H2inv)], [Q1, Q2])
                sign = 1 if (dv1 + dv2) % 2 == 0 else -1
                total = total + val * (sign * wgt)
        return total, stats.visited

    value, win, certified, visited, ms = _run_certified(compute, window, certify, autogrow)
    return OrbitalResult(value, win, certified, visited, ms)


def orbital_g_at(
    field: FieldSpec,
    y_mat: EMatrix,
    torus: Torus,
    embeddings,
    gfunc: GFunc,
    window: EnumerationWindow = None,
    certify: bool = True,
) -> OrbitalResult:
    """O^G(y, f) at an arbitrary regular point of G(F): pairs (g, h) modulo
    the stabilizer; integrand carries chi(g^{-1} h)^{-1}."""
    n = y_mat.n // 2
    p = field.p
    Y11, Y12, Y21, Y22 = y_mat.four_blocks()
    s0 = gfunc.radius()
    kmin = gfunc.kmin()
    v_y = _int_or(field.val(y_mat.det()), 0)
    autogrow = window is None
    if window is None:
        m0 = max(1, abs(v_y), -_int_or(y_mat.min_val(field), 0))
        window = EnumerationWindow(
            inner_lo=-(m0 + s0 + 1),
            inner_hi=m0 + s0 + 1,
            outer_lo=-(m0 + s0 + 1),
            outer_hi=m0 + s0 + 1,
        )
    Yf = [FMat.from_ematrix(x) for x in (Y11, Y12, Y21, Y22)]
    Q1, Q2 = (_femb(q) for q in embeddings)
    c = Laurent.symbol("c")

    def compute(win: EnumerationWindow):
        stats = EnumStats()
        total = ZERO
        key_lo = min(win.inner_lo, win.outer_lo)
        key_hi = max(win.inner_hi, win.outer_hi)
        thr = kmin - win.inner_hi
        outer_conds = [
            ConjCondition(Yf[0], "invmul", thr),
            ConjCondition(Yf[2], "invmul_bar", thr),
        ]
        seen = set()
        for Hg, Hginv, _dg, dvg in enum_pruned(
            field, n, win.outer_lo, win.outer_hi, _OUTER_DET_VALS, outer_conds, stats
        ):
            T11 = Hginv.mul(Yf[0]).normalized(p)
            T12 = Hginv.mul(Yf[1]).normalized(p)
            T21 = Hginv.conj().mul(Yf[2]).normalized(p)
            T22 = Hginv.conj().mul(Yf[3]).normalized(p)
            det_opts = set()
            for k, _cf in gfunc.shifts:
                num = 2 * n * k - v_y + 2 * dvg
                if num % 2 == 0:
                    det_opts.add(num // 2)
            if not det_opts:
                continue
            inner_conds = [
                ConjCondition(T11, "lmul_plain", kmin),
                ConjCondition(T21, "lmul_plain", kmin),
                ConjCondition(T12, "lmul", kmin),
                ConjCondition(T22, "lmul", kmin),
            ]
            for Hh, Hhinv, _dh, dvh in enum_pruned(
                field, n, win.inner_lo, win.inner_hi, sorted(det_opts), inner_conds, stats
            ):
                blocks = (
                    T11.mul(Hh),
                    T12.mul(Hh.conj()),
                    T21.mul(Hh),
                    T22.mul(Hh.conj()),
                )
                acc = ZERO
                for k, coeff in gfunc.shifts:
                    if 2 * dvh != 2 * n * k - v_y + 2 * dvg:
                        continue
                    if all(b.min_val(p) >= k for b in blocks):
                        acc = acc + coeff
                if acc.is_zero():
                    continue
                key = torus.orbit_key_f([(Hg, Hginv), (Hh, Hhinv)], [Q1, Q2], key_lo, key_hi)
                if key in seen:
                    continue
                seen.add(key)
                wgt = torus.weight_f([(Hg, Hginv), (Hh, Hhinv)], [Q1, Q2])
                tw = c ** (dvg - dvh) if dvg != dvh else ONE
                total = total + acc * tw * wgt
        return total, stats.visited

    value, win, certified, visited, ms = _run_certified(compute, window, certify, autogrow)
    return OrbitalResult(value, win, certified, visited, ms)


# -- split-place integrals (m = 2, valuation grids over F) -----------------------------


def offen_representative(field: FieldSpec, lam: int) -> EMatrix:
    """Determinant-one representative with g^{-1} theta(g) antidiagonal
    (pi^lam, -pi^{-lam})."""
    p = Fraction(field.p)
    return EMatrix.from_rational_rows(
        [[-(p ** (-lam)), 1], [Fraction(-1, 2), -(p ** lam) / 2]], field.u
    )


def _profile_m2(entry_vals, detv):
    m = min(entry_vals)
    return (detv - m, m)


def _four_torus(field: FieldSpec, vals, vdet, f, bound, certify):
    c1 = Laurent.symbol("c1")
    c2 = Laurent.symbol("c2")

    def compute(b):
        acc = ZERO
        visited = 0
        i1 = 0  # scalar stabilizer: normalize val(a1) = 0
        for j1 in range(-b, b + 1):
            for i2 in range(-b, b + 1):
                for j2 in range(-b, b + 1):
                    visited += 1
                    ev = (
                        vals[0][0] - i1 + i2,
                        vals[0][1] - i1 + j2,
                        vals[1][0] - j1 + i2,
                        vals[1][1] - j1 + j2,
                    )
                    dv = vdet - i1 - j1 + i2 + j2
                    coeff = f.coeff_at_profile(_profile_m2(ev, dv))
                    if coeff.is_zero():
                        continue
                    tw1 = c1 ** (i1 - i2) if i1 != i2 else ONE
                    tw2 = c2 ** (j1 - j2) if j1 != j2 else ONE
                    acc = acc + coeff * tw1 * tw2
        return acc, visited

    value, visited = compute(bound)
    certified = False
    if certify:
        value2, v2 = compute(bound + 2)
        if value2 != value:
            raise CertificationError(f"four-torus window {bound} undersized")
        visited += v2
        certified = True
    return value, visited, certified


def _entry_vals_m2(field, y):
    vals = [[_int_or(field.val(e), _BIG) for e in row] for row in y.rows]
    if any(v >= _BIG for row in vals for v in row):
        raise ValueError("non-regular split point: vanishing entry")
    return vals


def four_torus_integral(field: FieldSpec, y: EMatrix, f, bound: int = None, certify: bool = True) -> OrbitalResult:
    """O^G(y, f) at a split place: valuation-grid sum over the four torus
    variables modulo the scalar stabilizer, with the chi_1, chi_2 twists."""
    t0 = time.time()
    vals = _entry_vals_m2(field, y)
    vdet = _int_or(field.val(y.det()), 0)
    if bound is None:
        bound = f.support_radius() + max(abs(v) for row in vals for v in row) + abs(vdet) + 2
    value, visited, certified = _four_torus(field, vals, vdet, f, bound, certify)
    return OrbitalResult(value, EnumerationWindow(-bound, bound, -bound, bound), certified, visited, (time.time() - t0) * 1000)


def orbital_split(field: FieldSpec, x1: EMatrix, x2: EMatrix, f, bound: int = None, certify: bool = True) -> OrbitalResult:
    """kappa^{G'} O^{G'}((x1, x2), f') at a split place through the explicit
    form: the eta_0/chi prefactor times the four-torus integral of the
    convolution partner f.  eta_0 stays the symbol e0."""
    t0 = time.time()
    y = x1 * x2.inv()
    yi = x2 * x1.inv()
    _A1, B1, _C1, D1 = y.four_blocks()
    A2, B2, _C2, D2 = yi.four_blocks()
    for blk, name in ((B1, "B1"), (B2, "B2"), (D1, "D1"), (D2, "D2"), (A2, "A2")):
        if blk.det().is_zero():
            raise ValueError(f"non-regular split pair: singular {name}")
    vdet = _int_or(field.val(y.det()), 0)
    c1 = Laurent.symbol("c1")
    c2 = Laurent.symbol("c2")
    e0 = Laurent.symbol("e0")
    pref = (
        e0 ** (-vdet)
        * e0 ** _int_or(field.val((B1 * B2.inv()).det()), 0)
        * c1 ** _int_or(field.val(D1.det()), 0)
        * c2 ** _int_or(field.val(D2.det()), 0)
        * c1 ** (-vdet)
    )
    inner = four_torus_integral(field, y, f, bound=bound, certify=certify)
    return OrbitalResult(pref * inner.value, inner.window, inner.certified, inner.visited, (time.time() - t0) * 1000)


def split_kappa_g(field: FieldSpec, x1: EMatrix, x2: EMatrix) -> Laurent:
    """kappa^G(y) at a split place, read off y^{-1} = x2 x1^{-1}:
    chi_1(det A2) chi_2(det D2)."""
    yi = x2 * x1.inv()
    A2, _B2, _C2, D2 = yi.four_blocks()
    c1 = Laurent.symbol("c1")
    c2 = Laurent.symbol("c2")
    return c1 ** _int_or(field.val(A2.det()), 0) * c2 ** _int_or(field.val(D2.det()), 0)


def period_offen(field: FieldSpec, f, lam: int, bound: int = None, certify: bool = True) -> OrbitalResult:
    """int f(diag(a, b) g_lam) chi1(a)^{-1} chi2(b)^{-1} da db as a
    valuation-grid sum; the double-coset representative is antidiagonal of
    shape lam."""
    t0 = time.time()
    g = offen_representative(field, lam)
    vals = _entry_vals_m2(field, g)
    if bound is None:
        bound = f.support_radius() + lam + 2
    c1 = Laurent.symbol("c1")
    c2 = Laurent.symbol("c2")

    def compute(b):
        acc = ZERO
        visited = 0
        for i in range(-b, b + 1):
            for j in range(-b, b + 1):
                visited += 1
                ev = (vals[0][0] + i, vals[0][1] + i, vals[1][0] + j, vals[1][1] + j)
                coeff = f.coeff_at_profile(_profile_m2(ev, i + j))
                if coeff.is_zero():
                    continue
                acc = acc + coeff * (c1 ** (-i) if i else ONE) * (c2 ** (-j) if j else ONE)
        return acc, visited

    value, visited = compute(bound)
    certified = False
    if certify:
        value2, v2 = compute(bound + 2)
        if value2 != value:
            raise CertificationError(f"period window {bound} undersized")
        visited += v2
        certified = True
    return OrbitalResult(value, EnumerationWindow(-bound, bound, -bound, bound), certified, visited, (time.time() - t0) * 1000)
