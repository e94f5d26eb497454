r"""Stabilizer tori and their coset combinatorics.

The regular stabilizers occurring here are F^x (n = 1) and the unit group
of a quadratic algebra F[J], J^2 = d (n = 2), which covers split,
unramified and ramified uniformly; d may be a square in Q_p even when it
is not one in Q.  The maximal compact T_c is normalized to volume 1, so
integrating a right-K-invariant function over T\G sums over T-orbits of
cosets gK weighted by the index [T_c : T_c ∩ gKg^{-1}].

Orbit deduplication uses exact rational torus elements: Q is dense in Q_p,
so rational translates reach every p-adic translate of a coset.  The
lattice part of T is generated by p (and, in the Q_p-split case, an exact
rational element whose two eigenvalue valuations differ by one, built from
a Hensel approximation to sqrt(d)).  All hot-path arithmetic runs on
integer fast matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from ..grpspace import EMatrix
from ..qfield import FieldSpec, INF, rational_is_square, vp, _sqrt_mod_p, _hensel_sqrt
from .fmat import FMat, fmat_coset_key, vp_int

_VINF = 10 ** 9


def _strip_even_p(x: Fraction, p: int):
    """x = p^{2k} * d with val(d) in {0, 1}; returns (d, k)."""
    v = vp(x, p)
    k = (v - (v % 2)) // 2
    return x / Fraction(p) ** (2 * k), k


@dataclass(frozen=True)
class PairEmbedding:
    """Conjugators (Q1, Q2) realizing t -> (Q1 t Q1^{-1}, Q2 t Q2^{-1})."""

    Q1: object
    Q2: object


class Torus:
    """Maximal torus in GL_n(F): scalars (n=1) or F[J]^x (n=2)."""

    def __init__(self, field: FieldSpec, n: int, J: EMatrix = None, d: Fraction = None):
        self.field = field
        self.n = n
        self.J = J
        self.d = d
        self._res_cache = {}
        self._lat_cache = {}
        if n == 1 or J is None:
            self.kind = "scalar"
            self.qp_class = "split"
            self.sqrt_d = None
            self.J_f = None
            return
        self.kind = "quadratic"
        self.J_f = FMat.from_ematrix(J)
        p = field.p
        if vp(d, p) % 2 == 1:
            self.qp_class = "ramified"
            self.sqrt_d = None
        elif rational_is_square(d, p):
            self.qp_class = "split"
            self.sqrt_d = _rational_sqrt_approx(d, p, precision=12)
        else:
            self.qp_class = "unramified"
            self.sqrt_d = None

    @staticmethod
    def centralizer(field: FieldSpec, A: EMatrix) -> "Torus":
        """The torus F[A]^x for A regular semisimple over F (n <= 2)."""
        if not A.is_rational():
            raise ValueError("centralizer torus needs an F-rational matrix")
        if A.n == 1:
            return Torus(field, 1)
        if A.n != 2:
            raise ValueError("only n <= 2 tori are supported")
        cp = A.char_poly()
        tr = -cp[1].a
        disc4 = tr * tr / 4 - cp[0].a
        if disc4 == 0:
            raise ValueError("non-regular matrix has no torus centralizer here")
        d, k = _strip_even_p(disc4, field.p)
        w1 = Fraction(field.p) ** k
        J = (A - EMatrix.scalar(field.e(tr / 2), 2)) * (Fraction(1) / w1)
        assert J * J == EMatrix.scalar(field.e(d), 2)
        return Torus(field, 2, J, d)

    def element(self, x, y=0) -> EMatrix:
        m = EMatrix.scalar(self.field.e(Fraction(x)), self.n)
        if self.kind == "quadratic" and y:
            m = m + self.J * Fraction(y)
        return m

    def contains(self, t: EMatrix) -> bool:
        if self.kind == "scalar":
            return t.n == self.n and t == EMatrix.scalar(t.rows[0][0], self.n)
        x = t.trace().a / 2
        rem = t - EMatrix.scalar(self.field.e(x), 2)
        for i in range(2):
            for j in range(2):
                if not self.J.rows[i][j].is_zero():
                    y = rem.rows[i][j].a / self.J.rows[i][j].a
                    return rem == self.J * y
        return rem.is_zero()

    # -- weights -----------------------------------------------------------

    def _effective(self, pairs, embeddings):
        """Q^{-1}-adjusted (X = h^{-1} QJQ^{-1} h) conjugates of J."""
        out = []
        for (H, Hinv), Q in zip(pairs, embeddings):
            if Q is None:
                out.append(Hinv.mul(self.J_f).mul(H))
            else:
                Qf, Qfinv = Q
                out.append(Hinv.mul(Qf).mul(self.J_f).mul(Qfinv).mul(H))
        return out

    def congruence_level_f(self, pairs, embeddings) -> int:
        if self.kind == "scalar":
            return 0
        p = self.field.p
        level = 0
        for X in self._effective(pairs, embeddings):
            mv = X.min_val(p)
            level = max(level, -mv)
        return max(level, 0)

    def weight_f(self, pairs, embeddings) -> int:
        if self.kind == "scalar":
            return 1
        n0 = self.congruence_level_f(pairs, embeddings)
        if n0 == 0:
            return 1
        p = self.field.p
        if self.qp_class == "split":
            return (p - 1) * p ** (n0 - 1)
        if self.qp_class == "unramified":
            return (p + 1) * p ** (n0 - 1)
        return p ** n0

    def weight(self, h: EMatrix) -> int:
        return self.weight_f([_fpair(h)], [None])

    def weight_pair(self, hs, embeddings) -> int:
        pairs = [_fpair(h) for h in hs]
        embs = [None if Q is None else (_fq(Q)) for Q in embeddings]
        return self.weight_f(pairs, embs)

    def weight_bruteforce(self, h: EMatrix, extra: int = 2) -> int:
        """Oracle: the same index by counting unit residues (x, y) mod p^M."""
        if self.kind == "scalar":
            return 1
        p = self.field.p
        M = self.congruence_level_f([_fpair(h)], [None]) + extra
        mod = p ** M
        total = 0
        fixing = 0
        X = h.inv() * self.J * h
        dv = vp(self.d, p)
        dunit = (self.d.numerator * pow(self.d.denominator, -1, mod)) % mod if dv == 0 else None
        for x in range(mod):
            for y in range(mod):
                if self.qp_class == "ramified":
                    ok = x % p != 0
                else:
                    ok = (x * x - dunit * y * y) % p != 0
                if not ok:
                    continue
                total += 1
                if all(
                    (e * Fraction(y)).is_zero() or self.field.val(e * Fraction(y)) >= 0
                    for row in X.rows
                    for e in row
                ):
                    fixing += 1
        assert fixing and total % fixing == 0
        return total // fixing

    # -- lattice part and compact residues -----------------------------------

    def lattice_generators(self):
        p = self.field.p
        gens = [EMatrix.scalar(self.field.e(p), self.n)]
        if self.kind == "scalar":
            return gens
        if self.qp_class == "ramified":
            return [self.J]
        if self.qp_class == "split":
            s = self.sqrt_d
            gens.append(self.element(Fraction(p + 1, 2), Fraction(p - 1, 2) / s))
        return gens

    def _lattice_table(self, span: int):
        """Translate candidates t with their det valuations, as FMats.

        Elements are tracked in (x, y) coordinates of F[J] and digit-
        truncated modulo a depth well beyond the window: a torus element
        congruent to t that deep translates every in-window coset the same
        way, and the truncation keeps all integers machine-scale."""
        key = span
        if key in self._lat_cache:
            return self._lat_cache[key]
        p = self.field.p
        j0 = 0
        if self.kind == "quadratic":
            mv = self.J_f.min_val(p)
            j0 = max(0, -mv)
        cap = 2 * span + j0 + 6
        if self.kind == "scalar":
            gens_xy = []
        elif self.qp_class == "ramified":
            gens_xy = [(Fraction(0), Fraction(1))]
        elif self.qp_class == "split":
            s = self.sqrt_d
            gens_xy = [(Fraction(p + 1, 2), Fraction(p - 1, 2) / s)]
        else:
            gens_xy = []
        d = self.d if self.d is not None else Fraction(0)
        # powers of the extra generator in both directions
        powers = {0: (Fraction(1), Fraction(0))}
        if gens_xy:
            g = gens_xy[0]
            gi = _l_inv_xy(g, d)
            for e in range(1, span + 1):
                powers[e] = _l_mul_xy(powers[e - 1], g, d)
                powers[-e] = _l_mul_xy(powers[-(e - 1)], gi, d)
        ems = []
        from ..qfield import reduce_mod_pk

        for k in range(-span, span + 1):
            pk = Fraction(p) ** k
            for e in sorted(powers):
                x, y = powers[e]
                x = reduce_mod_pk(x * pk, p, cap)
                y = reduce_mod_pk(y * pk, p, cap)
                if x == 0 and y == 0:
                    continue
                t = self.element(x, y)
                if t.det().is_zero():
                    continue
                tf = FMat.from_ematrix(t)
                dv = tf.det_val(p)
                if dv >= cap - span:
                    continue  # truncation artifact; true element acts off-window
                ems.append((tf, dv))
        self._lat_cache[key] = ems
        return ems

    def compact_residues(self, M: int):
        """Exact units covering T_c modulo scalar units and depth p^M
        (scalar units fix every coset)."""
        M = max(1, M)
        if self.kind == "scalar":
            return [FMat.from_ematrix(EMatrix.identity(self.n, self.field.u))]
        if M in self._res_cache:
            return self._res_cache[M]
        p = self.field.p
        mod = p ** M
        out = []
        dv = vp(self.d, p)
        dunit = (self.d.numerator * pow(self.d.denominator, -1, mod)) % mod if dv == 0 else None
        for y in range(mod):
            if self.qp_class != "ramified" and dv == 0 and (1 - dunit * y * y) % p == 0:
                continue
            out.append(FMat.from_ematrix(self.element(1, y)))
        for x in range(0, mod, p):
            if self.qp_class == "ramified":
                continue
            if dv == 0 and (x * x - dunit) % p == 0:
                continue
            cand = self.element(x, 1)
            if not cand.det().is_zero():
                out.append(FMat.from_ematrix(cand))
        self._res_cache[M] = out
        return out

    # -- canonical orbit keys --------------------------------------------------

    def orbit_key_f(self, pairs, embeddings, window_lo: int, window_hi: int):
        """Canonical key of the T-orbit of the coset tuple (mod K on the
        right): minimal tuple of coset keys over translates staying inside
        the divisor window."""
        p = self.field.p
        n = self.n
        span = window_hi - window_lo + 2
        level = max(1, self.congruence_level_f(pairs, embeddings))
        residues = self.compact_residues(level)
        lattice = self._lattice_table(span)
        hs = [H for H, _ in pairs]
        dvs = [H.det_val(p) for H in hs]
        qj = []
        for Q in embeddings:
            qj.append(None if Q is None else Q)
        best = None
        for tl, tdv in lattice:
            if any(not (n * window_lo <= tdv + dv <= n * window_hi) for dv in dvs):
                continue
            for tc in residues:
                tt = tl.mul(tc)
                keys = []
                ok = True
                for H, Q, dv in zip(hs, qj, dvs):
                    if Q is None:
                        trans = tt.mul(H)
                    else:
                        Qf, Qfinv = Q
                        trans = Qf.mul(tt).mul(Qfinv).mul(H)
                    mv = trans.min_val(p)
                    dvt = tdv + dv
                    if mv < window_lo or dvt - mv > window_hi:
                        ok = False
                        break
                    keys.append(fmat_coset_key(trans, p))
                if ok:
                    tup = tuple(keys)
                    if best is None or tup < best:
                        best = tup
        if best is None:
            raise AssertionError("orbit key search found no in-window translate")
        return best

    def orbit_key(self, hs, embeddings, window_lo: int, window_hi: int):
        pairs = [_fpair(h) for h in hs]
        embs = [None if Q is None else _fq(Q) for Q in embeddings]
        return self.orbit_key_f(pairs, embs, window_lo, window_hi)


def _fpair(h: EMatrix):
    return (FMat.from_ematrix(h), FMat.from_ematrix(h.inv()))


def _fq(Q: EMatrix):
    return (FMat.from_ematrix(Q), FMat.from_ematrix(Q.inv()))


def _l_mul_xy(z, w, d):
    return (z[0] * w[0] + d * z[1] * w[1], z[0] * w[1] + z[1] * w[0])


def _l_inv_xy(z, d):
    nrm = z[0] * z[0] - d * z[1] * z[1]
    return (z[0] / nrm, -z[1] / nrm)


def _rational_sqrt_approx(d: Fraction, p: int, precision: int) -> Fraction:
    """Exact rational s with s^2 = d mod p^precision (d a unit square in
    Z_p); the exact root if d is a square in Q."""
    num, den = d.numerator, d.denominator
    rn = _int_sqrt_exact(abs(num))
    rd = _int_sqrt_exact(den)
    if rn is not None and rd is not None and num > 0:
        return Fraction(rn, rd)
    mod = p ** precision
    d0 = (num * pow(den, -1, mod)) % mod
    r0 = _sqrt_mod_p(d0 % p, p)
    return Fraction(_hensel_sqrt(r0, d0, p, precision))


def _int_sqrt_exact(n: int):
    import math

    r = math.isqrt(n)
    return r if r * r == n else None
