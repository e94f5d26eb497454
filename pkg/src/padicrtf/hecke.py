"""Spherical Hecke algebras of GL_m over F and E.

Elements are finite linear combinations of indicator functions of the
K-double cosets K ϖ^λ K, indexed by decreasing integer vectors λ.
Convolution is computed by explicit coset enumeration; the Satake
transform, computed independently through constant-term towers and
one-dimensional lattice counts, serves as the cross-checking oracle
(satake(f*g) = satake(f)satake(g)).

Conventions fixed here once and used everywhere:
  * λ* = (-λ_m, ..., -λ_1);
  * the twisted involution sends T_λ to C^{-|λ|} T_{λ*}, where C is the
    twisting character's value on the uniformizer (this is the reading of
    f -> f^vee * (char of det) under which the minus eigenspace has
    vanishing split periods, which the harness verifies);
  * vol(K) = 1, and t denotes the positive square root of the residue
    cardinality q (q = p over F, p^2 over E), reduced via t^2 = q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .laurent import Laurent, ONE, ZERO
from .qfield import FieldSpec
from .grpspace import EMatrix
from .integrate.hnf import divisor_profile, double_coset_reps


def is_dominant(lam) -> bool:
    return all(a >= b for a, b in zip(lam, lam[1:]))


def dual_lambda(lam):
    return tuple(-x for x in reversed(lam))


@dataclass(frozen=True)
class HeckeElement:
    field_tag: str  # "F" or "E"
    m: int
    coeffs: tuple  # sorted tuple of (lambda, Laurent)

    @staticmethod
    def make(field_tag, m, mapping) -> "HeckeElement":
        clean = {}
        for lam, c in mapping.items():
            lam = tuple(int(x) for x in lam)
            if len(lam) != m or not is_dominant(lam):
                raise ValueError(f"bad dominant vector {lam}")
            c = c if isinstance(c, Laurent) else Laurent.rational(c)
            if not c.is_zero():
                clean[lam] = clean.get(lam, ZERO) + c
        return HeckeElement(field_tag, m, tuple(sorted((k, v) for k, v in clean.items() if not v.is_zero())))

    @staticmethod
    def unit(field_tag, m) -> "HeckeElement":
        return HeckeElement.make(field_tag, m, {(0,) * m: ONE})

    @staticmethod
    def basis(field_tag, lam) -> "HeckeElement":
        return HeckeElement.make(field_tag, len(lam), {tuple(lam): ONE})

    def as_dict(self):
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self):
        return [lam for lam, _ in self.coeffs]

    def support_radius(self) -> int:
        """Largest |entry| over the support; 0 for the unit."""
        r = 0
        for lam, _ in self.coeffs:
            for x in lam:
                r = max(r, abs(x))
        return r

    def coeff(self, lam) -> Laurent:
        for l, c in self.coeffs:
            if l == tuple(lam):
                return c
        return ZERO

    def coeff_at_profile(self, profile) -> Laurent:
        return self.coeff(profile)

    def __add__(self, other):
        assert (self.field_tag, self.m) == (other.field_tag, other.m)
        d = dict(self.coeffs)
        for lam, c in other.coeffs:
            d[lam] = d.get(lam, ZERO) + c
        return HeckeElement.make(self.field_tag, self.m, d)

    def __sub__(self, other):
        return self + other.scale(Laurent.rational(-1))

    def scale(self, c) -> "HeckeElement":
        c = c if isinstance(c, Laurent) else Laurent.rational(c)
        return HeckeElement.make(self.field_tag, self.m, {lam: v * c for lam, v in self.coeffs})

    def to_json(self):
        from .laurent import serialize_laurent

        return [
            {"lambda": list(lam), "coeff": serialize_laurent(c)} for lam, c in self.coeffs
        ]


def hecke_from_json(data, field_tag, m) -> HeckeElement:
    from .laurent import laurent_from_string_parts

    d = {}
    for item in data:
        lam = tuple(item["lambda"])
        c = item["coeff"]
        if isinstance(c, dict):
            cv = laurent_from_string_parts(c)
        else:
            cv = Laurent.rational(Fraction(str(c)))
        d[lam] = d.get(lam, ZERO) + cv
    return HeckeElement.make(field_tag, m, d)


def _e_side(f: HeckeElement) -> bool:
    return f.field_tag == "E"


def _q_of(field: FieldSpec, tag: str) -> int:
    return field.p ** 2 if tag == "E" else field.p


def uniformizer_power(field: FieldSpec, m: int, lam) -> EMatrix:
    return EMatrix.diag([field.e(Fraction(field.p) ** k) for k in lam])


# -- convolution by coset enumeration ----------------------------------------


_YINV_CACHE = {}


def _yinv_fmats(field, m, lam, e_side):
    from .integrate.fmat import FMat

    key = (field.p, str(field.u), m, tuple(lam), e_side)
    if key not in _YINV_CACHE:
        reps = double_coset_reps(field, m, lam, e_side=e_side)
        _YINV_CACHE[key] = [
            FMat.from_ematrix(rep.mat.inv()).normalized(field.p) for rep in reps
        ]
    return _YINV_CACHE[key]


def convolve(field: FieldSpec, f: HeckeElement, g: HeckeElement) -> HeckeElement:
    """(f*g)(x) = int f(y) g(y^{-1} x) dy, vol(K) = 1, by enumerating left
    cosets of the double cosets in the support of f."""
    from .integrate.fmat import FMat

    if (f.field_tag, f.m) != (g.field_tag, g.m):
        raise ValueError("convolution needs matching field and size")
    m = f.m
    if m > 2:
        raise ValueError("convolution is enumerated for m <= 2")
    e_side = _e_side(f)
    p = field.p
    out = {}
    for lam, cf in f.coeffs:
        yinvs = _yinv_fmats(field, m, lam, e_side)
        for mu, cg in g.coeffs:
            lo = lam[-1] + mu[-1]
            hi = lam[0] + mu[0]
            tot = sum(lam) + sum(mu)
            for nu in _dominant_vectors(m, lo, hi, tot):
                xf = FMat.from_ematrix(uniformizer_power(field, m, nu))
                count = 0
                for yi in yinvs:
                    t = yi.mul(xf)
                    if m == 1:
                        prof = (t.min_val(p),)
                    else:
                        mv = t.min_val(p)
                        prof = (t.det_val(p) - mv, mv)
                    if prof == mu:
                        count += 1
                if count:
                    out[nu] = out.get(nu, ZERO) + cf * cg * count
    return HeckeElement.make(f.field_tag, m, out)


def _dominant_vectors(m, lo, hi, total):
    def rec(prefix, remaining, cap):
        if remaining == 1:
            x = total - sum(prefix)
            if lo <= x <= min(cap, hi):
                yield prefix + (x,)
            return
        for x in range(min(cap, hi), lo - 1, -1):
            rest_min = lo * (remaining - 1)
            rest_max = x * (remaining - 1)
            need = total - sum(prefix) - x
            if rest_min <= need <= rest_max:
                yield from rec(prefix + (x,), remaining - 1, x)

    yield from rec((), m, hi)


# -- Satake transform ----------------------------------------------------------


def constant_term(field: FieldSpec, f: HeckeElement, parts) -> "HeckeTensor":
    """Normalized constant term along the block-upper-triangular parabolic
    with Levi GL_{m1} x GL_{m2}: f^Q(x) = delta^{-1/2}(x) \\int f(ux) du."""
    m1, m2 = parts
    if m1 + m2 != f.m:
        raise ValueError("partition mismatch")
    e_side = _e_side(f)
    q = _q_of(field, f.field_tag)
    p = field.p
    out = {}
    supp = dict(f.coeffs)
    if not supp:
        return HeckeTensor(f.field_tag, m1, m2, ())
    lam_min = min(l[-1] for l in supp)
    lam_max = max(l[0] for l in supp)
    totals = {sum(l) for l in supp}
    fast_scalar = m1 == 1 and m2 == 1
    for mu in _dominant_box(m1, lam_min, lam_max):
        for nu in _dominant_box(m2, lam_min, lam_max):
            if sum(mu) + sum(nu) not in totals:
                continue
            if fast_scalar:
                # [[p^a, v], [0, p^b]]: profile determined by val(v) alone
                a, b = mu[0], nu[0]
                acc2 = ZERO
                vol2 = ZERO
                # v ranges over p^{lam_min} o mod p^{min(a,b)}; group by val(v)
                kk = min(a, b)
                shells = list(range(lam_min, kk)) + [None]  # None: v in p^kk o
                for shell in shells:
                    if shell is None:
                        mv = min(a, b)
                        volsh = Fraction(1, q) ** max(lam_min, kk)
                    else:
                        mv = min(a, b, shell)
                        volsh = (Fraction(1, q) ** shell) * (1 - Fraction(1, q))
                    cv = supp.get((a + b - mv, mv))
                    if cv is not None:
                        acc2 = acc2 + cv * Laurent.rational(volsh)
                if acc2.is_zero():
                    continue
                jac = Laurent.rational(Fraction(q) ** (m1 * sum(nu)))
                tpow = m2 * sum(mu) - m1 * sum(nu)
                delta_half = Laurent.symbol("t", tpow) if tpow else ONE
                term = (acc2 * jac * delta_half).reduce_square("t", q)
                if not term.is_zero():
                    out[(mu, nu)] = out.get((mu, nu), ZERO) + term
                continue
            acc = ZERO
            # v-block residues: entry (i, j) modulo p^{min(mu_i, nu_j)},
            # bounded below by lam_min.
            entry_sets = []
            vol_exp = 0
            for i in range(m1):
                for j in range(m2):
                    kk = min(mu[i], nu[j])
                    lo = lam_min
                    vol_exp += max(lo, kk)
                    entry_sets.append(_residue_reps(field, lo, kk, e_side))
            import itertools as _it

            for combo in _it.product(*entry_sets):
                rows = []
                for i in range(m1):
                    row = [field.e(Fraction(p) ** mu[i]) if i == r else field.e(0) for r in range(m1)]
                    row.extend(combo[i * m2 + j] for j in range(m2))
                    rows.append(row)
                for j in range(m2):
                    row = [field.e(0)] * m1
                    row.extend(field.e(Fraction(p) ** nu[j]) if j == r else field.e(0) for r in range(m2))
                    rows.append(row)
                mat = EMatrix(rows)
                prof = divisor_profile(mat, field)
                cv = supp.get(prof)
                if cv is not None:
                    acc = acc + cv
            if acc.is_zero():
                continue
            # each residue class has volume q^{-max(lam_min, min(mu_i, nu_j))}
            # in dv; the substitution v = u * pi^nu costs du = q^{m1 |nu|} dv
            vol = Laurent.rational(Fraction(1, q) ** vol_exp) * Laurent.rational(
                Fraction(q) ** (m1 * sum(nu))
            )
            tpow = m2 * sum(mu) - m1 * sum(nu)
            delta_half = Laurent.symbol("t", tpow) if tpow else ONE
            term = acc * vol * delta_half
            term = term.reduce_square("t", q)
            if not term.is_zero():
                out[(mu, nu)] = out.get((mu, nu), ZERO) + term
    return HeckeTensor(f.field_tag, m1, m2, tuple(sorted(out.items())))


def _residue_reps(field: FieldSpec, lo: int, hi: int, e_side: bool):
    """Representatives of p^lo o / p^hi o (single ring entry)."""
    p = field.p
    if hi <= lo:
        return [field.e(0)]
    span = p ** (hi - lo)
    scale = Fraction(p) ** lo
    vals = [Fraction(t) * scale for t in range(span)]
    if not e_side:
        return [field.e(v) for v in vals]
    return [field.e(v, w) for v in vals for w in vals]


def _dominant_box(m, lo, hi):
    import itertools as _it

    for tup in _it.product(range(hi, lo - 1, -1), repeat=m):
        if is_dominant(tup):
            yield tup


@dataclass(frozen=True)
class HeckeTensor:
    """Element of H(GL_{m1}) (x) H(GL_{m2})."""

    field_tag: str
    m1: int
    m2: int
    coeffs: tuple  # ((mu, nu), Laurent)

    def as_dict(self):
        return dict(self.coeffs)

    def factor_elements(self):
        """As a list of (coeff, T_mu, T_nu) triples."""
        return [
            (c, HeckeElement.basis(self.field_tag, mu), HeckeElement.basis(self.field_tag, nu))
            for (mu, nu), c in self.coeffs
        ]


def satake(field: FieldSpec, f: HeckeElement, var_offset: int = 0) -> Laurent:
    """Algebra embedding into symmetric Laurent polynomials in X1..Xm over
    Z[t, t^{-1}], t^2 = q, computed by peeling one GL_1 at a time through
    normalized constant terms."""
    q = _q_of(field, f.field_tag)
    if f.m == 1:
        out = ZERO
        for (k,), c in f.coeffs:
            mono = Laurent.symbol(f"X{var_offset + 1}", k) if k else ONE
            out = out + c * mono
        return out.reduce_square("t", q)
    ct = constant_term(field, f, (1, f.m - 1))
    out = ZERO
    for (mu, nu), c in ct.coeffs:
        head = Laurent.symbol(f"X{var_offset + 1}", mu[0]) if mu[0] else ONE
        tail = satake(field, HeckeElement.basis(f.field_tag, nu), var_offset=var_offset + 1)
        out = out + c * head * tail
    return out.reduce_square("t", q)


def satake_tensor(field: FieldSpec, t: HeckeTensor) -> Laurent:
    out = ZERO
    for (mu, nu), c in t.coeffs:
        s1 = satake(field, HeckeElement.basis(t.field_tag, mu), var_offset=0)
        s2 = satake(field, HeckeElement.basis(t.field_tag, nu), var_offset=t.m1)
        out = out + c * s1 * s2
    return out.reduce_square("t", _q_of(field, t.field_tag))


# -- involutions ---------------------------------------------------------------


def dual_twist(f: HeckeElement, cval: Laurent) -> HeckeElement:
    """f -> f^vee (char of det), on the basis T_λ -> C^{-|λ|} T_{λ*}."""
    out = {}
    for lam, c in f.coeffs:
        lam2 = dual_lambda(lam)
        factor = cval ** (-sum(lam)) if sum(lam) else ONE
        out[lam2] = out.get(lam2, ZERO) + c * factor
    return HeckeElement.make(f.field_tag, f.m, out)


def pm_split(f: HeckeElement, cval: Laurent):
    half = Laurent.rational(Fraction(1, 2))
    d = dual_twist(f, cval)
    plus = (f + d).scale(half)
    minus = (f - d).scale(half)
    return plus, minus


def bc(field: FieldSpec, f1: HeckeElement, f2: HeckeElement) -> HeckeElement:
    """Base change at a split place: plain convolution."""
    return convolve(field, f1, f2)


def dagger(f: HeckeElement, chichic_val: Laurent) -> HeckeElement:
    """g -> f(conj-transpose-inverse) * (chi chi^c)(g); same basis
    combinatorics as dual_twist since K-double cosets are stable under
    transpose and Galois."""
    if f.field_tag != "E":
        raise ValueError("dagger acts on functions over E")
    return dual_twist(f, chichic_val)


def chi_convolution(field: FieldSpec, f1: HeckeElement, f2: HeckeElement, c12: Laurent) -> HeckeElement:
    """f(g) = int f1(gh) f2(h) (chi1 chi2)^{-1}(h) dh = f1 * dual_twist(f2)."""
    return convolve(field, f1, dual_twist(f2, c12))
