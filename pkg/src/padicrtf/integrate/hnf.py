"""Hermite normal form over the p-local integers of F or E, and coset
enumeration for GL_m.

A right coset g*GL_m(o) is the lattice spanned by the columns of g; its
canonical representative is upper triangular with p-power diagonal and
off-diagonal entries reduced to truncated p-adic digit expansions.  The
multiset of diagonal-and-minor valuations gives the elementary divisors,
which index the K-double cosets.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from ..grpspace import EMatrix
from ..qfield import EElement, FieldSpec, INF, reduce_mod_pk


def _reduce_entry_mod(x: EElement, p: int, k: int) -> EElement:
    """Reduce an E-entry modulo p^k * o_E, componentwise (u is a unit)."""
    return EElement(reduce_mod_pk(x.a, p, k), reduce_mod_pk(x.b, p, k), x.u)


def hnf_rep(mat: EMatrix, field: FieldSpec) -> EMatrix:
    """Canonical representative of mat*GL(o): upper triangular, diagonal
    p^{a_i}, entry (i, j>i) a truncated digit expansion modulo p^{a_i}."""
    p = field.p
    m = mat.n
    if m != mat.m:
        raise ValueError("square matrices only")
    cols = [list(c) for c in zip(*mat.rows)]  # column-major work array

    def val(x):
        return field.val(x)

    # Triangularize bottom-up: pivot for row r lives in column r.
    for r in range(m - 1, -1, -1):
        piv_c, piv_v = None, INF
        for c in range(r + 1):
            v = val(cols[c][r])
            if v < piv_v:
                piv_c, piv_v = c, v
        if piv_c is None or piv_v is INF:
            raise ZeroDivisionError("singular matrix has no coset")
        cols[r], cols[piv_c] = cols[piv_c], cols[r]
        pivot = cols[r][r]
        unit = pivot * (Fraction(p) ** (-piv_v))
        scale = unit.inv()  # in o^x
        cols[r] = [x * scale for x in cols[r]]
        for c in range(r):
            t = cols[c][r]
            if t.is_zero():
                continue
            f = t * (Fraction(p) ** (-piv_v))  # in o since piv_v is minimal
            cols[c] = [x - f * y for x, y in zip(cols[c], cols[r])]

    # Digit-reduce above the diagonal, inner columns first.
    diag_val = [val(cols[i][i]) for i in range(m)]
    for j in range(m):
        for i in range(j - 1, -1, -1):
            x = cols[j][i]
            k = diag_val[i]
            red = _reduce_entry_mod(x, p, k)
            t = x - red
            if t.is_zero():
                continue
            f = t * (Fraction(p) ** (-k))  # in o by construction
            cols[j] = [a - f * b for a, b in zip(cols[j], cols[i])]

    return EMatrix(list(zip(*[tuple(c) for c in cols])))


def hnf_key(mat: EMatrix, field: FieldSpec):
    """Hashable canonical key of the coset mat*GL(o)."""
    h = hnf_rep(mat, field)
    return tuple((x.a, x.b) for row in h.rows for x in row)


def divisor_profile(mat: EMatrix, field: FieldSpec):
    """Elementary divisors (decreasing), via minor-valuation sums: the sum of
    the k smallest divisors is the minimal valuation over k x k minors."""
    m = mat.n
    mins = []
    for k in range(1, m + 1):
        best = INF
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(m), k):
                sub = EMatrix([[mat.rows[r][c] for c in cols] for r in rows])
                v = field.val(sub.det())
                if v < best:
                    best = v
        if best is INF:
            raise ZeroDivisionError("singular matrix")
        mins.append(best)
    asc = [mins[0]]
    for k in range(1, m):
        asc.append(mins[k] - mins[k - 1])
    return tuple(sorted(asc, reverse=True))


class CosetRep:
    """A canonical coset representative with cached divisor data."""

    __slots__ = ("mat", "divisors", "det_val")

    def __init__(self, mat: EMatrix, divisors):
        self.mat = mat
        self.divisors = divisors
        self.det_val = sum(divisors)

    def __repr__(self):
        return f"CosetRep({self.mat!r}, divisors={self.divisors})"


def _entry_residues(field: FieldSpec, lo: int, hi: int, e_side: bool):
    """Representatives of p^lo * o / p^hi * o (componentwise digits)."""
    p = field.p
    if hi <= lo:
        return [field.e(0)]
    span = p ** (hi - lo)
    scale = Fraction(p) ** lo
    vals = [Fraction(t) * scale for t in range(span)]
    if not e_side:
        return [field.e(v) for v in vals]
    return [field.e(v, w) for v in vals for w in vals]


def enum_cosets(field: FieldSpec, m: int, lo: int, hi: int, e_side: bool = True):
    """All cosets g*GL_m(o) with every elementary divisor in [lo, hi],
    in a fixed deterministic order.

    Enumerates canonical triangular forms with diagonal valuations in the
    window and filters by the divisor profile, which can dip below the
    diagonal ones.
    """
    if hi < lo:
        return
    p = field.p
    one = Fraction(1)
    for diag in itertools.product(range(lo, hi + 1), repeat=m):
        diag_entries = [field.e(Fraction(p) ** a) for a in diag]
        pos = [(i, j) for j in range(m) for i in range(j)]
        residue_sets = [_entry_residues(field, lo, diag[i], e_side) for i, _ in pos]
        for combo in itertools.product(*residue_sets):
            rows = [[field.e(0)] * m for _ in range(m)]
            for i in range(m):
                rows[i][i] = diag_entries[i]
            for (i, j), x in zip(pos, combo):
                rows[i][j] = x
            mat = EMatrix(rows)
            profile = divisor_profile(mat, field)
            if profile[0] <= hi and profile[-1] >= lo:
                yield CosetRep(mat, profile)


def enum_double_coset(field: FieldSpec, m: int, lam, e_side: bool = True):
    """Left-coset representatives of K ϖ^λ K (λ dominant, decreasing)."""
    lam = tuple(lam)
    lo, hi = min(lam), max(lam)
    for rep in enum_cosets(field, m, lo, hi, e_side):
        if rep.divisors == lam:
            yield rep


_DC_CACHE = {}


def double_coset_reps(field: FieldSpec, m: int, lam, e_side: bool = True):
    """Cached list of left-coset reps of a K-double coset.  Sizes m > 2
    are supported for central shifts of minuscule shapes, whose cosets are
    residue subspaces; small sizes enumerate Hermite forms directly."""
    key = (field.p, str(field.u), m, tuple(lam), e_side)
    if key not in _DC_CACHE:
        lam = tuple(lam)
        if m <= 2:
            _DC_CACHE[key] = list(enum_double_coset(field, m, lam, e_side))
        else:
            shape = _is_shifted_minuscule(lam)
            if shape is None:
                raise NotImplementedError(
                    f"double coset {lam} on GL_{m}: only shifted minuscule shapes"
                )
            base, k = shape
            reps = _minuscule_reps(field, m, k, e_side)
            if base:
                from fractions import Fraction

                scale = Fraction(field.p) ** base
                reps = [
                    CosetRep(r.mat * scale, tuple(x + base for x in r.divisors))
                    for r in reps
                ]
            _DC_CACHE[key] = reps
    return _DC_CACHE[key]


def _residue_field_elements(field: FieldSpec, e_side: bool):
    p = field.p
    if not e_side:
        return [(a, 0) for a in range(p)]
    return [(a, b) for a in range(p) for b in range(p)]


def _gf_mul(x, y, u, p):
    return ((x[0] * y[0] + u * x[1] * y[1]) % p, (x[0] * y[1] + x[1] * y[0]) % p)


def _minuscule_reps(field: FieldSpec, m: int, k: int, e_side: bool):
    """Left-coset reps of K pi^{(1^k, 0^{m-k})} K: lattices with quotient
    (o/p)^k, i.e. (m-k)-dimensional subspaces of the residue space, each
    lifted to a Hermite form."""
    p = field.p
    u = int(field.u) % p if e_side else 0
    elems = _residue_field_elements(field, e_side)
    dim = m - k
    reps = []
    import itertools as _it

    for pivots in _it.combinations(range(m), dim):
        free_rows = [r for r in range(m) if r not in pivots]
        # entries allowed at (row, col) with row a free row below the pivot
        slots = []
        for j, pr in enumerate(pivots):
            for r in free_rows:
                if r > pr:
                    slots.append((r, j))
        for combo in _it.product(elems, repeat=len(slots)):
            cols = []
            for j, pr in enumerate(pivots):
                v = [(0, 0)] * m
                v[pr] = (1, 0)
                cols.append(v)
            for (r, j), val in zip(slots, combo):
                cols[j][r] = val
            rows = [[field.e(0)] * m for _ in range(m)]
            for j, col in enumerate(cols):
                for r in range(m):
                    a, b = col[r]
                    rows[r][j] = field.e(a, b)
            for idx, r in enumerate(free_rows):
                rows[r][dim + idx] = field.e(field.p)
            mat = EMatrix(rows)
            reps.append(CosetRep(hnf_rep(mat, field), tuple([1] * k + [0] * (m - k))))
    return reps


def _is_shifted_minuscule(lam):
    base = lam[-1]
    shifted = [x - base for x in lam]
    if all(x in (0, 1) for x in shifted):
        return base, sum(shifted)
    return None
