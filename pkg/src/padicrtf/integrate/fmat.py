"""Engine-internal fast exact matrices over E.

Entries are integer pairs (a, b) meaning (a + b*sqrt(u))/den with one common
integer denominator per matrix; u must be a (nonzero) integer, which the
engines assert once per field.  All hot-loop predicates (integrality after
twisted conjugation, determinant valuations) run on machine integers; these
matrices never leave the integrate package.
"""

from __future__ import annotations

from fractions import Fraction

from ..grpspace import EMatrix
from ..qfield import INF


def vp_int(n: int, p: int) -> int:
    if n == 0:
        return 10 ** 9  # effectively +inf for engine windows
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class FMat:
    __slots__ = ("n", "u", "den", "a", "b")

    def __init__(self, n, u, den, a, b):
        self.n = n
        self.u = u
        self.den = den
        self.a = a  # flat row-major ints
        self.b = b

    @staticmethod
    def from_ematrix(m: EMatrix) -> "FMat":
        n = m.n
        u = m.u
        if u.denominator != 1:
            raise ValueError("fast matrices need an integer u")
        den = 1
        for row in m.rows:
            for x in row:
                den = den * x.a.denominator // _gcd(den, x.a.denominator)
                den = den * x.b.denominator // _gcd(den, x.b.denominator)
        a, b = [], []
        for row in m.rows:
            for x in row:
                a.append(int(x.a * den))
                b.append(int(x.b * den))
        return FMat(n, int(u), den, a, b)

    def to_ematrix(self, field) -> EMatrix:
        rows = []
        for i in range(self.n):
            rows.append(
                [
                    field.e(Fraction(self.a[i * self.n + j], self.den), Fraction(self.b[i * self.n + j], self.den))
                    for j in range(self.n)
                ]
            )
        return EMatrix(rows)

    def mul(self, o: "FMat") -> "FMat":
        n = self.n
        u = self.u
        a1, b1, a2, b2 = self.a, self.b, o.a, o.b
        a = [0] * (n * n)
        b = [0] * (n * n)
        for i in range(n):
            base = i * n
            for j in range(n):
                sa = 0
                sb = 0
                for k in range(n):
                    x1, y1 = a1[base + k], b1[base + k]
                    x2, y2 = a2[k * n + j], b2[k * n + j]
                    sa += x1 * x2 + u * y1 * y2
                    sb += x1 * y2 + y1 * x2
                a[base + j] = sa
                b[base + j] = sb
        return FMat(n, u, self.den * o.den, a, b)

    def conj(self) -> "FMat":
        return FMat(self.n, self.u, self.den, self.a, [-x for x in self.b])

    def normalized(self, p: int) -> "FMat":
        """Strip the p-part shared by all numerators and the denominator;
        only the p-adic class matters to the engines."""
        vden = vp_int(self.den, p)
        if vden == 0:
            return self
        vmin = min(vp_int(x, p) for x in self.a + self.b)
        k = min(vden, vmin)
        if k == 0:
            return self
        q = p ** k
        return FMat(self.n, self.u, self.den // q, [x // q for x in self.a], [x // q for x in self.b])

    # -- valuations ---------------------------------------------------------

    def entry_val(self, i, j, p) -> int:
        idx = i * self.n + j
        va = vp_int(self.a[idx], p)
        vb = vp_int(self.b[idx], p)
        return min(va, vb) - vp_int(self.den, p)

    def min_val(self, p) -> int:
        va = min(vp_int(x, p) for x in self.a)
        vb = min(vp_int(x, p) for x in self.b)
        return min(va, vb) - vp_int(self.den, p)

    def is_integral(self, p, threshold: int = 0) -> bool:
        shift = vp_int(self.den, p) + threshold
        if shift <= 0:
            return True
        q = p ** shift
        return all(x % q == 0 for x in self.a) and all(x % q == 0 for x in self.b)

    def det_val(self, p) -> int:
        """val_E(det), via norm for n <= 2."""
        n = self.n
        if n == 1:
            da, db = self.a[0], self.b[0]
        elif n == 2:
            a, b, u = self.a, self.b, self.u
            da = a[0] * a[3] + u * (b[0] * b[3]) - a[1] * a[2] - u * b[1] * b[2]
            db = a[0] * b[3] + b[0] * a[3] - a[1] * b[2] - b[1] * a[2]
        else:
            raise ValueError("det_val only for n <= 2")
        if da == 0 and db == 0:
            return INF
        norm = da * da - self.u * db * db
        v2 = vp_int(norm, p)
        assert v2 % 2 == 0
        return v2 // 2 - self.n * vp_int(self.den, p)


def _gcd(x, y):
    while y:
        x, y = y, x % y
    return x


_VINF = 10 ** 9


def _reduced_digits(num_a: int, num_b: int, den: int, shift: int, a1: int, p: int):
    """Digit truncation mod p^{a1} of t = p^shift (num_a + num_b r)/den,
    componentwise; returns hashable (v, digits) pairs."""
    out = []
    vden = vp_int(den, p)
    for num in (num_a, num_b):
        if num == 0:
            out.append((_VINF, 0))
            continue
        vn = vp_int(num, p) + shift - vden
        if vn >= a1:
            out.append((_VINF, 0))
            continue
        mod = p ** (a1 - vn)
        n_unit = num // p ** vp_int(num, p)
        d_unit = den // p ** vden
        r = (n_unit * pow(d_unit, -1, mod)) % mod
        out.append((vn, r))
    return tuple(out)


def fmat_coset_key(M: "FMat", p: int):
    """Canonical key of M*GL(o), n <= 2, integer arithmetic only.

    n=2: the coset's Hermite form is [[p^a1, x], [0, p^a2]] with
    a2 = min val of the second row, a1 = val det - a2, and
    x = B p^{a2}/D mod p^{a1} (pivoting on the smaller of val C, val D)."""
    if M.n == 1:
        return (min(vp_int(M.a[0], p), vp_int(M.b[0], p)) - vp_int(M.den, p),)
    if M.n != 2:
        raise ValueError("fast coset keys support n <= 2")
    u = M.u
    A = (M.a[0], M.b[0])
    B = (M.a[1], M.b[1])
    C = (M.a[2], M.b[2])
    D = (M.a[3], M.b[3])

    def ival(t):
        if t[0] == 0 and t[1] == 0:
            return _VINF
        return min(vp_int(t[0], p), vp_int(t[1], p))

    vC, vD = ival(C), ival(D)
    if vC < vD:
        A, B = B, A
        C, D = D, C
        vD = vC
    vden = vp_int(M.den, p)
    a2 = vD - vden
    dv = M.det_val(p)
    a1 = dv - a2
    # x = B/D * p^{a2-true}; with the shared matrix denominator cancelling in
    # B/D, the shift is a2 + vden measured on integer numerators.
    na = B[0] * D[0] - u * B[1] * D[1]
    nb = B[1] * D[0] - B[0] * D[1]
    nd = D[0] * D[0] - u * D[1] * D[1]
    digits = _reduced_digits(na, nb, nd, a2, a1, p)
    return (a1, a2) + digits


def sigma_integral_check(yinv: "FMat", ybar: "FMat", point: "FMat", p: int) -> bool:
    """Whether yinv * point * ybar is integral, with lazy rows and early
    abort; all three factors share the size n."""
    n = point.n
    u = point.u
    den = yinv.den * point.den * ybar.den
    shift = vp_int(den, p)
    if shift <= 0:
        return True
    q = p ** shift
    ya, yb = yinv.a, yinv.b
    pa, pb = point.a, point.b
    ba, bb = ybar.a, ybar.b
    for i in range(n):
        ta = [0] * n
        tb = [0] * n
        base = i * n
        for k in range(n):
            x1, y1 = ya[base + k], yb[base + k]
            if x1 == 0 and y1 == 0:
                continue
            kb = k * n
            for j in range(n):
                x2, y2 = pa[kb + j], pb[kb + j]
                ta[j] += x1 * x2 + u * y1 * y2
                tb[j] += x1 * y2 + y1 * x2
        for j in range(n):
            sa = 0
            sb = 0
            for k in range(n):
                x1, y1 = ta[k], tb[k]
                if x1 == 0 and y1 == 0:
                    continue
                x2, y2 = ba[k * n + j], bb[k * n + j]
                sa += x1 * x2 + u * y1 * y2
                sb += x1 * y2 + y1 * x2
            if sa % q or sb % q:
                return False
    return True
