"""Dense exact matrix algebra over E and the groups acting in the trace
formula: the inner form G realized inside GL_{2n}(E), the symmetric spaces
S = {g theta(g)^{-1}} and S' = {s sbar = 1}, and the involutions theta and
Galois conjugation.

Matrices are tuples of tuples of EElement; everything is immutable and
exact, sized for n <= 4.
"""

from __future__ import annotations

from fractions import Fraction

from .qfield import EElement, FieldSpec, INF


class EMatrix:
    __slots__ = ("rows", "n", "m", "u")

    def __init__(self, rows):
        self.rows = tuple(tuple(r) for r in rows)
        self.n = len(self.rows)
        self.m = len(self.rows[0]) if self.rows else 0
        self.u = self.rows[0][0].u if self.rows else None
        for r in self.rows:
            if len(r) != self.m:
                raise ValueError("ragged matrix")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_rational_rows(rows, u) -> "EMatrix":
        return EMatrix(
            [[EElement(Fraction(x), 0, u) for x in r] for r in rows]
        )

    @staticmethod
    def identity(n, u) -> "EMatrix":
        return EMatrix(
            [[EElement(1 if i == j else 0, 0, u) for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zero(n, m, u) -> "EMatrix":
        return EMatrix([[EElement(0, 0, u) for _ in range(m)] for _ in range(n)])

    @staticmethod
    def scalar(x: EElement, n: int) -> "EMatrix":
        z = EElement(0, 0, x.u)
        return EMatrix([[x if i == j else z for j in range(n)] for i in range(n)])

    @staticmethod
    def diag(entries) -> "EMatrix":
        entries = list(entries)
        u = entries[0].u
        z = EElement(0, 0, u)
        n = len(entries)
        return EMatrix([[entries[i] if i == j else z for j in range(n)] for i in range(n)])

    # -- ring operations ---------------------------------------------------

    def __add__(self, o):
        return EMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, o.rows)]
        )

    def __sub__(self, o):
        return EMatrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, o.rows)]
        )

    def __neg__(self):
        return EMatrix([[-a for a in r] for r in self.rows])

    def __mul__(self, o):
        if isinstance(o, EMatrix):
            if self.m != o.n:
                raise ValueError("size mismatch")
            ot = list(zip(*o.rows))
            out = []
            for r in self.rows:
                row = []
                for c in ot:
                    acc = r[0] * c[0]
                    for a, b in zip(r[1:], c[1:]):
                        acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return EMatrix(out)
        return EMatrix([[a * o for a in r] for r in self.rows])

    __rmul__ = __mul__

    def conj(self) -> "EMatrix":
        return EMatrix([[a.conj() for a in r] for r in self.rows])

    def transpose(self) -> "EMatrix":
        return EMatrix(list(zip(*self.rows)))

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def is_rational(self) -> bool:
        return all(a.b == 0 for r in self.rows for a in r)

    def __eq__(self, o):
        return isinstance(o, EMatrix) and self.rows == o.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "[" + "; ".join(", ".join(repr(a) for a in r) for r in self.rows) + "]"

    # -- Gaussian elimination (exact) ----------------------------------------

    def det(self) -> EElement:
        n = self.n
        if n != self.m:
            raise ValueError("det of non-square")
        rows = [list(r) for r in self.rows]
        u = self.u
        sign = 1
        acc = EElement(1, 0, u)
        for c in range(n):
            piv = None
            for r in range(c, n):
                if not rows[r][c].is_zero():
                    piv = r
                    break
            if piv is None:
                return EElement(0, 0, u)
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                sign = -sign
            pv = rows[c][c]
            acc = acc * pv
            inv = pv.inv()
            for r in range(c + 1, n):
                f = rows[r][c] * inv
                if f.is_zero():
                    continue
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
        return acc * sign

    def inv(self) -> "EMatrix":
        n = self.n
        if n != self.m:
            raise ValueError("inverse of non-square")
        u = self.u
        rows = [list(r) + [EElement(1 if i == j else 0, 0, u) for j in range(n)]
                for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = None
            for r in range(c, n):
                if not rows[r][c].is_zero():
                    piv = r
                    break
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            rows[c], rows[piv] = rows[piv], rows[c]
            inv = rows[c][c].inv()
            rows[c] = [x * inv for x in rows[c]]
            for r in range(n):
                if r == c or rows[r][c].is_zero():
                    continue
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
        return EMatrix([r[n:] for r in rows])

    def solve_right(self, rhs: "EMatrix") -> "EMatrix":
        """X with self*X = rhs (square, invertible)."""
        return self.inv() * rhs

    def char_poly(self):
        """Coefficients [c_0, ..., c_{n-1}, 1] of det(tI - M), exact, by the
        trace recursion (division only by integers; characteristic zero)."""
        n = self.n
        u = self.u
        # Faddeev-LeVerrier: M1 = M, c1 = -tr(M1); M_k = M(M_{k-1} + c_{k-1} I)
        coeffs = [None] * (n + 1)
        coeffs[n] = EElement(1, 0, u)
        Mk = self
        ck = Mk.trace() * Fraction(-1, 1)
        coeffs[n - 1] = ck
        for k in range(2, n + 1):
            Mk = self * (Mk + EMatrix.scalar(ck, n))
            ck = Mk.trace() * Fraction(-1, k)
            coeffs[n - k] = ck
        return coeffs  # low degree first

    def trace(self) -> EElement:
        acc = self.rows[0][0]
        for i in range(1, self.n):
            acc = acc + self.rows[i][i]
        return acc

    # -- p-adic predicates ------------------------------------------------

    def min_val(self, field: FieldSpec):
        v = INF
        for r in self.rows:
            for a in r:
                w = field.val(a)
                if w < v:
                    v = w
        return v

    def is_integral(self, field: FieldSpec) -> bool:
        return all(field.in_o(a) for r in self.rows for a in r)

    # -- blocks --------------------------------------------------------------

    def block(self, i0, j0, h, w) -> "EMatrix":
        return EMatrix([r[j0:j0 + w] for r in self.rows[i0:i0 + h]])

    def four_blocks(self):
        """(A, B, C, D) for an even-sized matrix split in half."""
        n = self.n // 2
        return (
            self.block(0, 0, n, n),
            self.block(0, n, n, n),
            self.block(n, 0, n, n),
            self.block(n, n, n, n),
        )

    @staticmethod
    def from_blocks(A, B, C, D) -> "EMatrix":
        top = [list(r1) + list(r2) for r1, r2 in zip(A.rows, B.rows)]
        bot = [list(r1) + list(r2) for r1, r2 in zip(C.rows, D.rows)]
        return EMatrix(top + bot)

    @staticmethod
    def block_diag(A, B) -> "EMatrix":
        za = EMatrix.zero(A.n, B.m, A.u)
        zb = EMatrix.zero(B.n, A.m, A.u)
        return EMatrix.from_blocks(A, za, zb, B)

    # -- serialization ---------------------------------------------------------

    def to_json(self):
        from .qfield import format_e

        return [[format_e(a) for a in r] for r in self.rows]


def matrix_from_json(rows, field: FieldSpec) -> EMatrix:
    return EMatrix([[field.parse(s) for s in r] for r in rows])


# -- involutions and symmetric-space maps -------------------------------------


def theta(m: EMatrix) -> EMatrix:
    """Conjugation by diag(1_n, -1_n); flips the off-diagonal blocks' sign."""
    if m.n % 2 or m.n != m.m:
        raise ValueError("theta needs an even-sized square matrix")
    A, B, C, D = m.four_blocks()
    return EMatrix.from_blocks(A, -B, -C, D)


def twisted_norm(g: EMatrix) -> EMatrix:
    """Ng = g*conj(g)."""
    return g * g.conj()


def s_of_g(g: EMatrix) -> "SPoint":
    return SPoint(g * theta(g).inv())


def sprime_of_x(x: EMatrix) -> "SPrimePoint":
    return SPrimePoint(x * x.conj().inv())


class GPoint:
    """Element of G(F) < GL_{2n}(E): [[a, eps*b], [conj(b), conj(a)]]."""

    __slots__ = ("a", "b", "eps", "mat")

    def __init__(self, a: EMatrix, b: EMatrix, eps):
        self.a = a
        self.b = b
        self.eps = Fraction(eps)
        self.mat = EMatrix.from_blocks(a, b * self.eps, b.conj(), a.conj())
        if self.mat.det().is_zero():
            raise ValueError("singular point of G")

    @staticmethod
    def canonical(beta: EMatrix, eps) -> "GPoint":
        """g(beta) = [[1, eps*beta], [conj(beta), 1]]."""
        one = EMatrix.identity(beta.n, beta.u)
        return GPoint(one, beta, eps)

    def shape_ok(self) -> bool:
        A, B, C, D = self.mat.four_blocks()
        return D == A.conj() and C == (B * (Fraction(1) / self.eps)).conj()


class SPrimePoint:
    """s in S'(F): s * conj(s) = 1."""

    __slots__ = ("mat",)

    def __init__(self, mat: EMatrix, check: bool = True):
        self.mat = mat
        if check:
            n = mat.n
            if not (mat * mat.conj() == EMatrix.identity(n, mat.u)):
                raise ValueError("not a point of S': s*conj(s) != 1")

    @staticmethod
    def canonical(alpha: EMatrix) -> "SPrimePoint":
        """s'(alpha) = [[alpha, 1], [1 - alpha*conj(alpha), -conj(alpha)]]."""
        n = alpha.n
        u = alpha.u
        one = EMatrix.identity(n, u)
        aab = alpha * alpha.conj()
        return SPrimePoint(
            EMatrix.from_blocks(alpha, one, one - aab, -alpha.conj())
        )

    def galois_sqrt(self) -> EMatrix:
        """Some g with g*conj(g)^{-1} = s (Hilbert-90 style: g = c + s*conj(c))."""
        s = self.mat
        n = s.n
        u = s.u
        one = EMatrix.identity(n, u)
        g = one + s
        if not g.det().is_zero():
            return g
        root = EMatrix.scalar(EElement(0, 1, u), n)
        g = root + s * root.conj()
        if not g.det().is_zero():
            return g
        # generic combination; try a few sparse c's
        for k in range(n):
            c = EMatrix.zero(n, n, u)
            rows = [list(r) for r in c.rows]
            rows[k][k] = EElement(1, 0, u)
            c = EMatrix(rows) + one
            g = c + s * c.conj()
            if not g.det().is_zero():
                return g
        raise ArithmeticError("no Galois square root found")


class SPoint:
    """s = g*theta(g)^{-1} in S(F)."""

    __slots__ = ("mat",)

    def __init__(self, mat: EMatrix):
        self.mat = mat
