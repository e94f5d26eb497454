"""Exact arithmetic in F = Q_p-with-exact-rationals and E = F(sqrt(u)).

Elements of E are pairs of rationals a + b*sqrt(u); nothing is ever
truncated, and every p-adic valuation is read off the prime factorization
of exact numerators and denominators.  Only unramified E/F with odd p is
supported: u is required to be a unit that is not a square mod p.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .laurent import Laurent, ONE, ZERO

INF = math.inf


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(x, p: int):
    """p-adic valuation of a rational; +inf for 0."""
    f = Fraction(x)
    if f == 0:
        return INF
    return vp_int(f.numerator, p) - vp_int(f.denominator, p)


def reduce_mod_pk(x, p: int, k: int) -> Fraction:
    """Canonical representative of x modulo p^k (p-adic digit truncation).

    Returns the unique r = sum_{i=v}^{k-1} c_i p^i, 0 <= c_i < p, with
    val(x - r) >= k.  Works for any rational with val(x) > -inf; a rational
    whose denominator involves p is handled through its negative valuation.
    """
    f = Fraction(x)
    if f == 0:
        return Fraction(0)
    v = vp(f, p)
    if v >= k:
        return Fraction(0)
    unit = f / Fraction(p) ** v  # p-unit
    mod = p ** (k - v)
    num = unit.numerator % mod
    den = unit.denominator % mod
    r = (num * pow(den, -1, mod)) % mod
    return Fraction(r) * Fraction(p) ** v


def is_square_mod_p(a: int, p: int) -> bool:
    """Quadratic residue test for a unit a modulo an odd prime."""
    return pow(a % p, (p - 1) // 2, p) == 1


def rational_is_square(x, p: int):
    """Decide whether a nonzero rational is a square in Q_p (odd p)."""
    v = vp(x, p)
    if v % 2:
        return False
    unit = Fraction(x) / Fraction(p) ** v
    num = (unit.numerator * pow(unit.denominator, -1, p)) % p
    return is_square_mod_p(num, p)


class EElement:
    """a + b*sqrt(u), exact."""

    __slots__ = ("a", "b", "u")

    def __init__(self, a, b, u):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.u = u  # Fraction, shared with the ambient FieldSpec

    def __add__(self, o):
        if isinstance(o, EElement):
            return EElement(self.a + o.a, self.b + o.b, self.u)
        return EElement(self.a + Fraction(o), self.b, self.u)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, EElement):
            return EElement(self.a - o.a, self.b - o.b, self.u)
        return EElement(self.a - Fraction(o), self.b, self.u)

    def __rsub__(self, o):
        return EElement(Fraction(o) - self.a, -self.b, self.u)

    def __neg__(self):
        return EElement(-self.a, -self.b, self.u)

    def __mul__(self, o):
        if isinstance(o, EElement):
            return EElement(
                self.a * o.a + self.u * self.b * o.b,
                self.a * o.b + self.b * o.a,
                self.u,
            )
        f = Fraction(o)
        return EElement(self.a * f, self.b * f, self.u)

    __rmul__ = __mul__

    def inv(self) -> "EElement":
        n = self.a * self.a - self.u * self.b * self.b
        if n == 0:
            raise ZeroDivisionError("inverting 0 in E")
        return EElement(self.a / n, -self.b / n, self.u)

    def __truediv__(self, o):
        if isinstance(o, EElement):
            return self * o.inv()
        return self * (Fraction(1) / Fraction(o))

    def conj(self) -> "EElement":
        return EElement(self.a, -self.b, self.u)

    def norm(self) -> Fraction:
        return self.a * self.a - self.u * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __eq__(self, o):
        if isinstance(o, EElement):
            return self.a == o.a and self.b == o.b
        return self.b == 0 and self.a == Fraction(o)

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return format_e(self)


def format_e(x: EElement) -> str:
    if x.b == 0:
        return str(x.a)
    if x.a == 0:
        return f"{x.b}*r" if x.b != 1 else "r"
    bs = "r" if x.b == 1 else f"{x.b}*r"
    return f"{x.a}+{bs}" if x.b > 0 else f"{x.a}{bs}".replace("+-", "-")


def parse_rational(s) -> Fraction:
    return Fraction(str(s))


def parse_e(s, u) -> "EElement":
    """Accepts 'a', 'a+b*r', 'a+bi' style strings ('r' and 'i' both denote
    sqrt(u)), or a pair [a, b]."""
    if isinstance(s, EElement):
        return s
    if isinstance(s, (list, tuple)):
        a = parse_rational(s[0])
        b = parse_rational(s[1]) if len(s) > 1 else Fraction(0)
        return EElement(a, b, u)
    text = str(s).replace(" ", "").replace("*", "")
    for tok in ("i", "r"):
        if tok in text:
            head, _, _ = text.partition(tok)
            # split off the b coefficient: "a+b" + tok
            cut = max(head.rfind("+"), head.rfind("-", 1))
            if cut <= 0 and (not head or head in "+-"):
                a, b = "0", head + "1" if head in ("", "+", "-") else head
            elif cut <= 0:
                a, b = "0", head
            else:
                a, b = head[:cut], head[cut:]
            if b in ("", "+"):
                b = "1"
            elif b == "-":
                b = "-1"
            return EElement(parse_rational(a or "0"), parse_rational(b), u)
    return EElement(parse_rational(text), Fraction(0), u)


@dataclass(frozen=True)
class UnramChar:
    """Unramified character, determined by its value on a uniformizer.

    The value is a Laurent monomial (+-1, or a formal symbol like c).  For
    elements of E the exponent is val_E; F-rationals are valued by val_p,
    which agrees with val_E on F since E/F is unramified.
    """

    name: str
    uniformizer_value: Laurent

    def of_val(self, v: int) -> Laurent:
        if v == 0:
            return ONE
        return self.uniformizer_value ** v


class FieldSpec:
    """p, the quadratic non-residue u defining E, and the splitting datum eps."""

    def __init__(self, p: int, u, eps=1):
        p = int(p)
        if p < 3 or p % 2 == 0:
            raise ValueError("p must be an odd prime")
        if any(p % k == 0 for k in range(3, int(p ** 0.5) + 1, 2)):
            raise ValueError("p must be prime")
        u = Fraction(u)
        if u == 0 or vp(u, p) != 0:
            raise ValueError("u must be a p-adic unit")
        if rational_is_square(u, p):
            raise ValueError("u must be a non-square mod p")
        self.p = p
        self.u = u
        self.eps = Fraction(eps)
        if self.eps == 0:
            raise ValueError("eps must be nonzero")

    # -- constructors of elements --------------------------------------

    def e(self, a, b=0) -> EElement:
        return EElement(a, b, self.u)

    def sqrt_u(self) -> EElement:
        """tau = sqrt(u), the purely imaginary unit used by transfer factors."""
        return EElement(0, 1, self.u)

    def parse(self, s) -> EElement:
        return parse_e(s, self.u)

    # -- valuations ------------------------------------------------------

    def val(self, x):
        """val_E on EElement (an integer; E/F unramified), val_p on rationals."""
        if isinstance(x, EElement):
            if x.is_zero():
                return INF
            if x.b == 0:
                return vp(x.a, self.p)
            if x.a == 0:
                return vp(x.b, self.p)
            n = x.norm()
            if n == 0:
                raise ArithmeticError("nonzero element with zero norm in a field")
            v2 = vp(n, self.p)
            assert v2 % 2 == 0, "odd norm valuation in an unramified extension"
            return v2 // 2
        return vp(x, self.p)

    def in_o(self, x) -> bool:
        v = self.val(x)
        return v == INF or v >= 0

    def is_unit(self, x) -> bool:
        return self.val(x) == 0

    def eps_is_split(self) -> bool:
        """Declared split iff val(eps) is even."""
        return vp(self.eps, self.p) % 2 == 0

    # -- norm classes ------------------------------------------------------

    def is_norm_class(self, x, eps_twist: bool = False) -> bool:
        """x in N(E^x), or in eps*N(E^x) when eps_twist is set.

        For unramified E/F this is the parity of the valuation.
        """
        f = Fraction(x)
        if f == 0:
            raise ValueError("norm-class test of 0")
        v = vp(f, self.p)
        if eps_twist:
            v -= vp(self.eps, self.p)
        return v % 2 == 0

    def norm_witness(self, x, precision: int = 12):
        """Hensel witness: (a, b) with a^2 - u b^2 = x mod p^precision, or
        None when x is not a norm.  Brute-force oracle for is_norm_class."""
        f = Fraction(x)
        v = vp(f, self.p)
        if v % 2:
            return None
        p = self.p
        unit = f / Fraction(p) ** v
        u0 = (self.u.numerator * pow(self.u.denominator, -1, p ** precision)) % (
            p ** precision
        )
        t0 = (unit.numerator * pow(unit.denominator, -1, p ** precision)) % (
            p ** precision
        )
        for b0 in range(p):
            a2 = (t0 + u0 * b0 * b0) % p
            if a2 == 0:
                # a would be divisible by p; try to keep a a unit for Hensel
                continue
            if is_square_mod_p(a2, p):
                a0 = _sqrt_mod_p(a2, p)
                a = _hensel_sqrt(a0, (t0 + u0 * b0 * b0) % p ** precision, p, precision)
                half = Fraction(p) ** (v // 2)
                return (Fraction(a) * half, Fraction(b0) * half)
        return None

    # -- standard characters ------------------------------------------------

    def char_eta(self) -> UnramChar:
        return UnramChar("eta", Laurent.rational(-1))

    def char_eta_tilde(self) -> UnramChar:
        return UnramChar("eta_tilde", Laurent.rational(-1))

    def char_trivial(self) -> UnramChar:
        return UnramChar("trivial", ONE)

    def char_chi(self, symbol: str = "c") -> UnramChar:
        return UnramChar("chi", Laurent.symbol(symbol))

    def eval_char(self, ch: UnramChar, x) -> Laurent:
        v = self.val(x)
        if v == INF:
            raise ZeroDivisionError("character evaluated at 0")
        return ch.of_val(v)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {"p": self.p, "u": str(self.u), "eps": str(self.eps)}

    @staticmethod
    def from_json(d: dict) -> "FieldSpec":
        return FieldSpec(int(d["p"]), parse_rational(d["u"]), parse_rational(d.get("eps", 1)))

    def __repr__(self):
        return f"FieldSpec(p={self.p}, u={self.u}, eps={self.eps})"


def _sqrt_mod_p(a: int, p: int) -> int:
    """Square root mod an odd prime (Tonelli-Shanks; p is tiny here)."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        if r * r % p == a:
            return r
        raise ValueError("not a residue")
    for r in range(1, p):
        if r * r % p == a:
            return r
    raise ValueError("not a residue")


def _hensel_sqrt(r0: int, target: int, p: int, k: int) -> int:
    """Lift r0^2 = target mod p to mod p^k by Newton iteration."""
    mod = p
    r = r0 % p
    while mod < p ** k:
        mod = mod * mod
        if mod > p ** k:
            mod = p ** k
        r = (r - (r * r - target) * pow(2 * r, -1, mod)) % mod
    return r % (p ** k)


def solve_norm_minus_one(field: FieldSpec, precision: int) -> EElement:
    """delta in o_E^x with N(delta) = -1 mod p^precision (exists since the
    residue norm is surjective).  Used by the convergent-series route."""
    w = field.norm_witness(Fraction(-1), precision=precision)
    if w is None:
        raise ArithmeticError("-1 must be a norm from an unramified extension")
    return field.e(w[0], w[1])


def random_rational(rng: random.Random, height: int = 9, p: int = None, val_range=(-1, 1)) -> Fraction:
    """Small random rational, optionally scaled by a random power of p."""
    num = rng.randint(1, height) * rng.choice((1, -1))
    den = rng.randint(1, height)
    f = Fraction(num, den)
    if p is not None:
        f *= Fraction(p) ** rng.randint(*val_range)
    return f
