"""Exact multivariate Laurent polynomials over Q.

This is the coefficient ring shared by the whole package.  Character values
on uniformizers stay formal symbols (``c`` for the twisting character,
``c1``/``c2``/``e0`` at split places, ``t`` for the square root of the
residue cardinality), so every orbital integral is an exact Laurent
polynomial and identities are checked coefficient by coefficient instead of
numerically.
"""

from __future__ import annotations

from fractions import Fraction

# A monomial key is a tuple of (symbol, exponent) pairs, sorted by symbol,
# with all exponents nonzero.  The empty tuple is the constant monomial.
_ONE_KEY = ()


def _mul_keys(k1, k2):
    if not k1:
        return k2
    if not k2:
        return k1
    d = dict(k1)
    for s, e in k2:
        n = d.get(s, 0) + e
        if n:
            d[s] = n
        else:
            del d[s]
    return tuple(sorted(d.items()))


class Laurent:
    """Immutable Laurent polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        # terms: dict key -> Fraction, zeros removed; not copied, callers
        # hand over ownership.
        self.terms = terms or {}

    # -- constructors -------------------------------------------------

    @staticmethod
    def rational(x) -> "Laurent":
        f = Fraction(x)
        return Laurent({_ONE_KEY: f} if f else {})

    @staticmethod
    def symbol(name: str, exp: int = 1, coeff=1) -> "Laurent":
        c = Fraction(coeff)
        if not c:
            return Laurent({})
        if exp == 0:
            return Laurent({_ONE_KEY: c})
        return Laurent({((name, exp),): c})

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def as_rational(self) -> Fraction:
        """The value if constant; raises otherwise."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and _ONE_KEY in self.terms:
            return self.terms[_ONE_KEY]
        raise ValueError(f"not a constant: {self}")

    # -- ring operations -----------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        d = dict(self.terms)
        for k, c in other.terms.items():
            n = d.get(k, _ZERO_FRAC) + c
            if n:
                d[k] = n
            else:
                d.pop(k, None)
        return Laurent(d)

    __radd__ = __add__

    def __neg__(self):
        return Laurent({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if not self.terms or not other.terms:
            return Laurent({})
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        d = {}
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = _mul_keys(k1, k2)
                n = d.get(k, _ZERO_FRAC) + c1 * c2
                if n:
                    d[k] = n
                else:
                    d.pop(k, None)
        return Laurent(d)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n == 0:
            return Laurent({_ONE_KEY: Fraction(1)})
        if n < 0:
            # Only monomials are invertible here.
            if len(self.terms) != 1:
                raise ValueError("negative power of a non-monomial")
            ((k, c),) = self.terms.items()
            inv = Laurent({tuple((s, -e) for s, e in k): Fraction(1, 1) / c})
            return inv ** (-n)
        r = Laurent({_ONE_KEY: Fraction(1)})
        base = self
        while n:
            if n & 1:
                r = r * base
            base = base * base
            n >>= 1
        return r

    # -- comparisons -----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Laurent.rational(other)
        if not isinstance(other, Laurent):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- substitutions ---------------------------------------------------

    def substitute(self, assignments: dict) -> "Laurent":
        """Replace symbols by Laurent values (values must be invertible
        monomials when they meet negative exponents)."""
        out = Laurent({})
        for key, coeff in self.terms.items():
            term = Laurent({_ONE_KEY: coeff})
            for sym, exp in key:
                if sym in assignments:
                    term = term * (_coerce(assignments[sym]) ** exp)
                else:
                    term = term * Laurent.symbol(sym, exp)
            out = out + term
        return out

    def specialize_c(self, value=1, symbol: str = "c") -> "Laurent":
        return self.substitute({symbol: Laurent.rational(value)})

    def reduce_square(self, symbol: str, value) -> "Laurent":
        """Impose symbol**2 = value (used for t**2 = q)."""
        v = _coerce(value)
        out = Laurent({})
        for key, coeff in self.terms.items():
            term = Laurent({_ONE_KEY: coeff})
            for sym, exp in key:
                if sym == symbol:
                    q, r = divmod(exp, 2)
                    term = term * (v ** q)
                    if r:
                        term = term * Laurent.symbol(sym)
                else:
                    term = term * Laurent.symbol(sym, exp)
            out = out + term
        return out

    # -- display ---------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for key in sorted(self.terms):
            c = self.terms[key]
            mono = "*".join(
                (s if e == 1 else f"{s}^{e}") for s, e in key
            )
            if not mono:
                bits.append(str(c))
            elif c == 1:
                bits.append(mono)
            elif c == -1:
                bits.append(f"-{mono}")
            else:
                bits.append(f"{c}*{mono}")
        s = " + ".join(bits).replace("+ -", "- ")
        return s

    __repr__ = __str__


_ZERO_FRAC = Fraction(0)

ZERO = Laurent({})
ONE = Laurent({_ONE_KEY: Fraction(1)})


def _coerce(x) -> Laurent:
    if isinstance(x, Laurent):
        return x
    if isinstance(x, (int, Fraction)):
        return Laurent.rational(x)
    raise TypeError(f"cannot coerce {type(x)} to Laurent")


def laurent_from_string_parts(d: dict) -> Laurent:
    """Inverse of serialize_laurent."""
    out = ZERO
    for mono, coeff in d.items():
        key = []
        if mono:
            for piece in mono.split("*"):
                if "^" in piece:
                    s, e = piece.split("^")
                    key.append((s, int(e)))
                else:
                    key.append((piece, 1))
        out = out + Laurent({tuple(sorted(key)): Fraction(coeff)})
    return out


def serialize_laurent(v: Laurent) -> dict:
    """JSON-friendly form: monomial string -> coefficient string."""
    out = {}
    for key in sorted(v.terms):
        mono = "*".join((s if e == 1 else f"{s}^{e}") for s, e in key)
        out[mono] = str(v.terms[key])
    return out
