"""Certified enumeration windows.

Every orbital integral is a finite weighted coset sum; the window records
the per-coordinate elementary-divisor bounds that were enumerated.  A
computation is *certified* by recomputing with all bounds enlarged by two
and demanding an identical value: the integrand then provably vanished on
the discarded shell for this input.
"""

from __future__ import annotations

from dataclasses import dataclass


class CertificationError(AssertionError):
    """Window growth changed the value: the original window was undersized."""


@dataclass(frozen=True)
class EnumerationWindow:
    """[lo, hi] bounds on elementary divisors for each enumerated factor."""

    inner_lo: int
    inner_hi: int
    outer_lo: int
    outer_hi: int
    margin: int = 2

    def grow(self, k: int = None) -> "EnumerationWindow":
        k = self.margin if k is None else k
        return EnumerationWindow(
            self.inner_lo - k, self.inner_hi + k, self.outer_lo - k, self.outer_hi + k, self.margin
        )

    def to_json(self) -> dict:
        return {
            "inner": [self.inner_lo, self.inner_hi],
            "outer": [self.outer_lo, self.outer_hi],
            "margin": self.margin,
        }


def run_certified(compute, window: EnumerationWindow, certify: bool = True):
    """compute(window) -> (value, visited); re-run on the grown window and
    insist on the same value.  Returns (value, visited_total, certified)."""
    value, visited = compute(window)
    if not certify:
        return value, visited, False
    value2, visited2 = compute(window.grow())
    if value2 != value:
        raise CertificationError(
            f"window certification failed: {value} became {value2} on {window.grow()}"
        )
    return value, visited + visited2, True
