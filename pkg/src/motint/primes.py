"""Bad-prime bookkeeping."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable


def prime_factors(n: int) -> set[int]:
    n = abs(int(n))
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and prime_factors(n) == {n}


def note(bp: set[int] | None, *values) -> None:
    """Record the primes dividing numerators and denominators of nonzero rationals."""
    if bp is None:
        return
    for v in values:
        v = Fraction(v)
        if v:
            bp |= prime_factors(v.numerator) | prime_factors(v.denominator)


def note_laurent(bp: set[int] | None, a) -> None:
    """A Laurent constant whose ord/ac is used: leading coefficient plus all denominators."""
    if bp is None or a.is_zero():
        return
    note(bp, a.ac())
    for _, c in a.items:
        bp |= prime_factors(c.denominator)


def note_denominators(bp: set[int] | None, values: Iterable) -> None:
    if bp is None:
        return
    for v in values:
        bp |= prime_factors(Fraction(v).denominator)
