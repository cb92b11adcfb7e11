"""Functions of one angular component.

A function of sigma = ac(x - c) on the nonzero residues is stored as a finite
combination of two kinds of basis elements:

* ``('c', w)``: sigma -> e^(w sigma)
* ``('f', u)``: the indicator of sigma = u (u != 0)

Every term binding carries exactly one basis element; a ResFn is what a
computation produces before it is split back into terms.
"""

from __future__ import annotations

from contextlib import contextmanager
from fractions import Fraction
from typing import Iterable

from .primes import note
from .valring import ONE, ValueRingElem

AcData = tuple


_MODULUS: int | None = None


@contextmanager
def residue_modulus(p: int):
    """Within the block, angular values live in F_p instead of Q.

    Used by the brute-force side when it needs products that are faithful to
    one residue field.
    """
    global _MODULUS
    old, _MODULUS = _MODULUS, p
    try:
        yield
    finally:
        _MODULUS = old


def _red(u) -> Fraction:
    u = Fraction(u)
    if _MODULUS is None:
        return u
    return Fraction(u.numerator * pow(u.denominator, -1, _MODULUS) % _MODULUS)


def achar(w=0) -> AcData:
    return ("c", Fraction(w))


def afix(u) -> AcData:
    u = _red(u)
    if u == 0:
        raise ValueError("acfix value must be nonzero")
    return ("f", u)


FREE = achar(0)


def ac_at(a: AcData, sigma0, bp: set | None = None) -> ValueRingElem:
    """Value of the basis element at sigma = sigma0."""
    sigma0 = Fraction(sigma0)
    kind, v = a
    if kind == "c":
        return ValueRingElem.echar(v * sigma0) if v and sigma0 else ONE
    v, sigma0 = _red(v), _red(sigma0)
    if v == sigma0:
        return ONE
    note(bp, v - sigma0)
    return ValueRingElem()


def ac_mul(a: AcData, b: AcData, bp: set | None = None) -> tuple[AcData | None, ValueRingElem]:
    """Product of two basis elements on the same sigma."""
    if a[0] == "c" and b[0] == "c":
        return achar(a[1] + b[1]), ONE
    if a[0] == "f" and b[0] == "f":
        if _red(a[1]) == _red(b[1]):
            return a, ONE
        note(bp, a[1] - b[1])
        return None, ValueRingElem()
    fix, ch = (a, b) if a[0] == "f" else (b, a)
    return fix, ac_at(ch, fix[1])


def ac_neg(a: AcData) -> AcData:
    return (a[0], -a[1])


def residue_sum(w, bp: set | None = None) -> ValueRingElem:
    """sum over rho != 0 of e^(w rho)."""
    w = Fraction(w)
    if _red(w) == 0:
        return ValueRingElem.lpow(1) - ONE
    note(bp, w)
    return -ONE


class ResFn:
    __slots__ = ("items",)

    def __init__(self, items: Iterable[tuple[AcData, object]] = ()):
        acc: dict[AcData, ValueRingElem] = {}
        for a, c in items:
            if not isinstance(c, ValueRingElem):
                c = ValueRingElem.const(c)
            if c.is_zero():
                continue
            acc[a] = acc[a] + c if a in acc else c
        self.items = {a: c for a, c in acc.items() if not c.is_zero()}

    @classmethod
    def basis(cls, a: AcData, c=1) -> "ResFn":
        return cls([(a, c)])

    def __add__(self, other: "ResFn") -> "ResFn":
        return ResFn(list(self.items.items()) + list(other.items.items()))

    def scale(self, c) -> "ResFn":
        return ResFn((a, v * c) for a, v in self.items.items())

    def mul(self, other: "ResFn", bp: set | None = None) -> "ResFn":
        out = []
        for a, x in self.items.items():
            for b, y in other.items.items():
                ab, k = ac_mul(a, b, bp)
                if ab is not None and not k.is_zero():
                    out.append((ab, x * y * k))
        return ResFn(out)

    def at(self, sigma0, bp: set | None = None) -> ValueRingElem:
        total = ValueRingElem()
        for a, c in self.items.items():
            total = total + c * ac_at(a, sigma0, bp)
        return total

    def exclude(self, delta, bp: set | None = None) -> "ResFn":
        """Same function with the value at sigma = delta removed."""
        v = self.at(delta, bp)
        if v.is_zero():
            return self
        return self + ResFn.basis(afix(delta), -v)

    def shifted(self, delta, bp: set | None = None) -> "ResFn":
        """sigma -> self(sigma - delta), meaningful for sigma != delta."""
        delta = Fraction(delta)
        out = []
        for (kind, v), c in self.items.items():
            if kind == "f":
                if _red(v + delta) == 0:
                    continue
                note(bp, _red(v + delta))
                out.append((afix(v + delta), c))
            else:
                out.append((achar(v), c * (ValueRingElem.echar(-v * delta) if v and delta else ONE)))
        return ResFn(out)

    def negated_arg(self) -> "ResFn":
        return ResFn((ac_neg(a), c) for a, c in self.items.items())

    def is_zero(self) -> bool:
        return not self.items

    def __repr__(self) -> str:
        return " + ".join(f"[{c}]*{a}" for a, c in self.items.items()) or "0"
