"""Exact arithmetic in cyclotomic fields Q(zeta_M)."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients (low degree first) of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_div(num: list, den: list) -> list:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        q = num[i + len(den) - 1] // lead
        out[i] = q
        if q:
            for j, c in enumerate(den):
                num[i + j] -= q * c
    assert not any(num), "inexact cyclotomic division"
    return out


def _reduce(coeffs: dict[int, Fraction], M: int) -> tuple[Fraction, ...]:
    phi = cyclotomic_poly(M)
    deg = len(phi) - 1
    vec = [Fraction(0)] * max(M, deg)
    for e, c in coeffs.items():
        vec[e % M] += c
    # phi is monic; eliminate from the top down
    for i in range(len(vec) - 1, deg - 1, -1):
        c = vec[i]
        if c:
            vec[i] = Fraction(0)
            for j in range(deg):
                if phi[j]:
                    vec[i - deg + j] -= c * phi[j]
    return tuple(vec[:deg])


class Cyclotomic:
    """Element of Q(zeta_M) in the power basis 1, z, ..., z^(phi(M)-1)."""

    __slots__ = ("M", "coeffs")

    def __init__(self, M: int, coeffs: dict[int, Fraction] | None = None):
        self.M = M
        self.coeffs = _reduce(coeffs or {}, M)

    @classmethod
    def rational(cls, r) -> "Cyclotomic":
        return cls(1, {0: Fraction(r)})

    @classmethod
    def root(cls, M: int, k: int) -> "Cyclotomic":
        """zeta_M^k, stored at the smallest conductor."""
        k %= M
        g = math.gcd(k, M)
        return cls(M // g, {k // g: Fraction(1)})

    def lift(self, N: int) -> "Cyclotomic":
        if N % self.M:
            raise ValueError(f"conductor {self.M} does not divide {N}")
        step = N // self.M
        return Cyclotomic(N, {i * step: c for i, c in enumerate(self.coeffs) if c})

    def _common(self, other) -> tuple["Cyclotomic", "Cyclotomic"]:
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other)
        if self.M == other.M:
            return self, other
        N = self.M * other.M // math.gcd(self.M, other.M)
        return self.lift(N), other.lift(N)

    def __add__(self, other) -> "Cyclotomic":
        a, b = self._common(other)
        return Cyclotomic(a.M, {i: x + y for i, (x, y) in enumerate(zip(a.coeffs, b.coeffs))})

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.M, {i: -c for i, c in enumerate(self.coeffs)})

    def __sub__(self, other) -> "Cyclotomic":
        return self + (-other if isinstance(other, Cyclotomic) else Cyclotomic.rational(-Fraction(other)))

    def __rsub__(self, other) -> "Cyclotomic":
        return (-self) + other

    def __mul__(self, other) -> "Cyclotomic":
        a, b = self._common(other)
        prod: dict[int, Fraction] = {}
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    prod[i + j] = prod.get(i + j, Fraction(0)) + x * y
        return Cyclotomic(a.M, prod)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.rational(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        return hash(self.to_complex().real.__round__(9))

    def to_complex(self) -> complex:
        z = cmath.exp(2j * math.pi / self.M)
        return sum((float(c) * z**i for i, c in enumerate(self.coeffs) if c), 0j)

    def to_json(self) -> dict:
        return {"conductor": self.M, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, d: dict) -> "Cyclotomic":
        return cls(int(d["conductor"]), {i: Fraction(c) for i, c in enumerate(d["coeffs"])})

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                z = f"zeta({self.M})" + (f"^{i}" if i > 1 else "")
                parts.append(z if c == 1 else f"-{z}" if c == -1 else f"{c}*{z}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    __repr__ = __str__
