"""Truncated elements of Q_p and F_p((t)) and their additive characters."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cyclotomic import Cyclotomic
from .errors import BadPrime, PrecisionExhausted
from .laurent import LaurentConst
from .primes import is_prime

QP = "qp"
FPT = "fpt"


@dataclass(frozen=True)
class FieldSpec:
    """A local field with residue field F_p and a character from D_K.

    ``twist`` is a unit u = 1 mod p for Q_p (psi(x) = exp(2 pi i frac(u x / p))),
    and a tuple of (j < 0, m_j) for F_p((t)) (psi(x) = zeta_p^(x_0 + sum m_j x_j)).
    """

    p: int
    kind: str = QP
    twist: object = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.kind not in (QP, FPT):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == QP and self.twist is not None:
            if int(self.twist) % self.p != 1:
                raise ValueError("Q_p twist must be = 1 mod p")
        if self.kind == FPT and self.twist is not None:
            for j, _ in self.twist:
                if j >= 0:
                    raise ValueError("F_p((t)) twist indices must be negative")

    @property
    def u(self) -> int:
        return 1 if self.twist is None or self.kind == FPT else int(self.twist)

    def __str__(self) -> str:
        name = f"Q_{self.p}" if self.kind == QP else f"F_{self.p}((t))"
        return name + (f"[twist={self.twist}]" if self.twist else "")


def default_twists(K: FieldSpec) -> list[FieldSpec]:
    """The default character plus one twisted character."""
    if K.kind == QP:
        return [FieldSpec(K.p, QP), FieldSpec(K.p, QP, 1 + K.p)]
    return [FieldSpec(K.p, FPT), FieldSpec(K.p, FPT, ((-1, 1),))]


def _inv_mod(d: int, m: int, p: int) -> int:
    if d % p == 0:
        raise BadPrime(p, Fraction(1, d))
    return pow(d, -1, m)


@dataclass(frozen=True)
class LocalFieldElem:
    """sum_{i} digits[i] * pi^(val + i), known modulo pi^(val + len(digits))."""

    kind: str
    p: int
    val: int
    digits: tuple[int, ...]

    # construction ------------------------------------------------------

    @classmethod
    def zero(cls, K: FieldSpec, prec: int) -> "LocalFieldElem":
        return cls(K.kind, K.p, prec, ())

    @classmethod
    def from_int_digits(cls, K: FieldSpec, val: int, digits: Sequence[int]) -> "LocalFieldElem":
        return cls(K.kind, K.p, val, tuple(int(d) % K.p for d in digits)).normalized()

    @classmethod
    def from_rational(cls, K: FieldSpec, x, prec: int) -> "LocalFieldElem":
        """x in Q as an element known modulo pi^prec (t-adic reading of an integer for F_p((t)) is x mod p)."""
        x = Fraction(x)
        p = K.p
        if K.kind == FPT:
            if x == 0:
                return cls.zero(K, prec)
            v = int(x.numerator * _inv_mod(x.denominator, p, p)) % p
            if v == 0:
                return cls.zero(K, prec)
            return cls(FPT, p, 0, (v,) + (0,) * max(prec - 1, 0)) if prec > 0 else cls.zero(K, prec)
        if x == 0:
            return cls.zero(K, prec)
        v = 0
        n, d = x.numerator, x.denominator
        while n % p == 0:
            n //= p
            v += 1
        while d % p == 0:
            d //= p
            v -= 1
        rel = prec - v
        if rel <= 0:
            return cls.zero(K, prec)
        m = p**rel
        M = n * pow(d, -1, m) % m
        return cls(QP, p, v, _to_digits(M, p, rel))

    @classmethod
    def from_laurent(cls, K: FieldSpec, a: LaurentConst, prec: int) -> "LocalFieldElem":
        """Image of a Laurent constant under t -> p (Q_p) or t -> t (F_p((t)))."""
        if K.kind == QP:
            x = sum((c * Fraction(K.p) ** e for e, c in a.items), Fraction(0))
            return cls.from_rational(K, x, prec)
        p = K.p
        coeffs = {}
        for e, c in a.items:
            coeffs[e] = int(c.numerator * _inv_mod(c.denominator, p, p)) % p
        coeffs = {e: c for e, c in coeffs.items() if c}
        if not coeffs:
            return cls.zero(K, prec)
        v = min(coeffs)
        if v >= prec:
            return cls.zero(K, prec)
        return cls(FPT, p, v, tuple(coeffs.get(v + i, 0) for i in range(prec - v)))

    # basic properties --------------------------------------------------

    @property
    def prec(self) -> int:
        return self.val + len(self.digits)

    def normalized(self) -> "LocalFieldElem":
        k = 0
        while k < len(self.digits) and self.digits[k] == 0:
            k += 1
        if k == 0:
            return self
        return LocalFieldElem(self.kind, self.p, self.val + k, self.digits[k:])

    def is_zero(self) -> bool:
        return not any(self.digits)

    def ord(self) -> int:
        n = self.normalized()
        if not n.digits:
            raise PrecisionExhausted(f"element is 0 modulo pi^{self.prec}")
        return n.val

    def ac(self) -> int:
        n = self.normalized()
        if not n.digits:
            raise PrecisionExhausted(f"element is 0 modulo pi^{self.prec}")
        return n.digits[0]

    def digit(self, i: int) -> int:
        if i >= self.prec:
            raise PrecisionExhausted(f"digit {i} beyond precision {self.prec}")
        if i < self.val:
            return 0
        return self.digits[i - self.val]

    def truncated(self, prec: int) -> "LocalFieldElem":
        if prec >= self.prec:
            return self
        keep = max(prec - self.val, 0)
        return LocalFieldElem(self.kind, self.p, min(self.val, prec), self.digits[:keep] if keep else ())

    def __repr__(self) -> str:
        return f"LF({self.kind},{self.p}: val={self.val}, digits={self.digits})"

    def __str__(self) -> str:
        terms = [f"{d}*pi^{self.val + i}" for i, d in enumerate(self.digits) if d]
        return (" + ".join(terms) or "0") + f" + O(pi^{self.prec})"


def _to_digits(M: int, p: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        out.append(M % p)
        M //= p
    return tuple(out)


def _as_int(x: LocalFieldElem, base: int, prec: int) -> int:
    """Integer I with x = p^base * I modulo p^prec (mixed kind)."""
    p = x.p
    total = 0
    for i, d in enumerate(x.digits):
        e = x.val + i
        if e >= prec:
            break
        total += d * p ** (e - base)
    return total


def lf_add(x: LocalFieldElem, y: LocalFieldElem) -> LocalFieldElem:
    if (x.kind, x.p) != (y.kind, y.p):
        raise ValueError("elements of different fields")
    prec = min(x.prec, y.prec)
    base = min(x.val, y.val, prec)
    n = prec - base
    if n <= 0:
        return LocalFieldElem(x.kind, x.p, prec, ())
    if x.kind == QP:
        m = x.p**n
        M = (_as_int(x, base, prec) + _as_int(y, base, prec)) % m
        return LocalFieldElem(QP, x.p, base, _to_digits(M, x.p, n)).normalized()
    digs = tuple((x.digit(base + i) + y.digit(base + i)) % x.p for i in range(n))
    return LocalFieldElem(FPT, x.p, base, digs).normalized()


def lf_neg(x: LocalFieldElem) -> LocalFieldElem:
    if x.kind == QP:
        n = len(x.digits)
        if n == 0:
            return x
        m = x.p**n
        M = (-_as_int(x, x.val, x.prec)) % m
        return LocalFieldElem(QP, x.p, x.val, _to_digits(M, x.p, n)).normalized()
    return LocalFieldElem(FPT, x.p, x.val, tuple((-d) % x.p for d in x.digits))


def lf_sub(x: LocalFieldElem, y: LocalFieldElem) -> LocalFieldElem:
    return lf_add(x, lf_neg(y))


def lf_mul(x: LocalFieldElem, y: LocalFieldElem) -> LocalFieldElem:
    if (x.kind, x.p) != (y.kind, y.p):
        raise ValueError("elements of different fields")
    x, y = x.normalized(), y.normalized()
    if not x.digits or not y.digits:
        # zero times something: known to the weaker of the two absolute precisions
        ox = x.val if x.digits else x.prec
        oy = y.val if y.digits else y.prec
        prec = min(x.prec + oy, y.prec + ox)
        return LocalFieldElem(x.kind, x.p, prec, ())
    n = min(len(x.digits), len(y.digits))
    val = x.val + y.val
    if x.kind == QP:
        m = x.p**n
        M = (_as_int(x, x.val, x.val + n) * _as_int(y, y.val, y.val + n)) % m
        return LocalFieldElem(QP, x.p, val, _to_digits(M, x.p, n))
    out = [0] * n
    for i in range(n):
        if x.digits[i]:
            for j in range(n - i):
                out[i + j] = (out[i + j] + x.digits[i] * y.digits[j]) % x.p
    return LocalFieldElem(FPT, x.p, val, tuple(out))


def lf_ord(x: LocalFieldElem) -> int:
    return x.ord()


def lf_ac(x: LocalFieldElem) -> int:
    return x.ac()


def lf_psi(K: FieldSpec, x: LocalFieldElem) -> Cyclotomic:
    """The character psi_K at x."""
    p = K.p
    if K.kind == QP:
        if K.u != 1:
            x = lf_mul(LocalFieldElem.from_rational(K, K.u, x.prec + 1 if x.val >= 0 else x.prec - x.val + 1), x)
        if x.prec < 1:
            raise PrecisionExhausted("character needs the digit at position 0")
        if x.val > 0 or not x.digits:
            return Cyclotomic.rational(1)
        # frac(x / p) = sum_{i <= 0} d_i p^(i - 1)
        k = 1 - x.val
        num = 0
        for i in range(x.val, 1):
            num += x.digit(i) * p ** (i - x.val)
        return Cyclotomic.root(p**k, num % p**k)
    s = x.digit(0) if x.prec > 0 else None
    if s is None:
        raise PrecisionExhausted("character needs the digit at position 0")
    for j, m in K.twist or ():
        s += m * x.digit(j)
    return Cyclotomic.root(p, s % p)
