"""Linear forms, multivariate polynomials over Q, and L-exponential quasi-polynomials."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping

from .valring import LFraction, ValueRingElem, ZERO as VR_ZERO, as_vr

_F0 = Fraction(0)
_F1 = Fraction(1)


class LinForm:
    """``sum c_v * v + constant``; coefficients are Fractions, zeros dropped."""

    __slots__ = ("coeffs", "const", "_hash")

    def __init__(self, coeffs: Mapping[str, object] | Iterable[tuple[str, object]] = (), const=0):
        if isinstance(coeffs, dict) or (not isinstance(coeffs, (list, tuple)) and isinstance(coeffs, Mapping)):
            coeffs = coeffs.items()
        acc: dict[str, Fraction] = {}
        for v, c in coeffs:
            if type(c) is not Fraction:
                c = Fraction(c)
            if c:
                acc[v] = acc[v] + c if v in acc else c
        self.coeffs = tuple(sorted((v, c) for v, c in acc.items() if c))
        self.const = const if type(const) is Fraction else Fraction(const)
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: tuple, const: Fraction) -> "LinForm":
        # coeffs already sorted, nonzero, Fraction-valued
        self = object.__new__(cls)
        self.coeffs, self.const = coeffs, const
        self._hash = None
        return self

    @classmethod
    def var(cls, name: str, c=1) -> "LinForm":
        return cls({name: c})

    @classmethod
    def constant(cls, c) -> "LinForm":
        return cls((), c)

    def coeff(self, v: str) -> Fraction:
        for k, c in self.coeffs:
            if k == v:
                return c
        return _F0

    def vars(self) -> set[str]:
        return {v for v, _ in self.coeffs}

    def is_const(self) -> bool:
        return not self.coeffs

    def linear_part(self) -> "LinForm":
        return LinForm._raw(self.coeffs, _F0)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinForm) and self.coeffs == other.coeffs and self.const == other.const

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.coeffs, self.const))
        return self._hash

    def __lt__(self, other: "LinForm") -> bool:
        return (self.coeffs, self.const) < (other.coeffs, other.const)

    def __add__(self, other) -> "LinForm":
        if isinstance(other, LinForm):
            if not other.coeffs:
                return LinForm._raw(self.coeffs, self.const + other.const)
            if not self.coeffs:
                return LinForm._raw(other.coeffs, self.const + other.const)
        else:
            return LinForm._raw(self.coeffs, self.const + Fraction(other))
        return LinForm(self.coeffs + other.coeffs, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "LinForm":
        return LinForm._raw(tuple((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other) -> "LinForm":
        return self + (-other if isinstance(other, LinForm) else -Fraction(other))

    def __rsub__(self, other) -> "LinForm":
        return (-self) + other

    def __mul__(self, k) -> "LinForm":
        k = Fraction(k)
        if not k:
            return LinForm._raw((), _F0)
        return LinForm._raw(tuple((v, c * k) for v, c in self.coeffs), self.const * k)

    __rmul__ = __mul__

    def subs(self, mapping: Mapping[str, "LinForm"]) -> "LinForm":
        out = LinForm((), self.const)
        for v, c in self.coeffs:
            out = out + (mapping[v] * c if v in mapping else LinForm({v: c}))
        return out

    def rename(self, mapping: Mapping[str, str]) -> "LinForm":
        return LinForm([(mapping.get(v, v), c) for v, c in self.coeffs], self.const)

    def eval(self, point: Mapping[str, object]) -> Fraction:
        return self.const + sum((c * Fraction(point[v]) for v, c in self.coeffs), _F0)

    def denominator(self) -> int:
        d = self.const.denominator
        for _, c in self.coeffs:
            d = d * c.denominator // math.gcd(d, c.denominator)
        return d

    def __repr__(self) -> str:
        return f"LinForm({format_linform(self)})"

    def __str__(self) -> str:
        return format_linform(self)


def format_linform(f: LinForm) -> str:
    parts = []
    for v, c in f.coeffs:
        if c == 1:
            parts.append(v)
        elif c == -1:
            parts.append(f"-{v}")
        else:
            cs = f"({c})" if c.denominator != 1 else str(c)
            parts.append(f"{cs}*{v}")
    if f.const or not parts:
        parts.append(f"({f.const})" if f.const.denominator != 1 else str(f.const))
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


# ----------------------------------------------------------------------
# multivariate polynomials over Q

Monomial = tuple  # sorted tuple of (var, exponent >= 1)
ONE_MONO: Monomial = ()


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial, v: str) -> int:
    for k, e in m:
        if k == v:
            return e
    return 0


def mono_without(m: Monomial, v: str) -> Monomial:
    return tuple((k, e) for k, e in m if k != v)


def mono_eval(m: Monomial, point: Mapping[str, object]) -> Fraction:
    out = _F1
    for v, e in m:
        out *= Fraction(point[v]) ** e
    return out


def format_mono(m: Monomial) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m) or "1"


class MPoly:
    """Sparse polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] | Iterable[tuple[Monomial, object]] = ()):
        if isinstance(terms, Mapping):
            terms = terms.items()
        acc: dict[Monomial, Fraction] = {}
        for m, c in terms:
            c = Fraction(c)
            if c:
                acc[m] = acc.get(m, _F0) + c
        self.terms = {m: c for m, c in acc.items() if c}

    @classmethod
    def const(cls, c) -> "MPoly":
        return cls({ONE_MONO: c})

    @classmethod
    def var(cls, v: str) -> "MPoly":
        return cls({((v, 1),): 1})

    @classmethod
    def from_linform(cls, f: LinForm) -> "MPoly":
        return cls([(((v, 1),), c) for v, c in f.coeffs] + [(ONE_MONO, f.const)])

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "MPoly") -> "MPoly":
        return MPoly(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self) -> "MPoly":
        return MPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + (-other)

    def __mul__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            k = Fraction(other)
            return MPoly({m: c * k for m, c in self.terms.items()})
        return MPoly(
            (mono_mul(m1, m2), c1 * c2) for m1, c1 in self.terms.items() for m2, c2 in other.terms.items()
        )

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        out = MPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, MPoly) and self.terms == other.terms

    def subs(self, mapping: Mapping[str, LinForm]) -> "MPoly":
        out = MPoly()
        for m, c in self.terms.items():
            acc = MPoly.const(c)
            for v, e in m:
                base = MPoly.from_linform(mapping[v]) if v in mapping else MPoly.var(v)
                acc = acc * base**e
            out = out + acc
        return out

    def eval(self, point: Mapping[str, object]) -> Fraction:
        return sum((c * mono_eval(m, point) for m, c in self.terms.items()), _F0)

    def vars(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def __repr__(self) -> str:
        return " + ".join(f"{c}*{format_mono(m)}" for m, c in self.terms.items()) or "0"


def binom(n: int, k: int) -> int:
    return math.comb(n, k)


# ----------------------------------------------------------------------
# quasi-polynomials: sum coeff * L^(lexp) * monomial


def _split_lexp(lexp: LinForm) -> tuple[LinForm, int]:
    """Separate the integer part of the constant so keys stay canonical."""
    k = math.floor(lexp.const)
    return LinForm(lexp.coeffs, lexp.const - k), k


class QuasiPoly:
    """Finite sum of ValueRingElem * L^(linear form) * monomial.

    Keys are (LinForm with constant in [0, 1), Monomial); integer parts of
    exponent constants are folded into the coefficients.
    """

    __slots__ = ("terms",)

    def __init__(self, items: Iterable[tuple[LinForm, Monomial, object]] = ()):
        acc: dict[tuple[LinForm, Monomial], ValueRingElem] = {}
        for lexp, mono, coeff in items:
            coeff = as_vr(coeff)
            if coeff.is_zero():
                continue
            key_l, k = _split_lexp(lexp)
            if k:
                coeff = coeff * ValueRingElem.lpow(k)
            key = (key_l, mono)
            acc[key] = acc[key] + coeff if key in acc else coeff
        self.terms = {k: c for k, c in acc.items() if not c.is_zero()}

    @classmethod
    def const(cls, c) -> "QuasiPoly":
        return cls([(LinForm(), ONE_MONO, c)])

    @classmethod
    def lpow(cls, lexp: LinForm, coeff=1) -> "QuasiPoly":
        return cls([(lexp, ONE_MONO, coeff)])

    @classmethod
    def from_mpoly(cls, p: MPoly, coeff=1) -> "QuasiPoly":
        coeff = as_vr(coeff)
        return cls([(LinForm(), m, coeff * ValueRingElem.const(c)) for m, c in p.terms.items()])

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        for (lexp, mono), c in self.terms.items():
            yield lexp, mono, c

    def __add__(self, other: "QuasiPoly") -> "QuasiPoly":
        return QuasiPoly(list(self.items()) + list(other.items()))

    def __neg__(self) -> "QuasiPoly":
        return QuasiPoly((l, m, -c) for l, m, c in self.items())

    def __sub__(self, other: "QuasiPoly") -> "QuasiPoly":
        return self + (-other)

    def __mul__(self, other) -> "QuasiPoly":
        if not isinstance(other, QuasiPoly):
            c = as_vr(other)
            return QuasiPoly((l, m, x * c) for l, m, x in self.items())
        return QuasiPoly(
            (l1 + l2, mono_mul(m1, m2), c1 * c2)
            for l1, m1, c1 in self.items()
            for l2, m2, c2 in other.items()
        )

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, QuasiPoly) and self.terms == other.terms

    def subs(self, mapping: Mapping[str, LinForm]) -> "QuasiPoly":
        if not mapping:
            return self
        out = []
        for lexp, mono, c in self.items():
            new_l = lexp.subs(mapping)
            p = MPoly({mono: 1}).subs(mapping)
            for m2, k in p.terms.items():
                out.append((new_l, m2, c * ValueRingElem.const(k)))
        return QuasiPoly(out)

    def rename(self, mapping: Mapping[str, str]) -> "QuasiPoly":
        return self.subs({k: LinForm.var(v) for k, v in mapping.items()})

    def vars(self) -> set[str]:
        out = set()
        for lexp, mono, _ in self.items():
            out |= lexp.vars()
            out |= {v for v, _ in mono}
        return out

    def eval(self, point: Mapping[str, object]) -> ValueRingElem:
        total = VR_ZERO
        for lexp, mono, c in self.items():
            e = lexp.eval(point)
            if e.denominator != 1:
                raise ValueError(f"non-integral L exponent {e} at {dict(point)}")
            total = total + c * ValueRingElem.lpow(int(e)) * ValueRingElem.const(mono_eval(mono, point))
        return total

    def eval_q(self, point: Mapping[str, object], q) -> dict:
        """Evaluate L-powers at the integer q; returns {CharSymbol: Fraction}."""
        out: dict = {}
        for lexp, mono, c in self.items():
            e = lexp.eval(point)
            if e.denominator != 1:
                raise ValueError(f"non-integral L exponent {e}")
            factor = Fraction(q) ** int(e) * mono_eval(mono, point)
            for ch, f in c.terms.items():
                out[ch] = out.get(ch, _F0) + f.eval_at(q) * factor
        return out

    def __repr__(self) -> str:
        return format_qp(self)

    __str__ = __repr__


def format_qp(qp: QuasiPoly) -> str:
    if qp.is_zero():
        return "0"
    parts = []
    for lexp, mono, c in sorted(qp.items(), key=lambda t: (t[0], t[1])):
        s = f"[{c}]"
        if not (lexp.is_const() and lexp.const == 0):
            s += f" * L^({lexp})"
        if mono:
            s += f" * {format_mono(mono)}"
        parts.append(s)
    return " + ".join(parts)
