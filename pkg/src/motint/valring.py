"""The value ring Z[L, 1/L, 1/(1 - L^-i)] extended by additive-character symbols.

Elements are canonical: a map CharSymbol -> LFraction with no zero values.
LFraction stores a reduced fraction N(L) / (L^s * prod Phi_d(L)^e_d); with a
monic denominator and gcd(N, denominator) = 1 the representation is unique.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .cyclotomic import Cyclotomic, cyclotomic_poly
from .laurent import LaurentConst

Poly = tuple  # coefficients of L^0, L^1, ... as Fractions, no trailing zeros

_F0 = Fraction(0)
_F1 = Fraction(1)


def _ptrim(c: list) -> tuple:
    while c and not c[-1]:
        c.pop()
    return tuple(c)


def _padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _ptrim([(a[i] if i < len(a) else _F0) + (b[i] if i < len(b) else _F0) for i in range(n)])


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [_F0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _ptrim(out)


def _pscale(a: Poly, c: Fraction) -> Poly:
    return _ptrim([x * c for x in a]) if c else ()


def _pdivmod_monic(a: Poly, m: tuple[int, ...]) -> tuple[Poly, Poly]:
    a = list(a)
    dm = len(m) - 1
    if len(a) <= dm:
        return (), tuple(a)
    q = [_F0] * (len(a) - dm)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            q[i - dm] = c
            for j in range(dm + 1):
                if m[j]:
                    a[i - dm + j] -= c * m[j]
    return _ptrim(q), _ptrim(a[:dm])


def _peval(a: Poly, x: Fraction) -> Fraction:
    acc = _F0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _phi(d: int) -> Poly:
    return tuple(Fraction(c) for c in cyclotomic_poly(d))


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


class LFraction:
    """Element of A = Q[L, 1/L, 1/(L^i - 1)] in reduced form."""

    __slots__ = ("num", "s", "cyc", "_hash")

    def __init__(self, num: Iterable = (1,), s: int = 0, cyc: Mapping[int, int] | None = None):
        num = _ptrim([Fraction(c) for c in num])
        cyc = {d: e for d, e in (cyc or {}).items() if e}
        if not num:
            s, cyc = 0, {}
        else:
            if s < 0:
                num = (_F0,) * (-s) + num
                s = 0
            while s > 0 and not num[0]:
                num = num[1:]
                s -= 1
            for d in sorted(cyc):
                e = cyc[d]
                if e < 0:
                    for _ in range(-e):
                        num = _pmul(num, _phi(d))
                    cyc[d] = 0
                    continue
                ph = cyclotomic_poly(d)
                while e > 0:
                    q, r = _pdivmod_monic(num, ph)
                    if r:
                        break
                    num, e = q, e - 1
                cyc[d] = e
            cyc = {d: e for d, e in cyc.items() if e}
        self.num = num
        self.s = s
        self.cyc = tuple(sorted(cyc.items()))
        self._hash = hash((self.num, self.s, self.cyc))

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "LFraction":
        return cls((Fraction(c),))

    @classmethod
    def lpow(cls, k: int) -> "LFraction":
        """L^k for any integer k."""
        if k >= 0:
            return cls((_F0,) * k + (_F1,))
        return cls((_F1,), s=-k)

    @classmethod
    def inv_one_minus_lpow(cls, a: int) -> "LFraction":
        """1 / (1 - L^a), a != 0."""
        if a == 0:
            raise ZeroDivisionError("1/(1 - L^0)")
        if a > 0:
            return cls((-_F1,), cyc={d: 1 for d in _divisors(a)})
        b = -a
        return cls((_F0,) * b + (_F1,), cyc={d: 1 for d in _divisors(b)})

    @classmethod
    def inv_lpow_minus_one(cls, i: int) -> "LFraction":
        """1 / (L^i - 1), i >= 1."""
        return cls((_F1,), cyc={d: 1 for d in _divisors(i)})

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == (_F1,) and not self.s and not self.cyc

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LFraction.const(other)
        return (
            isinstance(other, LFraction)
            and self.num == other.num
            and self.s == other.s
            and self.cyc == other.cyc
        )

    def __hash__(self) -> int:
        return self._hash

    # arithmetic -------------------------------------------------------
    def __mul__(self, other) -> "LFraction":
        if not isinstance(other, LFraction):
            other = LFraction.const(other)
        if self.is_zero() or other.is_zero():
            return ZERO_F
        cyc = dict(self.cyc)
        for d, e in other.cyc:
            cyc[d] = cyc.get(d, 0) + e
        return LFraction(_pmul(self.num, other.num), self.s + other.s, cyc)

    __rmul__ = __mul__

    def __add__(self, other) -> "LFraction":
        if not isinstance(other, LFraction):
            other = LFraction.const(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        s = max(self.s, other.s)
        c1, c2 = dict(self.cyc), dict(other.cyc)
        cyc = {d: max(c1.get(d, 0), c2.get(d, 0)) for d in set(c1) | set(c2)}

        def lift(x: "LFraction", cx: dict) -> Poly:
            n = (_F0,) * (s - x.s) + x.num
            for d, e in cyc.items():
                for _ in range(e - cx.get(d, 0)):
                    n = _pmul(n, _phi(d))
            return n

        return LFraction(_padd(lift(self, c1), lift(other, c2)), s, cyc)

    __radd__ = __add__

    def __neg__(self) -> "LFraction":
        return LFraction(_pscale(self.num, -_F1), self.s, dict(self.cyc))

    def __sub__(self, other) -> "LFraction":
        return self + (-other if isinstance(other, LFraction) else LFraction.const(-Fraction(other)))

    def __rsub__(self, other) -> "LFraction":
        return (-self) + other

    def __pow__(self, n: int) -> "LFraction":
        if n < 0:
            raise ValueError("negative powers are not ring elements in general")
        out = ONE_F
        for _ in range(n):
            out = out * self
        return out

    def denominator_poly(self) -> Poly:
        d = (_F0,) * self.s + (_F1,)
        for k, e in self.cyc:
            for _ in range(e):
                d = _pmul(d, _phi(k))
        return d

    def eval_at(self, q) -> Fraction:
        q = Fraction(q)
        den = q**self.s
        for d, e in self.cyc:
            den *= _peval(_phi(d), q) ** e
        return _peval(self.num, q) / den

    # display ----------------------------------------------------------
    def lminus1_factors(self) -> tuple[Poly, list[int]]:
        """Rewrite the cyclotomic denominator as a product of (L^i - 1).

        Returns the adjusted numerator and the multiset of i's.
        """
        need = dict(self.cyc)
        num = self.num
        factors: list[int] = []
        while need:
            i = max(need)
            factors.append(i)
            for d in _divisors(i):
                if need.get(d, 0) > 0:
                    need[d] -= 1
                    if not need[d]:
                        del need[d]
                else:
                    num = _pmul(num, _phi(d))
        return num, sorted(factors)

    def __repr__(self) -> str:
        return f"LFraction({format_lfraction(self)})"

    __str__ = lambda self: format_lfraction(self)


ZERO_F = LFraction(())
ONE_F = LFraction((1,))


def format_poly_L(num: Poly) -> str:
    terms = []
    for i in range(len(num) - 1, -1, -1):
        c = num[i]
        if not c:
            continue
        mono = "" if i == 0 else "L" if i == 1 else f"L^{i}"
        if not mono:
            t = str(c)
        elif c == 1:
            t = mono
        elif c == -1:
            t = "-" + mono
        else:
            t = f"{c}*{mono}"
        terms.append(t)
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


def format_lfraction(f: LFraction) -> str:
    num, facs = f.lminus1_factors()
    parts = []
    for i in sorted(set(facs), reverse=True):
        k = facs.count(i)
        base = "(L - 1)" if i == 1 else f"(L^{i} - 1)"
        parts.append(f"{base}^-{k}")
    if f.s:
        parts.append(f"L^-{f.s}")
    body = format_poly_L(num)
    if parts:
        return " * ".join(parts) + f" * ({body})"
    return f"({body})"


# ----------------------------------------------------------------------
# character symbols


class CharSymbol:
    """Formal additive-character value E(a) for a Laurent tail a.

    Exponents > 0 are dropped on construction (E is trivial on tR); the t^0
    coefficient is the residue character e^u.  The group law is addition of
    tails, so products of symbols multiply by adding keys.
    """

    __slots__ = ("tail", "_hash")

    def __init__(self, arg: LaurentConst | Mapping[int, object] | None = None):
        if arg is None:
            arg = LaurentConst()
        elif not isinstance(arg, LaurentConst):
            arg = LaurentConst(arg)
        self.tail = arg.truncate_above(0)
        self._hash = hash(self.tail)

    @classmethod
    def residue(cls, u) -> "CharSymbol":
        return cls(LaurentConst.const(u))

    def __mul__(self, other: "CharSymbol") -> "CharSymbol":
        return CharSymbol(self.tail + other.tail)

    def inverse(self) -> "CharSymbol":
        return CharSymbol(-self.tail)

    def is_trivial(self) -> bool:
        return self.tail.is_zero()

    def residue_part(self) -> Fraction:
        return self.tail.coeff(0)

    def __eq__(self, other) -> bool:
        return isinstance(other, CharSymbol) and self.tail == other.tail

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self):
        return self.tail.items

    def __repr__(self) -> str:
        return f"CharSymbol({format_char(self)})"

    def __str__(self) -> str:
        return format_char(self)


TRIVIAL = CharSymbol()


def format_char(c: CharSymbol) -> str:
    if c.is_trivial():
        return "1"
    out = ""
    r = c.residue_part()
    if r:
        out += f"e[{r}]"
    neg = [(e, x) for e, x in c.tail.items if e < 0]
    if neg:
        out += "E[" + ",".join(f"{e}:{x}" for e, x in sorted(neg, reverse=True)) + "]"
    return out


# ----------------------------------------------------------------------
# value ring elements


class ValueRingElem:
    """Canonical element of A[G]: finite map CharSymbol -> nonzero LFraction."""

    __slots__ = ("terms", "_hash")

    def __init__(self, pairs: Iterable[tuple[CharSymbol, LFraction]] | Mapping = ()):
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        acc: dict[CharSymbol, LFraction] = {}
        for ch, f in pairs:
            if not isinstance(f, LFraction):
                f = LFraction.const(f)
            if f.is_zero():
                continue
            acc[ch] = acc[ch] + f if ch in acc else f
        self.terms = {ch: f for ch, f in acc.items() if not f.is_zero()}
        self._hash = None

    # constructors
    @classmethod
    def const(cls, c) -> "ValueRingElem":
        return cls([(TRIVIAL, LFraction.const(c))])

    @classmethod
    def lpow(cls, k: int) -> "ValueRingElem":
        return cls([(TRIVIAL, LFraction.lpow(k))])

    @classmethod
    def of(cls, f: LFraction, ch: CharSymbol = TRIVIAL) -> "ValueRingElem":
        return cls([(ch, f)])

    @classmethod
    def char(cls, arg) -> "ValueRingElem":
        """E(arg) reduced to its symbol."""
        return cls([(CharSymbol(arg), ONE_F)])

    @classmethod
    def echar(cls, u) -> "ValueRingElem":
        """Residue character e^u."""
        return cls([(CharSymbol.residue(u), ONE_F)])

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _key(self):
        return tuple(sorted(((c.sort_key(), f.num, f.s, f.cyc) for c, f in self.terms.items())))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ValueRingElem.const(other)
        if isinstance(other, LFraction):
            other = ValueRingElem.of(other)
        return isinstance(other, ValueRingElem) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __add__(self, other) -> "ValueRingElem":
        other = as_vr(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        return ValueRingElem(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "ValueRingElem":
        return ValueRingElem([(c, -f) for c, f in self.terms.items()])

    def __sub__(self, other) -> "ValueRingElem":
        return self + (-as_vr(other))

    def __rsub__(self, other) -> "ValueRingElem":
        return as_vr(other) - self

    def __mul__(self, other) -> "ValueRingElem":
        other = as_vr(other)
        if not self.terms or not other.terms:
            return ZERO
        if len(other.terms) == 1 and TRIVIAL in other.terms:
            f = other.terms[TRIVIAL]
            if f.is_one():
                return self
            return ValueRingElem([(c, g * f) for c, g in self.terms.items()])
        return ValueRingElem(
            [(c1 * c2, f1 * f2) for c1, f1 in self.terms.items() for c2, f2 in other.terms.items()]
        )

    __rmul__ = __mul__

    def scalar_part(self) -> LFraction | None:
        """The LFraction if the element has only the trivial symbol."""
        if not self.terms:
            return ZERO_F
        if len(self.terms) == 1 and TRIVIAL in self.terms:
            return self.terms[TRIVIAL]
        return None

    def symbols(self) -> list[CharSymbol]:
        return sorted(self.terms, key=CharSymbol.sort_key)

    def eval_at(self, q, sigma: Callable[[CharSymbol], Cyclotomic] | None = None) -> Cyclotomic:
        """Substitute L = q and map each symbol through ``sigma``."""
        total = Cyclotomic.rational(0)
        for ch, f in self.terms.items():
            val = Cyclotomic.rational(f.eval_at(q))
            if not ch.is_trivial():
                if sigma is None:
                    raise ValueError(f"no character assignment for {ch}")
                val = val * sigma(ch)
            total = total + val
        return total

    def denominators(self) -> set[int]:
        """Denominators of character coefficients (bad-prime contributions)."""
        out = set()
        for ch in self.terms:
            for c in ch.tail.rationals():
                out.add(c.denominator)
        return out

    def __repr__(self) -> str:
        return f"ValueRingElem({to_text(self)})"

    def __str__(self) -> str:
        return to_text(self)


ZERO = ValueRingElem()
ONE = ValueRingElem.const(1)


def as_vr(x) -> ValueRingElem:
    if isinstance(x, ValueRingElem):
        return x
    if isinstance(x, LFraction):
        return ValueRingElem.of(x)
    if isinstance(x, CharSymbol):
        return ValueRingElem([(x, ONE_F)])
    if isinstance(x, (int, Fraction)):
        return ValueRingElem.const(x)
    raise TypeError(f"cannot interpret {x!r} as a value-ring element")


def vr_normalize(pairs: Iterable[tuple[object, object]]) -> ValueRingElem:
    """Collapse a raw sum of (coefficient, character argument) pairs.

    The coefficient may be an int, Fraction or LFraction; the argument a
    CharSymbol, a LaurentConst (the argument of E) or None.
    """
    out = []
    for coeff, arg in pairs:
        if not isinstance(coeff, LFraction):
            coeff = LFraction.const(coeff)
        if arg is None:
            ch = TRIVIAL
        elif isinstance(arg, CharSymbol):
            ch = CharSymbol(arg.tail)
        else:
            ch = CharSymbol(arg)
        out.append((ch, coeff))
    return ValueRingElem(out)


def vr_add(u, v) -> ValueRingElem:
    return as_vr(u) + as_vr(v)


def vr_mul(u, v) -> ValueRingElem:
    return as_vr(u) * as_vr(v)


def vr_neg(u) -> ValueRingElem:
    return -as_vr(u)


def vr_eq(u, v) -> bool:
    return as_vr(u) == as_vr(v)


def vr_eval_at(v, q, sigma=None) -> Cyclotomic:
    return as_vr(v).eval_at(q, sigma)


def residue_assignment(p: int) -> Callable[[CharSymbol], Cyclotomic]:
    """Map e^u to zeta_p^(u mod p); only valid for symbols without negative part."""

    def sigma(ch: CharSymbol) -> Cyclotomic:
        if any(e < 0 for e, _ in ch.tail.items):
            raise ValueError(f"{ch} has a valued part; use specialize.spec_value")
        u = ch.residue_part()
        if u.denominator % p == 0:
            raise ValueError(f"residue {u} not defined mod {p}")
        return Cyclotomic.root(p, int(u.numerator * pow(u.denominator, -1, p)) % p)

    return sigma


# ----------------------------------------------------------------------
# serialization


def _term_text(ch: CharSymbol, f: LFraction) -> str:
    s = format_lfraction(f)
    if not ch.is_trivial():
        s += " * " + format_char(ch)
    return s


def to_text(v: ValueRingElem) -> str:
    if not v.terms:
        return "0"
    return " + ".join(_term_text(ch, v.terms[ch]) for ch in v.symbols())


_FACTOR_RE = re.compile(r"\(L(?:\^(\d+))? - 1\)\^-(\d+)")
_LPOW_RE = re.compile(r"L\^-(\d+)")
_CHAR_RE = re.compile(r"(?:e\[([^\]]+)\])?(?:E\[([^\]]+)\])?")


def _parse_poly_L(text: str) -> Poly:
    text = text.strip().replace(" ", "")
    if text == "0":
        return ()
    coeffs: dict[int, Fraction] = {}
    for m in re.finditer(r"([+-]?)([^+-]+)", text):
        sign, body = m.group(1), m.group(2)
        if "L" in body:
            c, _, rest = body.partition("L")
            c = c.rstrip("*") or "1"
            e = int(rest[1:]) if rest.startswith("^") else 1
        else:
            c, e = body, 0
        val = Fraction(c) * (-1 if sign == "-" else 1)
        coeffs[e] = coeffs.get(e, _F0) + val
    n = max(coeffs) + 1
    return _ptrim([coeffs.get(i, _F0) for i in range(n)])


def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur, i = [], 0, "", 0
    while i < len(text):
        ch = text[i]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if depth == 0 and text.startswith(sep, i):
            out.append(cur)
            cur = ""
            i += len(sep)
            continue
        cur += ch
        i += 1
    out.append(cur)
    return out


def from_text(text: str) -> ValueRingElem:
    text = text.strip()
    if text == "0":
        return ZERO
    pairs = []
    for term in _split_top(text, " + "):
        num: Poly = (_F1,)
        s = 0
        cyc: dict[int, int] = {}
        ch = TRIVIAL
        for fac in _split_top(term.strip(), " * "):
            fac = fac.strip()
            m = _FACTOR_RE.fullmatch(fac)
            if m:
                i = int(m.group(1) or 1)
                for d in _divisors(i):
                    cyc[d] = cyc.get(d, 0) + int(m.group(2))
                continue
            m = _LPOW_RE.fullmatch(fac)
            if m:
                s += int(m.group(1))
                continue
            if fac.startswith("("):
                num = _pmul(num, _parse_poly_L(fac[1:-1]))
                continue
            m = _CHAR_RE.fullmatch(fac)
            if m and (m.group(1) or m.group(2)):
                tail = {}
                if m.group(1):
                    tail[0] = Fraction(m.group(1))
                if m.group(2):
                    for item in m.group(2).split(","):
                        e, c = item.split(":")
                        tail[int(e)] = Fraction(c)
                ch = ch * CharSymbol(tail)
                continue
            raise ValueError(f"cannot parse value-ring factor {fac!r}")
        pairs.append((ch, LFraction(num, s, cyc)))
    return ValueRingElem(pairs)


def to_json(v: ValueRingElem) -> dict:
    terms = []
    for ch in v.symbols():
        f = v.terms[ch]
        num, facs = f.lminus1_factors()
        terms.append(
            {
                "num": [str(c) for c in num],
                "denL": f.s,
                "denFactors": facs,
                "tail": {str(e): str(c) for e, c in ch.tail.items},
            }
        )
    return {"terms": terms}


def from_json(d: Mapping) -> ValueRingElem:
    pairs = []
    for t in d["terms"]:
        cyc: dict[int, int] = {}
        for i in t["denFactors"]:
            for k in _divisors(int(i)):
                cyc[k] = cyc.get(k, 0) + 1
        f = LFraction([Fraction(c) for c in t["num"]], int(t["denL"]), cyc)
        ch = CharSymbol({int(e): Fraction(c) for e, c in t["tail"].items()})
        pairs.append((ch, f))
    return ValueRingElem(pairs)
