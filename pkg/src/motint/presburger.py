"""Quantifier-free Presburger sets and closed-form summation over them.

A BasicSet is a conjunction of linear inequalities ``f >= 0`` and
congruences ``f == 0 mod m``; a PresburgerSet is a finite union of them.
Integer feasibility is decided exactly (equality and congruence elimination
followed by Fourier-Motzkin with dark shadows and splinters).  ``ps_sum``
produces closed forms for sums of L-exponential quasi-polynomials.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import NotIntegrable, SignatureMismatch
from .linear import (
    LinForm,
    MPoly,
    ONE_MONO,
    QuasiPoly,
    binom,
    mono_degree,
    mono_mul,
    mono_without,
)
from .valring import LFraction, ValueRingElem

_F0 = Fraction(0)
_fresh_counter = itertools.count()


def _fresh(prefix: str = "_k") -> str:
    return f"{prefix}{next(_fresh_counter)}"


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# ----------------------------------------------------------------------
# constraint normalization


def _integerize(f: LinForm) -> LinForm:
    d = f.denominator()
    return f * d if d != 1 else f


def norm_ineq(f: LinForm):
    """Normalized ``f >= 0`` or True/False when constant."""
    f = _integerize(f)
    if f.is_const():
        return f.const >= 0
    g = 0
    for _, c in f.coeffs:
        g = math.gcd(g, int(c))
    if g > 1:
        return LinForm([(v, c / g) for v, c in f.coeffs], math.floor(f.const / g))
    return f


def norm_cong(f: LinForm, m: int):
    """Normalized ``f == 0 mod m`` as (LinForm, m) or True/False."""
    d = f.denominator()
    if d != 1:
        f, m = f * d, m * d
    m = abs(int(m))
    if m == 0:
        raise ValueError("modulus 0")
    coeffs = [(v, int(c) % m) for v, c in f.coeffs]
    coeffs = [(v, c) for v, c in coeffs if c]
    const = int(f.const) % m
    if m == 1:
        return True
    if not coeffs:
        return const == 0
    g = m
    for _, c in coeffs:
        g = math.gcd(g, c)
    if g > 1:
        if const % g:
            return False
        coeffs = [(v, c // g) for v, c in coeffs]
        const //= g
        m //= g
        if m == 1:
            return True
    return LinForm(coeffs, const), m


# ----------------------------------------------------------------------
# exact integer feasibility (Omega test)


def _coef(f: LinForm, v: str) -> int:
    return int(f.coeff(v))


def _sat(ineqs: list[LinForm], eqs: list[LinForm], congs: list[tuple[LinForm, int]], depth: int = 0) -> bool:
    if depth > 200:
        raise RecursionError("Presburger solver depth exceeded")
    # normalize
    new_ineqs = []
    for f in ineqs:
        r = norm_ineq(f)
        if r is False:
            return False
        if r is not True:
            new_ineqs.append(r)
    ineqs = new_ineqs
    new_congs = []
    for f, m in congs:
        r = norm_cong(f, m)
        if r is False:
            return False
        if r is not True:
            new_congs.append(r)
    congs = new_congs
    new_eqs = []
    for f in eqs:
        f = _integerize(f)
        if f.is_const():
            if f.const != 0:
                return False
            continue
        g = 0
        for _, c in f.coeffs:
            g = math.gcd(g, int(c))
        if f.const % g:
            return False
        new_eqs.append(f * Fraction(1, g) if g > 1 else f)
    eqs = new_eqs

    # detect equalities among inequality pairs
    if not eqs:
        by_lin: dict = {}
        for f in ineqs:
            by_lin.setdefault(f.coeffs, []).append(f.const)
        for f in ineqs:
            neg = tuple((v, -c) for v, c in f.coeffs)
            if neg in by_lin:
                # f >= 0 and -f + k >= 0  =>  0 <= f <= k
                k = min(by_lin[neg])
                if k + f.const < 0:
                    return False
                if k + f.const == 0:
                    eqs = [f]
                    break

    if eqs:
        e = eqs[0]
        v, a = min(e.coeffs, key=lambda vc: (abs(vc[1]), vc[0]))
        a = int(a)
        rest = e - LinForm.var(v, a)
        sub = {v: rest * Fraction(-1, a)}
        extra_congs = [] if abs(a) == 1 else [(rest, abs(a))]
        return _sat(
            [f.subs(sub) for f in ineqs],
            [f.subs(sub) for f in eqs[1:]],
            [(f.subs(sub), m) for f, m in congs] + extra_congs,
            depth + 1,
        )

    if congs:
        f, m = congs[0]
        for v, c in f.coeffs:
            if math.gcd(int(c), m) == 1:
                break
        else:
            # split the modulus into prime powers (CRT)
            n, parts, p = m, [], 2
            while n > 1:
                if n % p == 0:
                    q = 1
                    while n % p == 0:
                        n //= p
                        q *= p
                    parts.append(q)
                p += 1
            return _sat(ineqs, [], [(f, q) for q in parts] + congs[1:], depth + 1)
        a = int(f.coeff(v))
        inv = pow(a, -1, m)
        rest = f - LinForm.var(v, a)
        k = _fresh()
        # v = m*k + (-inv*rest mod m)
        expr = LinForm.var(k, m) + LinForm([(u, (-inv * int(c)) % m) for u, c in rest.coeffs], (-inv * int(rest.const)) % m)
        sub = {v: expr}
        return _sat([g.subs(sub) for g in ineqs], [], [(g.subs(sub), mm) for g, mm in congs[1:]], depth + 1)

    variables = set()
    for f in ineqs:
        variables |= f.vars()
    if not variables:
        return True

    # variables bounded on one side only can be dropped together with their constraints
    for v in sorted(variables):
        signs = {(_coef(f, v) > 0) for f in ineqs if _coef(f, v)}
        if len(signs) == 1:
            return _sat([f for f in ineqs if not _coef(f, v)], [], [], depth + 1)

    # pick the elimination variable
    best = None
    for v in sorted(variables):
        lows = [_coef(f, v) for f in ineqs if _coef(f, v) > 0]
        ups = [-_coef(f, v) for f in ineqs if _coef(f, v) < 0]
        exact = all(a == 1 for a in lows) or all(b == 1 for b in ups)
        cost = (0 if exact else 1, len(lows) * len(ups))
        if best is None or cost < best[0]:
            best = (cost, v, exact)
    _, v, exact = best
    lows = [f for f in ineqs if _coef(f, v) > 0]
    ups = [f for f in ineqs if _coef(f, v) < 0]
    others = [f for f in ineqs if not _coef(f, v)]

    def combine(dark: bool) -> list[LinForm]:
        out = []
        for lo in lows:
            a = _coef(lo, v)
            l_rest = lo - LinForm.var(v, a)
            for up in ups:
                b = -_coef(up, v)
                u_rest = up + LinForm.var(v, b)
                g = l_rest * b + u_rest * a
                if dark:
                    g = g - (a - 1) * (b - 1)
                out.append(g)
        return out

    if exact:
        return _sat(others + combine(False), [], [], depth + 1)
    if not _sat(others + combine(False), [], [], depth + 1):
        return False
    if _sat(others + combine(True), [], [], depth + 1):
        return True
    mmax = max(-_coef(up, v) for up in ups)
    for lo in lows:
        a = _coef(lo, v)
        top = (mmax * a - a - mmax) // mmax
        for i in range(0, top + 1):
            if _sat(ineqs, [lo - i], [], depth + 1):
                return True
    return False


# ----------------------------------------------------------------------
# real relaxation (Fourier-Motzkin over Q)


def _real_sat(ineqs: list[LinForm]) -> bool:
    ineqs = [f for f in ineqs]
    while True:
        cur = []
        for f in ineqs:
            if f.is_const():
                if f.const < 0:
                    return False
            else:
                cur.append(f)
        if not cur:
            return True
        variables = set().union(*(f.vars() for f in cur))
        v = min(
            sorted(variables),
            key=lambda x: sum(1 for f in cur if f.coeff(x) > 0) * sum(1 for f in cur if f.coeff(x) < 0),
        )
        lows = [f * (1 / f.coeff(v)) for f in cur if f.coeff(v) > 0]
        ups = [f * (1 / -f.coeff(v)) for f in cur if f.coeff(v) < 0]
        rest = [f for f in cur if not f.coeff(v)]
        new = set(rest)
        for lo in lows:
            for up in ups:
                new.add(lo + up)
        ineqs = list(new)


def _real_min(ineqs: list[LinForm], f: LinForm) -> Fraction | None:
    """Infimum of f over the real polyhedron (None if unbounded); assumes nonempty."""
    mu = _fresh("_mu")
    # eliminate every variable except mu from {ineqs, mu - f >= 0}
    cons = list(ineqs) + [LinForm.var(mu) - f]
    variables = set().union(*(g.vars() for g in cons)) - {mu}
    for v in sorted(variables):
        lows = [g * (1 / g.coeff(v)) for g in cons if g.coeff(v) > 0]
        ups = [g * (1 / -g.coeff(v)) for g in cons if g.coeff(v) < 0]
        rest = [g for g in cons if not g.coeff(v)]
        new = set(rest)
        for lo in lows:
            for up in ups:
                new.add(lo + up)
        cons = list(new)
    lower = None
    for g in cons:
        c = g.coeff(mu)
        if c > 0:
            b = -g.const / c
            lower = b if lower is None else max(lower, b)
    return lower


# ----------------------------------------------------------------------
# basic sets


@dataclass(frozen=True)
class BasicSet:
    """Conjunction of ``f >= 0`` (ineqs) and ``f == 0 mod m`` (congs)."""

    ineqs: tuple[LinForm, ...] = ()
    congs: tuple[tuple[LinForm, int], ...] = ()

    @classmethod
    def make(cls, ineqs: Iterable[LinForm] = (), congs: Iterable[tuple[LinForm, int]] = ()) -> "BasicSet":
        out_i: dict[tuple, Fraction] = {}
        false = False
        for f in ineqs:
            r = norm_ineq(f)
            if r is False:
                false = True
            elif r is not True:
                # keep only the tightest constant per linear part
                k = r.coeffs
                out_i[k] = min(out_i[k], r.const) if k in out_i else r.const
        out_c = set()
        for f, m in congs:
            r = norm_cong(f, m)
            if r is False:
                false = True
            elif r is not True:
                out_c.add(r)
        if false:
            return FALSE
        return cls(
            tuple(sorted(LinForm(k, c) for k, c in out_i.items())),
            tuple(sorted(out_c, key=lambda fm: (fm[0], fm[1]))),
        )

    def is_false(self) -> bool:
        return self is FALSE or self == FALSE

    def vars(self) -> set[str]:
        out = set()
        for f in self.ineqs:
            out |= f.vars()
        for f, _ in self.congs:
            out |= f.vars()
        return out

    def __and__(self, other: "BasicSet") -> "BasicSet":
        return BasicSet.make(self.ineqs + other.ineqs, self.congs + other.congs)

    def add_ineq(self, f: LinForm) -> "BasicSet":
        return BasicSet.make(self.ineqs + (f,), self.congs)

    def add_eq(self, f: LinForm) -> "BasicSet":
        return BasicSet.make(self.ineqs + (f, -f), self.congs)

    def add_cong(self, f: LinForm, m: int) -> "BasicSet":
        return BasicSet.make(self.ineqs, self.congs + ((f, m),))

    def subs(self, mapping: Mapping[str, LinForm]) -> "BasicSet":
        if not mapping:
            return self
        return BasicSet.make(
            (f.subs(mapping) for f in self.ineqs), ((f.subs(mapping), m) for f, m in self.congs)
        )

    def rename(self, mapping: Mapping[str, str]) -> "BasicSet":
        return self.subs({k: LinForm.var(v) for k, v in mapping.items()})

    def contains(self, point: Mapping[str, object]) -> bool:
        for f in self.ineqs:
            if f.eval(point) < 0:
                return False
        for f, m in self.congs:
            val = f.eval(point)
            if val.denominator != 1 or int(val) % m:
                return False
        return True

    def is_empty(self) -> bool:
        if self.is_false():
            return True
        return not _sat(list(self.ineqs), [], list(self.congs))

    def __str__(self) -> str:
        return format_basic(self)


FALSE = BasicSet((LinForm.constant(-1),), ())
TRUE = BasicSet()


def format_basic(b: BasicSet) -> str:
    if b.is_false():
        return "false"
    parts = []
    for f in b.ineqs:
        lin, c = f.linear_part(), f.const
        parts.append(f"{lin} >= {-c}")
    for f, m in b.congs:
        lin, c = f.linear_part(), f.const
        parts.append(f"{lin} % {m} == {(-c) % m}")
    return " && ".join(parts) if parts else "true"


def negate_ineq(f: LinForm) -> LinForm:
    return -f - 1


def basic_subtract(s: BasicSet, t: BasicSet) -> list[BasicSet]:
    """Disjoint pieces of s minus t."""
    out = []
    acc = s
    for f in t.ineqs:
        piece = acc.add_ineq(negate_ineq(f))
        if not piece.is_empty():
            out.append(piece)
        acc = acc.add_ineq(f)
        if acc.is_empty():
            return out
    for f, m in t.congs:
        for r in range(1, m):
            piece = acc.add_cong(f - r, m)
            if not piece.is_empty():
                out.append(piece)
        acc = acc.add_cong(f, m)
        if acc.is_empty():
            return out
    return out


# ----------------------------------------------------------------------
# unions


@dataclass(frozen=True)
class PresburgerSet:
    basics: tuple[BasicSet, ...] = ()
    signature: tuple[str, ...] | None = None

    @classmethod
    def of(cls, *basics: BasicSet, signature: Sequence[str] | None = None) -> "PresburgerSet":
        return cls(tuple(b for b in basics if not b.is_false()), tuple(signature) if signature else None)

    def _check(self, other: "PresburgerSet") -> tuple[str, ...] | None:
        if self.signature and other.signature and set(self.signature) != set(other.signature):
            raise SignatureMismatch(f"{self.signature} vs {other.signature}")
        return self.signature or other.signature

    def contains(self, point) -> bool:
        return any(b.contains(point) for b in self.basics)

    def is_empty(self) -> bool:
        return all(b.is_empty() for b in self.basics)

    def disjoint(self) -> list[BasicSet]:
        out: list[BasicSet] = []
        for b in self.basics:
            pieces = [b]
            for prev in out:
                nxt = []
                for p in pieces:
                    nxt.extend(basic_subtract(p, prev))
                pieces = nxt
            out.extend(p for p in pieces if not p.is_empty())
        return out

    def vars(self) -> set[str]:
        return set().union(*(b.vars() for b in self.basics)) if self.basics else set()

    def __str__(self) -> str:
        if not self.basics:
            return "false"
        return " || ".join(f"({b})" for b in self.basics)


def ps_intersect(s: PresburgerSet, t: PresburgerSet) -> PresburgerSet:
    sig = s._check(t)
    return PresburgerSet.of(*[a & b for a in s.basics for b in t.basics], signature=sig)


def ps_union(s: PresburgerSet, t: PresburgerSet) -> PresburgerSet:
    sig = s._check(t)
    return PresburgerSet.of(*(s.basics + t.basics), signature=sig)


def ps_subtract(s: PresburgerSet, t: PresburgerSet) -> PresburgerSet:
    sig = s._check(t)
    pieces = PresburgerSet.of(*s.basics).disjoint()
    for b in t.basics:
        nxt = []
        for p in pieces:
            nxt.extend(basic_subtract(p, b))
        pieces = nxt
    return PresburgerSet.of(*pieces, signature=sig)


def ps_is_empty(s: PresburgerSet | BasicSet) -> bool:
    return s.is_empty()


# ----------------------------------------------------------------------
# minimization


class _Sentinel:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


UNBOUNDED = _Sentinel("Unbounded")
EMPTY = _Sentinel("Empty")


def _basic_min(b: BasicSet, f: LinForm):
    if b.is_empty():
        return EMPTY
    f = _integerize(f) if f.denominator() != 1 else f
    scale = 1
    # recession direction decreasing f?
    hom = [LinForm(g.coeffs) for g in b.ineqs]
    if _real_sat(hom + [-LinForm(f.coeffs) - 1]):
        return UNBOUNDED
    lb = _real_min(list(b.ineqs), f)
    if lb is None:
        return UNBOUNDED
    lo = math.ceil(lb)

    def ok(m: int) -> bool:
        return not b.add_ineq(LinForm((), m) - f).is_empty()

    if ok(lo):
        return lo // scale
    step = 1
    hi = lo + step
    while not ok(hi):
        lo = hi
        step *= 2
        hi = lo + step
    # lo infeasible, hi feasible
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def ps_min(s: PresburgerSet | BasicSet, f: LinForm):
    """Exact minimum of f over s, or UNBOUNDED / EMPTY."""
    basics = s.basics if isinstance(s, PresburgerSet) else (s,)
    best = EMPTY
    for b in basics:
        r = _basic_min(b, f)
        if r is UNBOUNDED:
            return UNBOUNDED
        if r is EMPTY:
            continue
        if best is EMPTY or r < best:
            best = r
    return best


def ps_max(s, f: LinForm):
    r = ps_min(s, -f)
    if r is UNBOUNDED or r is EMPTY:
        return r
    return -r


# ----------------------------------------------------------------------
# summation


@lru_cache(maxsize=None)
def _faulhaber(m: int) -> tuple[Fraction, ...]:
    """Coefficients of P_m(J) = sum_{j=0}^{J} j^m as a polynomial in J."""
    if m == 0:
        return (Fraction(1), Fraction(1))  # J + 1
    # (J+1)^(m+1) = sum_{i=0}^{m} C(m+1, i) P_i(J)
    target = [Fraction(binom(m + 1, k)) for k in range(m + 2)]
    for i in range(m):
        for k, c in enumerate(_faulhaber(i)):
            target[k] -= binom(m + 1, i) * c
    return tuple(c / (m + 1) for c in target)


@lru_cache(maxsize=None)
def _eulerian_num(m: int) -> tuple[int, ...]:
    """N_m with sum_{j>=0} j^m x^j = N_m(x) / (1 - x)^(m+1)."""
    if m == 0:
        return (1,)
    prev = _eulerian_num(m - 1)
    # x * (N'(1-x) + m N)
    deriv = [i * c for i, c in enumerate(prev)][1:]
    t = [0] * (len(prev) + 1)
    for i, c in enumerate(deriv):
        t[i] += c
        t[i + 1] -= c
    for i, c in enumerate(prev):
        t[i] += (m) * c
    out = [0] + t
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@lru_cache(maxsize=None)
def series_sum(m: int, a: int) -> ValueRingElem:
    """sum_{j>=0} j^m L^(a j) as an element of the value ring (a != 0)."""
    num = _eulerian_num(m)
    val = LFraction(())
    for i, c in enumerate(num):
        if c:
            val = val + LFraction.lpow(a * i) * c
    val = val * (LFraction.inv_one_minus_lpow(a) ** (m + 1))
    return ValueRingElem.of(val)


def _poly_in(mono, v: str):
    return mono_degree(mono, v), mono_without(mono, v)


def _finite_sum_pieces(lexp_rest: LinForm, mono_rest, coeff: ValueRingElem, a: int, k: int,
                       lo: LinForm, hi: LinForm) -> list[tuple[LinForm, object, ValueRingElem]]:
    """sum_{theta=lo}^{hi} L^(a theta) theta^k, times L^lexp_rest * mono_rest * coeff."""
    out = []
    J = hi - lo
    # theta^k = sum_m C(k,m) lo^(k-m) j^m
    for m in range(k + 1):
        base = MPoly.from_linform(lo) ** (k - m) * binom(k, m)
        if a == 0:
            fp = _faulhaber(m)
            s = MPoly()
            jp = MPoly.from_linform(J)
            acc = MPoly.const(1)
            for c in fp:
                s = s + acc * c
                acc = acc * jp
            poly = base * s
            for mono, c in poly.terms.items():
                out.append((lexp_rest, mono_mul(mono_rest, mono), coeff * ValueRingElem.const(c)))
            continue
        # L^(a lo) [F_m - L^(a(J+1)) sum_n C(m,n) (J+1)^(m-n) F_n]
        head_l = lexp_rest + lo * a
        for mono, c in base.terms.items():
            out.append((head_l, mono_mul(mono_rest, mono), coeff * series_sum(m, a) * ValueRingElem.const(c)))
        tail_l = lexp_rest + (hi + 1) * a
        jp1 = MPoly.from_linform(J + 1)
        for n in range(m + 1):
            poly = base * (jp1 ** (m - n)) * binom(m, n)
            for mono, c in poly.terms.items():
                out.append((tail_l, mono_mul(mono_rest, mono), -coeff * series_sum(n, a) * ValueRingElem.const(c)))
    return out


def _infinite_sum_pieces(lexp_rest, mono_rest, coeff, a: int, k: int, anchor: LinForm, direction: int):
    """sum over theta = anchor + direction*j, j >= 0, of L^(a theta) theta^k."""
    out = []
    eff = a * direction
    head_l = lexp_rest + anchor * a
    for m in range(k + 1):
        base = MPoly.from_linform(anchor) ** (k - m) * (binom(k, m) * direction**m)
        for mono, c in base.terms.items():
            out.append((head_l, mono_mul(mono_rest, mono), coeff * series_sum(m, eff) * ValueRingElem.const(c)))
    return out


def _sum_one(S: BasicSet, qp: QuasiPoly, v: str) -> list[tuple[BasicSet, QuasiPoly]]:
    if qp.is_zero() or S.is_empty():
        return []
    # integrality: congruences on v and rational exponent coefficients
    M = 1
    for f, m in S.congs:
        if f.coeff(v):
            M = _lcm(M, m)
    for lexp, _, _ in qp.items():
        M = _lcm(M, lexp.coeff(v).denominator)
    if M > 1:
        out = []
        for r in range(M):
            sub = {v: LinForm.var(v, M) + r}
            out.extend(_sum_one(S.subs(sub), qp.subs(sub), v))
        return out

    lows, ups, rest = [], [], []
    for f in S.ineqs:
        c = int(f.coeff(v))
        if c > 0:
            lows.append((c, f - LinForm.var(v, c)))
        elif c < 0:
            ups.append((-c, f + LinForm.var(v, -c)))
        else:
            rest.append(f)
    base = BasicSet.make(rest, S.congs)

    # non-unit bounds: split other variables by residue to make ceil/floor linear
    splits: list[list[tuple[list, LinForm]]] = []
    for c, r in lows:
        if c == 1:
            splits.append([([], -r)])
        else:
            splits.append([([(r - s, c)], (-r + s) * Fraction(1, c)) for s in range(c)])
    n_low = len(splits)
    for c, r in ups:
        if c == 1:
            splits.append([([], r)])
        else:
            splits.append([([(r - s, c)], (r - s) * Fraction(1, c)) for s in range(c)])

    results = []
    for combo in itertools.product(*splits):
        congs = []
        for cs, _ in combo:
            congs.extend(cs)
        region = BasicSet.make(base.ineqs, base.congs + tuple(congs))
        if region.is_empty():
            continue
        los = [b for _, b in combo[:n_low]]
        his = [b for _, b in combo[n_low:]]
        results.extend(_sum_bounds(region, qp, v, _dedup_bounds(los, True), _dedup_bounds(his, False)))
    return results


def _dedup_bounds(bounds: list[LinForm], lower: bool) -> list[LinForm]:
    """Drop bounds dominated by another bound differing only by a constant."""
    keep = []
    for i, b in enumerate(bounds):
        dominated = False
        for j, o in enumerate(bounds):
            if i == j:
                continue
            d = o - b
            if d.is_const():
                if (lower and d.const > 0) or (not lower and d.const < 0) or (d.const == 0 and j < i):
                    dominated = True
                    break
        if not dominated:
            keep.append(b)
    return keep


def _select(bounds: list[LinForm], lower: bool):
    """Yield (bound, conditions) making ``bound`` the active max (lower) / min (upper)."""
    if not bounds:
        yield None, []
        return
    for i, b in enumerate(bounds):
        conds = []
        for j, o in enumerate(bounds):
            if i == j:
                continue
            d = (b - o) if lower else (o - b)
            conds.append(d - 1 if j < i else d)
        yield b, conds


def _sum_bounds(region: BasicSet, qp: QuasiPoly, v: str, los: list[LinForm], his: list[LinForm]):
    out = []
    for lo, lconds in _select(los, True):
        for hi, hconds in _select(his, False):
            piece = BasicSet.make(region.ineqs + tuple(lconds) + tuple(hconds), region.congs)
            if lo is not None and hi is not None:
                piece = piece.add_ineq(hi - lo)
            if piece.is_empty():
                continue
            items = []
            for lexp, mono, coeff in qp.items():
                a = lexp.coeff(v)
                assert a.denominator == 1
                a = int(a)
                k, mrest = _poly_in(mono, v)
                lrest = lexp - LinForm.var(v, a)
                if lo is not None and hi is not None:
                    items.extend(_finite_sum_pieces(lrest, mrest, coeff, a, k, lo, hi))
                elif lo is not None:
                    if a >= 0:
                        raise NotIntegrable(f"sum over {v} >= {lo} diverges (L exponent slope {a})", {v: 1})
                    items.extend(_infinite_sum_pieces(lrest, mrest, coeff, a, k, lo, 1))
                elif hi is not None:
                    if a <= 0:
                        raise NotIntegrable(f"sum over {v} <= {hi} diverges (L exponent slope {a})", {v: -1})
                    items.extend(_infinite_sum_pieces(lrest, mrest, coeff, a, k, hi, -1))
                else:
                    raise NotIntegrable(f"sum over all integers {v} diverges", {v: 1})
            qp2 = QuasiPoly(items)
            if not qp2.is_zero():
                out.append((piece, qp2))
    return out


def simplify_basic(b: BasicSet) -> BasicSet:
    """Remove inequalities implied by the others."""
    if b.is_false():
        return b
    ineqs = list(b.ineqs)
    i = 0
    while i < len(ineqs):
        others = ineqs[:i] + ineqs[i + 1 :]
        test = BasicSet.make(others + [negate_ineq(ineqs[i])], b.congs)
        if test.is_empty():
            ineqs = others
        else:
            i += 1
    return BasicSet.make(ineqs, b.congs)


def ps_sum(s: PresburgerSet | BasicSet, t: QuasiPoly, summed: Sequence[str], simplify: bool = True):
    """Closed form of sum_{summed in s} t as [(BasicSet over free vars, QuasiPoly)].

    Raises NotIntegrable when the sum diverges for some q > 1 on a nonempty
    region.  Unions are disjointified first.
    """
    basics = s.disjoint() if isinstance(s, PresburgerSet) else [s]
    pieces = [(b, t) for b in basics]
    for v in summed:
        nxt = []
        for b, qp in pieces:
            nxt.extend(_sum_one(b, qp, v))
        pieces = nxt
    merged: dict[BasicSet, QuasiPoly] = {}
    for b, qp in pieces:
        if simplify:
            b = simplify_basic(b)
        merged[b] = merged[b] + qp if b in merged else qp
    return [(b, qp) for b, qp in merged.items() if not qp.is_zero()]


def total_value(pieces, point: Mapping[str, object] | None = None) -> ValueRingElem:
    """Evaluate a ps_sum result at a point of the free variables."""
    point = point or {}
    out = ValueRingElem()
    for b, qp in pieces:
        if b.contains(point):
            out = out + qp.eval(point)
    return out


# ----------------------------------------------------------------------
# text syntax:  th >= 0 && th % 2 == 0 && th - la <= 3


def parse_linform(text: str) -> LinForm:
    import re

    text = text.replace(" ", "")
    if not text:
        raise ValueError("empty linear form")
    out = LinForm()
    for m in re.finditer(r"([+-]?)([^+-]+)", text):
        sign = -1 if m.group(1) == "-" else 1
        body = m.group(2)
        if "*" in body:
            c, var = body.split("*", 1)
            if re.fullmatch(r"[A-Za-z_]\w*", c):
                c, var = var, c
            out = out + LinForm.var(var, Fraction(c) * sign)
        elif re.fullmatch(r"[A-Za-z_]\w*", body):
            out = out + LinForm.var(body, sign)
        else:
            out = out + Fraction(body) * sign
    return out


def parse_condition(text: str) -> PresburgerSet:
    """Parse ``a && b || c`` conditions (``||`` binds loosest)."""
    import re

    basics = []
    for disj in text.split("||"):
        b = TRUE
        for atom in disj.split("&&"):
            atom = atom.strip().strip("()").strip()
            if not atom or atom == "true":
                continue
            m = re.fullmatch(r"(.+?)%\s*(\d+)\s*==\s*(.+)", atom)
            if m:
                f = parse_linform(m.group(1)) - parse_linform(m.group(3))
                b = b.add_cong(f, int(m.group(2)))
                continue
            m = re.fullmatch(r"(.+?)(>=|<=|==|>|<|!=)(.+)", atom)
            if not m:
                raise ValueError(f"cannot parse condition atom {atom!r}")
            lhs, op, rhs = parse_linform(m.group(1)), m.group(2), parse_linform(m.group(3))
            d = lhs - rhs
            if op == ">=":
                b = b.add_ineq(d)
            elif op == "<=":
                b = b.add_ineq(-d)
            elif op == ">":
                b = b.add_ineq(d - 1)
            elif op == "<":
                b = b.add_ineq(-d - 1)
            elif op == "==":
                b = b.add_eq(d)
            else:
                raise ValueError("'!=' is not a basic condition; write it as a union")
        basics.append(b)
    return PresburgerSet.of(*basics)


def basic_to_json(b: BasicSet) -> dict:
    return {
        "ineqs": [{"coeffs": {v: str(c) for v, c in f.coeffs}, "const": str(f.const)} for f in b.ineqs],
        "congs": [{"coeffs": {v: str(c) for v, c in f.coeffs}, "const": str(f.const), "mod": m} for f, m in b.congs],
    }


def basic_from_json(d: Mapping) -> BasicSet:
    ineqs = [LinForm({v: Fraction(c) for v, c in f["coeffs"].items()}, Fraction(f["const"])) for f in d["ineqs"]]
    congs = [
        (LinForm({v: Fraction(c) for v, c in f["coeffs"].items()}, Fraction(f["const"])), int(f["mod"]))
        for f in d["congs"]
    ]
    return BasicSet.make(ineqs, congs)
