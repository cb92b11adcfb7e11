"""Specialization of symbolic values and functions to Q_p or F_p((t))."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .cef import CEF, cef_bad_primes
from .cyclotomic import Cyclotomic
from .errors import BadPrime, CenterCoincident
from .laurent import LaurentConst
from .localfield import FPT, QP, FieldSpec, LocalFieldElem, lf_mul, lf_psi, lf_sub
from .valring import CharSymbol, ValueRingElem, as_vr


def _mod_p(c: Fraction, p: int) -> int:
    if c.denominator % p == 0:
        raise BadPrime(p, c)
    return c.numerator * pow(c.denominator, -1, p) % p


def spec_char(ch: CharSymbol, K: FieldSpec) -> Cyclotomic:
    """psi_K of the tail sum_{j <= 0} c_j t^j."""
    tail = ch.tail
    if tail.is_zero():
        return Cyclotomic.rational(1)
    lo = min(e for e, _ in tail.items)
    x = LocalFieldElem.from_laurent(K, tail, 1)
    if x.prec < 1:
        x = LocalFieldElem.from_laurent(K, tail, 2)
    for _, c in tail.items:
        if c.denominator % K.p == 0:
            raise BadPrime(K.p, c)
    return lf_psi(K, x)


def spec_value(v, K: FieldSpec, bad_primes: Iterable[int] = ()) -> Cyclotomic:
    """L -> p and character symbols -> values of psi_K."""
    if K.p in set(bad_primes):
        raise BadPrime(K.p, "accumulated bad-prime set")
    v = as_vr(v)
    return v.eval_at(K.p, lambda ch: spec_char(ch, K))


@lru_cache(maxsize=4096)
def spec_laurent(a: LaurentConst, K: FieldSpec, prec: int) -> LocalFieldElem:
    for _, c in a.items:
        if c.denominator % K.p == 0:
            raise BadPrime(K.p, c)
    return LocalFieldElem.from_laurent(K, a, prec)


def spec_cef_at(
    f: CEF,
    K: FieldSpec,
    point: Mapping[str, LocalFieldElem],
    params: Mapping[str, int] | None = None,
    check_primes: bool = True,
) -> Cyclotomic:
    """f_K at a point of K^d, with ord/ac computed from digits."""
    if check_primes and K.p in cef_bad_primes(f):
        raise BadPrime(K.p, "constants of the function")
    params = dict(params or {})
    p = K.p
    total = Cyclotomic.rational(0)
    for idx, t in enumerate(f.terms):
        env = dict(params)
        val = Cyclotomic.rational(1)
        ok = True
        for v, b in t.bindings.items():
            x = point[v]
            c = spec_laurent(b.center, K, x.prec)
            diff = lf_sub(x, c)
            if diff.is_zero():
                raise CenterCoincident(v, idx)
            env[b.theta] = diff.ord()
            sigma = diff.ac()
            kind, u = b.ac
            if kind == "f":
                if _mod_p(u, p) != sigma:
                    ok = False
                    break
            elif u:
                val = val * Cyclotomic.root(p, _mod_p(u, p) * sigma % p)
        if not ok or not t.cond.contains(env):
            continue
        val = val * spec_value(t.weight.eval(env), K)
        for v, a in t.affine:
            x = point[v]
            val = val * lf_psi(K, lf_mul(spec_laurent(a, K, x.prec - min(x.val, 0) + 2), x))
        for v, w, k in t.bilinear:
            x, y = point[v], point[w]
            prod = lf_mul(x, y)
            val = val * lf_psi(K, lf_mul(spec_laurent(k, K, prod.prec - min(prod.val, 0) + 2), prod))
        total = total + val
    return total


def bad_primes(obj) -> set[int]:
    """Primes excluded for a CEF (accumulated plus constants) or an integration result."""
    from .integrate import IntegrationResult

    if isinstance(obj, CEF):
        return cef_bad_primes(obj)
    if isinstance(obj, IntegrationResult):
        out = set(obj.bad_primes)
        if isinstance(obj.value, CEF):
            out |= cef_bad_primes(obj.value)
        elif isinstance(obj.value, ValueRingElem):
            out |= _vr_primes(obj.value)
        return out
    if isinstance(obj, ValueRingElem):
        return _vr_primes(obj)
    raise TypeError(type(obj))


def _vr_primes(v: ValueRingElem) -> set[int]:
    from .primes import prime_factors

    out = set()
    for d in v.denominators():
        out |= prime_factors(d)
    return out
