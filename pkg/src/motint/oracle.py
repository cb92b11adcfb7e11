"""Brute-force integration over Q_p and F_p((t)).

The region {ord x_i >= -B} is cut into balls adaptively: a ball is split when
a center of some term lies inside it and the term is not constant there, or
when a phase is not constant on it.  A one-variable ball holding a single
center is summed in closed form along the annuli around that center, using
concrete geometric series in q = p.  Values are computed with numeric ord/ac
from digits; only the Cyclotomic type is shared with the symbolic side.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence

from .cef import CEF, Term, VarBinding, cef_affine, cef_bad_primes, cef_mul, cef_phase
from .cyclotomic import Cyclotomic
from .errors import BadPrime, CenterCoincident, PrecisionExhausted, TailNotConvergent
from .laurent import LaurentConst
from .linear import LinForm, binom, mono_eval
from .localfield import FieldSpec, LocalFieldElem, lf_add, lf_sub
from .resfn import residue_modulus
from .specialize import spec_cef_at, spec_laurent, spec_value

_ZERO = Cyclotomic.rational(0)


def _geom_moments(x: Fraction, m: int) -> list[Fraction]:
    """S_i = sum_{j >= 0} j^i x^j for i <= m, |x| < 1."""
    S = [1 / (1 - x)]
    for i in range(1, m + 1):
        S.append(x / (1 - x) * sum(binom(i, k) * S[k] for k in range(i)))
    return S


class _Oracle:
    def __init__(self, f: CEF, K: FieldSpec, B: int, N: int, params: Mapping[str, int] | None):
        self.f, self.K, self.B, self.N = f, K, B, N
        self.p = K.p
        self.params = dict(params or {})
        self.W = N + 2 * B + 12
        self.vars = list(f.vars)
        self.centers = []
        for t in f.terms:
            self.centers.append({v: spec_laurent(b.center, K, self.W) for v, b in t.bindings.items()})
        self.aff_ord = []
        for t in f.terms:
            d = {}
            for v, a in t.affine:
                d[v] = self._ord_or_inf(spec_laurent(a, K, self.W))
            self.aff_ord.append(d)
        self.bil_ord = [[(v, w, self._ord_or_inf(spec_laurent(k, K, self.W))) for v, w, k in t.bilinear] for t in f.terms]

    def _ord_or_inf(self, x: LocalFieldElem) -> int:
        return 10**9 if x.is_zero() else x.ord()

    # helpers -----------------------------------------------------------

    def elem(self, val: int, digits) -> LocalFieldElem:
        return LocalFieldElem.from_int_digits(self.K, val, list(digits) + [0] * (self.W - len(digits)))

    def zero(self) -> LocalFieldElem:
        return LocalFieldElem.zero(self.K, self.W)

    def inside(self, c: LocalFieldElem, rep: LocalFieldElem, r: int) -> bool:
        d = lf_sub(c, rep)
        return d.is_zero() or d.ord() >= r

    def _min_ord(self, rep: LocalFieldElem, r: int) -> int:
        return r if rep.is_zero() else min(rep.ord(), r)

    def harmless(self, i: int, v: str, r: int) -> bool:
        """Term i does not depend on (ord, ac) of x_v - c_v once ord >= r."""
        t = self.f.terms[i]
        b = t.bindings[v]
        th = b.theta
        if any(f.coeff(th) for f, _ in t.cond.congs):
            return False
        uppers, lowers = [], []
        for f in t.cond.ineqs:
            c = f.coeff(th)
            if not c:
                continue
            if len(f.vars()) != 1:
                return False
            (uppers if c < 0 else lowers).append(-f.const / c)
        if uppers and min(uppers) < r:
            return True
        if uppers or any(lo > r for lo in lowers):
            return False
        return b.ac == ("c", 0) and th not in t.weight.vars()

    def dead(self, i: int, box) -> bool:
        """Term i vanishes on the whole box because of a one-variable ord bound."""
        t = self.f.terms[i]
        for v, b in t.bindings.items():
            rep, r = box[v]
            c = self.centers[i][v]
            th = b.theta
            if self.inside(c, rep, r):
                lo, hi = r, None
            else:
                lo = hi = lf_sub(rep, c).ord()
            for f in t.cond.ineqs:
                k = f.coeff(th)
                if not k or len(f.vars()) != 1:
                    continue
                if hi is not None:
                    if k * lo + f.const < 0:
                        return True
                elif k < 0 and k * lo + f.const < 0:
                    return True
            if hi is not None:
                for f, m in t.cond.congs:
                    k = f.coeff(th)
                    if k and len(f.vars()) == 1 and (k * lo + f.const) % m:
                        return True
        return False

    def phase_ok(self, i: int, box) -> bool:
        for v, o in self.aff_ord[i].items():
            if o + box[v][1] < 1:
                return False
        for v, w, o in self.bil_ord[i]:
            (rx, sx), (ry, sy) = box[v], box[w]
            if o + sx + sy < 1 or o + self._min_ord(rx, sx) + sy < 1 or o + sx + self._min_ord(ry, sy) < 1:
                return False
        return True

    def generic_point(self, box, avoid_var=None) -> dict:
        pt = {}
        for v in self.vars:
            rep, r = box[v]
            cands = [rep] + [lf_add(rep, self.elem(r + k, [1])) for k in range(0, 6)]
            cs = [c[v] for c in self.centers if v in c]
            for x in cands:
                if all(not lf_sub(x, c).is_zero() for c in cs):
                    pt[v] = x
                    break
            else:
                raise PrecisionExhausted("no generic point in ball")
        return pt

    def eval(self, point, terms=None) -> Cyclotomic:
        f = self.f if terms is None else CEF(self.f.vars, self.f.params, terms)
        return spec_cef_at(f, self.K, point, self.params, check_primes=False)

    # recursion ---------------------------------------------------------

    def ball_sum(self, box, depth: int) -> Cyclotomic:
        issues = {}
        phase_bad = set()
        alive = []
        for i, t in enumerate(self.f.terms):
            if self.dead(i, box):
                continue
            mine = {}
            for v in t.bindings:
                rep, r = box[v]
                c = self.centers[i][v]
                if self.inside(c, rep, r) and not self.harmless(i, v, r):
                    mine[v] = (i, c.normalized())
            if not self.phase_ok(i, box):
                if not t.bilinear and any(
                    v not in mine and o + box[v][1] < 1 for v, o in self.aff_ord[i].items()
                ):
                    # constant in x_v times a character nontrivial on the x_v-ball
                    continue
                for v, _ in t.affine:
                    phase_bad.add(v)
                for v, w, _ in t.bilinear:
                    phase_bad |= {v, w}
            for v, item in mine.items():
                issues.setdefault(v, set()).add(item)
            alive.append(i)
        if not alive:
            return _ZERO
        vol = Fraction(1, 1)
        for v in self.vars:
            vol *= Fraction(self.p) ** (-box[v][1])
        if not issues and not phase_bad:
            return self.eval(self.generic_point(box), [self.f.terms[i] for i in alive]) * vol
        if not phase_bad and len(issues) == 1:
            (v, lst), = issues.items()
            if len({c for _, c in lst}) == 1:
                return self.tail(box, v, [i for i, _ in lst], lst.pop()[1], vol, alive)
        cands = [v for v in self.vars if v in phase_bad] or [v for v in self.vars if v in issues]
        v = min(cands, key=lambda u: box[u][1])
        if box[v][1] + self.B >= self.N:
            raise PrecisionExhausted(f"ball refinement exceeded depth {self.N}")
        rep, r = box[v]
        total = _ZERO
        for j in range(self.p):
            child = dict(box)
            child[v] = (lf_add(rep, self.elem(r, [j])) if j else rep, r + 1)
            total = total + self.ball_sum(child, depth + 1)
        return total

    def tail(self, box, v: str, active: list[int], c: LocalFieldElem, vol_box: Fraction, alive: list[int]) -> Cyclotomic:
        """Sum over the ball of var v that contains the single relevant center c."""
        p = self.p
        rep, r = box[v]
        others = self.generic_point(box)
        vol_others = vol_box * Fraction(p) ** r
        active_set = set(active)
        passive = [self.f.terms[i] for i in alive if i not in active_set]
        act_terms = [self.f.terms[i] for i in active]
        live = [self.f.terms[i] for i in alive]
        env = dict(self.params)
        for i in active:
            t = self.f.terms[i]
            for w, b in t.bindings.items():
                if w != v:
                    env[b.theta] = lf_sub(others[w], self.centers[i][w]).ord()
        th = act_terms[0].bindings[v].theta
        consts = [abs(f.eval({**env, th: 0})) for t in act_terms for f in t.cond.ineqs]
        consts += [abs(f.eval({**env, th: 0})) for t in act_terms for f, _ in t.cond.congs]
        T = max([r] + [int(math.ceil(x)) + 1 for x in consts])
        total = _ZERO
        for theta in range(r, T):
            for s in range(1, p):
                pt = dict(others)
                pt[v] = self._point_near(c, theta, s, v)
                total = total + self.eval(pt, live) * (Fraction(p) ** (-theta - 1) * vol_others)
        # passive terms are constant on the remaining ball ord(x - c) >= T
        if passive:
            pt = dict(others)
            pt[v] = self._point_near(c, T, 1, v)
            total = total + self.eval(pt, passive) * (Fraction(p) ** (-T) * vol_others)
        M = 1
        for t in act_terms:
            for f, m in t.cond.congs:
                if f.coeff(th):
                    M = M * m // math.gcd(M, m)
        for t in act_terms:
            # angular and constant factors: the term with trivial weight and condition
            bare = Term(t.bindings, type(t.cond)(), None, t.affine, t.bilinear)
            A = _ZERO
            for s in range(1, p):
                pt = dict(others)
                pt[v] = self._point_near(c, T, s, v)
                A = A + spec_cef_at(CEF(self.f.vars, (), [bare]), self.K, pt, self.params, check_primes=False)
            if A.is_zero():
                continue
            for rho in range(M):
                th0 = T + rho
                e0 = {**env, th: th0}
                e1 = {**env, th: th0 + M}
                inside0, inside1 = t.cond.contains(e0), t.cond.contains(e1)
                if inside0 != inside1:
                    raise PrecisionExhausted("condition not periodic beyond the tail start")
                if not inside0:
                    continue
                total = total + A * self._weight_series(t, th, env, th0, M) * vol_others
        return total

    def _point_near(self, c: LocalFieldElem, theta: int, s: int, v: str) -> LocalFieldElem:
        x = lf_add(c, self.elem(theta, [s]))
        cs = [cc[v] for cc in self.centers if v in cc]
        k = 1
        while any(lf_sub(x, y).is_zero() for y in cs):
            x = lf_add(c, self.elem(theta, [s] + [0] * k + [1]))
            k += 1
        return x

    def _weight_series(self, t: Term, th: str, env, th0: int, M: int) -> Cyclotomic:
        """sum_{j >= 0} weight(th0 + M j) * p^(-(th0 + M j) - 1)."""
        p = self.p
        out = _ZERO
        for lexp, mono, coeff in t.weight.items():
            a = lexp.coeff(th)
            rest = lexp - LinForm.var(th, a)
            b = rest.eval(env)
            if a.denominator != 1 or b.denominator != 1:
                raise PrecisionExhausted("fractional exponent")
            a, b = int(a), int(b)
            if a - 1 >= 0:
                raise TailNotConvergent(f"weight L^({lexp}) does not decay near the center")
            k = 0
            for var, e in mono:
                if var == th:
                    k = e
            mono_rest = tuple((var, e) for var, e in mono if var != th)
            scale = mono_eval(mono_rest, env) * Fraction(p) ** ((a - 1) * th0 + b - 1)
            x = Fraction(p) ** ((a - 1) * M)
            S = _geom_moments(x, k)
            series = sum(binom(k, m) * Fraction(th0) ** (k - m) * Fraction(M) ** m * S[m] for m in range(k + 1))
            out = out + spec_value(coeff, self.K) * (scale * series)
        return out

    def run(self) -> Cyclotomic:
        self.check_support()
        box = {v: (self.zero(), -self.B) for v in self.vars}
        return self.ball_sum(box, 0)

    def check_support(self) -> None:
        """Spot-check that f vanishes where some coordinate has ord < -B."""
        base = {v: self.elem(0, [1, 1]) for v in self.vars}
        for v in self.vars:
            for e in (-self.B - 1, -self.B - 2, -self.B - 5):
                for s in range(1, self.p):
                    pt = dict(base)
                    pt[v] = self.elem(e, [s, 1])
                    try:
                        val = self.eval(pt)
                    except CenterCoincident:
                        continue
                    if not val.is_zero():
                        raise PrecisionExhausted(f"support of the integrand exceeds ord >= {-self.B} in {v}")


def oracle_integrate(
    f: CEF, K: FieldSpec, B: int = 3, N: int = 8, params: Mapping[str, int] | None = None
) -> Cyclotomic:
    """Numeric integral of f over K^d as an exact cyclotomic number."""
    if not f.vars:
        return spec_cef_at(f, K, {}, params, check_primes=False)
    return _Oracle(f, K, B, N, params).run()


def oracle_fourier_at(
    f: CEF, K: FieldSpec, y: Mapping[str, object] | object, B: int = 3, N: int = 8, params=None
) -> Cyclotomic:
    """Numeric value of the Fourier transform of f at the point y (Laurent constants)."""
    from .laurent import as_laurent

    if not isinstance(y, Mapping):
        y = {f.vars[0]: y}
    g = f
    for v in f.vars:
        a = as_laurent(y[v])
        if not a.is_zero():
            g = cef_mul(g, cef_phase(v, a))
    return oracle_integrate(g, K, B, N, params)


def _digit_form(a: LaurentConst, K: FieldSpec, W: int) -> LaurentConst:
    """The Laurent polynomial whose coefficients are the p-adic digits of a_K."""
    x = spec_laurent(a, K, W)
    if x.is_zero():
        return LaurentConst()
    return LaurentConst({x.val + i: d for i, d in enumerate(x.digits) if d})


def _residue(u: Fraction, p: int) -> int:
    if u.denominator % p == 0:
        raise BadPrime(p, f"angular value {u}")
    return u.numerator * pow(u.denominator, -1, p) % p


def _reduced(f: CEF, K: FieldSpec, W: int) -> CEF:
    """f with centers in digit form and fixed angular values reduced mod p.

    Products of reduced functions compare centers and angular values the way
    K does, so the symbolic product rules stay valid at this prime.
    """
    terms = []
    for t in f.terms:
        bs = {}
        for v, b in t.bindings.items():
            ac = b.ac
            if ac[0] == "f":
                u = _residue(Fraction(ac[1]), K.p)
                if u == 0:
                    break
                ac = ("f", Fraction(u))
            bs[v] = VarBinding(v, _digit_form(b.center, K, W), ac)
        else:
            terms.append(t.copy(bindings=bs))
    return CEF(f.vars, f.params, terms, f.bad_primes)


def oracle_convolve_at(
    f: CEF, g: CEF, K: FieldSpec, z: Mapping[str, object] | object, B: int = 3, N: int = 8, params=None
) -> Cyclotomic:
    """Numeric value of (f * g)(z) = integral f(x) g(z - x) dx."""
    from .laurent import as_laurent

    if not isinstance(z, Mapping):
        z = {f.vars[0]: z}
    W = N + 2 * B + 12
    h = _reduced(g, K, W)
    for v in f.vars:
        h = cef_affine(h, v, -1, _digit_form(as_laurent(z[v]), K, W))
    f, h = _reduced(f, K, W), _reduced(h, K, W)
    with residue_modulus(K.p):
        prod = cef_mul(f, h)
    if K.p in prod.bad_primes - f.bad_primes - h.bad_primes:
        raise BadPrime(K.p, "product of the two factors")
    return oracle_integrate(prod, K, B, N, params)
