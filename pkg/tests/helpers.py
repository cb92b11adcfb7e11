"""Random generators of test functions shared by the test modules."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from motint.cef import CEF, cef_annulus, cef_ball, cef_const, cef_mul, cef_phase, cef_scale, theta_name
from motint.laurent import LaurentConst
from motint.linear import LinForm, QuasiPoly
from motint.presburger import BasicSet
from motint.resfn import afix
from motint.valring import ValueRingElem

CENTERS = [
    LaurentConst(),
    LaurentConst.const(1),
    LaurentConst({1: 1}),
    LaurentConst({-1: 1}),
    LaurentConst({0: 1, 1: 1}),
    LaurentConst.const(2),
]
PHASES = [
    LaurentConst({-1: 1}),
    LaurentConst({-2: 1}),
    LaurentConst({-1: 2}),
    LaurentConst({-3: 1}),
    LaurentConst({-2: 1, -1: 1}),
    LaurentConst.const(1),
]
COEFFS = [ValueRingElem.const(1), ValueRingElem.const(-1), ValueRingElem.const(2), ValueRingElem.lpow(-1)]


def sb_piece(rng: random.Random, var: str = "x") -> CEF:
    """coefficient * (ball or annulus with fixed angular component) * optional phase."""
    c, k = rng.choice(CENTERS), rng.randint(-1, 2)
    if rng.random() < 0.2:
        f = cef_annulus(var, c, BasicSet.make([], []).add_eq(LinForm.var(theta_name(var)) - k), afix(rng.choice([1, 2])))
    else:
        f = cef_ball(var, c, k)
    if rng.random() < 0.6:
        f = cef_mul(f, cef_phase(var, rng.choice(PHASES)))
    return cef_scale(f, rng.choice(COEFFS))


def random_sb(rng: random.Random, vars=("x",), pieces: int | None = None) -> CEF:
    """A random Schwartz-Bruhat function of the given variables."""
    n = pieces or rng.randint(1, 2)
    out = None
    for _ in range(n):
        g = cef_const(1)
        for v in vars:
            g = cef_mul(g, sb_piece(rng, v))
        out = g if out is None else out + g
    return out


def random_rational(rng: random.Random, lo: int = -3, hi: int = 3) -> Fraction:
    return Fraction(rng.randint(lo, hi))


# ----------------------------------------------------------------------
# random convergent summations for the Presburger engine

SUM_VARS = ("a", "b")


@dataclass
class SumInstance:
    vars: tuple
    cond: object  # BasicSet
    term: object  # QuasiPoly
    lows: dict
    slopes: dict
    degs: dict
    coeff: Fraction
    shift: int

    def value_at(self, point: dict) -> Fraction:
        """The summand at q = 2."""
        v = self.coeff * Fraction(2) ** (self.shift - sum(self.slopes[x] * point[x] for x in self.vars))
        for x in self.vars:
            v *= Fraction(point[x]) ** self.degs[x]
        return v

    def partial_sum(self, T: int) -> Fraction:
        total = Fraction(0)
        for pt in itertools.product(*[range(self.lows[x], T + 1) for x in self.vars]):
            point = dict(zip(self.vars, pt))
            if self.cond.contains(point):
                total += self.value_at(point)
        return total

    def tail_bound(self, T: int) -> float:
        """Bound on the summand mass outside the box [low, T]^r."""
        # prod(h + rest) - prod(h), expanded so no large terms cancel
        tail, head = 0.0, 1.0
        for x in self.vars:
            f = lambda t: (abs(t) + 1) ** self.degs[x] * 2.0 ** (-self.slopes[x] * t)  # noqa: E731
            h = sum(f(t) for t in range(self.lows[x], T + 1))
            rest = sum(f(t) for t in range(T + 1, T + 400))
            tail = tail * (h + rest) + head * rest
            head *= h
        return abs(float(self.coeff)) * 2.0 ** self.shift * tail * 1.001 + 1e-12


def random_sum_instance(rng: random.Random, nvars: int | None = None) -> SumInstance:
    """Set bounded below in every variable, summand c * L^(shift - s.theta) * theta^m."""
    r = nvars or rng.randint(1, 2)
    vars = SUM_VARS[:r]
    lows = {x: rng.randint(-3, 3) for x in vars}
    cond = BasicSet.make([LinForm.var(x) - lows[x] for x in vars])
    for _ in range(rng.randint(0, 2)):
        coeffs = {x: rng.randint(-3, 3) for x in vars}
        f = LinForm(coeffs, rng.randint(-3, 3) + 4)
        if f.vars():
            cond = cond.add_ineq(f)
    if rng.random() < 0.4:
        x = rng.choice(vars)
        cond = cond.add_cong(LinForm.var(x) - rng.randint(0, 2), rng.randint(2, 3))
    slopes = {x: rng.randint(1, 3) for x in vars}
    degs = {x: rng.choice([0, 0, 1, 2]) for x in vars}
    coeff = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
    shift = rng.randint(-2, 2)
    lexp = LinForm({x: -slopes[x] for x in vars}, shift)
    mono = tuple(sorted((x, d) for x, d in degs.items() if d))
    term = QuasiPoly([(lexp, mono, coeff)])
    return SumInstance(vars, cond, term, lows, slopes, degs, coeff, shift)
