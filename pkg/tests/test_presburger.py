import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_sum_instance
from motint.errors import NotIntegrable
from motint.linear import LinForm, QuasiPoly
from motint.presburger import (
    EMPTY,
    UNBOUNDED,
    BasicSet,
    PresburgerSet,
    basic_from_json,
    basic_to_json,
    parse_condition,
    ps_intersect,
    ps_is_empty,
    ps_min,
    ps_subtract,
    ps_sum,
    ps_union,
    total_value,
)
from motint.valring import vr_eq, vr_eval_at

th, la = LinForm.var("th"), LinForm.var("la")


def ge(f, c=0):
    return BasicSet.make([f - c])


def le(f, c):
    return BasicSet.make([c - f])


def points(vars, lo=-10, hi=10):
    for pt in itertools.product(range(lo, hi + 1), repeat=len(vars)):
        yield dict(zip(vars, pt))


def value_q2(pieces, point=None) -> Fraction:
    return vr_eval_at(total_value(pieces, point), 2).to_rational()


# ----------------------------------------------------------------------
# set algebra


def test_intersection_and_difference_examples():
    s = ps_intersect(PresburgerSet.of(ge(th)), PresburgerSet.of(le(th, 5)))
    assert [p["th"] for p in points(["th"]) if s.contains(p)] == list(range(0, 6))
    d = ps_subtract(PresburgerSet.of(ge(th)), PresburgerSet.of(ge(th, 3)))
    assert [p["th"] for p in points(["th"]) if d.contains(p)] == [0, 1, 2]


def test_union_of_congruences_counts_eight_points():
    even = BasicSet.make([], [(th, 2)])
    three = BasicSet.make([], [(th, 3)])
    u = ps_union(PresburgerSet.of(even), PresburgerSet.of(three))
    assert sum(1 for t in range(12) if u.contains({"th": t})) == 8
    assert sum(1 for b in u.disjoint() for t in range(12) if b.contains({"th": t})) == 8


def test_emptiness_examples():
    assert BasicSet.make([2 * th - 1, 1 - 2 * th]).is_empty()
    assert BasicSet.make([th, -th], [(th - 1, 2)]).is_empty()
    assert not BasicSet.make([th - la, la - 3]).is_empty()
    assert ps_is_empty(PresburgerSet.of())


def test_min_examples():
    assert ps_min(BasicSet.make([th - 2], [(th - 1, 3)]), th) == 4
    assert ps_min(le(th, 5), th) is UNBOUNDED
    assert ps_min(BasicSet.make([th, -th - 1]), th + la) is EMPTY


def test_condition_syntax():
    s = parse_condition("th >= 0 && th % 2 == 0 && th - la <= 3")
    for p in points(["th", "la"], -6, 6):
        expect = p["th"] >= 0 and p["th"] % 2 == 0 and p["th"] - p["la"] <= 3
        assert s.contains(p) == expect
    u = parse_condition("th < -2 || th == 4")
    assert [p["th"] for p in points(["th"], -5, 5) if u.contains(p)] == [-5, -4, -3, 4]


@st.composite
def basics(draw, vars=("a", "b")):
    ineqs = []
    for _ in range(draw(st.integers(0, 3))):
        coeffs = {v: draw(st.integers(-3, 3)) for v in vars}
        ineqs.append(LinForm(coeffs, draw(st.integers(-6, 6))))
    congs = []
    if draw(st.booleans()):
        coeffs = {v: draw(st.integers(-2, 2)) for v in vars}
        congs.append((LinForm(coeffs, draw(st.integers(0, 3))), draw(st.integers(1, 4))))
    return BasicSet.make(ineqs, congs)


def _direct(b: BasicSet, p) -> bool:
    return all(f.eval(p) >= 0 for f in b.ineqs) and all(f.eval(p) % m == 0 for f, m in b.congs)


@settings(max_examples=60, deadline=None)
@given(basics(), basics())
def test_set_operations_match_membership(s, t):
    S, T = PresburgerSet.of(s), PresburgerSet.of(t)
    inter, uni, diff = ps_intersect(S, T), ps_union(S, T), ps_subtract(S, T)
    pieces = uni.disjoint()
    for p in points(["a", "b"], -7, 7):
        a, b = _direct(s, p), _direct(t, p)
        assert s.contains(p) == a
        assert inter.contains(p) == (a and b)
        assert uni.contains(p) == (a or b)
        assert diff.contains(p) == (a and not b)
        assert sum(piece.contains(p) for piece in pieces) == (1 if a or b else 0)


@settings(max_examples=60, deadline=None)
@given(basics())
def test_emptiness_agrees_with_search(s):
    if not s.is_empty():
        return
    assert not any(s.contains(p) for p in points(["a", "b"], -12, 12))


@given(basics())
def test_json_round_trip(s):
    assert basic_from_json(basic_to_json(s)) == s


# ----------------------------------------------------------------------
# summation


def test_pinned_geometric_series():
    assert value_q2(ps_sum(ge(th), QuasiPoly.lpow(-th), ["th"])) == 2
    even = BasicSet.make([th - 1], [(th, 2)])
    assert value_q2(ps_sum(even, QuasiPoly.lpow(-th), ["th"])) == Fraction(1, 3)
    weighted = QuasiPoly([(-th, (("th", 1),), 1)])
    assert value_q2(ps_sum(ge(th), weighted, ["th"])) == 2


def test_weighted_series_matches_partial_sums():
    weighted = QuasiPoly([(-th, (("th", 1),), 1)])
    closed = value_q2(ps_sum(ge(th), weighted, ["th"]))
    partial = sum(Fraction(t, 2**t) for t in range(0, 61))
    assert abs(closed - partial) < Fraction(1, 2**50)


def test_divergent_series_raises():
    with pytest.raises(NotIntegrable):
        ps_sum(ge(th), QuasiPoly.lpow(th), ["th"])


def test_divergence_is_real():
    """Whenever NotIntegrable is raised, partial sums at q=2 grow without bound."""
    rng = random.Random(7)
    seen = 0
    for _ in range(40):
        lo = rng.randint(-3, 3)
        slope = rng.randint(0, 2)
        deg = rng.randint(0, 2)
        term = QuasiPoly([(slope * th, (("th", deg),) if deg else (), 1)])
        try:
            ps_sum(ge(th, lo), term, ["th"])
        except NotIntegrable:
            seen += 1
            sums = [sum(Fraction(2) ** (slope * t) * Fraction(t) ** deg for t in range(lo, T)) for T in (10, 20, 40)]
            assert abs(sums[0]) < abs(sums[1]) < abs(sums[2])
            assert abs(sums[2]) >= 30
        else:
            raise AssertionError("non-negative slope must diverge")
    assert seen == 40


def test_parametric_sum_matches_pointwise():
    s = BasicSet.make([th - la, 10 - th])
    pieces = ps_sum(s, QuasiPoly.lpow(-th), ["th"])
    for lam in range(-3, 13):
        direct = sum(Fraction(1, 2**t) if t >= 0 else Fraction(2 ** (-t)) for t in range(lam, 11))
        assert value_q2(pieces, {"la": lam}) == direct


def test_random_summations_within_tail_bound():
    rng = random.Random(11)
    for _ in range(40):
        inst = random_sum_instance(rng)
        closed = value_q2(ps_sum(inst.cond, inst.term, list(inst.vars)))
        T = 25
        assert abs(float(closed - inst.partial_sum(T))) <= inst.tail_bound(T)


def test_summation_order_independent():
    rng = random.Random(3)
    for _ in range(25):
        inst = random_sum_instance(rng, nvars=2)
        one = total_value(ps_sum(inst.cond, inst.term, ["a", "b"]))
        two = total_value(ps_sum(inst.cond, inst.term, ["b", "a"]))
        assert vr_eq(one, two)
