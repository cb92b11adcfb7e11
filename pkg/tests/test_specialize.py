import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import random_sb
from motint.cef import cef_acfix, cef_annulus, cef_ball, cef_eval, cef_mul, cef_phase, cef_phi_alpha, theta_name
from motint.cyclotomic import Cyclotomic
from motint.errors import BadPrime
from motint.integrate import integrate_all
from motint.laurent import LaurentConst
from motint.linear import LinForm
from motint.localfield import FieldSpec, LocalFieldElem, default_twists, lf_ac, lf_add, lf_mul, lf_ord, lf_psi
from motint.presburger import BasicSet
from motint.specialize import bad_primes, spec_cef_at, spec_laurent, spec_value
from motint.valring import ValueRingElem

Q3, F3, Q5, F5 = FieldSpec(3, "qp"), FieldSpec(3, "fpt"), FieldSpec(5, "qp"), FieldSpec(5, "fpt")
L = ValueRingElem.lpow
R = Cyclotomic.rational


def elem(K, x, prec=8):
    return LocalFieldElem.from_rational(K, x, prec)


def laurent(K, a, prec=8):
    return LocalFieldElem.from_laurent(K, a, prec)


# ----------------------------------------------------------------------
# local field arithmetic


def test_carries_in_mixed_characteristic():
    s = lf_add(elem(Q3, 7), elem(Q3, 5))
    assert lf_ord(s) == 1 and lf_ac(s) == 1
    assert s == elem(Q3, 12)


def test_no_carries_in_equal_characteristic():
    a = laurent(F3, LaurentConst({0: 1, 1: 2}))
    b = laurent(F3, LaurentConst({0: 2, 1: 1}))
    assert lf_add(a, b).is_zero()


def test_angular_component_of_twelve():
    assert lf_ac(elem(Q3, 12)) == 1


@given(st.integers(-500, 500), st.integers(-500, 500), st.sampled_from([3, 5, 7]))
def test_qp_arithmetic_matches_integers(x, y, p):
    K = FieldSpec(p, "qp")
    assert lf_add(elem(K, x, 10), elem(K, y, 10)) == elem(K, x + y, 10)
    assert lf_mul(elem(K, x, 12), elem(K, y, 12)).truncated(8) == elem(K, x * y, 8)


@given(st.lists(st.integers(0, 4), min_size=4, max_size=4), st.lists(st.integers(0, 4), min_size=4, max_size=4))
def test_fpt_addition_is_digitwise(xs, ys):
    a = laurent(F5, LaurentConst(dict(enumerate(xs))), 4)
    b = laurent(F5, LaurentConst(dict(enumerate(ys))), 4)
    want = laurent(F5, LaurentConst({i: (u + v) % 5 for i, (u, v) in enumerate(zip(xs, ys))}), 4)
    assert lf_add(a, b) == want


def test_qp_addition_is_not_digitwise():
    a, b = elem(Q3, 2, 3), elem(Q3, 1, 3)
    assert lf_add(a, b).digits[:2] != tuple((u + v) % 3 for u, v in zip(a.digits, b.digits))[:2]


# ----------------------------------------------------------------------
# characters


@given(
    st.sampled_from([FieldSpec(3, "qp"), FieldSpec(5, "qp"), FieldSpec(3, "fpt"), FieldSpec(5, "fpt")]),
    st.dictionaries(st.integers(-3, 2), st.integers(0, 6), max_size=4),
    st.dictionaries(st.integers(-3, 2), st.integers(0, 6), max_size=4),
    st.booleans(),
)
def test_character_is_additive(K, xa, xb, twisted):
    K = default_twists(K)[1 if twisted else 0]
    a, b = laurent(K, LaurentConst(xa), 6), laurent(K, LaurentConst(xb), 6)
    assert lf_psi(K, lf_add(a, b)) == lf_psi(K, a) * lf_psi(K, b)


def test_character_values():
    et = ValueRingElem.char(LaurentConst({-1: 1}))
    assert spec_value(et, Q5) == Cyclotomic.root(25, 1)
    assert spec_value(et, F5) == R(1)
    assert spec_value(ValueRingElem.echar(2), Q5) == Cyclotomic.root(5, 2)


# ----------------------------------------------------------------------
# values and functions


def test_rational_specialization():
    assert spec_value(L(-2) * (ValueRingElem.const(1) - L(-1)), Q3) == R(Fraction(2, 27))


def _unit(c, p):
    return c.numerator % p != 0 and c.denominator % p != 0


def _generic_at(f, a, p):
    """ord and ac of a - center, and acfix comparisons, survive reduction mod p."""
    for t in f.terms:
        for b in t.bindings.values():
            d = a - b.center
            if d.is_zero() or not _unit(d.ac(), p):
                return False
            if b.ac[0] == "f" and d.ac() != b.ac[1] and not _unit(d.ac() - b.ac[1], p):
                return False
    return True


@given(st.integers(0, 10**6), st.sampled_from([Q3, F3, Q5, F5]))
def test_evaluation_commutes_with_specialization(seed, K):
    rng = random.Random(seed)
    f = random_sb(rng)
    if K.p in bad_primes(f):
        return
    for _ in range(6):
        a = LaurentConst({rng.randint(-2, 2): rng.choice([1, 2]), 3: 1})
        if not _generic_at(f, a, K.p):
            continue
        sym = spec_value(cef_eval(f, {"x": a}), K)
        assert spec_cef_at(f, K, {"x": spec_laurent(a, K, 12)}) == sym


def test_ball_at_uniformizer():
    assert spec_cef_at(cef_phi_alpha(1, 0), Q3, {"x": elem(Q3, 3)}) == R(1)


def test_fixed_angular_component():
    th = LinForm.var(theta_name("x"))
    f = cef_mul(cef_annulus("x", 0, BasicSet.make([th, -th])), cef_acfix("x", 0, 2))
    assert spec_cef_at(f, Q5, {"x": elem(Q5, 2)}) == R(1)
    assert spec_cef_at(f, Q5, {"x": elem(Q5, 7)}) == R(1)
    assert spec_cef_at(f, Q5, {"x": elem(Q5, 1)}) == R(0)


def test_phase_on_ball_at_one():
    f = cef_mul(cef_phase("x", LaurentConst({-1: 1})), cef_ball("x"))
    assert spec_cef_at(f, Q5, {"x": elem(Q5, 1)}) == Cyclotomic.root(25, 1)


# ----------------------------------------------------------------------
# bad primes


def test_bad_primes_of_scaled_phase():
    th = LinForm.var(theta_name("z"))
    f = cef_mul(cef_phase("z", LaurentConst.const(6)), cef_annulus("z", 0, BasicSet.make([th, -th])))
    res = integrate_all(f)
    assert {2, 3} <= set(res.bad_primes)
    assert spec_value(res.scalar(), Q5, res.bad_primes) == R(Fraction(-1, 5))
    with pytest.raises(BadPrime):
        spec_value(res.scalar(), Q3, res.bad_primes)


def test_bad_primes_of_simple_objects():
    assert bad_primes(cef_phi_alpha(1, 0)) == set()
    assert {2, 3} <= bad_primes(cef_acfix("x", 0, Fraction(3, 2)))


@given(st.integers(0, 10**6))
def test_phase_free_values_ignore_twist(seed):
    rng = random.Random(seed)
    f = cef_ball("x", rng.choice([0, 1, 2]), rng.randint(-2, 2))
    v = integrate_all(f).scalar()
    for K in (Q3, F5):
        a, b = default_twists(K)
        assert spec_value(v, a) == spec_value(v, b)
