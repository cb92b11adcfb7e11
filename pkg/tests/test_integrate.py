import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import random_sb
from motint.cef import CEF, Term, cef_acfix, cef_annulus, cef_ball, cef_eval, cef_mul, cef_phase, cef_phi_alpha, cef_scale, theta_name
from motint.cyclotomic import Cyclotomic
from motint.equality import cef_eq_ae
from motint.errors import NotIntegrable
from motint.integrate import integrate_all, integrate_rel
from motint.laurent import LaurentConst
from motint.linear import LinForm, QuasiPoly
from motint.localfield import FieldSpec
from motint.presburger import BasicSet
from motint.specialize import spec_value
from motint.valring import ValueRingElem, vr_eq, vr_eval_at

L = ValueRingElem.lpow
ONE = ValueRingElem.const(1)
TH = LinForm.var(theta_name("z"))
E_z = cef_phase("z", LaurentConst.const(1))


def shell(*ineqs, ac=None):
    cond = BasicSet.make(list(ineqs))
    return cef_annulus("z", 0, cond) if ac is None else cef_annulus("z", 0, cond, ac)


def value(f):
    return integrate_all(f).scalar()


def weighted(f, w):
    (t,) = f.terms
    return CEF(f.vars, f.params, [Term(t.bindings, t.cond, w, t.affine, t.bilinear)])


# ----------------------------------------------------------------------
# the three regimes of one annulus


def test_phase_on_negative_annulus_vanishes():
    f = cef_mul(E_z, cef_mul(shell(TH + 1, -TH - 1), cef_acfix("z", 0, 1)))
    assert value(f).is_zero()


def test_phase_on_unit_annulus():
    assert vr_eq(value(cef_mul(E_z, shell(TH, -TH))), -L(-1))


def test_phase_on_deep_annulus():
    lam = LinForm.var("lam")
    f = cef_mul(E_z, cef_annulus("z", 0, BasicSet.make([TH - lam, lam - TH, lam - 1]), params=["lam"]))
    res = integrate_all(f).value
    for k in range(1, 5):
        assert vr_eq(cef_eval(res, {}, {"lam": k}), L(-k) * (ONE - L(-1)))


def test_phase_with_fixed_angular_component():
    f = cef_mul(E_z, cef_mul(shell(TH, -TH), cef_acfix("z", 0, 2)))
    v = value(f)
    assert vr_eq(v, L(-1) * ValueRingElem.echar(2))
    got = spec_value(v, FieldSpec(5, "qp"))
    assert got == Cyclotomic.root(5, 2) * Cyclotomic.rational(Fraction(1, 5))


# ----------------------------------------------------------------------
# single-variable integrals


@pytest.mark.parametrize("alpha", range(-3, 4))
def test_ball_volumes(alpha):
    assert vr_eq(value(cef_ball("x", 0, alpha)), L(-alpha))


def test_weighted_series_value():
    v = value(weighted(shell(TH), QuasiPoly.lpow(-2 * TH)))
    assert vr_eval_at(v, 2).to_rational() == Fraction(4, 7)


def test_growing_weight_not_integrable():
    with pytest.raises(NotIntegrable):
        integrate_all(weighted(shell(TH), QuasiPoly.lpow(TH)))


# ----------------------------------------------------------------------
# several variables and relative integrals


def test_product_of_unit_balls():
    assert vr_eq(value(cef_phi_alpha(2, 0)), ONE)


def test_relative_integral_with_passive_variable():
    f = cef_mul(cef_phase("x", LaurentConst.const(1), "y"), cef_ball("x", 0, 1))
    res = integrate_rel(f, keep=["y"]).value
    for y, inside in [(LaurentConst.const(1), True), (LaurentConst({1: 1}), True), (LaurentConst({-1: 1}), False)]:
        assert vr_eq(cef_eval(res, {"y": y}), L(-1) if inside else ValueRingElem())
    assert cef_eq_ae(res, cef_scale(cef_ball("y", 0, 0), L(-1)))


def test_relative_integral_keeps_parameter():
    lam = LinForm.var("lam")
    res = integrate_rel(cef_phi_alpha(1, lam, params=["lam"])).value
    for k in range(-2, 3):
        assert vr_eq(cef_eval(res, {}, {"lam": k}), L(-k))


# ----------------------------------------------------------------------
# properties


@given(st.integers(0, 10**6), st.sampled_from([("x", "y"), ("x", "y", "z")]))
def test_fubini(seed, vars):
    f = random_sb(random.Random(seed), vars, pieces=1)
    orders = [list(vars), list(reversed(vars))]
    one, two = (integrate_all(f, order=o).scalar() for o in orders)
    assert vr_eq(one, two)


@given(st.integers(0, 10**6))
def test_linearity(seed):
    rng = random.Random(seed)
    f, g = random_sb(rng), random_sb(rng)
    assert vr_eq(value(f + g), value(f) + value(g))


@given(st.integers(0, 10**6), st.sampled_from([1, 2]))
def test_fubini_with_coupling_phase(seed, k):
    f = random_sb(random.Random(seed), ("x", "y"), pieces=1)
    f = cef_mul(f, cef_phase("x", LaurentConst({-k: 1}), "y"))
    one, two = (integrate_all(f, order=o).scalar() for o in (["x", "y"], ["y", "x"]))
    assert vr_eq(one, two)
