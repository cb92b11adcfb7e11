import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_sb
from motint.cef import (
    CEF,
    Term,
    cef_add,
    cef_annulus,
    cef_ball,
    cef_mul,
    cef_phase,
    cef_phi_alpha,
    cef_rename,
    cef_scale,
    theta_name,
)
from motint.equality import cef_eq_ae
from motint.fourier import check_convolution_theorem, check_inversion, check_partial_inversion, convolve, fourier
from motint.laurent import LaurentConst
from motint.linear import LinForm, QuasiPoly
from motint.presburger import BasicSet
from motint.valring import ValueRingElem

L = ValueRingElem.lpow


def ball(alpha, var="x"):
    return cef_ball(var, 0, alpha)


def in_y(f):
    return cef_rename(f, {"x": "y"})


@pytest.mark.parametrize("alpha", range(-2, 3))
def test_transform_of_ball(alpha):
    assert cef_eq_ae(in_y(fourier(ball(alpha))), cef_scale(ball(1 - alpha, "y"), L(-alpha)))


def test_transform_of_shifted_ball():
    one = LaurentConst.const(1)
    got = in_y(fourier(cef_ball("x", one, 1)))
    expect = cef_scale(cef_mul(cef_phase("y", one), ball(0, "y")), L(-1))
    assert cef_eq_ae(got, expect)


def test_transform_of_unit_annulus():
    th = LinForm.var(theta_name("x"))
    f = cef_annulus("x", 0, BasicSet.make([th, -th]))
    expect = cef_add(
        cef_scale(ball(1, "y"), ValueRingElem.const(1) - L(-1)),
        cef_scale(cef_annulus("y", 0, BasicSet.make([LinForm.var(theta_name("y")), -LinForm.var(theta_name("y"))])), -L(-1)),
    )
    assert cef_eq_ae(in_y(fourier(f)), expect)


def test_ball_convolutions():
    assert cef_eq_ae(convolve(ball(0), ball(1)), cef_scale(ball(0), L(-1)))
    assert cef_eq_ae(convolve(ball(0), ball(0)), ball(0))


@given(st.integers(-2, 2), st.integers(-2, 2))
def test_ball_convolution_closed_form(a, b):
    assert cef_eq_ae(convolve(ball(a), ball(b)), cef_scale(ball(min(a, b)), L(-max(a, b))))


# ----------------------------------------------------------------------
# inversion


def test_inversion_examples():
    assert check_inversion(cef_phi_alpha(1, 0))
    assert check_inversion(cef_mul(cef_ball("x1", 0, 0), cef_ball("x2", 0, 1)))


def test_inversion_beyond_schwartz_bruhat():
    th = LinForm.var(theta_name("x"))
    (t,) = cef_annulus("x", 0, BasicSet.make([th])).terms
    f = CEF(("x",), (), [Term(t.bindings, t.cond, QuasiPoly.lpow(-2 * th))])
    assert check_inversion(f)


@pytest.mark.parametrize("alpha", [0, 2])
def test_partial_inversion_on_unit_ball(alpha):
    assert check_partial_inversion(cef_phi_alpha(1, 0), alpha)


def test_partial_inversion_with_phase():
    f = cef_mul(cef_phase("x", LaurentConst({-1: 1})), ball(0))
    assert check_partial_inversion(f, 1)


# ----------------------------------------------------------------------
# properties


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_inversion_on_random_functions(seed):
    assert check_inversion(random_sb(random.Random(seed)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_convolution_theorem(seed):
    rng = random.Random(seed)
    assert check_convolution_theorem(random_sb(rng), random_sb(rng))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_convolution_commutes(seed):
    rng = random.Random(seed)
    f, g = random_sb(rng), random_sb(rng)
    assert cef_eq_ae(convolve(f, g), convolve(g, f))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_transform_is_linear(seed):
    rng = random.Random(seed)
    f, g = random_sb(rng), random_sb(rng)
    assert cef_eq_ae(fourier(cef_add(f, cef_scale(g, -1))), cef_add(fourier(f), cef_scale(fourier(g), -1)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(-2, 2))
def test_partial_inversion_on_random_functions(seed, alpha):
    assert check_partial_inversion(random_sb(random.Random(seed)), alpha)
