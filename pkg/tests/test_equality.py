import random

from hypothesis import given, strategies as st

from helpers import random_sb
from motint.cef import CEF, Term, cef_add, cef_annulus, cef_ball, cef_eval, cef_mul, cef_phase, cef_phi_alpha, cef_scale, theta_name
from motint.dsl import parse_laurent
from motint.equality import cef_eq_ae, cef_simplify, schwartz_level
from motint.fourier import convolve, fourier
from motint.laurent import LaurentConst
from motint.linear import LinForm, QuasiPoly
from motint.presburger import BasicSet
from motint.valring import ValueRingElem, vr_eq

L = ValueRingElem.lpow
phi0, phi1 = cef_phi_alpha(1, 0), cef_phi_alpha(1, 1)


def at(f, witness):
    point = {v: parse_laurent(x) for v, x in witness["point"].items()}
    return cef_eval(f, point, witness.get("params"))


def test_sum_order_is_irrelevant():
    assert cef_eq_ae(cef_add(phi0, phi1), cef_add(phi1, phi0)).status == "Equal"


def test_distinct_balls_give_a_witness():
    r = cef_eq_ae(phi0, phi1)
    assert r.status == "NotEqual"
    a, b = at(phi0, r.witness), at(phi1, r.witness)
    assert not vr_eq(a, b)


def test_transform_of_small_ball():
    assert cef_eq_ae(cef_scale(phi0, L(-1)), fourier(phi1)).status == "Equal"


def test_annulus_decomposition_of_ball():
    # unit annulus plus the ball tR, with the centre missing from both
    th = LinForm.var(theta_name("x"))
    pieces = cef_add(cef_annulus("x", 0, BasicSet.make([th, -th])), cef_annulus("x", 0, BasicSet.make([th - 1])))
    assert cef_eq_ae(pieces, phi0)


@given(st.integers(0, 10**6))
def test_witnesses_are_genuine(seed):
    rng = random.Random(seed)
    f, g = random_sb(rng), random_sb(rng)
    r = cef_eq_ae(f, g)
    if r.status == "NotEqual":
        assert not vr_eq(at(f, r.witness), at(g, r.witness))


@given(st.integers(0, 10**6))
def test_simplify_preserves_class(seed):
    f = random_sb(random.Random(seed), pieces=3)
    assert cef_eq_ae(cef_simplify(f), f)


@given(st.integers(0, 10**6))
def test_self_difference_is_zero(seed):
    f = random_sb(random.Random(seed), ("x", "y"))
    assert cef_eq_ae(cef_add(f, cef_scale(f, -1)), cef_scale(f, 0))


# ----------------------------------------------------------------------
# Schwartz-Bruhat level


def test_level_of_unit_ball():
    assert schwartz_level(phi0) == (0, 0)
    assert cef_eq_ae(cef_mul(phi0, phi0), phi0)
    assert cef_eq_ae(convolve(phi0, phi0), phi0)


def test_level_of_phase_on_ball():
    f = cef_mul(cef_phase("x", LaurentConst({-2: 1})), cef_ball("x"))
    assert schwartz_level(f) == (0, 3)
    assert cef_eq_ae(convolve(f, cef_ball("x", 0, 3)), cef_scale(f, L(-3)))
    assert not cef_eq_ae(convolve(f, cef_ball("x", 0, 2)), cef_scale(f, L(-2)))


def test_level_unknown_for_radial_weight():
    th = LinForm.var(theta_name("x"))
    (t,) = cef_annulus("x", 0, BasicSet.make([th])).terms
    f = CEF(("x",), (), [Term(t.bindings, t.cond, QuasiPoly.lpow(-2 * th))])
    assert schwartz_level(f) == "Unknown" or getattr(schwartz_level(f), "name", None) == "Unknown"


@given(st.integers(0, 10**6))
def test_level_is_sound(seed):
    f = random_sb(random.Random(seed))
    lvl = schwartz_level(f)
    if not isinstance(lvl, tuple):
        return
    sup, const = lvl
    assert cef_eq_ae(cef_mul(f, cef_ball("x", 0, sup)), f)
    assert cef_eq_ae(convolve(f, cef_ball("x", 0, const)), cef_scale(f, L(-const)))
