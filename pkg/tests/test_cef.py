import random

import pytest
from hypothesis import given, strategies as st

from helpers import random_sb
from motint.cef import (
    CEF,
    Term,
    cef_annulus,
    cef_acfix,
    cef_add,
    cef_affine,
    cef_ball,
    cef_eval,
    cef_mul,
    cef_phase,
    cef_phi_alpha,
    cef_scale,
    theta_name,
    zero_cef,
)
from motint.equality import cef_eq_ae
from motint.errors import CenterCoincident, SignatureMismatch
from motint.integrate import integrate_all
from motint.laurent import LaurentConst
from motint.linear import LinForm, QuasiPoly
from motint.presburger import BasicSet
from motint.serialize import cef_from_json, cef_to_json
from motint.valring import ValueRingElem, vr_eq

L = ValueRingElem.lpow
ONE = ValueRingElem.const(1)
t = lambda k, c=1: LaurentConst({k: c})  # noqa: E731


def mass(f):
    return integrate_all(f).scalar()


# ----------------------------------------------------------------------
# constructors


def test_phi_alpha_masses():
    assert vr_eq(mass(cef_phi_alpha(1, 0)), ONE)
    assert vr_eq(mass(cef_phi_alpha(2, 1)), L(-2))


def test_parametric_ball_mass():
    lam = LinForm.var("lam")
    res = integrate_all(cef_phi_alpha(1, lam, params=["lam"])).value
    for k in range(-3, 4):
        assert vr_eq(cef_eval(res, {}, {"lam": k}), L(-k))


# ----------------------------------------------------------------------
# module structure


def test_inclusion_exclusion_gives_unit_annulus():
    f = cef_add(cef_phi_alpha(1, 0), cef_scale(cef_phi_alpha(1, 1), -1))
    assert vr_eq(mass(f), ONE - L(-1))
    assert vr_eq(cef_eval(f, {"x": LaurentConst.const(2)}), ONE)
    assert cef_eval(f, {"x": t(1)}).is_zero()


def test_scaling_and_zero():
    assert vr_eq(mass(cef_scale(cef_phi_alpha(1, 0), L(2))), L(2))
    f = cef_phi_alpha(1, 0)
    assert vr_eq(mass(cef_add(f, zero_cef(f.vars))), mass(f))


def test_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        cef_add(cef_ball("x"), cef_phi_alpha(["y"], LinForm.var("x"), params=["x"]))


# ----------------------------------------------------------------------
# products


def test_nested_balls():
    assert cef_eq_ae(cef_mul(cef_phi_alpha(1, 0), cef_phi_alpha(1, 1)), cef_phi_alpha(1, 1))


def test_disjoint_balls_multiply_to_zero():
    f = cef_mul(cef_ball("x", 0, 1), cef_ball("x", 1, 1))
    assert not f.terms or vr_eq(mass(f), ValueRingElem())
    assert cef_eq_ae(f, zero_cef(("x",)))


def test_ball_inside_larger_ball():
    f = cef_mul(cef_ball("x", 0, 0), cef_ball("x", 1, 1))
    assert vr_eq(mass(f), L(-1))
    assert cef_eq_ae(f, cef_ball("x", 1, 1))


# ----------------------------------------------------------------------
# affine substitution


def test_reflection_of_centered_ball():
    f = cef_phi_alpha(1, 2)
    assert cef_eq_ae(cef_affine(f, "x", -1), f)


def test_reflection_flips_phase():
    f = cef_mul(cef_phase("x", t(-1)), cef_ball("x"))
    g = cef_mul(cef_phase("x", t(-1, -1)), cef_ball("x"))
    assert cef_eq_ae(cef_affine(f, "x", -1), g)


def test_shift_moves_center():
    f = cef_affine(cef_ball("x", 0, 1), "x", 1, LaurentConst.const(-1))
    assert cef_eq_ae(f, cef_ball("x", 1, 1))


# ----------------------------------------------------------------------
# pointwise evaluation


def test_eval_ball():
    f = cef_phi_alpha(1, 0)
    assert vr_eq(cef_eval(f, {"x": t(2)}), ONE)
    assert cef_eval(f, {"x": t(-1)}).is_zero()


def test_eval_acfix_and_phase():
    f = cef_mul(cef_phase("x", t(-1)), cef_acfix("x", 0, 1))
    f = cef_mul(f, cef_ball("x"))
    one = LaurentConst.const(1)
    assert vr_eq(cef_eval(f, {"x": one}), ValueRingElem.char(t(-1)))
    assert cef_eval(f, {"x": LaurentConst.const(2)}).is_zero()


def test_eval_theta_weight():
    th = LinForm.var(theta_name("x"))
    (tm,) = cef_annulus("x", 0, BasicSet.make([th])).terms
    f = CEF(("x",), (), [Term(tm.bindings, tm.cond, QuasiPoly.lpow(-2 * th), tm.affine, tm.bilinear)])
    assert vr_eq(cef_eval(f, {"x": t(3)}), L(-6))


def test_eval_at_center_raises():
    with pytest.raises(CenterCoincident):
        cef_eval(cef_ball("x", 1, 0), {"x": LaurentConst.const(1)})


# ----------------------------------------------------------------------
# properties against pointwise evaluation


def _sample_points(rng, vars, n=12):
    for _ in range(n):
        yield {
            v: LaurentConst({k: rng.choice([1, 2]) for k in rng.sample(range(-2, 4), rng.randint(1, 3))})
            for v in vars
        }


def _evals(fs, pt):
    try:
        return [cef_eval(f, pt) for f in fs]
    except CenterCoincident:
        return None


@given(st.integers(0, 10**6), st.sampled_from([("x",), ("x", "y")]))
def test_product_and_sum_are_pointwise(seed, vars):
    rng = random.Random(seed)
    f, g = random_sb(rng, vars), random_sb(rng, vars)
    prod, tot = cef_mul(f, g), cef_add(f, g)
    for pt in _sample_points(rng, vars):
        vals = _evals([f, g, prod, tot], pt)
        if vals is None:
            continue
        a, b, p, s = vals
        assert vr_eq(p, a * b)
        assert vr_eq(s, a + b)


@given(st.integers(0, 10**6))
def test_product_commutes_and_associates(seed):
    rng = random.Random(seed)
    f, g, h = (random_sb(rng, ("x",)) for _ in range(3))
    assert cef_eq_ae(cef_mul(f, g), cef_mul(g, f))
    lhs, rhs = cef_mul(cef_mul(f, g), h), cef_mul(f, cef_mul(g, h))
    for pt in _sample_points(rng, ("x",)):
        vals = _evals([lhs, rhs], pt)
        if vals is not None:
            assert vr_eq(*vals)


@given(st.integers(0, 10**6), st.sampled_from([1, -1]), st.sampled_from([0, 1, 2]))
def test_affine_substitution_is_pointwise(seed, sign, shift):
    rng = random.Random(seed)
    f = random_sb(rng, ("x",))
    s = LaurentConst.const(shift) if shift < 2 else t(1)
    g = cef_affine(f, "x", sign, s)
    for pt in _sample_points(rng, ("x",)):
        moved = {"x": pt["x"] * sign + s}
        vals = _evals([g], pt)
        other = _evals([f], moved)
        if vals is not None and other is not None:
            assert vr_eq(vals[0], other[0])


@given(st.integers(0, 10**6))
def test_reflection_is_an_involution(seed):
    f = random_sb(random.Random(seed), ("x",))
    assert cef_eq_ae(cef_affine(cef_affine(f, "x", -1), "x", -1), f)


@given(st.integers(0, 10**6))
def test_json_round_trip(seed):
    f = random_sb(random.Random(seed), ("x", "y"))
    assert cef_from_json(cef_to_json(f)) == f
