import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_sb
from motint.cef import cef_acfix, cef_annulus, cef_ball, cef_mul, cef_phase, cef_phi_alpha, theta_name
from motint.cyclotomic import Cyclotomic
from motint.errors import CenterCoincident
from motint.fourier import convolve, fourier
from motint.integrate import integrate_all
from motint.laurent import LaurentConst
from motint.linear import LinForm
from motint.localfield import FieldSpec, default_twists
from motint.oracle import oracle_convolve_at, oracle_fourier_at, oracle_integrate
from motint.presburger import BasicSet
from motint.specialize import bad_primes, spec_cef_at, spec_laurent, spec_value

Q3, F3, Q5 = FieldSpec(3, "qp"), FieldSpec(3, "fpt"), FieldSpec(5, "qp")
R = Cyclotomic.rational
one = LaurentConst.const(1)


def unit_annulus(var):
    th = LinForm.var(theta_name(var))
    return cef_annulus(var, 0, BasicSet.make([th, -th]))


def test_unit_ball_single_class():
    assert oracle_integrate(cef_phi_alpha(1, 0), Q3, B=0, N=1) == R(1)


def test_phase_on_unit_annulus():
    assert oracle_integrate(cef_mul(cef_phase("z", one), unit_annulus("z")), Q3) == R(Fraction(-1, 3))


def test_phase_with_fixed_angular_component():
    f = cef_mul(cef_phase("z", one), cef_mul(unit_annulus("z"), cef_acfix("z", 0, 2)))
    assert oracle_integrate(f, Q5) == Cyclotomic.root(5, 2) * R(Fraction(1, 5))


def test_bad_prime_gives_a_different_number():
    f = cef_mul(cef_phase("z", LaurentConst.const(6)), unit_annulus("z"))
    assert oracle_integrate(f, Q3) == R(Fraction(2, 3))
    assert oracle_integrate(f, Q5) == R(Fraction(-1, 5))


@pytest.mark.parametrize(
    "f, y, want",
    [
        (cef_phi_alpha(1, 0), 1, R(0)),
        (cef_phi_alpha(1, 0), 3, R(1)),
        (cef_phi_alpha(1, 1), 1, R(Fraction(1, 3))),
        (unit_annulus("x"), 1, R(Fraction(-1, 3))),
    ],
)
def test_fourier_at_points(f, y, want):
    y = LaurentConst.const(1) if y == 1 else LaurentConst({1: 1})
    assert oracle_fourier_at(f, Q3, y) == want


def test_precision_does_not_change_values():
    f = cef_mul(cef_phase("x", LaurentConst({-1: 1})), cef_ball("x", 1, 2))
    assert not oracle_integrate(f, Q3, N=6).is_zero()
    assert oracle_integrate(f, Q3, N=6) == oracle_integrate(f, Q3, N=12)


# ----------------------------------------------------------------------
# differential checks against the symbolic engine

FIELDS = [K for p in (3, 5, 7) for kind in ("qp", "fpt") for K in default_twists(FieldSpec(p, kind))]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(FIELDS), st.sampled_from([("x",), ("x", "y")]))
def test_integral_matches_oracle(seed, K, vars):
    f = random_sb(random.Random(seed), vars, pieces=1)
    res = integrate_all(f)
    primes = set(res.bad_primes) | bad_primes(f)
    if K.p in primes:
        return
    assert spec_value(res.scalar(), K, primes) == oracle_integrate(f, K)


SAMPLES = [LaurentConst.const(1), LaurentConst({1: 1}), LaurentConst({-1: 1}), LaurentConst({0: 2, 1: 1})]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([Q3, F3, Q5]))
def test_transform_matches_oracle(seed, K):
    f = random_sb(random.Random(seed))
    g = fourier(f)
    if K.p in bad_primes(f) | bad_primes(g):
        return
    for y in SAMPLES:
        try:
            sym = spec_cef_at(g, K, {g.vars[0]: spec_laurent(y, K, 12)})
        except CenterCoincident:
            continue
        assert sym == oracle_fourier_at(f, K, y)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([Q3, F3, Q5]))
def test_convolution_matches_oracle(seed, K):
    rng = random.Random(seed)
    f, g = random_sb(rng), random_sb(rng)
    h = convolve(f, g)
    if K.p in bad_primes(f) | bad_primes(g) | bad_primes(h):
        return
    for z in SAMPLES:
        try:
            sym = spec_cef_at(h, K, {"x": spec_laurent(z, K, 12)})
        except CenterCoincident:
            continue
        assert sym == oracle_convolve_at(f, g, K, z)
