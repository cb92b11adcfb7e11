from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from motint.cef import cef_ball, cef_mul, cef_phase, cef_phi_alpha
from motint.dsl import Evaluator, parse, parse_expr, parse_laurent, print_expr, print_script
from motint.equality import cef_eq_ae
from motint.errors import ParseError
from motint.laurent import LaurentConst

CORPUS = sorted((Path(__file__).resolve().parent.parent / "corpus").glob("*.mint"))


def ev(src):
    return Evaluator({}).eval(parse_expr(src))


def test_unit_ball():
    assert cef_eq_ae(ev("ball(x; 0; 0)"), cef_phi_alpha(1, 0))


def test_phase_on_ball():
    want = cef_mul(cef_phase("x", LaurentConst({-1: 1})), cef_ball("x"))
    assert cef_eq_ae(ev("E(t^-1 * x) * ball(x; 0; 0)"), want)


def test_radial_weight():
    f = ev("indicator(ord(x) == th && th >= 0) * L^(-2*th)")
    g = ev("ann(x; 0; th >= 0) * L^(-2*th_x)")
    assert cef_eq_ae(f, g)


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_round_trip(path):
    s = parse(path.read_text())
    assert parse(print_script(s)) == s


@pytest.mark.parametrize(
    "src, line, col",
    [
        ("f = ball(x; 0 0)", 1, 15),
        ("f = ball(x; 0; 0)\ng = f +", 2, 8),
        ("f = E(x", 1, 8),
        ("frobnicate f", 1, 1),
    ],
)
def test_parse_errors_have_locations(src, line, col):
    with pytest.raises(ParseError) as e:
        parse(src)
    assert (e.value.line, e.value.column) == (line, col)


# ----------------------------------------------------------------------
# random expressions

centers = st.sampled_from(["0", "1", "t", "t^-1", "2 + t", "1/2", "-t^2"])
alphas = st.integers(-3, 3)
phases = st.sampled_from(["t^-1", "2*t^-2", "t^-1 + 1", "1"])


def _atoms():
    return st.one_of(
        st.builds(lambda c, a: f"ball(x; {c}; {a})", centers, alphas),
        st.builds(lambda c, a: f"ann(x; {c}; th >= {a})", centers, alphas),
        st.builds(lambda c: f"acfix(x; {c}; 2)", centers),
        st.builds(lambda a: f"E(({a}) * x)", phases),
        st.builds(lambda w: f"echar(x; {w})", st.integers(1, 3)),
        st.builds(lambda k: f"L^({k})", alphas),
        st.just("indicator(ord(x - 1) == s && s >= 0 && s % 2 == 0)"),
    )


exprs = st.recursive(
    _atoms(),
    lambda sub: st.one_of(
        st.builds(lambda a, b: f"{a} + {b}", sub, sub),
        st.builds(lambda a, b: f"({a}) * ({b})", sub, sub),
        st.builds(lambda a: f"-({a})", sub),
        st.builds(lambda a: f"(fourier {a})", sub),
        st.builds(lambda a, b: f"(convolve {a}, {b})", sub, sub),
        st.builds(lambda a: f"(reflect {a})", sub),
    ),
    max_leaves=5,
)


@given(exprs)
def test_expression_round_trip(src):
    e = parse_expr(src)
    assert parse_expr(print_expr(e)) == e


@given(exprs, st.sampled_from(["integrate", "fourier", "check inversion", "specialize"]))
def test_script_round_trip(src, verb):
    s = parse(f"f = {src}\n{verb} f\n")
    assert parse(print_script(s)) == s


@given(st.dictionaries(st.integers(-3, 3), st.integers(-4, 4), max_size=4))
def test_laurent_round_trip(coeffs):
    a = LaurentConst(coeffs)
    assert parse_laurent(str(a)) == a


@given(st.text(alphabet="fgx=+*();,ballEt^-0123 \n#", max_size=40))
def test_parser_never_crashes(src):
    try:
        parse(src)
    except ParseError:
        pass
