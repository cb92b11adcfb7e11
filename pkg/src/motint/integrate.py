"""Closed-form integration of CEFs over valued variables.

The Haar measure is normalized so that the valuation ring has volume 1:
the annulus ord(x - c) = th has volume L^(-th)(1 - L^-1) and each of its
angular-component classes has volume L^(-th-1).  E is trivial on tR and
equals e^(residue) on R.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cef import CEF, Term, VarBinding, theta_name, view_against
from .errors import NotIntegrable, UnsupportedPhase
from .laurent import LaurentConst
from .linear import LinForm, QuasiPoly
from .presburger import BasicSet, ps_sum
from .primes import note, note_laurent, prime_factors
from .resfn import FREE, ResFn, achar, afix, residue_sum
from .valring import ONE, ValueRingElem

_L = ValueRingElem.lpow(1)


@dataclass
class IntegrationResult:
    value: CEF | ValueRingElem | None
    bad_primes: frozenset = frozenset()
    integrable: bool = True
    witness: object = None

    def scalar(self) -> ValueRingElem:
        if isinstance(self.value, ValueRingElem):
            return self.value
        raise TypeError("result still depends on variables or parameters")


def _volume_factor(ac, bp) -> ValueRingElem:
    """sum over the angular classes allowed by ac, weighted by ac's function."""
    if ac[0] == "f":
        return ONE
    return residue_sum(ac[1], bp)


def _residue_res(ac_x, beta: Fraction, ac_y, bp) -> tuple[ValueRingElem | None, ResFn | None]:
    """Integrand sum over ac(x) when ord(A x) = 0 with ac(A) = beta * ac_y.

    Returns either a scalar (ac_y constant) or a function of the passive sigma.
    """
    kind_x, vx = ac_x
    if ac_y[0] == "const":
        kappa = beta * ac_y[1]
        note(bp, kappa)
        if kind_x == "f":
            return ValueRingElem.echar(vx * kappa), None
        return residue_sum(vx + kappa, bp), None
    delta = Fraction(0) if ac_y[0] == "same" else ac_y[1]
    note(bp, beta)
    # kappa = beta * (sigma - delta)
    if kind_x == "f":
        k = ValueRingElem.echar(-vx * beta * delta) if delta else ONE
        note(bp, vx * beta)
        return None, ResFn.basis(achar(vx * beta), k)
    sigma0 = delta - vx / beta
    rf = ResFn.basis(achar(0), -1)
    if sigma0 != 0:
        note(bp, sigma0)
        rf = rf + ResFn.basis(afix(sigma0), _L)
    return None, rf


def _sum_out(t: Term, th: str, factor: QuasiPoly, bp) -> list[Term]:
    pieces = ps_sum(t.cond, t.weight * factor, [th])
    return [t.copy(cond=b, weight=w) for b, w in pieces]


def integrate_annulus(t: Term, var: str, bp: set | None = None) -> list[Term]:
    """Integrate one term over var (all annuli of its binding)."""
    bp = set() if bp is None else bp
    if t.is_zero():
        return []
    if var not in t.bindings:
        raise NotIntegrable(f"term is not supported on a set of finite measure in {var}", {var: "unbound"})
    b = t.bindings[var]
    th = b.theta
    th_l = LinForm.var(th)
    c = b.center
    a = t.affine_coeff(var)
    bil = [(w if v == var else v, k) for v, w, k in t.bilinear if var in (v, w)]
    if len(bil) > 1:
        raise UnsupportedPhase(f"{var} is coupled to several variables")
    affine = [(v, x) for v, x in t.affine if v != var]
    bilinear = [(v, w, k) for v, w, k in t.bilinear if var not in (v, w)]
    coeff = ValueRingElem.char(a * c) if not a.is_zero() and not c.is_zero() else ONE
    for _, cc in (a * c).items:
        note(bp, Fraction(1, cc.denominator))
    if bil:
        y, k = bil[0]
        if not k.is_monomial():
            raise UnsupportedPhase(f"bilinear coefficient {k} is not a monomial")
        if not c.is_zero():
            affine.append((y, k * c))
    bindings = dict(t.bindings)
    del bindings[var]
    rest = Term(bindings, t.cond, t.weight * coeff, affine, bilinear)
    vol = QuasiPoly.lpow(-th_l - 1)
    out: list[Term] = []

    if not bil:
        if a.is_zero():
            f = _volume_factor(b.ac, bp)
            return _sum_out(rest, th, vol * f, bp) if not f.is_zero() else []
        oa = a.ord()
        note_laurent(bp, a)
        hi = rest.copy(cond=rest.cond.add_ineq(th_l - (1 - oa)))
        f = _volume_factor(b.ac, bp)
        if not f.is_zero():
            out.extend(_sum_out(hi, th, vol * f, bp))
        mid = rest.copy(cond=rest.cond.add_eq(th_l + oa))
        sc, _ = _residue_res(b.ac, a.ac(), ("const", Fraction(1)), bp)
        if not sc.is_zero():
            out.extend(_sum_out(mid, th, vol * sc, bp))
        return out

    y, k = bil[0]
    m, beta = k.ord(), k.ac()
    note_laurent(bp, k)
    if y not in rest.bindings:
        rest = rest.with_binding(VarBinding(y, LaurentConst(), FREE))
    kinv = LaurentConst.monomial(1 / beta, -m)
    c_new = -(a * kinv)
    for piece, ord_y, ac_y in view_against(rest, y, c_new, bp):
        yb = piece.bindings[y]
        s = ord_y + th_l + m
        excl = ac_y[1] if ac_y[0] == "shift" else None

        def emit(p: Term, rf: ResFn, factor: QuasiPoly):
            rf = ResFn.basis(yb.ac).mul(rf, bp)
            if excl is not None:
                rf = rf.exclude(excl, bp)
            for acd, kk in rf.items.items():
                q = p.with_binding(VarBinding(y, yb.center, acd))
                out.extend(_sum_out(q, th, factor * kk, bp))

        f = _volume_factor(b.ac, bp)
        if not f.is_zero():
            emit(piece.copy(cond=piece.cond.add_ineq(s - 1)), ResFn.basis(FREE), vol * f)
        sc, rf = _residue_res(b.ac, beta, ac_y, bp)
        mid = piece.copy(cond=piece.cond.add_eq(s))
        if sc is not None:
            if not sc.is_zero():
                emit(mid, ResFn.basis(FREE), vol * sc)
        else:
            emit(mid, rf, vol)
    return out


def integrate_var(f: CEF, var: str) -> IntegrationResult:
    if var not in f.vars:
        raise ValueError(f"{var} is not a variable of this function")
    bp: set[int] = set()
    terms = []
    for t in f.terms:
        terms.extend(integrate_annulus(t, var, bp))
    vars = tuple(v for v in f.vars if v != var)
    g = CEF(vars, f.params, terms, f.bad_primes | frozenset(bp)).normalized()
    return IntegrationResult(g, g.bad_primes)


def _finish(g: CEF) -> IntegrationResult:
    if not g.vars and not g.params:
        total = ValueRingElem()
        for t in g.terms:
            if t.cond.contains({}):
                total = total + t.weight.eval({})
        return IntegrationResult(total, g.bad_primes)
    return IntegrationResult(g, g.bad_primes)


def integrate_rel(f: CEF, keep: Iterable[str] = (), order: Sequence[str] | None = None) -> IntegrationResult:
    """Integrate every valued variable not in keep (signature order unless given)."""
    keep = set(keep)
    todo = [v for v in (order or f.vars) if v not in keep]
    g = f
    for v in todo:
        g = integrate_var(g, v).value
    return _finish(g)


def integrate_all(f: CEF, order: Sequence[str] | None = None) -> IntegrationResult:
    return integrate_rel(f, (), order)


def check_integrable(f: CEF) -> None:
    """Raise NotIntegrable unless every term is absolutely integrable."""
    from .equality import cef_simplify

    for t in cef_simplify(f).terms:
        for lexp, mono, _ in t.weight.items():
            bs = [VarBinding(b.var, b.center, b.ac if b.ac[0] == "f" else FREE) for b in t.bindings.values()]
            tt = Term(bs, t.cond, QuasiPoly([(lexp, mono, 1)]))
            for v in f.vars:
                if v not in tt.bindings:
                    raise NotIntegrable(f"term is constant in {v}", {v: "unbound"})
            pieces = [tt]
            for v in f.vars:
                nxt = []
                for p in pieces:
                    nxt.extend(integrate_annulus(p, v, None))
                pieces = nxt
