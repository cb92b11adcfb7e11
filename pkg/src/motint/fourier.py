"""Fourier transform and convolution of CEFs."""

from __future__ import annotations

from fractions import Fraction

from .cef import CEF, Term, VarBinding, cef_mul, cef_phi_alpha, cef_reflect, cef_rename, cef_scale, mul_terms, theta_name
from .errors import NotIntegrable, SignatureMismatch, UnsupportedPhase
from .integrate import check_integrable, integrate_annulus
from .laurent import LaurentConst
from .linear import LinForm, QuasiPoly
from .primes import note, note_laurent
from .resfn import FREE, ResFn, ac_mul, ac_neg, achar, afix, residue_sum
from .valring import ONE, ValueRingElem

_L = ValueRingElem.lpow(1)


def fourier(f: CEF) -> CEF:
    """F(f)(y) = integral of E(x*y) f(x) dx, returned in the same variable names."""
    check_integrable(f)
    tmp = {v: f"_s_{v}" for v in f.vars}
    g = cef_rename(f, tmp)
    bp: set[int] = set()
    terms = []
    for t in g.terms:
        kernel = Term(bilinear=[(tmp[v], v, LaurentConst.const(1)) for v in f.vars])
        pieces = mul_terms(t, kernel, bp)
        for v in f.vars:
            nxt = []
            for p in pieces:
                nxt.extend(integrate_annulus(p, tmp[v], bp))
            pieces = nxt
        terms.extend(pieces)
    return _simplify(CEF(f.vars, f.params, terms, f.bad_primes | frozenset(bp)).normalized())


def _simplify(f: CEF) -> CEF:
    from .equality import cef_simplify

    return cef_simplify(f)


def _conv_residue(F, G, kappa: Fraction, bp) -> ResFn:
    """sum over rho not in {0, sigma} of F(rho) e^(kappa rho) G(sigma - rho), as a function of sigma."""
    if F[0] == "f" and G[0] == "f":
        s = F[1] + G[1]
        if s == 0:
            return ResFn()
        note(bp, s)
        return ResFn.basis(afix(s), ValueRingElem.echar(kappa * F[1]) if kappa else ONE)
    if F[0] == "f":
        u1, w2 = F[1], G[1]
        e = (kappa - w2) * u1
        return ResFn.basis(achar(w2), ValueRingElem.echar(e) if e else ONE).exclude(u1, bp)
    if G[0] == "f":
        w1, u2 = F[1], G[1]
        e = -(w1 + kappa) * u2
        return ResFn.basis(achar(w1 + kappa), ValueRingElem.echar(e) if e else ONE).exclude(u2, bp)
    w1, w2 = F[1], G[1]
    m = w1 + kappa - w2
    if m == 0:
        return ResFn.basis(achar(w2), _L - ValueRingElem.const(2))
    note(bp, m)
    return ResFn([(achar(w2), -1), (achar(w2 + m), -1)])


def _conv_coord(t: Term, x: str, bp) -> list[Term]:
    fv, gv = f"_F_{x}", f"_G_{x}"
    fb, gb = t.bindings[fv], t.bindings[gv]
    tf, tg, tz = fb.theta, gb.theta, theta_name(x)
    tf_l, tg_l, tz_l = LinForm.var(tf), LinForm.var(tg), LinForm.var(tz)
    a_f, a_g = t.affine_coeff(fv), t.affine_coeff(gv)
    A = a_f - a_g
    cz = fb.center + gb.center
    for _, c in (A * fb.center).items:
        note(bp, Fraction(1, c.denominator))
    bs = {v: b for v, b in t.bindings.items() if v not in (fv, gv)}
    affine = [(v, a) for v, a in t.affine if v not in (fv, gv)] + [(x, a_g)]
    base = Term(bs, t.cond, t.weight * ValueRingElem.char(A * fb.center), affine, t.bilinear)
    out: list[Term] = []
    zfree = VarBinding(x, cz, FREE)

    # (A) ord X < ord W: ord(W - X) = ord X, ac(W - X) = -ac X
    acx, k = ac_mul(fb.ac, ac_neg(gb.ac), bp)
    if acx is not None:
        p = base.subs_theta({tg: tf_l})
        p = p.copy(cond=p.cond.add_ineq(tz_l - tf_l - 1), affine=p.affine + ((fv, A),))
        p = p.with_binding(VarBinding(fv, LaurentConst(), acx)).with_binding(zfree).scaled(k)
        out.extend(integrate_annulus(p, fv, bp))
    # (B) ord X > ord W: W - X has the order and ac of W
    p = base.subs_theta({tg: tz_l})
    p = p.copy(cond=p.cond.add_ineq(tf_l - tz_l - 1), affine=p.affine + ((fv, A),))
    p = p.with_binding(VarBinding(fv, LaurentConst(), fb.ac)).with_binding(VarBinding(x, cz, gb.ac))
    out.extend(integrate_annulus(p, fv, bp))
    # (C) equal orders, ac X != ac W
    p = base.subs_theta({tg: tz_l, tf: tz_l})
    vol = QuasiPoly.lpow(-tz_l - 1)
    regimes = []
    if A.is_zero():
        regimes.append((p, Fraction(0)))
    else:
        oa = A.ord()
        note_laurent(bp, A)
        regimes.append((p.copy(cond=p.cond.add_ineq(tz_l - (1 - oa))), Fraction(0)))
        regimes.append((p.copy(cond=p.cond.add_eq(tz_l + oa)), A.ac()))
    for q, kappa in regimes:
        rf = _conv_residue(fb.ac, gb.ac, kappa, bp)
        for acd, kk in rf.items.items():
            out.append(q.with_binding(VarBinding(x, cz, acd)).copy(weight=q.weight * vol * kk))
    # (D) equal orders and ac X = ac W: integrate over V = W - X with ord V > ord W
    p = base.subs_theta({tf: tz_l})
    p = p.copy(
        cond=p.cond.add_ineq(tg_l - tz_l - 1),
        affine=p.affine + ((gv, -A), (x, A)),
        weight=p.weight * ValueRingElem.char(-(A * cz)),
    )
    p = p.with_binding(VarBinding(gv, LaurentConst(), gb.ac)).with_binding(VarBinding(x, cz, fb.ac))
    out.extend(integrate_annulus(p, gv, bp))
    return [o for o in out if not o.is_zero()]


def convolve(f: CEF, g: CEF) -> CEF:
    """(f * g)(z) = integral of f(x) g(z - x) dx."""
    if set(f.vars) != set(g.vars):
        raise SignatureMismatch(f"{f.vars} vs {g.vars}")
    check_integrable(f)
    check_integrable(g)
    vars = f.vars
    ff = cef_rename(f, {v: f"_F_{v}" for v in vars})
    gg = cef_rename(g, {v: f"_G_{v}" for v in vars})
    bp: set[int] = set()
    terms = []
    for tf in ff.terms:
        if tf.bilinear:
            raise UnsupportedPhase("convolution of bilinear phases")
        for tg in gg.terms:
            if tg.bilinear:
                raise UnsupportedPhase("convolution of bilinear phases")
            pieces = mul_terms(tf, tg, bp)
            for v in vars:
                nxt = []
                for p in pieces:
                    nxt.extend(_conv_coord(p, v, bp))
                pieces = nxt
            terms.extend(pieces)
    params = tuple(dict.fromkeys(f.params + g.params))
    return _simplify(CEF(vars, params, terms, f.bad_primes | g.bad_primes | frozenset(bp)).normalized())


# ----------------------------------------------------------------------
# identity checks


def inversion_sides(phi: CEF) -> tuple[CEF, CEF]:
    d = len(phi.vars)
    return fourier(fourier(phi)), cef_scale(cef_reflect(phi), ValueRingElem.lpow(-d))


def partial_inversion_sides(phi: CEF, alpha: int) -> tuple[CEF, CEF]:
    d = len(phi.vars)
    pa = cef_phi_alpha(phi.vars, alpha)
    lhs = fourier(cef_mul(pa, fourier(phi)))
    rhs = cef_scale(convolve(cef_reflect(phi), cef_phi_alpha(phi.vars, 1 - alpha)), ValueRingElem.lpow(-alpha * d))
    return lhs, rhs


def convolution_theorem_sides(f: CEF, g: CEF) -> tuple[CEF, CEF]:
    return fourier(convolve(f, g)), cef_mul(fourier(f), fourier(g))


def check_inversion(phi: CEF, **kw):
    from .equality import cef_eq_ae

    return cef_eq_ae(*inversion_sides(phi), **kw)


def check_partial_inversion(phi: CEF, alpha: int, **kw):
    from .equality import cef_eq_ae

    return cef_eq_ae(*partial_inversion_sides(phi, alpha), **kw)


def check_convolution_theorem(f: CEF, g: CEF, **kw):
    from .equality import cef_eq_ae

    return cef_eq_ae(*convolution_theorem_sides(f, g), **kw)
