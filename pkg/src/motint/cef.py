"""Constructible exponential functions with constant centers.

A CEF is a finite sum of terms.  A term binds some of the valued variables:
for each bound variable ``x`` it records a center ``c``, the order variable
``th_x = ord(x - c)`` and one angular-component basis element (see
``resfn``).  The term further carries a Presburger condition on the order
variables and integer parameters, a weight (a quasi-polynomial with
value-ring coefficients) and additive-character phases ``E(a*x)`` and
``E(k*x*y)``.  Unbound variables are unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import CenterCoincident, SignatureMismatch, UnsupportedPhase
from .laurent import LaurentConst, as_laurent
from .linear import LinForm, QuasiPoly
from .presburger import TRUE, BasicSet, PresburgerSet
from .primes import note, note_laurent, prime_factors
from .resfn import FREE, AcData, ResFn, ac_at, ac_mul, achar, afix
from .valring import ONE, ValueRingElem


def theta_name(var: str) -> str:
    return f"th_{var}"


@dataclass(frozen=True, order=True)
class VarBinding:
    var: str
    center: LaurentConst
    ac: AcData = FREE

    @property
    def theta(self) -> str:
        return theta_name(self.var)

    @property
    def acfix(self) -> Fraction | None:
        return self.ac[1] if self.ac[0] == "f" else None

    @property
    def acchar(self) -> Fraction:
        return self.ac[1] if self.ac[0] == "c" else Fraction(0)


def _merge_affine(items: Iterable[tuple[str, LaurentConst]]) -> tuple:
    acc: dict[str, LaurentConst] = {}
    for v, a in items:
        acc[v] = acc[v] + a if v in acc else a
    return tuple(sorted((v, a) for v, a in acc.items() if not a.is_zero()))


def _merge_bilinear(items: Iterable[tuple[str, str, LaurentConst]]) -> tuple:
    acc: dict[tuple[str, str], LaurentConst] = {}
    for v, w, k in items:
        if v == w:
            raise UnsupportedPhase(f"quadratic phase in {v}")
        key = (v, w) if v < w else (w, v)
        acc[key] = acc[key] + k if key in acc else k
    return tuple(sorted((v, w, k) for (v, w), k in acc.items() if not k.is_zero()))


class Term:
    __slots__ = ("bindings", "cond", "weight", "affine", "bilinear")

    def __init__(self, bindings=(), cond: BasicSet = TRUE, weight: QuasiPoly | None = None, affine=(), bilinear=()):
        if isinstance(bindings, Mapping):
            bindings = bindings.values()
        self.bindings: dict[str, VarBinding] = {b.var: b for b in sorted(bindings)}
        self.cond = cond
        self.weight = QuasiPoly.const(1) if weight is None else weight
        self.affine = _merge_affine(affine)
        self.bilinear = _merge_bilinear(bilinear)

    def key(self):
        return (tuple(self.bindings.values()), self.cond, self.affine, self.bilinear)

    def __eq__(self, other) -> bool:
        return isinstance(other, Term) and self.key() == other.key() and self.weight == other.weight

    __hash__ = None

    def copy(self, **kw) -> "Term":
        d = dict(bindings=self.bindings, cond=self.cond, weight=self.weight, affine=self.affine, bilinear=self.bilinear)
        d.update(kw)
        return Term(**d)

    def is_zero(self) -> bool:
        return self.weight.is_zero() or self.cond.is_false()

    def vars(self) -> set[str]:
        out = set(self.bindings)
        out |= {v for v, _ in self.affine}
        for v, w, _ in self.bilinear:
            out |= {v, w}
        return out

    def subs_theta(self, mapping: Mapping[str, LinForm]) -> "Term":
        return self.copy(cond=self.cond.subs(mapping), weight=self.weight.subs(mapping))

    def scaled(self, c) -> "Term":
        return self.copy(weight=self.weight * c)

    def with_binding(self, b: VarBinding) -> "Term":
        bs = dict(self.bindings)
        bs[b.var] = b
        return self.copy(bindings=bs)

    def without_binding(self, var: str) -> "Term":
        bs = dict(self.bindings)
        bs.pop(var, None)
        return self.copy(bindings=bs)

    def affine_coeff(self, var: str) -> LaurentConst:
        for v, a in self.affine:
            if v == var:
                return a
        return LaurentConst()

    def __repr__(self) -> str:
        from .serialize import format_term

        return format_term(self)


def _ineq(f: LinForm) -> BasicSet:
    return BasicSet.make([f])


@dataclass
class CEF:
    """Sum of terms over valued variables ``vars`` and integer parameters ``params``."""

    vars: tuple[str, ...]
    params: tuple[str, ...] = ()
    terms: list[Term] = field(default_factory=list)
    bad_primes: frozenset = frozenset()

    def __post_init__(self):
        self.vars = tuple(self.vars)
        self.params = tuple(self.params)

    def normalized(self) -> "CEF":
        acc: dict = {}
        order = []
        for t in self.terms:
            if t.is_zero():
                continue
            k = t.key()
            if k in acc:
                acc[k] = acc[k] + t.weight
            else:
                acc[k] = t.weight
                order.append((k, t))
        terms = [t.copy(weight=acc[k]) for k, t in order if not acc[k].is_zero()]
        terms = [t for t in terms if not t.cond.is_empty()]
        return CEF(self.vars, self.params, terms, self.bad_primes)

    def with_primes(self, bp: Iterable[int]) -> "CEF":
        return CEF(self.vars, self.params, self.terms, self.bad_primes | frozenset(bp))

    def __add__(self, other: "CEF") -> "CEF":
        return cef_add(self, other)

    def __sub__(self, other: "CEF") -> "CEF":
        return cef_add(self, cef_scale(other, -1))

    def __mul__(self, other) -> "CEF":
        if isinstance(other, CEF):
            return cef_mul(self, other)
        return cef_scale(self, other)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        from .serialize import format_cef

        return format_cef(self)


def zero_cef(vars: Sequence[str] = (), params: Sequence[str] = ()) -> CEF:
    return CEF(tuple(vars), tuple(params), [])


def _union_sig(f: CEF, g: CEF) -> tuple[tuple[str, ...], tuple[str, ...]]:
    vs = tuple(dict.fromkeys(f.vars + g.vars))
    ps = tuple(dict.fromkeys(f.params + g.params))
    if set(vs) & set(ps):
        raise SignatureMismatch(f"names used both as valued variable and parameter: {set(vs) & set(ps)}")
    return vs, ps


def _check_same(f: CEF, g: CEF, strict: bool) -> tuple[tuple[str, ...], tuple[str, ...]]:
    if strict and f.terms and g.terms and set(f.vars) != set(g.vars):
        raise SignatureMismatch(f"valued variables {f.vars} vs {g.vars}")
    return _union_sig(f, g)


# ----------------------------------------------------------------------
# constructors


def cef_phi_alpha(d: int | Sequence[str], alpha: LinForm | int = 0, params: Sequence[str] = ()) -> CEF:
    """Indicator of ord x_i >= alpha for every i."""
    vars = default_vars(d) if isinstance(d, int) else tuple(d)
    alpha = alpha if isinstance(alpha, LinForm) else LinForm.constant(alpha)
    params = tuple(dict.fromkeys(tuple(params) + tuple(sorted(alpha.vars()))))
    bs = [VarBinding(v, LaurentConst()) for v in vars]
    cond = BasicSet.make([LinForm.var(theta_name(v)) - alpha for v in vars])
    return CEF(vars, params, [Term(bs, cond)])


def default_vars(d: int) -> tuple[str, ...]:
    return ("x",) if d == 1 else tuple(f"x{i + 1}" for i in range(d))


def cef_ball(var: str, center=0, alpha: LinForm | int = 0) -> CEF:
    alpha = alpha if isinstance(alpha, LinForm) else LinForm.constant(alpha)
    b = VarBinding(var, as_laurent(center))
    return CEF((var,), tuple(sorted(alpha.vars())), [Term([b], BasicSet.make([LinForm.var(b.theta) - alpha]))])


def cef_annulus(var: str, center=0, cond: BasicSet = TRUE, ac: AcData = FREE, params: Sequence[str] = ()) -> CEF:
    b = VarBinding(var, as_laurent(center), ac)
    return CEF((var,), tuple(params), [Term([b], cond)])


def cef_acfix(var: str, center, u) -> CEF:
    return cef_annulus(var, center, TRUE, afix(u))


def cef_phase(var: str, a, var2: str | None = None) -> CEF:
    """E(a*var) or E(a*var*var2)."""
    a = as_laurent(a)
    if var2 is None:
        return CEF((var,), (), [Term(affine=[(var, a)])])
    return CEF(tuple(dict.fromkeys((var, var2))), (), [Term(bilinear=[(var, var2, a)])])


def cef_echar(var: str, w) -> CEF:
    return cef_annulus(var, 0, TRUE, achar(w))


def cef_const(c, params: Sequence[str] = ()) -> CEF:
    if isinstance(c, QuasiPoly):
        return CEF((), tuple(params), [Term(weight=c)])
    return CEF((), tuple(params), [Term(weight=QuasiPoly.const(c))])


def cef_indicator(cond: PresburgerSet | BasicSet, params: Sequence[str] = ()) -> CEF:
    basics = cond.disjoint() if isinstance(cond, PresburgerSet) else [cond]
    return CEF((), tuple(params), [Term(cond=b) for b in basics])


# ----------------------------------------------------------------------
# linear structure


def cef_add(f: CEF, g: CEF) -> CEF:
    vs, ps = _check_same(f, g, strict=False)
    return CEF(vs, ps, list(f.terms) + list(g.terms), f.bad_primes | g.bad_primes).normalized()


def cef_scale(f: CEF, c) -> CEF:
    if isinstance(c, QuasiPoly):
        ps = tuple(dict.fromkeys(f.params + tuple(sorted(c.vars()))))
        return CEF(f.vars, ps, [t.copy(weight=t.weight * c) for t in f.terms], f.bad_primes).normalized()
    return CEF(f.vars, f.params, [t.scaled(c) for t in f.terms], f.bad_primes).normalized()


# ----------------------------------------------------------------------
# products


def _tmp_theta(var: str) -> str:
    return f"_g_{var}"


def _merge_var(t: Term, var: str, gb: VarBinding, bp: set) -> list[Term]:
    """Combine t's binding of var with gb, whose order variable is _g_var."""
    fb = t.bindings[var]
    th, tg = fb.theta, _tmp_theta(var)
    th_l = LinForm.var(th)
    D = gb.center - fb.center
    if D.is_zero():
        a, k = ac_mul(fb.ac, gb.ac, bp)
        if a is None:
            return []
        nt = t.subs_theta({tg: th_l}).with_binding(replace(fb, ac=a))
        return [nt.scaled(k)]
    w, delta = D.ord(), D.ac()
    note_laurent(bp, D)
    out = []
    # (i) th < w: both orders agree, same angular component
    a, k = ac_mul(fb.ac, gb.ac, bp)
    if a is not None:
        nt = t.subs_theta({tg: th_l})
        nt = nt.copy(cond=nt.cond.add_ineq(LinForm.constant(w - 1) - th_l)).with_binding(replace(fb, ac=a))
        out.append(nt.scaled(k))
    # (ii) th > w: ord(x - c') = w, ac(x - c') = -ac(D)
    k = ac_at(gb.ac, -delta, bp)
    if not k.is_zero():
        nt = t.subs_theta({tg: LinForm.constant(w)})
        nt = nt.copy(cond=nt.cond.add_ineq(th_l - (w + 1)))
        out.append(nt.scaled(k))
    # (iii) th = w, ac(x - c) != ac(D)
    rf = ResFn.basis(fb.ac).mul(ResFn.basis(gb.ac).shifted(delta, bp), bp).exclude(delta, bp)
    base = t.subs_theta({tg: LinForm.constant(w)})
    base = base.copy(cond=base.cond.add_eq(th_l - w))
    for a, k in rf.items.items():
        out.append(base.with_binding(replace(fb, ac=a)).scaled(k))
    # (iv) th = w and ac(x - c) = ac(D): recenter on c'
    k = ac_at(fb.ac, delta, bp)
    if not k.is_zero():
        nt = t.subs_theta({th: LinForm.constant(w), tg: th_l})
        nt = nt.copy(cond=nt.cond.add_ineq(th_l - (w + 1))).with_binding(gb)
        out.append(nt.scaled(k))
    return [x for x in out if not x.is_zero()]


def mul_terms(tf: Term, tg: Term, bp: set) -> list[Term]:
    common = [v for v in tg.bindings if v in tf.bindings]
    ren = {theta_name(v): LinForm.var(_tmp_theta(v)) for v in common}
    cond = tf.cond & tg.cond.subs(ren)
    if cond.is_false():
        return []
    bs = dict(tf.bindings)
    for v, b in tg.bindings.items():
        if v not in bs:
            bs[v] = b
    start = Term(bs, cond, tf.weight * tg.weight.subs(ren), tf.affine + tg.affine, tf.bilinear + tg.bilinear)
    pieces = [start]
    for v in common:
        nxt = []
        for p in pieces:
            nxt.extend(_merge_var(p, v, tg.bindings[v], bp))
        pieces = nxt
    return [p for p in pieces if not p.cond.is_empty()]


def cef_mul(f: CEF, g: CEF) -> CEF:
    vs, ps = _check_same(f, g, strict=False)
    bp: set[int] = set()
    terms = []
    for tf in f.terms:
        for tg in g.terms:
            terms.extend(mul_terms(tf, tg, bp))
    return CEF(vs, ps, terms, f.bad_primes | g.bad_primes | frozenset(bp)).normalized()


# ----------------------------------------------------------------------
# recentering a single binding


def view_against(t: Term, var: str, c_new: LaurentConst, bp: set) -> list[tuple[Term, object, object]]:
    """Pieces of t on which ord/ac of (var - c_new) are known.

    Returns (term, ord, ac) with ord a LinForm in the term's order variables
    and ac one of ``('same',)`` (the binding's own angular component),
    ``('const', v)`` or ``('shift', delta)`` meaning sigma - delta with
    sigma != delta already imposed.  On the last kind of piece the caller
    must treat the binding's sigma as excluded from delta.
    """
    b = t.bindings[var]
    th_l = LinForm.var(b.theta)
    D = c_new - b.center
    if D.is_zero():
        return [(t, th_l, ("same",))]
    w, delta = D.ord(), D.ac()
    note_laurent(bp, D)
    out = []
    out.append((t.copy(cond=t.cond.add_ineq(LinForm.constant(w - 1) - th_l)), th_l, ("same",)))
    out.append((t.copy(cond=t.cond.add_ineq(th_l - (w + 1))), LinForm.constant(w), ("const", -delta)))
    out.append((t.copy(cond=t.cond.add_eq(th_l - w)), LinForm.constant(w), ("shift", delta)))
    k = ac_at(b.ac, delta, bp)
    if not k.is_zero():
        nt = t.subs_theta({b.theta: LinForm.constant(w)})
        nt = nt.copy(cond=nt.cond.add_ineq(th_l - (w + 1))).with_binding(VarBinding(var, c_new, FREE)).scaled(k)
        out.append((nt, th_l, ("same",)))
    return [(x, o, a) for x, o, a in out if not x.cond.is_empty()]


# ----------------------------------------------------------------------
# affine substitution


def cef_affine(f: CEF, var: str, sign: int = -1, shift=0) -> CEF:
    """The function x -> f(sign*x + shift) in the variable var."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    shift = as_laurent(shift)
    terms = []
    for t in f.terms:
        bs = dict(t.bindings)
        if var in bs:
            b = bs[var]
            bs[var] = VarBinding(var, (b.center - shift) * sign, (b.ac[0], b.ac[1] * sign))
        coeff = ONE
        affine = []
        for v, a in t.affine:
            if v == var:
                coeff = coeff * ValueRingElem.char(a * shift)
                affine.append((v, a * sign))
            else:
                affine.append((v, a))
        bilinear = []
        for v, w, k in t.bilinear:
            if var in (v, w):
                other = w if v == var else v
                if not shift.is_zero():
                    affine.append((other, k * shift))
                bilinear.append((v, w, k * sign))
            else:
                bilinear.append((v, w, k))
        terms.append(Term(bs, t.cond, t.weight * coeff, affine, bilinear))
    return CEF(f.vars, f.params, terms, f.bad_primes).normalized()


def cef_reflect(f: CEF) -> CEF:
    """x -> f(-x) in every valued variable."""
    for v in f.vars:
        f = cef_affine(f, v, -1, 0)
    return f


def cef_rename(f: CEF, mapping: Mapping[str, str]) -> CEF:
    """Rename valued variables."""
    ren_th = {theta_name(a): LinForm.var(theta_name(b)) for a, b in mapping.items()}
    terms = []
    for t in f.terms:
        bs = [VarBinding(mapping.get(b.var, b.var), b.center, b.ac) for b in t.bindings.values()]
        aff = [(mapping.get(v, v), a) for v, a in t.affine]
        bil = [(mapping.get(v, v), mapping.get(w, w), k) for v, w, k in t.bilinear]
        terms.append(Term(bs, t.cond.subs(ren_th), t.weight.subs(ren_th), aff, bil))
    return CEF(tuple(mapping.get(v, v) for v in f.vars), f.params, terms, f.bad_primes)


# ----------------------------------------------------------------------
# pointwise evaluation


def cef_eval(f: CEF, point: Mapping[str, object], params: Mapping[str, int] | None = None) -> ValueRingElem:
    """Exact value at a point with Laurent-constant coordinates."""
    params = dict(params or {})
    pt = {v: as_laurent(x) for v, x in point.items()}
    total = ValueRingElem()
    for idx, t in enumerate(f.terms):
        env = dict(params)
        val = ONE
        ok = True
        for v, b in t.bindings.items():
            if v not in pt:
                raise KeyError(f"no coordinate for {v}")
            diff = pt[v] - b.center
            if diff.is_zero():
                raise CenterCoincident(v, idx)
            env[b.theta] = diff.ord()
            k = ac_at(b.ac, diff.ac())
            if k.is_zero():
                ok = False
                break
            val = val * k
        if not ok or not t.cond.contains(env):
            continue
        val = val * t.weight.eval(env)
        for v, a in t.affine:
            val = val * ValueRingElem.char(a * pt[v])
        for v, w, k in t.bilinear:
            val = val * ValueRingElem.char(k * pt[v] * pt[w])
        total = total + val
    return total


# ----------------------------------------------------------------------
# bad primes of constants appearing in a CEF


def cef_constants_primes(f: CEF) -> set[int]:
    """Primes where the symbolic reading of f's constants breaks down."""
    bp: set[int] = set()
    for t in f.terms:
        for b in t.bindings.values():
            for _, c in b.center.items:
                note(bp, Fraction(1, c.denominator))
            if b.ac[1]:
                note(bp, b.ac[1])
        # centers of one variable are compared against each other
        for v, a in t.affine:
            for _, c in a.items:
                note(bp, Fraction(1, c.denominator))
        for _, _, k in t.bilinear:
            note_laurent(bp, k)
        for _, c in t.weight.terms.items():
            for d in c.denominators():
                bp |= prime_factors(d)
    by_var: dict[str, set] = {}
    for t in f.terms:
        for v, b in t.bindings.items():
            by_var.setdefault(v, set()).add(b.center)
    for cs in by_var.values():
        cs = sorted(cs)
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                note_laurent(bp, cs[j] - cs[i])
    return bp


def cef_bad_primes(f: CEF) -> set[int]:
    return set(f.bad_primes) | cef_constants_primes(f)
