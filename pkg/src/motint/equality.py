"""Almost-everywhere equality of CEFs.

The difference h = f - g is brought into a canonical shape:

1. For every valued variable the distinct centers c_1 < ... < c_n are
   collected and space is cut into cells; cell k holds the points whose
   closest center is c_k (ties go to the smallest index).  Inside cell k
   every term is rewritten around c_k.
2. Phases E(a x) are split at the orders where a coefficient of a becomes
   visible; the visible part of a (a Laurent constant) is kept as a key and
   the coefficient sitting exactly at the residue level becomes e^(. sigma).
3. Terms are grouped by (cells, phase keys, angular basis elements).  Distinct
   groups are linearly independent functions, so h = 0 a.e. iff every
   group's coefficient, a piecewise quasi-polynomial in the order variables
   and parameters, vanishes identically.

A nonzero group is confirmed by finding an explicit point where f and g
differ (checked with cef_eval); otherwise the answer is Undecided.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .cef import CEF, Term, VarBinding, _merge_var, _tmp_theta, cef_add, cef_eval, cef_scale, theta_name
from .errors import CenterCoincident
from .laurent import LaurentConst
from .linear import LinForm, QuasiPoly
from .presburger import EMPTY, UNBOUNDED, BasicSet, basic_subtract, ps_max, ps_min
from .resfn import FREE, ResFn, ac_mul, achar


@dataclass
class EqResult:
    status: str  # "Equal" | "NotEqual" | "Undecided"
    witness: dict | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.status == "Equal"

    def __repr__(self) -> str:
        if self.status == "NotEqual":
            return f"NotEqual({self.witness})"
        if self.status == "Undecided":
            return f"Undecided({self.detail})"
        return "Equal"


EQUAL = "Equal"
NOT_EQUAL = "NotEqual"
UNDECIDED = "Undecided"


class _GiveUp(Exception):
    pass


# ----------------------------------------------------------------------
# cells


def _bind_all(t: Term, vars) -> Term:
    for v in vars:
        if v not in t.bindings:
            t = t.with_binding(VarBinding(v, LaurentConst()))
    return t


def _exclude_point(p: Term, v: str, w: int, delta: Fraction) -> list[Term]:
    """Remove {ord(x - c) = w, ac(x - c) = delta} from p."""
    th = LinForm.var(theta_name(v))
    out = [
        p.copy(cond=p.cond.add_ineq(LinForm.constant(w - 1) - th)),
        p.copy(cond=p.cond.add_ineq(th - (w + 1))),
    ]
    eq = p.copy(cond=p.cond.add_eq(th - w))
    b = p.bindings[v]
    for a, k in ResFn.basis(b.ac).exclude(delta).items.items():
        out.append(eq.with_binding(VarBinding(v, b.center, a)).scaled(k))
    return [o for o in out if not o.cond.is_empty()]


def _restrict(t: Term, v: str, centers: list[LaurentConst], k: int, bp: set) -> list[Term]:
    ck = centers[k]
    th = LinForm.var(theta_name(v))
    b = t.bindings[v]
    if b.center == ck:
        pieces = [t]
    else:
        tt = t.subs_theta({theta_name(v): LinForm.var(_tmp_theta(v))}).with_binding(VarBinding(v, ck))
        pieces = [p for p in _merge_var(tt, v, b, bp) if p.bindings[v].center == ck]
    for j, cj in enumerate(centers):
        if j == k:
            continue
        D = cj - ck
        w, delta = D.ord(), D.ac()
        if j < k:
            pieces = [p.copy(cond=p.cond.add_ineq(th - (w + 1))) for p in pieces]
        else:
            nxt = []
            for p in pieces:
                nxt.extend(_exclude_point(p, v, w, delta))
            pieces = nxt
    return [p for p in pieces if not p.cond.is_empty()]


# ----------------------------------------------------------------------
# phase keys


def _phase_regions(exps: set[int]) -> list[tuple[str, int | None, int | None]]:
    """Regions of th: ('lt', P0), ('eq', P), ('between', Pi, Pj), ('gt', Plast)."""
    pts = sorted({-e for e in exps})
    if not pts:
        return [("all", None, None)]
    regs = [("lt", pts[0], None)]
    for i, p in enumerate(pts):
        regs.append(("eq", p, None))
        if i + 1 < len(pts):
            if pts[i + 1] - p > 1:
                regs.append(("between", p, pts[i + 1]))
    regs.append(("gt", pts[-1], None))
    return regs


def _region_cond(th: LinForm, reg) -> list[LinForm]:
    kind, a, b = reg
    if kind == "all":
        return []
    if kind == "lt":
        return [LinForm.constant(a - 1) - th]
    if kind == "gt":
        return [th - (a + 1)]
    if kind == "eq":
        return [th - a, LinForm.constant(a) - th]
    return [th - (a + 1), LinForm.constant(b - 1) - th]


def _key_for(a: LaurentConst, reg) -> tuple[LaurentConst, Fraction]:
    """(visible phase key, residue-level coefficient) of E(a X) on the region."""
    kind, p, q = reg
    if kind == "all" or a.is_zero():
        return LaurentConst(), Fraction(0)
    if kind == "gt":
        return LaurentConst(), Fraction(0)
    if kind == "lt":
        return a, Fraction(0)
    if kind == "eq":
        e0 = -p
        return a.truncate_above(e0 - 1), a.coeff(e0)
    # between p < th < q: exponents e <= -q stay visible
    return a.truncate_above(-q), Fraction(0)


# ----------------------------------------------------------------------
# zero test for piecewise quasi-polynomials


def _disjoint_sum(items: list[tuple[BasicSet, QuasiPoly]]) -> list[tuple[BasicSet, QuasiPoly]]:
    regions: list[tuple[BasicSet, QuasiPoly]] = []
    for c, w in items:
        if c.is_empty():
            continue
        nxt = []
        rest = [c]
        for r, wr in regions:
            inter = r & c
            if not inter.is_false() and not inter.is_empty():
                nxt.append((inter, wr + w))
                for piece in basic_subtract(r, c):
                    nxt.append((piece, wr))
                new_rest = []
                for x in rest:
                    new_rest.extend(basic_subtract(x, r))
                rest = new_rest
            else:
                nxt.append((r, wr))
        for x in rest:
            nxt.append((x, w))
        regions = nxt
    return regions


def _find_point(region: BasicSet, vars: list[str]) -> dict | None:
    point: dict[str, int] = {}
    cur = region
    for v in vars:
        lv = LinForm.var(v)
        lo = ps_min(cur, lv)
        if lo is EMPTY:
            return None
        if lo is UNBOUNDED:
            hi = ps_max(cur, lv)
            val = 0 if hi is UNBOUNDED else hi
            if hi is UNBOUNDED:
                # any value works for an unbounded coordinate as long as the rest stays feasible
                for cand in (0, 1, -1, 2, -2, 5, -5, 20, -20):
                    if not cur.add_eq(lv - cand).is_empty():
                        val = cand
                        break
        else:
            val = lo
        point[v] = int(val)
        cur = cur.add_eq(lv - int(val))
    return point


def _candidate_points(region: BasicSet, vars: list[str], n: int = 6) -> list[dict]:
    out = []
    base = _find_point(region, vars)
    if base is None:
        return out
    out.append(base)
    cur = region
    for i in range(n):
        # push away from the first point along increasing coordinates
        v = vars[i % len(vars)] if vars else None
        if v is None:
            break
        cur = cur.add_ineq(LinForm.var(v) - (out[-1][v] + 1))
        p = _find_point(cur, vars)
        if p is None:
            cur = region
            continue
        out.append(p)
    return out


def _is_zero_on(region: BasicSet, qp: QuasiPoly, depth: int = 0) -> bool | dict:
    """True if qp vanishes on region; otherwise a point where it does not (or raise _GiveUp)."""
    if qp.is_zero() or region.is_empty():
        return True
    vars = sorted(region.vars() | qp.vars())
    if depth > 12:
        raise _GiveUp("zero test recursion too deep")
    for f in list(region.ineqs) + [LinForm.var(v) for v in vars]:
        lo = ps_min(region, f)
        if lo is EMPTY:
            return True
        hi = ps_max(region, f)
        if lo is UNBOUNDED or hi is UNBOUNDED or hi == lo and f.is_const():
            continue
        if hi - lo > 400:
            continue
        unit = [v for v, c in f.coeffs if abs(c) == 1]
        if not unit:
            continue
        v = unit[0]
        cv = f.coeff(v)
        for val in range(lo, hi + 1):
            # f = val  =>  v = (val - (f - cv v)) / cv
            expr = (LinForm.constant(val) - (f - LinForm.var(v, cv))) * (1 / cv)
            sub = {v: expr}
            r2 = region.subs(sub)
            q2 = qp.subs(sub)
            res = _is_zero_on(r2, q2, depth + 1)
            if res is not True:
                if isinstance(res, dict):
                    res = dict(res)
                    res[v] = int(expr.eval(res))
                return res
        return True
    # every constraint direction is unbounded: formal test
    for (lexp, _), _c in qp.terms.items():
        for _, c in lexp.coeffs:
            if Fraction(c).denominator != 1:
                raise _GiveUp("fractional L exponent")
    if qp.is_zero():
        return True
    for p in _candidate_points(region, vars):
        if not qp.eval(p).is_zero():
            return p
    raise _GiveUp("nonzero quasi-polynomial without an explicit nonzero point")


# ----------------------------------------------------------------------
# main entry


def _sample_sigma(ac) -> list[Fraction]:
    if ac[0] == "f":
        return [ac[1]]
    return [Fraction(x) for x in (1, 2, -1, 3, Fraction(1, 2), 5, -3, 7)]


def _concrete_points(cells: dict, key_acs: dict, thpoint: dict, centers: dict):
    """Points x with the given orders and angular data in the chosen cells."""
    vars = sorted(cells)
    choices = []
    for v in vars:
        c = centers[v][cells[v]]
        th = thpoint.get(theta_name(v), 0)
        opts = [c + LaurentConst.monomial(s, th) for s in _sample_sigma(key_acs[v])]
        choices.append(opts)
    import itertools

    for combo in itertools.islice(itertools.product(*choices), 64):
        yield dict(zip(vars, combo))


def _diff_at(f: CEF, g: CEF, point, params):
    try:
        a = cef_eval(f, point, params)
        b = cef_eval(g, point, params)
    except CenterCoincident:
        return None
    return None if a == b else (a, b)


def _random_search(f: CEF, g: CEF, samples: int, seed: int) -> dict | None:
    rng = random.Random(seed)
    vars = sorted(set(f.vars) | set(g.vars))
    params = sorted(set(f.params) | set(g.params))
    centers: dict[str, set] = {v: {LaurentConst()} for v in vars}
    for h in (f, g):
        for t in h.terms:
            for v, b in t.bindings.items():
                centers[v].add(b.center)
    for _ in range(samples):
        point = {}
        for v in vars:
            c = rng.choice(sorted(centers[v]))
            e = rng.randint(-4, 5)
            s = Fraction(rng.choice([1, 2, 3, -1, -2, 5, 7]), rng.choice([1, 1, 1, 2]))
            point[v] = c + LaurentConst.monomial(s, e) + LaurentConst.monomial(rng.randint(0, 3), e + 1)
        pv = {p: rng.randint(-3, 4) for p in params}
        if _diff_at(f, g, point, pv) is not None:
            return {"point": {k: str(x) for k, x in point.items()}, "params": pv}
    return None


def cef_eq_ae(f: CEF, g: CEF, samples: int = 200, seed: int = 0) -> EqResult:
    """Decide whether f = g almost everywhere."""
    h = cef_add(f, cef_scale(g, -1))
    if not h.terms:
        return EqResult(EQUAL)
    try:
        res = _canonical_zero(h, f, g)
    except _GiveUp as e:
        res = EqResult(UNDECIDED, detail=str(e))
    if res.status != UNDECIDED:
        return res
    w = _random_search(f, g, samples, seed)
    if w is not None:
        return EqResult(NOT_EQUAL, w)
    return res


def _canonical_zero(h: CEF, f: CEF, g: CEF) -> EqResult:
    vars = sorted(set(h.vars) | {v for t in h.terms for v in t.vars()})
    terms = [_bind_all(t, vars) for t in h.terms]
    if any(t.bilinear for t in terms):
        raise _GiveUp("bilinear phases are not canonicalized")
    centers = {v: sorted({t.bindings[v].center for t in terms}) for v in vars}
    bp: set[int] = set()
    groups: dict = {}
    for t in terms:
        states = [({}, t)]
        for v in vars:
            nxt = []
            for cells, p in states:
                for k in range(len(centers[v])):
                    for q in _restrict(p, v, centers[v], k, bp):
                        nxt.append(({**cells, v: k}, q))
            states = nxt
        for cells, p in states:
            _add_to_groups(groups, cells, p, vars, centers)
    for key, items in groups.items():
        cells, phase_keys, acs = key
        for region, qp in _disjoint_sum(items):
            res = _is_zero_on(region, qp)
            if res is True:
                continue
            point = dict(res)
            for reg_v in region.vars() | qp.vars():
                point.setdefault(reg_v, 0)
            params = {k: v for k, v in point.items() if not k.startswith("th_")}
            for x in _concrete_points(dict(cells), dict(acs), point, centers):
                if _diff_at(f, g, x, params) is not None:
                    return EqResult(NOT_EQUAL, {"point": {k: str(v) for k, v in x.items()}, "params": params})
            raise _GiveUp("nonzero canonical coefficient but no separating point found")
    return EqResult(EQUAL)


def _add_to_groups(groups: dict, cells: dict, p: Term, vars, centers) -> None:
    # center phase extraction and splitting at the phase breakpoints
    coeff = None
    for v, a in p.affine:
        c = p.bindings[v].center
        if not c.is_zero():
            from .valring import ValueRingElem

            x = ValueRingElem.char(a * c)
            coeff = x if coeff is None else coeff * x
    if coeff is not None:
        p = p.scaled(coeff)
    states = [(p, {}, {})]
    for v in vars:
        a = p.affine_coeff(v)
        exps = {e for e, _ in a.items}
        th = LinForm.var(theta_name(v))
        nxt = []
        for q, keys, acs in states:
            for reg in _region_cond_list(exps):
                cond = q.cond
                for ineq in _region_cond(th, reg):
                    cond = cond.add_ineq(ineq)
                if cond.is_false():
                    continue
                key, res = _key_for(a, reg)
                ac = q.bindings[v].ac
                k = None
                if res:
                    ac, k = ac_mul(ac, achar(res))
                qq = q.copy(cond=cond)
                if k is not None:
                    qq = qq.scaled(k)
                nxt.append((qq, {**keys, v: key}, {**acs, v: ac}))
        states = nxt
    for q, keys, acs in states:
        gk = (tuple(sorted(cells.items())), tuple(sorted(keys.items())), tuple(sorted(acs.items())))
        groups.setdefault(gk, []).append((q.cond, q.weight))


def _region_cond_list(exps):
    return _phase_regions(exps)


# ----------------------------------------------------------------------
# Schwartz-Bruhat level


def schwartz_level(f: CEF):
    """(support level, constancy level) or the string 'Unknown'.

    f vanishes outside ord x >= support level and is invariant under
    translation by t^(constancy level) R, by a syntactic criterion.
    """
    if f.params:
        return "Unknown"
    sup = None
    const = None
    for t in f.terms:
        if not t.bindings or set(t.bindings) != set(f.vars):
            return "Unknown"
        for v, b in t.bindings.items():
            th = LinForm.var(b.theta)
            lo = ps_min(t.cond, th)
            if lo is EMPTY:
                break
            if lo is UNBOUNDED:
                return "Unknown"
            hi = ps_max(t.cond, th)
            # support: points with ord(x - c) >= lo, so ord x >= min(lo, ord c)
            s = lo if b.center.is_zero() else min(lo, b.center.ord())
            sup = s if sup is None else min(sup, s)
            if hi is UNBOUNDED:
                # constant near the center only if nothing depends on th or sigma beyond some level
                if b.ac != FREE or th.vars() & t.weight.vars() or _th_in_congs(t.cond, b.theta):
                    return "Unknown"
                tops = [k for k in _lower_bounds(t.cond, b.theta)]
                level = max(tops) if tops else lo
            else:
                level = hi + (2 if b.ac != FREE else 1)
            const = level if const is None else max(const, level)
        for v, a in t.affine:
            level = 1 - a.ord()
            const = level if const is None else max(const, level)
    if sup is None:
        return (0, 0)
    return (sup, const if const is not None else sup)


def _th_in_congs(cond: BasicSet, th: str) -> bool:
    return any(f.coeff(th) for f, _ in cond.congs)


def _lower_bounds(cond: BasicSet, th: str) -> list[int]:
    out = []
    for f in cond.ineqs:
        c = f.coeff(th)
        if c and len(f.vars()) == 1:
            if c > 0:
                out.append(int(-(f.const // c)))
        elif c and c < 0:
            pass
    return out


# ----------------------------------------------------------------------
# simplification


def _try_union(a: BasicSet, b: BasicSet) -> BasicSet | None:
    """a | b as a single basic set when that is possible (cheap hull test)."""
    if set(a.congs) != set(b.congs):
        return None
    from .presburger import negate_ineq

    keep = []
    for x, y in ((a, b), (b, a)):
        for f in x.ineqs:
            if y.add_ineq(negate_ineq(f)).is_empty():
                keep.append(f)
    hull = BasicSet.make(keep, a.congs)
    if basic_subtract(hull, a) and any(not p.is_empty() for q in basic_subtract(hull, a) for p in basic_subtract(q, b)):
        return None
    return hull


def _pin(region: BasicSet, qp: QuasiPoly) -> QuasiPoly:
    sub = {}
    for v in sorted(qp.vars()):
        lv = LinForm.var(v)
        lo = ps_min(region, lv)
        if isinstance(lo, int) and ps_max(region, lv) == lo:
            sub[v] = LinForm.constant(lo)
    return qp.subs(sub) if sub else qp


def cef_simplify(f: CEF) -> CEF:
    """Merge terms with equal structure, drop pieces that vanish identically."""
    groups: dict = {}
    proto: dict = {}
    for t in f.terms:
        k = (tuple(t.bindings.values()), t.affine, t.bilinear)
        groups.setdefault(k, []).append((t.cond, t.weight))
        proto.setdefault(k, t)
    terms = []
    for k, items in groups.items():
        regions = _disjoint_sum(items) if len(items) > 1 else items
        kept = []
        for region, qp in regions:
            qp = _pin(region, qp)
            try:
                z = _is_zero_on(region, qp)
            except _GiveUp:
                z = False
            if z is True:
                continue
            kept.append((region, qp))
        merged = True
        while merged:
            merged = False
            for i in range(len(kept)):
                for j in range(i + 1, len(kept)):
                    if kept[i][1] == kept[j][1]:
                        u = _try_union(kept[i][0], kept[j][0])
                        if u is not None:
                            kept[i] = (u, kept[i][1])
                            del kept[j]
                            merged = True
                            break
                if merged:
                    break
        for region, qp in kept:
            terms.append(proto[k].copy(cond=region, weight=qp))
    return CEF(f.vars, f.params, terms, f.bad_primes)
