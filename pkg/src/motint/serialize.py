"""Human-readable rendering and JSON round-trip for CEF values."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .cef import CEF, Term, VarBinding
from .laurent import format_laurent, laurent_from_json, laurent_to_json
from .linear import LinForm, QuasiPoly, format_linform, format_mono
from .presburger import basic_from_json, basic_to_json, format_basic
from .valring import ValueRingElem, from_json as vr_from_json, to_json as vr_to_json, to_text

# ----------------------------------------------------------------------
# text


def _paren(s: str) -> str:
    return f"({s})" if " " in s else s


def _coef(a) -> str:
    s = format_laurent(a)
    return {"1": "", "-1": "-"}.get(s, _paren(s) + "*")


def _shifted(var: str, c) -> str:
    if c.is_zero():
        return var
    s = format_laurent(c)
    if s.startswith("-") and " " not in s:
        return f"{var} + {s[1:]}"
    return f"{var} - {_paren(s)}"


def format_binding(b: VarBinding) -> str:
    head = f"ord({_shifted(b.var, b.center)}) = {b.theta}"
    kind, val = b.ac
    if kind == "f":
        head += f", ac = {val}"
    elif val:
        head += f", e({val}*ac)"
    return head


def format_weight(w: QuasiPoly) -> str:
    parts = []
    for lexp, mono, c in sorted(w.items(), key=lambda t: (t[0], t[1])):
        s = to_text(c).replace(" * (1)", "")
        factors = [] if s in ("(1)", "1") else [s if len(c.terms) == 1 else f"[{s}]"]
        if not (lexp.is_const() and lexp.const == 0):
            factors.append(f"L^({format_linform(lexp)})")
        if mono:
            factors.append(format_mono(mono))
        parts.append(" * ".join(factors) or "1")
    return " + ".join(parts) if parts else "0"


def format_term(t: Term) -> str:
    pieces = []
    w = format_weight(t.weight)
    pieces.append(w if len(t.weight.terms) <= 1 else f"({w})")
    for v in sorted(t.bindings):
        pieces.append("[" + format_binding(t.bindings[v]) + "]")
    cond = format_basic(t.cond)
    if cond != "true":
        pieces.append("{" + cond + "}")
    for v, a in t.affine:
        pieces.append(f"E({_coef(a)}{v})")
    for v, u, a in t.bilinear:
        pieces.append(f"E({_coef(a)}{v}*{u})")
    return " * ".join(pieces)


def format_cef(f: CEF) -> str:
    head = f"CEF[{', '.join(f.vars)}" + (f"; {', '.join(f.params)}" if f.params else "") + "]"
    if not f.terms:
        return head + " 0"
    return head + "\n" + "\n".join("  + " + format_term(t) for t in f.terms)


# ----------------------------------------------------------------------
# JSON


def _lin_to_json(f: LinForm) -> dict:
    return {"coeffs": {v: str(c) for v, c in f.coeffs}, "const": str(f.const)}


def _lin_from_json(d: Mapping) -> LinForm:
    return LinForm({v: Fraction(c) for v, c in d["coeffs"].items()}, Fraction(d["const"]))


def weight_to_json(w: QuasiPoly) -> list:
    return [
        {"lexp": _lin_to_json(lexp), "mono": [[v, e] for v, e in mono], "coeff": vr_to_json(c)}
        for lexp, mono, c in sorted(w.items(), key=lambda t: (t[0], t[1]))
    ]


def weight_from_json(items) -> QuasiPoly:
    return QuasiPoly(
        (_lin_from_json(d["lexp"]), tuple((v, int(e)) for v, e in d["mono"]), vr_from_json(d["coeff"]))
        for d in items
    )


def term_to_json(t: Term) -> dict:
    return {
        "bindings": [
            {"var": b.var, "center": laurent_to_json(b.center), "ac": [b.ac[0], str(b.ac[1])]}
            for _, b in sorted(t.bindings.items())
        ],
        "cond": basic_to_json(t.cond),
        "weight": weight_to_json(t.weight),
        "affine": [[v, laurent_to_json(a)] for v, a in t.affine],
        "bilinear": [[v, u, laurent_to_json(a)] for v, u, a in t.bilinear],
    }


def term_from_json(d: Mapping) -> Term:
    bindings = [
        VarBinding(b["var"], laurent_from_json(b["center"]), (b["ac"][0], Fraction(b["ac"][1]))) for b in d["bindings"]
    ]
    return Term(
        bindings,
        basic_from_json(d["cond"]),
        weight_from_json(d["weight"]),
        [(v, laurent_from_json(a)) for v, a in d["affine"]],
        [(v, u, laurent_from_json(a)) for v, u, a in d["bilinear"]],
    )


def cef_to_json(f: CEF) -> dict:
    return {
        "vars": list(f.vars),
        "params": list(f.params),
        "terms": [term_to_json(t) for t in f.terms],
        "bad_primes": sorted(f.bad_primes),
    }


def cef_from_json(d: Mapping) -> CEF:
    return CEF(
        tuple(d["vars"]),
        tuple(d["params"]),
        [term_from_json(t) for t in d["terms"]],
        frozenset(int(p) for p in d.get("bad_primes", ())),
    )


def value_to_json(v: ValueRingElem) -> dict:
    return {"text": to_text(v), **vr_to_json(v)}
