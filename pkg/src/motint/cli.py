"""Command-line front end: ``mk run|check|integrate|fourier|convolve|specialize|oracle|transfer``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence

from .cef import CEF, cef_bad_primes, cef_phi_alpha, cef_mul
from .dsl import Assign, Command, Evaluator, EvalError, Ref, Script, parse, parse_expr, print_expr
from .equality import cef_eq_ae
from .errors import BadPrime, CenterCoincident, MotintError, ParseError
from .fourier import (
    check_convolution_theorem,
    check_inversion,
    check_partial_inversion,
    convolution_theorem_sides,
    convolve,
    fourier,
    inversion_sides,
    partial_inversion_sides,
)
from .integrate import integrate_all
from .laurent import LaurentConst
from .localfield import FPT, QP, FieldSpec, default_twists
from .oracle import oracle_convolve_at, oracle_fourier_at, oracle_integrate
from .serialize import format_cef
from .specialize import bad_primes, spec_cef_at, spec_laurent, spec_value
from .valring import ValueRingElem, to_text

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3


@dataclass
class Config:
    p: int = 3
    field: str = "both"  # qp | fpt | both
    twist: str = "0"  # 0 | 1 | all
    B: int = 3
    N: int = 8
    samples: int = 200
    seed: int = 0

    def fields(self, kinds: Sequence[str] | None = None) -> list[FieldSpec]:
        kinds = kinds or ([QP, FPT] if self.field == "both" else [self.field])
        out = []
        for k in kinds:
            tw = default_twists(FieldSpec(self.p, k))
            out += tw if self.twist == "all" else [tw[int(self.twist)]]
        return out


@dataclass
class Report:
    results: list = field(default_factory=list)
    ok: bool = True

    def to_json(self) -> dict:
        return {"ok": self.ok, "results": self.results}

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            head = r["command"]
            body = {k: v for k, v in r.items() if k not in ("command", "line")}
            if "result" in body and isinstance(body["result"], str) and "\n" in body["result"]:
                lines.append(f"{head}:\n" + "\n".join("    " + s for s in body.pop("result").splitlines()))
                if body:
                    lines.append("    " + json.dumps(body, sort_keys=True))
            else:
                lines.append(f"{head}: " + json.dumps(body, sort_keys=True))
        lines.append("OK" if self.ok else "FAILED")
        return "\n".join(lines)


# ----------------------------------------------------------------------
# command implementations


def _cell(fn):
    """Evaluate fn(); render BadPrime as an exclusion marker."""
    try:
        return str(fn())
    except BadPrime as e:
        return f"excluded (bad prime {e.p})"


def _closed_value(f: CEF) -> tuple[ValueRingElem, set[int]]:
    res = integrate_all(f)
    if not isinstance(res.value, ValueRingElem):
        raise EvalError("value still depends on parameters; cannot specialize")
    return res.value, bad_primes(res) | cef_bad_primes(f)


def _do_integrate(f: CEF) -> dict:
    res = integrate_all(f)
    bp = sorted(bad_primes(res) | cef_bad_primes(f))
    if isinstance(res.value, ValueRingElem):
        return {"value": to_text(res.value), "bad_primes": bp}
    return {"result": format_cef(res.value), "bad_primes": bp}


def _do_specialize(f: CEF, cfg: Config) -> dict:
    v, bp = _closed_value(f)
    return {"values": {str(K): _cell(lambda K=K: spec_value(v, K, bp)) for K in cfg.fields()}}


def _do_oracle(f: CEF, cfg: Config) -> dict:
    return {"values": {str(K): str(oracle_integrate(f, K, cfg.B, cfg.N)) for K in cfg.fields()}}


def _integral_transfer(f: CEF, cfg: Config) -> dict:
    v, bp = _closed_value(f)
    rows = {}
    holds = {}
    for K in cfg.fields([QP, FPT]):
        oracle = oracle_integrate(f, K, cfg.B, cfg.N)
        if K.p in bp:
            rows[str(K)] = {"symbolic": "excluded", "oracle": str(oracle), "holds": None}
            continue
        sym = spec_value(v, K)
        rows[str(K)] = {"symbolic": str(sym), "oracle": str(oracle), "holds": sym == oracle}
        holds.setdefault(K.kind, []).append(sym == oracle)
    return _verdict(rows, holds, cfg.p in bp)


def _verdict(rows: dict, holds: dict, excluded: bool) -> dict:
    if excluded:
        return {"fields": rows, "verdict": "excluded (bad prime)", "agree": True}
    qp, fpt = all(holds.get(QP, [True])), all(holds.get(FPT, [True]))
    return {"fields": rows, "verdict": "match" if qp == fpt else "mismatch", "holds": qp and fpt, "agree": qp == fpt}


_SAMPLE_POINTS = [
    LaurentConst.const(1),
    LaurentConst({-1: 1}),
    LaurentConst({1: 2}),
    LaurentConst({-2: 1, 0: 1}),
    LaurentConst({0: 2, 2: 1}),
    LaurentConst({3: 1}),
]


def _points(vars: Sequence[str], n: int = 4) -> list[dict]:
    out = []
    for k in range(n):
        out.append({v: _SAMPLE_POINTS[(k + 2 * i) % len(_SAMPLE_POINTS)] for i, v in enumerate(vars)})
    return out


def _spec_at(f: CEF, K: FieldSpec, pt: dict, prec: int = 30):
    return spec_cef_at(f, K, {v: spec_laurent(a, K, prec) for v, a in pt.items()})


def _identity_transfer(kind: str, args: list[CEF], cfg: Config) -> dict:
    if kind == "inversion":
        lhs, rhs = inversion_sides(args[0])
        probe = fourier(args[0])
        oracle_fn = lambda K, pt: oracle_fourier_at(args[0], K, pt, cfg.B, cfg.N)  # noqa: E731
    elif kind == "partial":
        alpha = _as_int(args[1])
        lhs, rhs = partial_inversion_sides(args[0], alpha)
        inner = cef_mul(cef_phi_alpha(args[0].vars, alpha), fourier(args[0]))
        probe = lhs
        oracle_fn = lambda K, pt: oracle_fourier_at(inner, K, pt, cfg.B, cfg.N)  # noqa: E731
    elif kind == "convtheorem":
        lhs, rhs = convolution_theorem_sides(args[0], args[1])
        probe = convolve(args[0], args[1])
        oracle_fn = lambda K, pt: oracle_convolve_at(args[0], args[1], K, pt, cfg.B, cfg.N)  # noqa: E731
    else:
        lhs, rhs = args
        probe, oracle_fn = None, None
    bp = cef_bad_primes(lhs) | cef_bad_primes(rhs) | cef_bad_primes(args[0])
    vars = tuple(dict.fromkeys(lhs.vars + rhs.vars))
    rows, holds = {}, {}
    for K in cfg.fields([QP, FPT]):
        if K.p in bp:
            rows[str(K)] = {"symbolic": "excluded", "holds": None}
            continue
        sym_ok, orc_ok, used = True, True, 0
        for pt in _points(vars):
            try:
                a, b = _spec_at(lhs, K, pt), _spec_at(rhs, K, pt)
                if probe is not None:
                    orc_ok &= oracle_fn(K, pt) == _spec_at(probe, K, pt)
            except CenterCoincident:
                continue
            used += 1
            sym_ok &= a == b
        rows[str(K)] = {"points": used, "symbolic": sym_ok, "oracle": orc_ok if probe is not None else None}
        rows[str(K)]["holds"] = sym_ok and orc_ok
        holds.setdefault(K.kind, []).append(sym_ok and orc_ok)
    return _verdict(rows, holds, cfg.p in bp)


def _as_int(e) -> int:
    from .dsl import Const

    if not isinstance(e, Const) or e.value.denominator != 1:
        raise EvalError("partial inversion needs an integer alpha")
    return int(e.value)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int)) or x is None:
        return x
    return str(x)


def _do_check(kind: str, args: list[CEF], cfg: Config) -> dict:
    kw = {"samples": cfg.samples, "seed": cfg.seed}
    if kind == "inversion":
        r = check_inversion(args[0], **kw)
    elif kind == "partial":
        r = check_partial_inversion(args[0], _as_int(args[1]), **kw)
    elif kind == "convtheorem":
        r = check_convolution_theorem(args[0], args[1], **kw)
    else:
        r = cef_eq_ae(args[0], args[1], **kw)
    out = {"status": r.status}
    if r.witness is not None:
        out["witness"] = _jsonable(r.witness)
    if r.detail:
        out["detail"] = r.detail
    return out


# ----------------------------------------------------------------------
# script runner


def _command_text(c: Command) -> str:
    head = c.verb + (f" {c.sub}" if c.sub else "")
    return head + " " + ", ".join(print_expr(a) for a in c.args)


def run_command(c: Command, ev: Evaluator, cfg: Config, transfer: bool = False) -> tuple[dict, bool]:
    args = [ev.eval(a) for a in c.args]
    if c.sub == "partial":
        args[1] = c.args[1]
    rec: dict = {"command": _command_text(c), "line": c.line}
    if transfer and c.verb in ("integrate", "transfer"):
        rec.update(_integral_transfer(args[0], cfg))
        return rec, rec["agree"]
    if transfer and c.verb == "check":
        rec.update(_identity_transfer(c.sub, args, cfg))
        return rec, rec["agree"]
    if c.verb == "integrate":
        rec.update(_do_integrate(args[0]))
    elif c.verb == "fourier":
        rec["result"] = format_cef(fourier(args[0]))
    elif c.verb == "convolve":
        rec["result"] = format_cef(convolve(args[0], args[1]))
    elif c.verb == "specialize":
        rec.update(_do_specialize(args[0], cfg))
    elif c.verb == "oracle":
        rec.update(_do_oracle(args[0], cfg))
    elif c.verb == "transfer":
        rec.update(_integral_transfer(args[0], cfg))
        return rec, rec["agree"]
    else:
        rec.update(_do_check(c.sub, args, cfg))
        return rec, rec["status"] == "Equal"
    return rec, True


def run_script(script: Script, cfg: Config, verbs: set[str] | None = None, transfer: bool = False) -> Report:
    """Execute statements in order; verbs (if given) filters which commands run."""
    ev = Evaluator()
    rep = Report()
    for s in script.statements:
        if isinstance(s, Assign):
            ev.env[s.name] = ev.eval(s.expr)
            continue
        if verbs is not None and s.verb not in verbs:
            continue
        rec, ok = run_command(s, ev, cfg, transfer)
        rep.results.append(rec)
        rep.ok &= ok
    return rep


def _default_commands(script: Script, verb: str) -> Script:
    """Apply verb to the last one or two definitions when the script has no such command."""
    names = [s.name for s in script.statements if isinstance(s, Assign)]
    need = 2 if verb == "convolve" else 1
    if len(names) < need:
        raise EvalError(f"{verb}: the script defines no function to act on")
    args = tuple(Ref(n) for n in names[-need:])
    return Script(script.statements + (Command(verb, None, args),))


# ----------------------------------------------------------------------
# entry point


def _env_int(name: str, default: int) -> int:
    v = os.environ.get(name)
    if v is None or v == "":
        return default
    try:
        return int(v)
    except ValueError:
        raise SystemExit(f"mk: environment variable {name} must be an integer")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mk", description="Exact integration and Fourier analysis of exponential functions over local fields.")
    ap.add_argument("mode", choices=["run", "check", "integrate", "fourier", "convolve", "specialize", "oracle", "transfer"])
    ap.add_argument("file", nargs="?", default=None, help="script file, '-' for stdin (default: stdin unless -e is given)")
    ap.add_argument("-e", "--expr", help="extra expression used as the argument of the mode's verb")
    ap.add_argument("--json", action="store_true", help="print a JSON report")
    ap.add_argument("--p", type=int, default=None, help="residue characteristic (env MK_PRIME, default 3)")
    ap.add_argument("--field", choices=["qp", "fpt", "both"], default="both")
    ap.add_argument("--twist", choices=["0", "1", "all"], default="0", help="which character from the default pair")
    ap.add_argument("--B", type=int, default=3, help="oracle support bound: ord >= -B")
    ap.add_argument("--N", type=int, default=None, help="oracle refinement depth (env MK_PRECISION, default 8)")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_intermixed_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        cfg = Config(
            p=ns.p if ns.p is not None else _env_int("MK_PRIME", 3),
            field=ns.field,
            twist=ns.twist,
            B=ns.B,
            N=ns.N if ns.N is not None else _env_int("MK_PRECISION", 8),
            samples=ns.samples,
            seed=ns.seed,
        )
        FieldSpec(cfg.p)
    except (ValueError, SystemExit) as e:
        print(f"mk: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if ns.file is None:
            ns.file = "-" if ns.expr is None else ""
        text = "" if ns.file == "" else sys.stdin.read() if ns.file == "-" else open(ns.file, encoding="utf-8").read()
    except OSError as e:
        print(f"mk: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        script = parse(text)
        verb = {"run": None, "check": "check"}.get(ns.mode, ns.mode)
        if ns.expr is not None:
            if verb in (None, "check", "convolve"):
                print("mk: --expr needs integrate, fourier, specialize, oracle or transfer", file=sys.stderr)
                return EXIT_USAGE
            script = Script(script.statements + (Command(verb, None, (parse_expr(ns.expr),)),))
        if verb not in (None, "check") and not any(isinstance(s, Command) and s.verb == verb for s in script.statements):
            if verb != "transfer" or not any(isinstance(s, Command) for s in script.statements):
                script = _default_commands(script, verb)
    except ParseError as e:
        print(f"mk: parse error at {e}", file=sys.stderr)
        return EXIT_USAGE
    except EvalError as e:
        print(f"mk: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if ns.mode == "transfer":
            rep = run_script(script, cfg, {"integrate", "check", "transfer"}, transfer=True)
        elif ns.mode == "run":
            rep = run_script(script, cfg)
        else:
            rep = run_script(script, cfg, {verb})
    except (MotintError, EvalError, ZeroDivisionError) as e:
        print(f"mk: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    if ns.json:
        print(json.dumps(rep.to_json(), indent=2, sort_keys=True))
    else:
        print(rep.to_text())
    return EXIT_OK if rep.ok else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
