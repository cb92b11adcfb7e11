"""The ``.mint`` script language: tokenizer, AST, parser, printer, evaluator.

A script is a sequence of lines, each either ``name = expr`` or a command
``verb args``.  ``#`` starts a comment.  Newlines inside parentheses are
ignored.

Expressions::

    expr    := mterm (('+' | '-') mterm)*
    mterm   := unary ('*' unary)*
    unary   := '-' unary | primary
    primary := NUM ['/' NUM] | 'L' '^' '(' lin ')' | 'L' '^' ['-'] NUM
             | atom | NAME | '(' expr ')' | '(' op args ')'
    atom    := ball(x; c; alpha) | ann(x; c [; cond]) | acfix(x; c; u)
             | E(a*x [+ b*y*z ...]) | echar(x; w) | Lpow(lin) | poly(p)
             | indicator(cond)
    op      := integrate | fourier | convolve | reflect

Centers and phase coefficients are Laurent constants in ``t``
(``t^-2 + 3*t^-1 + 1``).  Conditions use ``&&``, ``||``, comparisons,
``lin % m == r`` and ``ord(x - c) == name``, which binds ``name`` to the
valuation of ``x - c`` for the whole statement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .cef import (
    CEF,
    Term,
    VarBinding,
    cef_acfix,
    cef_add,
    cef_ball,
    cef_const,
    cef_echar,
    cef_mul,
    cef_phase,
    cef_reflect,
    cef_scale,
    theta_name,
)
from .errors import ParseError
from .laurent import LaurentConst, format_laurent
from .linear import LinForm, MPoly, QuasiPoly, format_linform
from .presburger import TRUE, BasicSet, PresburgerSet

# ----------------------------------------------------------------------
# tokens

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)|(?P<num>\d+)|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<op>&&|\|\||==|>=|<=|!=|[-+*/^(),;=<>%])"
)


@dataclass(frozen=True)
class Tok:
    kind: str  # num | name | op | nl | eof
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Tok]:
    out: list[Tok] = []
    pos, line, lstart, depth = 0, 1, 0, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - lstart + 1)
        kind, text = m.lastgroup, m.group()
        col = pos - lstart + 1
        pos = m.end()
        if kind == "nl":
            if depth == 0:
                out.append(Tok("nl", "\n", line, col))
            line, lstart = line + 1, pos
            continue
        if kind in ("ws", "comment"):
            continue
        if text == "(":
            depth += 1
        elif text == ")":
            depth = max(depth - 1, 0)
        out.append(Tok(kind, text, line, col))
    out.append(Tok("eof", "", line, pos - lstart + 1))
    return out


# ----------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Ball:
    var: str
    center: LaurentConst
    alpha: LinForm


@dataclass(frozen=True)
class Ann:
    var: str
    center: LaurentConst
    cond: "Cond | None" = None


@dataclass(frozen=True)
class AcFix:
    var: str
    center: LaurentConst
    u: Fraction


@dataclass(frozen=True)
class Phase:
    summands: tuple  # of (LaurentConst, tuple of 1 or 2 variable names)


@dataclass(frozen=True)
class EChar:
    var: str
    w: Fraction


@dataclass(frozen=True)
class LPow:
    lin: LinForm


@dataclass(frozen=True)
class Poly:
    poly: MPoly


@dataclass(frozen=True)
class Indicator:
    cond: "Cond"


@dataclass(frozen=True)
class BinOp:
    op: str  # + - *
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    expr: object


@dataclass(frozen=True)
class Op:
    verb: str
    args: tuple


@dataclass(frozen=True)
class OrdBind:
    var: str
    center: LaurentConst
    name: str


@dataclass(frozen=True)
class Cmp:
    lhs: LinForm
    op: str
    rhs: LinForm


@dataclass(frozen=True)
class Cong:
    lhs: LinForm
    mod: int
    rhs: LinForm


@dataclass(frozen=True)
class Cond:
    disjuncts: tuple  # of tuples of OrdBind | Cmp | Cong


@dataclass(frozen=True)
class Assign:
    name: str
    expr: object
    line: int = 0


@dataclass(frozen=True)
class Command:
    verb: str
    sub: str | None
    args: tuple
    line: int = 0


@dataclass(frozen=True)
class Script:
    statements: tuple

    def __eq__(self, other) -> bool:
        return isinstance(other, Script) and [_strip(s) for s in self.statements] == [
            _strip(s) for s in other.statements
        ]

    __hash__ = None


def _strip(s):
    return (s.name, s.expr) if isinstance(s, Assign) else (s.verb, s.sub, s.args)


ATOMS = ("ball", "ann", "acfix", "E", "echar", "Lpow", "poly", "indicator")
OPS = ("integrate", "fourier", "convolve", "reflect")
VERBS = ("integrate", "fourier", "convolve", "check", "specialize", "oracle", "transfer")
CHECKS = ("inversion", "partial", "convtheorem", "equal")
_OP_ARITY = {"integrate": 1, "fourier": 1, "convolve": 2, "reflect": 1}
_CMD_ARITY = {
    ("integrate", None): 1,
    ("fourier", None): 1,
    ("convolve", None): 2,
    ("specialize", None): 1,
    ("oracle", None): 1,
    ("transfer", None): 1,
    ("check", "inversion"): 1,
    ("check", "partial"): 2,
    ("check", "convtheorem"): 2,
    ("check", "equal"): 2,
}

# ----------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    # helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, expected: str = "", tok: Tok | None = None):
        t = tok or self.tok
        found = t.text if t.kind not in ("eof", "nl") else ("end of input" if t.kind == "eof" else "end of line")
        raise ParseError(f"{msg} near {found!r}", t.line, t.col, expected)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "name") and self.tok.text == text

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.error("unexpected token", repr(text))
        t = self.tok
        self.i += 1
        return t

    def name(self, what: str = "a name") -> str:
        if self.tok.kind != "name":
            self.error("unexpected token", what)
        t = self.tok.text
        self.i += 1
        return t

    def integer(self) -> int:
        neg = self.eat("-")
        if self.tok.kind != "num":
            self.error("unexpected token", "an integer")
        v = int(self.tok.text)
        self.i += 1
        return -v if neg else v

    def rational(self) -> Fraction:
        neg = self.eat("-")
        if self.tok.kind != "num":
            self.error("unexpected token", "a number")
        v = Fraction(int(self.tok.text))
        self.i += 1
        if self.at("/") and self.peek().kind == "num":
            self.i += 1
            d = int(self.tok.text)
            if d == 0:
                self.error("division by zero")
            v /= d
            self.i += 1
        return -v if neg else v

    # script
    def script(self) -> Script:
        stmts = []
        while True:
            while self.tok.kind == "nl":
                self.i += 1
            if self.tok.kind == "eof":
                break
            stmts.append(self.statement())
            if self.tok.kind not in ("nl", "eof"):
                self.error("unexpected token", "end of line")
        return Script(tuple(stmts))

    def statement(self):
        line = self.tok.line
        if self.tok.kind == "name" and self.peek().text == "=" and self.peek().kind == "op":
            name = self.name()
            if name in ATOMS or name in VERBS or name in ("L", "t"):
                self.error(f"{name!r} is reserved", tok=self.toks[self.i - 1])
            self.expect("=")
            return Assign(name, self.expr(), line)
        if self.tok.kind == "name" and self.tok.text in VERBS:
            verb = self.name()
            sub = None
            if verb == "check":
                if not (self.tok.kind == "name" and self.tok.text in CHECKS):
                    self.error("unknown check", " | ".join(CHECKS))
                sub = self.name()
            args = [self.expr()]
            while self.eat(","):
                args.append(self.expr())
            n = _CMD_ARITY[(verb, sub)]
            if len(args) != n:
                self.error(f"{verb}{' ' + sub if sub else ''} takes {n} argument(s), got {len(args)}")
            return Command(verb, sub, tuple(args), line)
        self.error("expected an assignment or a command", "name '=' expr | " + " | ".join(VERBS))

    # expressions
    def expr(self):
        left = self.mterm()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.mterm())
        return left

    def mterm(self):
        left = self.unary()
        while self.eat("*"):
            left = BinOp("*", left, self.unary())
        return left

    def unary(self):
        if self.eat("-"):
            e = self.unary()
            return Const(-e.value) if isinstance(e, Const) else Neg(e)
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "num":
            return Const(self.rational())
        if t.kind == "op" and t.text == "(":
            self.i += 1
            if self.tok.kind == "name" and self.tok.text in OPS:
                verb = self.name()
                args = [self.expr()]
                while self.eat(","):
                    args.append(self.expr())
                if len(args) != _OP_ARITY[verb]:
                    self.error(f"{verb} takes {_OP_ARITY[verb]} argument(s)")
                self.expect(")")
                return Op(verb, tuple(args))
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "name":
            if t.text == "L":
                self.i += 1
                self.expect("^")
                if self.eat("("):
                    lin = self.lin()
                    self.expect(")")
                    return LPow(lin)
                return LPow(LinForm.constant(self.integer()))
            if t.text in ATOMS and self.peek().text == "(":
                return self.atom()
            if t.text in OPS and self.peek().text == "(":
                self.error(f"write ({t.text} ...) for inline operations")
            if t.text == "t" or t.text in ATOMS or t.text in VERBS:
                self.error(f"{t.text!r} is reserved")
            self.i += 1
            return Ref(t.text)
        self.error("unexpected token", "an expression")

    def atom(self):
        kind = self.name()
        self.expect("(")
        if kind == "ball":
            var = self.name("a variable")
            self.expect(";")
            c = self.laurent()
            self.expect(";")
            out = Ball(var, c, self.lin())
        elif kind == "ann":
            var = self.name("a variable")
            self.expect(";")
            c = self.laurent()
            cond = self.cond() if self.eat(";") else None
            out = Ann(var, c, cond)
        elif kind == "acfix":
            var = self.name("a variable")
            self.expect(";")
            c = self.laurent()
            self.expect(";")
            out = AcFix(var, c, self.rational())
        elif kind == "E":
            out = Phase(self.phase_sum())
        elif kind == "echar":
            var = self.name("a variable")
            self.expect(";")
            out = EChar(var, self.rational())
        elif kind == "Lpow":
            out = LPow(self.lin())
        elif kind == "poly":
            out = Poly(self.poly())
        else:
            out = Indicator(self.cond())
        self.expect(")")
        return out

    # Laurent constants and polynomials
    def laurent(self) -> LaurentConst:
        out = self.lterm()
        while self.at("+") or self.at("-"):
            neg = self.tok.text == "-"
            self.i += 1
            v = self.lterm()
            out = out - v if neg else out + v
        return out

    def lterm(self) -> LaurentConst:
        neg = self.eat("-")
        out = self.lfactor()
        while self.eat("*"):
            out = out * self.lfactor()
        return -out if neg else out

    def lfactor(self) -> LaurentConst:
        if self.tok.kind == "num":
            return LaurentConst.const(self.rational())
        if self.at("t"):
            self.i += 1
            e = self.integer() if self.eat("^") else 1
            return LaurentConst.monomial(1, e)
        if self.eat("("):
            v = self.laurent()
            self.expect(")")
            return v
        self.error("unexpected token", "a Laurent constant in t")

    def phase_sum(self) -> tuple:
        out = [self.phase_term()]
        while self.at("+") or self.at("-"):
            neg = self.tok.text == "-"
            self.i += 1
            a, vs = self.phase_term()
            out.append((-a if neg else a, vs))
        return tuple(out)

    def phase_term(self):
        start = self.tok
        coef = LaurentConst.const(-1 if self.eat("-") else 1)
        vs = []
        while True:
            if self.tok.kind == "name" and self.tok.text != "t":
                vs.append(self.name())
            else:
                coef = coef * self.lfactor()
            if not self.eat("*"):
                break
        if not 1 <= len(vs) <= 2 or len(set(vs)) != len(vs):
            self.error("a phase term needs one variable or a product of two distinct variables", tok=start)
        return coef, tuple(vs)

    def poly(self) -> MPoly:
        out = self.pterm()
        while self.at("+") or self.at("-"):
            neg = self.tok.text == "-"
            self.i += 1
            v = self.pterm()
            out = out - v if neg else out + v
        return out

    def pterm(self) -> MPoly:
        neg = self.eat("-")
        out = self.pfactor()
        while self.eat("*"):
            out = out * self.pfactor()
        return -out if neg else out

    def pfactor(self) -> MPoly:
        if self.tok.kind == "num":
            base = MPoly.const(self.rational())
        elif self.tok.kind == "name":
            if self.tok.text in ("t", "L"):
                self.error(f"{self.tok.text!r} cannot appear in a linear form")
            base = MPoly.var(self.name())
        elif self.eat("("):
            base = self.poly()
            self.expect(")")
        else:
            self.error("unexpected token", "a number, a name or '('")
        if self.eat("^"):
            if self.tok.kind != "num":
                self.error("unexpected token", "a non-negative exponent")
            base = base ** int(self.tok.text)
            self.i += 1
        return base

    def lin(self) -> LinForm:
        start = self.tok
        p = self.poly()
        try:
            return _mpoly_to_lin(p)
        except ValueError:
            self.error("expression is not linear", tok=start)

    # conditions
    def cond(self) -> Cond:
        out = [self.conj()]
        while self.eat("||"):
            out.append(self.conj())
        return Cond(tuple(out))

    def conj(self) -> tuple:
        out = [self.catom()]
        while self.eat("&&"):
            out.append(self.catom())
        return tuple(out)

    def catom(self):
        if self.at("true"):
            self.i += 1
            return Cmp(LinForm(), ">=", LinForm())
        if self.at("ord") and self.peek().text == "(":
            self.i += 2
            var = self.name("a variable")
            c = LaurentConst()
            if self.at("-") or self.at("+"):
                neg = self.tok.text == "-"
                self.i += 1
                c = self.lterm() if neg else -self.lterm()
            self.expect(")")
            self.expect("==")
            return OrdBind(var, c, self.name("a valuation name"))
        lhs = self.lin()
        if self.eat("%"):
            if self.tok.kind != "num":
                self.error("unexpected token", "a modulus")
            m = int(self.tok.text)
            self.i += 1
            if m <= 0:
                self.error("modulus must be positive")
            self.expect("==")
            return Cong(lhs, m, self.lin())
        if not (self.tok.kind == "op" and self.tok.text in ("==", ">=", "<=", "<", ">")):
            self.error("unexpected token", "a comparison")
        op = self.tok.text
        self.i += 1
        return Cmp(lhs, op, self.lin())


def _mpoly_to_lin(p: MPoly) -> LinForm:
    coeffs, const = {}, Fraction(0)
    for mono, c in p.terms.items():
        if not mono:
            const += c
        elif len(mono) == 1 and mono[0][1] == 1:
            coeffs[mono[0][0]] = c
        else:
            raise ValueError("not linear")
    return LinForm(coeffs, const)


def parse(src: str) -> Script:
    """Parse a script; raises ParseError with line and column."""
    return _Parser(src).script()


def parse_expr(src: str):
    p = _Parser(src)
    e = p.expr()
    if p.tok.kind not in ("eof", "nl"):
        p.error("unexpected token", "end of expression")
    return e


def parse_laurent(src: str) -> LaurentConst:
    """Read back a Laurent constant such as ``2 + t^-1`` (the witness format)."""
    p = _Parser(src)
    a = p.laurent()
    if p.tok.kind not in ("eof", "nl"):
        p.error("unexpected token", "end of Laurent constant")
    return a


# ----------------------------------------------------------------------
# printer


def _fmt_rat(c: Fraction) -> str:
    return str(c)


def _fmt_laurent(a: LaurentConst) -> str:
    s = format_laurent(a)
    return s.replace("(", "").replace(")", "") if " " not in s else s


def _fmt_lin(f: LinForm) -> str:
    return format_linform(f).replace("(", "").replace(")", "")


def _fmt_poly(p: MPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for mono, c in sorted(p.terms.items()):
        body = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
        if not body:
            parts.append(_fmt_rat(c))
        elif c == 1:
            parts.append(body)
        elif c == -1:
            parts.append("-" + body)
        else:
            parts.append(f"{_fmt_rat(c)}*{body}")
    out = parts[0]
    for s in parts[1:]:
        out += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
    return out


def _fmt_center(var: str, c: LaurentConst) -> str:
    return f"{var}; {_fmt_laurent(c)}"


def print_cond(c: Cond) -> str:
    conjs = []
    for conj in c.disjuncts:
        atoms = []
        for a in conj:
            if isinstance(a, OrdBind):
                inner = a.var
                if not a.center.is_zero():
                    s = _fmt_laurent(a.center)
                    inner += f" - ({s})" if " " in s or s.startswith("-") else f" - {s}"
                atoms.append(f"ord({inner}) == {a.name}")
            elif isinstance(a, Cong):
                atoms.append(f"{_fmt_lin(a.lhs)} % {a.mod} == {_fmt_lin(a.rhs)}")
            else:
                atoms.append(f"{_fmt_lin(a.lhs)} {a.op} {_fmt_lin(a.rhs)}")
        conjs.append(" && ".join(atoms))
    return " || ".join(conjs)


_PREC = {"+": 1, "-": 1, "*": 2}


def print_expr(e, prec: int = 0) -> str:
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        s = f"{print_expr(e.left, p)} {e.op} {print_expr(e.right, p + 1)}"
        return f"({s})" if p < prec else s
    if isinstance(e, Neg):
        s = "-" + print_expr(e.expr, 3)
        return f"({s})" if prec > 2 else s
    if isinstance(e, Const):
        s = _fmt_rat(e.value)
        return f"({s})" if e.value < 0 and prec > 2 else s
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, Ball):
        return f"ball({_fmt_center(e.var, e.center)}; {_fmt_lin(e.alpha)})"
    if isinstance(e, Ann):
        tail = f"; {print_cond(e.cond)}" if e.cond is not None else ""
        return f"ann({_fmt_center(e.var, e.center)}{tail})"
    if isinstance(e, AcFix):
        return f"acfix({_fmt_center(e.var, e.center)}; {_fmt_rat(e.u)})"
    if isinstance(e, Phase):
        out = ""
        for k, (a, vs) in enumerate(e.summands):
            s = _fmt_laurent(a)
            neg = k > 0 and s.startswith("-") and " " not in s
            s = s[1:] if neg else s
            if s in ("1", "-1"):
                body = ("-" if s == "-1" else "") + "*".join(vs)
            else:
                body = "*".join([f"({s})" if " " in s else s, *vs])
            out += body if k == 0 else (" - " if neg else " + ") + body
        return f"E({out})"
    if isinstance(e, EChar):
        return f"echar({e.var}; {_fmt_rat(e.w)})"
    if isinstance(e, LPow):
        return f"L^({_fmt_lin(e.lin)})"
    if isinstance(e, Poly):
        return f"poly({_fmt_poly(e.poly)})"
    if isinstance(e, Indicator):
        return f"indicator({print_cond(e.cond)})"
    if isinstance(e, Op):
        return f"({e.verb} " + ", ".join(print_expr(a) for a in e.args) + ")"
    raise TypeError(f"not an expression node: {e!r}")


def print_statement(s) -> str:
    if isinstance(s, Assign):
        return f"{s.name} = {print_expr(s.expr)}"
    head = s.verb + (f" {s.sub}" if s.sub else "")
    return head + " " + ", ".join(print_expr(a) for a in s.args)


def print_script(sc: Script) -> str:
    return "".join(print_statement(s) + "\n" for s in sc.statements)


# ----------------------------------------------------------------------
# evaluation


class EvalError(Exception):
    pass


def _walk(e):
    yield e
    for child in getattr(e, "__dict__", {}).values():
        if isinstance(child, tuple):
            for c in child:
                if isinstance(c, (tuple,)):
                    for cc in c:
                        if hasattr(cc, "__dataclass_fields__"):
                            yield from _walk(cc)
                elif hasattr(c, "__dataclass_fields__"):
                    yield from _walk(c)
        elif hasattr(child, "__dataclass_fields__"):
            yield from _walk(child)


def aliases(e) -> dict[str, str]:
    """Valuation names bound by ``ord(x - c) == name`` anywhere in e."""
    out: dict[str, str] = {}
    for node in _walk(e):
        if isinstance(node, OrdBind):
            th = theta_name(node.var)
            if out.get(node.name, th) != th:
                raise EvalError(f"name {node.name!r} is bound to two different variables")
            out[node.name] = th
    return out


def _params(names, theta_names=()) -> tuple[str, ...]:
    return tuple(sorted(v for v in names if not v.startswith("th_") and v not in theta_names))


class Evaluator:
    """Turn AST expressions into CEF values, with a name environment."""

    def __init__(self, env: dict[str, CEF] | None = None):
        self.env = dict(env or {})

    def eval(self, e) -> CEF:
        amap = aliases(e)
        self._sub = {k: LinForm.var(v) for k, v in amap.items()}
        self._ren = amap
        return self._ev(e)

    def _lin(self, f: LinForm) -> LinForm:
        return f.subs(self._sub) if self._sub else f

    def _basic_pieces(self, conj, extra: dict | None = None) -> tuple[list[VarBinding], BasicSet]:
        sub = dict(self._sub)
        if extra:
            sub.update(extra)
        binds: list[VarBinding] = []
        b = TRUE
        for a in conj:
            if isinstance(a, OrdBind):
                binds.append(VarBinding(a.var, a.center))
            elif isinstance(a, Cong):
                b = b.add_cong((a.lhs - a.rhs).subs(sub), a.mod)
            else:
                d = (a.lhs - a.rhs).subs(sub)
                b = {
                    ">=": lambda: b.add_ineq(d),
                    "<=": lambda: b.add_ineq(-d),
                    ">": lambda: b.add_ineq(d - 1),
                    "<": lambda: b.add_ineq(-d - 1),
                    "==": lambda: b.add_eq(d),
                }[a.op]()
        return binds, b

    def _cond_cef(self, cond: Cond, base: list[VarBinding], extra=None) -> CEF:
        pieces = []
        binds: dict[str, VarBinding] = {b.var: b for b in base}
        for conj in cond.disjuncts:
            bs, b = self._basic_pieces(conj, extra)
            for vb in bs:
                if binds.get(vb.var, vb) != vb:
                    raise EvalError(f"variable {vb.var!r} bound at two different centers")
                binds[vb.var] = vb
            pieces.append(b)
        vars = tuple(sorted(binds))
        names = set()
        for b in pieces:
            for f in b.ineqs:
                names |= f.vars()
            for f, _ in b.congs:
                names |= f.vars()
        thetas = {theta_name(v) for v in vars}
        params = _params(names, thetas)
        terms = [Term(list(binds.values()), piece) for piece in PresburgerSet.of(*pieces).disjoint()]
        return CEF(vars, params, terms).normalized()

    def _ev(self, e) -> CEF:
        if isinstance(e, Const):
            return cef_const(e.value)
        if isinstance(e, Ref):
            if e.name in self._ren:
                raise EvalError(f"{e.name!r} is a valuation name, not a function")
            if e.name not in self.env:
                raise EvalError(f"undefined name {e.name!r}")
            return self.env[e.name]
        if isinstance(e, BinOp):
            a, b = self._ev(e.left), self._ev(e.right)
            if e.op == "+":
                return cef_add(a, b)
            if e.op == "-":
                return cef_add(a, cef_scale(b, -1))
            return cef_mul(a, b)
        if isinstance(e, Neg):
            return cef_scale(self._ev(e.expr), -1)
        if isinstance(e, Ball):
            return cef_ball(e.var, e.center, self._lin(e.alpha))
        if isinstance(e, Ann):
            vb = VarBinding(e.var, e.center)
            if e.cond is None:
                return CEF((e.var,), (), [Term([vb])])
            return self._cond_cef(e.cond, [vb], {"th": LinForm.var(vb.theta)})
        if isinstance(e, AcFix):
            return cef_acfix(e.var, e.center, e.u)
        if isinstance(e, Phase):
            out = cef_const(1)
            for a, vs in e.summands:
                out = cef_mul(out, cef_phase(vs[0], a, vs[1] if len(vs) > 1 else None))
            return out
        if isinstance(e, EChar):
            return cef_echar(e.var, e.w)
        if isinstance(e, LPow):
            f = self._lin(e.lin)
            return cef_const(QuasiPoly.lpow(f), _params(f.vars()))
        if isinstance(e, Poly):
            p = e.poly.subs(self._sub) if self._sub else e.poly
            return cef_const(QuasiPoly.from_mpoly(p), _params(p.vars()))
        if isinstance(e, Indicator):
            return self._cond_cef(e.cond, [])
        if isinstance(e, Op):
            from .fourier import convolve, fourier
            from .integrate import integrate_all

            args = [Evaluator(self.env).eval(a) for a in e.args]
            if e.verb == "fourier":
                return fourier(args[0])
            if e.verb == "convolve":
                return convolve(*args)
            if e.verb == "reflect":
                return cef_reflect(args[0])
            res = integrate_all(args[0])
            if not res.integrable:
                from .errors import NotIntegrable

                raise NotIntegrable(f"integrand is not integrable (witness {res.witness})")
            v = res.value
            if isinstance(v, CEF):
                return v.with_primes(res.bad_primes)
            return cef_const(v).with_primes(res.bad_primes)
        raise EvalError(f"cannot evaluate {e!r}")
