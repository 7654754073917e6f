"""Expression language: tokenizer, recursive-descent parser, canonical
printer and an evaluator into the package's value types.

Grammar (whitespace-insensitive)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" exponent)?
    atom   := INT | "(" expr ")" | "x" | "e(" INT ")" | "i" | "D"
            | VAR "'"* | VAR "^(" INT ")" | "E(" expr ")" | "O(" expr ")" | NAME
    exponent := ["-"] INT | "(" ["-"] INT ["/" INT] ")"

VAR is one of Y, Z, V.  Directly after a VAR, ``^(k)`` is the k-th
derivative; ``^k`` without parentheses is a power.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .diffpoly import DiffPoly
from .errors import AdakitError
from .hfield import ComplexElem, ComplexField, FieldElem, Mono
from .linop import LinOp
from .univexp import GrElem, LambdaBasis, LambdaVec

VARS = ("Y", "Z", "V")
KEYWORDS = {"x", "e", "i", "D", "E", "O"} | set(VARS)


class DSLError(AdakitError, ValueError):
    """Syntax or realm error with a source span (start, end) into ``text``."""

    def __init__(self, message: str, span: tuple[int, int] | None = None, text: str | None = None):
        self.message = message
        self.span = span
        self.text = text
        super().__init__(self._render())

    def _render(self) -> str:
        if self.span is None or self.text is None:
            return self.message
        a, b = self.span
        caret = " " * a + "^" * max(1, b - a)
        return f"{self.message} at {a}..{b}\n  {self.text}\n  {caret}"


# ---------------------------------------------------------------- AST


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    value: int
    span: tuple | None = _span()


@dataclass(frozen=True)
class Gen:
    level: int
    span: tuple | None = _span()


@dataclass(frozen=True)
class Imag:
    span: tuple | None = _span()


@dataclass(frozen=True)
class Dop:
    span: tuple | None = _span()


@dataclass(frozen=True)
class Var:
    name: str
    order: int = 0
    span: tuple | None = _span()


@dataclass(frozen=True)
class Name:
    name: str
    span: tuple | None = _span()


@dataclass(frozen=True)
class Exp:
    arg: object
    span: tuple | None = _span()


@dataclass(frozen=True)
class BigO:
    arg: object
    span: tuple | None = _span()


@dataclass(frozen=True)
class Neg:
    arg: object
    span: tuple | None = _span()


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object
    span: tuple | None = _span()


@dataclass(frozen=True)
class Pow:
    base: object
    exp: Fraction
    span: tuple | None = _span()


# ---------------------------------------------------------------- tokenizer

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass(frozen=True)
class Tok:
    kind: str  # int, ident, sym, end
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Tok]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            out.append(Tok("int", m.group(1), m.start(1), m.end(1)))
        elif m.group(2) is not None:
            out.append(Tok("ident", m.group(2), m.start(2), m.end(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()'":
                raise DSLError(f"unexpected character {ch!r}", (m.start(3), m.end(3)), text)
            out.append(Tok("sym", ch, m.start(3), m.end(3)))
        pos = m.end()
    out.append(Tok("end", "", n, n))
    return out


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Tok | None = None, span=None):
        tok = tok or self.peek()
        raise DSLError(msg, span or (tok.start, max(tok.end, tok.start + 1)), self.text)

    def expect(self, sym: str) -> Tok:
        t = self.peek()
        if t.kind != "sym" or t.text != sym:
            self.error(f"expected {sym!r}")
        return self.take()

    def is_sym(self, sym: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == "sym" and t.text == sym

    def parse(self):
        if self.peek().kind == "end":
            self.error("empty expression")
        node = self.expr()
        if self.peek().kind != "end":
            self.error("unexpected input after expression")
        return node

    def expr(self):
        start = self.peek().start
        node = self.term()
        while self.is_sym("+") or self.is_sym("-"):
            op = self.take().text
            right = self.term()
            node = Bin(op, node, right, (start, right.span[1]))
        return node

    def term(self):
        start = self.peek().start
        node = self.unary()
        while self.is_sym("*") or self.is_sym("/"):
            op = self.take().text
            right = self.unary()
            node = Bin(op, node, right, (start, right.span[1]))
        return node

    def unary(self):
        if self.is_sym("-"):
            t = self.take()
            arg = self.unary()
            return Neg(arg, (t.start, arg.span[1]))
        return self.power()

    def power(self):
        base = self.atom()
        if self.is_sym("^"):
            self.take()
            q, end = self.exponent()
            return Pow(base, q, (base.span[0], end))
        return base

    def _int(self) -> Tok:
        t = self.peek()
        if t.kind != "int":
            self.error("expected an integer")
        return self.take()

    def exponent(self) -> tuple[Fraction, int]:
        if self.is_sym("("):
            open_ = self.take()
            sign = -1 if self.is_sym("-") and self.take() else 1
            num = self._int()
            den = 1
            if self.is_sym("/"):
                self.take()
                dt = self._int()
                den = int(dt.text)
                if den == 0:
                    self.error("zero denominator in exponent", span=(open_.start, dt.end))
            close = self.expect(")")
            return Fraction(sign * int(num.text), den), close.end
        sign = -1 if self.is_sym("-") and self.take() else 1
        num = self._int()
        return Fraction(sign * int(num.text)), num.end

    def atom(self):
        t = self.peek()
        if t.kind == "int":
            self.take()
            return Num(int(t.text), (t.start, t.end))
        if t.kind == "sym" and t.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind != "ident":
            self.error("expected an operand")
        self.take()
        name = t.text
        if name == "x":
            return Gen(0, (t.start, t.end))
        if name == "i":
            return Imag((t.start, t.end))
        if name == "D":
            return Dop((t.start, t.end))
        if name == "e":
            self.expect("(")
            lvl = self._int()
            close = self.expect(")")
            return Gen(int(lvl.text), (t.start, close.end))
        if name in ("E", "O"):
            self.expect("(")
            arg = self.expr()
            close = self.expect(")")
            cls = Exp if name == "E" else BigO
            return cls(arg, (t.start, close.end))
        if name in VARS:
            order, end = 0, t.end
            while self.is_sym("'"):
                end = self.take().end
                order += 1
            if order == 0 and self.is_sym("^") and self.is_sym("(", 1) and self.peek(2).kind == "int" and self.is_sym(")", 3):
                self.take()
                self.take()
                order = int(self.take().text)
                end = self.take().end
            return Var(name, order, (t.start, end))
        return Name(name, (t.start, t.end))


def parse(text: str):
    return _Parser(text).parse()


# ---------------------------------------------------------------- printer

_PREC_ATOM = 5


def _prec(node) -> int:
    if isinstance(node, Bin):
        return 1 if node.op in "+-" else 2
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return _PREC_ATOM


def _wrap(node, need: int) -> str:
    s = to_text(node)
    return f"({s})" if _prec(node) < need else s


def _exp_text(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"({q.numerator}/{q.denominator})"


def to_text(node) -> str:
    """Canonical text; ``parse(to_text(a)) == a``."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Gen):
        return "x" if node.level == 0 else f"e({node.level})"
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, Dop):
        return "D"
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Var):
        if node.order == 0:
            return node.name
        if node.order <= 2:
            return node.name + "'" * node.order
        return f"{node.name}^({node.order})"
    if isinstance(node, Exp):
        return f"E({to_text(node.arg)})"
    if isinstance(node, BigO):
        return f"O({to_text(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, 3)
    if isinstance(node, Pow):
        return f"{_wrap(node.base, _PREC_ATOM)}^{_exp_text(node.exp)}"
    if isinstance(node, Bin):
        p = _prec(node)
        sep = f" {node.op} " if p == 1 else node.op
        return _wrap(node.left, p) + sep + _wrap(node.right, p + 1)
    raise TypeError(f"not an AST node: {node!r}")


def canonical(text: str) -> str:
    return to_text(parse(text))


# ---------------------------------------------------------------- evaluation


@dataclass
class Context:
    """Where expressions are evaluated: a real field, and optionally a Lambda basis."""

    field: object
    basis: LambdaBasis | None = None

    @property
    def cfield(self) -> ComplexField:
        return self.basis.field if self.basis is not None else ComplexField(self.field)


def _walk(node):
    yield node
    for attr in ("arg", "left", "right", "base"):
        child = getattr(node, attr, None)
        if child is not None and not isinstance(child, Fraction):
            yield from _walk(child)


class _Evaluator:
    def __init__(self, ctx: Context, text: str, complex_: bool):
        self.ctx = ctx
        self.text = text
        self.F = ctx.field
        self.ring = ctx.cfield if complex_ else ctx.field

    def fail(self, msg, node):
        raise DSLError(msg, node.span, self.text)

    def ev(self, node):
        try:
            return self._ev(node)
        except DSLError:
            raise
        except (TypeError, ValueError, ZeroDivisionError, AdakitError) as exc:
            self.fail(str(exc) or type(exc).__name__, node)

    def _ev(self, node):
        if isinstance(node, Num):
            return Fraction(node.value)
        if isinstance(node, Gen):
            if node.level >= self.F.L:
                self.fail(f"level {node.level} needs at least {node.level + 1} levels", node)
            return self.ring.coerce(self.F.gen(node.level))
        if isinstance(node, Imag):
            return self.ring.i
        if isinstance(node, Var):
            return DiffPoly.gen(self.ring, node.order, node.name)
        if isinstance(node, Dop):
            return LinOp.D(self.ring)
        if isinstance(node, Name):
            self.fail(f"name {node.name!r} is only meaningful inside E(...)", node)
        if isinstance(node, Exp):
            if self.ctx.basis is None:
                self.fail("E(...) needs a Lambda basis in the session", node)
            return self.ctx.basis.e(self._lam(node.arg))
        if isinstance(node, BigO):
            m = self._monomial(self.ev(node.arg), node)
            return self.ring.coerce(self.F.big_o(m))
        if isinstance(node, Neg):
            return -self.ev(node.arg)
        if isinstance(node, Pow):
            return self._pow(node)
        if isinstance(node, Bin):
            a, b = self.ev(node.left), self.ev(node.right)
            return self._bin(node, a, b)
        self.fail("unknown node", node)

    def _bin(self, node, a, b):
        op = node.op
        if isinstance(a, (LinOp, DiffPoly)) and isinstance(b, (LinOp, DiffPoly)) and type(a) is not type(b):
            self.fail("operators and differential polynomials do not mix", node)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            if isinstance(a, Fraction) and not isinstance(b, Fraction):
                a, b = b, a
                if isinstance(a, LinOp):
                    return a.scale(self.ring.coerce(b))
            return a * b
        if isinstance(b, Fraction):
            if b == 0:
                self.fail("division by zero", node)
            return a * (1 / b) if not isinstance(a, Fraction) else a / b
        if isinstance(b, (DiffPoly, LinOp, GrElem)):
            self.fail("division by a non-field element", node)
        if b.is_zero():
            self.fail("division by zero", node)
        if isinstance(a, (DiffPoly, LinOp)):
            return a.scale(b.inverse())
        if isinstance(a, GrElem):
            return a * b.inverse()
        if isinstance(a, Fraction):
            return self.ring.const(a) / b
        return a / b

    def _monomial(self, val, node) -> Mono:
        if isinstance(val, Fraction):
            if val == 1:
                return Mono.one(self.F.L)
            self.fail("expected a monomial", node)
        if isinstance(val, ComplexElem):
            if not val.im.is_zero():
                self.fail("expected a real monomial", node)
            val = val.re
        if not isinstance(val, FieldElem) or val.is_zero() or not getattr(val, "is_exact", True):
            self.fail("expected a monomial", node)
        m, c = val.dominant_term()
        if c != 1 or not (val - self.F.mono(m)).is_zero():
            self.fail("expected a monomial with coefficient 1", node)
        return m

    def _pow(self, node):
        base = self.ev(node.base)
        q = node.exp
        if q.denominator == 1:
            n = int(q)
            if isinstance(base, Fraction):
                if base == 0 and n < 0:
                    self.fail("division by zero", node)
                return base**n
            if n < 0 and isinstance(base, (DiffPoly, LinOp)):
                self.fail("negative power of a non-field element", node)
            return base**n
        m = self._monomial(base, node.base)
        return self.ring.coerce(self.F.mono(m**q))

    def _rat(self, node) -> Fraction:
        if isinstance(node, Num):
            return Fraction(node.value)
        if isinstance(node, Neg):
            return -self._rat(node.arg)
        if isinstance(node, Bin) and node.op in "*/+-":
            a, b = self._rat(node.left), self._rat(node.right)
            if node.op == "/":
                if b == 0:
                    self.fail("division by zero", node)
                return a / b
            return {"*": a * b, "+": a + b, "-": a - b}[node.op]
        if isinstance(node, Pow) and node.exp.denominator == 1:
            return self._rat(node.base) ** int(node.exp)
        self.fail("expected a rational number", node)

    def _lam(self, node) -> LambdaVec:
        B = self.ctx.basis
        if isinstance(node, Name):
            if node.name not in B.names:
                self.fail(f"unknown Lambda name {node.name!r}", node)
            return B.unit(B.names.index(node.name))
        if isinstance(node, Num) and node.value == 0:
            return B.zero()
        if isinstance(node, Neg):
            return -self._lam(node.arg)
        if isinstance(node, Bin):
            if node.op in "+-":
                a, b = self._lam(node.left), self._lam(node.right)
                return a + b if node.op == "+" else a - b
            if node.op == "*":
                try:
                    return self._lam(node.right).scale(self._rat(node.left))
                except DSLError:
                    return self._lam(node.left).scale(self._rat(node.right))
            if node.op == "/":
                d = self._rat(node.right)
                if d == 0:
                    self.fail("division by zero", node)
                return self._lam(node.left).scale(1 / d)
        self.fail("expected a rational combination of Lambda names", node)


def evaluate(ast_or_text, ctx: Context, text: str | None = None):
    """Evaluate to Fraction-free values: field elements, DiffPoly, LinOp or GrElem."""
    if isinstance(ast_or_text, str):
        text = ast_or_text
        node = parse(text)
    else:
        node = ast_or_text
        text = text if text is not None else to_text(node)
    complex_ = any(isinstance(n, (Imag, Exp)) for n in _walk(node))
    ev = _Evaluator(ctx, text, complex_)
    val = ev.ev(node)
    if isinstance(val, Fraction):
        val = ev.ring.const(val)
    return val


def _kind(val) -> str:
    if isinstance(val, DiffPoly):
        return "diffpoly"
    if isinstance(val, LinOp):
        return "operator"
    if isinstance(val, GrElem):
        return "group-ring"
    return "field"


def _expect(text: str, ctx: Context, kinds: tuple, what: str):
    val = evaluate(text, ctx)
    if _kind(val) not in kinds:
        raise DSLError(f"expected {what}, got a {_kind(val)} expression", (0, len(text)), text)
    return val


def parse_field(text: str, ctx: Context):
    return _expect(text, ctx, ("field",), "a field element")


def parse_diffpoly(text: str, ctx: Context) -> DiffPoly:
    val = evaluate(text, ctx)
    if _kind(val) == "field":
        return DiffPoly.const(val.field if hasattr(val, "field") else ctx.field, val)
    if _kind(val) != "diffpoly":
        raise DSLError(f"expected a differential polynomial, got a {_kind(val)} expression", (0, len(text)), text)
    return val


def parse_op(text: str, ctx: Context) -> LinOp:
    val = evaluate(text, ctx)
    if _kind(val) == "field":
        return LinOp.const(val.field, val)
    if _kind(val) != "operator":
        raise DSLError(f"expected an operator, got a {_kind(val)} expression", (0, len(text)), text)
    return val


def parse_gr(text: str, ctx: Context) -> GrElem:
    val = evaluate(text, ctx)
    if _kind(val) == "field":
        if ctx.basis is None:
            raise DSLError("group-ring values need a Lambda basis", (0, len(text)), text)
        return ctx.basis.const(val)
    if _kind(val) != "group-ring":
        raise DSLError(f"expected a group-ring element, got a {_kind(val)} expression", (0, len(text)), text)
    return val


def parse_mono(text: str, ctx: Context) -> Mono:
    node = parse(text)
    ev = _Evaluator(ctx, text, False)
    return ev._monomial(ev.ev(node), node)


def show(val) -> str:
    """Canonical text of a value."""
    if isinstance(val, Fraction):
        return str(val)
    return canonical(val.to_dsl())


def parse_lambda(text: str, ctx: Context) -> LambdaVec:
    """A rational combination of Lambda names, e.g. ``-2*l1 + l2``."""
    if ctx.basis is None:
        raise DSLError("no Lambda basis in the session", (0, len(text)), text)
    return _Evaluator(ctx, text, True)._lam(parse(text))
