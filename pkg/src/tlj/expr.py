"""
A small expression language over TL elements, scalars in Q(q) and t-polynomials.

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := postfix ("^" unary)?
    postfix := atom ("@" INT)*
    atom    := INT | "d" | "q" | "t" | e_INT | id_INT | "jw(" INT ")" | FUNC "(" args ")" | "(" expr ")"

``FUNC`` is one of tr, atr, inner, adj. ``x@m`` fixes the strand count of ``x``; a scalar ascribed a size becomes
that multiple of the identity. ``e_i`` takes its size from context and defaults to i + 1 strands.
"""

from __future__ import annotations

import dataclasses
import re
from typing import Union

from .annular import annular_trace
from .diagram import TLElement, adjoint, inner, markov_trace, multiply
from .errors import ExprEvalError, ExprTypeError, ParseError
from .jones_wenzl import jones_wenzl
from .scalar import DELTA, Q, T, NumericParams, Scalar, TPoly, evaluate as evaluate_numeric

Span = tuple[int, int]
FUNCTIONS = {"tr": 1, "atr": 1, "inner": 2, "adj": 1}


@dataclasses.dataclass(frozen=True)
class Num:
    value: int
    span: Span = dataclasses.field(default=(0, 0), compare=False)


@dataclasses.dataclass(frozen=True)
class Sym:
    name: str
    span: Span = dataclasses.field(default=(0, 0), compare=False)


@dataclasses.dataclass(frozen=True)
class Gen:
    index: int
    span: Span = dataclasses.field(default=(0, 0), compare=False)


@dataclasses.dataclass(frozen=True)
class Ident:
    size: int
    span: Span = dataclasses.field(default=(0, 0), compare=False)


@dataclasses.dataclass(frozen=True)
class JW:
    size: int
    span: Span = dataclasses.field(default=(0, 0), compare=False)


@dataclasses.dataclass(frozen=True)
class Neg:
    operand: "Expr"
    span: Span = dataclasses.field(default=(0, 0), compare=False)


@dataclasses.dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = dataclasses.field(default=(0, 0), compare=False)


@dataclasses.dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"
    span: Span = dataclasses.field(default=(0, 0), compare=False)


@dataclasses.dataclass(frozen=True)
class Ascribe:
    operand: "Expr"
    size: int
    span: Span = dataclasses.field(default=(0, 0), compare=False)


@dataclasses.dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]
    span: Span = dataclasses.field(default=(0, 0), compare=False)


Expr = Union[Num, Sym, Gen, Ident, JW, Neg, BinOp, Pow, Ascribe, Call]

# ------------------------------------------------------------------------------------------------------- lexing

_TOKEN = re.compile(
    r"\s*(?:(?P<gen>e_\d+)|(?P<ident>id_\d+)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),@]))"
)


@dataclasses.dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", (bad, bad + 1))
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind), m.end()))
        pos = m.end()
    tokens.append(Token("eof", "", len(text), len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def accept(self, text: str) -> Token | None:
        if self.tok.kind == "op" and self.tok.text == text:
            return self.take()
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", (self.tok.start, self.tok.end))
        return t

    def integer(self) -> tuple[int, Token]:
        t = self.tok
        if t.kind != "num":
            raise ParseError(f"expected an integer, found {t.text or 'end of input'!r}", (t.start, t.end))
        self.take()
        return int(t.text), t

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self.tok.text!r}", (self.tok.start, self.tok.end))
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            right = self.term()
            node = BinOp(op, node, right, (node.span[0], right.span[1]))
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.take().text
            right = self.unary()
            node = BinOp(op, node, right, (node.span[0], right.span[1]))
        return node

    def unary(self) -> Expr:
        minus = self.accept("-")
        if minus:
            operand = self.unary()
            return Neg(operand, (minus.start, operand.span[1]))
        return self.power()

    def power(self) -> Expr:
        base = self.postfix()
        if self.accept("^"):
            exponent = self.unary()
            return Pow(base, exponent, (base.span[0], exponent.span[1]))
        return base

    def postfix(self) -> Expr:
        node = self.atom()
        while self.accept("@"):
            size, t = self.integer()
            node = Ascribe(node, size, (node.span[0], t.end))
        return node

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.take()
            return Num(int(t.text), (t.start, t.end))
        if t.kind == "gen":
            self.take()
            return Gen(int(t.text[2:]), (t.start, t.end))
        if t.kind == "ident":
            self.take()
            return Ident(int(t.text[3:]), (t.start, t.end))
        if t.kind == "name":
            self.take()
            if t.text in ("d", "q", "t"):
                return Sym(t.text, (t.start, t.end))
            if t.text == "jw":
                self.expect("(")
                size, _ = self.integer()
                close = self.expect(")")
                return JW(size, (t.start, close.end))
            if t.text in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                close = self.expect(")")
                if len(args) != FUNCTIONS[t.text]:
                    raise ParseError(f"{t.text} takes {FUNCTIONS[t.text]} argument(s), got {len(args)}",
                                     (t.start, close.end))
                return Call(t.text, tuple(args), (t.start, close.end))
            raise ParseError(f"unknown name {t.text!r}", (t.start, t.end))
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", (t.start, t.end))


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# ------------------------------------------------------------------------------------------------------- printing

_PREC = {Neg: 3, Pow: 4, Ascribe: 5}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return 1 if node.op in "+-" else 2
    return _PREC.get(type(node), 6)


def _wrap(node: Expr, parens: bool) -> str:
    s = to_source(node)
    return f"({s})" if parens else s


def to_source(node: Expr) -> str:
    """Source text that parses back to an equal tree."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Gen):
        return f"e_{node.index}"
    if isinstance(node, Ident):
        return f"id_{node.size}"
    if isinstance(node, JW):
        return f"jw({node.size})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _prec(node.operand) < 3)
    if isinstance(node, BinOp):
        p = _prec(node)
        return f"{_wrap(node.left, _prec(node.left) < p)} {node.op} {_wrap(node.right, _prec(node.right) <= p)}"
    if isinstance(node, Pow):
        return f"{_wrap(node.base, _prec(node.base) <= 4)}^{_wrap(node.exponent, _prec(node.exponent) < 3)}"
    if isinstance(node, Ascribe):
        return f"{_wrap(node.operand, _prec(node.operand) < 5)}@{node.size}"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_source(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


# ------------------------------------------------------------------------------------------------------- typing


@dataclasses.dataclass(frozen=True)
class Ty:
    kind: str  # "scalar", "tpoly" or "tl"
    size: int | None = None
    flexible: bool = False

    def __str__(self) -> str:
        if self.kind != "tl":
            return self.kind
        return f"TL_{self.size}{'+' if self.flexible else ''}"


SCALAR = Ty("scalar")
TPOLY = Ty("tpoly")


def _unify(a: Ty, b: Ty, span: Span) -> Ty:
    if a.flexible and b.flexible:
        return Ty("tl", max(a.size, b.size), True)
    if a.flexible or b.flexible:
        fixed, flex = (b, a) if a.flexible else (a, b)
        if fixed.size < flex.size:
            raise ExprTypeError(f"size mismatch: {fixed} cannot hold an element needing {flex.size} strands", span)
        return fixed
    if a.size != b.size:
        raise ExprTypeError(f"size mismatch: TL_{a.size} and TL_{b.size}", span)
    return a


def _numeric_join(a: Ty, b: Ty) -> Ty:
    return TPOLY if TPOLY in (a, b) else SCALAR


def _exponent(node: Expr) -> int | None:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg) and isinstance(node.operand, Num):
        return -node.operand.value
    return None


class _Checker:
    def __init__(self):
        self.types: dict[int, Ty] = {}

    def infer(self, node: Expr) -> Ty:
        ty = self._infer(node)
        self.types[id(node)] = ty
        return ty

    def _infer(self, node: Expr) -> Ty:
        if isinstance(node, Num):
            return SCALAR
        if isinstance(node, Sym):
            return TPOLY if node.name == "t" else SCALAR
        if isinstance(node, Gen):
            if node.index < 1:
                raise ExprTypeError("generators are numbered from e_1", node.span)
            return Ty("tl", node.index + 1, True)
        if isinstance(node, (Ident, JW)):
            return Ty("tl", node.size)
        if isinstance(node, Neg):
            return self.infer(node.operand)
        if isinstance(node, Ascribe):
            inner_ty = self.infer(node.operand)
            if inner_ty == TPOLY:
                raise ExprTypeError("a t-polynomial cannot be read as a TL element", node.span)
            if inner_ty.kind == "tl":
                _unify(inner_ty, Ty("tl", node.size), node.span)
            return Ty("tl", node.size)
        if isinstance(node, Pow):
            base = self.infer(node.base)
            self.infer(node.exponent)
            k = _exponent(node.exponent)
            if k is None:
                raise ExprTypeError("exponents must be integer literals", node.exponent.span)
            if k < 0 and base.kind != "scalar":
                raise ExprTypeError(f"negative power of a {base.kind} value", node.span)
            return base
        if isinstance(node, BinOp):
            left, right = self.infer(node.left), self.infer(node.right)
            if node.op == "/":
                if right != SCALAR:
                    raise ExprTypeError(f"cannot divide by a {right} value", node.right.span)
                return left
            if left.kind == "tl" and right.kind == "tl":
                return _unify(left, right, node.span)
            if "tl" in (left.kind, right.kind):
                other = right if left.kind == "tl" else left
                if other == TPOLY:
                    raise ExprTypeError("TL elements have coefficients in Q(q); t cannot multiply them", node.span)
                return left if left.kind == "tl" else right
            return _numeric_join(left, right)
        if isinstance(node, Call):
            args = [self.infer(a) for a in node.args]
            if node.func == "adj":
                return args[0]
            for a, ty in zip(node.args, args):
                if ty.kind != "tl":
                    raise ExprTypeError(f"{node.func} expects a TL element, got {ty}", a.span)
            if node.func == "inner":
                _unify(args[0], args[1], node.span)
                return SCALAR
            if node.func == "atr":
                if args[0].size % 2:
                    raise ExprTypeError(f"atr needs an even strand count, got {args[0].size}", node.args[0].span)
                return TPOLY
            return SCALAR
        raise TypeError(f"not an expression node: {node!r}")


def check(node: Expr) -> Ty:
    """Type of an expression; raises ``ExprTypeError`` with a source span."""
    return _Checker().infer(node)


# ------------------------------------------------------------------------------------------------------- evaluation

Value = Union[Scalar, TPoly, TLElement]


class _Evaluator:
    def __init__(self, checker: _Checker):
        self.checker = checker

    def ty(self, node: Expr) -> Ty:
        return self.checker.types[id(node)]

    def run(self, node: Expr, size: int | None) -> Value:
        if isinstance(node, Num):
            return Scalar(node.value)
        if isinstance(node, Sym):
            return {"d": DELTA, "q": Q, "t": T}[node.name]
        if isinstance(node, Gen):
            return TLElement.generator(node.index, size)
        if isinstance(node, Ident):
            return TLElement.identity(node.size)
        if isinstance(node, JW):
            return jones_wenzl(node.size)
        if isinstance(node, Neg):
            return -self.run(node.operand, size)
        if isinstance(node, Ascribe):
            value = self.run(node.operand, node.size)
            if isinstance(value, Scalar):
                return TLElement.identity(node.size).scale(value)
            return value
        if isinstance(node, Pow):
            return self.power(node, size)
        if isinstance(node, BinOp):
            return self.binop(node, size)
        if isinstance(node, Call):
            return self.call(node)
        raise TypeError(f"not an expression node: {node!r}")

    def child(self, node: Expr, size: int | None) -> Value:
        return self.run(node, size if self.ty(node).kind == "tl" else None)

    def power(self, node: Pow, size: int | None) -> Value:
        base = self.child(node.base, size)
        k = _exponent(node.exponent)
        if isinstance(base, TLElement):
            out = TLElement.identity(base.size)
            for _ in range(k):
                out = multiply(out, base)
            return out
        if isinstance(base, Scalar):
            if k < 0 and base.is_zero():
                raise ExprEvalError("zero raised to a negative power", node.span)
            return base ** k
        return base ** k

    def binop(self, node: BinOp, size: int | None) -> Value:
        left = self.child(node.left, size)
        right = self.child(node.right, size)
        if node.op == "/":
            if right.is_zero():
                raise ExprEvalError("division by zero", node.right.span)
            inv = right.inverse()
            return left.scale(inv) if isinstance(left, TLElement) else left * inv
        if node.op == "*":
            if isinstance(left, TLElement) and isinstance(right, TLElement):
                return multiply(left, right)
            if isinstance(left, TLElement):
                return left.scale(right)
            if isinstance(right, TLElement):
                return right.scale(left)
            return _numeric(left) * _numeric(right) if TPoly in (type(left), type(right)) else left * right
        if isinstance(left, TLElement) != isinstance(right, TLElement):
            tl = left if isinstance(left, TLElement) else right
            if isinstance(left, Scalar):
                left = TLElement.identity(tl.size).scale(left)
            if isinstance(right, Scalar):
                right = TLElement.identity(tl.size).scale(right)
        if TPoly in (type(left), type(right)):
            left, right = _numeric(left), _numeric(right)
        return left + right if node.op == "+" else left - right

    def call(self, node: Call) -> Value:
        values = [self.run(a, self.ty(a).size if self.ty(a).kind == "tl" else None) for a in node.args]
        if node.func == "inner":
            size = _unify(self.ty(node.args[0]), self.ty(node.args[1]), node.span).size
            values = [self.run(a, size) for a in node.args]
            return inner(values[0], values[1])
        (x,) = values
        if node.func == "tr":
            return markov_trace(x)
        if node.func == "atr":
            return annular_trace(x)
        if isinstance(x, TLElement):
            return adjoint(x)
        return x


def _numeric(value: Value) -> TPoly:
    return value if isinstance(value, TPoly) else TPoly([value])


def evaluate(node: Expr | str, params: NumericParams | None = None):
    """
    Exact value of an expression: a ``Scalar``, a ``TPoly`` or a ``TLElement``.

    With ``params`` scalars and t-polynomials are evaluated to floats and TL elements to ``{diagram: float}``.
    """
    if isinstance(node, str):
        node = parse(node)
    checker = _Checker()
    ty = checker.infer(node)
    value = _Evaluator(checker).run(node, ty.size if ty.kind == "tl" else None)
    if params is None:
        return value
    if isinstance(value, TLElement):
        return {d: evaluate_numeric(c, params) for d, c in value.terms.items()}
    return evaluate_numeric(value, params)


def format_value(value) -> str:
    if isinstance(value, TLElement):
        if value.is_zero():
            return "0"
        return str(value)
    if isinstance(value, dict):
        if not value:
            return "0"
        return " + ".join(f"{c:.12g}*{d}" for d, c in sorted(value.items()))
    if isinstance(value, float):
        return repr(value)
    return str(value)
