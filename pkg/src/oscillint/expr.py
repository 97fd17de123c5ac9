"""Scalar functions of time, supplied as text.

Every coefficient entering the solvers (system entries, equation
coefficients, test functions) is parsed from a small fixed grammar over
the single variable ``t``:

    expr   := term (("+"|"-") term)*
    term   := unary (("*"|"/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?          (right-associative)
    atom   := NUMBER | "t" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := sin|cos|tan|exp|log|sqrt|abs|sinh|cosh

The caret binds tighter than unary minus, so ``-t^2`` is ``-(t^2)``.
There is no constant folding anywhere: what you parse is what you get,
and ``parse(tokenize(print_expr(e)))`` reproduces ``e`` node for node.

Evaluation raises :class:`DomainError` instead of returning NaN or inf
for log/sqrt of a negative argument, division by zero, and overflow.
Differentiation is symbolic; the only unsupported shape is a power with
``t`` in both base and exponent.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "sinh", "cosh")


class ExprError(ValueError):
    """Base class for everything this module can complain about."""


class LexError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class DomainError(ExprError):
    """Evaluation left the real domain (log/sqrt of negative, x/0, overflow)."""

    def __init__(self, message: str, t: float, expr: "Expr"):
        super().__init__(f"{message} at t={t!r} in '{print_expr(expr)}'")
        self.t = t
        self.expr = expr


class DifferentiationError(ExprError):
    pass


# ---------------------------------------------------------------------------
# AST


class Expr:
    """Base node. Nodes are frozen dataclasses; == is structural equality."""

    __slots__ = ()

    def __call__(self, t: float) -> float:
        return eval_expr(self, t)


@dataclass(frozen=True)
class Constant(Expr):
    value: float


@dataclass(frozen=True)
class TimeVar(Expr):
    pass


@dataclass(frozen=True)
class Negate(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ExprError(f"unknown function '{self.name}'")


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class Token:
    kind: str  # number, identifier, time-variable, plus, minus, star, slash, caret, lparen, rparen
    lexeme: str
    position: int


_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_PUNCT = {
    "+": "plus",
    "-": "minus",
    "*": "star",
    "/": "slash",
    "^": "caret",
    "(": "lparen",
    ")": "rparen",
}


def tokenize(source: str) -> list[Token]:
    """Split source text into tokens, rejecting anything outside the grammar."""
    tokens: list[Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, i))
            i += 1
            continue
        m = _NUMBER_RE.match(source, i)
        if m:
            tokens.append(Token("number", m.group(), i))
            i = m.end()
            continue
        m = _IDENT_RE.match(source, i)
        if m:
            name = m.group()
            if name == "t":
                tokens.append(Token("time-variable", name, i))
            elif name in FUNCTIONS:
                tokens.append(Token("identifier", name, i))
            else:
                raise LexError(f"unknown identifier '{name}'", i)
            i = m.end()
            continue
        raise LexError(f"unexpected character '{ch}'", i)
    return tokens


# ---------------------------------------------------------------------------
# Parser (recursive descent, one token of lookahead)


class _Parser:
    def __init__(self, tokens: list[Token], source_len: int):
        self.tokens = tokens
        self.pos = 0
        self.source_len = source_len

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.source_len)
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {kind}, got end of input", self.source_len)
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, got '{tok.lexeme}'", tok.position)
        return self.take()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while (tok := self.peek()) is not None and tok.kind in ("plus", "minus"):
            self.take()
            rhs = self.parse_term()
            node = Add(node, rhs) if tok.kind == "plus" else Sub(node, rhs)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while (tok := self.peek()) is not None and tok.kind in ("star", "slash"):
            self.take()
            rhs = self.parse_unary()
            node = Mul(node, rhs) if tok.kind == "star" else Div(node, rhs)
        return node

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok.kind == "minus":
            self.take()
            return Negate(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        tok = self.peek()
        if tok is not None and tok.kind == "caret":
            self.take()
            # right-associative; exponent may carry its own sign
            return Pow(base, self.parse_unary())
        return base

    def parse_atom(self) -> Expr:
        tok = self.take()
        if tok.kind == "number":
            return Constant(float(tok.lexeme))
        if tok.kind == "time-variable":
            return TimeVar()
        if tok.kind == "identifier":
            self.expect("lparen")
            arg = self.parse_expr()
            self.expect("rparen")
            return Call(tok.lexeme, arg)
        if tok.kind == "lparen":
            inner = self.parse_expr()
            self.expect("rparen")
            return inner
        raise ParseError(f"unexpected token '{tok.lexeme}'", tok.position)


def parse(tokens: list[Token], source_len: int | None = None) -> Expr:
    """Build an AST from a token list."""
    if source_len is None:
        source_len = tokens[-1].position + len(tokens[-1].lexeme) if tokens else 0
    p = _Parser(tokens, source_len)
    node = p.parse_expr()
    trailing = p.peek()
    if trailing is not None:
        raise ParseError(f"unexpected token '{trailing.lexeme}'", trailing.position)
    return node


def parse_text(source: str) -> Expr:
    return parse(tokenize(source), len(source))


# ---------------------------------------------------------------------------
# Evaluation

_UNARY_MATH = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "abs": math.fabs,
    "sinh": math.sinh,
    "cosh": math.cosh,
}


def eval_expr(e: Expr, t: float) -> float:
    """Evaluate at a single time, raising DomainError outside the real domain."""
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, TimeVar):
        return t
    if isinstance(e, Negate):
        return -eval_expr(e.arg, t)
    if isinstance(e, Add):
        return eval_expr(e.left, t) + eval_expr(e.right, t)
    if isinstance(e, Sub):
        return eval_expr(e.left, t) - eval_expr(e.right, t)
    if isinstance(e, Mul):
        return eval_expr(e.left, t) * eval_expr(e.right, t)
    if isinstance(e, Div):
        den = eval_expr(e.right, t)
        if den == 0.0:
            raise DomainError("division by zero", t, e)
        return eval_expr(e.left, t) / den
    if isinstance(e, Pow):
        base = eval_expr(e.left, t)
        expo = eval_expr(e.right, t)
        try:
            out = math.pow(base, expo)
        except (ValueError, OverflowError):
            raise DomainError("power outside real domain", t, e) from None
        if math.isinf(out) or math.isnan(out):
            raise DomainError("power outside real domain", t, e)
        return out
    if isinstance(e, Call):
        arg = eval_expr(e.arg, t)
        if e.name == "log":
            if arg <= 0.0:
                raise DomainError("log of non-positive argument", t, e)
            return math.log(arg)
        if e.name == "sqrt" and arg < 0.0:
            raise DomainError("sqrt of negative argument", t, e)
        try:
            return _UNARY_MATH[e.name](arg)
        except (ValueError, OverflowError):
            raise DomainError(f"{e.name} outside real domain", t, e) from None
    raise TypeError(f"not an Expr node: {e!r}")


def sample(e: Expr, ts: np.ndarray) -> np.ndarray:
    """Vectorized evaluation on an array of times.

    Fast path computes the whole tree with numpy; if anything non-finite
    shows up, the first offending time is re-evaluated through eval_expr
    so the error message names the exact subexpression.
    """
    ts = np.asarray(ts, dtype=float)

    def rec(node: Expr) -> np.ndarray:
        if isinstance(node, Constant):
            return np.full_like(ts, node.value)
        if isinstance(node, TimeVar):
            return ts
        if isinstance(node, Negate):
            return -rec(node.arg)
        if isinstance(node, Add):
            return rec(node.left) + rec(node.right)
        if isinstance(node, Sub):
            return rec(node.left) - rec(node.right)
        if isinstance(node, Mul):
            return rec(node.left) * rec(node.right)
        if isinstance(node, Div):
            return rec(node.left) / rec(node.right)
        if isinstance(node, Pow):
            return np.power(rec(node.left), rec(node.right))
        if isinstance(node, Call):
            arg = rec(node.arg)
            if node.name == "abs":
                return np.abs(arg)
            return getattr(np, node.name)(arg)
        raise TypeError(f"not an Expr node: {node!r}")

    with np.errstate(all="ignore"):
        out = rec(e)
    bad = ~np.isfinite(out)
    if np.any(bad):
        t_bad = float(ts[np.argmax(bad)])
        eval_expr(e, t_bad)  # raises DomainError with details
        raise DomainError("non-finite value", t_bad, e)  # overflow fallback
    return out


def compile_scalar(e: Expr) -> Callable[[float], float]:
    """Compile to a bare closure over math.* for hot loops.

    No domain checking: math's own ValueError/ZeroDivisionError/OverflowError
    propagate. Integrators catch those and report the time themselves.
    """
    if isinstance(e, Constant):
        v = e.value
        return lambda t: v
    if isinstance(e, TimeVar):
        return lambda t: t
    if isinstance(e, Negate):
        f = compile_scalar(e.arg)
        return lambda t: -f(t)
    if isinstance(e, (Add, Sub, Mul, Div, Pow)):
        lf = compile_scalar(e.left)
        rf = compile_scalar(e.right)
        if isinstance(e, Add):
            return lambda t: lf(t) + rf(t)
        if isinstance(e, Sub):
            return lambda t: lf(t) - rf(t)
        if isinstance(e, Mul):
            return lambda t: lf(t) * rf(t)
        if isinstance(e, Div):
            return lambda t: lf(t) / rf(t)
        return lambda t: math.pow(lf(t), rf(t))
    if isinstance(e, Call):
        fn = math.log if e.name == "log" else _UNARY_MATH[e.name]
        af = compile_scalar(e.arg)
        return lambda t: fn(af(t))
    raise TypeError(f"not an Expr node: {e!r}")


# ---------------------------------------------------------------------------
# Differentiation


def contains_t(e: Expr) -> bool:
    if isinstance(e, TimeVar):
        return True
    if isinstance(e, (Constant,)):
        return False
    if isinstance(e, Negate):
        return contains_t(e.arg)
    if isinstance(e, Call):
        return contains_t(e.arg)
    return contains_t(e.left) or contains_t(e.right)


def _mul(a: Expr, b: Expr) -> Expr:
    # construction-time convenience only; parse() never folds
    if isinstance(a, Constant):
        if a.value == 0.0:
            return Constant(0.0)
        if a.value == 1.0:
            return b
    if isinstance(b, Constant):
        if b.value == 0.0:
            return Constant(0.0)
        if b.value == 1.0:
            return a
    return Mul(a, b)


def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Constant) and a.value == 0.0:
        return b
    if isinstance(b, Constant) and b.value == 0.0:
        return a
    return Add(a, b)


def differentiate(e: Expr) -> Expr:
    """Symbolic derivative d/dt."""
    if isinstance(e, Constant):
        return Constant(0.0)
    if isinstance(e, TimeVar):
        return Constant(1.0)
    if isinstance(e, Negate):
        return Negate(differentiate(e.arg))
    if isinstance(e, Add):
        return _add(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Sub):
        dl = differentiate(e.left)
        dr = differentiate(e.right)
        if isinstance(dr, Constant) and dr.value == 0.0:
            return dl
        if isinstance(dl, Constant) and dl.value == 0.0:
            return Negate(dr)
        return Sub(dl, dr)
    if isinstance(e, Mul):
        return _add(
            _mul(differentiate(e.left), e.right),
            _mul(e.left, differentiate(e.right)),
        )
    if isinstance(e, Div):
        num = Sub(
            _mul(differentiate(e.left), e.right),
            _mul(e.left, differentiate(e.right)),
        )
        return Div(num, Pow(e.right, Constant(2.0)))
    if isinstance(e, Pow):
        base_t = contains_t(e.left)
        expo_t = contains_t(e.right)
        if base_t and expo_t:
            raise DifferentiationError(
                f"not differentiable symbolically: t in both base and exponent of "
                f"'{print_expr(e)}'"
            )
        if expo_t:
            # c^v -> c^v * log(c) * v'
            return _mul(_mul(e, Call("log", e.left)), differentiate(e.right))
        # u^c -> c * u^(c-1) * u'
        return _mul(
            _mul(e.right, Pow(e.left, Sub(e.right, Constant(1.0)))),
            differentiate(e.left),
        )
    if isinstance(e, Call):
        u = e.arg
        du = differentiate(u)
        if e.name == "sin":
            outer = Call("cos", u)
        elif e.name == "cos":
            outer = Negate(Call("sin", u))
        elif e.name == "tan":
            outer = Div(Constant(1.0), Pow(Call("cos", u), Constant(2.0)))
        elif e.name == "exp":
            outer = e
        elif e.name == "log":
            return Div(du, u)
        elif e.name == "sqrt":
            return Div(du, _mul(Constant(2.0), e))
        elif e.name == "abs":
            # u/|u| * u', valid wherever u != 0
            outer = Div(u, e)
        elif e.name == "sinh":
            outer = Call("cosh", u)
        else:  # cosh
            outer = Call("sinh", u)
        return _mul(outer, du)
    raise TypeError(f"not an Expr node: {e!r}")


# ---------------------------------------------------------------------------
# Printer

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_UNARY = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return _PREC_ADD
    if isinstance(e, (Mul, Div)):
        return _PREC_MUL
    if isinstance(e, Negate):
        return _PREC_UNARY
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _fmt_number(v: float) -> str:
    if v != v or math.isinf(v):
        raise ExprError(f"cannot print non-finite constant {v}")
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def print_expr(e: Expr) -> str:
    """Render to text that re-parses to a structurally identical tree."""

    def wrap(child: Expr, need: int) -> str:
        s = print_expr(child)
        return f"({s})" if _prec(child) < need else s

    if isinstance(e, Constant):
        # negative literals cannot be tokenized; they re-parse as unary minus.
        # The parser never constructs them, so round-trip stays structural for
        # everything parse() can produce.
        if e.value < 0:
            return "-" + _fmt_number(-e.value)
        return _fmt_number(e.value)
    if isinstance(e, TimeVar):
        return "t"
    if isinstance(e, Negate):
        return "-" + wrap(e.arg, _PREC_UNARY)
    if isinstance(e, Add):
        return f"{wrap(e.left, _PREC_ADD)} + {wrap(e.right, _PREC_ADD + 1)}"
    if isinstance(e, Sub):
        return f"{wrap(e.left, _PREC_ADD)} - {wrap(e.right, _PREC_ADD + 1)}"
    if isinstance(e, Mul):
        return f"{wrap(e.left, _PREC_MUL)} * {wrap(e.right, _PREC_MUL + 1)}"
    if isinstance(e, Div):
        return f"{wrap(e.left, _PREC_MUL)} / {wrap(e.right, _PREC_MUL + 1)}"
    if isinstance(e, Pow):
        base = print_expr(e.left)
        if _prec(e.left) <= _PREC_POW:  # power base must be an atom
            base = f"({base})"
        return f"{base} ^ {wrap(e.right, _PREC_UNARY)}"
    if isinstance(e, Call):
        return f"{e.name}({print_expr(e.arg)})"
    raise TypeError(f"not an Expr node: {e!r}")
