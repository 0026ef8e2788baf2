"""Arithmetic expressions in the chart parameters ``u`` and ``v``.

Grammar (precedence low to high)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?          # right associative
    atom   := NUMBER | "u" | "v" | "pi" | FUNC "(" expr ")" | "(" expr ")"

so ``-u^2`` is ``-(u^2)`` and ``2^-u`` is allowed.  ASTs are immutable and
compare structurally; ``to_source`` prints a fully parenthesized form that
parses back to the same tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import SpincGeomError

FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
}
VARS = ("u", "v")


class ParseError(SpincGeomError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class DomainError(SpincGeomError, ValueError):
    """Evaluation produced a non-finite value."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str  # only "pi"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Const, Var, Neg, Bin, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str):
    toks = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None:
            start = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ParseError(f"unexpected character {src[start]!r}", start)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, pos = self.take()
        if val != text or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {text!r}, found {found}", pos)

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "id":
            if val in VARS:
                return Var(val)
            if val == "pi":
                return Const("pi")
            if val in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            raise ParseError(f"unknown identifier {val!r}", pos)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", pos)


def parse_expr(src: str) -> Expr:
    p = _Parser(src)
    node = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos)
    return node


def to_source(e: Expr) -> str:
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, (Const, Var)):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.arg)})"
    if isinstance(e, Bin):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    return f"{e.fn}({to_source(e.arg)})"


def _eval(e: Expr, u, v):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Const):
        return np.pi
    if isinstance(e, Var):
        return u if e.name == "u" else v
    if isinstance(e, Neg):
        return -_eval(e.arg, u, v)
    if isinstance(e, Call):
        return FUNCS[e.fn](_eval(e.arg, u, v))
    a, b = _eval(e.left, u, v), _eval(e.right, u, v)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        return a / b
    return np.power(a, b)


def evaluate(e: Expr, u, v) -> np.ndarray:
    """Vectorized evaluation; raises ``DomainError`` on any non-finite value."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    with np.errstate(all="ignore"):
        out = np.asarray(_eval(e, u, v), dtype=float)
    out = np.broadcast_to(out, np.broadcast(u, v).shape)
    if not np.all(np.isfinite(out)):
        bad = np.argwhere(~np.isfinite(np.atleast_1d(out)))[0]
        uu = np.broadcast_to(u, out.shape)
        vv = np.broadcast_to(v, out.shape)
        at = (float(np.atleast_1d(uu)[tuple(bad)]), float(np.atleast_1d(vv)[tuple(bad)]))
        raise DomainError(f"{to_source(e)} is not finite at (u, v) = {at}")
    return np.array(out)


# ------------------------------------------------------------ differentiation

ZERO, ONE = Num(0.0), Num(1.0)


def _add(a, b):
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    return Bin("+", a, b)


def _sub(a, b):
    if b == ZERO:
        return a
    if a == ZERO:
        return Neg(b)
    return Bin("-", a, b)


def _mul(a, b):
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    return Bin("*", a, b)


def _div(a, b):
    if a == ZERO:
        return ZERO
    return Bin("/", a, b)


def _chain(fn, a):
    if fn == "sin":
        return Call("cos", a)
    if fn == "cos":
        return Neg(Call("sin", a))
    if fn == "tan":
        return Bin("/", ONE, Bin("^", Call("cos", a), Num(2.0)))
    if fn == "exp":
        return Call("exp", a)
    if fn == "log":
        return Bin("/", ONE, a)
    if fn == "sqrt":
        return Bin("/", ONE, Bin("*", Num(2.0), Call("sqrt", a)))
    if fn == "sinh":
        return Call("cosh", a)
    if fn == "cosh":
        return Call("sinh", a)
    return Bin("-", ONE, Bin("^", Call("tanh", a), Num(2.0)))


def _depends(e: Expr, var: str) -> bool:
    if isinstance(e, Var):
        return e.name == var
    if isinstance(e, (Num, Const)):
        return False
    if isinstance(e, (Neg, Call)):
        return _depends(e.arg, var)
    return _depends(e.left, var) or _depends(e.right, var)


def diff(e: Expr, var: str) -> Expr:
    """Symbolic partial derivative with light constant folding."""
    if not _depends(e, var):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Neg):
        d = diff(e.arg, var)
        return ZERO if d == ZERO else Neg(d)
    if isinstance(e, Call):
        return _mul(_chain(e.fn, e.arg), diff(e.arg, var))
    a, b = e.left, e.right
    da, db = diff(a, var), diff(b, var)
    if e.op == "+":
        return _add(da, db)
    if e.op == "-":
        return _sub(da, db)
    if e.op == "*":
        return _add(_mul(da, b), _mul(a, db))
    if e.op == "/":
        return _sub(_div(da, b), _div(_mul(a, db), Bin("^", b, Num(2.0))))
    # a^b
    if not _depends(b, var):
        return _mul(_mul(b, Bin("^", a, Bin("-", b, ONE))), da)
    return _mul(e, _add(_mul(db, Call("log", a)), _div(_mul(b, da), a)))
