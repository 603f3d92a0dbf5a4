"""A small expression language in one variable ``x`` with Taylor-mode derivatives.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'x' | NAME | NAME '(' expr ')' | '(' expr ')'

``^`` is right associative and binds tighter than unary minus on its left,
so ``-x^2`` is ``-(x^2)``.  Names: ``pi``, ``e``; functions ``exp``,
``log``, ``sin``, ``cos``, ``tan``, ``sqrt``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .sets import Interval


class ExprSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at offset {pos}")
        self.pos = pos


class ExprEvalError(ArithmeticError):
    """Raised when an expression is evaluated at a pole or outside a primitive's domain."""


# -- AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\S))")


def _tokenize(src: str):
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:  # trailing whitespace
            break
        if m.group(1):
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise ExprSyntaxError(f"unexpected character {ch!r}", m.start(3))
            toks.append(("op", ch, m.start(3)))
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

    def expect(self, val):
        tok = self.take()
        if tok[1] != val or tok[0] not in ("op",):
            raise ExprSyntaxError(f"expected {val!r}", tok[2])

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val == "x":
                return Var()
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            if val in FUNCTIONS:
                if not (self.peek()[0] == "op" and self.peek()[1] == "("):
                    raise ExprSyntaxError(f"function {val!r} requires one argument", self.peek()[2])
                self.take()
                arg = self.expr()
                if self.peek()[1] == ",":
                    raise ExprSyntaxError(f"function {val!r} takes exactly one argument", self.peek()[2])
                self.expect(")")
                return Call(val, arg)
            raise ExprSyntaxError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError("unexpected " + (repr(val) if val else "end of input"), pos)


def parse(src: str) -> Node:
    return _Parser(src).parse()


def to_source(node: Node) -> str:
    """Canonical, fully parenthesized printer; ``parse(to_source(n)) == n``."""
    if isinstance(node, Num):
        return repr(node.value) if node.value >= 0 else f"({node.value!r})"
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"(-{to_source(node.arg)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    return f"{node.fn}({to_source(node.arg)})"


# -- truncated Taylor series --------------------------------------------------
# A series is a list c[0..k] of normalized coefficients f^(j)(x0) / j!.

def _mul(a, b):
    k = len(a)
    return [sum(a[i] * b[j - i] for i in range(j + 1)) for j in range(k)]


def _div(a, b):
    if b[0] == 0:
        raise ExprEvalError("division by zero")
    k = len(a)
    q = [0.0] * k
    for j in range(k):
        q[j] = (a[j] - sum(q[i] * b[j - i] for i in range(j))) / b[0]
    return q


def _exp(a):
    k = len(a)
    e = [0.0] * k
    e[0] = math.exp(a[0])
    for j in range(1, k):
        e[j] = sum(i * a[i] * e[j - i] for i in range(1, j + 1)) / j
    return e


def _log(a):
    if a[0] <= 0:
        raise ExprEvalError("log of non-positive value")
    k = len(a)
    out = [0.0] * k
    out[0] = math.log(a[0])
    for j in range(1, k):
        out[j] = (a[j] - sum(i * out[i] * a[j - i] for i in range(1, j)) / j) / a[0]
    return out


def _sincos(a):
    k = len(a)
    s, c = [0.0] * k, [0.0] * k
    s[0], c[0] = math.sin(a[0]), math.cos(a[0])
    for j in range(1, k):
        s[j] = sum(i * a[i] * c[j - i] for i in range(1, j + 1)) / j
        c[j] = -sum(i * a[i] * s[j - i] for i in range(1, j + 1)) / j
    return s, c


def _pow_const(a, p):
    k = len(a)
    if float(p).is_integer() and p >= 0:
        out = [1.0] + [0.0] * (k - 1)
        for _ in range(int(p)):
            out = _mul(out, a)
        return out
    if a[0] == 0:
        raise ExprEvalError("non-integer or negative power of zero")
    if a[0] < 0 and not float(p).is_integer():
        raise ExprEvalError("non-integer power of a negative value")
    out = [0.0] * k
    out[0] = a[0] ** p
    for j in range(1, k):
        out[j] = sum((p * i - (j - i)) * a[i] * out[j - i] for i in range(1, j + 1)) / (j * a[0])
    return out


def _series(node: Node, x0: float, k: int):
    if isinstance(node, Num):
        return [node.value] + [0.0] * (k - 1)
    if isinstance(node, Var):
        return ([x0, 1.0] + [0.0] * (k - 2))[:k]
    if isinstance(node, Neg):
        return [-c for c in _series(node.arg, x0, k)]
    if isinstance(node, BinOp):
        a = _series(node.left, x0, k)
        if node.op == "^" and isinstance(node.right, (Num, Neg)) and _const_value(node.right) is not None:
            return _pow_const(a, _const_value(node.right))
        b = _series(node.right, x0, k)
        if node.op == "+":
            return [u + v for u, v in zip(a, b)]
        if node.op == "-":
            return [u - v for u, v in zip(a, b)]
        if node.op == "*":
            return _mul(a, b)
        if node.op == "/":
            return _div(a, b)
        return _exp(_mul(b, _log(a)))
    a = _series(node.arg, x0, k)
    if node.fn == "exp":
        return _exp(a)
    if node.fn == "log":
        return _log(a)
    if node.fn == "sqrt":
        return _pow_const(a, 0.5)
    s, c = _sincos(a)
    if node.fn == "sin":
        return s
    if node.fn == "cos":
        return c
    return _div(s, c)


def _const_value(node):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg) and isinstance(node.arg, Num):
        return -node.arg.value
    return None


@dataclass(frozen=True)
class ExprFunction:
    ast: Node
    domain: Interval = Interval(-math.inf, math.inf)
    src: str = ""

    @classmethod
    def from_source(cls, src: str, domain=(-math.inf, math.inf)) -> "ExprFunction":
        dom = domain if isinstance(domain, Interval) else Interval(*domain)
        return cls(parse(src), dom, src)

    def __call__(self, x):
        return taylor_eval(self, x, 0)[0]

    def eval_many(self, xs):
        import numpy as np
        return np.array([self(float(x)) for x in xs])

    def derivative(self, x, order: int):
        return taylor_eval(self, x, order)[order]

    def to_json(self) -> dict:
        return {"kind": "expr", "src": self.src or to_source(self.ast),
                "domain": self.domain.as_list()}


def parse_expression(src: str, domain=(-math.inf, math.inf)) -> ExprFunction:
    return ExprFunction.from_source(src, domain)


def taylor_eval(f: ExprFunction, x, order: int) -> list:
    """``[f(x), f'(x), ..., f^(order)(x)]`` by Taylor-mode propagation."""
    if order < 0:
        raise ValueError("order must be non-negative")
    dom = f.domain
    if not dom.lo <= x <= dom.hi:
        raise ValueError(f"{x} outside domain [{dom.lo}, {dom.hi}]")
    try:
        coeffs = _series(f.ast, float(x), order + 1)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise ExprEvalError(str(exc)) from exc
    out = []
    fact = 1.0
    for j, c in enumerate(coeffs):
        if j:
            fact *= j
        out.append(c * fact)
    if not all(math.isfinite(v) for v in out):
        raise ExprEvalError(f"non-finite value at x={x}")
    return out
