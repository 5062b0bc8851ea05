"""Closed-form functions of one variable ``s``.

Expressions are immutable trees.  :func:`parse` reads the text format used in
spec files and on the command line, :func:`evaluate` works on scalars and
numpy arrays alike, and :func:`differentiate` is total, so derivatives of any
order are available by repeated application.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := "-" unary | power
    power := atom ("^" unary)?
    atom  := number | "s" | "pi" | "e" | func "(" expr ")" | "(" expr ")"
    func  := exp | log | sin | cos | tan | sqrt
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import DomainError, ParseError

__all__ = [
    "Expr", "Num", "Var", "Const", "Neg", "Add", "Sub", "Mul", "Div", "Pow", "Call",
    "FUNCTIONS", "parse", "evaluate", "differentiate", "simplify", "to_string",
    "as_expr", "depends_on_s", "S",
]

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}

Number = Union[int, float, Fraction]


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_string(self)

    # Arithmetic builds simplified trees so constructors stay readable.
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __rpow__(self, other):
        return power(as_expr(other), self)

    def __neg__(self):
        return neg(self)


@dataclass(frozen=True)
class Num(Expr):
    value: Fraction


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Const(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
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
            raise ValueError(f"unknown function {self.name!r}")


S = Var()
ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))
TWO = Num(Fraction(2))

_BINARY = {Add: "+", Sub: "-", Mul: "*", Div: "/", Pow: "^"}


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a number")
    if isinstance(x, (int, Fraction)):
        return Num(Fraction(x))
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite literal {x!r}")
        return Num(Fraction(x))
    if isinstance(x, str):
        return parse(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def depends_on_s(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, (Num, Const)):
        return False
    if isinstance(e, (Neg, Call)):
        return depends_on_s(e.arg)
    return depends_on_s(e.left) or depends_on_s(e.right)


# ---------------------------------------------------------------------------
# printing


def _num_str(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator) if v >= 0 else f"({v.numerator})"
    return f"({v.numerator}/{v.denominator})"


def to_string(e: Expr) -> str:
    """Fully parenthesized text that :func:`parse` reads back."""
    if isinstance(e, Num):
        return _num_str(e.value)
    if isinstance(e, Var):
        return "s"
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_string(e.arg)})"
    if isinstance(e, Call):
        return f"{e.name}({to_string(e.arg)})"
    op = _BINARY[type(e)]
    return f"({to_string(e.left)} {op} {to_string(e.right)})"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()−×·÷])"
    r")"
)
_OP_ALIASES = {"−": "-", "×": "*", "·": "*", "÷": "/"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []  # (kind, value, char offset)
        pos = 0
        n = len(text)
        while True:
            while pos < n and text[pos].isspace():
                pos += 1
            if pos >= n:
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                self._fail(pos, "number, identifier, operator or parenthesis")
            kind = m.lastgroup
            value = m.group(kind)
            start = m.start(kind)
            if kind == "op":
                value = _OP_ALIASES.get(value, value)
            self.tokens.append((kind, value, start))
            pos = m.end()
        self.tokens.append(("eof", "", n))
        self.i = 0

    def _fail(self, char_offset: int, expected: str):
        byte_offset = len(self.text[:char_offset].encode("utf-8"))
        raise ParseError(byte_offset, expected, self.text)

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            self._fail(pos, f"'{op}'")
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, _, pos = self.peek()
        if kind != "eof":
            self._fail(pos, "operator or end of input")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                right = self.term()
                left = Add(left, right) if value == "+" else Sub(left, right)
            else:
                return left

    def term(self) -> Expr:
        left = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                right = self.unary()
                left = Mul(left, right) if value == "*" else Div(left, right)
            else:
                return left

    def unary(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, value, pos = self.peek()
        if kind == "num":
            self.advance()
            return Num(Fraction(value))
        if kind == "ident":
            self.advance()
            if value == "s":
                return S
            if value in CONSTANTS:
                return Const(value)
            if value in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(value, arg)
            self._fail(pos, f"s, pi, e or one of {', '.join(FUNCTIONS)} (got '{value}')")
        if kind == "op" and value == "(":
            self.advance()
            e = self.expr()
            self.expect_op(")")
            return e
        self._fail(pos, "number, s, constant, function or '('")


def parse(text: str) -> Expr:
    """Parse expression text into a tree.

    Raises :class:`ParseError` with the byte offset of the offending token.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# evaluation


def _first_bad(mask, s_arr):
    idx = int(np.flatnonzero(np.broadcast_to(mask, s_arr.shape))[0])
    return float(s_arr.flat[idx])


def _check(mask, s_arr, reason):
    if np.any(mask):
        raise DomainError(_first_bad(mask, s_arr), reason)


def _eval(e: Expr, s: np.ndarray):
    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, Var):
        return s
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Neg):
        return -_eval(e.arg, s)
    if isinstance(e, Call):
        u = _eval(e.arg, s)
        name = e.name
        if name == "log":
            _check(np.asarray(u) <= 0, s, "log of nonpositive argument")
            out = np.log(u)
        elif name == "sqrt":
            _check(np.asarray(u) < 0, s, "sqrt of negative argument")
            out = np.sqrt(u)
        elif name == "exp":
            out = np.exp(u)
        elif name == "sin":
            out = np.sin(u)
        elif name == "cos":
            out = np.cos(u)
        else:
            out = np.tan(u)
        _check(~np.isfinite(out), s, f"non-finite value of {name}")
        return out
    a = _eval(e.left, s)
    b = _eval(e.right, s)
    if isinstance(e, Add):
        out = a + b
    elif isinstance(e, Sub):
        out = a - b
    elif isinstance(e, Mul):
        out = a * b
    elif isinstance(e, Div):
        _check(np.asarray(b) == 0, s, "division by zero")
        out = a / b
    else:
        a_arr = np.asarray(a, dtype=float)
        b_arr = np.asarray(b, dtype=float)
        _check((a_arr == 0) & (b_arr < 0), s, "zero raised to a negative power")
        _check((a_arr < 0) & (b_arr != np.round(b_arr)), s,
               "negative base with non-integer exponent")
        out = np.power(a_arr, b_arr)
    _check(~np.isfinite(out), s, "non-finite intermediate value")
    return out


def evaluate(e: Expr, s):
    """Evaluate ``e`` at a point or at every entry of an array.

    Out-of-domain points raise :class:`DomainError` naming the first bad point;
    the result is never NaN or infinite.
    """
    scalar = np.ndim(s) == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    with np.errstate(all="ignore"):
        out = _eval(e, s_arr)
    out = np.broadcast_to(np.asarray(out, dtype=float), s_arr.shape)
    if scalar:
        return float(out[0])
    return np.array(out)


# ---------------------------------------------------------------------------
# smart constructors (light algebraic cleanup)


def _is_num(e, v=None) -> bool:
    return isinstance(e, Num) and (v is None or e.value == v)


def neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    if _is_num(a, 0):
        return b
    if _is_num(b, 0):
        return a
    if isinstance(b, Neg):
        return Sub(a, b.arg)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    if _is_num(b, 0):
        return a
    if _is_num(a, 0):
        return neg(b)
    if isinstance(b, Neg):
        return Add(a, b.arg)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    if _is_num(a, 0) or _is_num(b, 0):
        return ZERO
    if _is_num(a, 1):
        return b
    if _is_num(b, 1):
        return a
    if _is_num(a, -1):
        return neg(b)
    if _is_num(b, -1):
        return neg(a)
    if isinstance(a, Neg) and isinstance(b, Neg):
        return mul(a.arg, b.arg)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0:
        return Num(a.value / b.value)
    if _is_num(a, 0) and not _is_num(b, 0):
        return ZERO
    if _is_num(b, 1):
        return a
    if _is_num(b, -1):
        return neg(a)
    return Div(a, b)


_MAX_FOLD_EXPONENT = 64


def power(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num) and b.value.denominator == 1:
        k = b.value.numerator
        if abs(k) <= _MAX_FOLD_EXPONENT and not (a.value == 0 and k < 0):
            return Num(a.value ** k)
    if _is_num(b, 1):
        return a
    if _is_num(b, 0):
        return ONE
    if _is_num(a, 1):
        return ONE
    return Pow(a, b)


_FOLD_AT_ZERO = {"exp": ONE, "sin": ZERO, "cos": ONE, "tan": ZERO, "sqrt": ZERO}


def call(name: str, a: Expr) -> Expr:
    if _is_num(a, 0) and name in _FOLD_AT_ZERO:
        return _FOLD_AT_ZERO[name]
    if _is_num(a, 1) and name in ("log", "sqrt"):
        return ZERO if name == "log" else ONE
    if name == "log" and isinstance(a, Const) and a.name == "e":
        return ONE
    return Call(name, a)


def exp(a) -> Expr:
    return call("exp", as_expr(a))


def log(a) -> Expr:
    return call("log", as_expr(a))


def sin(a) -> Expr:
    return call("sin", as_expr(a))


def cos(a) -> Expr:
    return call("cos", as_expr(a))


def tan(a) -> Expr:
    return call("tan", as_expr(a))


def sqrt(a) -> Expr:
    return call("sqrt", as_expr(a))


def simplify(e: Expr) -> Expr:
    """Fold constant subtrees and drop neutral elements (x*1, x+0, x^1, ...).

    Only exact rational folding is done; transcendental functions of
    constants are left alone except at 0 and 1.
    """
    if isinstance(e, (Num, Var, Const)):
        return e
    if isinstance(e, Neg):
        return neg(simplify(e.arg))
    if isinstance(e, Call):
        return call(e.name, simplify(e.arg))
    left, right = simplify(e.left), simplify(e.right)
    return {Add: add, Sub: sub, Mul: mul, Div: div, Pow: power}[type(e)](left, right)


# ---------------------------------------------------------------------------
# differentiation


def _d(e: Expr) -> Expr:
    if isinstance(e, (Num, Const)):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Neg):
        return neg(_d(e.arg))
    if isinstance(e, Add):
        return add(_d(e.left), _d(e.right))
    if isinstance(e, Sub):
        return sub(_d(e.left), _d(e.right))
    if isinstance(e, Mul):
        u, v = e.left, e.right
        return add(mul(_d(u), v), mul(u, _d(v)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        du, dv = _d(u), _d(v)
        if _is_num(dv, 0):
            return div(du, v)
        return div(sub(mul(du, v), mul(u, dv)), power(v, TWO))
    if isinstance(e, Pow):
        u, v = e.left, e.right
        if not depends_on_s(v):
            return mul(mul(v, power(u, sub(v, ONE))), _d(u))
        if not depends_on_s(u):
            return mul(mul(e, call("log", u)), _d(v))
        return mul(e, add(mul(_d(v), call("log", u)), div(mul(v, _d(u)), u)))
    # Call
    u = e.arg
    du = _d(u)
    name = e.name
    if name == "exp":
        inner = e
    elif name == "log":
        return div(du, u)
    elif name == "sin":
        inner = call("cos", u)
    elif name == "cos":
        inner = neg(call("sin", u))
    elif name == "tan":
        return div(du, power(call("cos", u), TWO))
    else:  # sqrt
        return div(du, mul(TWO, e))
    return mul(inner, du)


def differentiate(e: Expr, order: int = 1) -> Expr:
    """Return the ``order``-th derivative of ``e`` with respect to ``s``."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    for _ in range(order):
        e = _d(e)
    return e
