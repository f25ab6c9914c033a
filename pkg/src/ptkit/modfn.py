"""Tiny expression DSL for time-dependent modulation functions.

Declares the coupling modulations f1(t), f2(t), the onsite potentials
omega1(t), omega2(t) and circuit drives f(t) as parsed expression trees with
exact symbolic first derivatives, so that logarithmic derivatives entering
the effective onsite potential and the resistance rule R(t) = L0 * df/dt
never rely on finite differences.

Grammar (EBNF)::

    expr    = term   { ("+" | "-") term } ;
    term    = unary  { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;            (* right associative *)
    atom    = NUMBER | "i" | "t" | NAME
            | FUNC "(" expr ")" | "(" expr ")" ;
    FUNC    = "sin" | "cos" | "tan" | "sinh" | "cosh" | "tanh"
            | "exp" | "ln" | "sqrt" ;

``i`` is the imaginary unit and ``t`` the time variable; both are reserved.
Any other NAME is a parameter that must be bound at evaluation time.
Precedence is ``^`` over unary ``-`` over ``*``/``/`` over ``+``/``-``.
All evaluation is complex-valued with principal branches for ``ln``,
``sqrt`` and non-integer powers.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import DomainError, ParseError, UnboundParameterError

ParamMap = Mapping[str, complex]

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "ln", "sqrt")

_RESERVED = frozenset(FUNCTIONS) | {"i", "t"}


class Expr:
    """Base node of a parsed expression tree. Immutable; shareable."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_source(self)

    def __call__(self, t: float, params: ParamMap | None = None) -> complex:
        return evaluate(self, t, params or {})


@dataclass(frozen=True, eq=True)
class Num(Expr):
    """Non-negative real literal (signs are explicit Neg nodes)."""

    value: float


@dataclass(frozen=True, eq=True)
class ImagUnit(Expr):
    """The reserved imaginary-unit literal ``i``."""


@dataclass(frozen=True, eq=True)
class TimeVar(Expr):
    """The reserved time variable ``t``."""


@dataclass(frozen=True, eq=True)
class Param(Expr):
    """A named scalar parameter bound through a ParamMap."""

    name: str


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class Bin(Expr):
    op: str  # one of + - * / ^
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class App(Expr):
    fn: str
    arg: Expr


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", len(source) - len(stripped))
        if m.lastgroup is not None:
            tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("eof", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected trailing input {val!r}", pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            e = Bin(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            e = Bin(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^":
            self.next()
            return Bin("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.next()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise ParseError(f"function {val!r} must be applied with (...)", pos)
                self.next()
                arg = self.expr()
                self.expect(")")
                return App(val, arg)
            if val == "i":
                return ImagUnit()
            if val == "t":
                return TimeVar()
            if self.peek()[1] == "(":
                raise ParseError(f"unknown function {val!r}", pos)
            return Param(val)
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected token {val or 'end of input'!r}", pos)


def parse(source: str) -> Expr:
    """Parse an expression string into an Expr tree.

    Raises ParseError (with byte offset) on syntax errors or unknown
    function names.
    """
    if not source or not source.strip():
        raise ParseError("empty expression", 0)
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Printing (canonical form: parse(to_source(e)) is structurally equal to e)
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, Bin):
        if e.op in "+-":
            return _PREC_ADD
        if e.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(e, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def _wrap(s: str, need: bool) -> str:
    return f"({s})" if need else s


def to_source(e: Expr) -> str:
    """Render ``e`` with minimal parentheses; re-parsing reproduces the tree."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, ImagUnit):
        return "i"
    if isinstance(e, TimeVar):
        return "t"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, App):
        return f"{e.fn}({to_source(e.arg)})"
    if isinstance(e, Neg):
        return "-" + _wrap(to_source(e.arg), _prec(e.arg) < _PREC_NEG)
    if isinstance(e, Bin):
        lp, rp = _prec(e.left), _prec(e.right)
        if e.op in "+-":
            left = _wrap(to_source(e.left), lp < _PREC_ADD)
            right = _wrap(to_source(e.right), rp <= _PREC_ADD)
        elif e.op in "*/":
            left = _wrap(to_source(e.left), lp < _PREC_MUL)
            right = _wrap(to_source(e.right), rp <= _PREC_MUL)
        else:  # ^ is right associative and binds above unary minus
            left = _wrap(to_source(e.left), lp <= _PREC_POW)
            right = _wrap(to_source(e.right), rp < _PREC_NEG)
        return f"{left}{e.op}{right}"
    raise TypeError(f"not an Expr node: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _on_cut(z: complex) -> complex:
    # Exact-zero imaginary parts may arrive as -0.0 (e.g. from negation);
    # fold them to +0.0 so ln/sqrt take the standard principal side of the
    # branch cut: ln(-1) = +i*pi, sqrt(-4) = +2i.
    return complex(z.real, 0.0) if z.imag == 0.0 else z


def _ln(z: complex) -> complex:
    return cmath.log(_on_cut(z))


def _sqrt(z: complex) -> complex:
    return cmath.sqrt(_on_cut(z))


_FN_TABLE: dict[str, Callable[[complex], complex]] = {
    "sin": cmath.sin,
    "cos": cmath.cos,
    "tan": cmath.tan,
    "sinh": cmath.sinh,
    "cosh": cmath.cosh,
    "tanh": cmath.tanh,
    "exp": cmath.exp,
    "ln": _ln,
    "sqrt": _sqrt,
}


def _pow(base: complex, expo: complex) -> complex:
    # Integer exponents by repeated multiplication: keeps t^2, 2^3^2 exact
    # and avoids spurious imaginary residue on negative real bases.
    if expo.imag == 0.0 and expo.real == int(expo.real) and abs(expo.real) <= 64:
        n = int(expo.real)
        if n == 0:
            return 1.0 + 0j
        if base == 0 and n < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        out = 1.0 + 0j
        b = base
        for _ in range(abs(n)):
            out *= b
        return out if n > 0 else 1.0 / out
    if base == 0:
        if expo.real > 0:
            return 0j
        raise ZeroDivisionError("0 raised to a non-positive complex power")
    return cmath.exp(expo * cmath.log(_on_cut(base)))


def evaluate(e: Expr, t: float, params: ParamMap) -> complex:
    """Evaluate ``e`` at time ``t`` with the given parameter bindings.

    Principal branches throughout; poles and branch points raise DomainError.
    """
    try:
        return _eval(e, complex(t), params)
    except (ZeroDivisionError, ValueError, OverflowError) as exc:
        raise DomainError(f"domain error evaluating {to_source(e)!r} at t={t}: {exc}") from exc


def _eval(e: Expr, t: complex, params: ParamMap) -> complex:
    if isinstance(e, Num):
        return complex(e.value)
    if isinstance(e, ImagUnit):
        return 1j
    if isinstance(e, TimeVar):
        return t
    if isinstance(e, Param):
        try:
            return complex(params[e.name])
        except KeyError:
            raise UnboundParameterError(f"parameter {e.name!r} is not bound") from None
    if isinstance(e, Neg):
        return -_eval(e.arg, t, params)
    if isinstance(e, App):
        return _FN_TABLE[e.fn](_eval(e.arg, t, params))
    if isinstance(e, Bin):
        a = _eval(e.left, t, params)
        b = _eval(e.right, t, params)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            return a / b
        return _pow(a, b)
    raise TypeError(f"not an Expr node: {e!r}")


def parameters(e: Expr) -> set[str]:
    """Names of all parameters appearing in the tree."""
    if isinstance(e, Param):
        return {e.name}
    if isinstance(e, Neg):
        return parameters(e.arg)
    if isinstance(e, App):
        return parameters(e.arg)
    if isinstance(e, Bin):
        return parameters(e.left) | parameters(e.right)
    return set()


def check_bound(e: Expr, params: ParamMap) -> None:
    """Raise UnboundParameterError if any parameter of ``e`` lacks a binding."""
    missing = parameters(e) - set(params)
    if missing:
        raise UnboundParameterError(f"unbound parameters: {sorted(missing)}")


def bind(e: Expr, params: ParamMap) -> Callable[[float], complex]:
    """Compile ``e`` into a fast t -> complex closure with params baked in.

    Semantically identical to ``evaluate`` (same branches, same domain
    errors); used in integrator right-hand sides where tree walking is too
    slow.
    """
    check_bound(e, params)

    def compile_node(n: Expr) -> Callable[[complex], complex]:
        if isinstance(n, Num):
            c = complex(n.value)
            return lambda t: c
        if isinstance(n, ImagUnit):
            return lambda t: 1j
        if isinstance(n, TimeVar):
            return lambda t: t
        if isinstance(n, Param):
            c = complex(params[n.name])
            return lambda t: c
        if isinstance(n, Neg):
            f = compile_node(n.arg)
            return lambda t: -f(t)
        if isinstance(n, App):
            f = compile_node(n.arg)
            g = _FN_TABLE[n.fn]
            return lambda t: g(f(t))
        if isinstance(n, Bin):
            fa = compile_node(n.left)
            fb = compile_node(n.right)
            if n.op == "+":
                return lambda t: fa(t) + fb(t)
            if n.op == "-":
                return lambda t: fa(t) - fb(t)
            if n.op == "*":
                return lambda t: fa(t) * fb(t)
            if n.op == "/":
                return lambda t: fa(t) / fb(t)
            return lambda t: _pow(fa(t), fb(t))
        raise TypeError(f"not an Expr node: {n!r}")

    fn = compile_node(e)

    def call(t: float) -> complex:
        try:
            return fn(complex(t))
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise DomainError(f"domain error evaluating {to_source(e)!r} at t={t}: {exc}") from exc

    return call


# ---------------------------------------------------------------------------
# Symbolic differentiation (d/dt)
# ---------------------------------------------------------------------------

_ZERO = Num(0.0)
_ONE = Num(1.0)


def num(x: float) -> Expr:
    """Literal node for a real constant of either sign."""
    return Num(float(x)) if x >= 0 else Neg(Num(float(-x)))


def _is_zero(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 0.0


def _is_one(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 1.0


def add(a: Expr, b: Expr) -> Expr:
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return Bin("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_zero(b):
        return a
    if _is_zero(a):
        return Neg(b)
    return Bin("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_zero(a) or _is_zero(b):
        return _ZERO
    if _is_one(a):
        return b
    if _is_one(b):
        return a
    return Bin("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_zero(a):
        return _ZERO
    if _is_one(b):
        return a
    return Bin("/", a, b)


def pow_(a: Expr, b: Expr) -> Expr:
    if _is_one(b):
        return a
    return Bin("^", a, b)


def neg(a: Expr) -> Expr:
    if _is_zero(a):
        return _ZERO
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def contains_t(e: Expr) -> bool:
    if isinstance(e, TimeVar):
        return True
    if isinstance(e, Neg):
        return contains_t(e.arg)
    if isinstance(e, App):
        return contains_t(e.arg)
    if isinstance(e, Bin):
        return contains_t(e.left) or contains_t(e.right)
    return False


def diff(e: Expr) -> Expr:
    """Symbolic d/dt of ``e``.

    Total on the whole function set; the result tree is only lightly
    simplified (0/1 elimination) and is validated against finite
    differences rather than by shape.
    """
    if isinstance(e, (Num, ImagUnit, Param)):
        return _ZERO
    if isinstance(e, TimeVar):
        return _ONE
    if isinstance(e, Neg):
        return neg(diff(e.arg))
    if isinstance(e, Bin):
        u, v = e.left, e.right
        du, dv = diff(u), diff(v)
        if e.op == "+":
            return add(du, dv)
        if e.op == "-":
            return sub(du, dv)
        if e.op == "*":
            return add(mul(du, v), mul(u, dv))
        if e.op == "/":
            return div(sub(mul(du, v), mul(u, dv)), pow_(v, Num(2.0)))
        # power: use the constant-exponent rule when the exponent is
        # t-free (avoids introducing ln(u) and its branch cut), and the
        # general u^v * (dv ln u + v du / u) rule otherwise.
        if not contains_t(v):
            return mul(mul(v, pow_(u, sub(v, _ONE))), du)
        if not contains_t(u):
            return mul(mul(pow_(u, v), App("ln", u)), dv)
        return mul(
            pow_(u, v),
            add(mul(dv, App("ln", u)), mul(v, div(du, u))),
        )
    if isinstance(e, App):
        u = e.arg
        du = diff(u)
        fn = e.fn
        if fn == "sin":
            outer: Expr = App("cos", u)
        elif fn == "cos":
            outer = neg(App("sin", u))
        elif fn == "tan":
            outer = div(_ONE, pow_(App("cos", u), Num(2.0)))
        elif fn == "sinh":
            outer = App("cosh", u)
        elif fn == "cosh":
            outer = App("sinh", u)
        elif fn == "tanh":
            outer = div(_ONE, pow_(App("cosh", u), Num(2.0)))
        elif fn == "exp":
            outer = App("exp", u)
        elif fn == "ln":
            outer = div(_ONE, u)
        else:  # sqrt
            outer = div(_ONE, mul(Num(2.0), App("sqrt", u)))
        return mul(outer, du)
    raise TypeError(f"not an Expr node: {e!r}")


def constant(value: complex) -> Expr:
    """Expression tree for an arbitrary complex constant."""
    z = complex(value)
    re, im = num(z.real), num(z.imag)
    if z.imag == 0.0:
        return re
    if z.real == 0.0:
        return mul(im, ImagUnit())
    return add(re, mul(im, ImagUnit()))
