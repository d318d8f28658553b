"""Coefficient expressions, problem configuration, parsing and evaluation.

A configuration is a sequence of statements, one per line (or separated by
';'), with '#' comments:

    interval = (-inf, inf)
    x0 = 0
    param alpha = 2
    mu = |x|^alpha
    sigma = 1
    b = x
    asym right mu = C=1 p=alpha

Expressions use x, bound parameters, numbers, + - * / ^ (or **), unary
minus, abs(.), |.|, exp(.), log(.), sqrt(.) and pi.  Exponents may not
depend on x.  Non-integer powers of a possibly negative argument must be
written with |.|.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

LEFT = "left"
RIGHT = "right"
COEFFICIENTS = ("mu", "sigma", "b", "mutilde", "sigmatilde")


class ConfigSyntaxError(SyntaxError):
    def __init__(self, msg: str, line: int = 0, col: int = 0, text: str = ""):
        super().__init__(f"line {line}, column {col}: {msg}" if line else msg)
        self.line = line
        self.col = col
        self.text = text


class ValidationError(ValueError):
    pass


class DomainError(ArithmeticError):
    """Evaluation left the domain of an operation; carries the subtree."""

    def __init__(self, msg: str, node: "Expr"):
        super().__init__(f"{msg} in {to_text(node)}")
        self.node = node


# ---------------------------------------------------------------- expressions

class Expr:
    """Base of the immutable expression tree."""

    def __add__(self, other):
        return Add(self, lift(other))

    def __radd__(self, other):
        return Add(lift(other), self)

    def __sub__(self, other):
        return Sub(self, lift(other))

    def __rsub__(self, other):
        return Sub(lift(other), self)

    def __mul__(self, other):
        return Mul(self, lift(other))

    def __rmul__(self, other):
        return Mul(lift(other), self)

    def __truediv__(self, other):
        return Div(self, lift(other))

    def __rtruediv__(self, other):
        return Div(lift(other), self)

    def __pow__(self, other):
        return Pow(self, lift(other))

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Var(Expr):
    pass


@dataclass(frozen=True, eq=True)
class Param(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True, eq=True)
class Abs(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class Log(Expr):
    arg: Expr


X = Var()
_BINARY = (Add, Sub, Mul, Div)
_UNARY_FUN = {Abs: "abs", Exp: "exp", Log: "log"}


def lift(v) -> Expr:
    if isinstance(v, Expr):
        return v
    return Const(float(v))


def children(e: Expr) -> tuple:
    if isinstance(e, _BINARY):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base, e.exponent)
    if isinstance(e, (Neg, Abs, Exp, Log)):
        return (e.arg,)
    return ()


def depends_on_x(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    return any(depends_on_x(c) for c in children(e))


def free_params(e: Expr) -> set[str]:
    if isinstance(e, Param):
        return {e.name}
    out: set[str] = set()
    for c in children(e):
        out |= free_params(c)
    return out


def substitute(e: Expr, params: Mapping[str, float]) -> Expr:
    """Replace bound parameters by constants."""
    if isinstance(e, Param):
        return Const(float(params[e.name])) if e.name in params else e
    if isinstance(e, _BINARY):
        return type(e)(substitute(e.left, params), substitute(e.right, params))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, params), substitute(e.exponent, params))
    if isinstance(e, (Neg, Abs, Exp, Log)):
        return type(e)(substitute(e.arg, params))
    return e


# ---------------------------------------------------------------- printing

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _num(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def to_text(e: Expr) -> str:
    return _text(e, 0)


def _text(e: Expr, parent: int) -> str:
    if isinstance(e, Const):
        s = _num(e.value)
        return f"({s})" if e.value < 0 and parent > 0 else s
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Param):
        return e.name
    if type(e) in _UNARY_FUN:
        return f"{_UNARY_FUN[type(e)]}({_text(e.arg, 0)})"
    prec = _PREC[type(e)]
    if isinstance(e, Neg):
        s = "-" + _text(e.arg, prec)
    elif isinstance(e, Pow):
        s = f"{_text(e.base, prec + 1)}^{_text(e.exponent, prec)}"
    else:
        op = {Add: " + ", Sub: " - ", Mul: "*", Div: "/"}[type(e)]
        # right operand of - and / binds tighter
        rp = prec + 1 if isinstance(e, (Sub, Div)) else prec
        s = f"{_text(e.left, prec)}{op}{_text(e.right, rp)}"
    return f"({s})" if prec < parent or (prec == parent and isinstance(e, Pow)) else s


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),|])
""", re.VERBOSE)


def _tokenize(text: str, line: int = 0, col0: int = 0):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ConfigSyntaxError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1, text)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group(kind)
            if val == "**":
                val = "^"
            out.append((kind, val, col0 + pos + 1))
        pos = m.end()
    out.append(("end", "", col0 + len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, line: int = 0, col0: int = 0):
        self.text = text
        self.line = line
        self.toks = _tokenize(text, line, col0)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ConfigSyntaxError(msg, self.line, tok[2], self.text)

    def expect(self, val):
        t = self.take()
        if t[1] != val:
            self.error(f"expected {val!r}, found {t[1] or 'end of input'!r}", t)
        return t

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            r = self.term()
            e = Add(e, r) if op == "+" else Sub(e, r)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            r = self.unary()
            e = Mul(e, r) if op == "*" else Div(e, r)
        return e

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            arg = self.unary()
            if isinstance(arg, Const):
                return Const(-arg.value)
            return Neg(arg)
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^":
            tok = self.take()
            expo = self.unary()
            if depends_on_x(expo):
                self.error("exponents may not depend on x", tok)
            return Pow(base, expo)
        return base

    def atom(self) -> Expr:
        t = self.take()
        kind, val = t[0], t[1]
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            if self.peek()[1] == "(":
                self.take()
                arg = self.expr()
                self.expect(")")
                if val == "abs":
                    return Abs(arg)
                if val == "exp":
                    return Exp(arg)
                if val == "log":
                    return Log(arg)
                if val == "sqrt":
                    return Pow(arg, Const(0.5))
                self.error(f"unknown function {val!r}", t)
            if val == "x":
                return X
            if val == "pi":
                return Const(math.pi)
            if val == "inf":
                return Const(math.inf)
            return Param(val)
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if val == "|":
            e = self.expr()
            self.expect("|")
            return Abs(e)
        self.error(f"unexpected {val or 'end of input'!r}", t)


def parse_expr(text: str, line: int = 0, col0: int = 0) -> Expr:
    return _Parser(text, line, col0).parse()


# ---------------------------------------------------------------- evaluation

def constant_value(e: Expr, params: Mapping[str, float] | None = None) -> float:
    if depends_on_x(e):
        raise ValueError(f"{to_text(e)} depends on x")
    return float(evaluate(e, 0.0, params))


def evaluate(e: Expr, x: float, params: Mapping[str, float] | None = None) -> float:
    """Strict scalar evaluation; domain violations raise DomainError."""
    params = params or {}
    return _eval(e, float(x), params)


def _eval(e: Expr, x: float, params) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Param):
        if e.name not in params:
            raise DomainError(f"unbound parameter {e.name!r}", e)
        return float(params[e.name])
    if isinstance(e, Neg):
        return -_eval(e.arg, x, params)
    if isinstance(e, Add):
        return _eval(e.left, x, params) + _eval(e.right, x, params)
    if isinstance(e, Sub):
        return _eval(e.left, x, params) - _eval(e.right, x, params)
    if isinstance(e, Mul):
        return _eval(e.left, x, params) * _eval(e.right, x, params)
    if isinstance(e, Div):
        num = _eval(e.left, x, params)
        den = _eval(e.right, x, params)
        if den == 0.0:
            raise DomainError("division by zero", e)
        return num / den
    if isinstance(e, Pow):
        b = _eval(e.base, x, params)
        k = _eval(e.exponent, x, params)
        if b == 0.0 and k < 0:
            raise DomainError("zero to a negative power", e)
        if b < 0 and not float(k).is_integer():
            raise DomainError("non-integer power of a negative number", e)
        try:
            return math.pow(b, k)
        except OverflowError:
            return math.inf if b > 0 or float(k) % 2 == 0 else -math.inf
    if isinstance(e, Abs):
        return abs(_eval(e.arg, x, params))
    if isinstance(e, Exp):
        try:
            return math.exp(_eval(e.arg, x, params))
        except OverflowError:
            return math.inf
    if isinstance(e, Log):
        a = _eval(e.arg, x, params)
        if a <= 0.0:
            raise DomainError("logarithm of a non-positive number", e)
        return math.log(a)
    raise TypeError(f"unknown node {e!r}")


_CANCEL = 16 * np.finfo(float).eps


def _cancel_floor(op):
    # a sum that is pure rounding noise of its operands becomes an exact zero
    def f(a, b):
        out = op(a, b)
        noise = np.abs(out) <= _CANCEL * (np.abs(a) + np.abs(b))
        return np.where(noise, 0.0, out)
    return f


def _compile(e: Expr, params, clean: bool = False) -> Callable:
    if isinstance(e, Const):
        v = e.value
        return lambda x: np.full_like(x, v, dtype=float)
    if isinstance(e, Var):
        return lambda x: x
    if isinstance(e, Param):
        v = float(params[e.name])
        return lambda x: np.full_like(x, v, dtype=float)
    if isinstance(e, Neg):
        f = _compile(e.arg, params, clean)
        return lambda x: -f(x)
    if isinstance(e, _BINARY):
        # constants on either side stay scalars
        f, g = _compile(e.left, params, clean), _compile(e.right, params, clean)
        lc = _scalar(e.left, params)
        rc = _scalar(e.right, params)
        op = {Add: np.add, Sub: np.subtract, Mul: np.multiply, Div: np.divide}[type(e)]
        if clean and isinstance(e, (Add, Sub)):
            op = _cancel_floor(op)
        if lc is not None:
            return lambda x: op(lc, g(x))
        if rc is not None:
            return lambda x: op(f(x), rc)
        return lambda x: op(f(x), g(x))
    if isinstance(e, Pow):
        f = _compile(e.base, params, clean)
        k = constant_value(e.exponent, params)
        if k == 1.0:
            return f
        if k == 2.0:
            return lambda x: np.square(f(x))
        if k == 0.5:
            return lambda x: np.sqrt(f(x))
        return lambda x: np.power(f(x), k)
    if isinstance(e, Abs):
        f = _compile(e.arg, params, clean)
        return lambda x: np.abs(f(x))
    if isinstance(e, Exp):
        f = _compile(e.arg, params, clean)
        return lambda x: np.exp(f(x))
    if isinstance(e, Log):
        f = _compile(e.arg, params, clean)
        return lambda x: np.log(f(x))
    raise TypeError(f"unknown node {e!r}")


def _scalar(e: Expr, params):
    if depends_on_x(e):
        return None
    with np.errstate(all="ignore"):
        try:
            return float(_eval(e, 0.0, params))
        except DomainError:
            return np.nan


@lru_cache(maxsize=4096)
def _compiled(e: Expr, items: tuple, clean: bool) -> Callable:
    return _compile(e, dict(items), clean)


def vectorize(e: Expr, params: Mapping[str, float] | None = None,
              clean: bool = False) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized non-raising evaluator; domain violations give nan or inf.

    With clean=True, sums and differences that are within a few ulps of their
    operands' magnitude are returned as exact zeros.
    """
    f = _compiled(e, tuple(sorted((params or {}).items())), clean)

    def g(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return f(x)
    return g


# ---------------------------------------------------------------- problem spec

@dataclass(frozen=True)
class AsymDecl:
    """Declared leading-order behaviour C*exp(a*u^gamma)*u^p*L^q of a coefficient."""

    C: Expr
    a: Expr = Const(0.0)
    gamma: Expr = Const(0.0)
    p: Expr = Const(0.0)
    q: Expr = Const(0.0)

    def values(self, params: Mapping[str, float]) -> tuple[float, float, float, float, float]:
        return tuple(constant_value(getattr(self, k), params) for k in ("C", "a", "gamma", "p", "q"))

    def text(self) -> str:
        parts = [f"C={to_text(self.C)}"]
        for k in ("a", "gamma", "p", "q"):
            v = getattr(self, k)
            if v != Const(0.0):
                parts.append(f"{k}={to_text(v)}")
        return " ".join(parts)


@dataclass(frozen=True)
class EndpointAsymptotic:
    endpoint: str
    mu: AsymDecl | None = None
    sigma: AsymDecl | None = None
    b: AsymDecl | None = None


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Interval, start point, coefficients (mu, sigma, b) and optional extras.

    `mutilde`/`sigmatilde` describe a second diffusion for pair comparisons;
    `rate` is the risk-free rate of a local-volatility model.
    """

    interval: tuple[float, float]
    x0_expr: Expr
    mu: Expr
    sigma: Expr
    b: Expr = Const(0.0)
    params: Mapping[str, float] = field(default_factory=dict)
    asymptotics: Mapping[tuple[str, str], AsymDecl] = field(default_factory=dict)
    c_expr: Expr | None = None
    mutilde: Expr | None = None
    sigmatilde: Expr | None = None
    rate: Expr | None = None
    param_order: tuple[str, ...] = ()

    @property
    def l(self) -> float:
        return self.interval[0]

    @property
    def r(self) -> float:
        return self.interval[1]

    @property
    def x0(self) -> float:
        return constant_value(self.x0_expr, self.params)

    @property
    def c(self) -> float:
        return self.x0 if self.c_expr is None else constant_value(self.c_expr, self.params)

    @property
    def is_pair(self) -> bool:
        return self.mutilde is not None or self.sigmatilde is not None

    def coefficient(self, name: str) -> Expr:
        if name == "mutilde":
            return self.mutilde if self.mutilde is not None else self.mu
        if name == "sigmatilde":
            return self.sigmatilde if self.sigmatilde is not None else self.sigma
        return getattr(self, name)

    def fn(self, name_or_expr) -> Callable[[np.ndarray], np.ndarray]:
        e = self.coefficient(name_or_expr) if isinstance(name_or_expr, str) else name_or_expr
        return vectorize(e, self.params)

    def declared(self, side: str, name: str) -> AsymDecl | None:
        return self.asymptotics.get((side, name))

    def endpoint_asymptotic(self, side: str) -> EndpointAsymptotic:
        return EndpointAsymptotic(side, self.declared(side, "mu"), self.declared(side, "sigma"),
                                  self.declared(side, "b"))

    def with_params(self, validate: bool = True, **values) -> "ProblemSpec":
        unknown = set(values) - set(self.params)
        if unknown:
            raise ValidationError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        params = dict(self.params)
        params.update({k: float(v) for k, v in values.items()})
        spec = replace(self, params=params)
        if validate:
            spec.validate()
        return spec

    def with_params_unchecked(self, **values) -> "ProblemSpec":
        params = dict(self.params)
        params.update({k: float(v) for k, v in values.items()})
        return replace(self, params=params)

    def validate(self) -> "ProblemSpec":
        validate(self)
        return self

    def to_text(self) -> str:
        return print_problem(self)


def _fmt_end(v: float) -> str:
    return _num(v)


def print_problem(spec: ProblemSpec) -> str:
    lines = [f"interval = ({_fmt_end(spec.l)}, {_fmt_end(spec.r)})"]
    order = list(spec.param_order) + [k for k in spec.params if k not in spec.param_order]
    for k in order:
        lines.append(f"param {k} = {_num(spec.params[k])}")
    lines.append(f"x0 = {to_text(spec.x0_expr)}")
    if spec.c_expr is not None:
        lines.append(f"c = {to_text(spec.c_expr)}")
    for name in COEFFICIENTS:
        e = getattr(spec, name)
        if e is not None:
            lines.append(f"{name} = {to_text(e)}")
    if spec.rate is not None:
        lines.append(f"rate = {to_text(spec.rate)}")
    for (side, name), decl in spec.asymptotics.items():
        lines.append(f"asym {side} {name} = {decl.text()}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- config grammar

_ASYM_KEY = re.compile(r"\b(C|a|gamma|p|q)\s*=")


def _split_statements(text: str):
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        col = 0
        for piece in body.split(";"):
            lead = len(piece) - len(piece.lstrip())
            if piece.strip():
                yield ln, col + lead, piece.strip()
            col += len(piece) + 1


def _parse_endpoint(tok: str, ln: int, col: int, text: str) -> float:
    t = tok.strip().lower()
    if t in ("inf", "+inf", "infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    try:
        return float(t)
    except ValueError:
        raise ConfigSyntaxError(f"bad interval endpoint {tok!r}", ln, col, text) from None


def parse_problem(text: str, params: Mapping[str, float] | None = None,
                  validate: bool = True) -> ProblemSpec:
    """Parse a configuration document into a validated ProblemSpec."""
    values: dict = {}
    bound: dict[str, float] = {}
    order: list[str] = []
    asym: dict = {}
    for ln, col, stmt in _split_statements(text):
        if "=" not in stmt:
            raise ConfigSyntaxError(f"expected 'key = value', got {stmt!r}", ln, col + 1, stmt)
        key, rhs = stmt.split("=", 1)
        rhs_col = col + len(key) + 2
        words = key.split()
        if not words:
            raise ConfigSyntaxError("missing key", ln, col + 1, stmt)
        head = words[0]
        if head == "param":
            if len(words) != 2 or not re.fullmatch(r"[A-Za-z_]\w*", words[1]):
                raise ConfigSyntaxError("expected 'param <name> = <value>'", ln, col + 1, stmt)
            name = words[1]
            if name in ("x", "pi", "inf"):
                raise ConfigSyntaxError(f"reserved name {name!r}", ln, col + 1, stmt)
            e = parse_expr(rhs, ln, rhs_col)
            try:
                bound[name] = constant_value(e, bound)
            except (DomainError, ValueError) as exc:
                raise ConfigSyntaxError(f"parameter {name}: {exc}", ln, rhs_col, stmt) from None
            order.append(name)
            continue
        if head == "asym":
            if len(words) != 3 or words[1] not in (LEFT, RIGHT) or words[2] not in COEFFICIENTS:
                raise ConfigSyntaxError("expected 'asym <left|right> <mu|sigma|b> = C=... '", ln, col + 1, stmt)
            asym[(words[1], words[2])] = _parse_asym(rhs, ln, rhs_col, stmt)
            continue
        if len(words) != 1:
            raise ConfigSyntaxError(f"unknown statement {key.strip()!r}", ln, col + 1, stmt)
        k = {"J": "interval"}.get(head, head)
        if k in values:
            raise ConfigSyntaxError(f"duplicate key {head!r}", ln, col + 1, stmt)
        if k == "interval":
            m = re.fullmatch(r"\s*[\(\[]\s*([^,]+),\s*([^\)\]]+)[\)\]]\s*", rhs)
            if not m:
                raise ConfigSyntaxError("expected '(L, R)'", ln, rhs_col, stmt)
            values[k] = (_parse_endpoint(m.group(1), ln, rhs_col, stmt),
                         _parse_endpoint(m.group(2), ln, rhs_col, stmt))
        elif k in ("x0", "c", "rate") or k in COEFFICIENTS:
            values[k] = parse_expr(rhs, ln, rhs_col)
        else:
            raise ConfigSyntaxError(f"unknown key {head!r}", ln, col + 1, stmt)
    for req in ("interval", "x0", "mu", "sigma"):
        if req not in values:
            raise ValidationError(f"missing required key {req!r}")
    if params:
        for k, v in params.items():
            if k not in bound:
                order.append(k)
            bound[k] = float(v)
    spec = ProblemSpec(
        interval=values["interval"], x0_expr=values["x0"], mu=values["mu"],
        sigma=values["sigma"], b=values.get("b", Const(0.0)), params=bound,
        asymptotics=asym, c_expr=values.get("c"), mutilde=values.get("mutilde"),
        sigmatilde=values.get("sigmatilde"), rate=values.get("rate"),
        param_order=tuple(order))
    if validate:
        spec.validate()
    return spec


def _parse_asym(rhs: str, ln: int, col: int, stmt: str) -> AsymDecl:
    marks = list(_ASYM_KEY.finditer(rhs))
    if not marks or rhs[:marks[0].start()].strip():
        raise ConfigSyntaxError("expected 'C=<value> [a=..] [gamma=..] [p=..] [q=..]'", ln, col, stmt)
    fields_: dict[str, Expr] = {}
    for i, m in enumerate(marks):
        end = marks[i + 1].start() if i + 1 < len(marks) else len(rhs)
        name = m.group(1)
        if name in fields_:
            raise ConfigSyntaxError(f"duplicate field {name!r}", ln, col + m.start(), stmt)
        e = parse_expr(rhs[m.end():end], ln, col + m.end())
        if depends_on_x(e):
            raise ConfigSyntaxError(f"field {name} may not depend on x", ln, col + m.start(), stmt)
        fields_[name] = e
    if "C" not in fields_:
        raise ConfigSyntaxError("asymptotic declaration needs C", ln, col, stmt)
    return AsymDecl(**fields_)


def load_problem(path: str, params: Mapping[str, float] | None = None) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read(), params)


# ---------------------------------------------------------------- probe grid & validation

PROBE_POINTS = 512
PROBE_LEVELS = 4
_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)


def _theta(v: float) -> float:
    return math.atan(v)


def probe_intervals(interval: tuple[float, float]) -> list[tuple[float, float]]:
    """Compact probe intervals [l+d_k, r-d_k] in the arctan coordinate."""
    tl, tr = _theta(interval[0]), _theta(interval[1])
    width = tr - tl
    return [(tl + width * 2.0 ** (-k - 2), tr - width * 2.0 ** (-k - 2)) for k in range(PROBE_LEVELS)]


@lru_cache(maxsize=256)
def probe_grid(interval: tuple[float, float], n: int = PROBE_POINTS) -> tuple[np.ndarray, ...]:
    """Chebyshev points (in the arctan coordinate) for each probe interval."""
    j = np.arange(n)
    cheb = np.cos((2 * j + 1) * np.pi / (2 * n))[::-1]
    out = []
    for a, b in probe_intervals(interval):
        th = 0.5 * (a + b) + 0.5 * (b - a) * cheb
        out.append(np.tan(th))
    return tuple(out)


def probe_points(interval: tuple[float, float]) -> np.ndarray:
    return np.unique(np.concatenate(probe_grid(interval)))


def cell_integrals(f: Callable, grid: np.ndarray) -> np.ndarray:
    """Five-point Gauss-Legendre integral of f over each cell of the grid."""
    a, b = grid[:-1], grid[1:]
    half = 0.5 * (b - a)
    nodes = 0.5 * (a + b)[:, None] + half[:, None] * _GL_X[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    return half * (vals @ _GL_W)


def _check_integrable(spec: ProblemSpec, label: str, f: Callable) -> None:
    for grid in probe_grid(spec.interval):
        with np.errstate(all="ignore"):
            at = f(grid)
            cells = cell_integrals(f, grid)
        bad = ~np.isfinite(at)
        if bad.any():
            x = grid[np.argmax(bad)]
            raise ValidationError(f"{label} is not finite at x={x:.6g}")
        badc = ~np.isfinite(cells)
        if badc.any():
            i = int(np.argmax(badc))
            raise ValidationError(f"{label} is not locally integrable on [{grid[i]:.6g}, {grid[i + 1]:.6g}]")


def validate(spec: ProblemSpec) -> None:
    l, r = spec.interval
    if not l < r:
        raise ValidationError(f"interval needs l < r, got ({l}, {r})")
    exprs = [spec.mu, spec.sigma, spec.b, spec.x0_expr]
    exprs += [e for e in (spec.c_expr, spec.mutilde, spec.sigmatilde, spec.rate) if e is not None]
    for decl in spec.asymptotics.values():
        exprs += [decl.C, decl.a, decl.gamma, decl.p, decl.q]
    missing = set().union(*(free_params(e) for e in exprs)) - set(spec.params)
    if missing:
        raise ValidationError(f"unbound parameter(s): {', '.join(sorted(missing))}")
    for e in (spec.x0_expr, spec.c_expr, spec.rate):
        if e is not None and depends_on_x(e):
            raise ValidationError(f"{to_text(e)} must not depend on x")
    x0 = spec.x0
    if not l < x0 < r:
        raise ValidationError(f"x0={x0} is not inside J=({l}, {r})")
    if not l < spec.c < r:
        raise ValidationError(f"reference point c={spec.c} is not inside J")
    for (side, name), decl in spec.asymptotics.items():
        vals = decl.values(spec.params)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"declared asymptotics for {name} at {side} are not finite")
        if name in ("sigma", "sigmatilde") and vals[0] == 0.0:
            raise ValidationError(f"declared asymptotics for {name} at {side} need a nonzero constant")
    pairs = [("mu", "sigma")]
    if spec.is_pair:
        pairs.append(("mutilde", "sigmatilde"))
    for mname, sname in pairs:
        sig = spec.fn(sname)
        mu = spec.fn(mname)
        for grid in probe_grid(spec.interval):
            with np.errstate(all="ignore"):
                s = sig(grid)
            if np.any(s == 0.0):
                raise ValidationError(f"{sname} vanishes on the probe grid (x={grid[np.argmax(s == 0.0)]:.6g})")
        _check_integrable(spec, f"1/{sname}^2", lambda x, sig=sig: 1.0 / sig(x) ** 2)
        _check_integrable(spec, f"{mname}/{sname}^2", lambda x, sig=sig, mu=mu: np.abs(mu(x)) / sig(x) ** 2)
    sig, b = spec.fn("sigma"), spec.fn("b")
    _check_integrable(spec, "b^2/sigma^2", lambda x: b(x) ** 2 / sig(x) ** 2)


def is_b_zero_ae(spec: ProblemSpec) -> bool:
    """b vanishes on the whole probe grid and no nonzero asymptotics are declared."""
    for side in (LEFT, RIGHT):
        decl = spec.declared(side, "b")
        if decl is not None and decl.values(spec.params)[0] != 0.0:
            return False
    if spec.b == Const(0.0):
        return True
    with np.errstate(all="ignore"):
        vals = spec.fn("b")(probe_points(spec.interval))
    return bool(np.all(vals == 0.0))
