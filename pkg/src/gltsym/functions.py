"""Scalar coefficient functions a(x) on [0, 1] and generating functions f(t)
on [-pi, pi]: a small expression language, a builtin registry and Fourier
coefficients by uniform quadrature.

Expression grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | 'x' | 't' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := sin | cos | exp | log | abs | sqrt

``x`` and ``t`` both name the single variable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

UNIT = "unit"
TORUS = "torus"

FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "abs": np.abs,
    "sqrt": np.sqrt,
}
VARIABLES = ("x", "t")


class ExpressionError(ValueError):
    """Syntax error or unknown identifier; ``pos`` is a 0-based offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class SingularEvaluation(ArithmeticError):
    pass


class DomainError(ValueError):
    pass


# --- AST ------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


Node = Union[Num, Var, Const, Call, Neg, BinOp]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExpressionError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ExpressionError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {val!r}", pos)
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
        kind, val, _ = self.peek()
        if kind == "op" and val in ("+", "-"):
            self.take()
            arg = self.unary()
            return Neg(arg) if val == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val in VARIABLES:
                return Var()
            if val == "pi":
                return Const("pi")
            if val in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            raise ExpressionError(f"unknown identifier {val!r}", pos)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionError(f"unexpected {val or 'end of input'!r}", pos)


def parse_ast(text: str) -> Node:
    return _Parser(text).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def unparse(node: Node, parent: int = 0) -> str:
    """Render an AST back to text that re-parses to the same AST."""
    if isinstance(node, Num):
        text = repr(node.value)
        return text
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({unparse(node.arg)})"
    if isinstance(node, Neg):
        text = "-" + unparse(node.arg, 3)
        return f"({text})" if parent > 3 else text
    prec = _PREC[node.op]
    if node.op == "^":
        left = unparse(node.left, 5)
        right = unparse(node.right, 3)
    else:
        left = unparse(node.left, prec)
        right = unparse(node.right, prec + 1)
    text = f"{left}{node.op}{right}"
    return f"({text})" if prec < parent else text


def _compile(node: Node) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(node, Num):
        v = node.value
        return lambda x: np.full(np.shape(x), v, dtype=complex)
    if isinstance(node, Var):
        return lambda x: np.asarray(x, dtype=complex)
    if isinstance(node, Const):
        return lambda x: np.full(np.shape(x), math.pi, dtype=complex)
    if isinstance(node, Call):
        f = FUNCS[node.func]
        g = _compile(node.arg)
        return lambda x: f(g(x))
    if isinstance(node, Neg):
        g = _compile(node.arg)
        return lambda x: -g(x)
    lhs = _compile(node.left)
    rhs = _compile(node.right)
    if node.op == "+":
        return lambda x: lhs(x) + rhs(x)
    if node.op == "-":
        return lambda x: lhs(x) - rhs(x)
    if node.op == "*":
        return lambda x: lhs(x) * rhs(x)
    if node.op == "/":
        return lambda x: lhs(x) / rhs(x)
    return lambda x: _power(lhs(x), rhs(x))


def _power(base, expo):
    # real base with real exponent stays on the real branch when defined
    if not np.any(base.imag) and not np.any(expo.imag):
        b, e = base.real, expo.real
        if np.all((b > 0) | (np.round(e) == e) | (b == 0)):
            return np.power(b, e).astype(complex)
    return np.power(base, expo)


# --- FunctionSpec ---------------------------------------------------------

BUILTIN = "builtin"
EXPRESSION = "expression"
EXPLICIT = "explicit"

BUILTINS = {
    # name: (expression, domain)
    "diffusion_coefficient": ("2*sin(x)+cos(2*x)", UNIT),
    "inverse_fourth_root": ("x^(-1/4)", UNIT),
    "identity": ("x", UNIT),
    "one": ("1", UNIT),
    "laplacian": ("2-2*cos(t)", TORUS),
}


@dataclass(frozen=True)
class FunctionSpec:
    """A scalar function of one variable with its domain tag.

    ``payload`` is the builtin name, the expression text, or a tuple of
    ``(index, value)`` Fourier pairs for ``kind == "explicit"``.
    """

    kind: str
    domain: str
    payload: object
    _fn: Callable = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.domain not in (UNIT, TORUS):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.kind == EXPLICIT:
            pairs = tuple((int(k), complex(v)) for k, v in self.payload)
            object.__setattr__(self, "payload", pairs)
            fn = self._fourier_fn(pairs)
        elif self.kind == EXPRESSION:
            fn = _compile(parse_ast(self.payload))
        elif self.kind == BUILTIN:
            if self.payload not in BUILTINS:
                raise ValueError(f"unknown builtin function {self.payload!r}")
            fn = _compile(parse_ast(BUILTINS[self.payload][0]))
        else:
            raise ValueError(f"unknown function kind {self.kind!r}")
        object.__setattr__(self, "_fn", fn)

    def _fourier_fn(self, pairs):
        scale = 2 * math.pi if self.domain == UNIT else 1.0
        ks = np.array([k for k, _ in pairs], dtype=float)
        cs = np.array([c for _, c in pairs], dtype=complex)

        def fn(t):
            t = np.asarray(t, dtype=float)
            return np.exp(1j * scale * np.multiply.outer(t, ks)) @ cs

        return fn

    @property
    def text(self) -> str:
        if self.kind == EXPLICIT:
            return "fourier: " + ", ".join(f"{k}:{_fmt_complex(c)}" for k, c in self.payload)
        return str(self.payload)

    @property
    def is_singular(self) -> bool:
        """True when the function blows up at an endpoint of its domain."""
        ends = [0.0, 1.0] if self.domain == UNIT else [-math.pi, math.pi]
        with np.errstate(all="ignore"):
            vals = self._fn(np.array(ends))
        return not np.all(np.isfinite(vals))

    def __call__(self, t):
        return evaluate(self, t)


def _fmt_complex(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real)
    return f"{c.real!r}{c.imag:+}i"


def parse_expr(text: str, domain: str = UNIT) -> FunctionSpec:
    return FunctionSpec(EXPRESSION, domain, text)


def builtin(name: str) -> FunctionSpec:
    return FunctionSpec(BUILTIN, BUILTINS[name][1] if name in BUILTINS else UNIT, name)


def explicit_fourier(coeffs, domain: str = TORUS) -> FunctionSpec:
    """``coeffs`` is a mapping or iterable of ``(index, value)`` pairs."""
    if isinstance(coeffs, dict):
        coeffs = coeffs.items()
    return FunctionSpec(EXPLICIT, domain, tuple(sorted(coeffs)))


def function_from_text(text: str, domain: str = UNIT) -> FunctionSpec:
    """Resolve a builtin name, a ``fourier: k:v, ...`` list or an expression."""
    text = text.strip()
    if text in BUILTINS:
        return builtin(text)
    if text.startswith("fourier:"):
        pairs = []
        body = text[len("fourier:"):].strip()
        for item in filter(None, (s.strip() for s in body.split(","))):
            k, sep, v = item.partition(":")
            if not sep:
                raise ValueError(f"bad Fourier pair {item!r}, expected index:value")
            pairs.append((int(k), parse_complex(v)))
        return explicit_fourier(pairs, domain)
    return parse_expr(text, domain)


_NUM = r"(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
_COMPLEX = re.compile(
    rf"^\s*(?:(?P<re>[+-]?{_NUM})(?P<im>[+-]{_NUM}?[ij])?|(?P<pure>[+-]?{_NUM}?[ij]))\s*$"
)


def _imag(text: str) -> float:
    body = text[:-1]
    if body in ("", "+"):
        return 1.0
    if body == "-":
        return -1.0
    return float(body)


def parse_complex(text: str) -> complex:
    """Parse ``re``, ``re+imi``, ``re-imi`` or ``imi`` (``j`` also accepted)."""
    m = _COMPLEX.match(text)
    if not m:
        raise ValueError(f"malformed complex number {text!r}")
    if m.group("pure") is not None:
        return complex(0.0, _imag(m.group("pure")))
    im = m.group("im")
    return complex(float(m.group("re")), _imag(im) if im else 0.0)


def evaluate(f: FunctionSpec, t):
    """Evaluate ``f`` pointwise; scalars in, scalar out.

    Unit-interval functions reject points outside [0, 1]; torus functions
    are wrapped periodically onto [-pi, pi).
    """
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    if f.domain == UNIT:
        if np.any((t < 0) | (t > 1)):
            raise DomainError("argument outside [0, 1]")
    elif f.kind != EXPLICIT:
        t = np.mod(t + math.pi, 2 * math.pi) - math.pi
    with np.errstate(all="ignore"):
        vals = np.asarray(f._fn(t), dtype=complex)
    if not np.all(np.isfinite(vals)):
        bad = t[~np.isfinite(vals)] if vals.ndim else t
        raise SingularEvaluation(f"{f.text} is singular at {np.ravel(bad)[0]!r}")
    return complex(vals) if scalar else vals


# --- Fourier coefficients -------------------------------------------------

@dataclass(frozen=True)
class FourierTable:
    """Coefficients ``c_k`` for ``|k| <= K``; ``coeffs[k + K]`` is ``c_k``."""

    coeffs: np.ndarray
    domain: str = TORUS

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) % 2 != 1:
            raise ValueError("Fourier table needs an odd number of centred coefficients")
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self) -> int:
        return len(self.coeffs) // 2

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.K:
            return 0j
        return complex(self.coeffs[k + self.K])

    def lookup(self, ks) -> np.ndarray:
        """Vectorized ``c_k`` with zeros outside the table."""
        ks = np.asarray(ks)
        out = np.zeros(ks.shape, dtype=complex)
        inside = np.abs(ks) <= self.K
        out[inside] = self.coeffs[ks[inside] + self.K]
        return out

    @classmethod
    def from_dict(cls, coeffs: dict, domain: str = TORUS) -> "FourierTable":
        K = max((abs(k) for k in coeffs), default=0)
        c = np.zeros(2 * K + 1, dtype=complex)
        for k, v in coeffs.items():
            c[k + K] = v
        return cls(c, domain)

    def conjugate_symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.coeffs - self.coeffs[::-1].conj()), initial=0.0))


def default_points(f: FunctionSpec) -> int:
    return 2**20 if f.is_singular else 4096


def _explicit_table(f: FunctionSpec, K: int) -> FourierTable:
    c = np.zeros(2 * K + 1, dtype=complex)
    for k, v in f.payload:
        if abs(k) <= K:
            c[k + K] += v
    return FourierTable(c, f.domain)


def fourier_coeffs_torus(f: FunctionSpec, K: int, M: int | None = None) -> FourierTable:
    """``c_k = (1/2pi) int f(t) exp(-ikt) dt`` by the M-point periodic rule.

    Exact for trigonometric polynomials of degree below ``M - K``.
    """
    if M is None:
        M = max(default_points(f), 4 * K + 4)
    if M < 4 * K + 4:
        raise ValueError(f"M={M} too small for K={K}; need M >= 4K+4")
    if f.kind == EXPLICIT:
        return _explicit_table(f, K)
    theta = -math.pi + 2 * math.pi * np.arange(M) / M
    spectrum = np.fft.fft(evaluate(f, theta)) / M
    ks = np.arange(-K, K + 1)
    # theta_0 = -pi shifts every coefficient by exp(ik pi)
    c = spectrum[ks % M] * np.where(ks % 2 == 0, 1.0, -1.0)
    return FourierTable(c, TORUS)


def fourier_coeffs_unit(a: FunctionSpec, J: int, M: int | None = None) -> FourierTable:
    """``a_j = int_0^1 a(x) exp(-2 pi i j x) dx`` by the M-panel midpoint rule.

    The midpoint rule never touches the endpoints, so integrable endpoint
    singularities such as ``x^(-1/4)`` need no special handling.
    """
    if M is None:
        M = max(default_points(a), 4 * J + 4)
    if M < 4 * J + 4:
        raise ValueError(f"M={M} too small for J={J}; need M >= 4J+4")
    if a.kind == EXPLICIT:
        return _explicit_table(a, J)
    x = (np.arange(M) + 0.5) / M
    vals = evaluate(a, x)
    js = np.arange(-J, J + 1)
    # sum_i v_i exp(-2 pi i j (i + 1/2) / M) = exp(-pi i j / M) * DFT_j
    spectrum = np.fft.fft(vals) / M
    c = spectrum[js % M] * np.exp(-1j * math.pi * js / M)
    return FourierTable(c, UNIT)
