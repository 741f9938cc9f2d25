"""Parsing and Taylor expansion of the source nonlinearity f(u).

The accepted grammar (whitespace is insignificant)::

    expr      := term (('+' | '-') term)*
    term      := factor ('*' factor)*
    factor    := rational
               | 'u' ('^' srational)?
               | ('exp' | 'sin' | 'cos' | 'log') '(' expr ')'
               | '(' expr ')'
               | '-' factor
    rational  := integer ('/' positive-integer)?
    srational := '-'? rational

Numbers must be exact rationals: decimal literals are rejected outright so
that no binary-float rounding can enter the coefficient pipeline through the
front door.  The grammar is a versioned public contract; extending it means
extending this module and its tests together.

Expansion of a parsed expression around a point is a structural recursion:
rationals become constant polynomials, ``u`` becomes ``alpha + t``, powers
of ``u`` reuse :meth:`~plradial.series.Series.real_pow` (or exact binary
powering for integer exponents), and the elementary functions compose their
own Taylor coefficients with the inner series via
:func:`~plradial.series.compose_analytic`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .bigreal import BigReal, check_precision
from .errors import (
    DecimalLiteralRejected,
    NegativeBaseFractionalPower,
    NonAnalyticPoint,
    ParseError,
)
from .series import Series, compose_analytic

__all__ = [
    "BinOp",
    "Call",
    "Const",
    "Neg",
    "Nonlinearity",
    "UPower",
    "parse",
    "parse_rational",
    "to_source",
]

FUNCTIONS = ("exp", "sin", "cos", "log")


# -- syntax tree ------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class UPower:
    """``u`` raised to an exact rational exponent (1 for bare ``u``)."""

    exponent: Fraction


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


Node = Union[Const, UPower, Call, Neg, BinOp]


# -- lexer -------------------------------------------------------------------


class _Token(NamedTuple):
    kind: str  # "int" | "name" | "op" | "end"
    text: str
    pos: int


_DECIMAL_HINT = (
    'decimal literals are not supported: enter numbers as exact fractions '
    '("1/2" rather than "0.5")'
)


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                raise DecimalLiteralRejected(_DECIMAL_HINT, position=i)
            tokens.append(_Token("int", source[i:j], i))
            i = j
            continue
        if ch == ".":
            raise DecimalLiteralRejected(_DECIMAL_HINT, position=i)
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("name", source[i:j], i))
            i = j
            continue
        if ch in "+-*/^()":
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", position=i)
    tokens.append(_Token("end", "", n))
    return tokens


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._pos = 0

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _advance(self) -> _Token:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _match_op(self, *symbols: str) -> bool:
        tok = self._peek()
        return tok.kind == "op" and tok.text in symbols

    def _expect_op(self, symbol: str) -> None:
        tok = self._advance()
        if tok.kind != "op" or tok.text != symbol:
            raise ParseError(f"expected {symbol!r}", position=tok.pos)

    def expect_end(self) -> None:
        tok = self._peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", position=tok.pos)

    def parse_expr(self) -> Node:
        node = self.parse_term()
        while self._match_op("+", "-"):
            op = self._advance().text
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Node:
        node = self.parse_factor()
        while self._match_op("*"):
            self._advance()
            node = BinOp("*", node, self.parse_factor())
        return node

    def parse_factor(self) -> Node:
        tok = self._peek()
        if tok.kind == "op" and tok.text == "-":
            self._advance()
            return Neg(self.parse_factor())
        if tok.kind == "int":
            return Const(self.rational(signed=False))
        if tok.kind == "name":
            self._advance()
            if tok.text == "u":
                if self._match_op("^"):
                    self._advance()
                    return UPower(self.rational(signed=True))
                return UPower(Fraction(1))
            if tok.text in FUNCTIONS:
                self._expect_op("(")
                arg = self.parse_expr()
                self._expect_op(")")
                return Call(tok.text, arg)
            raise ParseError(
                f"unknown name {tok.text!r} (supported: u, {', '.join(FUNCTIONS)})",
                position=tok.pos,
            )
        if tok.kind == "op" and tok.text == "(":
            self._advance()
            node = self.parse_expr()
            self._expect_op(")")
            return node
        raise ParseError(f"expected a factor, found {tok.text or 'end of input'!r}", position=tok.pos)

    def rational(self, signed: bool) -> Fraction:
        sign = 1
        if signed and self._match_op("-"):
            self._advance()
            sign = -1
        tok = self._advance()
        if tok.kind != "int":
            raise ParseError("expected an integer", position=tok.pos)
        numerator = int(tok.text)
        if self._match_op("/"):
            self._advance()
            den_tok = self._advance()
            if den_tok.kind != "int":
                raise ParseError("expected an integer denominator", position=den_tok.pos)
            denominator = int(den_tok.text)
            if denominator == 0:
                raise ParseError("denominator must be positive", position=den_tok.pos)
            return Fraction(sign * numerator, denominator)
        return Fraction(sign * numerator)


# -- printer -----------------------------------------------------------------


def _product_operand(node: Node) -> str:
    text = to_source(node)
    if isinstance(node, BinOp):
        return f"({text})"
    return text


def to_source(node: Node) -> str:
    """Render a syntax tree back to grammar-conformant text.

    Parentheses are inserted wherever precedence or associativity would
    otherwise change, so ``parse(to_source(ast))`` reproduces ``ast``.
    """
    if isinstance(node, Const):
        return str(node.value)
    if isinstance(node, UPower):
        return "u" if node.exponent == 1 else f"u^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        inner = to_source(node.arg)
        if isinstance(node.arg, BinOp):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        if node.op == "*":
            return f"{_product_operand(node.left)} * {_product_operand(node.right)}"
        right = to_source(node.right)
        if isinstance(node.right, BinOp) and node.right.op in "+-":
            right = f"({right})"
        return f"{to_source(node.left)} {node.op} {right}"
    raise TypeError(f"not a syntax node: {node!r}")


# -- expansion ----------------------------------------------------------------


def _int_pow(base: Series, k: int) -> Series:
    """base**k for k >= 1 by binary powering (truncation order is preserved)."""
    result: Series | None = None
    square = base
    while True:
        if k & 1:
            result = square if result is None else result * square
        k >>= 1
        if not k:
            return result
        square = square * square


def _u_power_series(exponent: Fraction, alpha: BigReal, order: int, precision: int) -> Series:
    base_coeffs = [alpha, BigReal.one(precision)][: order + 1]
    base = Series(base_coeffs, precision).extend_with_zeros(order)
    if exponent.denominator == 1:
        k = exponent.numerator
        if k == 0:
            return Series.constant(1, order, precision)
        if k > 0:
            return _int_pow(base, k)
        if alpha.sign() == 0:
            raise NonAnalyticPoint(f"u^{exponent} cannot be expanded at u = 0")
        if alpha.sign() > 0:
            return base.real_pow(exponent)
        flipped = (-base).real_pow(exponent)
        return flipped if k % 2 == 0 else -flipped
    if alpha.sign() <= 0:
        raise NegativeBaseFractionalPower(
            f"u^{exponent} requires a positive expansion point, got {alpha.to_decimal(8)}"
        )
    return base.real_pow(exponent)


def _elementary_taylor(func: str, x0: BigReal, order: int, precision: int) -> list[BigReal]:
    """Taylor coefficients of exp/sin/cos/log at x0, through t^order."""
    one = BigReal.one(precision)
    if func == "exp":
        out = [x0.exp()]
        for j in range(1, order + 1):
            out.append(out[-1] / j)
        return out
    if func in ("sin", "cos"):
        s, c = x0.sin(), x0.cos()
        cycle = (s, c, -s, -c) if func == "sin" else (c, -s, -c, s)
        out = []
        inv_factorial = one
        for j in range(order + 1):
            if j:
                inv_factorial = inv_factorial / j
            out.append(cycle[j % 4] * inv_factorial)
        return out
    if func == "log":
        if x0.sign() <= 0:
            raise NonAnalyticPoint(
                f"log requires a positive argument at the expansion point, got {x0.to_decimal(8)}"
            )
        out = [x0.ln()]
        power = one
        for j in range(1, order + 1):
            power = power / x0  # x0^(-j)
            term = power / j
            out.append(term if j % 2 == 1 else -term)
        return out
    raise ValueError(f"unsupported function {func!r}")


def _series_eval(node: Node, alpha: BigReal, order: int, precision: int) -> Series:
    if isinstance(node, Const):
        return Series.constant(node.value, order, precision)
    if isinstance(node, UPower):
        return _u_power_series(node.exponent, alpha, order, precision)
    if isinstance(node, Neg):
        return -_series_eval(node.arg, alpha, order, precision)
    if isinstance(node, BinOp):
        left = _series_eval(node.left, alpha, order, precision)
        right = _series_eval(node.right, alpha, order, precision)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        return left * right
    if isinstance(node, Call):
        inner = _series_eval(node.arg, alpha, order, precision)
        outer = _elementary_taylor(node.func, inner.coefficient(0), order, precision)
        return compose_analytic(outer, inner)
    raise TypeError(f"not a syntax node: {node!r}")


def _scalar_eval(node: Node, x: BigReal) -> BigReal:
    if isinstance(node, Const):
        return BigReal(node.value, x.precision)
    if isinstance(node, UPower):
        e = node.exponent
        if e.denominator == 1:
            k = e.numerator
            if k < 0 and x.sign() == 0:
                raise NonAnalyticPoint(f"u^{e} is undefined at u = 0")
            return x.pow(k)
        if x.sign() <= 0:
            raise NegativeBaseFractionalPower(
                f"u^{e} requires a positive argument, got {x.to_decimal(8)}"
            )
        return x.pow(e)
    if isinstance(node, Neg):
        return -_scalar_eval(node.arg, x)
    if isinstance(node, BinOp):
        left = _scalar_eval(node.left, x)
        right = _scalar_eval(node.right, x)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        return left * right
    if isinstance(node, Call):
        inner = _scalar_eval(node.arg, x)
        if node.func == "exp":
            return inner.exp()
        if node.func == "sin":
            return inner.sin()
        if node.func == "cos":
            return inner.cos()
        if inner.sign() <= 0:
            raise NonAnalyticPoint(
                f"log requires a positive argument, got {inner.to_decimal(8)}"
            )
        return inner.ln()
    raise TypeError(f"not a syntax node: {node!r}")


def _contains_u(node: Node) -> bool:
    if isinstance(node, UPower):
        return True
    if isinstance(node, (Const,)):
        return False
    if isinstance(node, Neg):
        return _contains_u(node.arg)
    if isinstance(node, Call):
        return _contains_u(node.arg)
    return _contains_u(node.left) or _contains_u(node.right)


# -- public wrapper -------------------------------------------------------------


@dataclass(frozen=True)
class Nonlinearity:
    """A parsed source term f(u)."""

    ast: Node
    source: str

    def canonical_source(self) -> str:
        """Grammar-conformant text that parses back to the same tree."""
        return to_source(self.ast)

    @property
    def is_constant(self) -> bool:
        """True when the expression never mentions u."""
        return not _contains_u(self.ast)

    def taylor_at(self, alpha: BigReal | int | Fraction, order: int, precision: int) -> list[BigReal]:
        """Taylor coefficients g_0..g_order of f at the point ``alpha``.

        g_j is the j-th derivative divided by j!; expanding f(alpha + t)
        gives exactly ``sum g_j t^j`` through t^order.
        """
        check_precision(precision)
        if order < 0:
            raise ValueError("order must be nonnegative")
        point = alpha if isinstance(alpha, BigReal) else BigReal(alpha, precision)
        point = point.with_precision(precision)
        return list(_series_eval(self.ast, point, order, precision).coefficients)

    def value_at(self, x: BigReal | int | Fraction, precision: int) -> BigReal:
        """Evaluate f at a numeric point (scalar recursion, no series)."""
        check_precision(precision)
        point = x if isinstance(x, BigReal) else BigReal(x, precision)
        return _scalar_eval(self.ast, point.with_precision(precision))

    def __str__(self):
        return self.source


def parse(source: str) -> Nonlinearity:
    """Parse f(u) source text; raises ParseError (with position) on bad input."""
    parser = _Parser(_tokenize(source))
    ast = parser.parse_expr()
    parser.expect_end()
    return Nonlinearity(ast=ast, source=source)


def parse_rational(text: str) -> Fraction:
    """Parse an exact rational like ``41/10`` or ``-3``.

    Decimal input is rejected with the same guidance as the expression
    grammar; use this for every user-facing number entry point.
    """
    parser = _Parser(_tokenize(text))
    value = parser.rational(signed=True)
    parser.expect_end()
    return value
