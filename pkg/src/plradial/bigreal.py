"""Arbitrary-precision real scalars with an explicit decimal precision.

This module wraps mpmath's low-level ``libmp`` layer.  A :class:`BigReal`
is an immutable pair (mantissa/exponent value, precision in decimal
digits); every operation passes an explicit binary precision derived from
its operands instead of consulting a global context.  Identical inputs
therefore always produce bit-identical results, and instances can be
shared freely across threads.

Precision rules:

* each value carries its own precision, at least :data:`MIN_PRECISION`
  decimal digits;
* binary operations round to the larger of the two operand precisions;
* ``int`` and :class:`fractions.Fraction` operands mix freely and are
  converted at the partner's precision (ints exactly, rationals correctly
  rounded once).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from mpmath.libmp import (
    dps_to_prec,
    from_int,
    from_rational,
    from_str,
    fzero,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_cos,
    mpf_div,
    mpf_exp,
    mpf_log,
    mpf_mul,
    mpf_neg,
    mpf_pos,
    mpf_pow,
    mpf_pow_int,
    mpf_sin,
    mpf_sqrt,
    mpf_sub,
    round_nearest,
    to_float,
    to_str,
)

from .errors import DomainError

__all__ = ["BigReal", "MIN_PRECISION", "check_precision"]

#: Smallest admissible working precision, in decimal digits.
MIN_PRECISION = 32

_RND = round_nearest

Scalar = Union["BigReal", int, Fraction]


def check_precision(digits: int) -> None:
    """Reject precisions that are not ints of at least MIN_PRECISION digits."""
    if not isinstance(digits, int) or isinstance(digits, bool):
        raise TypeError("precision must be an int (decimal digits)")
    if digits < MIN_PRECISION:
        raise ValueError(
            f"precision must be at least {MIN_PRECISION} decimal digits, got {digits}"
        )


def _bits(digits: int) -> int:
    return dps_to_prec(digits)


class BigReal:
    """An immutable arbitrary-precision real number.

    Construct from an ``int``, a :class:`fractions.Fraction`, a decimal
    string (``"0.125"``, ``"2.5e-3"``), or another :class:`BigReal`;
    the value is rounded to ``precision`` decimal digits.
    """

    __slots__ = ("_mpf", "precision")

    def __init__(self, value: Scalar | str, precision: int):
        check_precision(precision)
        if isinstance(value, BigReal):
            raw = mpf_pos(value._mpf, _bits(precision), _RND)
        elif isinstance(value, bool):
            raise TypeError("cannot build a BigReal from a bool")
        elif isinstance(value, int):
            raw = from_int(value, _bits(precision), _RND)
        elif isinstance(value, Fraction):
            raw = from_rational(
                value.numerator, value.denominator, _bits(precision), _RND
            )
        elif isinstance(value, str):
            raw = from_str(value, _bits(precision), _RND)
        else:
            raise TypeError(f"cannot build a BigReal from {type(value).__name__}")
        self._mpf = raw
        self.precision = precision

    @classmethod
    def _wrap(cls, raw, precision: int) -> "BigReal":
        out = object.__new__(cls)
        out._mpf = raw
        out.precision = precision
        return out

    @classmethod
    def zero(cls, precision: int) -> "BigReal":
        return cls(0, precision)

    @classmethod
    def one(cls, precision: int) -> "BigReal":
        return cls(1, precision)

    def with_precision(self, precision: int) -> "BigReal":
        """Round (or widen) this value to a new working precision."""
        return BigReal(self, precision)

    # -- conversions ---------------------------------------------------

    def to_fraction(self) -> Fraction:
        """The exact rational value of this number (always finite)."""
        sign, man, exp, _ = self._mpf
        if not man:
            if exp:
                raise ValueError("not a finite number")
            return Fraction(0)
        num = -int(man) if sign else int(man)
        return Fraction(num) * Fraction(2) ** exp

    def to_decimal(self, digits: int | None = None) -> str:
        """Decimal string with ``digits`` significant digits (default: own precision)."""
        return to_str(self._mpf, digits if digits is not None else self.precision)

    def __float__(self) -> float:
        return to_float(self._mpf)

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return self._mpf == fzero

    def sign(self) -> int:
        """-1, 0 or +1."""
        return mpf_cmp(self._mpf, fzero)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ----------------------------------------------------

    def _coerced(self, other) -> "BigReal | None":
        if isinstance(other, BigReal):
            return other
        if isinstance(other, bool):
            return None
        if isinstance(other, (int, Fraction)):
            return BigReal(other, self.precision)
        return None

    def _binary(self, other, op) -> "BigReal":
        rhs = self._coerced(other)
        if rhs is None:
            return NotImplemented
        digits = max(self.precision, rhs.precision)
        return BigReal._wrap(op(self._mpf, rhs._mpf, _bits(digits), _RND), digits)

    def __add__(self, other):
        return self._binary(other, mpf_add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, mpf_sub)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b, prec, rnd: mpf_sub(b, a, prec, rnd))

    def __mul__(self, other):
        return self._binary(other, mpf_mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        rhs = self._coerced(other)
        if rhs is None:
            return NotImplemented
        if rhs.is_zero():
            raise ZeroDivisionError("BigReal division by zero")
        digits = max(self.precision, rhs.precision)
        return BigReal._wrap(mpf_div(self._mpf, rhs._mpf, _bits(digits), _RND), digits)

    def __rtruediv__(self, other):
        lhs = self._coerced(other)
        if lhs is None:
            return NotImplemented
        return lhs / self

    def __neg__(self) -> "BigReal":
        return BigReal._wrap(mpf_neg(self._mpf), self.precision)

    def __abs__(self) -> "BigReal":
        return BigReal._wrap(mpf_abs(self._mpf), self.precision)

    # -- comparisons ---------------------------------------------------

    def _cmp(self, other) -> int | None:
        if isinstance(other, BigReal):
            return mpf_cmp(self._mpf, other._mpf)
        if isinstance(other, bool):
            return None
        if isinstance(other, int):
            return mpf_cmp(self._mpf, from_int(other))
        if isinstance(other, Fraction):
            mine = self.to_fraction()
            return -1 if mine < other else (0 if mine == other else 1)
        return None

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __ne__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c != 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        return hash(self.to_fraction())

    # -- elementary functions -------------------------------------------

    def _unary(self, op) -> "BigReal":
        return BigReal._wrap(op(self._mpf, _bits(self.precision), _RND), self.precision)

    def exp(self) -> "BigReal":
        return self._unary(mpf_exp)

    def ln(self) -> "BigReal":
        if self.sign() <= 0:
            raise DomainError("ln requires a positive argument")
        return self._unary(mpf_log)

    def sin(self) -> "BigReal":
        return self._unary(mpf_sin)

    def cos(self) -> "BigReal":
        return self._unary(mpf_cos)

    def sqrt(self) -> "BigReal":
        if self.sign() < 0:
            raise DomainError("sqrt requires a nonnegative argument")
        return self._unary(mpf_sqrt)

    def pow(self, exponent: Scalar) -> "BigReal":
        """``self ** exponent``.

        Integer exponents use exact binary powering (any base); all other
        exponents go through exp/log and require a positive base.  Zero to
        a positive fractional power is zero.
        """
        if isinstance(exponent, bool):
            raise TypeError("exponent must not be a bool")
        if isinstance(exponent, int):
            return self._pow_int(exponent)
        if isinstance(exponent, Fraction):
            if exponent.denominator == 1:
                return self._pow_int(exponent.numerator)
            exp_big = BigReal(exponent, self.precision)
        elif isinstance(exponent, BigReal):
            exp_big = exponent
        else:
            raise TypeError(f"unsupported exponent type {type(exponent).__name__}")
        digits = max(self.precision, exp_big.precision)
        s = self.sign()
        if s < 0:
            raise DomainError("fractional power of a negative number")
        if s == 0:
            if exp_big.sign() > 0:
                return BigReal.zero(digits)
            raise DomainError("zero cannot be raised to a nonpositive fractional power")
        return BigReal._wrap(
            mpf_pow(self._mpf, exp_big._mpf, _bits(digits), _RND), digits
        )

    __pow__ = pow

    def _pow_int(self, k: int) -> "BigReal":
        if k < 0 and self.is_zero():
            raise ZeroDivisionError("zero cannot be raised to a negative power")
        return BigReal._wrap(mpf_pow_int(self._mpf, k, _bits(self.precision), _RND), self.precision)

    # -- display ---------------------------------------------------------

    def __repr__(self):
        shown = min(self.precision, 20)
        return f"BigReal({self.to_decimal(shown)!r}, precision={self.precision})"

    def __str__(self):
        return self.to_decimal()
