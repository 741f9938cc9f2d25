"""Truncated power series arithmetic over :class:`~plradial.bigreal.BigReal`.

A :class:`Series` stores the coefficients ``c_0 .. c_N`` of a truncation in
a formal variable ``t``.  The order ``N`` means "coefficients beyond t^N are
unknown", not zero.  Binary operations therefore return the smaller of the
two operand orders, and multiplication never fabricates tail terms it cannot
know.  When a tail genuinely vanishes (a polynomial), say so explicitly with
:meth:`Series.extend_with_zeros`.

All coefficients of a series share one working precision; combining series
of different precisions raises :class:`~plradial.errors.PrecisionMismatch`
instead of silently rounding.

The module also provides :func:`compose_analytic`, which substitutes a
series into the Taylor expansion of an outer analytic function, and
:meth:`Series.real_pow`, which raises a series with positive constant term
to an arbitrary real power via the first-order recurrence obtained from
``P' * s = rho * s' * P``.  Both are the cancellation-sensitive kernels the
solver is built on, so they avoid any rearrangement cleverness: plain
Cauchy products and Horner loops, evaluated left to right.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

from .bigreal import BigReal, check_precision
from .errors import NonPositiveLeadingCoefficient, PrecisionMismatch

__all__ = ["Series", "compose_analytic"]

Coefficient = Union[BigReal, int, Fraction, str]


def _coerce(value: Coefficient, precision: int) -> BigReal:
    if isinstance(value, BigReal):
        return value if value.precision == precision else value.with_precision(precision)
    return BigReal(value, precision)


class Series:
    """A truncated power series with an unknown (not zero) tail."""

    __slots__ = ("_coeffs", "precision")

    def __init__(self, coefficients: Iterable[Coefficient], precision: int):
        check_precision(precision)
        coeffs = tuple(_coerce(c, precision) for c in coefficients)
        if not coeffs:
            raise ValueError("a series needs at least its constant coefficient")
        self._coeffs = coeffs
        self.precision = precision

    @classmethod
    def _wrap(cls, coeffs: tuple[BigReal, ...], precision: int) -> "Series":
        out = object.__new__(cls)
        out._coeffs = coeffs
        out.precision = precision
        return out

    @classmethod
    def constant(cls, value: Coefficient, order: int, precision: int) -> "Series":
        """The constant ``value`` as a polynomial known through t^order."""
        if order < 0:
            raise ValueError("order must be nonnegative")
        zero = BigReal.zero(precision)
        return cls._wrap((_coerce(value, precision),) + (zero,) * order, precision)

    # -- structure -------------------------------------------------------

    @property
    def order(self) -> int:
        """Largest exponent whose coefficient is known."""
        return len(self._coeffs) - 1

    @property
    def coefficients(self) -> tuple[BigReal, ...]:
        return self._coeffs

    def coefficient(self, j: int) -> BigReal:
        """The coefficient of t^j; IndexError outside the known range."""
        if not 0 <= j <= self.order:
            raise IndexError(f"coefficient index {j} outside known range 0..{self.order}")
        return self._coeffs[j]

    def truncate(self, order: int) -> "Series":
        """Forget coefficients above ``order``."""
        if not 0 <= order <= self.order:
            raise ValueError(f"cannot truncate order-{self.order} series to order {order}")
        return Series._wrap(self._coeffs[: order + 1], self.precision)

    def extend_with_zeros(self, order: int) -> "Series":
        """Declare the tail through t^order to be exactly zero.

        Only correct when this series is a polynomial whose higher terms
        genuinely vanish; it is the one deliberate escape hatch from the
        unknown-tail semantics.
        """
        if order < self.order:
            raise ValueError("extension order is below the current order")
        zero = BigReal.zero(self.precision)
        return Series._wrap(self._coeffs + (zero,) * (order - self.order), self.precision)

    def _require_compatible(self, other: "Series") -> None:
        if self.precision != other.precision:
            raise PrecisionMismatch(
                f"cannot combine series at {self.precision} and {other.precision} digits"
            )

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        self._require_compatible(other)
        n = min(self.order, other.order)
        return Series._wrap(
            tuple(self._coeffs[j] + other._coeffs[j] for j in range(n + 1)),
            self.precision,
        )

    def __sub__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        self._require_compatible(other)
        n = min(self.order, other.order)
        return Series._wrap(
            tuple(self._coeffs[j] - other._coeffs[j] for j in range(n + 1)),
            self.precision,
        )

    def __neg__(self) -> "Series":
        return Series._wrap(tuple(-c for c in self._coeffs), self.precision)

    def scale(self, factor: Coefficient) -> "Series":
        """Multiply every coefficient by a scalar (order is unchanged)."""
        if isinstance(factor, BigReal) and factor.precision != self.precision:
            raise PrecisionMismatch(
                f"scalar at {factor.precision} digits, series at {self.precision}"
            )
        c = _coerce(factor, self.precision)
        return Series._wrap(tuple(x * c for x in self._coeffs), self.precision)

    def __mul__(self, other):
        if isinstance(other, Series):
            self._require_compatible(other)
            n = min(self.order, other.order)
            out = []
            for j in range(n + 1):
                acc = self._coeffs[0] * other._coeffs[j]
                for i in range(1, j + 1):
                    acc = acc + self._coeffs[i] * other._coeffs[j - i]
                out.append(acc)
            return Series._wrap(tuple(out), self.precision)
        if isinstance(other, (BigReal, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (BigReal, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    # -- calculus -----------------------------------------------------------

    def derivative(self) -> "Series":
        """Formal d/dt; the result is known to one order less."""
        if self.order == 0:
            raise ValueError("derivative of an order-0 truncation has no known coefficients")
        return Series._wrap(
            tuple(self._coeffs[j] * j for j in range(1, self.order + 1)),
            self.precision,
        )

    def times_t(self) -> "Series":
        """Multiply by t (shift indices up); the result is known one order higher."""
        return Series._wrap((BigReal.zero(self.precision),) + self._coeffs, self.precision)

    # -- powers ---------------------------------------------------------------

    def real_pow(self, exponent: Union[BigReal, int, Fraction]) -> "Series":
        """Raise to an arbitrary real power.

        Requires a strictly positive constant term.  Writing P = s^rho,
        the identity P'(t) s(t) = rho s'(t) P(t) yields the recurrence

            p_0 = c_0^rho,
            p_j = (1 / (j c_0)) * sum_{i=1..j} ((rho + 1) i - j) c_i p_{j-i},

        which costs one division per new coefficient and keeps every step
        expressed in already-computed quantities.
        """
        c0 = self._coeffs[0]
        if c0.sign() <= 0:
            raise NonPositiveLeadingCoefficient(
                "real_pow requires a strictly positive constant term, got "
                + c0.to_decimal(8)
            )
        if isinstance(exponent, BigReal):
            rho = exponent.with_precision(self.precision)
        else:
            rho = BigReal(exponent, self.precision)
        out = [c0.pow(rho)]
        rho_plus_1 = rho + 1
        for j in range(1, self.order + 1):
            acc = (rho_plus_1 - j) * self._coeffs[1] * out[j - 1]
            for i in range(2, j + 1):
                acc = acc + (rho_plus_1 * i - j) * self._coeffs[i] * out[j - i]
            out.append(acc / (c0 * j))
        return Series._wrap(tuple(out), self.precision)

    # -- evaluation -------------------------------------------------------------

    def evaluate(self, point: Coefficient) -> BigReal:
        """Horner evaluation of the truncation at a numeric point."""
        t0 = _coerce(point, self.precision)
        acc = self._coeffs[-1]
        for j in range(self.order - 1, -1, -1):
            acc = acc * t0 + self._coeffs[j]
        return acc

    # -- display ------------------------------------------------------------------

    def __repr__(self):
        shown = ", ".join(c.to_decimal(8) for c in self._coeffs[:4])
        if self.order >= 4:
            shown += ", ..."
        return f"Series([{shown}], order={self.order}, precision={self.precision})"


def compose_analytic(g_taylor: Sequence[Coefficient], s: Series) -> Series:
    """Substitute ``s`` into an analytic function ``g``.

    ``g_taylor`` must list the Taylor coefficients of g expanded at the
    constant term of ``s`` (at least ``s.order + 1`` of them); the result is
    g(s(t)) truncated at ``s.order``.  Evaluation is a Horner loop in the
    zero-constant part of ``s``, so it performs ``s.order`` series products.
    """
    n = s.order
    if len(g_taylor) < n + 1:
        raise ValueError(
            f"need at least {n + 1} Taylor coefficients of the outer function, "
            f"got {len(g_taylor)}"
        )
    g = [_coerce(c, s.precision) for c in g_taylor[: n + 1]]
    shifted = Series._wrap((BigReal.zero(s.precision),) + s.coefficients[1:], s.precision)
    acc = Series.constant(g[n], n, s.precision)
    for m in range(n - 1, -1, -1):
        acc = acc * shifted + Series.constant(g[m], n, s.precision)
    return acc
