"""Coefficient recursion for the series solution of the radial problem.

Solutions are represented as a truncation

    u(r) = sum_{k=0..K} a_k r^(k*p/(p-1)),  a_0 = alpha,

or equivalently, in the regular variable t = z^2 = r^(p/(p-1)), as the
polynomial v(t) = sum a_k t^k.  Substituting v into the transformed
equation and expanding the residual

    R(t) = a*(2v' + 4t v'') + (2*big_a/(p-1)) v'
           + S(t)^(2-p) * f(v(t)) / (p-1),        S(t) = -2 v'(t),

gives the defect of a trial polynomial.  The recursion rests on a single
structural fact: if the coefficients a_0..a_(k-1) are exact, then the
residual of their partial sum starts at t^(k-1), and appending a_k*t^k
shifts that coefficient linearly,

    R_new[t^(k-1)] = R_old[t^(k-1)] + b_k * c_k * a_k,

with b_k the linear stiffness and c_k the nonlinear amplification from
:mod:`plradial.problem`.  Solving for the zero of the bracket yields

    a_k = -R_old[t^(k-1)] / (b_k * c_k),

and the leading coefficient comes from the closed form

    a_1 = -( f(alpha) / ((p-1) 2^(p-2) b_1) )^(1/(p-1)) < 0.

Extracting R_old[t^(k-1)] subtracts quantities that agree to roughly the
size of the terms themselves: the coefficients below t^(k-1) vanish
analytically, and how far they sit above zero in practice measures the
cancellation noise of the whole pipeline.  The solver records that floor at
every step and restarts from scratch at doubled precision whenever the
floor is not clearly separated from the extracted value (threshold
10^(-digits/2), relative to the larger of the extracted coefficient and
the natural scale |a_1|*b_1).  A solution is only ever built from a run in
which every step passed the separation test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .bigreal import BigReal
from .errors import DomainError, PrecisionExhausted, SignViolation
from .nonlinearity import Nonlinearity
from .problem import (
    DEFAULT_PRECISION,
    DerivedConstants,
    PLaplaceProblem,
    correction_factor,
    derive_constants,
    linear_response_constant,
)
from .series import Series, compose_analytic

__all__ = [
    "CancellationReport",
    "SolutionSeries",
    "StepRecord",
    "first_coefficient",
    "linear_operator",
    "next_coefficient",
    "residual_series",
    "solve",
]

#: Number of times the working precision may be doubled before giving up.
ESCALATION_CAP = 3

NOTE_P_BELOW_TWO = (
    "1 < p < 2: the coefficient recursion is the natural continuation of the "
    "p >= 2 construction but sits outside its proven range; treat the "
    "expansion as experimental and rely on the verification oracles"
)


@dataclass(frozen=True)
class StepRecord:
    """Cancellation diagnostics for one coefficient extraction.

    ``cancellation_floor`` is the largest magnitude among the residual
    coefficients below t^(index-1), all of which vanish analytically; it is
    the actual computed value, never a post-hoc zero.
    """

    index: int
    cancellation_floor: BigReal
    extracted_magnitude: BigReal


@dataclass(frozen=True)
class CancellationReport:
    """Per-step cancellation floors plus the precision history of a solve."""

    steps: tuple[StepRecord, ...]
    precision: int
    escalations: int

    @property
    def max_cancellation_residual(self) -> BigReal:
        """Largest cancellation floor seen across all steps (0 if no steps ran)."""
        worst = BigReal.zero(self.precision)
        for record in self.steps:
            if record.cancellation_floor > worst:
                worst = record.cancellation_floor
        return worst


@dataclass(frozen=True)
class SolutionSeries:
    """A computed truncation of the series solution."""

    problem: PLaplaceProblem
    constants: DerivedConstants
    order: int
    coefficients: tuple[BigReal, ...]
    precision: int
    diagnostics: CancellationReport
    notes: tuple[str, ...] = ()

    def r_exponent(self, k: int) -> Fraction:
        """Exact exponent of r multiplying a_k, namely k*p/(p-1)."""
        if not 0 <= k <= self.order:
            raise IndexError(f"coefficient index {k} outside 0..{self.order}")
        p = self.problem.p
        return k * p / (p - 1)

    def as_series(self) -> Series:
        """The solution as a polynomial in t = r^(p/(p-1))."""
        return Series(self.coefficients, self.precision)

    def _horner(self, t: BigReal) -> BigReal:
        acc = self.coefficients[-1]
        for k in range(self.order - 1, -1, -1):
            acc = acc * t + self.coefficients[k]
        return acc

    def evaluate_at_radius(self, r: BigReal | int | Fraction) -> BigReal:
        """u(r) for r >= 0."""
        r_val = r if isinstance(r, BigReal) else BigReal(r, self.precision)
        if r_val.sign() < 0:
            raise DomainError(f"radius must be nonnegative, got {r_val.to_decimal(8)}")
        if r_val.is_zero():
            return self.coefficients[0]
        p = self.problem.p
        return self._horner(r_val.pow(p / (p - 1)))

    def evaluate_in_z(self, z: BigReal | int | Fraction) -> BigReal:
        """The even profile in the transformed variable z = r^(p/(2(p-1)))."""
        z_val = z if isinstance(z, BigReal) else BigReal(z, self.precision)
        return self._horner(z_val * z_val)

    def radial_derivative(self, r: BigReal | int | Fraction) -> BigReal:
        """u'(r) for r > 0 (it vanishes at r = 0 by construction)."""
        r_val = r if isinstance(r, BigReal) else BigReal(r, self.precision)
        if r_val.sign() <= 0:
            raise DomainError(f"radius must be positive, got {r_val.to_decimal(8)}")
        p = self.problem.p
        t = r_val.pow(p / (p - 1))
        acc = self.coefficients[-1] * self.order
        for k in range(self.order - 1, 0, -1):
            acc = acc * t + self.coefficients[k] * k
        return acc * r_val.pow(Fraction(1, 1) / (p - 1)) * (p / (p - 1))

    def validity_radius(self, tail: Fraction = Fraction(1, 10**10)) -> BigReal:
        """A radius where the dropped tail is heuristically below ``tail``.

        Solves |a_k*| t^k* = tail * max(|alpha|, 1) for the highest
        significant coefficient a_k* and maps t back to r.  This is an
        estimate of working range, not a proven radius of convergence.
        """
        scale = abs(self.coefficients[0])
        one = BigReal.one(self.precision)
        if scale < one:
            scale = one
        floor = BigReal(Fraction(1, 10 ** (self.precision // 2)), self.precision)
        k_star = 1
        for k in range(self.order, 0, -1):
            if abs(self.coefficients[k]) > floor:
                k_star = k
                break
        t_max = (scale * tail / abs(self.coefficients[k_star])).pow(Fraction(1, k_star))
        p = self.problem.p
        return t_max.pow((p - 1) / p)


def first_coefficient(constants: DerivedConstants, p: Fraction, f_alpha: BigReal) -> BigReal:
    """a_1 = -( f(alpha) / ((p-1) 2^(p-2) b_1) )^(1/(p-1))."""
    if f_alpha.sign() <= 0:
        raise SignViolation(f"f(alpha) must be positive, got {f_alpha.to_decimal(8)}")
    b1 = linear_response_constant(constants, p, 1)
    two_pow = BigReal(2, constants.precision).pow(p - 2)
    inner = f_alpha / (two_pow * b1 * (p - 1))
    return -(inner.pow(Fraction(1, 1) / (p - 1)))


def linear_operator(v: Series, constants: DerivedConstants, p: Fraction) -> Series:
    """The derivative blocks of the transformed equation applied to v(t).

    Returns a*(2v' + 4t v'') + (2*big_a/(p-1)) v', known to one order less
    than v.  Applied to the monomial t^k this yields exactly b_k * t^(k-1),
    which is how the linear stiffness constants are cross-checked.
    """
    vp = v.derivative()
    vpp = vp.derivative()
    curvature = vp.scale(2) + vpp.times_t().scale(4)
    return curvature.scale(constants.a) + vp.scale(constants.big_a * (Fraction(2) / (p - 1)))


def residual_series(
    coefficients: Sequence[BigReal | int | Fraction],
    order: int,
    constants: DerivedConstants,
    p: Fraction,
    f: Nonlinearity | None = None,
    *,
    f_taylor: Sequence[BigReal] | None = None,
) -> Series:
    """Defect of the partial sum v(t) = sum coefficients[j] * t^j.

    The result is known through t^order; ``order`` must be at least the
    polynomial degree (and at least 1, since the construction needs v').
    Supply either the nonlinearity ``f`` (its Taylor coefficients at
    coefficients[0] are computed here) or a precomputed ``f_taylor`` of
    length at least order + 1.

    A zero residual through t^(K-1) is precisely the statement that the
    truncation solves the equation up to the order it can see; coefficient
    t^K and beyond are expected to survive, reflecting the dropped tail.
    """
    degree = len(coefficients) - 1
    if degree < 1:
        raise ValueError("need at least the coefficients a_0 and a_1")
    if order < degree:
        raise ValueError(f"order {order} is below the polynomial degree {degree}")
    digits = constants.precision
    v = Series(coefficients, digits).extend_with_zeros(order + 1)
    linear = linear_operator(v, constants, p)
    slope = v.derivative().scale(-2)  # S(t) = -2 v'(t), positive at t = 0
    if f_taylor is None:
        if f is None:
            raise ValueError("supply the nonlinearity f or its Taylor coefficients")
        f_taylor = f.taylor_at(coefficients[0], order, digits)
    composed = compose_analytic(f_taylor, v.truncate(order))
    nonlinear = (slope.real_pow(Fraction(2) - p) * composed).scale(Fraction(1, 1) / (p - 1))
    return linear + nonlinear


def next_coefficient(
    coefficients: Sequence[BigReal],
    constants: DerivedConstants,
    p: Fraction,
    f_taylor: Sequence[BigReal],
    k: int,
) -> tuple[BigReal, StepRecord]:
    """Extend exact coefficients a_0..a_(k-1) by a_k.

    Expands the residual of the current partial sum through t^(k-1),
    reads off the surviving coefficient, and divides by -b_k*c_k.  Returns
    the new coefficient together with the step's cancellation record.
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k != len(coefficients):
        raise ValueError(
            f"have {len(coefficients)} coefficients (a_0..a_{len(coefficients) - 1}), "
            f"cannot extend to index {k}"
        )
    residual = residual_series(coefficients, k - 1, constants, p, f_taylor=f_taylor)
    extracted = residual.coefficient(k - 1)
    floor = abs(residual.coefficient(0))
    for j in range(1, k - 1):
        mag = abs(residual.coefficient(j))
        if mag > floor:
            floor = mag
    b_k = linear_response_constant(constants, p, k)
    c_k = correction_factor(constants, p, k, a1=coefficients[1], f_alpha=f_taylor[0])
    a_k = -(extracted / (b_k * c_k))
    record = StepRecord(
        index=k,
        cancellation_floor=floor,
        extracted_magnitude=abs(extracted),
    )
    return a_k, record


class _CancellationOverflow(Exception):
    """Internal signal: a step's noise floor reached the extracted signal."""

    def __init__(self, k: int, floor: BigReal):
        super().__init__(f"step {k}")
        self.k = k
        self.floor = floor


def _solve_at(problem: PLaplaceProblem, order: int, digits: int, escalations: int) -> SolutionSeries:
    constants = derive_constants(problem, digits)
    alpha = BigReal(problem.alpha, digits)
    f_taylor = problem.f.taylor_at(alpha, order, digits)
    f_alpha = f_taylor[0]
    a1 = first_coefficient(constants, problem.p, f_alpha)
    coefficients = [alpha, a1]
    b1 = linear_response_constant(constants, problem.p, 1)
    scale = abs(a1) * b1
    one = BigReal.one(digits)
    if scale < one:
        scale = one
    threshold = BigReal(Fraction(1, 10 ** (digits // 2)), digits)
    records: list[StepRecord] = []
    for k in range(2, order + 1):
        a_k, record = next_coefficient(coefficients, constants, problem.p, f_taylor, k)
        reference = record.extracted_magnitude if record.extracted_magnitude > scale else scale
        if record.cancellation_floor > threshold * reference:
            raise _CancellationOverflow(k, record.cancellation_floor)
        records.append(record)
        coefficients.append(a_k)
    notes: tuple[str, ...] = ()
    if problem.p < 2:
        notes = (NOTE_P_BELOW_TWO,)
    report = CancellationReport(steps=tuple(records), precision=digits, escalations=escalations)
    return SolutionSeries(
        problem=problem,
        constants=constants,
        order=order,
        coefficients=tuple(coefficients),
        precision=digits,
        diagnostics=report,
        notes=notes,
    )


def solve(problem: PLaplaceProblem, order: int, precision: int = DEFAULT_PRECISION) -> SolutionSeries:
    """Compute the truncated series solution a_0..a_order.

    Starts at max(64, precision) decimal digits and, whenever a step's
    cancellation floor is not separated from its extracted coefficient by
    the 10^(-digits/2) threshold, discards everything and restarts at double
    the precision (the recursion feeds each coefficient into all later ones,
    so partial results from a noisy run are never reused).  After
    ESCALATION_CAP restarts the failure is reported as PrecisionExhausted.
    """
    if order < 1:
        raise ValueError("order must be at least 1 (the truncation needs a_1)")
    digits = max(DEFAULT_PRECISION, precision)
    escalations = 0
    while True:
        try:
            return _solve_at(problem, order, digits, escalations)
        except _CancellationOverflow as failure:
            if escalations >= ESCALATION_CAP:
                raise PrecisionExhausted(
                    f"cancellation floor {failure.floor.to_decimal(8)} at step {failure.k} "
                    f"still above threshold after {escalations} precision escalations "
                    f"(final attempt at {digits} digits)"
                ) from None
            escalations += 1
            digits *= 2
