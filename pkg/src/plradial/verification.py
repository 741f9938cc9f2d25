"""Independent checks of a computed solution series.

Nothing here reuses the coefficient recursion's algebra to judge its own
output.  Four kinds of evidence are collected:

* :func:`defect_order_check` substitutes the truncation back into the
  transformed equation and verifies that every residual coefficient below
  t^K vanishes to working accuracy.  The coefficient at t^K itself is
  expected to survive: it is the next recursion step's input, not an error.
* :func:`ode_crosscheck` integrates the radial equation in flux form with a
  classical fixed-step fourth-order Runge-Kutta scheme, starting slightly
  off the singular origin from series initial data, and compares against
  the series on 32 sample points.  A step-halving Richardson estimate of
  the integrator's own error is reported alongside.
* :func:`picard_crosscheck` iterates the double-integral fixed-point form
  of the initial value problem on a graded grid with trapezoid quadrature;
  this touches neither series arithmetic nor Runge-Kutta stepping.
* :func:`closed_form_coefficients` produces exact coefficients for the two
  families with known solutions (constant source; p = n = 2 with
  exponential source), against which every computed coefficient is compared
  at near-full precision.

:func:`verify_solution` bundles the lot into one report with explicit
tolerances and pass flags.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bigreal import BigReal
from .errors import StepFailure
from .nonlinearity import Call, UPower
from .problem import linear_response_constant
from .series import Series
from .solver import SolutionSeries, residual_series

__all__ = [
    "ClosedForm",
    "DefectCheck",
    "OdeCheck",
    "OracleCheck",
    "PicardCheck",
    "VerificationReport",
    "closed_form_coefficients",
    "defect_order_check",
    "ode_crosscheck",
    "oracle_comparison",
    "picard_crosscheck",
    "verify_solution",
]

#: All oracle arithmetic runs at this fixed precision, independent of the
#: precision the solution was computed at.
ORACLE_PRECISION = 64

#: Number of Runge-Kutta steps (coarse run) when the caller does not choose.
#: Pinned empirically: on the reference problem (p = 41/10, n = 3, exp source,
#: order 15) the measured agreement is ~2e-11 with clean fourth-order decay
#: under step doubling, two orders inside the 1e-8 acceptance tolerance.
DEFAULT_ODE_STEPS = 31 * 100

#: Agreement demanded between the series and the Runge-Kutta run.
ODE_TOLERANCE = Fraction(1, 10**8)

#: Sample count for the integration comparison (segment endpoints).
ODE_SAMPLES = 32

#: Default graded-grid size for the fixed-point iteration.
DEFAULT_GRID_SIZE = 256

#: Agreement demanded from the fixed-point iteration.  The iteration is
#: quadrature-limited: with the graded trapezoid grid the measured error on
#: the reference problem is ~5e-6 at grid size 256 and shrinks roughly like
#: the square of the grid size (refinement study in the test suite).
PICARD_TOLERANCE = Fraction(1, 10**4)

#: Fraction of the series validity radius used for the fixed-point interval;
#: the iteration is a contraction only on a small enough interval.
PICARD_RADIUS_FRACTION = Fraction(1, 4)


@dataclass(frozen=True)
class DefectCheck:
    """Residual coefficients of the full truncation, checked through t^(K-1).

    ``magnitudes[j]`` is |R[t^j]| for j = 0..K.  ``passed`` looks only at
    j < K.  ``first_significant_index`` scans all of 0..K and is expected
    to be K itself (or None when the tail genuinely terminates, as with a
    constant source); anything below K is a real failure.
    ``remainder_exponent`` is the power of z carried by the first dropped
    term of the defect in the original variable, 2K + p - 2.
    """

    magnitudes: tuple[BigReal, ...]
    tolerance: BigReal
    passed: bool
    first_significant_index: int | None
    first_significant_magnitude: BigReal | None
    remainder_exponent: Fraction


@dataclass(frozen=True)
class OdeCheck:
    """Series vs fixed-step Runge-Kutta integration of the flux form."""

    max_error: BigReal
    integrator_estimate: BigReal
    tolerance: BigReal
    passed: bool
    r_start: BigReal
    r_max: BigReal
    steps: int
    samples: int


@dataclass(frozen=True)
class PicardCheck:
    """Series vs trapezoid fixed-point iteration of the integral form."""

    max_error: BigReal
    tolerance: BigReal
    passed: bool
    converged: bool
    iterations: int
    final_change: BigReal
    grid_size: int
    r_max: BigReal


@dataclass(frozen=True)
class ClosedForm:
    """Exact series coefficients from a known solution family."""

    kind: str
    coefficients: tuple[BigReal, ...]


@dataclass(frozen=True)
class OracleCheck:
    """Computed coefficients vs a closed-form family."""

    kind: str
    max_relative_error: BigReal
    tolerance: BigReal
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    defect: DefectCheck
    oracle: OracleCheck | None
    ode: OdeCheck | None
    picard: PicardCheck | None

    @property
    def passed(self) -> bool:
        if not self.defect.passed:
            return False
        for check in (self.oracle, self.ode, self.picard):
            if check is not None and not check.passed:
                return False
        return True


# -- defect -------------------------------------------------------------------


def defect_order_check(solution: SolutionSeries) -> DefectCheck:
    """Recompute the residual of the full truncation and grade its head.

    Passes iff |R[t^j]| < 10^(-precision/2) * max(1, |a_1| b_1) for every
    j <= K-1.  The t^K coefficient is reported, not graded: it equals
    -b_(K+1) c_(K+1) a_(K+1) up to rounding, i.e. the information the next
    coefficient would be computed from.
    """
    order = solution.order
    problem = solution.problem
    residual = residual_series(
        solution.coefficients, order, solution.constants, problem.p, problem.f
    )
    magnitudes = tuple(abs(residual.coefficient(j)) for j in range(order + 1))
    b1 = linear_response_constant(solution.constants, problem.p, 1)
    scale = abs(solution.coefficients[1]) * b1
    one = BigReal.one(solution.precision)
    if scale < one:
        scale = one
    tolerance = BigReal(Fraction(1, 10 ** (solution.precision // 2)), solution.precision) * scale
    passed = all(m < tolerance for m in magnitudes[:order])
    first_index: int | None = None
    first_magnitude: BigReal | None = None
    for j, magnitude in enumerate(magnitudes):
        if magnitude >= tolerance:
            first_index = j
            first_magnitude = magnitude
            break
    return DefectCheck(
        magnitudes=magnitudes,
        tolerance=tolerance,
        passed=passed,
        first_significant_index=first_index,
        first_significant_magnitude=first_magnitude,
        remainder_exponent=2 * order + problem.p - 2,
    )


# -- Runge-Kutta crosscheck -----------------------------------------------------


def _oracle_coefficients(solution: SolutionSeries) -> tuple[BigReal, ...]:
    return tuple(c.with_precision(ORACLE_PRECISION) for c in solution.coefficients)


def _series_value(coefficients: tuple[BigReal, ...], t: BigReal) -> BigReal:
    acc = coefficients[-1]
    for k in range(len(coefficients) - 2, -1, -1):
        acc = acc * t + coefficients[k]
    return acc


def ode_crosscheck(
    solution: SolutionSeries,
    r_max: BigReal | Fraction | int | None = None,
    steps: int = DEFAULT_ODE_STEPS,
) -> OdeCheck:
    """Integrate the radial equation in flux form and compare with the series.

    The flux form tracks y1 = u and y2 = r^(n-1) |u'|^(p-2) u', for which

        y1' = -( -y2 / r^(n-1) )^(1/(p-1)),   y2' = -r^(n-1) f(y1),

    avoiding any explicit second derivative (and hence the degeneracy of the
    p-Laplacian where u' = 0).  Starting data at r_start = r_max/1000 are
    taken from the series itself, which is legitimate because the comparison
    then checks consistency of the series with the flow away from the start,
    where the equation is regular and the integrator carries no knowledge of
    the series construction.  StepFailure is raised if the flux loses its
    sign (u' must stay negative).

    Runs the grid twice, at ``steps`` and ``2*steps``; the comparison uses
    the finer run and the difference between the two yields the Richardson
    error estimate reported as ``integrator_estimate``.
    """
    if steps < ODE_SAMPLES:
        raise ValueError(f"need at least {ODE_SAMPLES} steps, got {steps}")
    problem = solution.problem
    p, n = problem.p, problem.n
    f = problem.f
    digits = ORACLE_PRECISION
    if r_max is None:
        r_limit = solution.validity_radius().with_precision(digits)
    elif isinstance(r_max, BigReal):
        r_limit = r_max.with_precision(digits)
    else:
        r_limit = BigReal(r_max, digits)
    if r_limit.sign() <= 0:
        raise ValueError("r_max must be positive")
    coefficients = _oracle_coefficients(solution)
    t_exponent = p / (p - 1)
    inv_pm1 = Fraction(1, 1) / (p - 1)

    def u_series(r: BigReal) -> BigReal:
        return _series_value(coefficients, r.pow(t_exponent))

    r_start = r_limit / 1000
    t_start = r_start.pow(t_exponent)
    du = BigReal.zero(digits)
    for k in range(len(coefficients) - 1, 0, -1):
        du = du * t_start + coefficients[k] * k
    du = du * r_start.pow(inv_pm1) * t_exponent  # u'(r_start) from the series
    if du.sign() >= 0:
        raise StepFailure("series slope is not negative at the starting radius")
    y1 = u_series(r_start)
    y2 = -(r_start.pow(n - 1)) * (-du).pow(p - 1)

    def rhs(r: BigReal, state: tuple[BigReal, BigReal]) -> tuple[BigReal, BigReal]:
        u, flux = state
        r_weight = r.pow(n - 1)
        w = -flux / r_weight
        if w.sign() <= 0:
            raise StepFailure(
                f"flux lost its sign at r = {r.to_decimal(8)}; u' is no longer negative"
            )
        return (-(w.pow(inv_pm1)), -(r_weight * f.value_at(u, digits)))

    half = Fraction(1, 2)
    sixth = Fraction(1, 6)

    def integrate(steps_per_segment: int) -> list[BigReal]:
        state = (y1, y2)
        values = [state[0]]
        segment_width = (r_limit - r_start) / (ODE_SAMPLES - 1)
        for segment in range(ODE_SAMPLES - 1):
            r_left = r_start + segment_width * segment
            h = segment_width / steps_per_segment
            r = r_left
            for _ in range(steps_per_segment):
                k1 = rhs(r, state)
                mid = r + h * half
                k2 = rhs(mid, (state[0] + h * half * k1[0], state[1] + h * half * k1[1]))
                k3 = rhs(mid, (state[0] + h * half * k2[0], state[1] + h * half * k2[1]))
                r_next = r + h
                k4 = rhs(r_next, (state[0] + h * k3[0], state[1] + h * k3[1]))
                state = (
                    state[0] + h * sixth * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                    state[1] + h * sixth * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
                )
                r = r_next
            values.append(state[0])
        return values

    per_segment = max(1, round(steps / (ODE_SAMPLES - 1)))
    coarse = integrate(per_segment)
    fine = integrate(2 * per_segment)
    segment_width = (r_limit - r_start) / (ODE_SAMPLES - 1)
    max_error = BigReal.zero(digits)
    estimate = BigReal.zero(digits)
    for i in range(ODE_SAMPLES):
        r_i = r_start + segment_width * i
        err = abs(u_series(r_i) - fine[i])
        if err > max_error:
            max_error = err
        gap = abs(coarse[i] - fine[i])
        if gap > estimate:
            estimate = gap
    tolerance = BigReal(ODE_TOLERANCE, digits)
    return OdeCheck(
        max_error=max_error,
        integrator_estimate=estimate / 15,
        tolerance=tolerance,
        passed=max_error <= tolerance,
        r_start=r_start,
        r_max=r_limit,
        steps=per_segment * (ODE_SAMPLES - 1),
        samples=ODE_SAMPLES,
    )


# -- fixed-point crosscheck -------------------------------------------------------


def picard_crosscheck(
    solution: SolutionSeries,
    r_max: BigReal | Fraction | int | None = None,
    grid_size: int = DEFAULT_GRID_SIZE,
    max_iterations: int = 120,
    tolerance: Fraction = Fraction(1, 10**10),
) -> PicardCheck:
    """Iterate the integral form of the problem and compare with the series.

    The initial value problem is equivalent to the fixed-point equation

        u(r) = alpha - integral_0^r ( s^(1-n) * integral_0^s w^(n-1) f(u(w)) dw )^(1/(p-1)) ds,

    whose right-hand side is contracting for small r.  Starting from the
    constant alpha, the iteration is carried out on the graded grid
    r_i = r_max (i/m)^2 (clustered at the origin, where the integrand has a
    fractional-power singularity in its derivative) using trapezoid
    quadrature for both integrals; ``tolerance`` bounds the sup-norm change
    between sweeps.  Non-convergence is reported, not raised.  StepFailure
    is raised only if the inner integral loses positivity, which means the
    iterate left the region where the equation's sign structure holds.
    """
    if grid_size < 8:
        raise ValueError(f"grid_size must be at least 8, got {grid_size}")
    problem = solution.problem
    p, n = problem.p, problem.n
    digits = ORACLE_PRECISION
    if r_max is None:
        r_limit = solution.validity_radius().with_precision(digits) * BigReal(
            PICARD_RADIUS_FRACTION, digits
        )
    elif isinstance(r_max, BigReal):
        r_limit = r_max.with_precision(digits)
    else:
        r_limit = BigReal(r_max, digits)
    if r_limit.sign() <= 0:
        raise ValueError("r_max must be positive")
    m = grid_size
    zero = BigReal.zero(digits)
    one = BigReal.one(digits)
    nodes = [r_limit * Fraction(i * i, m * m) for i in range(m + 1)]
    weight_exp = n - 1
    outer_exp = -(n - 1) / (p - 1)
    inv_pm1 = Fraction(1, 1) / (p - 1)
    weights = [one if weight_exp == 0 else zero]
    weights += [nodes[i].pow(weight_exp) for i in range(1, m + 1)]
    outer = [None] + [nodes[i].pow(outer_exp) for i in range(1, m + 1)]
    alpha = BigReal(problem.alpha, digits)
    coefficients = _oracle_coefficients(solution)
    t_exponent = p / (p - 1)
    series_values = [alpha] + [
        _series_value(coefficients, nodes[i].pow(t_exponent)) for i in range(1, m + 1)
    ]
    half = Fraction(1, 2)
    u = [alpha] * (m + 1)
    tol = BigReal(tolerance, digits)
    converged = False
    change = zero
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        integrand = [weights[i] * problem.f.value_at(u[i], digits) for i in range(m + 1)]
        slope = [zero]
        inner = zero
        for i in range(1, m + 1):
            inner = inner + (nodes[i] - nodes[i - 1]) * (integrand[i] + integrand[i - 1]) * half
            if inner.sign() <= 0:
                raise StepFailure(
                    "inner integral lost positivity; the iterate left the admissible region"
                )
            slope.append(inner.pow(inv_pm1) * outer[i])
        new_u = [alpha]
        drop = zero
        for i in range(1, m + 1):
            drop = drop + (nodes[i] - nodes[i - 1]) * (slope[i] + slope[i - 1]) * half
            new_u.append(alpha - drop)
        change = zero
        for old, new in zip(u, new_u):
            gap = abs(new - old)
            if gap > change:
                change = gap
        u = new_u
        if change < tol:
            converged = True
            break
    max_error = zero
    for series_value, iterate in zip(series_values, u):
        gap = abs(series_value - iterate)
        if gap > max_error:
            max_error = gap
    bound = BigReal(PICARD_TOLERANCE, digits)
    return PicardCheck(
        max_error=max_error,
        tolerance=bound,
        passed=converged and max_error <= bound,
        converged=converged,
        iterations=iterations,
        final_change=change,
        grid_size=m,
        r_max=r_limit,
    )


# -- closed forms ------------------------------------------------------------------


def closed_form_coefficients(
    problem, order: int, precision: int = ORACLE_PRECISION
) -> ClosedForm | None:
    """Exact coefficients when the problem belongs to a known family.

    * Constant source f = lambda: the solution is a single power,
      u = alpha - c r^(p/(p-1)) with c = ((p-1)/p) (lambda/n)^(1/(p-1)),
      so a_1 = -c and every later coefficient is exactly zero.
    * p = 2, n = 2, f = exp(u): u = alpha - 2 log(1 + e^alpha r^2 / 8)
      solves the problem, giving a_k = 2 (-1)^k (e^alpha/8)^k / k.

    Returns None for problems outside both families.
    """
    p, n = problem.p, problem.n
    zero = BigReal.zero(precision)
    if problem.f.is_constant:
        lam = problem.f.value_at(problem.alpha, precision)
        slope = (lam / n).pow(Fraction(1, 1) / (p - 1)) * ((p - 1) / p)
        coefficients = [BigReal(problem.alpha, precision), -slope]
        coefficients += [zero] * (order - 1)
        return ClosedForm("constant_source", tuple(coefficients[: order + 1]))
    if p == 2 and n == 2 and problem.f.ast == Call("exp", UPower(Fraction(1))):
        c = BigReal(problem.alpha, precision).exp() / 8
        coefficients = [BigReal(problem.alpha, precision)]
        c_power = BigReal.one(precision)
        for k in range(1, order + 1):
            c_power = c_power * c
            term = c_power * Fraction(2, k)
            coefficients.append(-term if k % 2 == 1 else term)
        return ClosedForm("planar_exponential", tuple(coefficients))
    return None


def oracle_comparison(solution: SolutionSeries) -> OracleCheck | None:
    """Compare computed coefficients against a closed form, if one applies.

    Error is relative where the exact coefficient is nonzero and absolute
    where it vanishes; the tolerance 10^(10 - precision) leaves ten digits
    of slack below the working precision of the solve.
    """
    closed = closed_form_coefficients(solution.problem, solution.order, solution.precision)
    if closed is None:
        return None
    one = BigReal.one(solution.precision)
    worst = BigReal.zero(solution.precision)
    for computed, exact in zip(solution.coefficients, closed.coefficients):
        gap = abs(computed - exact)
        if not exact.is_zero():
            gap = gap / abs(exact)
        if gap > worst:
            worst = gap
    tolerance = BigReal(Fraction(1, 10 ** (solution.precision - 10)), solution.precision)
    return OracleCheck(
        kind=closed.kind,
        max_relative_error=worst,
        tolerance=tolerance,
        passed=worst < tolerance,
    )


# -- bundle ---------------------------------------------------------------------------


def verify_solution(
    solution: SolutionSeries,
    *,
    run_ode: bool = True,
    run_picard: bool = True,
    ode_steps: int = DEFAULT_ODE_STEPS,
    ode_r_max: BigReal | Fraction | int | None = None,
    picard_r_max: BigReal | Fraction | int | None = None,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> VerificationReport:
    """Run every applicable check and bundle the results."""
    defect = defect_order_check(solution)
    oracle = oracle_comparison(solution)
    ode = ode_crosscheck(solution, r_max=ode_r_max, steps=ode_steps) if run_ode else None
    picard = (
        picard_crosscheck(solution, r_max=picard_r_max, grid_size=grid_size)
        if run_picard
        else None
    )
    return VerificationReport(defect=defect, oracle=oracle, ode=ode, picard=picard)
