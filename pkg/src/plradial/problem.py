"""Problem definition and the constants of the desingularizing substitution.

A radial problem is the quadruple (p, n, alpha, f) for

    (|u'|^(p-2) u')' + ((n-1)/r) |u'|^(p-2) u' + f(u) = 0,
    u(0) = alpha,  u'(0) = 0,

with p > 1.  The origin is a singular point of this equation; substituting
z = r^alpha_bar with alpha_bar = p / (2(p-1)) (so that z^2 = r^(p/(p-1)))
produces an equation that is regular at z = 0 whose solutions are even in z.
The coefficients of the transformed equation are collected in
:class:`DerivedConstants`:

    alpha_bar = p / (2(p-1))
    beta      = (2-p)/p
    gamma     = 3 - p - 2/p          (= beta * (p-1))
    a         = alpha_bar^p          weight of the second-derivative block
    big_a     = a*gamma + (n-1)*alpha_bar^(p-1)   weight of the first-derivative block

Two exact identities worth knowing (both are exercised by the tests):

    a*(p-1) + big_a = n * alpha_bar^(p-1) > 0,

so the combination dividing the curvature at the origin can never vanish for
p > 1, n >= 1, and with b1 = 2a + 2*big_a/(p-1) (the k = 1 case of
:func:`linear_response_constant`) one has (p-1)*b1 = 2*(a*(p-1) + big_a),
which makes u''(0) equal exactly twice the leading series coefficient.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .bigreal import BigReal, check_precision
from .errors import DegenerateProblem, SignViolation
from .nonlinearity import Nonlinearity, parse, parse_rational

__all__ = [
    "DEFAULT_PRECISION",
    "DerivedConstants",
    "PLaplaceProblem",
    "correction_factor",
    "derive_constants",
    "linear_response_constant",
    "second_derivative_at_zero",
]

#: Working precision (decimal digits) used when none is requested.
DEFAULT_PRECISION = 64


@dataclass(frozen=True)
class PLaplaceProblem:
    """An initial value problem for the radial p-Laplace equation."""

    p: Fraction
    n: Fraction
    alpha: Fraction
    f: Nonlinearity

    def __post_init__(self):
        for name in ("p", "n", "alpha"):
            value = getattr(self, name)
            if isinstance(value, int):
                object.__setattr__(self, name, Fraction(value))
            elif not isinstance(value, Fraction):
                raise TypeError(f"{name} must be an exact rational, got {type(value).__name__}")
        if not isinstance(self.f, Nonlinearity):
            raise TypeError("f must be a parsed Nonlinearity")
        if self.p <= 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if self.n < 2:
            warnings.warn(
                f"n = {self.n} is below the usual range n >= 2; proceeding anyway",
                stacklevel=2,
            )
        if self.alpha <= 0:
            warnings.warn(
                f"alpha = {self.alpha} is not positive; the positivity-based theory "
                "does not cover this starting value",
                stacklevel=2,
            )
        f_alpha = self.f.value_at(self.alpha, DEFAULT_PRECISION)
        if f_alpha.sign() <= 0:
            raise SignViolation(
                f"f(alpha) must be positive, got {f_alpha.to_decimal(8)}; the "
                "f(alpha) < 0 branch (series in powers of -t) is not supported"
            )

    @classmethod
    def from_strings(cls, p: str, n: str, alpha: str, f: str) -> "PLaplaceProblem":
        """Build a problem from exact-rational strings and f(u) source text."""
        return cls(
            p=parse_rational(p),
            n=parse_rational(n),
            alpha=parse_rational(alpha),
            f=parse(f),
        )

    def f_alpha(self, precision: int) -> BigReal:
        """f evaluated at the initial value, at the requested precision."""
        return self.f.value_at(self.alpha, precision)


@dataclass(frozen=True)
class DerivedConstants:
    """Coefficients of the transformed (regular-at-zero) equation."""

    alpha_bar: BigReal
    beta: BigReal
    gamma: BigReal
    a: BigReal
    big_a: BigReal
    precision: int


def derive_constants(problem: PLaplaceProblem, precision: int = DEFAULT_PRECISION) -> DerivedConstants:
    """Evaluate the substitution constants at the requested precision.

    alpha_bar, beta and gamma are exact rationals rounded once; a and big_a
    need one real power each.  Raises DegenerateProblem if a*(p-1) + big_a
    is not positive (impossible for valid p and n, but checked anyway since
    every later formula divides by it).
    """
    check_precision(precision)
    p, n = problem.p, problem.n
    alpha_bar_exact = p / (2 * (p - 1))
    beta_exact = (2 - p) / p
    gamma_exact = beta_exact * (p - 1)
    alpha_bar = BigReal(alpha_bar_exact, precision)
    a = alpha_bar.pow(p)
    big_a = a * gamma_exact + alpha_bar.pow(p - 1) * (n - 1)
    constants = DerivedConstants(
        alpha_bar=alpha_bar,
        beta=BigReal(beta_exact, precision),
        gamma=BigReal(gamma_exact, precision),
        a=a,
        big_a=big_a,
        precision=precision,
    )
    if (a * (p - 1) + big_a).sign() <= 0:
        raise DegenerateProblem(
            "a*(p-1) + big_a must be positive; the starting curvature equation is singular"
        )
    return constants


def linear_response_constant(constants: DerivedConstants, p: Fraction, k: int) -> BigReal:
    """The factor b_k = 2k(2k-1)*a + 2k*big_a/(p-1).

    Adding delta*t^k to a trial polynomial changes the derivative part of
    the transformed equation's residual by b_k*delta at t^(k-1); it is the
    linear stiffness against which each new coefficient is solved.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return constants.a * (2 * k * (2 * k - 1)) + constants.big_a * (Fraction(2 * k) / (p - 1))


def correction_factor(
    constants: DerivedConstants,
    p: Fraction,
    k: int,
    a1: BigReal,
    f_alpha: BigReal,
) -> BigReal:
    """The factor c_k by which the nonlinear term amplifies the response to a_k.

    c_k = 1 + k(p-2) f(alpha) / ((p-1) 2^(p-2) b_k (-a1)^(p-1)).

    For p = 2 this is exactly 1 (returned without arithmetic).  The formula
    is derived for p > 2; for 1 < p < 2 it is evaluated as written, which is
    the natural continuation of the recursion but sits outside the proven
    range (solutions carry a note in that case).
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if a1.sign() >= 0:
        raise SignViolation(
            f"the leading series coefficient must be negative, got {a1.to_decimal(8)}"
        )
    if p == 2:
        return BigReal.one(constants.precision)
    b_k = linear_response_constant(constants, p, k)
    two_pow = BigReal(2, constants.precision).pow(p - 2)
    numerator = f_alpha * (k * (p - 2))
    denominator = two_pow * b_k * (-a1).pow(p - 1) * (p - 1)
    return numerator / denominator + 1


def second_derivative_at_zero(constants: DerivedConstants, p: Fraction, f_alpha: BigReal) -> BigReal:
    """u''(0) = -( f(alpha) / (a*(p-1) + big_a) )^(1/(p-1)).

    This is the curvature of the solution at the origin in the original
    radial variable; it equals exactly twice the leading series coefficient.
    """
    if f_alpha.sign() <= 0:
        raise SignViolation(
            f"f(alpha) must be positive, got {f_alpha.to_decimal(8)}"
        )
    denominator = constants.a * (p - 1) + constants.big_a
    return -((f_alpha / denominator).pow(Fraction(1, 1) / (p - 1)))
