"""Exact polynomial algebra on [0, 1].

Polynomials are stored in the monomial basis, ``p(x) = sum_j c_j x^j``. The
moment-convolution kernels

.. math::

   K_u[p](x) = \\int_0^x t^u p(x - t) dt

and the beta-weighted moments used by every outer integral are evaluated in
closed form from the coefficients, with factorial ratios taken through
log-Gamma.
"""

import math
import typing as T
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import betaln, gammaln

from . import constants
from .exceptions import KernelOverflowError


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Real polynomial on [0, 1] in the monomial basis.

    The coefficient array is copied on construction and made read-only, so a
    ``Polynomial`` can be shared freely. Trailing zeros are kept: the degree
    is always ``len(coeffs) - 1``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        if coeffs.size == 0:
            coeffs = np.zeros(1)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(np.zeros(1))

    @classmethod
    def monomial(cls, j: int, scale: float = 1.0) -> "Polynomial":
        coeffs = np.zeros(j + 1)
        coeffs[j] = scale
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def tolist(self) -> T.List[float]:
        return [float(c) for c in self.coeffs]

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial(npoly.polysub(self.coeffs, other.coeffs))

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return multiply(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial(self.coeffs * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Polynomial({self.tolist()!r})"


@dataclass(frozen=True, eq=False)
class KernelPolynomial(Polynomial):
    """The polynomial ``x -> int_0^x t^moment base(x - t) dt``."""

    base: Polynomial = None
    moment: int = 0


def _check_finite(values: np.ndarray, what: str):
    if not np.all(np.isfinite(values)):
        raise KernelOverflowError(f"Non-finite coefficients while computing {what}")


def evaluate(p: Polynomial, x):
    """Evaluate ``p`` at ``x`` (scalar or array) by Horner's scheme."""
    return npoly.polyval(x, p.coeffs)


def convolution_kernel(p: Polynomial, u: int) -> KernelPolynomial:
    """Return the kernel ``int_0^x t^u p(x - t) dt`` as a polynomial.

    The coefficient of ``x^(u + j + 1)`` is ``c_j u! j! / (u + j + 1)!`` (a
    Beta integral); no quadrature is involved.

    :param p: the polynomial being convolved
    :type p: Polynomial
    :param u: the power of the moment weight, ``u >= 0``
    :type u: int

    :raises KernelOverflowError: if the result would exceed the supported
        degree range or a coefficient is not finite.
    """
    if u < 0:
        raise ValueError(f"Moment order must be non-negative, got {u}")
    degree = p.degree + u + 1
    if degree > constants.MAX_KERNEL_DEGREE:
        raise KernelOverflowError(
            f"Kernel degree {degree} exceeds {constants.MAX_KERNEL_DEGREE}"
        )
    j = np.arange(p.coeffs.size)
    ratios = np.exp(gammaln(u + 1) + gammaln(j + 1) - gammaln(u + j + 2))
    coeffs = np.zeros(degree + 1)
    coeffs[u + 1 :] = p.coeffs * ratios
    _check_finite(coeffs, f"the order-{u} kernel")
    return KernelPolynomial(coeffs, base=p, moment=u)


def beta_moment(p: Polynomial, a: int) -> float:
    """Return ``int_0^1 (1 - x)^(a - 1) p(x) dx``.

    Each monomial contributes ``c_j B(a, j + 1)``; the terms are summed with
    ``math.fsum`` since large coefficients cancel heavily.

    :param p: the integrand polynomial
    :type p: Polynomial
    :param a: the weight exponent plus one, ``a >= 1``
    :type a: int
    """
    if a < 1:
        raise ValueError(f"Weight parameter must be >= 1, got {a}")
    j = np.arange(p.coeffs.size)
    weights = np.exp(betaln(a, j + 1))
    terms = p.coeffs * weights
    _check_finite(terms, f"the beta moment with a={a}")
    return math.fsum(terms)


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    """Cauchy product of the coefficient sequences."""
    return Polynomial(np.convolve(p.coeffs, q.coeffs))
