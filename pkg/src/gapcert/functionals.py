"""Asymptotic mean-value functionals U, V1, V2, V3 and the ratio h(c).

With ``H = H1 + zeta H2`` and mollifier polynomials ``P1``, ``P2``,

* ``U`` is the main term of the mean square of ``H`` on the critical line,
* ``V1 + V2 + V3`` is the main term of its mean square over the shifted
  zeros ``gamma + alpha``, integrated over the window ``|alpha| <= c / L``,

both normalized by the same factor, so that ``h(c) = (V1 + V2 + V3) / (pi U)``.
Every summand is a quadratic form in the joint coefficient vector of
``(P1, P2)``.

The window integrals are written in the variable ``eta = alpha log y``; with
``theta = 1/2`` it ranges over ``[-c/2, c/2]``.
"""

import functools
import math
import typing as T
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import comb, gammaln, sici

from . import constants
from .config_logging import logger
from .exceptions import ParamsError, SeriesConvergenceError, ZeroMollifierError
from .kernels import Polynomial, beta_moment, convolution_kernel


@dataclass(frozen=True)
class FunctionalParams:
    """Fixes the instance of h being computed.

    :param r: divisor-function order of ``H2`` (``H1`` uses ``r + 1``)
    :param theta: mollifier length exponent, ``y = T^theta``
    :param c: half-width of the alpha window in units of ``1/L``
    :param j_max: truncation of the V3 series
    :param quad_order: Gauss-Legendre order per unit interval
    :param tail_tol: relative size below which a V3 term stops the series
    """

    r: int = 2
    theta: float = 0.5
    c: float = 0.0
    j_max: int = constants.J_MAX
    quad_order: int = constants.QUAD_ORDER
    tail_tol: float = constants.TAIL_TOL

    def __post_init__(self):
        if isinstance(self.r, bool) or int(self.r) != self.r or self.r < 1:
            raise ParamsError(f"r must be an integer >= 1, got {self.r!r}")
        if not 0.0 < self.theta <= 0.5:
            raise ParamsError(f"theta must lie in (0, 1/2], got {self.theta!r}")
        if not (math.isfinite(self.c) and self.c >= 0.0):
            raise ParamsError(f"c must be finite and >= 0, got {self.c!r}")
        if int(self.j_max) != self.j_max or self.j_max < 1:
            raise ParamsError(f"j_max must be an integer >= 1, got {self.j_max!r}")
        if int(self.quad_order) != self.quad_order or (
            self.quad_order < constants.MIN_QUAD_ORDER
        ):
            raise ParamsError(
                f"quad_order must be an integer >= {constants.MIN_QUAD_ORDER}, "
                f"got {self.quad_order!r}"
            )
        if not self.tail_tol > 0.0:
            raise ParamsError(f"tail_tol must be positive, got {self.tail_tol!r}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "j_max", int(self.j_max))
        object.__setattr__(self, "quad_order", int(self.quad_order))

    def with_c(self, c: float) -> "FunctionalParams":
        return replace(self, c=float(c))


@dataclass(frozen=True)
class FunctionalBreakdown:
    U: float
    V1: float
    V2: float
    V3: float
    h: float
    U_terms: T.Tuple[float, float, float]
    V1_terms: T.Tuple[float, float]
    V2_terms: T.Tuple[float, float, float, float, float, float]
    V3_terms: T.Tuple[float, ...] = field(default_factory=tuple)
    series_terms_used: int = 0
    quadrature_error_estimate: float = 0.0

    def to_dict(self) -> T.Dict[str, T.Any]:
        return {
            "U": self.U,
            "V1": self.V1,
            "V2": self.V2,
            "V3": self.V3,
            "h": self.h,
            "U_terms": list(self.U_terms),
            "V1_terms": list(self.V1_terms),
            "V2_terms": list(self.V2_terms),
            "V3_terms": list(self.V3_terms),
            "series_terms_used": self.series_terms_used,
            "quadrature_error_estimate": self.quadrature_error_estimate,
        }


def require_half_theta(params: FunctionalParams):
    if params.theta != 0.5:
        raise ParamsError(
            f"V1, V2 and V3 are implemented for theta = 1/2 only, got {params.theta!r}"
        )


def _inv_gamma(*args: float) -> float:
    return math.exp(-sum(gammaln(a) for a in args))


@functools.lru_cache(maxsize=None)
def gauss_legendre_unit(order: int) -> T.Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@dataclass(frozen=True, eq=False)
class TriangleGrid:
    """Tensor Gauss-Legendre grid on ``0 <= t <= x <= 1``.

    The inner variable is ``t = x s`` with ``s`` on its own Gauss-Legendre
    nodes, so ``int_0^1 g(x) int_0^x f(x, t) dt dx`` becomes
    ``sum_i w_i g(x_i) sum_k inner_weights[i, k] f(x_i, t[i, k])``.
    """

    x: np.ndarray
    weights: np.ndarray
    t: np.ndarray
    inner_weights: np.ndarray

    @classmethod
    def of_order(cls, order: int) -> "TriangleGrid":
        return _triangle_grid(order)

    def inner(self, integrand: np.ndarray) -> np.ndarray:
        return np.sum(self.inner_weights * integrand, axis=1)

    def outer(self, integrand: np.ndarray) -> float:
        return math.fsum(self.weights * integrand)


@functools.lru_cache(maxsize=None)
def _triangle_grid(order: int) -> TriangleGrid:
    x, w = gauss_legendre_unit(order)
    s, ws = gauss_legendre_unit(order)
    t = x[:, None] * s[None, :]
    inner_weights = x[:, None] * ws[None, :]
    return TriangleGrid(x=x, weights=w, t=t, inner_weights=inner_weights)


def sinc_kernel(c: float, t: np.ndarray) -> np.ndarray:
    """``sin(c t / 2) / t``, finite at ``t = 0``."""
    return 0.5 * c * np.sinc(c * t / (2.0 * math.pi))


def trig_moments(
    frequency: np.ndarray, half_width: float, k_max: int
) -> T.Tuple[np.ndarray, np.ndarray]:
    """Moments ``int_{-b}^{b} eta^k cos(a eta)`` and ``... sin(a eta)``.

    Returns two arrays of shape ``(k_max + 1,) + frequency.shape``. Even
    cosine and odd sine moments are the only non-zero ones. The
    integration-by-parts recurrence ascending in ``k`` is used unless
    ``|a b|`` is below ``constants.SMALL_FREQUENCY``, where it cancels and the
    power series in ``a`` is summed instead.
    """
    a = np.asarray(frequency, dtype=float)
    b = float(half_width)
    shape = (k_max + 1,) + a.shape
    cos_m = np.zeros(shape)
    sin_m = np.zeros(shape)
    if b == 0.0:
        return cos_m, sin_m

    small = np.abs(a * b) < constants.SMALL_FREQUENCY
    safe_a = np.where(small, 1.0, a)
    sin_ab = np.sin(safe_a * b)
    cos_ab = np.cos(safe_a * b)

    cos_m[0] = 2.0 * sin_ab / safe_a
    for k in range(1, k_max + 1):
        if k % 2 == 0:
            cos_m[k] = 2.0 * b**k * sin_ab / safe_a - (k / safe_a) * sin_m[k - 1]
        else:
            sin_m[k] = -2.0 * b**k * cos_ab / safe_a + (k / safe_a) * cos_m[k - 1]

    if np.any(small):
        a_small = np.where(small, a, 0.0)
        for k in range(k_max + 1):
            series = np.zeros(a.shape)
            for m in range(constants.TRIG_SERIES_TERMS):
                power = 2 * m + k % 2
                term = 2.0 * b ** (k + power + 1) / (
                    math.factorial(power) * (k + power + 1)
                )
                series += (-1) ** m * a_small**power * term
            if k % 2 == 0:
                cos_m[k] = np.where(small, series, cos_m[k])
            else:
                sin_m[k] = np.where(small, series, sin_m[k])
    return cos_m, sin_m


class RKernels:
    """Lazily computed kernels ``R_u = int_0^x t^u P2(x - t) dt`` of one P2."""

    def __init__(self, p2: Polynomial):
        self.p2 = p2
        self._cache: T.Dict[int, Polynomial] = {}

    def __getitem__(self, u: int) -> Polynomial:
        if u not in self._cache:
            self._cache[u] = convolution_kernel(self.p2, u)
        return self._cache[u]


def u_terms(
    P1: Polynomial, P2: Polynomial, params: FunctionalParams
) -> T.Tuple[float, float, float]:
    r, theta = params.r, params.theta
    R = RKernels(P2)
    Qr = convolution_kernel(P1, r)

    a1 = (r + 1) ** 2
    first = beta_moment(P1 * P1, a1) * _inv_gamma(a1)

    a2 = r * (r + 1)
    cross = 2.0 * beta_moment(Qr * P2, a2) * _inv_gamma(r + 1, a2)

    a3 = r * r
    square = (1.0 / theta) * (R[r - 1] * R[r - 1]) - 2.0 * (R[r] * R[r - 1])
    second = beta_moment(square, a3) * _inv_gamma(r, r, a3)
    return first, cross, second


def compute_U(P1: Polynomial, P2: Polynomial, params: FunctionalParams) -> float:
    """Main term of the mean square of ``H1 + zeta H2`` on the critical line.

    Sum of the ``|H1|^2``, cross and ``|zeta H2|^2`` contributions, all exact
    beta moments of kernel products.
    """
    return math.fsum(u_terms(P1, P2, params))


def v1_terms(P1: Polynomial, params: FunctionalParams) -> T.Tuple[float, float]:
    require_half_theta(params)
    r, c = params.r, params.c
    a = (r + 1) ** 2
    norm = _inv_gamma(a)

    diagonal = c * beta_moment(P1 * P1, a) * norm

    grid = TriangleGrid.of_order(params.quad_order)
    x = grid.x
    inner = grid.inner(sinc_kernel(c, grid.t) * P1(x[:, None] - grid.t))
    outer = (1.0 - x) ** (a - 1) * P1(x) * inner
    oscillating = -2.0 * (r + 1) * grid.outer(outer) * norm
    return diagonal, oscillating


def compute_V1(P1: Polynomial, params: FunctionalParams) -> float:
    """Window integral of the ``|H1|^2`` discrete mean."""
    return math.fsum(v1_terms(P1, params))


def v2_terms(
    P1: Polynomial, P2: Polynomial, params: FunctionalParams
) -> T.Tuple[float, float, float, float, float, float]:
    require_half_theta(params)
    r, c = params.r, params.c
    a = r * (r + 1)
    norm = _inv_gamma(r + 1, a)
    R = RKernels(P2)
    Qr = convolution_kernel(P1, r)

    grid = TriangleGrid.of_order(params.quad_order)
    x, t = grid.x, grid.t
    weight = (1.0 - x) ** (a - 1)
    xt = x[:, None] - t
    sinc = sinc_kernel(c, t)

    main = 2.0 * c * beta_moment(Qr * P2, a)

    shifted_q = grid.inner(sinc * Qr(xt))
    shifted_q = -2.0 * (r + 1) * grid.outer(weight * P2(x) * shifted_q)

    shifted_p = grid.inner(sinc * P2(xt))
    shifted_p = -2.0 * r * grid.outer(weight * Qr(x) * shifted_p)

    # t^r P1(x - t) is shared by the three T^{-i alpha} terms
    moment_p1 = t**r * P1(xt)
    frequency = t - 2.0

    sine_integral = 2.0 * sici(0.5 * c * frequency)[0]
    pole = grid.outer(weight * P2(x) * grid.inner(sine_integral * moment_p1))

    cos_m, sin_m = trig_moments(frequency, 0.5 * c, r)
    even = 0.0
    for j in range((r - 1) // 2 + 1):
        coeff = (-1) ** j / math.factorial(2 * j) * comb(r, 2 * j + 1, exact=True)
        inner = grid.inner(cos_m[2 * j] * moment_p1)
        even += coeff * grid.outer(weight * R[2 * j](x) * inner)

    odd = 0.0
    for j in range((r - 2) // 2 + 1 if r >= 2 else 0):
        coeff = (-1) ** (j + 1) / math.factorial(2 * j + 1) * comb(r, 2 * j + 2, exact=True)
        inner = grid.inner(sin_m[2 * j + 1] * moment_p1)
        odd += coeff * grid.outer(weight * R[2 * j + 1](x) * inner)

    return tuple(
        norm * term for term in (main, shifted_q, shifted_p, pole, even, odd)
    )


def compute_V2(P1: Polynomial, P2: Polynomial, params: FunctionalParams) -> float:
    """Twice the real part of the window integral of the cross discrete mean."""
    return math.fsum(v2_terms(P1, P2, params))


def compute_B(
    r: int,
    theta: float,
    j: int,
    P2: Polynomial,
    kernels: T.Optional[RKernels] = None,
) -> Polynomial:
    """The coefficient ``B(r, theta, j; u)`` of ``(i alpha log y)^j`` in the
    ``|zeta H2|^2`` discrete mean, as a polynomial in ``u``.

    The returned polynomial is callable, so it doubles as the evaluator
    ``u -> B(r, theta, j; u)``. All ``t`` integrals are kernel convolutions;
    the ``(1/theta - t)^(j - n)`` factor is expanded binomially into the
    kernels ``R_(r - 1 + k)``.

    :param kernels: a shared cache of the ``R_u`` kernels of ``P2``
    :type kernels: RKernels

    :raises KernelOverflowError: if the binomial expansion exceeds the
        supported kernel degree.
    """
    if j < 0:
        raise ParamsError(f"j must be non-negative, got {j}")
    if r < 1:
        raise ParamsError(f"r must be >= 1, got {r}")
    if not 0.0 < theta <= 0.5:
        raise ParamsError(f"theta must lie in (0, 1/2], got {theta!r}")
    R = kernels if kernels is not None else RKernels(P2)
    if P2.is_zero():
        return Polynomial.zero()

    inv_j = math.exp(-gammaln(j + 1))
    result = (-r * inv_j) * (R[r - 1] * convolution_kernel(R[r - 1], j))
    result = result + (theta * r * inv_j) * (R[r] * convolution_kernel(R[r - 1], j))
    result = result + (theta * r * inv_j) * (R[r - 1] * convolution_kernel(R[r], j))

    log_inv_theta = -math.log(theta)
    tail = Polynomial.zero()
    for n in range(-2, min(j, r - 2) + 1):
        m = j - n
        # 1/(j-n)! absorbed: (1/theta - t)^m / m! = sum_k (-t)^k theta^-(m-k) / (k! (m-k)!)
        expansion = Polynomial.zero()
        for k in range(m + 1):
            log_coeff = (m - k) * log_inv_theta - gammaln(k + 1) - gammaln(m - k + 1)
            expansion = expansion + ((-1) ** k * math.exp(log_coeff)) * R[r - 1 + k]
        weight = (-1) ** n * comb(r, n + 2, exact=True) * math.exp(-gammaln(r + n + 2))
        tail = tail + weight * (R[r + n + 1] * expansion)
    return result - (theta * math.gamma(r)) * tail


def v3_terms(P2: Polynomial, params: FunctionalParams) -> T.List[float]:
    """Terms of the V3 series, truncated by ``tail_tol`` or ``j_max``.

    :raises SeriesConvergenceError: if the term at ``j_max`` still exceeds
        ``tail_tol`` times the partial sum.
    """
    require_half_theta(params)
    r, c = params.r, params.c
    if P2.is_zero() or c == 0.0:
        return [0.0]
    norm = _inv_gamma(r, r, r * r)
    kernels = RKernels(P2)
    terms: T.List[float] = []
    for j in range(1, params.j_max + 1):
        B = compute_B(r, 0.5, 2 * j, P2, kernels=kernels)
        coeff = (-1) ** j * c ** (2 * j + 1) / (2.0 ** (2 * j - 1) * (2 * j + 1))
        terms.append(coeff * beta_moment(B, r * r) * norm)
        partial = math.fsum(terms)
        if abs(terms[-1]) <= params.tail_tol * abs(partial):
            logger.debug("V3 series stopped after %d terms", j)
            return terms
    raise SeriesConvergenceError(terms[-1], math.fsum(terms), params.j_max)


def compute_V3(P2: Polynomial, params: FunctionalParams) -> float:
    """Window integral of the ``|zeta H2|^2`` discrete mean."""
    return math.fsum(v3_terms(P2, params))


def numerator(P1: Polynomial, P2: Polynomial, params: FunctionalParams) -> float:
    """``V1 + V2 + V3``."""
    return math.fsum(
        v1_terms(P1, params) + v2_terms(P1, P2, params) + tuple(v3_terms(P2, params))
    )


def compute_h(
    P1: Polynomial, P2: Polynomial, params: FunctionalParams
) -> FunctionalBreakdown:
    """Evaluate ``h(c) = (V1 + V2 + V3) / (pi U)`` with its breakdown.

    The quadrature error estimate is the change of ``V1 + V2`` when the
    Gauss-Legendre order is halved.

    :raises ZeroMollifierError: if both polynomials vanish, or ``U`` is
        below ``1e-14`` times the sum of the magnitudes of its three parts.
    """
    if P1.is_zero() and P2.is_zero():
        raise ZeroMollifierError()
    U_terms = u_terms(P1, P2, params)
    U = math.fsum(U_terms)
    magnitude = math.fsum(abs(term) for term in U_terms)
    if magnitude == 0.0 or U <= constants.ZERO_MOLLIFIER_TOL * magnitude:
        raise ZeroMollifierError(
            f"U = {U!r} is not positive relative to its parts ({magnitude!r})"
        )

    V1_terms = v1_terms(P1, params)
    V2_terms = v2_terms(P1, P2, params)
    V3_terms = tuple(v3_terms(P2, params))
    V1, V2, V3 = math.fsum(V1_terms), math.fsum(V2_terms), math.fsum(V3_terms)
    h = (V1 + V2 + V3) / (math.pi * U)

    coarse = replace(
        params, quad_order=max(constants.MIN_QUAD_ORDER, params.quad_order // 2)
    )
    coarse_sum = compute_V1(P1, coarse) + compute_V2(P1, P2, coarse)
    error = abs(coarse_sum - (V1 + V2)) / (math.pi * U)

    logger.debug("h(%.6g) = %.12g (U = %.6g)", params.c, h, U)
    return FunctionalBreakdown(
        U=U,
        V1=V1,
        V2=V2,
        V3=V3,
        h=h,
        U_terms=U_terms,
        V1_terms=V1_terms,
        V2_terms=V2_terms,
        V3_terms=V3_terms,
        series_terms_used=len(V3_terms),
        quadrature_error_estimate=error,
    )
