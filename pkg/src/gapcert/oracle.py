"""Independent validation of the closed-form functionals and constants.

The eta-quadrature oracles integrate the discrete-mean main terms directly
over the window ``eta in [-c/2, c/2]`` (``eta = alpha log y``; with
``theta = 1/2`` one has ``alpha L = 2 eta`` and ``T^{-i alpha} = e^{-2 i eta}``)
instead of using the sine-integral and trigonometric-moment reductions of
:mod:`gapcert.functionals`. The arithmetic oracles check the divisor-sum
asymptotics behind the normalization constant ``a_r``.
"""

import functools
import math
import typing as T
from dataclasses import dataclass

import numpy as np
import scipy.integrate
from scipy.special import comb, gammaln

from . import constants
from .config_logging import logger
from .exceptions import (
    CancellationFailure,
    ParamsError,
    SeriesConvergenceError,
    SymmetryError,
)
from .functionals import (
    FunctionalParams,
    RKernels,
    TriangleGrid,
    compute_B,
    gauss_legendre_unit,
    v1_terms,
    v2_terms,
    v3_terms,
)
from .kernels import Polynomial, beta_moment, convolution_kernel


def _eta_integral(integrand: T.Callable[[float], float], c: float) -> float:
    if c == 0.0:
        return 0.0
    value, _ = scipy.integrate.quad(
        integrand,
        -0.5 * c,
        0.5 * c,
        epsabs=constants.ORACLE_EPSABS,
        epsrel=constants.ORACLE_EPSREL,
        limit=200,
    )
    return value


@dataclass(frozen=True, eq=False)
class EtaIntegrand:
    """x-integrated discrete-mean main terms as functions of ``eta``.

    ``theta`` is fixed to 1/2. ``v1_at`` and ``v2_at`` return the real
    integrands whose integrals over ``[-c/2, c/2]`` are V1 and V2.
    """

    r: int
    P1: Polynomial
    P2: Polynomial
    quad_order: int = constants.QUAD_ORDER

    @property
    def grid(self) -> TriangleGrid:
        return TriangleGrid.of_order(self.quad_order)

    def _moment(self) -> np.ndarray:
        t = self.grid.t
        return t**self.r * self.P1(self.grid.x[:, None] - t)

    def v1_at(self, eta: float) -> float:
        r, P1, grid = self.r, self.P1, self.grid
        a = (r + 1) ** 2
        x, t = grid.x, grid.t
        inner = grid.inner(np.cos(eta * t) * P1(x[:, None] - t))
        integrand = (1.0 - x) ** (a - 1) * (P1(x) ** 2 - (r + 1) * P1(x) * inner)
        return grid.outer(integrand) * math.exp(-gammaln(a))

    def series_pole_combination(self, eta: float) -> np.ndarray:
        grid = self.grid
        s = grid.t - 2.0
        kernel = np.zeros(s.shape, dtype=complex)
        for k in range(constants.ETA_SERIES_TERMS):
            kernel += (1j * s * eta) ** k / math.factorial(k + 1)
        return 0.5 * self.P2(grid.x) * grid.inner(s * kernel * self._moment())

    def direct_pole_combination(self, eta: float) -> np.ndarray:
        grid = self.grid
        Qr = convolution_kernel(self.P1, self.r)
        shifted = np.exp(-2j * eta) * grid.inner(np.exp(1j * eta * grid.t) * self._moment())
        return self.P2(grid.x) * (shifted - Qr(grid.x)) / (2j * eta)

    def pole_combination(self, eta: float) -> np.ndarray:
        """``(e^{-2i eta} I(eta) - Q_r P2) / (2 i eta)`` on the x nodes, where
        ``I(eta) = P2(x) int_0^x t^r e^{i eta t} P1(x - t) dt``.

        The two simple poles at ``eta = 0`` cancel; below
        ``constants.SMALL_ETA`` the power series of
        ``(e^{i s eta} - 1) / (i eta)`` is summed instead.
        """
        if abs(eta) < constants.SMALL_ETA:
            return self.series_pole_combination(eta)
        return self.direct_pole_combination(eta)

    def check_cancellation(self):
        """Compare both evaluations of the pole combination at
        ``|eta| = SMALL_ETA``.

        :raises CancellationFailure: on a relative disagreement above 1e-6.
        """
        weights = self.grid.weights
        for eta in (constants.SMALL_ETA, -constants.SMALL_ETA):
            series = complex(np.sum(weights * self.series_pole_combination(eta)))
            direct = complex(np.sum(weights * self.direct_pole_combination(eta)))
            scale = max(abs(series), abs(direct))
            if abs(series - direct) > 1e-6 * scale:
                raise CancellationFailure(series, direct)

    def v2_at(self, eta: float) -> float:
        r, P1, P2, grid = self.r, self.P1, self.P2, self.grid
        a = r * (r + 1)
        x, t = grid.x, grid.t
        xt = x[:, None] - t
        Qr = convolution_kernel(P1, r)
        R = RKernels(P2)
        phase = np.exp(1j * eta * t)

        A = (Qr(x) * P2(x)).astype(complex)
        A -= 0.5 * (r + 1) * P2(x) * grid.inner(phase * Qr(xt))
        A -= 0.5 * r * Qr(x) * grid.inner(np.conj(phase) * P2(xt))
        A += self.pole_combination(eta)
        shifted = np.exp(-2j * eta) * grid.inner(phase * self._moment())
        for n in range(1, r + 1):
            coeff = comb(r, n, exact=True) / math.factorial(n - 1)
            A += coeff * 0.5 * (1j * eta) ** (n - 1) * R[n - 1](x) * shifted

        integrand = (1.0 - x) ** (a - 1) * 2.0 * A.real
        return grid.outer(integrand) * math.exp(-gammaln(r + 1) - gammaln(a))


def _random_pair(rng: np.random.Generator, degree: int) -> T.Tuple[Polynomial, Polynomial]:
    return (
        Polynomial(rng.uniform(-1.0, 1.0, degree + 1)),
        Polynomial(rng.uniform(-1.0, 1.0, degree + 1)),
    )


def v1_by_eta_quadrature(
    P1: Polynomial, r: int, c: float, quad_order: int = constants.QUAD_ORDER
) -> float:
    """V1 by adaptive quadrature over the window of the ``|H1|^2`` mean,
    ``cos(eta t)`` kernel kept explicit."""
    integrand = EtaIntegrand(r, P1, Polynomial.zero(), quad_order)
    return _eta_integral(integrand.v1_at, c)


def v2_by_eta_quadrature(
    P1: Polynomial,
    P2: Polynomial,
    r: int,
    c: float,
    quad_order: int = constants.QUAD_ORDER,
) -> float:
    """V2 as twice the real part of the window integral of the cross mean.

    :raises CancellationFailure: if the small-eta expansion of the
        pole-cancelling combination disagrees with its direct evaluation.
    """
    integrand = EtaIntegrand(r, P1, P2, quad_order)
    integrand.check_cancellation()
    return _eta_integral(integrand.v2_at, c)


@dataclass(frozen=True)
class V3Oracle:
    value: float
    odd_residual: float
    terms_used: int


def _beta_moment_by_quadrature(B: Polynomial, a: int, quad_order: int) -> float:
    order = max(quad_order, (B.degree + a) // 2 + 1)
    x, w = gauss_legendre_unit(order)
    return math.fsum(w * (1.0 - x) ** (a - 1) * B(x))


def v3_by_eta_quadrature(
    P2: Polynomial,
    r: int,
    c: float,
    j_max: int = constants.J_MAX,
    tail_tol: float = constants.TAIL_TOL,
    quad_order: int = constants.QUAD_ORDER,
) -> V3Oracle:
    """V3 by integrating ``sum_j Re[(i eta)^j] B(r, 1/2, j; x)`` over ``eta``
    and ``x`` directly, all ``j`` (odd ones included) up to ``2 j_max``.

    The odd-``j`` contributions are integrated separately and must vanish.

    :raises SymmetryError: if the odd part exceeds 1e-14 times the scale of
        the even part.
    :raises SeriesConvergenceError: if the even terms have not dropped below
        ``tail_tol`` at ``j = 2 j_max``.
    """
    if P2.is_zero() or c == 0.0:
        return V3Oracle(value=0.0, odd_residual=0.0, terms_used=0)
    norm = math.exp(-2.0 * gammaln(r) - gammaln(r * r))
    kernels = RKernels(P2)
    moments: T.List[float] = []
    estimate: T.List[float] = []
    converged = False
    for j in range(1, 2 * j_max + 1):
        B = compute_B(r, 0.5, j, P2, kernels=kernels)
        moments.append(_beta_moment_by_quadrature(B, r * r, quad_order))
        if j % 2 == 0:
            # the even term once integrated over the window
            window = 2.0 * (0.5 * c) ** (j + 1) / (j + 1)
            estimate.append((-1) ** (j // 2) * window * moments[-1])
            if abs(estimate[-1]) <= tail_tol * abs(math.fsum(estimate)):
                converged = True
                break
    if not converged:
        raise SeriesConvergenceError(estimate[-1], math.fsum(estimate), j_max)

    moments_arr = np.array(moments)
    powers = np.arange(1, len(moments) + 1)
    odd = powers % 2 == 1

    def series(eta: float, mask: np.ndarray) -> float:
        re = np.array([((1j * eta) ** int(k)).real for k in powers[mask]])
        return 2.0 * float(np.sum(re * moments_arr[mask])) * norm

    even_value = _eta_integral(lambda eta: series(eta, ~odd), c)
    odd_value = _eta_integral(lambda eta: series(eta, odd), c)
    scale = max(abs(even_value), norm * float(np.sum(np.abs(moments_arr))))
    if abs(odd_value) > 1e-14 * max(scale, 1.0):
        raise SymmetryError(odd_value)
    return V3Oracle(value=even_value, odd_residual=abs(odd_value), terms_used=len(moments))


def prime_sieve(nmax: int) -> np.ndarray:
    """Primes up to ``nmax`` by the sieve of Eratosthenes."""
    if nmax < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(nmax + 1, dtype=bool)
    is_prime[:2] = False
    for i in range(2, math.isqrt(nmax) + 1):
        if is_prime[i]:
            is_prime[i * i :: i] = False
    return np.nonzero(is_prime)[0].astype(np.int64)


@dataclass(frozen=True, eq=False)
class DivisorSieve:
    """``d_r(n)`` for ``0 <= n <= N`` (``values[0]`` is unused and 0)."""

    r: int
    N: int
    values: np.ndarray

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.N:
            raise IndexError(f"n must lie in [1, {self.N}], got {n}")
        return int(self.values[n])


def sieve_divisor(r: int, N: int) -> DivisorSieve:
    """Tabulate the r-fold divisor function by a multiplicative sieve.

    ``d_r(p^k) = C(k + r - 1, r - 1)`` is applied prime by prime; exact
    64-bit integers.

    :raises OverflowError: if ``d_r(n)`` could exceed 64 bits for ``n <= N``
        (``d_r(n) <= d(n)^(r-1)`` and ``d(n) <= 2 sqrt(n)``).
    """
    if N < 1:
        raise ParamsError(f"N must be >= 1, got {N}")
    if r < 1:
        raise ParamsError(f"r must be >= 1, got {r}")
    if N > constants.MAX_SIEVE_SIZE or (r - 1) * math.log2(2.0 * math.sqrt(N)) >= 62:
        raise OverflowError(f"d_{r}(n) for n <= {N} may not fit in 64 bits")

    values = np.ones(N + 1, dtype=np.int64)
    values[0] = 0
    if r > 1:
        max_exponent = int(math.log2(N)) + 1
        local = np.array(
            [comb(k + r - 1, r - 1, exact=True) for k in range(max_exponent + 1)],
            dtype=np.int64,
        )
        for p in prime_sieve(N):
            p = int(p)
            if p * p > N:
                values[p::p] *= r
                continue
            exponents = np.ones(N // p, dtype=np.int64)
            q = p * p
            while q <= N:
                step = q // p
                exponents[step - 1 :: step] += 1
                q *= p
            values[p::p] *= local[exponents]
    if np.any(values[1:] <= 0):
        raise OverflowError(f"d_{r}(n) overflowed 64 bits below {N}")
    return DivisorSieve(r=r, N=N, values=values)


@dataclass(frozen=True)
class EulerProduct:
    r: int
    P_cut: int
    value: float
    tail_estimate: float
    corrected: float


@functools.lru_cache(maxsize=None)
def a_r_euler_product(r: int, P_cut: int) -> EulerProduct:
    """Truncated Euler product for ``a_r`` over primes ``p <= P_cut``.

    The local factor is ``(1 - 1/p)^(r^2) sum_n d_r(p^n)^2 p^-n``, the inner
    sum cut once its terms drop below ``constants.EULER_TERM_TOL``. Since the
    local factor is ``1 - (r(r-1)/2)^2 p^-2 + O(p^-3)``, the omitted primes
    contribute about ``exp(-tail_estimate)`` with
    ``tail_estimate = (r(r-1)/2)^2 / (P_cut log P_cut)``.
    """
    if P_cut < 100:
        raise ParamsError(f"P_cut must be >= 100, got {P_cut}")
    if r < 1:
        raise ParamsError(f"r must be >= 1, got {r}")
    if r == 1:
        # the local factor telescopes to 1
        return EulerProduct(r=r, P_cut=P_cut, value=1.0, tail_estimate=0.0, corrected=1.0)

    x = 1.0 / prime_sieve(P_cut).astype(float)
    excess = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    n = 1
    while np.any(active):
        term = float(comb(n + r - 1, r - 1, exact=True)) ** 2 * x[active] ** n
        excess[active] += term
        still = term >= constants.EULER_TERM_TOL
        active[np.flatnonzero(active)[~still]] = False
        n += 1
    log_local = r * r * np.log1p(-x) + np.log1p(excess)
    value = math.exp(math.fsum(log_local))
    tail = (r * (r - 1) / 2) ** 2 / (P_cut * math.log(P_cut))
    logger.debug("a_%d over p <= %d: %.15g (tail %.3e)", r, P_cut, value, tail)
    return EulerProduct(
        r=r, P_cut=P_cut, value=value, tail_estimate=tail, corrected=value * math.exp(-tail)
    )


@dataclass(frozen=True)
class RichardsonCheck:
    low: EulerProduct
    high: EulerProduct
    difference: float
    stable: bool


def a_r_richardson(r: int, cut_low: int, cut_high: int) -> RichardsonCheck:
    """Compare the tail-corrected products at two cutoffs; they must agree
    within the lower cutoff's tail estimate."""
    low = a_r_euler_product(r, cut_low)
    high = a_r_euler_product(r, cut_high)
    difference = abs(high.corrected - low.corrected)
    return RichardsonCheck(
        low=low,
        high=high,
        difference=difference,
        stable=difference <= max(low.tail_estimate, 1e-15) * low.value,
    )


def _leading_constant(r: int) -> float:
    return a_r_euler_product(r, 10**6).corrected


def _check_y_list(y_list: T.Sequence[int]):
    if not y_list:
        raise ParamsError("y_list must not be empty")
    if any(b <= a for a, b in zip(y_list, y_list[1:])):
        raise ParamsError(f"y_list must be increasing, got {list(y_list)}")
    if y_list[0] < 2 or y_list[-1] > 10**7:
        raise ParamsError("y values must lie in [2, 10^7]")


def divisor_sum_trend(r: int, y_list: T.Sequence[int]) -> T.List[float]:
    """Ratios of ``sum_{k <= y} d_r(k)^2 / k`` to its leading term
    ``a_r (log y)^(r^2) / Gamma(r^2 + 1)``.

    The error is only lower order in ``log y``, so the ratios are a trend,
    not an equality.
    """
    _check_y_list(y_list)
    sieve = sieve_divisor(r, int(y_list[-1]))
    k = np.arange(1, sieve.N + 1, dtype=float)
    partial = np.cumsum(sieve.values[1:].astype(float) ** 2 / k)
    a_r = _leading_constant(r)
    ratios = []
    for y in y_list:
        leading = a_r * math.log(y) ** (r * r) * math.exp(-gammaln(r * r + 1))
        ratios.append(float(partial[int(y) - 1]) / leading)
    return ratios


def weighted_divisor_ratio(
    r: int, y_list: T.Sequence[int], f: Polynomial
) -> T.List[float]:
    """Ratios of ``sum_{k <= y} d_r(k)^2 f(log(y/k) / log y) / k`` to
    ``a_r (log y)^(r^2) / Gamma(r^2) int_0^1 (1 - x)^(r^2 - 1) f(x) dx``."""
    _check_y_list(y_list)
    sieve = sieve_divisor(r, int(y_list[-1]))
    a_r = _leading_constant(r)
    weight_integral = beta_moment(f, r * r)
    if weight_integral == 0.0:
        raise ParamsError("The weight polynomial integrates to zero")
    ratios = []
    for y in y_list:
        k = np.arange(1, int(y) + 1, dtype=float)
        log_y = math.log(y)
        d2 = sieve.values[1 : int(y) + 1].astype(float) ** 2
        total = math.fsum(d2 * f(np.log(y / k) / log_y) / k)
        leading = a_r * log_y ** (r * r) * math.exp(-gammaln(r * r)) * weight_integral
        ratios.append(total / leading)
    return ratios


@dataclass(frozen=True)
class OracleCheck:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance

    def to_dict(self) -> T.Dict[str, T.Any]:
        return {
            "name": self.name,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


SUITES = ("v1", "v2", "v3", "symmetry", "constants", "divisor")
ORACLE_GRID = tuple((r, c) for r in (1, 2) for c in (math.pi, 2.0 * math.pi))


def _deviation(value: float, reference: float) -> float:
    """Relative deviation from ``reference``; absolute when it is zero."""
    if reference == 0.0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def _functional_checks(
    suite: str, pairs: int, seed: int, degree: int, quad_order: int
) -> T.List[OracleCheck]:
    tolerance = {"v1": 1e-6, "v2": 1e-5, "v3": 1e-6, "symmetry": 1e-14}[suite]
    checks = []
    for r, c in ORACLE_GRID:
        rng = np.random.default_rng(seed)
        params = FunctionalParams(r=r, c=c, quad_order=quad_order)
        worst = 0.0
        for _ in range(pairs):
            P1, P2 = _random_pair(rng, degree)
            if suite == "v1":
                terms = v1_terms(P1, params)
                oracle = v1_by_eta_quadrature(P1, r, c, quad_order)
            elif suite == "v2":
                terms = v2_terms(P1, P2, params)
                oracle = v2_by_eta_quadrature(P1, P2, r, c, quad_order)
            else:
                terms = v3_terms(P2, params)
                result = v3_by_eta_quadrature(
                    P2, r, c, params.j_max, params.tail_tol, quad_order
                )
                if suite == "symmetry":
                    worst = max(worst, result.odd_residual)
                    continue
                oracle = result.value
            worst = max(worst, _deviation(math.fsum(terms), oracle))
        checks.append(OracleCheck(f"{suite}[r={r}, c={c / math.pi:g}pi]", worst, tolerance))
    return checks


def _constant_checks() -> T.List[OracleCheck]:
    a_1 = a_r_euler_product(1, 10**6)
    a_2 = a_r_euler_product(2, 10**6)
    a_3 = a_r_richardson(3, 10**5, 10**6)
    return [
        OracleCheck("a_1 = 1", abs(a_1.value - 1.0), 0.0),
        OracleCheck("a_2 = 6/pi^2", abs(a_2.value - 6.0 / math.pi**2), 1e-6),
        OracleCheck("a_3 two-cutoff stability", a_3.difference, a_3.low.tail_estimate),
    ]


def _divisor_checks(seed: int) -> T.List[OracleCheck]:
    d2 = sieve_divisor(2, 1000)
    checks = [
        OracleCheck("sum d_2(n), n <= 100 = 482", float(abs(int(d2.values[1:101].sum()) - 482)), 0.0)
    ]
    rng = np.random.default_rng(seed)
    d3 = sieve_divisor(3, 10**6)
    failures = 0
    for _ in range(1000):
        m, n = (int(v) for v in rng.integers(1, 1000, size=2))
        if math.gcd(m, n) == 1:
            failures += d3[m * n] != d3[m] * d3[n]
    checks.append(OracleCheck("d_3 multiplicativity", float(failures), 0.0))
    for r in (1, 2):
        low, high = divisor_sum_trend(r, [10**3, 10**6])
        # positive when the deviation from 1 fails to shrink
        checks.append(
            OracleCheck(f"divisor sum trend r={r}", max(0.0, abs(high - 1) - abs(low - 1)), 0.0)
        )
    y_list = [10**3, 10**4]
    weighted = weighted_divisor_ratio(2, y_list, Polynomial([1.0]))
    unweighted = divisor_sum_trend(2, y_list)
    checks.append(
        OracleCheck(
            "constant-weight divisor sum r=2",
            max(_deviation(w, u) for w, u in zip(weighted, unweighted)),
            1e-12,
        )
    )
    return checks


def run_suite(
    suite: str = "all",
    pairs: int = 10,
    seed: int = 0,
    degree: int = 3,
    quad_order: int = constants.QUAD_ORDER,
) -> T.List[OracleCheck]:
    """Run one named oracle suite (or ``"all"``) and return its checks."""
    if suite == "all":
        checks = []
        for name in SUITES:
            checks.extend(run_suite(name, pairs, seed, degree, quad_order))
        return checks
    if suite not in SUITES:
        raise ParamsError(f"Unknown oracle suite {suite!r}, expected one of {SUITES}")
    logger.info("Running oracle suite %s", suite)
    if suite in ("v1", "v2", "v3", "symmetry"):
        return _functional_checks(suite, pairs, seed, degree, quad_order)
    if suite == "constants":
        return _constant_checks()
    return _divisor_checks(seed)
