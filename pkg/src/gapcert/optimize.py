"""Exact minimization of h(c) over polynomial coefficient vectors.

For a fixed degree bound ``M`` the numerator ``V1 + V2 + V3`` and the
denominator ``U`` are quadratic forms ``v^T N v`` and ``v^T D v`` in the
joint coefficient vector ``v = (c_0..c_M, d_0..d_M)`` of ``(P1, P2)``, so the
minimum of ``h`` is the smallest eigenvalue of the pencil ``(N, D)`` divided
by ``pi``. Since ``h_min(c)`` does not decrease with ``c``, the largest
certified window follows by bisection.

The forms are assembled and the pencil is reduced in ``mpmath``
(:mod:`gapcert.gram`); only the minimizer leaves in double precision.
"""

import math
import typing as T
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.optimize
from mpmath import mp

from . import constants, gram
from .config_logging import logger
from .exceptions import BracketError, NotPositiveDefiniteError
from .functionals import FunctionalParams
from .kernels import Polynomial


def _exact(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    return values if values.dtype == object else gram.to_mp(values)


@dataclass(frozen=True, eq=False)
class QuadraticForms:
    """Gram matrices of the numerator and denominator of ``h``.

    ``N`` and ``D`` are given either as float arrays or as object arrays of
    ``mpf``; ``exact_N`` and ``exact_D`` always hold the latter, ``N`` and
    ``D`` their rounding to double precision. ``N`` depends on the window
    ``params.c``; ``D`` does not.
    """

    N: np.ndarray
    D: np.ndarray
    M: int
    params: FunctionalParams
    exact_N: np.ndarray = field(init=False, repr=False)
    exact_D: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("N", "D"):
            exact = _exact(getattr(self, name))
            object.__setattr__(self, f"exact_{name}", exact)
            object.__setattr__(self, name, gram.to_float(exact))

    @property
    def c(self) -> float:
        return self.params.c

    @property
    def size(self) -> int:
        return 2 * self.M + 2

    def split(self, v: np.ndarray) -> T.Tuple[Polynomial, Polynomial]:
        """Read the polynomials ``(P1, P2)`` off a joint coefficient vector."""
        v = np.asarray(v, dtype=float)
        return Polynomial(v[: self.M + 1]), Polynomial(v[self.M + 1 :])

    def ratio(self, v: np.ndarray) -> float:
        """``v^T N v / (pi v^T D v)``, with ``v`` taken as exact."""
        with mp.workdps(constants.GRAM_DPS):
            v = gram.to_mp(v)
            numerator = gram.quadratic(self.exact_N, v)
            denominator = gram.quadratic(self.exact_D, v)
            return float(numerator / (mp.pi * denominator))

    def cancellation(self, v: np.ndarray) -> float:
        """``U(v) / (|v|^T |D| |v|)``: the share of ``U`` that survives
        cancellation between the monomial contributions of ``v``."""
        with mp.workdps(constants.GRAM_DPS):
            v = gram.to_mp(v)
            magnitude = gram.quadratic(np.abs(self.exact_D), np.abs(v))
            if magnitude == 0:
                return 0.0
            return float(gram.quadratic(self.exact_D, v) / magnitude)


@dataclass(frozen=True, eq=False)
class CertificationResult:
    c_star: float
    lambda_bound: float
    h_at_c_star: float
    h_at_upper: float
    P1: Polynomial
    P2: Polynomial
    iterations: int
    agreement_gap: float
    r: int
    M: int
    tol_c: float

    def to_dict(self) -> T.Dict[str, T.Any]:
        return {
            "r": self.r,
            "M": self.M,
            "c_star": self.c_star,
            "c_star_over_pi": self.c_star / math.pi,
            "lambda_bound": self.lambda_bound,
            "h_at_c_star": self.h_at_c_star,
            "h_at_upper": self.h_at_upper,
            "P1": self.P1.tolist(),
            "P2": self.P2.tolist(),
            "iterations": self.iterations,
            "agreement_gap": self.agreement_gap,
            "tol_c": self.tol_c,
        }


def assemble_denominator(params: FunctionalParams, M: int) -> np.ndarray:
    """Exact Gram matrix of ``U``, an object array of ``mpf``."""
    return gram.denominator_gram(params, M)


def assemble_numerator(params: FunctionalParams, M: int) -> np.ndarray:
    """Exact Gram matrix of ``V1 + V2 + V3`` at ``params.c``."""
    return gram.numerator_gram(params, M)


def assemble(
    params: FunctionalParams, M: int, D: T.Optional[np.ndarray] = None
) -> QuadraticForms:
    """Build the quadratic forms of ``h`` at ``params.c`` for degree ``M``.

    Entry ``(i, j)`` of each form is its bilinear form on the monomial pair
    ``(e_i, e_j)``, which is what polarization
    ``(q(e_i + e_j) - q(e_i) - q(e_j)) / 2`` recovers.

    :param params: the functional parameters, including the window ``c``
    :type params: FunctionalParams
    :param M: the degree bound of both polynomials
    :type M: int
    :param D: a previously assembled denominator for the same ``r``, ``theta``
        and ``M``; it does not depend on ``c``
    :type D: Optional[np.ndarray]
    """
    if M < 0:
        raise ValueError(f"M must be non-negative, got {M}")
    logger.debug("Assembling quadratic forms: r=%d, M=%d, c=%.9g", params.r, M, params.c)
    if D is None:
        D = assemble_denominator(params, M)
    N = assemble_numerator(params, M)
    return QuadraticForms(N=N, D=D, M=M, params=params)


@dataclass(frozen=True, eq=False)
class Whitened:
    """The pencil ``(N, D)`` reduced to ``C = B^T N B`` with ``B^T D B = I``.

    ``B`` is ``diag(scale) L^-T`` where ``L L^T`` is the Cholesky factor of the
    Jacobi-equilibrated ``D``; the reduction is an exact congruence.
    """

    C: T.Any
    B: T.Any
    condition: float

    def C_float(self) -> np.ndarray:
        return np.array(self.C.tolist(), dtype=float)

    def to_coefficients(self, y) -> np.ndarray:
        """``v = B y``, normalized so its largest-magnitude entry is 1."""
        with mp.workdps(constants.GRAM_DPS):
            v = self.B * mp.matrix(list(y))
            values = [v[i] for i in range(v.rows)]
            pivot = max(values, key=abs)
            return np.array([float(e / pivot) for e in values])


def whiten(forms: QuadraticForms) -> Whitened:
    """Reduce the pencil to a standard symmetric matrix.

    :raises NotPositiveDefiniteError: if ``D`` has a non-positive diagonal
        entry, cannot be factored, or its equilibrated condition number
        leaves fewer than ``constants.GRAM_GUARD_DIGITS`` digits.
    """
    size = forms.size
    if np.any(forms.D.diagonal() <= 0.0) or not np.all(np.isfinite(forms.D)):
        raise NotPositiveDefiniteError(
            "The denominator form has a non-positive diagonal entry"
        )
    with mp.workdps(constants.GRAM_DPS):
        scale = [1 / mp.sqrt(forms.exact_D[i, i]) for i in range(size)]
        D = mp.matrix(size)
        N = mp.matrix(size)
        for i in range(size):
            for j in range(i, size):
                D[i, j] = D[j, i] = forms.exact_D[i, j] * scale[i] * scale[j]
                N[i, j] = N[j, i] = forms.exact_N[i, j] * scale[i] * scale[j]
        try:
            L = mp.cholesky(D)
        except ValueError as err:
            raise NotPositiveDefiniteError(
                f"Cholesky factorization of D failed: {err}"
            ) from err
        spectrum = mp.eigsy(D, eigvals_only=True)
        smallest, largest = spectrum[0], spectrum[size - 1]
        limit = mp.mpf(10) ** (constants.GRAM_DPS - constants.GRAM_GUARD_DIGITS)
        if smallest <= 0 or largest > limit * smallest:
            raise NotPositiveDefiniteError(
                f"The denominator form is numerically singular: equilibrated "
                f"eigenvalues span [{mp.nstr(smallest, 5)}, {mp.nstr(largest, 5)}]"
            )
        inverse_t = mp.inverse(L).T
        C = inverse_t.T * N * inverse_t
        C = (C + C.T) * mp.mpf(0.5)
        B = mp.matrix(size)
        for i in range(size):
            for j in range(size):
                B[i, j] = scale[i] * inverse_t[i, j]
        return Whitened(C=C, B=B, condition=float(largest / smallest))


def _check_cancellation(forms: QuadraticForms, v: np.ndarray):
    share = forms.cancellation(v)
    if share < constants.CANCELLATION_TOL:
        raise NotPositiveDefiniteError(
            f"U of the minimizer is {share:.3e} of its monomial contributions; "
            f"its coefficients do not survive rounding to double precision"
        )


def min_h(forms: QuadraticForms) -> T.Tuple[float, np.ndarray]:
    """Global minimum of ``h`` over the coefficient space of ``forms``.

    :return: ``h_min`` and the minimizing vector, normalized so that its
        largest-magnitude entry is 1
    :rtype: Tuple[float, np.ndarray]

    :raises NotPositiveDefiniteError: if ``D`` is not positive definite, or
        the minimizer cancels down to round-off in ``U``.
    """
    whitened = whiten(forms)
    with mp.workdps(constants.GRAM_DPS):
        eigenvalues, eigenvectors = mp.eigsy(whitened.C)
        y = [eigenvectors[i, 0] for i in range(forms.size)]
        h = float(eigenvalues[0] / mp.pi)
    v = whitened.to_coefficients(y)
    _check_cancellation(forms, v)
    return h, v


def direct_search(
    forms: QuadraticForms,
    starts: int = constants.DIRECT_SEARCH_STARTS,
    seed: int = 0,
) -> T.Tuple[float, np.ndarray]:
    """Minimize the Rayleigh ratio with Nelder-Mead from random starts.

    The search runs in the whitened coordinates of ``D``, where the ratio is
    ``y^T C y / y^T y``; the penalty ``(y^T y - 1)^2`` pins the scale without
    moving the minimum. Deterministic for a given ``seed``; the result can
    only be a local minimum, so it never undercuts ``min_h``.
    """
    if starts < 1:
        raise ValueError(f"starts must be >= 1, got {starts}")
    whitened = whiten(forms)
    C = whitened.C_float()
    size = C.shape[0]
    rng = np.random.default_rng(seed)

    def objective(y: np.ndarray) -> float:
        norm2 = float(y @ y)
        if norm2 == 0.0:
            return math.inf
        return float(y @ C @ y) / norm2 + (norm2 - 1.0) ** 2

    options = {
        "xatol": 1e-10,
        "fatol": 1e-15,
        "maxiter": 4000 * size,
        "maxfev": 8000 * size,
        "adaptive": True,
    }
    best_value, best_y = math.inf, None
    for _ in range(starts):
        y0 = rng.standard_normal(size)
        y0 /= np.linalg.norm(y0)
        result = scipy.optimize.minimize(objective, y0, method="Nelder-Mead", options=options)
        # restart from the converged point to rebuild a collapsed simplex
        result = scipy.optimize.minimize(
            objective, result.x, method="Nelder-Mead", options=options
        )
        value = float(result.x @ C @ result.x) / float(result.x @ result.x)
        if value < best_value:
            best_value, best_y = value, result.x
    return best_value / math.pi, whitened.to_coefficients([float(e) for e in best_y])


def h_min_at(
    params: FunctionalParams, M: int, c: float, D: T.Optional[np.ndarray] = None
) -> T.Tuple[float, np.ndarray, QuadraticForms]:
    forms = assemble(params.with_c(c), M, D=D)
    h, v = min_h(forms)
    return h, v, forms


def h_min_grid(
    params: FunctionalParams, M: int, cs: T.Sequence[float]
) -> T.List[T.Tuple[float, float]]:
    """``(c, h_min(c))`` on a grid of windows, sharing one denominator."""
    D = assemble_denominator(params, M)
    rows = []
    for c in cs:
        h, _, _ = h_min_at(params, M, c, D=D)
        logger.info("h_min(%.6f pi) = %.9f", c / math.pi, h)
        rows.append((float(c), h))
    return rows


def certify(
    r: int,
    M: int,
    c_lo: float,
    c_hi: float,
    tol_c: float = constants.TOL_C,
    params: T.Optional[FunctionalParams] = None,
    starts: int = constants.DIRECT_SEARCH_STARTS,
    seed: int = 0,
) -> CertificationResult:
    """Largest window ``c`` with ``h_min(c) < 1``, by bisection.

    ``h(c) < 1`` implies infinitely many normalized gaps larger than
    ``c / pi``, so the result certifies ``lambda > c_star / pi``.

    :param r: divisor-function order
    :type r: int
    :param M: degree bound of both polynomials
    :type M: int
    :param c_lo: lower bracket end, must satisfy ``h_min(c_lo) < 1``
    :type c_lo: float
    :param c_hi: upper bracket end, must satisfy ``h_min(c_hi) >= 1``
    :type c_hi: float
    :param tol_c: final bracket width
    :type tol_c: float

    :raises BracketError: if the bracket does not enclose the crossing.
    """
    params = FunctionalParams(r=r) if params is None else replace(params, r=r)
    D = assemble_denominator(params, M)
    h_lo, v_lo, forms_lo = h_min_at(params, M, c_lo, D=D)
    h_hi, _, _ = h_min_at(params, M, c_hi, D=D)
    logger.info(
        "Bracket [%.6f pi, %.6f pi]: h_min = %.9f, %.9f",
        c_lo / math.pi,
        c_hi / math.pi,
        h_lo,
        h_hi,
    )
    if not (c_lo < c_hi and h_lo < 1.0 <= h_hi):
        raise BracketError(c_lo, c_hi, h_lo, h_hi)

    lo, hi = c_lo, c_hi
    best = (h_lo, v_lo, forms_lo)
    upper = h_hi
    iterations = 0
    while hi - lo > tol_c:
        mid = 0.5 * (lo + hi)
        h, v, forms = h_min_at(params, M, mid, D=D)
        iterations += 1
        logger.info("Bisection step %d: h_min(%.6f pi) = %.9f", iterations, mid / math.pi, h)
        if h < 1.0:
            lo, best = mid, (h, v, forms)
        else:
            hi, upper = mid, h

    h_star, v_star, forms_star = best
    searched, _ = direct_search(forms_star, starts=starts, seed=seed)
    gap = searched - h_star
    if gap > 1e-6:
        logger.warning("Direct search stopped %.3e above the eigenvalue minimum", gap)
    P1, P2 = forms_star.split(v_star)
    return CertificationResult(
        c_star=lo,
        lambda_bound=lo / math.pi,
        h_at_c_star=h_star,
        h_at_upper=upper,
        P1=P1,
        P2=P2,
        iterations=iterations,
        agreement_gap=gap,
        r=r,
        M=M,
        tol_c=tol_c,
    )
