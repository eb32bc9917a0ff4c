"""Gram matrices of ``U`` and ``V1 + V2 + V3`` in the monomial basis.

At degree 10 the monomial Gram matrices have condition numbers near ``1e15``,
so their smallest eigen-directions are lost as soon as an entry is rounded to
double precision. Here every entry is either an exact beta moment of two
monomials or a quadrature sum whose nodes, weights and kernel values are the
double precision numbers used by :mod:`gapcert.functionals`, taken as exact.
Only the monomial powers and the accumulation run in ``mpmath``, at
``constants.GRAM_DPS`` digits.

Matrices are numpy object arrays of ``mpf`` entries. The joint coefficient
vector is ``v = (c_0..c_M, d_0..d_M)`` of ``(P1, P2)``.
"""

import functools
import math
import typing as T
from dataclasses import dataclass

import numpy as np
from mpmath import mp
from scipy.special import sici

from . import constants
from .config_logging import logger
from .exceptions import SeriesConvergenceError
from .functionals import (
    FunctionalParams,
    TriangleGrid,
    require_half_theta,
    sinc_kernel,
    trig_moments,
)


def to_mp(values) -> np.ndarray:
    """Exact ``mpf`` copy of a float array."""
    values = np.asarray(values, dtype=float)
    out = np.empty(values.size, dtype=object)
    for i, value in enumerate(values.ravel()):
        out[i] = mp.mpf(float(value))
    return out.reshape(values.shape)


def to_float(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=object)
    return np.array([float(v) for v in values.ravel()], dtype=float).reshape(
        values.shape
    )


def zeros(shape: T.Tuple[int, ...]) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(mp.mpf(0))
    return out


def vector(values: T.Iterable) -> np.ndarray:
    items = list(values)
    out = np.empty(len(items), dtype=object)
    for i, item in enumerate(items):
        out[i] = item
    return out


def max_abs(values: np.ndarray):
    return max((abs(v) for v in values.ravel()), default=mp.mpf(0))


def quadratic(gram: np.ndarray, v: np.ndarray):
    """``v^T G v`` at the working precision."""
    return np.dot(v, np.dot(gram, v))


def _powers(base: np.ndarray, degree: int) -> np.ndarray:
    out = np.empty(base.shape + (degree + 1,), dtype=object)
    out[..., 0] = mp.mpf(1)
    for k in range(1, degree + 1):
        out[..., k] = out[..., k - 1] * base
    return out


@functools.lru_cache(maxsize=None)
def _kappa(u: int, k: int, dps: int):
    """``u! k! / (u + k + 1)!``, the moment ``int_0^1 t^u (1 - t)^k dt``."""
    with mp.workdps(dps):
        return mp.mpf(math.factorial(u) * math.factorial(k)) / math.factorial(u + k + 1)


def _moment(a: int, e: int, dps: int):
    """``int_0^1 (1 - x)^(a - 1) x^e dx``."""
    return _kappa(a - 1, e, dps)


def _inv_factorial(n: int):
    return mp.mpf(1) / math.factorial(n)


@dataclass(frozen=True, eq=False)
class MpGrid:
    """:class:`~gapcert.functionals.TriangleGrid` with monomial power tables.

    ``x_powers[i, e]`` is ``x_i^e`` and ``diff_powers[i, k, e]`` is
    ``(x_i - t_ik)^e``, both exact in the working precision.
    """

    grid: TriangleGrid
    weights: np.ndarray
    x_powers: np.ndarray
    diff_powers: np.ndarray

    def outer_weights(self, a: int) -> np.ndarray:
        """``w_i (1 - x_i)^(a - 1)``."""
        one_minus = 1 - self.x_powers[:, 1]
        out = np.empty(one_minus.shape, dtype=object)
        for i, (w, y) in enumerate(zip(self.weights, one_minus)):
            out[i] = w * y ** (a - 1)
        return out

    def inner(self, kernel: np.ndarray, first: int, count: int) -> np.ndarray:
        """``S[i, p] = sum_k iw_ik kernel_ik (x_i - t_ik)^(first + p)``."""
        weights = to_mp(self.grid.inner_weights * kernel)
        block = self.diff_powers[:, :, first : first + count]
        return np.sum(weights[:, :, None] * block, axis=1)

    def outer(self, W: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """``G[p, q] = sum_i W_i left[i, p] right[i, q]``."""
        return np.dot((W[:, None] * left).T, right)


@functools.lru_cache(maxsize=8)
def mp_grid(order: int, degree: int, dps: int) -> MpGrid:
    grid = TriangleGrid.of_order(order)
    with mp.workdps(dps):
        x = to_mp(grid.x)
        t = to_mp(grid.t)
        diff = x[:, None] - t
        return MpGrid(
            grid=grid,
            weights=to_mp(grid.weights),
            x_powers=_powers(x, degree),
            diff_powers=_powers(diff, degree),
        )


def _assemble_blocks(
    first: np.ndarray, cross: np.ndarray, second: np.ndarray
) -> np.ndarray:
    n = first.shape[0]
    gram = zeros((2 * n, 2 * n))
    gram[:n, :n] = first
    gram[:n, n:] = cross
    gram[n:, n:] = second
    # lower triangle mirrors the upper one entry for entry
    for i in range(2 * n):
        for j in range(i):
            gram[i, j] = gram[j, i]
    return gram


def u_blocks(params: FunctionalParams, M: int) -> T.Tuple[np.ndarray, ...]:
    """Blocks of the ``|H1|^2``, cross and ``|zeta H2|^2`` parts of ``U``.

    The cross block ``X`` enters the joint form as ``2 c^T X d``.
    """
    r, n, dps = params.r, M + 1, mp.dps
    inv_theta = 1 / mp.mpf(params.theta)
    a1, a2, a3 = (r + 1) ** 2, r * (r + 1), r * r
    norm1 = _inv_factorial(a1 - 1)
    norm2 = _inv_factorial(r) * _inv_factorial(a2 - 1)
    norm3 = _inv_factorial(r - 1) ** 2 * _inv_factorial(a3 - 1)

    first, cross, second = zeros((n, n)), zeros((n, n)), zeros((n, n))
    for p in range(n):
        for q in range(n):
            first[p, q] = _moment(a1, p + q, dps) * norm1
            cross[p, q] = _kappa(r, p, dps) * _moment(a2, r + p + q + 1, dps) * norm2
            square = inv_theta * _kappa(r - 1, p, dps) * _kappa(r - 1, q, dps) * (
                _moment(a3, 2 * r + p + q, dps)
            )
            mixed = (
                _kappa(r, p, dps) * _kappa(r - 1, q, dps)
                + _kappa(r, q, dps) * _kappa(r - 1, p, dps)
            ) * _moment(a3, 2 * r + p + q + 1, dps)
            second[p, q] = (square - mixed) * norm3
    return first, cross, second


def v1_block(params: FunctionalParams, M: int, grid: MpGrid) -> np.ndarray:
    r, n, dps = params.r, M + 1, mp.dps
    c = mp.mpf(params.c)
    a = (r + 1) ** 2
    diagonal = zeros((n, n))
    for p in range(n):
        for q in range(n):
            diagonal[p, q] = c * _moment(a, p + q, dps)
    W = grid.outer_weights(a)
    inner = grid.inner(sinc_kernel(params.c, grid.grid.t), 0, n)
    Y = grid.outer(W, grid.x_powers[:, :n], inner)
    return (diagonal - (r + 1) * (Y + Y.T)) * _inv_factorial(a - 1)


def v2_block(params: FunctionalParams, M: int, grid: MpGrid) -> np.ndarray:
    """``Z[p, q]`` with ``V2 = sum_pq c_p d_q Z[p, q]``."""
    r, n, dps = params.r, M + 1, mp.dps
    c = mp.mpf(params.c)
    t = grid.grid.t
    a = r * (r + 1)
    W = grid.outer_weights(a)
    xp = grid.x_powers
    kappa_r = vector(_kappa(r, p, dps) for p in range(n))

    Z = zeros((n, n))
    for p in range(n):
        for q in range(n):
            Z[p, q] = 2 * c * _kappa(r, p, dps) * _moment(a, r + p + q + 1, dps)

    sinc = sinc_kernel(params.c, t)
    shifted_q = grid.outer(W, grid.inner(sinc, r + 1, n), xp[:, :n])
    Z = Z - 2 * (r + 1) * (kappa_r[:, None] * shifted_q)

    shifted_p = grid.outer(W, xp[:, r + 1 : r + 1 + n], grid.inner(sinc, 0, n))
    Z = Z - 2 * r * (kappa_r[:, None] * shifted_p)

    # t^r (x - t)^p is shared by the three T^{-i alpha} terms
    frequency = t - 2.0
    sine_integral = 2.0 * sici(0.5 * params.c * frequency)[0]
    Z = Z + grid.outer(W, grid.inner(sine_integral * t**r, 0, n), xp[:, :n])

    cos_m, sin_m = trig_moments(frequency, 0.5 * params.c, r)
    for j in range((r - 1) // 2 + 1):
        coeff = mp.mpf((-1) ** j * math.comb(r, 2 * j + 1)) / math.factorial(2 * j)
        kernel = vector(_kappa(2 * j, q, dps) for q in range(n))
        right = xp[:, 2 * j + 1 : 2 * j + 1 + n] * kernel[None, :]
        Z = Z + grid.outer(W, grid.inner(cos_m[2 * j] * t**r, 0, n), right) * coeff

    for j in range((r - 2) // 2 + 1 if r >= 2 else 0):
        coeff = mp.mpf((-1) ** (j + 1) * math.comb(r, 2 * j + 2)) / math.factorial(
            2 * j + 1
        )
        kernel = vector(_kappa(2 * j + 1, q, dps) for q in range(n))
        right = xp[:, 2 * j + 2 : 2 * j + 2 + n] * kernel[None, :]
        Z = Z + grid.outer(W, grid.inner(sin_m[2 * j + 1] * t**r, 0, n), right) * coeff

    return Z * (_inv_factorial(r) * _inv_factorial(a - 1))


@functools.lru_cache(maxsize=None)
def b_moment_gram(r: int, M: int, j: int, dps: int) -> np.ndarray:
    """Gram matrix of ``P2 -> int_0^1 (1 - u)^(r^2 - 1) B(r, 1/2, j; u) du``.

    ``B`` is a sum of products of two kernels of ``P2``; on monomials each
    kernel is a single power of ``u`` and each product integrates to a beta
    moment.
    """
    with mp.workdps(dps):
        n, a = M + 1, r * r
        half = mp.mpf(0.5)
        inv_j = _inv_factorial(j)
        kappa = functools.partial(_kappa, dps=dps)
        moment = functools.partial(_moment, a, dps=dps)
        tail_n = list(range(-2, min(j, r - 2) + 1))
        # (2 - t)^m / m! = sum_k (-t)^k 2^(m-k) / (k! (m-k)!)
        expansion = {
            n_: [
                mp.mpf((-1) ** k * 2 ** (j - n_ - k))
                / (math.factorial(k) * math.factorial(j - n_ - k))
                for k in range(j - n_ + 1)
            ]
            for n_ in tail_n
        }
        weight = {
            n_: mp.mpf((-1) ** (n_ % 2) * math.comb(r, n_ + 2)) / math.factorial(r + n_ + 1)
            for n_ in tail_n
        }

        Y = zeros((n, n))
        for p in range(n):
            for q in range(n):
                y = -r * inv_j * kappa(r - 1, p) * kappa(r - 1, q) * kappa(j, r + q) * (
                    moment(2 * r + j + p + q + 1)
                )
                y += half * r * inv_j * kappa(r, p) * kappa(r - 1, q) * kappa(j, r + q) * (
                    moment(2 * r + j + p + q + 2)
                )
                y += half * r * inv_j * kappa(r - 1, p) * kappa(r, q) * kappa(
                    j, r + q + 1
                ) * moment(2 * r + j + p + q + 2)
                tail = mp.mpf(0)
                for n_ in tail_n:
                    shift = 2 * r + n_ + 2 + p + q
                    inner = mp.fsum(
                        e * kappa(r - 1 + k, q) * moment(shift + k)
                        for k, e in enumerate(expansion[n_])
                    )
                    tail += weight[n_] * kappa(r + n_ + 1, p) * inner
                Y[p, q] = y - half * math.factorial(r - 1) * tail
        return (Y + Y.T) * half


def v3_block(params: FunctionalParams, M: int) -> T.Tuple[np.ndarray, int]:
    """P2 block of ``V3`` and the number of series terms summed.

    :raises SeriesConvergenceError: if the largest entry of the term at
        ``j_max`` still exceeds ``tail_tol`` times that of the partial sum.
    """
    r, n, dps = params.r, M + 1, mp.dps
    total = zeros((n, n))
    if params.c == 0.0:
        return total, 0
    c = mp.mpf(params.c)
    norm = _inv_factorial(r - 1) ** 2 * _inv_factorial(r * r - 1)
    tol = mp.mpf(params.tail_tol)
    term = total
    for j in range(1, params.j_max + 1):
        coeff = (-1) ** j * c ** (2 * j + 1) / (mp.mpf(2) ** (2 * j - 1) * (2 * j + 1))
        term = b_moment_gram(r, M, 2 * j, dps) * (coeff * norm)
        total = total + term
        if max_abs(term) <= tol * max_abs(total):
            logger.debug("V3 Gram series stopped after %d terms", j)
            return total, j
    raise SeriesConvergenceError(
        float(max_abs(term)), float(max_abs(total)), params.j_max
    )


def denominator_gram(params: FunctionalParams, M: int) -> np.ndarray:
    """``D`` with ``U(P1, P2) = v^T D v``."""
    with mp.workdps(constants.GRAM_DPS):
        return _assemble_blocks(*u_blocks(params, M))


def numerator_gram(params: FunctionalParams, M: int) -> np.ndarray:
    """``N`` with ``V1 + V2 + V3 = v^T N v``; ``theta`` must be 1/2."""
    require_half_theta(params)
    with mp.workdps(constants.GRAM_DPS):
        grid = mp_grid(params.quad_order, M + params.r + 1, mp.dps)
        first = v1_block(params, M, grid)
        cross = v2_block(params, M, grid) * mp.mpf(0.5)
        second, used = v3_block(params, M)
        logger.debug("Numerator Gram at c=%.9g: %d V3 terms", params.c, used)
        return _assemble_blocks(first, cross, second)
