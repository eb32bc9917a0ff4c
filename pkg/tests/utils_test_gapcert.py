import math
import typing as T
from pathlib import Path

import numpy as np
import scipy.integrate

from gapcert.kernels import Polynomial

DATA_FOLDER = Path(__file__).parent / "data"
FIRST_ZEROS = DATA_FOLDER / "zeros_first100.txt"


def random_polynomial(rng: np.random.Generator, degree: int) -> Polynomial:
    return Polynomial(rng.uniform(-1.0, 1.0, degree + 1))


def kernel_by_quadrature(p: Polynomial, u: int, x: float) -> float:
    """``int_0^x t^u p(x - t) dt`` by adaptive quadrature."""
    value, _ = scipy.integrate.quad(
        lambda t: t**u * p(x - t), 0.0, x, epsabs=0.0, epsrel=1e-13
    )
    return value


def brute_divisor(r: int, n: int) -> int:
    """``d_r(n)`` from ``d_r = sum_{d | n} d_(r-1)(d)``."""
    if r == 1:
        return 1
    return sum(brute_divisor(r - 1, d) for d in range(1, n + 1) if n % d == 0)


def write_lines(path: Path, lines: T.Iterable[str]) -> Path:
    path.write_text("".join(f"{line}\n" for line in lines), encoding="ascii")
    return path


def first_zero_gap(variant_log: T.Callable[[float], float]) -> float:
    gamma, gamma_next = 14.134725142, 21.022039639
    return (gamma_next - gamma) * variant_log(gamma) / (2.0 * math.pi)


def _quad(integrand: T.Callable[[float], float], lower: float, upper: float) -> float:
    value, _ = scipy.integrate.quad(integrand, lower, upper, epsabs=0.0, epsrel=1e-13, limit=200)
    return value


def b_by_quadrature(r: int, theta: float, j: int, P2: Polynomial, u: float) -> float:
    """``B(r, theta, j; u)`` from its defining ``t`` integrals, with every
    kernel ``R_k(x) = int_0^x t^k P2(x - t) dt`` itself by quadrature."""

    def R(k: int, x: float) -> float:
        return kernel_by_quadrature(P2, k, x) if x > 0.0 else 0.0

    inv_j = 1.0 / math.factorial(j)
    value = -r * inv_j * R(r - 1, u) * _quad(lambda t: t**j * R(r - 1, u - t), 0.0, u)
    value += theta * r * inv_j * R(r, u) * _quad(lambda t: t**j * R(r - 1, u - t), 0.0, u)
    value += theta * r * inv_j * R(r - 1, u) * _quad(lambda t: t**j * R(r, u - t), 0.0, u)
    tail = 0.0
    for n in range(-2, min(j, r - 2) + 1):
        weight = (-1) ** (n % 2) * math.comb(r, n + 2)
        weight /= math.factorial(j - n) * math.factorial(r + n + 1)
        integral = _quad(
            lambda t: t ** (r - 1) * (1.0 / theta - t) ** (j - n) * P2(u - t), 0.0, u
        )
        tail += weight * R(r + n + 1, u) * integral
    return value - theta * math.gamma(r) * tail


def polarize(quadratic: T.Callable[[Polynomial, Polynomial], float], M: int) -> np.ndarray:
    """Gram matrix of ``quadratic`` from ``(q(e_i + e_j) - q(e_i) - q(e_j)) / 2``."""
    size = 2 * M + 2

    def q(vector: np.ndarray) -> float:
        return quadratic(Polynomial(vector[: M + 1]), Polynomial(vector[M + 1 :]))

    basis = np.eye(size)
    diagonal = [q(e) for e in basis]
    gram = np.diag(diagonal)
    for i in range(size):
        for j in range(i + 1, size):
            both = q(basis[i] + basis[j])
            gram[i, j] = gram[j, i] = 0.5 * (both - diagonal[i] - diagonal[j])
    return gram
