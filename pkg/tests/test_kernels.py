import numpy as np
import pytest
import utils_test_gapcert as utils

from gapcert import exceptions, kernels
from gapcert.kernels import Polynomial


@pytest.mark.parametrize(
    "coeffs, x, expected",
    [
        ([1.0], 0.7, 1.0),
        ([0.0, 1.0], 0.5, 0.5),
        ([1.0, 1.0], 0.25, 1.25),
    ],
)
def test_evaluate(coeffs, x, expected):
    assert kernels.evaluate(Polynomial(coeffs), x) == pytest.approx(expected, abs=1e-15)


def test_evaluate_on_arrays():
    p = Polynomial([1.0, -2.0, 3.0])
    x = np.linspace(0.0, 1.0, 7)
    np.testing.assert_allclose(p(x), 1.0 - 2.0 * x + 3.0 * x**2, rtol=1e-15)


def test_polynomial_is_read_only():
    p = Polynomial([1.0, 2.0])
    with pytest.raises(ValueError):
        p.coeffs[0] = 5.0


def test_polynomial_keeps_trailing_zeros():
    p = Polynomial([1.0, 0.0, 0.0])
    assert p.degree == 2
    assert not p.is_zero()
    assert Polynomial.zero().is_zero()


def test_polynomial_arithmetic():
    p = Polynomial([1.0, 2.0])
    q = Polynomial([0.0, 0.0, 3.0])
    assert (p + q).tolist() == [1.0, 2.0, 3.0]
    assert (p - q).tolist() == [1.0, 2.0, -3.0]
    assert (-p).tolist() == [-1.0, -2.0]
    assert (2 * p).tolist() == [2.0, 4.0]
    assert (p * 0.5).tolist() == [0.5, 1.0]
    assert Polynomial.monomial(2, 4.0).tolist() == [0.0, 0.0, 4.0]


@pytest.mark.parametrize(
    "coeffs, u, expected",
    [
        ([1.0], 2, [0.0, 0.0, 0.0, 1.0 / 3.0]),
        ([0.0, 1.0], 1, [0.0, 0.0, 0.0, 1.0 / 6.0]),
        ([1.0, 1.0], 0, [0.0, 1.0, 0.5]),
    ],
)
def test_convolution_kernel_examples(coeffs, u, expected):
    kernel = kernels.convolution_kernel(Polynomial(coeffs), u)
    np.testing.assert_allclose(kernel.coeffs, expected, rtol=1e-14, atol=0.0)
    assert kernel.moment == u
    assert kernel.degree == len(coeffs) + u


@pytest.mark.parametrize("u", [0, 1, 3, 6])
def test_convolution_kernel_matches_quadrature(u):
    rng = np.random.default_rng(1234 + u)
    p = utils.random_polynomial(rng, 5)
    kernel = kernels.convolution_kernel(p, u)
    for x in rng.uniform(0.05, 1.0, 20):
        expected = utils.kernel_by_quadrature(p, u, x)
        assert kernel(x) == pytest.approx(expected, rel=1e-10, abs=1e-13)


def test_convolution_kernel_of_zero_is_zero():
    assert kernels.convolution_kernel(Polynomial.zero(), 4).is_zero()


def test_convolution_kernel_degree_overflow():
    p = Polynomial(np.ones(500))
    with pytest.raises(exceptions.KernelOverflowError):
        kernels.convolution_kernel(p, 20)


def test_convolution_kernel_negative_moment():
    with pytest.raises(ValueError):
        kernels.convolution_kernel(Polynomial([1.0]), -1)


@pytest.mark.parametrize("u", [0, 1, 4, 9])
def test_convolution_kernel_is_linear(u):
    rng = np.random.default_rng(11 + u)
    p = utils.random_polynomial(rng, 5)
    q = utils.random_polynomial(rng, 5)
    combined = kernels.convolution_kernel(1.5 * p - 2.0 * q, u)
    separate = 1.5 * kernels.convolution_kernel(p, u) - 2.0 * kernels.convolution_kernel(q, u)
    np.testing.assert_allclose(combined.coeffs, separate.coeffs, rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("a", [1, 4, 9, 36])
def test_beta_moment_of_square_is_positive(a):
    rng = np.random.default_rng(a)
    for degree in range(7):
        p = utils.random_polynomial(rng, degree)
        assert kernels.beta_moment(p * p, a) > 0.0


@pytest.mark.parametrize(
    "coeffs, a, expected",
    [
        ([1.0], 4, 0.25),
        ([0.0, 1.0], 1, 0.5),
        ([0.0, 0.0, 1.0], 2, 1.0 / 12.0),
    ],
)
def test_beta_moment_examples(coeffs, a, expected):
    assert kernels.beta_moment(Polynomial(coeffs), a) == pytest.approx(expected, rel=1e-14)


def test_beta_moment_is_linear():
    rng = np.random.default_rng(7)
    p = utils.random_polynomial(rng, 6)
    q = utils.random_polynomial(rng, 3)
    combined = kernels.beta_moment(2.0 * p + q, 5)
    separate = 2.0 * kernels.beta_moment(p, 5) + kernels.beta_moment(q, 5)
    assert combined == pytest.approx(separate, rel=1e-13)


def test_beta_moment_invalid_weight():
    with pytest.raises(ValueError):
        kernels.beta_moment(Polynomial([1.0]), 0)


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ([1.0, 1.0], [1.0, -1.0], [1.0, 0.0, -1.0]),
        ([0.0, 1.0], [0.0, 1.0], [0.0, 0.0, 1.0]),
        ([3.0, -2.0, 5.0], [1.0], [3.0, -2.0, 5.0]),
    ],
)
def test_multiply(p, q, expected):
    product = kernels.multiply(Polynomial(p), Polynomial(q))
    assert product.tolist() == expected
    assert (Polynomial(p) * Polynomial(q)).tolist() == expected
