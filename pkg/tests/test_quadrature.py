import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shepp.gaussian import Phi
from shepp.quadrature import gauss_legendre, tensor_integrate


@given(st.integers(1, 40), st.floats(-5, 5), st.floats(0.1, 10))
def test_weights_sum_to_length(N, a, length):
    rule = gauss_legendre(N, a, a + length)
    assert rule.weights.sum() == pytest.approx(length, rel=1e-13)
    assert np.all(rule.nodes > rule.a) and np.all(rule.nodes < rule.b)


@given(st.integers(1, 20), st.data())
def test_exact_for_polynomials_up_to_degree_2N_minus_1(N, data):
    deg = data.draw(st.integers(0, 2 * N - 1))
    rule = gauss_legendre(N, -1.0, 2.0)
    exact = (2.0 ** (deg + 1) - (-1.0) ** (deg + 1)) / (deg + 1)
    assert rule.integrate(rule.nodes**deg) == pytest.approx(exact, rel=1e-11, abs=1e-11)


def test_not_exact_at_degree_2N():
    rule = gauss_legendre(3, -1.0, 1.0)
    assert abs(rule.integrate(rule.nodes**6) - 2 / 7) > 1e-3


@pytest.mark.parametrize("N,a,b", [(0, 0, 1), (2.5, 0, 1), (3, 1, 1), (3, 2, 1)])
def test_invalid_rules_rejected(N, a, b):
    with pytest.raises(ValueError):
        gauss_legendre(N, a, b)


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_tensor_gaussian_product(dim):
    rule = gauss_legendre(30, -8, 1)
    val = tensor_integrate(lambda p: np.exp(-0.5 * np.sum(p * p, axis=1)) / (2 * np.pi) ** (dim / 2), rule, dim)
    assert val == pytest.approx(Phi(1.0) ** dim, rel=1e-12)


def test_tensor_result_independent_of_slab_size():
    rule = gauss_legendre(9, 0, 1)
    f = lambda p: np.cos(p.sum(axis=1)) * np.prod(1 + p, axis=1)
    a = tensor_integrate(f, rule, 4, max_points=1 << 18)
    b = tensor_integrate(f, rule, 4, max_points=81)
    assert a == pytest.approx(b, rel=1e-13)


def test_tensor_dim_zero_evaluates_once():
    rule = gauss_legendre(5, 0, 1)
    assert tensor_integrate(lambda p: np.full(len(p), math.pi), rule, 0) == math.pi


@settings(max_examples=30)
@given(st.floats(-2, 2), st.floats(0.5, 3))
def test_monomial_products_separate(c, length):
    rule = gauss_legendre(6, c, c + length)
    one_d = rule.integrate(rule.nodes**3)
    two_d = tensor_integrate(lambda p: p[:, 0] ** 3 * p[:, 1] ** 3, rule, 2)
    assert two_d == pytest.approx(one_d**2, rel=1e-10, abs=1e-10)
