import math

import numpy as np
import pytest

from focir.errors import DomainError
from focir.services.frac_core import (
    FractionalOrder,
    a_coefficients,
    a_curves,
    a_log_derivative,
    a_sequence,
    a_value,
    as_order,
    frac_binomial,
    gl_weights,
    is_commensurate,
    log_gamma,
    ratio_residuals,
)


def test_log_gamma_known_values():
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.inf])
def test_log_gamma_rejects_non_positive(x):
    with pytest.raises(DomainError):
        log_gamma(x)


def test_frac_binomial():
    assert frac_binomial(0.5, 0) == 1.0
    assert frac_binomial(0.5, 1) == 0.5
    assert frac_binomial(0.5, 2) == pytest.approx(-0.125)
    assert frac_binomial(5.0, 2) == pytest.approx(10.0)
    assert frac_binomial(3.0, 5) == 0.0
    with pytest.raises(DomainError):
        frac_binomial(0.5, -1)


def test_gl_weights_recursion():
    w = gl_weights(0.5, 3)
    assert w.j_max == 3
    np.testing.assert_allclose(w.weights, [1.0, -0.5, -0.125, -0.0625], rtol=1e-15)
    for j in range(4):
        assert w[j] == pytest.approx((-1) ** j * frac_binomial(0.5, j), rel=1e-14)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
def test_gl_weights_reject_integer_and_out_of_range_orders(alpha):
    with pytest.raises(DomainError):
        gl_weights(alpha, 5)


def test_tail_is_negated_shifted_gl_weights():
    alpha = 0.37
    a = a_sequence(alpha, 50)
    w = gl_weights(alpha, 51)
    np.testing.assert_allclose(a.values, -w.weights[2:], rtol=1e-12)


def test_a_sequence_indexing():
    a = a_sequence(0.5, 3)
    assert len(a) == 3
    assert a.j_max == 3
    assert a[1] == pytest.approx(0.125)
    assert a[2] == pytest.approx(0.0625)
    with pytest.raises(IndexError):
        a[0]
    with pytest.raises(IndexError):
        a[4]
    assert np.asarray(a).shape == (3,)


def test_a_sequence_is_read_only():
    a = a_sequence(0.4, 5)
    with pytest.raises(ValueError):
        a.values[0] = 1.0


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_tail_vanishes_at_integer_orders(alpha):
    np.testing.assert_array_equal(a_coefficients(alpha, 10), np.zeros(10))


def test_tail_matches_binomial_product():
    for alpha in (0.1, 0.45, 0.9):
        expected = [(-1) ** j * frac_binomial(alpha, j + 1) for j in range(1, 51)]
        np.testing.assert_allclose(a_coefficients(alpha, 50), expected, rtol=1e-12)


def test_tail_positive_and_strictly_decreasing():
    for alpha in np.linspace(0.05, 0.95, 19):
        a = a_coefficients(alpha, 200)
        assert np.all(a > 0)
        assert np.all(np.diff(a) < 0)


def test_first_coefficient_symmetric_in_order():
    for k in range(1, 20):
        alpha = k / 20
        assert a_value(alpha, 1) == pytest.approx(a_value(1.0 - alpha, 1), rel=1e-14)


def test_ratio_residuals_vanish():
    for alpha in (0.2, 0.5, 0.77):
        assert np.max(ratio_residuals(a_sequence(alpha, 300), alpha)) < 1e-12


def test_ratio_residuals_detect_wrong_order():
    assert np.max(ratio_residuals(a_sequence(0.3, 20), 0.31)) > 1e-4


def test_log_derivative_matches_finite_difference():
    alpha, j, h = 0.4, 10, 1e-6
    numeric = (math.log(a_value(alpha + h, j)) - math.log(a_value(alpha - h, j))) / (2 * h)
    assert a_log_derivative(alpha, j) == pytest.approx(numeric, rel=1e-6)


def test_a_curves_table():
    alphas = [0.2, 0.5, 0.8]
    table = a_curves(alphas, [1, 25])
    assert table.shape == (3, 2)
    assert table[1, 1] == pytest.approx(a_value(0.5, 25), rel=1e-14)


def test_commensurability():
    assert is_commensurate([0.5, 1.0], 0.5)
    assert is_commensurate([0.3, 0.5], 0.1)
    assert not is_commensurate([0.3, 0.45], 0.1)
    assert not is_commensurate([0.05], 0.1)
    with pytest.raises(DomainError):
        is_commensurate([0.5], 0.0)


def test_fractional_order_validation():
    assert float(FractionalOrder(0.25)) == 0.25
    assert as_order(0.3).alpha == 0.3
    order = FractionalOrder(0.7)
    assert as_order(order) is order
    for bad in (0.0, 1.0, math.nan):
        with pytest.raises(DomainError):
            FractionalOrder(bad)


@pytest.mark.parametrize("alpha", [0.3, 0.75, 2.5, 7.2, 20.3])
def test_frac_binomial_matches_gamma_quotient(alpha):
    for j in range(int(alpha) + 2):
        # alpha + 1 - j > 0: no pole in the gamma quotient
        via_gamma = math.exp(log_gamma(alpha + 1) - log_gamma(j + 1) - log_gamma(alpha + 1 - j))
        assert frac_binomial(alpha, j) == pytest.approx(via_gamma, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
def test_gl_partial_sums_decay(alpha):
    w = gl_weights(alpha, 10_000).weights
    assert abs(math.fsum(w)) < abs(math.fsum(w[:101]))


def test_higher_coefficients_are_not_symmetric_in_order():
    for alpha in (0.1, 0.25, 0.4, 0.7, 0.9):
        for j in range(2, 11):
            assert a_value(alpha, j) != pytest.approx(a_value(1.0 - alpha, j), rel=1e-6)
