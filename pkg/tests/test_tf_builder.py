import numpy as np
import pytest

from focir.errors import DimensionError, DomainError
from focir.services.ecm_models import BranchParams, FoEcmParams, RandlesParams, branch_coefficients, to_state_space
from focir.services.frac_core import a_value
from focir.services.ss_sim import simulate
from focir.services.tf_builder import (
    CoefficientVector,
    Polynomial,
    StructureTag,
    assemble_tf,
    branch_tf,
    coefficient_map,
    impulse_response,
    poly_mul,
)


def test_poly_mul_and_trimming():
    product = poly_mul(Polynomial([1.0, 1.0]), Polynomial([1.0, -1.0]))
    np.testing.assert_array_equal(product.coeffs, [1.0, 0.0, -1.0])
    assert product.degree == 2
    assert Polynomial([2.0, 0.0, 0.0]).degree == 0
    assert Polynomial([]).degree == 0
    assert product(2.0) == pytest.approx(-3.0)


def test_branch_denominator_layout():
    tf = branch_tf(b=0.5, a0=0.3, a_tail=[0.1, 0.05, 0.01], T=2)
    np.testing.assert_allclose(tf.denominator.coeffs, [-0.05, -0.1, -0.3, 1.0])
    np.testing.assert_allclose(tf.numerator.coeffs, [0.0, 0.0, 0.5])
    z = 1.7
    assert tf(z) == pytest.approx(0.5 * z**2 / (z**3 - 0.3 * z**2 - 0.1 * z - 0.05))


def test_branch_tf_validation():
    with pytest.raises(DimensionError):
        branch_tf(1.0, 0.3, [0.1], T=2)
    with pytest.raises(DomainError):
        branch_tf(1.0, 0.3, [0.1], T=0)


def test_assemble_rejects_mixed_horizons():
    with pytest.raises(DimensionError):
        assemble_tf(0.1, [branch_tf(1.0, 0.3, [0.1, 0.05], 2), branch_tf(1.0, 0.3, [0.1], 1)])
    with pytest.raises(DimensionError):
        assemble_tf(0.1, [])


@pytest.mark.parametrize("T", [2, 10, 50])
def test_denominator_degree_equals_branches_times_horizon(single_cpe, two_cpe, T):
    for params in (single_cpe, two_cpe):
        c = coefficient_map(params, T)
        tf = c.as_tf()
        assert tf.deg == params.n * (T + 1)
        assert tf.denominator.degree == params.n * (T + 1)
        assert c.values.size == 2 * params.n * (T + 1) + 1


def test_single_cpe_vector_layout(single_cpe):
    T = 12
    c = coefficient_map(single_cpe, T)
    assert c.structure is StructureTag.SINGLE_CPE
    assert c.f.size == T + 2
    assert c.g.size == T + 1
    coefficients = branch_coefficients(single_cpe, 0, T)
    assert c.f[T + 1] == pytest.approx(single_cpe.r_inf)
    assert c.g[T] == pytest.approx(-coefficients.a0)
    np.testing.assert_allclose(-c.g[T - 1::-1], coefficients.a_tail, rtol=1e-14)
    assert c.values[0] == c.f[T + 1]
    assert c.values[-1] == c.g[0]


def test_two_cpe_constant_term_is_product_of_last_tail_coefficients(two_cpe):
    T = 15
    c = coefficient_map(two_cpe, T)
    assert c.structure is StructureTag.TWO_CPE
    assert c.g[0] == pytest.approx(a_value(0.4, T) * a_value(0.8, T), rel=1e-12)


def test_randles_models_give_three_coefficients(randles_like):
    c = coefficient_map(randles_like, 30)
    assert c.structure is StructureTag.RANDLES
    assert c.values.size == 3
    bare = coefficient_map(RandlesParams(r_inf=0.1, r1=1.0, c1=1.0), 30, ts=0.1)
    np.testing.assert_array_equal(bare.values, c.values)
    with pytest.raises(DomainError):
        coefficient_map(RandlesParams(r_inf=0.1, r1=1.0, c1=1.0), 30)


def test_three_branches_are_tagged_unsupported():
    branch = BranchParams(r=1.0, c=1.0, alpha=0.5)
    params = FoEcmParams(r_inf=0.1, branches=(branch, branch, branch), ts=0.1)
    assert coefficient_map(params, 4).structure is StructureTag.UNSUPPORTED


def test_assembled_tf_equals_sum_of_branches(two_cpe):
    T = 8
    c = coefficient_map(two_cpe, T)
    z = 1.3 + 0.2j
    expected = two_cpe.r_inf
    for i in range(two_cpe.n):
        coefficients = branch_coefficients(two_cpe, i, T)
        expected += branch_tf(coefficients.b, coefficients.a0, coefficients.a_tail, T)(z)
    assert c.as_tf().evaluate(z) == pytest.approx(expected, rel=1e-10)


def test_impulse_response_matches_simulation(two_cpe):
    T = 25
    tf = coefficient_map(two_cpe, T).as_tf()
    impulse = np.zeros(T + 1)
    impulse[0] = 1.0
    trace = simulate(to_state_space(two_cpe, T), impulse)
    h = impulse_response(tf, T + 1)
    assert h[0] == pytest.approx(two_cpe.r_inf)
    np.testing.assert_allclose(h, trace.y, rtol=1e-9, atol=1e-15)


def test_coefficient_vector_validation():
    with pytest.raises(DimensionError):
        CoefficientVector(values=[1.0, 2.0], structure="randles", T=1, Ts=1.0)
    with pytest.raises(DimensionError):
        CoefficientVector.from_powers([1.0], [0.5], "randles", 1, 1.0)
    c = CoefficientVector.from_powers([0.2, 0.1], [-0.5], "randles", 1, 1.0)
    np.testing.assert_array_equal(c.values, [0.1, 0.2, -0.5])
    assert c.structure is StructureTag.RANDLES


@pytest.mark.parametrize("T", [3, 10, 40])
def test_two_cpe_leading_coefficients(two_cpe, T):
    c = coefficient_map(two_cpe, T)
    first, second = (branch_coefficients(two_cpe, i, T) for i in range(2))
    a10, a20 = first.a0, second.a0
    a11, a21 = first.a_tail[0], second.a_tail[0]
    b1, b2, d = first.b, second.b, two_cpe.r_inf
    top = 2 * T + 2

    assert c.f[top] == pytest.approx(d, rel=1e-15)
    assert c.g[top - 1] == pytest.approx(-a10 - a20, rel=1e-12)
    assert c.g[top - 2] == pytest.approx(a10 * a20 - a11 - a21, rel=1e-12)
    assert c.f[top - 1] == pytest.approx(b1 + b2 - d * (a10 + a20), rel=1e-12)
    assert c.f[top - 2] == pytest.approx(d * (a10 * a20 - a11 - a21) - b1 * a20 - b2 * a10, rel=1e-12)


def test_assembled_tf_matches_branches_on_the_unit_circle(single_cpe, two_cpe):
    T = 12
    rng = np.random.default_rng(5)
    for params in (single_cpe, two_cpe):
        tf = coefficient_map(params, T).as_tf()
        branches = [branch_coefficients(params, i, T) for i in range(params.n)]
        for z in np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=25)):
            expected = params.r_inf + sum(branch_tf(bc.b, bc.a0, bc.a_tail, T)(z) for bc in branches)
            assert tf.evaluate(z) == pytest.approx(expected, rel=1e-10)
