import math

import numpy as np
import pytest

from focir.errors import DomainError
from focir.services.ecm_models import (
    BranchParams,
    FoEcmParams,
    RandlesParams,
    as_randles,
    branch_coefficients,
    randles_tf_coeffs,
    to_continuous,
    to_state_space,
)
from focir.services.frac_core import a_coefficients
from focir.services.ss_sim import discretize


def test_randles_coefficients():
    f1, f0, g0 = randles_tf_coeffs(RandlesParams(r_inf=0.1, r1=1.0, c1=2.0), ts=0.5)
    assert f1 == pytest.approx(0.1)
    assert f0 == pytest.approx(-0.1 * 0.75 + 0.25)
    assert g0 == pytest.approx(-0.75)


def test_randles_rejects_non_positive():
    with pytest.raises(DomainError):
        RandlesParams(r_inf=0.0, r1=1.0, c1=1.0)
    with pytest.raises(DomainError):
        randles_tf_coeffs(RandlesParams(r_inf=0.1, r1=1.0, c1=1.0), ts=-1.0)


def test_branch_coefficients():
    p = FoEcmParams(r_inf=0.2, branches=(BranchParams(r=2.0, c=1.0, alpha=0.5),), ts=0.01)
    c = branch_coefficients(p, 0, 5)
    assert c.a0 == pytest.approx(0.5 - 0.1 / 2.0)
    assert c.b == pytest.approx(0.1)
    assert c.d == 0.2
    assert c.m == 1.0
    np.testing.assert_allclose(c.a_tail, a_coefficients(0.5, 5))


def test_warburg_branch_keeps_order_as_a0():
    p = FoEcmParams(r_inf=0.2, branches=(BranchParams(r=None, c=3.0, alpha=0.5),), ts=0.04)
    c = branch_coefficients(p, 0, 3)
    assert c.a0 == 0.5
    assert c.b == pytest.approx(0.2 / 3.0)


def test_state_space_matches_discretized_continuous_model(two_cpe):
    direct = to_state_space(two_cpe, 20)
    via_continuous = discretize(to_continuous(two_cpe), two_cpe.ts, 20)
    np.testing.assert_allclose(direct.A0, via_continuous.A0, rtol=1e-14)
    np.testing.assert_allclose(direct.B, via_continuous.B, rtol=1e-14)
    np.testing.assert_allclose(direct.a_tail, via_continuous.a_tail, rtol=1e-14)
    assert direct.D == via_continuous.D == two_cpe.r_inf
    np.testing.assert_array_equal(direct.M, np.ones(2))


def test_theta_round_trip_with_open_resistor():
    p = FoEcmParams(
        r_inf=0.1,
        branches=(BranchParams(r=0.5, c=2.0, alpha=0.6), BranchParams(r=None, c=7.0, alpha=0.5)),
        ts=0.1,
    )
    theta = p.theta()
    assert theta[0] == 0.1
    assert theta[1] == 0.5 and math.isinf(theta[2])
    np.testing.assert_array_equal(theta[3:5], [2.0, 7.0])
    np.testing.assert_array_equal(theta[5:], [0.6, 0.5])
    assert FoEcmParams.from_theta(theta, 0.1) == p


def test_from_theta_rejects_bad_length():
    with pytest.raises(DomainError):
        FoEcmParams.from_theta([0.1, 1.0, 2.0], 0.1)


def test_permuted(two_cpe):
    swapped = two_cpe.permuted((1, 0))
    assert swapped.branches == two_cpe.branches[::-1]
    np.testing.assert_array_equal(swapped.alphas, [0.8, 0.4])


@pytest.mark.parametrize(
    "kwargs",
    [
        {"r": -1.0, "c": 1.0, "alpha": 0.5},
        {"r": 1.0, "c": 0.0, "alpha": 0.5},
        {"r": 1.0, "c": 1.0, "alpha": 0.0},
        {"r": 1.0, "c": 1.0, "alpha": 1.2},
    ],
)
def test_branch_validation(kwargs):
    with pytest.raises(DomainError):
        BranchParams(**kwargs)


def test_model_validation():
    with pytest.raises(DomainError):
        FoEcmParams(r_inf=0.1, branches=(), ts=0.1)
    with pytest.raises(DomainError):
        FoEcmParams(r_inf=-0.1, branches=(BranchParams(r=1.0, c=1.0, alpha=0.5),), ts=0.1)
    with pytest.raises(DomainError):
        FoEcmParams(r_inf=0.1, branches=(BranchParams(r=1.0, c=1.0, alpha=0.5),), ts=0.0)


def test_as_randles(randles_like, single_cpe):
    assert as_randles(randles_like) == RandlesParams(r_inf=0.1, r1=1.0, c1=1.0)
    assert as_randles(single_cpe) is None
    warburg = FoEcmParams(r_inf=0.1, branches=(BranchParams(r=None, c=1.0, alpha=1.0),), ts=0.1)
    assert as_randles(warburg) is None
