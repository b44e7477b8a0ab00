import numpy as np
import pytest

from octahedral.counterexample import (
    DEFAULT_PARAMS,
    RedundantParams,
    build_counterexample,
    fit_lambda_polynomial,
    grid_margins,
    jacobian_red,
    legs_degenerate,
    verify_unavoidable,
)


@pytest.mark.parametrize("height,half", DEFAULT_PARAMS)
def test_construction_is_collinear(height, half):
    mech = build_counterexample(height, half)
    assert mech.collinearity_residual() < 1e-14
    np.testing.assert_allclose(np.linalg.norm(mech.platform, axis=1), 1.0)
    for i, (a, b) in mech.segments.items():
        assert np.linalg.norm(b - a) == pytest.approx(2 * half)


@pytest.mark.parametrize("height,half", DEFAULT_PARAMS)
def test_rotated_pose_is_singular_for_all_lambda(height, half):
    mech = build_counterexample(height, half)
    res = verify_unavoidable(mech, mech.fichter_pose(), 11)
    assert res["max_margin"] < 1e-9
    assert verify_unavoidable(mech, mech.start_pose(), 11)["max_margin"] > 0.01


@pytest.mark.parametrize("height,half", DEFAULT_PARAMS)
def test_polynomial_certificate(height, half):
    mech = build_counterexample(height, half)
    exps, coef, resid = fit_lambda_polynomial(mech, mech.fichter_pose())
    assert np.max(np.abs(coef)) < 1e-9 and resid < 1e-12
    # away from the special pose the determinant is multi-affine in lambda
    exps, coef, resid = fit_lambda_polynomial(mech, mech.start_pose())
    assert resid < 1e-12
    quadratic = [c for ex, c in zip(exps, coef) if max(ex) > 1]
    assert np.max(np.abs(quadratic)) < 1e-12
    assert np.max(np.abs(coef)) > 1e-3


def test_opposite_rotation_is_singular_too():
    mech = build_counterexample()
    assert verify_unavoidable(mech, mech.rotated_pose(90.0), 7)["max_margin"] < 1e-9
    assert verify_unavoidable(mech, mech.rotated_pose(-45.0), 7)["max_margin"] > 1e-3


def test_random_lambda_off_grid():
    mech = build_counterexample()
    rng = np.random.default_rng(0)
    for lam in rng.uniform(0, 1, size=(50, 3)):
        J = jacobian_red(mech, mech.fichter_pose(), lam)
        assert abs(np.linalg.det(J)) < 1e-12


def test_coplanar_platform_is_singular():
    mech = build_counterexample(height=1e-9)
    lams, m = grid_margins(mech, mech.rotated_pose(-30.0), 5)
    assert np.nanmax(np.abs(m)) < 1e-6


def test_parameter_validation():
    RedundantParams(0.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        RedundantParams(-0.1, 0.5, 0.5)
    with pytest.raises(ValueError):
        verify_unavoidable(build_counterexample(), build_counterexample().start_pose(), 1)


def test_degenerate_leg_detection():
    mech = build_counterexample(height=0.0)
    # lam = 1/2 puts each redundant anchor on its tangency point, i.e. under m_i
    assert legs_degenerate(mech, mech.start_pose(), (0.5, 0.5, 0.5))
    assert not legs_degenerate(mech, mech.start_pose(), (0.0, 0.0, 0.0))
