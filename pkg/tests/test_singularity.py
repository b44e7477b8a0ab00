import numpy as np
import pytest
from scipy.optimize import least_squares

from octahedral import kernels
from octahedral.errors import DegenerateOrientation, StructureViolation
from octahedral.kinematics import Configuration, EulerOrientation, Pose, anchor_arrays, margin
from octahedral.singularity import (
    classify_orientation,
    general_case_positions,
    is_unavoidable,
    recover_sigma,
    recover_sigma_batch,
    sample_row,
    singular_base_sizes,
    unavoidable_batch,
)
from octahedral.singularity.table import ROW_DIMS, all_branches, sample_orientation

GOLDEN_E = np.array([4 * np.sqrt(105) / 175, np.sqrt(105) / 21, 8 * np.sqrt(105) / 105, -16 * np.sqrt(105) / 525])
GOLDEN_P = np.array([
    (-148327 / 130830, -66032 / 65415, 12304 / 13083),
    (40969 / 65415, -85772 / 65415, 12304 / 13083),
])


def independent_coefficients(E, S, nodes=(0.4, 0.8, 1.3, 1.9, 2.6)):
    """Least-squares quadratic through det/g^3 with rows built from scratch."""
    dets = []
    for g in nodes:
        n, M = anchor_arrays(E, S, np.full(len(E), g))
        L = n - M
        J = np.concatenate([np.cross(M, L), L], axis=-1)
        dets.append(np.linalg.det(J) / g**3)
    return np.polyfit(np.array(nodes), np.array(dets), 2).T


def test_coefficients_match_independent_fit_on_corpus():
    rng = np.random.default_rng(10)
    K = 10_000
    E = rng.normal(size=(K, 4))
    S = rng.uniform(-2, 2, size=(K, 3))
    coeffs, scale, residual = recover_sigma_batch(E, S)
    ref = independent_coefficients(E, S)
    assert residual.max() < 1e-10
    assert np.max(np.abs(coeffs - ref) / scale[:, None]) < 1e-9


def test_recovered_polynomial_predicts_determinant():
    pose = Pose.make((0.8, -0.3, 0.4, 0.2), (0.3, 0.1, 1.1))
    sigma = recover_sigma(pose)
    for g in (0.7, 1.7, 4.0):
        n, M = anchor_arrays([pose.orientation.as_array()], [pose.s], [g])
        L = n - M
        det = np.linalg.det(np.concatenate([np.cross(M, L), L], axis=-1))[0]
        assert det == pytest.approx(g**3 * sigma(g), rel=1e-9)


def test_singular_base_sizes_are_roots():
    rng = np.random.default_rng(11)
    found = 0
    for _ in range(50):
        pose = Pose.make(rng.normal(size=4), rng.uniform(-1, 1, 3))
        sigma = recover_sigma(pose)
        for g in singular_base_sizes(sigma, 0.05, 10.0):
            found += 1
            assert abs(margin(Configuration(pose, g))) < 1e-8
    assert found > 0


def test_structure_violation_is_reported(monkeypatch):
    real = kernels.spear_dets

    def noisy(n, M, unit=True):
        det, had = real(n, M, unit)
        return det * (1 + 1e-3 * np.arange(len(det)) % 7), had

    monkeypatch.setattr(kernels, "spear_dets", noisy)
    with pytest.raises(StructureViolation):
        recover_sigma(Pose.make((0.8, -0.3, 0.4, 0.2), (0.3, 0.1, 1.1)))


def test_golden_orientation_classification():
    strata = classify_orientation(GOLDEN_E)
    assert [s.row for s in strata] == [21, 22]
    for s, p in zip(strata, GOLDEN_P):
        np.testing.assert_allclose(s.position_set.point, p, atol=1e-12)


def test_golden_positions_are_unavoidable():
    for p in GOLDEN_P:
        assert is_unavoidable(Pose.make(GOLDEN_E, p))
    assert not is_unavoidable(Pose.make(GOLDEN_E, GOLDEN_P[0] + [0.01, 0, 0]))


def test_identity_orientation_is_row_1():
    strata = classify_orientation((1, 0, 0, 0))
    assert [s.row for s in strata] == [1]
    assert strata[0].position_set.kind == "plane"


def test_fichter_orientation_is_unavoidable_everywhere():
    rows = {(s.row, s.branch_label) for s in classify_orientation((1, 0, 0, 1))}
    assert (2, "+") in rows
    rng = np.random.default_rng(12)
    S = rng.uniform(-2, 2, size=(200, 3))
    for e in ((1, 0, 0, 1), (1, 0, 0, -1)):
        assert unavoidable_batch(np.tile(e, (200, 1)), S).all()


def test_only_row_15_for_e0_e1_zero():
    assert [s.row for s in classify_orientation((0, 0, 1, 1))] == [15]


def test_classification_is_projective():
    for e in (GOLDEN_E, np.array([1.0, 0, 0, 1]), np.array([0.0, 0, 1, 1])):
        a = classify_orientation(e)
        b = classify_orientation(-3.5 * e)
        key = lambda strata: [(s.row, s.branch, s.position_set.kind) for s in strata]  # noqa: E731
        assert key(a) == key(b)
        for sa, sb in zip(a, b):
            if sa.position_set.point is not None:
                np.testing.assert_allclose(sa.position_set.point, sb.position_set.point, atol=1e-14)


def test_general_case_guard():
    with pytest.raises(DegenerateOrientation):
        general_case_positions((1, 0, 0, 1))
    with pytest.raises(DegenerateOrientation):
        general_case_positions((1, 0.3, 0.2, 1))


def test_every_branch_samples_are_unavoidable():
    rng = np.random.default_rng(13)
    for row, branch in all_branches():
        samples = [sample_row(row, branch, rng) for _ in range(20)]
        ok = unavoidable_batch([s.pose.orientation.as_array() for s in samples], [s.pose.s for s in samples])
        assert ok.all(), (row, branch)


def test_positions_off_the_reported_sets_are_avoidable():
    rng = np.random.default_rng(14)
    for row, branch in all_branches():
        for _ in range(3):
            e = sample_orientation(row, branch, rng)
            strata = classify_orientation(e)
            assert any(s.row == row for s in strata)
            P = rng.uniform(-2, 2, size=(20, 3))
            far = np.array([min(s.position_set.distance(p) for s in strata) > 1e-3 for p in P])
            ok = unavoidable_batch(np.tile(e, (len(P), 1)), P)
            assert not ok[far].any(), (row, branch)


def test_general_positions_are_the_only_zeros():
    """Minimize the coefficient vector over position from many starts."""
    rng = np.random.default_rng(15)
    converged = 0
    for _ in range(6):
        e = sample_orientation(21, None, rng, guard_margin=0.1)
        targets = np.array([p.s for p in general_case_positions(e)])

        def resid(p):
            coeffs, _, _ = recover_sigma_batch([e], [p])
            return coeffs[0]

        for _ in range(6):
            sol = least_squares(resid, rng.uniform(-2, 2, 3), xtol=1e-14, ftol=1e-14, gtol=1e-14)
            if np.linalg.norm(sol.fun) < 1e-10:
                converged += 1
                assert np.min(np.linalg.norm(targets - sol.x, axis=1)) < 1e-5
    assert converged >= 6


def test_row_dimensions_are_sane():
    assert set(ROW_DIMS) == set(range(1, 23))
    assert all(0 <= d <= 6 for d in ROW_DIMS.values())


def test_orientation_objects_accepted():
    o = EulerOrientation.from_array(GOLDEN_E * 2)
    assert [s.row for s in classify_orientation(o)] == [21, 22]
