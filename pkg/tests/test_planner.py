import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from octahedral.errors import InfeasibleEnd, InfeasibleStart
from octahedral.kinematics import (
    CLEARANCE_PAIRS,
    Configuration,
    EulerOrientation,
    Pose,
    leg_anchors,
    margin,
    mirror_pose,
)
from octahedral.planner import (
    GProfile,
    PlanFailure,
    SingularityField,
    clearances,
    detect_crossings,
    fichter_path,
    leg_clearance,
    make_path,
    path_from_poses,
    plan_g_profile,
    singularity_field,
    verify_profile,
)
from octahedral.singularity import recover_sigma, singular_base_sizes

from oracles import segment_distance_oracle

IDENTITY = (1.0, 0.0, 0.0, 0.0)


def rot_z(deg):
    return EulerOrientation.from_axis_angle((0, 0, 1), np.radians(deg))


# paths -----------------------------------------------------------------------

def test_constant_path():
    p = Pose.make((0.9, 0.1, 0.2, 0.3), (0.1, 0.2, 1.0))
    path = make_path(p, p, 5)
    assert np.ptp(path.orientations, axis=0).max() == 0
    assert np.ptp(path.translations, axis=0).max() == 0


def test_slerp_midpoint():
    path = make_path(Pose(rot_z(0), (0, 0, 1)), Pose(rot_z(90), (0, 0, 1)), 3)
    np.testing.assert_allclose(path.orientations[1], rot_z(45).unit(), atol=1e-15)


def test_antipodal_end_is_sign_aligned():
    q = np.array([0.9, 0.1, -0.3, 0.2])
    start = Pose.make(q, (0, 0, 1))
    end = Pose.make(-np.array([0.8, 0.3, -0.2, 0.1]), (0, 0, 1))
    path = make_path(start, end, 21)
    steps = np.linalg.norm(np.diff(path.orientations, axis=0), axis=1)
    assert np.ptp(steps) < 1e-12
    assert np.all(np.einsum("ij,ij->i", path.orientations[1:], path.orientations[:-1]) >= 0)


def test_endpoints_exact():
    start = Pose.make((0.9, 0.1, -0.3, 0.2), (0.1, -0.2, 0.7))
    end = Pose.make((0.2, 0.3, 0.4, 0.5), (1, 2, 3))
    path = make_path(start, end, 7)
    np.testing.assert_array_equal(path.translations[0], start.translation)
    np.testing.assert_array_equal(path.translations[-1], end.translation)
    np.testing.assert_allclose(path.orientations[0], start.orientation.unit(), atol=0)


def test_path_needs_two_samples():
    p = Pose.make(IDENTITY, (0, 0, 1))
    with pytest.raises(ValueError):
        make_path(p, p, 1)


def test_path_from_poses_aligns_signs():
    poses = [Pose(rot_z(d), (0, 0, 1)) for d in (0, 10, 20)]
    poses[1] = Pose.make(-poses[1].orientation.as_array(), (0, 0, 1))
    path = path_from_poses(poses)
    assert np.all(np.einsum("ij,ij->i", path.orientations[1:], path.orientations[:-1]) > 0)


# field and crossings -----------------------------------------------------------

def test_field_shape_and_rows():
    path = make_path(Pose.make(IDENTITY, (0, 0, 1)), Pose.make(IDENTITY, (0.3, 0, 1)), 4)
    f = singularity_field(path, 0.5, 2.0, 3)
    assert f.values.shape == (4, 3) == f.clearance.shape
    assert len(list(f.rows())) == 12


def test_field_thread_count_does_not_matter():
    path = fichter_path(41)
    a = singularity_field(path, 0.5, 2.0, 40, threads=1)
    b = singularity_field(path, 0.5, 2.0, 40, threads=4)
    np.testing.assert_array_equal(a.values, b.values)
    np.testing.assert_array_equal(a.clearance, b.clearance)


def test_fichter_pinned_field_vanishes():
    p = Pose.make((1, 0, 0, 1), (0.1, -0.2, 1.0))
    f = singularity_field(make_path(p, p, 5), 0.3, 3.0, 9)
    assert np.nanmax(np.abs(f.values)) < 1e-12


def test_field_sign_changes_match_sigma_roots():
    rng = np.random.default_rng(0)
    seen = 0
    for _ in range(40):
        pose = Pose.make(rng.normal(size=4), rng.uniform(-1, 1, 3))
        f = singularity_field(make_path(pose, pose, 2), 0.2, 4.0, 400)
        col = f.values[0]
        flips = np.flatnonzero(np.sign(col[1:]) != np.sign(col[:-1]))
        roots = singular_base_sizes(recover_sigma(pose), 0.2, 4.0)
        assert len(flips) == len(roots)
        for k, r in zip(flips, roots):
            assert f.g_grid[k] <= r <= f.g_grid[k + 1]
        seen += len(roots)
    assert seen > 0


def test_crossing_through_base_plane():
    path = make_path(Pose.make(IDENTITY, (0.1, 0.2, -0.5)), Pose.make(IDENTITY, (0.1, 0.2, 1.5)), 9)
    assert detect_crossings(path, 1.0) == [0.25]
    f = singularity_field(path, 0.5, 2.0, 4)
    assert np.max(np.abs(f.values[2])) < 1e-15


def test_crossings_are_roots():
    path = make_path(Pose.make((0.94, 0.209, -0.201, 0.181), (0.6, -0.2, 0.8)),
                     Pose.make((0.94, 0.182, 0.193, 0.216), (0.6, 0.9, 0.4)), 41)
    taus = detect_crossings(path, 1.9)
    assert len(taus) == 2
    for t in taus:
        assert abs(margin(Configuration(path.at(t), 1.9))) < 1e-6


def test_no_crossing_for_constant_pose():
    p = Pose.make(IDENTITY, (0, 0, 1))
    assert detect_crossings(make_path(p, p, 5), 1.0) == []


# clearance -------------------------------------------------------------------------

def test_clearance_against_oracle():
    rng = np.random.default_rng(1)
    E = rng.normal(size=(1000, 4))
    S = rng.uniform(-1, 1, (1000, 3)) + [0, 0, 1]
    G = rng.uniform(0.3, 2.5, 1000)
    got = clearances(E, S, G)
    ref = []
    for e, s, g in zip(E, S, G):
        n, M = leg_anchors(Configuration.make(e, s, g))
        i, j = np.array(CLEARANCE_PAIRS).T
        ref.append(segment_distance_oracle(M[i], n[i], M[j], n[j]).min())
    np.testing.assert_allclose(got, ref, atol=1e-6)


def test_nine_pairs():
    assert len(CLEARANCE_PAIRS) == 9
    assert (0, 1) not in CLEARANCE_PAIRS and (0, 5) not in CLEARANCE_PAIRS


def test_home_clearance_positive():
    assert leg_clearance(Configuration.make(IDENTITY, (0, 0, 1), 1.0)) > 0.3


def test_crossing_legs_have_zero_clearance():
    # in the base plane, rotated by 120 degrees, opposite legs intersect
    config = Configuration(Pose(rot_z(120), (0, 0, 0)), 1.0)
    assert leg_clearance(config) < 1e-12


def test_clearance_mirror_invariant():
    rng = np.random.default_rng(2)
    for _ in range(50):
        config = Configuration.make(rng.normal(size=4), rng.uniform(-1, 1, 3) + [0, 0, 1], rng.uniform(0.5, 2))
        mirrored = Configuration(mirror_pose(config.pose), config.g)
        assert leg_clearance(mirrored) == pytest.approx(leg_clearance(config), abs=1e-12)


# planning -----------------------------------------------------------------------------

def test_everywhere_feasible_gives_constant_profile():
    p = Pose.make(IDENTITY, (0, 0, 1))
    path = make_path(p, p, 6)
    f = singularity_field(path, 0.5, 2.0, 16)
    prof = plan_g_profile(path, 0.5, 2.0, 16, 1e-4, 1e-3, 0.1)
    assert isinstance(prof, GProfile)
    assert prof.total_variation == 0
    assert prof.g[0] == f.g_grid[np.argmax(np.abs(f.values[0]))]


def test_fichter_crossing_blocks_every_profile():
    res = plan_g_profile(fichter_path(), 0.5, 2.0, 31, 1e-4, 0.05, 0.1)
    assert isinstance(res, PlanFailure)
    assert res.all_infeasible and res.blocking_tau == 0.5
    d = res.to_dict()
    assert d["status"] == "infeasible" and len(d["evidence"]["margin"]) == 31


def test_fichter_pinned_path_fails_at_start():
    p = fichter_path().at(0.5)
    with pytest.raises(InfeasibleStart) as info:
        plan_g_profile(make_path(p, p, 5), 0.5, 2.0, 11, 1e-4, 0.05, 0.1)
    assert info.value.failure.all_infeasible


def test_infeasible_end():
    good = Pose(rot_z(80), (0, 0, 1))
    bad = Pose(rot_z(90), (0, 0, 1))
    with pytest.raises(InfeasibleEnd):
        plan_g_profile(make_path(good, bad, 5), 0.5, 2.0, 11, 1e-4, 0.01, 0.5)


def test_pinned_endpoints_force_a_detour():
    path = make_path(Pose.make((0.94, 0.209, -0.201, 0.181), (0.6, -0.2, 0.8)),
                     Pose.make((0.94, 0.182, 0.193, 0.216), (0.6, 0.9, 0.4)), 41)
    prof = plan_g_profile(path, 0.5, 2.0, 31, 1e-4, 0.05, 0.1, g_start=1.9, g_end=1.9)
    assert isinstance(prof, GProfile)
    assert prof.g[0] == pytest.approx(1.9) and prof.g[-1] == pytest.approx(1.9)
    assert prof.total_variation > 0
    ok, details = verify_profile(path, prof, 1e-4, 0.05, 0.1)
    assert ok and np.min(np.abs(details["margin"])) >= 1e-4


def test_verify_profile_catches_tampering():
    p = Pose.make(IDENTITY, (0, 0, 1))
    path = make_path(p, p, 4)
    prof = plan_g_profile(path, 0.5, 2.0, 16, 1e-4, 1e-3, 0.1)
    jumpy = GProfile(prof.tau, np.array([0.5, 2.0, 0.5, 2.0]), prof.g_index, 0, 0, 0)
    assert not verify_profile(path, jumpy, 1e-4, 1e-3, 0.1)[0]


def test_tolerances_must_be_positive():
    p = Pose.make(IDENTITY, (0, 0, 1))
    with pytest.raises(ValueError):
        plan_g_profile(make_path(p, p, 3), 0.5, 2.0, 4, 0.0, 0.1, 0.1)


def brute_force(values, clear, g_grid, eps_det, eps_clear, rate):
    """Enumerate every index sequence; returns (bottleneck, total variation) or None."""
    nt, ng = values.shape
    ok = (np.abs(values) >= eps_det) & (clear >= eps_clear)
    best = None
    for seq in itertools.product(range(ng), repeat=nt):
        if not all(ok[i, k] for i, k in enumerate(seq)):
            continue
        if any(abs(g_grid[a] - g_grid[b]) > rate + 1e-12 for a, b in zip(seq, seq[1:])):
            continue
        if any(np.sign(values[i, a]) != np.sign(values[i + 1, b]) for i, (a, b) in enumerate(zip(seq, seq[1:]))):
            continue
        neck = min(abs(values[i, k]) for i, k in enumerate(seq))
        tv = sum(abs(g_grid[a] - g_grid[b]) for a, b in zip(seq, seq[1:]))
        key = (-neck, tv)
        if best is None or key < best:
            best = key
    return None if best is None else (-best[0], best[1])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dp_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    nt, ng = 4, 4
    g_grid = np.linspace(0.5, 2.0, ng)
    values = rng.choice([-1, 1], size=(nt, ng)) * rng.uniform(0, 1, (nt, ng))
    values[:, :2] = np.abs(values[:, :2])  # keep some sign-consistent corridors
    clear = rng.uniform(0, 1, (nt, ng))
    field_ = SingularityField(np.linspace(0, 1, nt), g_grid, values, clear)
    args = (0.5, 2.0, ng, 0.2, 0.2, 0.5)
    expected = brute_force(values, clear, g_grid, 0.2, 0.2, 0.5)
    try:
        res = plan_g_profile(None, *args, field_=field_)
    except (InfeasibleStart, InfeasibleEnd):
        assert expected is None
        return
    if expected is None:
        assert isinstance(res, PlanFailure)
    else:
        assert isinstance(res, GProfile)
        assert res.min_margin == pytest.approx(expected[0])
        assert res.total_variation == pytest.approx(expected[1])
