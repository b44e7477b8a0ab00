import numpy as np
import pytest

from octahedral import _pykernels, kernels
from octahedral.kinematics import anchor_arrays

from oracles import segment_distance_oracle

BACKENDS = kernels.available_backends()


def random_anchors(k, seed=0):
    rng = np.random.default_rng(seed)
    return anchor_arrays(rng.normal(size=(k, 4)), rng.uniform(-2, 2, (k, 3)), rng.uniform(0.2, 3, k))


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in BACKENDS


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("unit", [True, False])
def test_spear_dets_match_numpy(name, unit):
    n, M = random_anchors(300)
    det, had = BACKENDS[name].spear_dets(n, M, unit)
    L = n - M
    if unit:
        L = L / np.linalg.norm(L, axis=-1, keepdims=True)
    J = np.concatenate([np.cross(M, L), L], axis=-1)
    np.testing.assert_allclose(det, np.linalg.det(J), rtol=1e-10, atol=1e-13)
    np.testing.assert_allclose(had, np.prod(np.linalg.norm(J, axis=-1), axis=-1), rtol=1e-12)


def test_backends_agree():
    if "cython" not in BACKENDS:
        pytest.skip("compiled kernels not built")
    n, M = random_anchors(1000, seed=1)
    for unit in (True, False):
        a = BACKENDS["cython"].spear_dets(n, M, unit)
        b = BACKENDS["python"].spear_dets(n, M, unit)
        np.testing.assert_allclose(a[0], b[0], rtol=1e-10, atol=1e-14)
        np.testing.assert_allclose(a[1], b[1], rtol=1e-12)
    rng = np.random.default_rng(2)
    segs = [rng.normal(size=(1000, 3)) for _ in range(4)]
    np.testing.assert_allclose(BACKENDS["cython"].segment_distances(*segs),
                               BACKENDS["python"].segment_distances(*segs), atol=1e-13)


def test_degenerate_leg_gives_nan_in_unit_mode():
    n, M = random_anchors(3)
    n = n.copy()
    n[1, 2] = M[1, 2]
    for impl in BACKENDS.values():
        det, _ = impl.spear_dets(n, M, True)
        assert np.isnan(det[1]) and np.isfinite(det[0]) and np.isfinite(det[2])


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_segment_distance_against_sampling(name):
    rng = np.random.default_rng(3)
    p0, p1, q0, q1 = (rng.normal(size=(2000, 3)) for _ in range(4))
    d = BACKENDS[name].segment_distances(p0, p1, q0, q1)
    ref = segment_distance_oracle(p0, p1, q0, q1)
    np.testing.assert_allclose(d, ref, atol=1e-9)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_segment_distance_special_cases(name):
    f = BACKENDS[name].segment_distances
    a = lambda *v: np.array([v], dtype=float)  # noqa: E731
    # parallel, offset by one
    assert f(a(0, 0, 0), a(1, 0, 0), a(0, 1, 0), a(1, 1, 0))[0] == pytest.approx(1.0)
    # collinear, separated by a gap
    assert f(a(0, 0, 0), a(1, 0, 0), a(3, 0, 0), a(4, 0, 0))[0] == pytest.approx(2.0)
    # crossing
    assert f(a(-1, 0, 0), a(1, 0, 0), a(0, -1, 0), a(0, 1, 0))[0] == pytest.approx(0.0, abs=1e-15)
    # skew
    assert f(a(-1, 0, 0), a(1, 0, 0), a(0, -1, 2), a(0, 1, 2))[0] == pytest.approx(2.0)
    # point against segment
    assert f(a(0, 2, 0), a(0, 2, 0), a(-1, 0, 0), a(1, 0, 0))[0] == pytest.approx(2.0)
    # two points
    assert f(a(0, 0, 0), a(0, 0, 0), a(3, 4, 0), a(3, 4, 0))[0] == pytest.approx(5.0)


def test_chunked_is_thread_count_independent():
    n, M = random_anchors(5000, seed=4)
    one = kernels.chunked(lambda x, y: kernels.spear_dets(x, y, True), (n, M), threads=1)
    many = kernels.chunked(lambda x, y: kernels.spear_dets(x, y, True), (n, M), threads=4)
    np.testing.assert_array_equal(one[0], many[0])
    np.testing.assert_array_equal(one[1], many[1])


def test_python_fallback_is_importable_alone():
    assert callable(_pykernels.spear_dets) and callable(_pykernels.segment_distances)


@pytest.mark.parametrize("number", [1, 4, 7, 8])
def test_acceptance_on_python_fallback(monkeypatch, number):
    from octahedral.acceptance import CHECKS

    monkeypatch.setattr(kernels, "spear_dets", _pykernels.spear_dets)
    monkeypatch.setattr(kernels, "segment_distances", _pykernels.segment_distances)
    assert CHECKS[number]().passed
