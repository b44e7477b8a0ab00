"""Pure numpy implementations of the batched kernels.

Every function here has a compiled twin in ``_kernels.pyx`` with the same
signature and semantics; ``octahedral.kernels`` picks one at import time.
"""
import numpy as np

DEGENERATE_LENGTH = 1e-12


def spear_dets(n, M, unit=True):
    """Determinants of the spear-row matrices of K six-leg line sets.

    ``n`` and ``M`` are (K, 6, 3) arrays of platform-side and base-side
    anchors. Row i of each matrix is ``(M_i x l_i, l_i)`` with
    ``l_i = n_i - M_i``, scaled to unit length when ``unit`` is true.

    Returns ``(det, hadamard)``: the determinants and the products of row
    norms. Sets with a leg shorter than 1e-12 get ``nan`` in both outputs
    when ``unit`` is true.
    """
    n = np.asarray(n, dtype=float)
    M = np.asarray(M, dtype=float)
    l = n - M
    lengths = np.linalg.norm(l, axis=-1)
    bad = np.any(lengths < DEGENERATE_LENGTH, axis=-1)
    if unit:
        with np.errstate(invalid="ignore", divide="ignore"):
            l = l / lengths[..., None]
    rows = np.concatenate([np.cross(M, l), l], axis=-1)
    with np.errstate(invalid="ignore"):
        det = np.linalg.det(rows)
    hadamard = np.prod(np.linalg.norm(rows, axis=-1), axis=-1)
    if unit:
        det = np.where(bad, np.nan, det)
        hadamard = np.where(bad, np.nan, hadamard)
    return det, hadamard


def segment_distances(p0, p1, q0, q1):
    """Minimum distances between K pairs of 3D segments [p0,p1] and [q0,q1]."""
    p0, p1, q0, q1 = (np.asarray(a, dtype=float) for a in (p0, p1, q0, q1))
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)
    eps = 1e-300
    tiny_a = a <= eps
    tiny_e = e <= eps
    denom = a * e - b * b

    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(denom > 0.0, np.clip((b * f - c * e) / denom, 0.0, 1.0), 0.0)
        t = (b * s + f) / e
        # re-clamp t and recompute s when t leaves [0, 1]
        s = np.where(t < 0.0, np.clip(-c / a, 0.0, 1.0), s)
        s = np.where(t > 1.0, np.clip((b - c) / a, 0.0, 1.0), s)
        t = np.clip(t, 0.0, 1.0)

        # first segment degenerates to a point
        s = np.where(tiny_a, 0.0, s)
        t = np.where(tiny_a, np.clip(f / e, 0.0, 1.0), t)
        # second segment degenerates to a point
        t = np.where(tiny_e, 0.0, t)
        s = np.where(tiny_e & ~tiny_a, np.clip(-c / a, 0.0, 1.0), s)
    s = np.where(tiny_a & tiny_e, 0.0, s)
    t = np.where(tiny_a & tiny_e, 0.0, t)

    c1 = p0 + d1 * s[:, None]
    c2 = q0 + d2 * t[:, None]
    return np.linalg.norm(c1 - c2, axis=-1)
