"""Recovery of the g-polynomial hidden in det J.

With unnormalized leg vectors ``n_i - M_i`` the Jacobian determinant at a
fixed pose is ``g**3 * (c2 g**2 + c1 g + c0)``. The three coefficients are
recovered by interpolating ``det/g**3`` at three base sizes and checked on
held-out sizes. A pose is an unavoidable singularity exactly when all three
coefficients vanish.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateLeg, StructureViolation
from ..kinematics import DEGENERATE_LENGTH, anchor_arrays, kernels

FIT_SAMPLES = (0.5, 1.0, 1.5)
HOLDOUT_SAMPLES = (2.0, 3.0)
STRUCTURE_TOL = 1e-8
UNAVOIDABLE_TOL = 1e-8
MAX_CONDITION = 1e6


@dataclass(frozen=True)
class SigmaCoefficients:
    c2: float
    c1: float
    c0: float
    scale: float
    residual: float

    def as_array(self):
        return np.array([self.c2, self.c1, self.c0])

    def relative(self):
        return self.as_array() / self.scale

    def __call__(self, g):
        return np.polyval(self.as_array(), g)


def _fit_nodes(samples):
    nodes = np.asarray(samples, dtype=float)
    V = np.vander(nodes, 3)
    if np.linalg.cond(V) > MAX_CONDITION:
        lo = nodes.min()
        nodes = np.array([lo, lo + 0.5, lo + 1.0])
        V = np.vander(nodes, 3)
    return nodes, V


def recover_sigma_batch(E, S, samples=FIT_SAMPLES, holdout=HOLDOUT_SAMPLES, threads=1):
    """Vectorized coefficient recovery for K poses.

    Returns ``(coeffs, scale, residual)`` with coeffs of shape (K, 3) ordered
    (c2, c1, c0). ``scale`` is the largest Hadamard bound of ``det/g**3`` over
    all sampled g, and ``residual`` the worst hold-out misfit divided by it.
    Raises DegenerateLeg if any sampled configuration has a zero-length leg.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    S = np.atleast_2d(np.asarray(S, dtype=float))
    K = len(E)
    nodes, V = _fit_nodes(samples)
    gs = np.r_[nodes, np.asarray(holdout, dtype=float)]
    m = len(gs)

    n, M = anchor_arrays(np.repeat(E, m, axis=0), np.repeat(S, m, axis=0), np.tile(gs, K))
    lengths = np.linalg.norm(n - M, axis=-1)
    if np.any(lengths < DEGENERATE_LENGTH):
        k, leg = np.argwhere(lengths < DEGENERATE_LENGTH)[0]
        raise DegenerateLeg(int(leg) + 1, float(lengths[k, leg]))
    det, had = kernels.chunked(lambda a, b: kernels.spear_dets(a, b, False), (n, M), threads)
    d = (det / np.tile(gs, K) ** 3).reshape(K, m)
    bound = (had / np.tile(gs, K) ** 3).reshape(K, m)

    coeffs = np.linalg.solve(V, d[:, :3].T).T
    pred = coeffs @ np.vander(gs[3:], 3).T
    scale = bound.max(axis=1)
    residual = np.max(np.abs(pred - d[:, 3:]), axis=1) / scale
    return coeffs, scale, residual


def recover_sigma(pose, samples=FIT_SAMPLES, holdout=HOLDOUT_SAMPLES, tol=STRUCTURE_TOL):
    """Coefficients of det J / g^3 as a quadratic in g at a fixed pose."""
    e = pose.orientation.as_array()
    coeffs, scale, residual = recover_sigma_batch(e[None], pose.translation[None], samples, holdout)
    if residual[0] > tol:
        raise StructureViolation(float(residual[0]), tol)
    c2, c1, c0 = coeffs[0]
    return SigmaCoefficients(float(c2), float(c1), float(c0), float(scale[0]), float(residual[0]))


def is_unavoidable(pose, tol=UNAVOIDABLE_TOL):
    """True when the pose is singular for every base circumradius g > 0."""
    sigma = recover_sigma(pose)
    return bool(np.max(np.abs(sigma.relative())) < tol)


def unavoidable_batch(E, S, tol=UNAVOIDABLE_TOL, threads=1):
    coeffs, scale, residual = recover_sigma_batch(E, S, threads=threads)
    if np.any(residual > STRUCTURE_TOL):
        raise StructureViolation(float(residual.max()), STRUCTURE_TOL)
    return np.max(np.abs(coeffs), axis=1) / scale < tol


def singular_base_sizes(sigma, gmin=0.0, gmax=np.inf):
    """Real roots g in (gmin, gmax) where the pose becomes singular."""
    roots = np.roots(sigma.as_array()) if np.any(sigma.as_array()) else np.array([])
    roots = roots[np.abs(roots.imag) < 1e-12].real
    return np.sort(roots[(roots > gmin) & (roots < gmax)])
