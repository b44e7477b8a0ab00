"""An octahedral-type manipulator with three redundant legs whose platform
joints do not coincide in pairs, and a pose that is singular for every
setting of the redundant legs.

Construction (all in the base plane z = 0 after vertical projection):

* platform anchors m1..m6 sit on the unit circle at ``120k -+ beta`` degrees,
  so (m6, m1), (m2, m3), (m4, m5) are the pairs spanning the long sides;
* each leg j lies, in the start pose, in the vertical plane through the
  tangent line of the circle at m_j;
* non-redundant legs j = 2, 4, 6 end at the intersection of the tangent
  lines at m_j and m_{j+1}, which puts M_{i-1} on the line of leg i;
* redundant legs i = 1, 3, 5 slide along a segment of the tangent line at
  m_i centred on the tangency point. ``lam_i`` in [0, 1] is the position on
  the segment and is the redundant coordinate.

Rotating the platform by -90 degrees about the vertical axis produces a
Fichter-type pose whose Jacobian vanishes for all ``lam``.
"""
import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .kinematics import DEGENERATE_LENGTH, EulerOrientation, Pose, rotation_matrix, spear_rows

REDUNDANT_LEGS = (1, 3, 5)
DEFAULT_PARAMS = ((1.0, 0.5), (0.7, 0.3))  # (height, segment half-length)


@dataclass(frozen=True)
class RedundantParams:
    lam1: float
    lam3: float
    lam5: float

    def __post_init__(self):
        for v in (self.lam1, self.lam3, self.lam5):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"redundant parameters must lie in [0, 1], got {v}")

    def as_array(self):
        return np.array([self.lam1, self.lam3, self.lam5])


@dataclass(frozen=True)
class RedundantOctahedron:
    platform: np.ndarray  # (6, 3) anchors m1..m6 in the moving frame
    fixed_base: dict  # j -> M_j for j = 2, 4, 6
    segments: dict  # i -> (M_ia, M_ib) for i = 1, 3, 5
    tangents: dict  # j -> (tangency point, unit tangent) of the line eps_j ∩ delta
    height: float
    half_length: float
    beta: float

    def start_pose(self):
        return Pose(EulerOrientation(1.0, 0.0, 0.0, 0.0), (0.0, 0.0, self.height))

    def rotated_pose(self, degrees):
        o = EulerOrientation.from_axis_angle((0, 0, 1), np.radians(degrees))
        return Pose(o, (0.0, 0.0, self.height))

    def fichter_pose(self):
        return self.rotated_pose(-90.0)

    def base_anchors(self, lam):
        """(6, 3) base anchors for redundant parameters ``lam`` = (lam1, lam3, lam5)."""
        lam = lam.as_array() if isinstance(lam, RedundantParams) else np.asarray(lam, float)
        M = np.empty((6, 3))
        for k, i in enumerate(REDUNDANT_LEGS):
            a, b = self.segments[i]
            M[i - 1] = a + lam[k] * (b - a)
        for j, p in self.fixed_base.items():
            M[j - 1] = p
        return M

    def collinearity_residual(self):
        """Largest distance of M_{i-1} from the line through M_ia, M_ib."""
        worst = 0.0
        for i in REDUNDANT_LEGS:
            a, b = self.segments[i]
            p = self.fixed_base[i - 1 or 6]
            d = (b - a) / np.linalg.norm(b - a)
            r = p - a
            worst = max(worst, float(np.linalg.norm(r - (r @ d) * d)))
        return worst


def _line_intersection(p, u, q, v):
    t, _ = np.linalg.solve(np.array([u[:2], -v[:2]]).T, (q - p)[:2])
    return p + t * u


def build_counterexample(height=1.0, half_length=0.5, beta=np.pi / 4):
    """Construct the redundant manipulator from its tangent-plane recipe."""
    angles = {}
    for k in range(3):
        phi = 2 * np.pi * k / 3
        angles[2 * k or 6] = phi - beta
        angles[2 * k + 1] = phi + beta
    platform = np.array([[np.cos(angles[j]), np.sin(angles[j]), 0.0] for j in range(1, 7)])
    tangents = {
        j: (platform[j - 1].copy(), np.array([-np.sin(angles[j]), np.cos(angles[j]), 0.0]))
        for j in range(1, 7)
    }
    fixed, segments = {}, {}
    for i in REDUNDANT_LEGS:
        prev = i - 1 or 6
        p_i, t_i = tangents[i]
        fixed[prev] = _line_intersection(p_i, t_i, *tangents[prev])
        segments[i] = (p_i - half_length * t_i, p_i + half_length * t_i)
    return RedundantOctahedron(platform, fixed, segments, tangents, height, half_length, beta)


def _platform_world(mech, pose):
    R = rotation_matrix(pose.orientation.unit())
    return mech.platform @ R.T + pose.translation


def jacobian_red(mech, pose, lam):
    """Spear-row Jacobian with redundant base anchors placed by ``lam``."""
    return spear_rows(_platform_world(mech, pose), mech.base_anchors(lam))


def lambda_grid(grid_n):
    axis = np.linspace(0.0, 1.0, grid_n)
    return np.array(list(itertools.product(axis, repeat=3)))


def grid_margins(mech, pose, grid_n, unit=True):
    """Determinants over a grid_n^3 lattice in lam.

    With ``unit`` the normalized margins are returned (nan at degenerate
    legs); otherwise the unnormalized determinants and Hadamard bounds.
    """
    lams = lambda_grid(grid_n)
    n = np.broadcast_to(_platform_world(mech, pose), (len(lams), 6, 3))
    M = np.array([mech.base_anchors(lam) for lam in lams])
    det, had = kernels.spear_dets(np.ascontiguousarray(n), M, unit)
    if unit:
        return lams, det / had
    return lams, det, had


def verify_unavoidable(mech, pose, grid_n=11):
    """Largest |normalized det| over the lam lattice and where it occurs.

    Degenerate legs (a base anchor meeting its platform anchor) count as
    singular cells.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    lams, m = grid_margins(mech, pose, grid_n)
    m = np.where(np.isnan(m), 0.0, np.abs(m))
    k = int(np.argmax(m))
    return {
        "pose": pose,
        "grid_n": grid_n,
        "max_margin": float(m[k]),
        "argmax_lambda": [float(v) for v in lams[k]],
    }


def fit_lambda_polynomial(mech, pose, grid_n=11, degree=2):
    """Tensor-product polynomial fit of the unnormalized det over lam.

    Each redundant row is affine in its lam, so the exact determinant has
    degree at most one per variable; fitting with ``degree`` > 1 lets the
    extra coefficients certify that. Coefficients are divided by the largest
    Hadamard bound on the grid. Returns (exponents, coefficients, residual).
    """
    lams, det, had = grid_margins(mech, pose, grid_n, unit=False)
    exps = list(itertools.product(range(degree + 1), repeat=3))
    # shifted variables keep the monomial basis well conditioned on [0, 1]
    u = 2.0 * lams - 1.0
    A = np.column_stack([np.prod(u ** np.array(ex), axis=1) for ex in exps])
    scale = float(np.max(had))
    coef, *_ = np.linalg.lstsq(A, det / scale, rcond=None)
    resid = float(np.max(np.abs(A @ coef - det / scale)))
    return exps, coef, resid


def legs_degenerate(mech, pose, lam):
    d = _platform_world(mech, pose) - mech.base_anchors(lam)
    return bool(np.any(np.linalg.norm(d, axis=1) < DEGENERATE_LENGTH))
