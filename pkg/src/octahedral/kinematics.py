"""Geometry and instantaneous kinematics of the reconfigurable octahedral platform.

Frames and units: the platform triangle has circumradius 1 and every length
is measured in that unit. The base triangle is equilateral with circumradius
``g``; its vertices slide radially along guide lines through the origin, so
``g`` is the single redundant coordinate.

Leg numbering follows the pairing of the classical octahedral manipulator::

    leg   platform anchor   base anchor
    1     m12               M61
    2     m12               M23
    3     m34               M23
    4     m34               M45
    5     m56               M45
    6     m56               M61
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateLeg, InvalidOrientation, NonPositiveG, SingularJacobian

SQRT3 = np.sqrt(3.0)

# distinct platform anchors m12, m34, m56 (moving frame)
PLATFORM_ANCHORS = np.array([
    [1.0, 0.0, 0.0],
    [-0.5, SQRT3 / 2, 0.0],
    [-0.5, -SQRT3 / 2, 0.0],
])
# distinct base anchors M45, M61, M23 at g = 1; also the outward guide directions
BASE_ANCHORS = np.array([
    [-1.0, 0.0, 0.0],
    [0.5, -SQRT3 / 2, 0.0],
    [0.5, SQRT3 / 2, 0.0],
])
LEG_PLATFORM = np.array([0, 0, 1, 1, 2, 2])
LEG_BASE = np.array([1, 2, 2, 0, 0, 1])
GUIDES = BASE_ANCHORS[LEG_BASE]

# legs sharing a double joint: (1,2),(3,4),(5,6) on the platform, (2,3),(4,5),(6,1) on the base
SHARED_JOINT_PAIRS = frozenset({(0, 1), (2, 3), (4, 5), (1, 2), (3, 4), (0, 5)})
CLEARANCE_PAIRS = tuple(
    (i, j) for i in range(6) for j in range(i + 1, 6) if (i, j) not in SHARED_JOINT_PAIRS
)

# reflection y -> -y swaps legs 1<->2, 3<->6, 4<->5
MIRROR_LEG_PERMUTATION = np.array([1, 0, 5, 4, 3, 2])

DEGENERATE_LENGTH = 1e-12
SINGULARITY_TOL = 1e-9


@dataclass(frozen=True)
class EulerOrientation:
    """Homogeneous Euler parameters (e0:e1:e2:e3); e0 is the scalar part."""

    e0: float
    e1: float
    e2: float
    e3: float

    def __post_init__(self):
        arr = self.as_array()
        if not np.all(np.isfinite(arr)):
            raise InvalidOrientation(f"non-finite Euler parameters {tuple(arr)}")
        if not np.any(arr != 0.0):
            raise InvalidOrientation("Euler parameters must not all vanish")

    @classmethod
    def from_array(cls, e):
        e0, e1, e2, e3 = (float(v) for v in e)
        return cls(e0, e1, e2, e3)

    @classmethod
    def from_axis_angle(cls, axis, angle):
        axis = np.asarray(axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        return cls.from_array(np.r_[np.cos(angle / 2), np.sin(angle / 2) * axis])

    def as_array(self):
        return np.array([self.e0, self.e1, self.e2, self.e3], dtype=float)

    @property
    def N(self):
        return float(np.dot(self.as_array(), self.as_array()))

    def unit(self):
        """Representative with N = 1, e0 >= 0 and first nonzero entry positive."""
        return unit_quaternion(self.as_array())

    def normalized(self):
        return EulerOrientation.from_array(self.unit())


def unit_quaternion(e):
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    nz = np.flatnonzero(e)
    if e[nz[0]] < 0:
        e = -e
    return e + 0.0  # drop negative zeros


@dataclass(frozen=True)
class Pose:
    orientation: EulerOrientation
    s: tuple

    def __post_init__(self):
        s = tuple(float(v) for v in self.s)
        if len(s) != 3 or not all(np.isfinite(s)):
            raise ValueError(f"translation must be 3 finite numbers, got {self.s!r}")
        object.__setattr__(self, "s", s)

    @classmethod
    def make(cls, e, s):
        return cls(EulerOrientation.from_array(e), tuple(s))

    @property
    def translation(self):
        return np.array(self.s)


@dataclass(frozen=True)
class Configuration:
    pose: Pose
    g: float

    def __post_init__(self):
        g = float(self.g)
        if not g > 0 or not np.isfinite(g):
            raise NonPositiveG(self.g)
        object.__setattr__(self, "g", g)

    @classmethod
    def make(cls, e, s, g):
        return cls(Pose.make(e, s), g)


@dataclass(frozen=True)
class SpearLine:
    l: np.ndarray
    lbar: np.ndarray


@dataclass(frozen=True)
class PlatformScrew:
    """Instantaneous screw: angular velocity ``q`` and the velocity ``qbar`` of
    the platform point momentarily at the fixed origin."""

    q: np.ndarray
    qbar: np.ndarray

    def as_vector(self):
        return np.r_[self.q, self.qbar]

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v[:3].copy(), v[3:].copy())


@dataclass(frozen=True)
class JointRates:
    rdot: np.ndarray
    gdot: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rdot", np.asarray(self.rdot, dtype=float).reshape(6))


def rotation_matrix(o):
    """Rotation matrix of the Euler parameters, not divided by N.

    ``R @ R.T == N**2 * I`` and ``det(R) == N**3``.
    """
    e0, e1, e2, e3 = o.as_array() if isinstance(o, EulerOrientation) else np.asarray(o, float)
    return np.array([
        [e0 * e0 + e1 * e1 - e2 * e2 - e3 * e3, 2 * (e1 * e2 - e0 * e3), 2 * (e1 * e3 + e0 * e2)],
        [2 * (e1 * e2 + e0 * e3), e0 * e0 - e1 * e1 + e2 * e2 - e3 * e3, 2 * (e2 * e3 - e0 * e1)],
        [2 * (e1 * e3 - e0 * e2), 2 * (e2 * e3 + e0 * e1), e0 * e0 - e1 * e1 - e2 * e2 + e3 * e3],
    ])


def rotation_matrices(E):
    """Proper rotation matrices for a (K, 4) stack of unit quaternions."""
    e0, e1, e2, e3 = np.moveaxis(np.asarray(E, dtype=float), -1, 0)
    R = np.empty(e0.shape + (3, 3))
    R[..., 0, 0] = e0 * e0 + e1 * e1 - e2 * e2 - e3 * e3
    R[..., 0, 1] = 2 * (e1 * e2 - e0 * e3)
    R[..., 0, 2] = 2 * (e1 * e3 + e0 * e2)
    R[..., 1, 0] = 2 * (e1 * e2 + e0 * e3)
    R[..., 1, 1] = e0 * e0 - e1 * e1 + e2 * e2 - e3 * e3
    R[..., 1, 2] = 2 * (e2 * e3 - e0 * e1)
    R[..., 2, 0] = 2 * (e1 * e3 - e0 * e2)
    R[..., 2, 1] = 2 * (e2 * e3 + e0 * e1)
    R[..., 2, 2] = e0 * e0 - e1 * e1 - e2 * e2 + e3 * e3
    return R


def platform_points_world(pose):
    """World coordinates of m12, m34, m56: ``R m / N + s``."""
    R = rotation_matrix(pose.orientation.unit())
    return PLATFORM_ANCHORS @ R.T + pose.translation


def base_points(g):
    """World coordinates of M45, M61, M23 for base circumradius ``g``."""
    g = float(g)
    if not g > 0:
        raise NonPositiveG(g)
    return g * BASE_ANCHORS


def leg_anchors(config):
    """Per-leg (platform, base) anchor arrays, each of shape (6, 3)."""
    n = platform_points_world(config.pose)[LEG_PLATFORM]
    M = base_points(config.g)[LEG_BASE]
    return n, M


def _check_legs(vec):
    lengths = np.linalg.norm(vec, axis=1)
    bad = np.flatnonzero(lengths < DEGENERATE_LENGTH)
    if bad.size:
        raise DegenerateLeg(int(bad[0]) + 1, float(lengths[bad[0]]))
    return lengths


def leg_lengths(config):
    n, M = leg_anchors(config)
    return _check_legs(n - M)


def leg_spear(config, leg):
    """Spear coordinates of leg ``leg`` (numbered 1..6)."""
    if not 1 <= leg <= 6:
        raise IndexError(f"leg number must be in 1..6, got {leg}")
    n, M = leg_anchors(config)
    d = n[leg - 1] - M[leg - 1]
    length = np.linalg.norm(d)
    if length < DEGENERATE_LENGTH:
        raise DegenerateLeg(leg, float(length))
    l = d / length
    return SpearLine(l, np.cross(M[leg - 1], l))


def spear_rows(n, M):
    l = n - M
    l = l / _check_legs(l)[:, None]
    return np.hstack([np.cross(M, l), l])


def jacobian(config):
    """6x6 matrix whose i-th row is (lbar_i, l_i)."""
    return spear_rows(*leg_anchors(config))


def det_jacobian(config):
    return float(np.linalg.det(jacobian(config)))


def margin(config):
    """det J divided by the product of its row norms; lies in [-1, 1]."""
    J = jacobian(config)
    return float(np.linalg.det(J) / np.prod(np.linalg.norm(J, axis=1)))


def inverse_rates(config, screw, gdot=0.0):
    """Leg-length rates produced by a platform screw and a base rate ``gdot``."""
    J = jacobian(config)
    l = J[:, 3:]
    return J @ screw.as_vector() - gdot * np.einsum("ij,ij->i", GUIDES, l)


def _solve(J, rhs, tol):
    m = np.linalg.det(J) / np.prod(np.linalg.norm(J, axis=1))
    if not abs(m) >= tol:
        raise SingularJacobian(float(m), tol)
    return np.linalg.solve(J, rhs)


def forward_screw(config, rates, tol=SINGULARITY_TOL):
    J = jacobian(config)
    rhs = rates.rdot + rates.gdot * np.einsum("ij,ij->i", GUIDES, J[:, 3:])
    return PlatformScrew.from_vector(_solve(J, rhs, tol))


def self_motion_screw(config, tol=SINGULARITY_TOL):
    """Platform screw relative to the base when the legs are locked and g grows at unit rate."""
    J = jacobian(config)
    rhs = np.einsum("ij,ij->i", GUIDES, J[:, 3:])
    return PlatformScrew.from_vector(_solve(J, rhs, tol))


def angular_velocity(e, edot):
    """World-frame angular velocity of a unit quaternion path at (e, de/dt)."""
    e = np.asarray(e, dtype=float)
    edot = np.asarray(edot, dtype=float)
    return 2.0 * (e[0] * edot[1:] - edot[0] * e[1:] + np.cross(e[1:], edot[1:]))


def mirror_pose(pose):
    """Reflection of a pose in the xz-plane (y -> -y)."""
    e0, e1, e2, e3 = pose.orientation.as_array()
    x, y, z = pose.s
    return Pose(EulerOrientation(e0, -e1, e2, -e3), (x, -y, z))


# batched evaluation -------------------------------------------------------

def anchor_arrays(E, S, G):
    """Leg anchors for K poses at once.

    ``E`` is (K, 4) homogeneous Euler parameters, ``S`` (K, 3) translations and
    ``G`` (K,) base circumradii. Returns ``(n, M)`` of shape (K, 6, 3).
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    E = E / np.linalg.norm(E, axis=1, keepdims=True)
    S = np.atleast_2d(np.asarray(S, dtype=float))
    G = np.asarray(G, dtype=float).reshape(-1)
    R = rotation_matrices(E)
    pts = np.einsum("kab,pb->kpa", R, PLATFORM_ANCHORS) + S[:, None, :]
    n = pts[:, LEG_PLATFORM]
    M = G[:, None, None] * GUIDES[None]
    return n, M


def margins(E, S, G, threads=1):
    """Normalized determinants for K configurations; nan marks a degenerate leg."""
    n, M = anchor_arrays(E, S, G)
    det, had = kernels.chunked(lambda a, b: kernels.spear_dets(a, b, True), (n, M), threads)
    return det / had


def polynomial_dets(E, S, G, threads=1):
    """Determinants with unnormalized leg vectors ``n_i - M_i``.

    These are polynomial in g; returns ``(det, hadamard)``.
    """
    n, M = anchor_arrays(E, S, G)
    return kernels.chunked(lambda a, b: kernels.spear_dets(a, b, False), (n, M), threads)


@dataclass(frozen=True)
class AnchorLayout:
    """The fixed anchor geometry, exposed as one value for reporting."""

    platform: np.ndarray = field(default_factory=lambda: PLATFORM_ANCHORS.copy())
    base_unit: np.ndarray = field(default_factory=lambda: BASE_ANCHORS.copy())
    leg_platform: tuple = tuple(LEG_PLATFORM)
    leg_base: tuple = tuple(LEG_BASE)

    def base(self, g):
        return base_points(g)

    def guides(self):
        return GUIDES.copy()
