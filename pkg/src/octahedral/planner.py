"""Base-reconfiguration planning along a prescribed platform motion.

The platform path is fixed; only the base circumradius g may change. Over
a (tau, g) grid every cell gets the normalized determinant margin and the
leg clearance. A profile g(tau) is admissible when each visited cell keeps
|margin| >= eps_det and clearance >= eps_clear, consecutive cells differ by
at most ``rate_bound`` in g, and the margin keeps its sign (a sign change
between neighbouring cells means the segment passes through a singularity).
Among admissible profiles the planner maximizes the smallest |margin| and
then minimizes the total variation of g.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InfeasibleEnd, InfeasibleStart
from .kinematics import (
    CLEARANCE_PAIRS,
    EulerOrientation,
    Pose,
    anchor_arrays,
    margins,
    unit_quaternion,
)


@dataclass(frozen=True)
class MotionPath:
    tau: np.ndarray
    orientations: np.ndarray  # (n, 4) unit quaternions, sign aligned
    translations: np.ndarray  # (n, 3)

    @property
    def n(self):
        return len(self.tau)

    @property
    def samples(self):
        return [Pose.make(e, s) for e, s in zip(self.orientations, self.translations)]

    @property
    def start(self):
        return self.samples[0]

    @property
    def end(self):
        return self.samples[-1]

    def at(self, tau):
        """Pose at an arbitrary parameter by the same slerp/lerp rule."""
        e, s = _interpolate(self.orientations[0], self.orientations[-1],
                            self.translations[0], self.translations[-1], np.atleast_1d(tau))
        return Pose.make(e[0], s[0])


def _slerp(q0, q1, t):
    dot = float(np.clip(q0 @ q1, -1.0, 1.0))
    theta = np.arccos(dot)
    t = np.asarray(t, dtype=float)[:, None]
    if theta < 1e-9:
        out = (1 - t) * q0 + t * q1
    else:
        out = (np.sin((1 - t) * theta) * q0 + np.sin(t * theta) * q1) / np.sin(theta)
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def _interpolate(q0, q1, s0, s1, t):
    return _slerp(q0, q1, t), (1 - t)[:, None] * s0 + t[:, None] * s1


def make_path(start, end, n):
    """Slerp (shorter arc) between orientations, lerp between translations."""
    if n < 2:
        raise ValueError("a path needs at least two samples")
    q0 = start.orientation.unit()
    q1 = unit_quaternion(end.orientation.as_array())
    if q0 @ q1 < 0:
        q1 = -q1
    tau = np.linspace(0.0, 1.0, n)
    E, S = _interpolate(q0, q1, start.translation, end.translation, tau)
    E[0], E[-1] = q0, q1
    S[0], S[-1] = start.translation, end.translation
    return MotionPath(tau, E, S)


def path_from_poses(poses):
    """MotionPath through explicit poses, tau evenly spaced."""
    E = np.array([unit_quaternion(p.orientation.as_array()) for p in poses])
    for k in range(1, len(E)):
        if E[k] @ E[k - 1] < 0:
            E[k] = -E[k]
    S = np.array([p.translation for p in poses])
    return MotionPath(np.linspace(0.0, 1.0, len(poses)), E, S)


@dataclass(frozen=True)
class SingularityField:
    tau_grid: np.ndarray
    g_grid: np.ndarray
    values: np.ndarray  # (n_tau, n_g) normalized margins, nan where a leg degenerates
    clearance: np.ndarray  # (n_tau, n_g)

    def rows(self):
        """(tau, g, margin, clearance) tuples in row-major order."""
        for i, t in enumerate(self.tau_grid):
            for j, g in enumerate(self.g_grid):
                yield float(t), float(g), float(self.values[i, j]), float(self.clearance[i, j])


def _grid_arrays(path, g_grid):
    nt, ng = path.n, len(g_grid)
    E = np.repeat(path.orientations, ng, axis=0)
    S = np.repeat(path.translations, ng, axis=0)
    G = np.tile(g_grid, nt)
    return E, S, G


def clearances(E, S, G, threads=1):
    """Leg clearance for K configurations (see :func:`leg_clearance`)."""
    n, M = anchor_arrays(E, S, G)
    i, j = np.array(CLEARANCE_PAIRS).T
    K = len(n)
    args = (M[:, i].reshape(-1, 3), n[:, i].reshape(-1, 3), M[:, j].reshape(-1, 3), n[:, j].reshape(-1, 3))
    d = kernels.chunked(kernels.segment_distances, args, threads)
    return d.reshape(K, len(i)).min(axis=1)


def leg_clearance(config):
    """Smallest distance between two legs that do not share a double joint."""
    from .kinematics import leg_lengths

    leg_lengths(config)  # raises DegenerateLeg
    e = config.pose.orientation.as_array()
    return float(clearances(e[None], config.pose.translation[None], [config.g])[0])


def singularity_field(path, gmin, gmax, ng, threads=1):
    if not 0 < gmin < gmax:
        raise ValueError("need 0 < gmin < gmax")
    if ng < 1:
        raise ValueError("ng must be positive")
    g_grid = np.linspace(gmin, gmax, ng)
    E, S, G = _grid_arrays(path, g_grid)
    values = margins(E, S, G, threads).reshape(path.n, ng)
    clear = clearances(E, S, G, threads).reshape(path.n, ng)
    return SingularityField(path.tau.copy(), g_grid, values, clear)


def _margin_along(path, g, tau):
    e, s = _interpolate(path.orientations[0], path.orientations[-1],
                        path.translations[0], path.translations[-1], np.atleast_1d(tau))
    return margins(e, s, np.full(len(e), g))


def detect_crossings(path, g, tol=1e-8):
    """Parameters tau where the margin changes sign at fixed g, refined by bisection.

    The path must be the slerp/lerp path built by :func:`make_path`, since the
    refinement evaluates it between samples.
    """
    m = _margin_along(path, g, path.tau)
    out = []
    for k in range(path.n - 1):
        a, b = m[k], m[k + 1]
        if np.isnan(a) or np.isnan(b):
            continue
        if a == 0.0:
            if k == 0 or m[k - 1] * b < 0:
                out.append(float(path.tau[k]))
            continue
        if a * b >= 0:
            continue
        lo, hi = path.tau[k], path.tau[k + 1]
        flo = a
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            fm = _margin_along(path, g, mid)[0]
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        out.append(float(0.5 * (lo + hi)))
    return out


@dataclass(frozen=True)
class GProfile:
    tau: np.ndarray
    g: np.ndarray
    g_index: np.ndarray
    min_margin: float
    min_clearance: float
    total_variation: float

    def to_dict(self):
        return {
            "tau": [float(v) for v in self.tau],
            "g": [float(v) for v in self.g],
            "min_margin": self.min_margin,
            "min_clearance": self.min_clearance,
            "total_variation": self.total_variation,
        }


@dataclass(frozen=True)
class PlanFailure:
    blocking_tau: float
    blocking_index: int
    g_grid: np.ndarray
    margins: np.ndarray
    clearance: np.ndarray
    feasible: np.ndarray  # cell feasibility in the blocking column
    reachable: np.ndarray = field(default=None)  # cells reachable from the start in that column

    @property
    def all_infeasible(self):
        return not bool(np.any(self.feasible))

    def to_dict(self):
        nan_to_none = lambda v: None if np.isnan(v) else float(v)  # noqa: E731
        return {
            "status": "infeasible",
            "blocking_tau": self.blocking_tau,
            "all_infeasible": self.all_infeasible,
            "evidence": {
                "g": [float(v) for v in self.g_grid],
                "margin": [nan_to_none(v) for v in self.margins],
                "clearance": [nan_to_none(v) for v in self.clearance],
                "feasible": [bool(v) for v in self.feasible],
            },
        }


def feasibility(field_, eps_det, eps_clear):
    absm = np.abs(field_.values)
    ok = (absm >= eps_det) & (field_.clearance >= eps_clear)
    return np.where(np.isnan(absm), False, ok)


def _edges(g_grid, rate_bound):
    return np.abs(g_grid[:, None] - g_grid[None, :]) <= rate_bound + 1e-12


def _failure(field_, ok, i, reach=None):
    return PlanFailure(float(field_.tau_grid[i]), i, field_.g_grid, field_.values[i].copy(),
                       field_.clearance[i].copy(), ok[i].copy(), reach)


def _pin(ok_col, g_grid, g):
    if g is None:
        return ok_col
    pinned = np.zeros_like(ok_col)
    k = int(np.argmin(np.abs(g_grid - g)))
    pinned[k] = ok_col[k]
    return pinned


def plan_g_profile(path, gmin, gmax, ng, eps_det, eps_clear, rate_bound, threads=1, field_=None,
                   g_start=None, g_end=None):
    """Grid search for g(tau); returns a GProfile or a PlanFailure.

    ``g_start`` / ``g_end`` optionally pin the endpoint base sizes (snapped
    to the nearest grid value). Raises InfeasibleStart / InfeasibleEnd when
    the first / last column has no usable cell.
    """
    if eps_det <= 0 or eps_clear <= 0:
        raise ValueError("eps_det and eps_clear must be positive")
    if field_ is None:
        field_ = singularity_field(path, gmin, gmax, ng, threads)
    ok = feasibility(field_, eps_det, eps_clear)
    ok[0] = _pin(ok[0], field_.g_grid, g_start)
    ok[-1] = _pin(ok[-1], field_.g_grid, g_end)
    nt = len(field_.tau_grid)
    if not ok[0].any():
        raise InfeasibleStart("no feasible base size at the start pose", _failure(field_, ok, 0))
    if not ok[-1].any():
        raise InfeasibleEnd("no feasible base size at the end pose", _failure(field_, ok, nt - 1))

    sign = np.sign(field_.values)
    value = np.where(ok, np.abs(field_.values), -np.inf)
    step = _edges(field_.g_grid, rate_bound)

    def allowed(i):
        # edge j -> k between column i-1 and i
        return step & (sign[i - 1][:, None] == sign[i][None, :]) & ok[i - 1][:, None] & ok[i][None, :]

    # pass 1: best achievable bottleneck
    best = value[0].copy()
    for i in range(1, nt):
        cand = np.where(allowed(i), best[:, None], -np.inf)
        best = np.minimum(cand.max(axis=0), value[i])
        if not np.isfinite(best).any():
            return _failure(field_, ok, i, np.isfinite(best))
    bottleneck = best.max()

    # pass 2: least total variation among profiles keeping every cell >= bottleneck
    keep = value >= bottleneck
    dg = np.abs(field_.g_grid[:, None] - field_.g_grid[None, :])
    cost = np.where(keep[0], 0.0, np.inf)
    back = np.zeros((nt, len(field_.g_grid)), dtype=int)
    for i in range(1, nt):
        trans = np.where(allowed(i) & keep[i - 1][:, None] & keep[i][None, :], cost[:, None] + dg, np.inf)
        back[i] = np.argmin(trans, axis=0)
        cost = trans[back[i], np.arange(len(cost))]
    k = int(np.argmin(cost))
    idx = [k]
    for i in range(nt - 1, 0, -1):
        k = int(back[i][k])
        idx.append(k)
    idx = np.array(idx[::-1])

    rows = np.arange(nt)
    g = field_.g_grid[idx]
    return GProfile(
        tau=field_.tau_grid.copy(),
        g=g,
        g_index=idx,
        min_margin=float(np.min(np.abs(field_.values[rows, idx]))),
        min_clearance=float(np.min(field_.clearance[rows, idx])),
        total_variation=float(np.sum(np.abs(np.diff(g)))),
    )


def verify_profile(path, profile, eps_det, eps_clear, rate_bound):
    """Independent post-hoc check of a profile by recomputing every visited cell.

    Returns (ok, details) where details lists per-sample margin and clearance.
    """
    from .kinematics import Configuration, leg_lengths, margin

    margins_, clears = [], []
    for pose, g in zip(path.samples, profile.g):
        config = Configuration(pose, g)
        leg_lengths(config)
        margins_.append(margin(config))
        clears.append(leg_clearance(config))
    margins_ = np.array(margins_)
    clears = np.array(clears)
    ok = (
        np.all(np.abs(margins_) >= eps_det)
        and np.all(clears >= eps_clear)
        and np.all(np.abs(np.diff(profile.g)) <= rate_bound + 1e-12)
        and len(set(np.sign(margins_))) == 1
    )
    return bool(ok), {"margin": margins_, "clearance": clears}


def fichter_path(n=21, z=1.0, span_degrees=40.0):
    """Rotation about the vertical axis through the Fichter orientation at tau = 1/2."""
    half = np.radians(span_degrees) / 2
    start = Pose(EulerOrientation.from_axis_angle((0, 0, 1), np.pi / 2 - half), (0.0, 0.0, z))
    end = Pose(EulerOrientation.from_axis_angle((0, 0, 1), np.pi / 2 + half), (0.0, 0.0, z))
    return make_path(start, end, n)
