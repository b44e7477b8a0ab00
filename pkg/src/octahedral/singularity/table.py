"""Classification of unavoidable singularities by platform orientation.

Each of the 22 rows pairs an algebraic condition on the Euler parameters
with a set of platform positions (plane, line, point or all of space) that
are singular for every base size. All formulas are evaluated on the unit
representative of the orientation; they are homogeneous of degree two, so
the sign of the representative does not matter.
"""
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateOrientation
from ..kinematics import EulerOrientation, Pose, unit_quaternion

S3 = np.sqrt(3.0)
MATCH_TOL = 1e-10


@dataclass(frozen=True)
class PositionSet:
    """An affine subset of R^3: ``space``, ``plane`` (point + normal),
    ``line`` (point + direction) or ``point``."""

    kind: str
    point: tuple = (0.0, 0.0, 0.0)
    vector: tuple = None

    def distance(self, p):
        d = np.asarray(p, dtype=float) - np.asarray(self.point)
        if self.kind == "space":
            return 0.0
        if self.kind == "point":
            return float(np.linalg.norm(d))
        v = np.asarray(self.vector) / np.linalg.norm(self.vector)
        if self.kind == "plane":
            return float(abs(d @ v))
        return float(np.linalg.norm(d - (d @ v) * v))

    def sample(self, rng, half_width=2.0):
        """Uniform draw from a bounded patch; free coordinates in [-w, w]."""
        p = np.asarray(self.point, dtype=float)
        if self.kind == "space":
            return rng.uniform(-half_width, half_width, 3)
        if self.kind == "point":
            return p.copy()
        if self.kind == "plane":
            # every plane in the table is horizontal
            return np.array([*rng.uniform(-half_width, half_width, 2), p[2]])
        return p + rng.uniform(-half_width, half_width) * np.asarray(self.vector)

    def to_dict(self):
        out = {"kind": self.kind}
        if self.kind != "space":
            out["point"] = [float(v) for v in self.point]
        if self.kind == "plane":
            out["normal"] = [float(v) for v in self.vector]
        elif self.kind == "line":
            out["direction"] = [float(v) for v in self.vector]
        return out


def _plane_z(c):
    return PositionSet("plane", (0.0, 0.0, float(c)), (0.0, 0.0, 1.0))


def _line(point, direction):
    return PositionSet("line", tuple(float(v) for v in point), tuple(float(v) for v in direction))


SPACE = PositionSet("space")


def z_general(e):
    """Height shared by rows 17, 18, 21 and 22."""
    e0, e1, e2, e3 = e
    num = (e0**2 + e3**2) * (e1**3 * e3 - 3 * e1 * e2**2 * e3 - 3 * e1**2 * e2 * e0 + e2**3 * e0)
    return num / ((e3**2 - e0**2) * (e2**2 + e1**2))


def x_row21(e):
    e0, e1, e2, e3 = e
    num = (e0**2 + e3**2) * (e3**2 * e1**2 - e3**2 * e2**2 - 4 * e1 * e2 * e0 * e3 - e1**4
                             + 6 * e2**2 * e1**2 - e2**4 - e0**2 * e1**2 + e0**2 * e2**2)
    return num / (2 * (e2**2 + e1**2) * (e0**2 - e3**2))


def y_row21(e):
    e0, e1, e2, e3 = e
    num = (e3**2 + e0**2) * (e1 * e2 * e3**2 + e1**2 * e3 * e0 - e2**2 * e3 * e0 + 2 * e1**3 * e2
                             - 2 * e1 * e2**3 - e1 * e2 * e0**2)
    return num / ((e2**2 + e1**2) * (e3**2 - e0**2))


def x_row22(e):
    e0, e1, e2, e3 = e
    num = (e3**4 * e1**2 - e3**4 * e2**2 + 3 * e3**2 * e1**2 * e2**2 - e3**2 * e2**4
           + 2 * e3 * e0 * e1**3 * e2 + 2 * e3 * e0 * e1 * e2**3 - e1**4 * e0**2
           + 3 * e1**2 * e2**2 * e0**2 - e0**4 * e1**2 + e0**4 * e2**2)
    return num / ((e2**2 + e1**2) * (e0**2 - e3**2))


def y_row22(e):
    e0, e1, e2, e3 = e
    num = (2 * e3**4 * e1 * e2 + 3 * e3**2 * e1**3 * e2 + e3 * e2**4 * e0 - e3**2 * e1 * e2**3
           - e3 * e0 * e1**4 - 2 * e0**4 * e1 * e2 + e0**2 * e1**3 * e2 - 3 * e0**2 * e1 * e2**3)
    return num / ((e2**2 + e1**2) * (e3**2 - e0**2))


def quartic_row18(e):
    e0, e1, e2, e3 = e
    return (e2**2 * e3**2 - 3 * e2**2 * e0**2 + 8 * e2 * e1 * e0 * e3
            - 3 * e1**2 * e3**2 + e1**2 * e0**2)


def general_guards(e):
    """Named quantities that must be nonzero for rows 21 and 22."""
    e0, e1, e2, e3 = e
    return {
        "(e3^2-e0^2)(e1^2+e2^2)": (e3**2 - e0**2) * (e1**2 + e2**2),
        "(e0e1-e2e3)(e0e2+e1e3)": (e0 * e1 - e2 * e3) * (e0 * e2 + e1 * e3),
        "e0e1+e2e3": e0 * e1 + e2 * e3,
        "row-18 quartic": quartic_row18(e),
    }


# rows -----------------------------------------------------------------------
# Each row supplies: condition residuals, guards (must be nonzero), position
# set and a parametric sampler of its orientation family. ``s`` is the table
# sign: +1 for the upper sign, -1 for the lower one, None when unsigned.
# Guards route degenerate orientations the way the case analysis does: a
# row of the e0 = +-e3 families needs the extra parameters nonzero, and the
# general-case rows (17-22) need e0^2 != e3^2 and e1^2 + e2^2 != 0.

@dataclass(frozen=True)
class Row:
    number: int
    dim: int
    signed: bool
    condition: callable
    position: callable
    family: callable
    guards: callable = field(default=lambda e, s: {})

    @property
    def branches(self):
        return (1, -1) if self.signed else (None,)


def _fam_row18(rng, s):
    while True:
        e1, e2, e3 = rng.uniform(-1, 1, 3)
        den = e1**2 - 3 * e2**2
        if abs(den) > 0.05:
            break
    root = 1 if rng.random() < 0.5 else -1
    e0 = (-8 * e1 * e2 * e3 + root * 2 * S3 * abs(e3) * (e1**2 + e2**2)) / (2 * den)
    return np.array([e0, e1, e2, e3])


def _g_pm_e3(e, s):
    return {"e1": e[1], "e3": e[3]}


def _g_sqrt3(e, s):
    return {"(e1+e2)e3": (e[1] + e[2]) * e[3]}


def _g_general(e, s):
    return {"(e3^2-e0^2)(e1^2+e2^2)": (e[3]**2 - e[0]**2) * (e[1]**2 + e[2]**2)}


def _u(rng, n=1):
    v = rng.uniform(-1, 1, n)
    return v if n > 1 else float(v[0])


ROWS = {
    1: Row(1, 3, False,
           lambda e, s: [e[1], e[2]],
           lambda e, s: _plane_z(0.0),
           lambda rng, s: np.array([_u(rng), 0, 0, _u(rng)])),
    2: Row(2, 3, True,
           lambda e, s: [e[1], e[2], e[0] - s * e[3]],
           lambda e, s: SPACE,
           lambda rng, s: (lambda a: np.array([a, 0, 0, s * a]))(_u(rng))),
    3: Row(3, 4, False,
           lambda e, s: [e[0], e[3]],
           lambda e, s: SPACE,
           lambda rng, s: np.array([0, _u(rng), _u(rng), 0])),
    4: Row(4, 3, True,
           lambda e, s: [e[0] - s * e[3], e[2] + s * e[1]],
           lambda e, s: _plane_z(2 * e[1] * e[3]),
           lambda rng, s: (lambda a, c: np.array([s * c, a, -s * a, c]))(_u(rng), _u(rng)),
           _g_pm_e3),
    5: Row(5, 2, True,
           lambda e, s: [e[0] - s * e[3], e[2] + s * e[1]],
           lambda e, s: _line((0.0, 0.0, -e[3] * (2 * e[3]**2 + 2 * e[1]**2) / e[1]),
                              (0.0, 1.0, -s * e[3] / e[1])),
           lambda rng, s: (lambda a, c: np.array([s * c, a, -s * a, c]))(_u(rng), _u(rng)),
           _g_pm_e3),
    6: Row(6, 2, True,
           lambda e, s: [e[0] - s * e[3], e[2] + s * e[1]],
           lambda e, s: _line((0.0, s * 2 * (e[1]**2 - e[3]**2), -4 * e[1] * e[3]), (1.0, 0.0, 0.0)),
           lambda rng, s: (lambda a, c: np.array([s * c, a, -s * a, c]))(_u(rng), _u(rng)),
           _g_pm_e3),
    7: Row(7, 3, True,
           lambda e, s: [e[0] - e[3], e[1] - (2 + s * S3) * e[2]],
           lambda e, s: _plane_z(4 * e[2] * e[3] / (1 - s * S3)),
           lambda rng, s: (lambda a, c: np.array([c, (2 + s * S3) * a, a, c]))(_u(rng), _u(rng)),
           _g_sqrt3),
    8: Row(8, 2, True,
           lambda e, s: [e[0] - e[3], e[1] - (2 + s * S3) * e[2]],
           lambda e, s: _line(((16 * e[2]**2 + s * 8 * e[2]**2 * S3 - 4 * e[3]**2) / (s * S3), 0.0,
                               8 * e[2] * e[3] / (s * S3 - 1)),
                              (1 / (s * S3), 1.0, 0.0)),
           lambda rng, s: (lambda a, c: np.array([c, (2 + s * S3) * a, a, c]))(_u(rng), _u(rng)),
           _g_sqrt3),
    9: Row(9, 2, True,
           lambda e, s: [e[0] - e[3], e[1] - (2 + s * S3) * e[2]],
           lambda e, s: _line((0.0, 0.0, 2 * e[3] * (e[3]**2 + 4 * e[2]**2 + s * 2 * e[2]**2 * S3)
                               / (e[2] * (1 + s * S3))),
                              (-s * S3, 1.0, -2 * e[3] / (e[2] * (1 + s * S3)))),
           lambda rng, s: (lambda a, c: np.array([c, (2 + s * S3) * a, a, c]))(_u(rng), _u(rng)),
           _g_sqrt3),
    10: Row(10, 3, True,
            lambda e, s: [e[0] + e[3], e[1] - (-2 + s * S3) * e[2]],
            lambda e, s: _plane_z(4 * e[2] * e[3] / (-s * S3 - 1)),
            lambda rng, s: (lambda a, c: np.array([-c, (-2 + s * S3) * a, a, c]))(_u(rng), _u(rng)),
            _g_sqrt3),
    11: Row(11, 2, True,
            lambda e, s: [e[0] + e[3], e[1] - (-2 + s * S3) * e[2]],
            lambda e, s: _line(((16 * e[2]**2 - s * 8 * e[2]**2 * S3 - 4 * e[3]**2) / (-s * S3), 0.0,
                                8 * e[2] * e[3] / (1 + s * S3)),
                               (1 / (s * S3), 1.0, 0.0)),
            lambda rng, s: (lambda a, c: np.array([-c, (-2 + s * S3) * a, a, c]))(_u(rng), _u(rng)),
            _g_sqrt3),
    12: Row(12, 2, True,
            lambda e, s: [e[0] + e[3], e[1] - (-2 + s * S3) * e[2]],
            lambda e, s: _line((0.0, 0.0, 2 * e[3] * (e[3]**2 + 4 * e[2]**2 - s * 2 * e[2]**2 * S3)
                                / (e[2] * (s * S3 - 1))),
                               (-s * S3, 1.0, 2 * e[3] / (e[2] * (s * S3 - 1)))),
            lambda rng, s: (lambda a, c: np.array([-c, (-2 + s * S3) * a, a, c]))(_u(rng), _u(rng)),
            _g_sqrt3),
    13: Row(13, 3, False,
            lambda e, s: [e[0], e[2]],
            lambda e, s: _plane_z(e[1] * e[3]),
            lambda rng, s: np.array([0, _u(rng), 0, _u(rng)]),
            lambda e, s: {"e1e3": e[1] * e[3]}),
    14: Row(14, 3, False,
            lambda e, s: [e[1], e[3]],
            lambda e, s: _plane_z(-e[0] * e[2]),
            lambda rng, s: np.array([_u(rng), 0, _u(rng), 0]),
            lambda e, s: {"e0e2": e[0] * e[2]}),
    15: Row(15, 2, False,
            lambda e, s: [e[0], e[1]],
            lambda e, s: _line((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
            lambda rng, s: np.array([0, 0, _u(rng), _u(rng)]),
            lambda e, s: {"e2e3": e[2] * e[3]}),
    16: Row(16, 2, False,
            lambda e, s: [e[2], e[3]],
            lambda e, s: _line((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
            lambda rng, s: np.array([_u(rng), _u(rng), 0, 0]),
            lambda e, s: {"e0e1": e[0] * e[1]}),
    17: Row(17, 4, False,
            lambda e, s: [e[0] * e[1] + e[2] * e[3]],
            lambda e, s: _plane_z(z_general(e)),
            lambda rng, s: (lambda a, b, c: np.array([-b * c / a, a, b, c]))(*_u(rng, 3)),
            _g_general),
    18: Row(18, 4, False,
            lambda e, s: [quartic_row18(e)],
            lambda e, s: _plane_z(z_general(e)),
            _fam_row18,
            _g_general),
    19: Row(19, 3, False,
            lambda e, s: [e[0] * e[1] - e[2] * e[3]],
            lambda e, s: _line((0.0, 2 * e[2] * (e[1]**2 + e[3]**2) / e[1],
                                e[3] * (e[1]**4 - 6 * e[1]**2 * e[2]**2 + e[2]**4)
                                / (e[1] * (e[1]**2 - e[2]**2))),
                               (1.0, 0.0, 0.0)),
            lambda rng, s: (lambda a, b, c: np.array([b * c / a, a, b, c]))(*_u(rng, 3)),
            lambda e, s: {**_g_general(e, s), "e0e1e2e3": e[0] * e[1] * e[2] * e[3],
                          "e1^2-e2^2": e[1]**2 - e[2]**2}),
    20: Row(20, 3, False,
            lambda e, s: [e[0] * e[2] + e[1] * e[3]],
            lambda e, s: _line((0.0, 2 * e[1] * (e[3]**2 - e[2]**2) / e[2], -4 * e[1] * e[3]),
                               (1.0, 0.0, 0.0)),
            lambda rng, s: (lambda a, b, c: np.array([-a * c / b, a, b, c]))(*_u(rng, 3)),
            lambda e, s: {**_g_general(e, s), "e0e1e2e3": e[0] * e[1] * e[2] * e[3]}),
}

GENERAL_ROWS = (21, 22)
ROW_DIMS = {**{k: r.dim for k, r in ROWS.items()}, 21: 3, 22: 3}


@dataclass(frozen=True)
class UnavoidableStratum:
    row: int
    branch: object  # +1, -1 or None
    orientation: tuple  # unit representative
    position_set: PositionSet
    dim: int
    orientation_residuals: tuple = ()

    @property
    def branch_label(self):
        return {1: "+", -1: "-", None: None}[self.branch]

    def to_dict(self):
        return {
            "row": self.row,
            "branch": self.branch_label,
            "dim": self.dim,
            "position": self.position_set.to_dict(),
        }


@dataclass(frozen=True)
class StratumSample:
    pose: Pose
    row: int
    branch: object


def _unit(o):
    if isinstance(o, EulerOrientation):
        return o.unit()
    return unit_quaternion(o)


def general_case_positions(o, tol=MATCH_TOL):
    """The two isolated unavoidable positions (rows 21 and 22) of a generic orientation.

    Raises DegenerateOrientation naming the first guard that vanishes.
    """
    if not isinstance(o, EulerOrientation):
        o = EulerOrientation.from_array(o)
    e = o.unit()
    for name, value in general_guards(e).items():
        if abs(value) <= tol:
            raise DegenerateOrientation(name, float(value))
    z = z_general(e)
    return (Pose(o, (x_row21(e), y_row21(e), z)),
            Pose(o, (x_row22(e), y_row22(e), z)))


def row_stratum(row, branch, o, tol=MATCH_TOL):
    """Stratum of ``row``/``branch`` at orientation ``o``, or None if it does not apply."""
    e = _unit(o)
    if row in GENERAL_ROWS:
        try:
            poses = general_case_positions(e, tol)
        except DegenerateOrientation:
            return None
        p = poses[row - 21].s
        return UnavoidableStratum(row, None, tuple(e), PositionSet("point", p), 3)
    entry = ROWS[row]
    residuals = tuple(float(abs(r)) for r in entry.condition(e, branch))
    if max(residuals) >= tol:
        return None
    if any(abs(v) <= tol for v in entry.guards(e, branch).values()):
        return None
    return UnavoidableStratum(row, branch, tuple(e), entry.position(e, branch), entry.dim, residuals)


def classify_orientation(o, tol=MATCH_TOL):
    """Every table row whose orientation condition holds, with its position set."""
    e = _unit(o)
    found = []
    for number, entry in ROWS.items():
        for branch in entry.branches:
            stratum = row_stratum(number, branch, e, tol)
            if stratum is not None:
                found.append(stratum)
    for number in GENERAL_ROWS:
        stratum = row_stratum(number, None, e, tol)
        if stratum is not None:
            found.append(stratum)
    return found


def stratum_sample(stratum, rng, half_width=2.0):
    """Random pose inside a given stratum (orientation fixed, position drawn)."""
    rng = np.random.default_rng(rng)
    p = stratum.position_set.sample(rng, half_width)
    return StratumSample(Pose.make(stratum.orientation, p), stratum.row, stratum.branch)


def _far_from_guards(e, row, branch, margin):
    if row in GENERAL_ROWS:
        return all(abs(v) > margin for v in general_guards(e).values())
    return all(abs(v) > margin for v in ROWS[row].guards(e, branch).values())


def sample_orientation(row, branch, rng, guard_margin=0.05):
    """Unit orientation drawn from a row's family, kept away from vanishing guards."""
    while True:
        if row in GENERAL_ROWS:
            e = unit_quaternion(rng.normal(size=4))
        else:
            e = unit_quaternion(ROWS[row].family(rng, branch))
        if _far_from_guards(e, row, branch, guard_margin):
            return e


def sample_row(row, branch, rng, half_width=2.0, guard_margin=0.05):
    """Random pose of a row: orientation from its family, then a position in its set."""
    rng = np.random.default_rng(rng)
    e = sample_orientation(row, branch, rng, guard_margin)
    stratum = row_stratum(row, branch, e)
    if stratum is None:  # pragma: no cover - family construction guarantees a match
        raise RuntimeError(f"row {row} family produced a non-matching orientation")
    return stratum_sample(stratum, rng, half_width)


def all_branches():
    for number, entry in ROWS.items():
        for branch in entry.branches:
            yield number, branch
    for number in GENERAL_ROWS:
        yield number, None
