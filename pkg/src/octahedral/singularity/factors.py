"""Closed-form factorizations of the singularity polynomials in special cases.

Each case predicts some of the recovered coefficients (c2, c1, c0), which
are proportional to (Q, L, A1*A2), up to one unknown constant. The numeric
counterparts come from :func:`recover_sigma`, so agreement up to a single
scale factor checks both routes against each other.

Cases
-----
``1a``        e1 = e2 = 0: c2 = c1 = 0, c0 ~ z^3 (e0^2+e3^2)(e0-e3)(e0+e3)
``2``         e0 = e3: c2 ~ 2 e3^3 (e1+e2)(e1-(2+sqrt3)e2)(e1-(2-sqrt3)e2)
``2a``        e0 = e3, e2 = -e1: c1 ~ L, c0 ~ A1*A2 as printed for this case
``general``   z on the Q = 0 surface: the x-slope of c1 is
              GCD * coefx / ((e3^2-e0^2)(e1^2+e2^2))^2
"""
import numpy as np

from ..errors import CaseMismatch
from ..kinematics import EulerOrientation, Pose
from .sigma import recover_sigma
from .table import general_guards, quartic_row18, z_general

S3 = np.sqrt(3.0)
CASES = ("1a", "2", "2a", "general")
HYPOTHESIS_TOL = 1e-10


def gcd_factor(e):
    e0, e1, e2, e3 = e
    return (e0 * e1 + e2 * e3) * quartic_row18(e)


def x_coefficient_factor(e):
    e0, e1, e2, e3 = e
    return 2 * (e2**2 + e1**2) * (e0 - e3) * (e0 + e3) * (e0 * e1 - e2 * e3) * (e0 * e2 + e1 * e3)


def _check(case, e):
    e0, e1, e2, e3 = e
    t = HYPOTHESIS_TOL
    if case == "1a":
        ok = abs(e1) < t and abs(e2) < t
    elif case == "2":
        ok = abs(e0 - e3) < t and abs(e3) > t
    elif case == "2a":
        ok = abs(e0 - e3) < t and abs(e2 + e1) < t and abs(e3) > t
    elif case == "general":
        ok = abs(general_guards(e)["(e3^2-e0^2)(e1^2+e2^2)"]) > t
    else:
        raise CaseMismatch(f"unknown case {case!r}; expected one of {CASES}")
    if not ok:
        raise CaseMismatch(f"orientation {tuple(np.round(e, 12))} does not satisfy case {case}")


def closed_form_factors(case, o, position):
    """Closed-form predictions for one case, keyed by the quantity predicted.

    Keys are ``c2``, ``c1``, ``c0`` or, for the general case, ``dc1_dx``
    (the slope of c1 in x at the Q = 0 height). Predictions are only defined
    up to a common constant per key.
    """
    if not isinstance(o, EulerOrientation):
        o = EulerOrientation.from_array(o)
    e = o.unit()
    _check(case, e)
    e0, e1, e2, e3 = e
    x, y, z = (float(v) for v in position)
    if case == "1a":
        return {"c2": 0.0, "c1": 0.0, "c0": z**3 * (e0**2 + e3**2) * (e0 - e3) * (e0 + e3)}
    if case == "2":
        return {"c2": 2 * e3**3 * (e1 + e2) * (e1 - 2 * e2 - S3 * e2) * (e1 - 2 * e2 + S3 * e2)}
    if case == "2a":
        return {
            "c2": 0.0,
            "c1": 4 * e1**2 * e3 * (z - 2 * e1 * e3) * (e1 * z + 2 * e1**2 * e3 + 2 * e3**3 + y * e3),
            "c0": 4 * x * e1 * e3 * (z - 2 * e1 * e3) * (2 * e1 * e3 * y - e3**2 * z + e1**2 * z),
        }
    den = general_guards(e)["(e3^2-e0^2)(e1^2+e2^2)"]
    return {"c2": 0.0, "dc1_dx": gcd_factor(e) * x_coefficient_factor(e) / den**2}


def recovered_quantities(case, o, position):
    """Numeric counterparts of :func:`closed_form_factors` from coefficient recovery.

    For the general case the height is replaced by the Q = 0 height and the
    x-slope of c1 is measured by a unit step in x (c1 is affine in x there).
    """
    if not isinstance(o, EulerOrientation):
        o = EulerOrientation.from_array(o)
    x, y, z = (float(v) for v in position)
    if case != "general":
        sigma = recover_sigma(Pose(o, (x, y, z)))
        return {"c2": sigma.c2, "c1": sigma.c1, "c0": sigma.c0, "scale": sigma.scale}
    z = z_general(o.unit())
    a = recover_sigma(Pose(o, (x, y, z)))
    b = recover_sigma(Pose(o, (x + 1.0, y, z)))
    return {"c2": a.c2, "dc1_dx": b.c1 - a.c1, "scale": a.scale}


def fit_common_scale(predicted, recovered):
    """Least-squares ``k`` with ``recovered ~ k * predicted``; returns (k, relative residual)."""
    p = np.asarray(predicted, dtype=float)
    r = np.asarray(recovered, dtype=float)
    k = float(p @ r / (p @ p))
    rel = float(np.linalg.norm(r - k * p) / np.linalg.norm(r))
    return k, rel


def factor_agreement(case, instances):
    """Compare oracle and recovery over many (orientation, position) instances.

    Returns ``{key: (scale, relative residual)}`` for every nonzero prediction,
    plus ``{key: max |recovered| / coefficient scale}`` under ``"zeros"`` for
    the keys predicted to vanish.
    """
    preds, recs, zero_keys = {}, {}, {}
    for o, pos in instances:
        p = closed_form_factors(case, o, pos)
        r = recovered_quantities(case, o, pos)
        for key, value in p.items():
            if value == 0.0:
                zero_keys.setdefault(key, []).append(abs(r[key]) / r["scale"])
            else:
                preds.setdefault(key, []).append(value)
                recs.setdefault(key, []).append(r[key])
    out = {key: fit_common_scale(preds[key], recs[key]) for key in preds}
    out["zeros"] = {key: max(vals) for key, vals in zero_keys.items()}
    return out


def case_instances(case, rng, count, half_width=2.0):
    """Random (orientation, position) pairs satisfying a case's hypothesis."""
    out = []
    while len(out) < count:
        a, b, c = rng.uniform(-1, 1, 3)
        pos = rng.uniform(-half_width, half_width, 3)
        if case == "1a":
            e = [a, 0.0, 0.0, b]
        elif case == "2":
            e = [c, a, b, c]
        elif case == "2a":
            e = [c, a, -a, c]
        else:
            e = rng.normal(size=4)
        o = EulerOrientation.from_array(e)
        u = o.unit()
        if case == "general" and min(abs(v) for v in general_guards(u).values()) < 0.05:
            continue
        if case in ("2", "2a") and abs(u[3]) < 0.05:
            continue
        out.append((o, pos))
    return out
