"""Command line front end.

Exit codes: 0 success, 1 infeasible plan (or a failed acceptance check),
2 bad input, 3 structure violation in coefficient recovery.
"""
import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import OctahedralError, PlanInfeasible, SingularJacobian, StructureViolation
from .kinematics import Configuration, EulerOrientation, Pose, leg_lengths, margin, self_motion_screw

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_STRUCTURE = 0, 1, 2, 3


class InputError(ValueError):
    pass


def _load(text, what):
    """Inline JSON, or the path of a file holding it."""
    if text is None:
        raise InputError(f"--{what} is required")
    if os.path.isfile(text):
        with open(text) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"--{what}: malformed JSON ({exc})") from None


def _pose(data, what):
    try:
        return Pose.make(data["e"], data.get("s", (0.0, 0.0, 0.0)))
    except (KeyError, TypeError) as exc:
        raise InputError(f"--{what}: expected {{\"e\": [4 numbers], \"s\": [3 numbers]}} ({exc})") from None


def parse_pose(text, what="pose"):
    return _pose(_load(text, what), what)


def parse_config(text, what="config"):
    data = _load(text, what)
    pose = _pose(data, what)
    if "g" not in data:
        raise InputError(f"--{what}: missing base circumradius \"g\"")
    return Configuration(pose, data["g"])


def _clean(v):
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_clean(x) for x in v]
    if isinstance(v, (float, np.floating)):
        return None if not np.isfinite(v) else float(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if isinstance(x, float) and not np.isfinite(x) else repr(float(x))
                    if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _emit(args, payload=None, table=None):
    """Write JSON (default) or CSV when the command provides a table."""
    if args.format == "csv":
        if table is None:
            raise InputError(f"{args.command}: CSV output is not available for this command")
        text = _csv(*table)
    else:
        text = json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _path(args):
    from .planner import make_path

    if args.ntau < 2:
        raise InputError("--ntau must be at least 2")
    return make_path(parse_pose(args.start, "start"), parse_pose(args.end, "end"), args.ntau)


def _grid(args):
    if not 0 < args.gmin < args.gmax:
        raise InputError("need 0 < --gmin < --gmax")
    if args.ng < 1:
        raise InputError("--ng must be positive")


# commands ------------------------------------------------------------------

def cmd_ik(args):
    config = parse_config(args.config)
    lengths = leg_lengths(config)
    _emit(args, {"lengths": lengths, "margin": margin(config)},
          (["leg", "length"], [(i + 1, float(v)) for i, v in enumerate(lengths)]))
    return EXIT_OK


def cmd_classify(args):
    from .singularity import classify_orientation

    data = _load(args.pose, "pose")
    e = data["e"] if isinstance(data, dict) else data
    o = EulerOrientation.from_array(e)
    strata = classify_orientation(o, args.tol_match)
    _emit(args, {"orientation": o.unit(), "strata": [s.to_dict() for s in strata]})
    return EXIT_OK


def cmd_sigma(args):
    from .singularity import recover_sigma, singular_base_sizes

    sigma = recover_sigma(parse_pose(args.pose))
    _emit(args, {
        "coefficients": sigma.as_array(),
        "scale": sigma.scale,
        "residual": sigma.residual,
        "unavoidable": bool(np.max(np.abs(sigma.relative())) < args.tol_unavoidable),
        "singular_g": singular_base_sizes(sigma),
    })
    return EXIT_OK


def cmd_field(args):
    from .planner import singularity_field

    _grid(args)
    f = singularity_field(_path(args), args.gmin, args.gmax, args.ng, args.threads)
    rows = list(f.rows())
    _emit(args, {"tau": f.tau_grid, "g": f.g_grid, "margin": f.values, "clearance": f.clearance},
          (["tau", "g", "margin", "clearance"], rows))
    return EXIT_OK


def cmd_crossings(args):
    from .planner import detect_crossings

    if not args.g > 0:
        raise InputError("--g must be positive")
    tau = detect_crossings(_path(args), args.g)
    _emit(args, {"g": args.g, "tau": tau}, (["tau"], [(t,) for t in tau]))
    return EXIT_OK


def cmd_plan(args):
    from .planner import GProfile, plan_g_profile, verify_profile

    _grid(args)
    if not (args.tol_det > 0 and args.tol_clear > 0 and args.rate_bound > 0):
        raise InputError("tolerances and --rate-bound must be positive")
    path = _path(args)
    result = plan_g_profile(path, args.gmin, args.gmax, args.ng, args.tol_det, args.tol_clear,
                            args.rate_bound, args.threads, g_start=args.g_start, g_end=args.g_end)
    if isinstance(result, GProfile):
        ok, _ = verify_profile(path, result, args.tol_det, args.tol_clear, args.rate_bound)
        _emit(args, {**result.to_dict(), "status": "ok", "verified": ok},
              (["tau", "g"], list(zip(result.tau, result.g))))
        return EXIT_OK
    _emit(args, result.to_dict())
    return EXIT_INFEASIBLE


def cmd_counterexample(args):
    from .counterexample import build_counterexample, fit_lambda_polynomial, verify_unavoidable

    if args.grid_n < 2:
        raise InputError("--grid-n must be at least 2")
    mech = build_counterexample(args.height, args.half_length)
    rotated = mech.rotated_pose(args.angle)
    rot = verify_unavoidable(mech, rotated, args.grid_n)
    start = verify_unavoidable(mech, mech.start_pose(), args.grid_n)
    _, coef, resid = fit_lambda_polynomial(mech, rotated, args.grid_n)
    _emit(args, {
        "height": args.height,
        "half_length": args.half_length,
        "angle_degrees": args.angle,
        "grid_n": args.grid_n,
        "collinearity_residual": mech.collinearity_residual(),
        "rotated": {"max_margin": rot["max_margin"], "argmax_lambda": rot["argmax_lambda"],
                    "max_poly_coefficient": float(np.max(np.abs(coef))), "fit_residual": resid},
        "start": {"max_margin": start["max_margin"], "argmax_lambda": start["argmax_lambda"]},
    })
    return EXIT_OK


def cmd_selfmotion(args):
    config = parse_config(args.config)
    screw = self_motion_screw(config, args.tol_det)
    _emit(args, {"q": screw.q, "qbar": screw.qbar, "margin": margin(config)})
    return EXIT_OK


def cmd_sample(args):
    from .singularity import sample_row
    from .singularity.table import all_branches

    branch = {"+": 1, "-": -1, None: None}[args.branch]
    if (args.row, branch) not in set(all_branches()):
        raise InputError(f"row {args.row} has no branch {args.branch!r}")
    rng = np.random.default_rng(args.seed)
    poses = [sample_row(args.row, branch, rng).pose for _ in range(args.count)]
    _emit(args, {"row": args.row, "branch": args.branch, "seed": args.seed,
                 "poses": [{"e": p.orientation.as_array(), "s": p.s} for p in poses]})
    return EXIT_OK


def cmd_accept(args):
    from .acceptance import run_checks

    results = run_checks(args.criterion)
    if args.format == "json" and not args.out:
        for r in results:
            print(r.line(), file=sys.stderr)
    _emit(args, {"results": [r.to_dict() for r in results]},
          (["criterion", "passed", "detail"], [(r.number, r.passed, r.detail) for r in results]))
    return EXIT_OK if all(r.passed for r in results) else EXIT_INFEASIBLE


COMMANDS = {
    "ik": (cmd_ik, "leg lengths of a configuration"),
    "classify": (cmd_classify, "unavoidable-singularity strata of an orientation"),
    "sigma": (cmd_sigma, "coefficients of det J / g^3 at a pose"),
    "field": (cmd_field, "margin and clearance over (tau, g)"),
    "crossings": (cmd_crossings, "singular crossings along a path at fixed g"),
    "plan": (cmd_plan, "base-size profile avoiding singularities and leg contact"),
    "counterexample": (cmd_counterexample, "redundant counterexample report"),
    "selfmotion": (cmd_selfmotion, "platform screw under unit base growth with locked legs"),
    "sample": (cmd_sample, "random poses from one table row"),
    "accept": (cmd_accept, "run the acceptance checks"),
}


def build_parser():
    p = argparse.ArgumentParser(prog="octahedral", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--pose", help="JSON {\"e\": [...], \"s\": [...]} or a file holding it")
    common.add_argument("--config", help="pose JSON with an extra \"g\"")
    common.add_argument("--start")
    common.add_argument("--end")
    common.add_argument("--gmin", type=float, default=0.5)
    common.add_argument("--gmax", type=float, default=2.0)
    common.add_argument("--ng", type=int, default=31)
    common.add_argument("--ntau", type=int, default=41)
    common.add_argument("--tol-det", type=float, default=1e-4)
    common.add_argument("--tol-clear", type=float, default=0.05)
    common.add_argument("--rate-bound", type=float, default=0.1)

    sub = p.add_subparsers(dest="command", required=True)
    parsers = {name: sub.add_parser(name, parents=[common], help=text)
               for name, (_, text) in COMMANDS.items()}
    parsers["classify"].add_argument("--tol-match", type=float, default=1e-10)
    parsers["sigma"].add_argument("--tol-unavoidable", type=float, default=1e-8)
    parsers["crossings"].add_argument("--g", type=float, required=True)
    parsers["plan"].add_argument("--g-start", type=float)
    parsers["plan"].add_argument("--g-end", type=float)
    a = parsers["counterexample"]
    a.add_argument("--height", type=float, default=1.0)
    a.add_argument("--half-length", type=float, default=0.5)
    a.add_argument("--angle", type=float, default=-90.0)
    a.add_argument("--grid-n", type=int, default=11)
    s = parsers["sample"]
    s.add_argument("--row", type=int, required=True)
    s.add_argument("--branch", choices=("+", "-"))
    s.add_argument("--count", type=int, default=5)
    parsers["accept"].add_argument("--criterion", type=int, action="append", choices=range(1, 10))
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        return handler(args)
    except PlanInfeasible as exc:
        _emit(args, {**exc.failure.to_dict(), "reason": str(exc)})
        return EXIT_INFEASIBLE
    except StructureViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except SingularJacobian as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, OctahedralError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
