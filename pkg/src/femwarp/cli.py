"""Command line drivers.

Subcommands: ``warp``, ``sweep``, ``quality``, ``oracle``, ``genmesh``.
Exit codes: 0 success, 2 warp completed with reversals, 1 usage/parse or
internal error.  Error paths print a single machine-parsable line to
stderr: ``error code=<CODE> message=<text>``.
"""

import argparse
import sys

import numpy as np

from . import io
from .analytic import AnnulusSpec, annulus_coeffs, annulus_jac_det, type1_predicate
from .assembly import build_weights
from .errors import FemwarpError, InvalidSpecError
from .generators import gen_annulus, gen_rectangle
from .mesh import quality_report
from .untangle import hybrid_warp, untangle
from .warp import (
    DEFAULT_MIN_STEP,
    AffineMotion,
    TabulatedMotion,
    annulus_rotation_motion,
    femwarp_step,
    nonlinear3d_motion,
    shear_motion,
    small_step_femwarp,
)

ALGORITHMS = ("femwarp", "small_step", "untangle", "hybrid")


def _read_mesh(base):
    return io.read_mesh(base + ".node", base + ".ele")


def build_motion(mesh, spec, scale=1.0):
    """Construct the BoundaryMotion described by a spec dict.

    ``scale`` multiplies the motion's scalar parameter (used by sweeps).
    """
    kind = spec.get("motion")
    if kind is None:
        raise InvalidSpecError("spec is missing 'motion'")
    if kind == "affine":
        matrix = io.parse_matrix(spec["l"], mesh.dim)
        shift = (
            io.parse_vector(spec["v"], mesh.dim)
            if "v" in spec
            else np.zeros(mesh.dim)
        )
        if scale != 1.0:
            eye = np.eye(mesh.dim)
            matrix = eye + scale * (matrix - eye)
            shift = scale * shift
        return AffineMotion(mesh, matrix, shift)
    if kind == "annulus":
        theta_outer = scale * float(spec.get("theta_outer", 0.0))
        theta_inner = scale * float(spec.get("theta_inner", 0.0))
        s = float(spec["s"]) if "s" in spec else None
        return annulus_rotation_motion(mesh, theta_outer, theta_inner, s=s)
    if kind == "shear":
        return shear_motion(mesh, scale * float(spec.get("alpha", 0.0)))
    if kind == "nonlinear3d":
        return nonlinear3d_motion(mesh, scale * float(spec.get("alpha", 0.0)))
    if kind == "tabulated":
        paths = [p.strip() for p in spec["frames"].split(",") if p.strip()]
        frames = [io.read_boundary_frame(mesh, p) for p in paths]
        return TabulatedMotion(mesh, frames)
    raise InvalidSpecError(f"unknown motion kind {kind!r}")


def run_algorithm(mesh, spec, motion):
    """Run the spec's algorithm against one motion; returns (mesh, report)."""
    algorithm = spec.get("algorithm", "femwarp")
    scheme = spec.get("scheme", "fem")
    min_step = float(spec.get("min_step", DEFAULT_MIN_STEP))
    max_sweeps = int(spec.get("max_sweeps", 50))
    if algorithm == "femwarp":
        weights = build_weights(mesh, scheme)
        return femwarp_step(mesh, weights, motion.evaluate(1.0))
    if algorithm == "small_step":
        return small_step_femwarp(mesh, scheme, motion, min_step=min_step)
    if algorithm == "hybrid":
        weights = build_weights(mesh, scheme)
        return hybrid_warp(mesh, weights, motion.evaluate(1.0), max_sweeps=max_sweeps)
    if algorithm == "untangle":
        target = motion.evaluate(1.0)
        coords = np.array(mesh.coords)
        coords[mesh.boundary_ids] = target
        moved = mesh.with_coords(coords)
        fixed, sweeps, outcome = untangle(moved, max_sweeps=max_sweeps)
        from .mesh import count_reversals
        from .warp import WarpReport

        nrev, _ = count_reversals(fixed)
        return fixed, WarpReport(
            outcome="SUCCESS" if outcome == "SUCCESS" else "REVERSED",
            reversals=nrev,
            n_factorizations=0,
        )
    raise InvalidSpecError(f"unknown algorithm {algorithm!r}")


def _report_lines(report, mesh):
    q = report.quality or quality_report(mesh)
    lines = [
        f"outcome = {report.outcome}",
        f"reversals = {report.reversals}",
        f"n_factorizations = {report.n_factorizations}",
    ]
    for key, val in q.as_dict().items():
        lines.append(f"quality_{key} = {val:.17g}")
    return lines


def cmd_warp(args):
    mesh = _read_mesh(args.mesh)
    spec = io.read_spec(args.spec)
    motion = build_motion(mesh, spec)
    warped, report = run_algorithm(mesh, spec, motion)
    io.write_mesh(warped, args.out + ".node", args.out + ".ele")
    with open(args.out + ".report", "w") as fh:
        fh.write("\n".join(_report_lines(report, warped)) + "\n")
    print("\n".join(_report_lines(report, warped)))
    return 0 if report.success else 2


def cmd_sweep(args):
    mesh = _read_mesh(args.mesh)
    spec = io.read_spec(args.spec)
    try:
        start, stop, step = (float(v) for v in args.param_grid.split(":"))
    except ValueError:
        raise InvalidSpecError(f"bad --param-grid {args.param_grid!r}; want a:b:step")
    if step <= 0:
        raise InvalidSpecError("param-grid step must be positive")
    rows = []
    param = start
    while param <= stop + 1e-12:
        motion = build_motion(mesh, spec, scale=param)
        _, report = run_algorithm(mesh, spec, motion)
        rows.append((param, report.outcome, report.reversals, report.n_factorizations))
        param += step
    out = sys.stdout if args.out is None else open(args.out, "w")
    try:
        out.write("param,outcome,reversals,n_factorizations\n")
        for param, outcome, nrev, nchol in rows:
            out.write(f"{param:.10g},{outcome},{nrev},{nchol}\n")
    finally:
        if args.out is not None:
            out.close()
    return 0


def cmd_quality(args):
    mesh = _read_mesh(args.mesh)
    q = quality_report(mesh)
    for key, val in q.as_dict().items():
        print(f"{key} = {val:.17g}")
    return 0


def cmd_oracle(args):
    spec = AnnulusSpec(args.r, args.s, args.theta)
    a, b, c, d = annulus_coeffs(spec)
    det_min = annulus_jac_det(spec, (spec.r, 0.0))
    print(f"a = {a:.17g}")
    print(f"b = {b:.17g}")
    print(f"c = {c:.17g}")
    print(f"d = {d:.17g}")
    print(f"min_jac_det = {det_min:.17g}")
    print(f"reversal_predicate = {str(type1_predicate(spec)).lower()}")
    return 0


def cmd_genmesh(args):
    if args.shape == "annulus":
        mesh = gen_annulus(args.r, args.rings, args.sectors)
    else:
        mesh = gen_rectangle(args.width, args.height, args.nx, args.ny)
    io.write_mesh(mesh, args.out + ".node", args.out + ".ele")
    print(f"nodes = {mesh.n_nodes}")
    print(f"elements = {mesh.n_elements}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="femwarp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("warp", help="warp a mesh per a deformation spec")
    p.add_argument("--mesh", required=True, help="mesh basename (.node/.ele)")
    p.add_argument("--spec", required=True, help="deformation spec file")
    p.add_argument("--out", required=True, help="output basename")
    p.set_defaults(fn=cmd_warp)

    p = sub.add_parser("sweep", help="sweep the motion parameter, emit CSV")
    p.add_argument("--mesh", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--param-grid", required=True, help="start:stop:step")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("quality", help="print a quality report")
    p.add_argument("--mesh", required=True)
    p.set_defaults(fn=cmd_quality)

    p = sub.add_parser("oracle", help="closed-form annulus oracle")
    osub = p.add_subparsers(dest="oracle_kind", required=True)
    pa = osub.add_parser("annulus")
    pa.add_argument("--r", type=float, required=True)
    pa.add_argument("--s", type=float, required=True)
    pa.add_argument("--theta", type=float, required=True)
    pa.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("genmesh", help="emit a structured fixture mesh")
    gsub = p.add_subparsers(dest="shape", required=True)
    pa = gsub.add_parser("annulus")
    pa.add_argument("--r", type=float, default=0.5)
    pa.add_argument("--rings", type=int, default=6)
    pa.add_argument("--sectors", type=int, default=48)
    pa.add_argument("--out", required=True)
    pa.set_defaults(fn=cmd_genmesh)
    pr = gsub.add_parser("rectangle")
    pr.add_argument("--width", type=float, default=2.0)
    pr.add_argument("--height", type=float, default=1.0)
    pr.add_argument("--nx", type=int, default=21)
    pr.add_argument("--ny", type=int, default=11)
    pr.add_argument("--out", required=True)
    pr.set_defaults(fn=cmd_genmesh)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except FemwarpError as exc:
        print(f"error code={exc.code} message={exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error code=IO_ERROR message={exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
