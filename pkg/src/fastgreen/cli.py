"""Command-line front end: ``fastgreen {build-table,sweep-error,bench-fill,gen-mesh}``.

Exit status is 0 on success, 1 when the computation itself fails and 2 for
usage errors (bad flags, invalid values, missing input files).
"""

import argparse
import os
import sys

from . import bounds, matfill, mesh, sampling
from .errors import FastGreenError, InvalidInputError
from .interp import LAGRANGE, LINEAR, KernelEvaluator
from .kernels import KernelKind, Medium, wavenumber
from .quadrature import QuadratureSpec
from .table import write_table_dump

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _on_off(text):
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _common(p):
    g = p.add_argument_group("medium and sampling")
    g.add_argument("--lambda0", type=float, default=1.0, help="free-space wavelength in meters (default 1)")
    g.add_argument("--eps-r", type=float, default=1.0, help="relative permittivity (default 1)")
    g.add_argument("--mu-r", type=float, default=1.0, help="relative permeability (default 1)")
    g.add_argument("--samples-per-wavelength", type=float, default=1000.0, metavar="S", help="default 1000")
    g.add_argument("--r-min", type=float, default=None, help="smallest tabulated radius (default 1e-4 * lambda0)")
    g.add_argument("--r-max", type=float, default=None, help="largest tabulated radius (default lambda0)")
    g.add_argument("--lagrange-degree", type=_positive_int, default=3, help="default 3")
    g.add_argument("--refine", type=_on_off, default=True, metavar="{on,off}", help="refine around zero crossings (default on)")
    g.add_argument("--refine-halfwidth", type=float, default=2.0, help="refinement half-width in base intervals (default 2)")
    g.add_argument("--refine-divisor", type=_positive_int, default=2, help="refined interval is t / divisor (default 2)")


def build_parser():
    parser = _Parser(prog="fastgreen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-table", help="build a sampling plan and kernel tables")
    _common(p)
    p.add_argument("--kernel", choices=["exp", "green"], default="green", help="kernel for --dump-table")
    p.add_argument("--dump-plan", metavar="CSV", help="write index,r,is_zero,gap_to_next")
    p.add_argument("--dump-table", metavar="BIN", help="write the binary table dump")

    p = sub.add_parser("sweep-error", help="interpolation error over a uniform probe grid")
    _common(p)
    p.add_argument("--probes", type=_positive_int, default=10_000, help="default 10000")
    p.add_argument("--out", metavar="CSV", help="write the report here instead of standard output")

    p = sub.add_parser("bench-fill", help="analytic versus table-driven matrix fill")
    _common(p)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--mesh", metavar="OFF", help="triangle mesh in OFF format")
    src.add_argument("--sphere-subdiv", type=int, default=None, metavar="L", help="icosphere with 20*4^L triangles")
    p.add_argument("--sphere-radius", type=float, default=None, help="icosphere radius (default 0.5 * lambda0)")
    p.add_argument("--outer-m", type=_positive_int, default=4, help="points of the outer triangle rule (default 4)")
    p.add_argument("--inner-n", type=_positive_int, default=3, help="Gauss points per source edge (default 3)")
    p.add_argument("--threads", type=_positive_int, default=1, help="default 1")
    p.add_argument("--repeats", type=_positive_int, default=3, help="timed runs per side, fastest kept (default 3)")
    p.add_argument("--out", metavar="CSV", help="write the report here instead of standard output")

    p = sub.add_parser("gen-mesh", help="write an icosphere OFF file")
    p.add_argument("--sphere-subdiv", type=int, default=2, metavar="L", help="default 2")
    p.add_argument("--sphere-radius", type=float, default=0.5, help="meters (default 0.5)")
    p.add_argument("--out", required=True, metavar="OFF")
    return parser


def _medium(args):
    return Medium(args.lambda0, args.eps_r, args.mu_r)


def _config(args, medium, r_max=None):
    r_min = 1e-4 * medium.lambda0 if args.r_min is None else args.r_min
    if r_max is None:
        r_max = medium.lambda0 if args.r_max is None else args.r_max
    return sampling.SamplingConfig(
        r_min=r_min,
        r_max=r_max,
        samples_per_wavelength=args.samples_per_wavelength,
        refine_interval_divisor=args.refine_divisor,
        refine_halfwidth_in_t=args.refine_halfwidth,
        refine=args.refine,
    )


def _open_out(path):
    return sys.stdout if path is None else open(path, "w", newline="")


def _close_out(fh):
    if fh is not sys.stdout:
        fh.close()


def _cmd_build_table(args):
    medium = _medium(args)
    config = _config(args, medium)
    plan = sampling.build_plan(config, medium)
    ev = KernelEvaluator.from_plan(plan, args.lagrange_degree)
    if args.dump_plan:
        with open(args.dump_plan, "w", newline="") as fh:
            sampling.write_plan_csv(plan, fh)
    if args.dump_table:
        with open(args.dump_table, "wb") as fh:
            write_table_dump(ev.table(KernelKind.parse(args.kernel)), fh)
    print(f"k = {plan.k:.10g} 1/m, t = {plan.t:.6g} m, refined interval = {plan.refined_interval:.6g} m")
    print(f"samples: {len(plan)} over [{plan.r_min:.6g}, {plan.r_max:.6g}] m, dr_min = {plan.dr_min:.6g} m")
    print(f"zero crossings sampled: {plan.zero_locations.size}")
    print(f"hash buckets: {len(ev.hash)}")
    return EXIT_OK


def _cmd_sweep(args):
    medium = _medium(args)
    ev = KernelEvaluator.from_plan(sampling.build_plan(_config(args, medium), medium), args.lagrange_degree)
    reports = [
        bounds.error_sweep(ev, kind, args.probes, method=method)
        for kind in (KernelKind.PLAIN_EXP, KernelKind.GREEN_OVER_R)
        for method in (LINEAR, LAGRANGE)
    ]
    fh = _open_out(args.out)
    try:
        bounds.write_sweep_csv(reports, fh)
    finally:
        _close_out(fh)
    if args.out is not None:
        for rep in reports:
            print(
                f"{rep.kind.label:5s} {rep.method:10s} max rel re {rep.max_rel_error_re:.3e} "
                f"im {rep.max_rel_error_im:.3e}  max abs {rep.max_abs_error:.3e} at r={rep.worst_probe_r:.6g}"
            )
    return EXIT_OK


def _cmd_bench(args):
    if args.r_max is not None:
        raise UsageError("bench-fill sizes r_max from the mesh; drop --r-max")
    medium = _medium(args)
    if args.mesh is not None:
        if not os.path.isfile(args.mesh):
            raise UsageError(f"mesh file not found: {args.mesh}")
        if args.sphere_radius is not None:
            raise UsageError("--sphere-radius only applies with --sphere-subdiv")
        tri = mesh.load_mesh(args.mesh)
    else:
        level = 2 if args.sphere_subdiv is None else args.sphere_subdiv
        radius = 0.5 * medium.lambda0 if args.sphere_radius is None else args.sphere_radius
        tri = mesh.generate_sphere_mesh(radius, level)
    spec = QuadratureSpec(args.outer_m, args.inner_n)
    r_min, r_max = matfill.table_range(tri, medium, args.r_min)
    config = _config(args, medium, r_max=r_max)
    report = matfill.bench_compare(
        tri, spec, medium, config, args.lagrange_degree, args.threads, repeats=args.repeats
    )
    fh = _open_out(args.out)
    try:
        matfill.write_report_csv([report], fh)
    finally:
        _close_out(fh)
    if args.out is not None:
        print(f"k = {wavenumber(medium):.10g} 1/m, table range [{r_min:.6g}, {r_max:.6g}] m")
        print(matfill.format_summary(report))
    return EXIT_OK


def _cmd_gen_mesh(args):
    tri = mesh.generate_sphere_mesh(args.sphere_radius, args.sphere_subdiv)
    mesh.save_mesh(tri, args.out)
    print(f"wrote {tri.N} triangles, {len(tri.vertices)} vertices to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "build-table": _cmd_build_table,
    "sweep-error": _cmd_sweep,
    "bench-fill": _cmd_bench,
    "gen-mesh": _cmd_gen_mesh,
}


def run(argv=None):
    """Parse ``argv`` and execute; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fastgreen: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidInputError as exc:
        print(f"fastgreen: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FastGreenError, OSError) as exc:
        print(f"fastgreen: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main():
    sys.exit(run())
