"""Galerkin fill of the scalar kernel matrix and the analytic-vs-table benchmark.

``Z[p, q] = sum_o sum_i w_o w_i G(|x_o - x_i|)`` with ``m`` observation
points on triangle ``p`` and ``3n`` source points on the edges of triangle
``q``.  Self pairs are skipped (left at zero), so a fill performs exactly
``3 m n N (N - 1)`` kernel evaluations.
"""

import csv
import dataclasses
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .errors import InvalidInputError, OutOfRangeError, SingularityError
from .interp import KernelEvaluator
from .kernels import KernelKind, Medium, analytic_components, wavenumber
from .mesh import mesh_diameter
from .quadrature import QuadratureSpec, inner_points, outer_points
from .sampling import SamplingConfig, build_plan

_OK, _SINGULAR, _ABOVE_RANGE = 0, 1, 2

RANGE_MARGIN = 1.01


def predicted_calls(N, m, n):
    """Kernel evaluations of a full fill including self pairs: 3 m n N**2."""
    for name, value in (("N", N), ("m", m), ("n", n)):
        if int(value) != value or value < 1:
            raise InvalidInputError(f"{name} must be a positive integer")
    return 3 * int(m) * int(n) * int(N) ** 2


@dataclass(frozen=True)
class Analytic:
    """Closed-form kernel evaluation at wavenumber k."""

    k: float


@dataclass
class FillReport:
    N: int
    m: int
    n: int
    predicted_calls: int
    actual_calls: int
    fallback_calls: int
    wall_time_s: float
    max_rel_error_re: float = math.nan
    max_rel_error_im: float = math.nan
    speedup: float = math.nan
    analytic_time_s: float = math.nan
    table_build_s: float = 0.0

    def __post_init__(self):
        if self.actual_calls > self.predicted_calls:
            raise InvalidInputError("actual calls cannot exceed the predicted count")


@numba.njit(cache=True, nogil=True, error_model="numpy")
def _fill_rows_analytic(row_lo, row_hi, kind, k, opts, ow, ipts, iw, z_re, z_im):
    N = opts.shape[0]
    m = opts.shape[1]
    ni = ipts.shape[1]
    calls = 0
    for p in range(row_lo, row_hi):
        for q in range(N):
            if p == q:
                continue
            acc_re = 0.0
            acc_im = 0.0
            for o in range(m):
                xo = opts[p, o, 0]
                yo = opts[p, o, 1]
                zo = opts[p, o, 2]
                wo = ow[p, o]
                for i in range(ni):
                    dx = xo - ipts[q, i, 0]
                    dy = yo - ipts[q, i, 1]
                    dz = zo - ipts[q, i, 2]
                    r = math.sqrt(dx * dx + dy * dy + dz * dz)
                    if r == 0.0 and kind == 1:
                        return _SINGULAR, calls, 0
                    g_re, g_im = analytic_components(kind, k, r)
                    w = wo * iw[q, i]
                    acc_re += w * g_re
                    acc_im += w * g_im
                    calls += 1
            z_re[p, q] = acc_re
            z_im[p, q] = acc_im
    return _OK, calls, 0


@numba.njit(nogil=True, error_model="numpy")
def _fill_rows_interp(
    row_lo, row_hi, kind, k, point, r_tab, re_tab, im_tab, aux, degree, base, split, scale,
    opts, ow, ipts, iw, z_re, z_im,
):
    N = opts.shape[0]
    m = opts.shape[1]
    ni = ipts.shape[1]
    r_lo = r_tab[0]
    r_hi = r_tab[r_tab.size - 1]
    calls = 0
    fallback = 0
    for p in range(row_lo, row_hi):
        for q in range(N):
            if p == q:
                continue
            acc_re = 0.0
            acc_im = 0.0
            for o in range(m):
                xo = opts[p, o, 0]
                yo = opts[p, o, 1]
                zo = opts[p, o, 2]
                wo = ow[p, o]
                for i in range(ni):
                    dx = xo - ipts[q, i, 0]
                    dy = yo - ipts[q, i, 1]
                    dz = zo - ipts[q, i, 2]
                    r = math.sqrt(dx * dx + dy * dy + dz * dz)
                    if r < r_lo:
                        if r == 0.0 and kind == 1:
                            return _SINGULAR, calls, fallback
                        g_re, g_im = analytic_components(kind, k, r)
                        fallback += 1
                    elif r > r_hi:
                        return _ABOVE_RANGE, calls, fallback
                    else:
                        g_re, g_im = point(r_tab, re_tab, im_tab, aux, degree, base, split, scale, r)
                    w = wo * iw[q, i]
                    acc_re += w * g_re
                    acc_im += w * g_im
                    calls += 1
            z_re[p, q] = acc_re
            z_im[p, q] = acc_im
    return _OK, calls, fallback


@dataclass(frozen=True, eq=False)
class QuadraturePoints:
    """Precomputed points and weights shared by every fill over one mesh."""

    spec: QuadratureSpec
    N: int
    outer: np.ndarray
    outer_w: np.ndarray
    inner: np.ndarray
    inner_w: np.ndarray

    @classmethod
    def build(cls, mesh, spec):
        o, ow = outer_points(mesh, spec.m)
        i, iw = inner_points(mesh, spec.n)
        return cls(spec, mesh.N, o, ow, i, iw)


def _row_blocks(N, threads):
    threads = max(1, min(int(threads), N)) if N else 1
    edges = np.linspace(0, N, threads + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _kernel_for(evaluator, kind):
    kind = KernelKind(kind)
    if isinstance(evaluator, Analytic):
        if not (math.isfinite(evaluator.k) and evaluator.k >= 0):
            raise InvalidInputError("wavenumber must be finite and >= 0")
        return _fill_rows_analytic, (int(kind), float(evaluator.k))
    if isinstance(evaluator, KernelEvaluator):
        return _fill_rows_interp, (int(kind), evaluator.k, *evaluator.kernel_args(kind))
    raise InvalidInputError("evaluator must be Analytic(k) or a KernelEvaluator")


def _warm_up(func, args, qp):
    # trigger compilation outside the timed region
    z = np.zeros((qp.N, qp.N))
    func(0, 0, *args, qp.outer, qp.outer_w, qp.inner, qp.inner_w, z, z)


def fill_matrix(mesh, spec, evaluator, kind=KernelKind.GREEN_OVER_R, threads=1, points=None):
    """Assemble the N x N kernel matrix and report calls and fill time.

    ``threads > 1`` splits the rows into contiguous blocks filled
    concurrently; each block owns its rows and call counts are summed.
    ``wall_time_s`` covers the fill loop only.
    """
    qp = points if points is not None else QuadraturePoints.build(mesh, spec)
    func, args = _kernel_for(evaluator, kind)
    _warm_up(func, args, qp)

    N = qp.N
    z_re = np.zeros((N, N))
    z_im = np.zeros((N, N))
    blocks = _row_blocks(N, threads)
    fixed = (qp.outer, qp.outer_w, qp.inner, qp.inner_w, z_re, z_im)

    t0 = time.perf_counter()
    if len(blocks) == 1:
        results = [func(*blocks[0], *args, *fixed)]
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            results = list(pool.map(lambda b: func(*b, *args, *fixed), blocks))
    wall = time.perf_counter() - t0

    for status, _, _ in results:
        if status == _SINGULAR:
            raise SingularityError("two quadrature points of distinct triangles coincide")
        if status == _ABOVE_RANGE:
            raise OutOfRangeError("a quadrature-point distance exceeds the table's r_max")
    calls = sum(r[1] for r in results)
    fallback = sum(r[2] for r in results)
    if isinstance(evaluator, KernelEvaluator):
        evaluator.add_fallbacks(fallback)

    Z = np.empty((N, N), dtype=np.complex128)
    Z.real = z_re
    Z.imag = z_im
    report = FillReport(
        N=N,
        m=spec.m,
        n=spec.n,
        predicted_calls=predicted_calls(N, spec.m, spec.n),
        actual_calls=calls,
        fallback_calls=fallback,
        wall_time_s=wall,
    )
    return Z, report


def elementwise_rel_error(Z, Z_ref):
    """Max per-component relative error over off-diagonal entries with a
    non-zero reference component."""
    off = ~np.eye(Z.shape[0], dtype=bool)
    out = []
    for a, b in ((Z.real, Z_ref.real), (Z.imag, Z_ref.imag)):
        a, b = a[off], b[off]
        nz = b != 0
        out.append(float(np.max(np.abs(a[nz] - b[nz]) / np.abs(b[nz]))) if nz.any() else 0.0)
    return tuple(out)


def table_range(mesh, medium, r_min=None):
    """(r_min, r_max) covering every quadrature distance on the mesh."""
    r_max = mesh_diameter(mesh) * RANGE_MARGIN
    if r_min is None:
        r_min = 1e-4 * medium.lambda0
    return r_min, r_max


def _warm_up_builders(lagrange_degree):
    KernelEvaluator.from_plan(build_plan(SamplingConfig(r_min=0.1, r_max=1.0), Medium()), lagrange_degree)


def bench_compare(
    mesh, spec, medium, sampling_config=None, lagrange_degree=3, threads=1,
    kind=KernelKind.GREEN_OVER_R, repeats=3,
):
    """Fill analytically and through interpolation tables, and compare.

    The table's r_max is set from the mesh diameter; r_min and the sampling
    density come from ``sampling_config`` (defaults: r_min = 1e-4 lambda0,
    1000 samples per wavelength).  Each side runs ``repeats`` times,
    alternating, and the fastest run counts.  Every interpolated run
    rebuilds plan, tables and hash inside its timing.
    """
    if not isinstance(medium, Medium):
        raise InvalidInputError("bench_compare expects a Medium")
    if int(repeats) != repeats or repeats < 1:
        raise InvalidInputError("repeats must be a positive integer")
    qp = QuadraturePoints.build(mesh, spec)
    k = wavenumber(medium)

    r_min, r_max = table_range(mesh, medium, None if sampling_config is None else sampling_config.r_min)
    if sampling_config is None:
        config = SamplingConfig(r_min=r_min, r_max=r_max)
    else:
        config = dataclasses.replace(sampling_config, r_max=r_max)

    # compile the table builders before timing them
    _warm_up_builders(lagrange_degree)

    best_ref = best = None
    for _ in range(int(repeats)):
        Z_ref, rep_ref = fill_matrix(mesh, spec, Analytic(k), kind, threads, qp)
        if best_ref is None or rep_ref.wall_time_s < best_ref:
            best_ref = rep_ref.wall_time_s

        t0 = time.perf_counter()
        ev = KernelEvaluator.from_plan(build_plan(config, medium), lagrange_degree)
        build_s = time.perf_counter() - t0
        Z, rep = fill_matrix(mesh, spec, ev, kind, threads, qp)
        if best is None or build_s + rep.wall_time_s < best[0]:
            best = (build_s + rep.wall_time_s, build_s)

    rel_re, rel_im = elementwise_rel_error(Z, Z_ref)
    interp_s, build_s = best
    return dataclasses.replace(
        rep,
        wall_time_s=interp_s,
        table_build_s=build_s,
        analytic_time_s=best_ref,
        speedup=best_ref / interp_s,
        max_rel_error_re=rel_re,
        max_rel_error_im=rel_im,
    )


REPORT_CSV_HEADER = [
    "N", "m", "n", "predicted_calls", "actual_calls", "fallback_calls",
    "analytic_s", "interp_s", "speedup", "max_rel_re", "max_rel_im",
]


def write_report_csv(reports, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(REPORT_CSV_HEADER)
    for rep in reports:
        writer.writerow(
            [
                rep.N, rep.m, rep.n, rep.predicted_calls, rep.actual_calls, rep.fallback_calls,
                f"{rep.analytic_time_s:.6f}", f"{rep.wall_time_s:.6f}", f"{rep.speedup:.4f}",
                f"{rep.max_rel_error_re:.6e}", f"{rep.max_rel_error_im:.6e}",
            ]
        )


def format_summary(rep):
    return "\n".join(
        [
            f"triangles N={rep.N}, outer m={rep.m}, inner n={rep.n} per edge",
            f"kernel calls: {rep.actual_calls} (3mnN^2 model: {rep.predicted_calls}), "
            f"below r_min: {rep.fallback_calls}",
            f"analytic fill: {rep.analytic_time_s:.3f} s",
            f"table fill:    {rep.wall_time_s:.3f} s (table build {rep.table_build_s:.4f} s)",
            f"speedup:       {rep.speedup:.3f}x",
            f"max elementwise relative error: re {rep.max_rel_error_re:.3e}, im {rep.max_rel_error_im:.3e}",
        ]
    )
