import io
import math
import warnings

import numpy as np
import pytest

from fastgreen import (
    Analytic,
    FillReport,
    InvalidInputError,
    KernelKind,
    Medium,
    OutOfRangeError,
    QuadratureSpec,
    SamplingConfig,
    SingularityError,
    TriangleMesh,
    build_evaluator,
    fill_matrix,
    generate_sphere_mesh,
    predicted_calls,
)
from fastgreen.matfill import REPORT_CSV_HEADER, bench_compare, elementwise_rel_error, write_report_csv
from fastgreen.quadrature import inner_points, outer_points

TWO_PI = 2 * math.pi


def two_triangles(mirror=False):
    a = np.array([[0.0, 0.0, 0.0], [0.2, 0.0, 0.0], [0.0, 0.3, 0.0]])
    b = -a if mirror else a + [0.05, 0.1, 0.4]
    return TriangleMesh(np.vstack([a, b]), [[0, 1, 2], [3, 4, 5]])


def oracle_fill(mesh, spec, k, kind):
    """Direct numpy summation over all point pairs."""
    o, ow = outer_points(mesh, spec.m)
    i, iw = inner_points(mesh, spec.n)
    d = np.linalg.norm(o[:, :, None, None, :] - i[None, None, :, :, :], axis=-1)  # (N, m, N, 3n)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.exp(-1j * k * d)
        if kind is KernelKind.GREEN_OVER_R:
            g = g / d
    w = ow[:, :, None, None] * iw[None, None, :, :]
    Z = np.einsum("pmqi->pq", w * g)
    np.fill_diagonal(Z, 0)
    return Z, d


class TestPredictedCalls:
    @pytest.mark.parametrize("args, expected", [((100, 4, 3), 360_000), ((1, 1, 1), 3), ((320, 4, 3), 3_686_400)])
    def test_examples(self, args, expected):
        assert predicted_calls(*args) == expected

    @pytest.mark.parametrize("args", [(0, 4, 3), (10, 0, 3), (10, 4, -1), (10.5, 4, 3)])
    def test_errors(self, args):
        with pytest.raises(InvalidInputError):
            predicted_calls(*args)


def test_hand_summation_static_kernel():
    # m = n = 1, k = 0: Z[0,1] = area(A) * sum over B's edges of length / distance
    mesh = two_triangles()
    Z, rep = fill_matrix(mesh, QuadratureSpec(1, 1), Analytic(0.0), KernelKind.GREEN_OVER_R)
    a, b = mesh.corners()
    centroid = a.mean(axis=0)
    expected = 0.0
    for s in range(3):
        p, q = b[s], b[(s + 1) % 3]
        expected += np.linalg.norm(q - p) / np.linalg.norm(centroid - 0.5 * (p + q))
    expected *= 0.5 * 0.2 * 0.3
    assert Z[0, 1].real == pytest.approx(expected, rel=1e-14)
    assert Z[0, 1].imag == 0.0
    assert Z[0, 0] == 0 and Z[1, 1] == 0
    assert rep.actual_calls == 6 and rep.predicted_calls == 12


@pytest.mark.parametrize("kind", list(KernelKind))
def test_analytic_matches_numpy_oracle(kind):
    mesh = generate_sphere_mesh(0.5, 1)
    spec = QuadratureSpec(6, 2)
    Z, rep = fill_matrix(mesh, spec, Analytic(TWO_PI), kind)
    ref, _ = oracle_fill(mesh, spec, TWO_PI, kind)
    assert np.allclose(Z, ref, rtol=1e-12, atol=1e-14)
    assert rep.actual_calls == 3 * 6 * 2 * 80 * 79


def test_mirrored_pair_is_reciprocal():
    mesh = two_triangles(mirror=True)
    for ev in (Analytic(TWO_PI), build_evaluator(SamplingConfig(1e-4, 1.0), Medium())):
        Z, _ = fill_matrix(mesh, QuadratureSpec(4, 3), ev)
        assert Z[0, 1] == Z[1, 0]


def test_dense_plan_matches_analytic():
    mesh = generate_sphere_mesh(0.5, 0)
    spec = QuadratureSpec(4, 3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ev = build_evaluator(SamplingConfig(1e-4, 1.01, samples_per_wavelength=100_000), Medium())
    Z, _ = fill_matrix(mesh, spec, ev)
    Z_ref, _ = fill_matrix(mesh, spec, Analytic(TWO_PI))
    assert max(elementwise_rel_error(Z, Z_ref)) <= 1e-9


def test_analytic_fill_is_configuration_independent():
    mesh = generate_sphere_mesh(0.5, 1)
    spec = QuadratureSpec(4, 3)
    Z1, _ = fill_matrix(mesh, spec, Analytic(TWO_PI))
    rep = bench_compare(mesh, spec, Medium(), SamplingConfig(1e-4, 1.0, samples_per_wavelength=2000), repeats=1)
    Z2, _ = fill_matrix(mesh, spec, Analytic(TWO_PI))
    assert Z1.tobytes() == Z2.tobytes()
    assert rep.N == 80


@pytest.mark.parametrize("evaluator", ["analytic", "table"])
def test_threads_are_bit_identical(evaluator):
    mesh = generate_sphere_mesh(0.5, 1)
    spec = QuadratureSpec(4, 3)
    ev = Analytic(TWO_PI) if evaluator == "analytic" else build_evaluator(SamplingConfig(1e-4, 1.01), Medium())
    Z1, r1 = fill_matrix(mesh, spec, ev, threads=1)
    Z4, r4 = fill_matrix(mesh, spec, ev, threads=4)
    Zmany, rmany = fill_matrix(mesh, spec, ev, threads=500)
    assert Z1.tobytes() == Z4.tobytes() == Zmany.tobytes()
    assert r1.actual_calls == r4.actual_calls == rmany.actual_calls == 3 * 4 * 3 * 80 * 79


def test_fallback_counting():
    mesh = generate_sphere_mesh(0.5, 1)
    spec = QuadratureSpec(4, 3)
    _, d = oracle_fill(mesh, spec, TWO_PI, KernelKind.PLAIN_EXP)
    off = ~np.eye(mesh.N, dtype=bool)[:, None, :, None] & np.ones(d.shape, dtype=bool)
    r_min = float(np.quantile(d[off], 0.01))
    ev = build_evaluator(SamplingConfig(r_min, 1.01), Medium())
    Z, rep = fill_matrix(mesh, spec, ev, threads=3)
    expected = int(np.sum(d[off] < r_min))
    assert expected > 0
    assert rep.fallback_calls == ev.fallback_count == expected
    assert rep.actual_calls == 3 * 4 * 3 * 80 * 79
    Z_ref, _ = fill_matrix(mesh, spec, Analytic(TWO_PI))
    assert max(elementwise_rel_error(Z, Z_ref)) < 1e-3


def test_range_and_singularity_errors():
    mesh = generate_sphere_mesh(0.5, 1)
    spec = QuadratureSpec(4, 3)
    short = build_evaluator(SamplingConfig(1e-4, 0.5), Medium())
    with pytest.raises(OutOfRangeError):
        fill_matrix(mesh, spec, short)
    # the edge midpoint of the second triangle sits on the first one's centroid
    verts = [[0, 0, 0], [3, 0, 0], [0, 3, 0], [1, 1, -1], [1, 1, 1], [2, 2, 5]]
    touching = TriangleMesh(np.array(verts, dtype=float), [[0, 1, 2], [3, 4, 5]])
    with pytest.raises(SingularityError):
        fill_matrix(touching, QuadratureSpec(1, 1), Analytic(1.0))
    ev = build_evaluator(SamplingConfig(1e-3, 10.0), Medium(10.0))
    with pytest.raises(SingularityError):
        fill_matrix(touching, QuadratureSpec(1, 1), ev)
    Z, _ = fill_matrix(touching, QuadratureSpec(1, 1), ev, KernelKind.PLAIN_EXP)
    assert np.all(np.isfinite(Z))
    with pytest.raises(InvalidInputError):
        fill_matrix(mesh, spec, object())


def test_report_validation_and_csv():
    with pytest.raises(InvalidInputError):
        FillReport(N=2, m=1, n=1, predicted_calls=12, actual_calls=13, fallback_calls=0, wall_time_s=0.0)
    mesh = generate_sphere_mesh(0.5, 0)
    rep = bench_compare(mesh, QuadratureSpec(4, 3), Medium(), repeats=1)
    assert rep.actual_calls == 3 * 4 * 3 * 20 * 19 and rep.speedup > 0
    buf = io.StringIO()
    write_report_csv([rep], buf)
    header, row = buf.getvalue().splitlines()
    assert header == ",".join(REPORT_CSV_HEADER)
    assert header == "N,m,n,predicted_calls,actual_calls,fallback_calls,analytic_s,interp_s,speedup,max_rel_re,max_rel_im"
    assert row.startswith("20,4,3,14400,13680,0,")


def test_bench_error_stats_are_deterministic():
    mesh = generate_sphere_mesh(0.5, 1)
    spec = QuadratureSpec(4, 3)
    a = bench_compare(mesh, spec, Medium(), repeats=1)
    b = bench_compare(mesh, spec, Medium(), repeats=1)
    assert (a.max_rel_error_re, a.max_rel_error_im) == (b.max_rel_error_re, b.max_rel_error_im)
    assert a.actual_calls == b.actual_calls and a.fallback_calls == b.fallback_calls
    with pytest.raises(InvalidInputError):
        bench_compare(mesh, spec, Medium(), repeats=0)

