"""Table-driven evaluation of the free-space Helmholtz kernels.

exp(-jkr) and exp(-jkr)/r are sampled once on an adaptive radial grid
(denser around the zeros of their real and imaginary parts), then evaluated
by linear or Lagrange interpolation behind a constant-time hash lookup.
A Galerkin matrix-fill benchmark compares the tables with direct
evaluation.
"""

from .bounds import (
    ErrorBound,
    ErrorSweepReport,
    derivative_bound,
    error_sweep,
    lagrange_bound,
    linear_bound,
    local_bound,
    probe_bounds,
)
from .errors import (
    FastGreenError,
    InvalidInputError,
    MeshError,
    OutOfRangeError,
    SamplingDensityWarning,
    SingularityError,
)
from .interp import (
    LAGRANGE,
    LINEAR,
    KernelEvaluator,
    build_evaluator,
    eval_batch,
    eval_exp,
    eval_green,
    eval_kernel,
)
from .kernels import KernelKind, Medium, analytic_batch, eval_analytic, wavenumber
from .matfill import (
    Analytic,
    FillReport,
    bench_compare,
    fill_matrix,
    predicted_calls,
)
from .mesh import TriangleMesh, generate_sphere_mesh, load_mesh, save_mesh
from .quadrature import QuadratureSpec
from .sampling import SamplingConfig, SamplingPlan, base_interval, build_plan, zero_crossings
from .table import HashIndex, KernelTable, build_hash, build_table, locate

__version__ = "0.1.0"

__all__ = [
    "Analytic",
    "ErrorBound",
    "ErrorSweepReport",
    "FastGreenError",
    "FillReport",
    "HashIndex",
    "InvalidInputError",
    "KernelEvaluator",
    "KernelKind",
    "KernelTable",
    "LAGRANGE",
    "LINEAR",
    "Medium",
    "MeshError",
    "OutOfRangeError",
    "QuadratureSpec",
    "SamplingConfig",
    "SamplingDensityWarning",
    "SamplingPlan",
    "SingularityError",
    "TriangleMesh",
    "analytic_batch",
    "base_interval",
    "bench_compare",
    "build_evaluator",
    "build_hash",
    "build_plan",
    "build_table",
    "derivative_bound",
    "error_sweep",
    "eval_analytic",
    "eval_batch",
    "eval_exp",
    "eval_green",
    "eval_kernel",
    "fill_matrix",
    "generate_sphere_mesh",
    "lagrange_bound",
    "linear_bound",
    "load_mesh",
    "local_bound",
    "locate",
    "predicted_calls",
    "probe_bounds",
    "save_mesh",
    "wavenumber",
    "zero_crossings",
]
