"""Table-driven kernel evaluation.

exp(-jkr) is interpolated linearly between the bracketing samples and
exp(-jkr)/r with a Lagrange polynomial over a near-centred stencil.  Radii
below the first sample are evaluated in closed form and counted.
"""

import math
import threading

import numba
import numpy as np

from .errors import InvalidInputError, OutOfRangeError, SingularityError
from .kernels import KernelKind, analytic_components
from .sampling import build_plan
from .table import build_hash, build_table, locate_index

LINEAR = "linear"
LAGRANGE = "lagrange"

# status codes returned by the compiled batch loop
_OK, _BAD_RADIUS, _SINGULAR, _ABOVE_RANGE = 0, 1, 2, 3


@numba.njit(cache=True, nogil=True, error_model="numpy")
def stencil_start(j, n, degree):
    s = j - (degree - 1) // 2
    if s > n - degree - 1:
        s = n - degree - 1
    if s < 0:
        s = 0
    return s


@numba.njit(cache=True, nogil=True, error_model="numpy")
def lagrange_denominators(r, degree):
    """prod_{m != a} (r_a - r_m) for every stencil start, multiplied in
    ascending m so that the numerator at r = r_a reproduces it bit for bit."""
    n = r.size
    out = np.empty((n - degree, degree + 1))
    for s in range(n - degree):
        for a in range(degree + 1):
            p = 1.0
            for m in range(degree + 1):
                if m != a:
                    p *= r[s + a] - r[s + m]
            out[s, a] = p
    return out


@numba.njit(cache=True, nogil=True, error_model="numpy")
def linear_at(r, re, im, j, x):
    w0 = (x - r[j + 1]) / (r[j] - r[j + 1])
    w1 = (x - r[j]) / (r[j + 1] - r[j])
    return re[j] * w0 + re[j + 1] * w1, im[j] * w0 + im[j + 1] * w1


@numba.njit(cache=True, nogil=True, error_model="numpy")
def cubic_coefficients(re, im, den):
    """Rows (f_0/D_0, ..., f_3/D_3) of real then imaginary parts for every
    degree-3 stencil start, packed so one row is contiguous in memory."""
    n = den.shape[0]
    coef = np.empty((n, 8))
    for s in range(n):
        for a in range(4):
            coef[s, a] = re[s + a] / den[s, a]
            coef[s, 4 + a] = im[s + a] / den[s, a]
    return coef


@numba.njit(cache=True, nogil=True, error_model="numpy")
def lagrange3_at(r, re, im, coef, j, x):
    # nodes hit exactly return the stored sample; the coefficient form would
    # round (f/D)*D
    if x == r[j]:
        return re[j], im[j]
    if x == r[j + 1]:
        return re[j + 1], im[j + 1]
    s = stencil_start(j, r.size, 3)
    c = coef[s]
    d0 = x - r[s]
    d1 = x - r[s + 1]
    d2 = x - r[s + 2]
    d3 = x - r[s + 3]
    a = d0 * d1
    b = d2 * d3
    w0 = d1 * b
    w1 = d0 * b
    w2 = a * d3
    w3 = a * d2
    return (
        c[0] * w0 + c[1] * w1 + c[2] * w2 + c[3] * w3,
        c[4] * w0 + c[5] * w1 + c[6] * w2 + c[7] * w3,
    )


@numba.njit(cache=True, nogil=True, error_model="numpy")
def lagrange_at(r, re, im, den, degree, s, x):
    vr = 0.0
    vi = 0.0
    for a in range(degree + 1):
        p = 1.0
        for m in range(degree + 1):
            if m != a:
                p *= x - r[s + m]
        w = p / den[s, a]
        vr += re[s + a] * w
        vi += im[s + a] * w
    return vr, vi


# Point functions share one signature so the compiled loops can take the
# chosen one as an argument and get a specialised copy, with no per-sample
# branch on the method.  ``aux`` is the denominator table, or the packed
# coefficients for the cubic.
@numba.njit(cache=True, nogil=True, error_model="numpy")
def point_linear(r, re, im, aux, degree, base, split, scale, x):
    j = locate_index(r, base, split, scale, x)
    return linear_at(r, re, im, j, x)


@numba.njit(cache=True, nogil=True, error_model="numpy")
def point_lagrange3(r, re, im, aux, degree, base, split, scale, x):
    j = locate_index(r, base, split, scale, x)
    return lagrange3_at(r, re, im, aux, j, x)


@numba.njit(cache=True, nogil=True, error_model="numpy")
def point_lagrange(r, re, im, aux, degree, base, split, scale, x):
    j = locate_index(r, base, split, scale, x)
    return lagrange_at(r, re, im, aux, degree, stencil_start(j, r.size, degree), x)


def point_function(method, degree):
    if method == LINEAR:
        return point_linear
    if method == LAGRANGE:
        return point_lagrange3 if degree == 3 else point_lagrange
    raise InvalidInputError(f"unknown interpolation method {method!r}")


@numba.njit(nogil=True, error_model="numpy")
def _eval_batch(point, kind, k, r, re, im, aux, degree, base, split, scale, xs, out_re, out_im):
    """Returns (status, offending index, fallback count)."""
    r_lo = r[0]
    r_hi = r[r.size - 1]
    fallback = 0
    for i in range(xs.size):
        x = xs[i]
        if not (x >= 0.0) or math.isinf(x):
            return _BAD_RADIUS, i, fallback
        if x < r_lo:
            if x == 0.0 and kind == 1:
                return _SINGULAR, i, fallback
            out_re[i], out_im[i] = analytic_components(kind, k, x)
            fallback += 1
        elif x > r_hi:
            return _ABOVE_RANGE, i, fallback
        else:
            out_re[i], out_im[i] = point(r, re, im, aux, degree, base, split, scale, x)
    return _OK, -1, fallback


class KernelEvaluator:
    """Both kernel tables over one plan, the hash index, and a fallback counter.

    Everything but the counter is read-only after construction, so one
    evaluator can serve any number of threads.
    """

    def __init__(self, exp_table, green_table, hash_index, lagrange_degree=3):
        if exp_table.kind is not KernelKind.PLAIN_EXP or green_table.kind is not KernelKind.GREEN_OVER_R:
            raise InvalidInputError("expected an exp(-jkr) table and an exp(-jkr)/r table")
        if exp_table.plan is not green_table.plan or exp_table.k != green_table.k:
            raise InvalidInputError("both tables must share one plan and wavenumber")
        degree = int(lagrange_degree)
        if degree < 1 or degree + 1 > len(exp_table.plan):
            raise InvalidInputError(f"lagrange_degree={lagrange_degree!r} does not fit the plan")
        self.exp_table = exp_table
        self.green_table = green_table
        self.hash = hash_index
        self.lagrange_degree = degree
        self.plan = exp_table.plan
        self.k = exp_table.k
        self.denominators = lagrange_denominators(self.plan.abscissae, degree)
        self.denominators.setflags(write=False)
        self._cubic = {}
        if degree == 3:
            for tab in (exp_table, green_table):
                coef = cubic_coefficients(tab.re, tab.im, self.denominators)
                coef.setflags(write=False)
                self._cubic[tab.kind] = coef
        self._fallbacks = 0
        self._lock = threading.Lock()

    @classmethod
    def from_plan(cls, plan, lagrange_degree=3):
        return cls(
            build_table(plan, KernelKind.PLAIN_EXP, plan.k),
            build_table(plan, KernelKind.GREEN_OVER_R, plan.k),
            build_hash(plan),
            lagrange_degree,
        )

    @property
    def r_min(self):
        return self.plan.r_min

    @property
    def r_max(self):
        return self.plan.r_max

    @property
    def fallback_count(self):
        return self._fallbacks

    def add_fallbacks(self, count):
        if count:
            with self._lock:
                self._fallbacks += count

    def reset_fallbacks(self):
        with self._lock:
            self._fallbacks = 0

    def table(self, kind):
        return self.exp_table if KernelKind(kind) is KernelKind.PLAIN_EXP else self.green_table

    @staticmethod
    def default_method(kind):
        return LINEAR if KernelKind(kind) is KernelKind.PLAIN_EXP else LAGRANGE

    def kernel_args(self, kind, method=None):
        """Positional arguments for the compiled interpolation routines."""
        method = self.default_method(kind) if method is None else method
        point = point_function(method, self.lagrange_degree)
        tab = self.table(kind)
        aux = self._cubic[tab.kind] if point is point_lagrange3 else self.denominators
        return (
            point,
            self.plan.abscissae,
            tab.re,
            tab.im,
            aux,
            self.lagrange_degree,
            *self.hash.lookup_args(),
        )

    def __repr__(self):
        return (
            f"KernelEvaluator(samples={len(self.plan)}, k={self.k:.6g}, "
            f"range=[{self.r_min:.6g}, {self.r_max:.6g}], degree={self.lagrange_degree})"
        )


def build_evaluator(config, medium, lagrange_degree=3):
    return KernelEvaluator.from_plan(build_plan(config, medium), lagrange_degree)


def _interp_scalar(ev, kind, r, method):
    if not (math.isfinite(r) and ev.r_min <= r <= ev.r_max):
        raise OutOfRangeError(f"r={r!r} outside table range [{ev.r_min!r}, {ev.r_max!r}]")
    point, *args = ev.kernel_args(kind, method)
    vr, vi = point(*args, float(r))
    return complex(vr, vi)


def eval_exp(ev, r):
    """Linearly interpolated exp(-jkr) for r in [r_min, r_max]."""
    return _interp_scalar(ev, KernelKind.PLAIN_EXP, r, LINEAR)


def eval_green(ev, r):
    """Lagrange-interpolated exp(-jkr)/r for r in [r_min, r_max]."""
    return _interp_scalar(ev, KernelKind.GREEN_OVER_R, r, LAGRANGE)


def eval_kernel(ev, kind, r, method=None):
    """Evaluate one kernel value, falling back to the closed form below r_min."""
    kind = KernelKind(kind)
    r = float(r)
    if not math.isfinite(r) or r < 0:
        raise InvalidInputError(f"radius must be finite and >= 0, got {r!r}")
    if r == 0 and kind is KernelKind.GREEN_OVER_R:
        raise SingularityError("exp(-jkr)/r is singular at r = 0")
    if r < ev.r_min:
        vr, vi = analytic_components(int(kind), ev.k, r)
        ev.add_fallbacks(1)
        return complex(vr, vi)
    return _interp_scalar(ev, kind, r, method)


def eval_batch(ev, kind, radii, method=None):
    """Vectorised :func:`eval_kernel`; returns a complex128 array.

    The first invalid radius aborts the whole batch and is reported by
    index; no fallbacks are counted for an aborted batch.
    """
    kind = KernelKind(kind)
    xs = np.ascontiguousarray(radii, dtype=np.float64)
    if xs.ndim != 1:
        xs = xs.ravel()
    out_re = np.empty(xs.size)
    out_im = np.empty(xs.size)
    point, *args = ev.kernel_args(kind, method)
    status, index, fallbacks = _eval_batch(point, int(kind), ev.k, *args, xs, out_re, out_im)
    if status == _BAD_RADIUS:
        raise InvalidInputError(f"radius at index {index} is invalid: {xs[index]!r}")
    if status == _SINGULAR:
        raise SingularityError(f"radius at index {index} is 0; exp(-jkr)/r is singular there")
    if status == _ABOVE_RANGE:
        raise OutOfRangeError(f"radius at index {index} ({xs[index]!r}) exceeds r_max={ev.r_max!r}")
    ev.add_fallbacks(fallbacks)
    out = np.empty(xs.size, dtype=np.complex128)
    out.real = out_re
    out.imag = out_im
    return out
