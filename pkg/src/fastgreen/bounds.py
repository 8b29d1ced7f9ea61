"""Interpolation error bounds and empirical error sweeps."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, OutOfRangeError, SingularityError
from .interp import LAGRANGE, LINEAR, KernelEvaluator, eval_batch, stencil_start
from .kernels import KernelKind, analytic_batch
from .table import locate_many

UNIT_ROUNDOFF = 2.0**-53


def derivative_bound(kind, k, r_low, order):
    """Upper bound on |d^m f / dr^m| over [r_low, inf).

    For exp(-jkr) this is exactly k**m.  For exp(-jkr)/r the Leibniz
    expansion of exp(-jkr) * r**-1 gives, by the triangle inequality,
    sum_p C(m, p) k**p (m-p)! / r_low**(m-p+1), which decreases in r_low.
    """
    kind = KernelKind(kind)
    m = int(order)
    if m < 0:
        raise InvalidInputError("derivative order must be >= 0")
    if kind is KernelKind.PLAIN_EXP:
        return float(k) ** m
    if not r_low > 0:
        raise SingularityError("derivative bound of exp(-jkr)/r needs r_low > 0")
    return sum(
        math.comb(m, p) * k**p * math.factorial(m - p) / r_low ** (m - p + 1)
        for p in range(m + 1)
    )


def _derivative_bound_array(kind, k, r_low, m):
    if kind is KernelKind.PLAIN_EXP:
        return np.full(np.shape(r_low), float(k) ** m)
    r_low = np.asarray(r_low, dtype=np.float64)
    total = np.zeros_like(r_low)
    for p in range(m + 1):
        total += math.comb(m, p) * k**p * math.factorial(m - p) / r_low ** (m - p + 1)
    return total


def linear_bound(h, kind, k, r_low):
    """Two-point interpolation bound h**2 * max|f''| / 8 on an interval of width h."""
    if not h > 0:
        raise InvalidInputError("interval width must be > 0")
    return h * h * derivative_bound(kind, k, r_low, 2) / 8.0


def lagrange_bound(stencil, r, kind, k):
    """prod |r - r_j| * max|f^(n+1)| / (n+1)! for an (n+1)-node stencil."""
    nodes = np.asarray(stencil, dtype=np.float64)
    if nodes.ndim != 1 or nodes.size < 2 or np.any(np.diff(nodes) <= 0):
        raise InvalidInputError("stencil must be strictly increasing with >= 2 nodes")
    if not nodes[0] <= r <= nodes[-1]:
        raise OutOfRangeError(f"r={r!r} lies outside the stencil hull [{nodes[0]!r}, {nodes[-1]!r}]")
    n = nodes.size - 1
    omega = float(np.prod(np.abs(r - nodes)))
    return omega * derivative_bound(kind, k, nodes[0], n + 1) / math.factorial(n + 1)


@dataclass(frozen=True)
class ErrorBound:
    kind: KernelKind
    method: str
    interval: tuple
    bound_abs: float
    derivative_order: int

    def __post_init__(self):
        if not self.bound_abs >= 0:
            raise InvalidInputError("bound must be non-negative")
        if not self.interval[0] < self.interval[1]:
            raise InvalidInputError("bound interval must satisfy a < b")


def local_bound(ev, kind, r, method=None):
    """The analytic bound for the stencil the evaluator uses at radius r."""
    kind = KernelKind(kind)
    method = KernelEvaluator.default_method(kind) if method is None else method
    rr = ev.plan.abscissae
    if not rr[0] <= r <= rr[-1]:
        raise OutOfRangeError(f"r={r!r} outside table range")
    j = _locate(ev, np.array([float(r)]))[0]
    if method == LINEAR:
        a, b = rr[j], rr[j + 1]
        return ErrorBound(kind, LINEAR, (a, b), linear_bound(b - a, kind, ev.k, a), 2)
    d = ev.lagrange_degree
    s = stencil_start(j, rr.size, d)
    nodes = rr[s : s + d + 1]
    return ErrorBound(kind, f"{LAGRANGE}{d}", (nodes[0], nodes[-1]), lagrange_bound(nodes, r, kind, ev.k), d + 1)


def _locate(ev, xs):
    out = np.empty(xs.size, dtype=np.int64)
    locate_many(ev.plan.abscissae, *ev.hash.lookup_args(), xs, out)
    return out


def probe_bounds(ev, kind, probes, method=None):
    """Per-probe analytic bound and floating-point rounding allowance.

    Returns ``(bound, allowance)``.  ``bound`` is the exact-arithmetic
    interpolation bound of the stencil covering each probe.  ``allowance``
    is a first-order bound on the rounding committed by the table values,
    the interpolation weights and sum, and the closed-form reference:

        u * [(4d + k r_max + 3) * sum_j |P_j f_j| + (k r + 3) * |f(r)|]

    with d the number of non-trivial weight factors per node.
    """
    kind = KernelKind(kind)
    method = KernelEvaluator.default_method(kind) if method is None else method
    xs = np.ascontiguousarray(probes, dtype=np.float64)
    rr = ev.plan.abscissae
    if xs.size and (xs.min() < rr[0] or xs.max() > rr[-1]):
        raise OutOfRangeError("probes must lie inside the table range")
    tab = ev.table(kind)
    vals = np.abs(tab.re + 1j * tab.im)
    j = _locate(ev, xs)

    if method == LINEAR:
        d = 1
        start = j
    elif method == LAGRANGE:
        d = ev.lagrange_degree
        start = np.clip(j - (d - 1) // 2, 0, rr.size - d - 1)
    else:
        raise InvalidInputError(f"unknown interpolation method {method!r}")
    cols = start[:, None] + np.arange(d + 1)
    nodes = rr[cols]
    if method == LINEAR:
        h = nodes[:, 1] - nodes[:, 0]
        bound = h * h * _derivative_bound_array(kind, ev.k, nodes[:, 0], 2) / 8.0
    else:
        omega = np.prod(np.abs(xs[:, None] - nodes), axis=1)
        bound = omega * _derivative_bound_array(kind, ev.k, nodes[:, 0], d + 1) / math.factorial(d + 1)

    # |P_j| for every node of the stencil
    den = nodes[:, :, None] - nodes[:, None, :]
    num = np.broadcast_to((xs[:, None] - nodes)[:, None, :], den.shape).copy()
    eye = np.eye(d + 1, dtype=bool)
    num[:, eye] = 1.0
    den[:, eye] = 1.0
    weights = np.abs(np.prod(num / den, axis=2))
    weighted = np.sum(weights * vals[cols], axis=1)
    f_abs = 1.0 / xs if kind is KernelKind.GREEN_OVER_R else np.ones_like(xs)
    allowance = UNIT_ROUNDOFF * (
        (4 * d + ev.k * rr[-1] + 3) * weighted + (ev.k * xs + 3) * f_abs
    )
    return bound, allowance


@dataclass
class ErrorSweepReport:
    """Maximum interpolation errors over a set of probes.

    Relative errors are per component, ``|f - f_i| / |f|``.  Probes where a
    component of the reference is exactly zero contribute to
    ``zero_abs_error_re``/``zero_abs_error_im`` instead.
    """

    kind: KernelKind
    method: str
    probe_count: int
    max_rel_error_re: float
    max_rel_error_im: float
    max_abs_error: float
    worst_probe_r: float
    zero_abs_error_re: float = 0.0
    zero_abs_error_im: float = 0.0
    exact_probes: int = 0
    histogram: dict = field(default_factory=dict)

    def merge(self, other):
        """Combine two reports over disjoint probe sets; order-independent."""
        if (self.kind, self.method) != (other.kind, other.method):
            raise InvalidInputError("cannot merge reports for different kernels or methods")
        mine = max(self.max_rel_error_re, self.max_rel_error_im)
        theirs = max(other.max_rel_error_re, other.max_rel_error_im)
        if mine > theirs:
            worst = self.worst_probe_r
        elif theirs > mine:
            worst = other.worst_probe_r
        else:
            worst = min(self.worst_probe_r, other.worst_probe_r)
        hist = dict(self.histogram)
        for key, count in other.histogram.items():
            hist[key] = hist.get(key, 0) + count
        return ErrorSweepReport(
            kind=self.kind,
            method=self.method,
            probe_count=self.probe_count + other.probe_count,
            max_rel_error_re=max(self.max_rel_error_re, other.max_rel_error_re),
            max_rel_error_im=max(self.max_rel_error_im, other.max_rel_error_im),
            max_abs_error=max(self.max_abs_error, other.max_abs_error),
            worst_probe_r=worst,
            zero_abs_error_re=max(self.zero_abs_error_re, other.zero_abs_error_re),
            zero_abs_error_im=max(self.zero_abs_error_im, other.zero_abs_error_im),
            exact_probes=self.exact_probes + other.exact_probes,
            histogram=dict(sorted(hist.items())),
        )


def sweep_probes(ev, probe_count):
    if probe_count < 1:
        raise InvalidInputError("probe_count must be >= 1")
    if probe_count == 1:
        return np.array([ev.r_min])
    return np.linspace(ev.r_min, ev.r_max, int(probe_count))


def _component_rel(err, ref):
    zero = ref == 0
    rel = np.zeros_like(err)
    np.divide(err, np.abs(ref), out=rel, where=~zero)
    zero_abs = float(err[zero].max()) if zero.any() else 0.0
    return rel, zero_abs


def sweep_report(kind, method, probes, approx, exact):
    """Build an :class:`ErrorSweepReport` from interpolated and reference values."""
    err_re = np.abs(approx.real - exact.real)
    err_im = np.abs(approx.imag - exact.imag)
    rel_re, zero_re = _component_rel(err_re, exact.real)
    rel_im, zero_im = _component_rel(err_im, exact.imag)
    worst = np.maximum(rel_re, rel_im)
    i = int(np.argmax(worst))
    exact_mask = worst == 0
    decades = np.floor(np.log10(worst[~exact_mask])).astype(np.int64)
    keys, counts = np.unique(decades, return_counts=True)
    return ErrorSweepReport(
        kind=KernelKind(kind),
        method=method,
        probe_count=int(probes.size),
        max_rel_error_re=float(rel_re.max()),
        max_rel_error_im=float(rel_im.max()),
        max_abs_error=float(np.abs(approx - exact).max()),
        worst_probe_r=float(probes[i]),
        zero_abs_error_re=zero_re,
        zero_abs_error_im=zero_im,
        exact_probes=int(exact_mask.sum()),
        histogram={int(a): int(b) for a, b in zip(keys, counts)},
    )


def error_sweep(ev, kind, probe_count, method=None, probes=None):
    """Compare interpolated values against the closed form on a uniform probe grid.

    The grid has ``probe_count`` points including both ends of the table
    range.  ``probes`` may be given instead to sweep an explicit set.
    """
    kind = KernelKind(kind)
    method = KernelEvaluator.default_method(kind) if method is None else method
    xs = sweep_probes(ev, probe_count) if probes is None else np.asarray(probes, dtype=np.float64)
    approx = eval_batch(ev, kind, xs, method=method)
    exact = analytic_batch(kind, ev.k, xs)
    label = method if method == LINEAR else f"{LAGRANGE}{ev.lagrange_degree}"
    return sweep_report(kind, label, xs, approx, exact)


SWEEP_CSV_HEADER = ["kernel", "method", "probes", "max_rel_re", "max_rel_im", "max_abs", "worst_r"]


def write_sweep_csv(reports, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for rep in reports:
        writer.writerow(
            [
                rep.kind.label,
                rep.method,
                rep.probe_count,
                f"{rep.max_rel_error_re:.6e}",
                f"{rep.max_rel_error_im:.6e}",
                f"{rep.max_abs_error:.6e}",
                f"{rep.worst_probe_r:.17g}",
            ]
        )
