"""Adaptive one-dimensional sampling of the radial kernel domain.

A plan starts from a uniform grid of spacing ``t`` and adds denser samples
in windows around every radius where the real or imaginary part of
exp(-jkr) vanishes.  The zero crossings themselves are sampled exactly, and
any neighbour that would crowd a zero is dropped so that the minimum gap
(and with it the hash array size) stays bounded.
"""

import csv
import math
import numbers
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, SamplingDensityWarning
from .kernels import Medium, wavenumber

RECOMMENDED_DENSITY = (1_000, 10_000)

# relative slack when comparing a floating-point gap against t
_GAP_SLACK = 1e-9


@dataclass(frozen=True)
class SamplingConfig:
    r_min: float
    r_max: float
    samples_per_wavelength: float = 1000
    refine_interval_divisor: int = 2
    refine_halfwidth_in_t: float = 2.0
    dedup_fraction: float = 0.5
    refine: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.r_min) and math.isfinite(self.r_max)):
            raise InvalidInputError("r_min and r_max must be finite")
        if not 0 < self.r_min < self.r_max:
            raise InvalidInputError(
                f"need 0 < r_min < r_max, got r_min={self.r_min!r}, r_max={self.r_max!r}"
            )
        if not (isinstance(self.samples_per_wavelength, numbers.Real) and self.samples_per_wavelength >= 2):
            raise InvalidInputError("samples_per_wavelength must be >= 2")
        div = self.refine_interval_divisor
        if not (isinstance(div, numbers.Integral) and div >= 1):
            raise InvalidInputError("refine_interval_divisor must be a positive integer")
        if not self.refine_halfwidth_in_t > 0:
            raise InvalidInputError("refine_halfwidth_in_t must be > 0")
        if not 0 < self.dedup_fraction <= 1:
            raise InvalidInputError("dedup_fraction must lie in (0, 1]")
        # a dropped neighbour of a zero must not open a gap wider than t
        if self.refine and div < 1 + self.dedup_fraction:
            raise InvalidInputError(
                "refine_interval_divisor must be >= 1 + dedup_fraction when refinement is on"
            )


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    """Sorted sample radii shared by every table built for one wavenumber.

    Attributes
    ----------
    abscissae : ndarray
        Strictly increasing radii; first is ``r_min`` and last is ``r_max``.
    t : float
        Base (coarsest) interval.
    dr_min : float
        Smallest gap between consecutive abscissae.
    zero_locations : ndarray
        Zero crossings of exp(-jkr) that were inserted as exact samples.
    k : float
        Wavenumber the zero crossings were computed for.
    refined_interval : float
        Spacing used inside refinement windows (equals ``t`` when
        refinement is off).
    """

    abscissae: np.ndarray
    t: float
    dr_min: float
    zero_locations: np.ndarray
    k: float
    refined_interval: float
    config: SamplingConfig = field(repr=False, default=None)

    @property
    def r_min(self):
        return float(self.abscissae[0])

    @property
    def r_max(self):
        return float(self.abscissae[-1])

    def __len__(self):
        return len(self.abscissae)

    def gaps(self):
        return np.diff(self.abscissae)

    def validate(self):
        """Raise InvalidInputError if any plan invariant is broken."""
        r = self.abscissae
        if r.ndim != 1 or r.size < 2:
            raise InvalidInputError("plan needs at least two abscissae")
        gaps = np.diff(r)
        if not np.all(gaps > 0):
            raise InvalidInputError("abscissae are not strictly increasing")
        if gaps.min() != self.dr_min or self.dr_min <= 0:
            raise InvalidInputError("dr_min does not equal the smallest gap")
        if gaps.max() > self.t * (1 + _GAP_SLACK):
            raise InvalidInputError(f"gap {gaps.max()!r} exceeds base interval {self.t!r}")
        pos = np.searchsorted(r, self.zero_locations)
        if np.any(pos >= r.size) or np.any(r[np.minimum(pos, r.size - 1)] != self.zero_locations):
            raise InvalidInputError("a zero location is missing from the abscissae")


def base_interval(medium, samples_per_wavelength):
    """Uniform sampling interval t = lambda0 / (S * sqrt(eps_r * mu_r))."""
    s = samples_per_wavelength
    if not (isinstance(s, numbers.Real) and math.isfinite(s) and s >= 2):
        raise InvalidInputError(f"samples_per_wavelength must be >= 2, got {s!r}")
    lo, hi = RECOMMENDED_DENSITY
    if not lo <= s <= hi:
        warnings.warn(
            f"{s} samples per wavelength is outside the recommended range [{lo}, {hi}]",
            SamplingDensityWarning,
            stacklevel=2,
        )
    return medium.lambda0 / (s * medium.refractive_index)


def zero_crossings(k, r_min, r_max):
    """Radii n*pi/(2k), n >= 1, that fall inside [r_min, r_max].

    At odd n the real part cos(kr) vanishes, at even n the imaginary part
    sin(kr) does.  The 1/r factor never vanishes, so both kernels share
    these locations.
    """
    if not (math.isfinite(k) and k > 0):
        raise InvalidInputError(f"k must be > 0, got {k!r}")
    if not 0 < r_min < r_max:
        raise InvalidInputError("need 0 < r_min < r_max")
    quarter = math.pi / (2.0 * k)
    first = max(1, math.floor(r_min / quarter) - 1)
    last = math.ceil(r_max / quarter) + 1
    z = np.arange(first, last + 1, dtype=np.float64) * quarter
    return z[(z >= r_min) & (z <= r_max)]


def _split_wide_gaps(r, t):
    # a dropped lattice point next to r_max, or next to a zero that a narrow
    # refinement window does not cover, leaves a gap wider than t.  Equal
    # pieces of such a gap are longer than t/2, which is never below the
    # dedup guard.
    gaps = np.diff(r)
    wide = np.flatnonzero(gaps > t * (1 + _GAP_SLACK))
    if wide.size == 0:
        return r
    extra = []
    for i in wide:
        pieces = int(math.ceil(gaps[i] / t))
        extra.append(r[i] + gaps[i] * np.arange(1, pieces) / pieces)
    return np.sort(np.concatenate([r, *extra]))


def build_plan(config, medium):
    if not isinstance(medium, Medium):
        raise InvalidInputError("build_plan expects a Medium")
    k = wavenumber(medium)
    t = base_interval(medium, config.samples_per_wavelength)
    r_min, r_max = float(config.r_min), float(config.r_max)
    if r_max - r_min < 2 * t:
        raise InvalidInputError(
            f"range [{r_min}, {r_max}] is too small for two base intervals of {t}"
        )

    div = config.refine_interval_divisor if config.refine else 1
    h = t / div
    # samples closer than this to a zero (or to r_max) are dropped
    guard = config.dedup_fraction * t / config.refine_interval_divisor

    n_lattice = int(math.floor((r_max - r_min) / h)) + 1
    keep = np.zeros(n_lattice, dtype=bool)
    keep[::div] = True

    zeros = np.empty(0)
    if config.refine:
        zeros = zero_crossings(k, r_min, r_max)
        reach = config.refine_halfwidth_in_t * t
        lo = np.ceil((zeros - reach - r_min) / h).astype(np.int64)
        hi = np.floor((zeros + reach - r_min) / h).astype(np.int64)
        lo = np.clip(lo, 0, n_lattice)
        hi = np.clip(hi, -1, n_lattice - 1)
        # overlapping windows merge naturally in the mask
        for a, b in zip(lo, hi):
            keep[a : b + 1] = True
        ok = ((zeros == r_min) | (zeros - r_min >= guard)) & (
            (zeros == r_max) | (r_max - zeros >= guard)
        )
        zeros = zeros[ok]

    r = r_min + np.flatnonzero(keep) * h
    r = r[r_max - r >= guard]
    if zeros.size:
        pos = np.searchsorted(zeros, r)
        left = np.abs(r - zeros[np.maximum(pos - 1, 0)])
        right = np.abs(zeros[np.minimum(pos, zeros.size - 1)] - r)
        r = r[np.minimum(left, right) >= guard]

    r = np.unique(np.concatenate([r, zeros, [r_min, r_max]]))

    r = _split_wide_gaps(r, t)

    r.setflags(write=False)
    zeros = np.ascontiguousarray(zeros)
    zeros.setflags(write=False)
    plan = SamplingPlan(
        abscissae=r,
        t=t,
        dr_min=float(np.diff(r).min()),
        zero_locations=zeros,
        k=k,
        refined_interval=h,
        config=config,
    )
    plan.validate()
    return plan


def write_plan_csv(plan, fh):
    """Dump a plan as ``index,r,is_zero,gap_to_next`` rows.

    Radii and gaps use 17 significant digits so they round-trip exactly.
    """
    zero_set = set(plan.zero_locations.tolist())
    r = plan.abscissae
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["index", "r", "is_zero", "gap_to_next"])
    for i, ri in enumerate(r.tolist()):
        gap = "" if i == r.size - 1 else f"{r[i + 1] - ri:.17g}"
        writer.writerow([i, f"{ri:.17g}", int(ri in zero_set), gap])
