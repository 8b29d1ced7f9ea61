"""Exact free-space Helmholtz kernels exp(-jkr) and exp(-jkr)/r.

These closed forms are both the source of every interpolation table and
the reference that interpolated values are checked against.
"""

import enum
import math
import numbers
from dataclasses import dataclass

import numba
import numpy as np

from .errors import InvalidInputError, SingularityError


class KernelKind(enum.IntEnum):
    PLAIN_EXP = 0  # exp(-jkr)
    GREEN_OVER_R = 1  # exp(-jkr)/r

    @property
    def label(self):
        return "exp" if self is KernelKind.PLAIN_EXP else "green"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "_")
        aliases = {
            "exp": cls.PLAIN_EXP,
            "plain_exp": cls.PLAIN_EXP,
            "plainexp": cls.PLAIN_EXP,
            "green": cls.GREEN_OVER_R,
            "green_over_r": cls.GREEN_OVER_R,
            "greenoverr": cls.GREEN_OVER_R,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidInputError(f"unknown kernel kind {value!r}") from None


@dataclass(frozen=True)
class Medium:
    """Homogeneous lossless medium.

    Attributes
    ----------
    lambda0 : float
        Free-space wavelength in meters.
    eps_r, mu_r : float
        Relative permittivity and permeability (real).
    """

    lambda0: float = 1.0
    eps_r: float = 1.0
    mu_r: float = 1.0

    def __post_init__(self):
        for name in ("lambda0", "eps_r", "mu_r"):
            value = getattr(self, name)
            if not (isinstance(value, numbers.Real) and math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def refractive_index(self):
        return math.sqrt(self.eps_r * self.mu_r)


def wavenumber(medium):
    """k = 2*pi*sqrt(eps_r*mu_r)/lambda0 in 1/m."""
    if not isinstance(medium, Medium):
        raise InvalidInputError("wavenumber expects a Medium")
    return 2.0 * math.pi * medium.refractive_index / medium.lambda0


def eval_analytic(kind, k, r):
    """Evaluate the kernel in closed form and return a Python complex.

    The 1/r kernel is the plain exponential scaled componentwise, so
    ``eval_analytic(GREEN_OVER_R, k, r) == complex(c / r, s / r)`` where
    ``(c, s)`` are the components of ``eval_analytic(PLAIN_EXP, k, r)``.
    """
    kind = KernelKind(kind)
    if not (math.isfinite(k) and k >= 0):
        raise InvalidInputError(f"wavenumber must be finite and >= 0, got {k!r}")
    if not math.isfinite(r) or r < 0:
        raise InvalidInputError(f"radius must be finite and >= 0, got {r!r}")
    if kind is KernelKind.GREEN_OVER_R and r == 0:
        raise SingularityError("exp(-jkr)/r is singular at r = 0")
    re, im = analytic_components(int(kind), k, r)
    return complex(re, im)


@numba.njit(cache=True, nogil=True, error_model="numpy")
def analytic_components(kind, k, r):
    # shared by the Python API, the table builder and the fill kernels so
    # that every path produces bit-identical values
    kr = k * r
    re = math.cos(kr)
    im = -math.sin(kr)
    if kind == 1:
        re = re / r
        im = im / r
    return re, im


@numba.njit(cache=True, nogil=True, error_model="numpy")
def _analytic_into(kind, k, r, out_re, out_im):
    for i in range(r.size):
        out_re[i], out_im[i] = analytic_components(kind, k, r[i])


def analytic_batch(kind, k, radii):
    """Closed-form values over an array of radii, bit-identical to :func:`eval_analytic`.

    No domain checks beyond those of the scalar routine are repeated here:
    radii must be finite, non-negative, and non-zero for the 1/r kernel.
    """
    r = np.ascontiguousarray(radii, dtype=np.float64).ravel()
    out_re = np.empty(r.size)
    out_im = np.empty(r.size)
    _analytic_into(int(KernelKind(kind)), float(k), r, out_re, out_im)
    out = np.empty(r.size, dtype=np.complex128)
    out.real = out_re
    out.imag = out_im
    return out
