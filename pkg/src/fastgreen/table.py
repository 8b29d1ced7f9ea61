"""Kernel value tables and the constant-time radius -> sample index map."""

import math
import struct
from dataclasses import dataclass

import numba
import numpy as np

from .errors import InvalidInputError, OutOfRangeError, SingularityError
from .kernels import KernelKind, analytic_components

TABLE_MAGIC = b"GKTB"
TABLE_VERSION = 1
_HEADER = struct.Struct("<4sIIdB")
_RECORD = np.dtype([("r", "<f8"), ("re", "<f8"), ("im", "<f8")])


@dataclass(frozen=True, eq=False)
class KernelTable:
    kind: KernelKind
    k: float
    plan: object
    re: np.ndarray
    im: np.ndarray

    def __len__(self):
        return self.re.size

    @property
    def values(self):
        return self.re + 1j * self.im


@dataclass(frozen=True, eq=False)
class HashIndex:
    """Dense bucket array; bucket ``b`` covers [r_min + b*dr, r_min + (b+1)*dr).

    ``buckets[b]`` holds the index of the greatest abscissa lying at or
    below the bucket's left edge.

    Lookups go through a second bucketing (``base``, ``split``, ``scale``)
    defined by the floating-point map ``b(x) = int((x - r_min) * scale)``
    itself.  Its buckets are slightly narrower than the smallest gap, so
    each holds at most one abscissa: ``split[b]`` is that abscissa (inf if
    none) and ``base[b]`` is the index of the last abscissa in an earlier
    bucket.  Because ``b(x)`` is monotone in ``x``, the bracketing index is
    ``base[b] + (x >= split[b])`` with no edge correction.
    """

    r_min: float
    dr_min: float
    buckets: np.ndarray
    base: np.ndarray
    split: np.ndarray
    scale: float

    def __len__(self):
        return self.buckets.size

    def bucket_of(self, r):
        return _floor_snapped((r - self.r_min) / self.dr_min)

    def lookup_args(self):
        """Positional arguments of the compiled lookup after ``r``."""
        return self.base, self.split, self.scale


@numba.njit(cache=True, nogil=True, error_model="numpy")
def _fill_values(kind, k, r, re, im):
    for i in range(r.size):
        re[i], im[i] = analytic_components(kind, k, r[i])


def build_table(plan, kind, k):
    kind = KernelKind(kind)
    if not (math.isfinite(k) and k > 0):
        raise InvalidInputError(f"k must be > 0, got {k!r}")
    r = plan.abscissae
    if kind is KernelKind.GREEN_OVER_R and r[0] <= 0:
        raise SingularityError("cannot tabulate exp(-jkr)/r from r_min = 0")
    re = np.empty(r.size)
    im = np.empty(r.size)
    _fill_values(int(kind), float(k), r, re, im)
    re.setflags(write=False)
    im.setflags(write=False)
    return KernelTable(kind=kind, k=float(k), plan=plan, re=re, im=im)


# bucket quotients this close (relative) to an integer count as that
# integer, so decimal radii such as 0.0011 = 0.0001 + 2 * 0.0005 land on
# the edge they sit on in exact arithmetic
_SNAP = 1e-9


@numba.njit(cache=True, nogil=True, error_model="numpy")
def _snapped(q):
    n = math.floor(q + 0.5)
    return n, abs(q - n) <= _SNAP * max(1.0, abs(q))


@numba.njit(cache=True, nogil=True, error_model="numpy")
def _ceil_snapped(q):
    n, on_edge = _snapped(q)
    return int(n) if on_edge else int(math.ceil(q))


def _floor_snapped(q):
    n, on_edge = _snapped(q)
    return int(n) if on_edge else int(math.floor(q))


def n_buckets(r_min, r_max, dr_min):
    return _ceil_snapped((r_max - r_min) / dr_min) + 1


@numba.njit(cache=True, nogil=True, error_model="numpy")
def _two_pass_fill(r, r_min, dr, buckets):
    nb = buckets.size
    buckets[:] = -1
    # pass 1: each sample claims the first bucket whose left edge is at or
    # above it; a later sample wins a shared bucket
    for j in range(r.size):
        b = _ceil_snapped((r[j] - r_min) / dr)
        if 0 <= b < nb:
            buckets[b] = j
    # pass 2: empty buckets inherit from the previous one
    prev = 0
    for b in range(nb):
        if buckets[b] < 0:
            buckets[b] = prev
        else:
            prev = buckets[b]


@numba.njit(cache=True, nogil=True, error_model="numpy")
def _lookup_arrays(r, scale, base, split):
    """Fill base/split; False if two abscissae share a bucket."""
    r0 = r[0]
    prev = -1
    for i in range(r.size):
        b = int((r[i] - r0) * scale)
        if b <= prev:
            return False
        for bb in range(prev + 1, b + 1):
            base[bb] = i - 1
        split[b] = r[i]
        prev = b
    return True


def _build_lookup(r, dr):
    margin = 1e-9
    while margin < 1e-3:
        scale = 1.0 / (dr * (1.0 - margin))
        nb = int((r[-1] - r[0]) * scale) + 1
        base = np.empty(nb, dtype=np.int32)
        split = np.full(nb, np.inf)
        if _lookup_arrays(r, scale, base, split):
            return base, split, scale
        margin *= 16
    raise InvalidInputError("abscissae too dense for the hash lookup")


def build_hash(plan):
    r = plan.abscissae
    dr = plan.dr_min
    buckets = np.empty(n_buckets(r[0], r[-1], dr), dtype=np.int32)
    _two_pass_fill(r, float(r[0]), float(dr), buckets)
    base, split, scale = _build_lookup(r, float(dr))
    for a in (buckets, base, split):
        a.setflags(write=False)
    return HashIndex(r_min=float(r[0]), dr_min=float(dr), buckets=buckets, base=base, split=split, scale=scale)


@numba.njit(cache=True, nogil=True, error_model="numpy")
def locate_index(r, base, split, scale, x):
    """Index j with r[j] <= x < r[j+1] (j = len-2 at x = r_max).

    ``x`` must lie in [r[0], r[-1]]; nothing is bounds-checked here.
    """
    b = int((x - r[0]) * scale)
    return min(base[b] + (x >= split[b]), r.size - 2)


def locate(hash_index, plan, r):
    r_lo, r_hi = plan.abscissae[0], plan.abscissae[-1]
    if not r_lo <= r <= r_hi:
        raise OutOfRangeError(f"r={r!r} outside table range [{r_lo!r}, {r_hi!r}]")
    return int(locate_index(plan.abscissae, *hash_index.lookup_args(), float(r)))


@numba.njit(cache=True, nogil=True, error_model="numpy")
def locate_many(r, base, split, scale, xs, out):
    for i in range(xs.size):
        out[i] = locate_index(r, base, split, scale, xs[i])


def write_table_dump(table, fh):
    """Write the little-endian binary table dump.

    Layout: magic ``GKTB``, u32 version, u32 count, f64 k, u8 kind, then
    ``count`` records of (f64 r, f64 re, f64 im).
    """
    r = table.plan.abscissae
    fh.write(_HEADER.pack(TABLE_MAGIC, TABLE_VERSION, r.size, table.k, int(table.kind)))
    rec = np.empty(r.size, dtype=_RECORD)
    rec["r"], rec["re"], rec["im"] = r, table.re, table.im
    fh.write(rec.tobytes())


def read_table_dump(fh):
    """Inverse of :func:`write_table_dump`; returns (kind, k, r, values)."""
    head = fh.read(_HEADER.size)
    if len(head) != _HEADER.size:
        raise InvalidInputError("truncated table header")
    magic, version, count, k, kind = _HEADER.unpack(head)
    if magic != TABLE_MAGIC:
        raise InvalidInputError(f"bad magic {magic!r}")
    if version != TABLE_VERSION:
        raise InvalidInputError(f"unsupported table version {version}")
    body = fh.read(count * _RECORD.itemsize)
    if len(body) != count * _RECORD.itemsize:
        raise InvalidInputError("truncated table body")
    rec = np.frombuffer(body, dtype=_RECORD)
    return KernelKind(kind), k, rec["r"].copy(), rec["re"] + 1j * rec["im"]
