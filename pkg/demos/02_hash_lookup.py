# %% [markdown]
# # Constant-time lookup on a non-uniform grid
#
# The hash divides [r_min, r_max] into buckets of the smallest gap and stores,
# per bucket, the last sample at or below its left edge.  Because no bucket
# holds more than one sample boundary, a lookup is one multiply, one table
# read and one comparison.

# %%
import time

import numpy as np

from fastgreen import Medium, SamplingConfig, build_hash, build_plan
from fastgreen.table import locate_many

plan = build_plan(SamplingConfig(1e-4, 1.0, samples_per_wavelength=10_000), Medium())
h = build_hash(plan)
r = plan.abscissae
print(f"{len(r)} samples, {len(h)} buckets of width {h.dr_min:.3e} m")

# %%
xs = np.random.default_rng(0).uniform(r[0], r[-1], 2_000_000)
out = np.empty(xs.size, dtype=np.int64)
locate_many(r, *h.lookup_args(), xs[:8], out[:8])

t0 = time.perf_counter()
locate_many(r, *h.lookup_args(), xs, out)
t_hash = time.perf_counter() - t0

t0 = time.perf_counter()
ref = np.minimum(np.searchsorted(r, xs, side="right") - 1, r.size - 2)
t_bisect = time.perf_counter() - t0

print(f"hash lookup   {t_hash * 1e9 / xs.size:6.1f} ns/point")
print(f"binary search {t_bisect * 1e9 / xs.size:6.1f} ns/point")
print("agreement:", bool(np.array_equal(out, ref)))
