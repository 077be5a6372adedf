"""
Walking through one join by hand
================================

Two tiny streams, one ``>`` predicate, and every intermediate stage of the
filtering pipeline printed along the way.
"""

# %%
import numpy as np

from prefap import Config, Stream, ThetaOp, prefap_join, oracle_join
from prefap.joiner import kept_pairs
from prefap.partitioner import amalgamate, assign, boundary_of, repartition_oversized
from prefap.prefilter import prefilter_pair

r = Stream("R", np.arange(10.0))
s = Stream("S", np.arange(13.0))
op = ThetaOp.GT

# %% [markdown]
# Under ``r > s`` an R element no larger than min(S) cannot match anything,
# and neither can an S element no smaller than max(R). Both thresholds come
# from the unfiltered inputs.

# %%
rf, sf = prefilter_pair(op, r, s)
print("R kept:", rf.values.tolist())
print("S kept:", sf.values.tolist())

# %%
# each side gets its own equal-width boundary; the union of the cuts is shared
br, bs = boundary_of(rf, 3), boundary_of(sf, 3)
shared = amalgamate(br, bs)
for name, b in (("R", br), ("S", bs), ("shared", shared)):
    print(f"{name:>6}:", ", ".join(str(iv) for iv in b.intervals()))

# %%
# both streams are split on the shared boundary, then oversized parts are re-split
w = 10
pr = repartition_oversized(assign(rf, shared), w)
ps = repartition_oversized(assign(sf, shared), w)
print("R partition sizes:", pr.sizes())
print("S partition sizes:", ps.sizes())

# %%
# only the partition pairs whose extremes allow a match are evaluated
pairs = kept_pairs(op, pr.partitions, ps.partitions)
print(f"{len(pairs)} of {len(pr.partitions) * len(ps.partitions)} partition pairs kept")

# %%
res, m = prefap_join(r, s, Config(theta=(op,), partitions=3, window=w, workers=2))
want, full = oracle_join(op, r, s)
print(f"results {m.result_count} (oracle {len(want)}), pairs evaluated {m.cartesian_count} of {full}")
assert sorted(res.id_tuples()) == sorted(want)
