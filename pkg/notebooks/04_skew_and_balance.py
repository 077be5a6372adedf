"""
Skewed inputs and worker balance
================================

A heavy Zipf head piles most elements into the first equal-width partition.
Re-splitting oversized partitions evens out the work handed to each worker.
"""

# %%
import numpy as np

from prefap import Config, DistSpec, ThetaOp, generate, join
from prefap.bench import stream_seed
from prefap.partitioner import assign, boundary_of, repartition_oversized

r = generate(DistSpec("zipf", (1.2,), stream_seed(0, 0), 1000), "R")
s = generate(DistSpec("zipf", (1.2,), stream_seed(0, 1), 1000), "S")

# %%
plan = assign(r, boundary_of(r, 10))
print("equal-width sizes: ", plan.sizes())
print("after re-splitting:", repartition_oversized(plan, 1000).sizes())

# %% [markdown]
# A partition holding one repeated value cannot be split by value, so the
# largest piece can still exceed the average.

# %%
cfg = Config(theta=(ThetaOp.GT,), workers=4)
for label, c in (("re-partitioning", cfg), ("none", Config(theta=(ThetaOp.GT,), workers=4, disable_repartition=True))):
    lb = [join(*[generate(DistSpec("zipf", (1.2,), stream_seed(k, j), 1000), "RS"[j]) for j in range(2)], c)[1].lb_in for k in range(10)]
    print(f"{label:<16} mean lb_in {np.mean(lb):.3f}")
