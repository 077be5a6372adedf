"""Baseline theta-join algorithms sharing the joiner's execution path.

RBM
    Sort, cut each stream at sampled sorted positions, join every range pair.
OBT
    Sort, cut each stream into equal-count chunks, place chunk pairs on
    workers at random.
CFS
    Range-partition each stream on its own extremes, drop partitions that
    cannot join with the whole opposite stream, cross the survivors.
FTJ
    Range-partition each stream on its own extremes, re-partition oversized
    partitions, drop partition pairs that cannot join.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .joiner import execute, filtering_join, partition_filter, prefap_join, schedule, schedule_random
from .model import Algorithm, Config, Interval, JoinResults, Partition, RunMetrics, Stream, ThetaOp
from .partitioner import isolated_plan


def _elapsed(t0):
    return (time.perf_counter() - t0) * 1e3


def _empty(cfg, t0):
    return JoinResults.empty(2), RunMetrics.zero(cfg.workers, _elapsed(t0))


def rbm_cut_positions(n: int, p: int) -> list[int]:
    """Zero-based sorted positions sampled as range cuts.

    Position ``k`` is ``round(k * n / p)`` (half rounds up) for
    ``k = 1 .. p-1``; for ``n = 9, p = 3`` these are the 4th and 7th values.
    """
    return [min(n - 1, math.floor(k * n / p + 0.5)) for k in range(1, p)]


def rbm_ranges(sorted_values: np.ndarray, p: int) -> list[tuple[float, float]]:
    """Sampled ranges ``(-inf, c1), [c1, c2), ..., [c_{p-1}, +inf)``.

    Ranges may be empty when sampled cuts coincide or sit at the minimum;
    they are kept so callers can see the skew.
    """
    n = sorted_values.size
    if n == 0:
        return []
    cuts = [float(sorted_values[i]) for i in rbm_cut_positions(n, p)]
    edges = [-math.inf] + cuts + [math.inf]
    return list(zip(edges[:-1], edges[1:]))


def rbm_partitions(s: Stream, p: int) -> tuple[list[tuple[float, float]], list[list[float]]]:
    """Sorted ranges and the (sorted) values falling into each, empties included."""
    vals = np.sort(s.values, kind="stable")
    ranges = rbm_ranges(vals, p)
    return ranges, [vals[(vals >= lo) & (vals < hi)].tolist() for lo, hi in ranges]


def _rbm_plan(s: Stream, p: int) -> list[Partition]:
    order = np.argsort(s.values, kind="stable")
    vals, ids = s.values[order], s.ids[order]
    parts = []
    for lo, hi in rbm_ranges(vals, p):
        a, b = np.searchsorted(vals, lo, side="left"), np.searchsorted(vals, hi, side="left")
        if b > a:
            parts.append(Partition(Interval(lo, hi), vals[a:b], ids[a:b], s.name))
    return parts


def rbm_join(r: Stream, s: Stream, cfg: Config) -> tuple[JoinResults, RunMetrics]:
    t0 = time.perf_counter()
    if len(r) == 0 or len(s) == 0:
        return _empty(cfg, t0)
    left, right = _rbm_plan(r, cfg.partitions), _rbm_plan(s, cfg.partitions)
    pairs = [(a, b) for a in left for b in right]
    results, metrics = execute(schedule(pairs, cfg.workers), cfg.op)
    return results, metrics.with_elapsed(_elapsed(t0))


def obt_chunks(s: Stream, p: int) -> list[Partition]:
    """Sorted equal-count chunks; the first ``n % p`` chunks get one extra."""
    order = np.argsort(s.values, kind="stable")
    vals, ids = s.values[order], s.ids[order]
    parts = []
    for v, i in zip(np.array_split(vals, p), np.array_split(ids, p)):
        if v.size:
            parts.append(Partition(Interval(float(v[0]), float(v[-1]), closed_hi=True), v, i, s.name))
    return parts


def obt_join(r: Stream, s: Stream, cfg: Config) -> tuple[JoinResults, RunMetrics]:
    t0 = time.perf_counter()
    if len(r) == 0 or len(s) == 0:
        return _empty(cfg, t0)
    left, right = obt_chunks(r, cfg.partitions), obt_chunks(s, cfg.partitions)
    pairs = [(a, b) for a in left for b in right]
    results, metrics = execute(schedule_random(pairs, cfg.workers, cfg.seed), cfg.op)
    return results, metrics.with_elapsed(_elapsed(t0))


def _whole(s: Stream) -> Partition:
    lo, hi = float(s.values.min()), float(s.values.max())
    return Partition(Interval(lo, hi, closed_hi=True), s.values, s.ids, s.name)


def cross_filter(op: ThetaOp, r: Stream, s: Stream, p: int) -> tuple[list[Partition], list[Partition]]:
    """Partitions of ``r`` and ``s`` that survive stream-level cross filtering.

    An ``s`` partition survives iff it can join with the whole of ``r``, and
    symmetrically for ``r`` partitions against the whole of ``s``.
    """
    whole_r, whole_s = _whole(r), _whole(s)
    left = [pr for pr in isolated_plan(r, p) if partition_filter(op, pr, whole_s)]
    right = [ps for ps in isolated_plan(s, p) if partition_filter(op, whole_r, ps)]
    return left, right


def cfs_join(r: Stream, s: Stream, cfg: Config) -> tuple[JoinResults, RunMetrics]:
    t0 = time.perf_counter()
    if len(r) == 0 or len(s) == 0:
        return _empty(cfg, t0)
    left, right = cross_filter(cfg.op, r, s, cfg.partitions)
    # survivors are crossed in full; partition pairs only serve as work units
    pairs = [(a, b) for a in left for b in right]
    results, metrics = execute(schedule(pairs, cfg.workers), cfg.op)
    return results, metrics.with_elapsed(_elapsed(t0))


def ftj_join(r: Stream, s: Stream, cfg: Config) -> tuple[JoinResults, RunMetrics]:
    return filtering_join(r, s, cfg, prefilter=False, amalgamation=False, repartition=not cfg.disable_repartition)


ALGORITHMS = {
    Algorithm.RBM: rbm_join,
    Algorithm.OBT: obt_join,
    Algorithm.CFS: cfs_join,
    Algorithm.FTJ: ftj_join,
    Algorithm.PREFAP: prefap_join,
}
