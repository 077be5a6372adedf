"""Range partitioning: spans, boundaries, amalgamation and re-partitioning."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Boundary, DegenerateRange, EmptyStream, Interval, Partition, Stream


@dataclass(frozen=True, eq=False)
class PartitionPlan:
    """Non-empty partitions of one stream, ordered by interval start."""

    boundary: Boundary
    partitions: tuple[Partition, ...]

    def __len__(self) -> int:
        return len(self.partitions)

    def __iter__(self):
        return iter(self.partitions)

    @property
    def size(self) -> int:
        return sum(len(p) for p in self.partitions)

    def sizes(self) -> list[int]:
        return [len(p) for p in self.partitions]


def span(lo: float, hi: float, p: int) -> float:
    """Width of each of ``p`` equal ranges covering ``[lo, hi]``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if lo > hi:
        raise ValueError(f"min {lo} exceeds max {hi}")
    if lo == hi:
        raise DegenerateRange(f"zero-width range at {lo}")
    return (hi - lo) / p


def _cuts(lo: float, hi: float, count: int, width: float) -> list[float]:
    # drop any accumulated cut that reached hi, then pin the top cut to hi exactly
    cuts = [lo + k * width for k in range(count)]
    return [c for c in cuts if c < hi] + [hi]


def boundary_of(s: Stream, p: int) -> Boundary:
    if len(s) == 0:
        raise EmptyStream(f"stream {s.name!r} is empty")
    lo, hi = float(s.values.min()), float(s.values.max())
    try:
        sp = span(lo, hi, p)
    except DegenerateRange:
        return Boundary((lo, lo))
    return Boundary(tuple(_cuts(lo, hi, p, sp)))


def amalgamate(a: Boundary, b: Boundary) -> Boundary:
    return Boundary(a.cut_set + b.cut_set)


def _split(values, ids, boundary: Boundary, name: str, intervals=None) -> list[Partition]:
    if values.size == 0:
        return []
    idx = boundary.locate(values)
    # stable sort keeps arrival order inside each partition
    order = np.argsort(idx, kind="stable")
    idx_sorted = idx[order]
    present, starts = np.unique(idx_sorted, return_index=True)
    ends = np.append(starts[1:], idx_sorted.size)
    parts = []
    for k, a, b in zip(present.tolist(), starts.tolist(), ends.tolist()):
        sel = order[a:b]
        interval = intervals[k] if intervals is not None else boundary.interval(k)
        parts.append(Partition(interval, values[sel], ids[sel], name))
    return parts


def assign(s: Stream, b: Boundary) -> PartitionPlan:
    """Place every element of ``s`` into its interval of ``b``; drop empty ones."""
    return PartitionPlan(b, tuple(_split(s.values, s.ids, b, s.name)))


def isolated_plan(s: Stream, p: int) -> PartitionPlan:
    return assign(s, boundary_of(s, p))


def subpartition_count(size: int, n_partitions: int, window: int) -> int:
    """How many pieces a partition of ``size`` elements is cut into.

    The average partition size is ``window / n_partitions``; a partition no
    larger than that stays whole (returns 1), otherwise it becomes
    ``ceil(size / average)`` pieces.  Integer arithmetic keeps the
    comparison exact.
    """
    if size * n_partitions <= window:
        return 1
    return -(-size * n_partitions // window)


def _split_oversized(part: Partition, rn: int, ceil_subspan: bool) -> list[Partition]:
    lo, hi = part.min, part.max
    if lo == hi:
        # duplicates of a single value cannot be separated
        return [part]
    width = (hi - lo) / rn
    if ceil_subspan:
        width = float(math.ceil(width))
    cuts = _cuts(lo, hi, rn, width)
    sub = Boundary(tuple(cuts))
    return _split(part.values, part.ids, sub, part.stream_name)


def repartition_oversized(plan: PartitionPlan, w: int, ceil_subspan: bool = False) -> PartitionPlan:
    """Split every partition larger than the average size into equal-width pieces.

    The sub-span is ``(max - min) / rn`` over the partition's own extremes.
    ``ceil_subspan=True`` rounds the sub-span up to an integer instead, which
    only makes sense for integer-valued attributes.  Runs a single pass.
    """
    n = len(plan.partitions)
    if n == 0:
        return plan
    out: list[Partition] = []
    changed = False
    for part in plan.partitions:
        rn = subpartition_count(len(part), n, w)
        if rn > 1:
            pieces = _split_oversized(part, rn, ceil_subspan)
            changed = changed or len(pieces) > 1
            out.extend(pieces)
        else:
            out.append(part)
    if not changed:
        return plan
    cuts = set(plan.boundary.cut_set)
    for part in out:
        cuts.update((part.interval.lo, part.interval.hi))
    # sub-intervals end at partition maxima, so re-sort by start
    out.sort(key=lambda q: (q.interval.lo, q.interval.hi))
    return PartitionPlan(Boundary(tuple(cuts)), tuple(out))


def check_plan(plan: PartitionPlan) -> None:
    """Assert the structural invariants of a plan (used by tests)."""
    prev_lo = -math.inf
    for part in plan.partitions:
        assert len(part) > 0, "empty partition in plan"
        assert part.interval.lo >= prev_lo, "partitions out of order"
        prev_lo = part.interval.lo
        for v in part.values.tolist():
            assert v in part.interval, f"{v} outside {part.interval}"
