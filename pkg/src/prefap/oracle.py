"""Brute-force nested-loop joins used as ground truth.

Deliberately plain Python: every combination is enumerated and checked with
the scalar predicate, with no partitioning, filtering or vectorisation.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from .model import ArityMismatch, Stream, ThetaOp, theta_holds


def oracle_join(op: ThetaOp, r: Stream, s: Stream) -> tuple[list[tuple[int, int]], int]:
    """All satisfying ``(r_id, s_id)`` pairs in (r-index, s-index) order, and ``|r|*|s|``."""
    pred = op.func
    rs = list(zip(r.values.tolist(), r.ids.tolist()))
    ss = list(zip(s.values.tolist(), s.ids.tolist()))
    out = []
    for x, xid in rs:
        for y, yid in ss:
            if pred(x, y):
                out.append((xid, yid))
    return out, len(rs) * len(ss)


def oracle_multiway(streams: Sequence[Stream], thetas: Sequence[ThetaOp]) -> list[tuple[int, ...]]:
    """Every id tuple whose adjacent values satisfy the operator chain."""
    if len(streams) < 2 or len(streams) != len(thetas) + 1:
        raise ArityMismatch(f"{len(streams)} streams need {len(streams) - 1} operators, got {len(thetas)}")
    columns = [list(zip(s.values.tolist(), s.ids.tolist())) for s in streams]
    out = []
    for combo in itertools.product(*columns):
        if all(theta_holds(op, combo[k][0], combo[k + 1][0]) for k, op in enumerate(thetas)):
            out.append(tuple(e[1] for e in combo))
    return out
