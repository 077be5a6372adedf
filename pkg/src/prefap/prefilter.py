"""Stream-level pre-filtering.

Before anything is partitioned, each stream drops the elements that cannot
pair with *any* element of the other stream.  Only the extremes of the
opposite stream are consulted, so the cost is a handful of linear passes and
no sorting.
"""

from __future__ import annotations

import numpy as np

from .model import Stream, ThetaOp


def _record(trace, n):
    if trace is not None:
        trace["visits"] = trace.get("visits", 0) + int(n)


def prefilter_pair(op: ThetaOp, r: Stream, s: Stream, trace: dict | None = None) -> tuple[Stream, Stream]:
    """Remove elements of ``r`` and ``s`` that have no join partner under ``op``.

    Both thresholds come from the unfiltered inputs.  When either input is
    empty there is nothing to join and both outputs are empty.

    ``trace``, when given, accumulates the number of element visits made by
    the numpy passes under the key ``"visits"``.
    """
    if len(r) == 0 or len(s) == 0:
        return r.take(slice(0, 0)), s.take(slice(0, 0))

    rv, sv = r.values, s.values
    if op in (ThetaOp.GT, ThetaOp.GE):
        s_min, r_max = sv.min(), rv.max()
        _record(trace, sv.size + rv.size)
        if op is ThetaOp.GT:
            keep_r, keep_s = rv > s_min, sv < r_max
        else:
            keep_r, keep_s = rv >= s_min, sv <= r_max
    else:
        s_max, r_min = sv.max(), rv.min()
        _record(trace, sv.size + rv.size)
        if op is ThetaOp.LT:
            keep_r, keep_s = rv < s_max, sv > r_min
        else:
            keep_r, keep_s = rv <= s_max, sv >= r_min
    _record(trace, rv.size + sv.size)

    r2, s2 = r.take(keep_r), s.take(keep_s)
    if len(r2) == 0 or len(s2) == 0:
        return r.take(slice(0, 0)), s.take(slice(0, 0))
    return r2, s2


def removed_mask(op: ThetaOp, r: Stream, s: Stream) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks of the elements :func:`prefilter_pair` drops."""
    r2, s2 = prefilter_pair(op, r, s)
    return ~np.isin(r.ids, r2.ids), ~np.isin(s.ids, s2.ids)
