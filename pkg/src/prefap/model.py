"""Domain types shared by every stage of the join pipeline.

Streams and partitions are backed by numpy arrays (``values`` as float64,
``ids`` as int64) and are treated as immutable once built: the arrays are
flagged read-only so they can be shared across worker threads.
"""

from __future__ import annotations

import enum
import math
import operator
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np


class JoinError(Exception):
    """Base class for errors raised by this package."""


class EmptyStream(JoinError):
    pass


class DegenerateRange(JoinError):
    """Raised when a range has zero width and cannot be split by span."""


class OutOfBounds(JoinError):
    pass


class ArityMismatch(JoinError):
    pass


class ThetaOp(enum.Enum):
    GT = ">"
    GE = ">="
    LT = "<"
    LE = "<="

    @property
    def func(self):
        return _PY_OPS[self]

    @property
    def ufunc(self):
        return _NP_OPS[self]

    @property
    def strict(self) -> bool:
        return self in (ThetaOp.GT, ThetaOp.LT)

    def flipped(self) -> ThetaOp:
        """Operator with the arguments swapped: ``a op b == b op.flipped() a``."""
        return _FLIPPED[self]

    @classmethod
    def parse(cls, text: str) -> ThetaOp:
        key = text.strip().lower()
        for op in cls:
            if key in (op.name.lower(), op.value):
                return op
        raise ValueError(f"unknown theta operator {text!r}; expected gt, ge, lt or le")


_PY_OPS = {
    ThetaOp.GT: operator.gt,
    ThetaOp.GE: operator.ge,
    ThetaOp.LT: operator.lt,
    ThetaOp.LE: operator.le,
}
_NP_OPS = {
    ThetaOp.GT: np.greater,
    ThetaOp.GE: np.greater_equal,
    ThetaOp.LT: np.less,
    ThetaOp.LE: np.less_equal,
}
_FLIPPED = {
    ThetaOp.GT: ThetaOp.LT,
    ThetaOp.LT: ThetaOp.GT,
    ThetaOp.GE: ThetaOp.LE,
    ThetaOp.LE: ThetaOp.GE,
}


def theta_holds(op: ThetaOp, a: float, b: float) -> bool:
    return bool(_PY_OPS[op](a, b))


class Algorithm(enum.Enum):
    RBM = "rbm"
    OBT = "obt"
    CFS = "cfs"
    FTJ = "ftj"
    PREFAP = "prefap"

    @classmethod
    def parse(cls, text: str) -> Algorithm:
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown algorithm {text!r}; expected one of "
                + ", ".join(a.value for a in cls)
            ) from None


class Element(NamedTuple):
    value: float
    payload_id: int


def _frozen(arr, dtype) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True).reshape(-1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Stream:
    """An ordered window of join-attribute values.

    ``ids`` default to the arrival index of each value.  Non-finite values are
    rejected so that the ordering used by every predicate stays total.
    """

    name: str
    values: np.ndarray
    ids: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        values = _frozen(self.values, np.float64)
        if not np.isfinite(values).all():
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ValueError(f"stream {self.name!r}: non-finite value at position {bad}")
        if self.ids is None:
            ids = np.arange(values.size, dtype=np.int64)
            ids.setflags(write=False)
        else:
            ids = _frozen(self.ids, np.int64)
            if ids.size != values.size:
                raise ValueError("ids and values must have the same length")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "ids", ids)

    @classmethod
    def from_elements(cls, name: str, elements: Sequence[Element]) -> Stream:
        return cls(
            name,
            np.array([e.value for e in elements], dtype=np.float64),
            np.array([e.payload_id for e in elements], dtype=np.int64),
        )

    def __len__(self) -> int:
        return int(self.values.size)

    def __iter__(self) -> Iterator[Element]:
        for v, i in zip(self.values.tolist(), self.ids.tolist()):
            yield Element(v, i)

    @property
    def elements(self) -> list[Element]:
        return list(self)

    def take(self, mask_or_index) -> Stream:
        return Stream(self.name, self.values[mask_or_index], self.ids[mask_or_index])

    def __repr__(self) -> str:
        return f"Stream({self.name!r}, n={len(self)})"


def stream_extremes(s: Stream) -> tuple[float, float] | None:
    """``(min, max)`` of the stream's values, or ``None`` when it is empty."""
    if len(s) == 0:
        return None
    return float(s.values.min()), float(s.values.max())


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    closed_hi: bool = False

    def __post_init__(self):
        if not (self.lo < self.hi or (self.lo == self.hi and self.closed_hi)):
            raise ValueError(f"invalid interval lo={self.lo} hi={self.hi} closed_hi={self.closed_hi}")

    def __contains__(self, x: float) -> bool:
        if self.closed_hi:
            return self.lo <= x <= self.hi
        return self.lo <= x < self.hi

    def __str__(self) -> str:
        return f"[{self.lo:g}, {self.hi:g}{']' if self.closed_hi else ')'}"


@dataclass(frozen=True)
class Boundary:
    """Sorted cut points; consecutive cuts delimit half-open intervals.

    The final interval is closed.  A degenerate boundary covering a single
    value ``c`` is stored as ``(c, c)`` and yields one closed interval.
    """

    cuts: tuple[float, ...]

    def __post_init__(self):
        cuts = tuple(sorted({float(c) for c in self.cuts}))
        if not cuts:
            raise ValueError("a boundary needs at least one cut")
        if not all(math.isfinite(c) for c in cuts):
            raise ValueError("boundary cuts must be finite")
        if len(cuts) == 1:
            cuts = (cuts[0], cuts[0])
        object.__setattr__(self, "cuts", cuts)

    @property
    def degenerate(self) -> bool:
        return self.cuts[0] == self.cuts[-1]

    @property
    def lo(self) -> float:
        return self.cuts[0]

    @property
    def hi(self) -> float:
        return self.cuts[-1]

    @property
    def cut_set(self) -> tuple[float, ...]:
        """Distinct cut values (a degenerate boundary has just one)."""
        return self.cuts[:1] if self.degenerate else self.cuts

    def __len__(self) -> int:
        """Number of intervals."""
        return len(self.cuts) - 1

    def interval(self, i: int) -> Interval:
        n = len(self)
        if not 0 <= i < n:
            raise IndexError(i)
        return Interval(self.cuts[i], self.cuts[i + 1], closed_hi=(i == n - 1))

    def intervals(self) -> list[Interval]:
        return [self.interval(i) for i in range(len(self))]

    def locate(self, values: np.ndarray) -> np.ndarray:
        """Interval index of every value (binary search, half-open rule)."""
        values = np.asarray(values, dtype=np.float64)
        if values.size and (values.min() < self.lo or values.max() > self.hi):
            bad = values[(values < self.lo) | (values > self.hi)][0]
            raise OutOfBounds(f"value {bad!r} outside boundary [{self.lo}, {self.hi}]")
        idx = np.searchsorted(np.asarray(self.cuts), values, side="right") - 1
        # the last interval is closed, so the top cut belongs to it
        return np.minimum(idx, len(self) - 1)


@dataclass(frozen=True, eq=False)
class Partition:
    interval: Interval
    values: np.ndarray
    ids: np.ndarray
    stream_name: str = ""
    min: float = field(init=False)
    max: float = field(init=False)

    def __post_init__(self):
        values = _frozen(self.values, np.float64)
        ids = _frozen(self.ids, np.int64)
        if values.size != ids.size:
            raise ValueError("ids and values must have the same length")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "ids", ids)
        if values.size:
            object.__setattr__(self, "min", float(values.min()))
            object.__setattr__(self, "max", float(values.max()))
        else:
            object.__setattr__(self, "min", math.nan)
            object.__setattr__(self, "max", math.nan)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def elements(self) -> list[Element]:
        return [Element(v, i) for v, i in zip(self.values.tolist(), self.ids.tolist())]

    def __repr__(self) -> str:
        return f"Partition({self.stream_name!r}, {self.interval}, n={len(self)})"


@dataclass(frozen=True, eq=False)
class JoinTask:
    left: Partition
    right: Partition
    worker: int
    index: int = 0

    @property
    def pair_count(self) -> int:
        return len(self.left) * len(self.right)


class JoinResult(tuple):
    """One output tuple: a ``(payload_id, value)`` pair per joined stream."""

    __slots__ = ()

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(p[0] for p in self)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(p[1] for p in self)


class JoinResults:
    """Array-backed sequence of :class:`JoinResult`.

    ``ids`` and ``values`` have shape ``(n, k)`` for a k-way join; row order is
    the deterministic output order.
    """

    def __init__(self, ids: np.ndarray, values: np.ndarray):
        ids = np.asarray(ids, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if ids.shape != values.shape or ids.ndim != 2:
            raise ValueError("ids and values must be equal-shape 2-d arrays")
        self.ids = ids
        self.values = values

    @classmethod
    def empty(cls, arity: int = 2) -> JoinResults:
        return cls(np.empty((0, arity), np.int64), np.empty((0, arity), np.float64))

    @property
    def arity(self) -> int:
        return self.ids.shape[1]

    def __len__(self) -> int:
        return self.ids.shape[0]

    def __getitem__(self, i: int) -> JoinResult:
        return JoinResult(zip(self.ids[i].tolist(), self.values[i].tolist()))

    def __iter__(self) -> Iterator[JoinResult]:
        for row_ids, row_vals in zip(self.ids.tolist(), self.values.tolist()):
            yield JoinResult(zip(row_ids, row_vals))

    def id_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(row) for row in self.ids.tolist()]

    def sorted_ids(self) -> np.ndarray:
        """Rows of ``ids`` in lexicographic order, for multiset comparison."""
        if len(self) == 0:
            return self.ids.copy()
        order = np.lexsort(self.ids.T[::-1])
        return self.ids[order]

    def __repr__(self) -> str:
        return f"JoinResults(n={len(self)}, arity={self.arity})"


def balance_ratio(loads: Sequence[float]) -> float:
    """Max load over mean load; 1.0 when there is no work at all."""
    loads = list(loads)
    total = sum(loads)
    if not loads or total == 0:
        return 1.0
    return max(loads) / (total / len(loads))


@dataclass(frozen=True)
class RunMetrics:
    cartesian_count: int
    result_count: int
    elapsed_ms: float
    per_worker_in: tuple[int, ...]
    per_worker_out: tuple[int, ...]
    stages: tuple[RunMetrics, ...] = ()

    @property
    def lb_in(self) -> float:
        return balance_ratio(self.per_worker_in)

    @property
    def lb_out(self) -> float:
        return balance_ratio(self.per_worker_out)

    @classmethod
    def zero(cls, workers: int, elapsed_ms: float = 0.0) -> RunMetrics:
        return cls(0, 0, elapsed_ms, (0,) * workers, (0,) * workers)

    def with_elapsed(self, elapsed_ms: float) -> RunMetrics:
        return RunMetrics(
            self.cartesian_count,
            self.result_count,
            elapsed_ms,
            self.per_worker_in,
            self.per_worker_out,
            self.stages,
        )

    def as_dict(self) -> dict:
        return {
            "cartesian_count": self.cartesian_count,
            "result_count": self.result_count,
            "elapsed_ms": self.elapsed_ms,
            "lb_in": self.lb_in,
            "lb_out": self.lb_out,
        }


@dataclass(frozen=True)
class Config:
    """Run configuration.

    Defaults follow the usual experimental setting: 10 partitions, windows of
    1000 elements and 4 workers.  ``disable_repartition`` and
    ``ceil_subspan`` apply to the partition-filtering pipelines (Prefap and
    FTJ); the two ablation flags apply to Prefap only.
    """

    theta: tuple[ThetaOp, ...] = (ThetaOp.GT,)
    partitions: int = 10
    window: int = 1000
    workers: int = 4
    seed: int = 0
    algorithm: Algorithm = Algorithm.PREFAP
    disable_prefilter: bool = False
    disable_amalgamation: bool = False
    disable_repartition: bool = False
    ceil_subspan: bool = False

    def __post_init__(self):
        theta = self.theta
        if isinstance(theta, (ThetaOp, str)):
            theta = (theta,)
        theta = tuple(t if isinstance(t, ThetaOp) else ThetaOp.parse(t) for t in theta)
        if not theta:
            raise ValueError("at least one theta operator is required")
        object.__setattr__(self, "theta", theta)
        algo = self.algorithm
        if not isinstance(algo, Algorithm):
            object.__setattr__(self, "algorithm", Algorithm.parse(algo))
        for name in ("partitions", "window", "workers"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if (self.disable_prefilter or self.disable_amalgamation) and self.algorithm is not Algorithm.PREFAP:
            raise ValueError("ablation flags are only valid with the prefap algorithm")
        if (self.disable_repartition or self.ceil_subspan) and self.algorithm not in (
            Algorithm.PREFAP,
            Algorithm.FTJ,
        ):
            raise ValueError("re-partitioning options only apply to prefap and ftj")

    @property
    def op(self) -> ThetaOp:
        return self.theta[0]
