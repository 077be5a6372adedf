"""Synthetic stream generators, CSV ingestion and tumbling windows.

Random draws use numpy's ``PCG64`` bit generator seeded directly with the
seed of the DistSpec, so a given ``(kind, params, seed, count)`` produces the same
stream on every platform numpy supports.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .model import JoinError, Stream


class InvalidSpec(JoinError, ValueError):
    pass


class ParseError(JoinError):
    def __init__(self, row: int, column: str, message: str):
        super().__init__(f"row {row}, column {column!r}: {message}")
        self.row = row
        self.column = column


class EmptyFile(JoinError):
    pass


@dataclass(frozen=True)
class DistSpec:
    """Distribution of a synthetic stream.

    ``kind`` is ``"uniform"`` (params ``lo, hi``), ``"normal"``
    (``mu, sigma``) or ``"zipf"`` (``alpha[, n_distinct]``).
    """

    kind: str
    params: tuple[float, ...]
    seed: int = 0
    count: int = 1000

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        p = self.params
        if self.count < 1:
            raise InvalidSpec("count must be >= 1")
        if kind == "uniform":
            if len(p) != 2 or not p[0] < p[1]:
                raise InvalidSpec("uniform needs lo < hi")
        elif kind == "normal":
            if len(p) != 2 or not p[1] > 0:
                raise InvalidSpec("normal needs mu and sigma > 0")
        elif kind == "zipf":
            if len(p) == 1:
                object.__setattr__(self, "params", (p[0], 1000.0))
                p = self.params
            if len(p) != 2 or not p[0] > 1 or p[1] < 1 or p[1] != int(p[1]):
                raise InvalidSpec("zipf needs alpha > 1 and an integer n_distinct >= 1")
        else:
            raise InvalidSpec(f"unknown distribution {self.kind!r}")
        if not all(math.isfinite(x) for x in p):
            raise InvalidSpec("distribution parameters must be finite")

    @classmethod
    def parse(cls, text: str, seed: int = 0, count: int = 1000) -> DistSpec:
        """Parse ``kind:param[:param]``, e.g. ``uniform:20:50`` or ``zipf:1.2``."""
        kind, *rest = text.split(":")
        try:
            params = tuple(float(x) for x in rest)
        except ValueError:
            raise InvalidSpec(f"bad distribution parameters in {text!r}") from None
        return cls(kind, params, seed, count)


def zipf_probabilities(alpha: float, n_distinct: int) -> np.ndarray:
    ranks = np.arange(1, n_distinct + 1, dtype=np.float64)
    w = ranks**-alpha
    return w / w.sum()


def generate(spec: DistSpec, name: str = "") -> Stream:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n = spec.count
    if spec.kind == "uniform":
        lo, hi = spec.params
        values = rng.uniform(lo, hi, size=n)
    elif spec.kind == "normal":
        mu, sigma = spec.params
        values = rng.normal(mu, sigma, size=n)
    else:
        alpha, n_distinct = spec.params
        probs = zipf_probabilities(alpha, int(n_distinct))
        values = rng.choice(np.arange(1, int(n_distinct) + 1), size=n, p=probs).astype(np.float64)
    return Stream(name or spec.kind, values)


def load_csv(path: str | os.PathLike, column: str = "value", name: str | None = None) -> Stream:
    """Read one numeric column of a headed CSV file.

    Row numbers in errors count the header as row 1.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyFile(f"{path}: no header row")
        header = [h.strip() for h in header]
        if column not in header:
            raise ParseError(1, column, f"column not found in header {header}")
        col = header.index(column)
        values = []
        for rowno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                cell = row[col].strip()
            except IndexError:
                raise ParseError(rowno, column, "missing cell") from None
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(rowno, column, f"not a number: {cell!r}") from None
            if not math.isfinite(v):
                raise ParseError(rowno, column, f"non-finite value {cell!r}")
            values.append(v)
    if not values:
        raise EmptyFile(f"{path}: no data rows")
    return Stream(name or os.path.splitext(os.path.basename(path))[0], np.asarray(values))


def windows(s: Stream, w: int) -> list[Stream]:
    """Tumbling windows of ``w`` elements in arrival order; the tail may be short."""
    if w < 1:
        raise ValueError("window size must be >= 1")
    return [s.take(slice(i, i + w)) for i in range(0, len(s), w)]
