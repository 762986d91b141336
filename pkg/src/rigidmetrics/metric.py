"""Finite labeled metric spaces with exact entries.

Entries are :class:`~rigidmetrics.coded.CodedReal`; plain rationals embed as
pure-offset values.  Matrices are stored fully and immutably.  Validation of
the metric axioms lives in :mod:`rigidmetrics.verify`; file loading performs
it on demand via :func:`load_metric`.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .coded import CodedReal, as_coded
from .errors import DomainError
from .intervals import _frac_str

Entry = CodedReal | Fraction | int


@dataclass(frozen=True)
class FiniteMetric:
    points: tuple[str, ...]
    matrix: tuple[tuple[CodedReal, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.points)
        if len(set(self.points)) != n:
            raise DomainError("point labels must be distinct")
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise DomainError("matrix shape does not match the point count")
        for i in range(n):
            if not self.matrix[i][i].is_zero_form():
                raise DomainError(f"nonzero diagonal at {self.points[i]}")
            for j in range(i + 1, n):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise DomainError(
                        f"asymmetric entries at ({self.points[i]}, {self.points[j]})"
                    )

    @staticmethod
    def from_entries(
        points: Sequence[str], entries: Sequence[Sequence[Entry]]
    ) -> "FiniteMetric":
        matrix = tuple(tuple(as_coded(e) for e in row) for row in entries)
        return FiniteMetric(tuple(points), matrix)

    @staticmethod
    def from_pair_function(points: Sequence[str], dist) -> "FiniteMetric":
        """Build from a symmetric callable on point indices."""
        n = len(points)
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                row.append(as_coded(0) if i == j else as_coded(dist(min(i, j), max(i, j))))
            rows.append(tuple(row))
        return FiniteMetric(tuple(points), tuple(rows))

    @property
    def size(self) -> int:
        return len(self.points)

    def index(self, label: str) -> int:
        try:
            return self.points.index(label)
        except ValueError:
            raise DomainError(f"unknown point {label!r}") from None

    def at(self, i: int, j: int) -> CodedReal:
        return self.matrix[i][j]

    def distance(self, a: str, b: str) -> CodedReal:
        return self.matrix[self.index(a)][self.index(b)]

    def pairs(self) -> Iterator[tuple[int, int]]:
        n = self.size
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j

    def is_rational_valued(self) -> bool:
        return all(self.matrix[i][j].is_rational for i, j in self.pairs())

    def scaled(self, factor: Fraction) -> "FiniteMetric":
        if factor <= 0:
            raise DomainError("metric scaling factor must be positive")
        return FiniteMetric(
            self.points,
            tuple(tuple(e * factor for e in row) for row in self.matrix),
        )

    def restrict(self, labels: Sequence[str]) -> "FiniteMetric":
        idx = [self.index(x) for x in labels]
        return FiniteMetric(
            tuple(labels),
            tuple(tuple(self.matrix[i][j] for j in idx) for i in idx),
        )

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "matrix": [[e.to_json() for e in row] for row in self.matrix],
        }

    @staticmethod
    def from_json(data: dict) -> "FiniteMetric":
        return FiniteMetric(
            tuple(data["points"]),
            tuple(
                tuple(CodedReal.from_json(e) for e in row) for row in data["matrix"]
            ),
        )

    def to_csv(self) -> str:
        """Rational matrices only: labels in the header, entries as p/q."""
        if not self.is_rational_valued():
            raise DomainError("CSV serialization covers rational matrices only")
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["point", *self.points])
        for label, row in zip(self.points, self.matrix):
            writer.writerow([label, *(_frac_str(e.offset) for e in row)])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "FiniteMetric":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        header = rows[0][1:]
        entries = [[Fraction(cell) for cell in row[1:]] for row in rows[1:]]
        return FiniteMetric.from_entries(header, entries)


def dumps_canonical(obj) -> str:
    """Deterministic JSON: sorted keys, no whitespace drift."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def load_metric(text: str, fmt: str = "json") -> FiniteMetric:
    if fmt == "csv":
        return FiniteMetric.from_csv(text)
    return FiniteMetric.from_json(json.loads(text))


def dump_metric(metric: FiniteMetric, fmt: str = "json") -> str:
    if fmt == "csv":
        return metric.to_csv()
    return dumps_canonical(metric.to_json())
