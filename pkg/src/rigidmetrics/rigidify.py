"""Strongly rigid perturbation of a finite rational metric.

The pipeline: snap the metric onto the grid ``eta * Z`` (ceiling entrywise,
``eta = epsilon / 2``), rescale to integers, and replace the integer ``N`` of
each point pair by a fresh rational drawn from that pair's own dense stream
inside ``(N + 2^-(N+1), N + 2^-N)``.  Values from these windows satisfy the
strict triangle inequality whenever the integers do (``N1 <= N2 + N3``
forces ``M1 < M2 + M3``), pairwise distinctness comes from stream
disjointness, and scaling back by ``eta`` lands within ``epsilon`` of the
input in sup distance.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError
from .metric import FiniteMetric
from .registry import DenseStream, ValueRegistry


def snap_to_grid(d: FiniteMetric, eta: Fraction) -> FiniteMetric:
    """Round every off-diagonal entry up to the grid ``eta * Z>=1``.

    Ceiling is subadditive, so the triangle inequality survives; entries move
    by less than ``eta`` and stay positive.
    """
    eta = Fraction(eta)
    if eta <= 0:
        raise DomainError("grid step must be positive")
    if not d.is_rational_valued():
        raise DomainError("grid snapping requires rational entries")

    def snapped(i: int, j: int) -> Fraction:
        value = d.at(i, j).rational_value()
        if value <= 0:
            raise DomainError("off-diagonal entries must be positive")
        return eta * math.ceil(value / eta)

    return FiniteMetric.from_pair_function(d.points, snapped)


def dense_decomposition(alpha: int, registry: ValueRegistry) -> DenseStream:
    """The ``alpha``-th member of a disjoint family of dense streams."""
    if alpha < 0:
        raise DomainError("stream indices are nonnegative")
    return registry.stream(alpha)


def pick_interval_value(n: int, stream: DenseStream) -> Fraction:
    """A fresh stream element strictly inside ``(n + 2^-(n+1), n + 2^-n)``."""
    if n < 1:
        raise DomainError("window index must be at least 1")
    lo = n + Fraction(1, 1 << (n + 1))
    hi = n + Fraction(1, 1 << n)
    return stream.draw_in(lo, hi)


def perturb_strongly_rigid(
    d: FiniteMetric,
    epsilon: Fraction,
    seed: int = 0,
    registry: ValueRegistry | None = None,
) -> FiniteMetric:
    """A strongly rigid, uniformly discrete metric within ``epsilon`` of ``d``.

    The output satisfies the strict triangle inequality, no positive value
    repeats, and the sup distance to ``d`` is at most ``epsilon`` (exactly).
    Deterministic given ``(d, epsilon, seed)``.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if d.size < 2:
        raise DomainError("need at least two points")
    eta = epsilon / 2
    snapped = snap_to_grid(d, eta)
    if registry is None:
        registry = ValueRegistry(seed)

    chosen: dict[tuple[int, int], Fraction] = {}
    alpha = 0
    for i, j in snapped.pairs():  # lexicographic pair enumeration
        n = int(snapped.at(i, j).rational_value() / eta)
        stream = dense_decomposition(alpha, registry)
        chosen[(i, j)] = eta * pick_interval_value(n, stream)
        alpha += 1

    return FiniteMetric.from_pair_function(d.points, lambda i, j: chosen[(i, j)])
