import random
from fractions import Fraction

import pytest

from rigidmetrics.metric import FiniteMetric


def rational_metric(
    rng: random.Random,
    n: int,
    low: Fraction = Fraction(1),
    den: int = 8,
) -> FiniteMetric:
    """Random exact metric with values in [low, 2*low] (triangle automatic)."""
    labels = [f"p{i}" for i in range(n)]
    values = {
        (i, j): low * Fraction(rng.randint(den, 2 * den), den)
        for i in range(n)
        for j in range(i + 1, n)
    }
    return FiniteMetric.from_pair_function(labels, lambda i, j: values[(i, j)])


def clustered_metric(
    rng: random.Random, clusters: int, size: int, intra_den: int = 64
) -> FiniteMetric:
    """Clusters with tiny internal distances; cross distances from the reps."""
    reps = {
        (a, b): Fraction(rng.randint(8, 16), 8)
        for a in range(clusters)
        for b in range(a + 1, clusters)
    }
    labels = [f"c{a}x{t}" for a in range(clusters) for t in range(size)]

    def dist(i: int, j: int) -> Fraction:
        a, s = divmod(i, size)
        b, t = divmod(j, size)
        if a == b:
            return Fraction(rng.randint(intra_den, 2 * intra_den), intra_den * intra_den)
        return reps[(min(a, b), max(a, b))]

    values = {(i, j): dist(i, j) for i in range(len(labels)) for j in range(i + 1, len(labels))}
    return FiniteMetric.from_pair_function(labels, lambda i, j: values[(i, j)])


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260808)
