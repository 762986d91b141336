from fractions import Fraction

import pytest

from rigidmetrics.coded import coded_sum
from rigidmetrics.errors import DomainError
from rigidmetrics.intervals import IntervalSet
from rigidmetrics.metric import FiniteMetric, dump_metric, load_metric


def test_structural_validation():
    with pytest.raises(DomainError):
        FiniteMetric.from_entries(["a", "a"], [[0, 1], [1, 0]])
    with pytest.raises(DomainError):
        FiniteMetric.from_entries(["a", "b"], [[0, 1], [2, 0]])
    with pytest.raises(DomainError):
        FiniteMetric.from_entries(["a", "b"], [[1, 1], [1, 0]])


def test_json_round_trip_mixed_entries():
    coded = coded_sum(3, IntervalSet.from_blocks([(0, Fraction(1, 2)), (1, Fraction(4, 3))]))
    m = FiniteMetric.from_entries(
        ["a", "b", "c"],
        [
            [0, Fraction(5, 3), coded],
            [Fraction(5, 3), 0, coded + Fraction(1, 7)],
            [coded, coded + Fraction(1, 7), 0],
        ],
    )
    text = dump_metric(m)
    again = load_metric(text)
    assert again == m
    assert dump_metric(again) == text


def test_csv_round_trip():
    m = FiniteMetric.from_entries(
        ["a", "b"], [[0, Fraction(7, 10)], [Fraction(7, 10), 0]]
    )
    text = dump_metric(m, "csv")
    assert load_metric(text, "csv") == m


def test_csv_rejects_coded_entries():
    coded = coded_sum(0, IntervalSet.block(0, 1))
    m = FiniteMetric.from_entries(["a", "b"], [[0, coded], [coded, 0]])
    with pytest.raises(DomainError):
        dump_metric(m, "csv")


def test_restrict_and_distance():
    m = FiniteMetric.from_entries(
        ["a", "b", "c"],
        [[0, 1, 2], [1, 0, 3], [2, 3, 0]],
    )
    r = m.restrict(["c", "a"])
    assert r.points == ("c", "a")
    assert r.distance("c", "a").rational_value() == 2
    with pytest.raises(DomainError):
        m.distance("a", "zz")


def test_scaled():
    m = FiniteMetric.from_entries(["a", "b"], [[0, 2], [2, 0]])
    assert m.scaled(Fraction(1, 4)).at(0, 1).rational_value() == Fraction(1, 2)
    with pytest.raises(DomainError):
        m.scaled(Fraction(0))
