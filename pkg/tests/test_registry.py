import json
from fractions import Fraction

import pytest

from rigidmetrics.coded import compare, equals, EQUAL
from rigidmetrics.errors import DomainError
from rigidmetrics.product import tau
from rigidmetrics.registry import RESERVED_GAUGE_ID, ValueRegistry, _dyadic_power_floor


def test_fresh_gauges_distinct():
    registry = ValueRegistry(0)
    g1, g2 = registry.fresh_gauge(0), registry.fresh_gauge(0)
    assert g1.gauge_id != g2.gauge_id
    assert RESERVED_GAUGE_ID not in (g1.gauge_id, g2.gauge_id)
    assert g1.value(0, 0, 1) != g2.value(0, 0, 1)


def test_gauge_values_inside_level_window():
    registry = ValueRegistry(0)
    gauge = registry.fresh_gauge(0)
    for level in range(5):
        for a, b in ((0, 1), (0, 2), (3, 9)):
            v = gauge.value(level, a, b)
            assert level < v < level + 1


def test_many_draws_globally_distinct():
    registry = ValueRegistry(0)
    drawn = []
    for _ in range(10):
        gauge = registry.fresh_gauge(0)
        for level in range(4):
            for b in range(1, 26):
                drawn.append(gauge.value(level, 0, b))
    assert len(drawn) == 1000
    assert len(set(drawn)) == 1000


def test_hub_value_accuracy():
    registry = ValueRegistry(0)
    value = registry.hub_value(3, 4, Fraction(1))
    enc = value.eval(4)
    tolerance = Fraction(1, 32) + Fraction(1, 16)
    assert abs(enc.lo - 1) <= tolerance and abs(enc.hi - 1) <= tolerance


def test_hub_value_structure():
    registry = ValueRegistry(2)
    i = 6
    value = registry.hub_value(3, i, Fraction(5, 3))
    alloc = registry.hub_allocations()[i]
    assert value.offset == alloc.p
    assert len(value.terms) >= 1
    coded_part = value - alloc.p
    enc = coded_part.eval(4)
    assert 0 <= enc.lo and enc.hi <= Fraction(1, 1 << i)


def test_hub_values_distinct_for_same_target():
    registry = ValueRegistry(0)
    v1 = registry.hub_value(3, 10, Fraction(1))
    v2 = registry.hub_value(3, 11, Fraction(1))
    assert v1 != v2
    assert equals(v1, v2) is False


def test_hub_index_reuse_rejected():
    registry = ValueRegistry(0)
    registry.hub_value(0, 1, Fraction(1))
    with pytest.raises(DomainError):
        registry.hub_value(0, 1, Fraction(2))
    with pytest.raises(DomainError):
        registry.hub_value(0, 2, Fraction(0))


def test_hub_and_block_values_never_equal():
    registry = ValueRegistry(0)
    gauge = registry.fresh_gauge(3)
    blocks = [tau(gauge, 3, (i,), (j,)) for i in range(4) for j in range(i + 1, 4)]
    hubs = [registry.hub_value(3, 20 + t, Fraction(t + 1, 2)) for t in range(4)]
    for b in blocks:
        for h in hubs:
            assert equals(b, h) is False
            assert compare(b, h) != EQUAL


def test_snapshot_is_json_serializable():
    registry = ValueRegistry(7)
    gauge = registry.fresh_gauge(1)
    gauge.value(0, 0, 1)
    registry.stream(0).draw_next()
    registry.hub_value(1, 3, Fraction(2))
    blob = json.dumps(registry.snapshot(), sort_keys=True)
    data = json.loads(blob)
    assert data["seed"] == 7
    assert "1" in data["gauges"]
    assert "3" in data["hubs"]


def test_dyadic_power_floor():
    assert _dyadic_power_floor(Fraction(1)) == 1
    assert _dyadic_power_floor(Fraction(3, 2)) == 1
    assert _dyadic_power_floor(Fraction(1, 3)) == Fraction(1, 4)
    assert _dyadic_power_floor(Fraction(9)) == 8
    with pytest.raises(DomainError):
        _dyadic_power_floor(Fraction(0))
