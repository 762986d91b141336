import random
from fractions import Fraction

import pytest

from rigidmetrics.coded import (
    CodedReal,
    Enclosure,
    ExponentSchedule,
    EQUAL,
    GREATER,
    LESS,
    coded_sum,
    compare,
    equals,
    gamma,
    gamma_compare,
    sign,
)
from rigidmetrics.enumeration import rational_at
from rigidmetrics.errors import PrecisionError
from rigidmetrics.intervals import IntervalSet

UNIT = IntervalSet.block(0, 1)


def test_gamma_values():
    assert gamma(0, 0) == Fraction(1, 2)
    # direct exponentiation oracle
    assert gamma(0, 3) == Fraction(1, 2) ** 8 == Fraction(1, 256)
    assert gamma(2, 0) == Fraction(1, 8)
    with pytest.raises(PrecisionError):
        gamma(0, 64)


def test_schedule_strictly_increasing():
    sched = ExponentSchedule(5)
    exps = [sched.exponent(n) for n in range(12)]
    assert exps == sorted(set(exps))


def test_eval_empty_set_is_zero():
    x = coded_sum(0, IntervalSet())
    assert x.is_zero_form()
    assert x.eval(3) == Enclosure(Fraction(0), Fraction(0))


def test_eval_unit_block_at_index_zero():
    x = coded_sum(0, UNIT)
    enc = x.eval(0)
    # index 0 holds value 0 which lies in [0,1); the tail bound is 2^(1-F(1))
    assert enc.lo == Fraction(1, 2)
    assert enc.hi == Fraction(1, 2) + Fraction(1, 2)


def test_eval_pure_offset():
    x = CodedReal.from_rational(1)
    assert x.eval(0) == Enclosure(Fraction(1), Fraction(1))


def test_eval_monotone_and_tight():
    x = coded_sum(0, UNIT) + coded_sum(3, IntervalSet.block(1, Fraction(5, 2))) * Fraction(-2, 3)
    prev = x.eval(0)
    for n in range(1, 12):
        cur = x.eval(n)
        assert prev.encloses(cur)
        assert cur.width < prev.width
        prev = cur


def test_tail_bound_holds_exactly():
    # Any finite extension of the partial sum, plus the deeper tail bound,
    # stays within the original tail bound.
    for k in (0, 1, 3):
        sched = ExponentSchedule(k)
        for n in range(0, 6):
            bound = Fraction(1, 1 << (sched.exponent(n + 1) - 1))
            for m in range(n + 1, n + 7):
                extension = sum(
                    Fraction(1, 1 << sched.exponent(i)) for i in range(n + 1, m + 1)
                )
                deeper = Fraction(1, 1 << (sched.exponent(m + 1) - 1))
                assert extension + deeper <= bound


def test_canonical_form_merges_adjacent_terms():
    split = coded_sum(0, IntervalSet.block(0, 1)) + coded_sum(0, IntervalSet.block(1, 2))
    merged = coded_sum(0, IntervalSet.block(0, 2))
    assert split == merged
    assert equals(split, merged) is True


def test_canonical_form_weights():
    x = coded_sum(0, IntervalSet.block(0, 2)) + coded_sum(0, IntervalSet.block(1, 3))
    assert len(x.terms) == 2
    weights = {t.coeff: t.index_set for t in x.terms}
    assert weights[Fraction(2)] == IntervalSet.block(1, 2)
    assert weights[Fraction(1)] == IntervalSet.from_blocks([(0, 1), (2, 3)])


def test_compare_examples():
    x = coded_sum(0, UNIT)
    assert compare(x, x) == EQUAL
    assert compare(Fraction(1, 4), x) == LESS
    assert compare(x, coded_sum(0, IntervalSet.block(0, 2))) == LESS


def test_equals_examples():
    a = coded_sum(0, IntervalSet.block(1, 2))
    assert equals(a, coded_sum(0, IntervalSet.block(1, 2))) is True
    assert equals(coded_sum(0, IntervalSet.block(1, Fraction(3, 2))), a) is False
    # strict separation of 1/2 from the unit-block sum, confirmed by
    # refining enclosures until the lower bound clears 1/2
    x = coded_sum(0, UNIT)
    assert equals(CodedReal.from_rational(Fraction(1, 2)), x) is False
    n = 0
    while x.eval(n).lo <= Fraction(1, 2):
        n += 1
    assert n <= 4


def test_compare_distinct_interval_sets_never_equal():
    rng = random.Random(4)

    def random_set():
        cuts = sorted(
            {Fraction(rng.randint(0, 48), rng.randint(4, 8)) for _ in range(4)}
        )
        blocks = [(a, b) for a, b in zip(cuts, cuts[1:]) if rng.random() < 0.6]
        return IntervalSet.from_blocks(blocks)

    done = 0
    while done < 200:
        s, t = random_set(), random_set()
        if s == t or s.is_empty or t.is_empty:
            continue
        verdict = compare(coded_sum(0, s), coded_sum(0, t))
        assert verdict != EQUAL, (s, t)
        done += 1


def test_deep_level_symbolic_comparison():
    deep1 = IntervalSet.from_blocks([(m, Fraction(2 * m + 1, 2)) for m in range(12)])
    deep2 = IntervalSet.from_blocks(
        [(m, Fraction(2 * m + 1, 2)) for m in range(11)]
        + [(11, Fraction(23, 2) + Fraction(1, 3))]
    )
    assert compare(coded_sum(3, deep1), coded_sum(3, deep2)) == LESS
    assert equals(coded_sum(3, deep1), coded_sum(3, deep2)) is False


def test_gamma_compare_symbolic_positions():
    # value contains the first index of level 5 (position 31), so it exceeds
    # gamma at 31 but stays below twice that; both positions are far beyond
    # what gamma() could materialize.
    value = coded_sum(0, IntervalSet.block(5, Fraction(11, 2)))
    assert gamma_compare(value, 1, 0, 31) == GREATER
    assert gamma_compare(value, 2, 0, 31) == LESS
    assert gamma_compare(CodedReal(), 0, 0, 31) == EQUAL


def test_sign_of_rationals():
    assert sign(CodedReal.from_rational(Fraction(-3, 7))) == -1
    assert sign(CodedReal.from_rational(0)) == 0


def test_unresolved_order_with_certified_distinctness():
    # The sets differ only across a sliver whose simplest member is buried
    # astronomically deep in the tree: the order stays unresolved at default
    # precision, yet distinctness is still certified by a shared window.
    near_half = Fraction(10**9 // 2 - 1, 10**9)
    a = coded_sum(0, IntervalSet.block(0, near_half))
    b = coded_sum(0, IntervalSet.block(0, Fraction(1, 2)))
    assert compare(a, b) == "unresolved"
    assert equals(a, b) is False


def test_arithmetic_cancellation():
    x = coded_sum(2, IntervalSet.block(0, Fraction(1, 2)))
    y = coded_sum(2, IntervalSet.block(3, 4)) * Fraction(5, 7)
    z = x + y - x
    assert z == y
    assert (x - x).is_zero_form()
    assert (x * 0).is_zero_form()


def test_eval_negative_coefficient_orientation():
    x = coded_sum(0, UNIT) * -1
    enc = x.eval(0)
    assert enc.lo == -1 and enc.hi == Fraction(-1, 2)


def test_compare_small_budget_still_exact():
    a = coded_sum(0, IntervalSet.block(0, 1))
    b = coded_sum(0, IntervalSet.block(0, 2))
    assert compare(a, b, max_precision=4) == LESS


def test_eval_membership_uses_enumeration():
    # [0, 1/2) holds value 0 (index 0) and 1/3 (index 4) but not 1/2 (index 2)
    x = coded_sum(0, IntervalSet.block(0, Fraction(1, 2)))
    sched = ExponentSchedule(0)
    expected = Fraction(1, 1 << sched.exponent(0)) + Fraction(1, 1 << sched.exponent(4))
    assert rational_at(2) == Fraction(1, 2)
    assert x.eval(4).lo == expected


def test_json_round_trip():
    x = CodedReal.build(
        Fraction(3, 7),
        [
            (Fraction(1, 2), 0, IntervalSet.block(0, 1)),
            (Fraction(-2), 3, IntervalSet.from_blocks([(1, 2), (4, Fraction(9, 2))])),
        ],
    )
    assert CodedReal.from_json(x.to_json()) == x


def test_precision_error_on_huge_eval():
    x = coded_sum(0, UNIT)
    with pytest.raises(PrecisionError):
        x.eval(64)
