"""Exact arithmetic on set-coded real numbers.

A :class:`CodedReal` denotes the number

    offset + sum over terms of  coeff * <gamma_k, B>,

where ``<gamma_k, B>`` is the sum of ``2^(-(2^i + k))`` over all enumeration
indices ``i`` whose rational value lies in the index set ``B`` (a finite union
of half-open rational intervals, hence an infinite or empty set of rationals).
Empty sets contribute zero.

Terms are kept in a canonical weighted form: for each exponent offset ``k`` the
index sets of all contributing terms are split at their common endpoints and
regrouped by total weight, so equal weighted forms denote equal numbers and the
representation of a fixed number is unique.

Two evaluation routes are provided.

* :meth:`CodedReal.eval` returns a rational :class:`Enclosure` by summing the
  first ``N + 1`` indices of each term exactly and adding the geometric tail
  bound ``2^(1 - (2^(N+1) + k))`` per term.  This materializes denominators of
  ``2^(2^(N+1))`` and is therefore capped at moderate ``N``.
* :func:`compare` decides signs symbolically: support indices of each weighted
  piece are enumerated structurally (per integer level of the index set), the
  un-enumerated remainder is bounded through the first index it could possibly
  occupy, and the resulting sparse dyadic sums are compared without ever
  expanding ``2^(-2^i)`` into an integer.  This is what makes comparisons
  involving indices like ``i = 2047`` (exponent ``2^2047``) feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Sequence

from .enumeration import (
    fusc_pair,
    rational_at,
    simplest_in_open,
    tree_depth,
)
from .errors import DomainError, PrecisionError
from .intervals import IntervalSet, _frac_str

Ordering = Literal["less", "equal", "greater", "unresolved"]

LESS: Ordering = "less"
EQUAL: Ordering = "equal"
GREATER: Ordering = "greater"
UNRESOLVED: Ordering = "unresolved"

DEFAULT_MAX_PRECISION = 64

# eval() materializes 2^(-(2^(N+1)+k)) as Fractions; cap the exponent bits.
_MAX_EVAL_EXPONENT = 1 << 21
# Symbolic exponents 2^i are stored as ints of i bits; cap the index range.
_MAX_SYMBOLIC_INDEX = 1 << 21
# Index sets may not reach past this integer level (enumerated indices at
# level m start at 2^m - 1 and must stay within the symbolic range).
_MAX_LEVEL = 16
# Support scan always explores at least this many odd-part candidates per level.
_MIN_SCAN = 8


@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("enclosure bounds out of order")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, q: Fraction) -> bool:
        return self.lo <= q <= self.hi

    def encloses(self, other: "Enclosure") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __repr__(self) -> str:
        return f"Enclosure[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class ExponentSchedule:
    """The exponent ladder ``F(n) = 2^n + k`` for a fixed offset ``k >= 0``."""

    k: int = 0

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("schedule offset must be nonnegative")

    def exponent(self, n: int) -> int:
        if n < 0:
            raise ValueError("ladder positions are nonnegative")
        if n > _MAX_SYMBOLIC_INDEX:
            # 2^n itself would not fit in memory as an integer exponent.
            raise PrecisionError(f"ladder position {n} is out of reach")
        return (1 << n) + self.k


def gamma(schedule: ExponentSchedule | int, i: int) -> Fraction:
    """The dyadic value ``2^-(2^i + k)``, materialized exactly."""
    k = schedule.k if isinstance(schedule, ExponentSchedule) else int(schedule)
    e = ExponentSchedule(k).exponent(i)
    if e > _MAX_EVAL_EXPONENT:
        raise PrecisionError(
            f"2^-{e} has too many bits to materialize; use compare() instead"
        )
    return Fraction(1, 1 << e)


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    k: int
    index_set: IntervalSet


def _canonical_terms(
    raw: Iterable[tuple[Fraction, int, IntervalSet]]
) -> tuple[Term, ...]:
    by_k: dict[int, list[tuple[Fraction, IntervalSet]]] = {}
    for coeff, k, sett in raw:
        coeff = Fraction(coeff)
        if k < 0:
            raise ValueError("schedule offset must be nonnegative")
        if coeff == 0 or sett.is_empty:
            continue
        by_k.setdefault(k, []).append((coeff, sett))
    out: list[Term] = []
    for k in sorted(by_k):
        entries = by_k[k]
        cuts = sorted({p for _, s in entries for blk in s.blocks for p in blk})
        weights: dict[Fraction, list[tuple[Fraction, Fraction]]] = {}
        for a, b in zip(cuts, cuts[1:]):
            w = Fraction(0)
            for coeff, s in entries:
                if a in s:
                    w += coeff
            if w != 0:
                weights.setdefault(w, []).append((a, b))
        for w in sorted(weights):
            out.append(Term(w, k, IntervalSet.from_blocks(weights[w])))
    return tuple(out)


@dataclass(frozen=True)
class CodedReal:
    offset: Fraction = Fraction(0)
    terms: tuple[Term, ...] = ()

    @staticmethod
    def from_rational(q: Fraction | int) -> "CodedReal":
        return CodedReal(Fraction(q), ())

    @staticmethod
    def build(
        offset: Fraction | int,
        parts: Iterable[tuple[Fraction | int, int, IntervalSet]] = (),
    ) -> "CodedReal":
        raw = [(Fraction(c), k, s) for c, k, s in parts]
        return CodedReal(Fraction(offset), _canonical_terms(raw))

    @property
    def is_rational(self) -> bool:
        return not self.terms

    def rational_value(self) -> Fraction:
        if self.terms:
            raise DomainError("value has coded terms; use eval() or compare()")
        return self.offset

    def is_zero_form(self) -> bool:
        return self.offset == 0 and not self.terms

    def __add__(self, other: "CodedReal | Fraction | int") -> "CodedReal":
        other = as_coded(other)
        raw = [(t.coeff, t.k, t.index_set) for t in self.terms + other.terms]
        return CodedReal(self.offset + other.offset, _canonical_terms(raw))

    __radd__ = __add__

    def __neg__(self) -> "CodedReal":
        return self * -1

    def __sub__(self, other: "CodedReal | Fraction | int") -> "CodedReal":
        return self + (-as_coded(other))

    def __rsub__(self, other: "CodedReal | Fraction | int") -> "CodedReal":
        return as_coded(other) + (-self)

    def __mul__(self, scalar: Fraction | int) -> "CodedReal":
        s = Fraction(scalar)
        if s == 0:
            return CodedReal()
        # scaling by a negative factor reverses the coefficient order, so
        # rebuild the canonical form rather than mapping terms in place
        return CodedReal.build(
            self.offset * s,
            [(t.coeff * s, t.k, t.index_set) for t in self.terms],
        )

    __rmul__ = __mul__

    def eval(self, precision_index: int) -> Enclosure:
        """Rational enclosure from the first ``precision_index + 1`` indices."""
        n = precision_index
        if n < 0:
            raise ValueError("precision index must be nonnegative")
        base = self.offset
        lo_pad = Fraction(0)
        hi_pad = Fraction(0)
        for term in self.terms:
            sched = ExponentSchedule(term.k)
            tail_exp = sched.exponent(n + 1) - 1
            if tail_exp > _MAX_EVAL_EXPONENT:
                raise PrecisionError(
                    f"eval at index {n} needs 2^{tail_exp}-bit rationals; "
                    "use compare() for symbolic decisions"
                )
            partial = Fraction(0)
            for i in range(n + 1):
                if rational_at(i) in term.index_set:
                    partial += Fraction(1, 1 << sched.exponent(i))
            tail = Fraction(1, 1 << tail_exp)
            base += term.coeff * partial
            if term.coeff > 0:
                hi_pad += term.coeff * tail
            else:
                lo_pad += term.coeff * tail
        return Enclosure(base + lo_pad, base + hi_pad)

    def sort_key(self) -> tuple:
        """Deterministic total order on canonical forms (not the value order)."""
        return (
            self.offset,
            tuple((t.k, t.coeff, t.index_set.blocks) for t in self.terms),
        )

    def to_json(self) -> dict:
        return {
            "offset": _frac_str(self.offset),
            "terms": [
                {
                    "coeff": _frac_str(t.coeff),
                    "k": t.k,
                    "intervals": t.index_set.to_json(),
                }
                for t in self.terms
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "CodedReal":
        return CodedReal.build(
            Fraction(data["offset"]),
            [
                (Fraction(t["coeff"]), int(t["k"]), IntervalSet.from_json(t["intervals"]))
                for t in data.get("terms", [])
            ],
        )

    def __repr__(self) -> str:
        if not self.terms:
            return f"CodedReal({self.offset})"
        bits = [str(self.offset)] if self.offset else []
        bits += [f"{t.coeff}*<g{t.k}, {t.index_set!r}>" for t in self.terms]
        return "CodedReal(" + " + ".join(bits) + ")"


def as_coded(value: "CodedReal | Fraction | int") -> CodedReal:
    if isinstance(value, CodedReal):
        return value
    return CodedReal.from_rational(Fraction(value))


def coded_sum(k: int, index_set: IntervalSet, coeff: Fraction | int = 1) -> CodedReal:
    """The number ``coeff * <gamma_k, index_set>``."""
    return CodedReal.build(0, [(Fraction(coeff), k, index_set)])


# ---------------------------------------------------------------------------
# symbolic sign machinery
# ---------------------------------------------------------------------------


def _sgn(x: Fraction | int) -> int:
    return (x > 0) - (x < 0)


def _merge_entries(entries: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    acc: dict[int, int] = {}
    for e, c in entries:
        acc[e] = acc.get(e, 0) + c
    return sorted((e, c) for e, c in acc.items() if c != 0)


def _pure_dyadic_sign(entries: Sequence[tuple[int, int]]) -> int:
    """Exact sign of a merged, sorted, nonzero-coefficient dyadic sum."""
    if not entries:
        return 0
    suffix = [0] * (len(entries) + 1)
    for i in range(len(entries) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + abs(entries[i][1])
    acc = 0
    e_acc = entries[0][0]
    for i, (e, c) in enumerate(entries):
        if acc != 0:
            gap = e - e_acc
            if gap > suffix[i].bit_length():
                return _sgn(acc)
            acc <<= gap
        acc += c
        e_acc = e
    return _sgn(acc)


def _mixed_sign(base: Fraction, entries: Iterable[tuple[int, int]]) -> int:
    """Exact sign of ``base + sum(c * 2^-e)``.

    Entries with enormous exponents are never materialized: once the leading
    remaining exponent clears the bit length of the products involved, the
    materialized head decides the sign.
    """
    remaining = _merge_entries(entries)
    value = base
    threshold = 4096
    pos = 0
    while True:
        while pos < len(remaining) and remaining[pos][0] <= threshold:
            e, c = remaining[pos]
            value += Fraction(c, 1 << e)
            pos += 1
        if pos == len(remaining):
            return _sgn(value)
        tail_abs = sum(abs(c) for _, c in remaining[pos:])
        e0 = remaining[pos][0]
        if value == 0:
            return _pure_dyadic_sign(remaining[pos:])
        if (tail_abs * value.denominator).bit_length() <= e0:
            return _sgn(value)
        # Not yet separable: pull in the leading remaining entry.  The guard
        # above ensures e0 is small whenever this branch is taken.
        threshold = e0


def _level_fragments(
    index_set: IntervalSet, m: int
) -> list[tuple[Fraction, Fraction]]:
    trace = index_set.intersect_block(m, m + 1)
    return [(a - m, b - m) for a, b in trace.blocks]


_unit_rationals: list[Fraction] = [Fraction(0)]  # placeholder at 0


def _unit_rational_cached(j: int) -> Fraction:
    """The ``j``-th rational of (0, 1), memoized for support scans."""
    while len(_unit_rationals) <= j:
        t = len(_unit_rationals)
        a, b = fusc_pair(t)
        _unit_rationals.append(Fraction(a, a + b))
    return _unit_rationals[j]


_support_cache: dict[tuple[int, tuple, int], tuple[tuple[int, ...], tuple[int, ...]]] = {}


def _piece_support(
    k: int, index_set: IntervalSet, index_cap: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Support exponents and per-level tail-bound exponents of an index set.

    The support part lists ``2^i + k`` for every enumerated index ``i`` with
    value inside the set; each tail exponent ``e`` bounds the un-enumerated
    remainder of one integer level by ``2^(1-e)``.  Cached: index sets recur
    across many comparisons.
    """
    key = (k, index_set.blocks, index_cap)
    hit = _support_cache.get(key)
    if hit is not None:
        return hit
    sched = ExponentSchedule(k)
    support: list[int] = []
    tails: list[int] = []
    for m in index_set.integer_levels():
        if m > _MAX_LEVEL:
            raise PrecisionError(f"index set reaches level {m}; out of range")
        frags = _level_fragments(index_set, m)
        scan = max(_MIN_SCAN, (index_cap + 1) >> (m + 1))
        frag_hit = [False] * len(frags)
        if any(u == 0 for u, _ in frags):
            support.append(sched.exponent((1 << m) - 1))
            for t, (u, _) in enumerate(frags):
                if u == 0:
                    frag_hit[t] = True
        for j in range(1, scan + 1):
            val = _unit_rational_cached(j)
            for t, (u, v) in enumerate(frags):
                if u <= val < v:
                    support.append(sched.exponent((1 << m) * (2 * j + 1) - 1))
                    frag_hit[t] = True
                    break
        enum_lb = (1 << m) * (2 * scan + 3) - 1
        level_lb = None
        for t, (u, v) in enumerate(frags):
            if frag_hit[t]:
                frag_lb = enum_lb
            else:
                # No hit found by scanning: bound the fragment through the
                # tree depth of its shallowest member (its index is at least
                # 2^m * (2^depth + 1) - 1).
                depth = min(tree_depth(u), tree_depth(simplest_in_open(u, v)))
                if depth >= _MAX_SYMBOLIC_INDEX.bit_length():
                    cand = _MAX_SYMBOLIC_INDEX
                else:
                    cand = (1 << m) * ((1 << depth) + 1) - 1
                frag_lb = max(enum_lb, cand)
            level_lb = frag_lb if level_lb is None else min(level_lb, frag_lb)
        if level_lb is not None:
            tails.append(sched.exponent(min(level_lb, _MAX_SYMBOLIC_INDEX)))
    result = (tuple(support), tuple(tails))
    if len(_support_cache) > 1 << 16:
        _support_cache.clear()
    _support_cache[key] = result
    return result


def _piece_events(
    k: int,
    weight: int,
    index_set: IntervalSet,
    index_cap: int,
) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Support events and tail bounds of ``weight * <gamma_k, index_set>``."""
    support, tail_exps = _piece_support(k, index_set, index_cap)
    events = [(e, weight) for e in support]
    tails = [(e, 2 * abs(weight)) for e in tail_exps]
    return events, tails


def sign(
    value: CodedReal,
    max_precision: int = DEFAULT_MAX_PRECISION,
    extra: Sequence[tuple[int, Fraction]] = (),
) -> int | None:
    """Exact sign of ``value`` plus optional symbolic dyadic addends.

    ``extra`` entries are exact ``(exponent, coefficient)`` contributions of
    ``coefficient * 2^-exponent``.  Returns ``None`` when unresolved within
    the precision budget.
    """
    if not value.terms and not extra:
        return _sgn(value.offset)
    caps = sorted({min(16, max_precision), min(64, max_precision), max_precision})
    for cap in caps:
        result = _sign_once(value, cap, extra)
        if result is not None:
            return result
    return None


def _sign_once(
    value: CodedReal,
    index_cap: int,
    extra: Sequence[tuple[int, Fraction]] = (),
) -> int | None:
    denoms = [t.coeff.denominator for t in value.terms]
    denoms += [c.denominator for _, c in extra]
    scale = math.lcm(*denoms) if denoms else 1
    base = value.offset * scale
    events: list[tuple[int, int]] = [(e, int(c * scale)) for e, c in extra]
    lo_pad: list[tuple[int, int]] = []
    hi_pad: list[tuple[int, int]] = []
    for term in value.terms:
        w = int(term.coeff * scale)
        ev, tails = _piece_events(term.k, w, term.index_set, index_cap)
        events.extend(ev)
        if w > 0:
            hi_pad.extend(tails)
        else:
            lo_pad.extend((e, -c) for e, c in tails)
    lo_sign = _mixed_sign(base, events + lo_pad)
    hi_sign = _mixed_sign(base, events + hi_pad)
    if lo_sign > 0:
        return 1
    if hi_sign < 0:
        return -1
    if lo_sign == 0 and hi_sign == 0:
        return 0
    return None


def compare(
    x: CodedReal | Fraction | int,
    y: CodedReal | Fraction | int,
    max_precision: int = DEFAULT_MAX_PRECISION,
) -> Ordering:
    """Exact three-way comparison with an explicit unresolved verdict."""
    diff = as_coded(x) - as_coded(y)
    if diff.is_zero_form():
        return EQUAL
    s = sign(diff, max_precision)
    if s is None:
        return UNRESOLVED
    if s == 0:
        return EQUAL
    return GREATER if s > 0 else LESS


def gamma_compare(
    value: CodedReal | Fraction | int,
    coeff: Fraction | int,
    k: int,
    position: int,
    max_precision: int = DEFAULT_MAX_PRECISION,
) -> Ordering:
    """Compare ``value`` against ``coeff * 2^-(2^position + k)`` exactly.

    Works at ladder positions far beyond what :func:`gamma` can materialize.
    """
    v = as_coded(value)
    e = ExponentSchedule(k).exponent(position)
    s = sign(v, max_precision, extra=((e, -Fraction(coeff)),))
    if s is None:
        return UNRESOLVED
    if s == 0:
        return EQUAL
    return GREATER if s > 0 else LESS


def equals(
    x: CodedReal | Fraction | int,
    y: CodedReal | Fraction | int,
    max_precision: int = DEFAULT_MAX_PRECISION,
) -> bool | None:
    """Equality oracle: True, False, or None (unresolved).

    True needs identical canonical forms.  False comes either from a settled
    numeric comparison or from distinctness of canonical forms certified by a
    shared interval-trace witness (see :mod:`rigidmetrics.independence`).
    """
    cx, cy = as_coded(x), as_coded(y)
    if cx == cy:
        return True
    order = compare(cx, cy, max_precision)
    if order in (LESS, GREATER):
        return False
    if order == EQUAL:
        return True
    from .independence import certified_distinct

    if certified_distinct(cx, cy):
        return False
    return None
