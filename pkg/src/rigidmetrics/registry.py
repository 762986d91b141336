"""Bookkeeping for disjoint value families.

The registry is the single mutable component of the package.  It owns

* a global pool of drawn rationals, guaranteeing that the countable dense
  families backing streams and gauges are pairwise disjoint;
* gauge allocation (ids never reused; id 0 is reserved for the basis values
  used inside hub allocations and is never handed out for blocks);
* hub allocations: for a fresh index ``i`` and a positive rational target it
  returns ``P + q * s`` where ``P`` is an unused rational within ``2^-(i+1)``
  of the target, ``s`` is a fresh positive product-metric value from the
  reserved gauge, and ``q`` is the largest dyadic power with
  ``q * upper(s) <= 2^-i``; the result is then within ``2^-(i+1) + 2^-i`` of
  the target.

Snapshots of all allocations serialize with every certificate so that checks
remain replayable offline.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .coded import CodedReal, as_coded
from .enumeration import cantor_unpair, rational_at, simplest_in_open
from .errors import DomainError
from .intervals import _frac_str
from .product import SemiMetricGauge, Word, tau

RESERVED_GAUGE_ID = 0


class _IntervalEnumerator:
    """All rationals of an open interval, shallowest first.

    Splitting at the simplest inner rational and walking breadth-first keeps
    the heights of consecutive draws small (the n-th value sits at roughly
    log2(n) splits below the simplest one), which matters both for speed and
    for downstream support scans.
    """

    def __init__(self, lo: Fraction, hi: Fraction, seed: int):
        self._queue: deque[tuple[Fraction, Fraction]] = deque([(lo, hi)])
        self._seed = seed
        self._step = 0

    def next_value(self) -> Fraction:
        lo, hi = self._queue.popleft()
        mid = simplest_in_open(lo, hi)
        if (self._seed >> (self._step % 16)) & 1:
            self._queue.append((mid, hi))
            self._queue.append((lo, mid))
        else:
            self._queue.append((lo, mid))
            self._queue.append((mid, hi))
        self._step += 1
        return mid


@dataclass
class HubAllocation:
    index: int
    k: int
    target: Fraction
    p: Fraction
    q: Fraction
    words: tuple[Word, Word]
    basis: CodedReal
    value: CodedReal

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "k": self.k,
            "target": _frac_str(self.target),
            "p": _frac_str(self.p),
            "q": _frac_str(self.q),
            "words": [list(w) for w in self.words],
            "basis": self.basis.to_json(),
            "value": self.value.to_json(),
        }


class ValueRegistry:
    """Allocator for disjoint dense families, gauges, and hub values."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._used: set[Fraction] = set()
        self._p_used: set[Fraction] = set()
        self._enumerators: dict[tuple[Fraction, Fraction, int], _IntervalEnumerator] = {}
        self._gauges: dict[int, SemiMetricGauge] = {}
        self._next_gauge_id = RESERVED_GAUGE_ID + 1
        self._streams: dict[int, DenseStream] = {}
        self._hubs: dict[int, HubAllocation] = {}
        self._hub_word_counter = 0
        self._reserved = SemiMetricGauge(RESERVED_GAUGE_ID, 0, self)
        self._gauges[RESERVED_GAUGE_ID] = self._reserved

    # -- dense draws ------------------------------------------------------

    def draw_value(self, lo: Fraction, hi: Fraction, salt: int = 0) -> Fraction:
        """A fresh rational strictly inside ``(lo, hi)``, never repeated."""
        lo, hi = Fraction(lo), Fraction(hi)
        if not 0 <= lo < hi:
            raise DomainError(f"cannot draw from ({lo}, {hi})")
        key = (lo, hi, salt & 1)
        enum = self._enumerators.get(key)
        if enum is None:
            enum = self._enumerators[key] = _IntervalEnumerator(
                lo, hi, self.seed ^ salt
            )
        while True:
            candidate = enum.next_value()
            if candidate not in self._used:
                self._used.add(candidate)
                return candidate

    def drawn_values(self) -> frozenset[Fraction]:
        return frozenset(self._used)

    # -- gauges -----------------------------------------------------------

    def fresh_gauge(self, k: int = 0) -> SemiMetricGauge:
        gauge = SemiMetricGauge(self._next_gauge_id, k, self)
        self._gauges[gauge.gauge_id] = gauge
        self._next_gauge_id += 1
        return gauge

    @property
    def reserved_gauge(self) -> SemiMetricGauge:
        return self._reserved

    def gauge(self, gauge_id: int) -> SemiMetricGauge:
        try:
            return self._gauges[gauge_id]
        except KeyError:
            raise DomainError(f"gauge {gauge_id} was never allocated") from None

    def gauge_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._gauges))

    def block_gauge_ids(self) -> tuple[int, ...]:
        return tuple(g for g in sorted(self._gauges) if g != RESERVED_GAUGE_ID)

    # -- streams ----------------------------------------------------------

    def stream(self, alpha: int) -> "DenseStream":
        if alpha not in self._streams:
            self._streams[alpha] = DenseStream(alpha, self)
        return self._streams[alpha]

    # -- hub values -------------------------------------------------------

    def hub_value(self, k: int, i: int, target: Fraction) -> CodedReal:
        target = Fraction(target)
        if target <= 0:
            raise DomainError("hub targets must be positive")
        if i < 0:
            raise DomainError("hub indices are nonnegative")
        if i in self._hubs:
            raise DomainError(f"hub index {i} was already allocated")
        half = Fraction(1, 1 << (i + 1))
        lo = max(Fraction(0), target - half)
        p = self._draw_p(lo, target + half)
        c = self._hub_word_counter
        self._hub_word_counter += 1
        words = ((2 * c,), (2 * c + 1,))
        basis = tau(self._reserved, k, words[0], words[1])
        s_hi = basis.eval(4).hi
        q = _dyadic_power_floor(Fraction(1, 1 << i) / s_hi)
        value = as_coded(p) + basis * q
        self._hubs[i] = HubAllocation(i, k, target, p, q, words, basis, value)
        return value

    def hub_allocations(self) -> dict[int, HubAllocation]:
        return dict(self._hubs)

    def _draw_p(self, lo: Fraction, hi: Fraction) -> Fraction:
        key = (lo, hi, 2)
        enum = self._enumerators.get(key)
        if enum is None:
            enum = self._enumerators[key] = _IntervalEnumerator(lo, hi, self.seed)
        while True:
            candidate = enum.next_value()
            if candidate not in self._p_used:
                self._p_used.add(candidate)
                return candidate

    # -- persistence ------------------------------------------------------

    def snapshot(self) -> dict:
        gauges = {}
        for gid, gauge in sorted(self._gauges.items()):
            gauges[str(gid)] = {
                "k": gauge.k,
                "draws": {
                    f"{level}:{a}:{b}": _frac_str(v)
                    for (level, a, b), v in sorted(gauge.drawn().items())
                },
            }
        return {
            "seed": self.seed,
            "gauges": gauges,
            "hubs": {str(i): alloc.to_json() for i, alloc in sorted(self._hubs.items())},
            "streams": {
                str(alpha): [_frac_str(v) for v in stream.emitted]
                for alpha, stream in sorted(self._streams.items())
            },
        }


class DenseStream:
    """One member of a family of disjoint countable dense subsets of (0, oo).

    ``draw_next`` walks a fixed enumeration of base intervals (every rational
    interval shows up), emitting one fresh rational inside each; ``draw_in``
    services a targeted request.  Freshness is global across the owning
    registry, which is what keeps distinct streams disjoint.
    """

    def __init__(self, family_index: int, registry: ValueRegistry):
        self.family_index = family_index
        self._registry = registry
        self._cursor = 0
        self.emitted: list[Fraction] = []

    def draw_next(self) -> Fraction:
        n = self._cursor
        self._cursor += 1
        j, width_index = cantor_unpair(n)
        lo = rational_at(j + 1)
        hi = lo + Fraction(1, width_index + 1)
        value = self._registry.draw_value(lo, hi, salt=self.family_index)
        self.emitted.append(value)
        return value

    def draw_in(self, lo: Fraction, hi: Fraction) -> Fraction:
        value = self._registry.draw_value(lo, hi, salt=self.family_index)
        self.emitted.append(value)
        return value


def _dyadic_power_floor(x: Fraction) -> Fraction:
    """Largest power of two (positive exponent allowed) not exceeding x > 0."""
    if x <= 0:
        raise DomainError("expected a positive bound")
    e = x.numerator.bit_length() - x.denominator.bit_length()
    p = Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)
    if p > x:
        p /= 2
    elif 2 * p <= x:
        p *= 2
    return p


class _SealedPool:
    """Draw pool that refuses to draw: replay must cover every request."""

    def draw_value(self, lo: Fraction, hi: Fraction, salt: int = 0) -> Fraction:
        raise DomainError("snapshot replay hit a value that was never recorded")


def gauge_from_snapshot(gauge_id: int, snapshot: dict) -> SemiMetricGauge:
    """Reconstruct a gauge from recorded draws; unknown requests error out."""
    data = snapshot.get("gauges", {}).get(str(gauge_id))
    if data is None:
        raise DomainError(f"gauge {gauge_id} is not in the snapshot")
    gauge = SemiMetricGauge(gauge_id, int(data.get("k", 0)), _SealedPool())
    for key, value in data.get("draws", {}).items():
        level, a, b = (int(part) for part in key.split(":"))
        gauge.preload((level, a, b), Fraction(value))
    return gauge
