"""Certificates of linear independence over the rationals.

Two certificate shapes are produced and re-checked here.

* :class:`IntervalTraceWitness`: a window ``[n, n+1)`` in which every index
  set under consideration traces exactly ``[a, b_i)`` with one shared left
  endpoint ``a`` and pairwise distinct cuts ``b_i``.  Such a window forces the
  coded sums of those sets, together with 1, to be linearly independent over
  the rationals; the witness is re-verified by redoing the intersections.

* :class:`SumIndependenceCertificate`: for two numbers that are each a sum of
  at most three tagged components (two block values drawn from distinct gauge
  families plus one hub value), the hypotheses that force independence are
  syntactic: distinct gauge tags inside each sum, hub components from the hub
  pool, different component multisets, and both sums nonzero.  The certificate
  records the tags and the multiset-difference witness so a checker can replay
  the test against a registry snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .coded import CodedReal, as_coded
from .errors import DomainError
from .intervals import IntervalSet, _frac_str


@dataclass(frozen=True)
class IntervalTraceWitness:
    """Shared-window trace data certifying Q-linear independence."""

    k: int
    window_start: Fraction
    base: Fraction
    cuts: tuple[Fraction, ...]
    index_sets: tuple[IntervalSet, ...]

    def verify(self) -> bool:
        """Recompute every trace from scratch and recheck the shape."""
        n = self.window_start
        if n < 0 or n.denominator != 1:
            return False
        if len(self.cuts) != len(self.index_sets):
            return False
        if len(set(self.cuts)) != len(self.cuts):
            return False
        for b, sett in zip(self.cuts, self.index_sets):
            if not self.base < b:
                return False
            trace = sett.intersect_block(n, n + 1)
            if trace != IntervalSet.block(self.base, b):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "kind": "interval-trace",
            "k": self.k,
            "window": [_frac_str(self.window_start), _frac_str(self.window_start + 1)],
            "base": _frac_str(self.base),
            "cuts": [_frac_str(b) for b in self.cuts],
            "index_sets": [s.to_json() for s in self.index_sets],
        }

    @staticmethod
    def from_json(data: dict) -> "IntervalTraceWitness":
        return IntervalTraceWitness(
            k=int(data["k"]),
            window_start=Fraction(data["window"][0]),
            base=Fraction(data["base"]),
            cuts=tuple(Fraction(b) for b in data["cuts"]),
            index_sets=tuple(IntervalSet.from_json(s) for s in data["index_sets"]),
        )


def find_interval_trace_witness(
    index_sets: Sequence[IntervalSet], k: int = 0
) -> IntervalTraceWitness | None:
    """Search for a shared window certifying independence of the given sets.

    Returns ``None`` when no window works; that is inconclusive, not a
    dependence proof.
    """
    if not index_sets:
        raise DomainError("need at least one index set")
    candidates: set[int] = set()
    for s in index_sets:
        candidates.update(s.integer_levels())
    for n in sorted(candidates):
        traces = [s.intersect_block(n, n + 1) for s in index_sets]
        if any(len(t.blocks) != 1 for t in traces):
            continue
        starts = {t.blocks[0][0] for t in traces}
        if len(starts) != 1:
            continue
        base = starts.pop()
        cuts = tuple(t.blocks[0][1] for t in traces)
        if len(set(cuts)) != len(cuts):
            continue
        witness = IntervalTraceWitness(
            k=k,
            window_start=Fraction(n),
            base=base,
            cuts=cuts,
            index_sets=tuple(index_sets),
        )
        assert witness.verify()
        return witness
    return None


def certified_distinct(x: CodedReal, y: CodedReal) -> bool:
    """True when distinct canonical forms provably denote distinct numbers.

    Sound for values whose coded terms all share one exponent ladder: suppose
    the combined weight functions differed yet the numbers were equal.  Scale
    to integer weights and pick a deep enumeration index ``n`` where the
    weights differ; multiplying by ``2^(2^n + k)`` makes everything an
    integer except a tail below 1, and every contribution other than index
    ``n`` is divisible by the exponent gap ``2^(2^n - 2^(n-1))``, which the
    bounded weight at ``n`` cannot be.  Index sets are infinite (or empty) by
    construction, so such ``n`` exist beyond every bound.  Mixed ladders are
    not certified here.
    """
    cx, cy = as_coded(x), as_coded(y)
    if cx == cy:
        return False
    ks = {t.k for t in cx.terms} | {t.k for t in cy.terms}
    return len(ks) == 1


@dataclass(frozen=True)
class SumComponent:
    """One tagged summand of a composite distance value."""

    kind: str  # "block", "hub" or "zero"
    gauge_id: int | None = None
    hub_index: int | None = None
    detail: tuple[str, ...] = ()
    value: CodedReal = field(default_factory=CodedReal)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "gauge": self.gauge_id,
            "hub_index": self.hub_index,
            "detail": list(self.detail),
            "value": self.value.to_json(),
        }

    @staticmethod
    def from_json(data: dict) -> "SumComponent":
        return SumComponent(
            kind=data["kind"],
            gauge_id=data.get("gauge"),
            hub_index=data.get("hub_index"),
            detail=tuple(data.get("detail", ())),
            value=CodedReal.from_json(data["value"]),
        )


@dataclass(frozen=True)
class SumIndependenceCertificate:
    left: tuple[SumComponent, ...]
    right: tuple[SumComponent, ...]

    def verify(self, known_gauges: Iterable[int] | None = None) -> bool:
        """Replay the syntactic hypotheses that force independence."""
        for side in (self.left, self.right):
            if not 1 <= len(side) <= 3:
                return False
            gauge_ids = [c.gauge_id for c in side if c.kind == "block" and not c.value.is_zero_form()]
            if len(gauge_ids) != len(set(gauge_ids)):
                return False
            if known_gauges is not None:
                pool = set(known_gauges)
                for gid in gauge_ids:
                    if gid not in pool:
                        return False
            hubs = [c for c in side if c.kind == "hub"]
            if len(hubs) > 1:
                return False
            # The sum must be nonzero: zero is dependent with everything.
            if all(c.value.is_zero_form() for c in side):
                return False
        return _component_multisets_differ(self.left, self.right)

    def to_json(self) -> dict:
        return {
            "kind": "sum-independence",
            "left": [c.to_json() for c in self.left],
            "right": [c.to_json() for c in self.right],
        }

    @staticmethod
    def from_json(data: dict) -> "SumIndependenceCertificate":
        return SumIndependenceCertificate(
            left=tuple(SumComponent.from_json(c) for c in data["left"]),
            right=tuple(SumComponent.from_json(c) for c in data["right"]),
        )


def _component_multisets_differ(
    left: Sequence[SumComponent], right: Sequence[SumComponent]
) -> bool:
    lvals = sorted((repr(c.value.to_json()) for c in left))
    rvals = sorted((repr(c.value.to_json()) for c in right))
    return lvals != rvals


def sum_independence_check(
    left: Sequence[SumComponent],
    right: Sequence[SumComponent],
    known_gauges: Iterable[int] | None = None,
) -> SumIndependenceCertificate | None:
    """Certificate that two tagged sums are linearly independent over Q.

    ``None`` means the hypotheses do not hold (inconclusive).  Components
    tagged with gauges outside ``known_gauges`` raise a domain error: a
    checker cannot vouch for families it has never registered.
    """
    if known_gauges is not None:
        pool = set(known_gauges)
        for c in (*left, *right):
            if c.kind == "block" and not c.value.is_zero_form() and c.gauge_id not in pool:
                raise DomainError(f"component uses unregistered gauge {c.gauge_id}")
    cert = SumIndependenceCertificate(tuple(left), tuple(right))
    return cert if cert.verify(known_gauges) else None
