"""Independent brute-force oracles for the properties the pipeline promises.

Every oracle returns a :class:`Report` whose verdict is ``pass``, ``fail`` or
``unresolved``; a fail always carries a concrete witness, and a pass of an
exhaustive oracle really did check every instance.  Comparisons go through
the exact engine of :mod:`rigidmetrics.coded`; distinctness of coded values
additionally uses certified canonical-form separation, so strong-rigidity
checks on pipeline outputs never hang on numerically inseparable values.

Equality of coded entries is representation equality (identical canonical
forms).  For rational matrices this coincides with value equality; for coded
matrices it can only over-report distinctness in self-isometry search, which
is documented at :func:`isometry_group`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from .coded import (
    DEFAULT_MAX_PRECISION,
    CodedReal,
    Enclosure,
    EQUAL,
    GREATER,
    LESS,
    UNRESOLVED,
    compare,
    equals,
)
from .errors import DomainError, PrecisionError, ResourceError
from .metric import FiniteMetric

Verdict = Literal["pass", "fail", "unresolved"]


@dataclass(frozen=True)
class Report:
    verdict: Verdict
    witnesses: tuple = ()
    detail: str = ""
    precision: int = DEFAULT_MAX_PRECISION

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witnesses": [list(map(str, w)) if isinstance(w, tuple) else str(w) for w in self.witnesses],
            "detail": self.detail,
            "precision": self.precision,
        }


def _triangle_report(
    d: FiniteMetric, strict: bool, max_precision: int
) -> Report:
    n = d.size
    for i, j in d.pairs():
        order = compare(d.at(i, j), 0, max_precision)
        if order != GREATER:
            if order == UNRESOLVED:
                return Report("unresolved", ((d.points[i], d.points[j]),), "positivity")
            return Report("fail", ((d.points[i], d.points[j]),), "nonpositive distance")
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if k == i or k == j:
                    continue
                lhs = d.at(i, j)
                rhs = d.at(i, k) + d.at(k, j)
                order = compare(lhs, rhs, max_precision)
                triple = (d.points[i], d.points[j], d.points[k])
                if order == UNRESOLVED:
                    return Report("unresolved", (triple,), "triangle comparison")
                if order == GREATER or (strict and order == EQUAL):
                    kind = "strict triangle" if strict else "triangle"
                    return Report("fail", (triple,), f"{kind} violated")
    return Report("pass", (), "strict triangle" if strict else "triangle")


def is_metric(d: FiniteMetric, max_precision: int = DEFAULT_MAX_PRECISION) -> Report:
    """Symmetry, zero diagonal, positivity, and every triangle inequality."""
    return _triangle_report(d, strict=False, max_precision=max_precision)


def is_strict_triangle(
    d: FiniteMetric, max_precision: int = DEFAULT_MAX_PRECISION
) -> Report:
    return _triangle_report(d, strict=True, max_precision=max_precision)


def sup_distance(
    d: FiniteMetric, e: FiniteMetric, precision_index: int = 8
) -> Enclosure:
    """Exact max of ``|d - e|`` over pairs, enclosure-valued for coded entries."""
    if d.points != e.points:
        raise DomainError("sup distance needs identical point sets")
    best = Enclosure(Fraction(0), Fraction(0))
    for i, j in d.pairs():
        diff = d.at(i, j) - e.at(i, j)
        enc = _abs_enclosure(diff, precision_index)
        best = Enclosure(max(best.lo, enc.lo), max(best.hi, enc.hi))
    return best


def _abs_enclosure(value: CodedReal, precision_index: int) -> Enclosure:
    n = precision_index
    while True:
        try:
            enc = value.eval(n)
        except PrecisionError:
            if n == 0:
                raise
            n = max(0, n // 2)
            continue
        break
    if enc.lo >= 0:
        return enc
    if enc.hi <= 0:
        return Enclosure(-enc.hi, -enc.lo)
    return Enclosure(Fraction(0), max(-enc.lo, enc.hi))


def _distinctness(
    values: Sequence[tuple[tuple[str, ...], CodedReal]],
    max_precision: int,
) -> tuple[Verdict, tuple]:
    """Classify a tagged value family as all-distinct / collision / unresolved."""
    groups: dict[CodedReal, list[tuple[str, ...]]] = {}
    for tag, value in values:
        groups.setdefault(value, []).append(tag)
    collisions = [tuple(tags) for tags in groups.values() if len(tags) > 1]
    if collisions:
        return "fail", tuple(collisions)
    distinct = list(groups)
    ks = {t.k for v in distinct for t in v.terms}
    if len(ks) <= 1:
        # One shared exponent ladder (or none): distinct canonical forms
        # denote distinct numbers, see independence.certified_distinct.
        return "pass", ()
    unresolved = []
    for a in range(len(distinct)):
        for b in range(a + 1, len(distinct)):
            verdict = equals(distinct[a], distinct[b], max_precision)
            if verdict is True:
                return "fail", (tuple(groups[distinct[a]] + groups[distinct[b]]),)
            if verdict is None:
                unresolved.append((groups[distinct[a]][0], groups[distinct[b]][0]))
    if unresolved:
        return "unresolved", tuple(unresolved)
    return "pass", ()


def is_strongly_rigid(
    d: FiniteMetric, max_precision: int = DEFAULT_MAX_PRECISION
) -> Report:
    """No positive distance may be attained by two different point pairs."""
    tagged = [
        ((d.points[i], d.points[j]), d.at(i, j)) for i, j in d.pairs()
    ]
    verdict, witnesses = _distinctness(tagged, max_precision)
    return Report(verdict, witnesses, "pairwise distinct positive distances")


def isometry_group(d: FiniteMetric, limit: int = 12) -> list[tuple[int, ...]]:
    """All distance-preserving self-bijections, as index permutations.

    Backtracking with per-point distance-multiset fingerprints.  Preservation
    is checked with representation equality of entries, which agrees with
    value equality on rational matrices; on coded matrices the group may be
    under-approximated (never over-), so rigidity passes are conservative.
    """
    n = d.size
    if n > limit:
        raise ResourceError(f"isometry search capped at {limit} points")
    keys = [[d.at(i, j).sort_key() for j in range(n)] for i in range(n)]
    fingerprints = [tuple(sorted(keys[i][j] for j in range(n) if j != i)) for i in range(n)]
    candidates = [
        [j for j in range(n) if fingerprints[j] == fingerprints[i]] for i in range(n)
    ]
    order = sorted(range(n), key=lambda i: len(candidates[i]))
    mapping = [-1] * n
    used = [False] * n
    found: list[tuple[int, ...]] = []

    def extend(pos: int) -> None:
        if pos == n:
            found.append(tuple(mapping))
            return
        i = order[pos]
        for j in candidates[i]:
            if used[j]:
                continue
            ok = True
            for prev in order[:pos]:
                if keys[i][prev] != keys[j][mapping[prev]]:
                    ok = False
                    break
            if ok:
                mapping[i] = j
                used[j] = True
                extend(pos + 1)
                used[j] = False
                mapping[i] = -1

    extend(0)
    return sorted(found)


def is_rigid(d: FiniteMetric, limit: int = 12) -> Report:
    group = isometry_group(d, limit)
    identity = tuple(range(d.size))
    extras = tuple(g for g in group if g != identity)
    if extras:
        return Report("fail", extras, "nontrivial self-isometries")
    return Report("pass", (), "only the identity isometry")


def lnm_membership(
    d: FiniteMetric, m: int, max_precision: int = DEFAULT_MAX_PRECISION
) -> Report:
    """Membership in the closed near-collision set at scale ``2^-m``.

    ``pass`` means a quadruple ``(x, y, u, v)`` exists with
    ``d(x,y) = d(u,v) >= 2^-m``, ``d(x,u) + d(y,v) >= 2^-m`` and
    ``d(x,v) + d(u,y) >= 2^-m``; ``fail`` means no quadruple qualifies.
    A strongly rigid metric is a non-member for every ``m``.
    """
    if m < 0:
        raise DomainError("scales are indexed by m >= 0")
    threshold = Fraction(1, 1 << m)
    groups: dict[CodedReal, list[tuple[int, int]]] = {}
    for i, j in d.pairs():
        groups.setdefault(d.at(i, j), []).append((i, j))
    saw_unresolved = False
    for value, pairs in groups.items():
        if len(pairs) < 2:
            continue
        order = compare(value, threshold, max_precision)
        if order == LESS:
            continue
        if order == UNRESOLVED:
            saw_unresolved = True
            continue
        for a in range(len(pairs)):
            for b in range(a + 1, len(pairs)):
                for x, y in (pairs[a], tuple(reversed(pairs[a]))):
                    for u, v in (pairs[b], tuple(reversed(pairs[b]))):
                        c1 = compare(d.at(x, u) + d.at(y, v), threshold, max_precision)
                        c2 = compare(d.at(x, v) + d.at(u, y), threshold, max_precision)
                        if c1 in (GREATER, EQUAL) and c2 in (GREATER, EQUAL):
                            witness = tuple(d.points[t] for t in (x, y, u, v))
                            return Report("pass", (witness,), f"member at m={m}")
                        if UNRESOLVED in (c1, c2):
                            saw_unresolved = True
    if saw_unresolved:
        return Report("unresolved", (), f"membership at m={m} undecided")
    return Report("fail", (), f"non-member at m={m}")


def lnm_scale_bound(d: FiniteMetric, margin: int = 2) -> int:
    """Largest scale index worth testing: membership at any scale implies
    membership once ``2^-m`` drops below the least positive distance."""
    least: Fraction | None = None
    for i, j in d.pairs():
        enc = _abs_enclosure(d.at(i, j), 8)
        low = enc.lo
        if low <= 0:
            raise DomainError("positivity must hold before scale analysis")
        least = low if least is None else min(least, low)
    if least is None:
        raise DomainError("need at least one pair")
    m = 0
    while Fraction(1, 1 << m) > least:
        m += 1
    return m + margin


def lnm_never_member(
    d: FiniteMetric, margin: int = 2, max_precision: int = DEFAULT_MAX_PRECISION
) -> Report:
    """Non-membership at every relevant scale (finite-space rigidity test)."""
    bound = lnm_scale_bound(d, margin)
    for m in range(bound + 1):
        report = lnm_membership(d, m, max_precision)
        if report.verdict == "pass":
            return Report("fail", report.witnesses, f"member at m={m}")
        if report.verdict == "unresolved":
            return Report("unresolved", (), f"undecided at m={m}")
    return Report("pass", (), f"non-member for all m <= {bound}")


def distance_embedding_check(
    d: FiniteMetric, xi: str, max_precision: int = DEFAULT_MAX_PRECISION
) -> Report:
    """Injectivity of ``x -> d(x, xi)`` (a topological embedding at finite scale)."""
    base = d.index(xi)
    tagged = [
        ((d.points[i],), d.at(i, base)) for i in range(d.size)
    ]
    verdict, witnesses = _distinctness(tagged, max_precision)
    return Report(verdict, witnesses, f"distance column at {xi}")
