"""Amalgamation of block metrics through hub points, and the full pipeline.

``amalgamate`` glues per-block metrics with a hub metric:

    D(x, y) = e_i(x, y)                                  same block,
    D(x, y) = e_i(x, p_i) + h(p_i, p_j) + e_j(p_j, y)    across blocks,

restricting exactly to each block.  When every block has diameter at most
``eps`` under both the original and the block metrics, the sup distance from
the original is at most ``4 * eps`` plus the hub defect.

``rigidify_full`` runs the whole construction: partition with diameter bound
``eta = epsilon / 5``, give every block its own gauge and the product metric
on one-letter words (diameter at most ``2^-k <= eta``), approximate the hub
distances by hub-pool values sitting strictly inside the subadditivity
windows, glue, and emit a certificate: the exact sup bound, strong rigidity,
and a rational-independence certificate for every pair of point pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coded import (
    DEFAULT_MAX_PRECISION,
    CodedReal,
    EQUAL,
    GREATER,
    LESS,
    UNRESOLVED,
    as_coded,
    compare,
)
from .errors import DomainError, PrecisionError, UnresolvedComparison
from .independence import (
    IntervalTraceWitness,
    SumComponent,
    SumIndependenceCertificate,
    find_interval_trace_witness,
    sum_independence_check,
)
from .intervals import _frac_str
from .metric import FiniteMetric
from .product import tau
from .registry import RESERVED_GAUGE_ID, ValueRegistry, gauge_from_snapshot
from .verify import Report, is_strongly_rigid


@dataclass(frozen=True)
class Partition:
    blocks: tuple[tuple[str, ...], ...]
    hubs: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) != len(self.hubs):
            raise DomainError("one hub per block")
        seen: set[str] = set()
        for block, hub in zip(self.blocks, self.hubs):
            if hub not in block:
                raise DomainError(f"hub {hub} outside its block")
            for label in block:
                if label in seen:
                    raise DomainError(f"blocks overlap at {label}")
                seen.add(label)

    def labels(self) -> tuple[str, ...]:
        return tuple(x for block in self.blocks for x in block)

    def block_of(self, label: str) -> int:
        for idx, block in enumerate(self.blocks):
            if label in block:
                return idx
        raise DomainError(f"{label} is not covered")

    def to_json(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks], "hubs": list(self.hubs)}

    @staticmethod
    def from_json(data: dict) -> "Partition":
        return Partition(
            tuple(tuple(b) for b in data["blocks"]), tuple(data["hubs"])
        )


def partition_by_diameter(
    d: FiniteMetric, bound: Fraction, max_precision: int = DEFAULT_MAX_PRECISION
) -> Partition:
    """Greedy cover by blocks of diameter at most ``bound``; seeds become hubs.

    Each unassigned point seeds a block and absorbs all unassigned points
    within ``bound / 2`` of it.
    """
    bound = Fraction(bound)
    if bound <= 0:
        raise DomainError("diameter bound must be positive")
    half = bound / 2
    unassigned = list(range(d.size))
    blocks: list[tuple[str, ...]] = []
    hubs: list[str] = []
    while unassigned:
        seed = unassigned.pop(0)
        members = [seed]
        rest = []
        for j in unassigned:
            order = compare(d.at(seed, j), half, max_precision)
            if order == UNRESOLVED:
                raise UnresolvedComparison(
                    f"cannot place {d.points[j]} within the diameter bound"
                )
            if order in (LESS, EQUAL):
                members.append(j)
            else:
                rest.append(j)
        unassigned = rest
        blocks.append(tuple(d.points[i] for i in members))
        hubs.append(d.points[seed])
    return Partition(tuple(blocks), tuple(hubs))


def amalgamate(
    partition: Partition,
    block_metrics: Sequence[FiniteMetric],
    hub_metric: FiniteMetric,
) -> FiniteMetric:
    """Glue block metrics through the hub metric; restrictions stay exact."""
    if len(block_metrics) != len(partition.blocks):
        raise DomainError("one block metric per block")
    for block, metric in zip(partition.blocks, block_metrics):
        if tuple(metric.points) != tuple(block):
            raise DomainError("block metric points must match the block")
    if tuple(hub_metric.points) != tuple(partition.hubs):
        raise DomainError("hub metric points must match the hubs")
    for i, j in hub_metric.pairs():
        if hub_metric.at(i, j).is_zero_form():
            raise DomainError("hub metric must be positive off the diagonal")

    labels = partition.labels()
    index = {x: i for i, x in enumerate(labels)}
    n = len(labels)
    rows = [[as_coded(0) for _ in range(n)] for _ in range(n)]
    for a in range(n):
        xa = labels[a]
        ba = partition.block_of(xa)
        for b in range(a + 1, n):
            xb = labels[b]
            bb = partition.block_of(xb)
            if ba == bb:
                value = block_metrics[ba].distance(xa, xb)
            else:
                value = (
                    block_metrics[ba].distance(xa, partition.hubs[ba])
                    + hub_metric.distance(partition.hubs[ba], partition.hubs[bb])
                    + block_metrics[bb].distance(partition.hubs[bb], xb)
                )
            rows[a][b] = rows[b][a] = value
    matrix = tuple(tuple(row) for row in rows)
    return FiniteMetric(tuple(labels), matrix)


def sup_bound_check(
    d: FiniteMetric,
    glued: FiniteMetric,
    partition: Partition,
    epsilon: Fraction,
    hub_metric: FiniteMetric,
    max_precision: int = DEFAULT_MAX_PRECISION,
) -> Report:
    """Exact check of ``sup |glued - d| <= 4 * epsilon + sup_hubs |d - h|``.

    Preconditions (every block has diameter at most ``epsilon`` under both
    ``d`` and its block metric) are verified first; their failure is reported
    as such, not as a bound failure.
    """
    epsilon = Fraction(epsilon)
    labels = list(glued.points)
    d = d.restrict(labels)
    for block in partition.blocks:
        for metric in (d.restrict(block), glued.restrict(block)):
            for i, j in metric.pairs():
                order = compare(metric.at(i, j), epsilon, max_precision)
                if order == GREATER:
                    return Report(
                        "fail",
                        ((block[i], block[j]),),
                        "precondition-failure: block diameter exceeds epsilon",
                    )
                if order == UNRESOLVED:
                    return Report("unresolved", ((block[i], block[j]),), "precondition")
    hub_defect = as_coded(0)
    d_hubs = d.restrict(list(partition.hubs))
    for i, j in d_hubs.pairs():
        gap = _abs_exact(d_hubs.at(i, j) - hub_metric.at(i, j), max_precision)
        if compare(gap, hub_defect, max_precision) == GREATER:
            hub_defect = gap
    allowance = as_coded(4 * epsilon) + hub_defect
    worst: CodedReal = as_coded(0)
    worst_pair: tuple[str, str] | None = None
    for i, j in glued.pairs():
        gap = _abs_exact(glued.at(i, j) - d.at(i, j), max_precision)
        order = compare(gap, allowance, max_precision)
        if order == GREATER:
            return Report("fail", ((labels[i], labels[j]),), "sup bound exceeded")
        if order == UNRESOLVED:
            return Report("unresolved", ((labels[i], labels[j]),), "sup bound")
        if compare(gap, worst, max_precision) == GREATER:
            worst, worst_pair = gap, (labels[i], labels[j])
    detail = f"sup bound holds; worst pair {worst_pair}"
    return Report("pass", (), detail)


def _abs_exact(value: CodedReal, max_precision: int) -> CodedReal:
    order = compare(value, 0, max_precision)
    if order == UNRESOLVED:
        raise UnresolvedComparison("cannot orient a difference")
    return -value if order == LESS else value


@dataclass(frozen=True)
class RigidifyCertificate:
    epsilon: Fraction
    eta: Fraction
    k: int
    partition: Partition
    block_gauges: tuple[int, ...]
    sup_lo: Fraction
    sup_hi: Fraction
    independence: tuple[dict, ...]
    registry_snapshot: dict

    def to_json(self, metric: FiniteMetric) -> dict:
        return {
            "metric": metric.to_json(),
            "registry": self.registry_snapshot,
            "independence": list(self.independence),
            "sup_bound": {
                "epsilon": _frac_str(self.epsilon),
                "achieved_lo": _frac_str(self.sup_lo),
                "achieved_hi": _frac_str(self.sup_hi),
            },
            "parameters": {
                "eta": _frac_str(self.eta),
                "k": self.k,
                "partition": self.partition.to_json(),
                "block_gauges": list(self.block_gauges),
            },
        }


def rigidify_full(
    d: FiniteMetric,
    epsilon: Fraction,
    seed: int = 0,
    max_precision: int = DEFAULT_MAX_PRECISION,
) -> tuple[FiniteMetric, RigidifyCertificate]:
    """Perturb ``d`` into a metric with pairwise Q-independent distances.

    The output is within ``epsilon`` of ``d`` in sup distance (exactly),
    strongly rigid, and every pair of point pairs carries a validated
    independence certificate.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if d.size < 2:
        raise DomainError("need at least two points")
    if not d.is_rational_valued():
        raise DomainError("the pipeline expects a rational input metric")

    eta = epsilon / 5
    k = 0
    while Fraction(1, 1 << k) > eta:
        k += 1
    registry = ValueRegistry(seed)
    partition = partition_by_diameter(d, eta, max_precision)

    # Per-block metrics: the strongly rigid product metric on one-letter
    # words, one fresh gauge per block; diameter at most 2^-k <= eta.
    block_metrics: list[FiniteMetric] = []
    block_gauges: list[int] = []
    for block in partition.blocks:
        gauge = registry.fresh_gauge(k)
        block_gauges.append(gauge.gauge_id)
        dist = {
            (i, j): tau(gauge, k, (i,), (j,))
            for i in range(len(block))
            for j in range(i + 1, len(block))
        }
        block_metrics.append(
            FiniteMetric.from_entries(
                block,
                [
                    [
                        as_coded(0) if i == j else dist[(min(i, j), max(i, j))]
                        for j in range(len(block))
                    ]
                    for i in range(len(block))
                ],
            )
        )

    hub_metric = _hub_metric(d, partition, eta, k, registry)
    glued = amalgamate(partition, block_metrics, hub_metric)
    glued = glued.restrict(list(d.points))

    sup_lo, sup_hi = _certify_sup_bound(d, glued, epsilon, max_precision)
    rigidity = is_strongly_rigid(glued, max_precision)
    if not rigidity.passed:
        raise UnresolvedComparison(f"strong rigidity not certified: {rigidity.detail}")

    independence = _pairwise_independence(
        glued, d.points, partition, block_metrics, hub_metric, block_gauges, registry
    )
    certificate = RigidifyCertificate(
        epsilon=epsilon,
        eta=eta,
        k=k,
        partition=partition,
        block_gauges=tuple(block_gauges),
        sup_lo=sup_lo,
        sup_hi=sup_hi,
        independence=tuple(independence),
        registry_snapshot=registry.snapshot(),
    )
    return glued, certificate


def _hub_metric(
    d: FiniteMetric,
    partition: Partition,
    eta: Fraction,
    k: int,
    registry: ValueRegistry,
) -> FiniteMetric:
    """Strongly rigid hub metric within ``eta`` of ``d`` on the hubs.

    Hub distances are snapped to integers at step ``eta_h = eta / 2`` and
    replaced by hub-pool values placed strictly inside the scaled windows
    ``(N + 2^-(N+1), N + 2^-N) * eta_h``, which certifies the strict triangle
    inequality and keeps the defect below ``2 * eta_h = eta``.
    """
    hubs = list(partition.hubs)
    if len(hubs) == 1:
        return FiniteMetric.from_entries(hubs, [[0]])
    eta_h = eta / 2
    d_hubs = d.restrict(hubs)
    integers: dict[tuple[int, int], int] = {}
    for i, j in d_hubs.pairs():
        value = d_hubs.at(i, j).rational_value()
        integers[(i, j)] = math.ceil(value / eta_h)
    n_max = max(integers.values())
    # Allocation indices large enough that the coded fuzz of every hub value
    # stays below half the narrowest window and below the least triangle
    # margin eta_h * 2^-(n_max + 1).
    base_index = n_max + 2
    while Fraction(3, 1 << (base_index + 1)) > eta_h * Fraction(1, 1 << (n_max + 3)):
        base_index += 1
    entries: dict[tuple[int, int], CodedReal] = {}
    alloc = base_index
    for i, j in d_hubs.pairs():
        n = integers[(i, j)]
        lo = eta_h * (n + Fraction(1, 1 << (n + 1)))
        hi = eta_h * (n + Fraction(1, 1 << n))
        target = (lo + hi) / 2
        value = registry.hub_value(k, alloc, target)
        hub_alloc = registry.hub_allocations()[alloc]
        fuzz = hub_alloc.q * hub_alloc.basis.eval(4).hi
        if not (lo < hub_alloc.p and hub_alloc.p + fuzz < hi):
            raise UnresolvedComparison("hub value escaped its window")
        entries[(i, j)] = value
        alloc += 1
    return FiniteMetric.from_entries(
        hubs,
        [
            [
                as_coded(0)
                if i == j
                else entries[(min(i, j), max(i, j))]
                for j in range(len(hubs))
            ]
            for i in range(len(hubs))
        ],
    )


def _certify_sup_bound(
    d: FiniteMetric,
    glued: FiniteMetric,
    epsilon: Fraction,
    max_precision: int,
) -> tuple[Fraction, Fraction]:
    """Exact certificate of ``sup |glued - d| <= epsilon``; returns the sup."""
    sup_lo = Fraction(0)
    sup_hi = Fraction(0)
    for i, j in d.pairs():
        gap = _abs_exact(glued.at(i, j) - d.at(i, j), max_precision)
        order = compare(gap, epsilon, max_precision)
        if order == GREATER:
            raise UnresolvedComparison(
                f"sup bound violated at ({d.points[i]}, {d.points[j]})"
            )
        if order == UNRESOLVED:
            raise UnresolvedComparison(
                f"sup bound undecided at ({d.points[i]}, {d.points[j]})"
            )
        enc = _gap_enclosure(gap)
        sup_lo = max(sup_lo, enc.lo)
        sup_hi = max(sup_hi, enc.hi)
    return sup_lo, sup_hi


def _gap_enclosure(gap: CodedReal):
    n = 8
    while True:
        try:
            return gap.eval(n)
        except PrecisionError:
            if n == 0:
                raise
            n //= 2


def _pairwise_independence(
    glued: FiniteMetric,
    points: Sequence[str],
    partition: Partition,
    block_metrics: Sequence[FiniteMetric],
    hub_metric: FiniteMetric,
    block_gauges: Sequence[int],
    registry: ValueRegistry,
) -> list[dict]:
    """One validated certificate per pair of point pairs."""
    decomposed: dict[tuple[str, str], tuple[SumComponent, ...]] = {}
    hub_index_of: dict[tuple[str, str], int] = {}
    for (i, j), alloc in zip(hub_metric.pairs(), sorted(registry.hub_allocations())):
        key = (hub_metric.points[i], hub_metric.points[j])
        hub_index_of[key] = alloc
        hub_index_of[(key[1], key[0])] = alloc

    def spare_gauge(exclude: int) -> int:
        for gid in block_gauges:
            if gid != exclude:
                return gid
        return RESERVED_GAUGE_ID  # single-block runs have no cross pairs anyway

    def components(a: str, b: str) -> tuple[SumComponent, ...]:
        key = (a, b) if a <= b else (b, a)
        if key in decomposed:
            return decomposed[key]
        ba, bb = partition.block_of(a), partition.block_of(b)
        if ba == bb:
            gid = block_gauges[ba]
            comps = (
                SumComponent("block", gauge_id=gid, detail=(a, b), value=glued.distance(a, b)),
                SumComponent("block", gauge_id=spare_gauge(gid), detail=()),
                SumComponent("zero"),
            )
        else:
            ha, hb = partition.hubs[ba], partition.hubs[bb]
            comps = (
                SumComponent(
                    "block",
                    gauge_id=block_gauges[ba],
                    detail=(a, ha),
                    value=block_metrics[ba].distance(a, ha),
                ),
                SumComponent(
                    "block",
                    gauge_id=block_gauges[bb],
                    detail=(hb, b),
                    value=block_metrics[bb].distance(hb, b),
                ),
                SumComponent(
                    "hub",
                    hub_index=hub_index_of[(ha, hb)],
                    detail=(ha, hb),
                    value=hub_metric.distance(ha, hb),
                ),
            )
        decomposed[key] = comps
        return comps

    known = registry.gauge_ids()
    pairs = [(points[i], points[j]) for i, j in glued.pairs()]
    out: list[dict] = []
    for pair in pairs:
        # Each distance is certified independent of 1 (hence irrational):
        # one shared window over its component index sets.
        comps = components(*pair)
        sets = []
        for comp in comps:
            for term in comp.value.terms:
                if term.index_set not in sets:
                    sets.append(term.index_set)
        ks = {t.k for comp in comps for t in comp.value.terms}
        if sets and len(ks) == 1:
            witness = find_interval_trace_witness(sets, ks.pop())
            if witness is not None:
                out.append(
                    {
                        "pair_left": list(pair),
                        "pair_right": ["1"],
                        "trace_witness": witness.to_json(),
                    }
                )
    for a in range(len(pairs)):
        for b in range(a + 1, len(pairs)):
            left = components(*pairs[a])
            right = components(*pairs[b])
            cert = sum_independence_check(left, right, known)
            if cert is None:
                raise UnresolvedComparison(
                    f"independence hypotheses failed for {pairs[a]} vs {pairs[b]}"
                )
            record = {
                "pair_left": list(pairs[a]),
                "pair_right": list(pairs[b]),
                "certificate": cert.to_json(),
            }
            witness = _trace_witness_for(glued, pairs[a], pairs[b])
            if witness is not None:
                record["trace_witness"] = witness.to_json()
            out.append(record)
    return out


def _trace_witness_for(
    glued: FiniteMetric, pair_a: tuple[str, str], pair_b: tuple[str, str]
) -> IntervalTraceWitness | None:
    va, vb = glued.distance(*pair_a), glued.distance(*pair_b)
    ks = {t.k for t in (*va.terms, *vb.terms)}
    if len(ks) != 1 or len(va.terms) != 1 or len(vb.terms) != 1:
        return None
    (k,) = ks
    return find_interval_trace_witness([va.terms[0].index_set, vb.terms[0].index_set], k)


def verify_certificate(data: dict) -> Report:
    """Re-check an emitted certificate from its serialized form alone.

    Beyond replaying the syntactic independence hypotheses and the trace
    witnesses, every tagged component value is recomputed from the raw draws
    recorded in the registry snapshot (block values through replayed gauges,
    hub values as ``p + q * basis``) and compared with the embedded value.
    """
    metric = FiniteMetric.from_json(data["metric"])
    snapshot = data["registry"]
    known = {int(g) for g in snapshot.get("gauges", {})}
    hubs_json = snapshot.get("hubs", {})
    replay = _ComponentReplay(data.get("parameters", {}), snapshot)
    for record in data.get("independence", []):
        if "certificate" not in record and "trace_witness" not in record:
            return Report("fail", (), "empty independence record")
        if "certificate" in record:
            cert = SumIndependenceCertificate.from_json(record["certificate"])
            if not cert.verify(known):
                return Report(
                    "fail",
                    ((tuple(record["pair_left"]), tuple(record["pair_right"])),),
                    "independence certificate failed",
                )
            for side in (cert.left, cert.right):
                for comp in side:
                    problem = replay.check(comp, hubs_json)
                    if problem is not None:
                        return Report("fail", (problem,), "component replay failed")
        if "trace_witness" in record:
            witness = IntervalTraceWitness.from_json(record["trace_witness"])
            if not witness.verify():
                return Report("fail", (), "trace witness failed")
    sup = data.get("sup_bound", {})
    if sup:
        eps = Fraction(sup["epsilon"])
        if Fraction(sup["achieved_hi"]) > eps:
            return Report("fail", (), "claimed sup bound exceeds epsilon")
    rigidity = is_strongly_rigid(metric)
    if not rigidity.passed:
        return Report(rigidity.verdict, rigidity.witnesses, "strong rigidity recheck")
    return Report("pass", (), f"{len(data.get('independence', []))} certificates verified")


class _ComponentReplay:
    """Recomputes tagged component values from snapshot draws."""

    def __init__(self, parameters: dict, snapshot: dict):
        self._snapshot = snapshot
        self._k = int(parameters["k"]) if "k" in parameters else None
        self._gauges: dict[int, object] = {}
        partition = parameters.get("partition")
        self._blocks = (
            [tuple(b) for b in partition["blocks"]] if partition else None
        )

    def _gauge(self, gauge_id: int):
        if gauge_id not in self._gauges:
            self._gauges[gauge_id] = gauge_from_snapshot(gauge_id, self._snapshot)
        return self._gauges[gauge_id]

    def _letters(self, labels: tuple[str, ...]) -> tuple[int, ...] | None:
        if self._blocks is None:
            return None
        for block in self._blocks:
            if all(x in block for x in labels):
                return tuple(block.index(x) for x in labels)
        return None

    def check(self, comp: SumComponent, hubs_json: dict) -> object | None:
        """None when the component replays to its embedded value."""
        try:
            return self._check(comp, hubs_json)
        except DomainError:
            # missing draws or gauges in the snapshot
            return comp.detail or comp.hub_index

    def _check(self, comp: SumComponent, hubs_json: dict) -> object | None:
        if comp.kind == "zero" or comp.value.is_zero_form():
            return None if comp.value.is_zero_form() else comp.detail
        if comp.kind == "hub":
            alloc = hubs_json.get(str(comp.hub_index))
            if alloc is None:
                return comp.hub_index
            basis = CodedReal.from_json(alloc["basis"])
            words = [tuple(w) for w in alloc["words"]]
            replayed_basis = tau(
                self._gauge(RESERVED_GAUGE_ID), int(alloc["k"]), words[0], words[1]
            )
            if replayed_basis != basis:
                return comp.hub_index
            rebuilt = as_coded(Fraction(alloc["p"])) + basis * Fraction(alloc["q"])
            return None if rebuilt == comp.value else comp.hub_index
        if comp.kind == "block":
            if self._k is None:
                return None  # legacy record: nothing to replay against
            letters = self._letters(comp.detail)
            if letters is None or len(letters) != 2:
                return comp.detail
            rebuilt = tau(
                self._gauge(comp.gauge_id), self._k, (letters[0],), (letters[1],)
            )
            return None if rebuilt == comp.value else comp.detail
        return comp.detail
