"""Fixed points, heteroclinic connections and cycles in the phase space of a coupled ring.

Connections come from the combinatorics of suppressed/growing nodes, not from
integrating the map.  A connection leaves fixed point ``Z`` along a growing node
``b``: the target is ``Z | {b}`` minus the active nodes that ``b`` inhibits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import (
    BudgetExceededError,
    DomainError,
    StabilityRegimeError,
    UnsupportedError,
)
from .graph import ActiveSet, CouplingGraph, independent_sets, is_independent, suppression_profile

DEFAULT_CYCLE_BUDGET = 100_000


def active_value(r: float) -> float:
    """Non-zero fixed point of the logistic map, (r - 1) / r."""
    return (r - 1.0) / r


@dataclass(frozen=True)
class FixedPoint:
    active: ActiveSet
    r: float
    n: int

    @property
    def xhat(self) -> float:
        return active_value(self.r)

    @property
    def size(self) -> int:
        return len(self.active)

    @property
    def label(self) -> str:
        return f"xi_{{{self.active.label}}}" if self.active.members else "origin"

    @property
    def key(self) -> str:
        """Short identifier used in DOT/JSON node ids."""
        return "xi_" + "_".join(map(str, self.active.members)) if self.active.members else "origin"

    def state(self) -> np.ndarray:
        x = np.zeros(self.n)
        for k in self.active:
            x[k - 1] = self.xhat
        return x

    @property
    def analytic(self) -> bool:
        """True where the uncoupled active value is stable, 1 < r <= 3."""
        return 1.0 < self.r <= 3.0


@dataclass(frozen=True)
class Connection:
    source: FixedPoint
    target: FixedPoint
    entering: int
    displaced: ActiveSet

    @property
    def kind(self) -> tuple[int, int]:
        return (self.source.size, self.target.size)

    @property
    def kind_label(self) -> str:
        p, q = self.kind
        return f"{p}->{q}"


@dataclass
class HetNetwork:
    graph: CouplingGraph
    r: float
    gamma: float
    fixed_points: list[FixedPoint]
    connections: list[Connection]
    sinks: list[FixedPoint] = field(default_factory=list)

    def __post_init__(self):
        self._index = {fp.active: i for i, fp in enumerate(self.fixed_points)}
        self._out: dict[ActiveSet, list[Connection]] = {fp.active: [] for fp in self.fixed_points}
        for c in self.connections:
            self._out[c.source.active].append(c)

    def index(self, fp: FixedPoint | ActiveSet) -> int:
        key = fp.active if isinstance(fp, FixedPoint) else fp
        return self._index[key]

    def find(self, *nodes: int) -> FixedPoint:
        """Fixed point with exactly these active nodes."""
        return self.fixed_points[self._index[ActiveSet(nodes)]]

    def outgoing(self, fp: FixedPoint) -> list[Connection]:
        return self._out[fp.active]

    def connection(self, source: FixedPoint, target: FixedPoint) -> Connection:
        for c in self._out[source.active]:
            if c.target.active == target.active:
                return c
        raise KeyError(f"no connection {source.label} -> {target.label}")

    def census(self) -> dict[int, int]:
        """Number of fixed points by active count."""
        out: dict[int, int] = {}
        for fp in self.fixed_points:
            out[fp.size] = out.get(fp.size, 0) + 1
        return dict(sorted(out.items()))

    def to_digraph(self) -> nx.DiGraph:
        dg = nx.DiGraph()
        dg.add_nodes_from(range(len(self.fixed_points)))
        dg.add_edges_from((self.index(c.source), self.index(c.target)) for c in self.connections)
        return dg


@dataclass(frozen=True)
class SymmetryClass:
    kind: str  # case_i, case_ii, single_node, none
    param: int | None = None
    equivalent: tuple[tuple[str, int], ...] = ()

    def __str__(self):
        return self.kind if self.param is None else f"{self.kind}({self.param})"


@dataclass(frozen=True)
class CycleDescriptor:
    path: tuple[Connection, ...]
    j: int | None
    symmetric: bool
    rotation: int | None
    symmetry_class: SymmetryClass = SymmetryClass("none")

    @property
    def fixed_points(self) -> tuple[FixedPoint, ...]:
        return tuple(c.source for c in self.path)

    def __len__(self) -> int:
        return len(self.path)

    @property
    def label(self) -> str:
        return " -> ".join(fp.label for fp in self.fixed_points)


def fixed_points(g: CouplingGraph, r: float, include_origin: bool = False) -> list[FixedPoint]:
    """One fixed point per independent set; the origin only on request."""
    if r <= 1.0:
        raise DomainError(f"r must exceed 1 for a non-zero active value, got r={r}")
    out = []
    for z in independent_sets(g):
        if not z.members and not include_origin:
            continue
        out.append(FixedPoint(z, float(r), g.n))
    return out


def _check_gamma(gamma: float):
    if gamma < 0:
        raise DomainError(f"gamma must be >= 0 (inhibitory coupling), got {gamma}")


def linearization_eigenvalues(g: CouplingGraph, fp: FixedPoint, r: float, gamma: float):
    """Per-node multipliers of the linearised map at ``fp`` as ``(node, value, class)`` triples."""
    _check_gamma(gamma)
    xhat = active_value(r)
    prof = suppression_profile(g, fp.active)
    out = []
    for k in g.nodes:
        cls = prof.classify(k)
        if cls == "active":
            val = 2.0 - r
        elif cls == "suppressed":
            val = r * math.exp(-prof.suppressed[k] * gamma * xhat)
        else:
            val = r
        out.append((k, val, cls))
    return out


def saddle_condition(r: float, gamma: float) -> bool:
    return r * math.exp(-gamma * active_value(r)) < 1.0


def connections_from(g: CouplingGraph, fp: FixedPoint, r: float, gamma: float) -> list[Connection]:
    """Outgoing connections of ``fp``, one per growing node, ordered by entering node."""
    _check_gamma(gamma)
    if not saddle_condition(r, gamma):
        raise StabilityRegimeError(
            f"r*exp(-gamma*xhat) = {r * math.exp(-gamma * active_value(r)):.6g} >= 1; "
            "fixed points are not saddles"
        )
    prof = suppression_profile(g, fp.active)
    out = []
    for b in prof.growing:
        displaced = tuple(a for a in g.targets(b) if a in fp.active)
        target = ActiveSet(tuple(k for k in fp.active if k not in displaced) + (b,))
        assert is_independent(g, target)
        out.append(Connection(fp, FixedPoint(target, fp.r, fp.n), b, ActiveSet(displaced)))
    return out


def build_network(g: CouplingGraph, r: float, gamma: float, include_origin: bool = False) -> HetNetwork:
    fps = fixed_points(g, r, include_origin=include_origin)
    by_set = {fp.active: fp for fp in fps}
    conns = []
    for fp in fps:
        for c in connections_from(g, fp, r, gamma):
            # reuse canonical FixedPoint objects so identity comparisons work
            conns.append(Connection(fp, by_set[c.target.active], c.entering, c.displaced))
    sinks = [fp for fp in fps if not any(c.source is fp for c in conns)]
    return HetNetwork(g, float(r), float(gamma), fps, conns, sinks)


def _rotation_between(g: CouplingGraph, a: ActiveSet, b: ActiveSet) -> list[int]:
    return [s for s in range(g.n) if g.rotate(a, s) == b.members]


def _common_rotation(g: CouplingGraph, fps: Sequence[FixedPoint]) -> int | None:
    candidates = None
    k = len(fps)
    for i in range(k):
        shifts = set(_rotation_between(g, fps[i].active, fps[(i + 1) % k].active))
        candidates = shifts if candidates is None else candidates & shifts
        if not candidates:
            return None
    return min(candidates) if candidates else None


def describe_cycle(net: HetNetwork, path: Sequence[Connection]) -> CycleDescriptor:
    sizes = {c.source.size for c in path}
    j = sizes.pop() if len(sizes) == 1 else None
    g = net.graph
    rotation = _common_rotation(g, [c.source for c in path]) if g.is_ring else None
    cyc = CycleDescriptor(tuple(path), j, rotation is not None, rotation)
    if g.is_ring:
        cyc = CycleDescriptor(cyc.path, j, cyc.symmetric, rotation, classify_symmetric(cyc, g))
    return cyc


def enumerate_cycles(net: HetNetwork, max_len: int | None = None, budget: int = DEFAULT_CYCLE_BUDGET) -> list[CycleDescriptor]:
    """Simple directed cycles of the network up to ``max_len``, in a deterministic order.

    Each cycle starts at its lowest-index fixed point; cycles are sorted by length
    then by the index sequence.
    """
    dg = net.to_digraph()
    raw = []
    for count, cyc in enumerate(nx.simple_cycles(dg, length_bound=max_len), start=1):
        if count > budget:
            raise BudgetExceededError(f"more than {budget} simple cycles; raise the budget or bound max_len")
        start = cyc.index(min(cyc))
        raw.append(cyc[start:] + cyc[:start])
    raw.sort(key=lambda c: (len(c), c))
    out = []
    for cyc in raw:
        fps = [net.fixed_points[i] for i in cyc]
        path = [net.connection(fps[i], fps[(i + 1) % len(fps)]) for i in range(len(fps))]
        out.append(describe_cycle(net, path))
    return out


def cycle_from_labels(net: HetNetwork, sequence: Iterable[Iterable[int]]) -> CycleDescriptor:
    """Cycle through the given active sets in order, e.g. ``[(1,), (5,), (4,), (3,), (2,)]``."""
    fps = [net.find(*s) for s in sequence]
    path = [net.connection(fps[i], fps[(i + 1) % len(fps)]) for i in range(len(fps))]
    return describe_cycle(net, path)


def gap_profile(g: CouplingGraph, active: ActiveSet) -> list[int]:
    """Growing-node counts between each (active, suppressed) pair and the next active node.

    For (n,1)-rings, walking forward from active node a: a, a+1 (suppressed), then the
    gap, then the next active node.
    """
    n = g.n
    members = list(active.members)
    gaps = []
    for i, a in enumerate(members):
        nxt = members[(i + 1) % len(members)]
        dist = (nxt - a) % n or n
        gaps.append(dist - 2)
    return gaps


def classify_symmetric(cycle: CycleDescriptor, g: CouplingGraph) -> SymmetryClass:
    """Symmetric-subcycle case of a ring cycle.

    Requires both the arithmetic condition on (n, j) and a common rotation mapping
    each fixed point onto the next.  For j = 2 the two cases coincide: case_i is
    reported and the case_ii parameter is listed in ``equivalent``.
    """
    if not g.is_ring:
        raise UnsupportedError("symmetry classification is only defined for ring graphs")
    if cycle.j is None or cycle.rotation is None:
        return SymmetryClass("none")
    j, n = cycle.j, g.n
    if j == 1:
        return SymmetryClass("single_node")
    if g.ring_m != 1:
        # the spacing cases are derived for nearest-neighbour rings only
        return SymmetryClass("none")
    case_i = (n - 1) // j if (n - 1) % j == 0 and (n - 1) // j >= 2 else None
    case_ii = (n + 1) // j if (n + 1) % j == 0 and (n + 1) // j >= 3 else None
    _assert_gap_shape(g, cycle.fixed_points[0].active)
    if case_i is not None:
        eq = (("case_ii", case_ii),) if case_ii is not None else ()
        return SymmetryClass("case_i", case_i, eq)
    if case_ii is not None:
        return SymmetryClass("case_ii", case_ii)
    return SymmetryClass("none")


def _assert_gap_shape(g: CouplingGraph, active: ActiveSet):
    gaps = gap_profile(g, active)
    lo, hi = min(gaps), max(gaps)
    assert hi - lo <= 1 and (lo == hi or gaps.count(lo) == 1 or gaps.count(hi) == 1), (
        f"symmetric fixed point {{{active.label}}} has gap profile {gaps}"
    )


@dataclass(frozen=True)
class MaximallyActive:
    j_max: int
    verdict: str  # all_sinks, single_cycle, network
    residue: int

    def __str__(self):
        return f"network({self.residue})" if self.verdict == "network" else self.verdict


def maximally_active(g: CouplingGraph) -> MaximallyActive:
    """Largest active count and the residue rule ``n mod (m + 1)`` for an (n, m)-ring."""
    m = g.ring_m
    if m is None:
        raise UnsupportedError("maximally-active classification needs an (n,m)-ring")
    j_max = max(len(z) for z in independent_sets(g))
    p = g.n % (m + 1)
    if p == 0:
        verdict = "all_sinks"
    elif p == 1:
        verdict = "single_cycle"
    else:
        verdict = "network"
    return MaximallyActive(j_max, verdict, p)
