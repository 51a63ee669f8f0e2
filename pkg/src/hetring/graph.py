"""Inhibition digraphs, (n, m)-ring construction and independent-set machinery.

Edge convention (the only place it is spelled out): ``adj[a, b]`` is True when
node ``a`` inhibits node ``b``, i.e. ``x^(a)`` appears in the exponential factor
of the update for ``x^(b)``.  Everything else goes through :meth:`CouplingGraph.inhibits`,
:meth:`CouplingGraph.inhibitors` and :meth:`CouplingGraph.targets`.

Node indices are 1-based at the public surface.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError, ValidationError

DEFAULT_MAX_NODES = 24


@dataclass(frozen=True, eq=False)
class CouplingGraph:
    """Directed inhibition graph on nodes ``1..n``."""

    n: int
    adj: np.ndarray
    label: str | None = None

    def __post_init__(self):
        adj = np.array(self.adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValidationError(f"adjacency must be square, got shape {adj.shape}")
        if adj.shape[0] != self.n:
            raise ValidationError(f"adjacency has size {adj.shape[0]} but n={self.n}")
        if self.n < 1:
            raise ValidationError("graph needs at least one node")
        if adj.diagonal().any():
            bad = [int(k) + 1 for k in np.flatnonzero(adj.diagonal())]
            raise ValidationError(f"self-inhibition on nodes {bad}")
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)

    def __eq__(self, other):
        if not isinstance(other, CouplingGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.n, self.adj.tobytes()))

    def __repr__(self):
        tag = f" {self.label!r}" if self.label else ""
        return f"<CouplingGraph n={self.n} edges={self.edge_count}{tag}>"

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    @property
    def edge_count(self) -> int:
        return int(self.adj.sum())

    def inhibits(self, a: int, b: int) -> bool:
        """True if node ``a`` inhibits node ``b``."""
        return bool(self.adj[a - 1, b - 1])

    def inhibitors(self, k: int) -> tuple[int, ...]:
        """Nodes inhibiting ``k``, ordered by ring offset ``(k - a) mod n``.

        The offset ordering keeps floating-point sums rotation-equivariant on
        ring graphs.
        """
        return self._inhibitors[k - 1]

    def targets(self, a: int) -> tuple[int, ...]:
        """Nodes inhibited by ``a``, ascending."""
        return self._targets[a - 1]

    @cached_property
    def _inhibitors(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for k in range(self.n):
            srcs = np.flatnonzero(self.adj[:, k])
            srcs = sorted(srcs, key=lambda a: (k - a) % self.n)
            out.append(tuple(int(a) + 1 for a in srcs))
        return tuple(out)

    @cached_property
    def _targets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(b) + 1 for b in np.flatnonzero(row)) for row in self.adj)

    def edges(self) -> list[tuple[int, int]]:
        """All ``(from, to)`` inhibition pairs, 1-based, lexicographic."""
        return [(int(a) + 1, int(b) + 1) for a, b in zip(*np.nonzero(self.adj))]

    @cached_property
    def ring_m(self) -> int | None:
        """``m`` if this graph equals ``make_ring(n, m)`` for some valid m, else None."""
        n = self.n
        for m in range(1, (n + 1) // 2):
            if 2 * m >= n:
                break
            if np.array_equal(self.adj, _ring_adjacency(n, m)):
                return m
        return None

    @property
    def is_ring(self) -> bool:
        return self.ring_m is not None

    def rotate(self, nodes: Iterable[int], shift: int = 1) -> tuple[int, ...]:
        """Apply ``sigma**shift`` to node labels: node k goes to k + shift (mod n)."""
        return tuple(sorted((k - 1 + shift) % self.n + 1 for k in nodes))

    def inhibitor_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """0-based CSR arrays ``(ptr, idx)`` of inhibitors, for the simulation kernels."""
        ptr = [0]
        idx: list[int] = []
        for k in self.nodes:
            idx.extend(a - 1 for a in self.inhibitors(k))
            ptr.append(len(idx))
        return np.asarray(ptr, dtype=np.intp), np.asarray(idx, dtype=np.intp)


@dataclass(frozen=True, order=True)
class ActiveSet:
    """Sorted tuple of active (on) nodes, 1-based."""

    members: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(int(k) for k in self.members)))

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, k) -> bool:
        return k in self.members

    def sort_key(self):
        return (len(self.members), self.members)

    @property
    def label(self) -> str:
        return ",".join(map(str, self.members))

    def __repr__(self):
        return f"ActiveSet({{{self.label}}})"


@dataclass(frozen=True)
class SuppressionProfile:
    active: ActiveSet
    suppressed: dict[int, int]
    growing: tuple[int, ...]

    def suppression_number(self, k: int) -> int:
        return self.suppressed.get(k, 0)

    def classify(self, k: int) -> str:
        if k in self.active:
            return "active"
        if k in self.suppressed:
            return "suppressed"
        return "growing"


def _ring_adjacency(n: int, m: int) -> np.ndarray:
    adj = np.zeros((n, n), dtype=bool)
    for src in range(n):
        for d in range(1, m + 1):
            adj[src, (src + d) % n] = True
    return adj


def make_ring(n: int, m: int = 1) -> CouplingGraph:
    """(n, m)-ring: node k is inhibited by k-1, ..., k-m (mod n)."""
    if n < 3:
        raise DomainError(f"ring needs n >= 3, got n={n}")
    if m < 1 or 2 * m >= n:
        raise DomainError(f"ring needs 1 <= m < n/2, got n={n}, m={m}")
    return CouplingGraph(n, _ring_adjacency(n, m), label=f"({n},{m})-ring")


def from_adjacency(matrix, label: str | None = None) -> CouplingGraph:
    """Wrap a boolean ``n x n`` matrix (row inhibits column) verbatim."""
    adj = np.asarray(matrix)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ValidationError(f"adjacency must be square, got shape {adj.shape}")
    return CouplingGraph(adj.shape[0], adj.astype(bool), label=label)


def from_edges(n: int, edges: Iterable[Iterable[int]], label: str | None = None) -> CouplingGraph:
    """Build a graph from 1-based ``(from, to)`` pairs."""
    if n < 1:
        raise ValidationError("graph needs at least one node")
    adj = np.zeros((n, n), dtype=bool)
    for pair in edges:
        a, b = (int(v) for v in pair)
        if not (1 <= a <= n and 1 <= b <= n):
            raise ValidationError(f"edge {(a, b)} out of range for n={n}")
        adj[a - 1, b - 1] = True
    return CouplingGraph(n, adj, label=label)


def is_independent(g: CouplingGraph, nodes: Iterable[int]) -> bool:
    members = [k - 1 for k in nodes]
    if not members:
        return True
    sub = g.adj[np.ix_(members, members)]
    return not sub.any()


def independent_sets(g: CouplingGraph, max_nodes: int = DEFAULT_MAX_NODES) -> list[ActiveSet]:
    """Every independent node set including the empty one, sorted by size then lexicographically.

    Independence is taken in both directions: no member inhibits another member.
    """
    if g.n > max_nodes:
        raise DomainError(
            f"independent-set enumeration capped at n={max_nodes} (got n={g.n}); "
            "raise max_nodes explicitly if you really want this"
        )
    n = g.n
    conflict = g.adj | g.adj.T
    # bitmask of nodes conflicting with each node
    masks = [sum(1 << int(b) for b in np.flatnonzero(conflict[a])) for a in range(n)]
    found: list[tuple[int, ...]] = []

    def extend(start: int, chosen: list[int], blocked: int):
        found.append(tuple(k + 1 for k in chosen))
        for k in range(start, n):
            if blocked >> k & 1:
                continue
            chosen.append(k)
            extend(k + 1, chosen, blocked | masks[k])
            chosen.pop()

    extend(0, [], 0)
    found.sort(key=lambda s: (len(s), s))
    return [ActiveSet(s) for s in found]


def suppression_profile(g: CouplingGraph, z: ActiveSet | Iterable[int]) -> SuppressionProfile:
    """Suppressed nodes (with their suppression numbers) and growing nodes at active set ``z``."""
    z = z if isinstance(z, ActiveSet) else ActiveSet(tuple(z))
    if not is_independent(g, z):
        raise DomainError(f"active set {{{z.label}}} is not independent")
    suppressed: dict[int, int] = {}
    growing = []
    for k in g.nodes:
        if k in z:
            continue
        count = sum(1 for a in g.inhibitors(k) if a in z)
        if count:
            suppressed[k] = count
        else:
            growing.append(k)
    return SuppressionProfile(z, suppressed, tuple(growing))


def lucas(n: int) -> int:
    """Lucas numbers with L_1 = 1, L_2 = 3."""
    if n < 1:
        raise DomainError("Lucas numbers start at n=1")
    a, b = 1, 3
    if n == 1:
        return a
    for _ in range(n - 2):
        a, b = b, a + b
    return b
