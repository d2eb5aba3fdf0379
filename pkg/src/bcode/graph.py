"""Moral graphs, elimination orderings and induced width."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import OrderingMismatch
from .network import BeliefNetwork


@dataclass(frozen=True)
class UndirectedGraph:
    n: int
    adjacency: tuple[frozenset, ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "UndirectedGraph":
        adj = [set() for _ in range(n)]
        for a, b in edges:
            if a == b:
                continue
            adj[a].add(b)
            adj[b].add(a)
        return cls(n, tuple(frozenset(s) for s in adj))

    def edges(self) -> set[tuple[int, int]]:
        return {(a, b) for a in range(self.n) for b in self.adjacency[a] if a < b}


@dataclass(frozen=True)
class Ordering:
    """A variable ordering X_1..X_n; buckets are processed from the last."""

    sequence: tuple[int, ...]
    width: int
    induced_width: int

    @classmethod
    def along(cls, g: UndirectedGraph, sequence: Sequence[int]) -> "Ordering":
        w, w_star = width_along(g, sequence)
        return cls(tuple(int(v) for v in sequence), w, w_star)

    def position(self) -> dict[int, int]:
        return {v: k for k, v in enumerate(self.sequence)}

    def __len__(self):
        return len(self.sequence)

    def __iter__(self):
        return iter(self.sequence)


def moral_graph(net: BeliefNetwork) -> UndirectedGraph:
    edges = []
    for child, pa in enumerate(net.parents):
        for k, p in enumerate(pa):
            edges.append((p, child))
            for q in pa[k + 1:]:
                edges.append((p, q))
    return UndirectedGraph.from_edges(len(net), edges)


def _check_permutation(n: int, sequence: Sequence[int]) -> None:
    if len(sequence) != n or set(sequence) != set(range(n)):
        raise OrderingMismatch(f"ordering of length {len(sequence)} is not a permutation of 0..{n - 1}")


def width_along(g: UndirectedGraph, ordering) -> tuple[int, int]:
    """Return (width, induced width) of ``g`` along ``ordering``."""
    seq = tuple(ordering.sequence if isinstance(ordering, Ordering) else ordering)
    _check_permutation(g.n, seq)
    pos = {v: k for k, v in enumerate(seq)}
    width = 0
    for v in seq:
        width = max(width, sum(1 for u in g.adjacency[v] if pos[u] < pos[v]))
    adj = [set(s) for s in g.adjacency]
    induced = 0
    for v in reversed(seq):
        earlier = [u for u in adj[v] if pos[u] < pos[v]]
        induced = max(induced, len(earlier))
        for a in earlier:
            adj[a].update(earlier)
            adj[a].discard(a)
    return width, induced


def _fill_in(adj: list[set], v: int) -> int:
    nb = list(adj[v])
    missing = 0
    for k, a in enumerate(nb):
        row = adj[a]
        for b in nb[k + 1:]:
            if b not in row:
                missing += 1
    return missing


def greedy_elimination(g: UndirectedGraph, heuristic: str = "min-fill") -> list[int]:
    """Greedy elimination sequence; ties go to the smallest id."""
    if heuristic == "min-fill":
        score = _fill_in
    elif heuristic == "min-degree":
        def score(adj, v):
            return len(adj[v])
    else:
        raise ValueError(f"unknown heuristic {heuristic!r}")
    adj = [set(s) for s in g.adjacency]
    alive = set(range(g.n))
    cost = {v: score(adj, v) for v in alive}
    elim = []
    while alive:
        v = min(alive, key=lambda u: (cost[u], u))
        nb = adj[v]
        for a in nb:
            adj[a].discard(v)
            adj[a].update(nb)
            adj[a].discard(a)
        alive.discard(v)
        elim.append(v)
        stale = set(nb)
        if heuristic == "min-fill":
            for a in nb:
                stale.update(adj[a])
        for u in stale & alive:
            cost[u] = score(adj, u)
        adj[v] = set()
    return elim


def find_ordering(g: UndirectedGraph, heuristic: str = "min-fill", sequence=None) -> Ordering:
    """Build an ordering; greedy heuristics choose the elimination (last) end first."""
    if heuristic == "given":
        if sequence is None:
            raise ValueError("heuristic 'given' needs an explicit sequence")
        return Ordering.along(g, sequence)
    elim = greedy_elimination(g, heuristic)
    return Ordering.along(g, elim[::-1])
