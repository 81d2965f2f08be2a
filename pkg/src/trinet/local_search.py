"""Seeded bottom-up growth producing CDC_seeds and OCD_seed patterns."""
from __future__ import annotations

import heapq
import logging
from collections import deque
from dataclasses import dataclass, field

from .network import (NodeRef, NodeSetPair, Side, TrinetError, TripleNetwork, denser,
                      density_value, is_connected, score)
from .patterns import PatternKind, PatternResult

log = logging.getLogger(__name__)


class SeedError(TrinetError, ValueError):
    pass


@dataclass(frozen=True)
class SeedSpec:
    seeds_a: frozenset = frozenset()
    seeds_b: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "seeds_a", frozenset(int(x) for x in self.seeds_a))
        object.__setattr__(self, "seeds_b", frozenset(int(x) for x in self.seeds_b))
        if not self.seeds_a and not self.seeds_b:
            raise SeedError("at least one seed is required")

    def side(self, side: Side) -> frozenset:
        return self.seeds_a if side is Side.A else self.seeds_b


def _bfs_dist(net: TripleNetwork, side: Side, sources) -> dict[int, int]:
    dist = {s: 0 for s in sources}
    queue = deque(sorted(sources))
    ptr, idx = net.adjacency(side)
    while queue:
        u = queue.popleft()
        for w in idx[ptr[u]:ptr[u + 1]].tolist():
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def seed_spanning_tree(net: TripleNetwork, side: Side, seeds) -> set[int]:
    """Connected superset of ``seeds`` built by attaching, one at a time, the
    seed nearest to the current tree along a shortest path.

    Ties go to the smaller seed index, and among equally short paths to the
    lexicographically smallest node sequence read from the tree outward.
    """
    seeds = set(int(s) for s in seeds)
    if not seeds:
        raise SeedError("seed set is empty")
    n = net.size(side)
    for s in seeds:
        if not 0 <= s < n:
            raise SeedError(f"{side.value}-seed {s} out of range [0, {n})")
    ptr, idx = net.adjacency(side)
    tree = {min(seeds)}
    pending = seeds - tree
    while pending:
        dist = _bfs_dist(net, side, tree)
        reachable = [s for s in pending if s in dist]
        if len(reachable) < len(pending):
            missing = sorted(pending - set(reachable))
            raise SeedError(f"{side.value}-seeds {missing} are not connectable to seed {min(seeds)}")
        target = min(reachable, key=lambda s: (dist[s], s))
        back = _bfs_dist(net, side, [target])
        d = dist[target]
        cur = min(u for u in tree if back.get(u) == d)
        while cur != target:
            d -= 1
            cur = min(w for w in idx[ptr[cur]:ptr[cur + 1]].tolist() if back.get(w) == d)
            tree.add(cur)
        pending = seeds - tree
    return tree


@dataclass
class SearchFrontier:
    """Mutable state of one local search."""

    included: dict = field(default_factory=dict)   # Side -> set
    boundary: dict = field(default_factory=dict)   # Side -> set
    constrained: dict = field(default_factory=dict)  # Side -> bool
    gain: dict = field(default_factory=dict)       # Side -> list[int]
    edges: int = 0
    max_density: float = 0.0

    def density(self) -> float:
        return density_value(self.edges, len(self.included[Side.A]), len(self.included[Side.B]))


def _expected_boundary(net: TripleNetwork, fr: SearchFrontier, side: Side) -> set[int]:
    inc = fr.included[side]
    if fr.constrained[side]:
        ptr, idx = net.adjacency(side)
    else:
        ptr, idx = net.bipartite_adjacency(side.other)
        inc_from = fr.included[side.other]
        return {w for u in inc_from for w in idx[ptr[u]:ptr[u + 1]].tolist()} - inc
    return {w for u in inc for w in idx[ptr[u]:ptr[u + 1]].tolist()} - inc


def local_search(net: TripleNetwork, spec: SeedSpec, *, debug: bool = False) -> PatternResult:
    """Grow seed spanning trees by the boundary node with the most bipartite
    edges into the included sets, while density stays at its running maximum.

    A side without seeds is unconstrained: its boundary is every node with a
    bipartite edge into the other side's included set.  ``subgraph`` holds the
    best state seen, ``final`` the state the loop stopped in.
    """
    for side in Side:
        n = net.size(side)
        for s in spec.side(side):
            if not 0 <= s < n:
                raise SeedError(f"{side.value}-seed {s} out of range [0, {n})")
    fr = SearchFrontier()
    for side in Side:
        seeds = spec.side(side)
        fr.constrained[side] = bool(seeds)
        fr.included[side] = seed_spanning_tree(net, side, seeds) if seeds else set()
        fr.gain[side] = [0] * net.size(side)
    for side in Side:
        ptr, idx = net.bipartite_adjacency(side.other)
        g = fr.gain[side]
        for u in fr.included[side.other]:
            for w in idx[ptr[u]:ptr[u + 1]].tolist():
                g[w] += 1
    fr.edges = sum(fr.gain[Side.A][u] for u in fr.included[Side.A])
    for side in Side:
        fr.boundary[side] = _expected_boundary(net, fr, side)
    fr.max_density = fr.density()

    # max-heap on (gain, side A first, smaller index); stale entries skipped on pop
    heap = []
    for side in Side:
        for v in fr.boundary[side]:
            heap.append((-fr.gain[side][v], side is Side.B, v))
    heapq.heapify(heap)

    best = (fr.edges, len(fr.included[Side.A]), len(fr.included[Side.B]))
    best_sets = (set(fr.included[Side.A]), set(fr.included[Side.B]))
    trace: list[tuple[NodeRef, float]] = []
    limit = net.n_a + net.n_b
    while heap:
        neg, is_b, v = heapq.heappop(heap)
        side = Side.B if is_b else Side.A
        if v not in fr.boundary[side] or -neg != fr.gain[side][v]:
            continue
        _add(net, fr, side, v, heap)
        cur = (fr.edges, len(fr.included[Side.A]), len(fr.included[Side.B]))
        trace.append((NodeRef(side, v), fr.density()))
        # best-so-far is the running maximum, so this also decides the loop
        verdict = denser(*cur, *best)
        if verdict > 0:
            best = cur
            best_sets = (set(fr.included[Side.A]), set(fr.included[Side.B]))
        fr.max_density = density_value(*best)
        if debug:
            _check(net, fr, spec)
        if len(trace) > limit:
            raise AssertionError("local search exceeded n_a + n_b iterations")
        if verdict < 0:
            break
    if not trace:
        log.info("local search: no boundary to grow into; returning the seed trees")

    final = score(net, NodeSetPair(fr.included[Side.A], fr.included[Side.B]), edges=fr.edges)
    best_sub = score(net, NodeSetPair(*best_sets), edges=best[0])
    kind = PatternKind.CDC_SEEDS if spec.seeds_a and spec.seeds_b else PatternKind.OCD_SEED
    prov = {"algorithm": "ls", "seeds_a": sorted(spec.seeds_a), "seeds_b": sorted(spec.seeds_b)}
    return PatternResult(kind, best_sub, prov, {"iterations": len(trace)}, final=final, trace=trace)


def _add(net: TripleNetwork, fr: SearchFrontier, side: Side, v: int, heap: list) -> None:
    other = side.other
    fr.included[side].add(v)
    fr.boundary[side].discard(v)
    fr.edges += fr.gain[side][v]
    if fr.constrained[side]:
        for w in net.neighbors(side, v).tolist():
            if w not in fr.included[side] and w not in fr.boundary[side]:
                fr.boundary[side].add(w)
                heapq.heappush(heap, (-fr.gain[side][w], side is Side.B, w))
    gain = fr.gain[other]
    grow_other = not fr.constrained[other]
    for w in net.bipartite_neighbors(side, v).tolist():
        gain[w] += 1
        if w in fr.included[other]:
            continue
        if grow_other and w not in fr.boundary[other]:
            fr.boundary[other].add(w)
        if w in fr.boundary[other]:
            heapq.heappush(heap, (-gain[w], other is Side.B, w))


def _check(net: TripleNetwork, fr: SearchFrontier, spec: SeedSpec) -> None:
    for side in Side:
        if fr.boundary[side] != _expected_boundary(net, fr, side):
            raise AssertionError(f"{side.value} boundary drifted from its definition")
        if fr.constrained[side] and not is_connected(net, side, fr.included[side]):
            raise AssertionError(f"{side.value} side lost connectivity")
        if not spec.side(side) <= fr.included[side]:
            raise AssertionError("seed dropped from the included set")
