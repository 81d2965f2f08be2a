"""Greedy node-deletion heuristics for dense bipartite subgraphs.

GND deletes the minimum-degree node, GRD the minimum-rank node (bipartite
degree over the opposite side's size), FRD every node whose rank is below
``(1 + eps)`` times the mean rank.  All of them return the densest alive
set seen along the way.
"""
from __future__ import annotations

import enum
import heapq
import logging
from dataclasses import dataclass, field

import numpy as np

from .network import (BipartiteView, EmptyBipartiteError, NodeRef, NodeSetPair, ScoredSubgraph,
                      Side, TripleNetwork, bipartite_view, denser, gather_rows,
                      score)

log = logging.getLogger(__name__)

RANK_DENOMINATORS = ("live", "original")


class PeelCriterion(str, enum.Enum):
    DEGREE = "degree"
    RANK = "rank"


@dataclass
class PeelTrajectory:
    """Audit log of one peel over a bipartite view.

    Deletions of step ``k`` (1-based) are ``order[step_ptr[k-1]:step_ptr[k]]``,
    encoded view-locally as ``a`` for A-nodes and ``n_a + b`` for B-nodes.
    Step 0 is the untouched view.
    """

    view: BipartiteView
    order: np.ndarray
    step_ptr: np.ndarray
    edges: np.ndarray
    live_a: np.ndarray
    live_b: np.ndarray
    best_step: int
    snapshots: list = field(default_factory=list)

    @property
    def passes(self) -> int:
        return len(self.step_ptr) - 1

    @property
    def densities(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            d = self.edges / np.sqrt(self.live_a.astype(float) * self.live_b)
        return np.where((self.live_a > 0) & (self.live_b > 0), d, 0.0)

    def alive_local(self, step: int):
        dead = self.order[:self.step_ptr[step]]
        na = self.view.n_a
        alive_a = np.ones(na, dtype=bool)
        alive_b = np.ones(self.view.n_b, dtype=bool)
        alive_a[dead[dead < na]] = False
        alive_b[dead[dead >= na] - na] = False
        return np.flatnonzero(alive_a), np.flatnonzero(alive_b)

    def pair(self, step: int) -> NodeSetPair:
        return self.view.pair(*self.alive_local(step))

    def top_snapshots(self, k: int) -> list[int]:
        """The ``k`` densest recorded maxima, best first."""
        return list(reversed(self.snapshots[-k:])) if k > 0 else []

    def steps(self) -> list[tuple[list[NodeRef], float]]:
        dens = self.densities
        out = []
        na = self.view.n_a
        for k in range(1, len(self.step_ptr)):
            chunk = self.order[self.step_ptr[k - 1]:self.step_ptr[k]].tolist()
            refs = [NodeRef(Side.A, int(self.view.a_ids[c])) if c < na
                    else NodeRef(Side.B, int(self.view.b_ids[c - na])) for c in chunk]
            out.append((refs, float(dens[k])))
        return out


def _require_edges(view: BipartiteView):
    if view.m == 0:
        raise EmptyBipartiteError("bipartite graph has no edges")


def _recount(view, alive_a, alive_b):
    da = [0] * view.n_a
    db = [0] * view.n_b
    for a in range(view.n_a):
        if not alive_a[a]:
            continue
        for b in view.ab_idx[view.ab_ptr[a]:view.ab_ptr[a + 1]].tolist():
            if alive_b[b]:
                da[a] += 1
                db[b] += 1
    return da, db


def peel_sequential(view: BipartiteView, criterion: PeelCriterion,
                    rank_denominator: str = "live", debug: bool = False) -> PeelTrajectory:
    """One node per step.  Two lazily-invalidated heaps keyed on (degree,
    index), one per side; within a side rank order equals degree order, so
    the global minimum is one of the two heap tops."""
    _require_edges(view)
    if rank_denominator not in RANK_DENOMINATORS:
        raise ValueError(f"rank_denominator must be one of {RANK_DENOMINATORS}")
    criterion = PeelCriterion(criterion)
    na, nb = view.n_a, view.n_b
    deg_a = np.diff(view.ab_ptr).tolist()
    deg_b = np.diff(view.ba_ptr).tolist()
    alive_a = [True] * na
    alive_b = [True] * nb
    shift = max(na, nb).bit_length()
    low = (1 << shift) - 1
    heap_a = [(d << shift) | i for i, d in enumerate(deg_a)]
    heap_b = [(d << shift) | i for i, d in enumerate(deg_b)]
    heapq.heapify(heap_a)
    heapq.heapify(heap_b)
    ab_ptr, ab_idx, ba_ptr, ba_idx = view.ab_ptr, view.ab_idx, view.ba_ptr, view.ba_idx
    by_rank = criterion is PeelCriterion.RANK
    live_den = rank_denominator == "live"

    live_a, live_b, m = na, nb, view.m
    order = []
    edges = [m]
    sizes_a = [na]
    sizes_b = [nb]
    best = (m, na, nb)
    best_step = 0
    snapshots = [0]
    push, pop = heapq.heappush, heapq.heappop

    while live_a and live_b:
        while True:
            key = heap_a[0]
            i = key & low
            if alive_a[i] and deg_a[i] == key >> shift:
                break
            pop(heap_a)
        while True:
            key = heap_b[0]
            j = key & low
            if alive_b[j] and deg_b[j] == key >> shift:
                break
            pop(heap_b)
        da, db = deg_a[i], deg_b[j]
        if by_rank:
            den_a, den_b = (live_a, live_b) if live_den else (na, nb)
            # da/den_b <= db/den_a, ties to side A
            take_a = da * den_a <= db * den_b
        else:
            take_a = da <= db
        if take_a:
            pop(heap_a)
            alive_a[i] = False
            live_a -= 1
            m -= da
            for w in ab_idx[ab_ptr[i]:ab_ptr[i + 1]].tolist():
                if alive_b[w]:
                    d = deg_b[w] - 1
                    deg_b[w] = d
                    push(heap_b, (d << shift) | w)
            order.append(i)
        else:
            pop(heap_b)
            alive_b[j] = False
            live_b -= 1
            m -= db
            for w in ba_idx[ba_ptr[j]:ba_ptr[j + 1]].tolist():
                if alive_a[w]:
                    d = deg_a[w] - 1
                    deg_a[w] = d
                    push(heap_a, (d << shift) | w)
            order.append(na + j)
        edges.append(m)
        sizes_a.append(live_a)
        sizes_b.append(live_b)
        if live_a and live_b and denser(m, live_a, live_b, *best) > 0:
            best = (m, live_a, live_b)
            best_step = len(order)
            snapshots.append(best_step)
        if debug and len(order) % 64 == 0:
            _check_degrees(view, alive_a, alive_b, deg_a, deg_b)

    n = len(order)
    return PeelTrajectory(view, np.array(order, dtype=np.int64), np.arange(n + 1, dtype=np.int64),
                          np.array(edges, dtype=np.int64), np.array(sizes_a, dtype=np.int64),
                          np.array(sizes_b, dtype=np.int64), best_step, snapshots)


def _check_degrees(view, alive_a, alive_b, deg_a, deg_b):
    ra, rb = _recount(view, alive_a, alive_b)
    for a in range(view.n_a):
        if alive_a[a] and ra[a] != deg_a[a]:
            raise AssertionError(f"live degree of A-node {a} drifted")
    for b in range(view.n_b):
        if alive_b[b] and rb[b] != deg_b[b]:
            raise AssertionError(f"live degree of B-node {b} drifted")


def peel_bulk(view: BipartiteView, epsilon: float, rank_denominator: str = "live",
              debug: bool = False) -> PeelTrajectory:
    """FRD: per pass, delete every alive node with rank < (1 + eps) * mean rank.

    The mean is pooled over both sides.  When a pass would delete nothing
    the single minimum-rank node goes instead, so the loop always advances.
    """
    _require_edges(view)
    if not -1.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (-1, 1), got {epsilon}")
    if rank_denominator not in RANK_DENOMINATORS:
        raise ValueError(f"rank_denominator must be one of {RANK_DENOMINATORS}")
    na, nb = view.n_a, view.n_b
    deg_a = np.diff(view.ab_ptr).astype(np.int64)
    deg_b = np.diff(view.ba_ptr).astype(np.int64)
    alive_a = np.ones(na, dtype=bool)
    alive_b = np.ones(nb, dtype=bool)
    live_a, live_b, m = na, nb, view.m
    order = []
    step_ptr = [0]
    edges, sizes_a, sizes_b = [m], [na], [nb]
    best = (m, na, nb)
    best_step = 0
    snapshots = [0]
    done = 0
    factor = 1.0 + epsilon

    while live_a and live_b:
        den_a, den_b = (live_a, live_b) if rank_denominator == "live" else (na, nb)
        n_live = live_a + live_b
        # rank(a) = deg/den_b and the pooled mean rank is m (den_a + den_b) / (den_a den_b n_live);
        # both sides of the test are scaled by den_a den_b n_live to stay integral
        total = m * (den_a + den_b)
        lhs_a = deg_a * (den_a * n_live)
        lhs_b = deg_b * (den_b * n_live)
        if epsilon == 0.0:
            kill_a = alive_a & (lhs_a < total)
            kill_b = alive_b & (lhs_b < total)
        else:
            thresh = factor * total
            kill_a = alive_a & (lhs_a.astype(float) < thresh)
            kill_b = alive_b & (lhs_b.astype(float) < thresh)
        ia = np.flatnonzero(kill_a)
        ib = np.flatnonzero(kill_b)
        if not len(ia) and not len(ib):
            ia, ib = _min_rank_node(deg_a, deg_b, alive_a, alive_b, den_a, den_b)
        alive_a[ia] = False
        alive_b[ib] = False
        live_a -= len(ia)
        live_b -= len(ib)
        _, nb_of_a = gather_rows(view.ab_ptr, view.ab_idx, ia)
        _, na_of_b = gather_rows(view.ba_ptr, view.ba_idx, ib)
        deg_b -= np.bincount(nb_of_a, minlength=nb)
        deg_a -= np.bincount(na_of_b, minlength=na)
        m = int(deg_a[alive_a].sum())
        order.append(ia)
        order.append(ib + na)
        done += len(ia) + len(ib)
        step_ptr.append(done)
        edges.append(m)
        sizes_a.append(live_a)
        sizes_b.append(live_b)
        if live_a and live_b and denser(m, live_a, live_b, *best) > 0:
            best = (m, live_a, live_b)
            best_step = len(step_ptr) - 1
            snapshots.append(best_step)
        if debug:
            ra, rb = _recount(view, alive_a.tolist(), alive_b.tolist())
            assert np.array_equal(np.asarray(ra)[alive_a], deg_a[alive_a])
            assert np.array_equal(np.asarray(rb)[alive_b], deg_b[alive_b])

    flat = np.concatenate(order).astype(np.int64) if order else np.empty(0, np.int64)
    return PeelTrajectory(view, flat, np.array(step_ptr, dtype=np.int64),
                          np.array(edges, dtype=np.int64), np.array(sizes_a, dtype=np.int64),
                          np.array(sizes_b, dtype=np.int64), best_step, snapshots)


def _min_rank_node(deg_a, deg_b, alive_a, alive_b, den_a, den_b):
    big = np.iinfo(np.int64).max
    i = int(np.argmin(np.where(alive_a, deg_a, big)))
    j = int(np.argmin(np.where(alive_b, deg_b, big)))
    empty = np.empty(0, dtype=np.int64)
    if int(deg_a[i]) * den_a <= int(deg_b[j]) * den_b:
        return np.array([i]), empty
    return empty, np.array([j])


def _result(net: TripleNetwork, traj: PeelTrajectory) -> ScoredSubgraph:
    pair = traj.pair(traj.best_step)
    return score(net, pair, edges=int(traj.edges[traj.best_step]))


def greedy_peel(net: TripleNetwork, criterion: PeelCriterion | str, *,
                within: NodeSetPair | None = None, rank_denominator: str = "live",
                debug: bool = False) -> ScoredSubgraph:
    """GND (``criterion="degree"``) or GRD (``"rank"``); densest alive set seen."""
    view = bipartite_view(net, within)
    return _result(net, peel_sequential(view, criterion, rank_denominator, debug))


def fast_rank_deletion(net: TripleNetwork, epsilon: float, *, within: NodeSetPair | None = None,
                       rank_denominator: str = "live", debug: bool = False) -> ScoredSubgraph:
    view = bipartite_view(net, within)
    return _result(net, peel_bulk(view, epsilon, rank_denominator, debug))


def peel_trajectory(net: TripleNetwork, criterion: PeelCriterion | str = PeelCriterion.RANK,
                    epsilon: float | None = None, *, within: NodeSetPair | None = None,
                    rank_denominator: str = "live") -> PeelTrajectory:
    """Full deletion log: sequential when ``epsilon`` is None, FRD otherwise."""
    view = bipartite_view(net, within)
    if epsilon is None:
        return peel_sequential(view, criterion, rank_denominator)
    return peel_bulk(view, epsilon, rank_denominator)
