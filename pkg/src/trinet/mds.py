"""Exact densest bipartite subgraph by ratio guessing and min-cut tests.

For a guessed side ratio ``c = |S|/|T|`` and a density guess ``g`` the flow
network below has min cut ``2m - max f(S, T)`` where

    f(S, T) = 2|E(S, T)| - g (|S|/sqrt(c) + sqrt(c)|T|)

and the maximum ranges over all node subsets (f(empty, empty) = 0).  Since
``|S|/sqrt(c) + sqrt(c)|T| >= 2 sqrt(|S||T|)``, any pair with ``f > 0`` is
strictly denser than ``g``; conversely a pair whose ratio is exactly ``c``
and whose density exceeds ``g`` has ``f > 0``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .maxflow import FlowNetwork, min_cut
from .network import (BipartiteView, EmptyBipartiteError, ScoredSubgraph, TrinetError, TripleNetwork,
                      bipartite_components, bipartite_view, component_edges, denser, density_value,
                      score)

log = logging.getLogger(__name__)

SOURCE, SINK = 0, 1


@dataclass(frozen=True, order=True)
class RatioGuess:
    value: Fraction

    @property
    def i(self) -> int:
        return self.value.numerator

    @property
    def j(self) -> int:
        return self.value.denominator

    def __float__(self):
        return float(self.value)


def enumerate_ratios(n_a: int, n_b: int) -> list[RatioGuess]:
    """All distinct ``i/j`` with ``1 <= i <= n_a``, ``1 <= j <= n_b``, ascending."""
    if n_a < 1 or n_b < 1:
        raise ValueError("both sides need at least one node")
    values = {Fraction(i, j) for i in range(1, n_a + 1) for j in range(1, n_b + 1)
              if math.gcd(i, j) == 1}
    return [RatioGuess(v) for v in sorted(values)]


def build_flow_network(view: BipartiteView, c: float, g: float) -> FlowNetwork:
    """Node ids: 0 source, 1 sink, then A-nodes, then B-nodes (view-local order)."""
    if c <= 0 or g <= 0:
        raise ValueError("ratio and density guesses must be positive")
    root = math.sqrt(c)
    fn = FlowNetwork(n=2 + view.n_a + view.n_b, source=SOURCE, sink=SINK)
    deg = np.diff(view.ab_ptr)
    off_b = 2 + view.n_a
    cost_a, cost_b = g / root, g * root
    for a in range(view.n_a):
        fn.add_arc(SOURCE, 2 + a, 2.0 * deg[a])
        fn.add_arc(2 + a, SINK, cost_a)
        for b in view.ab_idx[view.ab_ptr[a]:view.ab_ptr[a + 1]].tolist():
            fn.add_arc(2 + a, off_b + b, 2.0)
    for b in range(view.n_b):
        fn.add_arc(off_b + b, SINK, cost_b)
    return fn


@dataclass
class MdsStats:
    min_cuts: int = 0
    ratios: int = 0
    ratios_pruned: int = 0
    clamps: int = 0
    components: int = 0


@dataclass
class _Best:
    local_a: list
    local_b: list
    edges: int

    @property
    def density(self) -> float:
        return density_value(self.edges, len(self.local_a), len(self.local_b))

    def beaten_by(self, other: "_Best") -> bool:
        return denser(other.edges, len(other.local_a), len(other.local_b),
                      self.edges, len(self.local_a), len(self.local_b)) > 0


def _feasible(view: BipartiteView, c: float, g: float, stats: MdsStats) -> _Best | None:
    fn = build_flow_network(view, c, g)
    _, side = min_cut(fn)
    stats.min_cuts += 1
    side.discard(SOURCE)
    if not side:
        return None
    off_b = 2 + view.n_a
    la = sorted(x - 2 for x in side if 2 <= x < off_b)
    lb = sorted(x - off_b for x in side if x >= off_b)
    if not la or not lb:
        return None
    lbset = set(lb)
    edges = sum(1 for a in la for b in view.ab_idx[view.ab_ptr[a]:view.ab_ptr[a + 1]].tolist()
                if b in lbset)
    return _Best(la, lb, edges)


def densest_in_view(view: BipartiteView, stats: MdsStats | None = None,
                    debug: bool = False) -> tuple[list, list, int]:
    """Exact densest subgraph of a bipartite view, as view-local node lists."""
    stats = stats if stats is not None else MdsStats()
    na, nb = view.n_a, view.n_b
    best = _Best(list(range(na)), list(range(nb)), view.m)
    top = math.sqrt(na * nb)
    step = 1.0 / (na * na * nb * nb)
    for r in enumerate_ratios(na, nb):
        stats.ratios += 1
        c = float(r)
        # a ratio that cannot beat the current best at g = best is skipped;
        # infeasibility there certifies no pair of this exact ratio is denser
        w = _feasible(view, c, best.density, stats)
        if w is None or not best.beaten_by(w):
            stats.ratios_pruned += 1
            continue
        best = w
        low, high = w.density, top
        while high - low >= step:
            mid = (low + high) / 2.0
            w = _feasible(view, c, mid, stats)
            if w is not None:
                if best.beaten_by(w):
                    best = w
                low = max(mid, w.density)
                if low > high:
                    stats.clamps += 1
                    low = high
            else:
                high = mid
        # the step may exceed the gap between distinct densities; finish by
        # re-testing at the incumbent density until nothing denser exists
        while True:
            w = _feasible(view, c, best.density, stats)
            if w is None or not best.beaten_by(w):
                break
            best = w
    if debug:
        _self_check(view, best, stats)
    return best.local_a, best.local_b, best.edges


def _self_check(view: BipartiteView, best: _Best, stats: MdsStats) -> None:
    c = len(best.local_a) / len(best.local_b)
    g = best.density * (1 - 1e-6)
    if g > 0 and _feasible(view, c, g, stats) is None:
        raise AssertionError("feasibility test below the optimum returned an empty cut")


def mds_densest_bipartite(net: TripleNetwork, *, max_component_nodes: int | None = None,
                          stats: MdsStats | None = None, debug: bool = False) -> ScoredSubgraph:
    """Exact maximum of the bipartite density over all nonempty pairs.

    Works per bipartite component, largest first; a component whose edge
    count ``e`` satisfies ``sqrt(e) <`` best density so far cannot win and is
    skipped (density never exceeds ``sqrt(e)``).
    """
    if net.m_c == 0:
        raise EmptyBipartiteError("bipartite graph has no edges")
    stats = stats if stats is not None else MdsStats()
    comps = bipartite_components(net)
    check_component_cap(comps, max_component_nodes)
    best = None  # (edges, pair)
    for comp in comps:
        if best is not None and component_edges(net, comp) * len(best[1].s_a) * len(best[1].s_b) < best[0] ** 2:
            continue
        view = bipartite_view(net, comp)
        stats.components += 1
        la, lb, e = densest_in_view(view, stats, debug=debug)
        pair = view.pair(la, lb)
        if best is None or denser(e, len(la), len(lb), best[0], len(best[1].s_a), len(best[1].s_b)) > 0:
            best = (e, pair)
    result = score(net, best[1], edges=best[0])
    if debug:
        recomputed = score(net, best[1])
        assert abs(recomputed.density - result.density) <= 1e-9
    return result


class MdsTooLargeError(TrinetError):
    pass


def check_component_cap(comps, cap: int | None) -> None:
    if cap is None:
        return
    for comp in comps:
        size = len(comp.s_a) + len(comp.s_b)
        if size > cap:
            raise MdsTooLargeError(
                f"bipartite component with {size} nodes exceeds the MDS cap of {cap}; "
                "use a greedy algorithm or raise the cap")
