"""CDC and OCD extraction: a dense bipartite phase per ``G_c`` component,
then connected-component post-processing on ``G_a`` and ``G_b``."""
from __future__ import annotations

import enum
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .mds import MdsStats, check_component_cap, densest_in_view
from .network import (EmptyBipartiteError, NoCandidateError, NodeSetPair, ScoredSubgraph, Side, TripleNetwork,
                      bipartite_components, bipartite_view, component_edges, connected_components,
                      density_value, gather_rows, is_connected, rank_subgraphs)
from .peel import PeelCriterion, peel_bulk, peel_sequential

log = logging.getLogger(__name__)

ALGORITHMS = ("mds", "gnd", "grd", "frd")


class PatternKind(str, enum.Enum):
    CDC = "cdc"
    OCD = "ocd"
    CDC_SEEDS = "cdc-seeds"
    OCD_SEED = "ocd-seed"


@dataclass
class MineParams:
    algo: str = "grd"
    epsilon: float = 0.0
    rank_denominator: str = "live"
    snapshots: int = 8
    mds_cap: int | None = None
    top_k: int = 1
    workers: int = 1
    debug: bool = False

    def provenance(self) -> dict:
        prov = {"algorithm": self.algo}
        if self.algo == "frd":
            prov["epsilon"] = self.epsilon
        if self.algo in ("grd", "frd"):
            prov["rank_denominator"] = self.rank_denominator
        if self.algo != "mds":
            prov["snapshots"] = self.snapshots
        return prov


@dataclass
class PatternResult:
    kind: PatternKind
    subgraph: ScoredSubgraph
    provenance: dict
    stats: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    # local search only: the final state next to the best-seen one
    final: ScoredSubgraph | None = None
    trace: list | None = None


# -- candidates -----------------------------------------------------------------

def _labels(net: TripleNetwork, side: Side, comps) -> np.ndarray:
    lab = np.full(net.size(side), -1, dtype=np.int64)
    for k, comp in enumerate(comps):
        lab[np.fromiter(comp, np.int64, len(comp))] = k
    return lab


def _cross_edges(net: TripleNetwork, dense: NodeSetPair):
    """(A-endpoint, B-endpoint) arrays of the E_c edges inside ``dense``."""
    rows = np.fromiter(dense.s_a, np.int64, len(dense.s_a))
    owner, nb = gather_rows(net.ab_ptr, net.ab_idx, rows)
    in_b = np.zeros(net.n_b, dtype=bool)
    in_b[np.fromiter(dense.s_b, np.int64, len(dense.s_b))] = True
    keep = in_b[nb]
    return rows[owner[keep]], nb[keep].astype(np.int64)


def cdc_candidates(net: TripleNetwork, dense: NodeSetPair) -> list[ScoredSubgraph]:
    """Every (component of G_a[S_a], component of G_b[S_b]) pair joined by at
    least one bipartite edge, densest first."""
    comps_a = connected_components(net, Side.A, dense.s_a)
    comps_b = connected_components(net, Side.B, dense.s_b)
    if not comps_a or not comps_b:
        return []
    u, v = _cross_edges(net, dense)
    la = _labels(net, Side.A, comps_a)[u]
    lb = _labels(net, Side.B, comps_b)[v]
    codes, counts = np.unique(la * len(comps_b) + lb, return_counts=True)
    out = []
    for code, e in zip(codes.tolist(), counts.tolist()):
        ca, cb = comps_a[code // len(comps_b)], comps_b[code % len(comps_b)]
        out.append(ScoredSubgraph(NodeSetPair(ca, cb), density_value(e, len(ca), len(cb)),
                                  True, True, e))
    return rank_subgraphs(out)


def ocd_candidates(net: TripleNetwork, dense: NodeSetPair) -> list[ScoredSubgraph]:
    """Pairs (C_a, S_b) and (S_a, C_b) with exactly one connected side."""
    conn_a = is_connected(net, Side.A, dense.s_a)
    conn_b = is_connected(net, Side.B, dense.s_b)
    u, v = _cross_edges(net, dense)
    out = []
    if not conn_b:
        comps_a = connected_components(net, Side.A, dense.s_a)
        counts = np.bincount(_labels(net, Side.A, comps_a)[u], minlength=len(comps_a))
        for ca, e in zip(comps_a, counts.tolist()):
            if e:
                out.append(ScoredSubgraph(NodeSetPair(ca, dense.s_b),
                                          density_value(e, len(ca), len(dense.s_b)), True, False, e))
    if not conn_a:
        comps_b = connected_components(net, Side.B, dense.s_b)
        counts = np.bincount(_labels(net, Side.B, comps_b)[v], minlength=len(comps_b))
        for cb, e in zip(comps_b, counts.tolist()):
            if e:
                out.append(ScoredSubgraph(NodeSetPair(dense.s_a, cb),
                                          density_value(e, len(dense.s_a), len(cb)), False, True, e))
    return rank_subgraphs(out)


# -- mining ------------------------------------------------------------------------

def _dense_phase(net: TripleNetwork, comp: NodeSetPair, params: MineParams, stats: dict):
    view = bipartite_view(net, comp)
    if params.algo == "mds":
        ms = MdsStats()
        la, lb, _ = densest_in_view(view, ms, debug=params.debug)
        stats["min_cuts"] += ms.min_cuts
        stats["passes"] += ms.ratios
        stats["snapshots"] += 1
        return [view.pair(la, lb)]
    if params.algo == "frd":
        traj = peel_bulk(view, params.epsilon, params.rank_denominator, params.debug)
    else:
        crit = PeelCriterion.DEGREE if params.algo == "gnd" else PeelCriterion.RANK
        traj = peel_sequential(view, crit, params.rank_denominator, params.debug)
    stats["passes"] += traj.passes
    steps = traj.top_snapshots(max(1, params.snapshots))
    stats["snapshots"] += len(steps)
    return [traj.pair(k) for k in steps]


def _mine_component(net: TripleNetwork, comp: NodeSetPair, kind: PatternKind, params: MineParams):
    stats = {"passes": 0, "snapshots": 0, "min_cuts": 0, "candidates": 0}
    t0 = time.perf_counter()
    dense = _dense_phase(net, comp, params, stats)
    t1 = time.perf_counter()
    extract = cdc_candidates if kind is PatternKind.CDC else ocd_candidates
    cands = []
    for pair in dense:
        cands.extend(extract(net, pair))
    cands = rank_subgraphs(cands)
    stats["candidates"] = len(cands)
    t2 = time.perf_counter()
    return cands[:params.top_k], stats, {"dense": (t1 - t0) * 1e3, "post": (t2 - t1) * 1e3}


_worker_net = None


def _worker_init(net):
    global _worker_net
    _worker_net = net


def _worker_run(args):
    return _mine_component(_worker_net, *args)


def _kth(top: list[ScoredSubgraph], k: int):
    return top[k - 1] if len(top) >= k else None


def _cannot_reach(edges_in_comp: int, bar: ScoredSubgraph | None) -> bool:
    # no pair inside a component with e edges is denser than sqrt(e)
    return bar is not None and edges_in_comp * bar.size_a * bar.size_b < bar.edges ** 2


def mine(net: TripleNetwork, kind: PatternKind | str, params: MineParams | None = None) -> list[PatternResult]:
    """Top-``params.top_k`` CDC or OCD results, best first.

    Counters in ``stats`` cover only the components able to reach the final
    k-th best density, which every execution order processes; they are
    therefore identical for any worker count.
    """
    params = params or MineParams()
    kind = PatternKind(kind)
    if kind not in (PatternKind.CDC, PatternKind.OCD):
        raise ValueError("seeded patterns are mined with local_search")
    if params.algo not in ALGORITHMS:
        raise ValueError(f"algo must be one of {ALGORITHMS}")
    if params.top_k < 1:
        raise ValueError("top_k must be at least 1")
    if net.m_c == 0:
        raise EmptyBipartiteError("bipartite graph has no edges")

    t0 = time.perf_counter()
    comps = bipartite_components(net)
    comp_edges = [component_edges(net, c) for c in comps]
    timings = {"decompose": (time.perf_counter() - t0) * 1e3, "dense": 0.0, "post": 0.0}
    if params.algo == "mds":
        check_component_cap(comps, params.mds_cap)

    results: dict[int, tuple] = {}
    if params.workers > 1 and len(comps) > 1:
        with ProcessPoolExecutor(params.workers, initializer=_worker_init, initargs=(net,)) as ex:
            jobs = [(c, kind, params) for c in comps]
            for i, res in enumerate(ex.map(_worker_run, jobs)):
                results[i] = res
    else:
        top: list[ScoredSubgraph] = []
        for i, comp in enumerate(comps):
            if _cannot_reach(comp_edges[i], _kth(top, params.top_k)):
                continue
            results[i] = _mine_component(net, comp, kind, params)
            top = rank_subgraphs(top + results[i][0])[:params.top_k]

    top = rank_subgraphs(c for res in results.values() for c in res[0])[:params.top_k]
    if not top:
        raise NoCandidateError(f"no {kind.value.upper()} candidate found")
    bar = _kth(top, params.top_k)
    stats = {"components": len(comps), "components_relevant": 0,
             "passes": 0, "snapshots": 0, "min_cuts": 0, "candidates": 0}
    for i, (_, st, tm) in results.items():
        timings["dense"] += tm["dense"]
        timings["post"] += tm["post"]
        if _cannot_reach(comp_edges[i], bar):
            continue
        stats["components_relevant"] += 1
        for key in ("passes", "snapshots", "min_cuts", "candidates"):
            stats[key] += st[key]
    if params.algo != "mds":
        del stats["min_cuts"]
    prov = params.provenance()
    return [PatternResult(kind, sub, dict(prov, rank=r + 1), dict(stats), dict(timings))
            for r, sub in enumerate(top)]


def mine_cdc(net: TripleNetwork, algo: str = "grd", **kw) -> PatternResult:
    return mine(net, PatternKind.CDC, MineParams(algo=algo, **kw))[0]


def mine_ocd(net: TripleNetwork, algo: str = "grd", **kw) -> PatternResult:
    return mine(net, PatternKind.OCD, MineParams(algo=algo, **kw))[0]
