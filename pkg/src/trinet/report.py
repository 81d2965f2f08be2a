"""Machine-readable run reports (one JSON object per line) and their replay check.

Schema ``trinet-run/1``::

    schema        "trinet-run/1"
    pattern       "cdc" | "ocd" | "cdc-seeds" | "ocd-seed" | "densest"
    algorithm     "mds" | "gnd" | "grd" | "frd" | "ls" | "oracle"
    params        algorithm parameters (epsilon, snapshots, seeds, ...)
    rank          1-based position among the --top-k results
    nodes_a       sorted A-side node ids
    nodes_b       sorted B-side node ids
    labels_a/b    node labels, present only when the input carries labels
    size_a/b      set sizes
    edges         bipartite edges inside the pair
    density       edges / sqrt(size_a * size_b)
    connected_a/b connectivity of the induced G_a / G_b subgraphs
    counts        passes, snapshots, components, ... (deterministic)
    timings_ms    load / decompose / dense / post wall-clock phases
"""
from __future__ import annotations

import json

from .network import NodeSetPair, ScoredSubgraph, Side, TripleNetwork, score

SCHEMA = "trinet-run/1"


def build_report(net: TripleNetwork, pattern: str, algorithm: str, params: dict,
                 sub: ScoredSubgraph, *, rank: int = 1, counts: dict | None = None,
                 timings: dict | None = None) -> dict:
    rep = {
        "schema": SCHEMA,
        "pattern": pattern,
        "algorithm": algorithm,
        "params": params,
        "rank": rank,
        "nodes_a": sub.nodes.sorted_a,
        "nodes_b": sub.nodes.sorted_b,
        "size_a": sub.size_a,
        "size_b": sub.size_b,
        "edges": sub.edges,
        "density": sub.density,
        "connected_a": sub.connected_a,
        "connected_b": sub.connected_b,
        "counts": counts or {},
    }
    if net.labels_a is not None:
        rep["labels_a"] = [net.labels_a[i] for i in rep["nodes_a"]]
    if net.labels_b is not None:
        rep["labels_b"] = [net.labels_b[i] for i in rep["nodes_b"]]
    if timings is not None:
        rep["timings_ms"] = {k: round(v, 3) for k, v in timings.items()}
    return rep


def dumps_report(rep: dict) -> str:
    return json.dumps(rep, sort_keys=True, separators=(",", ":"))


def verify_report(net: TripleNetwork, rep: dict) -> list[str]:
    """Recompute a report's figures from its node sets; returns the mismatches."""
    problems = []
    pair = NodeSetPair(rep["nodes_a"], rep["nodes_b"])
    try:
        sub = score(net, pair)
    except IndexError as exc:
        return [str(exc)]
    for key, value in (("edges", sub.edges), ("density", sub.density),
                       ("connected_a", sub.connected_a), ("connected_b", sub.connected_b),
                       ("size_a", sub.size_a), ("size_b", sub.size_b)):
        if key in rep and rep[key] != value:
            problems.append(f"{key}: reported {rep[key]!r}, recomputed {value!r}")
    pattern = rep.get("pattern")
    if pattern == "cdc" and not (sub.connected_a and sub.connected_b):
        problems.append("cdc result is not connected on both sides")
    if pattern == "ocd" and sub.connected_a == sub.connected_b:
        problems.append("ocd result does not have exactly one connected side")
    params = rep.get("params", {})
    if not set(params.get("seeds_a", [])) <= pair.s_a or not set(params.get("seeds_b", [])) <= pair.s_b:
        problems.append("seeds missing from the reported node sets")
    return problems


def side_label(net: TripleNetwork, side: Side, i: int) -> str:
    return net.label(side, i)
