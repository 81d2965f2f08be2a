"""Exhaustive reference miners for small networks.

Every pair of nonempty node subsets is enumerated with per-side bitmasks.
These are the trust anchor for the tests, so they favour obviousness over
speed.
"""
from __future__ import annotations

from .network import (NoCandidateError, NodeSetPair, ScoredSubgraph, Side, TrinetError,
                      TripleNetwork, denser, score)

MAX_TOTAL_NODES = 16


class OracleLimitError(TrinetError):
    pass


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _lex_key(mask: int) -> list[int]:
    return _bits(mask)


def _connected_masks(net: TripleNetwork, side: Side) -> list[bool]:
    n = net.size(side)
    nbr = [0] * n
    for u in range(n):
        for w in net.neighbors(side, u).tolist():
            nbr[u] |= 1 << w
    flags = [False] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        seen = low
        frontier = low
        while frontier:
            grow = 0
            for u in _bits(frontier):
                grow |= nbr[u]
            frontier = grow & mask & ~seen
            seen |= frontier
        flags[mask] = seen == mask
    return flags


def _search(net: TripleNetwork, accept, limit: int) -> ScoredSubgraph:
    if net.n_a + net.n_b > limit:
        raise OracleLimitError(
            f"{net.n_a + net.n_b} nodes exceeds the exhaustive-search limit of {limit}")
    adj = [0] * net.n_a
    for u in range(net.n_a):
        for v in net.bipartite_neighbors(Side.A, u).tolist():
            adj[u] |= 1 << v
    conn_a = _connected_masks(net, Side.A)
    conn_b = _connected_masks(net, Side.B)
    best = None  # (edges, |S_a|, |S_b|, mask_a, mask_b)
    for ma in range(1, 1 << net.n_a):
        rows = [adj[u] for u in _bits(ma)]
        sa = len(rows)
        for mb in range(1, 1 << net.n_b):
            if not accept(conn_a[ma], conn_b[mb]):
                continue
            e = sum(bin(r & mb).count("1") for r in rows)
            if e == 0:
                continue
            sb = bin(mb).count("1")
            if best is None:
                best = (e, sa, sb, ma, mb)
                continue
            c = denser(e, sa, sb, best[0], best[1], best[2])
            if c > 0 or (c == 0 and (_lex_key(ma), _lex_key(mb)) < (_lex_key(best[3]), _lex_key(best[4]))):
                best = (e, sa, sb, ma, mb)
    if best is None:
        raise NoCandidateError("no node-set pair satisfies the constraint")
    pair = NodeSetPair(_bits(best[3]), _bits(best[4]))
    return score(net, pair)


def brute_force_densest_bipartite(net: TripleNetwork, limit: int = MAX_TOTAL_NODES) -> ScoredSubgraph:
    """Densest pair with no connectivity requirement."""
    return _search(net, lambda ca, cb: True, limit)


def brute_force_cdc(net: TripleNetwork, limit: int = MAX_TOTAL_NODES) -> ScoredSubgraph:
    """Densest pair whose A side and B side both induce connected subgraphs."""
    return _search(net, lambda ca, cb: ca and cb, limit)


def brute_force_ocd(net: TripleNetwork, limit: int = MAX_TOTAL_NODES) -> ScoredSubgraph:
    """Densest pair where exactly one side induces a connected subgraph."""
    return _search(net, lambda ca, cb: ca != cb, limit)
