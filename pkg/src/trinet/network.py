"""Triple network storage plus the density and connectivity primitives.

A triple network holds two node-typed graphs ``G_a`` and ``G_b`` and the
bipartite graph ``G_c`` joining them.  Everything is kept in CSR form
(``ptr``/``idx`` numpy arrays, neighbor lists sorted) so that networks with
millions of edges stay cheap to hold and to slice.
"""
from __future__ import annotations

import enum
import functools
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

log = logging.getLogger(__name__)

# sets above this size go through scipy instead of a python BFS
_LARGE_SET = 4096


class TrinetError(Exception):
    """Base class for all errors raised by this package."""


class NodeIndexError(TrinetError, IndexError):
    pass


class EmptyBipartiteError(TrinetError, ValueError):
    """The bipartite graph has no edges, so there is nothing to mine."""


class NoCandidateError(TrinetError):
    """No subgraph satisfies the requested pattern."""


class Side(str, enum.Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> "Side":
        return Side.B if self is Side.A else Side.A


class NodeRef(NamedTuple):
    side: Side
    index: int


@dataclass(frozen=True)
class NodeSetPair:
    s_a: frozenset
    s_b: frozenset

    def __post_init__(self):
        object.__setattr__(self, "s_a", frozenset(int(x) for x in self.s_a))
        object.__setattr__(self, "s_b", frozenset(int(x) for x in self.s_b))

    def side(self, side: Side) -> frozenset:
        return self.s_a if side is Side.A else self.s_b

    @property
    def sorted_a(self) -> list[int]:
        return sorted(self.s_a)

    @property
    def sorted_b(self) -> list[int]:
        return sorted(self.s_b)

    def __contains__(self, ref: NodeRef) -> bool:
        return ref.index in self.side(ref.side)

    def __repr__(self):
        def short(s):
            items = sorted(s)
            body = ",".join(map(str, items[:8]))
            return "{" + body + (",..." if len(items) > 8 else "") + "}"
        return f"NodeSetPair(a={short(self.s_a)}, b={short(self.s_b)})"


def density_value(edges: int, n_a: int, n_b: int) -> float:
    if n_a == 0 or n_b == 0:
        return 0.0
    return edges / float(np.sqrt(float(n_a) * float(n_b)))


def denser(e1: int, a1: int, b1: int, e2: int, a2: int, b2: int) -> int:
    """Exact three-way comparison of e1/sqrt(a1 b1) against e2/sqrt(a2 b2).

    Returns 1, 0 or -1.  Densities are compared through their squares,
    which are rational, so ties are detected exactly.
    """
    if a1 == 0 or b1 == 0:
        e1, a1, b1 = 0, 1, 1
    if a2 == 0 or b2 == 0:
        e2, a2, b2 = 0, 1, 1
    lhs = e1 * e1 * a2 * b2
    rhs = e2 * e2 * a1 * b1
    return (lhs > rhs) - (lhs < rhs)


@dataclass(frozen=True)
class ScoredSubgraph:
    nodes: NodeSetPair
    density: float
    connected_a: bool
    connected_b: bool
    edges: int

    @property
    def size_a(self) -> int:
        return len(self.nodes.s_a)

    @property
    def size_b(self) -> int:
        return len(self.nodes.s_b)

    @property
    def density_squared(self) -> Fraction:
        if not self.size_a or not self.size_b:
            return Fraction(0)
        return Fraction(self.edges * self.edges, self.size_a * self.size_b)


def compare_subgraphs(x: ScoredSubgraph, y: ScoredSubgraph) -> int:
    """Order for "x is preferred over y": denser first, then the
    lexicographically smaller A set, then the smaller B set.  Negative when x
    comes first, so it can be used directly as a sort comparator."""
    c = denser(x.edges, x.size_a, x.size_b, y.edges, y.size_a, y.size_b)
    if c:
        return -c
    xa, ya = x.nodes.sorted_a, y.nodes.sorted_a
    if xa != ya:
        return -1 if xa < ya else 1
    xb, yb = x.nodes.sorted_b, y.nodes.sorted_b
    if xb != yb:
        return -1 if xb < yb else 1
    return 0


subgraph_sort_key = functools.cmp_to_key(compare_subgraphs)


def rank_subgraphs(subs: Iterable[ScoredSubgraph]) -> list[ScoredSubgraph]:
    """Deduplicate and sort best-first."""
    unique = {(s.nodes.s_a, s.nodes.s_b): s for s in subs}
    return sorted(unique.values(), key=subgraph_sort_key)


def _csr(n_rows: int, rows: np.ndarray, cols: np.ndarray):
    order = np.lexsort((cols, rows))
    counts = np.bincount(rows, minlength=n_rows) if len(rows) else np.zeros(n_rows, np.int64)
    ptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, np.ascontiguousarray(cols[order], dtype=np.int32)


def gather_rows(ptr: np.ndarray, idx: np.ndarray, rows: np.ndarray):
    """Concatenate the CSR rows ``rows``; returns (owner, neighbor) arrays."""
    rows = np.asarray(rows, dtype=np.int64)
    starts = ptr[rows]
    lens = ptr[rows + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int32)
    owner = np.repeat(np.arange(len(rows)), lens)
    offsets = np.repeat(starts - np.concatenate(([0], np.cumsum(lens)[:-1])), lens)
    return owner, idx[offsets + np.arange(total)]


def _as_edge_array(edges) -> np.ndarray:
    if not isinstance(edges, np.ndarray):
        edges = list(edges)
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edge list must have shape (m, 2)")
    return arr


class TripleNetwork:
    """Immutable store for ``G_a``, ``G_b`` and the bipartite ``G_c``.

    Edges are deduplicated and self-loops on the A/B graphs dropped; the number
    of discarded input edges is kept in :attr:`n_dropped`.
    """

    def __init__(self, n_a: int, n_b: int, edges_a=(), edges_b=(), edges_c=(),
                 labels_a=None, labels_b=None):
        if n_a < 0 or n_b < 0:
            raise ValueError("node counts must be non-negative")
        self.n_a = int(n_a)
        self.n_b = int(n_b)
        ea, eb, ec = _as_edge_array(edges_a), _as_edge_array(edges_b), _as_edge_array(edges_c)
        self._check_range(ea, self.n_a, self.n_a, "A")
        self._check_range(eb, self.n_b, self.n_b, "B")
        self._check_range(ec, self.n_a, self.n_b, "C")
        dropped = 0
        self.a_ptr, self.a_idx, d = self._undirected(self.n_a, ea)
        dropped += d
        self.b_ptr, self.b_idx, d = self._undirected(self.n_b, eb)
        dropped += d
        if len(ec):
            codes = np.unique(ec[:, 0] * max(self.n_b, 1) + ec[:, 1])
            dropped += len(ec) - len(codes)
            u, v = codes // max(self.n_b, 1), codes % max(self.n_b, 1)
        else:
            u = v = np.empty(0, np.int64)
        self.ab_ptr, self.ab_idx = _csr(self.n_a, u, v)
        self.ba_ptr, self.ba_idx = _csr(self.n_b, v, u)
        self.n_dropped = dropped
        self.labels_a = self._labels(labels_a, self.n_a)
        self.labels_b = self._labels(labels_b, self.n_b)
        for arr in (self.a_ptr, self.a_idx, self.b_ptr, self.b_idx,
                    self.ab_ptr, self.ab_idx, self.ba_ptr, self.ba_idx):
            arr.flags.writeable = False

    @staticmethod
    def _check_range(e, n_left, n_right, name):
        if not len(e):
            return
        bad = (e[:, 0] < 0) | (e[:, 0] >= n_left) | (e[:, 1] < 0) | (e[:, 1] >= n_right)
        if bad.any():
            u, v = e[np.argmax(bad)]
            raise NodeIndexError(f"{name}-edge ({u}, {v}) out of range")

    @staticmethod
    def _undirected(n, e):
        if not len(e):
            ptr = np.zeros(n + 1, np.int64)
            return ptr, np.empty(0, np.int32), 0
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        keep = lo != hi
        codes = np.unique(lo[keep] * n + hi[keep])
        dropped = len(e) - len(codes)
        lo, hi = codes // n, codes % n
        ptr, idx = _csr(n, np.concatenate([lo, hi]), np.concatenate([hi, lo]))
        return ptr, idx, dropped

    @staticmethod
    def _labels(labels, n):
        if labels is None:
            return None
        if isinstance(labels, dict):
            out = [str(i) for i in range(n)]
            for k, v in labels.items():
                out[int(k)] = str(v)
            return tuple(out)
        labels = tuple(str(x) for x in labels)
        if len(labels) != n:
            raise ValueError("label table length does not match node count")
        return labels

    # -- sizes -------------------------------------------------------------
    @property
    def m_a(self) -> int:
        return len(self.a_idx) // 2

    @property
    def m_b(self) -> int:
        return len(self.b_idx) // 2

    @property
    def m_c(self) -> int:
        return len(self.ab_idx)

    def size(self, side: Side) -> int:
        return self.n_a if side is Side.A else self.n_b

    # -- adjacency -----------------------------------------------------------
    def adjacency(self, side: Side):
        """CSR arrays of the same-side graph (``G_a`` or ``G_b``)."""
        return (self.a_ptr, self.a_idx) if side is Side.A else (self.b_ptr, self.b_idx)

    def bipartite_adjacency(self, side: Side):
        """CSR arrays mapping nodes of ``side`` to their ``G_c`` neighbors."""
        return (self.ab_ptr, self.ab_idx) if side is Side.A else (self.ba_ptr, self.ba_idx)

    def neighbors(self, side: Side, i: int) -> np.ndarray:
        ptr, idx = self.adjacency(side)
        return idx[ptr[i]:ptr[i + 1]]

    def bipartite_neighbors(self, side: Side, i: int) -> np.ndarray:
        ptr, idx = self.bipartite_adjacency(side)
        return idx[ptr[i]:ptr[i + 1]]

    def bipartite_degrees(self, side: Side) -> np.ndarray:
        ptr, _ = self.bipartite_adjacency(side)
        return np.diff(ptr)

    def edge_array(self, which: str) -> np.ndarray:
        """Edges of ``"A"``, ``"B"`` (as u < v) or ``"C"`` (A-id, B-id), sorted."""
        if which == "C":
            ptr, idx = self.ab_ptr, self.ab_idx
        elif which in ("A", "B"):
            ptr, idx = self.adjacency(Side(which))
        else:
            raise ValueError(f"unknown edge set {which!r}")
        n = len(ptr) - 1
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(ptr))
        e = np.column_stack([rows, idx.astype(np.int64)])
        if which != "C":
            e = e[e[:, 0] < e[:, 1]]
        return e

    def label(self, side: Side, i: int) -> str:
        labels = self.labels_a if side is Side.A else self.labels_b
        return labels[i] if labels is not None else str(i)

    def check_pair(self, pair: NodeSetPair) -> None:
        for side, s in ((Side.A, pair.s_a), (Side.B, pair.s_b)):
            n = self.size(side)
            for x in s:
                if not 0 <= x < n:
                    raise NodeIndexError(f"{side.value}-node {x} out of range [0, {n})")

    def same_structure(self, other: "TripleNetwork") -> bool:
        if (self.n_a, self.n_b) != (other.n_a, other.n_b):
            return False
        pairs = [(self.a_ptr, other.a_ptr), (self.a_idx, other.a_idx),
                 (self.b_ptr, other.b_ptr), (self.b_idx, other.b_idx),
                 (self.ab_ptr, other.ab_ptr), (self.ab_idx, other.ab_idx)]
        return all(np.array_equal(x, y) for x, y in pairs)

    def __repr__(self):
        return (f"TripleNetwork(n_a={self.n_a}, n_b={self.n_b}, m_a={self.m_a}, "
                f"m_b={self.m_b}, m_c={self.m_c})")


# -- density -----------------------------------------------------------------

def bipartite_edge_count(net: TripleNetwork, nodes: NodeSetPair) -> int:
    if not nodes.s_a or not nodes.s_b:
        return 0
    if len(nodes.s_a) <= len(nodes.s_b):
        side, small, big = Side.A, nodes.s_a, nodes.s_b
    else:
        side, small, big = Side.B, nodes.s_b, nodes.s_a
    ptr, idx = net.bipartite_adjacency(side)
    if len(small) <= 256:
        return sum(1 for u in small for w in idx[ptr[u]:ptr[u + 1]].tolist() if w in big)
    mask = np.zeros(net.size(side.other), dtype=bool)
    mask[np.fromiter(big, np.int64, len(big))] = True
    _, nb = gather_rows(ptr, idx, np.fromiter(small, np.int64, len(small)))
    return int(mask[nb].sum())


def density(net: TripleNetwork, nodes: NodeSetPair) -> float:
    net.check_pair(nodes)
    return density_value(bipartite_edge_count(net, nodes), len(nodes.s_a), len(nodes.s_b))


# -- connectivity --------------------------------------------------------------

def is_connected(net: TripleNetwork, side: Side, s) -> bool:
    """BFS over the subgraph of ``side``'s graph induced by ``s``.

    A single node is connected; the empty set is not.
    """
    s = s if isinstance(s, (set, frozenset)) else set(s)
    if not s:
        return False
    if len(s) == 1:
        return True
    if len(s) > _LARGE_SET:
        return len(connected_components(net, side, s)) == 1
    ptr, idx = net.adjacency(side)
    start = min(s)
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in idx[ptr[u]:ptr[u + 1]].tolist():
            if w in s and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(s)


def connected_components(net: TripleNetwork, side: Side, s) -> list[frozenset]:
    """Maximal connected subsets of ``s``, ordered by smallest member."""
    s = s if isinstance(s, (set, frozenset)) else set(s)
    if not s:
        return []
    ptr, idx = net.adjacency(side)
    if len(s) <= _LARGE_SET:
        seen = set()
        comps = []
        for start in sorted(s):
            if start in seen:
                continue
            comp = {start}
            seen.add(start)
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for w in idx[ptr[u]:ptr[u + 1]].tolist():
                    if w in s and w not in seen:
                        seen.add(w)
                        comp.add(w)
                        queue.append(w)
            comps.append(frozenset(comp))
        return comps
    nodes = np.array(sorted(s), dtype=np.int64)
    local = np.full(net.size(side), -1, dtype=np.int64)
    local[nodes] = np.arange(len(nodes))
    owner, nb = gather_rows(ptr, idx, nodes)
    keep = local[nb] >= 0
    k = len(nodes)
    mat = csr_matrix((np.ones(int(keep.sum()), dtype=np.int8), (owner[keep], local[nb[keep]])),
                     shape=(k, k))
    _, labels = _cc(mat, directed=False)
    # nodes are sorted, so first occurrence order == order by smallest member
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    by_comp = np.argsort(rank[labels], kind="stable")
    bounds = np.cumsum(np.bincount(rank[labels], minlength=len(order)))[:-1]
    return [frozenset(chunk.tolist()) for chunk in np.split(nodes[by_comp], bounds)]


def bipartite_components(net: TripleNetwork) -> list[NodeSetPair]:
    """Connected components of ``G_c`` alone, most bipartite edges first.

    Nodes without bipartite edges are left out; see :func:`bipartite_isolated`.
    """
    n = net.n_a + net.n_b
    if net.m_c == 0:
        return []
    rows = np.repeat(np.arange(net.n_a, dtype=np.int64), np.diff(net.ab_ptr))
    cols = net.ab_idx.astype(np.int64) + net.n_a
    mat = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, labels = _cc(mat, directed=False)
    deg = np.concatenate([np.diff(net.ab_ptr), np.diff(net.ba_ptr)])
    active = np.flatnonzero(deg > 0)
    labels_act = labels[active]
    order = np.argsort(labels_act, kind="stable")
    members = active[order]
    uniq, starts = np.unique(labels_act[order], return_index=True)
    edge_counts = np.bincount(labels[:net.n_a], weights=deg[:net.n_a], minlength=labels.max() + 1)
    comps = []
    for chunk in np.split(members, starts[1:]):
        a = chunk[chunk < net.n_a]
        b = chunk[chunk >= net.n_a] - net.n_a
        comps.append((int(edge_counts[labels[chunk[0]]]), int(chunk[0]), a, b))
    comps.sort(key=lambda c: (-c[0], c[1]))
    return [NodeSetPair(a.tolist(), b.tolist()) for _, _, a, b in comps]


def component_edges(net: TripleNetwork, comp: NodeSetPair) -> int:
    """Edge count of a bipartite component (closed under ``G_c`` adjacency)."""
    deg = np.diff(net.ab_ptr)
    return int(deg[np.fromiter(comp.s_a, np.int64, len(comp.s_a))].sum())


def bipartite_isolated(net: TripleNetwork) -> NodeSetPair:
    return NodeSetPair(np.flatnonzero(np.diff(net.ab_ptr) == 0).tolist(),
                       np.flatnonzero(np.diff(net.ba_ptr) == 0).tolist())


def score(net: TripleNetwork, nodes: NodeSetPair, edges: int | None = None) -> ScoredSubgraph:
    """Evaluate a node-set pair from scratch (density plus both connectivity flags)."""
    net.check_pair(nodes)
    if edges is None:
        edges = bipartite_edge_count(net, nodes)
    return ScoredSubgraph(
        nodes=nodes,
        density=density_value(edges, len(nodes.s_a), len(nodes.s_b)),
        connected_a=is_connected(net, Side.A, nodes.s_a),
        connected_b=is_connected(net, Side.B, nodes.s_b),
        edges=edges,
    )


# -- compact bipartite views ---------------------------------------------------

@dataclass
class BipartiteView:
    """A node-set pair of ``G_c`` relabelled to dense local ids.

    ``a_ids``/``b_ids`` map local ids back to network ids.  Miners work on
    views so that per-component work is proportional to the component.
    """

    a_ids: np.ndarray
    b_ids: np.ndarray
    ab_ptr: np.ndarray
    ab_idx: np.ndarray
    ba_ptr: np.ndarray
    ba_idx: np.ndarray

    @property
    def n_a(self) -> int:
        return len(self.a_ids)

    @property
    def n_b(self) -> int:
        return len(self.b_ids)

    @property
    def m(self) -> int:
        return len(self.ab_idx)

    def pair(self, local_a, local_b) -> NodeSetPair:
        return NodeSetPair(self.a_ids[np.asarray(local_a, dtype=np.int64)].tolist(),
                           self.b_ids[np.asarray(local_b, dtype=np.int64)].tolist())


def bipartite_view(net: TripleNetwork, pair: NodeSetPair | None = None) -> BipartiteView:
    if pair is None:
        return BipartiteView(np.arange(net.n_a), np.arange(net.n_b),
                             net.ab_ptr, net.ab_idx, net.ba_ptr, net.ba_idx)
    a = np.array(pair.sorted_a, dtype=np.int64)
    b = np.array(pair.sorted_b, dtype=np.int64)
    local_b = np.full(net.n_b, -1, dtype=np.int64)
    local_b[b] = np.arange(len(b))
    owner, nb = gather_rows(net.ab_ptr, net.ab_idx, a)
    lb = local_b[nb]
    keep = lb >= 0
    u, v = owner[keep], lb[keep]
    ab_ptr, ab_idx = _csr(len(a), u, v)
    ba_ptr, ba_idx = _csr(len(b), v, u)
    return BipartiteView(a, b, ab_ptr, ab_idx, ba_ptr, ba_idx)
