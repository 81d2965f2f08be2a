"""Minimum s-t cuts via Dinic's algorithm (BFS level graphs + blocking flows)."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

# residual capacities at or below this are treated as saturated
EPS = 1e-10


@dataclass
class FlowNetwork:
    n: int
    source: int
    sink: int
    arcs: list = field(default_factory=list)  # (tail, head, capacity)

    def add_arc(self, u: int, v: int, cap: float) -> None:
        if cap < 0:
            raise ValueError(f"negative capacity on arc {u}->{v}")
        if u == self.sink or v == self.source:
            raise ValueError("arcs may not leave the sink or enter the source")
        self.arcs.append((u, v, float(cap)))


def min_cut(fn: FlowNetwork) -> tuple[float, set[int]]:
    """Return ``(cut value, source side)``.

    The source side is the set of nodes reachable from the source in the final
    residual graph, i.e. the inclusion-minimal minimum cut.
    """
    n, s, t = fn.n, fn.source, fn.sink
    head: list[int] = []
    cap: list[float] = []
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v, c in fn.arcs:
        adj[u].append(len(head))
        head.append(v)
        cap.append(c)
        adj[v].append(len(head))
        head.append(u)
        cap.append(0.0)

    flow = 0.0
    while True:
        level = _levels(adj, head, cap, s, n)
        if level[t] < 0:
            break
        it = [0] * n
        while True:
            pushed = _augment(adj, head, cap, level, it, s, t)
            if pushed <= 0:
                break
            flow += pushed

    level = _levels(adj, head, cap, s, n)
    return flow, {v for v in range(n) if level[v] >= 0}


def _levels(adj, head, cap, s, n):
    level = [-1] * n
    level[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for e in adj[u]:
            v = head[e]
            if level[v] < 0 and cap[e] > EPS:
                level[v] = level[u] + 1
                queue.append(v)
    return level


def _augment(adj, head, cap, level, it, s, t):
    """Find one augmenting path in the level graph (iterative DFS with
    current-arc pointers) and push its bottleneck."""
    path: list[int] = []
    u = s
    while True:
        if u == t:
            bottleneck = min(cap[e] for e in path)
            for e in path:
                cap[e] -= bottleneck
                cap[e ^ 1] += bottleneck
            return bottleneck
        arcs = adj[u]
        while it[u] < len(arcs):
            e = arcs[it[u]]
            v = head[e]
            if cap[e] > EPS and level[v] == level[u] + 1:
                break
            it[u] += 1
        else:
            # dead end: retreat and skip the arc that led here
            if not path:
                return 0.0
            level[u] = -1
            e = path.pop()
            u = head[e ^ 1]
            it[u] += 1
            continue
        path.append(arcs[it[u]])
        u = head[arcs[it[u]]]
