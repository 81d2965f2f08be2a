"""Synthetic triple networks: uniform random, and R-MAT node graphs with a
uniform random bipartite graph."""
from __future__ import annotations

from dataclasses import dataclass
from collections import Counter

import numpy as np

from .network import Side, TrinetError, TripleNetwork

RMAT_DEFAULT = (0.57, 0.19, 0.19, 0.05)

# preset size grid: (nodes per side, E_a = E_b, E_c), E_c = 2 E_a
SIZE_GRID = (
    (2 ** 19, 5_000_000, 10_000_000),
    (2 ** 20, 10_000_000, 20_000_000),
    (2 ** 21, 20_000_000, 40_000_000),
    (2 ** 22, 40_000_000, 80_000_000),
)


class GeneratorError(TrinetError, ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    n_a: int
    n_b: int
    m_a: int
    m_b: int
    m_c: int
    kind: str = "random"
    rmat_probs: tuple = RMAT_DEFAULT
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in ("random", "rmat"):
            raise GeneratorError(f"unknown generator kind {self.kind!r}")
        if min(self.n_a, self.n_b, self.m_a, self.m_b, self.m_c) < 0:
            raise GeneratorError("sizes must be non-negative")
        if self.m_a > self.n_a * (self.n_a - 1) // 2:
            raise GeneratorError(f"m_a={self.m_a} exceeds the {self.n_a}-node maximum")
        if self.m_b > self.n_b * (self.n_b - 1) // 2:
            raise GeneratorError(f"m_b={self.m_b} exceeds the {self.n_b}-node maximum")
        if self.m_c > self.n_a * self.n_b:
            raise GeneratorError(f"m_c={self.m_c} exceeds n_a*n_b={self.n_a * self.n_b}")
        if self.kind == "rmat":
            if len(self.rmat_probs) != 4 or min(self.rmat_probs) < 0:
                raise GeneratorError("R-MAT needs four non-negative probabilities")
            if abs(sum(self.rmat_probs) - 1.0) > 1e-9:
                raise GeneratorError("R-MAT probabilities must sum to 1")
            for n in (self.n_a, self.n_b):
                if n < 1 or n & (n - 1):
                    raise GeneratorError(f"R-MAT needs a power-of-two node count, got {n}")


def grid_spec(row: int = 0, scale: float = 1 / 64, kind: str = "random", seed: int = 0) -> GenSpec:
    """A size-grid row scaled down by ``scale`` (a power of two)."""
    n, m_ab, m_c = SIZE_GRID[row]
    n = int(round(n * scale))
    return GenSpec(n, n, int(round(m_ab * scale)), int(round(m_ab * scale)),
                   int(round(m_c * scale)), kind=kind, seed=seed)


def _distinct(rng, m: int, draw, max_rounds: int = 10_000) -> np.ndarray:
    """First ``m`` distinct codes in draw order (rejection with a dedup set,
    done in vectorised batches).  ``draw(k)`` yields k codes, -1 = rejected."""
    chosen = np.empty(0, dtype=np.int64)
    stalled = 0
    while len(chosen) < m:
        need = m - len(chosen)
        batch = draw(min(max(int(need * 1.1) + 64, 1024), 1 << 22))
        batch = batch[batch >= 0]
        pool = np.concatenate([chosen, batch])
        _, first = np.unique(pool, return_index=True)
        first.sort()
        grown = pool[first]
        stalled = stalled + 1 if len(grown) == len(chosen) else 0
        if stalled > max_rounds:
            raise GeneratorError(f"could not draw {m} distinct edges")
        chosen = grown
    return chosen[:m]


def _uniform_pairs(rng, n: int, m: int) -> np.ndarray:
    """``m`` distinct unordered pairs u < v from ``n`` nodes, as (m, 2)."""
    if m == 0:
        return np.empty((0, 2), np.int64)
    total = n * (n - 1) // 2
    if total <= 4_000_000 and m > total // 2:
        iu, iv = np.triu_indices(n, 1)
        pick = rng.choice(total, size=m, replace=False)
        return np.column_stack([iu[pick], iv[pick]]).astype(np.int64)

    def draw(k):
        u = rng.integers(0, n, size=k)
        v = rng.integers(0, n, size=k)
        code = np.minimum(u, v) * n + np.maximum(u, v)
        code[u == v] = -1
        return code

    codes = _distinct(rng, m, draw)
    return np.column_stack([codes // n, codes % n])


def _uniform_bipartite(rng, n_a: int, n_b: int, m: int) -> np.ndarray:
    if m == 0:
        return np.empty((0, 2), np.int64)
    total = n_a * n_b
    if total <= 4_000_000 and m > total // 2:
        codes = rng.choice(total, size=m, replace=False)
    else:
        codes = _distinct(rng, m, lambda k: rng.integers(0, total, size=k))
    return np.column_stack([codes // n_b, codes % n_b])


def _rmat_pairs(rng, n: int, m: int, probs) -> np.ndarray:
    """Undirected R-MAT: directed quadrant descent, canonicalised to u < v,
    self-loops and repeats rejected."""
    if m == 0:
        return np.empty((0, 2), np.int64)
    depth = n.bit_length() - 1
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    weights = (1 << np.arange(depth - 1, -1, -1)).astype(np.int64)

    def draw(k):
        k = min(k, max(1, (1 << 24) // max(depth, 1)))
        quad = np.searchsorted(cum, rng.random((k, depth)), side="right")
        quad = np.minimum(quad, 3)
        u = (quad >> 1) @ weights
        v = (quad & 1) @ weights
        code = np.minimum(u, v) * n + np.maximum(u, v)
        code[u == v] = -1
        return code

    codes = _distinct(rng, m, draw)
    return np.column_stack([codes // n, codes % n])


def generate(spec: GenSpec) -> TripleNetwork:
    """Build a network from ``spec``; identical specs give identical networks."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "rmat":
        ea = _rmat_pairs(rng, spec.n_a, spec.m_a, spec.rmat_probs)
        eb = _rmat_pairs(rng, spec.n_b, spec.m_b, spec.rmat_probs)
    else:
        ea = _uniform_pairs(rng, spec.n_a, spec.m_a)
        eb = _uniform_pairs(rng, spec.n_b, spec.m_b)
    ec = _uniform_bipartite(rng, spec.n_a, spec.n_b, spec.m_c)
    return TripleNetwork(spec.n_a, spec.n_b, ea, eb, ec)


def degree_histogram(net: TripleNetwork, which: str) -> dict[int, int]:
    """Degree -> node count for ``"A"`` (E_a), ``"B"`` (E_b), ``"CA"`` (E_c
    degrees of A-nodes) or ``"CB"`` (E_c degrees of B-nodes)."""
    if which in ("A", "B"):
        ptr, _ = net.adjacency(Side(which))
    elif which in ("CA", "CB"):
        ptr, _ = net.bipartite_adjacency(Side(which[1]))
    else:
        raise ValueError(f"unknown degree set {which!r}")
    deg = np.diff(ptr)
    return dict(sorted(Counter(deg.tolist()).items()))
