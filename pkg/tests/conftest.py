import itertools
import random

import pytest

from trinet import TripleNetwork


def random_net(rng: random.Random, n_a: int, n_b: int, p_c: float = 0.3, p_ab: float = 0.4) -> TripleNetwork:
    """Small Erdos-Renyi triple network; used by the oracle comparisons."""
    ea = [(u, v) for u, v in itertools.combinations(range(n_a), 2) if rng.random() < p_ab]
    eb = [(u, v) for u, v in itertools.combinations(range(n_b), 2) if rng.random() < p_ab]
    ec = [(u, v) for u in range(n_a) for v in range(n_b) if rng.random() < p_c]
    return TripleNetwork(n_a, n_b, ea, eb, ec)


def small_corpus(count: int = 200, seed: int = 0, max_n: int = 6):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        net = random_net(rng, rng.randint(1, max_n), rng.randint(1, max_n))
        if net.m_c:
            out.append(net)
    return out


def star_ocd() -> TripleNetwork:
    # five mutually disconnected A-nodes, all linked to one B-node
    return TripleNetwork(5, 1, [], [], [(i, 0) for i in range(5)])


def complete_bipartite(n_a: int, n_b: int, clique_sides: bool = False) -> TripleNetwork:
    ea = list(itertools.combinations(range(n_a), 2)) if clique_sides else []
    eb = list(itertools.combinations(range(n_b), 2)) if clique_sides else []
    return TripleNetwork(n_a, n_b, ea, eb, [(u, v) for u in range(n_a) for v in range(n_b)])


@pytest.fixture
def corpus():
    return small_corpus()


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, recorded by test_acceptance
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
