import math
import random

import pytest

from trinet import (GenSpec, MineParams, NoCandidateError, NodeSetPair, Side, TripleNetwork, brute_force_cdc,
                    brute_force_ocd, connected_components, generate, is_connected, mds_densest_bipartite,
                    mine, mine_cdc, mine_ocd)
from trinet.network import bipartite_edge_count, density
from trinet.patterns import cdc_candidates, ocd_candidates

from conftest import complete_bipartite, random_net, small_corpus, star_ocd

ALGOS = ["mds", "gnd", "grd", "frd"]


def test_connected_dense_is_its_own_candidate():
    net = complete_bipartite(3, 3, clique_sides=True)
    full = NodeSetPair(range(3), range(3))
    cands = cdc_candidates(net, full)
    assert len(cands) == 1 and cands[0].nodes == full


def test_split_side_gives_two_candidates():
    # A-side {0,1} and {2} are separate components, B-side a path
    net = TripleNetwork(3, 2, [(0, 1)], [(0, 1)], [(0, 0), (1, 1), (2, 0)])
    cands = cdc_candidates(net, NodeSetPair(range(3), range(2)))
    assert len(cands) == 2
    assert cands[0].nodes == NodeSetPair({0, 1}, {0, 1})


def test_candidates_match_exhaustive_pairing():
    rng = random.Random(4)
    for _ in range(60):
        net = random_net(rng, 8, 8, p_c=0.3, p_ab=0.2)
        dense = NodeSetPair({i for i in range(8) if rng.random() < 0.7}, {i for i in range(8) if rng.random() < 0.7})
        expect = set()
        for ca in connected_components(net, Side.A, dense.s_a):
            for cb in connected_components(net, Side.B, dense.s_b):
                if bipartite_edge_count(net, NodeSetPair(ca, cb)):
                    expect.add(NodeSetPair(ca, cb))
        got = cdc_candidates(net, dense)
        assert {c.nodes for c in got} == expect
        for c in got:
            assert c.density == density(net, c.nodes)
        for c in ocd_candidates(net, dense):
            assert c.connected_a != c.connected_b and c.density == density(net, c.nodes)
            assert c.connected_a == is_connected(net, Side.A, c.nodes.s_a)
            assert c.connected_b == is_connected(net, Side.B, c.nodes.s_b)


@pytest.mark.parametrize("algo", ALGOS)
def test_cdc_contract_against_oracle(algo):
    equal = total = 0
    for net in small_corpus(100, seed=13):
        res = mine_cdc(net, algo)
        sub = res.subgraph
        assert is_connected(net, Side.A, sub.nodes.s_a) and is_connected(net, Side.B, sub.nodes.s_b)
        ref = brute_force_cdc(net)
        assert sub.density <= ref.density + 1e-12
        assert sub.density <= mds_densest_bipartite(net).density + 1e-12
        equal += abs(sub.density - ref.density) <= 1e-12
        total += 1
    print(f"{algo}: CDC equals oracle on {equal}/{total}")


@pytest.mark.parametrize("algo", ALGOS)
def test_ocd_contract_against_oracle(algo):
    for net in small_corpus(100, seed=17):
        try:
            res = mine_ocd(net, algo)
        except NoCandidateError:
            continue
        sub = res.subgraph
        assert is_connected(net, Side.A, sub.nodes.s_a) != is_connected(net, Side.B, sub.nodes.s_b)
        assert sub.density <= brute_force_ocd(net).density + 1e-12


@pytest.mark.parametrize("algo", ALGOS)
def test_ocd_star(algo):
    res = mine_ocd(star_ocd(), algo)
    assert abs(res.subgraph.density - math.sqrt(5)) < 1e-12
    assert res.subgraph.nodes == NodeSetPair(range(5), [0])


def test_ocd_none_when_doubly_connected():
    with pytest.raises(NoCandidateError):
        mine_ocd(complete_bipartite(3, 3, clique_sides=True), "mds")


def test_top_k_and_provenance():
    net = generate(GenSpec(60, 60, 80, 80, 200, seed=2))
    res = mine(net, "cdc", MineParams(algo="grd", top_k=3))
    assert [r.provenance["rank"] for r in res] == [1, 2, 3]
    dens = [r.subgraph.density for r in res]
    assert dens == sorted(dens, reverse=True)
    assert res[0].stats["snapshots"] >= 1 and "min_cuts" not in res[0].stats
    with pytest.raises(ValueError):
        mine(net, "cdc-seeds")


def test_workers_do_not_change_results():
    # many small components so the pool actually splits work
    net = generate(GenSpec(400, 400, 300, 300, 260, seed=8))
    for algo in ("grd", "frd", "mds"):
        serial = mine(net, "cdc", MineParams(algo=algo, top_k=4))
        pooled = mine(net, "cdc", MineParams(algo=algo, top_k=4, workers=4))
        assert [(r.subgraph, r.stats, r.provenance) for r in serial] == \
               [(r.subgraph, r.stats, r.provenance) for r in pooled]
