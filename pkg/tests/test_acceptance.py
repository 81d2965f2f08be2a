"""Acceptance criteria 1-9, one test each.

Every test records a ``criterion N: PASS|FAIL ...`` line that is printed in
the pytest terminal summary (and when this file is run as a script).
Criterion 7 is a nightly scale run; set TRINET_NIGHTLY=1 to enable it.
"""
import csv
import contextlib
import io
import math
import os
import random
import statistics
import subprocess
import sys
import time
from itertools import groupby

import pytest

from trinet import (GenSpec, NoCandidateError, NodeSetPair, SeedError, SeedSpec, Side, TripleNetwork,
                    brute_force_cdc, brute_force_densest_bipartite, brute_force_ocd, density,
                    fast_rank_deletion, generate, greedy_peel, is_connected, local_search,
                    mds_densest_bipartite, mine_cdc, mine_ocd, seed_spanning_tree)
from trinet.cli import main as cli_main
from trinet.network import bipartite_view
from trinet.peel import PeelCriterion, peel_bulk, peel_sequential

sys.path.insert(0, os.path.dirname(__file__))
from conftest import random_net, star_ocd  # noqa: E402

RESULTS: dict[int, str] = {}


def record(num: int, ok: bool, detail: str) -> None:
    RESULTS[num] = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[num])
    assert ok, RESULTS[num]


def corpus(count=200, seed=2024):
    """Uniform random nets, n_a, n_b in [1, 6], E_c edge probability 0.3.
    Draws without any bipartite edge are skipped (no densest pair exists)."""
    rng = random.Random(seed)
    nets = []
    while len(nets) < count:
        net = random_net(rng, rng.randint(1, 6), rng.randint(1, 6), p_c=0.3)
        if net.m_c:
            nets.append(net)
    return nets


def bench_rows(args) -> list[dict]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        assert cli_main(["bench", *args]) == 0
    return list(csv.DictReader(io.StringIO(buf.getvalue())))


def test_criterion_1_density_formula():
    six = TripleNetwork(3, 3, edges_c=[(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)])
    d1 = density(six, NodeSetPair(range(3), range(3)))
    d2 = density(star_ocd(), NodeSetPair(range(5), [0]))
    ok = d1 == 2.0 and abs(d2 - math.sqrt(5)) <= 1e-12
    record(1, ok, f"rho(3,3,6)={d1!r}  rho(5,1,5)={d2!r}")


def test_criterion_2_mds_exact():
    t0 = time.perf_counter()
    nets = corpus()
    hits = sum(abs(mds_densest_bipartite(n).density - brute_force_densest_bipartite(n).density) <= 1e-9
               for n in nets)
    record(2, hits == len(nets), f"MDS == oracle on {hits}/{len(nets)} nets ({time.perf_counter() - t0:.1f}s)")


def test_criterion_3_heuristic_ordering():
    nets = corpus()
    bounded = 0
    for n in nets:
        top = mds_densest_bipartite(n).density + 1e-12
        bounded += all(h.density <= top for h in (greedy_peel(n, "degree"), greedy_peel(n, "rank"),
                                                   fast_rank_deletion(n, 0.0)))
    n = 1 << 12
    wins = 0
    for seed in range(20):
        view = bipartite_view(generate(GenSpec(n, n, 4 * n, 4 * n, 8 * n, seed=seed)))
        grd = peel_sequential(view, PeelCriterion.RANK)
        frd = peel_bulk(view, 0.0)
        wins += grd.densities[grd.best_step] >= frd.densities[frd.best_step]
    ok = bounded == len(nets) and wins >= 18
    record(3, ok, f"heuristics <= MDS on {bounded}/{len(nets)}; GRD >= FRD(0) on {wins}/20 (need 18)")


def test_criterion_4_cdc_ocd_contract():
    nets = corpus()
    bad = 0
    equal = total = 0
    for n in nets:
        for algo in ("mds", "gnd", "grd", "frd"):
            c = mine_cdc(n, algo).subgraph
            bad += not (is_connected(n, Side.A, c.nodes.s_a) and is_connected(n, Side.B, c.nodes.s_b))
            ref = brute_force_cdc(n).density
            bad += c.density > ref + 1e-12
            equal += abs(c.density - ref) <= 1e-12
            total += 1
            try:
                o = mine_ocd(n, algo).subgraph
            except NoCandidateError:
                continue
            bad += is_connected(n, Side.A, o.nodes.s_a) == is_connected(n, Side.B, o.nodes.s_b)
    record(4, bad == 0, f"contract violations {bad}; CDC equals oracle on {equal}/{total} runs (informational)")


def test_criterion_5_ocd_star():
    net = star_ocd()
    got = [mine_ocd(net, algo).subgraph.density for algo in ("mds", "gnd", "grd", "frd")]
    ref = brute_force_ocd(net).density
    ok = all(abs(d - math.sqrt(5)) <= 1e-12 for d in got + [ref])
    record(5, ok, f"mine_ocd densities {[round(d, 6) for d in got]}, oracle {ref:.6f}")


def test_criterion_6_frd_epsilon():
    sweep = ["-0.4", "-0.2", "0", "0.2", "0.4"]
    args = ["--algo", "frd", "--epsilon", *sweep, "--repeat", "5"]
    for seed in range(50):
        args += ["--gen", f"na=1024,nb=1024,ma=4096,mb=4096,mc=8192,seed={seed}"]
    rows = bench_rows(args)
    fewer = mono = pairs = 0
    lo, hi = [], []
    for _, grp in groupby(rows, key=lambda r: r["network"]):
        grp = list(grp)
        assert [r["params"].split(";")[0] for r in grp] == [f"epsilon={float(e):g}" for e in sweep]
        sec = [float(r["seconds"]) for r in grp]
        passes = [int(r["passes"]) for r in grp]
        fewer += passes[-1] <= passes[0]
        mono += sum(b <= a for a, b in zip(sec, sec[1:]))
        pairs += len(sec) - 1
        lo.append(float(grp[0]["density"]))
        hi.append(float(grp[-1]["density"]))
    med_lo, med_hi = statistics.median(lo), statistics.median(hi)
    ok = fewer >= 48 and mono >= 0.8 * pairs and med_lo >= med_hi
    record(6, ok, f"passes(0.4)<=passes(-0.4) on {fewer}/50; runtime non-increasing on {mono}/{pairs} pairs; "
                  f"median density -0.4: {med_lo:.4f} vs 0.4: {med_hi:.4f}")


@pytest.mark.skipif(os.environ.get("TRINET_NIGHTLY") != "1", reason="nightly scale run (TRINET_NIGHTLY=1)")
def test_criterion_7_grd_scale():
    times = {}
    for n, m_c in ((1 << 19, 10_000_000), (1 << 20, 20_000_000)):
        view = bipartite_view(generate(GenSpec(n, n, 0, 0, m_c, seed=1)))
        runs = []
        for _ in range(2):  # best of two, as with the bench timings
            t0 = time.perf_counter()
            peel_sequential(view, PeelCriterion.RANK)
            runs.append(time.perf_counter() - t0)
        times[n] = min(runs)
        del view
    big, small = times[1 << 20], times[1 << 19]
    ok = big < 600 and big / small <= 2.4
    record(7, ok, f"GRD 2^20/side, 2e7 edges: {big:.1f}s; doubling ratio {big / small:.2f}")


def _replay_connected(net, spec, res) -> bool:
    inc = {Side.A: set(seed_spanning_tree(net, Side.A, spec.seeds_a)) if spec.seeds_a else set(),
           Side.B: set(seed_spanning_tree(net, Side.B, spec.seeds_b)) if spec.seeds_b else set()}
    for ref, _ in res.trace:
        inc[ref.side].add(ref.index)
        for side in Side:
            if spec.side(side) and not is_connected(net, side, inc[side]):
                return False
    final = res.final.nodes
    return inc[Side.A] == final.s_a and inc[Side.B] == final.s_b


def test_criterion_8_local_search_invariants():
    rng = random.Random(8)
    runs = contained = connected = bounded = 0
    seed = 0
    while runs < 100:
        seed += 1
        net = generate(GenSpec(40, 40, 70, 70, 160, seed=seed))
        pick = lambda side: set(rng.sample(range(40), rng.randint(1, 3)))  # noqa: E731
        mode = runs % 3
        spec = SeedSpec(pick(Side.A) if mode != 2 else (), pick(Side.B) if mode != 1 else ())
        try:
            res = local_search(net, spec, debug=True)
        except SeedError:
            continue  # seeds in different G_a/G_b components cannot be spanned
        runs += 1
        contained += all(spec.side(s) <= sub.nodes.side(s) for sub in (res.subgraph, res.final) for s in Side)
        connected += _replay_connected(net, spec, res)
        bounded += len(res.trace) <= net.n_a + net.n_b
    ok = contained == connected == bounded == runs
    record(8, ok, f"seed containment {contained}/{runs}; stepwise connectivity {connected}/{runs}; "
                  f"terminated within n_a+n_b {bounded}/{runs}")


def test_criterion_9_determinism(tmp_path):
    path = tmp_path / "det.trinet"
    subprocess.run([sys.executable, "-m", "trinet", "gen", "--na", "400", "--nb", "400", "--ma", "300",
                    "--mb", "300", "--mc", "420", "--seed", "9", "-o", str(path)], check=True, capture_output=True)
    miners = [["--pattern", "cdc", "--algo", a, "--top-k", "3"] for a in ("mds", "gnd", "grd", "frd")]
    miners += [["--pattern", "ocd", "--algo", "frd", "--epsilon", "0.2"],
               ["--pattern", "cdc-seeds", "--algo", "ls", "--seeds-a", "7", "--seeds-b", "7"],
               ["--pattern", "ocd-seed", "--algo", "ls", "--seeds-b", "3"]]
    stable = 0
    for flags in miners:
        outs = set()
        for workers in ("1", "1", "1", "4"):
            extra = ["--workers", workers] if flags[3] != "ls" else []
            proc = subprocess.run([sys.executable, "-m", "trinet", "mine", str(path), *flags, *extra,
                                   "--omit-timings"], capture_output=True)
            assert proc.returncode in (0, 2), proc.stderr.decode()
            outs.add((proc.returncode, proc.stdout))
        stable += len(outs) == 1
    record(9, stable == len(miners), f"byte-identical reports for {stable}/{len(miners)} miner configurations "
                                     "(3 serial runs + workers=4)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
