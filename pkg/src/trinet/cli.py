"""``trinet`` command line: mine, gen, bench, verify, oracle, stats.

Exit codes: 0 success, 2 no candidate found, 1 any other error (including
usage errors and unknown flags).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import asdict
from fractions import Fraction

from . import __version__
from .generators import RMAT_DEFAULT, SIZE_GRID, GenSpec, degree_histogram, generate, grid_spec
from .io import checksum, load_triple_network, write_triple_network
from .local_search import SeedSpec, local_search
from .mds import MdsStats, check_component_cap, densest_in_view
from .network import (NoCandidateError, Side, TrinetError, TripleNetwork, bipartite_components,
                      bipartite_view)
from .oracle import MAX_TOTAL_NODES, brute_force_cdc, brute_force_densest_bipartite, brute_force_ocd
from .patterns import MineParams, PatternKind, mine
from .peel import PeelCriterion, peel_bulk, peel_sequential
from .report import build_report, dumps_report, verify_report

log = logging.getLogger("trinet")

EXIT_OK, EXIT_ERROR, EXIT_NO_CANDIDATE = 0, 1, 2
DEFAULT_MDS_CAP = 256
PEEL_ALGOS = ("mds", "gnd", "grd", "frd")


class UsageError(TrinetError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with "no candidate"
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- argument helpers -------------------------------------------------------------

def _seed_tokens(text: str | None) -> list[str]:
    if not text:
        return []
    toks = [t.strip() for t in text.split(",")]
    if any(not t for t in toks):
        raise UsageError(f"malformed seed list {text!r}")
    return toks


def _resolve_seeds(net: TripleNetwork, side: Side, toks: list[str]) -> set[int]:
    labels = net.labels_a if side is Side.A else net.labels_b
    lookup = {lab: i for i, lab in enumerate(labels)} if labels is not None else {}
    out = set()
    for t in toks:
        if t in lookup:
            out.add(lookup[t])
        elif t.lstrip("-").isdigit():
            out.add(int(t))
        else:
            raise UsageError(f"unknown {side.value}-seed {t!r}")
    return out


def _fraction(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _probs(text: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad probability list {text!r}")
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("R-MAT needs four probabilities a,b,c,d")
    return vals


def _load(path: str) -> TripleNetwork:
    if path == "-":
        return load_triple_network(sys.stdin.buffer, "<stdin>")
    return load_triple_network(path)


def _emit(rep: dict) -> None:
    sys.stdout.write(dumps_report(rep) + "\n")


# -- mine ----------------------------------------------------------------------------

def _check_mine_flags(a) -> None:
    pattern = PatternKind(a.pattern)
    seeded = pattern in (PatternKind.CDC_SEEDS, PatternKind.OCD_SEED)
    if a.algo is None:
        a.algo = "ls" if seeded else "grd"
    if seeded and a.algo != "ls":
        raise UsageError(f"--pattern {a.pattern} is mined with --algo ls")
    if not seeded and a.algo == "ls":
        raise UsageError("--algo ls needs --pattern cdc-seeds or ocd-seed")
    sa, sb = _seed_tokens(a.seeds_a), _seed_tokens(a.seeds_b)
    if pattern is PatternKind.CDC_SEEDS and not (sa and sb):
        raise UsageError("--pattern cdc-seeds needs both --seeds-a and --seeds-b")
    if pattern is PatternKind.OCD_SEED and bool(sa) == bool(sb):
        raise UsageError("--pattern ocd-seed needs exactly one of --seeds-a / --seeds-b")
    if not seeded and (sa or sb):
        raise UsageError("seeds are only meaningful for cdc-seeds and ocd-seed")

    def only(flag, value, algos):
        if value is not None and a.algo not in algos:
            raise UsageError(f"{flag} does not apply to --algo {a.algo}")

    only("--epsilon", a.epsilon, ("frd",))
    only("--snapshots", a.snapshots, ("gnd", "grd", "frd"))
    only("--rank-denominator", a.rank_denominator, ("grd", "frd"))
    only("--mds-cap", a.mds_cap, ("mds",))
    only("--ls-return", a.ls_return, ("ls",))
    if a.algo == "ls" and a.top_k != 1:
        raise UsageError("--top-k applies to cdc and ocd only")
    if a.epsilon is not None and not -1 < a.epsilon < 1:
        raise UsageError("--epsilon must lie in (-1, 1)")
    if a.top_k < 1 or a.workers < 1 or (a.snapshots is not None and a.snapshots < 1):
        raise UsageError("--top-k, --workers and --snapshots must be positive")
    if a.mds_cap is not None and a.mds_cap < 1:
        raise UsageError("--mds-cap must be positive")
    a.seed_tokens = (sa, sb)


def cmd_mine(a) -> int:
    _check_mine_flags(a)
    t0 = time.perf_counter()
    net = _load(a.network)
    load_ms = (time.perf_counter() - t0) * 1e3

    if a.algo == "ls":
        spec = SeedSpec(_resolve_seeds(net, Side.A, a.seed_tokens[0]),
                        _resolve_seeds(net, Side.B, a.seed_tokens[1]))
        t1 = time.perf_counter()
        res = local_search(net, spec, debug=a.debug)
        search_ms = (time.perf_counter() - t1) * 1e3
        which = a.ls_return or "best"
        sub = res.subgraph if which == "best" else res.final
        params = dict(res.provenance, ls_return=which)
        params.pop("algorithm")
        timings = None if a.omit_timings else {"load": load_ms, "search": search_ms}
        _emit(build_report(net, a.pattern, "ls", params, sub, counts=res.stats, timings=timings))
        return EXIT_OK

    params = MineParams(algo=a.algo, epsilon=a.epsilon or 0.0,
                        rank_denominator=a.rank_denominator or "live",
                        snapshots=a.snapshots or 8,
                        mds_cap=a.mds_cap or DEFAULT_MDS_CAP,
                        top_k=a.top_k, workers=a.workers, debug=a.debug)
    results = mine(net, a.pattern, params)
    for res in results:
        prov = dict(res.provenance)
        algo, rank = prov.pop("algorithm"), prov.pop("rank")
        timings = None if a.omit_timings else dict(load=load_ms, **res.timings)
        _emit(build_report(net, a.pattern, algo, prov, res.subgraph, rank=rank,
                           counts=res.stats, timings=timings))
    return EXIT_OK


# -- gen -----------------------------------------------------------------------------

def _spec_from_args(a) -> GenSpec:
    if a.grid_row is not None:
        spec = grid_spec(a.grid_row, a.scale, kind=a.kind, seed=a.seed)
        return GenSpec(**dict(asdict(spec), rmat_probs=a.rmat_probs))
    missing = [f for f in ("na", "nb", "ma", "mb", "mc") if getattr(a, f) is None]
    if missing:
        raise UsageError("gen needs --" + ", --".join(missing) + " (or --grid-row)")
    return GenSpec(a.na, a.nb, a.ma, a.mb, a.mc, kind=a.kind, rmat_probs=a.rmat_probs, seed=a.seed)


def cmd_gen(a) -> int:
    spec = _spec_from_args(a)
    net = generate(spec)
    if a.output and a.output != "-":
        digest = write_triple_network(net, a.output)
        echo = sys.stdout
    else:
        digest = write_triple_network(net, sys.stdout.buffer)
        sys.stdout.flush()
        echo = sys.stderr
    echo.write(json.dumps({"spec": asdict(spec), "sha256": digest}, sort_keys=True) + "\n")
    return EXIT_OK


# -- bench ---------------------------------------------------------------------------

def _parse_gen_token(tok: str) -> GenSpec:
    keys = {"kind": str, "na": int, "nb": int, "ma": int, "mb": int, "mc": int, "seed": int}
    vals = {"kind": "random", "seed": 0}
    for part in tok.split(","):
        k, _, v = part.partition("=")
        if k not in keys or not v:
            raise UsageError(f"bad --gen entry {part!r}; keys are {', '.join(keys)}")
        vals[k] = keys[k](v)
    try:
        return GenSpec(vals["na"], vals["nb"], vals["ma"], vals["mb"], vals["mc"],
                       kind=vals["kind"], seed=vals["seed"])
    except KeyError as exc:
        raise UsageError(f"--gen entry {tok!r} lacks {exc.args[0]}")


def _bench_one(view, algo: str, eps, a):
    """(seconds, density, passes) for one dense-phase run on a whole network."""
    if algo == "mds":
        stats = MdsStats()
        t0 = time.perf_counter()
        la, lb, e = densest_in_view(view, stats)
        sec = time.perf_counter() - t0
        return sec, e / (len(la) * len(lb)) ** 0.5, stats.min_cuts
    t0 = time.perf_counter()
    if algo == "frd":
        traj = peel_bulk(view, eps, a.rank_denominator)
    else:
        crit = PeelCriterion.DEGREE if algo == "gnd" else PeelCriterion.RANK
        traj = peel_sequential(view, crit, a.rank_denominator)
    sec = time.perf_counter() - t0
    return sec, float(traj.densities[traj.best_step]), traj.passes


def cmd_bench(a) -> int:
    nets = [(p, lambda p=p: _load(p)) for p in a.networks]
    for tok in a.gen or ():
        spec = _parse_gen_token(tok)
        spec.validate()
        name = f"{spec.kind}-na{spec.n_a}-nb{spec.n_b}-mc{spec.m_c}-s{spec.seed}"
        nets.append((name, lambda spec=spec: generate(spec)))
    if not nets:
        raise UsageError("bench needs at least one network file or --gen spec")
    if a.repeat < 1:
        raise UsageError("--repeat must be positive")
    out = open(a.output, "w", newline="") if a.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["network", "algo", "params", "seconds", "density", "passes"])
        for name, make in nets:
            net = make()
            view = bipartite_view(net)
            if "mds" in a.algo:
                check_component_cap(bipartite_components(net), a.mds_cap)
            for algo in a.algo:
                for eps in (a.epsilon if algo == "frd" else [None]):
                    runs = [_bench_one(view, algo, eps, a) for _ in range(a.repeat)]
                    sec = min(r[0] for r in runs)
                    _, dens, passes = runs[0]
                    params = "" if eps is None else f"epsilon={eps:g}"
                    if algo in ("grd", "frd"):
                        params = ";".join(p for p in (params, f"rank_denominator={a.rank_denominator}") if p)
                    w.writerow([name, algo, params, f"{sec:.6f}", repr(dens), passes])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# -- verify / oracle / stats -----------------------------------------------------------

def cmd_verify(a) -> int:
    net = _load(a.network)
    stream = sys.stdin if a.report == "-" else open(a.report)
    checked = bad = 0
    with stream:
        for lineno, line in enumerate(stream, 1):
            if not line.strip():
                continue
            try:
                rep = json.loads(line)
                problems = verify_report(net, rep)
            except (ValueError, KeyError, TypeError) as exc:
                problems = [f"unreadable report: {exc}"]
            checked += 1
            if problems:
                bad += 1
                for p in problems:
                    log.error("report line %d: %s", lineno, p)
    print(json.dumps({"checked": checked, "mismatches": bad}, sort_keys=True))
    return EXIT_OK if bad == 0 and checked > 0 else EXIT_ERROR


def cmd_oracle(a) -> int:
    if not a.i_know_this_is_exponential:
        raise UsageError("the oracle enumerates every subset pair; pass --i-know-this-is-exponential")
    net = _load(a.network)
    fn = {"densest": brute_force_densest_bipartite, "cdc": brute_force_cdc, "ocd": brute_force_ocd}[a.pattern]
    sub = fn(net, a.limit)
    _emit(build_report(net, a.pattern, "oracle", {"limit": a.limit}, sub))
    return EXIT_OK


def cmd_stats(a) -> int:
    net = _load(a.network)
    hist = {w: {str(k): v for k, v in degree_histogram(net, w).items()} for w in ("A", "B", "CA", "CB")}
    out = {"n_a": net.n_a, "n_b": net.n_b, "m_a": net.m_a, "m_b": net.m_b, "m_c": net.m_c,
           "bipartite_components": len(bipartite_components(net)),
           "sha256": checksum(net), "degree_histograms": hist}
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trinet", description="Dense connected patterns in triple networks.")
    p.add_argument("--version", action="version", version=f"trinet {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more diagnostics on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("mine", help="mine CDC / OCD / seeded patterns; JSON lines on stdout")
    m.add_argument("network", help="trinet file, or - for stdin")
    m.add_argument("--pattern", required=True, choices=[k.value for k in PatternKind])
    m.add_argument("--algo", choices=PEEL_ALGOS + ("ls",),
                   help="default: grd for cdc/ocd, ls for seeded patterns")
    m.add_argument("--epsilon", type=float, help="FRD threshold offset in (-1, 1); default 0")
    m.add_argument("--seeds-a", help="comma-separated A-node ids or labels")
    m.add_argument("--seeds-b", help="comma-separated B-node ids or labels")
    m.add_argument("--snapshots", type=int, help="peeling snapshots to post-process; default 8")
    m.add_argument("--rank-denominator", choices=("live", "original"), help="default: live")
    m.add_argument("--ls-return", choices=("best", "final"), help="default: best")
    m.add_argument("--mds-cap", type=int, help=f"largest component MDS accepts; default {DEFAULT_MDS_CAP}")
    m.add_argument("--top-k", type=int, default=1)
    m.add_argument("--workers", type=int, default=1, help="processes for per-component mining")
    m.add_argument("--omit-timings", action="store_true",
                   help="drop timings_ms so reports are byte-reproducible")
    m.add_argument("--debug", action="store_true", help="enable internal invariant checks")
    m.set_defaults(func=cmd_mine)

    g = sub.add_parser("gen", help="generate a synthetic network in trinet format")
    g.add_argument("--kind", choices=("random", "rmat"), default="random")
    for flag in ("na", "nb", "ma", "mb", "mc"):
        g.add_argument(f"--{flag}", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--rmat-probs", type=_probs, default=RMAT_DEFAULT, metavar="A,B,C,D")
    g.add_argument("--grid-row", type=int, choices=range(len(SIZE_GRID)),
                   help="use a preset size grid row instead of explicit counts")
    g.add_argument("--scale", type=_fraction, default=1 / 64, help="preset scale factor, e.g. 1/64")
    g.add_argument("-o", "--output", help="output path (default stdout)")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="time dense-phase algorithms; CSV on stdout")
    b.add_argument("networks", nargs="*", help="trinet files")
    b.add_argument("--gen", action="append", metavar="SPEC",
                   help="synthetic network, e.g. kind=random,na=1024,nb=1024,ma=4096,mb=4096,mc=8192,seed=1")
    b.add_argument("--algo", nargs="+", required=True, choices=PEEL_ALGOS)
    b.add_argument("--epsilon", nargs="+", type=float, default=[0.0], help="FRD sweep values")
    b.add_argument("--rank-denominator", choices=("live", "original"), default="live")
    b.add_argument("--repeat", type=int, default=1, help="runs per cell; the minimum time is kept")
    b.add_argument("--mds-cap", type=int, default=DEFAULT_MDS_CAP)
    b.add_argument("-o", "--output", help="CSV path (default stdout)")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="recompute reported densities and flags from the input")
    v.add_argument("network")
    v.add_argument("report", nargs="?", default="-", help="JSON-lines report (default stdin)")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exhaustive reference search for tiny networks")
    o.add_argument("network")
    o.add_argument("--pattern", choices=("densest", "cdc", "ocd"), default="densest")
    o.add_argument("--limit", type=int, default=MAX_TOTAL_NODES)
    o.add_argument("--i-know-this-is-exponential", action="store_true")
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("stats", help="sizes and degree histograms as JSON")
    s.add_argument("network")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, format="trinet: %(levelname)s: %(message)s")
    try:
        a = build_parser().parse_args(argv)
        logging.getLogger().setLevel(logging.WARNING - 10 * min(a.verbose, 2))
        return a.func(a)
    except NoCandidateError as exc:
        log.error("%s", exc)
        return EXIT_NO_CANDIDATE
    except (TrinetError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_ERROR
