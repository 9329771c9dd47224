"""End-to-end acceptance checks.

Each test prints one ``[PASS]`` / ``[FAIL]`` line naming its criterion, then
asserts.  Oracles come from ``oracles.py`` (networkx and brute force), never
from the package under test.
"""

from __future__ import annotations

import random
import subprocess
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import mean

import pytest

from helpers import FIXTURE_GOLDENS
from oracles import metric_mst_total, mgpf_optimum, terminal_distances, to_nx
from sstar.bench import fixture_provider, load_fixture
from sstar.graph import Instance, from_edges, path_cost
from sstar.heuristic import make_provider
from sstar.maps import generate_instance, synthetic_map
from sstar.pipeline import tree_to_walk, validate_solution
from sstar.solvers import steiner_tree

S_STAR = ("unmerged", "hs", "bs", "mm")
MAPS = ("open-32", "maze-32", "random-32")
SWEEP_N = (2, 4, 8)
SWEEP_W = (Fraction(0), Fraction(1, 2), Fraction(1))
PER_CELL = 4
KINDS = ("exact", "octile", "alt")


def report(capsys, number: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}")


@dataclass
class SweepResult:
    instances: int = 0
    runs: int = 0
    seconds: float = 0.0
    sp_failures: list = field(default_factory=list)
    k_failures: list = field(default_factory=list)
    agreement_failures: list = field(default_factory=list)
    approx_failures: list = field(default_factory=list)
    mm_bs_total_failures: list = field(default_factory=list)
    mm_bs_count_divergences: list = field(default_factory=list)
    ratios: list = field(default_factory=list)


def check_walk(inst, sol, optimum) -> list[str]:
    ok, problems = validate_solution(sol, inst)
    if not 1 <= sol.ratio <= 2:
        problems.append(f"ratio {sol.ratio}")
    if sol.cost > 2 * optimum:
        problems.append(f"cost {sol.cost} > 2 * optimum {optimum}")
    return problems


@pytest.fixture(scope="module")
def sweep() -> SweepResult:
    """54 cells (map, N, w, reprioritization) with four seeded placements each."""
    out = SweepResult()
    start = time.perf_counter()
    providers = {}
    cell = 0
    for name in MAPS:
        graph = synthetic_map(name)
        for n in SWEEP_N:
            for w in SWEEP_W:
                for rp in (False, True):
                    cell += 1
                    for k in range(PER_CELL):
                        seed = 1000 * cell + k
                        kind = KINDS[k % len(KINDS)]
                        key = (name, kind)
                        if key not in providers:
                            providers[key] = make_provider(graph, kind, 1, landmark_count=16)
                        prov = providers[key].with_weight(w)
                        inst = generate_instance(graph, n, seed)
                        sweep_instance(out, inst, prov, rp, (name, n, w, rp, seed, kind))
    out.seconds = time.perf_counter() - start
    return out


def sweep_instance(out: SweepResult, inst, prov, rp, tag) -> None:
    out.instances += 1
    dist = terminal_distances(to_nx(inst.graph), inst.terminals)
    mst = metric_mst_total(dist, inst.terminals)
    optimum = mgpf_optimum(dist, inst.origin, inst.destination, inst.goals)
    totals = {"kruskal": steiner_tree(inst, None, "kruskal").forest.total}
    results = {}
    for solver in S_STAR:
        res = steiner_tree(inst, prov, solver, rp)
        out.runs += 1
        results[solver] = res
        totals[solver] = res.forest.total
        for p in res.confirmed:
            a, b = p.endpoints
            if p.cost != dist[a][b] or path_cost(inst.graph, p.nodes) != p.cost:
                out.sp_failures.append((tag, solver, p.endpoints, p.cost, dist[a][b]))
        if res.forest.total != mst:
            out.k_failures.append((tag, solver, res.forest.total, mst))
        sol = tree_to_walk(res.forest, inst)
        out.ratios.append(sol.ratio)
        problems = check_walk(inst, sol, optimum)
        if problems:
            out.approx_failures.append((tag, solver, problems))
    if len(set(totals.values())) != 1:
        out.agreement_failures.append((tag, totals))
    # MM with the heuristic switched off against BS, same instance and flag
    mm0 = steiner_tree(inst, prov.with_weight(0), "mm", rp)
    bs = results["bs"]
    if mm0.forest.total != bs.forest.total:
        out.mm_bs_total_failures.append((tag, mm0.forest.total, bs.forest.total))
    if mm0.stats.expanded != bs.stats.expanded:
        out.mm_bs_count_divergences.append((tag, mm0.stats.expanded, bs.stats.expanded))


def test_criterion_01_confirmed_paths_are_least_cost(sweep, capsys):
    ok = not sweep.sp_failures and sweep.instances >= 200 and sweep.seconds < 120
    report(capsys, 1, ok, f"{sweep.instances} instances, {sweep.runs} S* runs, "
           f"{len(sweep.sp_failures)} non-optimal confirmed paths, {sweep.seconds:.1f}s")
    assert sweep.instances >= 200
    assert not sweep.sp_failures, sweep.sp_failures[:5]
    assert sweep.seconds < 120


def test_criterion_02_totals_match_the_mst_oracle(sweep, capsys):
    ok = not sweep.k_failures and not sweep.agreement_failures
    report(capsys, 2, ok, f"{len(sweep.k_failures)} MST mismatches, "
           f"{len(sweep.agreement_failures)} instances where the five solvers disagree")
    assert not sweep.k_failures, sweep.k_failures[:5]
    assert not sweep.agreement_failures, sweep.agreement_failures[:5]


def tiny_instance(seed: int) -> Instance:
    rng = random.Random(seed)
    n = rng.randint(2, 12)
    edges = {}
    for v in range(1, n):
        edges[(rng.randrange(v), v)] = rng.randint(1, 9) * 500
    for _ in range(rng.randint(0, n)):
        u, v = rng.sample(range(n), 2)
        edges.setdefault((min(u, v), max(u, v)), rng.randint(1, 9) * 500)
    graph = from_edges(n, [(u, v, c) for (u, v), c in edges.items()])
    terms = rng.sample(range(n), rng.randint(2, min(n, 6)))
    return Instance(graph, terms[0], terms[1], tuple(terms[2:]))


def test_criterion_03_two_approximation(sweep, capsys):
    tiny_failures = []
    tiny = 50
    for seed in range(tiny):
        inst = tiny_instance(seed)
        dist = terminal_distances(to_nx(inst.graph), inst.terminals)
        optimum = mgpf_optimum(dist, inst.origin, inst.destination, inst.goals)
        prov = make_provider(inst.graph, "exact")
        for solver in S_STAR:
            sol = tree_to_walk(steiner_tree(inst, prov, solver).forest, inst)
            problems = check_walk(inst, sol, optimum)
            if problems:
                tiny_failures.append((seed, solver, problems))
    ok = not sweep.approx_failures and not tiny_failures
    report(capsys, 3, ok, f"sweep: {len(sweep.approx_failures)} violations, ratio range "
           f"[{float(min(sweep.ratios)):.3f}, {float(max(sweep.ratios)):.3f}]; "
           f"{tiny} brute-force instances: {len(tiny_failures)} violations")
    assert not sweep.approx_failures, sweep.approx_failures[:5]
    assert not tiny_failures, tiny_failures[:5]


def test_criterion_04_zero_goals_is_a_shortest_path(capsys):
    failures = []
    for k in range(50):
        graph = synthetic_map(MAPS[k % len(MAPS)])
        inst = generate_instance(graph, 2, 500_000 + k)
        want = terminal_distances(to_nx(graph), [inst.origin])[inst.origin][inst.destination]
        prov = make_provider(graph, "exact")
        for solver in S_STAR:
            sol = tree_to_walk(steiner_tree(inst, prov, solver).forest, inst)
            if sol.cost != want or sol.ratio != 1 or not validate_solution(sol, inst)[0]:
                failures.append((k, solver, sol.cost, want, sol.ratio))
    report(capsys, 4, not failures, f"50 origin/destination instances, {len(failures)} runs "
           "off the oracle cost or with ratio != 1")
    assert not failures, failures[:5]


def test_criterion_05_bs_is_weight_invariant(capsys):
    weights = [Fraction(k, 4) for k in range(5)]
    by_g_broken, by_f_diverged = [], []
    for k in range(30):
        graph = synthetic_map(MAPS[k % len(MAPS)])
        inst = generate_instance(graph, SWEEP_N[k % len(SWEEP_N)] + 2, 700_000 + k)
        base = make_provider(graph, "octile")
        for by_g, sink in ((True, by_g_broken), (False, by_f_diverged)):
            seen = {(r.stats.expanded, r.forest.total)
                    for r in (steiner_tree(inst, base.with_weight(w), "bs",
                                           bs_nominate_by_g=by_g) for w in weights)}
            if len(seen) != 1:
                sink.append((k, sorted(seen)))
    report(capsys, 5, not by_g_broken,
           f"nomination by g: {len(by_g_broken)}/30 instances vary with w; "
           f"nomination by f (reported only): {len(by_f_diverged)}/30 vary")
    assert not by_g_broken, by_g_broken[:5]


@pytest.fixture(scope="module")
def large_runs():
    graph = synthetic_map("random-64")
    prov = make_provider(graph, "auto", 1)
    rows = {key: [] for key in ("kruskal", "hs", "mm", "unmerged", "unmerged+rp")}
    start = time.perf_counter()
    for seed in range(10):
        inst = generate_instance(graph, 50, seed)
        for key in rows:
            solver, _, rp = key.partition("+")
            rows[key].append(steiner_tree(inst, prov, solver, bool(rp)).stats.expanded)
    return {k: mean(v) for k, v in rows.items()}, time.perf_counter() - start


def test_criterion_06_heuristics_cut_expansions(large_runs, capsys):
    means, seconds = large_runs
    gain_mm = means["kruskal"] / means["mm"]
    gain_hs = means["kruskal"] / means["hs"]
    ok = gain_mm >= 5 and gain_hs >= 5 and seconds < 300
    report(capsys, 6, ok, f"random-64, N=50, w=1: naive Kruskal {means['kruskal']:.1f}, "
           f"MM {means['mm']:.1f} ({gain_mm:.0f}x), HS {means['hs']:.1f} ({gain_hs:.0f}x), "
           f"{seconds:.1f}s")
    assert gain_mm >= 5 and gain_hs >= 5
    assert seconds < 300


def test_criterion_07_reprioritization_never_hurts_on_average(large_runs, capsys):
    means, _ = large_runs
    ok = means["unmerged+rp"] <= means["unmerged"]
    report(capsys, 7, ok, f"unmerged mean expanded {means['unmerged']:.1f} without, "
           f"{means['unmerged+rp']:.1f} with reprioritization")
    assert ok


def test_criterion_08_mm_without_heuristic_behaves_like_bs(sweep, capsys):
    ok = not sweep.mm_bs_total_failures
    report(capsys, 8, ok, f"{len(sweep.mm_bs_total_failures)} total mismatches over "
           f"{sweep.instances} instances; expanded counts differ on "
           f"{len(sweep.mm_bs_count_divergences)} (reported, not failed)")
    assert ok, sweep.mm_bs_total_failures[:5]


def test_criterion_09_appendix_fixtures(capsys):
    counts = {(name, solver): steiner_tree(load_fixture(name), fixture_provider(name),
                                           solver).stats.expanded
              for name, solver in FIXTURE_GOLDENS}
    weak = counts["appendix-weak-h", "hs"] > counts["appendix-weak-h", "bs"]
    strong = counts["appendix-strong-h", "unmerged"] < counts["appendix-strong-h", "bs"]
    frozen = counts == FIXTURE_GOLDENS
    report(capsys, 9, weak and strong and frozen,
           "weak heuristic: HS {} > BS {}; strong heuristic: unmerged {} < BS {}; goldens {}"
           .format(counts["appendix-weak-h", "hs"], counts["appendix-weak-h", "bs"],
                   counts["appendix-strong-h", "unmerged"], counts["appendix-strong-h", "bs"],
                   "match" if frozen else "CHANGED"))
    assert weak and strong and frozen


def test_criterion_10_bench_csv_is_reproducible(tmp_path, capsys):
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / f"{run}.csv"
        cmd = [sys.executable, "-m", "sstar.cli", "bench", "synthetic:maze-32",
               "synthetic:random-32", "--n", "4,6", "--w", "0,1/2,1", "--instances", "2",
               "--reprioritize", "both", "--seed", "3", "--heuristic", "octile",
               "--no-timing", "--out", str(out)]
        subprocess.run(cmd, check=True, capture_output=True)
        outputs.append(out.read_bytes())
    same = outputs[0] == outputs[1]
    rows = outputs[0].count(b"\n") - 1
    report(capsys, 10, same, f"two bench runs, {rows} CSV rows each, byte-identical: {same}")
    assert same
