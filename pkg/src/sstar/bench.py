"""Benchmark orchestration: instance sweeps, CSV rows, per-cell summaries.

Every run in a suite is identified by ``(map, N, w, solver, reprioritize,
seed)``.  Rows are sorted on that tuple before writing, so the CSV does not
depend on worker scheduling.  With ``timing=False`` the ``time_ms`` column is
zeroed and two runs of the same config produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import logging
import statistics
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .graph import Graph, Instance, load_graph, parse_edge_list, parse_map
from .heuristic import as_weight, make_provider
from .maps import generate_instance, load_map_spec
from .pipeline import tree_to_walk, validate_solution
from .solvers import SOLVERS, steiner_tree

log = logging.getLogger(__name__)

CSV_HEADER = ("map,solver,criterion,N,w,reprioritize,seed,expanded,time_ms,"
              "tree_path_total,tree_edge_cost,path_cost,ratio,error").split(",")

CRITERION_OF = {"hs": "HS", "bs": "BS", "mm": "MM"}


@dataclass
class BenchConfig:
    maps: list[str] = field(default_factory=lambda: ["synthetic:random-32"])
    n_values: list[int] = field(default_factory=lambda: [10, 20, 30, 40, 50])
    weights: list[Fraction] = field(
        default_factory=lambda: [Fraction(k, 4) for k in range(5)])
    solvers: list[str] = field(default_factory=lambda: list(SOLVERS))
    reprioritize: list[bool] = field(default_factory=lambda: [False])
    instances: int = 10
    seed: int = 0
    landmarks: int = 100
    heuristic: str = "auto"
    bs_nominate_by_g: bool = True
    timing: bool = True
    verify: bool = False
    jobs: int = 1
    output: Path | None = None

    def __post_init__(self):
        self.weights = [as_weight(w) for w in self.weights]
        self.solvers = [s.lower() for s in self.solvers]
        bad = [s for s in self.solvers if s not in SOLVERS]
        if bad:
            raise ValueError(f"unknown solvers {bad}; choose from {list(SOLVERS)}")
        if not self.maps:
            raise ValueError("at least one map is required")
        if any(n < 2 for n in self.n_values) or not self.n_values:
            raise ValueError("every N must be at least 2")
        if self.instances <= 0 or self.landmarks < 0 or self.seed < 0 or self.jobs <= 0:
            raise ValueError("instances and jobs must be positive, seed and landmarks non-negative")


@dataclass
class RunStats:
    map: str
    solver: str
    criterion: str
    N: int
    w: Fraction
    reprioritize: bool
    seed: int
    expanded: int | None = None
    time_ms: float = 0.0
    tree_path_total: int | None = None
    tree_edge_cost: int | None = None
    path_cost: int | None = None
    ratio: Fraction | None = None
    error: str = ""

    def sort_key(self, solver_order: dict[str, int], map_order: dict[str, int]):
        return (map_order[self.map], self.N, self.w, solver_order[self.solver],
                self.reprioritize, self.seed)

    def csv_row(self) -> list[str]:
        def cell(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return str(int(v))
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            if isinstance(v, float):
                return f"{v:.3f}"
            return str(v)

        return [cell(getattr(self, f.name)) for f in fields(self)]


def instance_seed(base: int, n: int, k: int) -> int:
    """Seed of the ``k``-th instance with ``n`` terminals (shared by every solver/w)."""
    return base * 1_000_000 + n * 1000 + k


def _run_instance(args) -> list[RunStats]:
    """All (w, solver, reprioritize) runs on one sampled instance."""
    cfg, spec, n, k = args
    name, graph = load_map_spec(spec)
    seed = instance_seed(cfg.seed, n, k)
    rows: list[RunStats] = []
    try:
        inst = generate_instance(graph, n, seed)
    except ValueError as exc:
        for w in cfg.weights:
            for solver in cfg.solvers:
                for rp in cfg.reprioritize:
                    rows.append(RunStats(name, solver, CRITERION_OF.get(solver, ""), n, w,
                                         rp, seed, error=str(exc)))
        return rows
    base = make_provider(graph, cfg.heuristic, 1, landmark_count=cfg.landmarks,
                         landmark_seed=cfg.seed)
    kruskal = None
    for w in cfg.weights:
        provider = base.with_weight(w)
        for solver in cfg.solvers:
            for rp in cfg.reprioritize:
                stats = RunStats(name, solver, CRITERION_OF.get(solver, ""), n, w, rp, seed)
                if solver == "kruskal" and kruskal is not None:
                    # independent of w and of reprioritization; solve once per instance
                    stats = _copy_result(kruskal, stats)
                else:
                    _solve_into(stats, inst, provider, cfg)
                    if solver == "kruskal":
                        kruskal = stats
                if not cfg.timing:
                    stats.time_ms = 0.0
                rows.append(stats)
    return rows


def _copy_result(src: RunStats, dst: RunStats) -> RunStats:
    for key in ("expanded", "time_ms", "tree_path_total", "tree_edge_cost", "path_cost",
                "ratio", "error"):
        setattr(dst, key, getattr(src, key))
    return dst


def _solve_into(stats: RunStats, inst: Instance, provider, cfg: BenchConfig) -> None:
    try:
        result = steiner_tree(inst, provider, stats.solver, stats.reprioritize,
                              bs_nominate_by_g=cfg.bs_nominate_by_g)
        sol = tree_to_walk(result.forest, inst)
    except Exception as exc:  # recorded per run; the suite carries on
        log.warning("run failed: %s %s N=%d seed=%d: %s", stats.map, stats.solver, stats.N,
                    stats.seed, exc)
        stats.error = f"{type(exc).__name__}: {exc}"
        return
    stats.expanded = result.stats.expanded
    stats.time_ms = result.stats.time_ms
    stats.tree_path_total = result.forest.total
    stats.tree_edge_cost = sol.tree_edge_cost
    stats.path_cost = sol.cost
    stats.ratio = sol.ratio
    if cfg.verify:
        ok, problems = validate_solution(sol, inst)
        if not ok:
            stats.error = "invalid solution: " + "; ".join(problems)


def run_suite(config: BenchConfig) -> list[RunStats]:
    """Run the full cross product; write CSV, summary and figure data if ``output`` is set."""
    names = {spec: load_map_spec(spec)[0] for spec in config.maps}
    tasks = [(config, spec, n, k) for spec in config.maps for n in config.n_values
             for k in range(config.instances)]
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            chunks = list(pool.map(_run_instance, tasks))
    else:
        chunks = [_run_instance(t) for t in tasks]
    solver_order = {s: i for i, s in enumerate(config.solvers)}
    map_order = {names[spec]: i for i, spec in enumerate(config.maps)}
    rows = sorted((r for chunk in chunks for r in chunk),
                  key=lambda r: r.sort_key(solver_order, map_order))
    if config.output is not None:
        out = Path(config.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(to_csv(rows))
        out.with_suffix(".summary.txt").write_text(summary_table(rows))
        by_n, by_w = figure_data(rows)
        out.with_suffix(".by_n.csv").write_text(by_n)
        out.with_suffix(".by_w.csv").write_text(by_w)
    return rows


def to_csv(rows: list[RunStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def _label(solver: str, rp: bool) -> str:
    names = {"kruskal": "Naive Kruskal", "unmerged": "S*-unmerged", "hs": "S*-HS",
             "bs": "S*-BS", "mm": "S*-MM"}
    return names[solver] + (" +reprio" if rp else "")


def cell_means(rows: list[RunStats]) -> dict[tuple, tuple[float, float, int]]:
    """(map, N, solver, reprioritize, w) -> (mean expanded, mean seconds, runs)."""
    groups = defaultdict(list)
    for r in rows:
        if r.error or r.expanded is None:
            continue
        groups[(r.map, r.N, r.solver, r.reprioritize, r.w)].append(r)
    return {key: (statistics.fmean(r.expanded for r in rs),
                  statistics.fmean(r.time_ms for r in rs) / 1000, len(rs))
            for key, rs in groups.items()}


def summary_table(rows: list[RunStats]) -> str:
    """Mean expanded nodes (mean seconds) per solver and w, one block per map and N."""
    means = cell_means(rows)
    weights = sorted({r.w for r in rows})
    blocks = []
    seen = []
    for r in rows:
        if (r.map, r.N) not in seen:
            seen.append((r.map, r.N))
    for m, n in seen:
        lines = [f"map {m}  N={n}"]
        head = f"{'algorithm':<24}" + "".join(f"{'w=' + str(w):>22}" for w in weights)
        lines.append(head)
        series = []
        for r in rows:
            if r.map == m and r.N == n and (r.solver, r.reprioritize) not in series:
                series.append((r.solver, r.reprioritize))
        for solver, rp in series:
            cells = []
            for w in weights:
                hit = means.get((m, n, solver, rp, w))
                cells.append(f"{hit[0]:.1f} ({hit[1]:.3f})" if hit else "-")
            lines.append(f"{_label(solver, rp):<24}" + "".join(f"{c:>22}" for c in cells))
        failed = sum(1 for r in rows if r.map == m and r.N == n and r.error)
        if failed:
            lines.append(f"({failed} failed runs excluded)")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def figure_data(rows: list[RunStats]) -> tuple[str, str]:
    """Two long-format CSVs of cell means, ordered for expanded-vs-N and expanded-vs-w plots."""
    means = cell_means(rows)
    head = "map,solver,reprioritize,w,N,mean_expanded,mean_seconds,runs\n"

    def render(order):
        lines = [head]
        for key in sorted(means, key=order):
            m, n, solver, rp, w = key
            e, s, c = means[key]
            lines.append(f"{m},{solver},{int(rp)},{w.numerator}/{w.denominator},{n},"
                         f"{e:.3f},{s:.6f},{c}\n")
        return "".join(lines)

    by_n = render(lambda k: (k[0], k[2], k[3], k[4], k[1]))
    by_w = render(lambda k: (k[0], k[2], k[3], k[1], k[4]))
    return by_n, by_w


# -- shipped fixtures ------------------------------------------------------------

FIXTURES = ("appendix-weak-h", "appendix-strong-h", "line-5")


def _fixture_text(name: str) -> str:
    return resources.files("sstar").joinpath("fixtures", name).read_text()


def fixture_spec(name: str) -> dict[str, object]:
    """Parsed ``.inst`` record: graph file, heuristic kind, origin, destination, goals."""
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; choose from {list(FIXTURES)}")
    spec: dict[str, object] = {"goals": []}
    for raw in _fixture_text(f"{name}.inst").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, value = line.split(None, 1)
        if key == "goal":
            spec["goals"].append(int(value))
        elif key in ("origin", "destination"):
            spec[key] = int(value)
        else:
            spec[key] = value
    return spec


def load_fixture(name: str) -> Instance:
    spec = fixture_spec(name)
    text = _fixture_text(spec["graph"])
    graph = parse_edge_list(text) if spec["graph"].endswith(".edges") else parse_map(text)
    inst = Instance(graph, spec["origin"], spec["destination"], tuple(spec["goals"]))
    inst.validate()
    return inst


def fixture_provider(name: str, weight=1):
    """The heuristic the fixture was built for, at weight ``weight``."""
    inst = load_fixture(name)
    return make_provider(inst.graph, str(fixture_spec(name)["heuristic"]), weight, use_cache=False)


def load_instance_graph(path: str) -> Graph:
    if path.startswith("synthetic:"):
        return load_map_spec(path)[1]
    return load_graph(path)


def config_record(config: BenchConfig) -> dict[str, object]:
    rec = asdict(config)
    rec["weights"] = [str(w) for w in config.weights]
    rec["output"] = str(config.output) if config.output else None
    return rec
