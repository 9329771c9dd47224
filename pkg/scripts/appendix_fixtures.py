"""Expanded-node counts of every solver on the shipped fixtures."""

from sstar.bench import FIXTURES, fixture_provider, fixture_spec, load_fixture
from sstar.solvers import SOLVERS, steiner_tree

for name in FIXTURES:
    inst = load_fixture(name)
    prov = fixture_provider(name)
    counts = {s: steiner_tree(inst, prov, s).stats.expanded for s in SOLVERS}
    total = steiner_tree(inst, prov, "mm").forest.total
    kind = fixture_spec(name)["heuristic"]
    print(f"{name:<18} h={kind:<7} total={total:<6} "
          + " ".join(f"{s}={c}" for s, c in counts.items()))
