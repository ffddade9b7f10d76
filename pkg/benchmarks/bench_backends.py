"""Compare the pure-Python and compiled ZDD kernels.

Two workloads:

* ``ops``: random antichain algebra straight on a Manager (min/max union,
  element insertion, truncation), the inner loop of the exact analysis;
* ``exact``: full ``zdd``-mode classification of generated graphs.

Usage: python benchmarks/bench_backends.py [--repeat 3] [--seed 0]
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time

from exactlru import generators as gen
from exactlru.exact import classify_exact
from exactlru.zdd import KERNELS, Manager


def ops_workload(backend: str, seed: int, rounds: int = 400, width: int = 24) -> None:
    rng = random.Random(seed)
    m = Manager(range(width), backend=backend)
    hit = m.bottom()
    miss = m.unit()
    for _ in range(rounds):
        sets = [frozenset(rng.sample(range(width), rng.randint(1, 8))) for _ in range(6)]
        fam = m.from_sets(sets)
        hit = m.min_union(hit, m.minimal(fam))
        miss = m.max_union(miss, m.maximal(fam))
        v = rng.randrange(width)
        hit = m.truncate(m.add_element_min(hit, v), 7)
        miss = m.add_element_max(miss, v)
        if m.has_set_of_size_at_least(miss, 12):
            miss = m.truncate(miss, 6)


def exact_workload(backend: str, seed: int) -> None:
    rng = random.Random(seed)
    graphs = [
        (gen.random_cfg(80, 16, rng.randrange(2**31), edge_density=0.6, top_bias=0.0), 8),
        (gen.hamiltonian_to_cfg(gen.random_graph(6, 0.7, rng)).cfg, 6),
        (gen.sat_to_cfg(gen.random_cnf(8, 14, rng)).cfg, 9),
        (gen.diamond_chain(40), 32),
    ]
    for g, assoc in graphs:
        classify_exact(g, assoc, "zdd", backend=backend)


WORKLOADS = {"ops": ops_workload, "exact": exact_workload}


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    if "native" not in KERNELS:
        print("compiled kernel not built; only the pure kernel is timed", file=sys.stderr)
    backends = [b for b in ("pure", "native") if b in KERNELS]
    print(f"{'workload':<8} {'backend':<8} {'median ms':>10} {'speedup':>8}")
    for name, fn in WORKLOADS.items():
        base = None
        for b in backends:
            times = []
            for r in range(args.repeat):
                t0 = time.perf_counter()
                fn(b, args.seed + r)
                times.append((time.perf_counter() - t0) * 1000)
            med = statistics.median(times)
            base = base or med
            print(f"{name:<8} {b:<8} {med:>10.1f} {base / med:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
