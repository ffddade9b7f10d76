"""Timing runs of the analysis modes over generated benchmark suites."""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass
from typing import Iterable, Iterator

from .age import classify_by_age
from .cfg import CacheConfig, ControlFlowGraph
from .concrete import Classification
from .exact import AnalysisTimeout, classify_exact
from . import generators as gen

BENCH_COLUMNS = ["benchmark", "mode", "assoc", "blocks", "edges", "timeMs", "ah", "am", "hm", "unknown"]
SUITES = ("sat", "hamiltonian", "diamond", "random")
BENCH_MODES = ("age", "zdd", "age+zdd")


@dataclass
class BenchRow:
    benchmark: str
    mode: str
    assoc: int
    blocks: int
    edges: int
    time_ms: float | None
    """``None`` when the run hit the timeout."""
    ah: int = 0
    am: int = 0
    hm: int = 0
    unknown: int = 0

    def as_csv_row(self) -> list:
        timed_out = self.time_ms is None
        counts = ["", "", "", ""] if timed_out else [self.ah, self.am, self.hm, self.unknown]
        return [
            self.benchmark,
            self.mode,
            self.assoc,
            self.blocks,
            self.edges,
            "timeout" if timed_out else f"{self.time_ms:.3f}",
            *counts,
        ]


def suite(name: str, count: int, seed: int) -> Iterator[tuple[str, ControlFlowGraph]]:
    rng = random.Random(f"{name}:{seed}")
    for i in range(count):
        if name == "sat":
            g = gen.sat_to_cfg(gen.random_cnf(8, 12, rng)).cfg
        elif name == "hamiltonian":
            g = gen.hamiltonian_to_cfg(gen.random_graph(6, 0.6, rng)).cfg
        elif name == "diamond":
            g = gen.diamond_chain(12 + 4 * i)
        elif name == "random":
            g = gen.random_cfg(120, 24, rng.randrange(2**31), edge_density=0.6, top_bias=0.0)
        else:
            raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
        yield f"{name}-{i}", g


def run_one(
    name: str,
    g: ControlFlowGraph,
    assoc: int,
    mode: str,
    *,
    timeout: float | None = 60.0,
    backend: str | None = None,
) -> BenchRow:
    if mode not in BENCH_MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {BENCH_MODES}")
    config = CacheConfig(assoc)
    row = BenchRow(name, mode, assoc, len(g.blocks()), len(g.edges), None)
    t0 = time.perf_counter()
    try:
        if mode == "age":
            classes = classify_by_age(g, config)
        else:
            classes = classify_exact(g, config, mode, timeout=timeout, backend=backend).classes
    except AnalysisTimeout:
        return row
    row.time_ms = (time.perf_counter() - t0) * 1000
    values = list(classes.values())
    row.ah = values.count(Classification.ALWAYS_HIT)
    row.am = values.count(Classification.ALWAYS_MISS)
    row.hm = values.count(Classification.HIT_AND_MISS)
    row.unknown = values.count(Classification.UNKNOWN)
    return row


def run_bench(
    suites: Iterable[str],
    assocs: Iterable[int],
    modes: Iterable[str],
    *,
    count: int = 2,
    seed: int = 0,
    timeout: float | None = 60.0,
    backend: str | None = None,
) -> list[BenchRow]:
    assocs, modes = list(assocs), list(modes)
    for m in modes:
        if m not in BENCH_MODES:
            raise ValueError(f"unknown mode {m!r}; choose from {BENCH_MODES}")
    rows = []
    for s in suites:
        for name, g in suite(s, count, seed):
            for mode in modes:
                for n in assocs:
                    rows.append(run_one(name, g, n, mode, timeout=timeout, backend=backend))
    return rows


def rows_to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow(r.as_csv_row())
    return buf.getvalue()
