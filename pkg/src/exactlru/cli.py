"""Command-line interface: ``analyze``, ``oracle``, ``generate`` and ``bench``.

Exit codes: 0 success, 1 oracle disagreement (``oracle --diff``), 2 usage or
parse error, 3 internal invariant violation, 4 oracle explosion guard
exceeded, 5 timeout.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from pathlib import Path

from . import bench, generators as gen
from .age import classify_by_age
from .cfg import CacheConfig, ParseError, format_cfg, parse_cfg
from .concrete import DEFAULT_GUARD, ExplosionGuardExceeded, classify_by_oracle
from .exact import AnalysisTimeout, InvariantViolation, classify_exact
from .report import Report, build_report

log = logging.getLogger("exactlru")

EXIT_DIFF, EXIT_PARSE, EXIT_INVARIANT, EXIT_GUARD, EXIT_TIMEOUT = 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load(args) -> tuple:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    try:
        g, config = parse_cfg(text, assoc=args.assoc, sets=args.sets, linesize=args.linesize)
    except ParseError as exc:
        raise CliError(f"{args.file}:{exc}", EXIT_PARSE) from None
    if config is None:
        raise CliError(f"{args.file}: no associativity (add a cache line or pass --assoc)", EXIT_PARSE)
    focus = None
    if args.focus is not None:
        if args.focus.startswith("@"):
            focus = int(args.focus[1:], 0) // config.line_size
        else:
            focus = args.focus
    return g, config, focus


def _emit(report: Report, args) -> None:
    text = report.to_csv() if args.format == "csv" else report.to_json() + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    g, config, focus = _load(args)
    t0 = time.perf_counter()
    try:
        if args.mode == "age":
            classes = classify_by_age(g, config)
            timings = {"age": (time.perf_counter() - t0) * 1000}
            report = build_report(g, config, "age", classes, by_age=classes, timings_ms=timings, focus=focus)
        else:
            res = classify_exact(
                g, config, args.mode, focus=focus, jobs=args.jobs, timeout=args.timeout
            )
            timings = dict(res.timings_ms, total=(time.perf_counter() - t0) * 1000)
            report = build_report(
                g,
                config,
                args.mode,
                res.classes,
                by_age=res.by_age,
                by_exact=res.by_exact,
                timings_ms=timings,
                focus=focus,
            )
    except InvariantViolation as exc:
        raise CliError(f"internal invariant violated: {exc}", EXIT_INVARIANT) from None
    except AnalysisTimeout as exc:
        raise CliError(str(exc), EXIT_TIMEOUT) from None
    _emit(report, args)
    return 0


def cmd_oracle(args) -> int:
    g, config, focus = _load(args)
    t0 = time.perf_counter()
    try:
        classes = classify_by_oracle(g, config, guard=args.guard)
    except ExplosionGuardExceeded as exc:
        raise CliError(f"oracle gave up: {exc}", EXIT_GUARD) from None
    timings = {"oracle": (time.perf_counter() - t0) * 1000}
    report = build_report(g, config, "oracle", classes, timings_ms=timings, focus=focus)
    _emit(report, args)
    if args.diff:
        other = Report.from_json(Path(args.diff).read_text(encoding="utf-8")).classes()
        mine = report.classes()
        bad = sorted(k for k in mine.keys() | other.keys() if mine.get(k) != other.get(k))
        for k in bad:
            got = other.get(k)
            want = mine.get(k)
            print(
                f"edge {k}: report says {got.value if got else 'nothing'}, "
                f"oracle says {want.value if want else 'nothing'}",
                file=sys.stderr,
            )
        if bad:
            return EXIT_DIFF
    return 0


def _write_instance(out: Path, name: str, inst: gen.GeneratedInstance, extra: dict) -> None:
    (out / f"{name}.cfg").write_text(format_cfg(inst.cfg, inst.config), encoding="utf-8")
    sidecar = {
        "designatedEdge": inst.designated_edge,
        "associativity": inst.associativity,
        "question": inst.question,
        "groundTruth": inst.ground_truth,
        **extra,
    }
    (out / f"{name}.json").write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")


def cmd_generate(args) -> int:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    try:
        if args.family == "sat":
            if args.dimacs:
                formulas = [gen.parse_dimacs(Path(args.dimacs).read_text())]
            else:
                formulas = [gen.random_cnf(args.vars, args.clauses, rng) for _ in range(args.count)]
            for i, f in enumerate(formulas):
                _write_instance(out, f"sat-{i}", gen.sat_to_cfg(f), {"dimacs": gen.format_dimacs(f)})
        elif args.family == "hamiltonian":
            if args.edges:
                graphs = [gen.parse_edge_list(Path(args.edges).read_text())]
            else:
                graphs = [gen.random_graph(args.vertices, args.density, rng) for _ in range(args.count)]
            for i, ug in enumerate(graphs):
                _write_instance(
                    out, f"ham-{i}", gen.hamiltonian_to_cfg(ug), {"graph": gen.format_edge_list(ug)}
                )
        elif args.family == "diamond":
            g = gen.diamond_chain(args.n)
            (out / f"diamond-{args.n}.cfg").write_text(
                format_cfg(g, CacheConfig(args.assoc or 32)), encoding="utf-8"
            )
        else:
            for i in range(args.count):
                g = gen.random_cfg(
                    args.vertices,
                    args.blocks,
                    rng.randrange(2**31),
                    edge_density=args.density,
                    top_bias=args.top_bias,
                    starts=args.starts,
                )
                (out / f"random-{i}.cfg").write_text(format_cfg(g, CacheConfig(args.assoc or 4)), encoding="utf-8")
    except gen.OracleBoundExceeded as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _choice_list(choices):
    def parse(text):
        items = [x for x in text.split(",") if x]
        for x in items:
            if x not in choices:
                raise argparse.ArgumentTypeError(f"{x!r} is not one of {', '.join(choices)}")
        return items

    return parse


def cmd_bench(args) -> int:
    rows = []
    for s in args.suite:
        for name, g in bench.suite(s, args.count, args.seed):
            for mode in args.modes:
                for n in args.assoc:
                    row = bench.run_one(name, g, n, mode, timeout=args.timeout, backend=args.backend)
                    log.info("%s %s N=%d: %s ms", name, mode, n, row.time_ms)
                    rows.append(row)
    text = bench.rows_to_csv(rows)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exactlru", description="Exact LRU cache access classification.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("file", help="control-flow graph in the exactlru text format")
        sp.add_argument("--assoc", type=int, help="override the associativity")
        sp.add_argument("--sets", type=int, help="override the number of cache sets")
        sp.add_argument("--linesize", type=int, help="override the line size in bytes")
        sp.add_argument("--focus", help="only report accesses to this block (name or @address)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")

    a = sub.add_parser("analyze", help="classify every access")
    common(a)
    a.add_argument("--mode", choices=("age", "zdd", "age+zdd"), default="age+zdd")
    a.add_argument("--jobs", type=int, default=1, help="parallel per-block analyses")
    a.add_argument("--timeout", type=float, help="give up after this many seconds")
    a.set_defaults(func=cmd_analyze)

    o = sub.add_parser("oracle", help="classify by exhaustive state enumeration")
    common(o)
    o.add_argument("--diff", help="compare against a JSON report; exit 1 on any disagreement")
    o.add_argument("--guard", type=int, default=DEFAULT_GUARD, help="max (vertex, state) pairs")
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("generate", help="write benchmark graphs with ground truth")
    g.add_argument("family", choices=("sat", "hamiltonian", "diamond", "random"))
    g.add_argument("-o", "--output", default=".", help="output directory")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--vars", type=int, default=5)
    g.add_argument("--clauses", type=int, default=8)
    g.add_argument("--dimacs", help="read the formula from a DIMACS CNF file")
    g.add_argument("--vertices", type=int, default=5)
    g.add_argument("--density", type=float, default=0.6)
    g.add_argument("--edges", help="read the graph from an edge-list file")
    g.add_argument("--n", type=int, default=10, help="diamond count")
    g.add_argument("--blocks", type=int, default=6)
    g.add_argument("--top-bias", type=float, default=0.5)
    g.add_argument("--starts", type=int, default=1)
    g.add_argument(
        "--assoc", type=int, help="associativity written to diamond (default 32) and random (default 4) files"
    )
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="time the analysis modes on generated suites")
    b.add_argument("--suite", type=_choice_list(bench.SUITES), default=list(bench.SUITES))
    b.add_argument("--assoc", type=_int_list, default=[2, 4, 8, 16])
    b.add_argument("--modes", "--mode", type=_choice_list(bench.BENCH_MODES), default=list(bench.BENCH_MODES))
    b.add_argument("--count", type=int, default=2, help="instances per suite")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--timeout", type=float, default=60.0, help="per-instance timeout in seconds")
    b.add_argument("--backend", choices=("pure", "native"), help="ZDD kernel (default: best available)")
    b.add_argument("-o", "--output", help="CSV file (default stdout)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"exactlru: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
