"""Machine-readable classification reports (JSON and CSV)."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

from .cfg import Block, CacheConfig, ControlFlowGraph
from .concrete import Classification

CSV_COLUMNS = ["edgeId", "src", "dst", "block", "set", "classification", "byAge", "byExact"]
SUMMARY_KEYS = {
    Classification.ALWAYS_HIT: "alwaysHit",
    Classification.ALWAYS_MISS: "alwaysMiss",
    Classification.HIT_AND_MISS: "hitAndMiss",
    Classification.UNKNOWN: "unknown",
}


@dataclass
class EdgeRecord:
    edgeId: str
    src: str
    dst: str
    block: Block
    set: int
    classification: str
    byAge: str | None = None
    byExact: str | None = None


@dataclass
class Report:
    mode: str
    config: dict
    edges: list[EdgeRecord]
    unreachable: list[str] = field(default_factory=list)
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def summary(self) -> dict[str, int]:
        counts = dict.fromkeys(SUMMARY_KEYS.values(), 0)
        for r in self.edges:
            counts[SUMMARY_KEYS[Classification(r.classification)]] += 1
        return counts

    def classes(self) -> dict[str, Classification]:
        return {r.edgeId: Classification(r.classification) for r in self.edges}

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "config": self.config,
            "edges": [asdict(r) for r in self.edges],
            "unreachable": self.unreachable,
            "summary": self.summary,
            "timingsMs": self.timings_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(
            mode=data["mode"],
            config=data["config"],
            edges=[EdgeRecord(**r) for r in data["edges"]],
            unreachable=list(data.get("unreachable", [])),
            timings_ms=dict(data.get("timingsMs", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in self.edges:
            row = asdict(r)
            writer.writerow({k: "" if row[k] is None else row[k] for k in CSV_COLUMNS})
        return buf.getvalue()


def config_dict(config: CacheConfig) -> dict:
    return {"assoc": config.associativity, "sets": config.num_sets, "linesize": config.line_size}


def build_report(
    g: ControlFlowGraph,
    config: CacheConfig,
    mode: str,
    classes: dict[str, Classification],
    *,
    by_age: dict[str, Classification] | None = None,
    by_exact: dict[str, Classification] | None = None,
    timings_ms: dict[str, float] | None = None,
    focus: Block | None = None,
) -> Report:
    """One record per access edge of ``g``; edges without a class are unreachable."""
    records, unreachable = [], []
    for e in g.access_edges():
        if focus is not None and e.label != focus:
            continue
        cls = classes.get(e.id)
        if cls is None:
            unreachable.append(e.id)
            continue
        age = by_age.get(e.id) if by_age is not None else None
        exact = by_exact.get(e.id) if by_exact is not None else None
        records.append(
            EdgeRecord(
                e.id,
                e.src,
                e.dst,
                e.label,
                config.set_of(e.label),
                cls.value,
                age.value if age else None,
                exact.value if exact else None,
            )
        )
    return Report(mode, config_dict(config), records, unreachable, dict(timings_ms or {}))
