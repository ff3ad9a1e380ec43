"""The universal output record: one row per (lambda, engine) evaluation."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

CSV_HEADER = [
    "lambda",
    "value",
    "stderr",
    "engine",
    "beta",
    "delta",
    "order",
    "seed",
    "tail_bound",
]


@dataclass(frozen=True)
class CurveRow:
    lam: float
    value: float
    stderr: float | None
    engine: str
    beta: float
    delta: float
    order: int | None = None
    seed: int | None = None
    tail_bound: float | None = None

    def as_list(self) -> list[str]:
        return [
            _fmt(self.lam),
            _fmt(self.value),
            _fmt(self.stderr),
            self.engine,
            _fmt(self.beta),
            _fmt(self.delta),
            _fmt(self.order),
            _fmt(self.seed),
            _fmt(self.tail_bound),
        ]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int,)):
        return str(x)
    return repr(float(x))


@dataclass
class CurveTable:
    rows: list[CurveRow] = field(default_factory=list)

    def extend(self, rows) -> None:
        self.rows.extend(rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")  # RFC 4180 line endings
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.as_list())
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    def to_json(self, config: dict | None = None) -> str:
        payload = {
            "config": config or {},
            "rows": [dict(zip(CSV_HEADER, r.as_list())) for r in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def write_json(self, path, config: dict | None = None) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json(config))
            fh.write("\n")
