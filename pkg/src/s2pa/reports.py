"""Check reports and their text, CSV and structured (JSON) renderings.

Record values are exact rationals or booleans. Rationals always render as
``p/q`` strings (integers without the ``/1``), never as decimals, so a
structured report parses back to an equal ``Report``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .valuations import as_fraction

RESULTS = ("holds", "violated", "inapplicable")
FORMATS = ("text", "csv", "structured")
CSV_HEADER = ("scenario", "check", "op", "result", "inputs", "values", "witness")


def render_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def render_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    return render_rational(x)


@dataclass(frozen=True)
class CheckRecord:
    name: str
    op: str
    result: str
    inputs: str  # short digest of the scenario data and check parameters
    values: tuple[tuple[str, Fraction | bool], ...] = ()
    witness: str | None = None
    wall_time: float | None = None

    def __post_init__(self):
        if self.result not in RESULTS:
            raise ValueError(f"unknown result {self.result!r}")
        vals = tuple((k, v if isinstance(v, bool) else as_fraction(v)) for k, v in self.values)
        object.__setattr__(self, "values", vals)

    def value(self, key):
        return dict(self.values)[key]


@dataclass(frozen=True)
class Report:
    scenario: str
    checks: tuple[CheckRecord, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.result != "violated" for c in self.checks)

    def record(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _values_text(rec: CheckRecord) -> str:
    return ", ".join(f"{k} = {render_value(v)}" for k, v in rec.values)


def _to_text(report: Report) -> str:
    lines = [f"scenario {report.scenario}"]
    if not report.checks:
        lines.append("  (no checks)")
    width = max((len(c.name) for c in report.checks), default=0)
    for c in report.checks:
        line = f"  {c.name:<{width}}  {c.result:<12}  {_values_text(c)}".rstrip()
        if c.witness:
            line += f"  [{c.witness}]"
        if c.wall_time is not None:
            line += f"  ({c.wall_time:.3f}s)"
        lines.append(line)
    verdict = "all checks hold" if report.ok else "some check violated"
    lines.append(f"{verdict}")
    return "\n".join(lines) + "\n"


def _to_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in report.checks:
        vals = ";".join(f"{k}={render_value(v)}" for k, v in c.values)
        w.writerow((report.scenario, c.name, c.op, c.result, c.inputs, vals, c.witness or ""))
    return buf.getvalue()


def _to_tree(report: Report) -> dict:
    return {
        "scenario": report.scenario,
        "checks": [
            {
                "name": c.name,
                "op": c.op,
                "result": c.result,
                "inputs": c.inputs,
                "values": {k: (v if isinstance(v, bool) else render_rational(v)) for k, v in c.values},
                "witness": c.witness,
                "wall_time": c.wall_time,
            }
            for c in report.checks
        ],
    }


def emit_report(report: Report, fmt: str = "text") -> bytes:
    if fmt == "text":
        return _to_text(report).encode()
    if fmt == "csv":
        return _to_csv(report).encode()
    if fmt == "structured":
        return (json.dumps(_to_tree(report), indent=2) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")


def parse_report(data: bytes | str) -> Report:
    """Inverse of ``emit_report(report, "structured")``."""
    tree = json.loads(data)
    checks = []
    for c in tree["checks"]:
        vals = tuple((k, v if isinstance(v, bool) else Fraction(v)) for k, v in c["values"].items())
        checks.append(CheckRecord(c["name"], c["op"], c["result"], c["inputs"], vals,
                                  c["witness"], c["wall_time"]))
    return Report(tree["scenario"], tuple(checks))
