"""Findings collected from annotated graphs and their text/JSON renderings."""

from __future__ import annotations

import json
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Any

from .engine import ANNOTATION, FLAGGED_BY
from .graph import TypedGraph
from .smells import CATALOGUE, MESSAGES, SmellCode

NO_FINDINGS = "no design smells detected"


@dataclass(frozen=True)
class Finding:
    code: str
    severity: str
    anchor_kind: str
    layer_index: int | None
    line: int | None
    col: int | None
    message: str
    refactoring: str

    @property
    def title(self) -> str:
        return CATALOGUE[SmellCode(self.code)].title

    @property
    def whole_model(self) -> bool:
        return self.anchor_kind not in ("Layer", "InputLayer")

    def sort_key(self) -> tuple:
        return (self.whole_model, self.layer_index or 0, self.code, self.severity, self.message)


@dataclass(frozen=True)
class Report:
    source_path: str
    findings: tuple[Finding, ...] = ()
    skipped: tuple[str, ...] = ()
    counts: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        findings = tuple(sorted(self.findings, key=Finding.sort_key))
        object.__setattr__(self, "findings", findings)
        object.__setattr__(self, "skipped", tuple(self.skipped))
        counts = Counter(f.code for f in findings)
        object.__setattr__(self, "counts", {code: counts[code] for code in sorted(counts)})


class _Missing(dict):
    def __missing__(self, key: str) -> str:
        return "?"


def _format_message(key: str, attrs: dict[str, Any]) -> str:
    template = MESSAGES.get(key, key)
    return string.Formatter().vformat(template, (), _Missing(attrs))


def collect_findings(final: TypedGraph) -> list[Finding]:
    """One finding per annotation node in ``final``, in report order."""
    findings = []
    for nid in final.nodes_of(ANNOTATION):
        ann = final.attrs(nid)
        anchors = final.predecessors(nid, FLAGGED_BY)
        anchor_kind = final.kind(anchors[0]) if anchors else "Architecture"
        anchor_attrs = final.attrs(anchors[0]) if anchors else {}
        on_layer = anchor_kind in ("Layer", "InputLayer")
        code = ann["code"]
        findings.append(
            Finding(
                code=code,
                severity=ann["severity"],
                anchor_kind=anchor_kind,
                layer_index=anchor_attrs.get("layer_index") if on_layer else None,
                line=ann.get("line"),
                col=ann.get("col"),
                message=_format_message(ann["message_key"], anchor_attrs),
                refactoring=CATALOGUE[SmellCode(code)].refactoring,
            )
        )
    findings.sort(key=Finding.sort_key)
    return findings


def render_text(r: Report) -> str:
    lines = []
    for f in r.findings:
        line = f.line if f.line is not None and not f.whole_model else 1
        col = f.col if f.col is not None and not f.whole_model else 1
        suffix = " (whole model)" if f.whole_model else ""
        lines.append(f"{r.source_path}:{line}:{col}: {f.severity} {f.code} {f.title}: {f.message}{suffix}")
        lines.append(f"    fix: {f.refactoring}")
    if not r.findings:
        lines.append(f"{r.source_path}: {NO_FINDINGS}")
    for note in r.skipped:
        lines.append(f"{r.source_path}: note: {note}")
    return "\n".join(lines) + "\n"


def report_to_dict(r: Report) -> dict[str, Any]:
    return {
        "source": r.source_path,
        "findings": [
            {
                "code": f.code,
                "severity": f.severity,
                "anchor": f.anchor_kind,
                "layer_index": f.layer_index,
                "line": f.line,
                "col": f.col,
                "message": f.message,
                "refactoring": f.refactoring,
            }
            for f in r.findings
        ],
        "counts": dict(r.counts),
        "skipped": list(r.skipped),
    }


def render_json(r: Report, extra: dict[str, Any] | None = None) -> str:
    doc = report_to_dict(r)
    if extra:
        doc.update(extra)
    return json.dumps(doc, sort_keys=False)


def report_from_dict(doc: dict[str, Any]) -> Report:
    findings = [
        Finding(
            code=f["code"],
            severity=f["severity"],
            anchor_kind=f["anchor"],
            layer_index=f["layer_index"],
            line=f["line"],
            col=f["col"],
            message=f["message"],
            refactoring=f["refactoring"],
        )
        for f in doc["findings"]
    ]
    report = Report(doc["source"], tuple(findings), tuple(doc.get("skipped", ())))
    if report.counts != doc.get("counts", report.counts):
        raise ValueError("counts do not match the findings list")
    return report


def parse_report_json(text: str) -> Report:
    return report_from_dict(json.loads(text))
