"""End-to-end analysis: IR -> graph -> decorate -> fixpoint -> report."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .decorate import decorate
from .engine import Rule, run_to_fixpoint
from .errors import FnnlintError
from .frontend import ExtractionDiagnostic
from .graph import TypedGraph
from .model import CONV_KINDS, ModelIR, Violation, build_graph, builtin_metamodel, check_conformance
from .report import Report, collect_findings
from .smells import default_ruleset
from .thresholds import Thresholds


class ConformanceFailure(FnnlintError):
    """A built graph violated the meta-model; always a bug in graph building."""

    def __init__(self, violations: list[Violation]) -> None:
        self.violations = violations
        super().__init__("internal error: graph does not conform: " + "; ".join(map(str, violations)))


@dataclass
class Analysis:
    ir: ModelIR
    graph: TypedGraph  # the final, annotated graph
    report: Report


def unknown_attribute_notes(ir: ModelIR) -> list[str]:
    """Notes for conv layers whose rules cannot decide because a value is unknown."""
    notes = []
    for i, layer in enumerate(ir.layers):
        if layer.kind not in CONV_KINDS:
            continue
        if layer.filters is None:
            notes.append(f"layer {i} ({layer.type_name}): filter count unknown; skipped by DS1")
        if layer.kernel is None:
            notes.append(f"layer {i} ({layer.type_name}): kernel size unknown; skipped by DS2/DS3")
    return notes


def analyze(
    ir: ModelIR,
    cfg: Thresholds | None = None,
    rules: Sequence[Rule] | None = None,
    diagnostics: Iterable[ExtractionDiagnostic] = (),
) -> Analysis:
    cfg = cfg or Thresholds()
    rules = default_ruleset(cfg) if rules is None else rules
    graph = build_graph(ir)
    violations = check_conformance(graph, builtin_metamodel())
    if violations:
        raise ConformanceFailure(violations)
    final = run_to_fixpoint(rules, decorate(graph, cfg))
    skipped = [f"{d.line}:{d.col}: {d.message}" for d in diagnostics]
    skipped += unknown_attribute_notes(ir)
    report = Report(ir.source_path, tuple(collect_findings(final)), tuple(skipped))
    return Analysis(ir, final, report)
