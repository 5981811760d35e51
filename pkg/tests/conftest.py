from __future__ import annotations

from pathlib import Path

import pytest

from fnnlint.model import LayerKind, LayerRecord, Learner, ModelIR

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def conv(filters=32, k=3, **kw) -> LayerRecord:
    kernel = k if isinstance(k, tuple) else (k, k)
    kw.setdefault("use_bias", True)
    return LayerRecord(LayerKind.CONV2D, filters=filters, kernel=kernel, strides=(1, 1), padding="valid", **kw)


def pool(kind=LayerKind.MAXPOOL2D) -> LayerRecord:
    return LayerRecord(kind, pool_size=(2, 2), strides=(2, 2), padding="valid")


def dense(units=10, **kw) -> LayerRecord:
    kw.setdefault("use_bias", True)
    return LayerRecord(LayerKind.DENSE, size=units, **kw)


def dropout(rate=0.5) -> LayerRecord:
    return LayerRecord(LayerKind.DROPOUT, rate=rate)


def layer(kind: LayerKind) -> LayerRecord:
    return LayerRecord(kind)


def make_ir(*layers: LayerRecord, loss: str | None = None) -> ModelIR:
    return ModelIR(tuple(layers), None, Learner(None, loss), "test.py")


def finding_set(ir: ModelIR, cfg=None, enabled=None) -> set[tuple[int | None, str]]:
    from fnnlint.pipeline import analyze
    from fnnlint.smells import default_ruleset

    rules = default_ruleset(cfg, enabled)
    return {(f.layer_index, f.code) for f in analyze(ir, cfg, rules).report.findings}


def findings(ir: ModelIR, cfg=None, enabled=None):
    from fnnlint.pipeline import analyze
    from fnnlint.smells import default_ruleset

    return analyze(ir, cfg, default_ruleset(cfg, enabled)).report.findings


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
