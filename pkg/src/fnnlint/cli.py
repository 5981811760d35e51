"""Command-line entry point: ``fnnlint check <paths...>``.

Exit codes: 0 no qualifying findings, 1 findings at or above ``--fail-on``,
2 usage, extraction or internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence, TextIO

from .errors import FnnlintError, UnknownCode, UsageError
from .frontend import extract_from_path
from .graph import to_dot
from .irjson import ir_to_dict, save_ir_json
from .pipeline import analyze
from .report import render_json, render_text
from .smells import SEVERITIES, SmellCode, default_ruleset, parse_codes
from .thresholds import Thresholds

FORMATS = ("text", "json")
FAIL_ON = ("none", "any", "warning")
EXIT_OK, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2


@dataclass
class CliConfig:
    inputs: list[str] = field(default_factory=list)
    format: str = "text"
    enabled: set[SmellCode] | None = None  # None means every code
    disabled: set[SmellCode] = field(default_factory=set)
    thresholds: Thresholds = field(default_factory=Thresholds)
    severities: dict[str, str] = field(default_factory=dict)
    fail_on: str = "warning"
    dump_ir: bool = False
    dump_graph: bool = False
    jobs: int = 1

    def effective_codes(self) -> set[SmellCode]:
        enabled = set(SmellCode) if self.enabled is None else self.enabled
        return enabled - self.disabled


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fnnlint", description="Detect design smells in Keras Sequential CNN programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    check = sub.add_parser("check", help="analyze source (.py) or model IR (.json) files")
    check.add_argument("inputs", nargs="+", metavar="PATH")
    check.add_argument("--format", choices=FORMATS, default=None)
    check.add_argument("--enable", action="append", default=None, metavar="DSk,...")
    check.add_argument("--disable", action="append", default=None, metavar="DSk,...")
    check.add_argument("--set", action="append", default=None, dest="overrides", metavar="KEY=VALUE")
    check.add_argument("--severity", action="append", default=None, metavar="DSk=LEVEL")
    check.add_argument("--fail-on", choices=FAIL_ON, default=None)
    check.add_argument("--config", default=None, metavar="FILE")
    check.add_argument("--dump-ir", action="store_true", default=None)
    check.add_argument("--dump-graph", action="store_true", default=None)
    check.add_argument("--jobs", type=int, default=None)
    return parser


def _codes(values: Sequence[str], flag: str) -> set[SmellCode]:
    names = [n for v in values for n in v.split(",") if n.strip()]
    try:
        return parse_codes(names)
    except UnknownCode as exc:
        raise UsageError(f"{flag}: unknown smell code {exc.code!r}") from None


def _pairs(values: Sequence[str], flag: str) -> dict[str, str]:
    out = {}
    for item in values:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{flag}: expected KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    return out


_CONFIG_KEYS = {
    "inputs", "format", "enabled", "disabled", "thresholds", "severities",
    "fail_on", "dump_ir", "dump_graph", "jobs",
}  # fmt: skip


def load_config_file(path: str) -> dict[str, Any]:
    """Read a JSON config whose keys mirror :class:`CliConfig` fields."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"--config: {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"--config: {path} must contain a JSON object")
    for key in data:
        if key not in _CONFIG_KEYS:
            raise UsageError(f"--config: unknown key {key!r} in {path}")
    out: dict[str, Any] = {}
    if "inputs" in data:
        out["inputs"] = [str(p) for p in data["inputs"]]
    if "format" in data:
        out["format"] = data["format"]
    for key in ("enabled", "disabled"):
        if key in data:
            out[key] = _codes([str(c) for c in data[key]], f"--config {key}")
    if "thresholds" in data:
        if not isinstance(data["thresholds"], dict):
            raise UsageError("--config thresholds: expected an object")
        out["thresholds"] = dict(data["thresholds"])
    if "severities" in data:
        out["severities"] = {str(k): str(v) for k, v in data["severities"].items()}
    for key in ("fail_on", "dump_ir", "dump_graph", "jobs"):
        if key in data:
            out[key] = data[key]
    return out


def parse_args(argv: Sequence[str]) -> CliConfig:
    """Parse the command line; CLI flags override the config file, which overrides defaults."""
    args = build_parser().parse_args(list(argv))
    file_cfg = load_config_file(args.config) if args.config else {}

    def pick(cli_value: Any, key: str, default: Any) -> Any:
        if cli_value is not None:
            return cli_value
        return file_cfg.get(key, default)

    cfg = CliConfig(inputs=list(args.inputs))
    cfg.format = pick(args.format, "format", "text")
    if cfg.format not in FORMATS:
        raise UsageError(f"--format: expected one of {', '.join(FORMATS)}, got {cfg.format!r}")
    cfg.fail_on = pick(args.fail_on, "fail_on", "warning")
    if cfg.fail_on not in FAIL_ON:
        raise UsageError(f"--fail-on: expected one of {', '.join(FAIL_ON)}, got {cfg.fail_on!r}")
    cfg.enabled = _codes(args.enable, "--enable") if args.enable else file_cfg.get("enabled")
    cfg.disabled = _codes(args.disable, "--disable") if args.disable else file_cfg.get("disabled", set())
    if cfg.enabled is not None and cfg.enabled & cfg.disabled:
        both = ", ".join(sorted(c.value for c in cfg.enabled & cfg.disabled))
        raise UsageError(f"--enable/--disable: {both} both enabled and disabled")
    cfg.dump_ir = bool(pick(args.dump_ir, "dump_ir", False))
    cfg.dump_graph = bool(pick(args.dump_graph, "dump_graph", False))
    cfg.jobs = pick(args.jobs, "jobs", 1)
    if not isinstance(cfg.jobs, int) or isinstance(cfg.jobs, bool) or cfg.jobs < 1:
        raise UsageError(f"--jobs: expected a positive integer, got {cfg.jobs!r}")

    overrides = dict(file_cfg.get("thresholds", {}))
    overrides.update(_pairs(args.overrides or [], "--set"))
    try:
        cfg.thresholds = Thresholds().with_overrides(overrides)
    except KeyError as exc:
        raise UsageError(f"--set: unknown threshold {exc.args[0]!r}") from None
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--set: {exc}") from None

    severities = dict(file_cfg.get("severities", {}))
    severities.update(_pairs(args.severity or [], "--severity"))
    for code, level in severities.items():
        try:
            SmellCode.parse(code)
        except UnknownCode:
            raise UsageError(f"--severity: unknown smell code {code!r}") from None
        if level not in SEVERITIES:
            raise UsageError(f"--severity: unknown severity {level!r} for {code}")
    cfg.severities = severities
    return cfg


def _qualifies(severity: str, fail_on: str) -> bool:
    if fail_on == "none":
        return False
    if fail_on == "any":
        return True
    return severity == "warning"


def process_file(path: str, cfg: CliConfig) -> tuple[str, str, int]:
    """Analyze one input; returns (stdout text, stderr text, exit code)."""
    try:
        ir, diagnostics = extract_from_path(path)
        rules = default_ruleset(cfg.thresholds, cfg.effective_codes(), cfg.severities)
        result = analyze(ir, cfg.thresholds, rules, diagnostics)
    except FnnlintError as exc:
        return "", f"fnnlint: {path}: error: {exc}\n", EXIT_ERROR

    report = result.report
    code = EXIT_FINDINGS if any(_qualifies(f.severity, cfg.fail_on) for f in report.findings) else EXIT_OK
    if cfg.format == "json":
        extra: dict[str, Any] = {}
        if cfg.dump_ir:
            extra["ir"] = ir_to_dict(ir)
        if cfg.dump_graph:
            extra["graph_dot"] = to_dot(result.graph, path)
        return render_json(report, extra) + "\n", "", code
    out = ""
    if cfg.dump_ir:
        out += save_ir_json(ir) + "\n"
    if cfg.dump_graph:
        out += to_dot(result.graph, path)
    return out + render_text(report), "", code


def run(cfg: CliConfig, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if cfg.jobs > 1 and len(cfg.inputs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(process_file, cfg.inputs, [cfg] * len(cfg.inputs)))
    else:
        results = [process_file(p, cfg) for p in cfg.inputs]
    for out, err, _ in results:
        stdout.write(out)
        stderr.write(err)
    codes = [c for _, _, c in results]
    if EXIT_ERROR in codes:
        return EXIT_ERROR
    return EXIT_FINDINGS if EXIT_FINDINGS in codes else EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        sys.stderr.write(f"fnnlint: usage error: {exc}\n")
        return EXIT_ERROR
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
