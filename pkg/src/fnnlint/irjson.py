"""JSON serialization of :class:`~fnnlint.model.ModelIR` (format version 1)."""

from __future__ import annotations

import json
from typing import Any

from .errors import SchemaError, VersionError
from .model import FORMAT_VERSION, LayerKind, LayerRecord, Learner, ModelIR, SourceSpan

_TOP_KEYS = {"format_version", "source_path", "input_shape", "learner", "layers"}
_LEARNER_KEYS = {"optimizer", "loss"}
_SPAN_KEYS = {"line", "col", "end_line", "end_col"}
_INT_FIELDS = ("size", "filters")
_PAIR_FIELDS = ("kernel", "strides", "pool_size")
_STR_FIELDS = ("activation", "padding", "name")
_LAYER_KEYS = (
    {"kind", "rate", "use_bias", "source_span", "raw_args"}
    | set(_INT_FIELDS)
    | set(_PAIR_FIELDS)
    | set(_STR_FIELDS)
)


def _literal_to_json(value: Any) -> Any:
    return list(value) if isinstance(value, tuple) else value


def _layer_to_json(layer: LayerRecord) -> dict[str, Any]:
    out: dict[str, Any] = {"kind": layer.kind.value}
    if layer.name is not None:
        out["name"] = layer.name
    for key in _INT_FIELDS:
        if getattr(layer, key) is not None:
            out[key] = getattr(layer, key)
    for key in _PAIR_FIELDS:
        if getattr(layer, key) is not None:
            out[key] = list(getattr(layer, key))
    if layer.rate is not None:
        out["rate"] = layer.rate
    if layer.use_bias is not None:
        out["use_bias"] = layer.use_bias
    for key in ("activation", "padding"):
        if getattr(layer, key) is not None:
            out[key] = getattr(layer, key)
    if layer.source_span is not None:
        span = layer.source_span
        out["source_span"] = {"line": span.line, "col": span.col}
        if span.end_line is not None:
            out["source_span"]["end_line"] = span.end_line
        if span.end_col is not None:
            out["source_span"]["end_col"] = span.end_col
    if layer.raw_args:
        out["raw_args"] = [{"name": n, "value": _literal_to_json(v)} for n, v in layer.raw_args]
    return out


def ir_to_dict(ir: ModelIR) -> dict[str, Any]:
    return {
        "format_version": ir.format_version,
        "source_path": ir.source_path,
        "input_shape": None if ir.input_shape is None else list(ir.input_shape),
        "learner": {"optimizer": ir.learner.optimizer, "loss": ir.learner.loss},
        "layers": [_layer_to_json(layer) for layer in ir.layers],
    }


def save_ir_json(ir: ModelIR, indent: int | None = 2) -> str:
    return json.dumps(ir_to_dict(ir), indent=indent)


# --------------------------------------------------------------------------
# Loading


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _reject_unknown(obj: dict[str, Any], allowed: set[str], path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}", "unknown field")


def _expect_object(value: Any, path: str) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise SchemaError(path, "expected an object")
    return value


def _opt_str(obj: dict[str, Any], key: str, path: str) -> str | None:
    value = obj.get(key)
    if value is not None and not isinstance(value, str):
        raise SchemaError(f"{path}.{key}", "expected a string or null")
    return value


def _load_literal(value: Any, path: str) -> Any:
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, list) and all(_is_int(v) for v in value):
        return tuple(value)
    raise SchemaError(path, "expected a literal (number, string, bool, null or list of ints)")


def _load_span(value: Any, path: str) -> SourceSpan:
    obj = _expect_object(value, path)
    _reject_unknown(obj, _SPAN_KEYS, path)
    for key in ("line", "col"):
        if key not in obj:
            raise SchemaError(f"{path}.{key}", "missing required field")
    for key in _SPAN_KEYS:
        if key in obj and not (_is_int(obj[key]) and obj[key] >= 1):
            raise SchemaError(f"{path}.{key}", "expected a positive integer")
    return SourceSpan(obj["line"], obj["col"], obj.get("end_line"), obj.get("end_col"))


def _load_layer(value: Any, path: str) -> LayerRecord:
    obj = _expect_object(value, path)
    _reject_unknown(obj, _LAYER_KEYS, path)
    if "kind" not in obj:
        raise SchemaError(f"{path}.kind", "missing required field")
    try:
        kind = LayerKind(obj["kind"])
    except ValueError:
        raise SchemaError(f"{path}.kind", f"unknown layer kind {obj['kind']!r}") from None
    fields: dict[str, Any] = {"kind": kind}
    for key in _INT_FIELDS:
        if key in obj:
            if not _is_int(obj[key]):
                raise SchemaError(f"{path}.{key}", "expected an integer")
            fields[key] = obj[key]
    for key in _PAIR_FIELDS:
        if key in obj:
            v = obj[key]
            if not (isinstance(v, list) and len(v) == 2 and all(_is_int(x) for x in v)):
                raise SchemaError(f"{path}.{key}", "expected a pair of integers")
            fields[key] = tuple(v)
    if "rate" in obj:
        rate = obj["rate"]
        if isinstance(rate, bool) or not isinstance(rate, (int, float)):
            raise SchemaError(f"{path}.rate", "expected a number")
        fields["rate"] = float(rate)
    if "use_bias" in obj:
        if not isinstance(obj["use_bias"], bool):
            raise SchemaError(f"{path}.use_bias", "expected a boolean")
        fields["use_bias"] = obj["use_bias"]
    for key in _STR_FIELDS:
        if key in obj:
            if obj[key] is None and key == "activation":
                continue
            if not isinstance(obj[key], str):
                raise SchemaError(f"{path}.{key}", "expected a string")
            fields[key] = obj[key]
    if "source_span" in obj:
        fields["source_span"] = _load_span(obj["source_span"], f"{path}.source_span")
    if "raw_args" in obj:
        raw = obj["raw_args"]
        if not isinstance(raw, list):
            raise SchemaError(f"{path}.raw_args", "expected a list")
        args = []
        for i, item in enumerate(raw):
            item_path = f"{path}.raw_args[{i}]"
            item = _expect_object(item, item_path)
            _reject_unknown(item, {"name", "value"}, item_path)
            if "value" not in item:
                raise SchemaError(f"{item_path}.value", "missing required field")
            args.append((_opt_str(item, "name", item_path), _load_literal(item["value"], f"{item_path}.value")))
        fields["raw_args"] = tuple(args)
    try:
        return LayerRecord(**fields)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from None


def ir_from_dict(obj: Any) -> ModelIR:
    obj = _expect_object(obj, "$")
    if "format_version" not in obj:
        raise SchemaError("$.format_version", "missing required field")
    if obj["format_version"] != FORMAT_VERSION or isinstance(obj["format_version"], bool):
        raise VersionError(obj["format_version"])
    _reject_unknown(obj, _TOP_KEYS, "$")
    if not isinstance(obj.get("source_path"), str):
        raise SchemaError("$.source_path", "expected a string")
    shape = obj.get("input_shape")
    if shape is not None:
        if not isinstance(shape, list) or not all(v is None or _is_int(v) for v in shape):
            raise SchemaError("$.input_shape", "expected a list of integers or null")
        shape = tuple(shape)
    learner_obj = _expect_object(obj.get("learner", {}), "$.learner")
    _reject_unknown(learner_obj, _LEARNER_KEYS, "$.learner")
    learner = Learner(
        optimizer=_opt_str(learner_obj, "optimizer", "$.learner"),
        loss=_opt_str(learner_obj, "loss", "$.learner"),
    )
    if not isinstance(obj.get("layers"), list):
        raise SchemaError("$.layers", "expected a list")
    layers = tuple(_load_layer(v, f"$.layers[{i}]") for i, v in enumerate(obj["layers"]))
    return ModelIR(layers=layers, input_shape=shape, learner=learner, source_path=obj["source_path"])


def load_ir_json(text: str) -> ModelIR:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    return ir_from_dict(obj)
