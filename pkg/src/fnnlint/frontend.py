"""Extract a :class:`ModelIR` from Keras/TensorFlow ``Sequential`` scripts.

Only straight-line top-level statements are interpreted:

* ``import`` / ``from ... import ... [as ...]`` (aliases for layer names),
* ``m = Sequential([...])`` with a literal list of layer calls,
* ``m.add(<layer call>)``,
* ``m.compile(optimizer=..., loss=...)``.

Nothing from the analyzed program is imported or executed. Layer
constructors are resolved by the last segment of their dotted name, so
``Conv2D``, ``layers.Conv2D`` and ``tf.keras.layers.Conv2D`` are the same.
"""

from __future__ import annotations

import ast
import os
from dataclasses import dataclass, field
from typing import Any, Union

from .errors import IoError, NoModelFound, ParseError, UnsupportedExtension
from .irjson import load_ir_json
from .lexer import SourceToken, Tok, tokenize
from .model import (
    CONV_KINDS,
    LOCAL_POOL_KINDS,
    LayerKind,
    LayerRecord,
    Learner,
    ModelIR,
    SourceSpan,
)

LAYER_REGISTRY: dict[str, LayerKind] = {
    "InputLayer": LayerKind.INPUT,
    "Input": LayerKind.INPUT,
    "Dense": LayerKind.DENSE,
    "Conv1D": LayerKind.CONV1D,
    "Convolution1D": LayerKind.CONV1D,
    "Conv2D": LayerKind.CONV2D,
    "Convolution2D": LayerKind.CONV2D,
    "MaxPooling1D": LayerKind.MAXPOOL1D,
    "MaxPool1D": LayerKind.MAXPOOL1D,
    "MaxPooling2D": LayerKind.MAXPOOL2D,
    "MaxPool2D": LayerKind.MAXPOOL2D,
    "AveragePooling1D": LayerKind.AVGPOOL1D,
    "AvgPool1D": LayerKind.AVGPOOL1D,
    "AveragePooling2D": LayerKind.AVGPOOL2D,
    "AvgPool2D": LayerKind.AVGPOOL2D,
    "GlobalAveragePooling1D": LayerKind.GLOBAL_AVG_POOL,
    "GlobalAveragePooling2D": LayerKind.GLOBAL_AVG_POOL,
    "GlobalAvgPool1D": LayerKind.GLOBAL_AVG_POOL,
    "GlobalAvgPool2D": LayerKind.GLOBAL_AVG_POOL,
    "GlobalMaxPooling1D": LayerKind.GLOBAL_MAX_POOL,
    "GlobalMaxPooling2D": LayerKind.GLOBAL_MAX_POOL,
    "GlobalMaxPool1D": LayerKind.GLOBAL_MAX_POOL,
    "GlobalMaxPool2D": LayerKind.GLOBAL_MAX_POOL,
    "Dropout": LayerKind.DROPOUT,
    "BatchNormalization": LayerKind.BATCHNORM,
    "Flatten": LayerKind.FLATTEN,
    "Reshape": LayerKind.RESHAPE,
    "Activation": LayerKind.ACTIVATION,
}

# positional parameter names per constructor, in signature order
_POSITIONAL: dict[LayerKind, tuple[str, ...]] = {
    LayerKind.INPUT: ("shape",),
    LayerKind.DENSE: ("units", "activation", "use_bias"),
    LayerKind.CONV1D: ("filters", "kernel_size", "strides", "padding"),
    LayerKind.CONV2D: ("filters", "kernel_size", "strides", "padding"),
    LayerKind.DROPOUT: ("rate",),
    LayerKind.ACTIVATION: ("activation",),
    LayerKind.RESHAPE: ("target_shape",),
    **{k: ("pool_size", "strides", "padding") for k in LOCAL_POOL_KINDS},
}

_LAYER_PARAMS = {"units", "filters", "kernel_size", "strides", "padding", "pool_size", "rate", "use_bias", "activation"}
_SHAPE_PARAMS = {"input_shape", "shape", "batch_input_shape"}

_COMPOUND_KEYWORDS = {"if", "elif", "else", "for", "while", "def", "class", "with", "try", "except", "finally", "async"}
_EXPR_KEYWORDS = {"and", "or", "in", "is", "not", "if", "else", "lambda", "for", "await", "yield"}
_BINARY_OPS = {"+", "-", "*", "/", "//", "%", "**", "@", "<<", ">>", "&", "|", "^", "<", ">", "<=", ">=", "==", "!=", ":="}


@dataclass(frozen=True)
class ExtractionDiagnostic:
    severity: str  # "warning" | "error"
    message: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.severity}: {self.message}"


# --------------------------------------------------------------------------
# Expressions


@dataclass
class Name:
    path: tuple[str, ...]
    tok: SourceToken


@dataclass
class Const:
    value: Any
    tok: SourceToken


@dataclass
class Seq:
    items: list["Expr"]
    tok: SourceToken


@dataclass
class Call:
    callee: "Expr"
    args: list["Expr"]
    kwargs: list[tuple[str, "Expr"]]
    tok: SourceToken  # opening token of the callee's last segment
    end: SourceToken  # closing parenthesis


@dataclass
class Opaque:
    tok: SourceToken


Expr = Union[Name, Const, Seq, Call, Opaque]


@dataclass(frozen=True)
class CallExpr:
    """A call with every argument reduced to a literal, or ``NON_LITERAL``."""

    callee_path: tuple[str, ...]
    positional: tuple[Any, ...]
    keyword: dict[str, Any]
    span: SourceSpan


class _NonLiteral:
    def __repr__(self) -> str:
        return "<non-literal>"


NON_LITERAL = _NonLiteral()


def literal_value(expr: Expr) -> Any:
    """Value of ``expr`` if it is a literal (number, string, bool, None, or a tuple/list of ints)."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Seq):
        values = [literal_value(item) for item in expr.items]
        if all(isinstance(v, int) and not isinstance(v, bool) for v in values):
            return tuple(values)
        if all(v is None or (isinstance(v, int) and not isinstance(v, bool)) for v in values):
            return tuple(values)
    return NON_LITERAL


class _ExprParser:
    def __init__(self, tokens: list[SourceToken]) -> None:
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> SourceToken:
        return self.toks[self.i]

    def at_end(self) -> bool:
        return self.tok.kind in (Tok.NEWLINE, Tok.EOF)

    def advance(self) -> SourceToken:
        tok = self.toks[self.i]
        if tok.kind is not Tok.EOF:
            self.i += 1
        return tok

    def error(self, expected: str) -> ParseError:
        tok = self.tok
        found = tok.text if tok.kind not in (Tok.NEWLINE, Tok.EOF) else "end of statement"
        return ParseError(tok.line, tok.col, expected, found)

    def expect_punct(self, text: str) -> SourceToken:
        if not self.tok.is_punct(text):
            raise self.error(repr(text))
        return self.advance()

    def skip_balanced(self) -> None:
        """Skip to the closer matching the bracket just consumed."""
        depth = 1
        while depth:
            tok = self.tok
            if tok.kind is Tok.EOF:
                raise self.error("closing bracket")
            if tok.kind is Tok.PUNCT and tok.text in "([{":
                depth += 1
            elif tok.kind is Tok.PUNCT and tok.text in ")]}":
                depth -= 1
            self.advance()

    def skip_until_delimiter(self) -> None:
        """Skip the rest of an expression: stop at ``,`` or a closer at this depth."""
        depth = 0
        while not self.at_end():
            tok = self.tok
            if tok.kind is Tok.PUNCT:
                if tok.text in "([{":
                    depth += 1
                elif tok.text in ")]}":
                    if depth == 0:
                        return
                    depth -= 1
                elif tok.text == "," and depth == 0:
                    return
            self.advance()

    def expr(self) -> Expr:
        start = self.tok
        if start.is_ident("lambda"):
            self.skip_until_delimiter()
            return Opaque(start)
        left = self.unary()
        while True:
            tok = self.tok
            if tok.kind is Tok.PUNCT and tok.text in _BINARY_OPS:
                self.advance()
            elif tok.kind is Tok.IDENT and tok.text in ("and", "or", "in", "is", "not", "if", "else"):
                self.advance()
                if tok.text in ("is", "not") and self.tok.is_ident() and self.tok.text in ("not", "in"):
                    self.advance()
            else:
                return left
            self.unary()
            left = Opaque(start)

    def unary(self) -> Expr:
        tok = self.tok
        if tok.kind is Tok.PUNCT and tok.text in ("-", "+", "~"):
            self.advance()
            operand = self.unary()
            if (
                tok.text in "-+"
                and isinstance(operand, Const)
                and isinstance(operand.value, (int, float))
                and not isinstance(operand.value, bool)
            ):
                return Const(-operand.value if tok.text == "-" else operand.value, tok)
            return Opaque(tok)
        if tok.is_ident("not") or tok.is_ident("await"):
            self.advance()
            self.unary()
            return Opaque(tok)
        return self.postfix()

    def postfix(self) -> Expr:
        node = self.atom()
        while True:
            tok = self.tok
            if tok.is_punct("."):
                self.advance()
                if not self.tok.is_ident():
                    raise self.error("attribute name")
                attr = self.advance()
                if isinstance(node, Name):
                    node = Name(node.path + (attr.text,), attr)
                else:
                    node = Opaque(attr)
            elif tok.is_punct("("):
                node = self.call(node)
            elif tok.is_punct("["):
                self.advance()
                self.skip_balanced()
                node = Opaque(tok)
            else:
                return node

    def call(self, callee: Expr) -> Call:
        self.expect_punct("(")
        args: list[Expr] = []
        kwargs: list[tuple[str, Expr]] = []
        while not self.tok.is_punct(")"):
            tok = self.tok
            if tok.is_punct("*") or tok.is_punct("**"):
                self.advance()
                self.expr()
                args.append(Opaque(tok))
            elif tok.is_ident() and self.toks[self.i + 1].is_punct("="):
                self.advance()
                self.advance()
                kwargs.append((tok.text, self.expr()))
            else:
                value = self.expr()
                if self.tok.is_ident("for"):
                    self.skip_until_delimiter()
                    value = Opaque(tok)
                args.append(value)
            if self.tok.is_punct(","):
                self.advance()
            elif not self.tok.is_punct(")"):
                raise self.error("',' or ')'")
        end = self.advance()
        anchor = callee.tok if isinstance(callee, (Name, Opaque)) else getattr(callee, "tok")
        return Call(callee, args, kwargs, anchor, end)

    def sequence(self, open_tok: SourceToken, closer: str) -> Expr:
        items: list[Expr] = []
        saw_comma = False
        while not self.tok.is_punct(closer):
            item = self.expr()
            if self.tok.is_ident("for"):
                self.skip_until_delimiter()
                self.expect_punct(closer)
                return Opaque(open_tok)
            items.append(item)
            if self.tok.is_punct(","):
                saw_comma = True
                self.advance()
            elif not self.tok.is_punct(closer):
                raise self.error(f"',' or {closer!r}")
        self.advance()
        if closer == ")" and len(items) == 1 and not saw_comma:
            return items[0]
        return Seq(items, open_tok)

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind is Tok.IDENT:
            if tok.text in _EXPR_KEYWORDS:
                raise self.error("expression")
            self.advance()
            return Name((tok.text,), tok)
        if tok.kind is Tok.INT:
            self.advance()
            return Const(int(tok.text.replace("_", ""), 0), tok)
        if tok.kind is Tok.FLOAT:
            self.advance()
            if tok.text[-1] in "jJ":
                return Opaque(tok)
            return Const(float(tok.text.replace("_", "")), tok)
        if tok.kind is Tok.BOOL:
            self.advance()
            return Const(tok.text == "True", tok)
        if tok.kind is Tok.NONE:
            self.advance()
            return Const(None, tok)
        if tok.kind is Tok.STRING:
            parts = []
            while self.tok.kind is Tok.STRING:
                parts.append(self.advance().text)
            if any(p.lstrip("rRbBuU")[:1] not in ("'", '"') for p in parts):
                return Opaque(tok)  # f-strings are not literals
            try:
                value = ast.literal_eval(" ".join(parts))
            except (ValueError, SyntaxError):
                return Opaque(tok)
            return Const(value if isinstance(value, str) else NON_LITERAL, tok)
        if tok.is_punct("("):
            self.advance()
            return self.sequence(tok, ")")
        if tok.is_punct("["):
            self.advance()
            return self.sequence(tok, "]")
        if tok.is_punct("{"):
            self.advance()
            self.skip_balanced()
            return Opaque(tok)
        if tok.is_punct("..."):
            self.advance()
            return Opaque(tok)
        raise self.error("expression")


def parse_expression(tokens: list[SourceToken]) -> Expr:
    """Parse one complete expression from ``tokens`` (which must end with Newline/EOF)."""
    parser = _ExprParser(tokens)
    expr = parser.expr()
    if not parser.at_end():
        raise parser.error("end of statement")
    return expr


def to_call_expr(call: Call) -> CallExpr:
    callee = call.callee.path if isinstance(call.callee, Name) else ()
    return CallExpr(
        callee_path=callee,
        positional=tuple(literal_value(a) for a in call.args),
        keyword={k: literal_value(v) for k, v in call.kwargs},
        span=SourceSpan(call.tok.line, call.tok.col, call.end.line, call.end.col + 1),
    )


# --------------------------------------------------------------------------
# Statements


@dataclass
class _Extraction:
    aliases: dict[str, str] = field(default_factory=dict)
    model_name: str | None = None
    other_models: set[str] = field(default_factory=set)
    non_models: set[str] = field(default_factory=set)
    layers: list[LayerRecord] = field(default_factory=list)
    input_shape: tuple[int | None, ...] | None = None
    optimizer: str | None = None
    loss: str | None = None
    diagnostics: list[ExtractionDiagnostic] = field(default_factory=list)
    nested_model_code: bool = False

    def warn(self, tok: SourceToken, message: str) -> None:
        self.diagnostics.append(ExtractionDiagnostic("warning", message, tok.line, tok.col))


def _split_units(tokens: list[SourceToken]) -> list[tuple[str, list[SourceToken]]]:
    """Split a token stream into top-level simple statements and compound blocks."""
    units: list[tuple[str, list[SourceToken]]] = []
    i = 0
    n = len(tokens)
    while i < n and tokens[i].kind is not Tok.EOF:
        tok = tokens[i]
        if tok.kind in (Tok.NEWLINE, Tok.DEDENT):
            i += 1
            continue
        if tok.kind is Tok.INDENT:
            # unexpected indentation at top level: treat as a block
            start = i
            depth = 0
            while i < n:
                if tokens[i].kind is Tok.INDENT:
                    depth += 1
                elif tokens[i].kind is Tok.DEDENT:
                    depth -= 1
                    if depth == 0:
                        break
                i += 1
            units.append(("block", tokens[start:i]))
            continue
        j = i
        while tokens[j].kind not in (Tok.NEWLINE, Tok.EOF):
            j += 1
        line = tokens[i:j]
        is_compound = (tok.is_ident() and tok.text in _COMPOUND_KEYWORDS) or tok.is_punct("@")
        if is_compound:
            k = j + 1 if tokens[j].kind is Tok.NEWLINE else j
            if k < n and tokens[k].kind is Tok.INDENT:
                depth = 0
                while k < n:
                    if tokens[k].kind is Tok.INDENT:
                        depth += 1
                    elif tokens[k].kind is Tok.DEDENT:
                        depth -= 1
                        if depth == 0:
                            break
                    k += 1
                units.append(("block", tokens[i:k]))
                i = k
            else:
                units.append(("block", line))
                i = j
            continue
        # split simple statements on ';'
        stmt: list[SourceToken] = []
        for t in line:
            if t.is_punct(";"):
                if stmt:
                    units.append(("simple", stmt))
                stmt = []
            else:
                stmt.append(t)
        if stmt:
            units.append(("simple", stmt))
        i = j
    return units


def _terminated(stmt: list[SourceToken]) -> list[SourceToken]:
    last = stmt[-1]
    return stmt + [SourceToken(Tok.NEWLINE, "", last.line, last.col + len(last.text))]


def _parse_dotted(parser: _ExprParser) -> list[str]:
    if not parser.tok.is_ident():
        raise parser.error("module name")
    parts = [parser.advance().text]
    while parser.tok.is_punct("."):
        parser.advance()
        if not parser.tok.is_ident():
            raise parser.error("module name")
        parts.append(parser.advance().text)
    return parts


def _import_stmt(stmt: list[SourceToken], ex: _Extraction) -> None:
    p = _ExprParser(_terminated(stmt))
    if p.tok.is_ident("import"):
        p.advance()
        while True:
            _parse_dotted(p)
            if p.tok.is_ident("as"):
                p.advance()
                if not p.tok.is_ident():
                    raise p.error("alias name")
                p.advance()
            if not p.tok.is_punct(","):
                break
            p.advance()
    else:
        p.advance()  # from
        while p.tok.is_punct(".") or p.tok.is_punct("..."):
            p.advance()
        if not p.tok.is_ident("import"):
            _parse_dotted(p)
        if not p.tok.is_ident("import"):
            raise p.error("'import'")
        p.advance()
        if p.tok.is_punct("*"):
            p.advance()
        else:
            paren = p.tok.is_punct("(")
            if paren:
                p.advance()
            while True:
                if not p.tok.is_ident():
                    raise p.error("imported name")
                name = p.advance().text
                local = name
                if p.tok.is_ident("as"):
                    p.advance()
                    if not p.tok.is_ident():
                        raise p.error("alias name")
                    local = p.advance().text
                if local != name:
                    ex.aliases[local] = name
                if not p.tok.is_punct(","):
                    break
                p.advance()
                if paren and p.tok.is_punct(")"):
                    break
            if paren:
                p.expect_punct(")")
    if not p.at_end():
        raise p.error("end of import statement")


def _resolve(path: tuple[str, ...], ex: _Extraction) -> str:
    last = path[-1]
    if len(path) == 1:
        return ex.aliases.get(last, last)
    return last


def _pair(value: Any) -> tuple[int, int] | None:
    if isinstance(value, int) and not isinstance(value, bool):
        return (value, value) if value >= 1 else None
    if isinstance(value, tuple) and len(value) in (1, 2):
        if all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in value):
            return (value[0], value[-1])
    return None


def _name_of(expr: Expr) -> str | None:
    """String literal, dotted name, or callee name, reduced to a final identifier."""
    if isinstance(expr, Const) and isinstance(expr.value, str):
        return expr.value
    if isinstance(expr, Name):
        return expr.path[-1]
    if isinstance(expr, Call) and isinstance(expr.callee, Name):
        return expr.callee.path[-1]
    return None


def _shape(value: Any) -> tuple[int | None, ...] | None:
    if isinstance(value, int) and not isinstance(value, bool):
        return (value,)
    if isinstance(value, tuple):
        return value
    return None


def _layer_from_expr(expr: Expr, ex: _Extraction) -> LayerRecord:
    if not isinstance(expr, Call) or not isinstance(expr.callee, Name):
        label = ".".join(expr.path) if isinstance(expr, Name) else "<expression>"
        ex.warn(expr.tok, f"layer expression {label!r} is not a constructor call; recorded as an unknown layer")
        return LayerRecord(kind=LayerKind.OTHER, name=label, source_span=SourceSpan(expr.tok.line, expr.tok.col))

    ctor = _resolve(expr.callee.path, ex)
    kind = LAYER_REGISTRY.get(ctor, LayerKind.OTHER)
    span = SourceSpan(expr.tok.line, expr.tok.col, expr.end.line, expr.end.col + 1)
    if kind is LayerKind.OTHER:
        ex.warn(expr.tok, f"unrecognized layer constructor {ctor!r}; recorded as an unknown layer")

    params: dict[str, tuple[Expr, SourceToken]] = {}
    raw: list[tuple[str | None, Any]] = []
    names = _POSITIONAL.get(kind, ())
    for i, arg in enumerate(expr.args):
        value = literal_value(arg)
        if value is not NON_LITERAL:
            raw.append((None, value))
        if i < len(names):
            params[names[i]] = (arg, arg.tok)
    for key, arg in expr.kwargs:
        value = literal_value(arg)
        if value is not NON_LITERAL:
            raw.append((key, value))
        params[key] = (arg, arg.tok)

    fields: dict[str, Any] = {}
    if kind in (LayerKind.DENSE, LayerKind.CONV1D, LayerKind.CONV2D):
        fields["use_bias"] = True
        if kind in CONV_KINDS:
            fields["strides"] = (1, 1)
            fields["padding"] = "valid"
    if kind in LOCAL_POOL_KINDS:
        fields["pool_size"] = (2, 2)
        fields["padding"] = "valid"

    def non_literal(param: str, tok: SourceToken) -> None:
        ex.warn(tok, f"non-literal argument for {param!r} of {ctor}; value treated as unknown")

    def invalid(param: str, tok: SourceToken, value: Any) -> None:
        ex.warn(tok, f"invalid value {value!r} for {param!r} of {ctor}; value treated as unknown")

    for param, (arg, tok) in params.items():
        if param in _SHAPE_PARAMS and (kind is LayerKind.INPUT or param != "shape"):
            value = literal_value(arg)
            shape = _shape(value)
            if shape is None:
                non_literal(param, tok) if value is NON_LITERAL else invalid(param, tok, value)
            else:
                if param == "batch_input_shape":
                    shape = shape[1:]
                if ex.input_shape is None:
                    ex.input_shape = shape
            continue
        if param not in _LAYER_PARAMS:
            continue
        if kind is LayerKind.OTHER:
            continue
        if param == "activation":
            if isinstance(arg, Const) and arg.value is None:
                fields["activation"] = None
                continue
            name = _name_of(arg)
            if name is None:
                non_literal(param, tok)
            else:
                fields["activation"] = name
            continue
        value = literal_value(arg)
        target = {"units": "size", "kernel_size": "kernel"}.get(param, param)
        if param in ("units", "filters", "rate", "use_bias", "kernel_size", "pool_size", "strides", "padding"):
            applicable = {
                "units": kind is LayerKind.DENSE,
                "filters": kind in CONV_KINDS,
                "kernel_size": kind in CONV_KINDS,
                "rate": kind is LayerKind.DROPOUT,
                "use_bias": kind in (LayerKind.DENSE, LayerKind.CONV1D, LayerKind.CONV2D),
                "pool_size": kind in LOCAL_POOL_KINDS,
                "strides": kind in CONV_KINDS or kind in LOCAL_POOL_KINDS,
                "padding": kind in CONV_KINDS or kind in LOCAL_POOL_KINDS,
            }[param]
            if not applicable:
                continue
        if value is NON_LITERAL:
            non_literal(param, tok)
            fields[target] = None
            continue
        if param in ("units", "filters"):
            ok = isinstance(value, int) and not isinstance(value, bool) and value >= 1
            fields[target] = value if ok else None
        elif param in ("kernel_size", "pool_size", "strides"):
            if param == "strides" and value is None:
                continue  # strides=None means "same as pool_size"
            fields[target] = _pair(value)
            ok = fields[target] is not None
        elif param == "rate":
            ok = isinstance(value, (int, float)) and not isinstance(value, bool) and 0 <= value <= 1
            fields[target] = float(value) if ok else None
        elif param == "use_bias":
            ok = isinstance(value, bool)
            fields[target] = value if ok else None
        else:  # padding
            ok = isinstance(value, str)
            fields[target] = value if ok else None
        if not ok:
            invalid(param, tok, value)

    if kind in LOCAL_POOL_KINDS and "strides" not in params:
        fields["strides"] = fields.get("pool_size")
    return LayerRecord(
        kind=kind,
        name=ctor if kind is LayerKind.OTHER else None,
        source_span=span,
        raw_args=tuple(raw),
        **fields,
    )


def _is_sequential(expr: Expr, ex: _Extraction) -> bool:
    return isinstance(expr, Call) and isinstance(expr.callee, Name) and _resolve(expr.callee.path, ex) == "Sequential"


def _sequential_layers(call: Call, ex: _Extraction) -> None:
    layer_list: Expr | None = call.args[0] if call.args else None
    for key, value in call.kwargs:
        if key == "layers":
            layer_list = value
    if layer_list is None or (isinstance(layer_list, Const) and layer_list.value is None):
        return
    if not isinstance(layer_list, Seq):
        ex.warn(layer_list.tok, "Sequential layer list is not a literal list; its layers are not analyzed")
        return
    for item in layer_list.items:
        ex.layers.append(_layer_from_expr(item, ex))


def _compile_args(call: Call, ex: _Extraction) -> None:
    params: dict[str, Expr] = {}
    for i, arg in enumerate(call.args[:2]):
        params[("optimizer", "loss")[i]] = arg
    for key, arg in call.kwargs:
        params[key] = arg
    for key in ("optimizer", "loss"):
        if key not in params:
            continue
        name = _name_of(params[key])
        if name is None:
            ex.warn(params[key].tok, f"non-literal argument for {key!r} of compile; value treated as unknown")
        elif key == "optimizer":
            ex.optimizer = name
        else:
            ex.loss = name


def _is_layer_call(expr: Expr, ex: _Extraction) -> bool:
    return isinstance(expr, Call) and isinstance(expr.callee, Name) and _resolve(expr.callee.path, ex) in LAYER_REGISTRY


def _simple_stmt(stmt: list[SourceToken], ex: _Extraction) -> None:
    first = stmt[0]
    if first.is_ident("import") or first.is_ident("from"):
        _import_stmt(stmt, ex)
        return
    toks = _terminated(stmt)

    # NAME = <expr>
    if first.is_ident() and len(stmt) > 2 and stmt[1].is_punct("="):
        mentions_sequential = any(t.is_ident("Sequential") for t in stmt) or any(
            ex.aliases.get(t.text) == "Sequential" for t in stmt if t.is_ident()
        )
        try:
            value = parse_expression(toks[2:])
        except ParseError:
            if mentions_sequential:
                raise
            return
        if _is_sequential(value, ex):
            if ex.model_name is None:
                ex.model_name = first.text
                _sequential_layers(value, ex)
            else:
                ex.other_models.add(first.text)
                ex.warn(first, f"additional model {first.text!r} ignored; only the first Sequential model is analyzed")
        elif first.text != ex.model_name:
            ex.non_models.add(first.text)
        return

    # NAME.add(...) / NAME.compile(...)
    if (
        first.is_ident()
        and len(stmt) > 3
        and stmt[1].is_punct(".")
        and stmt[2].kind is Tok.IDENT
        and stmt[2].text in ("add", "compile")
        and stmt[3].is_punct("(")
    ):
        receiver = first.text
        if receiver in ex.non_models or receiver in ex.other_models:
            return
        value = parse_expression(toks)
        if not isinstance(value, Call):
            return  # e.g. model.add(...).something
        method = stmt[2].text
        if method == "add":
            if len(value.args) != 1 or value.kwargs:
                raise ParseError(value.tok.line, value.tok.col, "exactly one layer argument to add()")
            if ex.model_name is None:
                if not _is_layer_call(value.args[0], ex):
                    return
                ex.model_name = receiver
            if receiver != ex.model_name:
                return
            ex.layers.append(_layer_from_expr(value.args[0], ex))
        elif receiver == ex.model_name:
            _compile_args(value, ex)


def _scan_block(block: list[SourceToken], ex: _Extraction) -> None:
    for i, tok in enumerate(block):
        if tok.is_ident("Sequential") or ex.aliases.get(tok.text) == "Sequential" and tok.is_ident():
            ex.nested_model_code = True
        if (
            tok.is_ident()
            and i + 3 < len(block)
            and block[i + 1].is_punct(".")
            and block[i + 2].is_ident("add")
            and block[i + 3].is_punct("(")
            and (i == 0 or not block[i - 1].is_punct("."))
        ):
            if ex.model_name is not None and tok.text == ex.model_name:
                ex.warn(tok, "layer added inside a function or control-flow block is not evaluated")
            elif ex.model_name is None:
                ex.nested_model_code = True


def extract_model(source: str, source_path: str = "") -> tuple[ModelIR, list[ExtractionDiagnostic]]:
    """Extract the first Sequential model defined in ``source``.

    Raises :class:`LexError`/:class:`ParseError` on malformed input and
    :class:`NoModelFound` when no model is built at top level.
    """
    tokens = tokenize(source)
    ex = _Extraction()
    for kind, unit in _split_units(tokens):
        if kind == "block":
            _scan_block(unit, ex)
        else:
            _simple_stmt(unit, ex)
    if ex.model_name is None:
        detail = "model code inside functions or control flow is not evaluated" if ex.nested_model_code else ""
        raise NoModelFound(detail)
    ir = ModelIR(
        layers=tuple(ex.layers),
        input_shape=ex.input_shape,
        learner=Learner(optimizer=ex.optimizer, loss=ex.loss),
        source_path=source_path,
    )
    return ir, ex.diagnostics


SOURCE_EXTENSIONS = (".py",)


def extract_from_path(path: str | os.PathLike[str]) -> tuple[ModelIR, list[ExtractionDiagnostic]]:
    """Read ``path`` and extract its model; ``.json`` files are loaded as IR."""
    path = os.fspath(path)
    ext = os.path.splitext(path)[1].lower()
    if ext not in SOURCE_EXTENSIONS and ext != ".json":
        raise UnsupportedExtension(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if ext == ".json":
        ir = load_ir_json(text)
        if not ir.source_path:
            ir = ModelIR(ir.layers, ir.input_shape, ir.learner, path)
        return ir, []
    return extract_model(text, source_path=path)
