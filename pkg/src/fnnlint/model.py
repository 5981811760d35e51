"""Meta-model, extracted model records, graph lowering and conformance."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Any, Union

from .errors import EmptyModel
from .graph import ANY_KIND, AttrDecl, TypedGraph, TypeGraph, value_has_kind

FORMAT_VERSION = 1

Literal = Union[int, float, str, bool, None, tuple]


class LayerKind(str, enum.Enum):
    INPUT = "Input"
    DENSE = "Dense"
    CONV1D = "Conv1D"
    CONV2D = "Conv2D"
    MAXPOOL1D = "MaxPool1D"
    MAXPOOL2D = "MaxPool2D"
    AVGPOOL1D = "AvgPool1D"
    AVGPOOL2D = "AvgPool2D"
    GLOBAL_AVG_POOL = "GlobalAvgPool"
    GLOBAL_MAX_POOL = "GlobalMaxPool"
    DROPOUT = "Dropout"
    BATCHNORM = "BatchNorm"
    FLATTEN = "Flatten"
    RESHAPE = "Reshape"
    ACTIVATION = "Activation"
    OTHER = "Other"


CONV_KINDS = frozenset({LayerKind.CONV1D, LayerKind.CONV2D})
LOCAL_POOL_KINDS = frozenset(
    {LayerKind.MAXPOOL1D, LayerKind.MAXPOOL2D, LayerKind.AVGPOOL1D, LayerKind.AVGPOOL2D}
)
GLOBAL_POOL_KINDS = frozenset({LayerKind.GLOBAL_AVG_POOL, LayerKind.GLOBAL_MAX_POOL})
POOL_KINDS = LOCAL_POOL_KINDS | GLOBAL_POOL_KINDS
LEARNING_KINDS = frozenset({LayerKind.CONV1D, LayerKind.CONV2D, LayerKind.DENSE})
SHAPE_ONLY_KINDS = frozenset({LayerKind.FLATTEN, LayerKind.RESHAPE})


@dataclass(frozen=True)
class SourceSpan:
    line: int
    col: int
    end_line: int | None = None
    end_col: int | None = None


def _check_pair(name: str, value: tuple[int, int] | None) -> None:
    if value is None:
        return
    if (
        not isinstance(value, tuple)
        or len(value) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        raise ValueError(f"{name} must be a pair of ints, got {value!r}")
    if min(value) < 1:
        raise ValueError(f"{name} components must be positive, got {value!r}")


@dataclass(frozen=True)
class LayerRecord:
    """One layer constructor call as extracted from a program.

    Unknown values (non-literal arguments in source) are ``None``; rules treat
    them as "cannot decide" rather than as defaults.
    """

    kind: LayerKind
    name: str | None = None  # constructor name, kept for kind Other
    size: int | None = None
    filters: int | None = None
    kernel: tuple[int, int] | None = None
    strides: tuple[int, int] | None = None
    pool_size: tuple[int, int] | None = None
    rate: float | None = None
    use_bias: bool | None = None
    activation: str | None = None
    padding: str | None = None
    source_span: SourceSpan | None = None
    raw_args: tuple[tuple[str | None, Literal], ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.kind, LayerKind):
            raise ValueError(f"kind must be a LayerKind, got {self.kind!r}")
        if self.kind is LayerKind.OTHER and not self.name:
            raise ValueError("kind Other requires the constructor name")
        for attr in ("size", "filters"):
            v = getattr(self, attr)
            if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v < 1):
                raise ValueError(f"{attr} must be a positive int, got {v!r}")
        for attr in ("kernel", "strides", "pool_size"):
            _check_pair(attr, getattr(self, attr))
        if self.rate is not None:
            if isinstance(self.rate, bool) or not isinstance(self.rate, (int, float)):
                raise ValueError(f"rate must be a number, got {self.rate!r}")
            if not 0.0 <= self.rate <= 1.0:
                raise ValueError(f"rate must lie in [0, 1], got {self.rate!r}")
        if self.use_bias is not None and not isinstance(self.use_bias, bool):
            raise ValueError(f"use_bias must be a bool, got {self.use_bias!r}")

    @property
    def type_name(self) -> str:
        return self.kind.value

    def without_provenance(self) -> LayerRecord:
        """Copy with span and raw arguments cleared, for semantic comparison."""
        return replace(self, source_span=None, raw_args=())


@dataclass(frozen=True)
class Learner:
    optimizer: str | None = None
    loss: str | None = None


@dataclass(frozen=True)
class ModelIR:
    layers: tuple[LayerRecord, ...]
    input_shape: tuple[int | None, ...] | None = None
    learner: Learner = field(default_factory=Learner)
    source_path: str = ""
    format_version: int = FORMAT_VERSION

    def __post_init__(self) -> None:
        if self.format_version != FORMAT_VERSION:
            raise ValueError(f"format_version must be {FORMAT_VERSION}")
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.input_shape is not None:
            object.__setattr__(self, "input_shape", tuple(self.input_shape))


# --------------------------------------------------------------------------
# Meta-model

_SPAN_ATTRS = [
    AttrDecl("line", "int"),
    AttrDecl("col", "int"),
    AttrDecl("end_line", "int"),
    AttrDecl("end_col", "int"),
]

_LAYER_ATTRS = [
    AttrDecl("type", "string", required=True),
    AttrDecl("layer_index", "int", required=True),
    AttrDecl("other_name", "string"),
    AttrDecl("size", "int"),
    AttrDecl("filters", "int"),
    AttrDecl("kernel", "int_pair"),
    AttrDecl("kernel_h", "int"),
    AttrDecl("kernel_w", "int"),
    AttrDecl("strides", "int_pair"),
    AttrDecl("pool_size", "int_pair"),
    AttrDecl("rate", "float"),
    AttrDecl("use_bias", "bool"),
    AttrDecl("activation", "string"),
    AttrDecl("padding", "string"),
    # declared for fidelity; trained weights are not observable statically
    AttrDecl("weights", "string"),
    *_SPAN_ATTRS,
]


def builtin_metamodel() -> TypeGraph:
    """The type graph every freshly built program graph conforms to."""
    kinds = {
        "DLProgram",
        "Architecture",
        "InputLayer",
        "Layer",
        "Learner",
        "Data",
        "Labels",
        "Loss",
        "SmellAnnotation",
    }
    edges = {
        ("DLProgram", "has", "Architecture"),
        ("DLProgram", "has", "Learner"),
        ("DLProgram", "has", "Data"),
        ("Architecture", "startsWith", "InputLayer"),
        ("InputLayer", "next", "Layer"),
        ("Layer", "next", "Layer"),
        ("Architecture", "endsWith", "Labels"),
        ("Data", "contains", "Labels"),
        ("Learner", "uses", "Loss"),
        (ANY_KIND, "flaggedBy", "SmellAnnotation"),
    }
    attrs = {
        "DLProgram": (AttrDecl("source_path", "string", required=True),),
        "InputLayer": (
            AttrDecl("input_shape", "int_list"),
            AttrDecl("layer_index", "int"),
            *_SPAN_ATTRS,
        ),
        "Layer": tuple(_LAYER_ATTRS),
        "Learner": (AttrDecl("optimizer", "string"),),
        "Loss": (AttrDecl("name", "string", required=True),),
        "SmellAnnotation": (
            AttrDecl("code", "string", required=True),
            AttrDecl("severity", "string", required=True),
            AttrDecl("message_key", "string", required=True),
            AttrDecl("rule", "string"),
            AttrDecl("line", "int"),
            AttrDecl("col", "int"),
        ),
    }
    return TypeGraph(frozenset(kinds), frozenset(edges), attrs)


# Derived structure added by decoration before rules run.
DERIVED_EDGES = {
    ("Layer", "valueNext", "Layer"),
    ("Layer", "valuePrev", "Layer"),
    ("Layer", "prevConv", "Layer"),
    ("Layer", "nextStage", "Layer"),
}


def analysis_metamodel() -> TypeGraph:
    """The built-in meta-model extended with attributes and edges from decoration."""
    return builtin_metamodel().extend(
        edge_types=DERIVED_EDGES,
        attr_decls={
            "Architecture": [
                AttrDecl("n_conv", "int"),
                AttrDecl("n_pool", "int"),
                AttrDecl("n_arch_layers", "int"),
                AttrDecl("pool_ratio", "float"),
                AttrDecl("is_deep", "bool"),
            ],
            "Layer": [
                AttrDecl("stage_id", "int"),
                AttrDecl("stage_head", "bool"),
                AttrDecl("stage_conv_count", "int"),
                AttrDecl("stage_max_filters", "int"),
                AttrDecl("deep_arch", "bool"),
            ],
        },
    )


# --------------------------------------------------------------------------
# Lowering


def _span_attrs(span: SourceSpan | None) -> dict[str, int]:
    if span is None:
        return {}
    out = {"line": span.line, "col": span.col}
    if span.end_line is not None:
        out["end_line"] = span.end_line
    if span.end_col is not None:
        out["end_col"] = span.end_col
    return out


def layer_attrs(record: LayerRecord, index: int) -> dict[str, Any]:
    attrs: dict[str, Any] = {"type": record.type_name, "layer_index": index}
    if record.kind is LayerKind.OTHER:
        attrs["other_name"] = record.name
    for name in ("size", "filters", "strides", "pool_size", "use_bias", "activation", "padding"):
        value = getattr(record, name)
        if value is not None:
            attrs[name] = value
    if record.rate is not None:
        attrs["rate"] = float(record.rate)
    if record.kernel is not None:
        attrs["kernel"] = record.kernel
        attrs["kernel_h"], attrs["kernel_w"] = record.kernel
    attrs.update(_span_attrs(record.source_span))
    return attrs


def build_graph(ir: ModelIR) -> TypedGraph:
    """Lower ``ir`` to an instance graph of :func:`builtin_metamodel`.

    A leading ``Input`` record becomes the InputLayer node; otherwise one is
    synthesized carrying ``ir.input_shape``.
    """
    if not ir.layers:
        raise EmptyModel()
    g = TypedGraph()
    program = g.add_node("DLProgram", source_path=ir.source_path)
    arch = g.add_node("Architecture")
    learner_attrs = {}
    if ir.learner.optimizer is not None:
        learner_attrs["optimizer"] = ir.learner.optimizer
    learner = g.add_node("Learner", **learner_attrs)
    data = g.add_node("Data")
    labels = g.add_node("Labels")
    g.add_edge(program, "has", arch)
    g.add_edge(program, "has", learner)
    g.add_edge(program, "has", data)
    g.add_edge(arch, "endsWith", labels)
    g.add_edge(data, "contains", labels)
    if ir.learner.loss is not None:
        loss = g.add_node("Loss", name=ir.learner.loss)
        g.add_edge(learner, "uses", loss)

    layers = list(enumerate(ir.layers))
    input_attrs: dict[str, Any] = {}
    if ir.input_shape is not None:
        input_attrs["input_shape"] = tuple(ir.input_shape)
    if layers[0][1].kind is LayerKind.INPUT:
        first = layers.pop(0)[1]
        input_attrs["layer_index"] = 0
        input_attrs.update(_span_attrs(first.source_span))
    prev = g.add_node("InputLayer", **input_attrs)
    g.add_edge(arch, "startsWith", prev)
    for index, record in layers:
        nid = g.add_node("Layer", **layer_attrs(record, index))
        g.add_edge(prev, "next", nid)
        prev = nid
    return g


# --------------------------------------------------------------------------
# Conformance


@dataclass(frozen=True)
class Violation:
    element: str  # "node 3" / "edge 7" / "graph"
    reason: str

    def __str__(self) -> str:
        return f"{self.element}: {self.reason}"


def _check_next_path(g: TypedGraph) -> list[Violation]:
    chain_kinds = {"InputLayer", "Layer"}
    members = [nid for nid, n in g.nodes.items() if n.kind in chain_kinds]
    if not members:
        return []
    out: list[Violation] = []
    succ: dict[int, list[int]] = {nid: [] for nid in members}
    pred: dict[int, list[int]] = {nid: [] for nid in members}
    for e in g.edges.values():
        if e.label == "next" and e.src in succ and e.dst in succ:
            succ[e.src].append(e.dst)
            pred[e.dst].append(e.src)
    for nid in members:
        if len(succ[nid]) > 1:
            out.append(Violation(f"node {nid}", f"'next' path branches ({len(succ[nid])} successors)"))
        if len(pred[nid]) > 1:
            out.append(Violation(f"node {nid}", f"'next' path merges ({len(pred[nid])} predecessors)"))
    if out:
        return out
    heads = [nid for nid in members if not pred[nid]]
    if len(heads) != 1:
        reason = "'next' path is cyclic" if not heads else f"'next' edges form {len(heads)} disjoint paths"
        return [Violation("graph", reason)]
    seen = {heads[0]}
    cur = heads[0]
    while succ[cur]:
        cur = succ[cur][0]
        seen.add(cur)
    if len(seen) != len(members):
        return [Violation("graph", "'next' path contains a cycle detached from the input layer")]
    return []


def check_conformance(g: TypedGraph, tg: TypeGraph) -> list[Violation]:
    """Every way ``g`` fails to instantiate ``tg``; empty when it conforms."""
    out: list[Violation] = []
    for nid, node in g.nodes.items():
        if node.kind not in tg.node_types:
            out.append(Violation(f"node {nid}", f"undeclared node kind {node.kind!r}"))
            continue
        decls = {d.name: d for d in tg.attr_decls.get(node.kind, ())}
        for name, value in node.attrs.items():
            decl = decls.get(name)
            if decl is None:
                out.append(Violation(f"node {nid}", f"undeclared attribute {node.kind}.{name}"))
            elif not value_has_kind(value, decl.kind):
                out.append(
                    Violation(f"node {nid}", f"attribute {node.kind}.{name}={value!r} is not {decl.kind}")
                )
        for decl in decls.values():
            if decl.required and decl.name not in node.attrs:
                out.append(Violation(f"node {nid}", f"missing required attribute {node.kind}.{decl.name}"))
    for eid, edge in g.edges.items():
        src = g.nodes.get(edge.src)
        dst = g.nodes.get(edge.dst)
        if src is None or dst is None:
            out.append(Violation(f"edge {eid}", "dangling endpoint"))
            continue
        if src.kind not in tg.node_types or dst.kind not in tg.node_types:
            continue  # already reported on the node
        if not tg.allows_edge(src.kind, edge.label, dst.kind):
            out.append(
                Violation(f"edge {eid}", f"undeclared edge triple ({src.kind}, {edge.label}, {dst.kind})")
            )
    programs = g.nodes_of("DLProgram")
    if len(programs) > 1:
        out.append(Violation("graph", f"{len(programs)} DLProgram nodes (at most one allowed)"))
    for p in programs:
        archs = [d for d in g.successors(p, "has") if g.kind(d) == "Architecture"]
        if len(archs) != 1:
            out.append(Violation(f"node {p}", f"DLProgram has {len(archs)} Architecture nodes (exactly one required)"))
    out.extend(_check_next_path(g))
    return out
