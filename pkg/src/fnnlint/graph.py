"""Attributed instance graphs and their type graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator

# Wildcard source kind in edge declarations ("any kind may be flagged").
ANY_KIND = "*"

VALUE_KINDS = ("int", "int_pair", "float", "string", "bool", "int_list")


def value_has_kind(value: Any, kind: str) -> bool:
    if kind == "bool":
        return isinstance(value, bool)
    if kind == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "float":
        return isinstance(value, (int, float, Fraction)) and not isinstance(value, bool)
    if kind == "string":
        return isinstance(value, str)
    if kind == "int_pair":
        return (
            isinstance(value, tuple)
            and len(value) == 2
            and all(isinstance(v, int) and not isinstance(v, bool) for v in value)
        )
    if kind == "int_list":
        return isinstance(value, tuple) and all(
            v is None or (isinstance(v, int) and not isinstance(v, bool)) for v in value
        )
    raise ValueError(f"unknown value kind {kind!r}")


@dataclass(frozen=True)
class AttrDecl:
    name: str
    kind: str
    required: bool = False


@dataclass(frozen=True)
class TypeGraph:
    """Schema that instance graphs conform to.

    ``edge_types`` holds ``(source_kind, label, target_kind)`` triples; a source
    of ``"*"`` admits any declared kind.
    """

    node_types: frozenset[str]
    edge_types: frozenset[tuple[str, str, str]]
    attr_decls: dict[str, tuple[AttrDecl, ...]]

    def __post_init__(self) -> None:
        for src, label, dst in self.edge_types:
            if src != ANY_KIND and src not in self.node_types:
                raise ValueError(f"edge ({src}, {label}, {dst}) uses undeclared kind {src}")
            if dst not in self.node_types:
                raise ValueError(f"edge ({src}, {label}, {dst}) uses undeclared kind {dst}")
        for kind, decls in self.attr_decls.items():
            if kind not in self.node_types:
                raise ValueError(f"attributes declared for undeclared kind {kind}")
            names = [d.name for d in decls]
            if len(names) != len(set(names)):
                raise ValueError(f"duplicate attribute names on {kind}")
            for d in decls:
                if d.kind not in VALUE_KINDS:
                    raise ValueError(f"{kind}.{d.name}: unknown value kind {d.kind}")

    def attr(self, kind: str, name: str) -> AttrDecl | None:
        for d in self.attr_decls.get(kind, ()):
            if d.name == name:
                return d
        return None

    def allows_edge(self, src_kind: str, label: str, dst_kind: str) -> bool:
        return (src_kind, label, dst_kind) in self.edge_types or (
            (ANY_KIND, label, dst_kind) in self.edge_types and src_kind in self.node_types
        )

    def extend(
        self,
        node_types: set[str] = frozenset(),
        edge_types: set[tuple[str, str, str]] = frozenset(),
        attr_decls: dict[str, list[AttrDecl]] | None = None,
    ) -> TypeGraph:
        decls = {k: tuple(v) for k, v in self.attr_decls.items()}
        for kind, extra in (attr_decls or {}).items():
            decls[kind] = decls.get(kind, ()) + tuple(extra)
        return TypeGraph(
            node_types=self.node_types | frozenset(node_types),
            edge_types=self.edge_types | frozenset(edge_types),
            attr_decls=decls,
        )


@dataclass
class Node:
    kind: str
    attrs: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Edge:
    src: int
    label: str
    dst: int


class TypedGraph:
    """Directed multigraph with kinded, attributed nodes and labelled edges.

    Node and edge ids are integers allocated in insertion order, so iteration
    order is deterministic.
    """

    def __init__(self) -> None:
        self.nodes: dict[int, Node] = {}
        self.edges: dict[int, Edge] = {}
        self._next_node = 0
        self._next_edge = 0
        self._out: dict[int, list[int]] = {}
        self._in: dict[int, list[int]] = {}

    def add_node(self, kind: str, **attrs: Any) -> int:
        nid = self._next_node
        self._next_node += 1
        self.nodes[nid] = Node(kind, dict(attrs))
        self._out[nid] = []
        self._in[nid] = []
        return nid

    def add_edge(self, src: int, label: str, dst: int) -> int:
        if src not in self.nodes or dst not in self.nodes:
            raise KeyError(f"edge endpoint missing: {src} -> {dst}")
        eid = self._next_edge
        self._next_edge += 1
        self.edges[eid] = Edge(src, label, dst)
        self._out[src].append(eid)
        self._in[dst].append(eid)
        return eid

    def kind(self, nid: int) -> str:
        return self.nodes[nid].kind

    def attrs(self, nid: int) -> dict[str, Any]:
        return self.nodes[nid].attrs

    def nodes_of(self, kind: str) -> list[int]:
        return [nid for nid, n in self.nodes.items() if n.kind == kind]

    def out_edges(self, nid: int, label: str | None = None) -> Iterator[Edge]:
        for eid in self._out[nid]:
            e = self.edges[eid]
            if label is None or e.label == label:
                yield e

    def in_edges(self, nid: int, label: str | None = None) -> Iterator[Edge]:
        for eid in self._in[nid]:
            e = self.edges[eid]
            if label is None or e.label == label:
                yield e

    def successors(self, nid: int, label: str) -> list[int]:
        return [e.dst for e in self.out_edges(nid, label)]

    def predecessors(self, nid: int, label: str) -> list[int]:
        return [e.src for e in self.in_edges(nid, label)]

    def has_edge(self, src: int, label: str, dst: int) -> bool:
        return any(e.dst == dst for e in self.out_edges(src, label))

    def copy(self) -> TypedGraph:
        g = TypedGraph()
        g.nodes = {nid: Node(n.kind, dict(n.attrs)) for nid, n in self.nodes.items()}
        g.edges = dict(self.edges)
        g._next_node = self._next_node
        g._next_edge = self._next_edge
        g._out = {k: list(v) for k, v in self._out.items()}
        g._in = {k: list(v) for k, v in self._in.items()}
        return g

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        return f"TypedGraph(nodes={len(self.nodes)}, edges={len(self.edges)})"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(g: TypedGraph, name: str = "model") -> str:
    """Render ``g`` in Graphviz DOT; annotation nodes are filled red."""
    lines = [f'digraph "{_dot_escape(name)}" {{', "  node [shape=box, fontsize=10];"]
    for nid, node in g.nodes.items():
        parts = [node.kind]
        for key in sorted(node.attrs):
            parts.append(f"{key}={node.attrs[key]}")
        label = _dot_escape("\\n".join(parts)).replace("\\\\n", "\\n")
        style = ', style=filled, fillcolor="#f4a6a6"' if node.kind == "SmellAnnotation" else ""
        lines.append(f'  n{nid} [label="{label}"{style}];')
    for edge in g.edges.values():
        lines.append(f'  n{edge.src} -> n{edge.dst} [label="{_dot_escape(edge.label)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
