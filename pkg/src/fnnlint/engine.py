"""A small typed attributed graph-transformation engine.

Rules match a left-hand-side pattern (injectively) under attribute guards,
are blocked by negative application conditions, and have exactly one
effect: attach a ``SmellAnnotation`` node to the anchor via ``flaggedBy``.
Because effects only add annotations and guards never look at them, rule
application is terminating and confluent.
"""

from __future__ import annotations

import operator
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Mapping, Sequence, Union

from .errors import StaleMatch
from .graph import TypedGraph, TypeGraph

ANNOTATION = "SmellAnnotation"
FLAGGED_BY = "flaggedBy"
_DEDUP_PID = "__flag"

_OPS = {
    "=": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}
_ORDER_OPS = {"<", "<=", ">", ">="}


@dataclass(frozen=True)
class Attr:
    """Guard term reading ``attr`` of the node bound to ``pid``.

    ``proj`` projects an int pair: ``"area"`` (h*w), ``"h"`` or ``"w"``.
    """

    pid: str
    name: str
    proj: str | None = None


@dataclass(frozen=True)
class Const:
    value: Any


Term = Union[Attr, Const]


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float, Fraction)) and not isinstance(v, bool)


@dataclass(frozen=True)
class Guard:
    lhs: Term
    op: str
    rhs: Term

    def __post_init__(self) -> None:
        if self.op not in _OPS:
            raise ValueError(f"unknown guard operator {self.op!r}")

    def pids(self) -> set[str]:
        return {t.pid for t in (self.lhs, self.rhs) if isinstance(t, Attr)}

    def holds(self, g: TypedGraph, binding: Mapping[str, int]) -> bool:
        """Evaluate under ``binding``; absent or incomparable values make it false."""
        left = _term_value(self.lhs, g, binding)
        right = _term_value(self.rhs, g, binding)
        if left is None or right is None:
            return False
        if _is_number(left) and _is_number(right):
            return _OPS[self.op](left, right)
        if type(left) is not type(right):
            return False
        if self.op in _ORDER_OPS and not isinstance(left, str):
            return False
        return _OPS[self.op](left, right)


def _term_value(term: Term, g: TypedGraph, binding: Mapping[str, int]) -> Any:
    if isinstance(term, Const):
        return term.value
    value = g.nodes[binding[term.pid]].attrs.get(term.name)
    if value is None or term.proj is None:
        return value
    if not (isinstance(value, tuple) and len(value) == 2):
        return None
    if term.proj == "area":
        return value[0] * value[1]
    if term.proj == "h":
        return value[0]
    if term.proj == "w":
        return value[1]
    raise ValueError(f"unknown projection {term.proj!r}")


@dataclass(frozen=True)
class PNode:
    kind: str
    guards: tuple[Guard, ...] = ()


@dataclass(frozen=True)
class Pattern:
    nodes: Mapping[str, PNode]
    edges: tuple[tuple[str, str, str], ...] = ()

    def __post_init__(self) -> None:
        for src, _, dst in self.edges:
            if src not in self.nodes or dst not in self.nodes:
                raise ValueError(f"pattern edge references unknown pid: {src} -> {dst}")

    def guards(self) -> Iterator[Guard]:
        for pnode in self.nodes.values():
            yield from pnode.guards

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        adj: dict[str, set[str]] = {p: set() for p in self.nodes}
        for src, _, dst in self.edges:
            adj[src].add(dst)
            adj[dst].add(src)
        start = next(iter(self.nodes))
        seen = {start}
        todo = [start]
        while todo:
            for nxt in adj[todo.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return len(seen) == len(self.nodes)


@dataclass(frozen=True)
class Rule:
    """A detection rule: match ``lhs``, forbid every NAC, flag ``anchor``.

    NACs share pids with the LHS; the engine adds the dedup NAC (anchor
    already flagged with ``code``) on its own.
    """

    name: str
    code: str
    lhs: Pattern
    anchor: str
    severity: str = "warning"
    message_key: str = ""
    nacs: tuple[Pattern, ...] = ()

    def __post_init__(self) -> None:
        if self.anchor not in self.lhs.nodes:
            raise ValueError(f"rule {self.name}: anchor {self.anchor!r} not in LHS")
        if not self.lhs.is_connected():
            raise ValueError(f"rule {self.name}: LHS pattern is not connected")
        for nac in self.nacs:
            for pid, pnode in nac.nodes.items():
                if pid in self.lhs.nodes and pnode.kind != self.lhs.nodes[pid].kind:
                    raise ValueError(f"rule {self.name}: NAC redeclares {pid} with another kind")

    def dedup_nac(self) -> Pattern:
        flag_guard = Guard(Attr(_DEDUP_PID, "code"), "=", Const(self.code))
        return Pattern(
            nodes={
                self.anchor: self.lhs.nodes[self.anchor],
                _DEDUP_PID: PNode(ANNOTATION, (flag_guard,)),
            },
            edges=((self.anchor, FLAGGED_BY, _DEDUP_PID),),
        )

    def all_nacs(self) -> tuple[Pattern, ...]:
        return self.nacs + (self.dedup_nac(),)


@dataclass(frozen=True)
class Match:
    """Injective assignment of pattern ids to node ids."""

    binding: tuple[tuple[str, int], ...]

    def __getitem__(self, pid: str) -> int:
        for p, nid in self.binding:
            if p == pid:
                return nid
        raise KeyError(pid)

    def as_dict(self) -> dict[str, int]:
        return dict(self.binding)


def check_rule(rule: Rule, tg: TypeGraph) -> list[str]:
    """Problems with ``rule`` against ``tg``: unknown kinds, edges or guard attributes."""
    problems = []
    for pattern in (rule.lhs, *rule.nacs):
        kinds = {**rule.lhs.nodes, **pattern.nodes}
        for pid, pnode in pattern.nodes.items():
            if pnode.kind not in tg.node_types:
                problems.append(f"{rule.name}: {pid} has undeclared kind {pnode.kind}")
        for src, label, dst in pattern.edges:
            if not tg.allows_edge(kinds[src].kind, label, kinds[dst].kind):
                problems.append(f"{rule.name}: undeclared edge ({kinds[src].kind}, {label}, {kinds[dst].kind})")
        for guard in pattern.guards():
            for term in (guard.lhs, guard.rhs):
                if isinstance(term, Attr):
                    if term.pid not in kinds:
                        problems.append(f"{rule.name}: guard references unknown pid {term.pid}")
                    elif tg.attr(kinds[term.pid].kind, term.name) is None:
                        problems.append(f"{rule.name}: {kinds[term.pid].kind}.{term.name} is not declared")
    return problems


# --------------------------------------------------------------------------
# Matching


def _search_order(pattern: Pattern, prebound: Sequence[str]) -> list[str]:
    """Pids to bind, each (where possible) adjacent to an earlier one."""
    order: list[str] = []
    placed = set(prebound)
    remaining = [p for p in pattern.nodes if p not in placed]
    while remaining:
        pick = next(
            (
                p
                for p in remaining
                if any((s == p and d in placed) or (d == p and s in placed) for s, _, d in pattern.edges)
            ),
            remaining[0],
        )
        order.append(pick)
        placed.add(pick)
        remaining.remove(pick)
    return order


def _candidates(pid: str, pattern: Pattern, g: TypedGraph, binding: dict[str, int]) -> list[int]:
    for src, label, dst in pattern.edges:
        if src == pid and dst in binding:
            return [e.src for e in g.in_edges(binding[dst], label)]
        if dst == pid and src in binding:
            return [e.dst for e in g.out_edges(binding[src], label)]
    return list(g.nodes)


def _consistent(pid: str, pattern: Pattern, g: TypedGraph, binding: dict[str, int]) -> bool:
    """Check edges and guards that became fully bound when ``pid`` was bound."""
    for src, label, dst in pattern.edges:
        if pid in (src, dst) and src in binding and dst in binding:
            if not g.has_edge(binding[src], label, binding[dst]):
                return False
    for guard in pattern.guards():
        pids = guard.pids()
        if pid in pids and pids <= binding.keys() and not guard.holds(g, binding):
            return False
    return True


def _extend(
    pattern: Pattern,
    g: TypedGraph,
    binding: dict[str, int],
    order: list[str],
    used: set[int],
) -> Iterator[dict[str, int]]:
    if not order:
        yield dict(binding)
        return
    pid, rest = order[0], order[1:]
    kind = pattern.nodes[pid].kind
    for nid in dict.fromkeys(_candidates(pid, pattern, g, binding)):
        if nid in used or g.nodes[nid].kind != kind:
            continue
        binding[pid] = nid
        used.add(nid)
        if _consistent(pid, pattern, g, binding):
            yield from _extend(pattern, g, binding, rest, used)
        del binding[pid]
        used.discard(nid)


def _nac_blocks(nac: Pattern, g: TypedGraph, binding: dict[str, int]) -> bool:
    # NAC guards may read any LHS pid, so evaluate under the full binding
    for pid in nac.nodes:
        if pid in binding and not _consistent(pid, nac, g, binding):
            return False
    order = _search_order(nac, [p for p in nac.nodes if p in binding])
    used = set(binding.values())
    return next(_extend(nac, g, dict(binding), order, used), None) is not None


def _lhs_bindings(rule: Rule, g: TypedGraph) -> Iterator[dict[str, int]]:
    order = _search_order(rule.lhs, [])
    for binding in _extend(rule.lhs, g, {}, order, set()):
        if not any(_nac_blocks(nac, g, binding) for nac in rule.all_nacs()):
            yield binding


def find_matches(rule: Rule, g: TypedGraph) -> list[Match]:
    """All injective matches of ``rule.lhs`` not blocked by a NAC, sorted by bound ids."""
    pids = list(rule.lhs.nodes)
    found = [tuple((p, b[p]) for p in pids) for b in _lhs_bindings(rule, g)]
    found.sort(key=lambda m: tuple(nid for _, nid in m))
    return [Match(m) for m in found]


def is_valid_match(rule: Rule, g: TypedGraph, m: Match) -> bool:
    binding = m.as_dict()
    if set(binding) != set(rule.lhs.nodes):
        return False
    if len(set(binding.values())) != len(binding):
        return False
    if any(nid not in g.nodes or g.nodes[nid].kind != rule.lhs.nodes[p].kind for p, nid in binding.items()):
        return False
    for pid in binding:
        if not _consistent(pid, rule.lhs, g, binding):
            return False
    return not any(_nac_blocks(nac, g, binding) for nac in rule.all_nacs())


# --------------------------------------------------------------------------
# Application


def _annotate(rule: Rule, g: TypedGraph, m: Match) -> int:
    anchor = m[rule.anchor]
    attrs: dict[str, Any] = {
        "code": rule.code,
        "severity": rule.severity,
        "message_key": rule.message_key or rule.name,
        "rule": rule.name,
    }
    anchor_attrs = g.nodes[anchor].attrs
    for key in ("line", "col"):
        if key in anchor_attrs:
            attrs[key] = anchor_attrs[key]
    ann = g.add_node(ANNOTATION, **attrs)
    g.add_edge(anchor, FLAGGED_BY, ann)
    return ann


def apply(rule: Rule, g: TypedGraph, m: Match) -> TypedGraph:
    """Return a copy of ``g`` with the annotation for match ``m`` added."""
    if not is_valid_match(rule, g, m):
        raise StaleMatch(f"match {m.binding} of rule {rule.name} is no longer valid")
    out = g.copy()
    _annotate(rule, out, m)
    return out


@dataclass
class FixpointStats:
    applications: int = 0
    rounds: int = 0
    per_rule: dict[str, int] = field(default_factory=dict)


def run_to_fixpoint(
    rules: Sequence[Rule],
    g: TypedGraph,
    rng: random.Random | None = None,
    stats: FixpointStats | None = None,
) -> TypedGraph:
    """Apply rules until none has a match; returns a new graph.

    With ``rng`` the next application is drawn at random among all pending
    matches, which is useful only for checking order independence.
    """
    out = g.copy()
    stats = stats if stats is not None else FixpointStats()
    # every application consumes one (anchor, code) slot
    limit = len(rules) * len(out.nodes) + 1
    while True:
        stats.rounds += 1
        if rng is None:
            changed = False
            for rule in rules:
                for m in find_matches(rule, out):
                    if is_valid_match(rule, out, m):
                        _annotate(rule, out, m)
                        stats.applications += 1
                        stats.per_rule[rule.name] = stats.per_rule.get(rule.name, 0) + 1
                        changed = True
            if not changed:
                return out
        else:
            pending = [(rule, m) for rule in rules for m in find_matches(rule, out)]
            if not pending:
                return out
            rule, m = rng.choice(pending)
            _annotate(rule, out, m)
            stats.applications += 1
            stats.per_rule[rule.name] = stats.per_rule.get(rule.name, 0) + 1
        if stats.applications > limit:
            raise RuntimeError("fixpoint did not converge; a rule's effect does not disable it")
