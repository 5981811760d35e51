"""Derived structure that lets aggregate conditions be matched locally.

Rules only see a node and its immediate neighbours, so counts, ratios and
conv-stage structure are computed once here and stored as attributes and
helper edges (``valueNext``, ``valuePrev``, ``prevConv``, ``nextStage``).
"""

from __future__ import annotations

from fractions import Fraction

from .graph import TypedGraph
from .model import CONV_KINDS, LOCAL_POOL_KINDS, SHAPE_ONLY_KINDS
from .thresholds import Thresholds

_CONV = {k.value for k in CONV_KINDS}
_POOL = {k.value for k in LOCAL_POOL_KINDS}
_SHAPE_ONLY = {k.value for k in SHAPE_ONLY_KINDS}


def layer_chain(g: TypedGraph) -> list[int]:
    """Layer node ids in architecture order (the InputLayer excluded)."""
    chain: list[int] = []
    for arch in g.nodes_of("Architecture"):
        for start in g.successors(arch, "startsWith"):
            seen = {start}
            cur = g.successors(start, "next")
            while cur and cur[0] not in seen:
                seen.add(cur[0])
                chain.append(cur[0])
                cur = g.successors(cur[0], "next")
    return chain


def decorate(g: TypedGraph, cfg: Thresholds | None = None) -> TypedGraph:
    """Return a copy of ``g`` with derived attributes and edges added.

    Stages are numbered from 0; a local pooling layer closes the current stage
    and belongs to it. Decorating an already decorated graph is a no-op.
    """
    cfg = cfg or Thresholds()
    out = g.copy()
    archs = out.nodes_of("Architecture")
    if any("n_arch_layers" in out.attrs(a) for a in archs):
        return out

    chain = layer_chain(out)
    types = {nid: out.attrs(nid)["type"] for nid in chain}

    stage = 0
    stages: dict[int, list[int]] = {}
    prev_conv: int | None = None
    for nid in chain:
        out.attrs(nid)["stage_id"] = stage
        if types[nid] in _CONV:
            stages.setdefault(stage, []).append(nid)
            if prev_conv is not None:
                out.add_edge(nid, "prevConv", prev_conv)
            prev_conv = nid
        if types[nid] in _POOL:
            stage += 1

    last_valued: int | None = None
    for nid in chain:
        if last_valued is not None:
            out.add_edge(nid, "valuePrev", last_valued)
        if types[nid] not in _SHAPE_ONLY:
            last_valued = nid
    next_valued: int | None = None
    for nid in reversed(chain):
        if next_valued is not None:
            out.add_edge(nid, "valueNext", next_valued)
        if types[nid] not in _SHAPE_ONLY:
            next_valued = nid

    heads: list[int] = []
    for stage_id in sorted(stages):
        convs = stages[stage_id]
        known = [out.attrs(c)["filters"] for c in convs if "filters" in out.attrs(c)]
        for c in convs:
            attrs = out.attrs(c)
            attrs["stage_conv_count"] = len(convs)
            attrs["stage_head"] = c == convs[0]
            if known:
                attrs["stage_max_filters"] = max(known)
        heads.append(convs[0])
    for a, b in zip(heads, heads[1:]):
        out.add_edge(a, "nextStage", b)

    n_conv = sum(1 for nid in chain if types[nid] in _CONV)
    n_pool = sum(1 for nid in chain if types[nid] in _POOL)
    n_arch = n_conv + n_pool
    is_deep = n_arch >= cfg.deep_min_layers
    for arch in archs:
        attrs = out.attrs(arch)
        attrs["n_conv"] = n_conv
        attrs["n_pool"] = n_pool
        attrs["n_arch_layers"] = n_arch
        attrs["pool_ratio"] = Fraction(n_pool, n_arch) if n_arch else Fraction(0)
        attrs["is_deep"] = is_deep
    for nid in chain:
        out.attrs(nid)["deep_arch"] = is_deep
    return out
