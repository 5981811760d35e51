"""Random generators for model IRs, graphs and reports used by property tests."""

from __future__ import annotations

import random

from fnnlint.engine import Attr, Const, Guard, Pattern, PNode, Rule
from fnnlint.graph import TypedGraph
from fnnlint.model import LayerKind, LayerRecord, Learner, ModelIR, SourceSpan
from fnnlint.report import Finding, Report
from fnnlint.smells import CATALOGUE, SmellCode

# weights favour conv/pool so that deep architectures show up regularly
_KIND_WEIGHTS = [
    (LayerKind.CONV2D, 10),
    (LayerKind.CONV1D, 2),
    (LayerKind.MAXPOOL2D, 5),
    (LayerKind.MAXPOOL1D, 1),
    (LayerKind.AVGPOOL2D, 2),
    (LayerKind.AVGPOOL1D, 1),
    (LayerKind.GLOBAL_AVG_POOL, 1),
    (LayerKind.GLOBAL_MAX_POOL, 1),
    (LayerKind.DENSE, 3),
    (LayerKind.DROPOUT, 4),
    (LayerKind.BATCHNORM, 4),
    (LayerKind.FLATTEN, 2),
    (LayerKind.RESHAPE, 1),
    (LayerKind.ACTIVATION, 2),
    (LayerKind.INPUT, 1),
    (LayerKind.OTHER, 1),
]
_KINDS = [k for k, _ in _KIND_WEIGHTS]
_WEIGHTS = [w for _, w in _KIND_WEIGHTS]


def _maybe(rng: random.Random, p: float, value):
    return value if rng.random() < p else None


def _pair(rng: random.Random, hi: int = 7) -> tuple[int, int]:
    if rng.random() < 0.8:
        k = rng.randint(1, hi)
        return (k, k)
    return (rng.randint(1, hi), rng.randint(1, hi))


def random_layer(rng: random.Random, with_provenance: bool = True) -> LayerRecord:
    kind = rng.choices(_KINDS, _WEIGHTS)[0]
    fields: dict = {"kind": kind}
    if kind is LayerKind.OTHER:
        fields["name"] = rng.choice(["LSTM", "Embedding", "SpatialDropout2D", "ZeroPadding2D"])
    if kind in (LayerKind.CONV1D, LayerKind.CONV2D):
        fields["filters"] = _maybe(rng, 0.9, rng.choice([8, 16, 32, 32, 64, 64, 128, 256]))
        fields["kernel"] = _maybe(rng, 0.9, _pair(rng))
        fields["strides"] = (1, 1) if rng.random() < 0.8 else _pair(rng, 3)
        fields["padding"] = rng.choice(["valid", "same"])
        fields["use_bias"] = rng.choice([True, True, False, None])
        fields["activation"] = rng.choice([None, "relu", "tanh"])
    elif kind is LayerKind.DENSE:
        fields["size"] = _maybe(rng, 0.9, rng.randint(1, 512))
        fields["use_bias"] = rng.choice([True, True, False, None])
        fields["activation"] = rng.choice([None, "relu", "softmax"])
    elif kind in (LayerKind.MAXPOOL1D, LayerKind.MAXPOOL2D, LayerKind.AVGPOOL1D, LayerKind.AVGPOOL2D):
        fields["pool_size"] = _pair(rng, 3)
        fields["strides"] = fields["pool_size"]
        fields["padding"] = "valid"
    elif kind is LayerKind.DROPOUT:
        fields["rate"] = _maybe(rng, 0.95, rng.random())
    elif kind is LayerKind.ACTIVATION:
        fields["activation"] = rng.choice(["relu", "sigmoid", None])
    if with_provenance:
        line = rng.randint(1, 500)
        col = rng.randint(1, 80)
        fields["source_span"] = rng.choice(
            [None, SourceSpan(line, col), SourceSpan(line, col, line + rng.randint(0, 3), rng.randint(1, 90))]
        )
        raw = []
        for _ in range(rng.randint(0, 3)):
            name = rng.choice([None, "filters", "rate", "padding", "input_shape"])
            value = rng.choice([rng.randint(-5, 300), rng.random(), "same", True, None, (3, 3), (28, 28, 1)])
            raw.append((name, value))
        fields["raw_args"] = tuple(raw)
    return LayerRecord(**fields)


def random_ir(rng: random.Random, max_layers: int = 30, with_provenance: bool = True) -> ModelIR:
    n = rng.randint(1, max_layers)
    layers = [random_layer(rng, with_provenance) for _ in range(n)]
    shape = rng.choice([None, (28, 28, 1), (None, 128), (224, 224, 3)])
    learner = Learner(
        optimizer=rng.choice([None, "adam", "SGD", "rmsprop"]),
        loss=rng.choice([None, "mse", "categorical_crossentropy"]),
    )
    return ModelIR(tuple(layers), shape, learner, source_path=rng.choice(["", "net.py", "dir/model.py"]))


def random_cnn_ir(rng: random.Random) -> ModelIR:
    """IR built stage by stage, so conv/pool structure is realistic and often deep."""
    layers = []
    filters = rng.choice([16, 32, 64])
    for _ in range(rng.randint(1, 7)):
        for _ in range(rng.randint(0, 4)):
            kind = rng.choice([LayerKind.CONV2D] * 4 + [LayerKind.CONV1D])
            layers.append(
                LayerRecord(
                    kind=kind,
                    filters=_maybe(rng, 0.95, filters),
                    kernel=_maybe(rng, 0.95, rng.choice([(3, 3), (3, 3), (5, 5), (1, 1), (7, 7), (2, 3)])),
                    strides=(1, 1),
                    padding="same",
                    use_bias=rng.choice([True, False]),
                )
            )
            if rng.random() < 0.3:
                layers.append(LayerRecord(kind=LayerKind.BATCHNORM))
            if rng.random() < 0.2:
                layers.append(LayerRecord(kind=LayerKind.DROPOUT, rate=0.25))
        pool = rng.choice([LayerKind.MAXPOOL2D] * 3 + [LayerKind.AVGPOOL2D, LayerKind.MAXPOOL1D])
        if rng.random() < 0.2:
            layers.append(LayerRecord(kind=LayerKind.DROPOUT, rate=0.3))
        layers.append(LayerRecord(kind=pool, pool_size=(2, 2), strides=(2, 2), padding="valid"))
        filters = max(1, filters * rng.choice([2, 2, 1, 1, 0.5]))
        filters = int(filters)
    layers.append(LayerRecord(kind=rng.choice([LayerKind.FLATTEN, LayerKind.GLOBAL_AVG_POOL])))
    if rng.random() < 0.5:
        layers.append(LayerRecord(kind=LayerKind.DENSE, size=128, use_bias=rng.choice([True, False])))
        layers.append(rng.choice([LayerRecord(kind=LayerKind.BATCHNORM), LayerRecord(kind=LayerKind.DROPOUT, rate=0.5)]))
    layers.append(LayerRecord(kind=LayerKind.DENSE, size=10, use_bias=True, activation="softmax"))
    return ModelIR(tuple(layers), (32, 32, 3), Learner("adam", "categorical_crossentropy"), "gen.py")


def random_report(rng: random.Random) -> Report:
    findings = []
    for _ in range(rng.randint(0, 8)):
        code = rng.choice(list(SmellCode))
        arch = code is SmellCode.DS4 and rng.random() < 0.8
        findings.append(
            Finding(
                code=code.value,
                severity=rng.choice(["info", "warning"]),
                anchor_kind="Architecture" if arch else rng.choice(["Layer", "InputLayer"]),
                layer_index=None if arch else rng.randint(0, 40),
                line=None if arch else rng.choice([None, rng.randint(1, 300)]),
                col=None if arch else rng.choice([None, rng.randint(1, 80)]),
                message=rng.choice(["msg", "kernel 5x5 × \"quoted\"", "a\nb"]),
                refactoring=CATALOGUE[code].refactoring,
            )
        )
    skipped = tuple(rng.choice(["3:4: non-literal argument", "note"]) for _ in range(rng.randint(0, 3)))
    return Report(rng.choice(["net.py", "a b/c.py"]), tuple(findings), skipped)


# --------------------------------------------------------------------------
# engine-level generators

_TYPES = ["Conv2D", "Dropout", "MaxPool2D", "BatchNorm", "Dense"]
_LABELS = ["next", "valueNext"]


def random_graph(rng: random.Random, max_nodes: int = 12) -> TypedGraph:
    g = TypedGraph()
    n = rng.randint(1, max_nodes)
    for i in range(n):
        kind = "Layer" if rng.random() < 0.85 else "Architecture"
        attrs = {}
        if kind == "Layer":
            attrs["type"] = rng.choice(_TYPES)
            attrs["layer_index"] = i
            if rng.random() < 0.8:
                attrs["filters"] = rng.choice([16, 32, 64])
            if rng.random() < 0.8:
                attrs["kernel"] = rng.choice([(1, 1), (3, 3), (5, 5), (3, 1)])
            if rng.random() < 0.7:
                attrs["use_bias"] = rng.choice([True, False])
        else:
            attrs["is_deep"] = rng.choice([True, False])
        g.add_node(kind, **attrs)
    for _ in range(rng.randint(0, 2 * n)):
        g.add_edge(rng.randrange(n), rng.choice(_LABELS), rng.randrange(n))
    return g


def _random_guard(rng: random.Random, pid: str, pids: list[str]) -> Guard:
    choice = rng.randrange(5)
    if choice == 0:
        return Guard(Attr(pid, "type"), rng.choice(["=", "!="]), Const(rng.choice(_TYPES)))
    if choice == 1:
        return Guard(Attr(pid, "filters"), rng.choice(["<", "<=", ">", ">=", "="]), Const(rng.choice([16, 32, 64])))
    if choice == 2:
        return Guard(Attr(pid, "kernel", "area"), rng.choice(["<", ">=", "="]), Const(rng.choice([1, 9, 25])))
    if choice == 3:
        return Guard(Attr(pid, "use_bias"), "=", Const(rng.choice([True, False])))
    other = rng.choice(pids)
    return Guard(Attr(pid, "filters"), rng.choice(["<", "<=", "=", "!="]), Attr(other, "filters"))


def random_rule(rng: random.Random, index: int = 0) -> Rule:
    k = rng.randint(1, 3)
    pids = [f"p{i}" for i in range(k)]
    edges = []
    for i in range(1, k):
        j = rng.randrange(i)
        a, b = (pids[i], pids[j]) if rng.random() < 0.5 else (pids[j], pids[i])
        edges.append((a, rng.choice(_LABELS), b))
    if k > 1 and rng.random() < 0.3:
        edges.append((rng.choice(pids), rng.choice(_LABELS), rng.choice(pids)))
    nodes = {}
    for pid in pids:
        guards = tuple(_random_guard(rng, pid, pids) for _ in range(rng.randint(0, 2)))
        nodes[pid] = PNode("Layer", guards)
    nacs = ()
    if rng.random() < 0.4:
        host = rng.choice(pids)
        extra_guard = (_random_guard(rng, "n0", ["n0"]),) if rng.random() < 0.5 else ()
        edge = (host, rng.choice(_LABELS), "n0") if rng.random() < 0.5 else ("n0", rng.choice(_LABELS), host)
        nacs = (Pattern(nodes={host: nodes[host], "n0": PNode("Layer", extra_guard)}, edges=(edge,)),)
    code = rng.choice(["X1", "X2", "X3"])
    return Rule(f"r{index}", code, Pattern(nodes, tuple(edges)), rng.choice(pids), nacs=nacs)
