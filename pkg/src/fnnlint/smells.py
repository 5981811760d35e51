"""The eight design smells as detection rules over a decorated graph."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable, Iterable

from .engine import Attr, Const, Guard, Pattern, PNode, Rule
from .errors import UnknownCode
from .model import CONV_KINDS, LOCAL_POOL_KINDS, LayerKind
from .thresholds import Thresholds


@dataclass(frozen=True)
class SmellInfo:
    title: str
    refactoring: str


class SmellCode(str, enum.Enum):
    DS1 = "DS1"
    DS2 = "DS2"
    DS3 = "DS3"
    DS4 = "DS4"
    DS5 = "DS5"
    DS6 = "DS6"
    DS7 = "DS7"
    DS8 = "DS8"

    @property
    def info(self) -> SmellInfo:
        return CATALOGUE[self]

    @classmethod
    def parse(cls, text: str) -> SmellCode:
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise UnknownCode(text) from None


CATALOGUE: dict[SmellCode, SmellInfo] = {
    SmellCode.DS1: SmellInfo(
        "Non-expanding feature map",
        "Increase the number of filters from one convolutional stage to the next "
        "while pooling shrinks the spatial size.",
    ),
    SmellCode.DS2: SmellInfo(
        "Losing local correlation",
        "Start with small convolution windows and keep them the same or larger in later "
        "convolutional layers.",
    ),
    SmellCode.DS3: SmellInfo(
        "Heterogeneous blocks of CNNs",
        "Use blocks of 2 to 4 convolutional layers with the same settings per stage, and "
        "replace large kernels by a stack of small ones (two 3x3 instead of one 5x5).",
    ),
    SmellCode.DS4: SmellInfo(
        "Too much down-sampling",
        "Do not pool after every convolution in a deep network; keep pooling layers at "
        "or below one third of all convolution and pooling layers.",
    ),
    SmellCode.DS5: SmellInfo(
        "Non-dominating down-sampling",
        "Replace average pooling with max pooling for down-sampling.",
    ),
    SmellCode.DS6: SmellInfo(
        "Useless Dropout",
        "Move the Dropout layer after the pooling layer.",
    ),
    SmellCode.DS7: SmellInfo(
        "Bias with Batchnorm",
        "Disable the bias (use_bias=False) of a learning layer that is followed by "
        "batch normalization.",
    ),
    SmellCode.DS8: SmellInfo(
        "Non-representative Statistics Estimation",
        "Place batch normalization before Dropout, not after it.",
    ),
}

# message templates keyed by rule message_key, formatted with the anchor's attributes
MESSAGES: dict[str, str] = {
    "DS1.decrease": "conv stage keeps fewer feature maps ({stage_max_filters}) than the stage before it",
    "DS1.equal": "conv stage does not grow the number of feature maps ({stage_max_filters})",
    "DS2": "kernel {kernel_h}x{kernel_w} is smaller than the kernel of the preceding convolution",
    "DS3.large_kernel": "large {kernel_h}x{kernel_w} kernel; a cascade of smaller kernels is cheaper and more expressive",
    "DS3.singleton_stage": "stage of a deep network has only {stage_conv_count} convolution(s); use a homogeneous block",
    "DS4": "{n_pool} of {n_arch_layers} convolution/pooling layers are pooling layers in a deep network",
    "DS5": "average pooling ({type}) is used for down-sampling",
    "DS6": "Dropout is applied right before a pooling layer, which cancels most of its effect",
    "DS7": "{type} keeps its bias although batch normalization follows",
    "DS8": "batch normalization follows Dropout and estimates statistics on dropped activations",
}


def _is(pid: str, attr: str, value: object) -> Guard:
    return Guard(Attr(pid, attr), "=", Const(value))


def _layer(pid: str, *guards: Guard) -> dict[str, PNode]:
    return {pid: PNode("Layer", tuple(guards))}


def _type(pid: str, kind: LayerKind) -> Guard:
    return _is(pid, "type", kind.value)


def _sorted(kinds: Iterable[LayerKind]) -> list[LayerKind]:
    return sorted(kinds, key=lambda k: k.value)


def rule_ds1(cfg: Thresholds) -> list[Rule]:
    """First conv of a stage whose filter maximum does not exceed the previous stage's."""
    variants = [("<", "warning", "decrease")]
    if cfg.flag_equal_filters:
        variants.append(("=", "info", "equal"))
    rules = []
    for op, severity, suffix in variants:
        grow = Guard(Attr("cur", "stage_max_filters"), op, Attr("prev", "stage_max_filters"))
        lhs = Pattern(
            nodes={
                **_layer("prev", _is("prev", "stage_head", True)),
                **_layer("cur", _is("cur", "stage_head", True), grow),
            },
            edges=(("prev", "nextStage", "cur"),),
        )
        rules.append(Rule(f"DS1-{suffix}", "DS1", lhs, "cur", severity, f"DS1.{suffix}"))
    return rules


def rule_ds2(cfg: Thresholds) -> list[Rule]:
    shrink = Guard(Attr("conv", "kernel", "area"), "<", Attr("prev", "kernel", "area"))
    lhs = Pattern(
        nodes={**_layer("conv", shrink), **_layer("prev")},
        edges=(("conv", "prevConv", "prev"),),
    )
    return [Rule("DS2-shrinking-window", "DS2", lhs, "conv", "warning", "DS2")]


def rule_ds3(cfg: Thresholds) -> list[Rule]:
    rules = []
    for kind in _sorted(CONV_KINDS):
        big = Guard(Attr("conv", "kernel", "area"), ">=", Const(cfg.large_kernel_min_area))
        lhs = Pattern(nodes=_layer("conv", _type("conv", kind), big))
        rules.append(Rule(f"DS3-large-kernel-{kind.value}", "DS3", lhs, "conv", "info", "DS3.large_kernel"))
    small = Guard(Attr("conv", "stage_conv_count"), "<", Const(cfg.homogeneous_block_min))
    lhs = Pattern(nodes=_layer("conv", _is("conv", "stage_head", True), _is("conv", "deep_arch", True), small))
    rules.append(Rule("DS3-singleton-stage", "DS3", lhs, "conv", "info", "DS3.singleton_stage"))
    return rules


def rule_ds4(cfg: Thresholds) -> list[Rule]:
    too_many = Guard(Attr("arch", "pool_ratio"), ">", Const(cfg.pool_ratio_max))
    lhs = Pattern(nodes={"arch": PNode("Architecture", (_is("arch", "is_deep", True), too_many))})
    return [Rule("DS4-pool-ratio", "DS4", lhs, "arch", "warning", "DS4")]


def rule_ds5(cfg: Thresholds) -> list[Rule]:
    kinds = [LayerKind.AVGPOOL1D, LayerKind.AVGPOOL2D]
    if not cfg.exempt_global_avg_pool:
        kinds.append(LayerKind.GLOBAL_AVG_POOL)
    return [
        Rule(f"DS5-{k.value}", "DS5", Pattern(nodes=_layer("pool", _type("pool", k))), "pool", "info", "DS5")
        for k in kinds
    ]


def rule_ds6(cfg: Thresholds) -> list[Rule]:
    rules = []
    for kind in _sorted(LOCAL_POOL_KINDS):
        lhs = Pattern(
            nodes={**_layer("drop", _type("drop", LayerKind.DROPOUT)), **_layer("pool", _type("pool", kind))},
            edges=(("drop", "valueNext", "pool"),),
        )
        rules.append(Rule(f"DS6-before-{kind.value}", "DS6", lhs, "drop", "warning", "DS6"))
    return rules


def rule_ds7(cfg: Thresholds) -> list[Rule]:
    rules = []
    for kind in _sorted(CONV_KINDS | {LayerKind.DENSE}):
        lhs = Pattern(
            nodes={
                **_layer("learn", _type("learn", kind), _is("learn", "use_bias", True)),
                **_layer("bn", _type("bn", LayerKind.BATCHNORM)),
            },
            edges=(("learn", "valueNext", "bn"),),
        )
        rules.append(Rule(f"DS7-{kind.value}", "DS7", lhs, "learn", "warning", "DS7"))
    return rules


def rule_ds8(cfg: Thresholds) -> list[Rule]:
    lhs = Pattern(
        nodes={
            **_layer("bn", _type("bn", LayerKind.BATCHNORM)),
            **_layer("drop", _type("drop", LayerKind.DROPOUT)),
        },
        edges=(("bn", "valuePrev", "drop"),),
    )
    return [Rule("DS8-after-dropout", "DS8", lhs, "bn", "warning", "DS8")]


RULE_BUILDERS: dict[SmellCode, Callable[[Thresholds], list[Rule]]] = {
    SmellCode.DS1: rule_ds1,
    SmellCode.DS2: rule_ds2,
    SmellCode.DS3: rule_ds3,
    SmellCode.DS4: rule_ds4,
    SmellCode.DS5: rule_ds5,
    SmellCode.DS6: rule_ds6,
    SmellCode.DS7: rule_ds7,
    SmellCode.DS8: rule_ds8,
}

SEVERITIES = ("info", "warning")


def parse_codes(names: Iterable[str | SmellCode]) -> set[SmellCode]:
    return {n if isinstance(n, SmellCode) else SmellCode.parse(n) for n in names}


def default_ruleset(
    cfg: Thresholds | None = None,
    enabled: Iterable[str | SmellCode] | None = None,
    severities: dict[str, str] | None = None,
) -> list[Rule]:
    """Rules for the enabled codes (all by default) in code order.

    ``severities`` maps a code to a severity that replaces the default for
    every rule of that code.
    """
    cfg = cfg or Thresholds()
    codes = set(SmellCode) if enabled is None else parse_codes(enabled)
    overrides = {SmellCode.parse(k): v for k, v in (severities or {}).items()}
    for sev in overrides.values():
        if sev not in SEVERITIES:
            raise ValueError(f"unknown severity {sev!r}")
    rules: list[Rule] = []
    for code in SmellCode:
        if code not in codes:
            continue
        for rule in RULE_BUILDERS[code](cfg):
            if code in overrides:
                rule = replace(rule, severity=overrides[code])
            rules.append(rule)
    return rules
