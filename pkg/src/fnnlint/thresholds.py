from __future__ import annotations

from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Any


def to_fraction(value: Any) -> Fraction:
    """Exact rational from an int, a decimal/fraction string (``"1/3"``) or a float."""
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # "0.5" rather than the binary expansion of 0.5
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"expected a number, got {value!r}")


@dataclass(frozen=True)
class Thresholds:
    """Tunable limits used by decoration and the smell rules."""

    deep_min_layers: int = 10
    pool_ratio_max: Fraction = Fraction(1, 3)
    large_kernel_min_area: int = 25
    homogeneous_block_min: int = 2
    flag_equal_filters: bool = True
    exempt_global_avg_pool: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "pool_ratio_max", to_fraction(self.pool_ratio_max))
        for name in ("deep_min_layers", "large_kernel_min_area", "homogeneous_block_min"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
        if not 0 < self.pool_ratio_max < 1:
            raise ValueError(f"pool_ratio_max must lie strictly between 0 and 1, got {self.pool_ratio_max}")
        for name in ("flag_equal_filters", "exempt_global_avg_pool"):
            if not isinstance(getattr(self, name), bool):
                raise ValueError(f"{name} must be a boolean")

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def with_overrides(self, overrides: dict[str, Any]) -> Thresholds:
        """Apply ``key -> value`` overrides; string values are parsed by field type."""
        known = {f.name: f for f in fields(self)}
        parsed: dict[str, Any] = {}
        for key, raw in overrides.items():
            if key not in known:
                raise KeyError(key)
            current = getattr(self, key)
            if isinstance(current, bool):
                if isinstance(raw, str):
                    lowered = raw.strip().lower()
                    if lowered not in ("true", "false", "1", "0", "yes", "no"):
                        raise ValueError(f"{key}: expected a boolean, got {raw!r}")
                    raw = lowered in ("true", "1", "yes")
                parsed[key] = raw
            elif isinstance(current, Fraction):
                parsed[key] = to_fraction(raw)
            else:
                if isinstance(raw, str):
                    try:
                        raw = int(raw.strip())
                    except ValueError:
                        raise ValueError(f"{key}: expected an integer, got {raw!r}") from None
                parsed[key] = raw
        return replace(self, **parsed)
