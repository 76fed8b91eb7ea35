"""Run configuration shared by the library and the CLI."""

import os
from dataclasses import dataclass, field


def _default_cap():
    raw = os.environ.get("TRANSKH_MAX_CROSSINGS", "")
    try:
        return int(raw) if raw else 16
    except ValueError:
        return 16


@dataclass
class RunConfig:
    # 'int' = integer chains throughout; 'rational' only changes the final
    # witness solves (the complexes themselves are always integral).
    coefficients: str = "int"
    # hard cap on crossing count before complex construction refuses
    max_crossings: int = field(default_factory=_default_cap)
    # 'text' or 'json'
    output: str = "text"
    # swap the two transverse-cycle label patterns (the universal
    # odd/even choice in the cycle labeling rule)
    flip_labels: bool = False
    seed: int = 0


DEFAULT = RunConfig()
