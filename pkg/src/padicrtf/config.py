"""Run configuration: everything that determines a run, serialized verbatim
into every report for replayability."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field as dc_field

from .qfield import FieldSpec

MODES = ("match", "orbital", "fl", "descent", "split", "hecke", "involution")


@dataclass
class RunConfig:
    mode: str
    p: int = 3
    u: str = "-1"
    eps: str = "1"
    count: int = 50
    seed: int = 1
    vanishing: int = 10
    nonmatchable: int = 10
    n2_split: int = 0
    n2_elliptic: int = 0
    invariance_orbits: int = 0
    invariance_twists: int = 20
    window: int = None
    certify: bool = True
    jobs: int = 1
    # mode-specific payloads
    alpha: object = None
    beta: object = None
    side: str = "sprime"
    test_function: object = "unit"
    f1: object = None
    f2: object = None
    hecke_op: str = "battery"
    m: int = 2
    lhs: object = None
    rhs: object = None

    def field(self) -> FieldSpec:
        return FieldSpec.from_json({"p": self.p, "u": self.u, "eps": self.eps})

    def to_json(self) -> dict:
        d = asdict(self)
        return {k: v for k, v in d.items() if v is not None}


def load_config_file(path: str) -> dict:
    """TOML or JSON config file."""
    if path.endswith(".json"):
        with open(path) as fh:
            return json.load(fh)
    try:
        import tomllib as toml
    except ImportError:  # python < 3.11
        import tomli as toml
    with open(path, "rb") as fh:
        return toml.load(fh)


def config_from_dict(d: dict) -> RunConfig:
    if "mode" not in d:
        raise ValueError("config needs a mode")
    if d["mode"] not in MODES:
        raise ValueError(f"unknown mode {d['mode']!r}; expected one of {MODES}")
    allowed = set(RunConfig.__dataclass_fields__)
    unknown = set(d) - allowed
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**d)
