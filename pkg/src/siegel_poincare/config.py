"""Tolerance and run configuration shared by the numerical modules."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

CONFIG_ENV = "SIEGEL_POINCARE_CONFIG"


@dataclass(frozen=True)
class Precision:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_refinement_depth: int = 8

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls the h-integral quadrature.

    ``max_depth`` is the number of order doublings allowed past the base
    order; ``boundary_exponent_guard`` is the smallest admissible margin of
    alpha, beta above 1/2.
    """

    rel_tol: float = 1e-11
    abs_tol: float = 1e-300
    max_depth: int = 3
    boundary_exponent_guard: float = 1e-9
    base_order: int = 24
    angular_order: int = 16

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class RunConfig:
    precision: Precision = field(default_factory=Precision)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    elliptic_height: int = 40
    sp2_height: int = 2
    output: str = "json"
    seed: int = 20240611
    workers: int = 1

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        data = dict(data)
        prec = Precision(**data.pop("precision", {}))
        quad = QuadratureSpec(**data.pop("quadrature", {}))
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(precision=prec, quadrature=quad, **data)

    def override(self, **kwargs) -> "RunConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)


def load_config(path: str | os.PathLike | None = None) -> RunConfig:
    """Read a JSON config file; falls back to the env var, then to defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    return RunConfig.from_dict(json.loads(Path(path).read_text()))
