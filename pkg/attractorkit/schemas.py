#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Schemas for model files and run parameters.

Model files are JSON documents with ``kind`` = ``rfde`` or ``rrd``. Validation
failures surface as ConfigError carrying the dotted path of the offending
field.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from attractorkit.errors import ConfigError
from attractorkit.modules.dde_core import BuiltinNonlinearity, DelayModel
from attractorkit.modules.rds_app import RdModel


class NonlinearityConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Literal["zero", "scaled_tanh", "scaled_sin", "clipped_cubic"] = "zero"
    params: Dict[str, Any] = Field(default_factory=dict)

    def build(self) -> BuiltinNonlinearity:
        return BuiltinNonlinearity(self.name, dict(self.params))


class ModelRunSettings(BaseModel):
    """Per-model run defaults shipped inside a model file"""

    model_config = ConfigDict(extra="forbid")

    h: Optional[float] = Field(default=None, gt=0)
    gamma_fraction: Optional[float] = Field(default=None, gt=0, lt=1)
    decay_t_grid: Optional[List[float]] = None
    t_grid: Optional[List[float]] = None
    cut_m: Optional[int] = Field(default=None, ge=1)
    n_pairs: Optional[int] = Field(default=None, ge=1)
    n_absorption_samples: Optional[int] = Field(default=None, ge=1)
    attractor_samples: Optional[int] = Field(default=None, ge=4)
    covering_levels: Optional[int] = Field(default=None, ge=1)
    eps_ladder: Optional[List[float]] = None
    horizon: Optional[float] = Field(default=None, gt=0)
    gamma: Optional[float] = Field(default=None, gt=0)

    @field_validator("decay_t_grid", "t_grid")
    @classmethod
    def _positive_times(cls, value):
        if value is not None and (not value or any(t <= 0 for t in value)):
            raise ValueError("time grids must be nonempty and positive")
        return value


class RfdeModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["rfde"]
    n: int = Field(ge=1)
    A: List[List[float]]
    b: Union[float, List[List[float]]]
    tau: float = Field(gt=0)
    nonlinearity: NonlinearityConfig = Field(default_factory=NonlinearityConfig)
    lipschitz: float = Field(default=0.0, ge=0)
    c1: Optional[float] = Field(default=None, ge=0)
    norm: Literal["max", "euclidean"] = "max"
    label: str = ""
    run: ModelRunSettings = Field(default_factory=ModelRunSettings)

    def to_model(self) -> DelayModel:
        return DelayModel(self.n, self.A, self.b, self.tau, self.nonlinearity.build(), self.lipschitz,
                          self.c1, self.norm, 1.0, "rfde", self.label)


class RrdModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["rrd"]
    a: float = Field(gt=0)
    b: float = Field(ge=0)
    r: float = Field(gt=0)
    nonlinearity: NonlinearityConfig = Field(default_factory=NonlinearityConfig)
    lipschitz: float = Field(default=0.0, ge=0)
    c1: Optional[float] = Field(default=None, ge=0)
    n_modes: Optional[int] = Field(default=None, ge=1)
    label: str = ""
    run: ModelRunSettings = Field(default_factory=ModelRunSettings)

    def to_model(self, default_modes: int = 16) -> RdModel:
        return RdModel(self.a, self.b, self.r, self.nonlinearity.build(), self.lipschitz, self.c1,
                       self.n_modes or default_modes, self.label)


ModelConfig = Union[RfdeModelConfig, RrdModelConfig]


def config_error_from(exc: ValidationError, prefix: str = "") -> ConfigError:
    first = exc.errors()[0]
    path = ".".join(str(part) for part in first.get("loc", ()))
    if prefix:
        path = f"{prefix}.{path}" if path else prefix
    return ConfigError(f"{path or '<root>'}: {first.get('msg', 'invalid value')}", field_path=path,
                       context={"errors": len(exc.errors())})


def parse_model(data: Dict[str, Any]) -> ModelConfig:
    """Validate a model document; the ``kind`` field selects the schema."""
    if not isinstance(data, dict):
        raise ConfigError("model file must contain a JSON object", field_path="")
    kind = data.get("kind")
    if kind not in ("rfde", "rrd"):
        raise ConfigError(f"kind must be 'rfde' or 'rrd', got {kind!r}", field_path="kind")
    schema = RfdeModelConfig if kind == "rfde" else RrdModelConfig
    try:
        return schema.model_validate(data)
    except ValidationError as e:
        raise config_error_from(e) from e


def load_model_file(path: Union[str, Path]) -> ModelConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"model file {path} does not exist", field_path="model")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"model file {path} is not valid JSON: {e}", field_path="model") from e
    return parse_model(data)


class RunConfig(BaseModel):
    """Parameters of one command-line run"""

    model_config = ConfigDict(extra="forbid")

    subcommand: Literal["roots", "decompose", "certify", "simulate", "squeeze-verify", "cover", "boxdim",
                        "report"]
    model: Path
    out: Path
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    alpha: Optional[float] = Field(default=None, gt=0)
    cut_m: Optional[int] = Field(default=None, ge=1)
    eps_ladder: Optional[List[float]] = None
    format: Literal["json", "csv"] = "json"

    @field_validator("model")
    @classmethod
    def _model_exists(cls, value: Path) -> Path:
        if not value.is_file():
            raise ValueError(f"model file {value} does not exist")
        return value

    @field_validator("eps_ladder")
    @classmethod
    def _ladder(cls, value):
        if value is None:
            return value
        if len(value) < 4 or any(e <= 0 for e in value) or any(b >= a for a, b in zip(value, value[1:])):
            raise ValueError("eps ladder must be strictly decreasing, positive and have at least 4 rungs")
        return value


def build_run_config(**kwargs) -> RunConfig:
    try:
        return RunConfig.model_validate(kwargs)
    except ValidationError as e:
        raise config_error_from(e) from e
