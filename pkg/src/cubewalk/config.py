"""Experiment configuration: one JSON document, overridable by CLI flags."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields

FORMATS = ("json", "csv", "dot")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    preset: object = "f2"  # shorthand string or preset dict
    mu: object = "uniform"  # "uniform" or [[word, probability], ...]
    steps: int = 1000
    paths: int = 100
    seed: int = 0
    radius: int = 8
    monitor_radius: int = 4
    window: int | None = None
    length: int = 8
    pocset: str | None = None
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("steps", "paths", "seed", "radius", "monitor_radius", "length"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ConfigError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.window is not None and (not isinstance(self.window, int) or self.window < 0):
            raise ConfigError(f"window must be a nonnegative integer, got {self.window!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")

    # -- serialisation -----------------------------------------------------
    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except ValueError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_json(text)

    def merged(self, overrides: dict) -> "ExperimentConfig":
        """Copy with every non-None override applied (flags beat the file)."""
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return type(self).from_dict(data)

    def digest(self) -> str:
        """sha256 of the canonical JSON of every field that can change results.

        The output directory and format are excluded so that the same
        experiment written to two places carries the same hash.
        """
        data = {k: v for k, v in self.to_dict().items() if k not in ("out", "format")}
        canon = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()
