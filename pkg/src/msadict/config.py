"""Pipeline configuration.  Defaults are the published constants."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

from .alignment import PROFILE_MODES, SUM_OF_PAIRS, Scores


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    match: float = 1.0
    paraphrase: float = 0.5
    gap: float = -0.01
    mismatch: float = -0.5
    thesaurus_cutoff: float = 4.0
    witness_k: int = 2
    interior_cap: int = 4
    downweight: float = 0.1
    template_floor: int = 6
    profile_scoring: str = SUM_OF_PAIRS
    # all tie-breaks are fixed; there is no randomness to seed
    deterministic: bool = True

    def __post_init__(self):
        if not (self.match > self.paraphrase > 0 > self.gap > self.mismatch):
            raise ConfigError("similarity constants must satisfy match > paraphrase > 0 > gap > mismatch")
        if self.witness_k < 1:
            raise ConfigError("witness_k must be at least 1")
        if self.interior_cap < 1:
            raise ConfigError("interior_cap must be at least 1")
        if not 0 < self.downweight <= 1:
            raise ConfigError("downweight must lie in (0, 1]")
        if self.template_floor < 1:
            raise ConfigError("template_floor must be at least 1")
        if self.profile_scoring not in PROFILE_MODES:
            raise ConfigError(f"profile_scoring must be one of {PROFILE_MODES}")
        if not self.deterministic:
            raise ConfigError("only deterministic runs are supported")

    @property
    def scores(self) -> Scores:
        return Scores(self.match, self.paraphrase, self.gap, self.mismatch)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name: f.type for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        defaults = cls()
        kwargs = {}
        for key, value in data.items():
            expected = type(getattr(defaults, key))
            if expected is float and isinstance(value, int) and not isinstance(value, bool):
                value = float(value)
            if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
                raise ConfigError(f"{key} must be of type {expected.__name__}")
            kwargs[key] = value
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
        return cls.from_dict(data)
