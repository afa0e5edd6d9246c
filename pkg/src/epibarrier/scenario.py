"""Scenario files: model parameters, caps, and optional run settings.

Scenario JSON is strict: unknown keys anywhere are rejected with the path of
the offending key, malformed JSON reports its line and column.  The four
study scenarios ship with the package and can be referenced by name.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .model import ConstraintCaps, ModelParams

BUNDLED = (
    "cali_comfortable",
    "cali_comfortable_viable",
    "cali_viable",
    "cali_desperate",
)


@dataclass(frozen=True)
class RunSettings:
    horizon: float = 3000.0
    grid: tuple[int, int] = (200, 200)
    membership_eps: float = 1e-9
    oracle_dt: float = 0.5
    agreement_band: float = 0.01

    _KEYS = ("horizon", "grid", "membership_eps", "oracle_dt", "agreement_band")

    def __post_init__(self) -> None:
        if self.horizon <= 0:
            raise ValueError("run.horizon must be positive")
        n1, n2 = self.grid
        if n1 < 2 or n2 < 2:
            raise ValueError("run.grid entries must be at least 2")
        if self.membership_eps <= 0:
            raise ValueError("run.membership_eps must be positive")
        if self.oracle_dt <= 0:
            raise ValueError("run.oracle_dt must be positive")
        if self.agreement_band <= 0:
            raise ValueError("run.agreement_band must be positive")

    @classmethod
    def from_json_dict(cls, d: dict) -> "RunSettings":
        unknown = set(d) - set(cls._KEYS)
        if unknown:
            raise ValueError(f"unknown run keys: {sorted(unknown)}")
        kwargs: dict = {}
        if "horizon" in d:
            kwargs["horizon"] = float(d["horizon"])
        if "grid" in d:
            g = d["grid"]
            if not (isinstance(g, list) and len(g) == 2):
                raise ValueError("run.grid must be a two-element list")
            kwargs["grid"] = (int(g[0]), int(g[1]))
        for key in ("membership_eps", "oracle_dt", "agreement_band"):
            if key in d:
                kwargs[key] = float(d[key])
        return cls(**kwargs)

    def to_json_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "grid": list(self.grid),
            "membership_eps": self.membership_eps,
            "oracle_dt": self.oracle_dt,
            "agreement_band": self.agreement_band,
        }


@dataclass(frozen=True)
class Scenario:
    params: ModelParams
    caps: ConstraintCaps
    run: RunSettings = field(default_factory=RunSettings)

    @classmethod
    def from_json_dict(cls, d: dict) -> "Scenario":
        unknown = set(d) - {"model", "caps", "run"}
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        for key in ("model", "caps"):
            if key not in d:
                raise ValueError(f"scenario is missing the '{key}' section")
        run = RunSettings.from_json_dict(d.get("run", {}))
        return cls(
            ModelParams.from_json_dict(d["model"]),
            ConstraintCaps.from_json_dict(d["caps"]),
            run,
        )

    def to_json_dict(self) -> dict:
        return {
            "model": self.params.to_json_dict(),
            "caps": self.caps.to_json_dict(),
            "run": self.run.to_json_dict(),
        }


class ScenarioError(ValueError):
    """Scenario file rejected, with a human-readable location."""


def load_scenario(ref: str | Path) -> Scenario:
    """Load a scenario from a path, or by bundled name (with or without .json)."""
    path = Path(ref)
    if path.exists():
        text = path.read_text()
        source = str(path)
    else:
        stem = path.name.removesuffix(".json")
        if stem in BUNDLED:
            text = (
                resources.files("epibarrier.scenarios").joinpath(f"{stem}.json").read_text()
            )
            source = f"bundled:{stem}"
        else:
            raise ScenarioError(
                f"scenario '{ref}' is neither a file nor one of the bundled "
                f"names {', '.join(BUNDLED)}"
            )
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ScenarioError(f"{source}: scenario must be a JSON object")
    try:
        return Scenario.from_json_dict(data)
    except ValueError as e:
        raise ScenarioError(f"{source}: {e}") from e
