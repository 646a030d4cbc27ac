# configio.py: persisted defaults and the run configuration for doublefold
from __future__ import annotations

import json
import tempfile
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from app.core.logger import APP_LOGGER

DEFAULT_PATH = Path.home() / ".doublefold" / "config.json"
OUTPUT_FORMATS = ("text", "structured")
DIAGRAMS = ("cat", "twocat", "dblcat")


def _fallback(path: Path) -> Path:
    return Path(tempfile.gettempdir()) / ".doublefold" / path.name


def ensure_dir(p: Path) -> Path:
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        return p
    except PermissionError:
        # home not writable
        tmp = _fallback(p)
        APP_LOGGER.warning(f"Permission denied for {p}, falling back to {tmp}")
        tmp.parent.mkdir(parents=True, exist_ok=True)
        return tmp


def save_config(cfg: dict, path: Path = DEFAULT_PATH) -> None:
    target_path = ensure_dir(path)
    try:
        with open(target_path, "w", encoding="utf-8") as f:
            json.dump(cfg, f, indent=2, sort_keys=True)
    except Exception as e:
        APP_LOGGER.error(f"Failed to save config to {target_path}: {e}")


def load_config(path: Path = DEFAULT_PATH) -> dict | None:
    try:
        if not path.exists():
            tmp = _fallback(path)
            if tmp.exists():
                path = tmp
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise ValueError("config root is not an object")
        return data
    except Exception as e:
        APP_LOGGER.warning(f"Failed to load config from {path}: {e}")
        return None


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...] = ()
    seed: int = 0
    depth: int = 3
    count: int = 100
    output_format: str = "text"
    diagram: str = "dblcat"
    weights: tuple[float, float, float] = (0.4, 0.4, 0.2)
    extra: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("seed", "depth", "count"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if len(self.weights) != 3 or any(w <= 0 for w in self.weights):
            raise ValueError(f"weights must be three positive numbers, got {self.weights}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output format must be one of {', '.join(OUTPUT_FORMATS)}")
        if self.diagram not in DIAGRAMS:
            raise ValueError(f"diagram must be one of {', '.join(DIAGRAMS)}")

    @classmethod
    def from_mapping(cls, command: str, data: Mapping[str, Any] | None, **overrides: Any) -> "RunConfig":
        """Persisted defaults first, then explicit overrides that are not None."""
        data = dict(data or {})
        known = {"seed", "depth", "count", "output_format", "diagram", "weights"}
        values: dict[str, Any] = {k: data[k] for k in known if k in data}
        if "weights" in values:
            values["weights"] = tuple(float(w) for w in values["weights"])
        for key, value in overrides.items():
            if value is not None:
                values[key] = value
        if "inputs" in values:
            values["inputs"] = tuple(values["inputs"])
        return cls(command=command, **values)

    def with_inputs(self, *inputs: str) -> "RunConfig":
        return replace(self, inputs=tuple(inputs))

    def echo(self) -> dict[str, Any]:
        out = asdict(self)
        out["inputs"] = list(self.inputs)
        out["weights"] = list(self.weights)
        out.pop("extra")
        return out
