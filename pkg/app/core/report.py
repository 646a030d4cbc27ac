"""Command reports: verdicts, witnesses, timings, tool version and the config echo."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from app.core.version import APP_VERSION

try:
    import psutil
except ImportError:
    psutil = None


def rss_mb() -> float | None:
    """Resident memory of this process in MB, when psutil is available."""
    if psutil is None:
        return None
    try:
        return psutil.Process().memory_info().rss / 1_000_000.0
    except Exception:
        return None


class Stopwatch:
    """Named wall-clock sections, summed when a name repeats."""

    def __init__(self) -> None:
        self.sections: dict[str, list[float]] = {}
        self._start = time.perf_counter()

    def section(self, name: str) -> "_Section":
        return _Section(self, name)

    def record(self, name: str, seconds: float) -> None:
        self.sections.setdefault(name, []).append(seconds)

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"total_s": round(time.perf_counter() - self._start, 6)}
        for name, values in self.sections.items():
            arr = np.asarray(values, dtype=float)
            out[name] = {
                "calls": int(arr.size),
                "total_s": round(float(arr.sum()), 6),
                "median_s": round(float(np.median(arr)), 6),
                "p95_s": round(float(np.percentile(arr, 95)), 6),
            }
        mem = rss_mb()
        if mem is not None:
            out["rss_mb"] = round(mem, 1)
        return out


class _Section:
    def __init__(self, watch: Stopwatch, name: str):
        self.watch = watch
        self.name = name

    def __enter__(self) -> "_Section":
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc: object) -> None:
        self.watch.record(self.name, time.perf_counter() - self.t0)


def depth_histogram(depths: Sequence[int], max_depth: int) -> list[int]:
    if not depths:
        return [0] * (max_depth + 1)
    return [int(n) for n in np.bincount(np.asarray(depths, dtype=int), minlength=max_depth + 1)]


@dataclass
class Report:
    command: str
    ok: bool = True
    verdicts: dict[str, Any] = field(default_factory=dict)
    witnesses: list[Any] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)
    timings: dict[str, Any] = field(default_factory=dict)
    version: str = APP_VERSION

    def as_dict(self, with_timings: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "command": self.command,
            "version": self.version,
            "ok": self.ok,
            "config": self.config,
            "verdicts": self.verdicts,
            "witnesses": self.witnesses,
        }
        if with_timings:
            out["timings"] = self.timings
        return out

    def to_structured(self, with_timings: bool = True) -> str:
        return json.dumps(_plain(self.as_dict(with_timings)), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"doublefold {self.version} {self.command}: {'ok' if self.ok else 'FAILED'}"]
        lines += _text_lines(self.verdicts, indent=1)
        if self.witnesses:
            lines.append("witnesses:")
            lines += _text_lines(self.witnesses, indent=1)
        if self.timings:
            lines.append(f"time: {self.timings.get('total_s', 0.0):.3f}s")
        return "\n".join(lines) + "\n"

    def render(self, output_format: str) -> str:
        return self.to_structured() if output_format == "structured" else self.to_text()


def _plain(value: Any) -> Any:
    """JSON-ready copy: tuples become lists, sets sorted lists, numpy scalars Python numbers."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    if isinstance(value, np.generic):
        return value.item()
    return value


def _text_lines(value: Any, indent: int) -> Iterable[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                yield f"{pad}{k}:"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}{k}: {_scalar(v)}"
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)) and v:
                yield f"{pad}-"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}- {_scalar(v)}"
    else:
        yield f"{pad}{_scalar(value)}"


def _scalar(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "-"
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)
