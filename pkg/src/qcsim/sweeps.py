"""Sweep plumbing: grids, result containers, deterministic file output.

Data files carry no timestamps and print floats with 9 significant
digits (lowercase scientific outside [1e-4, 1e7)), so identical inputs
produce byte-identical CSVs.  Run metadata (device hash, tool version,
timestamp, per-point errors) lives in a JSON sidecar next to each CSV,
and a manifest is written atomically after every run.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple

THREADS_ENV = "QCS_THREADS"


@dataclass(frozen=True)
class SweepResult:
    """Named coordinate vectors plus equally long observable columns in
    row-major order over the axes."""

    axes: Dict[str, Tuple[float, ...]]
    columns: Dict[str, tuple]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = 1
        for values in self.axes.values():
            expected *= len(values)
        for name, column in self.columns.items():
            if len(column) != expected:
                raise ValueError(
                    f"column '{name}' has {len(column)} entries, expected {expected}"
                )

    @property
    def n_points(self) -> int:
        out = 1
        for values in self.axes.values():
            out *= len(values)
        return out


@dataclass(frozen=True)
class AxisSpec:
    """Inclusive linear grid parsed from a start:stop:count flag."""

    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 2:
            raise ValueError(f"axis count must be >= 2, got {self.count}")

    def values(self) -> Tuple[float, ...]:
        step = (self.stop - self.start) / (self.count - 1)
        return tuple(self.start + i * step for i in range(self.count))

    def int_values(self) -> Tuple[int, ...]:
        vals = self.values()
        out = tuple(int(round(v)) for v in vals)
        if any(abs(v - i) > 1e-9 for v, i in zip(vals, out)):
            raise ValueError(f"axis {self.start}:{self.stop}:{self.count} is not integral")
        return out


def parse_axis(text: str) -> AxisSpec:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"axis spec must be start:stop:count, got {text!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise ValueError(f"axis spec must be numeric start:stop:count, got {text!r}") from None
    return AxisSpec(start=start, stop=stop, count=count)


def format_float(x: float) -> str:
    """9 significant digits; lowercase scientific where |x| < 1e-4 or >= 1e7."""
    if x != x:
        return "nan"
    if x == 0.0:
        x = 0.0  # normalize -0.0
        return "0"
    mag = abs(x)
    if mag < 1e-4 or mag >= 1e7 or math.isinf(mag):
        return f"{x:.8e}"
    return f"{x:.9g}"


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return format_float(float(value))


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    """UTF-8, LF line endings, exactly the given header."""
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_sidecar(path: Path, header: Sequence[str], rows: Sequence[Sequence], metadata: dict) -> None:
    """JSON mirror of a CSV plus run metadata (timestamps allowed here)."""
    doc = {
        "metadata": metadata,
        "header": list(header),
        "rows": [[None if cell is None else cell for cell in row] for row in rows],
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_json_atomic(path: Path, document: dict) -> None:
    """Write JSON via a temp file and rename, so readers never see a
    partial document."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            json.dump(document, handle, indent=2, sort_keys=True)
            handle.write("\n")
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


@dataclass(frozen=True)
class RunManifest:
    """What ran and where the outputs went."""

    config_path: str
    subcommand: str
    flags: dict
    output_paths: Tuple[str, ...]
    duration_s: float

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / f"{self.subcommand}.manifest.json"
        write_json_atomic(
            path,
            {
                "config_path": self.config_path,
                "subcommand": self.subcommand,
                "flags": self.flags,
                "output_paths": list(self.output_paths),
                "duration_s": self.duration_s,
            },
        )
        return path


def device_hash(device_dict: dict) -> str:
    """Stable short hash of a serialized device config."""
    canonical = json.dumps(device_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def map_points(fn: Callable, points: Sequence) -> List:
    """Apply `fn` to each grid point, preserving order.

    Fans out to a thread pool when QCS_THREADS is set above 1; the
    per-point computations are pure, so ordering is the only contract.
    """
    workers = 0
    raw = os.environ.get(THREADS_ENV, "")
    if raw.strip():
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, points))
    return [fn(point) for point in points]
