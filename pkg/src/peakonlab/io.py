"""CSV/JSON writers and the run manifest."""
from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, is_dataclass
from pathlib import Path

from . import __version__

OUT_ENV = "PEAKONLAB_OUT"


def fmt(v) -> str:
    """Round-trip decimal text (17 significant digits) for floats."""
    if isinstance(v, float) or hasattr(v, "dtype"):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> tuple[list[str], list[list[float]]]:
    with Path(path).open() as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [[float(v) for v in row] for row in r]


def write_snapshots(path, snapshots) -> Path:
    rows = ((s.time, x, u) for s in snapshots for x, u in zip(s.x, s.u))
    return write_csv(path, ("t", "x", "u"), rows)


def write_diagnostics(path, records) -> Path:
    from .evolve import DiagnosticsRecord

    return write_csv(path, DiagnosticsRecord.COLUMNS, (r.row() for r in records))


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


def _plain(obj):
    if is_dataclass(obj):
        return {k: _plain(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str)):
        return obj.value
    return obj


@dataclass
class RunManifest:
    command: str
    params: dict | None
    args: dict
    config: dict | None = None
    seed: int | None = None
    tool_version: str = __version__
    outputs: list[str] = field(default_factory=list)

    def input_hash(self) -> str:
        canon = json.dumps(_plain({"command": self.command, "params": self.params, "args": self.args,
                                   "config": self.config, "seed": self.seed}), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()

    def to_dict(self) -> dict:
        d = _plain(asdict(self))
        d["input_hash"] = self.input_hash()
        return d

    def write(self, path) -> Path:
        return write_json(path, self.to_dict())

    @classmethod
    def load(cls, path) -> RunManifest:
        d = json.loads(Path(path).read_text())
        d.pop("input_hash", None)
        return cls(**d)


def output_dir(requested: str | None) -> Path:
    """Explicit --out wins, then $PEAKONLAB_OUT, then the working directory."""
    return Path(requested or os.environ.get(OUT_ENV) or ".")
