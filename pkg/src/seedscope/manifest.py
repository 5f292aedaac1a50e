"""Run manifests and canonical output encoding.

Every CLI output embeds (or is accompanied by) a manifest carrying the
command, all resolved parameters, SHA-256 digests of the input files, and
the tool version: enough to reproduce the output byte for byte.  JSON is
written with sorted keys and shortest round-trip float repr, so identical
runs produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__

__all__ = ["RunManifest", "canonical_json", "write_output"]


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    command: str
    params: dict
    inputs: dict = field(default_factory=dict)
    tool: str = "seedscope"
    version: str = __version__

    @classmethod
    def create(cls, command: str, params: dict, input_paths=()) -> "RunManifest":
        inputs = {str(p): file_digest(p) for p in input_paths}
        return cls(command=command, params=params, inputs=inputs)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "inputs": self.inputs,
            "tool": self.tool,
            "version": self.version,
        }


def _plain(obj):
    """Coerce numpy scalars/arrays and tuples into JSON-native values."""
    if hasattr(obj, "item") and getattr(obj, "ndim", None) == 0:
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, LF newline, round-trip floats."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def write_output(payload: dict, manifest: RunManifest, out_path=None) -> str:
    """Wrap a payload with its manifest; write when a path is given."""
    text = canonical_json({"manifest": manifest.to_dict(), "result": payload})
    if out_path is not None:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
