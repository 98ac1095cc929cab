"""Run manifests and atomic file output for the CLI."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass, field

MANIFEST_SCHEMA = "recipspec.manifest/1"


def _json_default(obj):
    """Make numpy scalars and arrays serializable."""
    import numpy as np
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def dump_json(obj, **kw) -> str:
    kw.setdefault("indent", 2)
    kw.setdefault("sort_keys", True)
    return json.dumps(obj, default=_json_default, **kw) + "\n"


def atomic_write_text(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_via(path, writer) -> None:
    """Run ``writer(tmp_path)`` and atomically move the result into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_of(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Record of one CLI invocation: resolved parameters and emitted files."""

    subcommand: str
    parameters: dict
    seed: int | None = None
    outputs: list = field(default_factory=list)
    wall_time_s: float | None = None
    package_version: str = ""
    schema: str = MANIFEST_SCHEMA
    _t0: float = field(default_factory=time.monotonic, repr=False)

    def add_output(self, path) -> None:
        self.outputs.append({"path": str(path), "sha256": sha256_of(path)})

    def finalize(self) -> dict:
        self.wall_time_s = time.monotonic() - self._t0
        return {
            "schema": self.schema,
            "subcommand": self.subcommand,
            "package_version": self.package_version,
            "parameters": self.parameters,
            "seed": self.seed,
            "outputs": self.outputs,
            "wall_time_s": self.wall_time_s,
        }

    def write(self, path) -> None:
        atomic_write_text(path, dump_json(self.finalize()))
