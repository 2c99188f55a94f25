"""Deterministic artifact output and a content-addressed results cache.

Every run directory holds exactly four kinds of files: the resolved config,
a manifest listing the data files, the data files themselves, and a checksum
index.  CSV cells are written with repr-style shortest round-trip floats and
'.' decimal separators so re-runs are bit-identical and downstream parsers
can rely on the exact format.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

CACHE_ENV_VAR = "KICKEDSPIN_CACHE_DIR"
OUTPUT_ENV_VAR = "KICKEDSPIN_OUT"
CODE_SALT = "kickedspin-results-v1"

CONFIG_FILENAME = "config.json"
MANIFEST_FILENAME = "manifest.json"
CHECKSUMS_FILENAME = "checksums.json"


def format_cell(value: Any) -> str:
    """One CSV cell: shortest round-trip for floats, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isnan(value):
            return ""
        return repr(value)
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Header always present; rows newline-terminated including the last."""
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(
                f"row width {len(row)} does not match header width {len(header)}"
            )
        lines.append(",".join(format_cell(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    """Inverse of write_csv for round-trip checks; cells stay as strings."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ValueError(f"{path} is empty; a header row is mandatory")
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def canonical_json(obj: Any) -> str:
    """Stable serialization: sorted keys, no whitespace drift."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def write_json(path: Path, obj: Any) -> None:
    Path(path).write_text(
        json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n",
        encoding="utf-8",
    )


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def cache_key(payload: Mapping[str, Any]) -> str:
    """Content hash of the inputs that determine a result, plus a code salt.

    The salt is bumped whenever the numerics change meaning, invalidating
    stale entries without any directory surgery.
    """
    blob = CODE_SALT + canonical_json(dict(payload))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class ResultsCache:
    """npz/json store keyed by input-content hashes.

    A disabled cache keeps the same interface but never hits the disk, so
    call sites need no branching.
    """

    def __init__(self, root: Path | None = None, enabled: bool = True) -> None:
        if root is None:
            env = os.environ.get(CACHE_ENV_VAR)
            root = Path(env) if env else Path.home() / ".cache" / "kickedspin"
        self.root = Path(root)
        self.enabled = enabled

    def _path(self, key: str, suffix: str) -> Path:
        return self.root / key[:2] / f"{key}{suffix}"

    def get_arrays(self, key: str) -> dict[str, np.ndarray] | None:
        if not self.enabled:
            return None
        path = self._path(key, ".npz")
        if not path.exists():
            return None
        with np.load(path, allow_pickle=False) as data:
            return {name: data[name] for name in data.files}

    def put_arrays(self, key: str, arrays: Mapping[str, np.ndarray]) -> None:
        if not self.enabled:
            return
        path = self._path(key, ".npz")
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp.npz")
        np.savez_compressed(tmp, **arrays)
        os.replace(tmp, path)

    def get_json(self, key: str) -> Any | None:
        if not self.enabled:
            return None
        path = self._path(key, ".json")
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put_json(self, key: str, obj: Any) -> None:
        if not self.enabled:
            return
        path = self._path(key, ".json")
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp.json")
        tmp.write_text(canonical_json(obj), encoding="utf-8")
        os.replace(tmp, path)


class RunDirectory:
    """Collects one command's artifacts and seals them with the index files.

    Data files go through add_csv/add_json; finalize writes the resolved
    config, the manifest (data files plus their roles, no timestamps), and
    the checksum index covering everything except the index itself.
    """

    def __init__(self, path: Path) -> None:
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self._files: dict[str, str] = {}

    def add_csv(
        self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]], role: str
    ) -> Path:
        target = self.path / name
        write_csv(target, header, rows)
        self._files[name] = role
        return target

    def add_json(self, name: str, obj: Any, role: str) -> Path:
        target = self.path / name
        write_json(target, obj)
        self._files[name] = role
        return target

    def finalize(self, command: str, resolved_config: Mapping[str, Any]) -> None:
        write_json(self.path / CONFIG_FILENAME, dict(resolved_config))
        manifest = {
            "command": command,
            "files": dict(sorted(self._files.items())),
            "format": {
                "csv": "comma-separated, '.' decimal, header row, newline-terminated",
                "json": "utf-8, sorted keys",
            },
        }
        write_json(self.path / MANIFEST_FILENAME, manifest)
        names = sorted([*self._files, CONFIG_FILENAME, MANIFEST_FILENAME])
        checksums = {name: sha256_file(self.path / name) for name in names}
        write_json(self.path / CHECKSUMS_FILENAME, checksums)
