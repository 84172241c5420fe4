"""Dataset manifest: participant roster, per-file checksums, frame totals.

The manifest is written at generation time and verified before any
training run touches the data, so silent corruption or partial writes
fail fast with the offending path.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import DataError

MANIFEST_NAME = "manifest.json"


def file_sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(root: Path, meta: dict) -> Path:
    """Checksum every data file under root and write manifest.json atomically."""
    root = Path(root)
    files = {}
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.name != MANIFEST_NAME:
            files[str(path.relative_to(root))] = file_sha256(path)
    doc = dict(meta)
    doc["files"] = files
    out = root / MANIFEST_NAME
    tmp = out.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    tmp.replace(out)
    return out


def load_manifest(root: Path) -> dict:
    path = Path(root) / MANIFEST_NAME
    if not path.exists():
        raise DataError(f"no manifest at {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"unreadable manifest {path}: {exc}") from exc


def verify_manifest(root: Path) -> dict:
    """Re-hash every listed file; raise DataError naming the first mismatch."""
    root = Path(root)
    doc = load_manifest(root)
    for rel, expected in doc.get("files", {}).items():
        path = root / rel
        if not path.exists():
            raise DataError(f"manifest lists missing file: {path}")
        actual = file_sha256(path)
        if actual != expected:
            raise DataError(
                f"checksum mismatch for {path}: manifest {expected[:12]}…, "
                f"file {actual[:12]}…"
            )
    return doc
