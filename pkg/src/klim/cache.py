"""On-disk result cache for the command line.

An entry is ``<key>.json`` plus an optional ``<key>.d/`` directory of sparse
matrices.  The key hashes the schema version, the tool version, the command
and its configuration, so a version bump is a cache miss.

Matrix files are plain text::

    # rows cols
    row col num/den
    ...

one nonzero entry per line in row-major order.  Entries that fail to parse or
whose digest does not match are reported with a warning and ignored.
"""

from __future__ import annotations

import hashlib
import json
import os
import warnings
from fractions import Fraction
from pathlib import Path

from . import __version__
from .ratlin import SparseMatrix

SCHEMA_VERSION = 1


def cache_key(command: str, config: dict) -> str:
    blob = json.dumps(
        {"schema": SCHEMA_VERSION, "version": __version__, "command": command, "config": config},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def payload_bytes(payload) -> bytes:
    return json.dumps(payload, separators=(",", ":")).encode()


def dump_matrix(M: SparseMatrix) -> str:
    lines = [f"# {M.nrows} {M.ncols}"]
    for (r, c), v in sorted(M.entries.items()):
        v = Fraction(v)
        lines.append(f"{r} {c} {v.numerator}/{v.denominator}")
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> SparseMatrix:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing header")
    nrows, ncols = map(int, lines[0][1:].split())
    entries = {}
    for line in lines[1:]:
        r, c, frac = line.split()
        num, den = frac.split("/")
        v = Fraction(int(num), int(den))
        r, c = int(r), int(c)
        if not (0 <= r < nrows and 0 <= c < ncols) or not v:
            raise ValueError(f"bad entry: {line}")
        entries[r, c] = v.numerator if v.denominator == 1 else v
    return SparseMatrix(nrows, ncols, entries)


class ResultCache:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)

    def _paths(self, key: str) -> tuple[Path, Path]:
        return self.root / f"{key}.json", self.root / f"{key}.d"

    def store(self, key: str, payload, verdict: str, matrices: dict[str, SparseMatrix] | None = None) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        entry, mdir = self._paths(key)
        digests = {}
        if matrices:
            mdir.mkdir(exist_ok=True)
            for name, M in matrices.items():
                text = dump_matrix(M)
                (mdir / f"{name}.txt").write_text(text)
                digests[name] = hashlib.sha256(text.encode()).hexdigest()
        record = {
            "schema_version": SCHEMA_VERSION,
            "version": __version__,
            "key": key,
            "payload": payload,
            "payload_sha256": hashlib.sha256(payload_bytes(payload)).hexdigest(),
            "verdict": verdict,
            "matrices": digests,
        }
        tmp = entry.with_suffix(".tmp")
        tmp.write_text(json.dumps(record, indent=1))
        tmp.replace(entry)

    def load(self, key: str, with_matrices: bool = False):
        """``(payload, verdict, matrices)`` or None on a miss or a corrupt entry."""
        entry, mdir = self._paths(key)
        if not entry.exists():
            return None
        try:
            record = json.loads(entry.read_text())
            if record.get("schema_version") != SCHEMA_VERSION or record.get("key") != key:
                raise ValueError("schema or key mismatch")
            payload = record["payload"]
            if hashlib.sha256(payload_bytes(payload)).hexdigest() != record["payload_sha256"]:
                raise ValueError("payload digest mismatch")
            matrices = {}
            for name, digest in sorted(record.get("matrices", {}).items()):
                text = (mdir / f"{name}.txt").read_text()
                if hashlib.sha256(text.encode()).hexdigest() != digest:
                    raise ValueError(f"matrix {name} digest mismatch")
                if with_matrices:
                    matrices[name] = parse_matrix(text)
            return payload, record["verdict"], matrices
        except (OSError, ValueError, KeyError, TypeError) as exc:
            warnings.warn(f"ignoring corrupt cache entry {entry.name}: {exc}", stacklevel=2)
            return None
