"""Atomic artifact writers: CSV tables and JSON summaries.

Artifacts are written to a temp file in the destination directory and
renamed into place, so a crashed run never leaves a truncated file. Floats
are serialized with repr, which round-trips exactly in both formats; reruns
with the same plan and seed therefore produce byte-identical CSV.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import os
import tempfile
from typing import List, Optional, Sequence

import numpy as np


def fmt_value(v) -> str:
    """Round-trip text for a cell: repr for floats, plain str otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _atomic_write(path: str, emit) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            emit(fh)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_csv(path: str, rows: Sequence[dict],
              fieldnames: Optional[List[str]] = None) -> None:
    """RFC-4180-style CSV; column order from the first row unless given."""
    rows = list(rows)  # rows may be a generator; it is scanned twice
    if fieldnames is None:
        fieldnames = []
        for r in rows:
            for k in r:
                if k not in fieldnames:
                    fieldnames.append(k)

    def emit(fh):
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        w.writerow(fieldnames)
        for r in rows:
            w.writerow([fmt_value(r.get(k, "")) for k in fieldnames])

    _atomic_write(path, emit)


def _json_default(o):
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if dataclasses.is_dataclass(o) and not isinstance(o, type):
        return dataclasses.asdict(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_json(path: str, obj) -> None:
    def emit(fh):
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")

    _atomic_write(path, emit)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
