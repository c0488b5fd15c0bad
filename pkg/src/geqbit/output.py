"""Deterministic CSV/JSON emission with atomic writes.

Floats are written with ``repr`` (shortest round-trip form), so files carry
full double precision and identical inputs give identical bytes.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from . import __version__

__all__ = ["fmt", "provenance_line", "csv_text", "json_text", "write_atomic"]


def fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def provenance_line(config_hash: str, seed: int | None = None) -> str:
    seed_s = "none" if seed is None else str(seed)
    return f"# geqbit {__version__} config_sha256={config_hash} seed={seed_s}"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]], provenance: str) -> str:
    lines = [provenance, ",".join(header)]
    for r in rows:
        cells = [fmt(v) for v in r]
        lines.append(",".join(f'"{c}"' if "," in c else c for c in cells))
    return "\n".join(lines) + "\n"


def _jsonable(x: Any) -> Any:
    if isinstance(x, float) and not math.isfinite(x):
        return fmt(x)
    if isinstance(x, Mapping):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "tolist"):
        return _jsonable(x.tolist())
    return x


def json_text(payload: Mapping[str, Any]) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n"


def write_atomic(path: str | Path, text: str) -> Path:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
