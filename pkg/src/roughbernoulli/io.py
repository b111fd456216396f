"""CSV output with ``#`` provenance headers (12 significant digits)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

FMT = "%.12g"


def fmt(x) -> str:
    return FMT % x


def header_lines(meta: dict) -> list[str]:
    return [f"# {k} = {v}" for k, v in meta.items()]


def write_csv(path, names, columns, meta: dict | None = None) -> Path:
    """Write equal-length ``columns`` under ``#``-prefixed metadata lines."""
    cols = [np.asarray(c) for c in columns]
    return write_records(path, names, zip(*cols), meta)


def write_records(path, names, rows, meta: dict | None = None) -> Path:
    """Like :func:`write_csv` but row-wise; string cells are written verbatim."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = header_lines(meta or {})
    lines.append("# " + ",".join(names))
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", comments="#", ndmin=2)


def read_meta(path) -> dict[str, str]:
    meta = {}
    for line in Path(path).read_text().splitlines():
        if line.startswith("# ") and " = " in line:
            k, v = line[2:].split(" = ", 1)
            meta[k.strip()] = v.strip()
    return meta
