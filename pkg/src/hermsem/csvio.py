"""Deterministic CSV output.

Floats are written with 17 significant digits so parsing them back
reproduces the exact bits; everything else follows RFC 4180 (header row,
comma separator, quoting only when needed).  Data files never contain
timestamps, keeping byte-for-byte determinism for fixed (config, seed).
"""

from __future__ import annotations

import os

__all__ = ["format_value", "emit_csv"]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _quote(s: str) -> str:
    if any(ch in s for ch in (",", '"', "\n", "\r")):
        return '"' + s.replace('"', '""') + '"'
    return s


def emit_csv(rows, path, columns=None) -> None:
    """Write dict rows as CSV; an empty table still gets its header row."""
    if columns is None:
        if not rows:
            raise ValueError("columns are required for an empty table")
        columns = list(rows[0].keys())
    lines = [",".join(_quote(c) for c in columns)]
    for row in rows:
        lines.append(",".join(_quote(format_value(row[c])) for c in columns))
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write("\r\n".join(lines) + "\r\n")
