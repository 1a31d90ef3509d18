"""Small CSV helpers shared by the study drivers and the CLI.

Files carry a '#'-prefixed parameter block, then a header line, then comma
separated rows with '.' decimals and scientific notation at full double
precision, so written tables re-parse to identical values.  Writes go
through a temporary file and an atomic rename.
"""

from __future__ import annotations

import os
import tempfile


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17e}"
    return str(v)


def atomic_write_text(path: str, payload: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, columns: list[str], rows: list[list], params: dict | None = None) -> None:
    lines = []
    for key in sorted(params or {}):
        lines.append(f"# {key}={params[key]}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_csv(path: str) -> tuple[dict, list[str], list[list]]:
    """Parse a table written by write_csv; numeric cells become floats."""
    params: dict = {}
    columns: list[str] = []
    rows: list[list] = []
    with open(path) as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    params[key.strip()] = value.strip()
                continue
            cells = line.split(",")
            if not columns:
                columns = cells
                continue
            parsed = []
            for cell in cells:
                if cell == "":
                    parsed.append(None)
                else:
                    try:
                        parsed.append(float(cell))
                    except ValueError:
                        parsed.append(cell)
            rows.append(parsed)
    return params, columns, rows
