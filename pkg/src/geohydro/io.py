"""CSV field files.

One header line ``t,<x_0>,...,<x_{n-1}>`` with the node coordinates, then one
row per record: the time followed by the node values. Floats use 17
significant digits so a write/read cycle is exact; complex values are written
as ``<re><+|-><im>i`` (``1+0i``). Lines end with LF.

Files that carry several fields per time (``rho, theta`` or the three
coordinates of a curve) store them as consecutive rows with the same ``t``,
in a fixed order.
"""

import numpy as np

from .errors import ConfigError
from .grid import check_size, nodes


def format_real(v):
    return format(float(v), ".17g")


def format_complex(z):
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def parse_value(token):
    token = token.strip()
    if token.endswith("i"):
        return complex(token[:-1] + "j")
    return float(token)


def format_rows(times, rows):
    """Render records as CSV text. ``rows`` is a 2-D array, real or complex."""
    rows = np.asarray(rows)
    if rows.ndim != 2 or len(times) != rows.shape[0]:
        raise ValueError("need one time per row")
    n = rows.shape[1]
    fmt = format_complex if np.iscomplexobj(rows) else format_real
    lines = [",".join(["t"] + [format_real(x) for x in nodes(n)])]
    for t, row in zip(times, rows):
        lines.append(",".join([format_real(t)] + [fmt(v) for v in row]))
    return "\n".join(lines) + "\n"


def write_rows(path, times, rows):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_rows(times, rows))


def read_rows(path):
    """Return ``(times, rows)``; rows are complex if any entry is."""
    try:
        with open(path, encoding="ascii") as fh:
            lines = [line for line in fh.read().split("\n") if line]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    if not lines or not lines[0].startswith("t,"):
        raise ConfigError(f"{path}: missing 't,' header")
    n = len(lines[0].split(",")) - 1
    try:
        check_size(n)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    times, rows = [], []
    for number, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != n + 1:
            raise ConfigError(f"{path}:{number}: expected {n + 1} cells, got {len(cells)}")
        try:
            times.append(float(cells[0]))
            rows.append([parse_value(c) for c in cells[1:]])
        except ValueError as exc:
            raise ConfigError(f"{path}:{number}: {exc}") from exc
    is_complex = any(isinstance(v, complex) for row in rows for v in row)
    return np.array(times), np.array(rows, dtype=complex if is_complex else float).reshape(len(rows), n)


def group_rows(times, rows, width, path="input"):
    """Split grouped records into ``(t, [field_1, ..., field_width])`` tuples."""
    if len(rows) % width:
        raise ConfigError(f"{path}: row count {len(rows)} is not a multiple of {width}")
    out = []
    for start in range(0, len(rows), width):
        block = times[start : start + width]
        if np.any(block != block[0]):
            raise ConfigError(f"{path}: grouped rows at record {start // width} disagree on t")
        out.append((block[0], list(rows[start : start + width])))
    return out
