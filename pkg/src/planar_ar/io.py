"""Text serialization for grids, tables and reports.

Machine formats (JSON, CSV) write floats with ``repr``, the shortest string
that parses back to the same double.  The ``table`` format rounds to six
significant digits and is meant for reading only.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .acf import AcfGrid
from .errors import InputFormatError
from .ma import PsiTable
from .sim import FieldGrid, Provenance

__all__ = [
    "fmt",
    "fmt_table",
    "csv_text",
    "to_jsonable",
    "dumps_json",
    "acf_to_csv",
    "acf_to_json",
    "acf_to_table",
    "psi_to_csv",
    "psi_to_json",
    "psi_to_table",
    "field_to_csv",
    "field_to_json",
    "field_to_pgm",
    "field_to_table",
    "array_to_pgm",
    "load_grid",
    "write_atomic",
]

PGM_LINE = 70


def fmt(x: float) -> str:
    return repr(float(x))


def fmt_table(x: float) -> str:
    return f"{float(x):.6g}"


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats.

    Non-finite floats become ``None`` so the output stays standard JSON.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _aligned(rows: list[list[str]]) -> str:
    widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
    return "".join("  ".join(s.rjust(w) for s, w in zip(r, widths)) + "\n" for r in rows)


# autocovariance grids

def acf_to_csv(g: AcfGrid, oracle: np.ndarray | None = None) -> str:
    header = ["h1", "h2", "gamma"]
    if oracle is not None:
        header += ["quadrature", "abs_diff"]
    rows = []
    for h1, h2, v in g.items():
        row = [h1, h2, fmt(v)]
        if oracle is not None:
            o = oracle[h1 - g.h1_min, h2 - g.h2_min]
            row += [fmt(o), fmt(abs(v - o))]
        rows.append(row)
    return csv_text(header, rows)


def acf_to_json(g: AcfGrid, oracle: np.ndarray | None = None) -> str:
    doc = {
        "h1_min": g.h1_min,
        "h1_max": g.h1_max,
        "h2_min": g.h2_min,
        "h2_max": g.h2_max,
        "source": g.source,
        "values": g.values,
        "meta": g.meta,
    }
    if oracle is not None:
        doc["quadrature"] = oracle
        doc["max_abs_diff"] = float(np.max(np.abs(g.values - oracle)))
    return dumps_json(doc)


def acf_to_table(g: AcfGrid, oracle: np.ndarray | None = None) -> str:
    """Rows run over h2 from high to low, columns over h1."""
    rows = [["h2\\h1"] + [str(h) for h in g.h1_range]]
    for h2 in reversed(g.h2_range):
        rows.append([str(h2)] + [fmt_table(g.at(h1, h2)) for h1 in g.h1_range])
    text = _aligned(rows)
    if oracle is not None:
        text += f"max |exact - quadrature| = {float(np.max(np.abs(g.values - oracle))):.3g}\n"
    return text


# coefficient tables

def psi_to_csv(t: PsiTable) -> str:
    rows = [[k, l, fmt(t.values[k, l])] for k in range(t.kmax + 1) for l in range(t.lmax + 1)]
    return csv_text(["k", "l", "psi"], rows)


def psi_to_json(t: PsiTable) -> str:
    return dumps_json(
        {"kmax": t.kmax, "lmax": t.lmax, "tail_bound": t.tail_bound, "tail_bound_kind": "estimated",
         "values": t.values}
    )


def psi_to_table(t: PsiTable) -> str:
    rows = [["k\\l"] + [str(l) for l in range(t.lmax + 1)]]
    rows += [[str(k)] + [fmt_table(v) for v in t.values[k]] for k in range(t.kmax + 1)]
    return _aligned(rows) + f"tail_bound (estimated) = {t.tail_bound:.3g}\n"


# fields

def field_to_csv(g: FieldGrid) -> str:
    rows = [[i, j, fmt(g.values[i, j])] for i in range(g.n_rows) for j in range(g.n_cols)]
    return csv_text(["i", "j", "x"], rows)


def field_to_json(g: FieldGrid) -> str:
    return dumps_json(
        {"n_rows": g.n_rows, "n_cols": g.n_cols, "provenance": g.provenance.value, "seed": g.seed,
         "meta": g.meta, "values": g.values}
    )


def field_to_table(g: FieldGrid) -> str:
    return _aligned([[fmt_table(v) for v in row] for row in g.values])


def array_to_pgm(values: np.ndarray, meta: dict) -> str:
    """Plain graymap with values mapped affinely onto 0..255.

    The comment line carries ``meta`` plus the min and max used for the map.
    """
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo
    levels = np.zeros(values.shape, dtype=int) if span == 0 else np.rint((values - lo) / span * 255).astype(int)
    header = {**meta, "min": lo, "max": hi}
    lines = ["P2", "# " + json.dumps(to_jsonable(header), allow_nan=False, separators=(",", ":"))]
    lines.append(f"{values.shape[1]} {values.shape[0]}")
    lines.append("255")
    for row in levels:
        line = ""
        for v in row:
            s = str(v)
            if line and len(line) + 1 + len(s) > PGM_LINE:
                lines.append(line)
                line = s
            else:
                line = f"{line} {s}" if line else s
        lines.append(line)
    return "\n".join(lines) + "\n"


def field_to_pgm(g: FieldGrid) -> str:
    meta = {"provenance": g.provenance.value, "seed": g.seed, **g.meta}
    return array_to_pgm(g.values, meta)


# reading

def _parse_float(s: str, where: str) -> float:
    try:
        x = float(s)
    except ValueError:
        raise InputFormatError(f"{where}: not a number: {s!r}") from None
    if not math.isfinite(x):
        raise InputFormatError(f"{where}: non-finite value {s!r}")
    return x


def _parse_int(s: str, where: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise InputFormatError(f"{where}: not an integer: {s!r}") from None


def _dense(entries: dict[tuple[int, int], float], what: str) -> tuple[int, int, np.ndarray]:
    if not entries:
        raise InputFormatError(f"{what}: no data rows")
    i_vals = sorted({i for i, _ in entries})
    j_vals = sorted({j for _, j in entries})
    i0, j0 = i_vals[0], j_vals[0]
    n1, n2 = i_vals[-1] - i0 + 1, j_vals[-1] - j0 + 1
    if len(entries) != n1 * n2:
        raise InputFormatError(
            f"{what}: {len(entries)} entries do not fill the {n1} x {n2} rectangle they span"
        )
    out = np.empty((n1, n2))
    for (i, j), v in entries.items():
        out[i - i0, j - j0] = v
    return i0, j0, out


def _grid_from_csv(text: str, name: str) -> AcfGrid | FieldGrid:
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise InputFormatError(f"{name}: empty file") from None
    if header[:3] == ["h1", "h2", "gamma"]:
        kind = "acf"
    elif header[:3] == ["i", "j", "x"]:
        kind = "field"
    else:
        raise InputFormatError(f"{name}: header must start with h1,h2,gamma or i,j,x, got {header}")
    entries: dict[tuple[int, int], float] = {}
    for n, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise InputFormatError(f"{name}:{n}: expected {len(header)} columns, got {len(row)}")
        key = (_parse_int(row[0], f"{name}:{n}"), _parse_int(row[1], f"{name}:{n}"))
        if key in entries:
            raise InputFormatError(f"{name}:{n}: duplicate index {key}")
        entries[key] = _parse_float(row[2], f"{name}:{n}")
    i0, j0, values = _dense(entries, name)
    if kind == "acf":
        return AcfGrid(i0, i0 + values.shape[0] - 1, j0, j0 + values.shape[1] - 1, values, source="file")
    if (i0, j0) != (0, 0):
        raise InputFormatError(f"{name}: field indices must start at (0, 0), got ({i0}, {j0})")
    return FieldGrid(values.shape[0], values.shape[1], values, Provenance.DETERMINISTIC, meta={"source": name})


def _grid_from_json(text: str, name: str) -> AcfGrid | FieldGrid:
    try:
        doc = json.loads(text)
        if "h1_min" in doc:
            values = np.array(doc["values"], dtype=float)
            return AcfGrid(int(doc["h1_min"]), int(doc["h1_max"]), int(doc["h2_min"]), int(doc["h2_max"]),
                           values, source=doc.get("source", "file"), meta=doc.get("meta", {}))
        if "n_rows" in doc:
            values = np.array(doc["values"], dtype=float)
            return FieldGrid(int(doc["n_rows"]), int(doc["n_cols"]), values,
                             doc.get("provenance", Provenance.DETERMINISTIC), seed=doc.get("seed"),
                             meta=doc.get("meta", {}))
    except InputFormatError:
        raise
    except (ValueError, TypeError, KeyError, AttributeError) as exc:
        raise InputFormatError(f"{name}: malformed JSON grid: {exc}") from None
    raise InputFormatError(f"{name}: JSON must describe an autocovariance grid or a field")


def load_grid(path: str | os.PathLike) -> AcfGrid | FieldGrid:
    """Read an autocovariance grid or a field from CSV or JSON.

    The kind is decided by the CSV header or the JSON keys.
    """
    name = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputFormatError(f"cannot read {name}: {exc}") from None
    if text.lstrip().startswith("{"):
        return _grid_from_json(text, name)
    if text.startswith("P2"):
        raise InputFormatError(f"{name}: graymaps are quantized; pass the CSV or JSON field instead")
    try:
        return _grid_from_csv(text, name)
    except csv.Error as exc:
        raise InputFormatError(f"{name}: {exc}") from None


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
