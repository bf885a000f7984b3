"""
Comma separated and JSON record tables.

Numbers are written with 12 significant digits, booleans as true/false and
missing values as empty cells (null in JSON).
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

from isac_drt.constants import format_number
from isac_drt.io.exceptions import TableFormatError
from isac_drt.tradeoff.front import DesignGrid

Row = Mapping[str, object]
PathLike = Union[str, Path]

FORMATS = ("csv", "json")


def _columns(rows: Sequence[Row]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def _csv_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return format_number(value)
    return str(value)


def _json_value(value: object) -> object:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return format_number(value)
        return float(format_number(value))
    return str(value)


def format_table(
    rows: Sequence[Row], fmt: str = "csv", columns: Optional[Sequence[str]] = None
) -> str:
    """
    Renders records as a table

    Parameters
    ----------
    rows: Sequence[Row]
        Records, the column order follows the first appearance of each key
    fmt: str
        "csv" or "json"
    columns: Optional[Sequence[str]]
        Header used when there are no rows to infer it from

    Returns
    -------
    str
        Table text
    """
    if fmt not in FORMATS:
        raise TableFormatError(f"Unknown table format {fmt!r}")
    if rows or columns is None:
        columns = _columns(rows)
    if fmt == "json":
        records = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return json.dumps(records, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    return buffer.getvalue()


def write_table(
    rows: Sequence[Row],
    path: PathLike,
    fmt: str = "csv",
    columns: Optional[Sequence[str]] = None,
) -> Path:
    """
    Writes records to a file and returns its path
    """
    target = Path(path)
    target.write_text(format_table(rows, fmt, columns), encoding="utf-8")
    return target


def _parse_cell(cell: str) -> object:
    if cell == "":
        return None
    if cell in ("true", "false"):
        return cell == "true"
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_table(path: PathLike, fmt: Optional[str] = None) -> List[Dict[str, object]]:
    """
    Reads a table written by `write_table`, the format defaults to the file
    suffix

    Raises
    ------
    TableFormatError
        If the file is not a table of records
    """
    source = Path(path)
    if fmt is None:
        fmt = "json" if source.suffix.lower() == ".json" else "csv"
    text = source.read_text(encoding="utf-8")
    if fmt == "json":
        try:
            records = json.loads(text)
        except json.JSONDecodeError as err:
            raise TableFormatError(f"{source}: {err}") from err
        if not isinstance(records, list) or not all(
            isinstance(r, dict) for r in records
        ):
            raise TableFormatError(f"{source}: expected a list of records")
        return records
    if fmt != "csv":
        raise TableFormatError(f"Unknown table format {fmt!r}")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration as err:
        raise TableFormatError(f"{source}: missing header row") from err
    rows: List[Dict[str, object]] = []
    for line, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(header):
            raise TableFormatError(
                f"{source}:{line}: expected {len(header)} cells, got {len(cells)}"
            )
        rows.append({h: _parse_cell(c) for h, c in zip(header, cells)})
    return rows


def read_design_grid(path: PathLike, fmt: Optional[str] = None) -> DesignGrid:
    """
    Reads a design grid from records with the columns design_id, cost, perf
    """
    rows = read_table(path, fmt)
    records = []
    for index, row in enumerate(rows):
        missing = [c for c in ("design_id", "cost", "perf") if row.get(c) is None]
        if missing:
            raise TableFormatError(f"Record {index} lacks the columns {missing}")
        cost, perf = row["cost"], row["perf"]
        if not isinstance(cost, (int, float)) or not isinstance(perf, (int, float)):
            raise TableFormatError(f"Record {index} has non numeric cost or perf")
        records.append((row["design_id"], float(cost), float(perf)))
    return DesignGrid.from_records(records)
