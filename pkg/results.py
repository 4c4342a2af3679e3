"""
ElimPy Result Files

CSV data files whose first line is `#` followed by a compact JSON manifest
(config echo, engine version, wall time, convergence flags, notes). Numbers
are written with 17 significant digits so a file read back is bit-identical
to what was computed. Files are written to a temporary name and renamed.
"""

import csv
import io
import json
import logging
from pathlib import Path

from utilities import ENGINE_VERSION, format_number, to_plain

logger = logging.getLogger("elimpy.results")


def _atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = Path(str(path) + "_")
    with temp_path.open("w", encoding="utf-8", newline="") as f:
        f.write(text)
    temp_path.replace(path)
    logger.info("Wrote %s", path)
    return path


def _cell(value):
    if isinstance(value, str):
        return value
    return format_number(value)


def build_manifest(config=None, **extra):
    manifest = {"engine_version": ENGINE_VERSION}
    if config is not None:
        manifest["config"] = config
    manifest.update(extra)
    return to_plain(manifest)


def write_result(path, columns, rows, manifest):
    """
    Write a CSV result file.

    :param path: Destination file.
    :param columns: Column names, in order.
    :param rows: Iterable of mappings keyed by column name; missing keys
                 become empty cells.
    :param manifest: JSON-serializable mapping for the header line.
    :return: Path written.
    """
    buffer = io.StringIO()
    buffer.write("#" + json.dumps(to_plain(manifest), sort_keys=True,
                                  separators=(",", ":")) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(column)) for column in columns])
    return _atomic_write(path, buffer.getvalue())


def _parse_cell(text):
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        return text


def read_result(path):
    """
    Read a CSV result file back.

    :return: Tuple (manifest, columns, rows) where rows are dicts of floats,
             None for empty cells and strings for text cells.
    """
    with Path(path).open(encoding="utf-8", newline="") as f:
        first = f.readline()
        if not first.startswith("#"):
            raise ValueError("{} has no manifest line.".format(path))
        manifest = json.loads(first[1:])
        reader = csv.reader(f)
        columns = next(reader)
        rows = [dict(zip(columns, map(_parse_cell, line)))
                for line in reader if line]
    return manifest, columns, rows


def write_json_result(path, document, manifest):
    """
    Structured result document with the manifest under "manifest".
    Floats keep full precision through json's repr.
    """
    payload = {"manifest": to_plain(manifest)}
    payload.update(to_plain(document))
    text = json.dumps(payload, sort_keys=True, indent=4,
                      separators=(",", ": "), ensure_ascii=False)
    return _atomic_write(path, text + "\n")


def read_json_result(path):
    with Path(path).open(encoding="utf-8") as f:
        return json.load(f)
