"""CSV/TSV readers and writers shared by the simulator, metrics, and CLI.

Datasets are comma-separated with a header row of node names V1..Vp and no
index column.  Edge lists are tab-separated `source<TAB>target<TAB>value`
lines with 1-based node indices and no header.  Numbers are printed with 17
significant digits so a write/read round trip is exact, and every writer goes
through a temp-file-plus-rename so interrupted runs never leave partial files.
"""

from __future__ import annotations

import csv
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import MalformedCsvError, MalformedEdgeListError
from .model import Dataset


def format_float(x: float) -> str:
    return f"{x:.17g}"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_dataset_csv(ds: Dataset, path) -> None:
    header = ",".join(f"V{j + 1}" for j in range(ds.p))
    rows = "\n".join(",".join(format_float(v) for v in row) for row in ds.X)
    atomic_write_text(path, header + "\n" + rows + "\n")


def read_dataset_csv(path) -> Dataset:
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedCsvError(f"{path}: empty file") from None
        width = len(header)
        if width < 2:
            raise MalformedCsvError(f"{path}: expected at least 2 columns", row=1)
        rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != width:
                raise MalformedCsvError(
                    f"{path}: expected {width} columns, found {len(row)}", row=line_no
                )
            values = []
            for col_no, cell in enumerate(row, start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise MalformedCsvError(
                        f"{path}: non-numeric cell {cell!r}", row=line_no, column=col_no
                    ) from None
            rows.append(values)
    if not rows:
        raise MalformedCsvError(f"{path}: no data rows")
    return Dataset(np.array(rows))


def write_edges_tsv(edges, path) -> None:
    """Write (source, target, value) triples, one per line, 1-based indices."""
    lines = "".join(f"{s}\t{t}\t{format_float(v)}\n" for s, t, v in edges)
    atomic_write_text(path, lines)


def read_edges_tsv(path) -> list[tuple[int, int, float]]:
    """Parse and validate an edge-list TSV; rejects self-loops, duplicate pairs,
    and non-positive or non-integer indices, reporting the offending line."""
    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    with open(path, "r") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise MalformedEdgeListError(
                    f"{path}: expected 3 tab-separated fields, found {len(fields)}", line=line_no
                )
            try:
                source, target = int(fields[0]), int(fields[1])
            except ValueError:
                raise MalformedEdgeListError(
                    f"{path}: non-integer node index", line=line_no
                ) from None
            try:
                value = float(fields[2])
            except ValueError:
                raise MalformedEdgeListError(
                    f"{path}: non-numeric value {fields[2]!r}", line=line_no
                ) from None
            if source < 1 or target < 1:
                raise MalformedEdgeListError(f"{path}: node indices are 1-based", line=line_no)
            if source == target:
                raise MalformedEdgeListError(f"{path}: self-loop on node {source}", line=line_no)
            if (source, target) in seen:
                raise MalformedEdgeListError(
                    f"{path}: duplicate edge {source}->{target}", line=line_no
                )
            seen.add((source, target))
            edges.append((source, target, value))
    return edges
