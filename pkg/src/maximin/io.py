"""CSV/JSON ingestion and emission.

Files use 1-based observation indices; in-memory objects are 0-based, with
the conversion happening exactly once here.  Fit artifacts are canonical
JSON: sorted keys and 17-significant-digit reals, so identical fits produce
byte-identical files and round-trips restore bit-equal values.  Series are
CSV with columns (t, cumsum).  CSV is RFC-4180-style, UTF-8, '.' decimal.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .exceptions import (
    IoError,
    MissingColumn,
    ParseError,
    RaggedRows,
    ValidationError,
)
from .grouping import groups_from_labels
from .model import Dataset, GroupSpec, MaximinFit, SupportSet
from .variance import SeriesReport


def _canonical(value) -> str:
    """Canonical JSON: sorted keys, floats at 17 significant digits."""
    if isinstance(value, dict):
        items = sorted(value.items())
        inner = ",".join(f"{json.dumps(k)}:{_canonical(v)}" for k, v in items)
        return "{" + inner + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ",".join(_canonical(v) for v in value) + "]"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise IoError(f"cannot serialize non-finite value {v!r}")
        return format(v, ".17g")
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    raise IoError(f"cannot serialize {type(value).__name__}")


def canonical_json(value) -> str:
    return _canonical(value) + "\n"


def write_fit(fit: MaximinFit, path, groups: GroupSpec | None = None) -> None:
    """Persist a fit as canonical JSON; optionally embed its group layout
    (1-based indices) so downstream evaluation can rebuild per-group scores."""
    doc = {
        "beta": list(fit.beta),
        "scale": fit.scale,
        "group_v": list(fit.group_V),
        "iterations": fit.iterations,
        "converged": bool(fit.converged),
    }
    if groups is not None:
        doc["groups"] = [[int(i) + 1 for i in g] for g in groups.groups]
        doc["replacement"] = groups.replacement
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(canonical_json(doc))
    except OSError as exc:
        raise IoError(str(exc)) from exc


def read_fit(path) -> tuple[MaximinFit, GroupSpec | None]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise IoError(f"{path}: not valid JSON ({exc})") from exc
    try:
        fit = MaximinFit(
            beta=np.asarray(doc["beta"], dtype=np.float64),
            group_V=np.asarray(doc["group_v"], dtype=np.float64),
            scale=float(doc["scale"]),
            iterations=int(doc["iterations"]),
            converged=bool(doc["converged"]),
        )
    except KeyError as exc:
        raise IoError(f"{path}: missing fit field {exc}") from exc
    spec = None
    if "groups" in doc:
        groups = tuple(np.asarray(g, dtype=np.int64) - 1 for g in doc["groups"])
        spec = GroupSpec(groups=groups,
                         replacement=doc.get("replacement", "partition"))
    return fit, spec


def write_series(report: SeriesReport, path) -> None:
    """CSV with header (t, cumsum); t counts observations from 1."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "cumsum"])
            for t, value in enumerate(report.cumsum, start=1):
                writer.writerow([t, format(float(value), ".17g")])
    except OSError as exc:
        raise IoError(str(exc)) from exc


def read_series(path) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return np.array([float(r[1]) for r in rows[1:]], dtype=np.float64)


def read_csv(path, has_header: bool = True, y_column: str = "y",
             group_column: str | None = None,
             standardize: bool = False) -> tuple[Dataset, GroupSpec | None]:
    """Load a rectangular numeric table into a Dataset.

    The named column becomes Y; every remaining column (except the group
    column, if any) becomes a predictor.  Without a header, columns are
    addressed by 1-based position as strings ("1", "2", ...).  The group
    column may hold arbitrary labels and feeds the label partition.
    ``standardize`` centers each predictor column and scales it to unit
    biased variance.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError(str(exc)) from exc
    rows = [r for r in rows if r]
    if not rows:
        raise RaggedRows(f"{path}: empty table")

    if has_header:
        header = [h.strip() for h in rows[0]]
        data_rows = rows[1:]
        first_line = 2
    else:
        header = [str(i + 1) for i in range(len(rows[0]))]
        data_rows = rows
        first_line = 1
    if not data_rows:
        raise RaggedRows(f"{path}: no data rows")

    width = len(header)
    for offset, row in enumerate(data_rows):
        if len(row) != width:
            raise RaggedRows(
                f"{path}: row {first_line + offset} has {len(row)} cells, expected {width}")

    if y_column not in header:
        raise MissingColumn(f"{path}: no column named {y_column!r}")
    y_pos = header.index(y_column)
    group_pos = None
    if group_column is not None:
        if group_column not in header:
            raise MissingColumn(f"{path}: no column named {group_column!r}")
        group_pos = header.index(group_column)
        if group_pos == y_pos:
            raise ValidationError("y_column and group_column must differ")
    x_pos = [j for j in range(width) if j != y_pos and j != group_pos]
    if not x_pos:
        raise MissingColumn(f"{path}: no predictor columns remain")

    n = len(data_rows)
    X = np.empty((n, len(x_pos)))
    Y = np.empty(n)
    labels = [] if group_pos is not None else None
    for i, row in enumerate(data_rows):
        for k, j in enumerate(x_pos):
            try:
                X[i, k] = float(row[j])
            except ValueError:
                raise ParseError(first_line + i, j + 1,
                                 f"not a number: {row[j]!r}") from None
        try:
            Y[i] = float(row[y_pos])
        except ValueError:
            raise ParseError(first_line + i, y_pos + 1,
                             f"not a number: {row[y_pos]!r}") from None
        if labels is not None:
            labels.append(row[group_pos])

    if standardize:
        X = X - X.mean(axis=0)
        sd = np.sqrt((X * X).mean(axis=0))
        if np.any(sd == 0.0):
            dead = [header[x_pos[k]] for k in np.where(sd == 0.0)[0]]
            raise ValidationError(f"constant predictor column(s): {dead}")
        X = X / sd

    dataset = Dataset(X=X, Y=Y)
    spec = groups_from_labels(np.array(labels)) if labels is not None else None
    return dataset, spec


def write_csv_dataset(dataset: Dataset, path, labels=None) -> None:
    """Emit a dataset as (y, x1..xp[, group]) rows."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            head = ["y"] + [f"x{j + 1}" for j in range(dataset.p)]
            if labels is not None:
                head.append("group")
            writer.writerow(head)
            for i in range(dataset.n):
                row = [format(float(dataset.Y[i]), ".17g")]
                row += [format(float(v), ".17g") for v in dataset.X[i]]
                if labels is not None:
                    row.append(str(labels[i]))
                writer.writerow(row)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def write_support(support: SupportSet, path, extra: dict | None = None) -> None:
    doc = {"points": [list(row) for row in support.points],
           "sigma": [list(row) for row in support.sigma]}
    if extra:
        doc.update(extra)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(canonical_json(doc))
    except OSError as exc:
        raise IoError(str(exc)) from exc


def read_support(path, sigma=None) -> SupportSet:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise IoError(f"{path}: not valid JSON ({exc})") from exc
    if "points" not in doc:
        raise MissingColumn(f"{path}: support file needs a 'points' entry")
    points = np.asarray(doc["points"], dtype=np.float64)
    if sigma is None:
        if "sigma" in doc:
            sigma = np.asarray(doc["sigma"], dtype=np.float64)
        else:
            sigma = np.eye(points.shape[1])
    return SupportSet(points=points, sigma=sigma)


def read_matrix_csv(path) -> np.ndarray:
    """A bare numeric matrix, no header."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if not rows:
        raise RaggedRows(f"{path}: empty matrix")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRows(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise ParseError(i + 1, j + 1, f"not a number: {cell!r}") from None
    return out
