"""Tabular results with parameter provenance, written as CSV or JSON."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np


def _fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


@dataclass
class CurveTable:
    """Rectangular table of reals.

    Parameters
    ----------
    columns : list of (name, unit)
    rows : array_like, shape (n_rows, n_columns)
    meta : dict
        Everything needed to regenerate the table.
    """

    columns: list
    rows: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = [tuple(c) for c in self.columns]
        rows = np.asarray(self.rows, dtype=float)
        if rows.size == 0:
            rows = rows.reshape(0, len(self.columns))
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise ValueError(f"rows of shape {rows.shape} do not match {len(self.columns)} columns")
        self.rows = rows

    @property
    def names(self):
        return [c[0] for c in self.columns]

    def column(self, name) -> np.ndarray:
        return self.rows[:, self.names.index(name)]

    def to_csv(self) -> str:
        out = io.StringIO()
        for k in self.meta:
            out.write(f"# {k}: {_json_value(self.meta[k])}\n")
        out.write("# units: " + ",".join(u for _, u in self.columns) + "\n")
        out.write(",".join(self.names) + "\n")
        for row in self.rows:
            out.write(",".join(_fmt(v) for v in row) + "\n")
        return out.getvalue()

    def to_json(self) -> str:
        doc = {
            "meta": self.meta,
            "columns": [{"name": n, "unit": u} for n, u in self.columns],
            "rows": [[_json_float(v) for v in row] for row in self.rows],
        }
        return json.dumps(doc, indent=1, default=_json_default) + "\n"

    def render(self, fmt="csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def _json_float(v):
    v = float(v)
    return v if math.isfinite(v) else str(v)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _json_value(v):
    return json.dumps(v, default=_json_default)
