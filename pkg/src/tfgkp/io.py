"""Result tables with a provenance header, written as CSV or JSON."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__


def config_hash(config_json: str) -> str:
    return hashlib.sha256(config_json.encode("utf-8")).hexdigest()


def fmt_float(x) -> str:
    """17 significant digits: parsing the text gives back the same double."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row of length {len(r)} does not match {len(self.columns)} columns")

    @classmethod
    def from_columns(cls, data: dict, provenance: dict | None = None):
        cols = list(data)
        arrays = [np.ravel(np.asarray(data[c])) if not isinstance(data[c], list) else data[c]
                  for c in cols]
        n = {len(a) for a in arrays}
        if len(n) > 1:
            raise ValueError("columns have different lengths")
        rows = [list(r) for r in zip(*arrays)]
        return cls(cols, rows, dict(provenance or {}))

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([r[j] for r in self.rows])


def provenance(config_json: str, scenario: str) -> dict:
    return {"artifact_version": __version__, "config_sha256": config_hash(config_json),
            "scenario": scenario}


def emit(table: ResultTable, path, fmt: str = "csv") -> Path:
    """Write ``table``; CSV carries the provenance as leading '# key: value' lines."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            with open(path, "w", newline="", encoding="utf-8") as fh:
                for k, v in table.provenance.items():
                    fh.write(f"# {k}: {v}\n")
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(table.columns)
                for r in table.rows:
                    w.writerow([fmt_float(v) for v in r])
        elif fmt == "json":
            doc = {"provenance": table.provenance,
                   "columns": {c: [_json_value(r[j]) for r in table.rows]
                               for j, c in enumerate(table.columns)}}
            text = json.dumps(doc, indent=1)
            path.write_text(text + "\n", encoding="utf-8", newline="\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _json_value(v):
    if isinstance(v, (str, bool)):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    # json writes repr(float), which already round-trips exactly
    return float(v)


def _parse(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def read_table(path) -> ResultTable:
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text(encoding="utf-8"))
        cols = list(doc["columns"])
        rows = [list(r) for r in zip(*(doc["columns"][c] for c in cols))]
        return ResultTable(cols, rows, doc.get("provenance", {}))
    prov = {}
    with open(path, newline="", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    body = []
    for line in lines:
        if line.startswith("# ") and not body:
            k, _, v = line[2:].partition(": ")
            prov[k] = v
        elif line:
            body.append(line)
    reader = csv.reader(body)
    cols = next(reader)
    rows = [[_parse(x) for x in r] for r in reader]
    return ResultTable(cols, rows, prov)
