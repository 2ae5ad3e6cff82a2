"""Result tables and their CSV / JSON-lines serialization.

Floats go out with 17 significant digits so every value round-trips
exactly and identical inputs give byte-identical files. Writes land in a
temporary file that is renamed into place only on success.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field

from mcaoi import __version__
from mcaoi.simulator import RNG_ALGORITHM

SCHEMA_VERSION = "1"

SWEEP_COLUMNS = (
    "power_db", "num_subchannels", "block_len_opt", "gamma", "per",
    "avg_aoi", "bounded_aoi", "backend", "source", "seed",
)
SIMULATION_COLUMNS = (
    "power_db", "num_subchannels", "block_len", "gamma", "per",
    "time_avg_aoi", "time_second_moment", "empirical_variance",
    "empirical_bounded_aoi", "fraction_below", "total_time", "num_cycles",
    "analytic_avg_aoi", "analytic_bound", "backend", "source", "seed",
)
PARETO_COLUMNS = (
    "power_db", "num_subchannels", "avg_aoi", "bounded_aoi",
    "block_len_avg", "block_len_bounded", "backend", "source", "seed",
)


@dataclass(frozen=True)
class SimulationRecord:
    """One simulated operating point, with the analytic values alongside."""

    power_db: float
    num_subchannels: int
    block_len: int
    gamma: float
    per: float
    time_avg_aoi: float
    time_second_moment: float
    empirical_variance: float
    empirical_bounded_aoi: float
    fraction_below: float
    total_time: float
    num_cycles: int
    analytic_avg_aoi: float
    analytic_bound: float
    backend: str
    source: str
    seed: int


@dataclass(frozen=True)
class ParetoRecord:
    power_db: float
    num_subchannels: int
    avg_aoi: float
    bounded_aoi: float
    block_len_avg: int
    block_len_bounded: int
    backend: str
    source: str
    seed: int | None = None


@dataclass
class ResultTable:
    columns: tuple
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def build(cls, columns, rows, *, seed=None, backend=None, **extra):
        meta = {
            "seed": seed,
            "rng_algorithm": RNG_ALGORITHM,
            "backend": getattr(backend, "value", backend),
            "tool_version": __version__,
        }
        meta.update(extra)
        return cls(tuple(columns), list(rows), meta)


def format_value(value) -> str:
    if value is None:
        return ""
    if hasattr(value, "value"):  # enums
        return str(value.value)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def _row_dict(row) -> dict:
    if dataclasses.is_dataclass(row):
        return {f.name: getattr(row, f.name) for f in dataclasses.fields(row)}
    return dict(row)


def _json_value(value):
    if hasattr(value, "value"):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render(table: ResultTable, fmt: str = "csv") -> str:
    fmt = fmt.lower().replace("_", "-")
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            d = _row_dict(row)
            writer.writerow([format_value(d.get(c)) for c in table.columns])
    elif fmt in ("jsonl", "json-lines"):
        head = {"schema_version": table.schema_version, "metadata": table.metadata}
        buf.write(json.dumps(head, sort_keys=True) + "\n")
        for row in table.rows:
            d = {k: _json_value(v) for k, v in _row_dict(row).items()}
            buf.write(json.dumps(d, sort_keys=True) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}; use csv or jsonl")
    return buf.getvalue()


def atomic_write(path, text: str):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_results(table: ResultTable, fmt: str, path):
    """Serialize ``table`` to ``path`` as ``csv`` or ``jsonl``."""
    atomic_write(path, render(table, fmt))


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
