# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

"""Two-axis parameter scans and their CSV/JSON serialization."""

from __future__ import annotations

__all__ = ('AXIS_NAMES', 'CSV_COLUMNS', 'ScanModel', 'Axis', 'ScanGrid',
           'ScanRecord', 'resolve_threads', 'run_scan', 'scan_summary',
           'emit_csv', 'emit_json')

from typing import Dict, List, Mapping, Optional, Sequence
from dataclasses import dataclass, field
from pathlib import Path
import csv
import enum
import io
import json
import logging
import math
import multiprocessing
import os
import time

import numpy as np

from ._exceptions import QslError, ParameterError, QSL_EIO
from .qubit import EPS_POS, BlochState
from .engine import QuadratureConfig, QslResult
from .jc import JcParams, jc_qsl, jc_regime
from .dephasing import DephasingParams, dephasing_qsl

log = logging.getLogger(__name__)

AXIS_NAMES = ("gamma0", "lambda", "coherence", "sz", "eta", "s", "tau")

CSV_COLUMNS = (
    "model", "axis1_name", "axis1_value", "axis2_name", "axis2_value",
    "lambda", "gamma0", "eta", "s", "coherence", "sz", "tau",
    "theta", "purity0", "lambda_op", "lambda_hs", "lambda_tr",
    "tau_qsl_op", "tau_qsl_hs", "tau_qsl_tr", "tau_qsl_unified",
    "clamped", "degenerate", "infeasible", "regime",
)

_PARAM_COLUMNS  = ("lambda", "gamma0", "eta", "s", "coherence", "sz", "tau")
_RESULT_COLUMNS = ("theta", "purity0", "lambda_op", "lambda_hs", "lambda_tr",
                   "tau_qsl_op", "tau_qsl_hs", "tau_qsl_tr", "tau_qsl_unified",
                   "clamped", "degenerate")


class ScanModel(enum.Enum):
    JC        = "jc"
    DEPHASING = "dephasing"


_REQUIRED = {
    ScanModel.JC:        ("lambda", "gamma0", "coherence", "sz", "tau"),
    ScanModel.DEPHASING: ("eta", "s", "coherence", "sz", "tau"),
}
_OPTIONAL = {
    ScanModel.JC:        ("phase", "omega0"),
    ScanModel.DEPHASING: ("phase", "omega_c", "temperature"),
}


@dataclass(frozen=True)
class Axis:
    """``count`` points from ``lo`` to ``hi``; geometric spacing if ``log``."""

    name: str
    lo: float
    hi: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ParameterError(f"unknown scan axis {self.name!r} "
                                 f"(choose from {', '.join(AXIS_NAMES)})")
        if int(self.count) != self.count or self.count < 2:
            raise ParameterError(f"axis {self.name} needs an integer count >= 2, "
                                 f"got {self.count}")
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ParameterError(f"axis {self.name} range [{self.lo}, {self.hi}] is invalid")
        if self.log and (self.name != "gamma0" or lo <= 0.0):
            raise ParameterError("log spacing is available for a positive gamma0 axis only")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def parse(cls, text: str, log: bool = False) -> Axis:
        """Parse ``name:min:max:count``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ParameterError(f"axis {text!r} is not of the form name:min:max:count")
        name, lo, hi, count = parts
        try:
            return cls(name.strip(), float(lo), float(hi), int(count), log=log)
        except ValueError as exc:
            if isinstance(exc, QslError): raise
            raise ParameterError(f"axis {text!r}: {exc}") from None

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def to_dict(self):
        return dict(name=self.name, min=self.lo, max=self.hi,
                    count=self.count, log=self.log)


@dataclass(frozen=True)
class ScanGrid:
    """A rectangular scan: two axes plus the fixed model parameters."""

    model: ScanModel
    axis1: Axis
    axis2: Axis
    fixed: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        model = ScanModel(self.model)
        object.__setattr__(self, "model", model)
        if self.axis1.name == self.axis2.name:
            raise ParameterError(f"both scan axes are {self.axis1.name!r}")
        allowed = set(_REQUIRED[model]) | set(_OPTIONAL[model])
        axes = {self.axis1.name, self.axis2.name}
        for name in axes:
            if name not in allowed:
                raise ParameterError(f"axis {name!r} is not a parameter of the "
                                     f"{model.value} model")
        fixed = {}
        for name, value in self.fixed.items():
            if value is None:
                continue
            if name not in allowed:
                raise ParameterError(f"{name!r} is not a parameter of the "
                                     f"{model.value} model")
            if name in axes:
                raise ParameterError(f"{name!r} is both a scan axis and a fixed parameter")
            fixed[name] = float(value)
        missing = [name for name in _REQUIRED[model] if name not in axes and name not in fixed]
        if missing:
            raise ParameterError(f"{model.value} scan is missing {', '.join(missing)}")
        object.__setattr__(self, "fixed", fixed)

    @property
    def shape(self):
        return (self.axis1.count, self.axis2.count)

    def cells(self):
        """Parameter dicts in row-major (axis1, axis2) order."""
        for v1 in self.axis1.values():
            for v2 in self.axis2.values():
                params = dict(self.fixed)
                params[self.axis1.name] = float(v1)
                params[self.axis2.name] = float(v2)
                yield float(v1), float(v2), params

    def to_dict(self):
        return dict(model=self.model.value,
                    axis1=self.axis1.to_dict(), axis2=self.axis2.to_dict(),
                    fixed=dict(self.fixed))


@dataclass(frozen=True)
class ScanRecord:
    """One grid cell: its inputs, the result (if any) and the cell flags."""

    model: str
    axis1_name: str
    axis1_value: float
    axis2_name: str
    axis2_value: float
    params: Dict[str, float]
    result: Optional[QslResult] = None
    infeasible: bool = False
    regime: Optional[str] = None
    error: Optional[str] = None

    @property
    def feasible(self) -> bool:
        return not self.infeasible

    def to_row(self) -> Dict[str, object]:
        """Typed values keyed (and ordered) by :data:`CSV_COLUMNS`."""
        row: Dict[str, object] = dict(model=self.model,
                                      axis1_name=self.axis1_name,
                                      axis1_value=self.axis1_value,
                                      axis2_name=self.axis2_name,
                                      axis2_value=self.axis2_value)
        for name in _PARAM_COLUMNS:
            row[name] = self.params.get(name)
        result = self.result.to_dict() if self.result is not None else {}
        for name in _RESULT_COLUMNS:
            row[name] = result.get(name)
        row["infeasible"] = self.infeasible
        row["regime"] = self.regime
        return row


def _evaluate(model: ScanModel, params: Mapping[str, float], quad: QuadratureConfig):
    coherence, sz = params["coherence"], params["sz"]
    s0 = BlochState.from_coherence(coherence, sz, params.get("phase", 0.0))
    if model is ScanModel.JC:
        p = JcParams(lam=params["lambda"], gamma0=params["gamma0"],
                     omega0=params.get("omega0", 1.0))
        return jc_qsl(p, s0, params["tau"], quad)
    p = DephasingParams(eta=params["eta"], s=params["s"],
                        omega_c=params.get("omega_c", 1.0),
                        temperature=params.get("temperature", 0.0))
    return dephasing_qsl(p, s0, params["tau"], quad)


def _scan_cell(task) -> ScanRecord:
    model, axis1_name, v1, axis2_name, v2, params, quad = task
    regime = None
    if model is ScanModel.JC:
        try:
            regime = jc_regime(JcParams(lam=params["lambda"],
                                        gamma0=params["gamma0"])).value
        except ParameterError:
            pass
    record = dict(model=model.value, axis1_name=axis1_name, axis1_value=v1,
                  axis2_name=axis2_name, axis2_value=v2, params=params, regime=regime)
    if params["coherence"]**2 + params["sz"]**2 > 1.0 + EPS_POS:
        return ScanRecord(infeasible=True, **record)
    try:
        result = _evaluate(model, params, quad)
    except QslError as exc:
        log.warning("scan cell %s=%.17g, %s=%.17g failed: %s",
                    axis1_name, v1, axis2_name, v2, exc)
        return ScanRecord(error=str(exc), **record)
    return ScanRecord(result=result, **record)


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: argument, else QSLKIT_THREADS, else config; 0 means all CPUs."""
    if threads is None:
        value = os.environ.get("QSLKIT_THREADS")
        if value is None or not value.strip():
            from .__config__ import config
            value = config.get("THREADS", "0")
        try:
            threads = int(value)
        except ValueError:
            raise ParameterError(f"thread count {value!r} is not an integer") from None
    if threads < 0:
        raise ParameterError(f"thread count must be >= 0, got {threads}")
    return threads or (os.cpu_count() or 1)


def run_scan(grid: ScanGrid, quad: Optional[QuadratureConfig] = None,
             threads: Optional[int] = None) -> List[ScanRecord]:
    """Evaluate every grid cell; output is row-major whatever the parallelism."""
    if quad is None:
        quad = QuadratureConfig.from_config()
    tasks = [(grid.model, grid.axis1.name, v1, grid.axis2.name, v2, params, quad)
             for v1, v2, params in grid.cells()]
    workers = min(resolve_threads(threads), len(tasks))
    start = time.perf_counter()
    if workers <= 1:
        records = [_scan_cell(task) for task in tasks]
    else:
        with multiprocessing.Pool(workers) as pool:
            records = pool.map(_scan_cell, tasks,
                               chunksize=max(1, len(tasks) // (4 * workers)))
    log.info("%s scan: %d cells on %d worker(s) in %.3f s",
             grid.model.value, len(records), workers, time.perf_counter() - start)
    return records


def scan_summary(records: Sequence[ScanRecord], elapsed: float) -> str:
    feasible = [rec for rec in records if rec.result is not None]
    line = f"cells={len(records)} feasible={len(feasible)}"
    if feasible:
        values = [rec.result.tau_qsl_unified for rec in feasible]
        line += f" tau_qsl_min={min(values):.6g} tau_qsl_max={max(values):.6g}"
    return line + f" wall={elapsed:.3f}s"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write(data: bytes, destination) -> int:
    try:
        if isinstance(destination, (str, os.PathLike)):
            Path(destination).write_bytes(data)
        else:
            if isinstance(destination, io.TextIOBase):
                destination.write(data.decode("utf-8"))
            else:
                destination.write(data)
            if hasattr(destination, "flush"): destination.flush()
    except OSError as exc:
        raise QslError(f"cannot write {destination}: {exc.strerror or exc}",
                       error=QSL_EIO) from None
    return len(data)


def emit_csv(records: Sequence[ScanRecord], destination) -> int:
    """Header plus one LF-terminated line per record; returns bytes written.

    ``destination`` is a path, a binary stream or a text stream.
    """
    if not records:
        raise ParameterError("no scan records to write")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        row = record.to_row()
        writer.writerow([_csv_cell(row[name]) for name in CSV_COLUMNS])
    return _write(buffer.getvalue().encode("utf-8"), destination)


def emit_json(records: Sequence[ScanRecord], destination,
              grid: Optional[ScanGrid] = None,
              quad: Optional[QuadratureConfig] = None) -> int:
    """Records as an array of objects inside a metadata envelope."""
    from .__about__ import __version__
    if not records:
        raise ParameterError("no scan records to write")
    rows = []
    for record in records:
        row = record.to_row()
        if record.error is not None:
            row["error"] = record.error
        rows.append(row)
    document = dict(tool="qslkit", version=__version__,
                    model=records[0].model,
                    grid=grid.to_dict() if grid is not None else None,
                    quadrature=quad.to_dict() if quad is not None else None,
                    records=rows)
    text = json.dumps(document, indent=1, allow_nan=False) + "\n"
    return _write(text.encode("utf-8"), destination)
