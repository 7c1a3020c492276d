"""Plain-text trace files.

A trace file is a block of ``#``-prefixed header lines followed by one sample per line,
whitespace separated. The header names the schema version, the trace type, the
columns with their units and a JSON echo of every non-array field, so ``read_trace``
rebuilds an object equal to the one that was written.

    # wgm-lab trace
    # schema_version: 1
    # type: sweep
    # columns: laser_detuning, transmission, branch_count
    # units: rad/s, dimensionless, count
    # parameters: {"direction": "forward", ...}

Sweep files carry three columns, so their units line lists three entries: detuning in
rad/s, transmission (dimensionless) and the branch count. Echo files list ``s`` for
time and ``arb`` for each amplitude column.
"""

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from src.model.errors import ConfigError
from src.model.schemas import EchoTrace, SweepTrace

logger = logging.getLogger(__name__)

TRACE_SCHEMA_VERSION = 1
MAGIC = "wgm-lab trace"
FLOAT_FORMAT = "%.17g"

Trace = EchoTrace | SweepTrace


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"metadata value of type {type(value).__name__} is not serialisable")


def _layout(trace: Trace) -> tuple[str, list[str], list[str], np.ndarray, dict[str, Any]]:
    if isinstance(trace, SweepTrace):
        columns = ["laser_detuning", "transmission", "branch_count"]
        units = ["rad/s", "dimensionless", "count"]
        data = np.column_stack(
            [trace.laser_detunings, trace.transmission, trace.branch_count.astype(float)]
        )
        parameters = {
            "direction": trace.direction,
            "drive_intensity": trace.drive_intensity,
            "metadata": trace.metadata,
        }
        return "sweep", columns, units, data, parameters

    if np.iscomplexobj(trace.amplitudes):
        columns = ["time", "amplitude_real", "amplitude_imag"]
        units = ["s", "arb", "arb"]
        data = np.column_stack([trace.times, trace.amplitudes.real, trace.amplitudes.imag])
    else:
        columns = ["time", "amplitude"]
        units = ["s", "arb"]
        data = np.column_stack([trace.times, trace.amplitudes])
    parameters = {
        "detection": trace.detection,
        "lo_offset": trace.lo_offset,
        "metadata": trace.metadata,
    }
    return "echo", columns, units, data, parameters


def emit_trace(trace: Trace, path: str | Path) -> Path:
    """Write a trace as delimited text with a self-describing header.

    Args:
        trace: Echo or sweep trace
        path: Destination file; parent directories are created

    Returns:
        The written path

    Raises:
        OSError: If the file cannot be written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    kind, columns, units, data, parameters = _layout(trace)
    header = "\n".join(
        [
            MAGIC,
            f"schema_version: {TRACE_SCHEMA_VERSION}",
            f"type: {kind}",
            f"columns: {', '.join(columns)}",
            f"units: {', '.join(units)}",
            f"parameters: {json.dumps(parameters, sort_keys=True, default=_json_default)}",
        ]
    )
    np.savetxt(path, data, fmt=FLOAT_FORMAT, header=header, comments="# ")
    logger.debug(f"Wrote {kind} trace with {data.shape[0]} samples to {path}")
    return path


def read_header(path: str | Path) -> dict[str, str]:
    """Key/value pairs of a trace file header."""
    header: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, sep, value = line[1:].strip().partition(": ")
            if sep:
                header[key] = value
    return header


def read_trace(path: str | Path) -> Trace:
    """Load a file written by ``emit_trace``.

    Raises:
        ConfigError: If the header is missing, of another schema version or unknown type
    """
    header = read_header(path)
    version = header.get("schema_version")
    if version is None or int(version) != TRACE_SCHEMA_VERSION:
        raise ConfigError(f"{path}: unsupported trace schema version {version!r}")
    columns = [c.strip() for c in header["columns"].split(",")]
    parameters = json.loads(header["parameters"])

    data = np.loadtxt(path, comments="#", ndmin=2, dtype=float)
    if data.size == 0:
        data = np.empty((0, len(columns)))
    values = dict(zip(columns, data.T, strict=True))

    kind = header.get("type")
    if kind == "sweep":
        return SweepTrace(
            laser_detunings=values["laser_detuning"],
            transmission=values["transmission"],
            branch_count=values["branch_count"].astype(np.int64),
            direction=parameters["direction"],
            drive_intensity=parameters["drive_intensity"],
            metadata=parameters["metadata"],
        )
    if kind == "echo":
        if "amplitude_imag" in values:
            amplitudes = np.empty(data.shape[0], dtype=complex)
            amplitudes.real, amplitudes.imag = values["amplitude_real"], values["amplitude_imag"]
        else:
            amplitudes = values["amplitude"]
        return EchoTrace(
            times=values["time"],
            amplitudes=amplitudes,
            detection=parameters["detection"],
            lo_offset=parameters["lo_offset"],
            metadata=parameters["metadata"],
        )
    raise ConfigError(f"{path}: unknown trace type {kind!r}")
