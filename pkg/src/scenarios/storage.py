"""Output directory of one scenario run.

Traces, the text table, the field profile and the JSON report of a run all land in one
directory. Writes into the same directory are serialized by a per-directory lock, so
concurrent steps never interleave files.
"""

import logging
import shutil
import threading
from collections import defaultdict
from pathlib import Path

import numpy as np

from src.config.settings import settings
from src.scenarios.schemas import TraceFile
from src.scenarios.traces import FLOAT_FORMAT, Trace, emit_trace

logger = logging.getLogger(__name__)

_LOCKS: defaultdict[Path, threading.Lock] = defaultdict(threading.Lock)
_LOCKS_GUARD = threading.Lock()


def _directory_lock(path: Path) -> threading.Lock:
    with _LOCKS_GUARD:
        return _LOCKS[path.resolve()]


class OutputStore:
    """Files of a scenario run under one output directory.

    Paths recorded in reports are relative to ``root`` so that a report stays valid when
    the directory is moved.
    """

    def __init__(self, root: str | Path | None = None):
        """Initialize the store.

        Args:
            root: Output directory (default from settings)
        """
        self.root = Path(root or settings.output_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = _directory_lock(self.root)

    def path_for(self, name: str) -> Path:
        return self.root / name

    def write_trace(self, name: str, trace: Trace, step: str) -> TraceFile:
        """Write a trace file ``<name>.dat`` and return its manifest entry."""
        filename = f"{name}.dat"
        with self._lock:
            emit_trace(trace, self.path_for(filename))
        kind = "sweep" if hasattr(trace, "laser_detunings") else "echo"
        samples = trace.laser_detunings.size if kind == "sweep" else trace.times.size
        return TraceFile(path=filename, kind=kind, samples=int(samples), step=step)

    def write_columns(
        self, name: str, columns: dict[str, np.ndarray], units: dict[str, str]
    ) -> Path:
        """Plot-ready numeric columns with a one-line name/unit header."""
        header = ", ".join(f"{key} [{units[key]}]" for key in columns)
        path = self.path_for(name)
        data = np.column_stack(list(columns.values()))
        with self._lock:
            np.savetxt(path, data, fmt=FLOAT_FORMAT, header=header)
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.path_for(name)
        with self._lock:
            path.write_text(text, encoding="utf-8")
        logger.debug(f"Wrote {path}")
        return path

    def copy_to(self, name: str, destination: str | Path) -> str:
        """Copy a file of this run elsewhere (e.g. a user-chosen profile path).

        Returns:
            Destination path
        """
        destination = Path(destination)
        destination.parent.mkdir(parents=True, exist_ok=True)
        with self._lock:
            shutil.copy2(self.path_for(name), destination)
        return str(destination)
