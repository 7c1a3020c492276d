"""Detector models for the emitted echo field."""

import numpy as np

from src.model.errors import PreconditionError
from src.model.schemas import Detection, EchoTrace

DEFAULT_LO_OFFSET = 2.0 * np.pi * 45e6


def detect(
    field: np.ndarray,
    times: np.ndarray,
    mode: Detection = "heterodyne",
    lo_offset: float | None = DEFAULT_LO_OFFSET,
    gain: float = 1.0,
    metadata: dict | None = None,
) -> EchoTrace:
    """Turn a complex field trace into detector output.

    Heterodyne detection mixes the field with a local oscillator offset by ``lo_offset``:
    the output gain·E·e^{iΔ_LO·t} beats at the offset and its envelope is gain·|E|. Direct
    detection records the intensity gain·|E|².

    Args:
        field: Complex field samples
        times: Sample instants (s)
        mode: ``heterodyne`` or ``direct``
        lo_offset: LO offset (rad/s), required for heterodyne
        gain: Detector gain
        metadata: Parameters carried into the trace header

    Returns:
        The detected trace

    Raises:
        PreconditionError: If heterodyne detection is requested without a positive offset
    """
    field = np.asarray(field, dtype=complex)
    times = np.asarray(times, dtype=float)
    if mode == "heterodyne":
        if lo_offset is None or not lo_offset > 0:
            raise PreconditionError(f"heterodyne detection needs lo_offset > 0, got {lo_offset!r}")
        amplitudes = gain * field * np.exp(1j * lo_offset * times)
        return EchoTrace(
            times=times,
            amplitudes=amplitudes,
            detection="heterodyne",
            lo_offset=lo_offset,
            metadata=metadata or {},
        )

    return EchoTrace(
        times=times,
        amplitudes=gain * np.abs(field) ** 2,
        detection="direct",
        metadata=metadata or {},
    )
