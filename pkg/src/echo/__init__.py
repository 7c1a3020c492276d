"""Photon-echo simulation for an inhomogeneously broadened two-level ensemble."""

from src.echo.bloch import free_evolution, propagate_bloch, rotate
from src.echo.detection import DEFAULT_LO_OFFSET, detect
from src.echo.ensemble import detuning_grid, detuning_span, echo_sample_step
from src.echo.schemas import (
    AreaScanResult,
    BlochTrajectories,
    EchoSeries,
    EnsembleSpec,
    SequenceTemplate,
)
from src.echo.sequences import (
    accumulated_decay,
    echo_area_scan,
    echo_centroid,
    grating_contrast,
    hard_pulse_warning,
    simulate_accumulated_echo,
    simulate_three_pulse_echo,
    simulate_two_pulse_echo,
    three_pulse_decay,
    two_pulse_decay,
)

__all__ = [
    "DEFAULT_LO_OFFSET",
    "AreaScanResult",
    "BlochTrajectories",
    "EchoSeries",
    "EnsembleSpec",
    "SequenceTemplate",
    "accumulated_decay",
    "detect",
    "detuning_grid",
    "detuning_span",
    "echo_area_scan",
    "echo_centroid",
    "echo_sample_step",
    "free_evolution",
    "grating_contrast",
    "hard_pulse_warning",
    "propagate_bloch",
    "rotate",
    "simulate_accumulated_echo",
    "simulate_three_pulse_echo",
    "simulate_two_pulse_echo",
    "three_pulse_decay",
    "two_pulse_decay",
]
