"""Hard-pulse propagation of the optical Bloch equations for a detuning-class ensemble.

Each class carries the coherence c = u + iv and the inversion w. Pulses are instantaneous
rotations applied at their centres; between pulses every class precesses at its detuning
and relaxes with 1/T2 (coherence) and 1/T1 (inversion towards w = −1). Both steps have
closed forms, so the state at any sample time follows from the last pulse exactly.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np

from src.echo.ensemble import detuning_grid, detuning_span
from src.echo.schemas import BlochTrajectories, EnsembleSpec
from src.model.errors import PreconditionError, PulseOverlapError, SamplingError
from src.model.schemas import Pulse

logger = logging.getLogger(__name__)

HARD_PULSE_LIMIT = 1.0


def rotate(
    coherence: np.ndarray, population: np.ndarray, area: float, phase: np.ndarray | float
) -> tuple[np.ndarray, np.ndarray]:
    """Rotate Bloch vectors by ``area`` about the equatorial axis at angle ``phase``.

    Args:
        coherence: c = u + iv per class
        population: w per class
        area: Rotation angle Θ (rad)
        phase: Axis angle φ (rad), scalar or per class

    Returns:
        (c', w') after the rotation
    """
    cos_a, sin_a = math.cos(area), math.sin(area)
    axis = np.exp(1j * phase)
    new_coherence = (
        coherence * (1.0 + cos_a) / 2.0
        + np.conj(coherence) * axis**2 * (1.0 - cos_a) / 2.0
        - 1j * population * sin_a * axis
    )
    new_population = np.imag(coherence * np.conj(axis)) * sin_a + population * cos_a
    return new_coherence, new_population


def free_evolution(
    coherence: np.ndarray,
    population: np.ndarray,
    detunings: np.ndarray,
    elapsed: np.ndarray,
    t1: float,
    t2: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Bloch vectors after ``elapsed`` seconds of free precession and relaxation.

    ``elapsed`` may be a vector, in which case the result has shape
    (len(elapsed), n_classes).
    """
    elapsed = np.asarray(elapsed, dtype=float)[..., None]
    coherence_out = coherence * np.exp(-1j * detunings * elapsed - elapsed / t2)
    population_out = -1.0 + (population + 1.0) * np.exp(-elapsed / t1)
    return coherence_out, np.broadcast_to(population_out, coherence_out.shape)


def check_pulses(pulses: Sequence[Pulse]) -> list[Pulse]:
    """Pulses sorted by start time.

    Raises:
        PulseOverlapError: If a pulse starts before the previous one has ended
    """
    ordered = sorted(pulses, key=lambda p: p.start)
    for first, second in zip(ordered, ordered[1:]):
        if second.start < first.end:
            raise PulseOverlapError(
                f"pulse at t={second.start:.6g} s starts before the pulse at "
                f"t={first.start:.6g} s ends ({first.end:.6g} s)"
            )
    return ordered


def hard_pulse_ratio(ensemble: EnsembleSpec, pulses: Sequence[Pulse]) -> float:
    """Longest pulse duration times the inhomogeneous FWHM.

    Instantaneous rotations describe every class faithfully while this stays well below
    one; larger values mean the real pulse would only address part of the line.
    """
    if not pulses:
        return 0.0
    return max(p.duration for p in pulses) * ensemble.inhomogeneous_width


def propagate_bloch(
    ensemble: EnsembleSpec,
    pulses: Sequence[Pulse],
    t_grid: np.ndarray,
    initial_population: np.ndarray | None = None,
) -> BlochTrajectories:
    """Evolve every detuning class through a pulse sequence.

    The ensemble starts in its ground state (c = 0, w = −1) at t = 0 unless
    ``initial_population`` gives a per-class starting inversion. Pulses act at their
    centres, which must not precede t = 0. A sample taken exactly at a pulse centre sees
    the state before that pulse.

    Args:
        ensemble: Detuning classes and relaxation times
        pulses: Non-overlapping pulses
        t_grid: Increasing sample instants, all >= 0 (s)
        initial_population: Optional w at t = 0 per class

    Returns:
        Trajectories with the emitted field, maximum Bloch norm and hard-pulse ratio

    Raises:
        PulseOverlapError: If two pulses overlap
        SamplingError: If t_grid is coarser than π/Δ_max anywhere
        PreconditionError: If t_grid is not increasing or a time precedes t = 0
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise PreconditionError("t_grid must be a non-empty 1-D array")
    if t_grid[0] < 0 or np.any(np.diff(t_grid) <= 0):
        raise PreconditionError("t_grid must be increasing and start at t >= 0")

    span = detuning_span(ensemble)
    if t_grid.size > 1:
        step = float(np.max(np.diff(t_grid)))
        if step > math.pi / span:
            raise SamplingError(
                f"t_grid step {step:.3e} s exceeds π/Δ_max = {math.pi / span:.3e} s "
                f"for a detuning span of ±{span:.3e} rad/s"
            )

    ordered = check_pulses(pulses)
    if ordered and ordered[0].center < 0:
        raise PreconditionError("pulse centres must lie at t >= 0")
    detunings, weights = detuning_grid(ensemble)
    t1, t2 = ensemble.t1, ensemble.t2

    coherence = np.zeros_like(detunings, dtype=complex)
    if initial_population is None:
        population = -np.ones_like(detunings)
    else:
        population = np.asarray(initial_population, dtype=float)
        if population.shape != detunings.shape:
            raise PreconditionError("initial_population needs one value per detuning class")

    coherence_out = np.empty((t_grid.size, detunings.size), dtype=complex)
    population_out = np.empty((t_grid.size, detunings.size))
    max_norm = float(np.max(np.sqrt(np.abs(coherence) ** 2 + population**2)))

    now = 0.0
    sampled = 0
    for pulse in [*ordered, None]:
        until = math.inf if pulse is None else pulse.center
        stop = int(np.searchsorted(t_grid, until, side="right"))
        if stop > sampled:
            c, w = free_evolution(
                coherence, population, detunings, t_grid[sampled:stop] - now, t1, t2
            )
            coherence_out[sampled:stop] = c
            population_out[sampled:stop] = w
            sampled = stop
        if pulse is None:
            break

        coherence, population = free_evolution(
            coherence, population, detunings, pulse.center - now, t1, t2
        )
        effective_phase = pulse.phase + pulse.carrier_detuning * pulse.center
        coherence, population = rotate(coherence, population, pulse.area, effective_phase)
        now = pulse.center
        max_norm = max(max_norm, float(np.max(np.sqrt(np.abs(coherence) ** 2 + population**2))))

    if sampled:
        norms = np.sqrt(np.abs(coherence_out) ** 2 + population_out**2)
        max_norm = max(max_norm, float(norms.max()))

    ratio = hard_pulse_ratio(ensemble, ordered)
    logger.debug(
        f"Propagated {detunings.size} classes through {len(ordered)} pulses, "
        f"{t_grid.size} samples, max norm {max_norm:.12f}, hard-pulse ratio {ratio:.3g}"
    )
    return BlochTrajectories(
        times=t_grid,
        detunings=detunings,
        weights=weights,
        coherence=coherence_out,
        population=population_out,
        max_norm=max_norm,
        hard_pulse_ratio=ratio,
    )
