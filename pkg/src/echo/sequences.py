"""Two-pulse, three-pulse and accumulated photon echoes.

Each simulation samples a window of ``2·WINDOW_HALF_POINTS + 1`` points at spacing
π/(2Δ_max) centred on the expected echo time. The wanted coherence pathway is isolated
by four-step phase cycling: the run is repeated with the cycled phases stepped through
0, π/2, π, 3π/2 and the emitted fields are summed with the receiver weight
e^{−iΣc_jφ_j} of the pathway coefficients c_j. Free-induction decays and unwanted
echoes cancel in the sum.
"""

import itertools
import logging
import math
from collections.abc import Callable, Sequence

import numpy as np

from src.echo.bloch import HARD_PULSE_LIMIT, propagate_bloch
from src.echo.detection import DEFAULT_LO_OFFSET, detect
from src.echo.ensemble import detuning_grid, echo_sample_step
from src.echo.schemas import (
    DEFAULT_RABI_FREQUENCY,
    AreaScanResult,
    EchoSeries,
    EnsembleSpec,
    SequenceTemplate,
)
from src.model.errors import PreconditionError, PulseOverlapError
from src.model.schemas import Detection, EchoTrace, Pulse

logger = logging.getLogger(__name__)

CYCLE_PHASES = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
WINDOW_HALF_POINTS = 64

TWO_PULSE_PATHWAY = (-1,)
THREE_PULSE_PATHWAY = (-1, 1)
GRATING_PATHWAY = (1,)

RunBuilder = Callable[[tuple[float, ...]], tuple[list[Pulse], np.ndarray | None]]


def echo_window(ensemble: EnsembleSpec, echo_time: float) -> np.ndarray:
    """Sample instants echo_time + k·π/(2Δ_max) for |k| <= ``WINDOW_HALF_POINTS``."""
    step = echo_sample_step(ensemble)
    times = echo_time + step * np.arange(-WINDOW_HALF_POINTS, WINDOW_HALF_POINTS + 1)
    if times[0] < 0:
        raise PreconditionError(f"echo window starts before t = 0 (echo at {echo_time:.3e} s)")
    return times


def echo_centroid(trace: EchoTrace) -> float:
    """Intensity-weighted mean time of the detector envelope."""
    power = trace.envelope**2
    return float(np.sum(trace.times * power) / np.sum(power))


def _phase_cycled_field(
    ensemble: EnsembleSpec,
    build_run: RunBuilder,
    pathway: tuple[int, ...],
    t_grid: np.ndarray,
) -> tuple[np.ndarray, dict[str, float]]:
    runs = list(itertools.product(CYCLE_PHASES, repeat=len(pathway)))
    field = np.zeros(t_grid.size, dtype=complex)
    max_norm, ratio = 0.0, 0.0
    for phases in runs:
        pulses, initial_population = build_run(phases)
        trajectories = propagate_bloch(ensemble, pulses, t_grid, initial_population)
        receiver = np.exp(-1j * sum(c * phi for c, phi in zip(pathway, phases)))
        field += receiver * trajectories.emitted_field
        max_norm = max(max_norm, trajectories.max_norm)
        ratio = max(ratio, trajectories.hard_pulse_ratio)
    return field / len(runs), {"max_bloch_norm": max_norm, "hard_pulse_ratio": ratio}


def _ensemble_metadata(ensemble: EnsembleSpec) -> dict[str, float | int | str]:
    return {
        "distribution": ensemble.distribution,
        "inhomogeneous_width": ensemble.inhomogeneous_width,
        "n_classes": ensemble.n_classes,
        "t1": ensemble.t1,
        "t2": ensemble.t2,
        "sample_step": echo_sample_step(ensemble),
    }


def _require_separation(delay: float, pulses: Sequence[Pulse], name: str) -> None:
    longest = max(p.duration for p in pulses)
    if not delay > longest:
        raise PulseOverlapError(
            f"{name}={delay:.3e} s must exceed the pulse duration {longest:.3e} s"
        )


def simulate_two_pulse_echo(
    ensemble: EnsembleSpec,
    tau: float,
    detection: Detection = "heterodyne",
    lo_offset: float = DEFAULT_LO_OFFSET,
    rabi_frequency: float = DEFAULT_RABI_FREQUENCY,
    area_scale: float = 1.0,
    areas: tuple[float, float] = (math.pi / 2, math.pi),
) -> EchoTrace:
    """Primary echo of a Θ1–τ–Θ2 sequence, sampled around t2 + τ.

    The first pulse is centred on t = 0, so the echo sits at 2τ.

    Args:
        ensemble: Detuning classes and relaxation times
        tau: Pulse separation (s), longer than either pulse
        detection: ``heterodyne`` or ``direct``
        lo_offset: Heterodyne LO offset (rad/s)
        rabi_frequency: Ω setting the pulse durations
        area_scale: Factor on the pulse areas at unchanged durations
        areas: Nominal areas of the two pulses

    Returns:
        Detected trace; ``metadata`` records the expected echo time and run checks

    Raises:
        PulseOverlapError: If τ does not exceed the pulse durations
    """
    template = SequenceTemplate.two_pulse(tau, areas=areas, rabi_frequency=rabi_frequency)
    _require_separation(tau, template.pulses(), "tau")
    times = echo_window(ensemble, template.echo_time)

    def build_run(phases: tuple[float, ...]) -> tuple[list[Pulse], None]:
        return template.pulses((phases[0], 0.0), area_scale), None

    field, checks = _phase_cycled_field(ensemble, build_run, TWO_PULSE_PATHWAY, times)
    metadata = {
        "kind": "two_pulse",
        "tau": tau,
        "echo_time": template.echo_time,
        "area_scale": area_scale,
        **_ensemble_metadata(ensemble),
        **checks,
    }
    return detect(field, times, detection, lo_offset, metadata=metadata)


def simulate_three_pulse_echo(
    ensemble: EnsembleSpec,
    tau: float,
    waiting_time: float,
    detection: Detection = "heterodyne",
    lo_offset: float = DEFAULT_LO_OFFSET,
    rabi_frequency: float = DEFAULT_RABI_FREQUENCY,
    area_scale: float = 1.0,
    areas: tuple[float, float, float] = (math.pi / 2, math.pi / 2, math.pi / 2),
) -> EchoTrace:
    """Stimulated echo of a Θ1–τ–Θ2–T–Θ3 sequence, sampled around t3 + τ.

    Raises:
        PulseOverlapError: If τ or T does not exceed the pulse durations
    """
    template = SequenceTemplate.three_pulse(
        tau, waiting_time, areas=areas, rabi_frequency=rabi_frequency
    )
    _require_separation(tau, template.pulses(), "tau")
    _require_separation(waiting_time, template.pulses(), "waiting_time")
    times = echo_window(ensemble, template.echo_time)

    def build_run(phases: tuple[float, ...]) -> tuple[list[Pulse], None]:
        return template.pulses((phases[0], phases[1], 0.0), area_scale), None

    field, checks = _phase_cycled_field(ensemble, build_run, THREE_PULSE_PATHWAY, times)
    metadata = {
        "kind": "three_pulse",
        "tau": tau,
        "waiting_time": waiting_time,
        "echo_time": template.echo_time,
        "area_scale": area_scale,
        **_ensemble_metadata(ensemble),
        **checks,
    }
    return detect(field, times, detection, lo_offset, metadata=metadata)


def grating_contrast(
    ensemble: EnsembleSpec,
    prep: SequenceTemplate,
    wait: float,
    hole_lifetimes: Sequence[float],
    hole_weights: Sequence[float] | None = None,
) -> float:
    """Population-grating contrast left after the preparation and a wait T_w.

    C(T_w) = C_prep·Σ w_i·e^{−T_w/T_h,i} with the weights normalised to one.
    """
    if not hole_lifetimes:
        raise PreconditionError("accumulated echo needs at least one hole lifetime")
    if any(t <= 0 for t in hole_lifetimes):
        raise PreconditionError("hole lifetimes must be positive")
    weights = np.ones(len(hole_lifetimes)) if hole_weights is None else np.asarray(hole_weights)
    if weights.shape != (len(hole_lifetimes),) or np.any(weights < 0) or weights.sum() <= 0:
        raise PreconditionError("hole weights must match the lifetimes and have a positive sum")
    weights = weights / weights.sum()
    decay = float(np.sum(weights * np.exp(-wait / np.asarray(hole_lifetimes, dtype=float))))
    return prep.preparation_contrast(ensemble.t2) * decay


def simulate_accumulated_echo(
    ensemble: EnsembleSpec,
    prep: SequenceTemplate,
    wait: float,
    hole_lifetimes: Sequence[float],
    hole_weights: Sequence[float] | None = None,
    detection: Detection = "heterodyne",
    lo_offset: float = DEFAULT_LO_OFFSET,
    area_scale: float = 1.0,
) -> EchoTrace:
    """Echo retrieved by a probe pulse from an accumulated spectral grating.

    The preparation pairs leave the inversion w₀(Δ) = −1 + C/2 + (C/2)·cos(Δτ_s), with C
    from ``grating_contrast``. The probe centred on t = 0 turns the grating into coherence that
    rephases τ_s after the probe centre.

    Args:
        ensemble: Detuning classes and relaxation times
        prep: ``SequenceTemplate.accumulated(...)`` with τ_r > T2
        wait: T_w between preparation and probe (s)
        hole_lifetimes: Spectral-hole lifetimes (s)
        hole_weights: Relative weights per lifetime (equal when omitted)
        detection: ``heterodyne`` or ``direct``
        lo_offset: Heterodyne LO offset (rad/s)
        area_scale: Factor on the preparation and probe areas

    Raises:
        PreconditionError: If prep is not accumulated, τ_r <= T2 or no lifetime is given
    """
    if prep.kind != "accumulated":
        raise PreconditionError(f"expected an accumulated sequence, got {prep.kind}")
    if not prep.repetition > ensemble.t2:
        raise PreconditionError(
            f"pair repetition τ_r={prep.repetition:.3e} s must exceed T2={ensemble.t2:.3e} s"
        )
    if wait < 0:
        raise PreconditionError(f"waiting time must be >= 0, got {wait!r}")

    scaled = prep.model_copy(update={"areas": [a * area_scale for a in prep.areas]})
    contrast = grating_contrast(ensemble, scaled, wait, hole_lifetimes, hole_weights)
    probe_duration = prep.areas[1] / prep.rabi_frequency
    probe = Pulse(start=-probe_duration / 2, duration=probe_duration, area=scaled.areas[1])
    echo_time = prep.echo_time
    times = echo_window(ensemble, echo_time)
    detunings, _ = detuning_grid(ensemble)

    def build_run(phases: tuple[float, ...]) -> tuple[list[Pulse], np.ndarray]:
        grating = np.cos(detunings * prep.pair_separation + phases[0])
        return [probe], -1.0 + 0.5 * contrast + 0.5 * contrast * grating

    field, checks = _phase_cycled_field(ensemble, build_run, GRATING_PATHWAY, times)
    metadata = {
        "kind": "accumulated",
        "wait": wait,
        "pair_separation": prep.pair_separation,
        "n_pairs": prep.n_pairs,
        "grating_contrast": contrast,
        "echo_time": echo_time,
        "area_scale": area_scale,
        **_ensemble_metadata(ensemble),
        **checks,
    }
    return detect(field, times, detection, lo_offset, metadata=metadata)


def echo_area_scan(
    ensemble: EnsembleSpec,
    rabi_frequency: float,
    second_pulse_durations: Sequence[float],
    tau: float = 5e-6,
    first_pulse_area: float = math.pi / 2,
    detection: Detection = "heterodyne",
    lo_offset: float = DEFAULT_LO_OFFSET,
) -> AreaScanResult:
    """Two-pulse echo amplitude as the second pulse is lengthened at fixed power.

    The amplitude follows sin(Θ1)·sin²(Ωτ₂/2) and peaks where Ωτ₂ = π. A maximum on the
    edge of the scan is reported through ``peak_found`` rather than raised.

    Raises:
        PreconditionError: If Ω or a duration is not positive
    """
    if not rabi_frequency > 0:
        raise PreconditionError(f"rabi_frequency must be > 0, got {rabi_frequency!r}")
    durations = np.asarray(second_pulse_durations, dtype=float)
    if durations.size == 0 or np.any(durations <= 0):
        raise PreconditionError("second-pulse durations must be positive")

    first_duration = first_pulse_area / rabi_frequency
    first = Pulse(start=-first_duration / 2, duration=first_duration, area=first_pulse_area)
    amplitudes = []
    for duration in durations:
        center = first.center + tau
        times = echo_window(ensemble, center + tau)

        def build_run(
            phases: tuple[float, ...], duration: float = duration, center: float = center
        ) -> tuple[list[Pulse], None]:
            second = Pulse(
                start=center - duration / 2, duration=duration, area=rabi_frequency * duration
            )
            return [first.model_copy(update={"phase": phases[0]}), second], None

        field, _ = _phase_cycled_field(ensemble, build_run, TWO_PULSE_PATHWAY, times)
        amplitudes.append(detect(field, times, detection, lo_offset).peak)

    amplitudes_arr = np.asarray(amplitudes)
    index = int(np.argmax(amplitudes_arr))
    found = 0 < index < durations.size - 1
    if not found:
        logger.warning(
            f"Echo area scan maximum at the scan edge ({durations[index]:.3e} s); "
            f"widen the duration range"
        )
    logger.info(
        f"Echo area scan: peak at τ2={durations[index] * 1e6:.3f} µs over {durations.size} points"
    )
    return AreaScanResult(
        durations=durations,
        amplitudes=amplitudes_arr,
        peak_duration=float(durations[index]),
        peak_found=found,
    )


def two_pulse_decay(
    ensemble: EnsembleSpec, taus: Sequence[float], detection: Detection = "heterodyne", **kwargs
) -> EchoSeries:
    """Primary-echo peak against τ. Extra keyword arguments go to the simulator."""
    peaks = [simulate_two_pulse_echo(ensemble, t, detection, **kwargs).peak for t in taus]
    _log_series("two_pulse", taus, peaks)
    return EchoSeries(delays=taus, amplitudes=peaks, kind="two_pulse", detection=detection)


def three_pulse_decay(
    ensemble: EnsembleSpec,
    tau: float,
    waiting_times: Sequence[float],
    detection: Detection = "heterodyne",
    **kwargs,
) -> EchoSeries:
    """Stimulated-echo peak against the waiting time T at fixed τ."""
    peaks = [
        simulate_three_pulse_echo(ensemble, tau, t, detection, **kwargs).peak
        for t in waiting_times
    ]
    _log_series("three_pulse", waiting_times, peaks)
    return EchoSeries(
        delays=waiting_times, amplitudes=peaks, kind="three_pulse", detection=detection
    )


def accumulated_decay(
    ensemble: EnsembleSpec,
    prep: SequenceTemplate,
    waits: Sequence[float],
    hole_lifetimes: Sequence[float],
    hole_weights: Sequence[float] | None = None,
    detection: Detection = "heterodyne",
    **kwargs,
) -> EchoSeries:
    """Retrieved accumulated-echo peak against T_w."""
    peaks = [
        simulate_accumulated_echo(
            ensemble, prep, w, hole_lifetimes, hole_weights, detection, **kwargs
        ).peak
        for w in waits
    ]
    _log_series("accumulated", waits, peaks)
    return EchoSeries(delays=waits, amplitudes=peaks, kind="accumulated", detection=detection)


def hard_pulse_warning(trace: EchoTrace) -> str | None:
    """Message when a trace was simulated outside the hard-pulse regime, else None."""
    ratio = trace.metadata.get("hard_pulse_ratio", 0.0)
    if ratio > HARD_PULSE_LIMIT:
        return (
            f"pulse duration × inhomogeneous width = {ratio:.3g} > {HARD_PULSE_LIMIT:g}; "
            f"rotations are applied to every class as if instantaneous"
        )
    return None


def _log_series(kind: str, delays: Sequence[float], peaks: Sequence[float]) -> None:
    logger.info(
        f"{kind} sweep: {len(delays)} delays {min(delays):.3e}..{max(delays):.3e} s, "
        f"peak {max(peaks):.4g} -> {min(peaks):.4g}"
    )
