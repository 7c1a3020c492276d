"""LangGraph nodes of the scenario pipelines.

Every step is a node that reads the config (and outputs of earlier steps) from the
state and returns a partial update. The ``scenario_step`` decorator turns a function
returning a ``StepResult`` into such a node: it records the step, attributes any lab
error to the step by name and registers the node in ``STEPS``.
"""

import functools
import logging
import math
import time
import zlib
from collections.abc import Callable
from datetime import datetime, timezone
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

UTC = timezone.utc  # alias of datetime.UTC (Python >= 3.11)

from src.bistability import (
    BistabilityParams,
    bistable_drive_window,
    count_roots_bruteforce,
    drive_from_power,
    fit_bistability,
    hysteresis_width,
    linear_response_transmission,
    solve_output,
    sweep,
)
from src.config.settings import settings
from src.cqed import (
    coherence_reduction,
    critical_numbers,
    decay_rates,
    dipole_from_g,
    g_from_dipole,
    g_from_echo,
    kappa_from_q,
    photon_number_conventions,
    rabi_from_pulse,
    strong_coupling_report,
)
from src.echo import (
    EnsembleSpec,
    SequenceTemplate,
    echo_area_scan,
    echo_centroid,
    hard_pulse_warning,
    simulate_accumulated_echo,
    simulate_three_pulse_echo,
    simulate_two_pulse_echo,
)
from src.fitkit import fit_decay, fit_heating_quadratic, fit_pi_pulse, fit_two_stage_hole
from src.fitkit.schemas import FitResult
from src.model.config import ExperimentConfig
from src.model.errors import LabError
from src.model.loader import config_snapshot
from src.model.schemas import Detection, EchoTrace
from src.model.units import format_over_2pi, to_over_2pi
from src.scenarios.acceptance import evaluate_checks
from src.scenarios.schemas import ScenarioReport, StepRecord, TraceFile
from src.scenarios.state import ScenarioState
from src.scenarios.storage import OutputStore
from src.wgm import find_fundamental_mode, mode_volume, radial_profile

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
TABLE_FILE = "table1.txt"
PROFILE_FILE = "mode_profile.dat"
HARD_PULSE_NOTE = "hard-pulse approximation"
# relative gap between echo-calibrated and configured g that is worth a note
G_DISCREPANCY = 0.05
# overlap tolerance floor between the exact and asymptotic mode volumes
OVERLAP_TOLERANCE = 0.05
# normalised drive intensity of the linear-response sweep
LINEAR_DRIVE = 1e-6


class StepResult(BaseModel):
    """What a step function hands back to ``scenario_step``."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    outputs: dict[str, Any] = Field(default_factory=dict)
    fit: FitResult | None = None
    traces: list[TraceFile] = Field(default_factory=list)
    provenance: list[str] = Field(default_factory=list)
    skipped: str | None = None


StepFunction = Callable[[ScenarioState, OutputStore], StepResult]
Node = Callable[[ScenarioState], dict]

STEPS: dict[str, Node] = {}


def scenario_step(name: str, *operations: str) -> Callable[[StepFunction], Node]:
    """Register a step function as the LangGraph node ``name``.

    Args:
        name: Step name, also the prefix of its acceptance keys
        operations: Library operations the step calls, recorded in the report
    """

    def decorator(fn: StepFunction) -> Node:
        @functools.wraps(fn)
        def node(state: ScenarioState) -> dict:
            logger.info(f"[{state.scenario}] {name}")
            try:
                result = fn(state, OutputStore(state.output_dir))
            except (LabError, ValueError) as e:
                logger.error(f"[{state.scenario}] step {name} failed: {e}")
                record = StepRecord(
                    name=name, operations=list(operations), status="failed", note=str(e)
                )
                return {"steps": [record], "error": f"{name}: {e}", "failed_step": name}

            if result.skipped:
                logger.info(f"[{state.scenario}] {name} skipped: {result.skipped}")
                record = StepRecord(
                    name=name, operations=list(operations), status="skipped", note=result.skipped
                )
                return {"steps": [record]}

            record = StepRecord(name=name, operations=list(operations), outputs=result.outputs)
            update: dict[str, Any] = {"steps": [record]}
            if result.fit is not None:
                update["fits"] = {name: result.fit}
            if result.traces:
                update["traces"] = result.traces
            if result.provenance:
                update["provenance"] = result.provenance
            return update

        STEPS[name] = node
        return node

    return decorator


def _ensemble(config: ExperimentConfig, t1: float, t2: float) -> EnsembleSpec:
    echo = config.echo
    return EnsembleSpec(
        inhomogeneous_width=echo.inhomogeneous_width,
        distribution=echo.distribution,
        n_classes=echo.n_classes or settings.n_classes,
        t1=t1,
        t2=t2,
    )


def _rabi(config: ExperimentConfig) -> float:
    if config.echo.rabi_frequency is not None:
        return config.echo.rabi_frequency
    return rabi_from_pulse(config.cqed.pi_pulse_area, config.cqed.pi_pulse_duration)


def _noisy(values: np.ndarray, state: ScenarioState, step: str) -> np.ndarray:
    """Peaks times (1 + σ·N(0, 1)), seeded by the run seed and the step name."""
    sigma = state.config.echo.noise_level
    if sigma == 0:
        return values
    rng = np.random.default_rng([state.seed, zlib.crc32(step.encode())])
    return values * (1.0 + sigma * rng.standard_normal(values.size))


def _hard_pulse_note(state: ScenarioState, traces: list[EchoTrace]) -> list[str]:
    if any(p.startswith(HARD_PULSE_NOTE) for p in state.provenance):
        return []
    for trace in traces:
        message = hard_pulse_warning(trace)
        if message:
            logger.warning(message)
            return [f"{HARD_PULSE_NOTE}: {message}"]
    return []


def _write_series(
    store: OutputStore, step: str, delays: np.ndarray, peaks: np.ndarray, label: str
) -> None:
    store.write_columns(
        f"{step}_series.dat", {label: delays, "peak": peaks}, {label: "s", "peak": "arb"}
    )


def _bistability_params(config: ExperimentConfig, **update: float) -> BistabilityParams:
    params = BistabilityParams.from_config(config.bistability)
    return params.model_copy(update=update) if update else params


def _half_width(detunings: np.ndarray, transmission: np.ndarray) -> float:
    """Half width at half maximum on the upper side of the peak, linearly interpolated."""
    peak = int(np.argmax(transmission))
    half = 0.5 * transmission[peak]
    above = np.flatnonzero(transmission[peak:] < half)
    if above.size == 0:
        return math.nan
    i = peak + int(above[0])
    x0, x1 = detunings[i - 1], detunings[i]
    y0, y1 = transmission[i - 1], transmission[i]
    return float(x0 + (half - y0) * (x1 - x0) / (y1 - y0) - detunings[peak])


@scenario_step("decay_rates", "decay_rates")
def decay_rates_step(state: ScenarioState, store: OutputStore) -> StepResult:
    ion = state.config.ion
    gamma, gamma_h = decay_rates(ion.t1, ion.t2)
    return StepResult(
        outputs={
            "t1": ion.t1,
            "t2": ion.t2,
            "gamma": gamma,
            "gamma_h": gamma_h,
            "gamma_over_2pi": to_over_2pi(gamma),
            "gamma_h_over_2pi": to_over_2pi(gamma_h),
        }
    )


@scenario_step("cavity_rates", "kappa_from_q")
def cavity_rates_step(state: ScenarioState, store: OutputStore) -> StepResult:
    resonator = state.config.resonator
    kappa = kappa_from_q(state.config.ion.transition_wavelength, resonator.quality_factor)
    return StepResult(
        outputs={
            "quality_factor": resonator.quality_factor,
            "kappa": kappa,
            "kappa_over_2pi": to_over_2pi(kappa),
        }
    )


@scenario_step("photon_number", "photon_number_conventions", "intracavity_photon_number")
def photon_number_step(state: ScenarioState, store: OutputStore) -> StepResult:
    config = state.config
    conventions = photon_number_conventions(
        config.cqed.input_power,
        config.resonator.coupling_efficiency,
        config.resonator.quality_factor,
        config.ion.transition_wavelength,
    )
    return StepResult(
        outputs={
            "input_power": config.cqed.input_power,
            "coupling_efficiency": config.resonator.coupling_efficiency,
            "n_photons": conventions["adopted"],
            "n_photons_rejected_convention": conventions["rejected"],
        },
        provenance=[
            f"photon number convention: {conventions['adopted_convention']} "
            f"(rejected: {conventions['rejected_convention']})"
        ],
    )


@scenario_step("rabi", "rabi_from_pulse")
def rabi_step(state: ScenarioState, store: OutputStore) -> StepResult:
    cqed = state.config.cqed
    omega = rabi_from_pulse(cqed.pi_pulse_area, cqed.pi_pulse_duration)
    return StepResult(
        outputs={
            "pulse_area": cqed.pi_pulse_area,
            "pulse_duration": cqed.pi_pulse_duration,
            "omega": omega,
        }
    )


@scenario_step("echo_coupling", "g_from_echo")
def echo_coupling_step(state: ScenarioState, store: OutputStore) -> StepResult:
    omega = state.value("rabi", "omega")
    n_photons = state.value("photon_number", "n_photons")
    estimate = g_from_echo(omega, n_photons)
    provenance = []
    reported = state.config.cqed.reported_coupling
    if reported is not None and abs(estimate.g - reported) > G_DISCREPANCY * reported:
        note = (
            f"g discrepancy: echo calibration gives {format_over_2pi(estimate.g)}, "
            f"configured coupling is {format_over_2pi(reported)}"
        )
        logger.warning(note)
        provenance.append(note)
    return StepResult(
        outputs={"g": estimate.g, "g_over_2pi": estimate.g_over_2pi},
        provenance=provenance,
    )


@scenario_step("dipole_coupling", "g_from_dipole", "dipole_from_g")
def dipole_coupling_step(state: ScenarioState, store: OutputStore) -> StepResult:
    config = state.config
    volume = config.cqed.reference_mode_volume or config.resonator.mode_volume
    if volume is None:
        return StepResult(skipped="no mode volume configured; see the mode_volume scenario")
    ion, n_r = config.ion, config.resonator.refractive_index
    estimate = g_from_dipole(ion.dipole_moment, n_r, ion.transition_frequency, volume)
    mu = dipole_from_g(estimate.g, n_r, ion.transition_frequency, volume)
    return StepResult(
        outputs={
            "mode_volume": volume,
            "g": estimate.g,
            "g_over_2pi": estimate.g_over_2pi,
            "mu_roundtrip_rel_error": abs(mu - ion.dipole_moment) / ion.dipole_moment,
        }
    )


@scenario_step("critical_numbers", "critical_numbers")
def critical_numbers_step(state: ScenarioState, store: OutputStore) -> StepResult:
    reported = state.config.cqed.reported_coupling
    dipole_g = state.value("dipole_coupling", "g")
    if reported is not None:
        g, source = reported, "configured"
    elif dipole_g is not None:
        g, source = dipole_g, "dipole_coupling"
    else:
        g, source = state.value("echo_coupling", "g"), "echo_coupling"
    params = critical_numbers(
        g,
        state.value("cavity_rates", "kappa"),
        state.value("decay_rates", "gamma"),
        state.value("decay_rates", "gamma_h"),
    )
    return StepResult(
        outputs={
            "g": params.g,
            "g_over_2pi": to_over_2pi(params.g),
            "g_source": source,
            "kappa": params.kappa,
            "gamma": params.gamma,
            "gamma_h": params.gamma_h,
            "N0": params.N0,
            "n0": params.n0,
        },
        provenance=[f"critical numbers use g from {source}"],
    )


@scenario_step("strong_coupling", "strong_coupling_report")
def strong_coupling_step(state: ScenarioState, store: OutputStore) -> StepResult:
    params = critical_numbers(
        *(state.value("critical_numbers", key) for key in ("g", "kappa", "gamma", "gamma_h"))
    )
    return StepResult(outputs=strong_coupling_report(params).as_outputs())


@scenario_step("mode_volume", "find_fundamental_mode", "mode_volume", "radial_profile")
def mode_volume_step(state: ScenarioState, store: OutputStore) -> StepResult:
    config = state.config
    target = config.wgm.target_wavelength or config.ion.transition_wavelength
    mode = find_fundamental_mode(config.resonator, target, method=config.wgm.method)
    result = mode_volume(mode)
    radii, profile = radial_profile(mode, config.wgm.profile_points)
    store.write_columns(PROFILE_FILE, {"r": radii, "eps_E2": profile}, {"r": "m", "eps_E2": "1"})
    return StepResult(
        outputs={
            "volume": result.volume,
            "method": result.method,
            "estimated_relative_error": result.estimated_relative_error,
            "polar_index": mode.polar_index,
            "polarization": mode.polarization,
            "size_parameter": mode.size_parameter,
            "resonance_wavelength": mode.resonance_wavelength,
            "profile_file": PROFILE_FILE,
        }
    )


@scenario_step("mode_overlap", "find_fundamental_mode", "mode_volume")
def mode_overlap_step(state: ScenarioState, store: OutputStore) -> StepResult:
    config = state.config
    radius = config.wgm.overlap_radius
    if radius is None:
        return StepResult(skipped="wgm.overlap_radius not configured")
    sphere = config.resonator.model_copy(update={"radius": radius, "mode_volume": None})
    target = config.wgm.target_wavelength or config.ion.transition_wavelength
    exact = mode_volume(find_fundamental_mode(sphere, target, method="exact"))
    asymptotic = mode_volume(find_fundamental_mode(sphere, target, method="asymptotic"))
    difference = abs(asymptotic.volume - exact.volume) / exact.volume
    tolerance = max(2.0 * asymptotic.estimated_relative_error, OVERLAP_TOLERANCE)
    return StepResult(
        outputs={
            "radius": radius,
            "exact_volume": exact.volume,
            "asymptotic_volume": asymptotic.volume,
            "rel_difference": difference,
            "tolerance": tolerance,
            "within_tolerance": difference <= tolerance,
        }
    )


@scenario_step("solved_coupling", "g_from_dipole")
def solved_coupling_step(state: ScenarioState, store: OutputStore) -> StepResult:
    config = state.config
    volume = state.value("mode_volume", "volume")
    estimate = g_from_dipole(
        config.ion.dipole_moment,
        config.resonator.refractive_index,
        config.ion.transition_frequency,
        volume,
    )
    return StepResult(
        outputs={"mode_volume": volume, "g": estimate.g, "g_over_2pi": estimate.g_over_2pi}
    )


def _two_pulse_series(
    state: ScenarioState, store: OutputStore, step: str, t2: float, detection: Detection
) -> StepResult:
    config, echo = state.config, state.config.echo
    ensemble = _ensemble(config, config.ion.t1, t2)
    rabi = _rabi(config)
    taus = echo.tau_sweep.values()
    traces = [
        simulate_two_pulse_echo(ensemble, tau, detection, echo.lo_offset, rabi, echo.area_scale)
        for tau in taus
    ]
    peaks = _noisy(np.array([t.peak for t in traces]), state, step)
    model = "amp_2pe" if detection == "heterodyne" else "int_2pe"
    fit = fit_decay(taus, peaks, model)

    offsets = [
        abs(echo_centroid(t) - t.metadata["echo_time"]) / t.metadata["sample_step"]
        for t in traces
    ]
    files = [store.write_trace(f"{step}_{i:02d}", t, step) for i, t in enumerate(traces)]
    _write_series(store, step, taus, peaks, "tau")
    return StepResult(
        outputs={
            "t2": fit["t2"],
            "t2_input": t2,
            "model": model,
            "detection": detection,
            "converged": fit.converged,
            "n_points": int(taus.size),
            "max_centroid_offset_steps": max(offsets),
            "max_bloch_norm": max(t.metadata["max_bloch_norm"] for t in traces),
            "hard_pulse_ratio": max(t.metadata["hard_pulse_ratio"] for t in traces),
        },
        fit=fit,
        traces=files,
        provenance=_hard_pulse_note(state, traces),
    )


@scenario_step(
    "two_pulse_amplitude", "simulate_two_pulse_echo", "echo_centroid", "fit_decay"
)
def two_pulse_amplitude_step(state: ScenarioState, store: OutputStore) -> StepResult:
    config = state.config
    return _two_pulse_series(
        state, store, "two_pulse_amplitude", config.ion.t2, config.echo.detection
    )


@scenario_step("two_pulse_intensity", "simulate_two_pulse_echo", "fit_decay")
def two_pulse_intensity_step(state: ScenarioState, store: OutputStore) -> StepResult:
    t2 = state.config.ion.comparison_t2
    if t2 is None:
        return StepResult(skipped="ion.comparison_t2 not configured")
    return _two_pulse_series(state, store, "two_pulse_intensity", t2, "direct")


def _three_pulse_series(
    state: ScenarioState, store: OutputStore, step: str, t1: float, t2: float
) -> StepResult:
    config, echo = state.config, state.config.echo
    ensemble = _ensemble(config, t1, t2)
    rabi = _rabi(config)
    waits = echo.waiting_sweep.values()
    traces = [
        simulate_three_pulse_echo(
            ensemble,
            echo.three_pulse_tau,
            wait,
            echo.detection,
            echo.lo_offset,
            rabi,
            echo.area_scale,
        )
        for wait in waits
    ]
    peaks = _noisy(np.array([t.peak for t in traces]), state, step)
    fit = fit_decay(waits, peaks, "pop_3pe")
    files = [store.write_trace(f"{step}_{i:02d}", t, step) for i, t in enumerate(traces)]
    _write_series(store, step, waits, peaks, "waiting_time")
    return StepResult(
        outputs={
            "t1": fit["t1"],
            "t1_input": t1,
            "converged": fit.converged,
            "n_points": int(waits.size),
            "max_bloch_norm": max(t.metadata["max_bloch_norm"] for t in traces),
        },
        fit=fit,
        traces=files,
        provenance=_hard_pulse_note(state, traces),
    )


@scenario_step("three_pulse", "simulate_three_pulse_echo", "fit_decay")
def three_pulse_step(state: ScenarioState, store: OutputStore) -> StepResult:
    ion = state.config.ion
    return _three_pulse_series(state, store, "three_pulse", ion.t1, ion.t2)


@scenario_step("three_pulse_comparison", "simulate_three_pulse_echo", "fit_decay")
def three_pulse_comparison_step(state: ScenarioState, store: OutputStore) -> StepResult:
    ion = state.config.ion
    if ion.comparison_t1 is None:
        return StepResult(skipped="ion.comparison_t1 not configured")
    t2 = min(ion.comparison_t2 or ion.t2, 2.0 * ion.comparison_t1)
    return _three_pulse_series(state, store, "three_pulse_comparison", ion.comparison_t1, t2)


@scenario_step(
    "accumulated", "simulate_accumulated_echo", "fit_two_stage_hole", "fit_decay"
)
def accumulated_step(state: ScenarioState, store: OutputStore) -> StepResult:
    config, ion = state.config, state.config.ion
    block = config.echo.accumulated
    if not ion.hole_lifetimes:
        return StepResult(skipped="ion.hole_lifetimes not configured")
    ensemble = _ensemble(config, ion.t1, ion.t2)
    prep = SequenceTemplate.accumulated(
        n_pairs=block.n_pairs,
        pair_separation=block.pair_separation,
        repetition=block.repetition,
        accumulation_efficiency=block.accumulation_efficiency,
        preparation_area=block.preparation_area,
        probe_area=block.probe_area,
        rabi_frequency=_rabi(config),
    )
    waits = block.wait_sweep.values()
    traces = [
        simulate_accumulated_echo(
            ensemble,
            prep,
            wait,
            ion.hole_lifetimes,
            ion.normalized_hole_weights,
            config.echo.detection,
            config.echo.lo_offset,
            config.echo.area_scale,
        )
        for wait in waits
    ]
    peaks = _noisy(np.array([t.peak for t in traces]), state, "accumulated")
    files = [
        store.write_trace(f"accumulated_{i:02d}", t, "accumulated") for i, t in enumerate(traces)
    ]
    _write_series(store, "accumulated", waits, peaks, "wait")

    if len(ion.hole_lifetimes) >= 2:
        fit = fit_two_stage_hole(waits, peaks, mode=block.hole_fit_mode)
    else:
        fit = fit_decay(waits, peaks, "hole")
    outputs: dict[str, Any] = {
        "model": fit.model_name,
        "n_points": int(waits.size),
        "converged": fit.converged,
    }
    outputs.update(
        {k: v for k, v in fit.parameters.items() if k in ("t_h", "t_h_fast", "t_h_slow")}
    )
    provenance = _hard_pulse_note(state, traces)
    provenance += [f"accumulated fit flag: {flag}" for flag in fit.flags]
    return StepResult(outputs=outputs, fit=fit, traces=files, provenance=provenance)


@scenario_step("area_scan", "echo_area_scan", "fit_pi_pulse")
def area_scan_step(state: ScenarioState, store: OutputStore) -> StepResult:
    config = state.config
    ensemble = _ensemble(config, config.ion.t1, config.ion.t2)
    durations = config.echo.area_scan.values()
    scan = echo_area_scan(
        ensemble,
        _rabi(config),
        durations,
        tau=config.echo.three_pulse_tau,
        detection=config.echo.detection,
        lo_offset=config.echo.lo_offset,
    )
    amplitudes = _noisy(scan.amplitudes, state, "area_scan")
    fit = fit_pi_pulse(scan.durations, amplitudes)
    _write_series(store, "area_scan", scan.durations, amplitudes, "second_pulse_duration")
    return StepResult(
        outputs={
            "tau_pi": fit["tau_pi"],
            "rabi_frequency": fit["rabi_frequency"],
            "argmax_duration": scan.peak_duration,
            "peak_found": scan.peak_found,
        },
        fit=fit,
    )


@scenario_step("coherence", "coherence_reduction")
def coherence_step(state: ScenarioState, store: OutputStore) -> StepResult:
    t2 = state.value("two_pulse_amplitude", "t2")
    t2_comparison = state.value("two_pulse_intensity", "t2")
    if t2 is None or t2_comparison is None:
        return StepResult(skipped="needs both two_pulse_amplitude and two_pulse_intensity")
    return StepResult(
        outputs={
            "t2": t2,
            "t2_comparison": t2_comparison,
            "reduction": coherence_reduction(t2, t2_comparison),
        }
    )


def _cell(value: float | None, scale: float, unit: str) -> str:
    return "-" if value is None else f"{value * scale:.4g} {unit}"


@scenario_step("table", "render_table")
def table_step(state: ScenarioState, store: OutputStore) -> StepResult:
    config = state.config
    bistability_g = config.cqed.bistability_coupling
    khz = 1e-3
    rows = [
        ("Resonator", config.resonator.label),
        ("Ion", config.ion.label),
        ("T2 (2PE, amplitude)", _cell(state.value("two_pulse_amplitude", "t2"), 1e6, "us")),
        ("T2 comparison", _cell(state.value("two_pulse_intensity", "t2"), 1e6, "us")),
        ("T2 reduction", _cell(state.value("coherence", "reduction"), 100, "%")),
        ("T1 (3PE)", _cell(state.value("three_pulse", "t1"), 1e6, "us")),
        ("T1 comparison", _cell(state.value("three_pulse_comparison", "t1"), 1e6, "us")),
        ("T_h", _cell(state.value("accumulated", "t_h"), 1, "s")),
        ("T_h fast", _cell(state.value("accumulated", "t_h_fast"), 1, "s")),
        ("T_h slow", _cell(state.value("accumulated", "t_h_slow"), 1, "s")),
        ("g/2pi echo calibration", _cell(state.value("echo_coupling", "g_over_2pi"), khz, "kHz")),
        ("g/2pi dipole route", _cell(state.value("dipole_coupling", "g_over_2pi"), khz, "kHz")),
        (
            "g/2pi bistability",
            _cell(None if bistability_g is None else to_over_2pi(bistability_g), khz, "kHz"),
        ),
        ("N0", _cell(state.value("critical_numbers", "N0"), 1, "")),
        ("n0", _cell(state.value("critical_numbers", "n0"), 1, "")),
    ]
    width = max(len(label) for label, _ in rows)
    lines = [f"# {config.name}: {config.description}".rstrip(": ")]
    lines += [f"{label:<{width}}  {value}".rstrip() for label, value in rows]
    store.write_text(TABLE_FILE, "\n".join(lines) + "\n")
    return StepResult(outputs={"table_file": TABLE_FILE, "rows": len(rows)})


@scenario_step("cooperativity", "cooperativity")
def cooperativity_step(state: ScenarioState, store: OutputStore) -> StepResult:
    params = _bistability_params(state.config)
    return StepResult(
        outputs={
            "value": params.cooperativity,
            "g_over_2pi": to_over_2pi(params.g),
            "n_atoms": params.n_atoms,
            "kappa_over_2pi": to_over_2pi(params.kappa),
            "gamma_h_over_2pi": to_over_2pi(params.gamma_h),
        },
        provenance=["bistability saturation uses gamma_2 = gamma_h"],
    )


@scenario_step("root_window", "bistable_drive_window", "count_roots_bruteforce", "solve_output")
def root_window_step(state: ScenarioState, store: OutputStore) -> StepResult:
    params = _bistability_params(state.config)
    window = bistable_drive_window(params, params.omega_a)
    if window is None:
        return StepResult(outputs={"three_root_exists": False})
    lower, upper = window
    probe = math.sqrt(lower * upper)
    brute = count_roots_bruteforce(probe, params.omega_a, params)
    solved = solve_output(probe, params.omega_a, params).count
    max_drive = drive_from_power(max(state.config.bistability.powers), params)
    return StepResult(
        outputs={
            "lower_drive": lower,
            "upper_drive": upper,
            "probe_drive": probe,
            "bruteforce_roots": brute,
            "solved_roots": solved,
            "three_root_exists": brute == 3 and solved == 3,
            "max_drive": max_drive,
        }
    )


@scenario_step("empty_cavity", "sweep")
def empty_cavity_step(state: ScenarioState, store: OutputStore) -> StepResult:
    block = state.config.bistability
    params = _bistability_params(state.config, n_atoms=0.0)
    trace = sweep(params, max(block.powers), block.span, "forward", block.n_points)
    lorentzian = (1.0 - params.external_loss) / (
        1.0 + (trace.laser_detunings / params.kappa) ** 2
    )
    error = float(np.max(np.abs(trace.transmission - lorentzian) / lorentzian))
    hwhm = _half_width(trace.laser_detunings, trace.transmission)
    file = store.write_trace("empty_cavity_forward", trace, "empty_cavity")
    return StepResult(
        outputs={
            "lorentzian_max_rel_error": error,
            "hwhm": hwhm,
            "hwhm_rel_error": abs(hwhm - params.kappa) / params.kappa,
        },
        traces=[file],
    )


@scenario_step("linear_response", "sweep", "linear_response_transmission")
def linear_response_step(state: ScenarioState, store: OutputStore) -> StepResult:
    block = state.config.bistability
    params = _bistability_params(state.config)
    power = LINEAR_DRIVE / (params.coupling_efficiency * params.drive_calibration)
    trace = sweep(params, power, block.span, "forward", block.n_points)
    expected = linear_response_transmission(params, params.omega_c + trace.laser_detunings)
    error = float(np.max(np.abs(trace.transmission - expected) / expected))
    file = store.write_trace("linear_response_forward", trace, "linear_response")
    return StepResult(
        outputs={"power": power, "drive": trace.drive_intensity, "max_rel_error": error},
        traces=[file],
    )


@scenario_step("hysteresis", "sweep", "hysteresis_width")
def hysteresis_step(state: ScenarioState, store: OutputStore) -> StepResult:
    block = state.config.bistability
    params = _bistability_params(state.config)
    powers = sorted(block.powers, reverse=True)
    widths, files = [], []
    for power in powers:
        tag = f"{power * 1e6:g}uW"
        pair = {
            direction: sweep(params, power, block.span, direction, block.n_points)
            for direction in ("forward", "reverse")
        }
        for direction, trace in pair.items():
            files.append(store.write_trace(f"hysteresis_{tag}_{direction}", trace, "hysteresis"))
        widths.append(hysteresis_width(pair["forward"], pair["reverse"]))
        logger.info(f"Hysteresis at {tag}: width {format_over_2pi(widths[-1], 'MHz')}")
    return StepResult(
        outputs={
            "powers": powers,
            "widths": widths,
            "widths_over_2pi": [to_over_2pi(w) for w in widths],
            "present_at_max_power": widths[0] > 0,
            "non_increasing": all(b <= a for a, b in zip(widths, widths[1:], strict=False)),
        },
        traces=files,
        provenance=["sweeps follow the occupied branch; jumps refined by bisection"],
    )


@scenario_step("bistability_fit", "sweep", "fit_bistability")
def bistability_fit_step(state: ScenarioState, store: OutputStore) -> StepResult:
    block = state.config.bistability.fit
    truth = _bistability_params(state.config)
    trace = sweep(truth, block.power, block.span, "forward", block.n_points)
    file = store.write_trace("bistability_fit_forward", trace, "bistability_fit")
    start = truth.model_copy(update={"g": block.initial_coupling})
    result = fit_bistability([trace], start)
    return StepResult(
        outputs={
            "g": result.estimate.g,
            "g_over_2pi": result.estimate.g_over_2pi,
            "initial_g_over_2pi": to_over_2pi(block.initial_coupling),
            "converged": result.fit.converged,
            "residual_norm": result.fit.residual_norm,
        },
        fit=result.fit,
        traces=[file],
    )


@scenario_step("heating", "fit_heating_quadratic")
def heating_step(state: ScenarioState, store: OutputStore) -> StepResult:
    block = state.config.heating
    if block.positioner_steps is not None:
        distances = np.asarray(block.positioner_steps, dtype=float) * block.step_size
    else:
        distances = np.asarray(block.distances, dtype=float)

    provenance = []
    if block.t2_values:
        t2_values = np.asarray(block.t2_values, dtype=float)
    else:
        t2_far = block.t2_far or state.config.ion.t2
        heat_load = (block.reference_distance / distances) ** 2
        t2_values = t2_far * (1.0 - block.drop_fraction * heat_load)
        provenance.append("heating series is synthetic: T2 falls with a 1/d^2 heat load")

    if block.positioner_steps is not None:
        fit = fit_heating_quadratic(
            t2_values, positioner_steps=block.positioner_steps, step_size=block.step_size
        )
    else:
        fit = fit_heating_quadratic(t2_values, distances=distances)
    store.write_columns(
        "heating_series.dat", {"distance": distances, "t2": t2_values}, {"distance": "m", "t2": "s"}
    )
    return StepResult(
        outputs={
            "a": fit["a"],
            "b": fit["b"],
            "c": fit["c"],
            "r_squared": fit.diagnostics["r_squared"],
            "monotone_increasing": fit.diagnostics["monotone_increasing"],
        },
        fit=fit,
        provenance=provenance,
    )


def handle_error(state: ScenarioState) -> dict:
    """Record that the run stopped at a failed step.

    Args:
        state: Current scenario state (includes error)

    Returns:
        Dict with a provenance note
    """
    logger.error(f"Scenario {state.scenario} stopped at step {state.failed_step}: {state.error}")
    return {"provenance": [f"run stopped at failed step {state.failed_step}"]}


def finalize(state: ScenarioState) -> dict:
    """Evaluate acceptance checks, build the report and write it to the output directory.

    Args:
        state: Current scenario state

    Returns:
        Dict with the final report
    """
    checks = evaluate_checks(state.config.acceptance, state.steps)
    report = ScenarioReport(
        scenario=state.scenario,
        config_name=state.config.name,
        config=config_snapshot(state.config),
        seed=state.seed,
        steps=state.steps,
        fits=state.fits,
        traces=state.traces,
        checks=checks,
        provenance=state.provenance,
        failed_step=state.failed_step,
        generated_at=datetime.now(UTC).isoformat(timespec="seconds"),
        wall_time=time.perf_counter() - state.started_at,
    )
    OutputStore(state.output_dir).write_text(REPORT_FILE, report.to_json())

    n_failed = sum(c.passed is False for c in checks)
    logger.info(
        f"Finalized {state.scenario}: {len(state.steps)} steps, {len(checks)} checks, "
        f"{n_failed} failed, passed={report.passed}"
    )
    return {"report": report}
