"""Experiment configuration schema.

An ``ExperimentConfig`` bundles the ion, the resonator and one optional block per
scenario family. All blocks are frozen pydantic models with defaults that reproduce the
Resonator-A measurements, so a config file only needs to state what differs.
"""

import math
from typing import Literal

import numpy as np
from pydantic import Field, model_validator

from src.model.schemas import Detection, FrozenModel, IonSpecies, ResonatorSpec
from src.model.units import Angle, Dimensionless, Duration, Length, Power, Rate, Volume

SCHEMA_VERSION = 1

TWO_PI = 2.0 * math.pi


class SweepRange(FrozenModel):
    """Linearly spaced sample points ``start..stop`` (inclusive)."""

    start: float
    stop: float
    points: int = Field(..., ge=1)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


class DurationRange(SweepRange):
    start: Duration
    stop: Duration


class CqedBlock(FrozenModel):
    """Inputs of the cavity-QED calibration chain.

    Attributes:
        input_power: Laser power in front of the coupling prism (W)
        pi_pulse_area: Area of the calibration pulse (rad)
        pi_pulse_duration: Length of the calibration pulse (s)
        reported_coupling: g used for the critical numbers; the echo-calibrated g when unset
        reference_mode_volume: V for the dipole route; resonator/solver value when unset
        bistability_coupling: g obtained from bistability modelling, listed in the summary table
    """

    input_power: Power = Field(default=700e-6, gt=0)
    pi_pulse_area: Angle = Field(default=math.pi, gt=0)
    pi_pulse_duration: Duration = Field(default=0.32e-6, gt=0)
    reported_coupling: Rate | None = None
    reference_mode_volume: Volume | None = None
    bistability_coupling: Rate | None = None


class WgmBlock(FrozenModel):
    """Mode-solver options."""

    method: Literal["auto", "exact", "asymptotic"] = "auto"
    target_wavelength: Length | None = None
    overlap_radius: Length | None = None
    profile_points: int = Field(default=400, ge=16)


class AccumulatedBlock(FrozenModel):
    """Accumulated-echo preparation and retrieval.

    Attributes:
        n_pairs: Number of preparation pulse pairs
        pair_separation: τ_s between the two pulses of a pair (s)
        repetition: τ_r between consecutive pairs (s), must exceed T2
        accumulation_efficiency: Fraction of the excited grating stored per pair
        preparation_area: Area of each preparation pulse (rad)
        probe_area: Area of the retrieval pulse (rad)
        wait_sweep: Waiting times T_w between preparation and retrieval (s)
        hole_fit_mode: Two-stage hole model fitted to the retrieved series
    """

    n_pairs: int = Field(default=100, ge=1)
    pair_separation: Duration = Field(default=2e-6, gt=0)
    repetition: Duration = Field(default=500e-6, gt=0)
    accumulation_efficiency: Dimensionless = Field(default=0.02, gt=0, le=1)
    preparation_area: Angle = Field(default=math.pi / 2, gt=0)
    probe_area: Angle = Field(default=math.pi / 2, gt=0)
    wait_sweep: DurationRange = DurationRange(start=0.0, stop=60.0, points=13)
    hole_fit_mode: Literal["piecewise", "sum"] = "sum"


class EchoBlock(FrozenModel):
    """Photon-echo simulation settings."""

    distribution: Literal["gaussian", "lorentzian", "uniform"] = "gaussian"
    inhomogeneous_width: Rate = Field(default=TWO_PI * 5e9, gt=0)
    n_classes: int | None = Field(default=None, ge=3)
    detection: Detection = "heterodyne"
    lo_offset: Rate = Field(default=TWO_PI * 45e6, gt=0)
    rabi_frequency: Rate | None = None
    area_scale: Dimensionless = Field(default=1.0, gt=0)
    tau_sweep: DurationRange = DurationRange(start=10e-6, stop=100e-6, points=10)
    three_pulse_tau: Duration = Field(default=5e-6, gt=0)
    waiting_sweep: DurationRange = DurationRange(start=10e-6, stop=600e-6, points=13)
    accumulated: AccumulatedBlock = AccumulatedBlock()
    area_scan: DurationRange = DurationRange(start=0.04e-6, stop=0.64e-6, points=31)
    noise_level: Dimensionless = Field(default=0.0, ge=0)


class BistabilityFitBlock(FrozenModel):
    """Synthetic round-trip fit of the coupling from a sweep."""

    power: Power = Field(default=40e-6, gt=0)
    span: Rate = Field(default=TWO_PI * 200e6, gt=0)
    n_points: int = Field(default=801, ge=8)
    initial_coupling: Rate = Field(default=TWO_PI * 2.0e3, gt=0)


class BistabilityBlock(FrozenModel):
    """Steady-state Maxwell-Bloch parameters and the sweep protocol.

    ``atom_offset`` places the atomic line at ω_c + atom_offset·κ. ``span`` is the half
    width of the laser sweep around ω_c.
    """

    coupling: Rate = Field(default=TWO_PI * 2.2e3, gt=0)
    n_atoms: Dimensionless = Field(default=1.6e8, ge=0)
    kappa: Rate = Field(default=TWO_PI * 123e6, gt=0)
    gamma_h: Rate = Field(default=TWO_PI * 7.58e3, gt=0)
    gamma: Rate = Field(default=TWO_PI * 2.34e3, gt=0)
    atom_offset: Dimensionless = 0.5
    coupling_efficiency: Dimensionless = Field(default=0.287, ge=0, le=1)
    external_loss: Dimensionless = Field(default=0.2, ge=0, lt=1)
    drive_calibration: float = Field(default=9.6e8, gt=0, description="|y|² per watt")
    powers: list[Power] = Field(
        default_factory=lambda: [800e-6, 400e-6, 200e-6, 100e-6, 80e-6, 40e-6]
    )
    span: Rate = Field(default=TWO_PI * 1e9, gt=0)
    n_points: int = Field(default=2001, ge=3)
    fit: BistabilityFitBlock = BistabilityFitBlock()


class HeatingBlock(FrozenModel):
    """Prism-gap heating data or its synthetic stand-in.

    When ``t2_values`` is empty a 1/d² heat load mapped linearly onto T2 generates the
    series: T2(d) = t2_far·(1 − drop_fraction·(reference_distance/d)²).
    """

    distances: list[Length] = Field(
        default_factory=lambda: [float(d) for d in np.linspace(8e-6, 12e-6, 9)]
    )
    positioner_steps: list[float] | None = None
    step_size: Length = Field(default=35e-9, gt=0)
    t2_values: list[Duration] = Field(default_factory=list)
    t2_far: Duration | None = None
    drop_fraction: Dimensionless = Field(default=0.3, ge=0, lt=1)
    reference_distance: Length = Field(default=8e-6, gt=0)


class AcceptanceCheck(FrozenModel):
    """Expected value of one scenario output.

    Exactly one style is used: ``target`` with ``rel_tol``/``abs_tol``, ``expect`` for a
    boolean, or ``min``/``max`` bounds.
    """

    target: float | None = None
    rel_tol: float | None = Field(default=None, ge=0)
    abs_tol: float | None = Field(default=None, ge=0)
    expect: bool | None = None
    min: float | None = None
    max: float | None = None

    @model_validator(mode="after")
    def _one_style(self) -> "AcceptanceCheck":
        styles = [
            self.target is not None,
            self.expect is not None,
            self.min is not None or self.max is not None,
        ]
        if sum(styles) != 1:
            raise ValueError("use exactly one of target, expect or min/max")
        if self.target is not None and self.rel_tol is None and self.abs_tol is None:
            raise ValueError("a target needs rel_tol or abs_tol")
        return self


class ExperimentConfig(FrozenModel):
    """A complete, validated experiment description."""

    schema_version: Literal[1] = SCHEMA_VERSION
    name: str = "experiment"
    description: str = ""
    ion: IonSpecies
    resonator: ResonatorSpec
    cqed: CqedBlock = CqedBlock()
    wgm: WgmBlock = WgmBlock()
    echo: EchoBlock = EchoBlock()
    bistability: BistabilityBlock = BistabilityBlock()
    heating: HeatingBlock = HeatingBlock()
    acceptance: dict[str, AcceptanceCheck] = Field(default_factory=dict)
