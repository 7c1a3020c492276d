"""Domain types shared by every package.

Configuration-facing types (``IonSpecies``, ``ResonatorSpec``) accept unit strings and
are frozen after validation. Trace types carry numpy arrays and are compared with
``np.array_equal`` so that a written-then-read trace is equal to the original.
"""

import math
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from src.model.constants import SPEED_OF_LIGHT
from src.model.units import (
    AngularRate,
    Angle,
    DipoleMoment,
    Dimensionless,
    Duration,
    Length,
    Rate,
    Volume,
)

Polarization = Literal["TE", "TM"]
Detection = Literal["heterodyne", "direct"]
SweepDirection = Literal["forward", "reverse"]


class FrozenModel(BaseModel):
    """Immutable, strict base for validated domain records."""

    model_config = ConfigDict(frozen=True, extra="forbid")


class IonSpecies(FrozenModel):
    """Optical transition of the dopant ion.

    Attributes:
        label: Human-readable name, e.g. ``Pr3+:Y2SiO5``
        transition_wavelength: Vacuum wavelength of the transition (m)
        dipole_moment: Transition dipole moment μ (C·m)
        t1: Population lifetime (s)
        t2: Optical coherence time (s)
        hole_lifetimes: Spectral-hole lifetimes (s), fastest first
        hole_weights: Relative weights of the hole-lifetime components
        comparison_t1: T1 measured away from the resonator surface, if known
        comparison_t2: T2 measured in the bulk / through the resonator, if known
    """

    label: str = "ion"
    transition_wavelength: Length = Field(..., gt=0)
    dipole_moment: DipoleMoment = Field(..., gt=0)
    t1: Duration = Field(..., gt=0)
    t2: Duration = Field(..., gt=0)
    hole_lifetimes: list[Duration] = Field(default_factory=list)
    hole_weights: list[Dimensionless] | None = None
    comparison_t1: Duration | None = None
    comparison_t2: Duration | None = None

    @model_validator(mode="after")
    def _check_physical_bounds(self) -> "IonSpecies":
        if self.t2 > 2.0 * self.t1:
            raise ValueError(f"T2 <= 2*T1 violated (T2={self.t2:g} s, T1={self.t1:g} s)")
        if any(t <= 0 for t in self.hole_lifetimes):
            raise ValueError("hole lifetimes must be positive")
        if any(t is not None and t <= 0 for t in (self.comparison_t1, self.comparison_t2)):
            raise ValueError("comparison lifetimes must be positive")
        if self.hole_weights is not None:
            if len(self.hole_weights) != len(self.hole_lifetimes):
                raise ValueError("hole_weights must match hole_lifetimes in length")
            if any(w < 0 for w in self.hole_weights) or sum(self.hole_weights) <= 0:
                raise ValueError("hole_weights must be non-negative with a positive sum")
        return self

    @property
    def transition_frequency(self) -> float:
        """ω_a = 2πc/λ in rad/s."""
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.transition_wavelength

    @property
    def normalized_hole_weights(self) -> list[float]:
        """Hole-lifetime weights summing to one (equal weights when none are configured)."""
        if not self.hole_lifetimes:
            return []
        weights = self.hole_weights or [1.0] * len(self.hole_lifetimes)
        total = float(sum(weights))
        return [w / total for w in weights]


class ResonatorSpec(FrozenModel):
    """Whispering-gallery resonator geometry and loss.

    Attributes:
        label: Resonator name (``A``, ``B``, ...)
        radius: Sphere radius R (m)
        refractive_index: n_r of the host crystal
        quality_factor: Loaded Q
        shape: Geometry idealisation, only ``sphere`` is supported
        coupling_efficiency: Fraction η of input power coupled into the mode
        polarization: Polarization of the mode used for the mode volume
        mode_volume: Optional externally supplied mode volume (m³); overrides the solver
    """

    label: str = "resonator"
    radius: Length = Field(..., gt=0)
    refractive_index: Dimensionless = Field(..., gt=1)
    quality_factor: Dimensionless = Field(..., gt=0)
    shape: Literal["sphere"] = "sphere"
    coupling_efficiency: Dimensionless = Field(default=1.0, ge=0, le=1)
    polarization: Polarization = "TE"
    mode_volume: Volume | None = None

    @model_validator(mode="after")
    def _check_mode_volume(self) -> "ResonatorSpec":
        if self.mode_volume is not None and self.mode_volume <= 0:
            raise ValueError("mode_volume must be positive")
        return self


class CavityQedParams(FrozenModel):
    """Cavity-QED rate set and the critical numbers derived from it.

    N0 and n0 are computed from the rates on access, so they hold exactly by
    construction.
    """

    g: AngularRate = Field(..., gt=0)
    kappa: AngularRate = Field(..., gt=0)
    gamma: AngularRate = Field(..., gt=0)
    gamma_h: AngularRate = Field(..., gt=0)

    @computed_field
    @property
    def N0(self) -> float:
        """Critical atom number 2γ_hκ/g²."""
        return 2.0 * self.gamma_h * self.kappa / self.g**2

    @computed_field
    @property
    def n0(self) -> float:
        """Saturation photon number γγ_h/(4g²)."""
        return self.gamma * self.gamma_h / (4.0 * self.g**2)


class Pulse(FrozenModel):
    """A driving pulse.

    Attributes:
        start: Start time (s)
        duration: Pulse length τ (s)
        area: Pulse area Θ = Ωτ (rad)
        carrier_detuning: Carrier offset from the ensemble centre (rad/s, signed)
        phase: Optical phase of the pulse (rad)
    """

    start: Duration = 0.0
    duration: Duration = Field(..., gt=0)
    area: Angle = Field(..., gt=0)
    carrier_detuning: Rate = 0.0
    phase: Angle = 0.0

    @property
    def center(self) -> float:
        """Time at which the hard-pulse rotation is applied."""
        return self.start + 0.5 * self.duration

    @property
    def end(self) -> float:
        return self.start + self.duration

    @property
    def rabi_frequency(self) -> float:
        """Ω = Θ/τ implied by the pulse."""
        return self.area / self.duration


class TraceModel(BaseModel):
    """Base for traces holding numpy arrays."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    def __eq__(self, other: object) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        for name in type(self).model_fields:
            mine, theirs = getattr(self, name), getattr(other, name)
            if isinstance(mine, np.ndarray):
                if not (mine.dtype == theirs.dtype and np.array_equal(mine, theirs)):
                    return False
            elif mine != theirs:
                return False
        return True

    __hash__ = None  # type: ignore[assignment]


class EchoTrace(TraceModel):
    """Detected echo signal.

    Heterodyne amplitudes are complex (beat note at ``lo_offset``); direct-detection
    amplitudes are real intensities.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    detection: Detection
    lo_offset: AngularRate | None = None
    metadata: dict[str, Any] = Field(default_factory=dict)

    @field_validator("times", mode="before")
    @classmethod
    def _as_time_array(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=float)

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _as_amplitude_array(cls, v: Any) -> np.ndarray:
        arr = np.asarray(v)
        return arr.astype(complex) if np.iscomplexobj(arr) else arr.astype(float)

    @model_validator(mode="after")
    def _check_trace(self) -> "EchoTrace":
        if self.times.ndim != 1 or self.amplitudes.shape != self.times.shape:
            raise ValueError("times and amplitudes must be 1-D arrays of equal length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.detection == "direct":
            if np.iscomplexobj(self.amplitudes) or np.any(self.amplitudes < 0):
                raise ValueError("direct-detection amplitudes must be real and non-negative")
        elif self.lo_offset is None or self.lo_offset <= 0:
            raise ValueError("heterodyne traces need a positive lo_offset")
        return self

    @property
    def envelope(self) -> np.ndarray:
        """Detector envelope: |amplitude| (heterodyne) or the intensity itself (direct)."""
        return np.abs(self.amplitudes)

    @property
    def peak(self) -> float:
        return float(self.envelope.max()) if self.envelope.size else 0.0


class SweepTrace(TraceModel):
    """Cavity transmission recorded while the laser is swept."""

    laser_detunings: np.ndarray
    transmission: np.ndarray
    direction: SweepDirection
    branch_count: np.ndarray
    drive_intensity: float = Field(default=0.0, ge=0)
    metadata: dict[str, Any] = Field(default_factory=dict)

    @field_validator("laser_detunings", "transmission", mode="before")
    @classmethod
    def _as_float_array(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=float)

    @field_validator("branch_count", mode="before")
    @classmethod
    def _as_count_array(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=np.int64)

    @model_validator(mode="after")
    def _check_trace(self) -> "SweepTrace":
        n = self.laser_detunings.size
        if self.transmission.shape != (n,) or self.branch_count.shape != (n,):
            raise ValueError("sweep arrays must be 1-D and of equal length")
        if np.any(self.transmission < 0) or np.any(self.transmission > 1.0 + 1e-9):
            raise ValueError("transmission must lie in [0, 1]")
        steps = np.diff(self.laser_detunings)
        if self.direction == "forward" and np.any(steps <= 0):
            raise ValueError("forward sweep detunings must increase")
        if self.direction == "reverse" and np.any(steps >= 0):
            raise ValueError("reverse sweep detunings must decrease")
        return self
