"""Ensemble, sequence and trajectory records of the echo simulator."""

import math
from typing import Any, Literal

import numpy as np
from pydantic import Field, field_validator, model_validator

from src.model.schemas import FrozenModel, Pulse, TraceModel
from src.model.units import Angle, Dimensionless, Duration, Rate

Distribution = Literal["gaussian", "lorentzian", "uniform"]
SequenceKind = Literal["two_pulse", "three_pulse", "accumulated"]

DEFAULT_RABI_FREQUENCY = math.pi / 0.32e-6


class EnsembleSpec(FrozenModel):
    """Inhomogeneously broadened two-level ensemble.

    Attributes:
        inhomogeneous_width: FWHM of the detuning distribution (rad/s)
        distribution: Line shape of the inhomogeneous line
        n_classes: Number of discrete detuning classes
        t1: Population lifetime (s); ``math.inf`` disables population decay
        t2: Coherence lifetime (s); ``math.inf`` disables dephasing
    """

    inhomogeneous_width: Rate = Field(..., gt=0)
    distribution: Distribution = "gaussian"
    n_classes: int = Field(default=2001, ge=3)
    t1: Duration = Field(..., gt=0)
    t2: Duration = Field(..., gt=0)

    @model_validator(mode="after")
    def _check_bound(self) -> "EnsembleSpec":
        if self.t2 > 2.0 * self.t1:
            raise ValueError(f"T2 <= 2*T1 violated (T2={self.t2:g} s, T1={self.t1:g} s)")
        return self


class SequenceTemplate(FrozenModel):
    """Timing and areas of an echo sequence.

    Delays are measured between pulse centres and t = 0 is the centre of the first pulse.
    Pulse durations follow from the areas at a fixed Rabi frequency, so every pulse of a
    sequence is driven at the same power.

    Attributes:
        kind: Sequence family
        tau: Separation of pulses 1 and 2 (two/three pulse)
        waiting_time: Separation of pulses 2 and 3 (three pulse)
        areas: Nominal pulse areas (rad) in sequence order
        rabi_frequency: Ω at the pulse power (rad/s)
        n_pairs: Preparation pulse pairs (accumulated)
        pair_separation: τ_s within a preparation pair (accumulated)
        repetition: τ_r between preparation pairs (accumulated)
        accumulation_efficiency: Fraction of the excited grating stored per pair
        wait: T_w between the end of preparation and the probe (accumulated)
    """

    kind: SequenceKind
    tau: Duration = Field(default=0.0, ge=0)
    waiting_time: Duration = Field(default=0.0, ge=0)
    areas: list[Angle] = Field(default_factory=list)
    rabi_frequency: Rate = Field(default=DEFAULT_RABI_FREQUENCY, gt=0)
    n_pairs: int = Field(default=1, ge=1)
    pair_separation: Duration = Field(default=0.0, ge=0)
    repetition: Duration = Field(default=0.0, ge=0)
    accumulation_efficiency: Dimensionless = Field(default=1.0, gt=0, le=1)
    wait: Duration = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _check_areas(self) -> "SequenceTemplate":
        expected = {"two_pulse": 2, "three_pulse": 3, "accumulated": 2}[self.kind]
        if len(self.areas) != expected:
            raise ValueError(f"{self.kind} needs {expected} pulse areas, got {len(self.areas)}")
        if any(a <= 0 for a in self.areas):
            raise ValueError("pulse areas must be positive")
        return self

    @classmethod
    def two_pulse(
        cls,
        tau: float,
        areas: tuple[float, float] = (math.pi / 2, math.pi),
        rabi_frequency: float = DEFAULT_RABI_FREQUENCY,
    ) -> "SequenceTemplate":
        return cls(kind="two_pulse", tau=tau, areas=list(areas), rabi_frequency=rabi_frequency)

    @classmethod
    def three_pulse(
        cls,
        tau: float,
        waiting_time: float,
        areas: tuple[float, float, float] = (math.pi / 2, math.pi / 2, math.pi / 2),
        rabi_frequency: float = DEFAULT_RABI_FREQUENCY,
    ) -> "SequenceTemplate":
        return cls(
            kind="three_pulse",
            tau=tau,
            waiting_time=waiting_time,
            areas=list(areas),
            rabi_frequency=rabi_frequency,
        )

    @classmethod
    def accumulated(
        cls,
        n_pairs: int,
        pair_separation: float,
        repetition: float,
        accumulation_efficiency: float,
        wait: float = 0.0,
        preparation_area: float = math.pi / 2,
        probe_area: float = math.pi / 2,
        rabi_frequency: float = DEFAULT_RABI_FREQUENCY,
    ) -> "SequenceTemplate":
        """Preparation pairs followed by one probe; ``areas`` holds (preparation, probe)."""
        return cls(
            kind="accumulated",
            n_pairs=n_pairs,
            pair_separation=pair_separation,
            repetition=repetition,
            accumulation_efficiency=accumulation_efficiency,
            wait=wait,
            areas=[preparation_area, probe_area],
            rabi_frequency=rabi_frequency,
        )

    def pulses(
        self, phases: tuple[float, ...] | None = None, area_scale: float = 1.0
    ) -> list[Pulse]:
        """Pulses of a two- or three-pulse sequence, the first one centred on t = 0.

        Args:
            phases: Optical phase per pulse (zeros when omitted)
            area_scale: Factor applied to every pulse area (durations are unchanged)
        """
        if self.kind == "accumulated":
            raise ValueError("accumulated sequences are built from their grating, not pulses")
        phases = phases or (0.0,) * len(self.areas)
        separations = [0.0, self.tau, self.waiting_time][: len(self.areas)]

        pulses: list[Pulse] = []
        center = 0.0
        for area, separation, phase in zip(self.areas, separations, phases):
            duration = area / self.rabi_frequency
            center += separation
            pulses.append(
                Pulse(
                    start=center - duration / 2,
                    duration=duration,
                    area=area * area_scale,
                    phase=phase,
                )
            )
        return pulses

    @property
    def echo_time(self) -> float:
        """Expected echo instant: τ after the last pulse centre (τ_s after the probe)."""
        if self.kind == "accumulated":
            return self.pair_separation
        return self.pulses()[-1].center + self.tau

    def preparation_contrast(self, t2: float) -> float:
        """Grating contrast left by ``n_pairs`` preparation pairs (accumulated only).

        Each pair stores β·½·sin²Θ_p·e^{−τ_s/T2} of the remaining contrast, so N pairs
        give 1 − (1 − β·½·sin²Θ_p·e^{−τ_s/T2})^N.
        """
        per_pair = (
            self.accumulation_efficiency
            * 0.5
            * math.sin(self.areas[0]) ** 2
            * math.exp(-self.pair_separation / t2)
        )
        return 1.0 - (1.0 - per_pair) ** self.n_pairs


class BlochTrajectories(TraceModel):
    """Per-class Bloch vectors sampled on a time grid.

    ``coherence`` holds u + iv and ``population`` holds w, both with shape
    (n_times, n_classes).
    """

    times: np.ndarray
    detunings: np.ndarray
    weights: np.ndarray
    coherence: np.ndarray
    population: np.ndarray
    max_norm: float
    hard_pulse_ratio: float
    metadata: dict[str, Any] = Field(default_factory=dict)

    @field_validator("coherence", mode="before")
    @classmethod
    def _as_complex(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=complex)

    @field_validator("times", "detunings", "weights", "population", mode="before")
    @classmethod
    def _as_float(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=float)

    @property
    def norm(self) -> np.ndarray:
        """Bloch-vector length per sample and class."""
        return np.sqrt(np.abs(self.coherence) ** 2 + self.population**2)

    @property
    def emitted_field(self) -> np.ndarray:
        """Density-weighted sum of coherences, one complex value per sample."""
        return self.coherence @ self.weights


class EchoSeries(TraceModel):
    """Echo peak amplitude against a swept delay, ready for fitting.

    Attributes:
        delays: Swept delay (τ, T or T_w) in s
        amplitudes: Detector peak per delay
        kind: Sequence family
        detection: Detector used
    """

    delays: np.ndarray
    amplitudes: np.ndarray
    kind: SequenceKind
    detection: Literal["heterodyne", "direct"]

    @field_validator("delays", "amplitudes", mode="before")
    @classmethod
    def _as_float(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=float)


class AreaScanResult(TraceModel):
    """Echo amplitude against the second-pulse duration at fixed power."""

    durations: np.ndarray
    amplitudes: np.ndarray
    peak_duration: float
    peak_found: bool

    @field_validator("durations", "amplitudes", mode="before")
    @classmethod
    def _as_float(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=float)
