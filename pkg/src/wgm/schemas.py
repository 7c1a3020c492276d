"""Whispering-gallery mode records."""

from typing import Any, Literal

import numpy as np
from pydantic import Field, field_validator, model_validator

from src.model.schemas import FrozenModel, Polarization, TraceModel

SolverBranch = Literal["exact", "asymptotic"]
VolumeMethod = Literal["exact_small_l", "asymptotic_large_l"]


class FieldProfile(TraceModel):
    """ε(r)|E(r)|² sampled on a (r, θ) grid, azimuth integrated out.

    Attributes:
        radii: Radial sample points (m), increasing
        polar_angles: Polar sample points (rad), increasing, symmetric about π/2
        values: Array of shape (len(radii), len(polar_angles)), arbitrary units
    """

    radii: np.ndarray
    polar_angles: np.ndarray
    values: np.ndarray

    @field_validator("radii", "polar_angles", "values", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=float)

    @model_validator(mode="after")
    def _check_grid(self) -> "FieldProfile":
        if self.values.shape != (self.radii.size, self.polar_angles.size):
            raise ValueError("values must have shape (n_radii, n_polar_angles)")
        if np.any(self.values < 0):
            raise ValueError("field profile must be non-negative")
        return self

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.values.shape


class WgmMode(FrozenModel):
    """A solved resonance of a dielectric sphere.

    Attributes:
        polar_index: l
        azimuthal_index: m (m = l for the fundamental mode)
        radial_index: q (q = 1 for the fundamental mode)
        polarization: TE or TM
        resonance_wavelength: Vacuum wavelength of the resonance (m)
        radius: Sphere radius (m)
        refractive_index: Host index n_r
        branch: Solver that produced the resonance
        size_parameter: n_r·k·R at resonance
        residual: |characteristic function| at the root (exact branch only)
        field_profile: Sampled ε|E|² (exact branch only)
    """

    polar_index: int = Field(..., ge=1)
    azimuthal_index: int
    radial_index: int = Field(default=1, ge=1)
    polarization: Polarization
    resonance_wavelength: float = Field(..., gt=0)
    radius: float = Field(..., gt=0)
    refractive_index: float = Field(..., gt=1)
    branch: SolverBranch
    size_parameter: float = Field(..., gt=0)
    residual: float | None = None
    field_profile: FieldProfile | None = None

    @model_validator(mode="after")
    def _check_indices(self) -> "WgmMode":
        if abs(self.azimuthal_index) > self.polar_index:
            raise ValueError("|m| must not exceed l")
        return self

    @property
    def wavenumber(self) -> float:
        """Vacuum wavenumber k = 2π/λ (1/m)."""
        return 2.0 * np.pi / self.resonance_wavelength


class ModeVolumeResult(FrozenModel):
    """Mode volume and how it was obtained.

    Attributes:
        volume: V (m³)
        method: Quadrature on the exact field or the closed-form asymptotic product
        estimated_relative_error: Last refinement change (exact) or next-order size (asymptotic)
        refinements: Number of grid doublings performed (exact only)
        grid_shape: (n_r, n_θ) of the final quadrature grid (exact only)
    """

    volume: float = Field(..., gt=0)
    method: VolumeMethod
    estimated_relative_error: float = Field(..., ge=0)
    refinements: int = 0
    grid_shape: tuple[int, int] | None = None
