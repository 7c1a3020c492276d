"""Tests for the fundamental-mode search."""

import math

import numpy as np
import pytest

from src.model.errors import ModeSearchError
from src.model.schemas import ResonatorSpec
from src.wgm.modes import (
    EXACT_SIZE_PARAMETER_LIMIT,
    asymptotic_size_parameter,
    characteristic_function,
    exact_size_parameter,
    find_fundamental_mode,
    resonance_wavelength,
    size_parameter,
)

PR_WAVELENGTH = 605.977e-9


def sphere(radius: float, n: float = 1.8, polarization: str = "TE") -> ResonatorSpec:
    return ResonatorSpec(
        radius=radius, refractive_index=n, quality_factor=1e6, polarization=polarization
    )


class TestFindFundamentalMode:
    """Tests for find_fundamental_mode."""

    def test_millimetre_sphere_uses_asymptotics(self):
        """Test that R = 1.95 mm gives l ≈ 3.6e4 from the asymptotic branch."""
        mode = find_fundamental_mode(sphere(1.95e-3), PR_WAVELENGTH)

        assert mode.branch == "asymptotic"
        assert 3.5e4 < mode.polar_index < 3.7e4
        assert mode.azimuthal_index == mode.polar_index
        assert mode.radial_index == 1
        assert mode.field_profile is None
        # within half a free spectral range of the target
        offset = abs(mode.resonance_wavelength - PR_WAVELENGTH)
        assert offset < PR_WAVELENGTH / mode.polar_index

    def test_ten_micron_sphere_uses_exact_solver(self):
        """Test that R = 10 µm gives an exact-branch mode with l of order 180."""
        mode = find_fundamental_mode(sphere(10e-6), 0.6e-6)

        assert mode.branch == "exact"
        assert 160 <= mode.polar_index <= 200
        assert mode.residual is not None and mode.residual < 1e-8
        assert abs(mode.resonance_wavelength - 0.6e-6) / 0.6e-6 < 0.01

    def test_exact_mode_profile(self):
        """Test that the field profile is non-negative and decays outside the sphere."""
        mode = find_fundamental_mode(sphere(10e-6), 0.6e-6)
        profile = mode.field_profile

        assert profile is not None
        assert np.all(profile.values >= 0)
        equator = profile.values[:, profile.polar_angles.size // 2]
        assert equator[-1] < 1e-10 * equator.max()
        assert profile.radii[np.argmax(equator)] < mode.radius

    def test_branch_override(self):
        """Test that the asymptotic solver can be forced on a small sphere."""
        mode = find_fundamental_mode(sphere(10e-6), 0.6e-6, method="asymptotic")

        assert mode.branch == "asymptotic"
        assert mode.residual is None

    def test_tm_polarization(self):
        """Test that TM is solved when requested."""
        mode = find_fundamental_mode(sphere(10e-6), 0.6e-6, polarization="TM")

        assert mode.polarization == "TM"
        assert mode.residual < 1e-8

    def test_no_resonance_near_target(self):
        """Test that a sphere far too small for the wavelength raises with bracket state."""
        with pytest.raises(ModeSearchError) as exc_info:
            find_fundamental_mode(sphere(0.05e-6), 0.6e-6)

        assert exc_info.value.bracket

    def test_unknown_method(self):
        """Test that an unknown solver name is rejected."""
        with pytest.raises(ValueError, match="Unknown"):
            find_fundamental_mode(sphere(10e-6), 0.6e-6, method="fdtd")


class TestResonanceWavelength:
    """Tests for the per-l resonance solvers."""

    @pytest.mark.parametrize("branch", ["exact", "asymptotic"])
    def test_doubling_radius_doubles_wavelength(self, branch):
        """Test the scale invariance of the resonance condition at fixed l."""
        small = resonance_wavelength(10e-6, 1.8, 150, branch=branch)
        large = resonance_wavelength(20e-6, 1.8, 150, branch=branch)

        assert large == pytest.approx(2 * small, rel=1e-12)

    @pytest.mark.parametrize("polarization", ["TE", "TM"])
    def test_exact_and_asymptotic_roots_agree(self, polarization):
        """Test that the Airy expansion lands on the exact root at l = 180."""
        exact, _ = exact_size_parameter(180, 1.8, polarization)
        asymptotic = asymptotic_size_parameter(180, 1.8, polarization)

        assert abs(exact - asymptotic) < 0.05

    def test_te_resonates_below_tm(self):
        """Test that TE sits at a smaller size parameter than TM for the same l."""
        te, _ = exact_size_parameter(100, 1.8, "TE")
        tm, _ = exact_size_parameter(100, 1.8, "TM")

        assert te < tm

    def test_root_residual(self):
        """Test the characteristic-function residual at the reported root."""
        z, residual = exact_size_parameter(60, 2.0, "TE")

        assert residual < 1e-8
        assert abs(characteristic_function(60, z, 2.0, "TE")[0]) < 1e-8


class TestSizeParameter:
    """Tests for size_parameter."""

    def test_crossover_constant(self):
        """Test the documented crossover value."""
        assert EXACT_SIZE_PARAMETER_LIMIT == 500.0

    def test_resonator_a_sphere(self):
        """Test x = 2πRn/λ for the 1.95 mm sphere."""
        assert size_parameter(1.95e-3, 1.8, PR_WAVELENGTH) == pytest.approx(
            2 * math.pi * 1.95e-3 * 1.8 / PR_WAVELENGTH
        )
