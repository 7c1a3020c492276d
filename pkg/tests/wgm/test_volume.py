"""Tests for mode volumes and the single-photon field."""

import math

import numpy as np
import pytest

from src.cqed.rates import g_from_dipole
from src.model.constants import HBAR
from src.model.errors import PreconditionError
from src.model.schemas import ResonatorSpec
from src.wgm.modes import find_fundamental_mode
from src.wgm.volume import grid_mode_volume, mode_volume, peak_field_per_photon, radial_profile

PR_WAVELENGTH = 605.977e-9


def sphere(radius: float, n: float = 1.8) -> ResonatorSpec:
    return ResonatorSpec(radius=radius, refractive_index=n, quality_factor=1e6)


@pytest.fixture(scope="module")
def resonator_a_mode():
    """Fundamental TE mode of the 1.95 mm sphere."""
    return find_fundamental_mode(sphere(1.95e-3), PR_WAVELENGTH)


class TestGridModeVolume:
    """Tests for grid_mode_volume."""

    def test_uniform_unit_cube(self):
        """Test that a uniform field in a unit cube has V = 1 m³."""
        axis = np.linspace(0.0, 1.0, 11)

        assert grid_mode_volume(np.ones((11, 11, 11)), [axis, axis, axis]) == pytest.approx(1.0)

    def test_peak_normalisation(self):
        """Test that scaling the field does not change V."""
        axis = np.linspace(0.0, 2.0, 21)
        field = np.outer(np.sin(axis) ** 2 + 0.1, np.ones(21))

        assert grid_mode_volume(5 * field, [axis, axis]) == pytest.approx(
            grid_mode_volume(field, [axis, axis])
        )

    def test_zero_field(self):
        """Test that an all-zero profile is rejected."""
        axis = np.linspace(0.0, 1.0, 3)

        with pytest.raises(PreconditionError):
            grid_mode_volume(np.zeros((3, 3)), [axis, axis])


class TestModeVolume:
    """Tests for mode_volume."""

    def test_resonator_a_sphere(self, resonator_a_mode):
        """Test V ≈ 5.40e-13 m³ for the 1.95 mm sphere within 15%."""
        result = mode_volume(resonator_a_mode)

        assert result.method == "asymptotic_large_l"
        assert result.volume == pytest.approx(5.40e-13, rel=0.15)
        assert 0 < result.estimated_relative_error < 0.01

    def test_exact_branch_converges(self):
        """Test that the exact quadrature reports its refinement error."""
        mode = find_fundamental_mode(sphere(10e-6), 0.6e-6)

        result = mode_volume(mode)

        assert result.method == "exact_small_l"
        assert result.estimated_relative_error < 1e-3
        assert result.refinements >= 1
        assert result.grid_shape is not None

    @pytest.mark.slow
    def test_exact_and_asymptotic_agree_at_25_microns(self):
        """Test agreement within max(2·error estimate, 5%) in the overlap region."""
        exact_mode = find_fundamental_mode(sphere(25e-6), PR_WAVELENGTH, method="exact")
        asymptotic_mode = find_fundamental_mode(
            sphere(25e-6), PR_WAVELENGTH, method="asymptotic"
        )

        exact = mode_volume(exact_mode)
        asymptotic = mode_volume(asymptotic_mode)

        tolerance = max(2 * asymptotic.estimated_relative_error, 0.05)
        assert 300 <= exact_mode.size_parameter <= 500
        assert abs(asymptotic.volume - exact.volume) / exact.volume <= tolerance

    def test_monotone_in_radius_asymptotic(self):
        """Test that V grows along a geometric radius ladder at fixed wavelength."""
        volumes = [
            mode_volume(find_fundamental_mode(sphere(r), PR_WAVELENGTH)).volume
            for r in (0.25e-3, 0.5e-3, 1e-3, 2e-3, 4e-3)
        ]

        assert all(b > a for a, b in zip(volumes, volumes[1:]))

    @pytest.mark.slow
    def test_monotone_in_radius_exact(self):
        """Test monotonicity on the exact branch."""
        volumes = [
            mode_volume(find_fundamental_mode(sphere(r), PR_WAVELENGTH)).volume
            for r in (8e-6, 12e-6, 18e-6)
        ]

        assert all(b > a for a, b in zip(volumes, volumes[1:]))


class TestPeakFieldPerPhoton:
    """Tests for peak_field_per_photon."""

    def test_consistent_with_dipole_coupling(self, resonator_a_mode):
        """Test g_from_dipole = μ·E_photon/ħ."""
        volume = 5.40e-13
        mu = 1.5911e-32
        omega = 2 * math.pi * 299_792_458.0 / resonator_a_mode.resonance_wavelength

        field = peak_field_per_photon(resonator_a_mode, volume)
        estimate = g_from_dipole(mu, resonator_a_mode.refractive_index, omega, volume)

        assert mu * field / HBAR == pytest.approx(estimate.g, rel=1e-12)

    def test_quadrupled_volume_halves_field(self, resonator_a_mode):
        """Test the 1/√V law."""
        assert peak_field_per_photon(resonator_a_mode, 4e-13) == pytest.approx(
            peak_field_per_photon(resonator_a_mode, 1e-13) / 2
        )

    def test_accepts_volume_result(self, resonator_a_mode):
        """Test that a ModeVolumeResult can be passed directly."""
        result = mode_volume(resonator_a_mode)

        assert peak_field_per_photon(resonator_a_mode, result) == pytest.approx(
            peak_field_per_photon(resonator_a_mode, result.volume)
        )

    def test_rejects_zero_volume(self, resonator_a_mode):
        """Test that V must be positive."""
        with pytest.raises(PreconditionError):
            peak_field_per_photon(resonator_a_mode, 0.0)


class TestRadialProfile:
    """Tests for radial_profile."""

    def test_asymptotic_profile(self, resonator_a_mode):
        """Test normalisation and decay outside for the Airy profile."""
        radii, values = radial_profile(resonator_a_mode, points=300)

        assert values.max() == pytest.approx(1.0)
        assert np.all(values >= 0)
        assert values[-1] < 1e-6
        assert radii[np.argmax(values)] < resonator_a_mode.radius

    def test_exact_profile(self):
        """Test the exact equatorial profile."""
        mode = find_fundamental_mode(sphere(10e-6), 0.6e-6)

        radii, values = radial_profile(mode, points=200)

        assert radii.size == 200
        assert values.max() == pytest.approx(1.0)
        assert values[-1] < 1e-6
