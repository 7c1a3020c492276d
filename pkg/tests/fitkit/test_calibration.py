"""Tests for the π-pulse and heating-quadratic fits."""

import math

import numpy as np
import pytest

from src.echo.schemas import EnsembleSpec
from src.echo.sequences import echo_area_scan
from src.fitkit.calibration import fit_heating_quadratic, fit_pi_pulse
from src.model.errors import FitError

RABI = 9.82e6
DURATIONS = np.linspace(0.04e-6, 0.64e-6, 31)


def _area_curve(durations, rabi=RABI, scale=1.0):
    return scale * np.sin(rabi * durations / 2) ** 2


class TestFitPiPulse:
    """Tests for fit_pi_pulse."""

    def test_recovers_rabi_frequency(self):
        """Test the noise-free sin² shape gives Ω and τ_π = π/Ω."""
        result = fit_pi_pulse(DURATIONS, _area_curve(DURATIONS, scale=0.4))

        assert result["rabi_frequency"] == pytest.approx(RABI, rel=1e-6)
        assert result["tau_pi"] == pytest.approx(math.pi / RABI, rel=1e-6)
        assert result["amplitude"] == pytest.approx(0.4, rel=1e-6)
        assert result.units["tau_pi"] == "s"

    def test_reports_raw_argmax(self):
        """Test the model-free argmax cross-check."""
        result = fit_pi_pulse(DURATIONS, _area_curve(DURATIONS))

        assert result.diagnostics["argmax_duration"] == pytest.approx(0.32e-6, abs=0.02e-6)

    def test_scale_invariance(self):
        """Test that multiplying every amplitude by 5 leaves τ_π unchanged."""
        signal = _area_curve(DURATIONS) * (1 + 0.01 * np.cos(np.arange(DURATIONS.size)))

        base = fit_pi_pulse(DURATIONS, signal)
        scaled = fit_pi_pulse(DURATIONS, 5 * signal)

        assert scaled["tau_pi"] == pytest.approx(base["tau_pi"], rel=1e-9)

    def test_truncated_scan(self):
        """Test that a scan ending before the peak is an error, not an extrapolation."""
        durations = np.linspace(0.04e-6, 0.25e-6, 10)

        with pytest.raises(FitError, match="no interior maximum"):
            fit_pi_pulse(durations, _area_curve(durations))

    def test_simulated_area_scan(self):
        """Test τ_π = 0.32 µs within 2% from a simulated echo-area scan."""
        ensemble = EnsembleSpec(
            inhomogeneous_width=2 * math.pi * 5e9, n_classes=401, t1=187e-6, t2=68e-6
        )
        scan = echo_area_scan(ensemble, RABI, DURATIONS)

        result = fit_pi_pulse(scan.durations, scan.amplitudes)

        assert result["tau_pi"] == pytest.approx(0.32e-6, rel=0.02)


class TestFitHeatingQuadratic:
    """Tests for fit_heating_quadratic."""

    def test_exact_quadratic(self):
        """Test that exact quadratic data returns its coefficients."""
        distances = np.linspace(100e-9, 1e-6, 12)
        a, b, c = 2.0e7, 10.0, 20e-6

        result = fit_heating_quadratic(a * distances**2 + b * distances + c, distances=distances)

        assert result["a"] == pytest.approx(a, rel=1e-9)
        assert result["b"] == pytest.approx(b, rel=1e-9)
        assert result["c"] == pytest.approx(c, rel=1e-9)
        assert result.diagnostics["r_squared"] == pytest.approx(1.0)

    def test_constant_data(self):
        """Test that a flat T2 gives a = b = 0 and c equal to the mean."""
        distances = np.linspace(100e-9, 1e-6, 8)

        result = fit_heating_quadratic(np.full(8, 25e-6), distances=distances)

        assert result["a"] * 1e-12 == pytest.approx(0.0, abs=1e-18)
        assert result["b"] * 1e-6 == pytest.approx(0.0, abs=1e-18)
        assert result["c"] == pytest.approx(25e-6, rel=1e-12)
        assert result.diagnostics["r_squared"] == 1.0

    def test_inverse_square_heat_load(self):
        """Test a 1/d² heat load through a linear T2 response from positioner steps."""
        steps = np.arange(20, 29)
        distances = steps * 35e-9
        t2 = 30e-6 - 5e-6 * (700e-9 / distances) ** 2

        result = fit_heating_quadratic(t2, positioner_steps=steps)

        assert result.diagnostics["r_squared"] > 0.99
        assert result.diagnostics["monotone_increasing"] is True

    def test_needs_three_distinct_distances(self):
        """Test that a design with two distinct distances is rejected."""
        with pytest.raises(FitError, match="3 distinct"):
            fit_heating_quadratic([1e-5, 2e-5, 2e-5, 1e-5], distances=[1e-7, 2e-7, 2e-7, 1e-7])

    def test_distance_source_is_exclusive(self):
        """Test that distances and positioner steps cannot both be given."""
        with pytest.raises(FitError, match="exactly one"):
            fit_heating_quadratic([1.0, 2.0, 3.0], distances=[1, 2, 3], positioner_steps=[1, 2, 3])
