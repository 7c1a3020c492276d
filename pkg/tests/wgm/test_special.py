"""Tests for the large-order Riccati-Bessel helpers."""

import numpy as np
import pytest
from scipy import special

from src.wgm.special import airy_constants, chi_log_derivative, chi_ratio, neumann_log, riccati_psi


class TestNeumannLog:
    """Tests for the rescaled Neumann recurrence."""

    @pytest.mark.parametrize("order", [0, 1, 2, 10, 40])
    def test_matches_scipy_where_finite(self, order):
        """Test sign·exp(log) against scipy for orders where y_l is representable."""
        z = np.array([3.0, 7.5, 20.0, 55.0])

        log_y, sign, _ = neumann_log(order, z)

        np.testing.assert_allclose(
            sign * np.exp(log_y), special.spherical_yn(order, z), rtol=1e-10, atol=1e-14
        )

    def test_ratio_is_consecutive_quotient(self):
        """Test that the returned ratio is y_l/y_{l-1}."""
        z = np.array([4.0, 9.0])

        _, _, ratio = neumann_log(12, z)

        np.testing.assert_allclose(
            ratio, special.spherical_yn(12, z) / special.spherical_yn(11, z), rtol=1e-10
        )

    def test_large_order_stays_finite(self):
        """Test that log|y_l| is finite where y_l itself would overflow."""
        log_y, sign, _ = neumann_log(2000, np.array([300.0]))

        assert np.isfinite(log_y[0])
        assert log_y[0] > 709  # beyond float64 range
        assert sign[0] == -1.0


class TestRiccatiHelpers:
    """Tests for ψ, χ'/χ and χ ratios."""

    def test_psi_derivative(self):
        """Test ψ' against a central difference."""
        z, h = 30.0, 1e-5

        _, dpsi = riccati_psi(25, z)
        plus, _ = riccati_psi(25, z + h)
        minus, _ = riccati_psi(25, z - h)

        assert float(dpsi) == pytest.approx(float(plus - minus) / (2 * h), rel=1e-6)

    def test_chi_log_derivative_against_scipy(self):
        """Test χ'/χ = (y + z·y')/(z·y)."""
        z = np.array([5.0, 12.0, 18.0])
        y = special.spherical_yn(20, z)
        dy = special.spherical_yn(20, z, derivative=True)

        np.testing.assert_allclose(chi_log_derivative(20, z), (y + z * dy) / (z * y), rtol=1e-9)

    def test_chi_ratio_at_reference_is_one(self):
        """Test that χ(z_ref)/χ(z_ref) = 1."""
        assert chi_ratio(50, np.array([20.0]), 20.0)[0] == pytest.approx(1.0)


class TestAiryConstants:
    """Tests for the Airy constants."""

    def test_values(self):
        """Test the tabulated first zeros and companion values."""
        c = airy_constants()

        assert c["a1"] == pytest.approx(-2.338107, abs=1e-6)
        assert c["a1_prime"] == pytest.approx(-1.018793, abs=1e-6)
        assert c["ai_prime_at_a1"] == pytest.approx(0.701211, abs=1e-6)
        assert c["ai_at_a1_prime"] == pytest.approx(0.535657, abs=1e-6)
