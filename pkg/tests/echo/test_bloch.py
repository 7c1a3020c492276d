"""Tests for the ensemble grid and hard-pulse Bloch propagation."""

import math

import numpy as np
import pytest

from src.echo.bloch import free_evolution, propagate_bloch, rotate
from src.echo.ensemble import detuning_grid, detuning_span, echo_sample_step
from src.echo.schemas import EnsembleSpec
from src.model.errors import PreconditionError, PulseOverlapError, SamplingError
from src.model.schemas import Pulse


@pytest.fixture
def narrow_ensemble():
    """Three classes within ±π kHz and no relaxation, so coarse grids are allowed."""
    return EnsembleSpec(
        inhomogeneous_width=2 * math.pi * 1e3,
        distribution="uniform",
        n_classes=3,
        t1=math.inf,
        t2=math.inf,
    )


def _pulse(center, area, phase=0.0, duration=1e-7):
    return Pulse(start=center - duration / 2, duration=duration, area=area, phase=phase)


class TestDetuningGrid:
    """Tests for detuning_grid and detuning_span."""

    @pytest.mark.parametrize("distribution", ["gaussian", "lorentzian", "uniform"])
    def test_grid_is_symmetric_with_zero_at_centre(self, distribution):
        """Test the mirror symmetry, the exact zero and the weight normalisation."""
        spec = EnsembleSpec(
            inhomogeneous_width=2 * math.pi * 5e9,
            distribution=distribution,
            n_classes=101,
            t1=1e-3,
            t2=1e-3,
        )

        detunings, weights = detuning_grid(spec)

        assert detunings[50] == 0.0
        np.testing.assert_array_equal(detunings, -detunings[::-1])
        np.testing.assert_allclose(weights, weights[::-1], rtol=1e-14)
        assert weights.sum() == pytest.approx(1.0, rel=1e-14)

    def test_even_class_count_has_no_zero(self):
        """Test that an even grid straddles zero symmetrically."""
        spec = EnsembleSpec(inhomogeneous_width=1.0, n_classes=4, t1=1.0, t2=1.0)

        detunings, _ = detuning_grid(spec)

        assert 0.0 not in detunings
        np.testing.assert_array_equal(detunings, -detunings[::-1])

    def test_spans(self):
        """Test the span of each line shape relative to its FWHM."""
        def spec(distribution):
            return EnsembleSpec(
                inhomogeneous_width=2.0, distribution=distribution, t1=1.0, t2=1.0
            )

        sigma = 2.0 / (2 * math.sqrt(2 * math.log(2)))
        assert detuning_span(spec("gaussian")) == pytest.approx(
            math.sqrt(2 * math.log(1e8)) * sigma
        )
        assert detuning_span(spec("lorentzian")) == pytest.approx(50.0)
        assert detuning_span(spec("uniform")) == pytest.approx(1.0)

    def test_sample_step(self):
        """Test the π/(2Δ_max) echo sampling step."""
        spec = EnsembleSpec(inhomogeneous_width=2.0, distribution="uniform", t1=1.0, t2=1.0)

        assert echo_sample_step(spec) == pytest.approx(math.pi / 2)

    def test_ensemble_bound(self):
        """Test that T2 > 2·T1 is rejected."""
        with pytest.raises(ValueError, match="T2 <= 2\\*T1"):
            EnsembleSpec(inhomogeneous_width=1.0, t1=1.0, t2=2.5)

    def test_minimum_class_count(self):
        """Test that fewer than three classes are rejected."""
        with pytest.raises(ValueError):
            EnsembleSpec(inhomogeneous_width=1.0, n_classes=2, t1=1.0, t2=1.0)


class TestRotate:
    """Tests for the hard-pulse rotation."""

    def test_two_half_pulses_make_a_pi_pulse(self):
        """Test that rotations about the same axis compose."""
        c = np.array([0.3 + 0.4j, -0.1j])
        w = np.array([math.sqrt(1 - 0.25), -math.sqrt(1 - 0.01)])

        half = rotate(*rotate(c, w, math.pi / 2, 0.7), math.pi / 2, 0.7)
        full = rotate(c, w, math.pi, 0.7)

        np.testing.assert_allclose(half[0], full[0], atol=1e-14)
        np.testing.assert_allclose(half[1], full[1], atol=1e-14)

    def test_rotation_preserves_length(self):
        """Test that a rotation conserves |c|² + w²."""
        rng = np.random.default_rng(3)
        c = rng.normal(size=5) + 1j * rng.normal(size=5)
        w = rng.normal(size=5)

        c2, w2 = rotate(c, w, 1.234, rng.uniform(0, 2 * math.pi, size=5))

        np.testing.assert_allclose(np.abs(c2) ** 2 + w2**2, np.abs(c) ** 2 + w**2, rtol=1e-13)

    def test_free_evolution_shapes(self):
        """Test that a vector of elapsed times adds a leading axis."""
        c = np.ones(4, dtype=complex)
        w = np.zeros(4)

        c_out, w_out = free_evolution(c, w, np.arange(4.0), np.array([0.0, 1.0, 2.0]), 1.0, 1.0)

        assert c_out.shape == (3, 4)
        assert w_out.shape == (3, 4)


class TestPropagateBloch:
    """Tests for propagate_bloch."""

    def test_pi_pulse_inverts_ground_state(self, narrow_ensemble):
        """Test the Rabi flip w: −1 → +1."""
        trajectories = propagate_bloch(
            narrow_ensemble, [_pulse(1e-6, math.pi)], np.array([0.5e-6, 2e-6])
        )

        np.testing.assert_allclose(trajectories.population[0], -1.0)
        np.testing.assert_allclose(trajectories.population[1], 1.0, atol=1e-12)

    def test_half_pulse_creates_full_coherence(self, narrow_ensemble):
        """Test that |coherence| = 1 right after a π/2 pulse."""
        trajectories = propagate_bloch(
            narrow_ensemble, [_pulse(1e-6, math.pi / 2)], np.array([1e-6 + 1e-12])
        )

        np.testing.assert_allclose(np.abs(trajectories.coherence[0]), 1.0, rtol=1e-12)
        np.testing.assert_allclose(trajectories.population[0], 0.0, atol=1e-12)

    def test_coherence_decays_by_one_over_e_after_t2(self):
        """Test |c(T2)|/|c(0)| = e⁻¹ for the 1/T2 coherence decay."""
        spec = EnsembleSpec(
            inhomogeneous_width=2 * math.pi * 1e3,
            distribution="uniform",
            n_classes=5,
            t1=10e-6,
            t2=10e-6,
        )
        start = 1e-6 + 1e-9
        trajectories = propagate_bloch(
            spec, [_pulse(1e-6, math.pi / 2)], np.array([start, start + 10e-6])
        )

        ratio = np.abs(trajectories.coherence[1]) / np.abs(trajectories.coherence[0])
        np.testing.assert_allclose(ratio, math.exp(-1.0), rtol=1e-12)

    def test_population_relaxes_to_ground_state(self):
        """Test w → −1 + (w+1)·e^{−t/T1} after inversion."""
        spec = EnsembleSpec(
            inhomogeneous_width=2 * math.pi * 1e3,
            distribution="uniform",
            n_classes=3,
            t1=10e-6,
            t2=10e-6,
        )
        trajectories = propagate_bloch(spec, [_pulse(0.0, math.pi)], np.array([10e-6]))

        np.testing.assert_allclose(trajectories.population[0], -1 + 2 * math.exp(-1.0))

    def test_zero_decay_propagation_is_norm_conserving(self, narrow_ensemble):
        """Test unitarity per class to 1e-12 without relaxation."""
        pulses = [
            _pulse(1e-6, 0.9, phase=0.2),
            _pulse(3e-6, 2.1, phase=1.3),
            _pulse(7e-6, 1.7, phase=-0.4),
        ]
        t_grid = np.linspace(0.0, 10e-6, 201)

        trajectories = propagate_bloch(narrow_ensemble, pulses, t_grid)

        np.testing.assert_allclose(trajectories.norm, 1.0, atol=1e-12)
        assert trajectories.max_norm == pytest.approx(1.0, abs=1e-12)

    def test_norm_never_exceeds_one_with_relaxation(self):
        """Test that relaxation with T2 <= 2·T1 only shrinks the Bloch vector."""
        spec = EnsembleSpec(
            inhomogeneous_width=2 * math.pi * 1e3,
            distribution="gaussian",
            n_classes=31,
            t1=3e-6,
            t2=6e-6,
        )
        pulses = [_pulse(0.5e-6, math.pi / 2), _pulse(2e-6, 2.0), _pulse(4e-6, 0.7)]

        trajectories = propagate_bloch(spec, pulses, np.linspace(0.0, 20e-6, 401))

        assert trajectories.max_norm <= 1.0 + 1e-9

    def test_emitted_field_is_weighted_sum(self, narrow_ensemble):
        """Test the dipole-density weighted sum of coherences."""
        trajectories = propagate_bloch(
            narrow_ensemble, [_pulse(1e-6, math.pi / 2)], np.array([1.5e-6, 2e-6])
        )

        expected = trajectories.coherence @ trajectories.weights
        np.testing.assert_allclose(trajectories.emitted_field, expected)

    def test_initial_population(self, narrow_ensemble):
        """Test that a prepared inversion is used as the starting state."""
        trajectories = propagate_bloch(
            narrow_ensemble, [], np.array([0.0]), initial_population=np.array([0.5, -0.2, 1.0])
        )

        np.testing.assert_allclose(trajectories.population[0], [0.5, -0.2, 1.0])

    def test_overlapping_pulses(self, narrow_ensemble):
        """Test that overlapping pulses raise PulseOverlapError."""
        pulses = [_pulse(1e-6, math.pi / 2, duration=1e-6), _pulse(1.5e-6, math.pi, duration=1e-6)]

        with pytest.raises(PulseOverlapError):
            propagate_bloch(narrow_ensemble, pulses, np.array([3e-6]))

    def test_coarse_grid(self):
        """Test that a grid coarser than π/Δ_max raises SamplingError."""
        spec = EnsembleSpec(inhomogeneous_width=2 * math.pi * 5e9, t1=1e-4, t2=1e-4)

        with pytest.raises(SamplingError, match="exceeds"):
            propagate_bloch(spec, [], np.linspace(0.0, 1e-6, 11))

    def test_grid_must_increase(self, narrow_ensemble):
        """Test that an unordered grid is a precondition error."""
        with pytest.raises(PreconditionError, match="increasing"):
            propagate_bloch(narrow_ensemble, [], np.array([2e-6, 1e-6]))

    def test_pulse_centre_before_origin(self, narrow_ensemble):
        """Test that pulses acting before t = 0 are rejected."""
        with pytest.raises(PreconditionError, match="t >= 0"):
            propagate_bloch(narrow_ensemble, [_pulse(-1e-6, math.pi)], np.array([1e-6]))

    def test_hard_pulse_ratio(self, narrow_ensemble):
        """Test the reported duration × width product."""
        trajectories = propagate_bloch(
            narrow_ensemble, [_pulse(1e-6, math.pi, duration=2e-7)], np.array([2e-6])
        )

        assert trajectories.hard_pulse_ratio == pytest.approx(2e-7 * 2 * math.pi * 1e3)
