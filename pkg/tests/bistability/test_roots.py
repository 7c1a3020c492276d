"""Tests for the steady-state root finder."""

import numpy as np
import pytest

from src.bistability import roots as roots_module
from src.bistability.model import bracket_modulus, drive_from_power
from src.bistability.roots import bistable_drive_window, count_roots_bruteforce, solve_output
from src.model.errors import PreconditionError, RootResolutionError


class TestSolveOutput:
    """Tests for solve_output."""

    @pytest.mark.parametrize("offset", [0.0, 0.5, -2.0])
    def test_empty_cavity_closed_form(self, empty_cavity, offset):
        """Test u = |y|²/(1 + (δ/κ)²) without ions."""
        omega_l = empty_cavity.omega_c + offset * empty_cavity.kappa

        result = solve_output(1.0e4, omega_l, empty_cavity)

        assert result.count == 1
        assert result.roots[0] == pytest.approx(1.0e4 / (1 + offset**2), rel=1e-9)

    def test_zero_drive(self, resonator_params):
        """Test that |y|² = 0 has the single root u = 0."""
        result = solve_output(0.0, resonator_params.omega_a, resonator_params)

        assert result.roots == [0.0]

    def test_negative_drive_rejected(self, resonator_params):
        """Test that a negative drive raises PreconditionError."""
        with pytest.raises(PreconditionError):
            solve_output(-1.0, resonator_params.omega_a, resonator_params)

    def test_three_roots_inside_window(self, resonator_params):
        """Test three steady states on the atomic line at |y|² = 5e4."""
        result = solve_output(5.0e4, resonator_params.omega_a, resonator_params)

        assert result.count == 3
        assert result.stable == [result.roots[0], result.roots[2]]
        assert count_roots_bruteforce(5.0e4, resonator_params.omega_a, resonator_params) == 3

    def test_single_root_at_weak_drive(self, resonator_params):
        """Test one steady state at the 40 µW drive."""
        drive = drive_from_power(40e-6, resonator_params)

        result = solve_output(drive, resonator_params.omega_a, resonator_params)

        assert result.count == 1
        assert count_roots_bruteforce(drive, resonator_params.omega_a, resonator_params) == 1

    @pytest.mark.parametrize("drive", [1e-3, 1.0, 2.0e4, 5.0e4, 1.0e5, 3.0e5, 1.0e7])
    @pytest.mark.parametrize("gamma_offset", [-10.0, -1.0, 0.0, 3.0])
    def test_count_matches_dense_grid(self, resonator_params, drive, gamma_offset):
        """Test the adaptive root count against one dense brute-force grid."""
        omega_l = resonator_params.omega_a - gamma_offset * resonator_params.gamma_h

        result = solve_output(drive, omega_l, resonator_params)

        assert result.count == count_roots_bruteforce(drive, omega_l, resonator_params)

    def test_roots_solve_the_equation(self, resonator_params):
        """Test u·M(u) = |y|² at every returned root."""
        omega_l = resonator_params.omega_a

        result = solve_output(5.0e4, omega_l, resonator_params)

        for u in result.roots:
            value = u * bracket_modulus(u, resonator_params, omega_l)
            assert value == pytest.approx(5.0e4, rel=1e-8)

    def test_branch_hint_selects_nearest_root(self, resonator_params):
        """Test that a hint near the upper root flags it as followed."""
        omega_l = resonator_params.omega_a
        upper = solve_output(5.0e4, omega_l, resonator_params).roots[2]

        result = solve_output(5.0e4, omega_l, resonator_params, branch_hint=1.1 * upper)

        assert result.followed == 2

    def test_monotone_off_window(self, resonator_params):
        """Test a single root growing with the drive below the bistable window."""
        omega_l = resonator_params.omega_a
        drives = np.geomspace(1e-2, 1e4, 12)

        roots = [solve_output(d, omega_l, resonator_params) for d in drives]

        assert all(r.count == 1 for r in roots)
        assert np.all(np.diff([r.roots[0] for r in roots]) > 0)

    def test_refinement_exhausted(self, resonator_params, monkeypatch):
        """Test RootResolutionError when no refinement is allowed."""
        monkeypatch.setattr(roots_module, "MAX_GRID_POINTS", roots_module.INITIAL_GRID_POINTS)

        with pytest.raises(RootResolutionError, match="grid refinement exhausted"):
            solve_output(5.0e4, resonator_params.omega_a, resonator_params)


class TestBistableDriveWindow:
    """Tests for bistable_drive_window."""

    def test_window_on_atomic_line(self, resonator_params):
        """Test a non-empty three-root window between about 1.5e4 and 2.2e5."""
        window = bistable_drive_window(resonator_params, resonator_params.omega_a)

        assert window is not None
        lower, upper = window
        assert 1.3e4 < lower < 1.8e4
        assert 2.0e5 < upper < 2.5e5

    def test_no_window_without_ions(self, empty_cavity):
        """Test that the empty cavity is never bistable."""
        assert bistable_drive_window(empty_cavity, empty_cavity.omega_c) is None

    def test_window_edges_bound_the_root_count(self, resonator_params):
        """Test one root below, three inside and one above the window."""
        omega_l = resonator_params.omega_a
        lower, upper = bistable_drive_window(resonator_params, omega_l)

        counts = [
            solve_output(d, omega_l, resonator_params).count
            for d in (0.5 * lower, np.sqrt(lower * upper), 2.0 * upper)
        ]

        assert counts == [1, 3, 1]
