"""test_dynamics.py
Ehrenfest gaps and windows, exact evolution and classical trajectories.
"""

import math

import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from qrnlab.collimation import random_bounded_operator
from qrnlab.config import GridConfig
from qrnlab.dynamics import (
    ForceField,
    TrajectoryRecord,
    build_hamiltonian,
    check_theorem6,
    check_window_collimation,
    compare_trajectories,
    construct_weyl_state,
    construct_window,
    continuity_modulus,
    ehrenfest_gap,
    evolve_expectations,
    hamilton_pair_residual,
    newton_trajectory,
    sharpening_ode,
    window_coverage,
)
from qrnlab.exceptions import (
    GridTooCoarseError,
    HypothesisNotMetError,
    InvariantViolationError,
    ModulusSearchFailedError,
)
from qrnlab.operators import DensityMatrix, gaussian_packet, grid_operators, mixture, repair_density, trace_inner

WINDOW_GRID = GridConfig(512, 5.0, 1.0)


@pytest.fixture(scope="module")
def evolve_grid():
    return GridConfig(512, 10.0, 1.0)


class TestForceField:
    @pytest.mark.parametrize(
        "force",
        [ForceField.harmonic(2.0), ForceField.cubic(), ForceField.quartic(), ForceField.polynomial([1.0, -0.5, 0.2])],
    )
    def test_force_is_minus_potential_slope(self, grid, force):
        force.check_consistency(grid)

    def test_inconsistent_pair_rejected(self, grid):
        force = ForceField(lambda x: x, lambda x: x**2 / 2.0, "wrong sign")
        with pytest.raises(InvariantViolationError):
            force.check_consistency(grid)

    def test_linearity(self):
        assert ForceField.harmonic().is_linear
        assert not ForceField.cubic().is_linear


class TestEhrenfestGap:
    def test_linear_force_has_no_gap(self, grid, grid_ops, rng):
        q, _ = grid_ops
        force = ForceField.harmonic(1.5)
        for _ in range(100):
            rho = gaussian_packet(grid, rng.uniform(-2, 2), rng.uniform(0.2, 1.0), rng.uniform(-1, 1))
            assert ehrenfest_gap(force, q, rho) <= 1e-10

    def test_cubic_gap_is_three_mean_variance(self, grid, grid_ops):
        q, _ = grid_ops
        rho = gaussian_packet(grid, 1.0, 0.1)
        assert ehrenfest_gap(ForceField.cubic(), q, rho) == pytest.approx(0.03, rel=0.05)

    def test_two_peak_negative_control(self):
        q, _ = grid_operators(WINDOW_GRID)
        peaks = [gaussian_packet(WINDOW_GRID, 0.0, 0.05), gaussian_packet(WINDOW_GRID, 2.0, 0.05)]
        control = mixture(peaks, [0.5, 0.5])
        assert ehrenfest_gap(ForceField.cubic(), q, control) == pytest.approx(3.0, rel=0.05)


class TestContinuityModulus:
    @pytest.mark.parametrize("k", [0.5, 1.0, 4.0])
    def test_linear_modulus(self, k):
        eps = 0.06
        assert continuity_modulus(ForceField.harmonic(k), 0.3, eps, 10.0) == pytest.approx(eps / (6.0 * k), rel=1e-2)

    def test_cubic_modulus_at_one(self):
        eps = 0.01
        assert continuity_modulus(ForceField.cubic(), 1.0, eps, 10.0) == pytest.approx(eps / 18.0, rel=1e-2)

    def test_constant_force_reaches_cap(self):
        assert continuity_modulus(ForceField.polynomial([2.0]), 0.0, 0.1, 3.0) == 3.0

    def test_non_positive_eps(self):
        with pytest.raises(ModulusSearchFailedError):
            continuity_modulus(ForceField.cubic(), 0.0, 0.0, 1.0)


class TestWindows:
    @pytest.mark.parametrize("r", [-2.0, -1.0, 0.0, 1.0, 2.0])
    def test_cubic_windows_keep_gap_below_eps(self, r):
        window = construct_window(ForceField.cubic(), r, 0.05, WINDOW_GRID, n_samples=6, seed=0)
        report = check_theorem6(window, ForceField.cubic())
        assert report.passed
        assert report.notes["r"] == r

    def test_weyl_state_sits_at_r(self):
        force = ForceField.cubic()
        rho = construct_weyl_state(WINDOW_GRID, 1.0, 0.05, force)
        q, _ = grid_operators(WINDOW_GRID)
        assert abs(trace_inner(rho, q) - 1.0) < continuity_modulus(force, 1.0, 0.05, 5.0) / 2.0

    def test_point_off_the_grid(self):
        with pytest.raises(GridTooCoarseError):
            construct_weyl_state(WINDOW_GRID, 6.0, 0.05, ForceField.cubic())

    def test_coarse_grid(self):
        with pytest.raises(GridTooCoarseError):
            construct_weyl_state(GridConfig(8, 5.0), 2.0, 0.001, ForceField.cubic())

    def test_collimation_needs_linear_force(self):
        window = construct_window(ForceField.cubic(), 0.0, 0.05, WINDOW_GRID, n_samples=2)
        with pytest.raises(HypothesisNotMetError):
            check_window_collimation(window, ForceField.cubic())

    def test_harmonic_window_collimation(self):
        window = construct_window(ForceField.harmonic(), 1.0, 0.05, WINDOW_GRID, n_samples=2)
        info = check_window_collimation(window, ForceField.harmonic())
        assert info["m"] == pytest.approx(2.0 * (1.0 - window.delta))
        assert info["delta_below_m_eps"]


class TestCoverage:
    def test_lattice_alone_leaves_gaps(self):
        report = window_coverage(ForceField.harmonic(), list(np.arange(-3.0, 3.25, 0.5)), 0.06, refine=False)
        assert not report.covered

    def test_refinement_covers_interval(self):
        report = window_coverage(ForceField.harmonic(), list(np.arange(-3.0, 3.25, 0.5)), 0.06)
        assert report.covered
        assert report.n_refined > 0
        assert report.intervals[0][0] < -3.0 and report.intervals[-1][1] > 3.0

    @pytest.mark.slow
    def test_cubic_coverage(self):
        report = window_coverage(ForceField.cubic(), list(np.arange(-3.0, 3.25, 0.5)), 0.05, max_delta=5.0)
        assert report.covered


class TestEvolution:
    def test_harmonic_expectations_follow_newton(self, evolve_grid):
        force = ForceField.harmonic()
        q, p = grid_operators(evolve_grid)
        rho0 = gaussian_packet(evolve_grid, 1.0, 1.0 / math.sqrt(2.0))
        times = np.linspace(0.0, 4.0 * math.pi, 252)
        quantum = evolve_expectations(build_hamiltonian(force, evolve_grid), rho0, times, q, p, force=force)
        classical = newton_trajectory(1.0, force, trace_inner(rho0, q), trace_inner(rho0, p), times)
        assert compare_trajectories(quantum, classical) <= 1e-3
        assert hamilton_pair_residual(quantum) < 5e-3
        assert np.max(np.abs(quantum.energy - quantum.energy[0])) < 1e-8
        assert np.max(np.abs(quantum.norm - 1.0)) < 1e-8
        assert np.max(quantum.gap) < 1e-8
        assert np.max(quantum.hermiticity) < 1e-10

    def test_newton_matches_closed_form(self):
        times = np.linspace(0.0, 4.0 * math.pi, 101)
        path = newton_trajectory(1.0, ForceField.harmonic(), 1.0, 0.0, times)
        assert_allclose(path.q_classical, np.cos(times), atol=1e-8)
        assert_allclose(path.p_classical, -np.sin(times), atol=1e-8)

    def test_series_follow_the_evolved_state(self):
        rng = np.random.default_rng(3)
        h = random_bounded_operator(6, rng, norm=2.0, label="H")
        q = random_bounded_operator(6, rng, label="Q")
        p = random_bounded_operator(6, rng, label="P")
        g = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        rho0 = repair_density(g @ g.conj().T)
        times = np.linspace(0.0, 3.0, 7)
        record = evolve_expectations(h, rho0, times, q, p, hbar=0.5)
        for i, t in enumerate(times):
            u = scipy.linalg.expm(-1j * h.entries * t / 0.5)
            rho_t = DensityMatrix(u @ rho0.entries @ u.conj().T)
            assert record.q_quantum[i] == pytest.approx(trace_inner(rho_t, q), abs=1e-10)
            assert record.p_quantum[i] == pytest.approx(trace_inner(rho_t, p), abs=1e-10)
            assert record.energy[i] == pytest.approx(trace_inner(rho_t, h), abs=1e-10)
        assert np.max(np.abs(record.norm - 1.0)) < 1e-12
        assert np.max(record.hermiticity) < 1e-12
        assert np.max(np.abs(record.energy - trace_inner(rho0, h))) < 1e-10

    def test_newton_energy_drift_over_ten_periods(self):
        force = ForceField.harmonic()
        times = np.linspace(0.0, 20.0 * math.pi, 201)
        path = newton_trajectory(1.0, force, 1.0, 0.5, times)
        energy = 0.5 * path.p_classical**2 + force.v(path.q_classical)
        assert np.max(np.abs(energy - energy[0])) <= 1e-8

    def test_newton_free_particle_is_a_straight_line(self):
        times = np.linspace(0.0, 5.0, 11)
        path = newton_trajectory(2.0, ForceField.polynomial([0.0]), 1.0, 3.0, times)
        assert_allclose(path.q_classical, 1.0 + 1.5 * times, atol=1e-12)
        assert_allclose(path.p_classical, 3.0, atol=1e-12)

    def test_mismatched_time_grids(self):
        a = newton_trajectory(1.0, ForceField.harmonic(), 1.0, 0.0, [0.0, 1.0])
        b = TrajectoryRecord(np.array([0.0, 2.0]), q_quantum=np.zeros(2))
        with pytest.raises(InvariantViolationError):
            compare_trajectories(b, a)

    def test_times_must_increase(self):
        with pytest.raises(InvariantViolationError):
            TrajectoryRecord(np.array([0.0, 1.0, 1.0]))

    def test_rows_fill_missing_series(self):
        rows = newton_trajectory(1.0, ForceField.harmonic(), 1.0, 0.0, [0.0, 0.5]).rows()
        assert rows[0]["q_classical"] == 1.0
        assert math.isnan(rows[0]["q_quantum"])


class TestSharpening:
    def test_constant_variance_is_linear(self):
        times = np.linspace(0.0, 30.0, 3001)
        q = sharpening_ode(1.0, 1.0, 0.0, lambda _t: 0.1, times)
        assert_allclose(q, -0.1 * times, atol=1e-8)

    def test_decaying_variance_limit(self):
        times = np.linspace(0.0, 30.0, 3001)
        q = sharpening_ode(2.0, 1.0, 0.5, lambda t: 0.1 * math.exp(-t), times)
        assert q[-1] == pytest.approx(0.5 - 0.05, abs=1e-6)

    def test_parameters_must_be_positive(self):
        with pytest.raises(InvariantViolationError):
            sharpening_ode(0.0, 1.0, 0.0, lambda _t: 0.1, [0.0, 1.0])
