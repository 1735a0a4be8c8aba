"""
This script builds Ehrenfest windows for a cubic force and follows a harmonic packet in time.
"""

import math

import numpy as np

from qrnlab import GridConfig, gaussian_packet, grid_operators, logger
from qrnlab.dynamics import (
    ForceField,
    build_hamiltonian,
    check_theorem6,
    compare_trajectories,
    construct_window,
    evolve_expectations,
    newton_trajectory,
    window_coverage,
)
from qrnlab.operators import trace_inner

EPS = 0.05
cubic = ForceField.cubic()

# --- Windows ---
window_grid = GridConfig(512, 5.0)
for r in (-2.0, -1.0, 0.0, 1.0, 2.0):
    window = construct_window(cubic, r, EPS, window_grid)
    report = check_theorem6(window, cubic)
    logger.info(f"r={r:+.1f}: delta={window.delta:.3e} passed={report.passed}")

coverage = window_coverage(ForceField.harmonic(), list(np.arange(-3.0, 3.25, 0.5)), EPS)
logger.info(f"[-3, 3] covered by {len(coverage.intervals)} windows ({coverage.n_refined} added)")

# --- Harmonic evolution ---
grid = GridConfig(512, 10.0)
harmonic = ForceField.harmonic()
q, p = grid_operators(grid)
rho0 = gaussian_packet(grid, 1.0, 1.0 / math.sqrt(2.0))
times = np.linspace(0.0, 4.0 * math.pi, 252)
quantum = evolve_expectations(build_hamiltonian(harmonic, grid), rho0, times, q, p, force=harmonic)
classical = newton_trajectory(1.0, harmonic, trace_inner(rho0, q), trace_inner(rho0, p), times)
logger.info(f"max |<Q>(t) - q(t)| = {compare_trajectories(quantum, classical):.3e}")
