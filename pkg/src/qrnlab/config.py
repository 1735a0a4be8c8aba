"""Numerical tolerances and grid configuration shared by every module."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ToleranceConfig:
    """Numeric tolerance configuration."""

    # Operator invariants
    hermitian_tolerance: float = 1e-12
    psd_floor: float = 1e-10
    trace_tolerance: float = 1e-10
    imaginary_residue: float = 1e-10

    # Projectors and spectral calculus
    projector_tolerance: float = 1e-10
    projector_eigenvalue_tolerance: float = 1e-8
    degeneracy_merge: float = 1e-8
    interval_boundary: float = 1e-9

    # Quantum real numbers
    variance_clip: float = 1e-12
    membership_slack: float = 1e-12
    min_restriction_weight: float = 1e-12
    min_branch_probability: float = 1e-12

    # Theorem checks are inequalities, not estimates
    check_slack: float = 1e-9
    commute_tolerance: float = 1e-10

    def with_overrides(self, **kwargs: float) -> ToleranceConfig:
        return replace(self, **kwargs)


DEFAULT_TOLERANCE = ToleranceConfig()

# Dense matrices only; joint pointer grids and N-copy spaces are capped here
MAX_DIM = 4096


@dataclass(frozen=True)
class GridConfig:
    """Periodic position grid: n points on [-half_width, half_width)."""

    n: int = 256
    half_width: float = 10.0
    hbar: float = 1.0

    @property
    def step(self) -> float:
        return 2.0 * self.half_width / self.n


def thread_cap() -> int:
    """Worker cap from QRN_THREADS, defaulting to the CPU count."""
    raw = os.getenv("QRN_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1
