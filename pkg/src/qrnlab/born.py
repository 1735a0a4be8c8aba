"""born.py
Relative frequencies of a dichotomic outcome over N identically prepared copies.

Two views of the same experiment live here: the N-copy operator picture
(``build_average_operator``, ``n_copy_state``, ``frequency_distribution``) on
small explicit tensor spaces, and a seeded binomial simulator
(``simulate_frequencies``) for large N.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import reduce

import numpy as np
import pandas as pd
from scipy import stats

from .collimation import TheoremReport
from .config import DEFAULT_TOLERANCE, MAX_DIM, ToleranceConfig
from .exceptions import DimensionBlowUpError, HypothesisNotMetError, InvariantViolationError
from .logger_config import logger
from .luders import luders_transform
from .operators import DensityMatrix, HermitianOperator, Projector, spectral_projector, trace_inner, trace_norm
from .parallel import parallel_map
from .qrn import SlitSpec, StateRegion, is_eps_sharp, singleton_region
from .types import FrequencyRow

__all__ = [
    "DichotomicExperiment",
    "FrequencyReport",
    "outcome_probability",
    "simulate_frequencies",
    "simulate_many",
    "band_half_width",
    "build_average_operator",
    "n_copy_state",
    "frequency_distribution",
    "chebyshev_bound",
    "required_copies",
    "average_operator_spread",
    "n_copy_is_sharp",
    "check_theorem5",
    "gaussian_tv_distance",
    "born_probability",
    "collapse_distance",
    "dichotomic_pure_state",
]


@dataclass(frozen=True)
class DichotomicExperiment:
    """N trials of the yes/no measurement {P1, I - P1} on copies of rho0."""

    p1: Projector
    rho0: DensityMatrix
    region_radius: float
    n_trials: int
    resolution: float
    lam: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise InvariantViolationError(f"need at least one trial, got {self.n_trials}")
        if not 0 < self.lam < 1:
            raise InvariantViolationError(f"lambda must lie in (0, 1), got {self.lam}")
        if self.p1.dim != self.rho0.dim:
            raise InvariantViolationError("projector and state dimensions differ")

    @property
    def p0(self) -> Projector:
        return self.p1.complement()

    @property
    def p_true(self) -> float:
        return outcome_probability(self.rho0, self.p1)


@dataclass(frozen=True)
class FrequencyReport:
    p_true: float
    successes: int
    frequency: float
    chebyshev_delta: float
    in_band: bool

    def as_row(self, seed: int) -> FrequencyRow:
        return {"seed": seed, "J": self.successes, "x": self.frequency, "in_band": self.in_band}


def outcome_probability(rho: DensityMatrix, projector: Projector | HermitianOperator) -> float:
    """p = Tr(rho P)."""
    return trace_inner(rho, projector)


def band_half_width(n: int, lam: float = 0.5) -> float:
    """delta = N^(-(1 - lambda)/2)."""
    return float(n) ** (-(1.0 - lam) / 2.0)


def _binomial_draw(n: int, p: float, seed: int) -> int:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return int(rng.binomial(n, min(max(p, 0.0), 1.0)))


def simulate_frequencies(experiment: DichotomicExperiment) -> FrequencyReport:
    """Seeded Binomial(N, p) successes; the frequency is in band when |x - p| < N^(-(1-lambda)/2)."""
    p = experiment.p_true
    n = experiment.n_trials
    successes = _binomial_draw(n, p, experiment.seed)
    x = successes / n
    delta = band_half_width(n, experiment.lam)
    return FrequencyReport(p, successes, x, delta, abs(x - p) < delta)


def simulate_many(experiment: DichotomicExperiment, seeds: Sequence[int]) -> list[FrequencyReport]:
    """One run per seed; each seed owns its random stream, so results do not depend on scheduling."""
    return parallel_map(lambda s: simulate_frequencies(_with_seed(experiment, s)), list(seeds))


def _with_seed(experiment: DichotomicExperiment, seed: int) -> DichotomicExperiment:
    return DichotomicExperiment(
        experiment.p1,
        experiment.rho0,
        experiment.region_radius,
        experiment.n_trials,
        experiment.resolution,
        experiment.lam,
        seed,
    )


def _check_copies(dim: int, n: int) -> None:
    if n < 1:
        raise InvariantViolationError(f"number of copies must be >= 1, got {n}")
    total = dim**n
    if total > MAX_DIM:
        raise DimensionBlowUpError(total, MAX_DIM)


def build_average_operator(p1: Projector, n: int) -> HermitianOperator:
    """(1/N) sum_i I x ... x P1 (slot i) x ... x I; its spectrum is {j/N}."""
    d = p1.dim
    _check_copies(d, n)
    total = np.zeros((d**n, d**n), dtype=np.complex128)
    for i in range(n):
        left = np.eye(d**i, dtype=np.complex128)
        right = np.eye(d ** (n - i - 1), dtype=np.complex128)
        total += np.kron(np.kron(left, p1.entries), right)
    return HermitianOperator(total / n, f"avg{n}[{p1.operator.label}]")


def n_copy_state(rho: DensityMatrix, n: int) -> DensityMatrix:
    """rho tensored with itself N times."""
    _check_copies(rho.dim, n)
    return DensityMatrix._trusted(reduce(np.kron, [rho.entries] * n))


def frequency_distribution(rho: DensityMatrix, p1: Projector, n: int) -> pd.DataFrame:
    """
    Probability of each frequency j/N in the N-copy state next to the binomial law.

    Columns: ``j``, ``x``, ``quantum`` (Tr of the N-copy state against the
    eigenprojector of the average operator at j/N), ``binomial``.
    """
    q = build_average_operator(p1, n)
    state = n_copy_state(rho, n)
    p = outcome_probability(rho, p1)
    half = 0.5 / n
    rows = []
    for j in range(n + 1):
        x = j / n
        proj = spectral_projector(q, (x - half, x + half))
        rows.append({"j": j, "x": x, "quantum": trace_inner(state, proj), "binomial": float(stats.binom.pmf(j, n, p))})
    return pd.DataFrame(rows)


def chebyshev_bound(variance: float, delta: float) -> float:
    """Upper bound variance / delta^2 on the probability of a deviation of at least delta."""
    if delta <= 0:
        raise InvariantViolationError(f"delta must be positive, got {delta}")
    if math.isinf(delta):
        return 0.0
    return variance / (delta * delta)


def required_copies(p: float, eps: float, resolution: float) -> int:
    """
    ceil(pq / (eps R^2)): copies needed before the frequency band of half width R is eps-sharp.

    A deterministic outcome (p = 0 or 1) needs no copies.
    """
    if not 0.0 <= p <= 1.0:
        raise InvariantViolationError(f"probability must lie in [0, 1], got {p}")
    if eps <= 0 or resolution <= 0:
        raise InvariantViolationError("eps and resolution must be positive")
    raw = p * (1.0 - p) / (eps * resolution**2)
    # absorb rounding so exact quotients are not bumped to the next integer
    return max(0, math.ceil(raw * (1.0 - 1e-12)))


def average_operator_spread(p: float, n: int) -> float:
    """sqrt(pq/N), the spread of the average operator in the N-copy state."""
    return math.sqrt(p * (1.0 - p) / n)


def n_copy_is_sharp(rho: DensityMatrix, p1: Projector, n: int, resolution: float, eps: float) -> bool:
    """Whether the average operator is eps-sharp on the N-copy state for the slit ]p - R, p + R[."""
    p = outcome_probability(rho, p1)
    region = singleton_region(n_copy_state(rho, n))
    return bool(is_eps_sharp(build_average_operator(p1, n), region, SlitSpec(p - resolution, p + resolution), eps))


def check_theorem5(
    region: StateRegion,
    p1: Projector,
    eps: float,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> TheoremReport:
    """|Tr(rho P(i)) - Tr(rho0 P(i))| < eps for both outcomes at every sample of a radius-eps region."""
    if region.radius > eps:
        raise HypothesisNotMetError("theorem5", f"region radius {region.radius:.3e} exceeds eps {eps:.3e}")
    p0 = p1.complement()
    base = (trace_inner(region.center, p1), trace_inner(region.center, p0))
    margins = []
    for s in region.samples:
        diff = max(abs(trace_inner(s, p1) - base[0]), abs(trace_inner(s, p0) - base[1]))
        margins.append(eps - diff)
    return TheoremReport.from_margins("theorem5", margins, tolerance)


def gaussian_tv_distance(n: int, p: float) -> float:
    """Total variation between Binomial(N, p) and its normal approximation binned to integers."""
    j = np.arange(n + 1)
    mean = n * p
    sd = math.sqrt(n * p * (1.0 - p))
    binom = stats.binom.pmf(j, n, p)
    if sd == 0.0:
        normal = (j == round(mean)).astype(np.float64)
    else:
        normal = stats.norm.cdf(j + 0.5, mean, sd) - stats.norm.cdf(j - 0.5, mean, sd)
    return 0.5 * float(np.abs(binom - normal).sum())


def born_probability(psi: Sequence[complex] | np.ndarray, phi: Sequence[complex] | np.ndarray) -> float:
    """|<psi|phi>|^2 for normalized vectors."""
    a = np.asarray(psi, dtype=np.complex128).ravel()
    b = np.asarray(phi, dtype=np.complex128).ravel()
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(abs(np.vdot(a, b)) ** 2)


def dichotomic_pure_state(p: float) -> tuple[DensityMatrix, Projector, np.ndarray]:
    """Qubit state cos|0> + sin|1> with Tr(rho |1><1|) = p; returns (rho, P1, psi)."""
    if not 0.0 <= p <= 1.0:
        raise InvariantViolationError(f"probability must lie in [0, 1], got {p}")
    psi = np.array([math.sqrt(1.0 - p), math.sqrt(p)], dtype=np.complex128)
    rho = DensityMatrix._trusted(np.outer(psi, psi.conj()))
    p1 = Projector(HermitianOperator(np.diag([0.0, 1.0]).astype(np.complex128), "P1"))
    return rho, p1, psi


def collapse_distance(rho0: DensityMatrix, p1: Projector, n: int, resolution: float) -> tuple[float, float]:
    """
    Trace distance between the N-copy state and its update onto the frequency band ]p - R, p + R[.

    Returns ``(distance, bound)`` with bound 2 sqrt(pq / (N R^2)); the bound
    falls as N grows.
    """
    p = outcome_probability(rho0, p1)
    q = build_average_operator(p1, n)
    state = n_copy_state(rho0, n)
    band = spectral_projector(q, (p - resolution, p + resolution))
    updated = luders_transform(state, band)
    distance = trace_norm(state - updated)
    bound = 2.0 * math.sqrt(min(1.0, chebyshev_bound(average_operator_spread(p, n) ** 2, resolution)))
    logger.debug(f"collapse_distance: N={n} distance={distance:.6g} bound={bound:.6g}")
    return distance, bound
