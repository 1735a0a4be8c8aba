"""pointer.py
Impulsive two-particle pointer measurement.

Particle 1 (the system) couples to particle 2 (the pointer) through
H = g X1 P2 for a short time dt. The Heisenberg solution shifts the pointer
position by g dt X1, so no time integration is needed.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .collimation import TheoremReport
from .config import DEFAULT_TOLERANCE, MAX_DIM, GridConfig, ToleranceConfig
from .exceptions import DimensionBlowUpError, HypothesisNotMetError, InvariantViolationError
from .logger_config import logger
from .operators import (
    DensityMatrix,
    HermitianOperator,
    density_from_vector,
    gaussian_packet,
    grid_operators,
    identity,
    mixture,
    partial_trace,
    tensor,
    trace_inner,
    trace_norm,
)
from .qrn import SlitSpec, StateRegion, is_approx_classical, sample_region
from .types import SpreadTerms

__all__ = [
    "PointerModel",
    "TwoParticleRegion",
    "Registration",
    "RegistrationResult",
    "pointer_final_operator",
    "build_superset",
    "pointer_spread",
    "classify_registration",
    "run_pointer_experiment",
]


@dataclass(frozen=True, eq=False)
class PointerModel:
    """System grid, pointer grid and the dimensionless shift factor g*dt."""

    grid1: GridConfig
    grid2: GridConfig
    g: float
    dt: float
    x1: HermitianOperator = field(init=False)
    x2: HermitianOperator = field(init=False)
    p2: HermitianOperator = field(init=False)

    def __post_init__(self) -> None:
        shift = self.g * self.dt
        if not np.isfinite(shift) or shift < 0:
            raise InvariantViolationError(f"g*dt must be finite and non-negative, got {shift}")
        joint = self.grid1.n * self.grid2.n
        if joint > MAX_DIM:
            raise DimensionBlowUpError(joint, MAX_DIM)
        x1, _ = grid_operators(self.grid1)
        x2, p2 = grid_operators(self.grid2)
        object.__setattr__(self, "x1", x1.relabel("X1"))
        object.__setattr__(self, "x2", x2.relabel("X2"))
        object.__setattr__(self, "p2", p2.relabel("P2"))

    @property
    def shift(self) -> float:
        return self.g * self.dt

    @property
    def dims(self) -> tuple[int, int]:
        return self.grid1.n, self.grid2.n


@dataclass(frozen=True, eq=False)
class TwoParticleRegion:
    """Joint samples on the product space together with the factor regions they came from."""

    w1: StateRegion
    w2: StateRegion
    samples: tuple[DensityMatrix, ...]
    entangled: bool = False

    def __len__(self) -> int:
        return len(self.samples)


class Registration(enum.Enum):
    REGISTERED = "registered"
    NOT_REGISTERED = "not_registered"


@dataclass(frozen=True)
class RegistrationResult:
    verdict: Registration
    worst_total: float
    threshold: float
    terms: tuple[SpreadTerms, ...]

    @property
    def registered(self) -> bool:
        return self.verdict is Registration.REGISTERED


def pointer_final_operator(model: PointerModel) -> HermitianOperator:
    """I x X2 + g dt X1 x I."""
    pointer = tensor(identity(model.grid1.n), model.x2)
    system = tensor(model.x1, identity(model.grid2.n))
    return HermitianOperator(pointer.entries + model.shift * system.entries, "X2_final")


def _leading_vector(rho: DensityMatrix) -> np.ndarray:
    w, v = np.linalg.eigh(rho.entries)
    return v[:, int(np.argmax(w))]


def build_superset(
    w1: StateRegion,
    w2: StateRegion,
    n: int = 8,
    seed: int = 0,
    entangled: bool = False,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> TwoParticleRegion:
    """
    Product samples s1 x s2 drawn from the factor regions; the first is the product of the centers.

    With ``entangled`` set, one coherent superposition of the leading
    vectors of two product samples is appended; it carries no invariant.
    """
    pairs = list(itertools.product(range(len(w1)), range(len(w2))))
    rng = np.random.default_rng(seed)
    rest = [pairs[i] for i in rng.permutation(np.arange(1, len(pairs)))] if len(pairs) > 1 else []
    chosen = [pairs[0]] + rest[: max(0, n - 1)]
    dims = (w1.dim, w2.dim)
    samples = []
    for i, j in chosen:
        joint = tensor(w1.samples[i], w2.samples[j])
        for keep, factor, index in ((1, w1, i), (2, w2, j)):
            reduced = partial_trace(joint, keep, dims)
            distance = trace_norm(reduced - factor.center)
            if index != 0 and not distance < factor.radius + tolerance.membership_slack:
                raise InvariantViolationError(f"reduced state of factor {keep} left its ball: {distance:.3e}")
        samples.append(joint)
    if entangled and len(chosen) > 1:
        a = np.kron(_leading_vector(w1.samples[chosen[0][0]]), _leading_vector(w2.samples[chosen[0][1]]))
        b = np.kron(_leading_vector(w1.samples[chosen[1][0]]), _leading_vector(w2.samples[chosen[1][1]]))
        samples.append(density_from_vector(a + b))
    return TwoParticleRegion(w1, w2, tuple(samples), entangled)


def _variance(rho: DensityMatrix, m: HermitianOperator) -> float:
    mean = trace_inner(rho, m)
    return trace_inner(rho, m.squared) - mean * mean


def pointer_spread(model: PointerModel, region: TwoParticleRegion) -> list[SpreadTerms]:
    """
    Per-sample decomposition of the final pointer variance.

    total = Var(X2) + (g dt)^2 Var(X1) + 2 g dt Cov(X1, X2); ``total`` is the
    directly computed variance of the final operator.
    """
    final = pointer_final_operator(model)
    pointer_op = tensor(identity(model.grid1.n), model.x2)
    system_op = tensor(model.x1, identity(model.grid2.n))
    product_op = HermitianOperator(system_op.entries @ pointer_op.entries, "X1X2")
    shift = model.shift
    out: list[SpreadTerms] = []
    for s in region.samples:
        m1 = trace_inner(s, system_op)
        m2 = trace_inner(s, pointer_op)
        cov = trace_inner(s, product_op) - m1 * m2
        out.append(
            {
                "total": _variance(s, final),
                "pointer_term": _variance(s, pointer_op),
                "system_term": shift**2 * _variance(s, system_op),
                "cross_term": 2.0 * shift * cov,
            }
        )
    return out


def classify_registration(
    model: PointerModel,
    o_region: StateRegion,
    w2: StateRegion,
    eps2: float,
    n_joint: int = 8,
    seed: int = 0,
) -> RegistrationResult:
    """
    Registered when the final pointer variance stays below (1 + (g dt)^2) eps2 on every joint sample.

    The pointer region must itself be approximately classical at eps2.
    """
    if not is_approx_classical(model.x2, w2, eps2):
        raise HypothesisNotMetError("proposition4", "pointer region is not approximately classical")
    joint = build_superset(o_region, w2, n_joint, seed)
    terms = pointer_spread(model, joint)
    threshold = (1.0 + model.shift**2) * eps2
    worst = max(t["total"] for t in terms)
    verdict = Registration.REGISTERED if worst < threshold else Registration.NOT_REGISTERED
    logger.debug(f"classify_registration: worst variance {worst:.6g} vs threshold {threshold:.6g} -> {verdict.value}")
    return RegistrationResult(verdict, worst, threshold, tuple(terms))


def run_pointer_experiment(
    g_dt: float,
    slits: Sequence[float],
    eps2: float,
    mode: str = "single",
    grid: GridConfig | None = None,
    width: float = 0.07,
    radius: float = 1e-4,
    n_samples: int = 4,
    n_joint: int = 8,
    seed: int = 0,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> tuple[RegistrationResult, list[TheoremReport]]:
    """
    Prepare particle 1 behind one slit (``single``) or as an equal mixture behind both (``union``).

    Returns the classification and its checks: the decomposition identity
    and the expected verdict (registered for ``single``, not registered for
    ``union``). In ``union`` mode the particle-1 variance term must also
    reach 0.9 of the two-midpoint mixture variance.
    """
    if len(slits) != 4:
        raise InvariantViolationError(f"expected four slit edges a,b,c,d, got {list(slits)}")
    if mode not in ("single", "union"):
        raise InvariantViolationError(f"mode must be 'single' or 'union', got {mode!r}")
    grid = grid or GridConfig(32, 2.0, 1.0)
    u = SlitSpec(float(slits[0]), float(slits[1]))
    v = SlitSpec(float(slits[2]), float(slits[3]))
    model = PointerModel(grid, grid, g_dt, 1.0)

    at_u = gaussian_packet(grid, u.midpoint, width)
    if mode == "single":
        system_center = at_u
    else:
        system_center = mixture([at_u, gaussian_packet(grid, v.midpoint, width)], [0.5, 0.5])
    o_region = sample_region(system_center, radius, n_samples, seed)
    w2 = sample_region(gaussian_packet(grid, 0.0, width), radius, n_samples, seed + 1)

    result = classify_registration(model, o_region, w2, eps2, n_joint, seed)
    residual = max(
        abs(t["pointer_term"] + t["system_term"] + t["cross_term"] - t["total"]) for t in result.terms
    )
    checks = [TheoremReport.from_margins("pointer_decomposition", [tolerance.check_slack - residual], tolerance)]
    if mode == "single":
        checks.append(TheoremReport.from_margins("registration", [result.threshold - result.worst_total], tolerance))
    else:
        checks.append(TheoremReport.from_margins("no_registration", [result.worst_total - result.threshold], tolerance))
        # an equal mixture at the two slit midpoints has particle-1 variance (separation / 2)^2
        floor = 0.9 * (g_dt * 0.5 * (v.midpoint - u.midpoint)) ** 2
        system_term = max(t["system_term"] for t in result.terms)
        checks.append(TheoremReport.from_margins("union_system_term", [system_term - floor], tolerance))
    logger.info(f"pointer experiment ({mode}): {result.verdict.value}, worst variance {result.worst_total:.6g}")
    return result, checks
