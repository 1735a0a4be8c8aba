"""luders.py
Persistence regions, the Lüders state update and commuting-product decomposition.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from .collimation import TheoremReport, corollary1_bound
from .config import DEFAULT_TOLERANCE, ToleranceConfig
from .exceptions import EmptyIntersectionError, HypothesisNotMetError, NonCommutingError, ZeroBranchError
from .logger_config import logger
from .operators import (
    DensityMatrix,
    HermitianOperator,
    Projector,
    commutator,
    mixture,
    operator_norm,
    repair_density,
    spectral_decompose,
    spectral_projector,
    trace_inner,
)
from .qrn import StateRegion, outside_slit_distance, sample_region
from .types import ComplexMatrix

__all__ = [
    "PersistenceRegionSpec",
    "luders_transform",
    "persistence_region_membership",
    "check_proposition1",
    "check_proposition2",
    "check_proposition3",
    "proposition2_bound",
    "commute_check",
    "branch_order_asymmetry",
    "random_persistent_state",
]


def _projector_matrix(p: Projector | HermitianOperator | ComplexMatrix) -> ComplexMatrix:
    if isinstance(p, Projector | HermitianOperator):
        return p.entries
    return np.asarray(p, dtype=np.complex128)


def luders_transform(
    rho0: DensityMatrix,
    projector: Projector | HermitianOperator,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> DensityMatrix:
    """P rho0 P / Tr(P rho0)."""
    p = _projector_matrix(projector)
    prob = float(np.real(np.einsum("ij,ji->", rho0.entries, p)))
    if prob <= tolerance.min_branch_probability:
        raise ZeroBranchError(prob)
    return DensityMatrix._trusted(p @ rho0.entries @ p / prob)


@dataclass(frozen=True)
class PersistenceRegionSpec:
    """States that keep the value of A inside ``interval`` with outside weight below eps."""

    a: HermitianOperator
    interval: tuple[float, float]
    eps: float

    @cached_property
    def projector(self) -> Projector:
        return spectral_projector(self.a, self.interval)

    def outside_weight(self, rho: DensityMatrix) -> float:
        return trace_inner(rho, self.projector.complement())

    def contains(self, rho: DensityMatrix) -> bool:
        return self.outside_weight(rho) < self.eps


def persistence_region_membership(spec: PersistenceRegionSpec, rho: DensityMatrix) -> bool:
    """Tr((I - P) rho) < eps, strictly."""
    return spec.contains(rho)


def check_proposition1(
    spec: PersistenceRegionSpec, region: StateRegion, tolerance: ToleranceConfig = DEFAULT_TOLERANCE
) -> TheoremReport:
    """Probability of finding the value in the interval exceeds 1 - eps on the persistence region."""
    outside = [s for s in region.samples if not spec.contains(s)]
    if outside:
        raise HypothesisNotMetError("proposition1", f"{len(outside)} samples lie outside the persistence region")
    return TheoremReport.from_margins(
        "proposition1", (trace_inner(s, spec.projector) - (1.0 - spec.eps) for s in region.samples), tolerance
    )


def proposition2_bound(delta: float, eps: float, b_norm: float = 1.0) -> float:
    return b_norm * (delta + corollary1_bound(eps))


def check_proposition2(
    rho0: DensityMatrix,
    spec: PersistenceRegionSpec,
    delta: float,
    b: HermitianOperator,
    n_samples: int = 32,
    seed: int = 0,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> TheoremReport:
    """
    Post-measurement predictions on the intersection of a preparation ball and a persistence region.

    Every sampled state within ``delta`` of ``rho0`` that also lies in the
    persistence region predicts B within ||B|| (delta + eps(2-eps)/(1-eps)) of
    the Lüders-updated center.
    """
    eps = spec.eps
    if not 0 < eps < 1:
        raise HypothesisNotMetError("proposition2", f"eps must lie in (0, 1), got {eps}")
    leak = outside_slit_distance(rho0, spec.projector)
    if not leak < eps:
        raise HypothesisNotMetError("proposition2", f"Tr|rho0 - P rho0 P| = {leak:.3e} is not below eps")
    updated = luders_transform(rho0, spec.projector, tolerance)
    ball = sample_region(rho0, delta, n_samples, seed)
    members = [s for s in ball.samples if spec.contains(s)]
    if not members:
        raise EmptyIntersectionError(f"no sample of the delta={delta} ball lies in the persistence region")
    bound = proposition2_bound(delta, eps, operator_norm(b))
    target = trace_inner(updated, b)
    logger.debug(f"proposition2: {len(members)}/{len(ball)} samples in the intersection, bound {bound:.6g}")
    return TheoremReport.from_margins(
        "proposition2",
        (bound - abs(trace_inner(s, b) - target) for s in members),
        tolerance,
        notes={"bound": bound, "intersection_size": float(len(members))},
    )


def commute_check(
    a: HermitianOperator | ComplexMatrix,
    b: HermitianOperator | ComplexMatrix,
    state: DensityMatrix | None = None,
) -> float:
    """
    Norm of [A, B]: the spectral norm, or sqrt(Tr(rho C^dagger C)) when a state is given.
    """
    c = commutator(a, b)
    if state is None:
        return float(np.linalg.norm(c, 2))
    value = float(np.real(np.einsum("ij,ji->", state.entries, c.conj().T @ c)))
    return math.sqrt(max(value, 0.0))


def check_proposition3(
    rho0: DensityMatrix,
    a: HermitianOperator,
    b: HermitianOperator,
    eps: float,
    n_samples: int = 32,
    seed: int = 0,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> TheoremReport:
    """
    Product decomposition Tr(rho AB) ~ sum_i a_i Tr(rho0 P_i) Tr(rho0'(i) B) for commuting A, B.

    Samples come from the eps-ball around ``rho0``; the bound per sample is
    (sum_i |a_i|) ||B|| eps and the identity is exact at ``rho0`` itself.
    Branches with vanishing probability are dropped.
    """
    norm = commute_check(a, b)
    if norm > tolerance.commute_tolerance:
        raise NonCommutingError(norm, tolerance.commute_tolerance)
    decomposition = spectral_decompose(a, tolerance)
    prediction = 0.0
    for value, proj in zip(decomposition.eigenvalues, decomposition.eigenprojectors, strict=True):
        weight = trace_inner(rho0, proj)
        if weight <= tolerance.min_branch_probability:
            continue
        prediction += value * weight * trace_inner(luders_transform(rho0, proj, tolerance), b)

    ab = HermitianOperator(a.entries @ b.entries, f"{a.label}{b.label}")
    bound = sum(abs(v) for v in decomposition.eigenvalues) * operator_norm(b) * eps
    region = sample_region(rho0, eps, n_samples, seed)
    center_residual = abs(trace_inner(rho0, ab) - prediction)
    report = TheoremReport.from_margins(
        "proposition3",
        (bound - abs(trace_inner(s, ab) - prediction) for s in region.samples),
        tolerance,
        notes={"bound": bound, "center_residual": center_residual},
    )
    if center_residual > tolerance.commute_tolerance:
        logger.warning(f"proposition3: center identity off by {center_residual:.3e}")
        report = dataclasses.replace(report, passed=False)
    return report


def branch_order_asymmetry(rho: DensityMatrix, a: HermitianOperator, b: HermitianOperator) -> float:
    """max_ij |Tr(rho P_i P'_j) - Tr(rho P'_j P_i)| over the spectral projectors of A and B."""
    pa = spectral_decompose(a).eigenprojectors
    pb = spectral_decompose(b).eigenprojectors
    worst = 0.0
    for p in pa:
        for q in pb:
            first = np.einsum("ij,ji->", rho.entries, p.entries @ q.entries)
            second = np.einsum("ij,ji->", rho.entries, q.entries @ p.entries)
            worst = max(worst, float(abs(first - second)))
    return worst


def random_persistent_state(spec: PersistenceRegionSpec, rng: np.random.Generator, leak: float = 0.4) -> DensityMatrix:
    """
    A random state with Tr|rho - P rho P| below eps.

    A random state supported in range(P) is mixed with weight ``leak * eps``
    of a random full-rank state, so the outside distance stays below
    2 * leak * eps.
    """
    p = spec.projector.entries
    dim = p.shape[0]

    def random_state(support: Any) -> DensityMatrix:
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        return repair_density(support @ (g @ g.conj().T) @ support)

    inside = random_state(p)
    anywhere = random_state(np.eye(dim))
    weight = leak * spec.eps
    return mixture([inside, anywhere], [1.0 - weight, weight])
