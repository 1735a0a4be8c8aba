"""qrn.py
Quantum real numbers: values Tr(rho M) over regions of state space.

An open set of states is represented by a ``StateRegion``: a center, a
trace-norm radius and a finite seeded sample of member states. Every
"for all rho in U" statement in the laboratory is evaluated pointwise over
those samples.

Sampling law (so oracles can regenerate regions): for each sample a complex
Gaussian matrix G is drawn from ``numpy.random.default_rng(seed)``, symmetrized
to H = (G + G^dagger)/2, scaled to trace norm ``u * radius`` with ``u`` drawn
uniformly from [0.05, 0.95), added to the center and PSD-repaired. If the
repaired state falls outside the ball, ``u`` is halved and the draw repeated.
"""

from __future__ import annotations

import io
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import pandas as pd

from .config import DEFAULT_TOLERANCE, ToleranceConfig
from .exceptions import DimensionMismatchError, InvariantViolationError, NullRestrictionError, RegionSamplingError
from .logger_config import logger
from .operators import (
    DensityMatrix,
    HermitianOperator,
    Projector,
    density_from_json,
    density_to_json,
    repair_density,
    spectral_projector,
    trace_inner,
    trace_norm,
)
from .types import RegionPayload

__all__ = [
    "StateRegion",
    "QuantumRealNumber",
    "SpreadValue",
    "SlitSpec",
    "SharpnessVerdict",
    "evaluate_qrn",
    "spread",
    "spread_values",
    "sample_region",
    "singleton_region",
    "region_subset",
    "is_eps_sharp",
    "is_strictly_eps_sharp",
    "restrict_to_slit",
    "is_approx_classical",
    "region_to_json",
    "region_from_json",
    "qrn_to_csv",
]

_MAX_REDRAWS = 60


@dataclass(frozen=True, eq=False)
class StateRegion:
    """A trace-norm ball around ``center`` with a finite sample; ``samples[0]`` is the center."""

    center: DensityMatrix
    radius: float
    samples: tuple[DensityMatrix, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise InvariantViolationError(f"region radius must be >= 0, got {self.radius}")
        if not self.samples:
            raise InvariantViolationError("region must contain at least one sample")
        if self.samples[0] is not self.center:
            raise InvariantViolationError("samples[0] must be the region center")
        slack = DEFAULT_TOLERANCE.membership_slack
        for i, s in enumerate(self.samples[1:], start=1):
            if s.dim != self.center.dim:
                raise DimensionMismatchError(self.center.dim, s.dim, f"region sample {i}")
            dist = trace_norm(s - self.center)
            if not dist < self.radius + slack:
                raise InvariantViolationError(
                    f"sample {i} lies outside the region: distance {dist:.3e} >= radius {self.radius:.3e}"
                )

    @property
    def dim(self) -> int:
        return self.center.dim

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class QuantumRealNumber:
    """Per-sample values Tr(rho_i M) with their enclosing interval [lo, hi]."""

    operator_label: str
    per_sample: tuple[float, ...]
    lo: float
    hi: float

    @classmethod
    def from_values(cls, label: str, values: Sequence[float]) -> QuantumRealNumber:
        vals = tuple(float(v) for v in values)
        return cls(label, vals, min(vals), max(vals))

    @property
    def center_value(self) -> float:
        return self.per_sample[0]

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class SpreadValue:
    """Per-sample spreads s(M)(rho_i)."""

    per_sample: tuple[float, ...]

    @property
    def max(self) -> float:
        return max(self.per_sample)


@dataclass(frozen=True)
class SlitSpec:
    """The open slit ]lo, hi[."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise InvariantViolationError(f"slit needs lo < hi, got ]{self.lo}, {self.hi}[")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo < x < self.hi


@dataclass(frozen=True)
class SharpnessVerdict:
    """Pointwise outcome of a sharpness predicate plus the aggregate over the region."""

    per_sample: tuple[bool, ...]
    passed: bool

    def __bool__(self) -> bool:
        return self.passed


def _check_dims(m: HermitianOperator, region: StateRegion) -> None:
    if m.dim != region.dim:
        raise DimensionMismatchError(region.dim, m.dim, "observable and region")


def evaluate_qrn(m: HermitianOperator, region: StateRegion) -> QuantumRealNumber:
    """M_Q(U): the function rho -> Tr(rho M) sampled over the region."""
    _check_dims(m, region)
    return QuantumRealNumber.from_values(m.label, [trace_inner(s, m) for s in region.samples])


def _spread_from_moments(first: float, second: float, tolerance: ToleranceConfig) -> float:
    radicand = second - first * first
    if radicand < -tolerance.variance_clip:
        logger.debug(f"negative variance {radicand:.3e} clipped beyond tolerance")
    return math.sqrt(max(radicand, 0.0))


def spread(m: HermitianOperator, rho: DensityMatrix, tolerance: ToleranceConfig = DEFAULT_TOLERANCE) -> float:
    """s(M)(rho) = sqrt(Tr(rho M^2) - Tr(rho M)^2)."""
    return _spread_from_moments(trace_inner(rho, m), trace_inner(rho, m.squared), tolerance)


def spread_values(
    m: HermitianOperator, region: StateRegion, tolerance: ToleranceConfig = DEFAULT_TOLERANCE
) -> SpreadValue:
    _check_dims(m, region)
    m2 = m.squared
    return SpreadValue(
        tuple(_spread_from_moments(trace_inner(s, m), trace_inner(s, m2), tolerance) for s in region.samples)
    )


def _hermitian_direction(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (g + g.conj().T) / 2.0
    return h / trace_norm(h)


def sample_region(
    center: DensityMatrix,
    radius: float,
    n_samples: int = 32,
    seed: int = 0,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> StateRegion:
    """
    Draw a deterministic finite sample of the trace-norm ball around ``center``.

    Parameters
    ----------
    center : DensityMatrix
        The region center; it becomes ``samples[0]``.
    radius : float
        Trace-norm radius (>= 0). A zero radius yields the singleton region.
    n_samples : int
        Total number of samples including the center.
    seed : int
        Seed of the numpy generator; equal seeds give identical samples.
    """
    if n_samples < 1:
        raise RegionSamplingError(f"n_samples must be >= 1, got {n_samples}")
    if radius < 0:
        raise RegionSamplingError(f"radius must be >= 0, got {radius}")
    if radius == 0.0 or n_samples == 1:
        return StateRegion(center, float(radius), (center,), seed)

    rng = np.random.default_rng(seed)
    samples: list[DensityMatrix] = [center]
    for i in range(1, n_samples):
        direction = _hermitian_direction(rng, center.dim)
        scale = float(rng.uniform(0.05, 0.95))
        for _ in range(_MAX_REDRAWS):
            candidate = repair_density(center.entries + scale * radius * direction, tolerance)
            if trace_norm(candidate - center) < radius:
                samples.append(candidate)
                break
            scale /= 2.0
        else:
            raise RegionSamplingError(f"could not place sample {i} inside radius {radius:.3e}")
    logger.debug(f"sampled region: dim={center.dim} radius={radius:.3e} n={n_samples} seed={seed}")
    return StateRegion(center, float(radius), tuple(samples), seed)


def singleton_region(state: DensityMatrix) -> StateRegion:
    return StateRegion(state, 0.0, (state,), 0)


def region_subset(region: StateRegion, indices: Sequence[int]) -> StateRegion:
    """A sub-region keeping the center and the listed samples."""
    keep = [0] + [i for i in indices if i != 0]
    return StateRegion(region.center, region.radius, tuple(region.samples[i] for i in keep), region.seed)


def is_eps_sharp(
    z: HermitianOperator,
    region: StateRegion,
    slit: SlitSpec,
    eps: float,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> SharpnessVerdict:
    """
    Pointwise epsilon-sharp collimation of Z through the slit.

    A sample passes when its mean lies in the open slit and the band
    mean +/- s/sqrt(eps) fits inside the closed slit. A zero spread is allowed
    (eigenstates collapse the band to a point).
    """
    if eps <= 0:
        raise InvariantViolationError(f"eps must be positive, got {eps}")
    _check_dims(z, region)
    z2 = z.squared
    root = math.sqrt(eps)
    flags: list[bool] = []
    for s in region.samples:
        mean = trace_inner(s, z)
        band = _spread_from_moments(mean, trace_inner(s, z2), tolerance) / root
        flags.append(slit.contains(mean) and slit.lo <= mean - band and mean + band <= slit.hi)
    return SharpnessVerdict(tuple(flags), all(flags))


def outside_slit_distance(rho: DensityMatrix, projector: Projector) -> float:
    """Tr|rho - P rho P|."""
    p = projector.entries
    return trace_norm(rho.entries - p @ rho.entries @ p)


def is_strictly_eps_sharp(
    z: HermitianOperator,
    region: StateRegion,
    slit: SlitSpec,
    eps: float,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> bool:
    """Epsilon-sharp and, for every sample, Tr|rho - P rho P| < eps with P the slit projector."""
    if not 0 < eps < 1:
        raise InvariantViolationError(f"strict sharpness needs 0 < eps < 1, got {eps}")
    if not is_eps_sharp(z, region, slit, eps, tolerance):
        return False
    projector = spectral_projector(z, slit, tolerance)
    return all(outside_slit_distance(s, projector) < eps for s in region.samples)


def restrict_to_slit(
    rho: DensityMatrix, projector: Projector, tolerance: ToleranceConfig = DEFAULT_TOLERANCE
) -> DensityMatrix:
    """P rho P / Tr(P rho P)."""
    if rho.dim != projector.dim:
        raise DimensionMismatchError(rho.dim, projector.dim, "state and projector")
    p = projector.entries
    inner = p @ rho.entries @ p
    weight = float(np.real(np.trace(inner)))
    if weight <= tolerance.min_restriction_weight:
        raise NullRestrictionError(weight)
    return DensityMatrix._trusted(inner / weight)


def is_approx_classical(m: HermitianOperator, region: StateRegion, eps2: float) -> bool:
    """|(M_Q)^2 - (M^2)_Q| < eps2 at every sample."""
    _check_dims(m, region)
    m2 = m.squared
    return all(abs(trace_inner(s, m) ** 2 - trace_inner(s, m2)) < eps2 for s in region.samples)


def region_to_json(region: StateRegion) -> RegionPayload:
    """Center, seed, radius and sample count; samples are regenerated on load."""
    return {
        "center": density_to_json(region.center),
        "radius": region.radius,
        "n_samples": len(region.samples),
        "seed": region.seed,
    }


def region_from_json(payload: dict[str, Any]) -> StateRegion:
    center = density_from_json(payload["center"])
    return sample_region(center, float(payload["radius"]), int(payload["n_samples"]), int(payload["seed"]))


def qrn_to_csv(qrn: QuantumRealNumber) -> str:
    """Rows ``sample_index,value``."""
    frame = pd.DataFrame(
        {"sample_index": range(len(qrn.per_sample)), "value": [f"{v:.12g}" for v in qrn.per_sample]}
    )
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False)
    return buffer.getvalue()
