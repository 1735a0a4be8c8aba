"""collimation.py
One-slit experiment verifiers.

Each ``check_*`` function first confirms that its input satisfies the
hypothesis of the inequality it verifies (raising ``HypothesisNotMetError``
otherwise) and then reports one margin per region sample, positive when the
inequality holds. Margins are compared against zero with the additive slack
``ToleranceConfig.check_slack`` only.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCE, GridConfig, ToleranceConfig
from .exceptions import HypothesisNotMetError, PreparationFailedError, UnboundedSlitPreconditionError
from .logger_config import logger
from .operators import (
    DensityMatrix,
    HermitianOperator,
    Projector,
    gaussian_packet,
    grid_operators,
    grid_points,
    identity,
    operator_norm,
    spectral_projector,
    trace_inner,
    trace_norm,
)
from .parallel import parallel_map
from .qrn import (
    SlitSpec,
    StateRegion,
    is_eps_sharp,
    is_strictly_eps_sharp,
    outside_slit_distance,
    restrict_to_slit,
    sample_region,
    singleton_region,
    spread,
    spread_values,
)

__all__ = [
    "TheoremReport",
    "prepare_sharp_state",
    "sharp_region",
    "chebyshev_saturating_state",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "check_corollary1",
    "corollary1_bound",
    "check_theorem4",
    "check_basic_postulate1",
    "random_bounded_operator",
    "run_slit_suite",
]


@dataclass(frozen=True)
class TheoremReport:
    """Per-sample margins (bound minus achieved) of one verified inequality."""

    theorem_id: str
    per_sample_margin: tuple[float, ...]
    passed: bool
    worst_margin: float
    notes: dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_margins(
        cls,
        theorem_id: str,
        margins: Iterable[float],
        tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
        notes: dict[str, float] | None = None,
    ) -> TheoremReport:
        values = tuple(float(m) for m in margins)
        worst = min(values) if values else math.inf
        passed = all(m >= -tolerance.check_slack for m in values)
        if not passed:
            logger.warning(f"{theorem_id}: worst margin {worst:.3e} violates the bound")
        return cls(theorem_id, values, passed, worst, dict(notes or {}))

    @classmethod
    def merge(cls, reports: Sequence[TheoremReport], theorem_id: str | None = None) -> TheoremReport:
        """Concatenate the margins of several runs of the same check."""
        if not reports:
            raise ValueError("merge needs at least one report")
        margins = tuple(m for r in reports for m in r.per_sample_margin)
        worst = min(r.worst_margin for r in reports)
        return cls(theorem_id or reports[0].theorem_id, margins, all(r.passed for r in reports), worst)


def _require(condition: bool, check_id: str, reason: str) -> None:
    if not condition:
        raise HypothesisNotMetError(check_id, reason)


def prepare_sharp_state(slit: SlitSpec, eps: float, grid: GridConfig) -> DensityMatrix:
    """
    Gaussian packet at the slit midpoint with width 0.4 * w * sqrt(eps).

    The band mean +/- s/sqrt(eps) then spans 0.8 w, leaving 0.1 w on either
    side of the slit.
    """
    if not (-grid.half_width < slit.lo and slit.hi < grid.half_width):
        raise PreparationFailedError(
            f"slit ]{slit.lo}, {slit.hi}[ does not fit inside the grid [-{grid.half_width}, {grid.half_width})"
        )
    sigma = 0.4 * slit.width * math.sqrt(eps)
    state = gaussian_packet(grid, slit.midpoint, sigma)
    z, _ = grid_operators(grid)
    if not is_eps_sharp(z, singleton_region(state), slit, eps):
        raise PreparationFailedError(
            f"grid step {grid.step:.3g} too coarse for a packet of width {sigma:.3g}",
            {"sigma": sigma, "step": grid.step},
        )
    return state


def sharp_region(
    slit: SlitSpec,
    eps: float,
    grid: GridConfig,
    n_samples: int = 32,
    seed: int = 0,
    strict: bool = False,
    max_halvings: int = 30,
) -> StateRegion:
    """
    A seeded region around ``prepare_sharp_state`` on which Z is (strictly) eps-sharp.

    The starting radius is the trace-norm duality estimate that keeps the
    band inside the slit; it is halved until every sample passes.
    """
    z, _ = grid_operators(grid)
    center = prepare_sharp_state(slit, eps, grid)
    s0 = spread(z, center)
    reach = grid.half_width
    headroom = 0.5 * slit.width - s0 / math.sqrt(eps)
    radius = min(
        headroom / (2.0 * reach),
        ((s0 + 0.5 * headroom * math.sqrt(eps)) ** 2 - s0**2) / (3.0 * reach**2),
    )
    if strict:
        projector = spectral_projector(z, slit)
        radius = min(radius, 0.5 * (eps - outside_slit_distance(center, projector)))
    radius *= 0.9
    for _ in range(max_halvings):
        region = sample_region(center, radius, n_samples, seed)
        ok = is_strictly_eps_sharp(z, region, slit, eps) if strict else bool(is_eps_sharp(z, region, slit, eps))
        if ok:
            logger.debug(f"sharp_region: seed={seed} radius={radius:.3e} strict={strict}")
            return region
        radius /= 2.0
    raise PreparationFailedError(f"no sharp region found for seed {seed} after {max_halvings} halvings")


def chebyshev_saturating_state(grid: GridConfig, half_width_points: int, eps: float) -> tuple[DensityMatrix, SlitSpec]:
    """
    Three-point state saturating the Chebyshev step.

    Mass eps*(1 - 1e-6) is split between the two grid points that form the
    slit endpoints, the remainder sits at the central grid point. The slit is
    open, so the endpoint mass lies outside it.
    """
    x = grid_points(grid)
    c = grid.n // 2
    k = int(half_width_points)
    if k < 1 or c - k < 0 or c + k >= grid.n:
        raise PreparationFailedError(f"half width of {k} points does not fit the grid")
    eta = eps * (1.0 - 1e-6)
    diag = np.zeros(grid.n, dtype=np.float64)
    diag[c] = 1.0 - eta
    diag[c - k] = eta / 2.0
    diag[c + k] = eta / 2.0
    return DensityMatrix._trusted(np.diag(diag).astype(np.complex128)), SlitSpec(float(x[c - k]), float(x[c + k]))


def check_theorem1(
    z: HermitianOperator,
    region: StateRegion,
    slit: SlitSpec,
    eps: float,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> TheoremReport:
    """Spread bound 4 s(Z)^2 / w^2 <= eps on an eps-sharp region."""
    _require(bool(is_eps_sharp(z, region, slit, eps, tolerance)), "theorem1", "region is not eps-sharp")
    w2 = slit.width**2
    spreads = spread_values(z, region, tolerance).per_sample
    return TheoremReport.from_margins("theorem1", (eps - 4.0 * s * s / w2 for s in spreads), tolerance)


def _tightest_slit(z: HermitianOperator, region: StateRegion, eps: float) -> SlitSpec:
    root = math.sqrt(eps)
    z2 = z.squared
    lows, highs = [], []
    for s in region.samples:
        mean = trace_inner(s, z)
        band = math.sqrt(max(trace_inner(s, z2) - mean * mean, 0.0)) / root
        lows.append(mean - band)
        highs.append(mean + band)
    lo, hi = min(lows), max(highs)
    if not lo < hi:
        hi = lo + 1e-12
    return SlitSpec(lo, hi)


def check_theorem2(
    z: HermitianOperator,
    p: HermitianOperator,
    region: StateRegion,
    eps: float,
    hbar: float = 1.0,
    zslit: SlitSpec | None = None,
    pslit: SlitSpec | None = None,
    rel_tol: float = 0.0,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> TheoremReport:
    """
    Slit width product |z2 - z1| |p2 - p1| >= 2 hbar / eps.

    Slits left as ``None`` are replaced by the tightest slits covering every
    sample band mean +/- s/sqrt(eps). ``rel_tol`` relaxes the bound to absorb
    grid discretization error.
    """
    zslit = zslit or _tightest_slit(z, region, eps)
    pslit = pslit or _tightest_slit(p, region, eps)
    _require(bool(is_eps_sharp(z, region, zslit, eps, tolerance)), "theorem2", "region is not eps-sharp for Z")
    _require(bool(is_eps_sharp(p, region, pslit, eps, tolerance)), "theorem2", "region is not eps-sharp for P")
    product = zslit.width * pslit.width
    bound = (1.0 - rel_tol) * 2.0 * hbar / eps
    return TheoremReport.from_margins(
        "theorem2",
        [product - bound] * len(region),
        tolerance,
        notes={"z_width": zslit.width, "p_width": pslit.width, "bound": bound},
    )


def check_theorem3(
    z: HermitianOperator,
    region: StateRegion,
    slit: SlitSpec,
    eps: float,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> TheoremReport:
    """Passage probability Tr(P rho) > 1 - eps on an eps-sharp region."""
    _require(bool(is_eps_sharp(z, region, slit, eps, tolerance)), "theorem3", "region is not eps-sharp")
    projector = spectral_projector(z, slit, tolerance)
    return TheoremReport.from_margins(
        "theorem3", (trace_inner(s, projector) - (1.0 - eps) for s in region.samples), tolerance
    )


def corollary1_bound(eps: float) -> float:
    return eps * (2.0 - eps) / (1.0 - eps)


def check_corollary1(
    rho: DensityMatrix, projector: Projector, eps: float, tolerance: ToleranceConfig = DEFAULT_TOLERANCE
) -> float:
    """eps(2 - eps)/(1 - eps) - Tr|rho - rho_1| with rho_1 the restriction of rho to the slit."""
    if not 0 < eps < 1:
        raise HypothesisNotMetError("corollary1", f"eps must lie in (0, 1), got {eps}")
    outside = outside_slit_distance(rho, projector)
    _require(outside < eps, "corollary1", f"Tr|rho - P rho P| = {outside:.3e} is not below eps")
    restricted = restrict_to_slit(rho, projector, tolerance)
    return corollary1_bound(eps) - trace_norm(rho - restricted)


def check_theorem4(
    m: HermitianOperator,
    region: StateRegion,
    slit: SlitSpec,
    eps: float,
    z: HermitianOperator,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> TheoremReport:
    """
    Slit approximation |Tr(rho M) - Tr(P rho P M)| on a strictly eps-sharp region.

    Bounded observables use the bound 3 ||M|| eps. When ``m`` is the position
    operator ``z`` itself the bound is eps * m0 with m0 = 2 min(|z1|, |z2|),
    valid only if 2 w <= eps * m0.
    """
    _require(is_strictly_eps_sharp(z, region, slit, eps, tolerance), "theorem4", "region is not strictly eps-sharp")
    if m is z or np.array_equal(m.entries, z.entries):
        m0 = 2.0 * min(abs(slit.lo), abs(slit.hi))
        if not 2.0 * slit.width <= eps * m0:
            raise UnboundedSlitPreconditionError(slit.width, eps, m0)
        bound = eps * m0
        check_id = "theorem4_position"
    else:
        bound = 3.0 * operator_norm(m) * eps
        check_id = "theorem4"
    projector = spectral_projector(z, slit, tolerance)
    p = projector.entries
    pmp = HermitianOperator(p @ m.entries @ p, f"P{m.label}P")
    margins = (bound - abs(trace_inner(s, m) - trace_inner(s, pmp)) for s in region.samples)
    return TheoremReport.from_margins(check_id, margins, tolerance, notes={"bound": bound})


def check_basic_postulate1(
    z: HermitianOperator,
    region: StateRegion,
    slit: SlitSpec,
    eps: float,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> TheoremReport:
    """
    Probability of passage through the slit exceeds 1 - eps on a strictly sharp region.

    When the slit isolates a single eigenvalue of Z its value and the
    center-state probability are recorded in the notes.
    """
    _require(
        is_strictly_eps_sharp(z, region, slit, eps, tolerance),
        "basic_postulate1",
        "region is not strictly eps-sharp",
    )
    projector = spectral_projector(z, slit, tolerance)
    notes: dict[str, float] = {}
    w = z.eigenvalues
    inside = w[(w > slit.lo + tolerance.interval_boundary) & (w < slit.hi - tolerance.interval_boundary)]
    if inside.size and float(inside.max() - inside.min()) < tolerance.degeneracy_merge:
        notes = {"eigenvalue": float(inside.mean()), "eigenvalue_probability": trace_inner(region.center, projector)}
    return TheoremReport.from_margins(
        "basic_postulate1", (trace_inner(s, projector) - (1.0 - eps) for s in region.samples), tolerance, notes
    )


def random_bounded_operator(
    dim: int, rng: np.random.Generator, norm: float = 1.0, label: str = "M"
) -> HermitianOperator:
    """Seeded Hermitian matrix scaled to the requested operator norm."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (g + g.conj().T) / 2.0
    return HermitianOperator(norm * h / operator_norm(h), label)


def run_slit_suite(
    slit: SlitSpec,
    eps: float,
    grid: GridConfig,
    seeds: Sequence[int],
    n_samples: int = 8,
    n_observables: int = 4,
    rel_tol: float = 0.01,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> list[TheoremReport]:
    """Run every one-slit check over strictly sharp regions, one per seed; reports are merged per check."""
    z, p = grid_operators(grid)
    projector = spectral_projector(z, slit, tolerance)
    m0 = 2.0 * min(abs(slit.lo), abs(slit.hi))
    position_branch = 2.0 * slit.width <= eps * m0

    def one_seed(seed: int) -> list[TheoremReport]:
        region = sharp_region(slit, eps, grid, n_samples, seed, strict=True)
        rng = np.random.default_rng(seed)
        reports = [
            check_theorem1(z, region, slit, eps, tolerance),
            check_theorem2(z, p, region, eps, grid.hbar, rel_tol=rel_tol, tolerance=tolerance),
            check_theorem3(z, region, slit, eps, tolerance),
            TheoremReport.from_margins(
                "corollary1", (check_corollary1(s, projector, eps, tolerance) for s in region.samples), tolerance
            ),
            check_basic_postulate1(z, region, slit, eps, tolerance),
        ]
        observables = [identity(z.dim)]
        observables += [random_bounded_operator(z.dim, rng, label=f"M{i}") for i in range(n_observables)]
        reports.append(
            TheoremReport.merge([check_theorem4(m, region, slit, eps, z, tolerance) for m in observables])
        )
        if position_branch:
            reports.append(check_theorem4(z, region, slit, eps, z, tolerance))
        return reports

    per_seed = parallel_map(one_seed, list(seeds))

    # Adversarial Chebyshev case sized to the requested slit on the same grid
    k = max(1, int(round(0.5 * slit.width / grid.step)))
    saturating, sat_slit = chebyshev_saturating_state(grid, k, eps)
    adversarial = check_theorem3(z, singleton_region(saturating), sat_slit, eps, tolerance)

    merged: dict[str, list[TheoremReport]] = {}
    for reports in per_seed:
        for report in reports:
            merged.setdefault(report.theorem_id, []).append(report)
    out = [TheoremReport.merge(group) for group in merged.values()]
    out.append(TheoremReport.merge([adversarial], "theorem3_chebyshev"))
    logger.info(f"slit suite: {len(seeds)} seeds, {sum(r.passed for r in out)}/{len(out)} checks passed")
    return out
