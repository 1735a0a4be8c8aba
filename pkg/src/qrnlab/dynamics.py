"""dynamics.py
Quantum versus Newtonian motion of expectation values in one dimension.

Covers the Ehrenfest gap |Tr(rho F(Q)) - F(Tr(rho Q))|, narrow states
approximating a point r of the position spectrum, the windows W(r, eps) on
which the gap stays below eps, exact unitary evolution of expectations,
classical RK4 trajectories and the scalar sharpening law for the mean.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .collimation import TheoremReport
from .config import DEFAULT_TOLERANCE, GridConfig, ToleranceConfig
from .exceptions import (
    GridTooCoarseError,
    HypothesisNotMetError,
    InvariantViolationError,
    ModulusSearchFailedError,
)
from .logger_config import logger
from .operators import (
    DensityMatrix,
    HermitianOperator,
    apply_function,
    gaussian_packet,
    grid_operators,
    grid_points,
    operator_norm,
    trace_inner,
)
from .qrn import SlitSpec, StateRegion, is_eps_sharp, sample_region
from .types import RealFunction, RealVector, TrajectoryRow, VarianceModel

__all__ = [
    "ForceField",
    "EhrenfestWindow",
    "TrajectoryRecord",
    "CoverageReport",
    "ehrenfest_gap",
    "continuity_modulus",
    "construct_weyl_state",
    "construct_window",
    "check_theorem6",
    "window_coverage",
    "check_window_collimation",
    "build_hamiltonian",
    "evolve_expectations",
    "newton_trajectory",
    "compare_trajectories",
    "hamilton_pair_residual",
    "sharpening_ode",
    "rk4_step",
]

_MODULUS_SAMPLES = 401
_MODULUS_ITERATIONS = 60
_MIN_WIDTH_FRACTION = 0.25


@dataclass(frozen=True)
class ForceField:
    """A one-dimensional force F with potential V, F = -V'."""

    f: RealFunction
    v: RealFunction
    label: str = "F"
    s_continuous: bool = True
    force_poly: Polynomial | None = field(default=None, repr=False)

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], label: str | None = None) -> ForceField:
        """F(x) = sum_k coeffs[k] x^k, V = -integral of F with V(0) = 0."""
        force = Polynomial(np.asarray(coeffs, dtype=np.float64))
        potential = -force.integ()
        return cls(force, potential, label or f"poly{list(coeffs)}", True, force)

    @classmethod
    def harmonic(cls, k: float = 1.0) -> ForceField:
        """F = -k x."""
        return cls.polynomial([0.0, -k], f"harmonic(k={k:g})")

    @classmethod
    def cubic(cls, c: float = 1.0) -> ForceField:
        """F = c x^3."""
        return cls.polynomial([0.0, 0.0, 0.0, c], f"cubic(c={c:g})")

    @classmethod
    def quartic(cls, k: float = 1.0) -> ForceField:
        """Quartic well V = k x^4 / 4, F = -k x^3."""
        return cls.polynomial([0.0, 0.0, 0.0, -k], f"quartic(k={k:g})")

    @property
    def is_linear(self) -> bool:
        return self.force_poly is not None and self.force_poly.degree() <= 1

    def consistency_residual(self, grid: GridConfig) -> float:
        """max |F(x) + V'(x)| on the grid, V' by the fourth-order central difference at the grid step."""
        x = grid_points(grid)
        h = grid.step
        dv = (-self.v(x + 2 * h) + 8 * self.v(x + h) - 8 * self.v(x - h) + self.v(x - 2 * h)) / (12 * h)
        return float(np.max(np.abs(np.asarray(self.f(x)) + dv)))

    def check_consistency(self, grid: GridConfig, tolerance: float = 1e-4) -> None:
        residual = self.consistency_residual(grid)
        if residual > tolerance:
            raise InvariantViolationError(f"force {self.label} is not -V' on the grid (residual {residual:.3e})")


@dataclass(frozen=True, eq=False)
class EhrenfestWindow:
    """A region around a narrow state at r on which the Ehrenfest gap stays below eps."""

    r: float
    eps: float
    delta: float
    rho_r: DensityMatrix
    region: StateRegion
    grid: GridConfig


@dataclass(frozen=True)
class TrajectoryRecord:
    times: RealVector
    q_quantum: RealVector | None = None
    p_quantum: RealVector | None = None
    q_classical: RealVector | None = None
    p_classical: RealVector | None = None
    gap: RealVector | None = None
    energy: RealVector | None = None
    norm: RealVector | None = None
    hermiticity: RealVector | None = None

    def __post_init__(self) -> None:
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise InvariantViolationError("trajectory times must be strictly increasing")

    def rows(self) -> list[TrajectoryRow]:
        nan = np.full(self.times.shape, np.nan)

        def col(values: RealVector | None) -> RealVector:
            return nan if values is None else values

        return [
            {
                "t": float(t),
                "q_classical": float(qc),
                "p_classical": float(pc),
                "q_quantum": float(qq),
                "p_quantum": float(pq),
                "gap": float(g),
            }
            for t, qc, pc, qq, pq, g in zip(
                self.times,
                col(self.q_classical),
                col(self.p_classical),
                col(self.q_quantum),
                col(self.p_quantum),
                col(self.gap),
                strict=True,
            )
        ]


@dataclass(frozen=True)
class CoverageReport:
    target: tuple[float, float]
    intervals: tuple[tuple[float, float], ...]
    covered: bool
    n_refined: int


def _force_operator(force: ForceField, q: HermitianOperator) -> HermitianOperator:
    return apply_function(force.f, q, f"{force.label}(Q)")


def ehrenfest_gap(
    force: ForceField,
    q: HermitianOperator,
    rho: DensityMatrix,
    force_op: HermitianOperator | None = None,
) -> float:
    """|Tr(rho F(Q)) - F(Tr(rho Q))|; pass ``force_op`` to reuse a precomputed F(Q)."""
    fq = force_op if force_op is not None else _force_operator(force, q)
    return abs(trace_inner(rho, fq) - float(force.f(trace_inner(rho, q))))


def continuity_modulus(
    force: ForceField,
    r: float,
    eps: float,
    max_delta: float,
) -> float:
    """
    Largest delta (by bisection) with |F(x) - F(r)| < eps/6 for every x in (r - delta, r + delta).

    The supremum over the open interval is estimated on a dense uniform sample.
    """
    if eps <= 0 or max_delta <= 0:
        raise ModulusSearchFailedError(f"eps and max_delta must be positive, got {eps}, {max_delta}")
    target = eps / 6.0
    fr = float(force.f(r))

    def holds(delta: float) -> bool:
        x = np.linspace(r - delta, r + delta, _MODULUS_SAMPLES)[1:-1]
        return bool(np.max(np.abs(np.asarray(force.f(x)) - fr)) < target)

    if holds(max_delta):
        return max_delta
    lo, hi = 0.0, max_delta
    for _ in range(_MODULUS_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    if lo <= 0.0:
        raise ModulusSearchFailedError(f"no continuity modulus for {force.label} at r={r} and eps={eps}")
    return lo


def construct_weyl_state(
    grid: GridConfig,
    r: float,
    eps: float,
    force: ForceField,
    delta: float | None = None,
    initial_width: float = 0.5,
) -> DensityMatrix:
    """
    Gaussian packet at r, halved in width until Tr(rho F(Q)) is within eps/6 of F(r)
    and Tr(rho Q) within delta/2 of r.

    Raises ``GridTooCoarseError`` once the width falls below a quarter grid step.
    """
    if not -grid.half_width < r < grid.half_width:
        raise GridTooCoarseError(f"r={r} lies outside the grid interior")
    if delta is None:
        delta = continuity_modulus(force, r, eps, grid.half_width)
    q, _ = grid_operators(grid)
    fq = _force_operator(force, q)
    fr = float(force.f(r))
    width = initial_width
    while width >= _MIN_WIDTH_FRACTION * grid.step:
        rho = gaussian_packet(grid, r, width)
        if abs(trace_inner(rho, fq) - fr) < eps / 6.0 and abs(trace_inner(rho, q) - r) < delta / 2.0:
            logger.debug(f"weyl state at r={r}: width {width:.4g}")
            return rho
        width /= 2.0
    raise GridTooCoarseError(
        f"grid step {grid.step:.3g} cannot resolve a state at r={r} for eps={eps}",
        {"r": r, "eps": eps, "step": grid.step},
    )


def construct_window(
    force: ForceField,
    r: float,
    eps: float,
    grid: GridConfig | None = None,
    n_samples: int = 8,
    seed: int = 0,
) -> EhrenfestWindow:
    """
    W(r, eps) as a sampled region around a narrow state at r.

    Samples satisfy |Tr((rho - rho_r) Q)| < delta/2 and
    |Tr((rho - rho_r) F(Q))| < eps/3; the radius is chosen by trace-norm
    duality and both conditions are re-verified.
    """
    grid = grid or GridConfig(512, 5.0, 1.0)
    delta = continuity_modulus(force, r, eps, grid.half_width)
    rho_r = construct_weyl_state(grid, r, eps, force, delta)
    q, _ = grid_operators(grid)
    fq = _force_operator(force, q)
    f_norm = operator_norm(fq)
    radius = 0.9 * min(0.5 * delta / operator_norm(q), (eps / 3.0) / f_norm if f_norm > 0 else math.inf)
    region = sample_region(rho_r, radius, n_samples, seed)
    q_r, f_r = trace_inner(rho_r, q), trace_inner(rho_r, fq)
    for i, s in enumerate(region.samples):
        if not abs(trace_inner(s, q) - q_r) < 0.5 * delta or not abs(trace_inner(s, fq) - f_r) < eps / 3.0:
            raise InvariantViolationError(f"window sample {i} at r={r} left its neighborhoods")
    return EhrenfestWindow(float(r), float(eps), delta, rho_r, region, grid)


def check_theorem6(
    window: EhrenfestWindow, force: ForceField, tolerance: ToleranceConfig = DEFAULT_TOLERANCE
) -> TheoremReport:
    """Gap |Tr(rho F(Q)) - F(Tr(rho Q))| < eps on every sample of the window."""
    q, _ = grid_operators(window.grid)
    fq = _force_operator(force, q)
    gaps = [ehrenfest_gap(force, q, s, fq) for s in window.region.samples]
    return TheoremReport.from_margins(
        "theorem6", (window.eps - g for g in gaps), tolerance, notes={"r": window.r, "delta": window.delta}
    )


def window_coverage(
    force: ForceField,
    lattice: Sequence[float],
    eps: float,
    target: tuple[float, float] = (-3.0, 3.0),
    max_delta: float = 10.0,
    refine: bool = True,
    max_windows: int = 100_000,
) -> CoverageReport:
    """
    Whether the open intervals (r - delta, r + delta) cover ``target``.

    Starts from the lattice; with ``refine`` every uncovered point met while
    sweeping left to right becomes the center of a new window.
    """
    intervals = []
    for r in lattice:
        d = continuity_modulus(force, float(r), eps, max_delta)
        intervals.append((float(r) - d, float(r) + d))
    refined = 0
    pos, end = target
    while pos <= end:
        reach = [hi for lo, hi in intervals if lo < pos < hi]
        if reach:
            pos = max(reach)
            continue
        if not refine or len(intervals) >= max_windows:
            return CoverageReport(target, tuple(sorted(intervals)), False, refined)
        d = continuity_modulus(force, pos, eps, max_delta)
        intervals.append((pos - d, pos + d))
        refined += 1
    logger.debug(f"window_coverage: {len(intervals)} windows, {refined} added by refinement")
    return CoverageReport(target, tuple(sorted(intervals)), True, refined)


def check_window_collimation(window: EhrenfestWindow, force: ForceField) -> dict[str, float | bool]:
    """
    Relates a window to slit collimation through the slit (r - delta, r + delta).

    Reports whether delta < m eps with m = 2 min(|z1|, |z2|) and whether the
    window samples are eps-sharp for that slit. Only linear forces are
    accepted.
    """
    if not force.is_linear:
        raise HypothesisNotMetError("window_collimation", "only linear (harmonic) forces are supported")
    slit = SlitSpec(window.r - window.delta, window.r + window.delta)
    m = 2.0 * min(abs(slit.lo), abs(slit.hi))
    q, _ = grid_operators(window.grid)
    sharp = bool(is_eps_sharp(q, window.region, slit, window.eps))
    return {"m": m, "delta_below_m_eps": window.delta < m * window.eps, "sharp": sharp}


def build_hamiltonian(force: ForceField, grid: GridConfig, mu: float = 1.0) -> HermitianOperator:
    """H = P^2 / (2 mu) + V(Q)."""
    q, p = grid_operators(grid)
    kinetic = p.squared.entries / (2.0 * mu)
    potential = apply_function(force.v, q).entries
    return HermitianOperator(kinetic + potential, f"H[{force.label}]")


def evolve_expectations(
    h: HermitianOperator,
    rho0: DensityMatrix,
    times: Sequence[float],
    q: HermitianOperator,
    p: HermitianOperator,
    hbar: float = 1.0,
    force: ForceField | None = None,
) -> TrajectoryRecord:
    """
    <Q>(t) and <P>(t) under rho(t) = exp(-iHt) rho0 exp(iHt), evaluated in the eigenbasis of H.

    Energy Tr(rho(t) H), trace and the anti-Hermitian residual of rho(t) are
    recorded for conservation checks; with ``force`` the Ehrenfest gap series
    is recorded too.
    """
    t = np.asarray(times, dtype=np.float64)
    w, v = h.eigh
    vh = v.conj().T
    rho_e = vh @ rho0.entries @ v
    q_e = (vh @ q.entries @ v).T
    p_e = (vh @ p.entries @ v).T
    h_e = (vh @ h.entries @ v).T
    f_e = (vh @ _force_operator(force, q).entries @ v).T if force is not None else None
    freq = (w[:, None] - w[None, :]) / hbar
    qs, ps, energy, norm, hermiticity, gaps = [], [], [], [], [], []
    for ti in t:
        rho_t = rho_e * np.exp(-1j * freq * ti)
        mean_q = float(np.real(np.sum(rho_t * q_e)))
        qs.append(mean_q)
        ps.append(float(np.real(np.sum(rho_t * p_e))))
        energy.append(float(np.real(np.sum(rho_t * h_e))))
        norm.append(float(np.real(np.trace(rho_t))))
        hermiticity.append(float(np.linalg.norm(rho_t - rho_t.conj().T)))
        if force is not None and f_e is not None:
            gaps.append(abs(float(np.real(np.sum(rho_t * f_e))) - float(force.f(mean_q))))
    return TrajectoryRecord(
        t,
        q_quantum=np.asarray(qs),
        p_quantum=np.asarray(ps),
        gap=np.asarray(gaps) if force is not None else None,
        energy=np.asarray(energy),
        norm=np.asarray(norm),
        hermiticity=np.asarray(hermiticity),
    )


def rk4_step(y: np.ndarray, fun: Callable[[float, np.ndarray], np.ndarray], t: float, dt: float) -> np.ndarray:
    """One classical Runge-Kutta 4 step."""
    dt2 = dt / 2.0
    k1 = fun(t, y)
    k2 = fun(t + dt2, y + k1 * dt2)
    k3 = fun(t + dt2, y + k2 * dt2)
    k4 = fun(t + dt, y + k3 * dt)
    return y + (k1 + 2 * k2 + 2 * k3 + k4) / 6.0 * dt


def _integrate(
    fun: Callable[[float, np.ndarray], np.ndarray], y0: np.ndarray, times: Sequence[float], max_step: float
) -> np.ndarray:
    t = np.asarray(times, dtype=np.float64)
    out = np.empty((t.size, y0.size), dtype=np.float64)
    y = np.array(y0, dtype=np.float64)
    out[0] = y
    for i in range(1, t.size):
        span = t[i] - t[i - 1]
        if span <= 0:
            raise InvariantViolationError("times must be strictly increasing")
        steps = max(1, math.ceil(span / max_step))
        dt = span / steps
        for k in range(steps):
            y = rk4_step(y, fun, t[i - 1] + k * dt, dt)
        out[i] = y
    return out


def newton_trajectory(
    mu: float,
    force: ForceField,
    q0: float,
    p0: float,
    times: Sequence[float],
    max_step: float = 1e-2,
) -> TrajectoryRecord:
    """
    Classical q(t), p(t) for mu dq/dt = p, dp/dt = F(q).

    Each output interval is split into RK4 steps of at most ``max_step``.
    """

    def rhs(_t: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1] / mu, float(force.f(y[0]))])

    path = _integrate(rhs, np.array([q0, p0]), times, max_step)
    return TrajectoryRecord(np.asarray(times, dtype=np.float64), q_classical=path[:, 0], p_classical=path[:, 1])


def compare_trajectories(quantum: TrajectoryRecord, classical: TrajectoryRecord) -> float:
    """max_t |<Q>(t) - q(t)|."""
    if quantum.q_quantum is None or classical.q_classical is None:
        raise InvariantViolationError("both a quantum and a classical position series are required")
    if not np.array_equal(quantum.times, classical.times):
        raise InvariantViolationError("trajectories are sampled on different time grids")
    return float(np.max(np.abs(quantum.q_quantum - classical.q_classical)))


def hamilton_pair_residual(trajectory: TrajectoryRecord, mu: float = 1.0) -> float:
    """max |mu d<Q>/dt - <P>| with the derivative taken by second-order finite differences."""
    if trajectory.q_quantum is None or trajectory.p_quantum is None:
        raise InvariantViolationError("quantum position and momentum series are required")
    dq = np.gradient(trajectory.q_quantum, trajectory.times, edge_order=2)
    return float(np.max(np.abs(mu * dq - trajectory.p_quantum)))


def sharpening_ode(
    mu: float,
    lam: float,
    q0: float,
    variance_fn: VarianceModel,
    times: Sequence[float],
    max_step: float = 1e-2,
) -> RealVector:
    """Mean position under mu dq/dt = -lam Var(t)."""
    if mu <= 0 or lam <= 0:
        raise InvariantViolationError(f"mu and lambda must be positive, got {mu}, {lam}")

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return np.array([-(lam / mu) * float(variance_fn(t))])

    return _integrate(rhs, np.array([q0]), times, max_step)[:, 0]
