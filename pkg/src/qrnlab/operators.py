"""operators.py
Dense Hermitian operator algebra on a finite-dimensional Hilbert space.

Every quantity in the laboratory is a dense complex matrix: observables are
``HermitianOperator`` instances, states are ``DensityMatrix`` instances. Both are
immutable after construction (the backing array is made read-only), so every
function in this module is pure and safe to call from worker threads.

Unbounded position and momentum operators are represented on a periodic grid
(``grid_operators``); the canonical commutation relation then only holds on
states supported in the bulk of the grid.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLERANCE, MAX_DIM, GridConfig, ToleranceConfig
from .exceptions import DimensionBlowUpError, DimensionMismatchError, InvariantViolationError
from .logger_config import logger
from .types import ComplexMatrix, DensityPayload, EntryPairs, OperatorPayload, RealVector

__all__ = [
    "HermitianOperator",
    "DensityMatrix",
    "SpectralDecomposition",
    "Projector",
    "trace_inner",
    "operator_abs",
    "trace_norm",
    "trace_distance",
    "operator_norm",
    "spectral_decompose",
    "spectral_projector",
    "apply_function",
    "commutator",
    "tensor",
    "partial_trace",
    "grid_operators",
    "grid_points",
    "gaussian_packet",
    "density_from_vector",
    "mixture",
    "repair_density",
    "identity",
    "operator_to_json",
    "operator_from_json",
    "density_to_json",
    "density_from_json",
]


def _square(matrix: Any, what: str) -> ComplexMatrix:
    arr = np.array(matrix, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise InvariantViolationError(f"{what} must be a non-empty square matrix, got shape {arr.shape}")
    return arr


def _freeze(arr: ComplexMatrix) -> ComplexMatrix:
    arr.setflags(write=False)
    return arr


def _hermitize(arr: ComplexMatrix) -> ComplexMatrix:
    return (arr + arr.conj().T) / 2.0


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A self-adjoint d x d matrix. Entries are symmetrized on construction."""

    entries: ComplexMatrix
    label: str = ""

    def __post_init__(self) -> None:
        arr = _square(self.entries, f"operator '{self.label}'")
        object.__setattr__(self, "entries", _freeze(_hermitize(arr)))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @cached_property
    def eigh(self) -> tuple[RealVector, ComplexMatrix]:
        """Ascending eigenvalues and orthonormal eigenvectors (columns)."""
        w, v = scipy.linalg.eigh(self.entries)
        return np.asarray(w, dtype=np.float64), np.asarray(v, dtype=np.complex128)

    @property
    def eigenvalues(self) -> RealVector:
        return self.eigh[0]

    def relabel(self, label: str) -> HermitianOperator:
        return HermitianOperator(self.entries, label)

    @cached_property
    def squared(self) -> HermitianOperator:
        return HermitianOperator(self.entries @ self.entries, f"{self.label}^2")

    def __add__(self, other: HermitianOperator) -> HermitianOperator:
        _check_dims(self.dim, other.dim)
        return HermitianOperator(self.entries + other.entries, f"({self.label}+{other.label})")

    def __sub__(self, other: HermitianOperator) -> HermitianOperator:
        _check_dims(self.dim, other.dim)
        return HermitianOperator(self.entries - other.entries, f"({self.label}-{other.label})")

    def __mul__(self, scalar: float) -> HermitianOperator:
        return HermitianOperator(float(scalar) * self.entries, f"{scalar:g}*{self.label}")

    __rmul__ = __mul__

    def __neg__(self) -> HermitianOperator:
        return HermitianOperator(-self.entries, f"-{self.label}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A positive, unit-trace operator: a point of the state space."""

    entries: ComplexMatrix
    tolerance: ToleranceConfig = field(default=DEFAULT_TOLERANCE, repr=False)

    def __post_init__(self) -> None:
        arr = _hermitize(_square(self.entries, "density matrix"))
        tr = float(np.real(np.trace(arr)))
        if abs(tr - 1.0) > self.tolerance.trace_tolerance:
            raise InvariantViolationError(f"Density matrix trace is {tr!r}, expected 1", {"trace": tr})
        lowest = float(scipy.linalg.eigvalsh(arr)[0])
        if lowest < -self.tolerance.psd_floor:
            raise InvariantViolationError(
                f"Density matrix has negative eigenvalue {lowest:.3e}", {"min_eigenvalue": lowest}
            )
        object.__setattr__(self, "entries", _freeze(arr))

    @classmethod
    def _trusted(cls, matrix: ComplexMatrix) -> DensityMatrix:
        """Wrap a matrix that is a density matrix by construction (skips the eigenvalue check)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "entries", _freeze(_hermitize(np.array(matrix, dtype=np.complex128))))
        object.__setattr__(obj, "tolerance", DEFAULT_TOLERANCE)
        return obj

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def as_operator(self, label: str = "rho") -> HermitianOperator:
        return HermitianOperator(self.entries, label)

    def __sub__(self, other: DensityMatrix | HermitianOperator) -> HermitianOperator:
        _check_dims(self.dim, other.dim)
        return HermitianOperator(self.entries - other.entries, "delta")


@dataclass(frozen=True)
class SpectralDecomposition:
    """A = sum_i eigenvalues[i] * eigenprojectors[i], eigenvalues ascending and distinct."""

    eigenvalues: list[float]
    eigenprojectors: list[HermitianOperator]

    def reconstruct(self) -> ComplexMatrix:
        dim = self.eigenprojectors[0].dim
        out = np.zeros((dim, dim), dtype=np.complex128)
        for value, proj in zip(self.eigenvalues, self.eigenprojectors, strict=True):
            out += value * proj.entries
        return out


@dataclass(frozen=True)
class Projector:
    """An orthogonal projection P = P^2 = P^dagger."""

    operator: HermitianOperator

    @property
    def dim(self) -> int:
        return self.operator.dim

    @property
    def entries(self) -> ComplexMatrix:
        return self.operator.entries

    @property
    def rank(self) -> int:
        return int(round(float(np.real(np.trace(self.operator.entries)))))

    def complement(self) -> Projector:
        return Projector(HermitianOperator(np.eye(self.dim) - self.entries, f"I-{self.operator.label}"))

    @classmethod
    def checked(cls, operator: HermitianOperator, tolerance: ToleranceConfig = DEFAULT_TOLERANCE) -> Projector:
        """Validate idempotence and the {0,1} spectrum before wrapping."""
        p = operator.entries
        residual = float(np.linalg.norm(p @ p - p))
        if residual > tolerance.projector_tolerance:
            raise InvariantViolationError(f"Operator is not idempotent: ||P^2-P|| = {residual:.3e}")
        w = operator.eigenvalues
        off = np.minimum(np.abs(w), np.abs(w - 1.0))
        if off.size and float(off.max()) > tolerance.projector_eigenvalue_tolerance:
            raise InvariantViolationError("Projector eigenvalues are not in {0, 1}")
        return cls(operator)


def _check_dims(expected: int, actual: int, what: str = "operands") -> None:
    if expected != actual:
        raise DimensionMismatchError(expected, actual, what)


def _matrix_of(x: HermitianOperator | DensityMatrix | Projector | ComplexMatrix) -> ComplexMatrix:
    if isinstance(x, HermitianOperator | DensityMatrix | Projector):
        return x.entries
    return np.asarray(x, dtype=np.complex128)


def _eigvalsh(x: HermitianOperator | DensityMatrix | Projector | ComplexMatrix) -> RealVector:
    if isinstance(x, HermitianOperator):
        return x.eigenvalues
    if isinstance(x, Projector):
        return x.operator.eigenvalues
    return np.asarray(scipy.linalg.eigvalsh(_hermitize(_matrix_of(x))), dtype=np.float64)


def trace_inner(
    rho: DensityMatrix,
    m: HermitianOperator | Projector,
    tolerance: ToleranceConfig = DEFAULT_TOLERANCE,
) -> float:
    """Re Tr(rho M); the imaginary residue must vanish up to the configured tolerance."""
    _check_dims(rho.dim, m.dim, "state and observable")
    mat = _matrix_of(m)
    value = complex(np.einsum("ij,ji->", rho.entries, mat))
    scale = max(1.0, float(np.abs(mat).max()))
    if abs(value.imag) > tolerance.imaginary_residue * scale:
        raise InvariantViolationError(f"Tr(rho M) has imaginary residue {value.imag:.3e}")
    return value.real


def operator_abs(a: HermitianOperator) -> HermitianOperator:
    """|A| = sqrt(A* A): same eigenvectors, eigenvalues |lambda_i|."""
    w, v = a.eigh
    return HermitianOperator((v * np.abs(w)) @ v.conj().T, f"|{a.label}|")


def trace_norm(a: HermitianOperator | DensityMatrix | ComplexMatrix) -> float:
    """||A||_1 = Tr|A| = sum |lambda_i|."""
    return float(np.abs(_eigvalsh(a)).sum())


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    return trace_norm(rho - sigma)


def operator_norm(a: HermitianOperator | ComplexMatrix) -> float:
    """Largest |lambda_i|."""
    w = _eigvalsh(a)
    return float(np.abs(w).max()) if w.size else 0.0


def spectral_decompose(a: HermitianOperator, tolerance: ToleranceConfig = DEFAULT_TOLERANCE) -> SpectralDecomposition:
    """Group eigenvectors whose eigenvalues are closer than the degeneracy threshold."""
    w, v = a.eigh
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] < tolerance.degeneracy_merge:
            groups[-1].append(i)
        else:
            groups.append([i])
    values: list[float] = []
    projectors: list[HermitianOperator] = []
    for k, idx in enumerate(groups):
        cols = v[:, idx]
        values.append(float(np.mean(w[idx])))
        projectors.append(HermitianOperator(cols @ cols.conj().T, f"P{k}[{a.label}]"))
    logger.debug(f"spectral_decompose({a.label}): {len(w)} eigenvalues in {len(groups)} groups")
    return SpectralDecomposition(values, projectors)


def _bounds(interval: Any) -> tuple[float, float]:
    if hasattr(interval, "lo") and hasattr(interval, "hi"):
        lo, hi = float(interval.lo), float(interval.hi)
    else:
        lo, hi = (float(x) for x in interval)
    if not lo < hi:
        raise InvariantViolationError(f"Interval ]{lo}, {hi}[ is empty")
    return lo, hi


def spectral_projector(
    a: HermitianOperator, interval: Any, tolerance: ToleranceConfig = DEFAULT_TOLERANCE
) -> Projector:
    """E_A(]lo, hi[): eigenvalues within the boundary tolerance of an endpoint are excluded."""
    lo, hi = _bounds(interval)
    w, v = a.eigh
    eps = tolerance.interval_boundary
    mask = (w > lo + eps) & (w < hi - eps)
    cols = v[:, mask]
    label = f"E_{a.label}(]{lo:g},{hi:g}[)"
    return Projector(HermitianOperator(cols @ cols.conj().T, label))


def apply_function(f: Callable[[Any], Any], a: HermitianOperator, label: str | None = None) -> HermitianOperator:
    """Spectral calculus f(A) = sum f(lambda_i) P_i."""
    w, v = a.eigh
    fw = np.asarray(f(w), dtype=np.float64)
    if fw.shape != w.shape:
        fw = np.array([float(f(x)) for x in w], dtype=np.float64)
    return HermitianOperator((v * fw) @ v.conj().T, label or f"f({a.label})")


def commutator(a: HermitianOperator | ComplexMatrix, b: HermitianOperator | ComplexMatrix) -> ComplexMatrix:
    """[A, B] = AB - BA (anti-Hermitian for Hermitian inputs)."""
    ma, mb = _matrix_of(a), _matrix_of(b)
    _check_dims(ma.shape[0], mb.shape[0])
    return ma @ mb - mb @ ma


def tensor(a: Any, b: Any) -> Any:
    """Kronecker product; two density matrices give a density matrix, otherwise an operator."""
    ma, mb = _matrix_of(a), _matrix_of(b)
    dim = ma.shape[0] * mb.shape[0]
    if dim > MAX_DIM:
        raise DimensionBlowUpError(dim, MAX_DIM)
    out = np.kron(ma, mb)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix._trusted(out)
    label_a = getattr(getattr(a, "operator", a), "label", "A")
    label_b = getattr(getattr(b, "operator", b), "label", "B")
    return HermitianOperator(out, f"{label_a}(x){label_b}")


def partial_trace(rho12: DensityMatrix, keep: int, dims: tuple[int, int]) -> DensityMatrix:
    """Trace out one factor of a bipartite state; ``keep`` is 1 or 2."""
    d1, d2 = dims
    if d1 * d2 != rho12.dim or d1 < 1 or d2 < 1:
        raise DimensionMismatchError(rho12.dim, (d1, d2), "bipartite factorization")
    t = rho12.entries.reshape(d1, d2, d1, d2)
    if keep == 1:
        reduced = np.einsum("ijkj->ik", t)
    elif keep == 2:
        reduced = np.einsum("ijil->jl", t)
    else:
        raise InvariantViolationError(f"keep must be 1 or 2, got {keep}")
    return DensityMatrix(reduced)


def identity(dim: int, label: str = "I") -> HermitianOperator:
    return HermitianOperator(np.eye(dim, dtype=np.complex128), label)


def grid_points(grid: GridConfig) -> RealVector:
    """Uniform grid on [-L, L)."""
    return -grid.half_width + grid.step * np.arange(grid.n, dtype=np.float64)


def grid_operators(
    n: int | GridConfig, half_width: float = 10.0, hbar: float = 1.0
) -> tuple[HermitianOperator, HermitianOperator]:
    """
    Position and momentum operators on a periodic grid.

    Q is diagonal with the grid values; P is the spectral derivative
    -i*hbar*d/dx built from the discrete Fourier transform.

    Parameters
    ----------
    n : int | GridConfig
        Number of grid points (>= 2), or a full grid configuration.
    half_width : float
        L, the grid covers [-L, L).
    hbar : float
        Reduced Planck constant.
    """
    grid = n if isinstance(n, GridConfig) else GridConfig(int(n), float(half_width), float(hbar))
    if grid.n < 2:
        raise InvariantViolationError(f"grid needs at least 2 points, got {grid.n}")
    x = grid_points(grid)
    k = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.step)
    basis = np.eye(grid.n, dtype=np.complex128)
    p = np.fft.ifft(grid.hbar * k[:, None] * np.fft.fft(basis, axis=0), axis=0)
    return HermitianOperator(np.diag(x).astype(np.complex128), "Q"), HermitianOperator(p, "P")


def density_from_vector(psi: Any) -> DensityMatrix:
    """|psi><psi| for a (not necessarily normalized) vector."""
    vec = np.asarray(psi, dtype=np.complex128).ravel()
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise InvariantViolationError("Cannot build a state from the zero vector")
    vec = vec / norm
    return DensityMatrix._trusted(np.outer(vec, vec.conj()))


def gaussian_packet(grid: GridConfig, center: float, width: float, momentum: float = 0.0) -> DensityMatrix:
    """Pure Gaussian packet with position standard deviation ``width`` and mean momentum ``momentum``."""
    if width <= 0:
        raise InvariantViolationError(f"packet width must be positive, got {width}")
    x = grid_points(grid)
    psi = np.exp(-((x - center) ** 2) / (4.0 * width**2) + 1j * momentum * x / grid.hbar)
    return density_from_vector(psi)


def mixture(states: Sequence[DensityMatrix], weights: Sequence[float]) -> DensityMatrix:
    """Convex combination sum_i w_i rho_i."""
    if len(states) != len(weights) or not states:
        raise InvariantViolationError("mixture needs one weight per state")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-12:
        raise InvariantViolationError(f"mixture weights must be a probability vector, got {weights}")
    out = np.zeros_like(states[0].entries)
    for weight, state in zip(w, states, strict=True):
        _check_dims(states[0].dim, state.dim)
        out = out + weight * state.entries
    return DensityMatrix._trusted(out)


def repair_density(matrix: Any, tolerance: ToleranceConfig = DEFAULT_TOLERANCE) -> DensityMatrix:
    """Clip negative eigenvalues to zero and renormalize the trace."""
    arr = _hermitize(_square(matrix, "density candidate"))
    w, v = scipy.linalg.eigh(arr)
    w = np.where(w < 0.0, 0.0, w)
    total = float(w.sum())
    if total <= tolerance.psd_floor:
        raise InvariantViolationError("Matrix has no positive part to repair into a state")
    return DensityMatrix._trusted((v * (w / total)) @ v.conj().T)


def _pairs(arr: ComplexMatrix) -> EntryPairs:
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def _from_pairs(dim: int, entries: EntryPairs) -> ComplexMatrix:
    arr = np.asarray(entries, dtype=np.float64)
    if arr.shape != (dim, dim, 2):
        raise InvariantViolationError(f"entries shape {arr.shape} does not match dim {dim}")
    return arr[..., 0] + 1j * arr[..., 1]


def operator_to_json(op: HermitianOperator) -> OperatorPayload:
    """{dim, entries: row-major [re, im] pairs, label}."""
    return {"dim": op.dim, "entries": _pairs(op.entries), "label": op.label}


def operator_from_json(payload: dict[str, Any], tolerance: ToleranceConfig = DEFAULT_TOLERANCE) -> HermitianOperator:
    raw = _from_pairs(int(payload["dim"]), payload["entries"])
    deviation = float(np.abs(raw - raw.conj().T).max())
    if deviation > tolerance.hermitian_tolerance:
        raise InvariantViolationError(f"Loaded operator is not Hermitian (deviation {deviation:.3e})")
    return HermitianOperator(raw, str(payload.get("label", "")))


def density_to_json(rho: DensityMatrix) -> DensityPayload:
    return {"dim": rho.dim, "entries": _pairs(rho.entries)}


def density_from_json(payload: dict[str, Any], tolerance: ToleranceConfig = DEFAULT_TOLERANCE) -> DensityMatrix:
    raw = _from_pairs(int(payload["dim"]), payload["entries"])
    deviation = float(np.abs(raw - raw.conj().T).max())
    if deviation > tolerance.hermitian_tolerance:
        raise InvariantViolationError(f"Loaded state is not Hermitian (deviation {deviation:.3e})")
    return DensityMatrix(raw, tolerance)
