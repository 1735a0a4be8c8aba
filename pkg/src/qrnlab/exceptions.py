"""Custom exceptions for the qrnlab package."""

from typing import Any


class QRNError(Exception):
    """Base exception for all qrnlab errors."""

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.details = details or {}


class DimensionMismatchError(QRNError):
    """Raised when operands live on spaces of different dimension."""

    def __init__(self, expected: int | tuple[int, ...], actual: int | tuple[int, ...], what: str = "operands") -> None:
        super().__init__(f"Dimension mismatch for {what}: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class InvariantViolationError(QRNError):
    """Raised when a constructed or loaded object breaks its invariants."""

    pass


class NullRestrictionError(QRNError):
    """Raised when a state has no weight inside the slit it is restricted to."""

    def __init__(self, weight: float) -> None:
        super().__init__(f"Cannot restrict state to slit: Tr(P rho P) = {weight:.3e}")
        self.weight = weight


class ZeroBranchError(QRNError):
    """Raised when a Lüders transform is requested for an outcome of zero probability."""

    def __init__(self, probability: float) -> None:
        super().__init__(f"Outcome has zero probability: Tr(P rho) = {probability:.3e}")
        self.probability = probability


class HypothesisNotMetError(QRNError):
    """Raised when a theorem checker is called on data outside the theorem's hypothesis."""

    def __init__(self, check_id: str, reason: str, details: dict[str, Any] | None = None) -> None:
        super().__init__(f"Hypothesis of {check_id} not met: {reason}", details)
        self.check_id = check_id
        self.reason = reason


class UnboundedSlitPreconditionError(HypothesisNotMetError):
    """Raised when the position-operator branch of the von Neumann bound needs 2w <= eps*m and it fails."""

    def __init__(self, width: float, eps: float, m: float) -> None:
        super().__init__(
            "theorem4",
            f"unbounded position branch requires 2*w <= eps*m, got 2*{width:.6g} > {eps:.6g}*{m:.6g}",
            {"width": width, "eps": eps, "m": m},
        )
        self.width = width
        self.eps = eps
        self.m = m


class PreparationFailedError(QRNError):
    """Raised when a generator cannot produce a state with the requested property."""

    pass


class GridTooCoarseError(PreparationFailedError):
    """Raised when the grid cannot resolve a state narrow enough for the requested tolerance."""

    pass


class ModulusSearchFailedError(QRNError):
    """Raised when no continuity modulus delta can be found for a force at a point."""

    pass


class EmptyIntersectionError(QRNError):
    """Raised when no sampled state lies in both a preparation ball and a persistence region."""

    pass


class NonCommutingError(QRNError):
    """Raised when two operators required to commute do not."""

    def __init__(self, norm: float, tolerance: float) -> None:
        super().__init__(f"Operators do not commute: ||[A,B]|| = {norm:.3e} > {tolerance:.1e}")
        self.norm = norm
        self.tolerance = tolerance


class DimensionBlowUpError(QRNError):
    """Raised when a tensor construction would exceed the dense dimension cap."""

    def __init__(self, dim: int, cap: int) -> None:
        super().__init__(f"Tensor dimension {dim} exceeds cap {cap}")
        self.dim = dim
        self.cap = cap


class RegionSamplingError(QRNError):
    """Raised when a state region cannot be sampled."""

    pass


class ConfigError(QRNError):
    """Raised when an experiment configuration fails validation."""

    def __init__(self, key: str, reason: str) -> None:
        super().__init__(f"Invalid config key '{key}': {reason}")
        self.key = key
        self.reason = reason
