"""Type definitions for the qrnlab package."""

from collections.abc import Callable
from typing import Any, TypeAlias, TypedDict

import numpy as np
import numpy.typing as npt

# Array types
ComplexMatrix: TypeAlias = npt.NDArray[np.complex128]
RealVector: TypeAlias = npt.NDArray[np.float64]

# Function types
RealFunction: TypeAlias = Callable[[Any], Any]
VarianceModel: TypeAlias = Callable[[float], float]

# Serialized layouts
EntryPairs: TypeAlias = list[list[list[float]]]


class OperatorPayload(TypedDict):
    dim: int
    entries: EntryPairs
    label: str


class DensityPayload(TypedDict):
    dim: int
    entries: EntryPairs


class RegionPayload(TypedDict):
    center: DensityPayload
    radius: float
    n_samples: int
    seed: int


# Report rows
class CheckRecord(TypedDict):
    id: str
    margin: float
    passed: bool


class FrequencyRow(TypedDict):
    seed: int
    J: int
    x: float
    in_band: bool


class TrajectoryRow(TypedDict):
    t: float
    q_classical: float
    p_classical: float
    q_quantum: float
    p_quantum: float
    gap: float


class SpreadTerms(TypedDict):
    total: float
    pointer_term: float
    system_term: float
    cross_term: float
