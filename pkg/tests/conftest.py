import os

import numpy as np
import pytest
from dotenv import load_dotenv

from qrnlab import logger
from qrnlab.config import GridConfig
from qrnlab.operators import DensityMatrix, HermitianOperator, density_from_vector, grid_operators
from qrnlab.qrn import SlitSpec

load_dotenv()

# Keep worker pools small on shared CI runners
os.environ.setdefault("QRN_THREADS", "4")


@pytest.fixture(scope="session")
def grid() -> GridConfig:
    """The default position grid: 256 points on [-10, 10)."""
    return GridConfig(256, 10.0, 1.0)


@pytest.fixture(scope="session")
def grid_ops(grid: GridConfig) -> tuple[HermitianOperator, HermitianOperator]:
    """Session-scoped (Q, P) pair for the default grid."""
    logger.debug(f"building grid operators for n={grid.n}")
    return grid_operators(grid)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def unit_slit() -> SlitSpec:
    return SlitSpec(-1.0, 1.0)


@pytest.fixture
def qubit_states() -> dict[str, DensityMatrix]:
    """|0>, |1>, |+> and the maximally mixed qubit."""
    return {
        "zero": density_from_vector([1.0, 0.0]),
        "one": density_from_vector([0.0, 1.0]),
        "plus": density_from_vector([1.0, 1.0]),
        "mixed": DensityMatrix(np.eye(2) / 2.0),
    }


def diag_op(*values: float, label: str = "D") -> HermitianOperator:
    """Diagonal Hermitian operator helper shared by the test modules."""
    return HermitianOperator(np.diag(np.asarray(values, dtype=np.complex128)), label)


def diag_state(*weights: float) -> DensityMatrix:
    return DensityMatrix(np.diag(np.asarray(weights, dtype=np.complex128)))
