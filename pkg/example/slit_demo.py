"""
This script walks through one-slit collimation on the default position grid.
"""

import os

from dotenv import load_dotenv

from qrnlab import GridConfig, SlitSpec, grid_operators, logger, sharp_region
from qrnlab.collimation import check_corollary1, check_theorem1, check_theorem2, check_theorem3
from qrnlab.operators import spectral_projector

load_dotenv()

# --- Configuration ---
EPS = float(os.getenv("QRN_DEMO_EPS", "0.04"))
SLIT = SlitSpec(-1.0, 1.0)
grid = GridConfig(256, 10.0)

z, p = grid_operators(grid)
region = sharp_region(SLIT, EPS, grid, n_samples=8, seed=0, strict=True)
logger.info(f"Sampled {len(region)} states within {region.radius:.3e} of a sharp packet")

# Value, width and tail bounds
for report in (
    check_theorem1(z, region, SLIT, EPS),
    check_theorem2(z, p, region, EPS, grid.hbar),
    check_theorem3(z, region, SLIT, EPS),
):
    logger.info(f"{report.theorem_id}: passed={report.passed} worst margin={report.worst_margin:.3e}")

# Outside-slit distance for every sample
projector = spectral_projector(z, SLIT)
margins = [check_corollary1(s, projector, EPS) for s in region.samples]
logger.info(f"corollary1: smallest margin {min(margins):.3e}")
