"""
This script compares simulated relative frequencies with the N-copy operator picture.
"""

from qrnlab import logger
from qrnlab.born import (
    DichotomicExperiment,
    collapse_distance,
    dichotomic_pure_state,
    frequency_distribution,
    required_copies,
    simulate_many,
)

P = 0.3
rho, p1, _ = dichotomic_pure_state(P)

# Large N by simulation
experiment = DichotomicExperiment(p1, rho, region_radius=0.01, n_trials=10_000, resolution=0.05)
runs = simulate_many(experiment, range(200))
outside = sum(not r.in_band for r in runs)
logger.info(f"{outside}/200 runs left the band of half width {runs[0].chebyshev_delta:.3f}")
logger.info(f"Copies needed for a 0.05 resolution at eps=0.01: {required_copies(P, 0.01, 0.05)}")

# Small N on the explicit tensor space
print(frequency_distribution(rho, p1, 6).to_string(index=False))

for n in range(2, 9):
    distance, bound = collapse_distance(rho, p1, n, 0.3)
    logger.info(f"N={n}: collapse distance {distance:.4f} (bound {bound:.4f})")
