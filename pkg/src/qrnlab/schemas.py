"""Built-in parameter schemas for every experiment kind.

Each schema maps a flat config key to its type, default and help text. A
default of ``None`` marks a required key. Config files and CLI flags are both
validated against these schemas before anything runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class ParamSpec:
    type: type
    default: Any
    help: str

    @property
    def required(self) -> bool:
        return self.default is None


SLIT_SCHEMA: dict[str, ParamSpec] = {
    "z1": ParamSpec(float, None, "Lower slit edge"),
    "z2": ParamSpec(float, None, "Upper slit edge"),
    "eps": ParamSpec(float, 0.04, "Sharpness tolerance in (0, 1)"),
    "grid_n": ParamSpec(int, 256, "Number of grid points"),
    "grid_l": ParamSpec(float, 10.0, "Grid half width L, grid covers [-L, L)"),
    "hbar": ParamSpec(float, 1.0, "Reduced Planck constant"),
    "seeds": ParamSpec(int, 5, "Number of seeded regions"),
    "n_samples": ParamSpec(int, 8, "Samples per region, center included"),
    "n_observables": ParamSpec(int, 4, "Random bounded observables per region"),
    "rel_tol": ParamSpec(float, 0.01, "Relative grid tolerance for the width product bound"),
    "seed": ParamSpec(int, 0, "First seed"),
}

BORN_SCHEMA: dict[str, ParamSpec] = {
    "p": ParamSpec(float, 0.3, "Outcome probability of the prepared qubit"),
    "state_file": ParamSpec(str, "", "JSON file with 'state' and 'projector' payloads (overrides p)"),
    "n": ParamSpec(int, 10_000, "Trials per run"),
    "r": ParamSpec(float, 0.05, "Detector half resolution R"),
    "lam": ParamSpec(float, 0.5, "Band exponent lambda in (0, 1)"),
    "seeds": ParamSpec(int, 200, "Number of seeded runs"),
    "eps": ParamSpec(float, 0.01, "Preparation region radius"),
    "copies_max": ParamSpec(int, 8, "Largest explicit N-copy space"),
    "n_samples": ParamSpec(int, 16, "Samples of the preparation region"),
    "seed": ParamSpec(int, 0, "First seed"),
}

LUDERS_SCHEMA: dict[str, ParamSpec] = {
    "delta": ParamSpec(float, 0.05, "Preparation ball radius"),
    "eps": ParamSpec(float, 0.01, "Persistence tolerance in (0, 1)"),
    "dim": ParamSpec(int, 16, "Hilbert space dimension"),
    "seeds": ParamSpec(int, 50, "Number of seeded instances"),
    "n_samples": ParamSpec(int, 16, "Samples per region"),
    "seed": ParamSpec(int, 0, "First seed"),
}

POINTER_SCHEMA: dict[str, ParamSpec] = {
    "g_dt": ParamSpec(float, 1.0, "Dimensionless shift factor g*dt"),
    "slits": ParamSpec(str, "-1.5,-0.5,0.5,1.5", "Slit edges a,b,c,d"),
    "eps2": ParamSpec(float, 0.01, "Approximate classicality tolerance"),
    "mode": ParamSpec(str, "single", "single | union"),
    "grid_n": ParamSpec(int, 32, "Grid points per particle"),
    "grid_l": ParamSpec(float, 2.0, "Grid half width"),
    "width": ParamSpec(float, 0.07, "Packet width"),
    "radius": ParamSpec(float, 1e-4, "Factor region radius"),
    "n_samples": ParamSpec(int, 4, "Samples per factor region"),
    "n_joint": ParamSpec(int, 8, "Joint product samples"),
    "seed": ParamSpec(int, 0, "Seed"),
}

EHRENFEST_SCHEMA: dict[str, ParamSpec] = {
    "force": ParamSpec(str, "cubic", "harmonic | cubic | quartic | custom-poly"),
    "coeffs": ParamSpec(str, "", "Force polynomial coefficients c0,c1,... for custom-poly"),
    "r": ParamSpec(str, "-2,-1,0,1,2", "Window centers"),
    "eps": ParamSpec(float, 0.05, "Gap tolerance"),
    "grid_n": ParamSpec(int, 512, "Number of grid points"),
    "grid_l": ParamSpec(float, 5.0, "Grid half width"),
    "n_samples": ParamSpec(int, 8, "Samples per window"),
    "coverage_lo": ParamSpec(float, -3.0, "Left end of the interval the windows must cover"),
    "coverage_hi": ParamSpec(float, 3.0, "Right end of the interval the windows must cover"),
    "seed": ParamSpec(int, 0, "Seed"),
}

EVOLVE_SCHEMA: dict[str, ParamSpec] = {
    "hamiltonian": ParamSpec(str, "harmonic", "harmonic | cubic | quartic | custom-poly"),
    "coeffs": ParamSpec(str, "", "Force polynomial coefficients c0,c1,... for custom-poly"),
    "mu": ParamSpec(float, 1.0, "Mass"),
    "a": ParamSpec(float, 1.0, "Initial displacement"),
    "width": ParamSpec(float, 0.7071067811865476, "Initial packet width"),
    "t_max": ParamSpec(float, 12.566370614359172, "Final time"),
    "dt": ParamSpec(float, 0.05, "Output time step"),
    "grid_n": ParamSpec(int, 512, "Number of grid points"),
    "grid_l": ParamSpec(float, 10.0, "Grid half width"),
    "hbar": ParamSpec(float, 1.0, "Reduced Planck constant"),
    "seed": ParamSpec(int, 0, "Seed"),
}

COLLAPSE_SCHEMA: dict[str, ParamSpec] = {
    "mu": ParamSpec(float, 1.0, "Mass"),
    "lam": ParamSpec(float, 1.0, "Sharpening rate lambda"),
    "q0": ParamSpec(float, 0.0, "Initial mean"),
    "variance": ParamSpec(float, 0.1, "Variance scale v"),
    "t_max": ParamSpec(float, 30.0, "Final time"),
    "dt": ParamSpec(float, 0.01, "Output time step"),
    "p": ParamSpec(float, 0.5, "Outcome probability for the N-copy collapse sweep"),
    "r": ParamSpec(float, 0.3, "Frequency band half width"),
    "n_max": ParamSpec(int, 8, "Largest number of copies"),
    "seed": ParamSpec(int, 0, "Seed"),
}

EXPERIMENT_SCHEMAS: dict[str, dict[str, ParamSpec]] = {
    "slit": SLIT_SCHEMA,
    "born": BORN_SCHEMA,
    "luders": LUDERS_SCHEMA,
    "pointer": POINTER_SCHEMA,
    "ehrenfest": EHRENFEST_SCHEMA,
    "evolve": EVOLVE_SCHEMA,
    "collapse": COLLAPSE_SCHEMA,
}

EXPERIMENT_DESCRIPTIONS: dict[str, str] = {
    "slit": "One-slit collimation bounds over seeded sharp regions",
    "born": "Relative frequencies of a dichotomic outcome and the N-copy average operator",
    "luders": "Persistence regions, Lüders update and commuting-product decomposition",
    "pointer": "Impulsive pointer measurement and registration classification",
    "ehrenfest": "Ehrenfest gap windows, their coverage and a negative control",
    "evolve": "Exact quantum expectations against the classical trajectory",
    "collapse": "Scalar sharpening law and N-copy collapse distance",
}


def list_experiments() -> list[str]:
    """Return the experiment kinds in a stable order."""
    return list(EXPERIMENT_SCHEMAS.keys())


def describe_experiment(kind: str) -> dict[str, Any]:
    """Schema of one experiment kind as plain data."""
    if kind not in EXPERIMENT_SCHEMAS:
        raise ValueError(f"Unknown experiment '{kind}'. Available: {', '.join(list_experiments())}")
    return {
        "kind": kind,
        "description": EXPERIMENT_DESCRIPTIONS[kind],
        "parameters": {
            key: {"type": spec.type.__name__, "default": spec.default, "required": spec.required, "help": spec.help}
            for key, spec in EXPERIMENT_SCHEMAS[kind].items()
        },
    }
