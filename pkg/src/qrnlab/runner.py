"""runner.py
Experiment configuration, seeded execution and report emission.

A run is a pure function of its validated configuration and the library
version; only ``wall_time`` varies between identical runs and it is kept out
of the CSV check table.
"""

from __future__ import annotations

import io
import json
import math
import time
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from dotenv import dotenv_values

from ._version import __version__
from .born import (
    DichotomicExperiment,
    band_half_width,
    born_probability,
    build_average_operator,
    check_theorem5,
    collapse_distance,
    dichotomic_pure_state,
    frequency_distribution,
    gaussian_tv_distance,
    outcome_probability,
    simulate_many,
)
from .collimation import TheoremReport, random_bounded_operator, run_slit_suite
from .config import DEFAULT_TOLERANCE, GridConfig
from .dynamics import (
    ForceField,
    TrajectoryRecord,
    build_hamiltonian,
    check_theorem6,
    check_window_collimation,
    compare_trajectories,
    construct_window,
    ehrenfest_gap,
    evolve_expectations,
    hamilton_pair_residual,
    newton_trajectory,
    sharpening_ode,
    window_coverage,
)
from .exceptions import ConfigError, InvariantViolationError, ZeroBranchError
from .logger_config import logger
from .luders import (
    PersistenceRegionSpec,
    branch_order_asymmetry,
    check_proposition1,
    check_proposition2,
    check_proposition3,
    random_persistent_state,
)
from .operators import (
    Projector,
    apply_function,
    density_from_json,
    gaussian_packet,
    grid_operators,
    mixture,
    operator_from_json,
    trace_inner,
)
from .parallel import parallel_map
from .pointer import run_pointer_experiment
from .qrn import SlitSpec, sample_region
from .schemas import EXPERIMENT_SCHEMAS, ParamSpec
from .types import CheckRecord

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "read_config_file",
    "run",
    "emit",
    "emit_table",
    "load_report",
    "selftest_configs",
    "run_selftest",
]

# Born frequency verdict: at most 5 of 200 runs outside the band, mean within 0.005
BORN_MAX_OUTSIDE_FRACTION = 5.0 / 200.0
BORN_MEAN_TOLERANCE = 0.005

# Relative tolerance on the two-peak negative control gap
NEGATIVE_CONTROL_REL_TOL = 0.05


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment: kind, typed parameters, seed and optional output path."""

    kind: str
    params: dict[str, Any]
    output: str | None = None

    @property
    def seed(self) -> int:
        return int(self.params.get("seed", 0))

    @classmethod
    def build(
        cls,
        kind: str,
        file_values: Mapping[str, Any] | None = None,
        overrides: Mapping[str, Any] | None = None,
    ) -> ExperimentConfig:
        """
        Merge schema defaults, config-file values and CLI overrides (in that order).

        Unknown keys, missing required keys, uncoercible values and values
        outside the module preconditions raise ``ConfigError``.
        """
        if kind not in EXPERIMENT_SCHEMAS:
            raise ConfigError("kind", f"unknown experiment kind '{kind}'")
        schema = EXPERIMENT_SCHEMAS[kind]
        raw: dict[str, Any] = {}
        output = None
        for source in (file_values or {}, {k: v for k, v in (overrides or {}).items() if v is not None}):
            for key, value in source.items():
                norm = key.strip().lower().replace("-", "_")
                if norm == "kind":
                    if str(value).strip() != kind:
                        raise ConfigError("kind", f"config is for '{value}', not '{kind}'")
                    continue
                if norm == "output":
                    output = str(value)
                    continue
                if norm not in schema:
                    raise ConfigError(norm, f"not a parameter of '{kind}'")
                raw[norm] = value
        params = {key: _coerce(key, spec, raw.get(key, spec.default)) for key, spec in schema.items()}
        _VALIDATORS[kind](params)
        return cls(kind, params, output)


def _coerce(key: str, spec: ParamSpec, value: Any) -> Any:
    if value is None:
        raise ConfigError(key, "required value is missing")
    try:
        if spec.type is int:
            number = float(value)
            if not number.is_integer():
                raise ValueError(value)
            return int(number)
        if spec.type is float:
            result = float(value)
            if not math.isfinite(result):
                raise ValueError(value)
            return result
        return str(value).strip()
    except (TypeError, ValueError) as e:
        raise ConfigError(key, f"cannot read {value!r} as {spec.type.__name__}") from e


def _require(condition: bool, key: str, reason: str) -> None:
    if not condition:
        raise ConfigError(key, reason)


def _floats(key: str, text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise ConfigError(key, f"expected comma separated numbers, got {text!r}") from e


def _validate_grid(p: dict[str, Any]) -> None:
    _require(p["grid_n"] >= 2, "grid_n", "needs at least 2 points")
    _require(p["grid_l"] > 0, "grid_l", "must be positive")


def _validate_slit(p: dict[str, Any]) -> None:
    _validate_grid(p)
    _require(p["z1"] < p["z2"], "z2", "slit needs z1 < z2")
    _require(-p["grid_l"] < p["z1"] and p["z2"] < p["grid_l"], "z1", "slit must lie inside the grid")
    _require(0 < p["eps"] < 1, "eps", "must lie in (0, 1)")
    _require(p["seeds"] >= 1 and p["n_samples"] >= 1, "seeds", "seeds and n_samples must be >= 1")
    _require(p["n_observables"] >= 0, "n_observables", "must be >= 0")
    _require(0 <= p["rel_tol"] < 1, "rel_tol", "must lie in [0, 1)")
    _require(p["hbar"] > 0, "hbar", "must be positive")


def _validate_born(p: dict[str, Any]) -> None:
    _require(0 <= p["p"] <= 1, "p", "must lie in [0, 1]")
    _require(p["n"] >= 1, "n", "must be >= 1")
    _require(p["r"] > 0, "r", "must be positive")
    _require(0 < p["lam"] < 1, "lam", "must lie in (0, 1)")
    _require(p["seeds"] >= 1, "seeds", "must be >= 1")
    _require(p["eps"] > 0, "eps", "must be positive")
    _require(1 <= p["copies_max"] <= 12, "copies_max", "must lie in [1, 12]")
    _require(p["n_samples"] >= 1, "n_samples", "must be >= 1")
    if p["state_file"]:
        _require(Path(p["state_file"]).is_file(), "state_file", "file does not exist")


def _validate_luders(p: dict[str, Any]) -> None:
    _require(p["delta"] >= 0, "delta", "must be >= 0")
    _require(0 < p["eps"] < 1, "eps", "must lie in (0, 1)")
    _require(2 <= p["dim"] <= 256, "dim", "must lie in [2, 256]")
    _require(p["seeds"] >= 1 and p["n_samples"] >= 1, "seeds", "seeds and n_samples must be >= 1")


def _validate_pointer(p: dict[str, Any]) -> None:
    _validate_grid(p)
    edges = _floats("slits", p["slits"])
    _require(len(edges) == 4, "slits", "expected four edges a,b,c,d")
    _require(edges[0] < edges[1] <= edges[2] < edges[3], "slits", "edges must satisfy a < b <= c < d")
    _require(p["g_dt"] >= 0, "g_dt", "must be >= 0")
    _require(p["eps2"] > 0, "eps2", "must be positive")
    _require(p["mode"] in ("single", "union"), "mode", "must be 'single' or 'union'")
    _require(p["grid_n"] ** 2 <= 4096, "grid_n", "joint dimension grid_n^2 must not exceed 4096")
    _require(p["width"] > 0 and p["radius"] >= 0, "width", "width must be positive and radius >= 0")


def _validate_force(p: dict[str, Any], key: str) -> None:
    _require(p[key] in ("harmonic", "cubic", "quartic", "custom-poly"), key, "unknown force")
    if p[key] == "custom-poly":
        _require(bool(_floats("coeffs", p["coeffs"])), "coeffs", "custom-poly needs coefficients")


def _validate_ehrenfest(p: dict[str, Any]) -> None:
    _validate_grid(p)
    _validate_force(p, "force")
    centers = _floats("r", p["r"])
    _require(bool(centers), "r", "needs at least one window center")
    _require(all(-p["grid_l"] < r < p["grid_l"] for r in centers), "r", "window centers must lie inside the grid")
    _require(p["eps"] > 0, "eps", "must be positive")
    _require(p["coverage_lo"] < p["coverage_hi"], "coverage_hi", "coverage interval is empty")


def _validate_evolve(p: dict[str, Any]) -> None:
    _validate_grid(p)
    _validate_force(p, "hamiltonian")
    _require(p["mu"] > 0 and p["hbar"] > 0, "mu", "mu and hbar must be positive")
    _require(p["width"] > 0, "width", "must be positive")
    _require(0 < p["dt"] <= p["t_max"], "dt", "needs 0 < dt <= t_max")


def _validate_collapse(p: dict[str, Any]) -> None:
    _require(p["mu"] > 0 and p["lam"] > 0, "lam", "mu and lam must be positive")
    _require(0 < p["dt"] <= p["t_max"], "dt", "needs 0 < dt <= t_max")
    _require(0 < p["p"] < 1, "p", "must lie in (0, 1)")
    _require(p["r"] > 0, "r", "must be positive")
    _require(1 <= p["n_max"] <= 12, "n_max", "must lie in [1, 12]")


_VALIDATORS: dict[str, Callable[[dict[str, Any]], None]] = {
    "slit": _validate_slit,
    "born": _validate_born,
    "luders": _validate_luders,
    "pointer": _validate_pointer,
    "ehrenfest": _validate_ehrenfest,
    "evolve": _validate_evolve,
    "collapse": _validate_collapse,
}


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat KEY=VALUE file; keys without a value are rejected."""
    values = dotenv_values(path)
    out: dict[str, str] = {}
    for key, value in values.items():
        if value is None:
            raise ConfigError(key, "key has no value")
        out[key] = value
    return out


@dataclass
class ExperimentReport:
    kind: str
    config: dict[str, Any]
    checks: list[CheckRecord]
    table: list[dict[str, Any]] = field(default_factory=list)
    diagnostics: dict[str, float] = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def body(self) -> dict[str, Any]:
        """Everything except the wall time."""
        return {
            "kind": self.kind,
            "version": self.version,
            "config": self.config,
            "passed": self.passed,
            "checks": [
                {"id": c["id"], "margin": float(_fmt(c["margin"])), "passed": c["passed"]} for c in self.checks
            ],
            "diagnostics": {k: float(_fmt(v)) for k, v in sorted(self.diagnostics.items())},
            "table": [{k: _json_value(v) for k, v in row.items()} for row in self.table],
        }


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _json_value(value: Any) -> Any:
    if isinstance(value, bool | np.bool_):
        return bool(value)
    if isinstance(value, int | np.integer):
        return int(value)
    if isinstance(value, float | np.floating):
        return None if math.isnan(value) else float(_fmt(float(value)))
    return value


def _records(reports: list[TheoremReport], prefix: str = "") -> list[CheckRecord]:
    return [{"id": f"{prefix}{r.theorem_id}", "margin": r.worst_margin, "passed": r.passed} for r in reports]


def _single(check_id: str, margin: float) -> TheoremReport:
    return TheoremReport.from_margins(check_id, [margin])


def _force_from(name: str, coeffs: str) -> ForceField:
    if name == "harmonic":
        return ForceField.harmonic()
    if name == "cubic":
        return ForceField.cubic()
    if name == "quartic":
        return ForceField.quartic()
    return ForceField.polynomial(_floats("coeffs", coeffs))


def _run_slit(p: dict[str, Any]) -> tuple[list[TheoremReport], list[dict[str, Any]], dict[str, float]]:
    grid = GridConfig(p["grid_n"], p["grid_l"], p["hbar"])
    seeds = list(range(p["seed"], p["seed"] + p["seeds"]))
    reports = run_slit_suite(
        SlitSpec(p["z1"], p["z2"]),
        p["eps"],
        grid,
        seeds,
        p["n_samples"],
        p["n_observables"],
        p["rel_tol"],
    )
    return reports, [], {}


def _spectrum_deviation(n: int, p1: Projector) -> float:
    w = build_average_operator(p1, n).eigenvalues
    levels = np.arange(n + 1) / n
    to_levels = np.abs(w[:, None] - levels[None, :]).min(axis=1).max()
    to_values = np.abs(levels[:, None] - w[None, :]).min(axis=1).max()
    return float(max(to_levels, to_values))


def _run_born(p: dict[str, Any]) -> tuple[list[TheoremReport], list[dict[str, Any]], dict[str, float]]:
    psi = None
    if p["state_file"]:
        payload = json.loads(Path(p["state_file"]).read_text())
        rho0 = density_from_json(payload["state"])
        p1 = Projector.checked(operator_from_json(payload["projector"]))
    else:
        rho0, p1, psi = dichotomic_pure_state(p["p"])
    prob = outcome_probability(rho0, p1)
    experiment = DichotomicExperiment(p1, rho0, p["eps"], p["n"], p["r"], p["lam"], p["seed"])
    seeds = list(range(p["seed"], p["seed"] + p["seeds"]))
    runs = simulate_many(experiment, seeds)

    outside = sum(not r.in_band for r in runs) / len(runs)
    chebyshev = min(1.0, prob * (1.0 - prob) / band_half_width(p["n"], p["lam"]) ** 2 / p["n"])
    mean = float(np.mean([r.frequency for r in runs]))

    reports = [
        _single("born_band", BORN_MAX_OUTSIDE_FRACTION - outside),
        _single("born_mean", BORN_MEAN_TOLERANCE - abs(mean - prob)),
    ]
    if psi is not None:
        endpoint = abs(prob - born_probability(psi, np.array([0.0, 1.0])))
        reports.append(_single("born_endpoint", 1e-12 - endpoint))

    region = sample_region(rho0, p["eps"], p["n_samples"], p["seed"])
    reports.append(check_theorem5(region, p1, p["eps"]))

    max_copies = 1
    while max_copies < p["copies_max"] and rho0.dim ** (max_copies + 1) <= 4096:
        max_copies += 1
    spectrum = max(_spectrum_deviation(n, p1) for n in range(1, max_copies + 1))
    reports.append(_single("average_spectrum", 1e-9 - spectrum))
    law = frequency_distribution(rho0, p1, max_copies)
    reports.append(_single("frequency_law", 1e-9 - float(np.max(np.abs(law["quantum"] - law["binomial"])))))

    table = [dict(r.as_row(s)) for r, s in zip(runs, seeds, strict=True)]
    diagnostics = {
        "p_true": prob,
        "mean_frequency": mean,
        "band_half_width": band_half_width(p["n"], p["lam"]),
        "outside_fraction": outside,
        "chebyshev_fraction": chebyshev,
        "gaussian_tv_distance": gaussian_tv_distance(p["n"], prob),
    }
    return reports, table, diagnostics


def _run_luders(p: dict[str, Any]) -> tuple[list[TheoremReport], list[dict[str, Any]], dict[str, float]]:
    dim, eps, delta = p["dim"], p["eps"], p["delta"]

    def one_seed(seed: int) -> list[TheoremReport]:
        rng = np.random.default_rng(seed)
        a = random_bounded_operator(dim, rng, label="A")
        w = a.eigenvalues
        cut = 0.5 * (w[dim // 2 - 1] + w[dim // 2])
        spec = PersistenceRegionSpec(a, (float(w[0]) - 1.0, float(cut)), eps)
        rho0 = random_persistent_state(spec, rng)
        b = random_bounded_operator(dim, rng, label="B")
        inside = sample_region(rho0, 0.5 * (eps - spec.outside_weight(rho0)), p["n_samples"], seed)
        h = random_bounded_operator(dim, rng, label="H")
        ca, cb = h, apply_function(np.tanh, h, "tanh(H)")
        return [
            check_proposition1(spec, inside),
            check_proposition2(rho0, spec, delta, b, p["n_samples"], seed),
            check_proposition3(rho0, ca, cb, eps, p["n_samples"], seed),
            _single("branch_order", DEFAULT_TOLERANCE.commute_tolerance - branch_order_asymmetry(rho0, ca, cb)),
        ]

    per_seed = parallel_map(one_seed, list(range(p["seed"], p["seed"] + p["seeds"])))
    merged: dict[str, list[TheoremReport]] = {}
    for reports in per_seed:
        for r in reports:
            merged.setdefault(r.theorem_id, []).append(r)
    return [TheoremReport.merge(group) for group in merged.values()], [], {}


def _run_pointer(p: dict[str, Any]) -> tuple[list[TheoremReport], list[dict[str, Any]], dict[str, float]]:
    result, reports = run_pointer_experiment(
        p["g_dt"],
        _floats("slits", p["slits"]),
        p["eps2"],
        p["mode"],
        GridConfig(p["grid_n"], p["grid_l"]),
        p["width"],
        p["radius"],
        p["n_samples"],
        p["n_joint"],
        p["seed"],
    )
    table = [{"sample_index": i, **t} for i, t in enumerate(result.terms)]
    diagnostics = {
        "worst_total": result.worst_total,
        "threshold": result.threshold,
        "registered": float(result.registered),
        "max_system_term": max(t["system_term"] for t in result.terms),
    }
    return reports, table, diagnostics


def _run_ehrenfest(p: dict[str, Any]) -> tuple[list[TheoremReport], list[dict[str, Any]], dict[str, float]]:
    force = _force_from(p["force"], p["coeffs"])
    grid = GridConfig(p["grid_n"], p["grid_l"])
    centers = _floats("r", p["r"])
    eps = p["eps"]

    windows = parallel_map(lambda r: construct_window(force, r, eps, grid, p["n_samples"], p["seed"]), centers)
    window_reports = [check_theorem6(w, force) for w in windows]
    reports = [TheoremReport.merge(window_reports)]
    table = [
        {"r": w.r, "delta": w.delta, "worst_gap": eps - rep.worst_margin}
        for w, rep in zip(windows, window_reports, strict=True)
    ]

    lattice = np.arange(p["coverage_lo"], p["coverage_hi"] + 0.25, 0.5)
    coverage = window_coverage(force, list(lattice), eps, (p["coverage_lo"], p["coverage_hi"]), grid.half_width)
    reports.append(_single("window_coverage", 1.0 if coverage.covered else -1.0))
    diagnostics: dict[str, float] = {"windows_for_coverage": float(len(coverage.intervals))}

    q, _ = grid_operators(grid)
    if force.is_linear:
        rng = np.random.default_rng(p["seed"])
        states = [
            gaussian_packet(grid, float(rng.uniform(-2, 2)), float(rng.uniform(0.2, 1.0)), float(rng.uniform(-1, 1)))
            for _ in range(100)
        ]
        worst = max(ehrenfest_gap(force, q, s) for s in states)
        reports.append(_single("linear_exactness", 1e-10 - worst))
        collimation = check_window_collimation(windows[0], force)
        diagnostics.update({k: float(v) for k, v in collimation.items()})
    else:
        control = mixture([gaussian_packet(grid, 0.0, 0.05), gaussian_packet(grid, 2.0, 0.05)], [0.5, 0.5])
        gap = ehrenfest_gap(force, q, control)
        # narrow peaks at 0 and 2: the gap tends to |(F(0) + F(2)) / 2 - F(1)|, 3 for F = x^3
        expected = abs(0.5 * (float(force.f(0.0)) + float(force.f(2.0))) - float(force.f(1.0)))
        diagnostics["negative_control_gap"] = gap
        diagnostics["negative_control_expected"] = expected
        reports.append(_single("negative_control", gap - eps))
        reports.append(_single("negative_control_value", NEGATIVE_CONTROL_REL_TOL * expected - abs(gap - expected)))
    return reports, table, diagnostics


def _run_evolve(p: dict[str, Any]) -> tuple[list[TheoremReport], list[dict[str, Any]], dict[str, float]]:
    force = _force_from(p["hamiltonian"], p["coeffs"])
    grid = GridConfig(p["grid_n"], p["grid_l"], p["hbar"])
    q, mom = grid_operators(grid)
    h = build_hamiltonian(force, grid, p["mu"])
    rho0 = gaussian_packet(grid, p["a"], p["width"])
    steps = int(round(p["t_max"] / p["dt"]))
    times = np.linspace(0.0, steps * p["dt"], steps + 1)

    quantum = evolve_expectations(h, rho0, times, q, mom, p["hbar"], force)
    classical = newton_trajectory(p["mu"], force, trace_inner(rho0, q), trace_inner(rho0, mom), times)
    divergence = compare_trajectories(quantum, classical)
    reports = [
        _single("energy_conservation", 1e-8 - float(np.max(np.abs(quantum.energy - quantum.energy[0])))),
        _single("trace_conservation", 1e-8 - float(np.max(np.abs(quantum.norm - 1.0)))),
        _single("hermiticity", 1e-10 - float(np.max(quantum.hermiticity))),
    ]
    if force.is_linear:
        reports.append(_single("trajectory_agreement", 1e-3 * abs(p["a"]) - divergence))
        reports.append(_single("hamilton_pair", 5e-3 - hamilton_pair_residual(quantum, p["mu"])))
    merged = TrajectoryRecord(
        quantum.times,
        q_quantum=quantum.q_quantum,
        p_quantum=quantum.p_quantum,
        q_classical=classical.q_classical,
        p_classical=classical.p_classical,
        gap=quantum.gap,
    )
    return reports, [dict(row) for row in merged.rows()], {"max_divergence": divergence}


def _run_collapse(p: dict[str, Any]) -> tuple[list[TheoremReport], list[dict[str, Any]], dict[str, float]]:
    mu, lam, q0, v = p["mu"], p["lam"], p["q0"], p["variance"]
    steps = int(round(p["t_max"] / p["dt"]))
    times = np.linspace(0.0, steps * p["dt"], steps + 1)
    constant = sharpening_ode(mu, lam, q0, lambda _t: v, times)
    closed = q0 - (lam / mu) * v * times
    decaying = sharpening_ode(mu, lam, q0, lambda t: v * math.exp(-t), times)
    limit = q0 - (lam / mu) * v
    reports = [
        _single("sharpening_constant", 1e-8 - float(np.max(np.abs(constant - closed)))),
        _single("sharpening_limit", 1e-6 - abs(float(decaying[-1]) - limit)),
    ]

    rho0, p1, _ = dichotomic_pure_state(p["p"])
    table = []
    margins = []
    for n in range(1, p["n_max"] + 1):
        try:
            distance, bound = collapse_distance(rho0, p1, n, p["r"])
        except ZeroBranchError:
            logger.debug(f"collapse sweep: no frequency inside the band for N={n}")
            continue
        table.append({"N": n, "distance": distance, "bound": bound})
        margins.append(bound - distance)
    if not margins:
        raise InvariantViolationError("collapse sweep produced no populated band")
    reports.append(TheoremReport.from_margins("collapse_distance", margins))
    return reports, table, {"final_mean": float(decaying[-1])}


_RUNNERS: dict[str, Callable[[dict[str, Any]], tuple[list[TheoremReport], list[dict[str, Any]], dict[str, float]]]] = {
    "slit": _run_slit,
    "born": _run_born,
    "luders": _run_luders,
    "pointer": _run_pointer,
    "ehrenfest": _run_ehrenfest,
    "evolve": _run_evolve,
    "collapse": _run_collapse,
}


def run(config: ExperimentConfig) -> ExperimentReport:
    """Execute one experiment; the report body depends only on the config and library version."""
    logger.info(f"Running {config.kind} experiment (seed {config.seed})")
    start = time.perf_counter()
    reports, table, diagnostics = _RUNNERS[config.kind](config.params)
    elapsed = time.perf_counter() - start
    report = ExperimentReport(config.kind, dict(config.params), _records(reports), table, diagnostics, elapsed)
    status = "passed" if report.passed else "FAILED"
    logger.info(f"{config.kind}: {len(report.checks)} checks {status} in {elapsed:.2f}s")
    return report


def emit(report: ExperimentReport, fmt: str = "csv") -> bytes:
    """CSV check table (id, margin, passed) or the full JSON report including wall time."""
    if fmt == "json":
        payload = report.body()
        payload["wall_time"] = report.wall_time
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()
    if fmt != "csv":
        raise ValueError(f"unknown format '{fmt}'")
    frame = pd.DataFrame(
        [{"id": c["id"], "margin": _fmt(c["margin"]), "passed": c["passed"]} for c in report.checks],
        columns=["id", "margin", "passed"],
    )
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False)
    return buffer.getvalue().encode()


def emit_table(report: ExperimentReport) -> bytes:
    """Plot-ready CSV of the experiment's data table; empty when the experiment has none."""
    if not report.table:
        return b""
    frame = pd.DataFrame(report.table)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format="%.12g")
    return buffer.getvalue().encode()


def load_report(data: bytes | str) -> dict[str, Any]:
    """Parse a JSON report emitted by ``emit``."""
    payload = json.loads(data)
    missing = {"kind", "version", "checks", "config"} - set(payload)
    if missing:
        raise InvariantViolationError(f"report is missing keys: {sorted(missing)}")
    return payload


def selftest_configs(seed: int = 0) -> list[ExperimentConfig]:
    """
    The acceptance suite as a list of configurations.

    The slit sweeps run 50 regions at eps = 0.01 with 20 random observables
    each, and 100 strictly sharp regions at eps = 0.1.
    """
    return [
        ExperimentConfig.build(
            "slit", overrides={"z1": -2.0, "z2": 2.0, "eps": 0.01, "seeds": 50, "n_observables": 20, "seed": seed}
        ),
        ExperimentConfig.build("slit", overrides={"z1": -1.0, "z2": 1.0, "eps": 0.1, "seeds": 100, "seed": seed}),
        ExperimentConfig.build("born", overrides={"seed": seed}),
        ExperimentConfig.build("luders", overrides={"seed": seed}),
        ExperimentConfig.build("pointer", overrides={"mode": "single", "seed": seed}),
        ExperimentConfig.build("pointer", overrides={"mode": "union", "seed": seed}),
        ExperimentConfig.build("ehrenfest", overrides={"force": "cubic", "seed": seed}),
        ExperimentConfig.build("ehrenfest", overrides={"force": "harmonic", "r": "0,1", "seed": seed}),
        ExperimentConfig.build("evolve", overrides={"seed": seed}),
        ExperimentConfig.build("collapse", overrides={"seed": seed}),
    ]


def _variant(config: ExperimentConfig) -> str:
    variant = config.params.get("mode") or config.params.get("force")
    if config.kind == "slit":
        variant = f"eps={config.params['eps']:g}"
    return f"{config.kind}[{variant}]" if variant else config.kind


def run_selftest(seed: int = 0) -> ExperimentReport:
    """Run every acceptance configuration and fold the checks into one report."""
    configs = selftest_configs(seed)
    checks: list[CheckRecord] = []
    diagnostics: dict[str, float] = {}
    start = time.perf_counter()
    for config in configs:
        report = run(config)
        label = _variant(config)
        checks.extend({"id": f"{label}.{c['id']}", "margin": c["margin"], "passed": c["passed"]} for c in report.checks)
        diagnostics.update({f"{label}.{k}": v for k, v in report.diagnostics.items()})
    elapsed = time.perf_counter() - start
    return ExperimentReport("selftest", {"seed": seed}, checks, [], diagnostics, elapsed)
