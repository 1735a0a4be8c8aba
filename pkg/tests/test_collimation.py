"""test_collimation.py
One-slit collimation bounds over sharp regions.
"""

import math

import numpy as np
import pytest

from qrnlab.collimation import (
    TheoremReport,
    chebyshev_saturating_state,
    check_basic_postulate1,
    check_corollary1,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    check_theorem4,
    corollary1_bound,
    prepare_sharp_state,
    random_bounded_operator,
    run_slit_suite,
    sharp_region,
)
from qrnlab.exceptions import HypothesisNotMetError, PreparationFailedError, UnboundedSlitPreconditionError
from qrnlab.operators import gaussian_packet, identity, spectral_projector
from qrnlab.qrn import SlitSpec, is_eps_sharp, singleton_region, spread
from tests.conftest import diag_op, diag_state

SLITS_BY_EPS = {0.01: SlitSpec(-2.0, 2.0), 0.1: SlitSpec(-1.0, 1.0)}


class TestReports:
    def test_margins_within_slack_pass(self):
        assert TheoremReport.from_margins("t", [0.1, -5e-10]).passed
        assert not TheoremReport.from_margins("t", [0.1, -1e-6]).passed

    def test_merge_keeps_worst(self):
        merged = TheoremReport.merge([TheoremReport.from_margins("t", [0.3]), TheoremReport.from_margins("t", [0.1])])
        assert merged.worst_margin == pytest.approx(0.1)
        assert merged.per_sample_margin == (0.3, 0.1)


class TestPreparation:
    def test_reference_packet_spread(self, grid, grid_ops, unit_slit):
        z, _ = grid_ops
        state = prepare_sharp_state(unit_slit, 0.04, grid)
        assert spread(z, state) == pytest.approx(0.16, rel=0.01)
        assert is_eps_sharp(z, singleton_region(state), unit_slit, 0.04)

    def test_slit_outside_grid(self, grid):
        with pytest.raises(PreparationFailedError):
            prepare_sharp_state(SlitSpec(9.0, 11.0), 0.04, grid)

    def test_sharp_region_is_deterministic(self, grid, unit_slit):
        a = sharp_region(unit_slit, 0.04, grid, n_samples=4, seed=5)
        b = sharp_region(unit_slit, 0.04, grid, n_samples=4, seed=5)
        assert a.radius == b.radius
        assert np.array_equal(a.samples[-1].entries, b.samples[-1].entries)


class TestTheorem1:
    def test_eigenstate_margin_is_eps(self):
        region = singleton_region(diag_state(0.0, 1.0, 0.0))
        report = check_theorem1(diag_op(-1.0, 0.0, 1.0), region, SlitSpec(-0.5, 0.5), 0.2)
        assert report.worst_margin == pytest.approx(0.2)

    def test_reference_packet_margin(self, grid, grid_ops, unit_slit):
        z, _ = grid_ops
        eps = 0.04
        state = gaussian_packet(grid, 0.0, 0.4 * unit_slit.width * math.sqrt(eps))
        report = check_theorem1(z, singleton_region(state), unit_slit, eps)
        assert report.worst_margin == pytest.approx(0.36 * eps, rel=0.02)

    def test_not_sharp_is_rejected(self, grid, grid_ops, unit_slit):
        z, _ = grid_ops
        with pytest.raises(HypothesisNotMetError):
            check_theorem1(z, singleton_region(gaussian_packet(grid, 0.0, 1.0)), unit_slit, 0.04)

    @pytest.mark.slow
    @pytest.mark.parametrize("eps", sorted(SLITS_BY_EPS))
    @pytest.mark.parametrize("seed", range(50))
    def test_sharp_region_sweep(self, grid, grid_ops, eps, seed):
        z, _ = grid_ops
        slit = SLITS_BY_EPS[eps]
        region = sharp_region(slit, eps, grid, n_samples=8, seed=seed, strict=True)
        report = check_theorem1(z, region, slit, eps)
        assert report.passed
        assert all(m >= -1e-9 for m in report.per_sample_margin)


class TestTheorem2:
    def test_minimum_uncertainty_saturates(self, grid, grid_ops, unit_slit):
        z, p = grid_ops
        eps = 0.04
        region = sharp_region(unit_slit, eps, grid, n_samples=8, seed=0)
        report = check_theorem2(z, p, region, eps, grid.hbar, rel_tol=0.01)
        assert report.passed
        product = report.notes["z_width"] * report.notes["p_width"]
        assert product == pytest.approx(2.0 * grid.hbar / eps, rel=0.05)

    def test_wider_slits_still_hold(self, grid, grid_ops, unit_slit):
        z, p = grid_ops
        eps = 0.04
        region = sharp_region(unit_slit, eps, grid, n_samples=4, seed=1)
        assert check_theorem2(z, p, region, eps, zslit=SlitSpec(-3.0, 3.0), pslit=SlitSpec(-30.0, 30.0)).passed

    def test_bound_value(self, grid, grid_ops):
        z, p = grid_ops
        report = check_theorem2(z, p, singleton_region(gaussian_packet(grid, 0.0, 1.0)), 0.25, 1.0, rel_tol=0.01)
        assert report.notes["bound"] == pytest.approx(8.0 * 0.99)


class TestTheorem3:
    def test_eigenstate_passes_with_certainty(self):
        z = diag_op(-1.0, 0.0, 1.0)
        report = check_theorem3(z, singleton_region(diag_state(0.0, 1.0, 0.0)), SlitSpec(-0.5, 0.5), 0.1)
        assert report.worst_margin == pytest.approx(0.1)

    def test_gaussian_tails_beat_chebyshev(self, grid, grid_ops, unit_slit):
        z, _ = grid_ops
        eps = 0.04
        region = sharp_region(unit_slit, eps, grid, n_samples=8, seed=2)
        report = check_theorem3(z, region, unit_slit, eps)
        assert report.worst_margin > 0.5 * eps

    @pytest.mark.parametrize("eps", [0.01, 0.04, 0.1])
    def test_chebyshev_saturation_still_passes(self, grid, grid_ops, eps):
        z, _ = grid_ops
        state, slit = chebyshev_saturating_state(grid, 12, eps)
        report = check_theorem3(z, singleton_region(state), slit, eps)
        assert report.passed
        assert report.worst_margin == pytest.approx(0.0, abs=1e-6)


class TestCorollary1:
    def test_bound_value(self):
        assert corollary1_bound(0.1) == pytest.approx(0.1 * 1.9 / 0.9)

    def test_supported_state_has_full_margin(self):
        z = diag_op(-1.0, 0.0, 1.0)
        projector = spectral_projector(z, SlitSpec(-0.5, 0.5))
        assert check_corollary1(diag_state(0.0, 1.0, 0.0), projector, 0.1) == pytest.approx(corollary1_bound(0.1))

    def test_eps_range_checked(self):
        projector = spectral_projector(diag_op(0.0, 1.0), (-0.5, 0.5))
        with pytest.raises(HypothesisNotMetError):
            check_corollary1(diag_state(1.0, 0.0), projector, 1.0)

    @pytest.mark.slow
    def test_strictly_sharp_sweep(self, grid, grid_ops, unit_slit):
        z, _ = grid_ops
        eps = 0.1
        projector = spectral_projector(z, unit_slit)
        for seed in range(100):
            region = sharp_region(unit_slit, eps, grid, n_samples=4, seed=seed, strict=True)
            assert min(check_corollary1(s, projector, eps) for s in region.samples) >= 0.0


class TestTheorem4:
    def test_identity_observable(self, grid, grid_ops, unit_slit):
        z, _ = grid_ops
        eps = 0.04
        region = sharp_region(unit_slit, eps, grid, n_samples=8, seed=3, strict=True)
        report = check_theorem4(identity(z.dim), region, unit_slit, eps, z)
        assert report.passed
        assert report.notes["bound"] == pytest.approx(3.0 * eps)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(20))
    def test_random_bounded_observables(self, grid, grid_ops, unit_slit, seed):
        z, _ = grid_ops
        eps = 0.04
        region = sharp_region(unit_slit, eps, grid, n_samples=6, seed=seed, strict=True)
        rng = np.random.default_rng(seed)
        for i in range(20):
            m = random_bounded_operator(z.dim, rng, norm=1.0 + i, label=f"M{i}")
            assert check_theorem4(m, region, unit_slit, eps, z).passed

    def test_position_branch(self, grid, grid_ops):
        z, _ = grid_ops
        eps, slit = 0.2, SlitSpec(6.0, 6.8)
        region = sharp_region(slit, eps, grid, n_samples=6, seed=0, strict=True)
        report = check_theorem4(z, region, slit, eps, z)
        assert report.theorem_id == "theorem4_position"
        assert report.notes["bound"] == pytest.approx(eps * 12.0)
        assert report.passed

    def test_position_branch_precondition(self, grid, grid_ops, unit_slit):
        z, _ = grid_ops
        region = sharp_region(unit_slit, 0.04, grid, n_samples=4, seed=0, strict=True)
        with pytest.raises(UnboundedSlitPreconditionError) as info:
            check_theorem4(z, region, unit_slit, 0.04, z)
        assert info.value.m == pytest.approx(2.0)


class TestBasicPostulate1:
    def test_single_eigenvalue_notes(self):
        z = diag_op(-1.0, 0.0, 1.0)
        report = check_basic_postulate1(z, singleton_region(diag_state(0.0, 1.0, 0.0)), SlitSpec(-0.5, 0.5), 0.1)
        assert report.passed
        assert report.notes["eigenvalue"] == pytest.approx(0.0)
        assert report.notes["eigenvalue_probability"] == pytest.approx(1.0)


@pytest.mark.integration
def test_slit_suite_passes(grid, unit_slit):
    reports = run_slit_suite(unit_slit, 0.04, grid, seeds=[0, 1, 2], n_samples=6, n_observables=3)
    ids = {r.theorem_id for r in reports}
    assert {"theorem1", "theorem2", "theorem3", "corollary1", "basic_postulate1", "theorem4"} <= ids
    assert "theorem3_chebyshev" in ids
    assert all(r.passed for r in reports), [r.theorem_id for r in reports if not r.passed]


@pytest.mark.integration
def test_slit_suite_far_from_origin_adds_position_branch(grid):
    reports = run_slit_suite(SlitSpec(6.0, 6.8), 0.2, grid, seeds=[0], n_samples=4, n_observables=1)
    by_id = {r.theorem_id: r for r in reports}
    assert "theorem4_position" in by_id
    assert by_id["theorem4_position"].passed
