"""test_operators.py
Dense operator core: traces, norms, spectral calculus, tensor products and grids.
"""

import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qrnlab.config import GridConfig, ToleranceConfig
from qrnlab.exceptions import DimensionBlowUpError, DimensionMismatchError, InvariantViolationError
from qrnlab.operators import (
    DensityMatrix,
    HermitianOperator,
    Projector,
    apply_function,
    commutator,
    density_from_json,
    density_from_vector,
    density_to_json,
    gaussian_packet,
    grid_operators,
    identity,
    mixture,
    operator_abs,
    operator_from_json,
    operator_norm,
    operator_to_json,
    partial_trace,
    repair_density,
    spectral_decompose,
    spectral_projector,
    tensor,
    trace_distance,
    trace_inner,
    trace_norm,
)
from tests.conftest import diag_op, diag_state

PAULI_X = HermitianOperator(np.array([[0, 1], [1, 0]], dtype=np.complex128), "X")


def _random_state(seed: int, dim: int) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return repair_density(g @ g.conj().T)


class TestConstruction:
    def test_operator_is_read_only(self):
        op = diag_op(1.0, 2.0)
        with pytest.raises(ValueError):
            op.entries[0, 0] = 5.0

    def test_non_square_rejected(self):
        with pytest.raises(InvariantViolationError):
            HermitianOperator(np.zeros((2, 3)))

    def test_density_trace_checked(self):
        with pytest.raises(InvariantViolationError):
            DensityMatrix(np.diag([0.6, 0.6]))

    def test_density_positivity_checked(self):
        with pytest.raises(InvariantViolationError):
            DensityMatrix(np.diag([1.5, -0.5]))

    def test_repair_clips_and_renormalizes(self):
        rho = repair_density(np.diag([0.7, -1e-11, 0.4]))
        assert_allclose(np.real(np.diag(rho.entries)), [0.7 / 1.1, 0.0, 0.4 / 1.1], atol=1e-12)

    def test_projector_checked_rejects_non_idempotent(self):
        with pytest.raises(InvariantViolationError):
            Projector.checked(diag_op(0.5, 1.0))

    def test_projector_carries_only_its_operator(self):
        projector = Projector.checked(diag_op(0.0, 1.0))
        assert [f.name for f in dataclasses.fields(projector)] == ["operator"]
        assert projector.rank == 1

    def test_tolerance_fields_are_all_read(self):
        names = {f.name for f in dataclasses.fields(ToleranceConfig)}
        assert "reconstruction_tolerance" not in names
        assert {"trace_tolerance", "psd_floor", "membership_slack", "check_slack"} <= names

    def test_mixture_weights_validated(self, qubit_states):
        with pytest.raises(InvariantViolationError):
            mixture([qubit_states["zero"], qubit_states["one"]], [0.7, 0.7])


class TestTraces:
    def test_trace_inner_examples(self, qubit_states):
        assert trace_inner(qubit_states["mixed"], diag_op(1.0, -1.0)) == pytest.approx(0.0, abs=1e-15)
        assert trace_inner(diag_state(1.0, 0.0), diag_op(3.0, 7.0)) == pytest.approx(3.0)
        assert trace_inner(qubit_states["plus"], PAULI_X) == pytest.approx(1.0)

    def test_trace_inner_dimension_mismatch(self, qubit_states):
        with pytest.raises(DimensionMismatchError):
            trace_inner(qubit_states["plus"], identity(3))

    def test_operator_abs(self):
        assert_allclose(operator_abs(diag_op(-2.0, 3.0)).entries, np.diag([2.0, 3.0]), atol=1e-12)
        assert_allclose(operator_abs(diag_op(0.0, 0.0)).entries, np.zeros((2, 2)), atol=1e-12)
        assert_allclose(operator_abs(PAULI_X).entries, np.eye(2), atol=1e-12)

    def test_trace_norm_examples(self, qubit_states):
        assert trace_norm(diag_op(1.0, -1.0)) == pytest.approx(2.0)
        plus = qubit_states["plus"]
        assert trace_norm(plus - plus) == pytest.approx(0.0, abs=1e-12)
        # eigenvalues of |0><0| - |+><+| are +-1/sqrt(2)
        assert trace_norm(qubit_states["zero"] - plus) == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_operator_norm(self, rng):
        assert operator_norm(diag_op(1.0, -3.0)) == pytest.approx(3.0)
        assert operator_norm(identity(4)) == pytest.approx(1.0)
        g = rng.standard_normal((6, 6))
        h = HermitianOperator(g + g.T)
        v = np.ones(6)
        for _ in range(2000):
            v = h.entries @ h.entries @ v
            v /= np.linalg.norm(v)
        power = math.sqrt(float(np.real(v.conj() @ h.entries @ h.entries @ v)))
        assert operator_norm(h) == pytest.approx(power, rel=1e-8)

    @pytest.mark.property
    @settings(max_examples=30, deadline=None)
    @given(seed_a=st.integers(0, 10_000), seed_b=st.integers(0, 10_000), dim=st.integers(2, 6))
    def test_trace_distance_is_bounded_by_two(self, seed_a, seed_b, dim):
        assert trace_distance(_random_state(seed_a, dim), _random_state(seed_b, dim)) <= 2.0 + 1e-12


class TestSpectralCalculus:
    def test_degenerate_eigenvalues_merge(self):
        dec = spectral_decompose(diag_op(1.0, 1.0, 2.0))
        assert dec.eigenvalues == pytest.approx([1.0, 2.0])
        assert_allclose(dec.reconstruct(), np.diag([1.0, 1.0, 2.0]), atol=1e-12)

    def test_identity_has_one_projector(self):
        dec = spectral_decompose(identity(3))
        assert len(dec.eigenprojectors) == 1
        assert_allclose(dec.eigenprojectors[0].entries, np.eye(3), atol=1e-12)

    def test_spectral_projector_examples(self):
        proj = spectral_projector(diag_op(0.0, 1.0, 2.0), (0.5, 2.5))
        assert_allclose(proj.entries, np.diag([0.0, 1.0, 1.0]), atol=1e-12)
        empty = spectral_projector(diag_op(0.0, 1.0), (5.0, 6.0))
        assert empty.rank == 0

    def test_boundary_eigenvalues_excluded(self):
        assert spectral_projector(diag_op(0.0, 1.0, 2.0), (0.0, 2.0)).rank == 1

    def test_slit_projector_rank_counts_grid_points(self, grid, grid_ops):
        q, _ = grid_ops
        x = np.real(np.diag(q.entries))
        expected = int(np.sum((x > -1.0) & (x < 1.0)))
        assert spectral_projector(q, (-1.0, 1.0)).rank == expected

    def test_empty_interval_rejected(self):
        with pytest.raises(InvariantViolationError):
            spectral_projector(diag_op(0.0, 1.0), (1.0, 1.0))

    def test_apply_function(self, rng):
        assert_allclose(apply_function(np.square, diag_op(1.0, 2.0)).entries, np.diag([1.0, 4.0]), atol=1e-12)
        g = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        a = HermitianOperator(g + g.conj().T)
        cube = apply_function(lambda x: x**3, a)
        assert_allclose(cube.entries, a.entries @ a.entries @ a.entries, atol=1e-9)
        assert np.linalg.norm(commutator(cube, a), 2) <= 1e-9

    def test_commutator_of_paulis(self):
        pauli_y = np.array([[0, -1j], [1j, 0]])
        assert_allclose(commutator(PAULI_X, diag_op(1.0, -1.0)), -2j * pauli_y, atol=1e-12)
        assert_allclose(commutator(diag_op(1.0, 2.0), diag_op(3.0, -1.0)), np.zeros((2, 2)), atol=1e-12)


class TestTensor:
    def test_partial_trace_of_product(self, qubit_states):
        joint = tensor(qubit_states["zero"], qubit_states["zero"])
        assert_allclose(partial_trace(joint, 2, (2, 2)).entries, np.diag([1.0, 0.0]), atol=1e-12)

    def test_mixed_product_traces_to_mixed(self, qubit_states):
        joint = tensor(qubit_states["mixed"], qubit_states["mixed"])
        for keep in (1, 2):
            assert_allclose(partial_trace(joint, keep, (2, 2)).entries, np.eye(2) / 2, atol=1e-12)

    def test_bell_state_reduces_to_mixed(self):
        bell = density_from_vector([1.0, 0.0, 0.0, 1.0])
        assert_allclose(partial_trace(bell, 1, (2, 2)).entries, np.eye(2) / 2, atol=1e-12)

    def test_partial_trace_bad_factorization(self, qubit_states):
        with pytest.raises(DimensionMismatchError):
            partial_trace(tensor(qubit_states["zero"], qubit_states["zero"]), 1, (3, 2))

    def test_dimension_cap(self):
        with pytest.raises(DimensionBlowUpError):
            tensor(identity(65), identity(64))


class TestGrid:
    def test_small_grid_positions(self):
        q, _ = grid_operators(4, 2.0)
        assert_allclose(np.real(np.diag(q.entries)), [-2.0, -1.0, 0.0, 1.0])

    def test_packet_spread_matches_width(self, grid, grid_ops):
        q, _ = grid_ops
        rho = gaussian_packet(grid, 0.5, 0.8)
        mean = trace_inner(rho, q)
        sd = math.sqrt(trace_inner(rho, q.squared) - mean**2)
        assert mean == pytest.approx(0.5, abs=1e-9)
        assert sd == pytest.approx(0.8, rel=0.01)

    def test_minimum_uncertainty_product(self, grid, grid_ops):
        q, p = grid_ops
        rho = gaussian_packet(grid, 0.0, 0.7)
        sq = math.sqrt(trace_inner(rho, q.squared) - trace_inner(rho, q) ** 2)
        sp = math.sqrt(trace_inner(rho, p.squared) - trace_inner(rho, p) ** 2)
        assert sq * sp == pytest.approx(0.5 * grid.hbar, rel=0.01)

    def test_grid_needs_two_points(self):
        with pytest.raises(InvariantViolationError):
            grid_operators(GridConfig(1, 1.0))

    @pytest.mark.property
    @settings(max_examples=25, deadline=None)
    @given(center=st.floats(-3.0, 3.0), width=st.floats(0.3, 1.5))
    def test_real_packet_has_no_mean_momentum(self, grid, grid_ops, center, width):
        _, p = grid_ops
        assert abs(trace_inner(gaussian_packet(grid, center, width), p)) <= 1e-8

    @pytest.mark.property
    @settings(max_examples=25, deadline=None)
    @given(center=st.floats(-3.0, 3.0), width=st.floats(0.3, 1.0), hbar=st.sampled_from([0.5, 1.0, 2.0]))
    def test_canonical_commutator_on_central_packets(self, center, width, hbar):
        grid = GridConfig(256, 10.0, hbar)
        q, p = grid_operators(grid)
        rho = gaussian_packet(grid, center, width)
        value = np.trace(rho.entries @ commutator(q, p))
        assert value == pytest.approx(1j * hbar, abs=1e-7)


class TestJson:
    def test_operator_payload_layout(self):
        payload = operator_to_json(PAULI_X)
        assert payload["dim"] == 2
        assert payload["entries"][0][1] == [1.0, 0.0]
        loaded = operator_from_json(json.loads(json.dumps(payload)))
        assert_allclose(loaded.entries, PAULI_X.entries)
        assert loaded.label == "X"

    def test_non_hermitian_payload_rejected(self):
        payload = {"dim": 2, "entries": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]], "label": "bad"}
        with pytest.raises(InvariantViolationError):
            operator_from_json(payload)

    def test_density_loader_validates_trace(self, qubit_states):
        payload = density_to_json(qubit_states["plus"])
        payload["entries"][0][0] = [2.0, 0.0]
        with pytest.raises(InvariantViolationError):
            density_from_json(payload)


def _random_hermitian(seed: int, dim: int) -> HermitianOperator:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianOperator((g + g.conj().T) / 2.0)


@pytest.mark.property
class TestOperatorInvariants:
    @settings(max_examples=40, deadline=None)
    @given(seed_a=st.integers(0, 10_000), seed_b=st.integers(0, 10_000), dim=st.integers(2, 8))
    def test_trace_norm_triangle_inequality(self, seed_a, seed_b, dim):
        a, b = _random_hermitian(seed_a, dim), _random_hermitian(seed_b, dim)
        assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000), dim=st.integers(2, 8), cut=st.floats(-1.0, 1.0))
    def test_disjoint_spectral_projectors_annihilate(self, seed, dim, cut):
        a = _random_hermitian(seed, dim)
        bound = operator_norm(a) + 1.0
        low = spectral_projector(a, (-bound, cut))
        high = spectral_projector(a, (cut, bound))
        assert np.linalg.norm(low.entries @ high.entries) <= 1e-10

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000), dim=st.integers(1, 8))
    def test_spectral_decomposition_is_a_resolution_of_identity(self, seed, dim):
        a = _random_hermitian(seed, dim)
        decomposition = spectral_decompose(a)
        projectors = [proj.entries for proj in decomposition.eigenprojectors]
        assert np.linalg.norm(decomposition.reconstruct() - a.entries) <= 1e-9
        assert np.linalg.norm(sum(projectors) - np.eye(dim)) <= 1e-10
        for i, pi in enumerate(projectors):
            assert np.linalg.norm(pi @ pi - pi) <= 1e-10
            for pj in projectors[i + 1 :]:
                assert np.linalg.norm(pi @ pj) <= 1e-10

    @settings(max_examples=40, deadline=None)
    @given(
        seed_a=st.integers(0, 10_000),
        seed_b=st.integers(0, 10_000),
        d1=st.integers(1, 5),
        d2=st.integers(1, 5),
    )
    def test_partial_trace_of_product_states(self, seed_a, seed_b, d1, d2):
        rho1, rho2 = _random_state(seed_a, d1), _random_state(seed_b, d2)
        joint = tensor(rho1, rho2)
        kept1 = partial_trace(joint, 1, (d1, d2))
        kept2 = partial_trace(joint, 2, (d1, d2))
        assert_allclose(kept1.entries, rho1.entries, atol=1e-12)
        assert_allclose(kept2.entries, rho2.entries, atol=1e-12)
        assert np.trace(kept1.entries).real == pytest.approx(np.trace(joint.entries).real, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000), d1=st.integers(1, 4), d2=st.integers(1, 4))
    def test_partial_trace_preserves_trace_of_entangled_states(self, seed, d1, d2):
        joint = _random_state(seed, d1 * d2)
        for keep in (1, 2):
            reduced = partial_trace(joint, keep, (d1, d2))
            assert np.trace(reduced.entries).real == pytest.approx(1.0, abs=1e-12)
