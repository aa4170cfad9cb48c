"""Tests for the qbound states module."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qbound.exceptions import (
    BlochRadiusError,
    DimensionMismatchError,
    DomainError,
    NotHermitianError,
    NotPositiveError,
    NotUnitaryError,
    StateError,
)
from qbound.parity import build_parity_ensemble
from qbound.states import (
    PAULI,
    BlochVector,
    DensityMatrix,
    PositiveOperator,
    StateVector,
    apply_unitary,
    binary_entropy,
    bloch_from_density,
    check_unitary,
    conditioned_reduced_state,
    density_from_bloch,
    expectation,
    fidelity,
    hermitian_eigensystem,
    ket,
    partial_trace,
    projector,
    tensor,
    von_neumann_entropy,
)

BELL = ket(1 / math.sqrt(2), 0.0, 0.0, 1 / math.sqrt(2))
SINGLET = ket(0.0, 1 / math.sqrt(2), -1 / math.sqrt(2), 0.0)

unit_floats = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


class TestStateVector:
    """Tests for StateVector."""

    def test_normalize_scales_to_unit_norm(self) -> None:
        """Test normalize divides by the Euclidean norm."""
        state = StateVector.normalize([3.0, 4.0])
        np.testing.assert_allclose(state.amplitudes, [0.6, 0.8])
        assert state.dim == 2

    def test_unnormalized_amplitudes_rejected(self) -> None:
        """Test a state with norm != 1 is rejected."""
        with pytest.raises(StateError, match="not normalized"):
            StateVector(np.array([1.0, 1.0]))

    def test_zero_vector_cannot_be_normalized(self) -> None:
        """Test normalizing the zero vector raises."""
        with pytest.raises(StateError):
            StateVector.normalize([0.0, 0.0])

    def test_amplitudes_are_read_only(self) -> None:
        """Test the stored array cannot be mutated."""
        state = ket(1.0, 0.0)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 0.0

    def test_inner_product(self) -> None:
        """Test <psi|phi> conjugates the left operand."""
        plus_i = ket(1 / math.sqrt(2), 1j / math.sqrt(2))
        assert plus_i.inner(ket(1.0, 0.0)) == pytest.approx(1 / math.sqrt(2))
        assert plus_i.inner(plus_i) == pytest.approx(1.0)

    def test_inner_dimension_mismatch(self) -> None:
        """Test overlaps of different dimensions raise."""
        with pytest.raises(DimensionMismatchError):
            ket(1.0, 0.0).inner(BELL)


class TestDensityMatrix:
    """Tests for DensityMatrix validation and properties."""

    def test_non_hermitian_rejected(self) -> None:
        """Test a non-Hermitian matrix is rejected."""
        with pytest.raises(NotHermitianError):
            DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))

    def test_negative_eigenvalue_rejected(self) -> None:
        """Test a matrix with a negative eigenvalue is rejected."""
        with pytest.raises(NotPositiveError):
            DensityMatrix(np.diag([1.2, -0.2]))

    def test_trace_above_one_rejected(self) -> None:
        """Test trace > 1 is rejected."""
        with pytest.raises(StateError, match="trace exceeds 1"):
            DensityMatrix(np.diag([0.7, 0.7]))

    def test_non_square_rejected(self) -> None:
        """Test a non-square matrix is rejected."""
        with pytest.raises(DimensionMismatchError):
            DensityMatrix(np.zeros((2, 3)))

    def test_weighted_state_keeps_weight(self) -> None:
        """Test sub-normalized states carry their trace as weight."""
        rho = DensityMatrix(np.diag([0.3, 0.1]))
        assert rho.weight == pytest.approx(0.4)
        assert not rho.is_normalized()
        np.testing.assert_allclose(rho.normalized().entries, np.diag([0.75, 0.25]))

    def test_zero_weight_rejected(self) -> None:
        """Test the zero operator is not a density matrix."""
        with pytest.raises(StateError, match="zero weight"):
            DensityMatrix(np.zeros((2, 2)))

    def test_scaling_to_zero_rejected(self) -> None:
        """Test scaling a state by zero raises."""
        with pytest.raises(StateError, match="zero weight"):
            DensityMatrix.maximally_mixed(2).scaled(0.0)

    def test_maximally_mixed_purity(self) -> None:
        """Test the completely mixed qubit has purity 1/2 and is not pure."""
        rho = DensityMatrix.maximally_mixed(2)
        assert rho.purity == pytest.approx(0.5)
        assert not rho.is_pure()

    def test_projector_is_pure(self) -> None:
        """Test a projector has purity 1."""
        rho = projector(ket(math.cos(0.3), math.sin(0.3)))
        assert rho.is_pure()
        assert rho.purity == pytest.approx(1.0)

    def test_determinant_matches_bloch_radius(self) -> None:
        """Test det(rho) = (1 - |r|^2) / 4."""
        r = BlochVector(0.3, -0.2, 0.5)
        rho = density_from_bloch(r)
        assert rho.determinant == pytest.approx((1 - r.radius**2) / 4, abs=1e-15)

    def test_scaled(self) -> None:
        """Test scaling multiplies every entry."""
        rho = DensityMatrix.maximally_mixed(2).scaled(0.5)
        assert rho.weight == pytest.approx(0.5)


class TestPositiveOperator:
    """Tests for PositiveOperator."""

    def test_identity_has_no_trace_constraint(self) -> None:
        """Test the identity (trace 2) is a valid positive operator."""
        identity = PositiveOperator.identity(2)
        assert np.trace(identity.entries) == pytest.approx(2.0)

    def test_sum_of_weighted_projectors(self) -> None:
        """Test weighted projectors onto an orthonormal basis sum to the weight."""
        total = PositiveOperator.projector(ket(1.0, 0.0), 0.5) + PositiveOperator.projector(
            ket(0.0, 1.0), 0.5
        )
        np.testing.assert_allclose(total.entries, 0.5 * np.eye(2))

    def test_negative_operator_rejected(self) -> None:
        """Test a negative operator is rejected."""
        with pytest.raises(NotPositiveError):
            PositiveOperator(-np.eye(2))

    def test_sum_dimension_mismatch(self) -> None:
        """Test adding operators of different dimensions raises."""
        with pytest.raises(DimensionMismatchError):
            PositiveOperator.identity(2) + PositiveOperator.identity(4)


class TestTensor:
    """Tests for tensor products and the Eve (x) Bob ordering."""

    def test_basis_product(self) -> None:
        """Test (1,0) (x) (0,1) = (0,1,0,0)."""
        product = tensor(ket(1.0, 0.0), ket(0.0, 1.0))
        assert isinstance(product, StateVector)
        np.testing.assert_array_equal(product.amplitudes, [0, 1, 0, 0])

    def test_probe_first_ordering(self) -> None:
        """Test probe (1,0) (x) (cos t, sin t) = (cos t, sin t, 0, 0)."""
        theta = math.pi / 8
        product = tensor(ket(1.0, 0.0), ket(math.cos(theta), math.sin(theta)))
        assert isinstance(product, StateVector)
        np.testing.assert_allclose(product.amplitudes, [math.cos(theta), math.sin(theta), 0, 0])

    def test_mixed_operand_gives_density_matrix(self) -> None:
        """Test a density-matrix operand yields a density matrix."""
        product = tensor(ket(1.0, 0.0), DensityMatrix.maximally_mixed(2))
        assert isinstance(product, DensityMatrix)
        np.testing.assert_allclose(product.entries, np.diag([0.5, 0.5, 0.0, 0.0]))

    def test_round_trip_with_partial_trace(self) -> None:
        """Test tensor(rho, I/2) traced over the second factor gives rho."""
        rho = density_from_bloch(BlochVector(0.1, 0.2, 0.3))
        joint = tensor(rho, DensityMatrix.maximally_mixed(2))
        np.testing.assert_allclose(partial_trace(joint, (2, 2), keep=0).entries, rho.entries, atol=1e-15)


class TestPartialTrace:
    """Tests for partial_trace."""

    def test_product_state_factors(self) -> None:
        """Test tracing a product state returns each factor."""
        rho_a = density_from_bloch(BlochVector(0.2, 0.0, 0.5))
        rho_b = density_from_bloch(BlochVector(0.0, -0.4, 0.1))
        joint = tensor(rho_a, rho_b)
        np.testing.assert_allclose(partial_trace(joint, (2, 2), keep=0).entries, rho_a.entries, atol=1e-15)
        np.testing.assert_allclose(partial_trace(joint, (2, 2), keep=1).entries, rho_b.entries, atol=1e-15)

    def test_bell_state_is_maximally_mixed(self) -> None:
        """Test either half of a Bell state is the completely mixed state."""
        for keep in (0, 1):
            reduced = partial_trace(BELL, (2, 2), keep=keep)
            np.testing.assert_allclose(reduced.entries, 0.5 * np.eye(2), atol=1e-15)

    def test_unequal_factor_dimensions(self) -> None:
        """Test a 2 x 3 split keeps the right factor dimension."""
        rho_a = DensityMatrix.maximally_mixed(2)
        rho_b = DensityMatrix.maximally_mixed(3)
        joint = tensor(rho_a, rho_b)
        assert partial_trace(joint, (2, 3), keep=1).dim == 3
        assert partial_trace(joint, (2, 3), keep=0).dim == 2

    def test_dimension_mismatch(self) -> None:
        """Test dims that do not factor the state raise."""
        with pytest.raises(DimensionMismatchError):
            partial_trace(BELL, (2, 3), keep=0)

    def test_invalid_keep(self) -> None:
        """Test a subsystem selector other than 0 or 1 raises."""
        with pytest.raises(DomainError):
            partial_trace(BELL, (2, 2), keep=2)

    @seed(20240601)
    @settings(max_examples=50, deadline=None)
    @given(
        real=arrays(np.float64, (4,), elements=unit_floats),
        imag=arrays(np.float64, (4,), elements=unit_floats),
    )
    def test_weight_preserved_and_positive(self, real: np.ndarray, imag: np.ndarray) -> None:
        """Test reduced states of random pure states are normalized and positive."""
        amplitudes = real + 1j * imag
        assume(np.linalg.norm(amplitudes) > 1e-3)
        joint = StateVector.normalize(amplitudes)
        for keep in (0, 1):
            reduced = partial_trace(joint, (2, 2), keep=keep)
            assert reduced.weight == pytest.approx(1.0, abs=1e-12)


class TestConditionedReducedState:
    """Tests for the information-dependent reduced state."""

    def test_identity_condition_equals_partial_trace(self) -> None:
        """Test A = I reproduces partial_trace element-wise."""
        joint = StateVector.normalize([0.3, 0.5 + 0.1j, -0.2, 0.7])
        conditioned = conditioned_reduced_state(joint, PositiveOperator.identity(2), (2, 2), keep=0)
        plain = partial_trace(joint, (2, 2), keep=0)
        assert np.max(np.abs(conditioned.entries - plain.entries)) <= 1e-14

    def test_singlet_conditioned_on_bob(self) -> None:
        """Test conditioning a singlet on Bob's (cos eta, sin eta) leaves Eve in (sin eta, -cos eta)."""
        eta = math.pi / 6
        condition = PositiveOperator.projector(ket(math.cos(eta), math.sin(eta)))
        reduced = conditioned_reduced_state(SINGLET, condition, (2, 2), keep=0)
        assert reduced.weight == pytest.approx(0.5, abs=1e-12)
        expected = ket(0.5, -math.sqrt(3) / 2)
        assert fidelity(expected, reduced.normalized()) == pytest.approx(1.0, abs=1e-12)

    def test_keep_second_factor(self) -> None:
        """Test conditioning on the first factor keeps the second."""
        condition = PositiveOperator.projector(ket(1.0, 0.0))
        reduced = conditioned_reduced_state(SINGLET, condition, (2, 2), keep=1)
        np.testing.assert_allclose(reduced.entries, np.diag([0.0, 0.5]), atol=1e-15)

    def test_resolution_of_identity_sums_to_partial_trace(self) -> None:
        """Test conditioned states over a complete measurement add up to the partial trace."""
        joint = StateVector.normalize([0.4, -0.1j, 0.6, 0.2 + 0.3j])
        angle = 0.37
        first = ket(math.cos(angle), math.sin(angle))
        second = ket(-math.sin(angle), math.cos(angle))
        parts = [
            conditioned_reduced_state(joint, PositiveOperator.projector(v), (2, 2), keep=0)
            for v in (first, second)
        ]
        assert sum(p.weight for p in parts) == pytest.approx(1.0, abs=1e-12)
        total = parts[0].entries + parts[1].entries
        np.testing.assert_allclose(total, partial_trace(joint, (2, 2), keep=0).entries, atol=1e-12)

    def test_condition_on_wrong_factor_dimension(self) -> None:
        """Test a condition not matching the traced factor raises."""
        joint = tensor(DensityMatrix.maximally_mixed(2), DensityMatrix.maximally_mixed(3))
        with pytest.raises(DimensionMismatchError):
            conditioned_reduced_state(joint, PositiveOperator.identity(2), (2, 3), keep=0)

    def test_orthogonal_condition_rejected(self) -> None:
        """Test a condition with zero probability on the state raises DomainError."""
        joint = ket(1.0, 0.0, 0.0, 0.0)
        with pytest.raises(DomainError, match="zero probability"):
            conditioned_reduced_state(joint, PositiveOperator.projector(ket(0.0, 1.0)), (2, 2), keep=0)

    def test_condition_above_unit_probability(self) -> None:
        """Test a condition carrying more than unit probability raises."""
        with pytest.raises(DomainError):
            conditioned_reduced_state(BELL, PositiveOperator(2.0 * np.eye(2)), (2, 2), keep=0)


class TestBloch:
    """Tests for Bloch vector conversions."""

    def test_completely_mixed(self) -> None:
        """Test diag(1/2, 1/2) has the zero Bloch vector."""
        assert bloch_from_density(DensityMatrix.maximally_mixed(2)) == BlochVector(0.0, 0.0, 0.0)

    def test_spin_up(self) -> None:
        """Test the projector on (1, 0) is the north pole."""
        assert bloch_from_density(projector(ket(1.0, 0.0))) == BlochVector(0.0, 0.0, 1.0)

    def test_sign_convention(self) -> None:
        """Test x = 2 Re rho10 and y = 2 Im rho10."""
        plus_i = projector(ket(1 / math.sqrt(2), 1j / math.sqrt(2)))
        r = bloch_from_density(plus_i)
        assert r.x == pytest.approx(0.0, abs=1e-15)
        assert r.y == pytest.approx(1.0)
        assert r.z == pytest.approx(0.0, abs=1e-15)

    def test_pure_state_from_angle(self) -> None:
        """Test (sin 2a, 0, cos 2a) is the projector on (cos a, sin a)."""
        alpha = 0.1
        rho = density_from_bloch(BlochVector(math.sin(2 * alpha), 0.0, math.cos(2 * alpha)))
        expected = projector(ket(math.cos(alpha), math.sin(alpha)))
        np.testing.assert_allclose(rho.entries, expected.entries, atol=1e-15)

    def test_south_pole(self) -> None:
        """Test (0, 0, -1) is the projector on (0, 1)."""
        rho = density_from_bloch(BlochVector(0.0, 0.0, -1.0))
        np.testing.assert_allclose(rho.entries, np.diag([0.0, 1.0]))

    def test_radius_above_one_rejected(self) -> None:
        """Test a Bloch vector outside the unit ball raises."""
        with pytest.raises(BlochRadiusError):
            BlochVector(0.8, 0.0, 0.8)

    def test_requires_qubit(self) -> None:
        """Test conversion of a 4-dimensional state raises."""
        with pytest.raises(DimensionMismatchError):
            bloch_from_density(DensityMatrix.maximally_mixed(4))

    def test_requires_normalized_state(self) -> None:
        """Test conversion of a weighted state raises."""
        with pytest.raises(DomainError):
            bloch_from_density(DensityMatrix(np.diag([0.25, 0.25])))

    @seed(7)
    @settings(max_examples=100, deadline=None)
    @given(x=unit_floats, y=unit_floats, z=unit_floats)
    def test_round_trip(self, x: float, y: float, z: float) -> None:
        """Test bloch_from_density inverts density_from_bloch inside the ball."""
        assume(x * x + y * y + z * z <= 1.0)
        r = BlochVector(x, y, z)
        back = bloch_from_density(density_from_bloch(r))
        np.testing.assert_allclose(back.as_array(), r.as_array(), atol=1e-12)

    @seed(11)
    @settings(max_examples=50, deadline=None)
    @given(x=unit_floats, y=unit_floats, z=unit_floats)
    def test_purity_iff_unit_radius(self, x: float, y: float, z: float) -> None:
        """Test a state on the sphere is pure and one inside is not."""
        norm = math.sqrt(x * x + y * y + z * z)
        assume(norm > 1e-3)
        surface = density_from_bloch(BlochVector(x / norm, y / norm, z / norm))
        inside = density_from_bloch(BlochVector(0.9 * x / norm, 0.9 * y / norm, 0.9 * z / norm))
        assert surface.is_pure()
        assert not inside.is_pure()


class TestHermitianEigensystem:
    """Tests for hermitian_eigensystem."""

    def test_diagonal(self) -> None:
        """Test eigenvalues of a diagonal matrix come out descending."""
        system = hermitian_eigensystem(np.diag([0.2, 0.7]))
        np.testing.assert_allclose(system.values, [0.7, 0.2])

    def test_pauli_x(self) -> None:
        """Test Pauli-x has eigenvalues +1, -1 with eigenvectors (1, +-1)/sqrt 2."""
        system = hermitian_eigensystem(PAULI["x"])
        np.testing.assert_allclose(system.values, [1.0, -1.0])
        plus = system.vectors[:, 0]
        assert abs(np.vdot(plus, np.array([1, 1]) / math.sqrt(2))) == pytest.approx(1.0)

    def test_parity_difference_spectrum(self) -> None:
        """Test rho_even - rho_odd for n = 2, alpha = 0.1 has eigenvalues +-sin^2(0.2)/2, each double."""
        ensemble = build_parity_ensemble(2, 0.1)
        system = hermitian_eigensystem(ensemble.rho_even.entries - ensemble.rho_odd.entries)
        level = math.sin(0.2) ** 2 / 2
        np.testing.assert_allclose(system.values, [level, level, -level, -level], atol=1e-15)

    def test_reconstruction_and_projectors(self) -> None:
        """Test H is rebuilt from its eigensystem and projectors sum to the identity."""
        rng = np.random.default_rng(3)
        raw = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        hermitian = raw + raw.conj().T
        system = hermitian_eigensystem(hermitian)
        assert np.max(np.abs(system.reconstruct() - hermitian)) <= 1e-10
        mask = system.values >= 0
        total = system.projector(mask) + system.projector(~mask)
        np.testing.assert_allclose(total, np.eye(8), atol=1e-12)

    def test_non_hermitian_rejected(self) -> None:
        """Test a non-Hermitian input raises."""
        with pytest.raises(NotHermitianError):
            hermitian_eigensystem(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestEntropy:
    """Tests for von Neumann and binary entropy."""

    def test_pure_state(self) -> None:
        """Test a pure state has zero entropy."""
        assert von_neumann_entropy(projector(ket(0.6, 0.8))) == pytest.approx(0.0, abs=1e-12)

    def test_completely_mixed_qubit(self) -> None:
        """Test the completely mixed qubit has one bit."""
        assert von_neumann_entropy(DensityMatrix.maximally_mixed(2)) == pytest.approx(1.0)

    def test_completely_mixed_two_qubits(self) -> None:
        """Test the completely mixed two-qubit state has two bits."""
        assert von_neumann_entropy(DensityMatrix.maximally_mixed(4)) == pytest.approx(2.0)

    def test_equal_mixture_of_two_pure_states(self) -> None:
        """Test S(Phi0/2 + Phi1/2) = h((1 + cos 2a)/2) at a = 0.1."""
        alpha = 0.1
        phi0 = projector(ket(math.cos(alpha), math.sin(alpha))).entries
        phi1 = projector(ket(math.cos(alpha), -math.sin(alpha))).entries
        mixture = DensityMatrix(0.5 * phi0 + 0.5 * phi1)
        expected = binary_entropy((1 + math.cos(2 * alpha)) / 2)
        assert von_neumann_entropy(mixture) == pytest.approx(expected, abs=1e-12)

    def test_weighted_state_rejected(self) -> None:
        """Test entropy of an unnormalized state raises."""
        with pytest.raises(DomainError):
            von_neumann_entropy(DensityMatrix(np.diag([0.3, 0.3])))

    def test_binary_entropy_values(self) -> None:
        """Test h(1/2) = 1 and the endpoints are 0."""
        assert binary_entropy(0.5) == pytest.approx(1.0)
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0


class TestUnitaries:
    """Tests for unitary checks and application."""

    def test_identity_leaves_state_unchanged(self) -> None:
        """Test applying the identity returns the same amplitudes."""
        state = ket(0.6, 0.8j)
        np.testing.assert_array_equal(apply_unitary(np.eye(2), state).amplitudes, state.amplitudes)

    def test_norm_preserved(self) -> None:
        """Test a rotation keeps the state normalized."""
        rotation = np.array([[math.cos(0.4), -math.sin(0.4)], [math.sin(0.4), math.cos(0.4)]])
        result = apply_unitary(rotation, ket(0.6, 0.8))
        assert np.linalg.norm(result.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_non_unitary_rejected(self) -> None:
        """Test a shear is rejected."""
        with pytest.raises(NotUnitaryError):
            check_unitary(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_dimension_mismatch(self) -> None:
        """Test a 4 x 4 unitary on a qubit raises."""
        with pytest.raises(DimensionMismatchError):
            apply_unitary(np.eye(4), ket(1.0, 0.0))


class TestExpectationAndFidelity:
    """Tests for expectation and fidelity."""

    def test_expectation_of_pauli_z(self) -> None:
        """Test Tr(rho sigma_z) equals the Bloch z coordinate."""
        rho = density_from_bloch(BlochVector(0.1, 0.2, 0.3))
        assert expectation(rho, PAULI["z"]) == pytest.approx(0.3)

    def test_expectation_shape_mismatch(self) -> None:
        """Test an operator of the wrong shape raises."""
        with pytest.raises(DimensionMismatchError):
            expectation(DensityMatrix.maximally_mixed(2), np.eye(4))

    def test_fidelity_of_orthogonal_state(self) -> None:
        """Test <psi|rho|psi> vanishes for an orthogonal projector."""
        assert fidelity(ket(0.0, 1.0), projector(ket(1.0, 0.0))) == pytest.approx(0.0)
