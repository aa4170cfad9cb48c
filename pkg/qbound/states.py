"""Dense complex linear algebra for small quantum systems.

This module implements the state-level toolkit everything else is built on:
- StateVector / DensityMatrix / PositiveOperator / BlochVector value types
- tensor products with the first operand as the most significant factor
- partial traces and information-dependent (conditioned) reduced states
- Bloch-vector conversions for qubits
- Hermitian eigensystems, von Neumann entropy, unitary application

Joint states in this package always order the eavesdropper's probe as the
first (leftmost) factor and the receiver's particle as the second, so a
two-qubit amplitude index is ``2 * eve + bob``.

All values are immutable after construction: their arrays are copied and
marked read-only, so they are safe to share between threads.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

from qbound.exceptions import (
    BlochRadiusError,
    DimensionMismatchError,
    DomainError,
    NotHermitianError,
    NotPositiveError,
    NotUnitaryError,
    StateError,
)

logger = logging.getLogger(__name__)

# Tolerance for algebraic identities (norms, traces, hermiticity, positivity)
ALGEBRA_TOL = 1e-12

# Tolerance for spectral reconstructions
SPECTRAL_TOL = 1e-10

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]

PAULI = {
    "i": np.eye(2, dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def _frozen(array: npt.ArrayLike) -> ComplexArray:
    """Copy into a read-only complex128 array."""
    result = np.array(array, dtype=np.complex128, copy=True)
    result.flags.writeable = False
    return result


def _square(entries: ComplexArray, what: str) -> None:
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] == 0:
        raise DimensionMismatchError(f"{what} must be a non-empty square matrix", actual=entries.shape)


def _check_hermitian(entries: ComplexArray, tol: float = ALGEBRA_TOL) -> None:
    deviation = float(np.max(np.abs(entries - entries.conj().T)))
    if deviation > tol:
        raise NotHermitianError(deviation=deviation)


def _check_positive(entries: ComplexArray, tol: float = ALGEBRA_TOL) -> None:
    lowest = float(scipy.linalg.eigvalsh(entries)[0])
    if lowest < -tol:
        raise NotPositiveError(min_eigenvalue=lowest)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state in a d-dimensional Hilbert space.

    Attributes:
        amplitudes: Complex amplitude vector of unit norm.
    """

    amplitudes: ComplexArray

    def __post_init__(self) -> None:
        amplitudes = _frozen(self.amplitudes)
        if amplitudes.ndim != 1 or amplitudes.size == 0:
            raise DimensionMismatchError("State vector must be one-dimensional", actual=amplitudes.shape)
        norm_sq = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm_sq - 1.0) > ALGEBRA_TOL:
            raise StateError("State vector is not normalized", f"squared norm: {norm_sq!r}")
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    @classmethod
    def normalize(cls, amplitudes: npt.ArrayLike) -> StateVector:
        """Build a state from unnormalized amplitudes."""
        vector = np.asarray(amplitudes, dtype=np.complex128)
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise StateError("Cannot normalize the zero vector")
        return cls(vector / norm)

    def inner(self, other: StateVector) -> complex:
        """Return the overlap <self|other>."""
        if other.dim != self.dim:
            raise DimensionMismatchError("Overlap of states with different dimensions", self.dim, other.dim)
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian positive operator with trace in (0, 1].

    Traces at or below ALGEBRA_TOL are rejected as zero. Normalized states have weight 1. Conditioned (information-dependent)
    states keep the probability of the condition as their weight; call
    ``normalized()`` to renormalize explicitly.

    Attributes:
        entries: dim x dim complex matrix.
    """

    entries: ComplexArray

    def __post_init__(self) -> None:
        entries = _frozen(self.entries)
        _square(entries, "Density matrix")
        _check_hermitian(entries)
        _check_positive(entries)
        weight = float(np.trace(entries).real)
        if weight <= ALGEBRA_TOL:
            raise StateError("Density matrix has zero weight", f"trace: {weight!r}")
        if weight > 1.0 + ALGEBRA_TOL:
            raise StateError("Density matrix trace exceeds 1", f"trace: {weight!r}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_state(cls, state: StateVector) -> DensityMatrix:
        """Return the projector |psi><psi|."""
        return cls(np.outer(state.amplitudes, state.amplitudes.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> DensityMatrix:
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def weight(self) -> float:
        """Trace of the matrix: 1 for normalized states."""
        return float(np.trace(self.entries).real)

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.entries).real)

    @property
    def purity(self) -> float:
        """Tr(rho^2) of the normalized state."""
        normalized = self.entries / self.weight
        return float(np.trace(normalized @ normalized).real)

    def is_normalized(self, tol: float = ALGEBRA_TOL) -> bool:
        return abs(self.weight - 1.0) <= tol

    def is_pure(self, tol: float = SPECTRAL_TOL) -> bool:
        """True when the normalized state satisfies rho^2 = rho."""
        normalized = self.entries / self.weight
        return bool(np.max(np.abs(normalized @ normalized - normalized)) <= tol)

    def normalized(self) -> DensityMatrix:
        return DensityMatrix(self.entries / self.weight)

    def scaled(self, factor: float) -> DensityMatrix:
        return DensityMatrix(self.entries * factor)


@dataclass(frozen=True, eq=False)
class PositiveOperator:
    """Hermitian positive-semidefinite operator without a trace constraint."""

    entries: ComplexArray

    def __post_init__(self) -> None:
        entries = _frozen(self.entries)
        _square(entries, "Positive operator")
        _check_hermitian(entries)
        _check_positive(entries)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def identity(cls, dim: int) -> PositiveOperator:
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def projector(cls, state: StateVector, weight: float = 1.0) -> PositiveOperator:
        return cls(weight * np.outer(state.amplitudes, state.amplitudes.conj()))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def __add__(self, other: PositiveOperator) -> PositiveOperator:
        if other.dim != self.dim:
            raise DimensionMismatchError("Sum of operators with different dimensions", self.dim, other.dim)
        return PositiveOperator(self.entries + other.entries)


@dataclass(frozen=True)
class BlochVector:
    """Real 3-vector r of a qubit state rho = (I + r . sigma) / 2."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        radius = float(np.sqrt(self.x**2 + self.y**2 + self.z**2))
        if radius * radius > 1.0 + ALGEBRA_TOL:
            raise BlochRadiusError(radius)

    @classmethod
    def from_array(cls, values: npt.ArrayLike) -> BlochVector:
        x, y, z = (float(v) for v in np.asarray(values, dtype=np.float64))
        return cls(x, y, z)

    def as_array(self) -> RealArray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.as_array()))


Operand = Union[StateVector, DensityMatrix]


def ket(*amplitudes: complex) -> StateVector:
    """Shorthand for a normalized StateVector from explicit amplitudes."""
    return StateVector(np.array(amplitudes, dtype=np.complex128))


def projector(state: StateVector) -> DensityMatrix:
    return DensityMatrix.from_state(state)


def tensor(a: Operand, b: Operand) -> Operand:
    """Kronecker product with ``a`` as the most significant factor.

    Two state vectors give a state vector; if either operand is a density
    matrix the result is the density matrix of the product state.
    """
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    left = DensityMatrix.from_state(a) if isinstance(a, StateVector) else a
    right = DensityMatrix.from_state(b) if isinstance(b, StateVector) else b
    return DensityMatrix(np.kron(left.entries, right.entries))


def _as_density(rho: Operand) -> DensityMatrix:
    return DensityMatrix.from_state(rho) if isinstance(rho, StateVector) else rho


def _check_factors(rho: DensityMatrix, dims: Sequence[int], keep: int) -> tuple[int, int]:
    if len(dims) != 2 or any(d < 1 for d in dims):
        raise DimensionMismatchError("Factor dimensions must be two positive integers", actual=tuple(dims))
    if keep not in (0, 1):
        raise DomainError("keep", keep, "Subsystem selector must be 0 (first) or 1 (second)")
    d_a, d_b = int(dims[0]), int(dims[1])
    if d_a * d_b != rho.dim:
        raise DimensionMismatchError("Factor dimensions do not match the state", rho.dim, d_a * d_b)
    return d_a, d_b


def partial_trace(rho: Operand, dims: Sequence[int] = (2, 2), keep: int = 1) -> DensityMatrix:
    """Reduced state of one factor of a bipartite state.

    Implements rho_{nm} = sum_mu rho_{n mu, m mu} for the kept factor. The
    weight of ``rho`` is preserved.

    Args:
        rho: Joint state on d_A (x) d_B.
        dims: (d_A, d_B).
        keep: 0 keeps the first factor, 1 keeps the second.
    """
    state = _as_density(rho)
    d_a, d_b = _check_factors(state, dims, keep)
    blocks = state.entries.reshape(d_a, d_b, d_a, d_b)
    if keep == 0:
        reduced = np.trace(blocks, axis1=1, axis2=3)
    else:
        reduced = np.trace(blocks, axis1=0, axis2=2)
    return DensityMatrix(reduced)


def conditioned_reduced_state(
    rho: Operand,
    condition: PositiveOperator,
    dims: Sequence[int] = (2, 2),
    keep: int = 0,
) -> DensityMatrix:
    """Information-dependent reduced state Tr_traced[rho (A on traced factor)].

    The positive operator ``condition`` acts on the factor being traced out.
    The result keeps the probability mass of the condition as its weight; with
    the identity as condition this is exactly ``partial_trace``.

    Raises:
        DimensionMismatchError: If ``condition`` does not act on the traced factor.
        DomainError: If the condition has zero probability or carries more than
            unit probability.
    """
    state = _as_density(rho)
    d_a, d_b = _check_factors(state, dims, keep)
    traced_dim = d_b if keep == 0 else d_a
    if condition.dim != traced_dim:
        raise DimensionMismatchError(
            "Condition must act on the traced subsystem", traced_dim, condition.dim
        )
    blocks = state.entries.reshape(d_a, d_b, d_a, d_b)
    if keep == 0:
        reduced = np.einsum("ibjc,cb->ij", blocks, condition.entries)
    else:
        reduced = np.einsum("ibjc,ji->bc", blocks, condition.entries)
    weight = float(np.trace(reduced).real)
    if weight <= ALGEBRA_TOL:
        raise DomainError("condition", weight, "Condition has zero probability on this state")
    if weight > 1.0 + ALGEBRA_TOL:
        raise DomainError("condition", weight, "Condition operator carries probability above 1")
    logger.debug("Conditioned reduced state weight %.17g", weight)
    return DensityMatrix(reduced)


def bloch_from_density(rho: DensityMatrix) -> BlochVector:
    """Bloch vector (x, y, z) of a normalized qubit state."""
    if rho.dim != 2:
        raise DimensionMismatchError("Bloch vectors exist only for qubits", 2, rho.dim)
    if not rho.is_normalized():
        raise DomainError("weight", rho.weight, "Bloch conversion requires a normalized state")
    entries = rho.entries
    return BlochVector(
        x=float(2.0 * entries[1, 0].real),
        y=float(2.0 * entries[1, 0].imag),
        z=float((entries[0, 0] - entries[1, 1]).real),
    )


def density_from_bloch(r: BlochVector) -> DensityMatrix:
    """Qubit state (I + r . sigma) / 2."""
    return DensityMatrix(
        0.5 * (PAULI["i"] + r.x * PAULI["x"] + r.y * PAULI["y"] + r.z * PAULI["z"])
    )


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Spectral decomposition H = sum_i values[i] v_i v_i^dagger.

    Attributes:
        values: Real eigenvalues, sorted descending.
        vectors: Orthonormal eigenvectors as columns, in the order of values.
    """

    values: RealArray
    vectors: ComplexArray

    def reconstruct(self) -> ComplexArray:
        return (self.vectors * self.values) @ self.vectors.conj().T

    def projector(self, mask: npt.NDArray[np.bool_]) -> ComplexArray:
        """Spectral projector onto the eigenvectors selected by ``mask``."""
        chosen = self.vectors[:, mask]
        return chosen @ chosen.conj().T


def hermitian_eigensystem(
    matrix: npt.ArrayLike | DensityMatrix | PositiveOperator,
) -> Eigensystem:
    """Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.

    Raises:
        NotHermitianError: If the input differs from its adjoint beyond tolerance.
    """
    if isinstance(matrix, (DensityMatrix, PositiveOperator)):
        entries = np.asarray(matrix.entries)
    else:
        entries = np.asarray(matrix, dtype=np.complex128)
    _square(entries, "Matrix")
    _check_hermitian(entries)
    hermitian = 0.5 * (entries + entries.conj().T)
    values, vectors = scipy.linalg.eigh(hermitian)
    order = np.argsort(values, kind="stable")[::-1]
    return Eigensystem(values=values[order].astype(np.float64), vectors=vectors[:, order])


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy -sum lambda log2 lambda in bits, with 0 log 0 = 0."""
    if not rho.is_normalized(SPECTRAL_TOL):
        raise DomainError("weight", rho.weight, "Entropy requires a normalized state")
    eigenvalues = scipy.linalg.eigvalsh(rho.entries)
    positive = eigenvalues[eigenvalues > 0.0]
    entropy = float(-np.sum(positive * np.log2(positive)))
    return min(max(entropy, 0.0), float(np.log2(rho.dim)))


def binary_entropy(p: float) -> float:
    """h(p) = -p log2 p - (1-p) log2 (1-p)."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def check_unitary(matrix: npt.ArrayLike, tol: float = ALGEBRA_TOL) -> ComplexArray:
    """Return ``matrix`` as a complex array after verifying U^dagger U = I."""
    unitary = np.asarray(matrix, dtype=np.complex128)
    _square(unitary, "Unitary")
    deviation = float(np.max(np.abs(unitary.conj().T @ unitary - np.eye(unitary.shape[0]))))
    if deviation > tol:
        raise NotUnitaryError(deviation=deviation)
    return unitary


def apply_unitary(unitary: npt.ArrayLike, state: StateVector) -> StateVector:
    """Return U|psi>."""
    matrix = check_unitary(unitary)
    if matrix.shape[0] != state.dim:
        raise DimensionMismatchError("Unitary and state dimensions differ", matrix.shape[0], state.dim)
    return StateVector(matrix @ state.amplitudes)


def expectation(rho: DensityMatrix, operator: npt.ArrayLike | PositiveOperator) -> float:
    """Real part of Tr(rho A)."""
    entries = operator.entries if isinstance(operator, PositiveOperator) else np.asarray(operator)
    if entries.shape != rho.entries.shape:
        raise DimensionMismatchError("Operator shape differs from state", rho.entries.shape, entries.shape)
    return float(np.trace(rho.entries @ entries).real)


def fidelity(state: StateVector, rho: DensityMatrix) -> float:
    """<psi|rho|psi> for a normalized rho."""
    if state.dim != rho.dim:
        raise DimensionMismatchError("Fidelity of objects with different dimensions", state.dim, rho.dim)
    return float(np.vdot(state.amplitudes, rho.entries @ state.amplitudes).real)
