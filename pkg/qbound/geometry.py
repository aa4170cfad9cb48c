"""Bloch-sphere bounding constructions for pairs of qubit mixed states.

Two qubit states with equal Bloch radius can be rotated into a canonical frame
where their Bloch vectors read (+x, 0, z) and (-x, 0, z). Each of them is
then written as a mixture

    rho_p = m * Phi_p + (1 - m) * chi

of a pure state Phi_p and an anchor chi shared by both labels. Any
distinguishability measure of the pure pair bounds that of the mixed pair,
so the ket half-angle beta of Phi_p (kets (cos beta, +-sin beta)) is the
argument for the pure-state information bound.

Two anchors are supported:
- CMS: the completely mixed state; Phi_p keeps the direction of rho_p.
- POLE: the pure "down z" state; Phi_p is where the ray from the south pole
  through rho_p exits the sphere.

Determinant note: det(rho) = (1 - |r|^2) / 4, so equal determinants and equal
Bloch radii are the same condition. Everything here keys on equal radii.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from qbound.exceptions import GeometryError
from qbound.states import (
    PAULI,
    SPECTRAL_TOL,
    BlochVector,
    DensityMatrix,
    RealArray,
    bloch_from_density,
    check_unitary,
)

logger = logging.getLogger(__name__)

# Largest accepted difference between the two Bloch radii
RADIUS_TOL = 1e-9

# Below this length a Bloch-space direction is treated as undefined
DIRECTION_EPS = 1e-12

SOUTH_POLE = np.array([0.0, 0.0, -1.0])


class Anchor(str, Enum):
    """Shared mixing state of the bounding decomposition."""

    CMS = "cms"  # completely mixed state, r = 0
    POLE = "pole"  # pure spin-down state, r = (0, 0, -1)


@dataclass(frozen=True, eq=False)
class CanonicalPair:
    """Two equal-radius qubit states in their symmetric frame.

    Attributes:
        x: Half the Bloch distance between the states (>= 0).
        z: Common coordinate along the symmetry axis (>= 0).
        radius: Common Bloch radius.
        frame: Rotation taking the input Bloch vectors to (+-x, 0, z).
    """

    x: float
    z: float
    radius: float
    frame: RealArray

    @property
    def distance(self) -> float:
        """Bloch distance 2x between the two states."""
        return 2.0 * self.x

    @property
    def mixed_angle(self) -> float:
        """Half-angle alpha of the mixed pair, tan(2 alpha) = x / z."""
        return 0.5 * math.atan2(self.x, self.z)

    def vector(self, label: int) -> RealArray:
        """Canonical Bloch vector of state ``label`` (0 -> +x, 1 -> -x)."""
        sign = 1.0 if label == 0 else -1.0
        return np.array([sign * self.x, 0.0, self.z])

    def input_vector(self, label: int) -> RealArray:
        """Bloch vector of input ``label`` in the original frame."""
        return self.frame.T @ self.vector(label)


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    """Output of a bounding decomposition rho_p = m Phi_p + (1 - m) chi.

    Attributes:
        m: Mixing weight of the pure states.
        phi0, phi1: Bounding pure states in the canonical frame.
        anchor: Shared state chi in the canonical frame.
        beta: Ket half-angle of phi0/phi1, in [0, pi/4].
        kind: Which anchor was used.
        frame: Canonical frame of the input pair.
    """

    m: float
    phi0: BlochVector
    phi1: BlochVector
    anchor: BlochVector
    beta: float
    kind: Anchor
    frame: RealArray

    def reconstruct(self, label: int) -> RealArray:
        """m * phi_label + (1 - m) * anchor, in the canonical frame."""
        phi = self.phi0 if label == 0 else self.phi1
        return self.m * phi.as_array() + (1.0 - self.m) * self.anchor.as_array()

    def reconstruct_input(self, label: int) -> RealArray:
        """The reconstruction rotated back to the input frame."""
        return self.frame.T @ self.reconstruct(label)


def _orthogonal_unit(direction: RealArray) -> RealArray:
    """Any unit vector orthogonal to ``direction``."""
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(direction)))] = 1.0
    orthogonal = np.cross(direction, axis)
    return orthogonal / np.linalg.norm(orthogonal)


def canonicalize_pair(rho0: DensityMatrix, rho1: DensityMatrix) -> CanonicalPair:
    """Rotate two equal-radius qubit states to (+x, 0, z) and (-x, 0, z).

    The z-axis points along r0 + r1 and the x-axis along r0 - r1; these are
    orthogonal exactly when the radii agree. When the states coincide the
    x-axis is an arbitrary unit vector orthogonal to the z-axis (no derived
    quantity depends on it); antipodal states get an arbitrary z-axis.

    Raises:
        GeometryError: If the radii differ by more than RADIUS_TOL, or both
            states are the completely mixed state.
    """
    r0 = bloch_from_density(rho0).as_array()
    r1 = bloch_from_density(rho1).as_array()
    radius0, radius1 = float(np.linalg.norm(r0)), float(np.linalg.norm(r1))
    if abs(radius0 - radius1) > RADIUS_TOL:
        raise GeometryError(
            "States must have equal Bloch radii",
            f"radii: {radius0!r}, {radius1!r}",
        )

    total, difference = r0 + r1, r0 - r1
    total_norm, difference_norm = float(np.linalg.norm(total)), float(np.linalg.norm(difference))
    if total_norm <= DIRECTION_EPS and difference_norm <= DIRECTION_EPS:
        raise GeometryError("Both states are completely mixed; no frame is defined")

    if total_norm > DIRECTION_EPS:
        z_axis = total / total_norm
        if difference_norm > DIRECTION_EPS:
            x_axis = difference - np.dot(difference, z_axis) * z_axis
            x_axis /= np.linalg.norm(x_axis)
        else:
            x_axis = _orthogonal_unit(z_axis)
    else:
        x_axis = difference / difference_norm
        z_axis = _orthogonal_unit(x_axis)

    y_axis = np.cross(z_axis, x_axis)
    frame = np.vstack([x_axis, y_axis, z_axis])
    frame.flags.writeable = False

    pair = CanonicalPair(
        x=0.5 * difference_norm,
        z=0.5 * total_norm,
        radius=0.5 * (radius0 + radius1),
        frame=frame,
    )
    logger.debug("Canonical pair x=%.17g z=%.17g radius=%.17g", pair.x, pair.z, pair.radius)
    return pair


def decompose_cms(pair: CanonicalPair) -> DecompositionResult:
    """Bound with the completely mixed anchor: Phi_p keeps the angle of rho_p.

    Raises:
        GeometryError: If the pair has zero radius.
    """
    length = math.hypot(pair.x, pair.z)
    if length <= DIRECTION_EPS:
        raise GeometryError("Completely mixed states have no direction to bound")
    return DecompositionResult(
        m=length,
        phi0=BlochVector(pair.x / length, 0.0, pair.z / length),
        phi1=BlochVector(-pair.x / length, 0.0, pair.z / length),
        anchor=BlochVector(0.0, 0.0, 0.0),
        beta=0.5 * math.atan2(pair.x, pair.z),
        kind=Anchor.CMS,
        frame=pair.frame,
    )


def _exit_point(point: RealArray) -> tuple[RealArray, float]:
    """Where the ray from the south pole through ``point`` leaves the sphere.

    Returns the exit point and the mixing weight m = |point - pole| / |exit - pole|.
    """
    chord = point - SOUTH_POLE
    length_sq = float(np.dot(chord, chord))
    if length_sq <= DIRECTION_EPS**2:
        raise GeometryError("State coincides with the spin-down anchor")
    scale = -2.0 * float(np.dot(SOUTH_POLE, chord)) / length_sq
    return SOUTH_POLE + scale * chord, 1.0 / scale


def decompose_pole(pair: CanonicalPair) -> DecompositionResult:
    """Bound with the spin-down anchor.

    Phi_p lies on the chord from the south pole through rho_p. By the
    inscribed-angle theorem its polar angle is twice the chord's angle at the
    pole, so beta = atan(x / (z + 1)), which is at most x whenever z >= 0.

    Raises:
        GeometryError: If a state coincides with the anchor.
    """
    phi0, m = _exit_point(pair.vector(0))
    phi1, _ = _exit_point(pair.vector(1))
    return DecompositionResult(
        m=m,
        phi0=BlochVector.from_array(phi0),
        phi1=BlochVector.from_array(phi1),
        anchor=BlochVector(0.0, 0.0, -1.0),
        beta=math.atan2(pair.x, pair.z + 1.0),
        kind=Anchor.POLE,
        frame=pair.frame,
    )


def decompose(pair: CanonicalPair, anchor: Anchor | str = Anchor.CMS) -> DecompositionResult:
    """Dispatch to the decomposition for ``anchor``."""
    if Anchor(anchor) is Anchor.CMS:
        return decompose_cms(pair)
    return decompose_pole(pair)


def rotation_from_unitary(unitary: npt.ArrayLike) -> RealArray:
    """SO(3) rotation R with U (r . sigma) U^dagger = (R r) . sigma."""
    matrix = check_unitary(unitary)
    paulis = [PAULI["x"], PAULI["y"], PAULI["z"]]
    rotation = np.empty((3, 3))
    for i, sigma_i in enumerate(paulis):
        for j, sigma_j in enumerate(paulis):
            rotation[i, j] = 0.5 * np.trace(sigma_i @ matrix @ sigma_j @ matrix.conj().T).real
    return rotation


def is_rotation(matrix: RealArray, tol: float = SPECTRAL_TOL) -> bool:
    """True for an orthogonal 3x3 matrix with determinant +1."""
    orthogonal = np.max(np.abs(matrix @ matrix.T - np.eye(3))) <= tol
    return bool(orthogonal and abs(np.linalg.det(matrix) - 1.0) <= tol)
