"""Symmetric collective attacks on the two-state and four-state schemes.

Eve attaches a two-dimensional probe in state (1, 0) to every transmitted
particle and applies the same weak unitary

    U = [[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]]

(c = cos gamma, s = sin gamma) to probe (x) particle. Joint states are ordered
Eve (x) Bob; it is the only ordering under which U maps Alice's ket
(cos theta, sin theta) to (cos theta, sin theta c, sin theta s, 0).

For each scheme this module derives:
- Bob's reduced states and the error rate the attack induces;
- Eve's information-dependent reduced states: conditioned on the public
  announcement of which particles Bob kept (two-state scheme) or on the
  announced basis (four-state scheme);
- the bounding half-angle beta of Eve's pair and the parity information bound.

The closed_form_* functions give the same quantities as explicit formulas;
they exist to cross-check the state pipeline.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from qbound.exceptions import DomainError
from qbound.geometry import CanonicalPair, canonicalize_pair, decompose_cms, decompose_pole
from qbound.parity import bm_bound, hamming_prefactor
from qbound.states import (
    BlochVector,
    ComplexArray,
    DensityMatrix,
    PositiveOperator,
    StateVector,
    apply_unitary,
    bloch_from_density,
    conditioned_reduced_state,
    expectation,
    ket,
    partial_trace,
    projector,
    tensor,
)

logger = logging.getLogger(__name__)

EVE, BOB = 0, 1
JOINT_DIMS = (2, 2)

PROBE_INITIAL = ket(1.0, 0.0)

# Bisection stops once the gamma bracket is this narrow
GAMMA_BRACKET_TOL = 1e-15


class SchemeKind(str, Enum):
    """Key distribution scheme under attack."""

    TWO_STATE = "b92"
    FOUR_STATE = "bb84"


class Basis(str, Enum):
    """Four-state measurement basis: x carries m in {0, 2}, y carries m in {1, 3}."""

    X = "x"
    Y = "y"


@dataclass(frozen=True)
class Scheme:
    """Alice's state set.

    Attributes:
        kind: Two-state or four-state scheme.
        theta: Two-state half-angle; Alice's kets are (cos theta, +-sin theta).
        basis: Four-state basis whose pair of states is analyzed.
    """

    kind: SchemeKind
    theta: float | None = None
    basis: Basis = Basis.X

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        object.__setattr__(self, "basis", Basis(self.basis))
        if self.kind is SchemeKind.TWO_STATE:
            if self.theta is None or not (0.0 < self.theta < math.pi / 4):
                raise DomainError("theta", self.theta, "Two-state theta must lie in (0, pi/4)")

    @classmethod
    def two_state(cls, theta: float) -> Scheme:
        return cls(SchemeKind.TWO_STATE, theta=theta)

    @classmethod
    def four_state(cls, basis: Basis | str = Basis.X) -> Scheme:
        return cls(SchemeKind.FOUR_STATE, basis=Basis(basis))

    @property
    def labels(self) -> tuple[int, int]:
        """The two labels whose Eve states form the analyzed pair."""
        if self.kind is SchemeKind.TWO_STATE:
            return (0, 1)
        return (0, 2) if self.basis is Basis.X else (1, 3)

    @property
    def valid_labels(self) -> tuple[int, ...]:
        return (0, 1) if self.kind is SchemeKind.TWO_STATE else (0, 1, 2, 3)

    def check_label(self, label: int) -> None:
        if label not in self.valid_labels:
            raise DomainError("label", label, f"Invalid label {label!r} for {self.kind.value}")

    def alice_ket(self, label: int) -> StateVector:
        """|phi_p> = (cos theta, +-sin theta) or |phi_m> = (1, i^m) / sqrt 2."""
        self.check_label(label)
        if self.kind is SchemeKind.TWO_STATE:
            assert self.theta is not None
            sign = 1.0 if label == 0 else -1.0
            return ket(math.cos(self.theta), sign * math.sin(self.theta))
        return ket(1.0 / math.sqrt(2.0), (1j**label) / math.sqrt(2.0))

    def conclusive_ket(self, label: int) -> StateVector:
        """Two-state |phi_p'>, orthogonal to Alice's |phi_p>."""
        if self.kind is not SchemeKind.TWO_STATE:
            raise DomainError("scheme", self.kind.value, "Conclusive kets exist only for b92")
        self.check_label(label)
        assert self.theta is not None
        sign = -1.0 if label == 0 else 1.0
        return ket(math.sin(self.theta), sign * math.cos(self.theta))


@dataclass(frozen=True)
class AttackParams:
    """Probe rotation angle together with the attacked scheme."""

    gamma: float
    scheme: Scheme

    def __post_init__(self) -> None:
        if not (0.0 <= self.gamma < math.pi / 2):
            raise DomainError("gamma", self.gamma, "gamma must lie in [0, pi/2)")


@dataclass(frozen=True)
class ErrorRates:
    """Joint wrong-outcome rate plus the conclusive-conditioned rate.

    ``p_e_conditional`` is None for the four-state scheme.
    """

    p_e: float
    p_e_conditional: float | None


@dataclass(frozen=True, eq=False)
class EveState:
    """Eve's reduced state for one label.

    Attributes:
        state: Normalized reduced state.
        weight: Probability of the conditioning information (1 when unconditioned).
    """

    state: DensityMatrix
    weight: float


def _check_gamma(gamma: float, upper_inclusive: bool = False) -> None:
    upper_ok = gamma <= math.pi / 2 if upper_inclusive else gamma < math.pi / 2
    if not (gamma >= 0.0 and upper_ok):
        raise DomainError("gamma", gamma, "gamma must lie in [0, pi/2)")


def probe_unitary(gamma: float) -> ComplexArray:
    """Eve's probe-particle interaction for rotation angle gamma."""
    _check_gamma(gamma, upper_inclusive=True)
    c, s = math.cos(gamma), math.sin(gamma)
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c, -s, 0.0],
            [0.0, s, c, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        dtype=np.complex128,
    )


def joint_final_state(scheme: Scheme, label: int, gamma: float) -> StateVector:
    """U applied to probe (x) Alice's ket, in Eve (x) Bob ordering."""
    initial = tensor(PROBE_INITIAL, scheme.alice_ket(label))
    assert isinstance(initial, StateVector)
    return apply_unitary(probe_unitary(gamma), initial)


def bob_reduced_state(scheme: Scheme, label: int, gamma: float) -> DensityMatrix:
    """Bob's state: Eve's probe traced out of the joint projector."""
    return partial_trace(projector(joint_final_state(scheme, label, gamma)), JOINT_DIMS, keep=BOB)


def _bob_outcome_probability(joint: StateVector, outcome: StateVector) -> float:
    """<Psi| I_E (x) |outcome><outcome| |Psi>."""
    bob_projector = np.kron(np.eye(2), projector(outcome).entries)
    return expectation(projector(joint), bob_projector)


def wrong_outcome_probability(scheme: Scheme, label: int, gamma: float) -> float:
    """Probability that Bob registers the wrong value for ``label``.

    Four-state: Bob measures in the sent state's basis and finds its
    orthogonal partner. Two-state: Bob finds phi_p' when phi_p was sent (no
    factor for the measurement choice, no conditioning on conclusiveness).
    """
    joint = joint_final_state(scheme, label, gamma)
    if scheme.kind is SchemeKind.FOUR_STATE:
        return _bob_outcome_probability(joint, scheme.alice_ket((label + 2) % 4))
    return _bob_outcome_probability(joint, scheme.conclusive_ket(label))


def right_outcome_probability(scheme: Scheme, label: int, gamma: float) -> float:
    """Two-state probability of the correct conclusive result for ``label``."""
    joint = joint_final_state(scheme, label, gamma)
    return _bob_outcome_probability(joint, scheme.conclusive_ket(1 - label))


def conclusive_probability(scheme: Scheme, label: int, gamma: float) -> float:
    """Two-state probability that Bob's result is conclusive.

    Each of Bob's two measurements is chosen with probability 1/2.
    """
    return 0.5 * (
        wrong_outcome_probability(scheme, label, gamma)
        + right_outcome_probability(scheme, label, gamma)
    )


def error_rate(scheme: Scheme, gamma: float) -> ErrorRates:
    """Error rate induced by the attack (identical for every label)."""
    _check_gamma(gamma, upper_inclusive=True)
    label = scheme.labels[0]
    wrong = wrong_outcome_probability(scheme, label, gamma)
    if scheme.kind is SchemeKind.FOUR_STATE:
        return ErrorRates(p_e=wrong, p_e_conditional=None)
    right = right_outcome_probability(scheme, label, gamma)
    return ErrorRates(p_e=wrong, p_e_conditional=wrong / (wrong + right))


def _conclusive_condition(scheme: Scheme) -> PositiveOperator:
    """(1/2)|phi_0'><phi_0'| + (1/2)|phi_1'><phi_1'| on Bob's particle."""
    return PositiveOperator.projector(scheme.conclusive_ket(0), 0.5) + PositiveOperator.projector(
        scheme.conclusive_ket(1), 0.5
    )


def eve_reduced_state(scheme: Scheme, label: int, gamma: float) -> EveState:
    """Eve's information-dependent reduced state.

    Four-state: the basis is public, so the plain partial trace over Bob.
    Two-state: Eve knows Bob's result was conclusive, so Bob's particle is
    traced against the conclusive-outcome operator instead of the identity.
    """
    joint = projector(joint_final_state(scheme, label, gamma))
    if scheme.kind is SchemeKind.FOUR_STATE:
        reduced = partial_trace(joint, JOINT_DIMS, keep=EVE)
    else:
        reduced = conditioned_reduced_state(joint, _conclusive_condition(scheme), JOINT_DIMS, keep=EVE)
    return EveState(state=reduced.normalized(), weight=reduced.weight)


def eve_weighted_state(scheme: Scheme, label: int, gamma: float) -> DensityMatrix:
    """Eve's information-dependent state before normalization."""
    eve = eve_reduced_state(scheme, label, gamma)
    return eve.state.scaled(eve.weight)


def eve_unconditioned_state(scheme: Scheme, label: int, gamma: float) -> DensityMatrix:
    """Eve's standard reduced state, ignoring all public information."""
    return partial_trace(projector(joint_final_state(scheme, label, gamma)), JOINT_DIMS, keep=EVE)


def closed_form_bob_state(scheme: Scheme, label: int, gamma: float) -> ComplexArray:
    """Bob's reduced state as an explicit formula."""
    scheme.check_label(label)
    cg, sg = math.cos(gamma), math.sin(gamma)
    if scheme.kind is SchemeKind.FOUR_STATE:
        phase = 1j**label
        return np.array(
            [
                [0.5 + 0.5 * sg**2, 0.5 * cg * np.conj(phase)],
                [0.5 * cg * phase, 0.5 - 0.5 * sg**2],
            ],
            dtype=np.complex128,
        )
    assert scheme.theta is not None
    ct, st = math.cos(scheme.theta), math.sin(scheme.theta)
    sign = 1.0 if label == 0 else -1.0
    return np.array(
        [
            [ct**2 + st**2 * sg**2, sign * ct * st * cg],
            [sign * ct * st * cg, st**2 * cg**2],
        ],
        dtype=np.complex128,
    )


def closed_form_eve_state(scheme: Scheme, label: int, gamma: float) -> ComplexArray:
    """Eve's information-dependent state as an explicit formula (unnormalized for b92)."""
    scheme.check_label(label)
    cg, sg = math.cos(gamma), math.sin(gamma)
    if scheme.kind is SchemeKind.FOUR_STATE:
        phase = 1j**label
        return np.array(
            [
                [0.5 + 0.5 * cg**2, 0.5 * sg * np.conj(phase)],
                [0.5 * sg * phase, 0.5 - 0.5 * cg**2],
            ],
            dtype=np.complex128,
        )
    assert scheme.theta is not None
    ct, st = math.cos(scheme.theta), math.sin(scheme.theta)
    sign = 1.0 if label == 0 else -1.0
    return np.array(
        [
            [st**2 * ct**2 + st**2 * ct**2 * cg**2, sign * ct * st**3 * sg],
            [sign * ct * st**3 * sg, st**4 * sg**2],
        ],
        dtype=np.complex128,
    )


def closed_form_error_rate(scheme: Scheme, gamma: float) -> float:
    """sin^2(gamma/2) for four-state; s^2 c^2 (1 - c_g)^2 + s^4 s_g^2 for two-state."""
    if scheme.kind is SchemeKind.FOUR_STATE:
        return math.sin(gamma / 2.0) ** 2
    assert scheme.theta is not None
    ct, st = math.cos(scheme.theta), math.sin(scheme.theta)
    cg, sg = math.cos(gamma), math.sin(gamma)
    return st**2 * ct**2 * (1.0 - cg) ** 2 + st**4 * sg**2


def closed_form_eve_coordinates(scheme: Scheme, gamma: float) -> tuple[float, float]:
    """Canonical (x, z) of Eve's normalized pair as explicit formulas."""
    cg, sg = math.cos(gamma), math.sin(gamma)
    if scheme.kind is SchemeKind.FOUR_STATE:
        return sg, cg**2
    assert scheme.theta is not None
    ct, st = math.cos(scheme.theta), math.sin(scheme.theta)
    trace = st**2 * ct**2 * (1.0 + cg**2) + st**4 * sg**2
    x = 2.0 * sg * ct * st**3 / trace
    z = (ct**2 * st**2 * (1.0 + cg**2) - st**4 * sg**2) / trace
    return x, z


@dataclass(frozen=True, eq=False)
class AttackAnalysis:
    """Everything derived from one attack at one string length.

    Attributes:
        params: The analyzed attack.
        n: String length used for ``bound_bits``.
        p_e: Joint wrong-outcome probability.
        p_e_conditional: Conclusive-conditioned error rate (two-state only).
        bob_states: Bob's reduced states for the analyzed labels.
        eve_states: Eve's normalized information-dependent states.
        eve_weights: Probabilities of Eve's conditioning information.
        pair: Canonical form of Eve's pair.
        beta: Bounding half-angle from the completely-mixed anchor.
        beta_pole: Bounding half-angle from the spin-down anchor.
        pe_bound: Four-state C(n) (4 p_e)^((n+1)/4), None for two-state.
    """

    params: AttackParams
    n: int
    p_e: float
    p_e_conditional: float | None
    bob_states: tuple[DensityMatrix, DensityMatrix]
    eve_states: tuple[DensityMatrix, DensityMatrix]
    eve_weights: tuple[float, float]
    pair: CanonicalPair
    beta: float
    beta_pole: float
    pe_bound: float | None = None
    labels: tuple[int, int] = field(default=(0, 1))

    @property
    def x(self) -> float:
        return self.pair.x

    @property
    def z(self) -> float:
        return self.pair.z

    @property
    def bound_bits(self) -> float:
        return self.bound(self.n)

    @property
    def bound_pole_bits(self) -> float:
        return bm_bound(self.n, self.beta_pole)

    def bound(self, n: int) -> float:
        """Parity information bound for string length ``n``."""
        return bm_bound(n, self.beta)

    def to_dict(self) -> dict[str, Any]:
        scheme = self.params.scheme
        return {
            "scheme": scheme.kind.value,
            "theta": scheme.theta,
            "basis": scheme.basis.value if scheme.kind is SchemeKind.FOUR_STATE else None,
            "gamma": self.params.gamma,
            "n": self.n,
            "p_e": self.p_e,
            "p_e_conditional": self.p_e_conditional,
            "x": self.x,
            "z": self.z,
            "beta": self.beta,
            "beta_pole": self.beta_pole,
            "bound_bits": self.bound_bits,
            "bound_pole_bits": self.bound_pole_bits,
            "pe_bound": self.pe_bound,
            "eve_weights": list(self.eve_weights),
        }


def analyze(params: AttackParams, n: int) -> AttackAnalysis:
    """Run the full attack pipeline and bound Eve's parity information.

    beta comes from the completely-mixed anchor decomposition of Eve's pair;
    the spin-down anchor result is reported alongside as ``beta_pole``.
    """
    scheme, gamma = params.scheme, params.gamma
    rates = error_rate(scheme, gamma)
    first, second = scheme.labels
    eve = (eve_reduced_state(scheme, first, gamma), eve_reduced_state(scheme, second, gamma))
    pair = canonicalize_pair(eve[0].state, eve[1].state)
    beta = decompose_cms(pair).beta
    beta_pole = decompose_pole(pair).beta

    pe_bound = None
    if scheme.kind is SchemeKind.FOUR_STATE:
        pe_bound = hamming_prefactor(n) * (4.0 * rates.p_e) ** ((n + 1) / 4.0)

    analysis = AttackAnalysis(
        params=params,
        n=n,
        p_e=rates.p_e,
        p_e_conditional=rates.p_e_conditional,
        bob_states=(
            bob_reduced_state(scheme, first, gamma),
            bob_reduced_state(scheme, second, gamma),
        ),
        eve_states=(eve[0].state, eve[1].state),
        eve_weights=(eve[0].weight, eve[1].weight),
        pair=pair,
        beta=beta,
        beta_pole=beta_pole,
        pe_bound=pe_bound,
        labels=(first, second),
    )
    logger.debug(
        "Analyzed %s gamma=%.17g: p_e=%.17g beta=%.17g bound=%.17g",
        scheme.kind.value,
        gamma,
        analysis.p_e,
        beta,
        analysis.bound_bits,
    )
    return analysis


def max_error_rate(scheme: Scheme) -> float:
    """Supremum of the error rate over gamma in [0, pi/2)."""
    return closed_form_error_rate(scheme, math.pi / 2)


def gamma_for_error_rate(scheme: Scheme, p_e_target: float) -> float:
    """Invert the (monotone) error rate by bisection on gamma.

    Raises:
        DomainError: If the target is negative or not attainable for gamma < pi/2.
    """
    ceiling = max_error_rate(scheme)
    if not (0.0 <= p_e_target < ceiling):
        raise DomainError(
            "p_e", p_e_target, f"Error rate must lie in [0, {ceiling!r}) for {scheme.kind.value}"
        )
    if p_e_target == 0.0:
        return 0.0

    low, high = 0.0, math.pi / 2
    for _ in range(200):
        if high - low <= GAMMA_BRACKET_TOL:
            break
        middle = 0.5 * (low + high)
        if error_rate(scheme, middle).p_e < p_e_target:
            low = middle
        else:
            high = middle
    best = min(
        (low, high), key=lambda g: abs(error_rate(scheme, g).p_e - p_e_target)
    )
    return min(best, math.nextafter(math.pi / 2, 0.0))


def eve_bloch_pair(analysis: AttackAnalysis) -> tuple[BlochVector, BlochVector]:
    """Bloch vectors of Eve's two normalized states."""
    return bloch_from_density(analysis.eve_states[0]), bloch_from_density(analysis.eve_states[1])
