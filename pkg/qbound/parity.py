"""Information on the parity bit of a string of non-orthogonal qubits.

Each bit b of an n-bit string is carried by psi_b = (cos alpha, +-sin alpha).
This module provides the closed-form information quantities for that setting
and brute-force oracles that validate them on explicit density matrices:

- i_separate / i_joint: optimal parity information for bit-by-bit and joint
  measurements.
- bm_bound: the Hamming-code bound C(n) (2 beta)^((n+1)/2) used as the final
  security bound.
- ehpp_angle: probe angle of the translucent attack without entanglement at a
  given error rate.
- build_parity_ensemble / helstrom_information / holevo_bound /
  accessible_info_search: the oracles.

All information values are in bits. The natural-log factors of the closed
forms are kept exactly as they appear in the formulas.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Any

import numpy as np
import numpy.typing as npt
import scipy.linalg
from scipy.stats import unitary_group

from qbound.config import DEFAULT_SEED, SEARCH_ITERATIONS
from qbound.exceptions import DimensionMismatchError, DomainError
from qbound.states import (
    ComplexArray,
    DensityMatrix,
    hermitian_eigensystem,
    von_neumann_entropy,
)

logger = logging.getLogger(__name__)

MAX_ENSEMBLE_BITS = 10

# Relative gap below which two eigenvalues belong to one degenerate cluster
DEGENERACY_RTOL = 1e-9

# Haar-random starting bases tried by the accessible-information search
RANDOM_STARTS = 8


def _check_bits(n: int, upper: int | None = None) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError("n", n, f"String length must be a positive integer, got {n!r}")
    if upper is not None and n > upper:
        raise DomainError("n", n, f"String length must be at most {upper}, got {n}")


def _check_angle(name: str, value: float) -> None:
    if not (0.0 <= value < math.pi / 4):
        raise DomainError(name, value, f"{name} must lie in [0, pi/4), got {value!r}")


def _check_prior(prior0: float) -> None:
    if not (0.0 < prior0 < 1.0):
        raise DomainError("prior0", prior0, f"Prior must lie in (0, 1), got {prior0!r}")


def _check_pair(rho0: DensityMatrix, rho1: DensityMatrix) -> None:
    if rho0.dim != rho1.dim:
        raise DimensionMismatchError("States have different dimensions", rho0.dim, rho1.dim)


def i_separate(n: int, alpha: float) -> float:
    """Parity information when every bit is measured on its own.

    I_S(n, alpha) = (2 alpha)^(2n) / (2 ln 2).
    """
    _check_bits(n)
    _check_angle("alpha", alpha)
    return (2.0 * alpha) ** (2 * n) / (2.0 * math.log(2.0))


def i_joint(n: int, alpha: float) -> float:
    """Parity information when all bits are measured together.

    I_M(n, alpha) = c * binom(2k, k) * alpha^(2k), with n = 2k, c = 1 for even
    n and n = 2k - 1, c = 1 / ln 2 for odd n.
    """
    _check_bits(n)
    _check_angle("alpha", alpha)
    if n % 2 == 0:
        k, c = n // 2, 1.0
    else:
        k, c = (n + 1) // 2, 1.0 / math.log(2.0)
    return c * math.comb(2 * k, k) * alpha ** (2 * k)


def hamming_prefactor(n: int) -> float:
    """C(n) = 2 sqrt(n + 1) / (ln 2 sqrt(pi))."""
    _check_bits(n)
    return 2.0 / (math.log(2.0) * math.sqrt(math.pi)) * math.sqrt(n + 1)


def bm_bound(n: int, beta: float) -> float:
    """Hamming-code bound on parity information: C(n) (2 beta)^((n+1)/2)."""
    _check_angle("beta", beta)
    return hamming_prefactor(n) * (2.0 * beta) ** ((n + 1) / 2.0)


def ehpp_angle(theta: float, p_e: float) -> float:
    """Probe half-angle (tan^2(2 theta) p_e)^(1/4) of the attack without entanglement."""
    if not (0.0 < theta < math.pi / 4):
        raise DomainError("theta", theta, f"theta must lie in (0, pi/4), got {theta!r}")
    if not (0.0 <= p_e < 1.0):
        raise DomainError("p_e", p_e, f"Error rate must lie in [0, 1), got {p_e!r}")
    return (math.tan(2.0 * theta) ** 2 * p_e) ** 0.25


def ehpp_information_bound(theta: float, p_e: float, n: int) -> float:
    """bm_bound evaluated at the ehpp_angle; scales as p_e^((n+1)/8)."""
    return bm_bound(n, ehpp_angle(theta, p_e))


@dataclass(frozen=True, eq=False)
class ParityEnsemble:
    """Uniform mixtures over the even- and odd-parity n-bit strings.

    Attributes:
        n: Number of bits.
        alpha: Bit-ket half-angle.
        rho_even: Mixture over strings with an even number of ones.
        rho_odd: Mixture over strings with an odd number of ones.
    """

    n: int
    alpha: float
    rho_even: DensityMatrix
    rho_odd: DensityMatrix

    @property
    def dim(self) -> int:
        return self.rho_even.dim

    def relabeled(self) -> ParityEnsemble:
        """Ensemble with psi_0 and psi_1 swapped on every bit."""
        psi0, psi1 = _bit_kets(self.alpha)
        rho_even, rho_odd = _parity_mixtures(self.n, psi1, psi0)
        return ParityEnsemble(self.n, self.alpha, rho_even, rho_odd)


def _bit_kets(alpha: float) -> tuple[ComplexArray, ComplexArray]:
    c, s = math.cos(alpha), math.sin(alpha)
    return (
        np.array([c, s], dtype=np.complex128),
        np.array([c, -s], dtype=np.complex128),
    )


def _parity_mixtures(
    n: int, psi0: ComplexArray, psi1: ComplexArray
) -> tuple[DensityMatrix, DensityMatrix]:
    kets = (psi0, psi1)
    columns: dict[int, list[ComplexArray]] = {0: [], 1: []}
    for bits in itertools.product((0, 1), repeat=n):
        columns[sum(bits) % 2].append(reduce(np.kron, (kets[b] for b in bits)))
    mixtures = []
    for parity in (0, 1):
        stacked = np.column_stack(columns[parity])
        mixtures.append(DensityMatrix(stacked @ stacked.conj().T / stacked.shape[1]))
    return mixtures[0], mixtures[1]


def build_parity_ensemble(n: int, alpha: float) -> ParityEnsemble:
    """Parity ensemble for n bits (n <= 10, so dim 2^n <= 1024)."""
    _check_bits(n, MAX_ENSEMBLE_BITS)
    if not (0.0 <= alpha < math.pi / 2):
        raise DomainError("alpha", alpha, f"alpha must lie in [0, pi/2), got {alpha!r}")
    psi0, psi1 = _bit_kets(alpha)
    rho_even, rho_odd = _parity_mixtures(n, psi0, psi1)
    logger.debug("Built parity ensemble n=%d alpha=%.17g", n, alpha)
    return ParityEnsemble(n=n, alpha=alpha, rho_even=rho_even, rho_odd=rho_odd)


def _information(prior0: float, likelihood0: npt.NDArray[Any], likelihood1: npt.NDArray[Any]) -> float:
    """Mutual information between a binary label and measurement outcomes."""
    q0 = np.clip(np.asarray(likelihood0, dtype=np.float64), 0.0, None)
    q1 = np.clip(np.asarray(likelihood1, dtype=np.float64), 0.0, None)
    marginal = prior0 * q0 + (1.0 - prior0) * q1
    total = 0.0
    for prior, q in ((prior0, q0), (1.0 - prior0, q1)):
        mask = (q > 0.0) & (marginal > 0.0)
        total += float(np.sum(prior * q[mask] * np.log2(q[mask] / marginal[mask])))
    return max(total, 0.0)


def mutual_information(
    rho0: DensityMatrix, rho1: DensityMatrix, prior0: float, basis: ComplexArray
) -> float:
    """Label/outcome mutual information of the projective measurement ``basis``.

    Args:
        basis: Orthonormal measurement vectors as columns.
    """
    _check_pair(rho0, rho1)
    _check_prior(prior0)
    q0 = np.einsum("ik,ij,jk->k", basis.conj(), rho0.entries, basis).real
    q1 = np.einsum("ik,ij,jk->k", basis.conj(), rho1.entries, basis).real
    return _information(prior0, q0, q1)


def _helstrom_difference(rho0: DensityMatrix, rho1: DensityMatrix, prior0: float) -> ComplexArray:
    return prior0 * rho0.entries - (1.0 - prior0) * rho1.entries


def _zero_tolerance(values: npt.NDArray[np.float64]) -> float:
    return DEGENERACY_RTOL * float(np.max(np.abs(values))) if values.size else 0.0


def helstrom_information(rho0: DensityMatrix, rho1: DensityMatrix, prior0: float = 0.5) -> float:
    """Information of the two-outcome Helstrom measurement.

    The outcomes are the projectors onto the non-negative and negative
    eigenspaces of prior0 rho0 - (1 - prior0) rho1; (numerically) zero
    eigenvalues go to the first outcome.
    """
    _check_pair(rho0, rho1)
    _check_prior(prior0)
    system = hermitian_eigensystem(_helstrom_difference(rho0, rho1, prior0))
    positive = system.values >= -_zero_tolerance(system.values)
    projectors = [system.projector(positive), system.projector(~positive)]
    q0 = np.array([np.trace(rho0.entries @ p).real for p in projectors])
    q1 = np.array([np.trace(rho1.entries @ p).real for p in projectors])
    return _information(prior0, q0, q1)


def holevo_bound(rho0: DensityMatrix, rho1: DensityMatrix, prior0: float = 0.5) -> float:
    """S(p rho0 + (1-p) rho1) - p S(rho0) - (1-p) S(rho1), in bits."""
    _check_pair(rho0, rho1)
    _check_prior(prior0)
    average = DensityMatrix(prior0 * rho0.entries + (1.0 - prior0) * rho1.entries)
    chi = (
        von_neumann_entropy(average)
        - prior0 * von_neumann_entropy(rho0)
        - (1.0 - prior0) * von_neumann_entropy(rho1)
    )
    return max(chi, 0.0)


def refined_helstrom_basis(rho0: DensityMatrix, rho1: DensityMatrix, prior0: float) -> ComplexArray:
    """Eigenbasis of the Helstrom operator, split further by the average state.

    Inside every degenerate eigenspace of prior0 rho0 - (1 - prior0) rho1 the
    basis diagonalizes the average state, so states that differ only in
    weight are resolved into separate outcomes. Measuring this basis is a
    refinement of the Helstrom measurement, hence never less informative.
    """
    system = hermitian_eigensystem(_helstrom_difference(rho0, rho1, prior0))
    average = prior0 * rho0.entries + (1.0 - prior0) * rho1.entries
    tol = max(_zero_tolerance(system.values), np.finfo(np.float64).tiny)
    vectors = system.vectors.copy()
    start = 0
    while start < len(system.values):
        stop = start + 1
        while stop < len(system.values) and system.values[start] - system.values[stop] <= tol:
            stop += 1
        if stop - start > 1:
            block = vectors[:, start:stop]
            restricted = block.conj().T @ average @ block
            _, rotation = scipy.linalg.eigh(0.5 * (restricted + restricted.conj().T))
            vectors[:, start:stop] = block @ rotation
        start = stop
    return vectors


def _random_hermitian(rng: np.random.Generator, dim: int) -> ComplexArray:
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    hermitian = 0.5 * (raw + raw.conj().T)
    return hermitian / np.linalg.norm(hermitian)


def accessible_info_search(
    rho0: DensityMatrix,
    rho1: DensityMatrix,
    prior0: float = 0.5,
    seed: int = DEFAULT_SEED,
    iterations: int = SEARCH_ITERATIONS,
) -> float:
    """Best label/outcome information over searched projective measurements.

    Candidates are the refined Helstrom basis, the eigenbasis of the average
    state and Haar-random bases; the best one is then improved by random
    local unitary steps, accepting only improvements. Deterministic for a
    given seed.
    """
    _check_pair(rho0, rho1)
    _check_prior(prior0)
    rng = np.random.default_rng(seed)
    dim = rho0.dim

    average = prior0 * rho0.entries + (1.0 - prior0) * rho1.entries
    candidates = [
        refined_helstrom_basis(rho0, rho1, prior0),
        hermitian_eigensystem(average).vectors,
    ]
    if dim > 1:
        candidates.extend(
            np.asarray(unitary_group.rvs(dim, random_state=rng)) for _ in range(RANDOM_STARTS)
        )

    scores = [mutual_information(rho0, rho1, prior0, basis) for basis in candidates]
    best_index = int(np.argmax(scores))
    best, best_score = candidates[best_index], scores[best_index]

    step = 0.1
    stalled = 0
    for _ in range(iterations if dim > 1 else 0):
        move = scipy.linalg.expm(1j * step * _random_hermitian(rng, dim))
        trial = move @ best
        score = mutual_information(rho0, rho1, prior0, trial)
        if score > best_score:
            best, best_score = trial, score
            stalled = 0
        else:
            stalled += 1
            if stalled >= 20:
                step *= 0.5
                stalled = 0
    logger.debug("Accessible-information search: start=%d best=%.17g", best_index, best_score)
    return best_score


@dataclass(frozen=True)
class InfoReport:
    """Closed-form parity information next to its oracle values, in bits."""

    n: int
    alpha: float
    i_separate: float
    i_joint: float
    bm_bound: float
    oracle_helstrom: float
    oracle_search: float
    oracle_holevo: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "i_separate": self.i_separate,
            "i_joint": self.i_joint,
            "bm_bound": self.bm_bound,
            "oracle_helstrom": self.oracle_helstrom,
            "oracle_search": self.oracle_search,
            "oracle_holevo": self.oracle_holevo,
        }


def info_report(
    n: int,
    alpha: float,
    seed: int = DEFAULT_SEED,
    iterations: int = SEARCH_ITERATIONS,
) -> InfoReport:
    """Evaluate every formula and oracle for the (n, alpha) parity ensemble."""
    ensemble = build_parity_ensemble(n, alpha)
    even, odd = ensemble.rho_even, ensemble.rho_odd
    return InfoReport(
        n=n,
        alpha=alpha,
        i_separate=i_separate(n, alpha),
        i_joint=i_joint(n, alpha),
        bm_bound=bm_bound(n, alpha),
        oracle_helstrom=helstrom_information(even, odd, 0.5),
        oracle_search=accessible_info_search(even, odd, 0.5, seed=seed, iterations=iterations),
        oracle_holevo=holevo_bound(even, odd, 0.5),
    )
