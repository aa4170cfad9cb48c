"""Invariant suites run by ``qbound verify``.

Each suite is a list of checks. A check compares two independent computation
paths (a closed form against the state pipeline, a decomposition against its
input, a formula against a brute-force oracle) and records the worst
deviation it saw next to the tolerance it was held to. Every random choice is
drawn from a generator seeded by the caller, so a suite prints the same text
for the same seed.

Suites:
- formulas: closed forms against the pipeline, small-angle chains, bound
  consistency and exponential decay.
- geometry: decomposition reconstruction and frame invariance on random
  equal-radius qubit pairs.
- oracles: parity formulas against the Helstrom/search/Holevo oracles.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.stats import unitary_group

from qbound.attacks import (
    EVE,
    JOINT_DIMS,
    AttackParams,
    Scheme,
    analyze,
    bob_reduced_state,
    closed_form_bob_state,
    closed_form_error_rate,
    closed_form_eve_coordinates,
    closed_form_eve_state,
    error_rate,
    eve_reduced_state,
    eve_weighted_state,
    gamma_for_error_rate,
    joint_final_state,
    wrong_outcome_probability,
)
from qbound.config import DEFAULT_SEED, SEARCH_ITERATIONS
from qbound.exceptions import DomainError
from qbound.geometry import (
    canonicalize_pair,
    decompose_cms,
    decompose_pole,
    is_rotation,
    rotation_from_unitary,
)
from qbound.parity import bm_bound, hamming_prefactor, i_joint, info_report
from qbound.states import (
    BlochVector,
    DensityMatrix,
    PositiveOperator,
    bloch_from_density,
    conditioned_reduced_state,
    density_from_bloch,
    fidelity,
    ket,
    partial_trace,
    projector,
)

logger = logging.getLogger(__name__)

THETA_GRID = (math.pi / 12, math.pi / 8, math.pi / 6)
GAMMA_GRID = (0.05, 0.1, 0.2, 0.4)
SMALL_GAMMAS = (0.01, 0.02, 0.05)

ORACLE_BITS = (2, 3, 4)
ORACLE_ALPHAS = (0.2, 0.1, 0.05)

RANDOM_PAIRS = 1000
RANDOM_UNITARIES = 100

# Smallest Bloch radius drawn for random pairs; radius 0 has no frame
MIN_RANDOM_RADIUS = 0.05


class Suite(str, Enum):
    FORMULAS = "formulas"
    GEOMETRY = "geometry"
    ORACLES = "oracles"
    ALL = "all"


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check.

    Attributes:
        name: What was compared.
        passed: Whether ``worst`` stayed within ``tolerance``.
        worst: Largest deviation observed (or scaled deviation, see name).
        tolerance: Allowed deviation.
        detail: Extra context printed on failure.
    """

    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""

    @classmethod
    def within(cls, name: str, worst: float, tolerance: float, detail: str = "") -> CheckResult:
        return cls(name=name, passed=bool(worst <= tolerance), worst=worst, tolerance=tolerance, detail=detail)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name}: worst {self.worst:.3e} (tolerance {self.tolerance:.3e})"
        if self.detail and not self.passed:
            text += f" [{self.detail}]"
        return text


@dataclass
class SuiteResult:
    """Checks of one suite plus any table it printed."""

    name: str
    checks: list[CheckResult] = field(default_factory=list)
    table: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def lines(self) -> list[str]:
        output = [f"== {self.name} =="]
        output.extend(check.line() for check in self.checks)
        output.extend(self.table)
        return output


def _max_abs(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _closed_form_joint(scheme: Scheme, label: int, gamma: float) -> np.ndarray:
    cg, sg = math.cos(gamma), math.sin(gamma)
    if scheme.theta is not None:
        ct, st = math.cos(scheme.theta), math.sin(scheme.theta)
        sign = 1.0 if label == 0 else -1.0
        return np.array([ct, sign * st * cg, sign * st * sg, 0.0], dtype=np.complex128)
    phase = 1j**label
    return np.array([1.0, phase * cg, phase * sg, 0.0], dtype=np.complex128) / math.sqrt(2.0)


def _grid_schemes() -> list[Scheme]:
    return [Scheme.two_state(theta) for theta in THETA_GRID] + [Scheme.four_state()]


# Formulas suite


def check_closed_forms() -> CheckResult:
    """Joint states, Bob/Eve states, p_e and Eve's (x, z) against explicit formulas."""
    worst = 0.0
    for scheme in _grid_schemes():
        for gamma in GAMMA_GRID:
            for label in scheme.valid_labels:
                worst = max(
                    worst,
                    _max_abs(joint_final_state(scheme, label, gamma).amplitudes, _closed_form_joint(scheme, label, gamma)),
                    _max_abs(bob_reduced_state(scheme, label, gamma).entries, closed_form_bob_state(scheme, label, gamma)),
                    _max_abs(eve_weighted_state(scheme, label, gamma).entries, closed_form_eve_state(scheme, label, gamma)),
                )
            worst = max(worst, abs(error_rate(scheme, gamma).p_e - closed_form_error_rate(scheme, gamma)))
            analysis = analyze(AttackParams(gamma=gamma, scheme=scheme), 1)
            x, z = closed_form_eve_coordinates(scheme, gamma)
            worst = max(worst, abs(analysis.x - x), abs(analysis.z - z))
    return CheckResult.within("closed forms vs state pipeline", worst, 1e-12)


def check_four_state_error_rate() -> CheckResult:
    """Simulated wrong-outcome probability against sin^2(gamma/2) on 50 angles."""
    scheme = Scheme.four_state()
    gammas = np.linspace(0.0, math.pi / 2, 52)[1:-1]
    worst = max(
        abs(wrong_outcome_probability(scheme, label, float(g)) - math.sin(float(g) / 2.0) ** 2)
        for g in gammas
        for label in scheme.valid_labels
    )
    return CheckResult.within("four-state p_e vs sin^2(gamma/2)", worst, 1e-12)


def check_singlet_conditioning() -> CheckResult:
    """Conditioning one half of a singlet on (cos eta, sin eta) leaves (sin eta, -cos eta).

    Reported deviation is the larger of 1 - fidelity and |weight - 1/2|.
    """
    singlet = ket(0.0, 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0), 0.0)
    worst = 0.0
    for eta in np.linspace(0.0, math.pi, 20, endpoint=False):
        c, s = math.cos(float(eta)), math.sin(float(eta))
        condition = PositiveOperator.projector(ket(c, s))
        reduced = conditioned_reduced_state(singlet, condition, JOINT_DIMS, keep=EVE)
        expected = ket(s, -c)
        worst = max(worst, 1.0 - fidelity(expected, reduced.normalized()), abs(reduced.weight - 0.5))
    return CheckResult.within("singlet conditioned trace", worst, 1e-12)


def check_identity_condition() -> CheckResult:
    """The identity as condition reproduces the plain partial trace."""
    identity = PositiveOperator.identity(2)
    worst = 0.0
    for scheme in _grid_schemes():
        for gamma in GAMMA_GRID:
            for label in scheme.valid_labels:
                joint = projector(joint_final_state(scheme, label, gamma))
                conditioned = conditioned_reduced_state(joint, identity, JOINT_DIMS, keep=EVE)
                plain = partial_trace(joint, JOINT_DIMS, keep=EVE)
                worst = max(worst, _max_abs(conditioned.entries, plain.entries))
    return CheckResult.within("identity condition vs partial trace", worst, 1e-14)


def check_symmetry() -> CheckResult:
    """Equal p_e for all labels, equal Eve radii, and y-basis pair equal to the x-basis pair."""
    worst = 0.0
    for scheme in _grid_schemes():
        for gamma in GAMMA_GRID:
            rates = [wrong_outcome_probability(scheme, label, gamma) for label in scheme.valid_labels]
            worst = max(worst, max(rates) - min(rates))
            first, second = (eve_reduced_state(scheme, label, gamma).state for label in scheme.labels)
            worst = max(
                worst,
                abs(bloch_from_density(first).radius - bloch_from_density(second).radius),
            )
    for gamma in GAMMA_GRID:
        x_pair = analyze(AttackParams(gamma=gamma, scheme=Scheme.four_state("x")), 1)
        y_pair = analyze(AttackParams(gamma=gamma, scheme=Scheme.four_state("y")), 1)
        worst = max(worst, abs(x_pair.p_e - y_pair.p_e), abs(x_pair.x - y_pair.x), abs(x_pair.z - y_pair.z))
    return CheckResult.within("label and basis symmetry", worst, 1e-12)


def check_inverse_error_rate() -> list[CheckResult]:
    inverse = abs(gamma_for_error_rate(Scheme.four_state(), math.sin(0.1) ** 2) - 0.2)
    round_trip = 0.0
    for scheme in _grid_schemes():
        ceiling = closed_form_error_rate(scheme, math.pi / 2)
        for target in np.linspace(0.0, 0.9 * ceiling, 10):
            gamma = gamma_for_error_rate(scheme, float(target))
            round_trip = max(round_trip, abs(error_rate(scheme, gamma).p_e - float(target)))
    return [
        CheckResult.within("gamma for p_e = sin^2(0.1) vs 0.2", inverse, 1e-10),
        CheckResult.within("p_e -> gamma -> p_e round trip", round_trip, 1e-12),
    ]


def _scaled_check(
    name: str,
    points: list[tuple[float, float]],
    coefficient: float,
) -> CheckResult:
    """Check |deviation| <= coefficient * scale for (deviation, scale) pairs."""
    worst = max(abs(deviation) / scale for deviation, scale in points)
    return CheckResult.within(name, worst, coefficient)


def check_small_angle_chains() -> list[CheckResult]:
    four_state = Scheme.four_state()
    pe_gamma: list[tuple[float, float]] = []
    beta_gamma: list[tuple[float, float]] = []
    pe_beta: list[tuple[float, float]] = []
    for gamma in SMALL_GAMMAS:
        analysis = analyze(AttackParams(gamma=gamma, scheme=four_state), 1)
        pe_gamma.append((analysis.p_e - gamma**2 / 4.0, gamma**4))
        beta_gamma.append((analysis.beta - gamma / 2.0, gamma**3))
        pe_beta.append((analysis.p_e - analysis.beta**2, analysis.beta**4))

    two_pe: list[tuple[float, float]] = []
    two_beta: list[tuple[float, float]] = []
    two_chain: list[tuple[float, float]] = []
    for theta in THETA_GRID:
        st, ct = math.sin(theta), math.cos(theta)
        for gamma in SMALL_GAMMAS:
            analysis = analyze(AttackParams(gamma=gamma, scheme=Scheme.two_state(theta)), 1)
            two_pe.append((analysis.p_e - st**4 * gamma**2, gamma**4))
            two_beta.append((2.0 * analysis.beta - st / ct * gamma, gamma**3))
            two_chain.append((analysis.p_e - st**2 * ct**2 * (2.0 * analysis.beta) ** 2, gamma**4))

    return [
        _scaled_check("four-state |p_e - gamma^2/4| / gamma^4", pe_gamma, 1.0),
        _scaled_check("four-state |beta - gamma/2| / gamma^3", beta_gamma, 1.0),
        _scaled_check("four-state |p_e - beta^2| / beta^4", pe_beta, 8.0),
        _scaled_check("two-state |p_e - s^4 gamma^2| / gamma^4", two_pe, 1.0),
        _scaled_check("two-state |2 beta - (s/c) gamma| / gamma^3", two_beta, 5.0),
        _scaled_check("two-state |p_e - s^2 c^2 (2 beta)^2| / gamma^4", two_chain, 1.0),
    ]


def check_bound_consistency() -> CheckResult:
    """bm_bound(n, beta) against C(n) (4 p_e)^((n+1)/4), relative, scaled by gamma^2."""
    points = []
    for gamma in SMALL_GAMMAS:
        for n in (3, 7, 9):
            analysis = analyze(AttackParams(gamma=gamma, scheme=Scheme.four_state()), n)
            assert analysis.pe_bound is not None
            relative = abs(analysis.bound_bits - analysis.pe_bound) / analysis.bound_bits
            points.append((relative, gamma**2))
    return _scaled_check("four-state bound vs p_e bound / gamma^2", points, 5.0)


def _affine_residual(xs: list[float], ys: list[float]) -> float:
    slope, intercept = np.polyfit(xs, ys, 1)
    return float(np.max(np.abs(np.asarray(ys) - (slope * np.asarray(xs) + intercept))))


def check_exponential_decay() -> list[CheckResult]:
    lengths = [3, 5, 7, 9]
    logs = [math.log2(bm_bound(n, 0.1)) - 0.5 * math.log2(n + 1) for n in lengths]
    affine = _affine_residual([float(n) for n in lengths], logs)

    analysis = analyze(AttackParams(gamma=0.1, scheme=Scheme.four_state()), 3)
    step = 0.0
    for n in lengths[:-1]:
        prefactor = math.log(hamming_prefactor(n + 2) / hamming_prefactor(n))
        difference = math.log(analysis.bound(n + 2)) - math.log(analysis.bound(n)) - prefactor
        step = max(step, abs(difference - math.log(2.0 * analysis.beta)))

    ratio = min(i_joint(n, 0.05) / i_joint(n + 2, 0.05) for n in (2, 4, 6))
    return [
        CheckResult.within("log2 bm_bound affine in n at beta = 0.1", affine, 1e-9),
        CheckResult.within("bound ratio per two bits vs ln(2 beta)", step, 1e-9),
        CheckResult(
            name="smallest i_joint(n, 0.05) / i_joint(n + 2, 0.05), must be >= 100",
            passed=ratio >= 100.0,
            worst=ratio,
            tolerance=100.0,
        ),
    ]


def formulas_suite() -> SuiteResult:
    result = SuiteResult(Suite.FORMULAS.value)
    result.checks.append(check_closed_forms())
    result.checks.append(check_four_state_error_rate())
    result.checks.append(check_singlet_conditioning())
    result.checks.append(check_identity_condition())
    result.checks.append(check_symmetry())
    result.checks.extend(check_inverse_error_rate())
    result.checks.extend(check_small_angle_chains())
    result.checks.append(check_bound_consistency())
    result.checks.extend(check_exponential_decay())
    return result


# Geometry suite


def _random_direction(rng: np.random.Generator) -> np.ndarray:
    direction = rng.standard_normal(3)
    return direction / np.linalg.norm(direction)


def random_equal_radius_pair(rng: np.random.Generator) -> tuple[DensityMatrix, DensityMatrix]:
    """Two qubit states with a common random radius and independent directions."""
    radius = float(rng.uniform(MIN_RANDOM_RADIUS, 1.0))
    first = BlochVector.from_array(radius * _random_direction(rng))
    second = BlochVector.from_array(radius * _random_direction(rng))
    return density_from_bloch(first), density_from_bloch(second)


def _rotate(rho: DensityMatrix, unitary: np.ndarray) -> DensityMatrix:
    rotated = unitary @ rho.entries @ unitary.conj().T
    return DensityMatrix(0.5 * (rotated + rotated.conj().T))


def check_reconstruction(rng: np.random.Generator) -> list[CheckResult]:
    residual = 0.0
    cms_angle = 0.0
    pole_violation = 0.0
    for _ in range(RANDOM_PAIRS):
        rho0, rho1 = random_equal_radius_pair(rng)
        inputs = (bloch_from_density(rho0).as_array(), bloch_from_density(rho1).as_array())
        pair = canonicalize_pair(rho0, rho1)
        cms, pole = decompose_cms(pair), decompose_pole(pair)
        for label in (0, 1):
            residual = max(
                residual,
                _max_abs(cms.reconstruct_input(label), inputs[label]),
                _max_abs(pole.reconstruct_input(label), inputs[label]),
            )
        cms_angle = max(cms_angle, abs(cms.beta - 0.5 * math.atan2(pair.x, pair.z)))
        pole_violation = max(pole_violation, math.tan(pole.beta) - pair.x)
    return [
        CheckResult.within("decompositions reconstruct their inputs", residual, 1e-10),
        CheckResult.within("cms beta vs atan2(x, z)/2", cms_angle, 0.0),
        CheckResult.within("pole tan(beta) - x", pole_violation, 1e-15),
    ]


def check_frame_invariance(rng: np.random.Generator) -> list[CheckResult]:
    invariance = 0.0
    rotation = 0.0
    for _ in range(RANDOM_UNITARIES):
        rho0, rho1 = random_equal_radius_pair(rng)
        unitary = np.asarray(unitary_group.rvs(2, random_state=rng))
        moved0, moved1 = _rotate(rho0, unitary), _rotate(rho1, unitary)

        before, after = canonicalize_pair(rho0, rho1), canonicalize_pair(moved0, moved1)
        invariance = max(
            invariance,
            abs(before.x - after.x),
            abs(before.z - after.z),
            abs(decompose_cms(before).beta - decompose_cms(after).beta),
            abs(decompose_pole(before).beta - decompose_pole(after).beta),
        )

        matrix = rotation_from_unitary(unitary)
        deviation = _max_abs(matrix @ bloch_from_density(rho0).as_array(), bloch_from_density(moved0).as_array())
        rotation = max(rotation, deviation if is_rotation(matrix) else math.inf)
    return [
        CheckResult.within("canonical pair invariant under shared unitaries", invariance, 1e-10),
        CheckResult.within("unitary acts as SO(3) rotation on Bloch vectors", rotation, 1e-10),
    ]


def geometry_suite(seed: int = DEFAULT_SEED) -> SuiteResult:
    rng = np.random.default_rng(seed)
    result = SuiteResult(Suite.GEOMETRY.value)
    result.checks.extend(check_reconstruction(rng))
    result.checks.extend(check_frame_invariance(rng))
    return result


# Oracles suite


def oracles_suite(seed: int = DEFAULT_SEED, iterations: int = SEARCH_ITERATIONS) -> SuiteResult:
    """Parity formulas against the oracles, with the ratio table."""
    result = SuiteResult(Suite.ORACLES.value)
    result.table.append(
        f"{'n':>2} {'alpha':>6} {'i_joint':>12} {'helstrom':>12} {'search':>12} {'holevo':>12} {'search/i_joint':>15}"
    )
    sandwich = 0.0
    for n in ORACLE_BITS:
        deviations = []
        for alpha in ORACLE_ALPHAS:
            report = info_report(n, alpha, seed=seed, iterations=iterations)
            sandwich = max(
                sandwich,
                report.oracle_helstrom - report.oracle_search,
                report.oracle_search - report.oracle_holevo,
            )
            ratio = report.oracle_search / report.i_joint
            deviations.append(abs(ratio - 1.0))
            result.table.append(
                f"{n:>2} {alpha:>6.3f} {report.i_joint:>12.6e} {report.oracle_helstrom:>12.6e} "
                f"{report.oracle_search:>12.6e} {report.oracle_holevo:>12.6e} {ratio:>15.6f}"
            )
        increase = max(0.0, *(later - earlier for earlier, later in zip(deviations, deviations[1:])))
        result.checks.append(
            CheckResult.within(
                f"n={n} |search/i_joint - 1| non-increasing as alpha decreases",
                increase,
                0.0,
                detail=f"seed={seed}",
            )
        )
        result.checks.append(
            CheckResult.within(
                f"n={n} |search/i_joint - 1| at alpha={ORACLE_ALPHAS[-1]}",
                deviations[-1],
                0.15,
                detail=f"seed={seed}",
            )
        )
    result.checks.insert(
        0, CheckResult.within("helstrom <= search <= holevo", max(sandwich, 0.0), 1e-9, detail=f"seed={seed}")
    )
    return result


SUITES: dict[Suite, Callable[[int], SuiteResult]] = {
    Suite.FORMULAS: lambda seed: formulas_suite(),
    Suite.GEOMETRY: geometry_suite,
    Suite.ORACLES: oracles_suite,
}


def run_suites(suite: Suite | str, seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    """Run one suite, or every suite in a fixed order for ``all``."""
    try:
        selected = Suite(suite)
    except ValueError as e:
        raise DomainError("suite", suite, f"Unknown suite: {suite!r}") from e
    names = [Suite.FORMULAS, Suite.GEOMETRY, Suite.ORACLES] if selected is Suite.ALL else [selected]
    results = []
    for name in names:
        logger.info("Running %s suite (seed %d)", name.value, seed)
        outcome = SUITES[name](seed)
        logger.info("Suite %s: %s", name.value, "passed" if outcome.passed else "FAILED")
        results.append(outcome)
    return results
