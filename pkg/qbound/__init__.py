"""qbound - Eavesdropper information bounds for collective attacks on BB84 and B92."""

from qbound.attacks import AttackAnalysis, AttackParams, Basis, Scheme, SchemeKind, analyze
from qbound.exceptions import (
    ConfigError,
    DomainError,
    GeometryError,
    QBoundError,
    StateError,
    SweepSpecError,
)
from qbound.geometry import Anchor, CanonicalPair, DecompositionResult, canonicalize_pair, decompose
from qbound.parity import InfoReport, bm_bound, info_report
from qbound.reports import ReportRow, SweepSpec, run_sweep
from qbound.states import BlochVector, DensityMatrix, PositiveOperator, StateVector
from qbound.version import __version__

__all__ = [
    "__version__",
    "AttackAnalysis",
    "AttackParams",
    "Basis",
    "Scheme",
    "SchemeKind",
    "analyze",
    "Anchor",
    "CanonicalPair",
    "DecompositionResult",
    "canonicalize_pair",
    "decompose",
    "InfoReport",
    "bm_bound",
    "info_report",
    "ReportRow",
    "SweepSpec",
    "run_sweep",
    "BlochVector",
    "DensityMatrix",
    "PositiveOperator",
    "StateVector",
    "QBoundError",
    "StateError",
    "DomainError",
    "GeometryError",
    "ConfigError",
    "SweepSpecError",
]
