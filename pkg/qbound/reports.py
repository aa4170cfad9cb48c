"""Report rows, sweep definitions and their CSV/JSON serialization.

A ReportRow is the flat record of one analyzed attack. Numbers are written
with 17 significant digits so that every double survives a write/read cycle
unchanged; fields that do not apply to a scheme are written as empty strings
in CSV and null in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from qbound.attacks import (
    AttackAnalysis,
    AttackParams,
    Scheme,
    SchemeKind,
    analyze,
    gamma_for_error_rate,
    max_error_rate,
)
from qbound.exceptions import DomainError, SweepSpecError

logger = logging.getLogger(__name__)

CSV_HEADER = ("scheme", "theta", "gamma", "p_e", "p_e_conditional", "x", "z", "beta", "n", "bound_bits")

_FLOAT_FIELDS = ("theta", "gamma", "p_e", "p_e_conditional", "x", "z", "beta", "bound_bits")


def format_number(value: float | int | None) -> str:
    """17-significant-digit decimal, integer as is, None as empty string."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def _parse_float(text: str) -> float | None:
    return None if text == "" else float(text)


@dataclass(frozen=True)
class ReportRow:
    """One analyzed attack, flattened for CSV/JSON output."""

    scheme: str
    theta: float | None
    gamma: float
    p_e: float
    p_e_conditional: float | None
    x: float
    z: float
    beta: float
    n: int
    bound_bits: float

    @classmethod
    def from_analysis(cls, analysis: AttackAnalysis) -> ReportRow:
        scheme = analysis.params.scheme
        return cls(
            scheme=scheme.kind.value,
            theta=scheme.theta,
            gamma=analysis.params.gamma,
            p_e=analysis.p_e,
            p_e_conditional=analysis.p_e_conditional,
            x=analysis.x,
            z=analysis.z,
            beta=analysis.beta,
            n=analysis.n,
            bound_bits=analysis.bound_bits,
        )

    def to_fields(self) -> list[str]:
        """CSV fields in header order."""
        return [
            self.scheme,
            format_number(self.theta),
            format_number(self.gamma),
            format_number(self.p_e),
            format_number(self.p_e_conditional),
            format_number(self.x),
            format_number(self.z),
            format_number(self.beta),
            format_number(self.n),
            format_number(self.bound_bits),
        ]

    @classmethod
    def from_fields(cls, fields: dict[str, str]) -> ReportRow:
        """Parse one CSV record (as produced by csv.DictReader)."""
        try:
            parsed: dict[str, Any] = {name: _parse_float(fields[name]) for name in _FLOAT_FIELDS}
            return cls(scheme=fields["scheme"], n=int(fields["n"]), **parsed)
        except (KeyError, ValueError) as e:
            raise SweepSpecError(f"Malformed report row: {e}") from e

    def to_dict(self) -> dict[str, Any]:
        """JSON object with the CSV field names; inapplicable fields are null."""
        return {
            "scheme": self.scheme,
            "theta": self.theta,
            "gamma": self.gamma,
            "p_e": self.p_e,
            "p_e_conditional": self.p_e_conditional,
            "x": self.x,
            "z": self.z,
            "beta": self.beta,
            "n": self.n,
            "bound_bits": self.bound_bits,
        }


def rows_to_csv(rows: Iterable[ReportRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.to_fields())
    return buffer.getvalue()


def rows_from_csv(text: str) -> list[ReportRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise SweepSpecError("Unexpected CSV header", field="header")
    return [ReportRow.from_fields(record) for record in reader]


def rows_to_json(rows: Iterable[ReportRow]) -> str:
    return json.dumps([row.to_dict() for row in rows], indent=2) + "\n"


class SweepVariable(str, Enum):
    """Parameter varied across a sweep."""

    GAMMA = "gamma"
    PE = "pe"
    N = "n"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


def parse_range(text: str) -> tuple[float, float, int]:
    """Parse ``start:stop:steps``."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise SweepSpecError(f"Range must be start:stop:steps, got {text!r}", field="range")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise SweepSpecError(f"Range must be start:stop:steps, got {text!r}", field="range") from e
    return start, stop, steps


@dataclass(frozen=True)
class SweepSpec:
    """A one-dimensional parameter sweep.

    Attributes:
        scheme: Scheme under attack.
        theta: Two-state half-angle (required for b92).
        gamma: Fixed probe angle when gamma is not swept.
        pe: Fixed error rate for an n sweep; overrides gamma through
            gamma_for_error_rate.
        n: Fixed string length when n is not swept.
        var: Swept parameter.
        start, stop, steps: Sweep grid (inclusive endpoints).
        fmt: Output format.
        out: Output path; None writes to standard output.
        jobs: Worker threads used to evaluate grid points.
    """

    scheme: SchemeKind
    var: SweepVariable
    start: float
    stop: float
    steps: int
    theta: float | None = None
    gamma: float = 0.1
    pe: float | None = None
    n: int = 7
    fmt: OutputFormat = OutputFormat.CSV
    out: Path | None = None
    jobs: int = 1

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "scheme", SchemeKind(self.scheme))
            object.__setattr__(self, "var", SweepVariable(self.var))
            object.__setattr__(self, "fmt", OutputFormat(self.fmt))
        except ValueError as e:
            raise SweepSpecError(str(e)) from e
        if self.steps < 2:
            raise SweepSpecError("A sweep needs at least 2 steps", field="range")
        if not self.start < self.stop:
            raise SweepSpecError("Sweep start must be below stop", field="range")
        if self.jobs < 1:
            raise SweepSpecError("jobs must be at least 1", field="jobs")
        try:
            scheme = self.base_scheme()
        except DomainError as e:
            raise SweepSpecError(e.message, field="theta") from e

        if self.var is SweepVariable.GAMMA:
            if self.start < 0.0 or self.stop >= math.pi / 2:
                raise SweepSpecError("gamma range must lie in [0, pi/2)", field="range")
        elif self.var is SweepVariable.PE:
            ceiling = max_error_rate(scheme)
            if self.start < 0.0 or self.stop >= ceiling:
                raise SweepSpecError(f"p_e range must lie in [0, {ceiling!r})", field="range")
        else:
            values = self.grid()
            if values[0] < 1 or len(set(values)) != len(values):
                raise SweepSpecError("n range must give distinct integers >= 1", field="range")

        if self.var is not SweepVariable.GAMMA and not (0.0 <= self.gamma < math.pi / 2):
            raise SweepSpecError("gamma must lie in [0, pi/2)", field="gamma")
        if self.var is not SweepVariable.N and self.n < 1:
            raise SweepSpecError("n must be at least 1", field="n")
        if self.pe is not None:
            if self.var is not SweepVariable.N:
                raise SweepSpecError("A fixed p_e only applies to an n sweep", field="pe")
            if not (0.0 <= self.pe < max_error_rate(scheme)):
                raise SweepSpecError(
                    f"p_e must lie in [0, {max_error_rate(scheme)!r})", field="pe"
                )

    def base_scheme(self) -> Scheme:
        if self.scheme is SchemeKind.TWO_STATE:
            if self.theta is None:
                raise DomainError("theta", None, "The b92 scheme requires theta")
            return Scheme.two_state(self.theta)
        return Scheme.four_state()

    def grid(self) -> list[Any]:
        """Sweep values in ascending order."""
        values = np.linspace(self.start, self.stop, self.steps)
        if self.var is SweepVariable.N:
            return [int(round(v)) for v in values]
        return [float(v) for v in values]

    def params_for(self, value: Any) -> tuple[AttackParams, int]:
        scheme = self.base_scheme()
        if self.var is SweepVariable.GAMMA:
            return AttackParams(gamma=value, scheme=scheme), self.n
        if self.var is SweepVariable.PE:
            return AttackParams(gamma=gamma_for_error_rate(scheme, value), scheme=scheme), self.n
        gamma = self.gamma if self.pe is None else gamma_for_error_rate(scheme, self.pe)
        return AttackParams(gamma=gamma, scheme=scheme), value


def _evaluate(spec: SweepSpec, value: Any) -> ReportRow:
    params, n = spec.params_for(value)
    return ReportRow.from_analysis(analyze(params, n))


def run_sweep(spec: SweepSpec) -> list[ReportRow]:
    """Evaluate every grid point; rows come back in ascending grid order."""
    values = spec.grid()
    logger.info("Sweeping %s over %d points with %d job(s)", spec.var.value, len(values), spec.jobs)
    if spec.jobs == 1:
        return [_evaluate(spec, value) for value in values]
    with ThreadPoolExecutor(max_workers=spec.jobs) as pool:
        return list(pool.map(lambda value: _evaluate(spec, value), values))


def render_rows(rows: list[ReportRow], fmt: OutputFormat) -> str:
    return rows_to_csv(rows) if fmt is OutputFormat.CSV else rows_to_json(rows)


def write_rows(rows: list[ReportRow], fmt: OutputFormat, out: Path) -> None:
    """Write rows to the file ``out``."""
    try:
        out.write_text(render_rows(rows, fmt), encoding="utf-8", newline="\n")
    except OSError as e:
        raise SweepSpecError(f"Cannot write output file {out}: {e}", field="out") from e
    logger.info("Wrote %d rows to %s", len(rows), out)
