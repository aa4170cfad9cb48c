"""qbound CLI - collective-attack security bounds for quantum key distribution.

Commands:
    analyze  Single attack: error rates, Eve's states and the parity bound.
    sweep    One-dimensional parameter sweep written as CSV or JSON.
    verify   Closed forms, decompositions and parity formulas against
             independent computations.

Angles are radians throughout. Diagnostics go to stderr; stdout carries only
command output, so identical invocations print identical bytes.
"""

import logging
import math
from pathlib import Path
from typing import Any, NoReturn

import click
import numpy as np

from qbound.attacks import AttackAnalysis, AttackParams, Scheme, SchemeKind, analyze, eve_bloch_pair
from qbound.config import DEFAULT_SEED, load_config_file, setup_logging
from qbound.exceptions import ConfigError, QBoundError
from qbound.reports import (
    OutputFormat,
    ReportRow,
    SweepSpec,
    SweepVariable,
    format_number,
    parse_range,
    render_rows,
    rows_to_csv,
    rows_to_json,
    run_sweep,
    write_rows,
)
from qbound.verification import Suite, run_suites
from qbound.version import __version__

SCHEMES = [kind.value for kind in SchemeKind]

GAMMA_RANGE = click.FloatRange(0.0, math.pi / 2, max_open=True)
THETA_RANGE = click.FloatRange(0.0, math.pi / 4, min_open=True, max_open=True)


def _fail(error: QBoundError) -> NoReturn:
    click.secho(f"Error: {error.message}", fg="red", err=True)
    if error.detail:
        click.echo(f"  {error.detail}", err=True)
    raise SystemExit(1)


def _require_theta(scheme: str, theta: float | None) -> None:
    if scheme == SchemeKind.TWO_STATE.value and theta is None:
        raise click.UsageError("--theta is required for --scheme b92")


@click.group()
@click.version_option(version=__version__, prog_name="qbound")
@click.option("--verbose", "-v", is_flag=True, help="Log debug output to stderr")
@click.pass_context
def cli(ctx: click.Context, verbose: bool) -> None:
    """qbound - Eavesdropper information bounds for BB84 and B92.

    Analyzes symmetric collective attacks with a two-dimensional probe,
    bounds the eavesdropper's information on the parity of n key bits and
    checks the underlying formulas against brute-force oracles.
    """
    ctx.ensure_object(dict)
    ctx.obj["logger"] = setup_logging(logging.DEBUG if verbose else None)


def _format_complex(value: complex) -> str:
    sign = "-" if value.imag < 0 else "+"
    return f"{format_number(value.real)}{sign}{format_number(abs(value.imag))}j"


def _matrix_lines(title: str, entries: np.ndarray) -> list[str]:
    lines = [f"{title}:"]
    for row in entries:
        lines.append("  " + "  ".join(_format_complex(complex(v)) for v in row))
    return lines


def _analysis_text(analysis: AttackAnalysis) -> str:
    """The analyze report: fields, then matrices, then Eve's Bloch vectors."""
    fields = analysis.to_dict()
    lines = []
    for key in (
        "scheme",
        "basis",
        "theta",
        "gamma",
        "n",
        "p_e",
        "p_e_conditional",
        "x",
        "z",
        "beta",
        "beta_pole",
        "bound_bits",
        "bound_pole_bits",
        "pe_bound",
    ):
        value = fields[key]
        lines.append(f"{key}: {value if isinstance(value, str) else format_number(value)}")
    lines.append("eve_weights: " + " ".join(format_number(w) for w in analysis.eve_weights))
    for label, state in zip(analysis.labels, analysis.bob_states):
        lines.extend(_matrix_lines(f"bob_state[{label}]", state.entries))
    for label, state in zip(analysis.labels, analysis.eve_states):
        lines.extend(_matrix_lines(f"eve_state[{label}]", state.entries))
    for label, vector in zip(analysis.labels, eve_bloch_pair(analysis)):
        coordinates = " ".join(format_number(c) for c in (vector.x, vector.y, vector.z))
        lines.append(f"eve_bloch[{label}]: {coordinates}")
    return "\n".join(lines) + "\n"


@cli.command("analyze")
@click.option(
    "--scheme",
    type=click.Choice(SCHEMES),
    default=SchemeKind.FOUR_STATE.value,
    show_default=True,
    help="Attacked scheme",
)
@click.option("--theta", type=THETA_RANGE, default=None, help="Two-state half-angle in radians (b92)")
@click.option("--gamma", type=GAMMA_RANGE, default=0.0, show_default=True, help="Probe angle in radians")
@click.option("--n", "n", type=click.IntRange(min=1), default=7, show_default=True, help="String length")
@click.option(
    "--basis",
    type=click.Choice(["x", "y"]),
    default="x",
    show_default=True,
    help="Four-state basis whose pair is analyzed",
)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "csv", "json"]),
    default="text",
    show_default=True,
    help="Output format",
)
def analyze_command(scheme: str, theta: float | None, gamma: float, n: int, basis: str, fmt: str) -> None:
    """Analyze one attack.

    \b
    The text layout is one "key: value" line per field
      scheme basis theta gamma n p_e p_e_conditional x z beta beta_pole
      bound_bits bound_pole_bits pe_bound
    (empty value when a field does not apply), then "eve_weights: w0 w1",
    then Bob's and Eve's 2x2 matrices, one indented line per row with
    entries written as re+imj, then "eve_bloch[label]: x y z".
    Numbers carry 17 significant digits.
    """
    _require_theta(scheme, theta)
    try:
        if scheme == SchemeKind.TWO_STATE.value:
            assert theta is not None
            attacked = Scheme.two_state(theta)
        else:
            attacked = Scheme.four_state(basis)
        analysis = analyze(AttackParams(gamma=gamma, scheme=attacked), n)
    except QBoundError as e:
        _fail(e)

    if fmt == "text":
        click.echo(_analysis_text(analysis), nl=False)
    elif fmt == "csv":
        click.echo(rows_to_csv([ReportRow.from_analysis(analysis)]), nl=False)
    else:
        click.echo(rows_to_json([ReportRow.from_analysis(analysis)]), nl=False)


def _range_option(ctx: click.Context, param: click.Parameter, value: str | None) -> Any:
    if value is None:
        return None
    try:
        return parse_range(value)
    except QBoundError as e:
        raise click.BadParameter(e.message) from e


def _coerce(settings: dict[str, Any], key: str, kind: type, path: Path) -> Any:
    if key not in settings or settings[key] is None:
        return None
    try:
        return kind(settings[key])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid value for '{key}'", path=str(path), detail=str(e)) from e


def _build_sweep_spec(flags: dict[str, Any], config: Path | None) -> SweepSpec:
    """Merge flags over config-file values over defaults."""
    settings = load_config_file(config) if config else {}
    file_values: dict[str, Any] = {}
    if config:
        for key, kind in (
            ("scheme", str),
            ("theta", float),
            ("gamma", float),
            ("pe", float),
            ("n", int),
            ("var", str),
            ("range", str),
            ("format", str),
            ("out", Path),
            ("jobs", int),
        ):
            file_values[key] = _coerce(settings, key, kind, config)
        if file_values["range"] is not None:
            file_values["range"] = parse_range(file_values["range"])

    def pick(key: str, default: Any = None) -> Any:
        if flags[key] is not None:
            return flags[key]
        if file_values.get(key) is not None:
            return file_values[key]
        return default

    var, grid = pick("var"), pick("range")
    if var is None:
        raise click.UsageError("Missing --var (or 'var' in the config file)")
    if grid is None:
        raise click.UsageError("Missing --range (or 'range' in the config file)")
    start, stop, steps = grid

    spec_args: dict[str, Any] = {
        "scheme": pick("scheme", SchemeKind.FOUR_STATE.value),
        "var": var,
        "start": start,
        "stop": stop,
        "steps": steps,
        "theta": pick("theta"),
        "pe": pick("pe"),
        "fmt": pick("format", OutputFormat.CSV.value),
        "out": pick("out"),
        "jobs": pick("jobs", 1),
    }
    for key in ("gamma", "n"):
        value = pick(key)
        if value is not None:
            spec_args[key] = value
    return SweepSpec(**spec_args)


@cli.command("sweep")
@click.option("--scheme", type=click.Choice(SCHEMES), default=None, help="Attacked scheme [default: bb84]")
@click.option("--theta", type=float, default=None, help="Two-state half-angle in radians (b92)")
@click.option("--gamma", type=float, default=None, help="Fixed probe angle in radians [default: 0.1]")
@click.option("--pe", type=float, default=None, help="Fixed error rate for an n sweep")
@click.option("--n", "n", type=click.IntRange(min=1), default=None, help="Fixed string length [default: 7]")
@click.option(
    "--var",
    type=click.Choice([v.value for v in SweepVariable]),
    default=None,
    help="Swept parameter",
)
@click.option("--range", "grid", callback=_range_option, default=None, help="start:stop:steps")
@click.option(
    "--format",
    "fmt",
    type=click.Choice([f.value for f in OutputFormat]),
    default=None,
    help="Output format [default: csv]",
)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Output file")
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Flat YAML file with sweep settings; flags override it",
)
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker threads [default: 1]")
def sweep_command(
    scheme: str | None,
    theta: float | None,
    gamma: float | None,
    pe: float | None,
    n: int | None,
    var: str | None,
    grid: tuple[float, float, int] | None,
    fmt: str | None,
    out: Path | None,
    config: Path | None,
    jobs: int | None,
) -> None:
    """Sweep gamma, p_e or n and write one row per grid point.

    Rows come out in ascending order of the swept variable with header
    scheme,theta,gamma,p_e,p_e_conditional,x,z,beta,n,bound_bits. Without
    --out the rows go to standard output.
    """
    flags = {
        "scheme": scheme,
        "theta": theta,
        "gamma": gamma,
        "pe": pe,
        "n": n,
        "var": var,
        "range": grid,
        "format": fmt,
        "out": out,
        "jobs": jobs,
    }
    try:
        spec = _build_sweep_spec(flags, config)
        rows = run_sweep(spec)
        if spec.out is None:
            click.echo(render_rows(rows, spec.fmt), nl=False)
            return
        write_rows(rows, spec.fmt, spec.out)
    except QBoundError as e:
        _fail(e)
    click.secho(f"Wrote {len(rows)} rows to {spec.out}", fg="green", err=True)


@cli.command("verify")
@click.option(
    "--suite",
    type=click.Choice([s.value for s in Suite]),
    default=Suite.ALL.value,
    show_default=True,
    help="Suite to run",
)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True, help="Seed for random checks")
def verify_command(suite: str, seed: int) -> None:
    """Check closed forms, decompositions and parity formulas.

    Prints one PASS/FAIL line per check with its worst deviation and
    tolerance. Exits 1 if any check fails.
    """
    try:
        results = run_suites(suite, seed)
    except QBoundError as e:
        _fail(e)

    for result in results:
        for line in result.lines():
            click.echo(line)

    checks = [check for result in results for check in result.checks]
    failed = sum(1 for check in checks if not check.passed)
    if failed:
        click.secho(f"{failed} of {len(checks)} checks failed (seed {seed})", fg="red")
        raise SystemExit(1)
    click.secho(f"All {len(checks)} checks passed (seed {seed})", fg="green")


def main() -> None:
    """Entry point for the qbound CLI."""
    cli()


if __name__ == "__main__":
    main()
