"""Command-line interface for the Bell Gamma toolkit.

Usage:
    bell-gamma bound --n 10000
    bell-gamma simulate --model quantum --theta-a 0 --theta-b 1.0 --runs 100000
    bell-gamma gamma --model quantum --theta-ab 0.01 --experiments 100 --runs 10000
    bell-gamma report --theta-ab 0.01 --experiments 100 --runs 10000
    bell-gamma audit --model quantum --theta-a 0 --theta-b 0.001 --runs 10000 --trials 1000
    bell-gamma sweep --model bell-sign --theta-min 0 --theta-max 3.14159 --steps 33 --runs 10000

Reports are written to stdout and diagnostics to stderr. Exit codes are
0 on success, 1 on internal errors and 2 on usage or validation errors.
Angles are radians unless ``--degrees`` is given.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Callable, Iterable
from pathlib import Path
from typing import Any, TypeVar

import click
from pydantic import ValidationError

from . import __version__, analysis, engine, hvmodels, quantum, reports
from .config import LOG_LEVELS, Settings
from .core import (
    InvalidArgumentError,
    degrees_to_radians,
    ensure_finite,
)
from .logging_utils import setup_logging
from .metrics import write_metrics
from .models import BatchConfig, ExperimentConfig, ModelKind, ModelSpec, SeedSpec
from .reports import OutputFormat, Report

logger = logging.getLogger(__name__)

__all__ = ["cli", "main", "parse_angle_lines"]

F = TypeVar("F", bound=Callable[..., Any])

_NOISE_RE = re.compile(r"^noise:q=(?P<q>.+)$")
_MAX_SEED = 2**64 - 1


class InternalError(click.ClickException):
    """Unexpected failure; reported with exit code 1."""

    exit_code = 1


def _describe(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        parts = []
        for error in exc.errors():
            location = ".".join(str(part) for part in error["loc"])
            parts.append(f"{location}: {error['msg']}" if location else error["msg"])
        return "; ".join(parts)
    return str(exc)


class BellGammaGroup(click.Group):
    """Command group mapping toolkit exceptions onto exit codes."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except (click.exceptions.Exit, click.exceptions.Abort, click.ClickException):
            raise
        except (InvalidArgumentError, ValidationError) as exc:
            logger.debug("Rejected arguments: %s", exc)
            raise click.UsageError(_describe(exc), ctx=ctx) from exc
        except Exception as exc:
            logger.exception("Unhandled error: %s", exc)
            raise InternalError(f"internal error: {exc}") from exc


class ModelParamType(click.ParamType):
    """``quantum | bell-sign | noise:q=<real> | quantum-mimic``."""

    name = "model"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> ModelSpec:
        if isinstance(value, ModelSpec):
            return value
        text = str(value).strip()
        match = _NOISE_RE.match(text)
        try:
            if match is not None:
                return ModelSpec.noise(float(match.group("q")))
            kind = ModelKind(text)
            if kind is ModelKind.NOISE_LOCAL:
                self.fail("noise model needs a flip probability, e.g. noise:q=0.1", param, ctx)
            return ModelSpec(kind=kind)
        except ValueError as exc:
            self.fail(
                f"{text!r} is not a model; expected quantum, bell-sign, noise:q=<real> "
                f"or quantum-mimic ({_describe(exc)})",
                param,
                ctx,
            )


class AngleParamType(click.ParamType):
    """A finite real angle."""

    name = "angle"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> float:
        try:
            return ensure_finite(value, "angle")
        except InvalidArgumentError:
            self.fail(f"{value!r} is not a finite real number", param, ctx)


class AngleListParamType(click.ParamType):
    """Comma-separated finite angles, e.g. ``0,0.785``."""

    name = "angles"

    def convert(
        self, value: Any, param: click.Parameter | None, ctx: click.Context | None
    ) -> tuple[float, ...]:
        if isinstance(value, tuple):
            return value
        items = [item.strip() for item in str(value).split(",")]
        if not all(items):
            self.fail(f"{value!r} has an empty entry", param, ctx)
        return tuple(ANGLE.convert(item, param, ctx) for item in items)


MODEL = ModelParamType()
ANGLE = AngleParamType()
ANGLE_LIST = AngleListParamType()


def parse_angle_lines(lines: Iterable[str]) -> list[float]:
    """Parse an angle file: one real per line, ``#`` starts a comment.

    Raises:
        InvalidArgumentError: On a malformed or non-finite value (the message
            carries the 1-based line number) or when no angle is present
    """
    angles: list[float] = []
    for number, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            value = float(text)
        except ValueError:
            raise InvalidArgumentError("angles_file", f"line {number}: {text!r} is not a number") from None
        if not math.isfinite(value):
            raise InvalidArgumentError("angles_file", f"line {number}: {text!r} is not finite")
        angles.append(value)
    if not angles:
        raise InvalidArgumentError("angles_file", "contains no angles")
    return angles


def _read_angles_file(path: Path) -> list[float]:
    with path.open(encoding="utf-8") as handle:
        return parse_angle_lines(handle)


def _radians(value: float, degrees: bool) -> float:
    return degrees_to_radians(value) if degrees else value


def _theta_list(
    theta_ab: float | None,
    experiments: int | None,
    angles_file: Path | None,
    degrees: bool,
) -> list[float]:
    """Per-experiment angle differences from ``--theta-ab``/``--experiments`` or a file."""
    if (theta_ab is None) == (angles_file is None):
        raise click.UsageError("give exactly one of --theta-ab or --angles-file")
    if angles_file is not None:
        if experiments is not None:
            raise click.UsageError("--experiments only applies to --theta-ab")
        return [_radians(theta, degrees) for theta in _read_angles_file(angles_file)]
    if experiments is None:
        raise click.UsageError("--theta-ab needs --experiments")
    assert theta_ab is not None
    return [_radians(theta_ab, degrees)] * experiments


def _settings(ctx: click.Context) -> Settings:
    settings = ctx.find_object(Settings)
    return settings if settings is not None else Settings()


def _seed(settings: Settings, seed: int | None) -> SeedSpec:
    return SeedSpec(master_seed=settings.default_seed if seed is None else seed)


def _emit(report: Report, fmt: str) -> None:
    click.echo(report.render(OutputFormat(fmt)))


def _model_option(f: F) -> F:
    return click.option(
        "--model",
        type=MODEL,
        required=True,
        help="quantum, bell-sign, noise:q=<real> or quantum-mimic.",
    )(f)


def _runs_option(f: F) -> F:
    return click.option(
        "--runs", type=click.IntRange(min=1), required=True, help="Pairs per experiment (n)."
    )(f)


def _seed_option(f: F) -> F:
    return click.option(
        "--seed",
        type=click.IntRange(0, _MAX_SEED),
        default=None,
        help="Master seed; defaults to BELL_GAMMA_DEFAULT_SEED or 0.",
    )(f)


def _workers_option(f: F) -> F:
    return click.option(
        "--workers",
        type=click.IntRange(min=1),
        default=None,
        help="Threads used to run experiments; output does not depend on it.",
    )(f)


def _degrees_option(f: F) -> F:
    return click.option("--degrees", is_flag=True, help="Read angle arguments as degrees.")(f)


def _format_option(default: OutputFormat = OutputFormat.TEXT) -> Callable[[F], F]:
    return click.option(
        "--format",
        "fmt",
        type=click.Choice([member.value for member in OutputFormat], case_sensitive=False),
        default=default.value,
        show_default=True,
        help="Report format.",
    )


@click.group(cls=BellGammaGroup, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="bell-gamma")
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="Diagnostics level on stderr; defaults to BELL_GAMMA_LOG_LEVEL or WARNING.",
)
@click.option(
    "--metrics-file",
    type=click.Path(dir_okay=False),
    default=None,
    help="Write Prometheus metrics to this file on exit.",
)
@click.pass_context
def cli(ctx: click.Context, log_level: str | None, metrics_file: str | None) -> None:
    """Simulate spin-correlation experiments and evaluate the Gamma >= N/n inequality."""
    overrides: dict[str, Any] = {}
    if log_level is not None:
        overrides["log_level"] = log_level
    if metrics_file is not None:
        overrides["metrics_file"] = metrics_file
    try:
        settings = Settings(**overrides)
    except ValidationError as exc:
        raise click.UsageError(f"invalid settings: {_describe(exc)}", ctx=ctx) from exc

    setup_logging(settings.log_level_value)
    logger.debug("Loaded %r", settings)
    ctx.obj = settings

    if settings.metrics_file:
        path = settings.metrics_file

        def _write() -> None:
            try:
                write_metrics(path)
            except OSError as exc:
                logger.error("Could not write metrics to %s: %s", path, exc)
                raise InternalError(f"could not write metrics file {path}: {exc}") from exc

        ctx.call_on_close(_write)


@cli.command()
@click.option("--n", "n_runs", type=click.IntRange(min=1), default=None, help="Pairs per experiment.")
@click.option("--theta-ab", type=ANGLE, default=None, help="Angle difference to place in a window.")
@_degrees_option
@_format_option()
def bound(n_runs: int | None, theta_ab: float | None, degrees: bool, fmt: str) -> None:
    """Upper end of the violation window, or the largest n whose window holds an angle."""
    if (n_runs is None) == (theta_ab is None):
        raise click.UsageError("give exactly one of --n or --theta-ab")
    if n_runs is not None:
        _emit(reports.bound_report(n_runs, analysis.angle_bound(n_runs)), fmt)
        return
    assert theta_ab is not None
    theta = _radians(theta_ab, degrees)
    _emit(reports.window_report(theta, analysis.max_runs_in_window(theta)), fmt)


@cli.command()
@_model_option
@click.option("--theta-a", type=ANGLE, required=True, help="Analyzer angle on side A.")
@click.option("--theta-b", type=ANGLE, required=True, help="Analyzer angle on side B.")
@_runs_option
@_seed_option
@_degrees_option
@_format_option()
@click.pass_context
def simulate(
    ctx: click.Context,
    model: ModelSpec,
    theta_a: float,
    theta_b: float,
    runs: int,
    seed: int | None,
    degrees: bool,
    fmt: str,
) -> None:
    """Run one experiment and report m, n, C and S."""
    settings = _settings(ctx)
    config = ExperimentConfig(
        model=model,
        theta_a=_radians(theta_a, degrees),
        theta_b=_radians(theta_b, degrees),
        n_runs=runs,
    )
    # Substream 0, the same stream experiment 1 of a batch uses
    stream = engine.experiment_stream(_seed(settings, seed), 0)
    result = engine.run_experiment(config, stream, chunk_size=settings.pair_chunk_size)

    c_exact = s_exact = None
    if hvmodels.has_closed_form(model):
        c_exact = hvmodels.exact_model_correlation(model, result.theta_ab)
        s_exact = hvmodels.exact_model_s(model, result.theta_ab)

    _emit(
        reports.simulate_report(
            model.label,
            result.theta_a,
            result.theta_b,
            result.theta_ab,
            result.n,
            result.m,
            result.correlation,
            result.s,
            c_exact,
            s_exact,
        ),
        fmt,
    )


@cli.command()
@_model_option
@click.option("--theta-ab", type=ANGLE, default=None, help="Angle difference used by every experiment.")
@click.option("--experiments", type=click.IntRange(min=1), default=None, help="Number of experiments N.")
@click.option(
    "--angles-file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="One angle difference per line; '#' starts a comment.",
)
@click.option("--settings-a", type=ANGLE_LIST, default=None, help="Side A settings, e.g. 0,0.785.")
@click.option("--settings-b", type=ANGLE_LIST, default=None, help="Side B settings, e.g. 0.01,0.8.")
@_runs_option
@_seed_option
@_workers_option
@click.option("--allow-equal", is_flag=True, help="Accept experiments with theta_a == theta_b.")
@_degrees_option
@_format_option()
@click.pass_context
def gamma(
    ctx: click.Context,
    model: ModelSpec,
    theta_ab: float | None,
    experiments: int | None,
    angles_file: Path | None,
    settings_a: tuple[float, ...] | None,
    settings_b: tuple[float, ...] | None,
    runs: int,
    seed: int | None,
    workers: int | None,
    allow_equal: bool,
    degrees: bool,
    fmt: str,
) -> None:
    """Run N experiments and test Gamma >= N/n."""
    settings = _settings(ctx)
    if settings_a is not None or settings_b is not None:
        if settings_a is None or settings_b is None:
            raise click.UsageError("--settings-a and --settings-b go together")
        if theta_ab is not None or angles_file is not None or experiments is not None:
            raise click.UsageError("--settings-a/--settings-b exclude --theta-ab and --angles-file")
        angle_pairs = engine.setting_pairs(
            [_radians(a, degrees) for a in settings_a],
            [_radians(b, degrees) for b in settings_b],
        )
    else:
        angle_pairs = tuple(
            (0.0, theta) for theta in _theta_list(theta_ab, experiments, angles_file, degrees)
        )

    config = BatchConfig(
        model=model,
        angle_pairs=angle_pairs,
        n_runs=runs,
        exclude_equal_angles=not allow_equal,
    )
    seed_spec = _seed(settings, seed)
    batch = engine.run_batch(
        config,
        seed_spec,
        workers=workers if workers is not None else settings.workers,
        chunk_size=settings.pair_chunk_size,
    )

    probability = None
    if hvmodels.is_quantum(model):
        probability = analysis.violation_probability(
            [quantum.exact_s(e.theta_ab) for e in batch.experiments], runs
        )
    _emit(reports.gamma_report(model.label, seed_spec.master_seed, batch, probability), fmt)


@cli.command()
@click.option("--theta-ab", type=ANGLE, default=None, help="Angle difference used by every experiment.")
@click.option("--experiments", type=click.IntRange(min=1), default=None, help="Number of experiments N.")
@click.option(
    "--angles-file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="One angle difference per line; '#' starts a comment.",
)
@_runs_option
@_degrees_option
@_format_option()
def report(
    theta_ab: float | None,
    experiments: int | None,
    angles_file: Path | None,
    runs: int,
    degrees: bool,
    fmt: str,
) -> None:
    """Exact quantum Gamma against N/n, with window flags and violation probability."""
    thetas = _theta_list(theta_ab, experiments, angles_file, degrees)
    _emit(reports.violation_report(analysis.quantum_violation_report(thetas, runs)), fmt)


@cli.command()
@_model_option
@click.option("--theta-a", type=ANGLE, required=True, help="Analyzer angle on side A.")
@click.option("--theta-b", type=ANGLE, required=True, help="Analyzer angle on side B.")
@_runs_option
@click.option("--trials", type=click.IntRange(min=1), required=True, help="Experiments to run.")
@_seed_option
@_workers_option
@click.option("--exclude-equal", is_flag=True, help="Reject theta_a == theta_b.")
@_degrees_option
@_format_option()
@click.pass_context
def audit(
    ctx: click.Context,
    model: ModelSpec,
    theta_a: float,
    theta_b: float,
    runs: int,
    trials: int,
    seed: int | None,
    workers: int | None,
    exclude_equal: bool,
    degrees: bool,
    fmt: str,
) -> None:
    """Count experiments with m = 0 at fixed settings."""
    settings = _settings(ctx)
    result = analysis.audit_assumption(
        model,
        _radians(theta_a, degrees),
        _radians(theta_b, degrees),
        runs,
        trials,
        _seed(settings, seed),
        exclude_equal_angles=exclude_equal,
        workers=workers if workers is not None else settings.workers,
        chunk_size=settings.pair_chunk_size,
    )
    _emit(reports.audit_report(result), fmt)


@cli.command()
@_model_option
@click.option("--theta-min", type=ANGLE, required=True, help="First grid angle.")
@click.option("--theta-max", type=ANGLE, required=True, help="Last grid angle.")
@click.option("--steps", type=click.IntRange(min=2), required=True, help="Grid points, ends included.")
@_runs_option
@_seed_option
@_workers_option
@_degrees_option
@_format_option(OutputFormat.CSV)
@click.pass_context
def sweep(
    ctx: click.Context,
    model: ModelSpec,
    theta_min: float,
    theta_max: float,
    steps: int,
    runs: int,
    seed: int | None,
    workers: int | None,
    degrees: bool,
    fmt: str,
) -> None:
    """Exact and empirical C and S over an angle grid."""
    settings = _settings(ctx)
    seed_spec = _seed(settings, seed)
    rows = analysis.sweep(
        model,
        _radians(theta_min, degrees),
        _radians(theta_max, degrees),
        steps,
        runs,
        seed_spec,
        workers=workers if workers is not None else settings.workers,
        chunk_size=settings.pair_chunk_size,
    )
    _emit(reports.sweep_report(model.label, seed_spec.master_seed, runs, rows), fmt)


def main() -> None:
    """Console-script entry point."""
    cli(prog_name="bell-gamma")
