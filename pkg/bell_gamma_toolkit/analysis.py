"""Violation window, exact finite-sample violation probability and the positive-count audit."""

import logging
import math
import sys
from collections.abc import Sequence

import numpy as np
from scipy.stats import binom

from . import hvmodels, quantum
from .core import BOUNDARY_RTOL, InvalidArgumentError, Verdict, ensure_finite, threshold
from .engine import DEFAULT_CHUNK_SIZE, run_batch
from .models import (
    AssumptionAudit,
    BatchConfig,
    ModelSpec,
    SeedSpec,
    SweepRow,
    ViolationReport,
)

logger = logging.getLogger(__name__)

RIGHT_ANGLE = math.pi / 2.0

# Smallest S whose reciprocal, doubled a few times, stays a finite float.
_MIN_RESOLVABLE_S = 16.0 / sys.float_info.max


def _positive_count(value: int, argument: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int | np.integer) or value < 1:
        raise InvalidArgumentError(argument, f"must be an integer >= 1, got {value!r}")
    return int(value)


def angle_bound(n_runs: int) -> float:
    """Upper end 2*arcsin(1/sqrt(n)) of the quantum violation window.

    Every angle difference strictly between 0 and this bound has
    sin^2(theta/2) < 1/n.
    """
    n = _positive_count(n_runs, "n_runs")
    return 2.0 * math.asin(1.0 / math.sqrt(n))


def max_runs_in_window(theta_ab: float) -> int:
    """Largest run count n whose violation window still contains ``theta_ab``.

    The answer agrees with ``angle_bound``: theta_ab < angle_bound(n) and
    theta_ab >= angle_bound(n + 1). Returns 0 at theta_ab = pi, where no
    n >= 1 qualifies.

    Raises:
        InvalidArgumentError: If theta_ab lies outside (0, pi] or is so small
            that sin^2(theta_ab / 2) is not representable
    """
    theta = ensure_finite(theta_ab, "theta_ab")
    if not 0.0 < theta <= math.pi:
        raise InvalidArgumentError("theta_ab", f"must lie in (0, pi], got {theta!r}")
    s = quantum.exact_s(theta)
    if s < _MIN_RESOLVABLE_S:
        raise InvalidArgumentError(
            "theta_ab", f"{theta!r} is too small: sin^2(theta_ab/2) underflows"
        )

    def inside(n: int) -> bool:
        return theta < angle_bound(n)

    # angle_bound is non-increasing in n: bracket from 1/s, then bisect
    low, high = 0, max(1, math.ceil(1.0 / s))
    while inside(high):
        low, high = high, 2 * high
    while high - low > 1:
        middle = (low + high) // 2
        if inside(middle):
            low = middle
        else:
            high = middle
    return low


def violation_probability(p_list: Sequence[float], n_runs: int) -> float:
    """Exact P(sum of m_l <= N - 1) for independent m_l ~ Binomial(n, p_l).

    Convolves the binomial laws over totals 0..N-1 only; mass at N or above
    is dropped into an implicit absorbing state, so the cost is
    O(N^2 * min(n, N)) whatever the size of n.
    """
    n = _positive_count(n_runs, "n_runs")
    if len(p_list) == 0:
        raise InvalidArgumentError("p_list", "needs at least one probability")
    probabilities = []
    for index, p in enumerate(p_list):
        value = ensure_finite(p, f"p_list[{index}]")
        if not 0.0 <= value <= 1.0:
            raise InvalidArgumentError(f"p_list[{index}]", f"must lie in [0, 1], got {value!r}")
        probabilities.append(value)

    n_experiments = len(probabilities)
    support = np.arange(min(n, n_experiments - 1) + 1)
    totals = np.zeros(n_experiments)
    totals[0] = 1.0
    for p in probabilities:
        pmf = binom.pmf(support, n, p)
        totals = np.convolve(totals, pmf)[:n_experiments]

    return min(1.0, max(0.0, math.fsum(totals.tolist())))


def quantum_violation_report(theta_list: Sequence[float], n_runs: int) -> ViolationReport:
    """Exact quantum Gamma for the given angle differences against N/n.

    Angles at or beyond the window bound, or at or beyond pi/2, are flagged
    in the report and logged; they do not change the verdict.

    Raises:
        InvalidArgumentError: If the list is empty or an angle lies outside (0, pi]
    """
    n = _positive_count(n_runs, "n_runs")
    if len(theta_list) == 0:
        raise InvalidArgumentError("theta_list", "needs at least one angle")
    thetas = []
    for index, theta in enumerate(theta_list):
        value = ensure_finite(theta, f"theta_list[{index}]")
        if not 0.0 < value <= math.pi:
            raise InvalidArgumentError(f"theta_list[{index}]", f"must lie in (0, pi], got {value!r}")
        thetas.append(value)

    bound = angle_bound(n)
    s_values = [quantum.exact_s(theta) for theta in thetas]
    gamma_qm = quantum.exact_gamma(thetas)
    limit = threshold(len(thetas), n)

    on_boundary = math.isclose(gamma_qm, limit, rel_tol=BOUNDARY_RTOL)
    verdict = Verdict.VIOLATED if gamma_qm < limit and not on_boundary else Verdict.SATISFIED

    out_of_window = tuple(i for i, theta in enumerate(thetas) if theta >= bound)
    beyond_right_angle = tuple(i for i, theta in enumerate(thetas) if theta >= RIGHT_ANGLE)
    if out_of_window:
        logger.warning(
            "%d of %d angle(s) lie outside the violation window (0, %r)",
            len(out_of_window),
            len(thetas),
            bound,
        )
    if beyond_right_angle:
        logger.warning(
            "%d of %d angle(s) are >= pi/2, where the window argument does not apply",
            len(beyond_right_angle),
            len(thetas),
        )

    return ViolationReport(
        n_runs=n,
        n_experiments=len(thetas),
        angle_window_upper=bound,
        exact_gamma_qm=gamma_qm,
        threshold=limit,
        margin=gamma_qm - limit,
        expectation_verdict=verdict,
        finite_sample_violation_probability=violation_probability(s_values, n),
        out_of_window=out_of_window,
        beyond_right_angle=beyond_right_angle,
    )


def expected_gamma(model: ModelSpec, theta_list: Sequence[float]) -> float:
    """Expected Gamma of a model with a closed-form correlation.

    Raises:
        UnsupportedOperationError: If the model has no closed form
    """
    return math.fsum(hvmodels.exact_model_s(model, theta) for theta in theta_list)


def _zero_count_probability(model: ModelSpec, theta_ab: float, n_runs: int) -> float | None:
    if not hvmodels.has_closed_form(model):
        return None
    s = hvmodels.exact_model_s(model, theta_ab)
    if s >= 1.0:
        return 0.0
    # (1 - s)^n without losing precision for tiny s
    return math.exp(n_runs * math.log1p(-s))


def audit_assumption(
    model: ModelSpec,
    theta_a: float,
    theta_b: float,
    n_runs: int,
    trials: int,
    seed: SeedSpec,
    *,
    exclude_equal_angles: bool = False,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> AssumptionAudit:
    """Run ``trials`` experiments at one setting pair and count m = 0 outcomes.

    The claim that m > 0 whenever theta_a != theta_b is treated as an
    empirical, model-relative property: the audit reports how often it failed.
    """
    n = _positive_count(n_runs, "n_runs")
    count = _positive_count(trials, "trials")
    config = BatchConfig(
        model=model,
        angle_pairs=((theta_a, theta_b),) * count,
        n_runs=n,
        exclude_equal_angles=exclude_equal_angles,
    )
    batch = run_batch(config, seed, workers=workers, chunk_size=chunk_size)
    zero_count = sum(1 for experiment in batch.experiments if experiment.m == 0)
    theta_ab = batch.experiments[0].theta_ab

    if zero_count:
        logger.info("m = 0 occurred in %d of %d trial(s) at theta_ab=%r", zero_count, count, theta_ab)

    return AssumptionAudit(
        model=model,
        theta_a=theta_a,
        theta_b=theta_b,
        theta_ab=theta_ab,
        n_runs=n,
        trials=count,
        zero_m_count=zero_count,
        zero_m_frequency=zero_count / count,
        expected_zero_m_frequency=_zero_count_probability(model, theta_ab, n),
        all_counts_positive=zero_count == 0,
    )


def sweep(
    model: ModelSpec,
    theta_min: float,
    theta_max: float,
    steps: int,
    n_runs: int,
    seed: SeedSpec,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> list[SweepRow]:
    """Exact and empirical C and S on an evenly spaced grid, endpoints included.

    Grid point ``l`` is experiment ``l`` of one batch at settings (0, theta_l).
    """
    low = ensure_finite(theta_min, "theta_min")
    high = ensure_finite(theta_max, "theta_max")
    if not low < high:
        raise InvalidArgumentError("theta_min", f"must be below theta_max, got [{low!r}, {high!r}]")
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        raise InvalidArgumentError("steps", f"must be an integer >= 2, got {steps!r}")
    n = _positive_count(n_runs, "n_runs")

    grid = [float(theta) for theta in np.linspace(low, high, steps)]
    config = BatchConfig(
        model=model,
        angle_pairs=tuple((0.0, theta) for theta in grid),
        n_runs=n,
        exclude_equal_angles=False,
    )
    batch = run_batch(config, seed, workers=workers, chunk_size=chunk_size)

    closed_form = hvmodels.has_closed_form(model)
    rows = []
    for theta, experiment in zip(grid, batch.experiments, strict=True):
        c_exact = hvmodels.exact_model_correlation(model, theta) if closed_form else None
        rows.append(
            SweepRow(
                theta_ab=theta,
                c_exact=c_exact,
                c_emp=experiment.correlation,
                s_exact=None if c_exact is None else hvmodels.exact_model_s(model, theta),
                s_emp=experiment.s,
            )
        )
    return rows
