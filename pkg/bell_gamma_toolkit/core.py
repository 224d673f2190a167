"""Counting identities for two-party spin-correlation experiments.

Everything here is a pure function of exact integer counts or of plain
reals, independent of any physical model. Counts stay integers; the
correlation C = 2m/n - 1 and the fraction S = m/n are derived on demand.
"""

import logging
import math
import operator
from collections.abc import Iterable
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import SupportsIndex

logger = logging.getLogger(__name__)

# Slack allowed when a correlation computed in floating point lands just
# outside [-1, 1].
CORRELATION_TOLERANCE = 1e-12

# Relative slack within which a Gamma computed in floating point is treated
# as equal to N/n.
BOUNDARY_RTOL = 1e-12


class BellGammaError(Exception):
    """Base exception for toolkit errors."""


class InvalidArgumentError(BellGammaError, ValueError):
    """Raised when an argument violates an operation's precondition."""

    def __init__(self, argument: str, message: str) -> None:
        """Initialize error.

        Args:
            argument: Name of the offending argument
            message: Human-readable description of the violation
        """
        self.argument = argument
        super().__init__(f"invalid {argument}: {message}")


class UnsupportedOperationError(BellGammaError, NotImplementedError):
    """Raised when an operation has no implementation for the given input."""


class Verdict(StrEnum):
    """Outcome of comparing Gamma with N/n."""

    SATISFIED = "SATISFIED"
    VIOLATED = "VIOLATED"


@dataclass(frozen=True)
class InequalityCheck:
    """Verdict of Gamma >= N/n with the signed distance from the threshold."""

    verdict: Verdict
    margin: float

    @property
    def satisfied(self) -> bool:
        return self.verdict is Verdict.SATISFIED


def ensure_finite(value: float, argument: str) -> float:
    """Return ``value`` as a float, rejecting NaN and infinities."""
    try:
        as_float = float(value)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(argument, f"expected a real number, got {value!r}") from exc
    if not math.isfinite(as_float):
        raise InvalidArgumentError(argument, f"must be finite, got {value!r}")
    return as_float


def canonical_difference(theta_a: float, theta_b: float) -> float:
    """Reduce ``theta_a - theta_b`` to [0, pi].

    Cosine is even and 2*pi periodic, so every correlation formula depends
    only on this canonical value.
    """
    a = ensure_finite(theta_a, "theta_a")
    b = ensure_finite(theta_b, "theta_b")
    # Reduce each angle first; a - b can overflow for huge finite inputs
    diff = abs(math.fmod(a, 2.0 * math.pi) - math.fmod(b, 2.0 * math.pi)) % (2.0 * math.pi)
    if diff > math.pi:
        diff = 2.0 * math.pi - diff
    return diff


def canonical_angle(theta_ab: float) -> float:
    """Reduce a single angle difference to [0, pi]."""
    return canonical_difference(theta_ab, 0.0)


def degrees_to_radians(value: float) -> float:
    """Convert a finite angle in degrees to radians."""
    return math.radians(ensure_finite(value, "angle"))


def _as_count(value: SupportsIndex, argument: str) -> int:
    if isinstance(value, bool):
        raise InvalidArgumentError(argument, f"expected an integer count, got {value!r}")
    try:
        return operator.index(value)
    except TypeError as exc:
        raise InvalidArgumentError(argument, f"expected an integer count, got {value!r}") from exc


def validate_counts(m: SupportsIndex, n: SupportsIndex) -> tuple[int, int]:
    """Check 0 <= m <= n and n >= 1, returning both as ints.

    Raises:
        InvalidArgumentError: If either count is out of range
    """
    m_int = _as_count(m, "m")
    n_int = _as_count(n, "n")
    if n_int < 1:
        raise InvalidArgumentError("n", f"run count must be >= 1, got {n_int}")
    if not 0 <= m_int <= n_int:
        raise InvalidArgumentError("m", f"must satisfy 0 <= m <= n={n_int}, got {m_int}")
    return m_int, n_int


def correlation_from_counts(m: SupportsIndex, n: SupportsIndex) -> float:
    """Correlation 2m/n - 1 from m same-sign products out of n pairs."""
    m_int, n_int = validate_counts(m, n)
    return 2 * m_int / n_int - 1


def s_from_correlation(c: float) -> float:
    """S-function (1 + C)/2.

    Values within ``CORRELATION_TOLERANCE`` outside [-1, 1] are clamped.
    """
    value = ensure_finite(c, "c")
    if value < -1.0 - CORRELATION_TOLERANCE or value > 1.0 + CORRELATION_TOLERANCE:
        raise InvalidArgumentError("c", f"correlation must lie in [-1, 1], got {value!r}")
    value = min(1.0, max(-1.0, value))
    return (1.0 + value) / 2.0


def s_from_counts(m: SupportsIndex, n: SupportsIndex) -> float:
    """S-function m/n, the fraction of same-sign outcome pairs."""
    m_int, n_int = validate_counts(m, n)
    return m_int / n_int


def gamma(s_values: Iterable[float]) -> float:
    """Sum of S values, accumulated in index order.

    Raises:
        InvalidArgumentError: If any element lies outside [0, 1]
    """
    total = 0.0
    for index, s in enumerate(s_values):
        value = ensure_finite(s, f"s_values[{index}]")
        if not 0.0 <= value <= 1.0:
            raise InvalidArgumentError(f"s_values[{index}]", f"must lie in [0, 1], got {value!r}")
        total += value
    return total


def exact_gamma_fraction(m_values: Iterable[SupportsIndex], n: SupportsIndex) -> Fraction:
    """Gamma as the exact rational (sum of m_l)/n."""
    n_int = _as_count(n, "n")
    if n_int < 1:
        raise InvalidArgumentError("n", f"run count must be >= 1, got {n_int}")
    total = 0
    for m in m_values:
        m_int, _ = validate_counts(m, n_int)
        total += m_int
    return Fraction(total, n_int)


def threshold(n_experiments: SupportsIndex, n_runs: SupportsIndex) -> float:
    """The right-hand side N/n of the inequality."""
    n_exp, runs = _validate_sizes(n_experiments, n_runs)
    return n_exp / runs


def _validate_sizes(n_experiments: SupportsIndex, n_runs: SupportsIndex) -> tuple[int, int]:
    n_exp = _as_count(n_experiments, "n_experiments")
    runs = _as_count(n_runs, "n_runs")
    if n_exp < 1:
        raise InvalidArgumentError("n_experiments", f"must be >= 1, got {n_exp}")
    if runs < 1:
        raise InvalidArgumentError("n_runs", f"must be >= 1, got {runs}")
    return n_exp, runs


def check_inequality(
    gamma: float | Fraction, n_experiments: SupportsIndex, n_runs: SupportsIndex
) -> InequalityCheck:
    """Evaluate Gamma >= N/n; equality counts as satisfied.

    A ``Fraction`` gamma is compared exactly against ``Fraction(N, n)`` so
    the verdict cannot depend on rounding. A float gamma within relative
    ``BOUNDARY_RTOL`` of N/n counts as equal; the margin is left unadjusted.
    """
    n_exp, runs = _validate_sizes(n_experiments, n_runs)

    if isinstance(gamma, Fraction):
        difference = gamma - Fraction(n_exp, runs)
        verdict = Verdict.SATISFIED if difference >= 0 else Verdict.VIOLATED
        return InequalityCheck(verdict=verdict, margin=float(difference))

    value = ensure_finite(gamma, "gamma")
    bound = n_exp / runs
    on_boundary = math.isclose(value, bound, rel_tol=BOUNDARY_RTOL)
    verdict = Verdict.SATISFIED if value >= bound or on_boundary else Verdict.VIOLATED
    return InequalityCheck(verdict=verdict, margin=value - bound)
