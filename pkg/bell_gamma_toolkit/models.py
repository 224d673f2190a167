"""Data models for experiments, batches and analysis reports."""

import logging
import math
from enum import StrEnum
from fractions import Fraction
from typing import Annotated, Literal, Self

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from .core import (
    BOUNDARY_RTOL,
    Verdict,
    canonical_difference,
    check_inequality,
    correlation_from_counts,
    exact_gamma_fraction,
    s_from_counts,
)

logger = logging.getLogger(__name__)

# Measurement orientation in radians; NaN and infinities are rejected.
Angle = Annotated[float, Field(allow_inf_nan=False)]

# A single detector result.
Outcome = Literal[1, -1]

# Output name of the audit flag that every trial had m > 0.
AUDIT_FLAG_KEY = "eq9_empirically_holds"

# Rounding slack for sums and symmetries of outcome probabilities.
_JOINT_ABS_TOL = 1e-12


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class ModelKind(StrEnum):
    """Pair-response models; the values are the command-line names."""

    QUANTUM = "quantum"
    BELL_SIGN_LOCAL = "bell-sign"
    NOISE_LOCAL = "noise"
    QUANTUM_MIMIC_NONLOCAL = "quantum-mimic"


class ModelSpec(_Frozen):
    """A pair-response model and its parameters.

    ``flip_probability`` is the per-side flip probability q of NOISE_LOCAL
    and must be omitted for every other kind.
    """

    kind: ModelKind
    flip_probability: float | None = Field(default=None, ge=0.0, le=0.5, allow_inf_nan=False)

    @model_validator(mode="after")
    def validate_params(self) -> Self:
        """Check that parameters match the model kind.

        Returns:
            The validated model

        Raises:
            ValueError: If a parameter is missing or not accepted by the kind
        """
        if self.kind is ModelKind.NOISE_LOCAL:
            if self.flip_probability is None:
                raise ValueError("noise model requires flip_probability q in [0, 0.5]")
        elif self.flip_probability is not None:
            raise ValueError(f"model kind {self.kind.value!r} takes no flip_probability")
        return self

    @property
    def label(self) -> str:
        """Command-line form, e.g. ``quantum`` or ``noise:q=0.1``."""
        if self.kind is ModelKind.NOISE_LOCAL:
            return f"{self.kind.value}:q={self.flip_probability!r}"
        return self.kind.value

    @classmethod
    def quantum(cls) -> "ModelSpec":
        return cls(kind=ModelKind.QUANTUM)

    @classmethod
    def bell_sign(cls) -> "ModelSpec":
        return cls(kind=ModelKind.BELL_SIGN_LOCAL)

    @classmethod
    def noise(cls, q: float) -> "ModelSpec":
        return cls(kind=ModelKind.NOISE_LOCAL, flip_probability=q)

    @classmethod
    def quantum_mimic(cls) -> "ModelSpec":
        return cls(kind=ModelKind.QUANTUM_MIMIC_NONLOCAL)


class SeedSpec(_Frozen):
    """Master seed from which every experiment's random substream is derived."""

    master_seed: int = Field(default=0, ge=0, lt=2**64)


class ExperimentResult(_Frozen):
    """Counts of one experiment: m same-sign products out of n pairs."""

    m: int = Field(..., ge=0)
    n: int = Field(..., ge=1)
    theta_a: Angle
    theta_b: Angle

    @model_validator(mode="after")
    def validate_counts(self) -> Self:
        """Ensure 0 <= m <= n."""
        if self.m > self.n:
            raise ValueError(f"m={self.m} exceeds n={self.n}")
        return self

    @computed_field  # type: ignore[prop-decorator]
    @property
    def theta_ab(self) -> float:
        """Angle difference reduced to [0, pi]."""
        return canonical_difference(self.theta_a, self.theta_b)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def correlation(self) -> float:
        """Empirical correlation 2m/n - 1."""
        return correlation_from_counts(self.m, self.n)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def s(self) -> float:
        """Empirical S-function m/n."""
        return s_from_counts(self.m, self.n)


class BatchResult(_Frozen):
    """N experiments with a shared run count, Gamma and the inequality verdict."""

    experiments: tuple[ExperimentResult, ...] = Field(..., min_length=1)
    n_runs: int = Field(..., ge=1)
    total_same_sign: int = Field(..., ge=0)
    gamma: float
    threshold: float
    margin: float
    verdict: Verdict

    @model_validator(mode="after")
    def validate_consistency(self) -> Self:
        """Check shared n, the count total and the exact verdict."""
        for index, experiment in enumerate(self.experiments):
            if experiment.n != self.n_runs:
                raise ValueError(
                    f"experiment {index} has n={experiment.n}, batch uses n={self.n_runs}"
                )
        if sum(e.m for e in self.experiments) != self.total_same_sign:
            raise ValueError("total_same_sign does not equal the sum of experiment counts")
        expected = (
            Verdict.SATISFIED
            if self.total_same_sign >= len(self.experiments)
            else Verdict.VIOLATED
        )
        if self.verdict is not expected:
            raise ValueError(f"verdict {self.verdict} inconsistent with counts")
        return self

    @classmethod
    def from_experiments(cls, experiments: list[ExperimentResult]) -> "BatchResult":
        """Build a batch from index-ordered results.

        Gamma is formed as the exact rational (sum of m_l)/n and compared
        exactly against N/n.
        """
        if not experiments:
            raise ValueError("a batch needs at least one experiment")
        n_runs = experiments[0].n
        exact = exact_gamma_fraction((e.m for e in experiments), n_runs)
        check = check_inequality(exact, len(experiments), n_runs)
        return cls(
            experiments=tuple(experiments),
            n_runs=n_runs,
            total_same_sign=sum(e.m for e in experiments),
            gamma=float(exact),
            threshold=len(experiments) / n_runs,
            margin=check.margin,
            verdict=check.verdict,
        )

    @property
    def n_experiments(self) -> int:
        return len(self.experiments)

    @property
    def gamma_exact(self) -> Fraction:
        """Gamma as an exact rational."""
        return Fraction(self.total_same_sign, self.n_runs)


class ExperimentConfig(_Frozen):
    """One experiment: n_runs pairs measured at (theta_a, theta_b)."""

    model: ModelSpec
    theta_a: Angle
    theta_b: Angle
    n_runs: int = Field(..., ge=1)


class BatchConfig(_Frozen):
    """N experiments sharing a model and a run count.

    The equal-angle exclusion is checked when the batch runs; the test is
    exact on the canonical difference, so near-equal pairs are kept.
    """

    model: ModelSpec
    angle_pairs: tuple[tuple[Angle, Angle], ...] = Field(..., min_length=1)
    n_runs: int = Field(..., ge=1)
    exclude_equal_angles: bool = True

    @property
    def n_experiments(self) -> int:
        return len(self.angle_pairs)

    def equal_angle_indices(self) -> list[int]:
        """Indices of pairs whose canonical difference is exactly zero."""
        return [
            index
            for index, (theta_a, theta_b) in enumerate(self.angle_pairs)
            if canonical_difference(theta_a, theta_b) == 0.0
        ]

    def experiment(self, index: int) -> ExperimentConfig:
        theta_a, theta_b = self.angle_pairs[index]
        return ExperimentConfig(
            model=self.model, theta_a=theta_a, theta_b=theta_b, n_runs=self.n_runs
        )


class OutcomeFrequencies(_Frozen):
    """Relative frequencies of the outcome pairs (+1,+1), (+1,-1), (-1,+1), (-1,-1)."""

    p_pp: float = Field(..., ge=0.0, le=1.0)
    p_pm: float = Field(..., ge=0.0, le=1.0)
    p_mp: float = Field(..., ge=0.0, le=1.0)
    p_mm: float = Field(..., ge=0.0, le=1.0)

    @model_validator(mode="after")
    def validate_normalized(self) -> Self:
        """Probabilities must sum to one."""
        total = math.fsum((self.p_pp, self.p_pm, self.p_mp, self.p_mm))
        if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=_JOINT_ABS_TOL):
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        return self

    def probability(self, r_a: Outcome, r_b: Outcome) -> float:
        """Probability of the outcome pair (r_a, r_b)."""
        if r_a == 1:
            return self.p_pp if r_b == 1 else self.p_pm
        return self.p_mp if r_b == 1 else self.p_mm

    @property
    def correlation(self) -> float:
        """Expectation of r_a * r_b."""
        return (self.p_pp + self.p_mm) - (self.p_pm + self.p_mp)

    @property
    def marginal_a(self) -> float:
        """Probability that side A reads +1."""
        return self.p_pp + self.p_pm

    @property
    def marginal_b(self) -> float:
        """Probability that side B reads +1."""
        return self.p_pp + self.p_mp


class JointDistribution(OutcomeFrequencies):
    """Singlet outcome law: cells in [0, 1/2], p_pp = p_mm, p_pm = p_mp, uniform marginals."""

    p_pp: float = Field(..., ge=0.0, le=0.5)
    p_pm: float = Field(..., ge=0.0, le=0.5)
    p_mp: float = Field(..., ge=0.0, le=0.5)
    p_mm: float = Field(..., ge=0.0, le=0.5)

    @model_validator(mode="after")
    def validate_singlet_symmetry(self) -> Self:
        """Equal-outcome and opposite-outcome cells pair up; marginals are 1/2."""
        cell_pairs = (("p_pp/p_mm", self.p_pp, self.p_mm), ("p_pm/p_mp", self.p_pm, self.p_mp))
        for name, left, right in cell_pairs:
            if not math.isclose(left, right, rel_tol=0.0, abs_tol=_JOINT_ABS_TOL):
                raise ValueError(f"{name} must be equal, got {left!r} and {right!r}")
        for marginal in (self.marginal_a, self.marginal_b):
            if not math.isclose(marginal, 0.5, rel_tol=0.0, abs_tol=_JOINT_ABS_TOL):
                raise ValueError(f"marginals must be 1/2, got {marginal!r}")
        return self


class ViolationReport(_Frozen):
    """Exact quantum Gamma for a list of angle differences against N/n."""

    n_runs: int = Field(..., ge=1)
    n_experiments: int = Field(..., ge=1)
    angle_window_upper: float = Field(..., gt=0.0, le=math.pi)
    exact_gamma_qm: float = Field(..., ge=0.0)
    threshold: float
    margin: float
    expectation_verdict: Verdict
    finite_sample_violation_probability: float = Field(..., ge=0.0, le=1.0)
    out_of_window: tuple[int, ...] = ()
    beyond_right_angle: tuple[int, ...] = ()

    @model_validator(mode="after")
    def validate_verdict(self) -> Self:
        """VIOLATED exactly when Gamma falls below N/n beyond rounding slack."""
        on_boundary = math.isclose(self.exact_gamma_qm, self.threshold, rel_tol=BOUNDARY_RTOL)
        below = self.exact_gamma_qm < self.threshold and not on_boundary
        expected = Verdict.VIOLATED if below else Verdict.SATISFIED
        if self.expectation_verdict is not expected:
            raise ValueError(
                f"expectation_verdict {self.expectation_verdict} inconsistent with "
                f"gamma={self.exact_gamma_qm!r}, threshold={self.threshold!r}"
            )
        return self


class AssumptionAudit(_Frozen):
    """How often a model produced m = 0 at a fixed pair of settings."""

    model: ModelSpec
    theta_a: Angle
    theta_b: Angle
    theta_ab: float
    n_runs: int = Field(..., ge=1)
    trials: int = Field(..., ge=1)
    zero_m_count: int = Field(..., ge=0)
    zero_m_frequency: float = Field(..., ge=0.0, le=1.0)
    # (1 - S)^n for models with a closed-form correlation, else None
    expected_zero_m_frequency: float | None = None
    all_counts_positive: bool = Field(..., serialization_alias=AUDIT_FLAG_KEY)

    @model_validator(mode="after")
    def validate_frequency(self) -> Self:
        """Frequency and flag must agree with the zero count."""
        if self.zero_m_count > self.trials:
            raise ValueError("zero_m_count exceeds trials")
        if self.zero_m_frequency != self.zero_m_count / self.trials:
            raise ValueError("zero_m_frequency must equal zero_m_count / trials")
        if self.all_counts_positive != (self.zero_m_count == 0):
            raise ValueError("all_counts_positive must be true exactly when no trial had m = 0")
        return self


class SweepRow(_Frozen):
    """Exact and empirical C and S at one angle difference."""

    theta_ab: float
    c_exact: float | None
    c_emp: float
    s_exact: float | None
    s_emp: float
