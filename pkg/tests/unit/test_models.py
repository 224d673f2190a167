"""Tests for data models."""

import json
import math
from fractions import Fraction

import pytest
from pydantic import ValidationError

from bell_gamma_toolkit.core import Verdict
from bell_gamma_toolkit.models import (
    AssumptionAudit,
    BatchConfig,
    BatchResult,
    ExperimentResult,
    JointDistribution,
    ModelKind,
    ModelSpec,
    OutcomeFrequencies,
    SeedSpec,
    SweepRow,
    ViolationReport,
)


class TestModelSpec:
    """Test model kinds and their parameters."""

    def test_constructors(self) -> None:
        """Each shortcut builds the matching kind."""
        assert ModelSpec.quantum().kind is ModelKind.QUANTUM
        assert ModelSpec.bell_sign().kind is ModelKind.BELL_SIGN_LOCAL
        assert ModelSpec.quantum_mimic().kind is ModelKind.QUANTUM_MIMIC_NONLOCAL
        noise = ModelSpec.noise(0.1)
        assert noise.kind is ModelKind.NOISE_LOCAL
        assert noise.flip_probability == 0.1

    @pytest.mark.parametrize(
        "spec, label",
        [
            (ModelSpec.quantum(), "quantum"),
            (ModelSpec.bell_sign(), "bell-sign"),
            (ModelSpec.noise(0.25), "noise:q=0.25"),
            (ModelSpec.quantum_mimic(), "quantum-mimic"),
        ],
    )
    def test_label(self, spec: ModelSpec, label: str) -> None:
        """Labels are the command-line spelling."""
        assert spec.label == label

    def test_noise_requires_q(self) -> None:
        """NOISE_LOCAL without q is invalid."""
        with pytest.raises(ValidationError, match="requires flip_probability"):
            ModelSpec(kind=ModelKind.NOISE_LOCAL)

    @pytest.mark.parametrize("q", [-0.01, 0.51, math.nan])
    def test_noise_q_range(self, q: float) -> None:
        """q must lie in [0, 0.5]."""
        with pytest.raises(ValidationError):
            ModelSpec.noise(q)

    def test_other_kinds_reject_q(self) -> None:
        """Only the noise model takes a flip probability."""
        with pytest.raises(ValidationError, match="takes no flip_probability"):
            ModelSpec(kind=ModelKind.QUANTUM, flip_probability=0.1)

    def test_frozen(self) -> None:
        """Specs are immutable and hashable."""
        spec = ModelSpec.quantum()
        with pytest.raises(ValidationError):
            spec.kind = ModelKind.BELL_SIGN_LOCAL  # type: ignore[misc]
        assert hash(spec) == hash(ModelSpec.quantum())


class TestSeedSpec:
    """Test the master seed range."""

    def test_default(self) -> None:
        """The default seed is 0."""
        assert SeedSpec().master_seed == 0

    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_range(self, seed: int) -> None:
        """Seeds are unsigned 64-bit."""
        with pytest.raises(ValidationError):
            SeedSpec(master_seed=seed)


class TestExperimentResult:
    """Test count validation and derived fields."""

    def test_derived_fields(self) -> None:
        """C, S and the canonical angle follow from the counts."""
        result = ExperimentResult(m=25, n=100, theta_a=0.0, theta_b=-1.0)
        assert result.correlation == -0.5
        assert result.s == 0.25
        assert result.theta_ab == 1.0

    def test_m_above_n(self) -> None:
        """m may not exceed n."""
        with pytest.raises(ValidationError, match="exceeds"):
            ExperimentResult(m=11, n=10, theta_a=0.0, theta_b=1.0)

    def test_non_finite_angle(self) -> None:
        """Angles must be finite."""
        with pytest.raises(ValidationError):
            ExperimentResult(m=1, n=10, theta_a=math.inf, theta_b=1.0)

    def test_json_round_trip(self) -> None:
        """Computed fields appear in the dump and the dump validates back."""
        result = ExperimentResult(m=3, n=7, theta_a=0.1, theta_b=0.35)
        payload = json.loads(result.model_dump_json())
        assert payload["s"] == 3 / 7
        assert payload["correlation"] == 2 * 3 / 7 - 1
        assert ExperimentResult.model_validate(payload) == result


class TestBatchResult:
    """Test batch assembly and its consistency checks."""

    def _experiments(self, counts: list[int], n: int = 10) -> list[ExperimentResult]:
        return [ExperimentResult(m=m, n=n, theta_a=0.0, theta_b=0.5) for m in counts]

    def test_from_experiments(self) -> None:
        """Totals, Gamma and verdict come from the counts."""
        batch = BatchResult.from_experiments(self._experiments([0, 1, 0]))
        assert batch.total_same_sign == 1
        assert batch.gamma == 0.1
        assert batch.threshold == 0.3
        assert batch.verdict is Verdict.VIOLATED
        assert batch.margin == pytest.approx(-0.2, abs=1e-15)
        assert batch.gamma_exact == Fraction(1, 10)
        assert batch.n_experiments == 3

    def test_satisfied_at_equality(self) -> None:
        """sum(m) == N satisfies the inequality exactly."""
        batch = BatchResult.from_experiments(self._experiments([1, 1, 1]))
        assert batch.verdict is Verdict.SATISFIED
        assert batch.margin == 0.0

    def test_empty_rejected(self) -> None:
        """A batch needs at least one experiment."""
        with pytest.raises(ValueError):
            BatchResult.from_experiments([])

    def test_mixed_n_rejected(self) -> None:
        """All experiments share one run count."""
        experiments = self._experiments([1]) + self._experiments([1], n=20)
        with pytest.raises(ValidationError, match="batch uses n=10"):
            BatchResult.from_experiments(experiments)

    def test_inconsistent_verdict_rejected(self) -> None:
        """A hand-built result must agree with its counts."""
        with pytest.raises(ValidationError, match="inconsistent"):
            BatchResult(
                experiments=tuple(self._experiments([5])),
                n_runs=10,
                total_same_sign=5,
                gamma=0.5,
                threshold=0.1,
                margin=0.4,
                verdict=Verdict.VIOLATED,
            )

    def test_wrong_total_rejected(self) -> None:
        """total_same_sign is the sum of the counts."""
        with pytest.raises(ValidationError, match="total_same_sign"):
            BatchResult(
                experiments=tuple(self._experiments([5])),
                n_runs=10,
                total_same_sign=4,
                gamma=0.4,
                threshold=0.1,
                margin=0.3,
                verdict=Verdict.SATISFIED,
            )


class TestBatchConfig:
    """Test batch definitions."""

    def test_equal_angle_indices_use_canonical_difference(self) -> None:
        """Exactly equal pairs are found; near-equal pairs are kept."""
        config = BatchConfig(
            model=ModelSpec.quantum(),
            angle_pairs=((0.0, 0.0), (0.0, 1e-9), (1.0, 1.0), (0.5, -0.5)),
            n_runs=10,
        )
        assert config.equal_angle_indices() == [0, 2]

    def test_experiment_view(self) -> None:
        """Experiment l carries the shared model and run count."""
        config = BatchConfig(model=ModelSpec.bell_sign(), angle_pairs=((0.1, 0.2),), n_runs=5)
        experiment = config.experiment(0)
        assert (experiment.theta_a, experiment.theta_b, experiment.n_runs) == (0.1, 0.2, 5)
        assert experiment.model == ModelSpec.bell_sign()

    def test_empty_pairs_rejected(self) -> None:
        """N must be at least 1."""
        with pytest.raises(ValidationError):
            BatchConfig(model=ModelSpec.quantum(), angle_pairs=(), n_runs=5)

    def test_nan_angle_rejected(self) -> None:
        """Every angle must be finite."""
        with pytest.raises(ValidationError):
            BatchConfig(model=ModelSpec.quantum(), angle_pairs=((0.0, math.nan),), n_runs=5)


class TestJointDistribution:
    """Test outcome-pair probabilities."""

    def test_accessors(self) -> None:
        """Probabilities, correlation and marginals."""
        joint = JointDistribution(p_pp=0.1, p_pm=0.4, p_mp=0.4, p_mm=0.1)
        assert joint.probability(1, -1) == 0.4
        assert joint.probability(-1, -1) == 0.1
        assert joint.correlation == pytest.approx(-0.6, abs=1e-15)
        assert joint.marginal_a == pytest.approx(0.5, abs=1e-15)
        assert joint.marginal_b == pytest.approx(0.5, abs=1e-15)

    def test_frequencies_must_be_normalized(self) -> None:
        """Probabilities sum to one."""
        with pytest.raises(ValidationError, match="sum to"):
            OutcomeFrequencies(p_pp=0.5, p_pm=0.5, p_mp=0.5, p_mm=0.0)

    def test_frequencies_may_be_asymmetric(self) -> None:
        """Raw frequencies carry no singlet constraint."""
        frequencies = OutcomeFrequencies(p_pp=0.25, p_pm=0.25, p_mp=0.0, p_mm=0.5)
        assert frequencies.marginal_a == 0.5
        assert frequencies.marginal_b == 0.25

    def test_cells_capped_at_one_half(self) -> None:
        """No singlet cell exceeds 1/2."""
        with pytest.raises(ValidationError):
            JointDistribution(p_pp=0.6, p_pm=0.0, p_mp=0.0, p_mm=0.4)

    def test_boundary_cells_accepted(self) -> None:
        """Perfect correlation puts 1/2 in each equal-outcome cell."""
        joint = JointDistribution(p_pp=0.5, p_pm=0.0, p_mp=0.0, p_mm=0.5)
        assert joint.correlation == 1.0

    @pytest.mark.parametrize(
        "cells",
        [(0.25, 0.25, 0.0, 0.5), (0.3, 0.2, 0.4, 0.1), (0.2, 0.35, 0.25, 0.2)],
    )
    def test_asymmetric_cells_rejected(self, cells: tuple[float, ...]) -> None:
        """p_pp = p_mm and p_pm = p_mp are required."""
        p_pp, p_pm, p_mp, p_mm = cells
        with pytest.raises(ValidationError, match="must be equal"):
            JointDistribution(p_pp=p_pp, p_pm=p_pm, p_mp=p_mp, p_mm=p_mm)


class TestViolationReport:
    """Test the verdict consistency check."""

    def _report(self, gamma: float, threshold: float, verdict: Verdict) -> ViolationReport:
        return ViolationReport(
            n_runs=100,
            n_experiments=5,
            angle_window_upper=0.2,
            exact_gamma_qm=gamma,
            threshold=threshold,
            margin=gamma - threshold,
            expectation_verdict=verdict,
            finite_sample_violation_probability=0.5,
        )

    def test_boundary_slack(self) -> None:
        """A Gamma within rounding of N/n is SATISFIED."""
        report = self._report(0.05 * (1 - 1e-15), 0.05, Verdict.SATISFIED)
        assert report.expectation_verdict is Verdict.SATISFIED

    def test_inconsistent_verdict_rejected(self) -> None:
        """A clear shortfall must be reported as VIOLATED."""
        with pytest.raises(ValidationError, match="inconsistent"):
            self._report(0.01, 0.05, Verdict.SATISFIED)


def test_assumption_audit_consistency() -> None:
    """Frequency and flag must agree with the zero count."""
    fields = {
        "model": ModelSpec.quantum(),
        "theta_a": 0.0,
        "theta_b": 0.1,
        "theta_ab": 0.1,
        "n_runs": 10,
        "trials": 4,
    }
    audit = AssumptionAudit(**fields, zero_m_count=1, zero_m_frequency=0.25, all_counts_positive=False)
    assert audit.expected_zero_m_frequency is None
    assert audit.model_dump(by_alias=True)["eq9_empirically_holds"] is False
    with pytest.raises(ValidationError, match="all_counts_positive"):
        AssumptionAudit(**fields, zero_m_count=0, zero_m_frequency=0.0, all_counts_positive=False)
    with pytest.raises(ValidationError, match="zero_m_frequency"):
        AssumptionAudit(**fields, zero_m_count=1, zero_m_frequency=0.5, all_counts_positive=False)


def test_sweep_row_allows_missing_closed_form() -> None:
    """Exact columns are optional."""
    row = SweepRow(theta_ab=1.0, c_exact=None, c_emp=0.1, s_exact=None, s_emp=0.55)
    assert row.model_dump()["c_exact"] is None
