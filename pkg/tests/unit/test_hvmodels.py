"""Unit tests for the pair-response models."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bell_gamma_toolkit import hvmodels, quantum
from bell_gamma_toolkit.core import InvalidArgumentError, UnsupportedOperationError
from bell_gamma_toolkit.models import ModelKind, ModelSpec

LOCAL_MODELS = [ModelSpec.bell_sign(), ModelSpec.noise(0.1)]
ALL_MODELS = [ModelSpec.quantum(), *LOCAL_MODELS, ModelSpec.quantum_mimic()]


def _philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _bogus_model() -> ModelSpec:
    return ModelSpec.model_construct(kind="bogus", flip_probability=None)  # type: ignore[arg-type]


class TestModelProperties:
    """Static properties of each kind."""

    @pytest.mark.parametrize(
        "model, draws, local, quantum_like",
        [
            (ModelSpec.quantum(), 2, False, True),
            (ModelSpec.bell_sign(), 1, True, False),
            (ModelSpec.noise(0.2), 3, True, False),
            (ModelSpec.quantum_mimic(), 2, False, True),
        ],
    )
    def test_kind_table(self, model: ModelSpec, draws: int, local: bool, quantum_like: bool) -> None:
        """Draw counts, locality and quantum statistics per kind."""
        assert hvmodels.draws_per_pair(model) == draws
        assert hvmodels.is_local(model) is local
        assert hvmodels.is_quantum(model) is quantum_like
        assert hvmodels.has_closed_form(model)

    def test_unknown_kind(self) -> None:
        """Kinds outside the table are rejected everywhere."""
        model = _bogus_model()
        with pytest.raises(InvalidArgumentError, match="unknown model kind"):
            hvmodels.draws_per_pair(model)
        with pytest.raises(InvalidArgumentError):
            hvmodels.sample_hidden(model, _philox(0))
        with pytest.raises(InvalidArgumentError):
            hvmodels.respond(model, 0.0, 1.0, 0.0, _philox(0))
        with pytest.raises(InvalidArgumentError):
            list(hvmodels.iter_pair_chunks(model, 0.0, 1.0, 5, _philox(0)))


class TestClosedForms:
    """Exact correlations."""

    @pytest.mark.parametrize(
        "theta, expected", [(0.0, -1.0), (math.pi / 4, -0.5), (math.pi / 2, 0.0), (math.pi, 1.0)]
    )
    def test_bell_sign_is_linear(self, theta: float, expected: float) -> None:
        """C = -1 + 2*theta/pi."""
        assert hvmodels.exact_model_correlation(ModelSpec.bell_sign(), theta) == pytest.approx(
            expected, abs=1e-15
        )

    def test_noise_scales_bell_sign(self) -> None:
        """Independent flips shrink the correlation by (1 - 2q)^2."""
        value = hvmodels.exact_model_correlation(ModelSpec.noise(0.1), 0.0)
        assert value == pytest.approx(-0.64, abs=1e-15)
        assert hvmodels.exact_model_correlation(ModelSpec.noise(0.5), 1.0) == 0.0

    def test_quantum_kinds_share_cosine(self) -> None:
        """Both quantum kinds give -cos(theta)."""
        for model in (ModelSpec.quantum(), ModelSpec.quantum_mimic()):
            assert hvmodels.exact_model_correlation(model, math.pi / 3) == pytest.approx(-0.5, abs=1e-12)

    def test_reduced_to_canonical_angle(self) -> None:
        """Angles outside [0, pi] are folded first."""
        model = ModelSpec.bell_sign()
        assert hvmodels.exact_model_correlation(model, -1.0) == hvmodels.exact_model_correlation(model, 1.0)
        assert hvmodels.exact_model_correlation(model, 1.5 * math.pi) == pytest.approx(0.0, abs=1e-12)

    def test_missing_closed_form(self, mocker) -> None:
        """Kinds without a closed form raise UnsupportedOperationError."""
        mocker.patch.dict(hvmodels.CLOSED_FORMS, clear=True)
        assert not hvmodels.has_closed_form(ModelSpec.bell_sign())
        with pytest.raises(UnsupportedOperationError, match="bell-sign"):
            hvmodels.exact_model_correlation(ModelSpec.bell_sign(), 1.0)

    @pytest.mark.parametrize(
        "model, theta, expected",
        [
            (ModelSpec.bell_sign(), math.pi / 2, 0.5),
            (ModelSpec.bell_sign(), math.pi, 1.0),
            (ModelSpec.noise(0.1), 0.0, 0.18),
            (ModelSpec.quantum(), math.pi / 3, 0.25),
        ],
    )
    def test_exact_model_s(self, model: ModelSpec, theta: float, expected: float) -> None:
        """S = (1 + C)/2 for every kind with a closed form."""
        assert hvmodels.exact_model_s(model, theta) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("model", [ModelSpec.quantum(), ModelSpec.quantum_mimic()], ids=lambda m: m.label)
    def test_exact_model_s_small_angle(self, model: ModelSpec) -> None:
        """Quantum kinds keep sin^2(theta/2) where 1 - cos(theta) cancels to zero."""
        value = hvmodels.exact_model_s(model, 1e-9)
        assert value > 0.0
        assert value == pytest.approx(quantum.exact_s(1e-9), rel=1e-15)

    def test_exact_model_s_without_closed_form(self, mocker) -> None:
        """No closed form means no exact S either."""
        mocker.patch.dict(hvmodels.CLOSED_FORMS, clear=True)
        with pytest.raises(UnsupportedOperationError):
            hvmodels.exact_model_s(ModelSpec.quantum(), 1.0)

    @pytest.mark.slow
    @pytest.mark.parametrize("theta", [0.0, 0.3, 1.0, math.pi / 2, 2.5, math.pi])
    def test_bell_sign_matches_integral_over_hidden_variable(self, theta: float) -> None:
        """Midpoint rule over lambda on a 10^6-point grid agrees to 1e-3."""
        grid = 2 * math.pi * (np.arange(1_000_000) + 0.5) / 1_000_000
        r_a = np.where(np.cos(grid) >= 0.0, 1, -1)
        r_b = -np.where(np.cos(grid - theta) >= 0.0, 1, -1)
        integral = float(np.mean(r_a * r_b))
        exact = hvmodels.exact_model_correlation(ModelSpec.bell_sign(), theta)
        assert abs(integral - exact) < 1e-3


class TestSampling:
    """Scalar and vectorized sampling paths."""

    def test_hidden_variable_range(self) -> None:
        """Local kinds draw lambda in [0, 2*pi); quantum kinds draw nothing."""
        rng = _philox(4)
        values = [hvmodels.sample_hidden(ModelSpec.bell_sign(), rng) for _ in range(1000)]
        assert all(0.0 <= value < 2 * math.pi for value in values)

        rng, reference = _philox(4), _philox(4)
        assert hvmodels.sample_hidden(ModelSpec.quantum(), rng) == 0.0
        assert rng.random() == reference.random()

    @pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.label)
    @pytest.mark.parametrize("chunk_size", [1, 64, 1_000_000])
    def test_vectorized_matches_scalar_loop(self, model: ModelSpec, chunk_size: int) -> None:
        """simulate_pairs equals n rounds of sample_hidden then respond on the same stream."""
        n = 300
        scalar_rng, vector_rng = _philox(77), _philox(77)
        expected = []
        for _ in range(n):
            hidden = hvmodels.sample_hidden(model, scalar_rng)
            expected.append(hvmodels.respond(model, 0.4, 2.1, hidden, scalar_rng))
        r_a, r_b = hvmodels.simulate_pairs(model, 0.4, 2.1, n, vector_rng, chunk_size)
        assert list(zip(r_a.tolist(), r_b.tolist(), strict=True)) == expected
        assert scalar_rng.random() == vector_rng.random()

    @pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.label)
    def test_draw_count_per_pair(self, model: ModelSpec) -> None:
        """One pair consumes exactly draws_per_pair uniforms."""
        rng, reference = _philox(8), _philox(8)
        hvmodels.respond(model, 0.1, 0.9, hvmodels.sample_hidden(model, rng), rng)
        reference.random(hvmodels.draws_per_pair(model))
        assert rng.random() == reference.random()

    def test_invalid_chunk_size(self) -> None:
        """chunk_size must be positive."""
        with pytest.raises(InvalidArgumentError, match="chunk_size"):
            hvmodels.simulate_pairs(ModelSpec.bell_sign(), 0.0, 1.0, 10, _philox(0), chunk_size=0)

    def test_zero_pairs(self) -> None:
        """n = 0 gives empty arrays."""
        r_a, r_b = hvmodels.simulate_pairs(ModelSpec.noise(0.1), 0.0, 1.0, 0, _philox(0))
        assert r_a.size == 0 and r_b.size == 0

    def test_bell_sign_statistics(self) -> None:
        """Empirical C at 10 random angles within 4 sigma of the linear law."""
        n = 100_000
        thetas = _philox(99).uniform(0.0, math.pi, size=10)
        for index, theta in enumerate(thetas):
            r_a, r_b = hvmodels.simulate_pairs(ModelSpec.bell_sign(), 0.0, float(theta), n, _philox(index))
            empirical = float(np.mean(r_a.astype(np.int64) * r_b))
            exact = -1.0 + 2.0 * float(theta) / math.pi
            assert abs(empirical - exact) <= 4 * math.sqrt((1 - exact**2) / n) + 1e-12

    def test_hidden_variable_mean(self) -> None:
        """The mean of 10^5 lambda draws sits within 4 sigma of pi."""
        n = 100_000
        rng = _philox(31)
        values = np.array([hvmodels.sample_hidden(ModelSpec.bell_sign(), rng) for _ in range(n)])
        sigma = 2 * math.pi / math.sqrt(12)
        assert abs(float(values.mean()) - math.pi) <= 4 * sigma / math.sqrt(n)

    @pytest.mark.slow
    @pytest.mark.parametrize("model", [ModelSpec.noise(0.15), ModelSpec.quantum_mimic()], ids=lambda m: m.label)
    def test_matches_closed_form(self, model: ModelSpec) -> None:
        """Empirical C at 10 random angles within 4 sigma of the closed form."""
        n = 100_000
        thetas = _philox(101).uniform(0.0, math.pi, size=10)
        for index, theta in enumerate(thetas):
            r_a, r_b = hvmodels.simulate_pairs(model, 0.2, 0.2 + float(theta), n, _philox(500 + index))
            empirical = float(np.mean(r_a.astype(np.int64) * r_b))
            exact = hvmodels.exact_model_correlation(model, float(theta))
            assert abs(empirical - exact) <= 4 * math.sqrt((1 - exact**2) / n) + 1e-12, theta

    def test_fully_noisy_model_is_uncorrelated(self) -> None:
        """With q = 1/2 the empirical C is within 4 sigma of zero."""
        n = 100_000
        r_a, r_b = hvmodels.simulate_pairs(ModelSpec.noise(0.5), 0.0, 0.7, n, _philox(12))
        assert abs(float(np.mean(r_a.astype(np.int64) * r_b))) <= 4 / math.sqrt(n)


class TestLocality:
    """Local kinds ignore the remote setting; the mimic does not."""

    @pytest.mark.parametrize("model", LOCAL_MODELS, ids=lambda m: m.label)
    @settings(max_examples=1000, deadline=None)
    @given(
        theta_a=st.floats(min_value=-7.0, max_value=7.0),
        theta_b=st.floats(min_value=-7.0, max_value=7.0),
        other=st.floats(min_value=-7.0, max_value=7.0),
        seed=st.integers(min_value=0, max_value=2**32),
    )
    def test_outcome_ignores_remote_angle(
        self, model: ModelSpec, theta_a: float, theta_b: float, other: float, seed: int
    ) -> None:
        """With lambda and the stream fixed, r_A does not see theta_B and r_B does not see theta_A."""
        hidden = hvmodels.sample_hidden(model, _philox(seed))
        base_a, base_b = hvmodels.respond(model, theta_a, theta_b, hidden, _philox(seed + 1))
        moved_b = hvmodels.respond(model, theta_a, other, hidden, _philox(seed + 1))
        moved_a = hvmodels.respond(model, other, theta_b, hidden, _philox(seed + 1))
        assert moved_b[0] == base_a
        assert moved_a[1] == base_b

    def test_mimic_outcome_depends_on_remote_angle(self) -> None:
        """Some stream makes r_B change when only theta_A moves."""
        changed = 0
        for seed in range(1000):
            _, r_b = hvmodels.respond(ModelSpec.quantum_mimic(), 0.0, 1.0, 0.0, _philox(seed))
            _, moved = hvmodels.respond(ModelSpec.quantum_mimic(), 1.0, 1.0, 0.0, _philox(seed))
            changed += r_b != moved
        assert changed > 0

    @pytest.mark.slow
    def test_mimic_reproduces_singlet_cells(self) -> None:
        """At 10 random setting pairs every outcome cell is within 4 sigma of the singlet law."""
        n = 100_000
        settings_rng = _philox(202)
        cells = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        for index in range(10):
            theta_a, theta_b = (float(value) for value in settings_rng.uniform(-math.pi, math.pi, size=2))
            r_a, r_b = hvmodels.simulate_pairs(ModelSpec.quantum_mimic(), theta_a, theta_b, n, _philox(index))
            observed = quantum.empirical_joint(r_a, r_b)
            exact = quantum.singlet_joint(theta_b - theta_a)
            for a, b in cells:
                p = exact.probability(a, b)
                assert abs(observed.probability(a, b) - p) <= 4 * math.sqrt(p * (1 - p) / n) + 1e-12

    def test_kind_enum_values_are_cli_names(self) -> None:
        """Enum values double as model names on the command line."""
        assert [kind.value for kind in ModelKind] == ["quantum", "bell-sign", "noise", "quantum-mimic"]
