"""Pair-response models: quantum reference, local hidden-variable models and a nonlocal mimic.

Every model sees both analyzer angles, the general form of a stochastic
realistic response. Local kinds ignore the remote angle; the locality
conformance tests check that they do. The quantum mimic uses both angles,
which is legal precisely because locality is not imposed.

Random draws per pair are fixed per kind (see ``draws_per_pair``). The
vectorized path ``iter_pair_chunks`` draws the same numbers in the same
order as looping ``sample_hidden`` then ``respond``.
"""

import logging
import math
from collections.abc import Callable, Iterator

import numpy as np

from . import quantum
from .core import (
    InvalidArgumentError,
    UnsupportedOperationError,
    canonical_angle,
    s_from_correlation,
)
from .models import ModelKind, ModelSpec, Outcome
from .quantum import OutcomeArray

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

_LOCAL_KINDS = frozenset({ModelKind.BELL_SIGN_LOCAL, ModelKind.NOISE_LOCAL})
_QUANTUM_KINDS = frozenset({ModelKind.QUANTUM, ModelKind.QUANTUM_MIMIC_NONLOCAL})


def _bell_sign_correlation(_model: ModelSpec, theta_ab: float) -> float:
    return -1.0 + 2.0 * theta_ab / math.pi


def _noise_correlation(model: ModelSpec, theta_ab: float) -> float:
    q = model.flip_probability or 0.0
    return (1.0 - 2.0 * q) ** 2 * _bell_sign_correlation(model, theta_ab)


def _quantum_correlation(_model: ModelSpec, theta_ab: float) -> float:
    return -math.cos(theta_ab)


# Closed-form correlations on the canonical difference in [0, pi].
CLOSED_FORMS: dict[ModelKind, Callable[[ModelSpec, float], float]] = {
    ModelKind.BELL_SIGN_LOCAL: _bell_sign_correlation,
    ModelKind.NOISE_LOCAL: _noise_correlation,
    ModelKind.QUANTUM: _quantum_correlation,
    ModelKind.QUANTUM_MIMIC_NONLOCAL: _quantum_correlation,
}


def _unknown_kind(model: ModelSpec) -> InvalidArgumentError:
    return InvalidArgumentError("model", f"unknown model kind {model.kind!r}")


def is_local(model: ModelSpec) -> bool:
    """True for kinds whose outcomes depend only on the local angle."""
    return model.kind in _LOCAL_KINDS


def is_quantum(model: ModelSpec) -> bool:
    """True for kinds that reproduce the singlet statistics."""
    return model.kind in _QUANTUM_KINDS


def has_closed_form(model: ModelSpec) -> bool:
    return model.kind in CLOSED_FORMS


def draws_per_pair(model: ModelSpec) -> int:
    """Uniform draws one pair consumes, constant per kind."""
    match model.kind:
        case ModelKind.QUANTUM | ModelKind.QUANTUM_MIMIC_NONLOCAL:
            return quantum.DRAWS_PER_PAIR
        case ModelKind.BELL_SIGN_LOCAL:
            return 1
        case ModelKind.NOISE_LOCAL:
            return 3
        case _:
            raise _unknown_kind(model)


def sample_hidden(model: ModelSpec, rng: np.random.Generator) -> float:
    """Draw the hidden variable for one pair.

    Local kinds draw lambda uniform on [0, 2*pi); quantum kinds carry no
    hidden variable, return 0 and draw nothing.
    """
    if model.kind in _QUANTUM_KINDS:
        return 0.0
    if model.kind in _LOCAL_KINDS:
        return TWO_PI * float(rng.random())
    raise _unknown_kind(model)


def _sign(x: float) -> Outcome:
    # sign(0) is +1
    return 1 if x >= 0.0 else -1


def _flip(r: Outcome) -> Outcome:
    return -1 if r == 1 else 1


def respond(
    model: ModelSpec,
    theta_a: float,
    theta_b: float,
    hidden: float,
    rng: np.random.Generator,
) -> tuple[Outcome, Outcome]:
    """Outcomes of one pair given both settings and the hidden variable.

    Raises:
        InvalidArgumentError: If the model kind is unknown
    """
    match model.kind:
        case ModelKind.QUANTUM | ModelKind.QUANTUM_MIMIC_NONLOCAL:
            return quantum.sample_pair(theta_a, theta_b, rng)
        case ModelKind.BELL_SIGN_LOCAL:
            return _sign(math.cos(hidden - theta_a)), _flip(_sign(math.cos(hidden - theta_b)))
        case ModelKind.NOISE_LOCAL:
            q = model.flip_probability or 0.0
            r_a = _sign(math.cos(hidden - theta_a))
            r_b = _flip(_sign(math.cos(hidden - theta_b)))
            # Both flip draws are consumed whether or not a flip happens
            u_a, u_b = rng.random(2)
            if u_a < q:
                r_a = _flip(r_a)
            if u_b < q:
                r_b = _flip(r_b)
            return r_a, r_b
        case _:
            raise _unknown_kind(model)


def exact_model_correlation(model: ModelSpec, theta_ab: float) -> float:
    """Closed-form correlation of a model at angle difference ``theta_ab``.

    Raises:
        UnsupportedOperationError: If the kind has no closed form
    """
    closed_form = CLOSED_FORMS.get(model.kind)
    if closed_form is None:
        raise UnsupportedOperationError(f"model {model.label!r} has no closed-form correlation")
    return closed_form(model, canonical_angle(theta_ab))


def exact_model_s(model: ModelSpec, theta_ab: float) -> float:
    """Closed-form S-function (1 + C)/2 of a model.

    Quantum kinds return sin^2(theta/2) directly; it stays accurate at
    small angles where 1 - cos(theta) cancels.

    Raises:
        UnsupportedOperationError: If the kind has no closed form
    """
    if model.kind in _QUANTUM_KINDS and model.kind in CLOSED_FORMS:
        return quantum.exact_s(theta_ab)
    return s_from_correlation(exact_model_correlation(model, theta_ab))


def _sign_array(x: np.ndarray) -> OutcomeArray:
    return np.where(x >= 0.0, 1, -1).astype(np.int8)


def iter_pair_chunks(
    model: ModelSpec,
    theta_a: float,
    theta_b: float,
    n: int,
    rng: np.random.Generator,
    chunk_size: int = 1_000_000,
) -> Iterator[tuple[OutcomeArray, OutcomeArray]]:
    """Yield outcome arrays for ``n`` pairs in chunks of at most ``chunk_size``."""
    if chunk_size < 1:
        raise InvalidArgumentError("chunk_size", f"must be >= 1, got {chunk_size}")

    if model.kind in _QUANTUM_KINDS:
        yield from quantum.iter_pair_chunks(theta_a, theta_b, n, rng, chunk_size)
        return
    if model.kind not in _LOCAL_KINDS:
        raise _unknown_kind(model)

    width = draws_per_pair(model)
    q = model.flip_probability or 0.0
    remaining = n
    while remaining > 0:
        size = min(chunk_size, remaining)
        uniforms = rng.random((size, width))
        hidden = TWO_PI * uniforms[:, 0]
        r_a = _sign_array(np.cos(hidden - theta_a))
        r_b = -_sign_array(np.cos(hidden - theta_b))
        if model.kind is ModelKind.NOISE_LOCAL:
            r_a = np.where(uniforms[:, 1] < q, -r_a, r_a).astype(np.int8)
            r_b = np.where(uniforms[:, 2] < q, -r_b, r_b).astype(np.int8)
        yield r_a, r_b
        remaining -= size


def simulate_pairs(
    model: ModelSpec,
    theta_a: float,
    theta_b: float,
    n: int,
    rng: np.random.Generator,
    chunk_size: int = 1_000_000,
) -> tuple[OutcomeArray, OutcomeArray]:
    """Outcome arrays for ``n`` pairs; same stream use as n scalar pairs."""
    chunks = list(iter_pair_chunks(model, theta_a, theta_b, n, rng, chunk_size))
    if not chunks:
        empty = np.empty(0, dtype=np.int8)
        return empty, empty.copy()
    return (
        np.concatenate([a for a, _ in chunks]),
        np.concatenate([b for _, b in chunks]),
    )
