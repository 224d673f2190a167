"""Singlet-state predictions and a per-pair outcome sampler.

For the spin singlet the joint outcome law at analyzer difference theta is
P(r_a, r_b) = (1 - r_a * r_b * cos theta) / 4: uniform marginals on each
side and correlation -cos theta.

Sampling draws side A uniformly, then makes side B opposite with
probability (1 + cos theta) / 2. Every pair consumes exactly two uniform
draws, so substreams stay aligned whatever the outcomes.
"""

import math
from collections.abc import Iterable, Iterator

import numpy as np
import numpy.typing as npt

from .core import canonical_angle, canonical_difference
from .models import JointDistribution, Outcome, OutcomeFrequencies

DRAWS_PER_PAIR = 2

OutcomeArray = npt.NDArray[np.int8]


def _opposite_probability(theta_ab: float) -> float:
    # cos^2(theta/2) written as (1 + cos theta)/2 so theta = pi gives exactly 0
    return (1.0 + math.cos(theta_ab)) / 2.0


def singlet_joint(theta_ab: float) -> JointDistribution:
    """Joint outcome distribution at analyzer difference ``theta_ab``.

    Raises:
        InvalidArgumentError: If the angle is not finite
    """
    s = exact_s(theta_ab)
    same = s / 2.0
    opposite = (1.0 - s) / 2.0
    return JointDistribution(p_pp=same, p_pm=opposite, p_mp=opposite, p_mm=same)


def exact_correlation(theta_ab: float) -> float:
    """Singlet correlation -cos(theta_ab)."""
    return -math.cos(canonical_angle(theta_ab))


def exact_s(theta_ab: float) -> float:
    """Singlet S-function sin^2(theta_ab / 2)."""
    return math.sin(canonical_angle(theta_ab) / 2.0) ** 2


def exact_gamma(theta_list: Iterable[float]) -> float:
    """Sum of sin^2(theta_l / 2) over the experiments."""
    return math.fsum(exact_s(theta) for theta in theta_list)


def sample_pair(
    theta_a: float, theta_b: float, rng: np.random.Generator
) -> tuple[Outcome, Outcome]:
    """Draw one outcome pair from the singlet law.

    Consumes exactly two uniform draws from ``rng``.
    """
    p_opposite = _opposite_probability(canonical_difference(theta_a, theta_b))
    u_a, u_b = rng.random(DRAWS_PER_PAIR)
    r_a: Outcome = 1 if u_a < 0.5 else -1
    r_b: Outcome = r_a if u_b >= p_opposite else (-1 if r_a == 1 else 1)
    return r_a, r_b


def iter_pair_chunks(
    theta_a: float,
    theta_b: float,
    n: int,
    rng: np.random.Generator,
    chunk_size: int,
) -> Iterator[tuple[OutcomeArray, OutcomeArray]]:
    """Yield outcome arrays for ``n`` pairs, at most ``chunk_size`` at a time.

    The draws match ``n`` successive ``sample_pair`` calls on the same stream.
    """
    p_opposite = _opposite_probability(canonical_difference(theta_a, theta_b))
    remaining = n
    while remaining > 0:
        size = min(chunk_size, remaining)
        uniforms = rng.random((size, DRAWS_PER_PAIR))
        r_a = np.where(uniforms[:, 0] < 0.5, 1, -1).astype(np.int8)
        r_b = np.where(uniforms[:, 1] < p_opposite, -r_a, r_a).astype(np.int8)
        yield r_a, r_b
        remaining -= size


def sample_pairs(
    theta_a: float,
    theta_b: float,
    n: int,
    rng: np.random.Generator,
    chunk_size: int = 1_000_000,
) -> tuple[OutcomeArray, OutcomeArray]:
    """Vectorized ``sample_pair`` for ``n`` pairs (2n uniform draws)."""
    chunks = list(iter_pair_chunks(theta_a, theta_b, n, rng, chunk_size))
    if not chunks:
        empty = np.empty(0, dtype=np.int8)
        return empty, empty.copy()
    return (
        np.concatenate([a for a, _ in chunks]),
        np.concatenate([b for _, b in chunks]),
    )


def empirical_joint(r_a: OutcomeArray, r_b: OutcomeArray) -> OutcomeFrequencies:
    """Relative frequencies of the four outcome pairs."""
    total = len(r_a)
    if total == 0 or len(r_b) != total:
        raise ValueError("outcome arrays must be non-empty and of equal length")
    a_plus = r_a == 1
    b_plus = r_b == 1
    pp = int(np.count_nonzero(a_plus & b_plus))
    pm = int(np.count_nonzero(a_plus & ~b_plus))
    mp = int(np.count_nonzero(~a_plus & b_plus))
    mm = total - pp - pm - mp
    return OutcomeFrequencies(
        p_pp=pp / total, p_pm=pm / total, p_mp=mp / total, p_mm=mm / total
    )
