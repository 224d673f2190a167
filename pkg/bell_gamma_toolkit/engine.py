"""Experiment engine: n pairs per experiment, N experiments per batch.

Experiment ``l`` of a batch draws from its own counter-based substream,
``Philox`` keyed by ``SeedSequence(master_seed, spawn_key=(l,))``. Each
substream depends only on (master_seed, l), so experiments can run in any
order on any number of threads and the batch is still bit-identical.
"""

import itertools
import logging
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import hvmodels
from .core import InvalidArgumentError, ensure_finite
from .logging_utils import safe_log_payload
from .metrics import batch_duration_seconds, batches_total, experiments_total, pairs_simulated_total
from .models import BatchConfig, BatchResult, ExperimentConfig, ExperimentResult, SeedSpec

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 1_000_000


def experiment_stream(seed: SeedSpec, index: int) -> np.random.Generator:
    """Random substream for experiment ``index`` under ``seed``."""
    if index < 0:
        raise InvalidArgumentError("index", f"experiment index must be >= 0, got {index}")
    sequence = np.random.SeedSequence(entropy=seed.master_seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(sequence))


def run_experiment(
    config: ExperimentConfig,
    stream: np.random.Generator,
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> ExperimentResult:
    """Simulate ``config.n_runs`` pairs and count same-sign products.

    Args:
        config: Model, settings and run count
        stream: Random stream owned by this experiment
        chunk_size: Maximum pairs drawn per vectorized call

    Returns:
        Counts (m, n) at the configured settings
    """
    m = 0
    for r_a, r_b in hvmodels.iter_pair_chunks(
        config.model, config.theta_a, config.theta_b, config.n_runs, stream, chunk_size
    ):
        m += int(np.count_nonzero(r_a == r_b))

    label = config.model.label
    pairs_simulated_total.labels(model=label).inc(config.n_runs)
    experiments_total.labels(model=label).inc()
    logger.debug(
        "Experiment done: model=%s theta_a=%r theta_b=%r m=%d n=%d",
        label,
        config.theta_a,
        config.theta_b,
        m,
        config.n_runs,
    )
    return ExperimentResult(m=m, n=config.n_runs, theta_a=config.theta_a, theta_b=config.theta_b)


def run_batch(
    config: BatchConfig,
    seed: SeedSpec,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> BatchResult:
    """Run every experiment of a batch on its own substream.

    Args:
        config: Batch definition
        seed: Master seed
        workers: Threads used to evaluate experiments; results do not depend on it
        chunk_size: Maximum pairs drawn per vectorized call

    Returns:
        Index-ordered results with exact Gamma and the verdict

    Raises:
        InvalidArgumentError: If an equal-angle pair is present while excluded,
            or ``workers`` is below 1
    """
    if workers < 1:
        raise InvalidArgumentError("workers", f"must be >= 1, got {workers}")
    if config.exclude_equal_angles:
        equal = config.equal_angle_indices()
        if equal:
            raise InvalidArgumentError(
                "angle_pairs",
                f"experiment(s) {', '.join(str(i + 1) for i in equal[:10])} have "
                "theta_a == theta_b; this deterministic case is excluded",
            )

    safe_log_payload("batch_config", config, logger)
    logger.info(
        "Running batch: model=%s experiments=%d runs=%d workers=%d",
        config.model.label,
        config.n_experiments,
        config.n_runs,
        workers,
    )

    def _run(index: int) -> ExperimentResult:
        return run_experiment(
            config.experiment(index), experiment_stream(seed, index), chunk_size=chunk_size
        )

    started = time.perf_counter()
    with batch_duration_seconds.time():
        indices = range(config.n_experiments)
        if workers == 1 or config.n_experiments == 1:
            results = [_run(index) for index in indices]
        else:
            with ThreadPoolExecutor(
                max_workers=min(workers, config.n_experiments),
                thread_name_prefix="ExperimentWorker",
            ) as executor:
                # map preserves submission order, so the fold below is index-ordered
                results = list(executor.map(_run, indices))

        batch = BatchResult.from_experiments(results)

    batches_total.labels(verdict=batch.verdict.value).inc()
    logger.info(
        "Batch done: gamma=%r threshold=%r verdict=%s in %.1fms",
        batch.gamma,
        batch.threshold,
        batch.verdict.value,
        (time.perf_counter() - started) * 1000.0,
    )
    return batch


def replicated_pairs(theta_ab: float, n_experiments: int) -> tuple[tuple[float, float], ...]:
    """``n_experiments`` copies of the setting pair (0, theta_ab)."""
    value = ensure_finite(theta_ab, "theta_ab")
    if n_experiments < 1:
        raise InvalidArgumentError("n_experiments", f"must be >= 1, got {n_experiments}")
    return ((0.0, value),) * n_experiments


def setting_pairs(
    a_settings: Sequence[float], b_settings: Sequence[float]
) -> tuple[tuple[float, float], ...]:
    """Every (theta_a, theta_b) combination of the per-side settings, A-major.

    Two settings per side give the usual four setting combinations.
    """
    if not a_settings or not b_settings:
        raise InvalidArgumentError("settings", "each side needs at least one setting")
    a_values = [ensure_finite(a, "a_settings") for a in a_settings]
    b_values = [ensure_finite(b, "b_settings") for b in b_settings]
    return tuple(itertools.product(a_values, b_values))
