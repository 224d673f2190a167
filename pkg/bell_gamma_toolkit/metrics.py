"""Prometheus metrics for simulation runs."""

from prometheus_client import REGISTRY, Counter, Histogram, write_to_textfile

# Particle pairs simulated, by pair-response model
pairs_simulated_total = Counter(
    "bell_gamma_pairs_simulated_total",
    "Total number of particle pairs simulated",
    ["model"],
)

# Experiments (n pairs each) completed, by pair-response model
experiments_total = Counter(
    "bell_gamma_experiments_total",
    "Total number of experiments simulated",
    ["model"],
)

# Batches completed, by inequality verdict
batches_total = Counter(
    "bell_gamma_batches_total",
    "Total number of experiment batches evaluated",
    ["verdict"],
)

# Wall time of run_batch
batch_duration_seconds = Histogram(
    "bell_gamma_batch_duration_seconds",
    "Wall-clock duration of experiment batches in seconds",
    buckets=(0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0, 60.0),
)


def write_metrics(path: str) -> None:
    """Write the default registry to ``path`` in Prometheus text format."""
    write_to_textfile(path, REGISTRY)
