from prometheus_client import Counter, Histogram, Gauge, CollectorRegistry, write_to_textfile

# Create a registry for metrics
registry = CollectorRegistry()

# Sweep metrics
sweeps_total = Counter(
    "sweeps_total",
    "Total number of sweeps run",
    ["kind", "status"],
    registry=registry,
)

sweep_duration_seconds = Histogram(
    "sweep_duration_seconds",
    "Time taken to evaluate one sweep",
    ["kind"],
    registry=registry,
    buckets=(0.01, 0.05, 0.1, 0.5, 1, 2, 5, 10),
)

spectra_points_evaluated_total = Counter(
    "spectra_points_evaluated_total",
    "Total number of spectral points evaluated",
    ["drive"],
    registry=registry,
)

pole_perturbations_total = Counter(
    "pole_perturbations_total",
    "Grid points moved off an undamped branch pole",
    registry=registry,
)

config_validation_errors_total = Counter(
    "config_validation_errors_total",
    "Total number of rejected config documents",
    registry=registry,
)

active_sweep_workers = Gauge(
    "active_sweep_workers",
    "Number of grid chunks currently being evaluated",
    registry=registry,
)


def export_metrics(path: str) -> None:
    """Write the registry to ``path`` in the Prometheus text format."""
    write_to_textfile(path, registry)
