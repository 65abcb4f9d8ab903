"""Census run metrics and Prometheus textfile export.

This module provides CensusMetrics for tracking the progress of a census
run (shards, genomes classified, viable genomes found, throughput) and a
helper that writes those numbers in the Prometheus text format, ready for
the node-exporter textfile collector.
"""

import logging
import time
from pathlib import Path

from prometheus_client import CollectorRegistry, Gauge, write_to_textfile

logger = logging.getLogger("gpmap.metrics")

# ============================================================================
# CENSUS METRICS
# ============================================================================


class CensusMetrics:
    """Progress and throughput tracker for one census run.

    Attributes:
        shards_total: Shards in the plan
        shards_completed: Shards classified during this run
        shards_resumed: Shards restored from a checkpoint
        genomes_classified: Genomes classified during this run
        viable_found: Viable genomes across completed and resumed shards
        self_replicators_found: Exact self-replicators among them

    Example:
        ```python
        metrics = CensusMetrics(shards_total=8)
        metrics.record_shard(genomes=4096, viable=3, self_replicators=3, elapsed_s=0.4)
        metrics.progress  # 0.125
        ```
    """

    def __init__(self, shards_total: int = 0) -> None:
        """Initialize CensusMetrics with zero counters."""
        self.shards_total: int = shards_total
        self.shards_completed: int = 0
        self.shards_resumed: int = 0
        self.genomes_classified: int = 0
        self.viable_found: int = 0
        self.self_replicators_found: int = 0
        self.classify_seconds: float = 0.0
        self._started = time.perf_counter()
        self._finished: float | None = None

    def record_shard(
        self,
        genomes: int,
        viable: int,
        self_replicators: int,
        elapsed_s: float,
    ) -> None:
        """Record a shard classified during this run."""
        self.shards_completed += 1
        self.genomes_classified += genomes
        self.viable_found += viable
        self.self_replicators_found += self_replicators
        self.classify_seconds += elapsed_s

    def record_resumed(self, viable: int, self_replicators: int) -> None:
        """Record a shard restored from a checkpoint (no genomes classified)."""
        self.shards_resumed += 1
        self.viable_found += viable
        self.self_replicators_found += self_replicators

    def finish(self) -> None:
        self._finished = time.perf_counter()

    @property
    def elapsed_seconds(self) -> float:
        """Wall-clock seconds since creation (frozen by ``finish``)."""
        end = self._finished if self._finished is not None else time.perf_counter()
        return end - self._started

    @property
    def genomes_per_second(self) -> float:
        """Classification throughput over wall-clock time (0.0 before any work)."""
        elapsed = self.elapsed_seconds
        if elapsed <= 0 or self.genomes_classified == 0:
            return 0.0
        return self.genomes_classified / elapsed

    @property
    def progress(self) -> float:
        """Fraction of planned shards done, resumed shards included."""
        done = self.shards_completed + self.shards_resumed
        return done / max(1, self.shards_total)


# ============================================================================
# PROMETHEUS TEXTFILE EXPORT
# ============================================================================


def export_textfile(
    metrics: CensusMetrics,
    path: Path,
    labels: dict[str, str] | None = None,
) -> None:
    """Write ``metrics`` to ``path`` in the Prometheus text exposition format.

    A private registry is used per call, so repeated exports in one process
    never collide on metric names.

    Args:
        metrics: Census metrics to export
        path: Destination ``.prom`` file
        labels: Constant labels attached to every sample (e.g. isa, length)
    """
    labels = labels or {}
    names = sorted(labels)
    registry = CollectorRegistry()

    samples: dict[str, tuple[str, float]] = {
        "gpmap_census_shards_total": ("Shards in the census plan", metrics.shards_total),
        "gpmap_census_shards_completed": (
            "Shards classified during this run",
            metrics.shards_completed,
        ),
        "gpmap_census_shards_resumed": (
            "Shards restored from a checkpoint",
            metrics.shards_resumed,
        ),
        "gpmap_census_genomes_classified": (
            "Genomes classified during this run",
            metrics.genomes_classified,
        ),
        "gpmap_census_viable": ("Viable genomes found", metrics.viable_found),
        "gpmap_census_self_replicators": (
            "Exact self-replicators found",
            metrics.self_replicators_found,
        ),
        "gpmap_census_duration_seconds": (
            "Wall-clock duration of the run",
            metrics.elapsed_seconds,
        ),
        "gpmap_census_genomes_per_second": (
            "Classification throughput",
            metrics.genomes_per_second,
        ),
    }
    for name, (documentation, value) in samples.items():
        gauge = Gauge(name, documentation, names, registry=registry)
        if names:
            gauge.labels(**labels).set(value)
        else:
            gauge.set(value)

    write_to_textfile(str(path), registry)
    logger.info(f"Census metrics written to {path}")
