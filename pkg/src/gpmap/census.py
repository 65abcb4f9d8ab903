"""Exhaustive census of a sequence space with sharding and checkpoints."""

import json
import logging
import os
import shutil
import time
from collections.abc import Callable, Iterator, Sequence
from contextlib import closing
from concurrent.futures import Future, ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .base import (
    ChainBudgets,
    CheckpointMismatchError,
    ExecutionLimits,
    IntegrityError,
    OutputExistsError,
)
from .genome import Genome
from .isa import IsaSpec
from .metrics import CensusMetrics
from .phenotype import classify
from .ranking import check_envelope, iter_symbols, space_size
from .storage import (
    BITMAP_MAX_SPACE,
    CensusResult,
    atomic_write_bytes,
    census_paths,
    write_census,
)

DEFAULT_SHARDS_PER_WORKER = 64

CHECKPOINT_SUFFIX = ".checkpoint"

ShardStatus = Literal["pending", "done"]

ShardHook = Callable[["Shard"], None]


# ============================================================================
# CONFIGURATION
# ============================================================================


class CensusConfig(BaseModel):
    """Everything that determines a census, plus how to schedule it.

    ``workers`` only affects scheduling: the census written for a config is
    byte-identical for any worker count. ``shard_count`` is recorded in the
    metadata but never changes the rank payload.

    Attributes:
        length: Sequence length L
        isa: Instruction set (fixes the alphabet size D)
        limits: Per-execution limits; defaults follow ``length``
        budgets: Reproduction-walk budgets
        workers: Worker processes (1 runs in-process)
        shard_count: Contiguous rank ranges; defaults to 64 per worker
        output: Output path prefix, or None for an in-memory census
        overwrite: Replace an existing census at ``output``
        bitmap: Write the full-space bitmap; None writes it when D^L <= 2^32

    Example:
        ```python
        config = CensusConfig(length=5, workers=4, output=Path("runs/l5"))
        config.shard_count  # 256
        ```
    """

    model_config = ConfigDict(frozen=True)

    length: int = Field(..., ge=1, description="Sequence length L")
    isa: IsaSpec = Field(default_factory=IsaSpec, description="Instruction set")
    limits: ExecutionLimits = Field(..., description="Step limit T and offspring cap M")
    budgets: ChainBudgets = Field(
        default_factory=ChainBudgets,
        description="Chain depth G and genotype budget B"
    )
    workers: int = Field(1, ge=1, description="Worker processes")
    shard_count: int = Field(..., ge=1, description="Number of contiguous shards")
    output: Path | None = Field(None, description="Output path prefix")
    overwrite: bool = Field(False, description="Replace existing output files")
    bitmap: bool | None = Field(None, description="Write the full-space bitmap")

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if data.get("limits") is None and isinstance(data.get("length"), int):
            data["limits"] = ExecutionLimits.for_length(data["length"])
        if data.get("shard_count") is None:
            workers = data.get("workers") or 1
            data["shard_count"] = DEFAULT_SHARDS_PER_WORKER * int(workers)
        return data

    @model_validator(mode="after")
    def _check_envelope(self) -> "CensusConfig":
        check_envelope(self.length, self.isa.alphabet_size)
        return self

    @property
    def alphabet_size(self) -> int:
        return self.isa.alphabet_size

    @property
    def total(self) -> int:
        """D^L."""
        return space_size(self.length, self.alphabet_size)

    @property
    def writes_bitmap(self) -> bool:
        if self.bitmap is None:
            return self.total <= BITMAP_MAX_SPACE
        return self.bitmap

    def fingerprint(self) -> dict[str, Any]:
        """Settings a checkpoint must match before it may be resumed."""
        return {
            "L": self.length,
            "D": self.alphabet_size,
            "isa_id": self.isa.id,
            "pad_nops": self.isa.pad_nops,
            "T": self.limits.step_limit,
            "M": self.limits.offspring_cap,
            "G": self.budgets.max_depth,
            "B": self.budgets.max_genotypes,
            "shard_count": self.shard_count,
        }


# ============================================================================
# SHARDS
# ============================================================================


class Shard(BaseModel):
    """One contiguous rank range and, once done, its viable ranks.

    Attributes:
        index: Position in the shard plan
        lo: First rank of the range
        hi: One past the last rank
        status: "pending" until classified
        viable_ranks: Viable ranks in [lo, hi), strictly ascending
        self_replicators: How many of them are exact self-replicators
    """

    index: int = Field(..., ge=0)
    lo: int = Field(..., ge=0)
    hi: int = Field(..., ge=0)
    status: ShardStatus = "pending"
    viable_ranks: list[int] = Field(default_factory=list)
    self_replicators: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_ranks(self) -> "Shard":
        if self.hi < self.lo:
            raise ValueError(f"Shard {self.index} has inverted range [{self.lo}, {self.hi})")
        previous = self.lo - 1
        for rank in self.viable_ranks:
            if rank <= previous or rank >= self.hi:
                raise ValueError(
                    f"Shard {self.index} ranks must be ascending inside [{self.lo}, {self.hi})"
                )
            previous = rank
        if self.self_replicators > len(self.viable_ranks):
            raise ValueError(f"Shard {self.index} has more self-replicators than viable ranks")
        return self

    @property
    def size(self) -> int:
        return self.hi - self.lo


def plan_shards(total: int, shard_count: int) -> list[Shard]:
    """Split [0, total) into ``shard_count`` contiguous, nearly equal ranges.

    Example:
        ```python
        [(s.lo, s.hi) for s in plan_shards(10, 3)]
        # [(0, 3), (3, 6), (6, 10)]
        ```
    """
    return [
        Shard(index=i, lo=total * i // shard_count, hi=total * (i + 1) // shard_count)
        for i in range(shard_count)
    ]


def classify_shard(config: CensusConfig, shard: Shard) -> Shard:
    """Classify every rank of ``shard`` and return it marked done."""
    isa = config.isa
    limits = config.limits
    budgets = config.budgets
    alphabet_size = config.alphabet_size
    viable: list[int] = []
    self_replicators = 0
    for offset, symbols in enumerate(
        iter_symbols(shard.lo, shard.hi, config.length, alphabet_size)
    ):
        phenotype = classify(Genome(symbols, alphabet_size), isa, limits, budgets)
        if phenotype.viable:
            viable.append(shard.lo + offset)
            if phenotype.kind == "SelfReplicator":
                self_replicators += 1
    return shard.model_copy(
        update={"status": "done", "viable_ranks": viable, "self_replicators": self_replicators}
    )


def _classify_shard_timed(config: CensusConfig, shard: Shard) -> tuple[Shard, float]:
    # Worker entry point; must stay importable at module level for pickling
    started = time.perf_counter()
    done = classify_shard(config, shard)
    return done, time.perf_counter() - started


def merge_shards(shards: Sequence[Shard], config: CensusConfig) -> CensusResult:
    """Concatenate completed shards into a census.

    Args:
        shards: Completed shards covering [0, D^L); any order
        config: Configuration the shards were classified under

    Returns:
        CensusResult with globally sorted viable ranks

    Raises:
        IntegrityError: If a shard is pending, or the ranges leave a gap or overlap

    Example:
        ```python
        merged = merge_shards([
            Shard(index=0, lo=0, hi=10, status="done", viable_ranks=[3, 9]),
            Shard(index=1, lo=10, hi=64, status="done", viable_ranks=[12]),
        ], CensusConfig(length=2))
        merged.viable_ranks.tolist()  # [3, 9, 12]
        ```
    """
    total = config.total
    ordered = sorted(shards, key=lambda s: (s.lo, s.hi, s.index))
    covered = 0
    for shard in ordered:
        if shard.status != "done":
            raise IntegrityError(
                f"Shard {shard.index} covering [{shard.lo}, {shard.hi}) is not done"
            )
        if shard.lo > covered:
            raise IntegrityError(f"Coverage gap: ranks [{covered}, {shard.lo}) belong to no shard")
        if shard.lo < covered:
            raise IntegrityError(
                f"Coverage overlap: ranks [{shard.lo}, {min(covered, shard.hi)}) "
                f"are covered by more than one shard"
            )
        covered = shard.hi
    if covered != total:
        if covered < total:
            raise IntegrityError(f"Coverage gap: ranks [{covered}, {total}) belong to no shard")
        raise IntegrityError(f"Shards extend past the space: [{total}, {covered}) is out of range")

    ranks = [rank for shard in ordered for rank in shard.viable_ranks]
    return CensusResult(
        length=config.length,
        alphabet_size=config.alphabet_size,
        isa_id=config.isa.id,
        pad_nops=config.isa.pad_nops,
        step_limit=config.limits.step_limit,
        offspring_cap=config.limits.offspring_cap,
        chain_depth=config.budgets.max_depth,
        chain_width=config.budgets.max_genotypes,
        viable_ranks=np.array(ranks, dtype=np.int64),
        self_replicator_count=sum(shard.self_replicators for shard in ordered),
        shard_count=len(ordered),
    )


# ============================================================================
# CHECKPOINTS
# ============================================================================


class CensusCheckpoint:
    """Directory of completed shards next to the census output.

    Layout: ``<prefix>.checkpoint/config.json`` holds the config
    fingerprint, and every completed shard is one ``shard-NNNNNN.json``.
    Files are written atomically, so a killed run leaves only whole shards.

    Attributes:
        directory: Checkpoint directory
        logger: Logger instance for checkpoint events
    """

    def __init__(self, prefix: Path) -> None:
        self.directory = Path(str(prefix) + CHECKPOINT_SUFFIX)
        self.logger = logging.getLogger("gpmap.census")

    def _shard_path(self, index: int) -> Path:
        return self.directory / f"shard-{index:06d}.json"

    def open(self, config: CensusConfig) -> None:
        """Create the directory, or verify that an existing one matches ``config``.

        Raises:
            CheckpointMismatchError: If the checkpoint was made under other settings
        """
        fingerprint = config.fingerprint()
        config_path = self.directory / "config.json"
        if config_path.exists():
            try:
                stored = json.loads(config_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as e:
                raise CheckpointMismatchError(f"Unreadable checkpoint config {config_path}") from e
            if stored != fingerprint:
                changed = sorted(
                    key for key in fingerprint.keys() | stored.keys()
                    if stored.get(key) != fingerprint.get(key)
                )
                raise CheckpointMismatchError(
                    f"Checkpoint {self.directory} was made with different settings "
                    f"({', '.join(changed)}); remove it or rerun with the original settings"
                )
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        atomic_write_bytes(
            config_path, (json.dumps(fingerprint, sort_keys=True) + "\n").encode("utf-8")
        )

    def load(self, plan: Sequence[Shard]) -> dict[int, Shard]:
        """Return completed shards that match ``plan``; discard anything else."""
        completed: dict[int, Shard] = {}
        for planned in plan:
            path = self._shard_path(planned.index)
            if not path.exists():
                continue
            try:
                shard = Shard.model_validate_json(path.read_text(encoding="utf-8"))
            except (ValidationError, OSError) as e:
                self._discard(path, f"invalid shard file: {e}")
                continue
            if (shard.index, shard.lo, shard.hi) != (planned.index, planned.lo, planned.hi) or (
                shard.status != "done"
            ):
                self._discard(path, "shard does not match the plan")
                continue
            completed[shard.index] = shard
        return completed

    def _discard(self, path: Path, reason: str) -> None:
        self.logger.warning("checkpoint_discarded", extra={"path": str(path), "reason": reason})
        path.unlink(missing_ok=True)

    def save(self, shard: Shard) -> None:
        atomic_write_bytes(self._shard_path(shard.index), shard.model_dump_json().encode("utf-8"))

    def remove(self) -> None:
        shutil.rmtree(self.directory, ignore_errors=True)


# ============================================================================
# CENSUS RUNNER
# ============================================================================


def prepare_output(prefix: Path, overwrite: bool) -> None:
    """Fail before any compute if the census cannot be written at ``prefix``.

    Raises:
        OutputExistsError: If census files exist and ``overwrite`` is False
        PermissionError: If the output directory is not writable
    """
    paths = census_paths(prefix)
    existing = [str(p) for p in paths.values() if p.exists()]
    if existing and not overwrite:
        raise OutputExistsError(
            f"Census output already exists: {', '.join(existing)} (use --force to replace)"
        )
    parent = paths["meta"].parent
    parent.mkdir(parents=True, exist_ok=True)
    if not os.access(parent, os.W_OK | os.X_OK):
        raise PermissionError(f"Output directory is not writable: {parent}")


class CensusRunner:
    """Runs one census: plans shards, resumes, classifies, merges and writes.

    Workers share nothing but the frozen config; every completed shard is
    handed back to this process, checkpointed, then reported through the
    optional hook.

    Attributes:
        config: Census configuration
        metrics: Progress metrics for this run
        logger: Logger instance for census events

    Example:
        ```python
        runner = CensusRunner(CensusConfig(length=5, workers=4, output=Path("runs/l5")))
        result = runner.run()
        result.viable_count
        ```
    """

    def __init__(
        self,
        config: CensusConfig,
        on_shard_done: ShardHook | None = None,
        metrics: CensusMetrics | None = None,
    ) -> None:
        self.config = config
        self.on_shard_done = on_shard_done
        self.metrics = metrics or CensusMetrics()
        self.logger = logging.getLogger("gpmap.census")

    def run(self) -> CensusResult:
        """Run the census to completion.

        Returns:
            The merged CensusResult (also written to disk when ``output`` is set)

        Raises:
            ConfigurationError: If D^L exceeds the 63-bit envelope
            OutputExistsError: If output exists and overwrite is off
            CheckpointMismatchError: If a checkpoint was made under other settings
        """
        config = self.config
        check_envelope(config.length, config.alphabet_size)

        checkpoint: CensusCheckpoint | None = None
        if config.output is not None:
            prepare_output(config.output, config.overwrite)
            checkpoint = CensusCheckpoint(config.output)
            checkpoint.open(config)

        plan = plan_shards(config.total, config.shard_count)
        completed = checkpoint.load(plan) if checkpoint is not None else {}
        self.metrics.shards_total = len(plan)

        self.logger.info(
            "census_started",
            extra={
                "L": config.length,
                "D": config.alphabet_size,
                "isa_id": config.isa.id,
                "total": config.total,
                "shard_count": config.shard_count,
                "workers": config.workers,
                "resumed_shards": len(completed),
            },
        )
        for shard in completed.values():
            self.metrics.record_resumed(len(shard.viable_ranks), shard.self_replicators)
            self.logger.info(
                "census_shard_resumed", extra={"shard": shard.index, "viable": len(shard.viable_ranks)}
            )

        pending = [shard for shard in plan if shard.index not in completed]
        with closing(self._execute(pending)) as finished:
            for shard, elapsed in finished:
                completed[shard.index] = shard
                if checkpoint is not None:
                    checkpoint.save(shard)
                self.metrics.record_shard(
                    genomes=shard.size,
                    viable=len(shard.viable_ranks),
                    self_replicators=shard.self_replicators,
                    elapsed_s=elapsed,
                )
                self.logger.info(
                    "census_shard_completed",
                    extra={
                        "shard": shard.index,
                        "lo": shard.lo,
                        "hi": shard.hi,
                        "viable": len(shard.viable_ranks),
                        "elapsed_s": round(elapsed, 3),
                        "progress": round(self.metrics.progress, 4),
                    },
                )
                if self.on_shard_done is not None:
                    self.on_shard_done(shard)

        result = merge_shards([completed[shard.index] for shard in plan], config)
        if config.writes_bitmap:
            result = result.with_bitmap()
        if config.output is not None:
            write_census(result, config.output)
            if checkpoint is not None:
                checkpoint.remove()

        self.metrics.finish()
        self.logger.info(
            "census_completed",
            extra={
                "viable_count": result.viable_count,
                "self_replicator_count": result.self_replicator_count,
                "total": result.total,
                "elapsed_s": round(self.metrics.elapsed_seconds, 3),
            },
        )
        return result

    def _execute(self, pending: list[Shard]) -> Iterator[tuple[Shard, float]]:
        """Yield (done shard, seconds) pairs as shards finish."""
        if not pending:
            return
        if self.config.workers == 1:
            for shard in pending:
                yield _classify_shard_timed(self.config, shard)
            return

        executor = ProcessPoolExecutor(max_workers=min(self.config.workers, len(pending)))
        try:
            futures: list[Future[tuple[Shard, float]]] = [
                executor.submit(_classify_shard_timed, self.config, shard) for shard in pending
            ]
            for future in as_completed(futures):
                yield future.result()
        except BaseException:
            executor.shutdown(wait=True, cancel_futures=True)
            raise
        executor.shutdown(wait=True)


def run_census(
    config: CensusConfig,
    *,
    on_shard_done: ShardHook | None = None,
    metrics: CensusMetrics | None = None,
) -> CensusResult:
    """Classify every rank in [0, D^L) and return (and optionally write) the census.

    Args:
        config: Census configuration
        on_shard_done: Called after each newly completed shard is checkpointed
        metrics: Metrics object to fill in; a fresh one is used when omitted

    Returns:
        CensusResult, identical for every shard and worker count
    """
    return CensusRunner(config, on_shard_done=on_shard_done, metrics=metrics).run()
