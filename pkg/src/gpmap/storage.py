"""On-disk census format and the in-memory census object.

A census is stored as a file pair (plus an optional bitmap):

- ``<prefix>.meta.json``: UTF-8 JSON metadata, including SHA-256 checksums
  of the payload files
- ``<prefix>.viable.bin``: viable ranks, strictly ascending, each a 64-bit
  unsigned little-endian integer, no header
- ``<prefix>.bitmap.bin`` (optional): ceil(D^L / 8) bytes; the bit for rank
  r is bit ``r & 7`` (LSB first) of byte ``r >> 3``

Payload bytes depend only on the census configuration, never on shard or
worker counts.
"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field, ValidationError

from .base import DomainError, IntegrityError
from .genome import Genome
from .ranking import RankArray, space_size, unrank_array

UTC = timezone.utc

logger = logging.getLogger("gpmap.storage")

FORMAT_VERSION = 1

META_SUFFIX = ".meta.json"
VIABLE_SUFFIX = ".viable.bin"
BITMAP_SUFFIX = ".bitmap.bin"

# Bitmaps are only materialised for spaces up to this many sequences
BITMAP_MAX_SPACE = 2**32

RANK_DTYPE = np.dtype("<u8")


# ============================================================================
# CENSUS RESULT
# ============================================================================


@dataclass(frozen=True, eq=False)
class CensusResult:
    """A complete census: configuration echo plus the viable set.

    Attributes:
        length: Sequence length L
        alphabet_size: Alphabet size D
        isa_id: ISA identifier
        pad_nops: No-op padding of the ISA
        step_limit: T used for every execution
        offspring_cap: M used for every execution
        chain_depth: G used for every classification
        chain_width: B used for every classification
        viable_ranks: Sorted int64 array of viable ranks
        self_replicator_count: Viable genomes that are exact self-replicators
        shard_count: Number of shards the census was computed in
        bitmap: Optional packed full-space viability bitmap (uint8)
        created_utc: Creation timestamp, ISO 8601

    Example:
        ```python
        census = read_census(Path("runs/l5"))
        census.viable_count, census.total
        census.contains(Genome.from_letters("cdfea", 8).rank)  # True
        ```
    """

    length: int
    alphabet_size: int
    isa_id: str
    pad_nops: int
    step_limit: int
    offspring_cap: int
    chain_depth: int
    chain_width: int
    viable_ranks: RankArray
    self_replicator_count: int
    shard_count: int = 1
    bitmap: npt.NDArray[np.uint8] | None = None
    created_utc: str = field(
        default_factory=lambda: datetime.now(UTC).isoformat(timespec="seconds")
    )

    def __post_init__(self) -> None:
        ranks = self.viable_ranks
        if ranks.ndim != 1:
            raise IntegrityError("viable_ranks must be one-dimensional")
        if ranks.size and (
            np.any(np.diff(ranks) <= 0) or ranks[0] < 0 or int(ranks[-1]) >= self.total
        ):
            raise IntegrityError("viable_ranks must be strictly ascending and inside [0, D^L)")
        if not 0 <= self.self_replicator_count <= ranks.size:
            raise IntegrityError(
                f"self_replicator_count {self.self_replicator_count} exceeds viable count {ranks.size}"
            )

    @property
    def total(self) -> int:
        """D^L."""
        return space_size(self.length, self.alphabet_size)

    @property
    def viable_count(self) -> int:
        """N_ν."""
        return int(self.viable_ranks.size)

    @cached_property
    def symbols(self) -> npt.NDArray[np.int64]:
        """(N_ν, L) symbol matrix of the viable genomes, in rank order."""
        return unrank_array(self.viable_ranks, self.length, self.alphabet_size)

    def index_of(self, rank: int) -> int | None:
        """Position of ``rank`` in ``viable_ranks``, or None if not viable."""
        position = int(np.searchsorted(self.viable_ranks, rank))
        if position < self.viable_ranks.size and int(self.viable_ranks[position]) == rank:
            return position
        return None

    def contains(self, rank: int) -> bool:
        return self.index_of(rank) is not None

    def require_viable(self, rank: int) -> int:
        """Return the index of a viable ``rank``.

        Raises:
            DomainError: If ``rank`` is not viable
        """
        position = self.index_of(rank)
        if position is None:
            raise DomainError(f"Rank {rank} is not a viable genome of this census")
        return position

    def genome(self, rank: int) -> Genome:
        return Genome.from_rank(rank, self.length, self.alphabet_size)

    def with_bitmap(self) -> "CensusResult":
        """Return a copy carrying a full-space bitmap built from the viable ranks."""
        if self.total > BITMAP_MAX_SPACE:
            raise DomainError(
                f"D^L = {self.total} exceeds the bitmap ceiling of {BITMAP_MAX_SPACE}"
            )
        return CensusResult(
            length=self.length,
            alphabet_size=self.alphabet_size,
            isa_id=self.isa_id,
            pad_nops=self.pad_nops,
            step_limit=self.step_limit,
            offspring_cap=self.offspring_cap,
            chain_depth=self.chain_depth,
            chain_width=self.chain_width,
            viable_ranks=self.viable_ranks,
            self_replicator_count=self.self_replicator_count,
            shard_count=self.shard_count,
            bitmap=build_bitmap(self.viable_ranks, self.total),
            created_utc=self.created_utc,
        )


def build_bitmap(ranks: RankArray, total: int) -> npt.NDArray[np.uint8]:
    """Pack ``ranks`` into an LSB-first bitmap of ceil(total / 8) bytes."""
    bitmap = np.zeros((total + 7) // 8, dtype=np.uint8)
    values = np.asarray(ranks, dtype=np.int64)
    np.bitwise_or.at(bitmap, values >> 3, (1 << (values & 7)).astype(np.uint8))
    return bitmap


# Set bits per byte value
_POPCOUNT = np.array([bin(value).count("1") for value in range(256)], dtype=np.uint8)


def bitmap_population(bitmap: npt.NDArray[np.uint8], chunk_bytes: int = 1 << 24) -> int:
    """Number of set bits in ``bitmap``, counted chunk by chunk."""
    return sum(
        int(_POPCOUNT[bitmap[start : start + chunk_bytes]].sum(dtype=np.int64))
        for start in range(0, bitmap.size, chunk_bytes)
    )


# ============================================================================
# FILE FORMAT
# ============================================================================


class CensusMeta(BaseModel):
    """Schema of ``<prefix>.meta.json``."""

    format_version: int = Field(FORMAT_VERSION, description="Census format version")
    isa_id: str
    pad_nops: int = 0
    L: int = Field(..., ge=1)
    D: int = Field(..., ge=2)
    T: int = Field(..., ge=1)
    M: int = Field(..., ge=1)
    G: int = Field(..., ge=1)
    B: int = Field(..., ge=1)
    total: str = Field(..., description="D^L as a decimal string")
    viable_count: int = Field(..., ge=0)
    self_replicator_count: int = Field(..., ge=0)
    shard_count: int = Field(..., ge=1)
    created_utc: str
    checksums: dict[str, str] = Field(
        default_factory=dict,
        description="SHA-256 hex digest per payload file name"
    )


def census_paths(prefix: Path) -> dict[str, Path]:
    """Paths of the census files for ``prefix``."""
    base = str(prefix)
    return {
        "meta": Path(base + META_SUFFIX),
        "viable": Path(base + VIABLE_SUFFIX),
        "bitmap": Path(base + BITMAP_SUFFIX),
    }


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def atomic_write_bytes(path: Path, payload: bytes) -> None:
    """Write ``payload`` to a temporary sibling, then rename it into place."""
    temporary = path.with_name(path.name + ".tmp")
    temporary.write_bytes(payload)
    os.replace(temporary, path)


def write_census(result: CensusResult, prefix: Path) -> dict[str, str]:
    """Write the census file set for ``result``.

    Args:
        result: Census to store
        prefix: Output path prefix (``runs/l6`` -> ``runs/l6.meta.json`` etc.)

    Returns:
        Mapping of payload file name to SHA-256 hex digest
    """
    paths = census_paths(prefix)
    checksums: dict[str, str] = {}

    atomic_write_bytes(paths["viable"], result.viable_ranks.astype(RANK_DTYPE).tobytes())
    checksums[paths["viable"].name] = sha256_file(paths["viable"])

    if result.bitmap is not None:
        atomic_write_bytes(paths["bitmap"], result.bitmap.tobytes())
        checksums[paths["bitmap"].name] = sha256_file(paths["bitmap"])
    elif paths["bitmap"].exists():
        # stale bitmap from an earlier run with different settings
        paths["bitmap"].unlink()

    meta = CensusMeta(
        isa_id=result.isa_id,
        pad_nops=result.pad_nops,
        L=result.length,
        D=result.alphabet_size,
        T=result.step_limit,
        M=result.offspring_cap,
        G=result.chain_depth,
        B=result.chain_width,
        total=str(result.total),
        viable_count=result.viable_count,
        self_replicator_count=result.self_replicator_count,
        shard_count=result.shard_count,
        created_utc=result.created_utc,
        checksums=checksums,
    )
    text = json.dumps(meta.model_dump(), indent=2, sort_keys=True) + "\n"
    atomic_write_bytes(paths["meta"], text.encode("utf-8"))

    logger.info(
        "census_written",
        extra={
            "prefix": str(prefix),
            "viable_count": result.viable_count,
            "bitmap": result.bitmap is not None,
        },
    )
    return checksums


def read_meta(prefix: Path) -> CensusMeta:
    """Load and validate ``<prefix>.meta.json``.

    Raises:
        IntegrityError: If the file is missing, malformed or of another format version
    """
    path = census_paths(prefix)["meta"]
    try:
        raw: Any = json.loads(path.read_text(encoding="utf-8"))
        meta = CensusMeta.model_validate(raw)
    except FileNotFoundError as e:
        raise IntegrityError(f"Census metadata not found: {path}") from e
    except (json.JSONDecodeError, ValidationError) as e:
        raise IntegrityError(f"Malformed census metadata {path}: {e}") from e
    if meta.format_version != FORMAT_VERSION:
        raise IntegrityError(
            f"Unsupported census format version {meta.format_version} in {path}"
        )
    return meta


def read_census(prefix: Path, verify: bool = True) -> CensusResult:
    """Load a census written by :func:`write_census`.

    Args:
        prefix: Census path prefix
        verify: Check payload SHA-256 digests against the metadata

    Raises:
        IntegrityError: On checksum mismatch, missing payloads or inconsistent counts
    """
    meta = read_meta(prefix)
    paths = census_paths(prefix)

    if verify:
        for key in ("viable", "bitmap"):
            path = paths[key]
            expected = meta.checksums.get(path.name)
            if expected is None:
                continue
            if not path.exists():
                raise IntegrityError(f"Census payload missing: {path}")
            actual = sha256_file(path)
            if actual != expected:
                raise IntegrityError(
                    f"Checksum mismatch for {path}: expected {expected}, got {actual}"
                )

    try:
        raw = paths["viable"].read_bytes()
    except FileNotFoundError as e:
        raise IntegrityError(f"Census payload missing: {paths['viable']}") from e
    if len(raw) % RANK_DTYPE.itemsize:
        raise IntegrityError(f"Truncated rank file {paths['viable']}")
    ranks = np.frombuffer(raw, dtype=RANK_DTYPE).astype(np.int64)
    if ranks.size != meta.viable_count:
        raise IntegrityError(
            f"Rank file holds {ranks.size} ranks, metadata says {meta.viable_count}"
        )

    bitmap = None
    if paths["bitmap"].name in meta.checksums:
        bitmap = np.frombuffer(paths["bitmap"].read_bytes(), dtype=np.uint8).copy()
        expected_bytes = (int(meta.total) + 7) // 8
        if bitmap.size != expected_bytes:
            raise IntegrityError(
                f"Bitmap holds {bitmap.size} bytes, expected {expected_bytes}"
            )
        if bitmap_population(bitmap) != meta.viable_count:
            raise IntegrityError("Bitmap population count differs from viable_count")

    return CensusResult(
        length=meta.L,
        alphabet_size=meta.D,
        isa_id=meta.isa_id,
        pad_nops=meta.pad_nops,
        step_limit=meta.T,
        offspring_cap=meta.M,
        chain_depth=meta.G,
        chain_width=meta.B,
        viable_ranks=ranks,
        self_replicator_count=meta.self_replicator_count,
        shard_count=meta.shard_count,
        bitmap=bitmap,
        created_utc=meta.created_utc,
    )
