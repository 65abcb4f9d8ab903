"""Distance profiles, density curves and epistasis signs around viable genomes.

For a viable genome i, N_i(k) counts viable genomes at Hamming distance
exactly k. The density within distance n is

    rho_i(n) = sum_{k<=n} N_i(k) / sum_{k<=n} C(L, k) (D-1)^k

and phi_i(n) = log_D rho_i(n). Numerators and denominators are kept as exact
integers next to the floating point values.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from ..base import DomainError
from ..genome import Genome
from ..ranking import unrank_array
from ..storage import CensusResult
from .information import cumulative_shells, log_ratio

logger = logging.getLogger("gpmap.analysis.density")

DistanceMethod = Literal["auto", "pairwise", "bitmap"]

# Boolean cells compared at once when building distance matrices
PAIRWISE_CELLS = 1 << 24

# Bitmap bytes scanned per chunk
BITMAP_CHUNK_BYTES = 1 << 20

# |phi - phi_ne| at or below this is no epistasis
EPISTASIS_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class DensityCurve:
    """Density curve of one viable genome.

    Attributes:
        rank: Genome rank
        length: L
        alphabet_size: D
        counts: N_i(k) for k = 0..L
        cum_viable: Exact cumulative viable counts, n = 0..L
        cum_total: Exact cumulative shell sizes, n = 0..L (last is D^L)
        rho: rho_i(n)
        phi: log_D rho_i(n) in mers
    """

    rank: int
    length: int
    alphabet_size: int
    counts: tuple[int, ...]
    cum_viable: tuple[int, ...]
    cum_total: tuple[int, ...]
    rho: npt.NDArray[np.float64]
    phi: npt.NDArray[np.float64]


def _distance_counts(
    symbols: npt.NDArray[np.int64], genome: Genome
) -> npt.NDArray[np.int64]:
    target = np.asarray(genome.symbols, dtype=np.int64)
    distances = (symbols != target).sum(axis=1)
    return np.bincount(distances, minlength=genome.length + 1).astype(np.int64)


def _bitmap_counts(census: CensusResult, genome: Genome) -> npt.NDArray[np.int64]:
    bitmap = census.bitmap
    if bitmap is None:
        raise DomainError("Census has no bitmap")
    counts = np.zeros(census.length + 1, dtype=np.int64)
    for start in range(0, bitmap.size, BITMAP_CHUNK_BYTES):
        bits = np.unpackbits(bitmap[start : start + BITMAP_CHUNK_BYTES], bitorder="little")
        ranks = np.flatnonzero(bits).astype(np.int64) + start * 8
        if ranks.size:
            symbols = unrank_array(ranks, census.length, census.alphabet_size)
            counts += _distance_counts(symbols, genome)
    return counts


def viable_counts_by_distance(
    rank: int, census: CensusResult, method: DistanceMethod = "auto"
) -> npt.NDArray[np.int64]:
    """N_i(k) for k = 0..L around viable genome ``rank``.

    Args:
        rank: Viable genome rank
        census: Census to measure against
        method: ``pairwise`` compares against every viable genome, ``bitmap``
            scans the full-space bitmap; ``auto`` uses the bitmap when present

    Raises:
        DomainError: If ``rank`` is not viable, or ``bitmap`` is requested without one
    """
    census.require_viable(rank)
    genome = census.genome(rank)
    if method == "auto":
        method = "bitmap" if census.bitmap is not None else "pairwise"
    if method == "bitmap":
        if census.bitmap is None:
            raise DomainError("Bitmap distance counting requested but the census has no bitmap")
        return _bitmap_counts(census, genome)
    if method != "pairwise":
        raise DomainError(f"Unknown distance method '{method}'")
    return _distance_counts(census.symbols, genome)


def distance_count_matrix(census: CensusResult) -> npt.NDArray[np.int64]:
    """(N, L+1) matrix of N_i(k) for every viable genome, rows aligned with ranks."""
    symbols = census.symbols
    count = census.viable_count
    width = census.length + 1
    result = np.zeros((count, width), dtype=np.int64)
    if count == 0:
        return result
    rows = max(1, PAIRWISE_CELLS // max(1, count * census.length))
    for start in range(0, count, rows):
        block = symbols[start : start + rows]
        distances = (block[:, None, :] != symbols[None, :, :]).sum(axis=2)
        offsets = np.arange(block.shape[0], dtype=np.int64)[:, None] * width
        flat = np.bincount((distances + offsets).ravel(), minlength=block.shape[0] * width)
        result[start : start + block.shape[0]] = flat.reshape(block.shape[0], width)
    return result


def _curve_from_counts(
    rank: int, counts: npt.NDArray[np.int64], length: int, alphabet_size: int
) -> DensityCurve:
    cum_viable = tuple(int(v) for v in np.cumsum(counts))
    cum_total = tuple(cumulative_shells(length, alphabet_size))
    rho = np.array([v / t for v, t in zip(cum_viable, cum_total, strict=True)], dtype=np.float64)
    phi = np.array(
        [log_ratio(v, t, alphabet_size) for v, t in zip(cum_viable, cum_total, strict=True)],
        dtype=np.float64,
    )
    return DensityCurve(
        rank=rank,
        length=length,
        alphabet_size=alphabet_size,
        counts=tuple(int(c) for c in counts),
        cum_viable=cum_viable,
        cum_total=cum_total,
        rho=rho,
        phi=phi,
    )


def density_curve(
    rank: int, census: CensusResult, method: DistanceMethod = "auto"
) -> DensityCurve:
    """rho_i(n) and phi_i(n) for n = 0..L around viable genome ``rank``.

    Raises:
        DomainError: If ``rank`` is not viable

    Example:
        ```python
        curve = density_curve(Genome.from_letters("aacde", 8).rank, census)
        curve.phi[0]  # 0.0
        ```
    """
    counts = viable_counts_by_distance(rank, census, method)
    return _curve_from_counts(rank, counts, census.length, census.alphabet_size)


def density_curves(census: CensusResult) -> list[DensityCurve]:
    """Curves of every viable genome, in rank order."""
    matrix = distance_count_matrix(census)
    return [
        _curve_from_counts(int(rank), row, census.length, census.alphabet_size)
        for rank, row in zip(census.viable_ranks, matrix, strict=True)
    ]


def mean_curve(census: CensusResult) -> npt.NDArray[np.float64]:
    """Mean of phi_i(n) over every viable genome (averaged in the log domain).

    Raises:
        DomainError: If the census has no viable genome
    """
    if census.viable_count == 0:
        raise DomainError("Mean curve needs at least one viable genome")
    curves = density_curves(census)
    return np.mean(np.stack([curve.phi for curve in curves]), axis=0)


def epistasis_sign(
    curve: DensityCurve,
    baseline: npt.ArrayLike,
    tolerance: float = EPISTASIS_TOLERANCE,
) -> npt.NDArray[np.int8]:
    """Sign of phi_i(n) - phi_ne(n) per n, zero inside the dead band.

    +1 marks antagonistic epistasis (slower decay than independent sites),
    -1 synergistic.

    Raises:
        DomainError: If curve and baseline lengths differ
    """
    reference = np.asarray(baseline, dtype=np.float64)
    if reference.shape != curve.phi.shape:
        raise DomainError(
            f"Curve has {curve.phi.size} points but the baseline has {reference.size}"
        )
    difference = curve.phi - reference
    signs = np.sign(difference).astype(np.int8)
    signs[np.abs(difference) <= tolerance] = 0
    return signs


def compressed_depth(counts: Sequence[int]) -> int:
    """Largest n with no viable mutant at distances 1..n (0 if a neighbour is viable).

    ``counts`` are N_i(k) for k = 0..L, e.g. ``DensityCurve.counts``. Along
    this stretch phi_i follows the perfectly compressed baseline.
    """
    depth = 0
    for count in counts[1:]:
        if count:
            break
        depth += 1
    return depth

