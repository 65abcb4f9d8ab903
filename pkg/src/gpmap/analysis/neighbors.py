"""One-mutant neighbourhoods, robustness and the viable Hamming graph.

Neighbour ranks are computed arithmetically: replacing symbol s by s' at
position p moves the rank by (s' - s) * D^(L-1-p), so whole neighbourhoods
are produced as int64 matrices without unranking each neighbour.
"""

import numpy as np
import numpy.typing as npt

from ..genome import Genome
from ..ranking import RankArray, place_values, unrank_array
from ..storage import CensusResult

# Rows of the neighbour matrix materialised at once
NEIGHBOR_CHUNK = 1 << 14


def hamming_neighbors(genome: Genome) -> list[Genome]:
    """All L*(D-1) one-mutant neighbours, position-major, ascending replacement.

    Example:
        ```python
        [str(n) for n in hamming_neighbors(Genome.from_letters("a", 2))]
        # ["b"]
        ```
    """
    symbols = genome.symbols
    neighbors: list[Genome] = []
    for position, current in enumerate(symbols):
        for replacement in range(genome.alphabet_size):
            if replacement == current:
                continue
            mutated = symbols[:position] + (replacement,) + symbols[position + 1 :]
            neighbors.append(Genome(mutated, genome.alphabet_size))
    return neighbors


def neighbor_rank_matrix(
    ranks: npt.ArrayLike, length: int, alphabet_size: int
) -> npt.NDArray[np.int64]:
    """(n, L*(D-1)) matrix of neighbour ranks, in ``hamming_neighbors`` order."""
    ranks = np.asarray(ranks, dtype=np.int64).reshape(-1)
    symbols = unrank_array(ranks, length, alphabet_size)
    weights = place_values(length, alphabet_size)
    replacements = np.arange(alphabet_size, dtype=np.int64)
    columns = []
    for position in range(length):
        current = symbols[:, position : position + 1]
        candidates = ranks[:, None] + (replacements[None, :] - current) * weights[position]
        keep = replacements[None, :] != current
        columns.append(candidates[keep].reshape(ranks.size, alphabet_size - 1))
    if not columns:
        return np.empty((ranks.size, 0), dtype=np.int64)
    return np.concatenate(columns, axis=1)


def viable_mask(census: CensusResult, ranks: npt.ArrayLike) -> npt.NDArray[np.bool_]:
    """Membership of ``ranks`` (any shape) in the viable set.

    Uses the bitmap when the census carries one, binary search otherwise.
    """
    query = np.asarray(ranks, dtype=np.int64)
    if census.bitmap is not None:
        return ((census.bitmap[query >> 3] >> (query & 7).astype(np.uint8)) & 1).astype(bool)
    viable = census.viable_ranks
    if viable.size == 0:
        return np.zeros(query.shape, dtype=bool)
    position = np.searchsorted(viable, query)
    return viable[np.minimum(position, viable.size - 1)] == query


def robustness(rank: int, census: CensusResult) -> int:
    """Number of viable one-mutant neighbours of viable genome ``rank``.

    Raises:
        DomainError: If ``rank`` is not viable
    """
    census.require_viable(rank)
    neighbors = neighbor_rank_matrix([rank], census.length, census.alphabet_size)
    return int(viable_mask(census, neighbors).sum())


def robustness_all(census: CensusResult) -> RankArray:
    """Robustness of every viable genome, aligned with ``census.viable_ranks``."""
    result = np.zeros(census.viable_count, dtype=np.int64)
    for start in range(0, census.viable_count, NEIGHBOR_CHUNK):
        chunk = census.viable_ranks[start : start + NEIGHBOR_CHUNK]
        neighbors = neighbor_rank_matrix(chunk, census.length, census.alphabet_size)
        result[start : start + chunk.size] = viable_mask(census, neighbors).sum(axis=1)
    return result


def viable_edges(census: CensusResult) -> npt.NDArray[np.int64]:
    """Hamming-1 edges between viable genomes as (E, 2) index pairs, i < j.

    Indices point into ``census.viable_ranks``; rows are sorted.
    """
    viable = census.viable_ranks
    blocks: list[npt.NDArray[np.int64]] = []
    for start in range(0, census.viable_count, NEIGHBOR_CHUNK):
        chunk = viable[start : start + NEIGHBOR_CHUNK]
        neighbors = neighbor_rank_matrix(chunk, census.length, census.alphabet_size)
        present = viable_mask(census, neighbors)
        rows, cols = np.nonzero(present)
        source = rows + start
        target = np.searchsorted(viable, neighbors[rows, cols])
        forward = target > source
        blocks.append(np.stack([source[forward], target[forward]], axis=1))
    if not blocks:
        return np.empty((0, 2), dtype=np.int64)
    edges = np.concatenate(blocks).astype(np.int64)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return edges[order]


def robustness_distribution(census: CensusResult) -> RankArray:
    """Histogram of robustness: entry v counts viable genomes with v viable neighbours."""
    bins = census.length * (census.alphabet_size - 1) + 1
    return np.bincount(robustness_all(census), minlength=bins).astype(np.int64)


def most_robust(census: CensusResult, values: RankArray | None = None) -> tuple[int, int] | None:
    """(rank, robustness) of the most robust viable genome; smallest rank wins ties."""
    values = robustness_all(census) if values is None else values
    if values.size == 0:
        return None
    index = int(np.argmax(values))
    return int(census.viable_ranks[index]), int(values[index])


def most_fragile(census: CensusResult, values: RankArray | None = None) -> tuple[int, int] | None:
    """(rank, robustness) of the least robust viable genome; smallest rank wins ties."""
    values = robustness_all(census) if values is None else values
    if values.size == 0:
        return None
    index = int(np.argmin(values))
    return int(census.viable_ranks[index]), int(values[index])
