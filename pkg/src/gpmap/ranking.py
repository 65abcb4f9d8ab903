"""Rank/unrank arithmetic for fixed-length base-D sequences.

A sequence of L symbols over an alphabet of size D is identified with the
base-D integer whose most significant digit is symbol 0. The scalar helpers
work on plain tuples; the array helpers vectorise the same arithmetic with
numpy for the analysis layer.
"""

from collections.abc import Iterator, Sequence

import numpy as np
import numpy.typing as npt

from .base import ConfigurationError, DomainError

# Largest supported sequence-space size (ranks fit a signed 64-bit integer)
MAX_SPACE_SIZE = 2**63

RankArray = npt.NDArray[np.int64]


def space_size(length: int, alphabet_size: int) -> int:
    """Return D^L, the number of distinct sequences."""
    return alphabet_size**length


def check_envelope(length: int, alphabet_size: int) -> None:
    """Ensure the sequence space fits the 63-bit rank ceiling.

    Raises:
        ConfigurationError: If L < 1, D < 2 or D^L exceeds 2^63
    """
    if length < 1:
        raise ConfigurationError(f"Sequence length must be positive, got {length}")
    if alphabet_size < 2:
        raise ConfigurationError(f"Alphabet size must be at least 2, got {alphabet_size}")
    if space_size(length, alphabet_size) > MAX_SPACE_SIZE:
        raise ConfigurationError(
            f"D^L = {alphabet_size}^{length} exceeds 2^63: ranks are stored as 64-bit "
            f"integers, so L·log2(D) must not exceed 63 "
            f"(here {length}·log2({alphabet_size}) = "
            f"{length * np.log2(alphabet_size):.2f})"
        )


def rank_symbols(symbols: Sequence[int], alphabet_size: int) -> int:
    """Return the base-D value of ``symbols`` (symbol 0 most significant)."""
    value = 0
    for symbol in symbols:
        value = value * alphabet_size + symbol
    return value


def unrank_symbols(rank: int, length: int, alphabet_size: int) -> tuple[int, ...]:
    """Inverse of :func:`rank_symbols`.

    Raises:
        DomainError: If ``rank`` is negative or not below D^L
    """
    total = space_size(length, alphabet_size)
    if not 0 <= rank < total:
        raise DomainError(
            f"Rank {rank} outside [0, {alphabet_size}^{length}) = [0, {total})"
        )
    digits = [0] * length
    for position in range(length - 1, -1, -1):
        rank, digits[position] = divmod(rank, alphabet_size)
    return tuple(digits)


def iter_symbols(
    lo: int, hi: int, length: int, alphabet_size: int
) -> Iterator[tuple[int, ...]]:
    """Yield the symbol tuples of ranks ``lo .. hi-1`` in ascending order.

    Only the first sequence is unranked by division; the rest are produced
    by incrementing the last digit with carry, odometer style.

    Example:
        ```python
        list(iter_symbols(6, 9, 2, 4))
        # [(1, 2), (1, 3), (2, 0)]
        ```
    """
    if hi <= lo:
        return
    digits = list(unrank_symbols(lo, length, alphabet_size))
    last = alphabet_size - 1
    for _ in range(hi - lo):
        yield tuple(digits)
        position = length - 1
        while position >= 0 and digits[position] == last:
            digits[position] = 0
            position -= 1
        if position >= 0:
            digits[position] += 1


def place_values(length: int, alphabet_size: int) -> RankArray:
    """Return D^(L-1-p) for p = 0..L-1 as an int64 array."""
    return np.array(
        [alphabet_size ** (length - 1 - p) for p in range(length)], dtype=np.int64
    )


def unrank_array(
    ranks: npt.ArrayLike, length: int, alphabet_size: int
) -> npt.NDArray[np.int64]:
    """Vectorised unrank: an (n, L) symbol matrix for ``n`` ranks."""
    values = np.asarray(ranks, dtype=np.int64).reshape(-1, 1)
    return (values // place_values(length, alphabet_size)) % alphabet_size


def rank_array(symbols: npt.ArrayLike, alphabet_size: int) -> RankArray:
    """Vectorised rank of an (n, L) symbol matrix."""
    matrix = np.asarray(symbols, dtype=np.int64)
    if matrix.ndim == 1:
        matrix = matrix.reshape(1, -1)
    return matrix @ place_values(matrix.shape[1], alphabet_size)
