"""Genome representation.

A genome is a fixed-length circular sequence over an alphabet of size D.
Its identity doubles as an integer rank in [0, D^L). On the command line and
in exported files genomes are written with letters: ``a`` is symbol 0,
``b`` is symbol 1, and so on.
"""

import string
from dataclasses import dataclass

from .base import DomainError
from .ranking import rank_symbols, unrank_symbols

LETTERS = string.ascii_lowercase

# Letter encoding limits the alphabet to a..z
MAX_ALPHABET_SIZE = len(LETTERS)


@dataclass(frozen=True, slots=True)
class Genome:
    """An immutable genome of ``length`` symbols in [0, alphabet_size).

    Attributes:
        symbols: Symbol values, position 0 first
        alphabet_size: Alphabet size D

    Example:
        ```python
        genome = Genome.from_letters("cdfeaa", alphabet_size=8)
        genome.rank  # 80640
        Genome.from_rank(80640, 6, 8) == genome  # True
        ```
    """

    symbols: tuple[int, ...]
    alphabet_size: int

    def __post_init__(self) -> None:
        if not 1 <= self.alphabet_size <= MAX_ALPHABET_SIZE:
            raise DomainError(
                f"Alphabet size must be in [1, {MAX_ALPHABET_SIZE}], got {self.alphabet_size}"
            )
        if not self.symbols:
            raise DomainError("Genome must have at least one symbol")
        for position, symbol in enumerate(self.symbols):
            if not 0 <= symbol < self.alphabet_size:
                raise DomainError(
                    f"Symbol {symbol} at position {position} outside [0, {self.alphabet_size})"
                )

    @classmethod
    def from_letters(cls, text: str, alphabet_size: int) -> "Genome":
        """Parse a letter string (``a`` = symbol 0).

        Raises:
            DomainError: Naming the first offending position if a character is
                not a lowercase letter below the alphabet size
        """
        symbols = []
        for position, char in enumerate(text):
            symbol = LETTERS.find(char)
            if symbol < 0 or symbol >= alphabet_size:
                allowed = LETTERS[:alphabet_size]
                raise DomainError(
                    f"Invalid letter {char!r} at position {position}: "
                    f"alphabet is '{allowed[0]}'..'{allowed[-1]}'"
                )
            symbols.append(symbol)
        return cls(tuple(symbols), alphabet_size)

    @classmethod
    def from_rank(cls, rank: int, length: int, alphabet_size: int) -> "Genome":
        """Build the genome whose base-D value is ``rank``."""
        return cls(unrank_symbols(rank, length, alphabet_size), alphabet_size)

    @property
    def length(self) -> int:
        return len(self.symbols)

    @property
    def rank(self) -> int:
        return rank_symbols(self.symbols, self.alphabet_size)

    @property
    def letters(self) -> str:
        return "".join(LETTERS[s] for s in self.symbols)

    def rotate(self, offset: int) -> "Genome":
        """Return the cyclic rotation starting at position ``offset``."""
        k = offset % self.length
        return Genome(self.symbols[k:] + self.symbols[:k], self.alphabet_size)

    def rotations(self) -> list["Genome"]:
        """All L rotations, offset 0 first (duplicates kept)."""
        return [self.rotate(k) for k in range(self.length)]

    def hamming_distance(self, other: "Genome") -> int:
        if other.length != self.length:
            raise DomainError(
                f"Hamming distance needs equal lengths, got {self.length} and {other.length}"
            )
        return sum(a != b for a, b in zip(self.symbols, other.symbols, strict=True))

    def __str__(self) -> str:
        return self.letters


def rank(genome: Genome) -> int:
    """Return the rank of ``genome`` (symbol 0 most significant)."""
    return genome.rank


def unrank(r: int, length: int, alphabet_size: int) -> Genome:
    """Return the genome of rank ``r``.

    Raises:
        DomainError: If ``r`` is not in [0, D^L)
    """
    return Genome.from_rank(r, length, alphabet_size)


def canonical_rotation(genome: Genome) -> Genome:
    """Return the lexicographically smallest rotation of ``genome``."""
    return min(genome.rotations(), key=lambda g: g.symbols)
