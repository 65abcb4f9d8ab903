"""Unit tests for genomes and rank arithmetic.

This module tests:
- rank/unrank as a bijection on [0, D^L)
- The odometer iterator and the vectorised helpers
- Letter parsing, rotations and Hamming distance
- The 63-bit envelope check
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpmap import ConfigurationError, DomainError, Genome, rank, unrank
from gpmap.genome import canonical_rotation
from gpmap.ranking import (
    check_envelope,
    iter_symbols,
    rank_array,
    rank_symbols,
    space_size,
    unrank_array,
    unrank_symbols,
)


@st.composite
def shapes_and_ranks(draw: st.DrawFn) -> tuple[int, int, int]:
    length = draw(st.integers(min_value=1, max_value=12))
    alphabet_size = draw(st.integers(min_value=2, max_value=26))
    rank_value = draw(st.integers(min_value=0, max_value=alphabet_size**length - 1))
    return length, alphabet_size, rank_value


class TestRankUnrank:
    """Test the rank/unrank bijection."""

    def test_known_rank(self) -> None:
        """Test that 'cdfeaa' over D=8 has rank 80640."""
        genome = Genome.from_letters("cdfeaa", 8)
        expected = 2 * 8**5 + 3 * 8**4 + 5 * 8**3 + 4 * 8**2

        assert expected == 80640
        assert rank(genome) == expected
        assert unrank(expected, 6, 8) == genome
        assert unrank(80384, 6, 8).letters == "cdfaaa"

    def test_symbol_zero_is_most_significant(self) -> None:
        """Test the digit order: the last position is the least significant."""
        assert rank_symbols((0, 0, 1), 8) == 1
        assert rank_symbols((1, 0, 0), 8) == 64
        assert unrank_symbols(7, 3, 8) == (0, 0, 7)

    @given(shapes_and_ranks())
    def test_unrank_then_rank_is_identity(self, case: tuple[int, int, int]) -> None:
        """Test that rank(unrank(r)) == r everywhere in the space."""
        length, alphabet_size, rank_value = case

        genome = unrank(rank_value, length, alphabet_size)

        assert genome.length == length
        assert rank(genome) == rank_value

    @given(
        st.integers(min_value=2, max_value=26).flatmap(
            lambda d: st.tuples(
                st.just(d), st.lists(st.integers(0, d - 1), min_size=1, max_size=12)
            )
        )
    )
    def test_rank_then_unrank_is_identity(self, case: tuple[int, list[int]]) -> None:
        """Test that unrank(rank(g)) == g for arbitrary symbol lists."""
        alphabet_size, symbols = case
        genome = Genome(tuple(symbols), alphabet_size)

        assert unrank(rank(genome), genome.length, alphabet_size) == genome

    def test_unrank_out_of_range_raises(self) -> None:
        """Test that ranks outside [0, D^L) raise DomainError."""
        with pytest.raises(DomainError, match="outside"):
            unrank(8**3, 3, 8)
        with pytest.raises(DomainError):
            unrank(-1, 3, 8)

    def test_vectorised_helpers_match_scalar(self) -> None:
        """Test that unrank_array and rank_array agree with the scalar versions."""
        ranks = np.array([0, 1, 63, 80384, 80640, 8**6 - 1], dtype=np.int64)

        symbols = unrank_array(ranks, 6, 8)

        assert [tuple(row) for row in symbols.tolist()] == [
            unrank_symbols(int(r), 6, 8) for r in ranks
        ]
        assert rank_array(symbols, 8).tolist() == ranks.tolist()


class TestIterSymbols:
    """Test the odometer iterator used by the census."""

    def test_docstring_example(self) -> None:
        """Test the carry across a digit boundary."""
        assert list(iter_symbols(6, 9, 2, 4)) == [(1, 2), (1, 3), (2, 0)]

    def test_whole_space_in_rank_order(self) -> None:
        """Test that iterating [0, D^L) yields every tuple once, ascending."""
        produced = list(iter_symbols(0, space_size(3, 3), 3, 3))

        assert len(produced) == 27
        assert [rank_symbols(s, 3) for s in produced] == list(range(27))

    def test_empty_range(self) -> None:
        """Test that an empty range yields nothing."""
        assert list(iter_symbols(5, 5, 3, 3)) == []


class TestEnvelope:
    """Test the 63-bit rank envelope."""

    def test_largest_supported_spaces(self) -> None:
        """Test that D^L up to 2^63 passes."""
        check_envelope(63, 2)
        check_envelope(21, 8)

    def test_oversized_space_raises(self) -> None:
        """Test that D^L above 2^63 is a configuration error naming the bound."""
        with pytest.raises(ConfigurationError, match="2\\^63"):
            check_envelope(64, 2)
        with pytest.raises(ConfigurationError):
            check_envelope(22, 8)

    def test_degenerate_shapes_raise(self) -> None:
        """Test that L < 1 and D < 2 are rejected."""
        with pytest.raises(ConfigurationError):
            check_envelope(0, 8)
        with pytest.raises(ConfigurationError):
            check_envelope(3, 1)


class TestGenome:
    """Test Genome parsing and helpers."""

    def test_letters_round_trip(self) -> None:
        """Test that letters parse and print back unchanged."""
        genome = Genome.from_letters("aacde", 8)

        assert genome.symbols == (0, 0, 2, 3, 4)
        assert genome.letters == "aacde"
        assert str(genome) == "aacde"

    def test_invalid_letter_names_position(self) -> None:
        """Test that a letter outside the alphabet reports its position."""
        with pytest.raises(DomainError, match="position 2"):
            Genome.from_letters("abz", 8)
        with pytest.raises(DomainError, match="position 0"):
            Genome.from_letters("Abc", 8)

    def test_symbol_outside_alphabet_raises(self) -> None:
        """Test that direct construction validates symbols."""
        with pytest.raises(DomainError):
            Genome((0, 8), 8)
        with pytest.raises(DomainError):
            Genome((), 8)

    def test_rotations(self) -> None:
        """Test rotation order and the canonical rotation."""
        genome = Genome.from_letters("cdeaa", 8)

        assert [g.letters for g in genome.rotations()] == [
            "cdeaa",
            "deaac",
            "eaacd",
            "aacde",
            "acdea",
        ]
        assert genome.rotate(-2).letters == "aacde"
        assert canonical_rotation(genome).letters == "aacde"

    def test_hamming_distance(self) -> None:
        """Test Hamming distance, including the length check."""
        first = Genome.from_letters("cde", 8)

        assert first.hamming_distance(Genome.from_letters("ced", 8)) == 2
        assert first.hamming_distance(first) == 0
        with pytest.raises(DomainError, match="equal lengths"):
            first.hamming_distance(Genome.from_letters("cdea", 8))

    def test_genomes_are_hashable_values(self) -> None:
        """Test that equal genomes compare and hash equal."""
        assert {Genome.from_letters("cde", 8), Genome((2, 3, 4), 8)} == {Genome((2, 3, 4), 8)}
