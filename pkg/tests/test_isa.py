"""Unit tests for the instruction set registry and decoding."""

import pytest
from pydantic import ValidationError

from gpmap import ConfigurationError, DomainError, Instruction, IsaSpec, decode
from gpmap.isa import ISA_TABLES, instruction_table, letter_for


class TestIsaSpec:
    """Test IsaSpec construction and validation."""

    def test_default_isa(self) -> None:
        """Test that the default ISA has eight symbols and no padding."""
        isa = IsaSpec()

        assert isa.id == "default-v1"
        assert isa.core_size == 8
        assert isa.pad_nops == 0
        assert isa.alphabet_size == 8

    def test_core_size_follows_registry(self) -> None:
        """Test that core_size is filled from the registry for each ISA."""
        for isa_id, table in ISA_TABLES.items():
            assert IsaSpec.named(isa_id).core_size == len(table)
        assert IsaSpec.named("skew-v1").alphabet_size == 9

    def test_padding_extends_alphabet(self) -> None:
        """Test that pad_nops adds nop-a symbols after the core table."""
        isa = IsaSpec.named("default-v1", pad_nops=3)

        assert isa.alphabet_size == 11
        assert isa.table[8:] == (Instruction.NOP_A,) * 3

    def test_unknown_isa_is_configuration_error(self) -> None:
        """Test that an unknown identifier lists the registered ISAs."""
        with pytest.raises(ConfigurationError, match="Available ISAs"):
            IsaSpec.named("default-v9")
        with pytest.raises(ValidationError):
            IsaSpec(id="default-v9")

    def test_alphabet_beyond_letters_rejected(self) -> None:
        """Test that the padded alphabet must fit the letters a..z."""
        IsaSpec.named("default-v1", pad_nops=18)
        with pytest.raises(ConfigurationError, match="exceeds 26"):
            IsaSpec.named("default-v1", pad_nops=19)

    def test_mismatched_core_size_rejected(self) -> None:
        """Test that an explicit core_size must agree with the registry."""
        with pytest.raises(ValidationError):
            IsaSpec(id="default-v1", core_size=9)

    def test_isa_spec_is_frozen(self) -> None:
        """Test that IsaSpec instances are immutable."""
        isa = IsaSpec()
        with pytest.raises(ValidationError):
            isa.pad_nops = 2  # type: ignore[misc]


class TestDecode:
    """Test symbol decoding."""

    def test_default_table_order(self) -> None:
        """Test the default-v1 letter assignment a..h."""
        isa = IsaSpec()
        mnemonics = [decode(symbol, isa).mnemonic for symbol in range(8)]

        assert mnemonics == [
            "nop-a",
            "nop-b",
            "alloc",
            "copy",
            "divide",
            "if-done",
            "jmp-a",
            "halt",
        ]

    def test_skew_adds_skip_read(self) -> None:
        """Test that skew-v1 decodes symbol 8 ('i') to skip-read."""
        assert decode(8, IsaSpec.named("skew-v1")) is Instruction.SKIP_READ

    def test_padding_decodes_to_nop_a(self) -> None:
        """Test that padded symbols decode to nop-a."""
        isa = IsaSpec.named("default-v1", pad_nops=2)

        assert decode(9, isa) is Instruction.NOP_A

    def test_out_of_range_symbol_raises(self) -> None:
        """Test that symbols outside [0, D) raise DomainError."""
        with pytest.raises(DomainError):
            decode(8, IsaSpec())
        with pytest.raises(DomainError):
            decode(-1, IsaSpec())

    def test_instruction_table_unknown_isa(self) -> None:
        """Test the cached table builder rejects unknown ISAs too."""
        with pytest.raises(ConfigurationError):
            instruction_table("nope")

    def test_letter_for(self) -> None:
        """Test the letter used in traces."""
        assert letter_for(0) == "a"
        assert letter_for(7) == "h"
