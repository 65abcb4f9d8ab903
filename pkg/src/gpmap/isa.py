"""Instruction-set registry for the replicator virtual machine.

This module holds the instruction tables of every supported ISA and the
``IsaSpec`` model that selects one of them. Symbols at or above an ISA's
core size decode to ``nop-a`` (padding), so decoding is total over the
alphabet and mutation can never produce an undecodable genome.

ISA ``default-v1`` (symbols 0..7, letters a..h):

    a nop-a    no effect; target marker for jmp-a
    b nop-b    no effect
    c alloc    create an L-slot child buffer if none exists, copied = 0
    d copy     child[write] = genome[read]; advance both heads; copied += 1 (max L)
    e divide   if the buffer is full (copied == L), emit it as an offspring
    f if-done  if copied == L run the next instruction, otherwise skip it
    g jmp-a    continue after the nearest nop-a ahead (circular); nop if none
    h halt     stop execution

ISA ``skew-v1`` adds ``i skip-read``, which advances only the read head, so
offspring can differ from their parents.

Example:
    ```python
    from gpmap.isa import IsaSpec, decode

    isa = IsaSpec.named("default-v1", pad_nops=2)
    isa.alphabet_size  # 10
    decode(2, isa)  # Instruction.ALLOC
    decode(9, isa)  # Instruction.NOP_A (padding)
    ```
"""

import logging
from enum import IntEnum
from functools import lru_cache

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .base import ConfigurationError, DomainError
from .genome import LETTERS, MAX_ALPHABET_SIZE

logger = logging.getLogger("gpmap.isa")


class Instruction(IntEnum):
    """Every instruction known to any registered ISA."""

    NOP_A = 0
    NOP_B = 1
    ALLOC = 2
    COPY = 3
    DIVIDE = 4
    IF_DONE = 5
    JMP_A = 6
    HALT = 7
    SKIP_READ = 8

    @property
    def mnemonic(self) -> str:
        return self.name.lower().replace("_", "-")


DEFAULT_ISA = "default-v1"

# Instruction tables indexed by core symbol value
ISA_TABLES: dict[str, tuple[Instruction, ...]] = {
    "default-v1": (
        Instruction.NOP_A,
        Instruction.NOP_B,
        Instruction.ALLOC,
        Instruction.COPY,
        Instruction.DIVIDE,
        Instruction.IF_DONE,
        Instruction.JMP_A,
        Instruction.HALT,
    ),
    "skew-v1": (
        Instruction.NOP_A,
        Instruction.NOP_B,
        Instruction.ALLOC,
        Instruction.COPY,
        Instruction.DIVIDE,
        Instruction.IF_DONE,
        Instruction.JMP_A,
        Instruction.HALT,
        Instruction.SKIP_READ,
    ),
}


class IsaSpec(BaseModel):
    """Selection of an instruction set plus optional no-op padding.

    Attributes:
        id: Registered ISA identifier
        core_size: Number of distinct instructions of the ISA
        pad_nops: Extra symbols appended to the alphabet, all decoding to nop-a

    Example:
        ```python
        IsaSpec()  # default-v1, core_size=8, pad_nops=0
        IsaSpec.named("skew-v1")
        ```
    """

    model_config = ConfigDict(frozen=True)

    id: str = Field(
        DEFAULT_ISA,
        description="ISA identifier (e.g., 'default-v1', 'skew-v1')"
    )
    core_size: int = Field(
        len(ISA_TABLES[DEFAULT_ISA]),
        ge=1,
        description="Number of distinct core instructions"
    )
    pad_nops: int = Field(
        0,
        ge=0,
        description="Extra no-op symbols appended to reach the alphabet size"
    )

    @model_validator(mode="before")
    @classmethod
    def _fill_core_size(cls, data: object) -> object:
        # core_size follows the registry unless given explicitly
        if isinstance(data, dict) and "core_size" not in data:
            table = ISA_TABLES.get(data.get("id", DEFAULT_ISA))
            if table is not None:
                data = {**data, "core_size": len(table)}
        return data

    @model_validator(mode="after")
    def _check_registry(self) -> "IsaSpec":
        table = ISA_TABLES.get(self.id)
        if table is None:
            raise ValueError(
                f"Unknown ISA '{self.id}'. Available ISAs: {sorted(ISA_TABLES)}"
            )
        if self.core_size != len(table):
            raise ValueError(
                f"ISA '{self.id}' has {len(table)} core instructions, got core_size={self.core_size}"
            )
        if self.alphabet_size > MAX_ALPHABET_SIZE:
            raise ValueError(
                f"Alphabet size {self.alphabet_size} exceeds {MAX_ALPHABET_SIZE} (letters a-z)"
            )
        return self

    @classmethod
    def named(cls, isa_id: str = DEFAULT_ISA, pad_nops: int = 0) -> "IsaSpec":
        """Build an IsaSpec for a registered ISA.

        Raises:
            ConfigurationError: If the ISA is unknown or the padded alphabet is too large
        """
        try:
            return cls(id=isa_id, pad_nops=pad_nops)
        except ValueError as e:
            raise ConfigurationError(str(e)) from e

    @property
    def alphabet_size(self) -> int:
        """Alphabet size D = core_size + pad_nops."""
        return self.core_size + self.pad_nops

    @property
    def table(self) -> tuple[Instruction, ...]:
        """Decoded instruction for every symbol in [0, D)."""
        return instruction_table(self.id, self.pad_nops)


@lru_cache(maxsize=64)
def instruction_table(isa_id: str, pad_nops: int = 0) -> tuple[Instruction, ...]:
    """Return the full decode table (core instructions then nop-a padding)."""
    core = ISA_TABLES.get(isa_id)
    if core is None:
        raise ConfigurationError(
            f"Unknown ISA '{isa_id}'. Available ISAs: {sorted(ISA_TABLES)}"
        )
    if pad_nops:
        logger.debug(f"Padding ISA '{isa_id}' with {pad_nops} nop-a symbols")
    return core + (Instruction.NOP_A,) * pad_nops


def decode(symbol: int, isa: IsaSpec) -> Instruction:
    """Decode one symbol.

    Args:
        symbol: Symbol value in [0, D)
        isa: Instruction set selection

    Returns:
        The instruction for ``symbol``; padding symbols decode to nop-a

    Raises:
        DomainError: If ``symbol`` is negative or not below D

    Example:
        ```python
        decode(0, IsaSpec())  # Instruction.NOP_A
        decode(2, IsaSpec())  # Instruction.ALLOC
        ```
    """
    if not 0 <= symbol < isa.alphabet_size:
        raise DomainError(
            f"Symbol {symbol} outside alphabet [0, {isa.alphabet_size}) of ISA '{isa.id}'"
        )
    return isa.table[symbol]


def letter_for(symbol: int) -> str:
    """Letter used for ``symbol`` in traces and exports."""
    return LETTERS[symbol]
