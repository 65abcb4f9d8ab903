"""Deterministic replicator virtual machine.

The machine runs a genome as a circular program with one instruction
pointer, a read head and a write head. ``alloc``/``copy``/``divide`` build
an offspring in a child buffer; the parent survives division and keeps
executing. Offspring are never executed here, only by ``classify``.

Every instruction is total: ill-conditioned uses (copy without a buffer,
divide before the buffer is full, jmp-a without a nop-a target) are no-ops,
and each step advances the step counter by exactly one.

Example:
    ```python
    from gpmap.base import ExecutionLimits
    from gpmap.genome import Genome
    from gpmap.isa import IsaSpec
    from gpmap.vm import execute

    genome = Genome.from_letters("cdfeaa", alphabet_size=8)
    outcome = execute(genome, IsaSpec(), ExecutionLimits.for_length(6))
    outcome.offspring[0] == genome  # True
    outcome.reason  # "OffspringCap"
    ```
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

from .base import DomainError, ExecutionLimits
from .genome import LETTERS, Genome
from .isa import Instruction, IsaSpec

TerminationReason = Literal["StepLimit", "Halted", "OffspringCap"]


@dataclass(slots=True)
class VmState:
    """Mutable machine state, confined to a single execution.

    Attributes:
        ip: Instruction pointer in [0, L)
        read_head: Read head position in [0, L)
        write_head: Write head position in [0, L)
        copied: Symbols copied into the current buffer, in [0, L]
        child: Child buffer of L slots, or None when no alloc is pending
        steps: Executed instruction count
        emitted: Completed offspring, in emission order
        halted: Set by ``halt``
    """

    ip: int = 0
    read_head: int = 0
    write_head: int = 0
    copied: int = 0
    child: list[int] | None = None
    steps: int = 0
    emitted: list[Genome] = field(default_factory=list)
    halted: bool = False


@dataclass(frozen=True, slots=True)
class ExecutionOutcome:
    """Result of one execution.

    Attributes:
        offspring: Emitted genomes in order (at most M)
        steps_used: Executed instructions (never above T)
        reason: Why the run stopped
    """

    offspring: tuple[Genome, ...]
    steps_used: int
    reason: TerminationReason


@dataclass(frozen=True, slots=True)
class TraceRow:
    """One executed step: the instruction run and the state after it."""

    step: int
    ip: int
    letter: str
    copied: int
    read_head: int
    write_head: int
    emitted: int

    def format(self) -> str:
        return (
            f"step={self.step} ip={self.ip} op={self.letter} copied={self.copied} "
            f"read={self.read_head} write={self.write_head} emitted={self.emitted}"
        )


def _jump_targets(program: tuple[Instruction, ...]) -> tuple[int | None, ...]:
    """Resolve the jmp-a destination for every position of ``program``."""
    length = len(program)
    targets: list[int | None] = []
    for ip in range(length):
        target = None
        for offset in range(1, length + 1):
            position = (ip + offset) % length
            if program[position] is Instruction.NOP_A:
                target = (position + 1) % length
                break
        targets.append(target)
    return tuple(targets)


class Machine:
    """A genome loaded into the virtual machine.

    Decoding and jump resolution happen once at construction; ``step`` and
    ``run`` then only touch the per-execution ``VmState``.

    Attributes:
        genome: The program being executed
        isa: Instruction set used for decoding
        program: Decoded instruction per position
    """

    def __init__(self, genome: Genome, isa: IsaSpec) -> None:
        if genome.alphabet_size != isa.alphabet_size:
            raise DomainError(
                f"Genome alphabet size {genome.alphabet_size} does not match "
                f"ISA '{isa.id}' alphabet size {isa.alphabet_size}"
            )
        self.genome = genome
        self.isa = isa
        table = isa.table
        self.program: tuple[Instruction, ...] = tuple(table[s] for s in genome.symbols)
        self._jump_targets = _jump_targets(self.program)

    def initial_state(self) -> VmState:
        return VmState()

    def step(self, state: VmState) -> VmState:
        """Execute the instruction at ``state.ip``; mutates and returns ``state``.

        Raises:
            DomainError: If the state is already halted
        """
        if state.halted:
            raise DomainError("Cannot step a halted machine")
        length = len(self.program)
        ip = state.ip
        op = self.program[ip]
        next_ip = ip + 1

        if op is Instruction.COPY:
            child = state.child
            if child is not None:
                child[state.write_head] = self.genome.symbols[state.read_head]
                state.read_head = (state.read_head + 1) % length
                state.write_head = (state.write_head + 1) % length
                if state.copied < length:
                    state.copied += 1
        elif op is Instruction.IF_DONE:
            if state.copied != length:
                next_ip = ip + 2
        elif op is Instruction.ALLOC:
            # an existing buffer keeps its progress
            if state.child is None:
                state.child = [0] * length
                state.copied = 0
        elif op is Instruction.DIVIDE:
            if state.child is not None and state.copied == length:
                state.emitted.append(Genome(tuple(state.child), self.genome.alphabet_size))
                state.child = None
                state.copied = 0
        elif op is Instruction.JMP_A:
            target = self._jump_targets[ip]
            if target is not None:
                next_ip = target
        elif op is Instruction.HALT:
            state.halted = True
        elif op is Instruction.SKIP_READ:
            state.read_head = (state.read_head + 1) % length

        state.ip = next_ip % length
        state.steps += 1
        return state

    def run(
        self,
        limits: ExecutionLimits,
        on_step: Callable[[TraceRow], None] | None = None,
    ) -> ExecutionOutcome:
        """Run from the initial state until halt, offspring cap or step limit.

        The checks after each step run in that order, so a halt or the M-th
        offspring on step T is reported as Halted or OffspringCap with
        ``steps_used == T``; StepLimit always means T steps ran.

        Args:
            limits: Step limit T and offspring cap M
            on_step: Optional callback receiving a TraceRow after every step

        Returns:
            ExecutionOutcome for this run
        """
        state = self.initial_state()
        step_limit = limits.step_limit
        offspring_cap = limits.offspring_cap
        reason: TerminationReason
        while True:
            ip = state.ip
            self.step(state)
            if on_step is not None:
                on_step(
                    TraceRow(
                        step=state.steps,
                        ip=ip,
                        letter=LETTERS[self.genome.symbols[ip]],
                        copied=state.copied,
                        read_head=state.read_head,
                        write_head=state.write_head,
                        emitted=len(state.emitted),
                    )
                )
            if state.halted:
                reason = "Halted"
                break
            if len(state.emitted) >= offspring_cap:
                reason = "OffspringCap"
                break
            if state.steps >= step_limit:
                reason = "StepLimit"
                break
        return ExecutionOutcome(
            offspring=tuple(state.emitted),
            steps_used=state.steps,
            reason=reason,
        )


def step(state: VmState, genome: Genome, isa: IsaSpec) -> VmState:
    """Execute one instruction of ``genome`` from ``state``.

    Convenience wrapper around ``Machine(genome, isa).step(state)``; loops
    should build the Machine once instead.
    """
    return Machine(genome, isa).step(state)


def execute(genome: Genome, isa: IsaSpec, limits: ExecutionLimits) -> ExecutionOutcome:
    """Run ``genome`` from the initial state and report its offspring.

    Deterministic: identical inputs always yield identical outcomes.

    Example:
        ```python
        outcome = execute(Genome.from_letters("hhhhhh", 8), IsaSpec(), limits)
        outcome.reason, outcome.steps_used  # ("Halted", 1)
        ```
    """
    return Machine(genome, isa).run(limits)


@dataclass(frozen=True, slots=True)
class Trace:
    """Step-by-step record of one execution."""

    rows: tuple[TraceRow, ...]
    outcome: ExecutionOutcome


def trace(genome: Genome, isa: IsaSpec, limits: ExecutionLimits) -> Trace:
    """Execute ``genome`` while recording every step."""
    rows: list[TraceRow] = []
    outcome = Machine(genome, isa).run(limits, on_step=rows.append)
    return Trace(rows=tuple(rows), outcome=outcome)
