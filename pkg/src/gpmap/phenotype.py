"""Phenotype classification: non-viable, self-replicator or colony-forming.

A genome is a ``SelfReplicator`` when its first offspring is an exact copy
of itself. Otherwise the reproduction graph (genotype -> emitted offspring)
is explored outward from the genome, at most G generations deep and at most
B genotypes in total; a reproductive cycle among the explored genotypes makes
the genome ``ColonyForming``, since parents survive division and a cycle
therefore grows without bound. Everything else, including an exploration
that ran out of budget, is ``NonViable``. A genome viable under some budgets
stays viable under any larger ones.
"""

import logging
from collections import deque
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import networkx as nx

from .base import ChainBudgets, ExecutionLimits
from .genome import Genome
from .isa import Instruction, IsaSpec
from .vm import ExecutionOutcome, execute

logger = logging.getLogger("gpmap.phenotype")

PhenotypeKind = Literal["NonViable", "SelfReplicator", "ColonyForming"]

Executor = Callable[[Genome, IsaSpec, ExecutionLimits], ExecutionOutcome]

# A program lacking any of these can never emit an offspring
REPRODUCTION_INSTRUCTIONS = frozenset(
    {Instruction.ALLOC, Instruction.COPY, Instruction.DIVIDE}
)


@dataclass(frozen=True, slots=True)
class Phenotype:
    """Classification of one genome with its evidence.

    Attributes:
        kind: Strongest applicable label
        chain: Reproduction path from the genome to the genotype that closes
            the cycle (empty for NonViable)
        cycle_start: Index in ``chain`` of the genotype the cycle returns to
        explored: Distinct genotypes executed during classification
        budget_exhausted: Exploration stopped early because of G or B
    """

    kind: PhenotypeKind
    chain: tuple[Genome, ...] = ()
    cycle_start: int | None = None
    explored: int = 0
    budget_exhausted: bool = False

    @property
    def viable(self) -> bool:
        """Viable means any label but NonViable (SelfReplicator counts too)."""
        return self.kind != "NonViable"


def can_reproduce(genome: Genome, isa: IsaSpec) -> bool:
    """Cheap necessary condition for emitting any offspring under ``isa``."""
    table = isa.table
    present = {table[s] for s in set(genome.symbols)}
    return REPRODUCTION_INSTRUCTIONS <= present


def classify(
    genome: Genome,
    isa: IsaSpec,
    limits: ExecutionLimits,
    budgets: ChainBudgets,
    *,
    executor: Executor | None = None,
) -> Phenotype:
    """Classify ``genome`` as NonViable, SelfReplicator or ColonyForming.

    Args:
        genome: Genome to classify
        isa: Instruction set
        limits: Per-execution limits (T, M)
        budgets: Reproduction-walk budgets (G, B)
        executor: Replacement for :func:`gpmap.vm.execute`, used by tests to
            script a reproduction graph. The reproduction shortcut is only
            applied with the real executor.

    Returns:
        Phenotype with the reproduction chain used as evidence

    Example:
        ```python
        phenotype = classify(Genome.from_letters("cdfeaa", 8), IsaSpec(), limits, ChainBudgets())
        phenotype.kind  # "SelfReplicator"
        ```
    """
    run = executor if executor is not None else execute
    if executor is None and not can_reproduce(genome, isa):
        return Phenotype(kind="NonViable")

    outcome = run(genome, isa, limits)
    if not outcome.offspring:
        return Phenotype(kind="NonViable", explored=1)
    if outcome.offspring[0] == genome:
        return Phenotype(kind="SelfReplicator", chain=(genome,), cycle_start=0, explored=1)

    # Genotypes are executed in breadth-first order; G bounds the distance from
    # the genome and B the number executed, so raising either only extends the
    # executed set. Only executed genotypes have out-edges in ``graph``.
    graph = nx.DiGraph()
    executed: set[Genome] = set()
    parents: dict[Genome, Genome | None] = {genome: None}
    depths: dict[Genome, int] = {genome: 0}
    frontier: deque[Genome] = deque([genome])
    exhausted = False

    while frontier:
        node = frontier.popleft()
        if depths[node] >= budgets.max_depth or len(executed) >= budgets.max_genotypes:
            exhausted = True
            break
        offspring = outcome.offspring if node == genome else run(node, isa, limits).offspring
        executed.add(node)
        graph.add_node(node)
        graph.add_edges_from((node, child) for child in offspring)
        for child in offspring:
            if child in executed and nx.has_path(graph, child, node):
                return _colony(node, child, parents, graph, explored=len(executed))
            if child not in parents:
                parents[child] = node
                depths[child] = depths[node] + 1
                frontier.append(child)

    if exhausted:
        logger.debug(
            f"Chain budget exhausted for {genome.letters} after {len(executed)} genotypes"
        )
    return Phenotype(kind="NonViable", explored=len(executed), budget_exhausted=exhausted)


def _colony(
    node: Genome,
    child: Genome,
    parents: dict[Genome, Genome | None],
    graph: nx.DiGraph,
    *,
    explored: int,
) -> Phenotype:
    """Build the evidence chain for the cycle closed by the edge ``node -> child``.

    The chain is the discovery path from the genome to the first genotype on
    the cycle, followed by the cycle itself starting at that genotype.
    """
    cycle = [node, *nx.shortest_path(graph, child, node)[:-1]]

    prefix: list[Genome] = []
    ancestor = parents[node]
    while ancestor is not None:
        prefix.append(ancestor)
        ancestor = parents[ancestor]
    prefix.reverse()

    entry = next((i for i, g in enumerate(prefix) if g in cycle), len(prefix))
    if entry < len(prefix):
        head = cycle.index(prefix[entry])
        cycle = cycle[head:] + cycle[:head]

    return Phenotype(
        kind="ColonyForming",
        chain=(*prefix[:entry], *cycle),
        cycle_start=entry,
        explored=explored,
    )
