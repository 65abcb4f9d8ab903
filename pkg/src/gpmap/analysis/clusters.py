"""Connected clusters of the viable Hamming graph and their graph export.

Two vertex sets are supported:

- ``raw-sequences``: every viable genome is a vertex
- ``collapsed-rotations``: every rotation class is one vertex; two classes
  are adjacent when any of their members are one mutation apart

Components are found by union-find over the pre-collected edge list, then
reported largest first. A component's id is its smallest member rank, so
ids never depend on processing order.
"""

import logging
from dataclasses import dataclass
from typing import Literal

import networkx as nx
import numpy as np
import numpy.typing as npt

from ..base import ComponentNotFoundError, ConfigurationError
from ..genome import Genome
from ..ranking import RankArray
from ..storage import CensusResult
from .neighbors import robustness_all, viable_edges
from .rotations import rotation_classes

logger = logging.getLogger("gpmap.analysis.clusters")

ClusterMode = Literal["raw-sequences", "collapsed-rotations"]

CLUSTER_MODES: dict[str, ClusterMode] = {
    "raw-sequences": "raw-sequences",
    "raw": "raw-sequences",
    "collapsed-rotations": "collapsed-rotations",
    "collapsed": "collapsed-rotations",
}


def resolve_mode(mode: str) -> ClusterMode:
    """Normalise a mode name; ``raw`` and ``collapsed`` are accepted as aliases.

    Raises:
        ConfigurationError: If the mode is unknown
    """
    try:
        return CLUSTER_MODES[mode]
    except KeyError as e:
        raise ConfigurationError(
            f"Unknown cluster mode '{mode}'. Available modes: {sorted(CLUSTER_MODES)}"
        ) from e


class DisjointSet:
    """Array-backed union-find with union by size."""

    def __init__(self, n: int) -> None:
        self.sizes = np.ones(n, dtype=np.int64)
        self.parents = np.arange(n, dtype=np.int64)
        self.count = n

    def find(self, index: int) -> int:
        parents = self.parents
        root = index
        while root != parents[root]:
            root = int(parents[root])
        # path compression
        while index != root:
            parents[index], index = root, int(parents[index])
        return root

    def union(self, a: int, b: int) -> bool:
        a = self.find(a)
        b = self.find(b)
        if a == b:
            return False
        if self.sizes[a] < self.sizes[b]:
            a, b = b, a
        self.parents[b] = a
        self.sizes[a] += self.sizes[b]
        self.count -= 1
        return True

    def roots(self) -> RankArray:
        """Root of every element, fully compressed."""
        parents = self.parents
        grand = parents[parents]
        while (parents != grand).any():
            parents = grand
            grand = parents[parents]
        self.parents = parents
        return parents.copy()


@dataclass(frozen=True, eq=False)
class Component:
    """One connected cluster.

    Attributes:
        id: Smallest viable rank in the component
        size: Vertex count (genomes, or rotation classes when collapsed)
        representative: Rank of the most robust member (its class
            representative when collapsed); ties go to the smallest rank
        edge_count: Edges between the component's vertices
        members: Vertex ranks, ascending (class representatives when collapsed)
        genomes: Every viable genome rank in the component, ascending
    """

    id: int
    size: int
    representative: int
    edge_count: int
    members: RankArray
    genomes: RankArray


@dataclass(frozen=True, eq=False)
class ClusterSet:
    """All components of one clustering, sorted by size then id."""

    mode: ClusterMode
    components: tuple[Component, ...]

    @property
    def count(self) -> int:
        return len(self.components)

    @property
    def vertex_count(self) -> int:
        return sum(component.size for component in self.components)

    @property
    def largest_fraction(self) -> float:
        """Share of vertices in the largest component (0.0 when empty)."""
        if not self.components:
            return 0.0
        return self.components[0].size / self.vertex_count

    def get(self, component_id: int) -> Component:
        """Look a component up by id.

        Raises:
            ComponentNotFoundError: If no component has this id
        """
        for component in self.components:
            if component.id == component_id:
                return component
        raise ComponentNotFoundError(
            f"No {self.mode} component with id {component_id}; "
            f"ids are the smallest member rank of each component"
        )


def _components(vertex_count: int, edges: npt.NDArray[np.int64]) -> RankArray:
    """Union-find labelling: a component label per vertex."""
    forest = DisjointSet(vertex_count)
    for a, b in edges.tolist():
        forest.union(a, b)
    _, labels = np.unique(forest.roots(), return_inverse=True)
    return labels.reshape(-1).astype(np.int64)


def find_clusters(
    census: CensusResult,
    mode: str = "raw-sequences",
    robustness: RankArray | None = None,
) -> ClusterSet:
    """Connected components of the viable one-mutant graph.

    Args:
        census: Census to cluster
        mode: ``raw-sequences`` or ``collapsed-rotations`` (or ``raw``/``collapsed``)
        robustness: Precomputed robustness per viable genome, reused if given

    Returns:
        ClusterSet with components sorted by size (descending) then id

    Example:
        ```python
        clusters = find_clusters(census, mode="collapsed")
        clusters.count, clusters.largest_fraction
        ```
    """
    resolved = resolve_mode(mode)
    viable = census.viable_ranks
    values = robustness_all(census) if robustness is None else robustness
    edges = viable_edges(census)

    if resolved == "raw-sequences":
        vertex_of = np.arange(census.viable_count, dtype=np.int64)
        vertex_ranks = viable
        vertex_edges = edges
    else:
        classes = rotation_classes(census)
        vertex_of = classes.class_of
        vertex_ranks = classes.representatives
        mapped = vertex_of[edges] if edges.size else edges
        if mapped.size:
            mapped = np.sort(mapped, axis=1)
            mapped = mapped[mapped[:, 0] != mapped[:, 1]]
            mapped = np.unique(mapped, axis=0) if mapped.size else mapped
        vertex_edges = mapped.reshape(-1, 2)

    labels = _components(vertex_ranks.size, vertex_edges)
    genome_labels = labels[vertex_of]
    edge_counts = np.bincount(
        labels[vertex_edges[:, 0]], minlength=int(labels.max(initial=-1)) + 1
    )

    components: list[Component] = []
    for label in range(int(labels.max(initial=-1)) + 1):
        genome_index = np.flatnonzero(genome_labels == label)
        # most robust genome, smallest rank on ties (indices are rank-sorted)
        best = genome_index[int(np.argmax(values[genome_index]))]
        representative = int(viable[best]) if resolved == "raw-sequences" else int(
            vertex_ranks[vertex_of[best]]
        )
        members = vertex_ranks[labels == label]
        components.append(
            Component(
                id=int(viable[genome_index[0]]),
                size=int(members.size),
                representative=representative,
                edge_count=int(edge_counts[label]) if label < edge_counts.size else 0,
                members=members,
                genomes=viable[genome_index],
            )
        )
    components.sort(key=lambda c: (-c.size, c.id))

    logger.info(
        f"Found {len(components)} {resolved} clusters over {vertex_ranks.size} vertices"
    )
    return ClusterSet(mode=resolved, components=tuple(components))


# ============================================================================
# GRAPH EXPORT
# ============================================================================


@dataclass(frozen=True, eq=False)
class ClusterGraph:
    """One component as a graph over its viable genomes.

    Nodes carry ``letters`` and ``robustness`` attributes; edges join genomes
    one mutation apart.
    """

    component_id: int
    mode: ClusterMode
    graph: nx.Graph

    @property
    def node_count(self) -> int:
        return int(self.graph.number_of_nodes())

    @property
    def edge_count(self) -> int:
        return int(self.graph.number_of_edges())

    def to_document(self) -> dict[str, object]:
        """JSON-ready node/edge document."""
        return {
            "component": self.component_id,
            "mode": self.mode,
            "nodes": [
                {"rank": rank, "letters": data["letters"], "robustness": data["robustness"]}
                for rank, data in sorted(self.graph.nodes(data=True))
            ],
            "edges": sorted([min(a, b), max(a, b)] for a, b in self.graph.edges()),
        }

    def to_dot(self) -> str:
        """Graphviz DOT text: nodes named by rank, labelled by letters."""
        lines = [f"graph component_{self.component_id} {{"]
        for rank, data in sorted(self.graph.nodes(data=True)):
            lines.append(
                f'  {rank} [label="{data["letters"]}", robustness={data["robustness"]}];'
            )
        for a, b in sorted((min(a, b), max(a, b)) for a, b in self.graph.edges()):
            lines.append(f"  {a} -- {b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def export_cluster_graph(
    component_id: int,
    clusters: ClusterSet,
    census: CensusResult,
    robustness: RankArray | None = None,
) -> ClusterGraph:
    """Build the graph of one component for export.

    Raises:
        ComponentNotFoundError: If ``component_id`` is not a component of ``clusters``
    """
    component = clusters.get(component_id)
    values = robustness_all(census) if robustness is None else robustness
    viable = census.viable_ranks
    index = np.searchsorted(viable, component.genomes)
    inside = np.zeros(census.viable_count, dtype=bool)
    inside[index] = True

    graph = nx.Graph()
    for position in index.tolist():
        rank = int(viable[position])
        graph.add_node(
            rank,
            letters=Genome.from_rank(rank, census.length, census.alphabet_size).letters,
            robustness=int(values[position]),
        )
    edges = viable_edges(census)
    if edges.size:
        edges = edges[inside[edges[:, 0]]]
        graph.add_edges_from((int(viable[a]), int(viable[b])) for a, b in edges.tolist())
    return ClusterGraph(component_id=component.id, mode=clusters.mode, graph=graph)
