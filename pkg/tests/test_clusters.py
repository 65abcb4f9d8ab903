"""Unit tests for cluster finding and graph export.

This module tests:
- The union-find structure
- Raw and rotation-collapsed clusterings
- Component lookup and graph export (JSON document and DOT)
"""

import pytest

from gpmap import CensusResult, ComponentNotFoundError, ConfigurationError
from gpmap.analysis import (
    DisjointSet,
    export_cluster_graph,
    find_clusters,
    resolve_mode,
    robustness_all,
    viable_edges,
)
from gpmap.oracles import bfs_components


class TestDisjointSet:
    """Test DisjointSet."""

    def test_union_and_find(self) -> None:
        """Test merging and the component count."""
        forest = DisjointSet(5)

        assert forest.union(0, 1)
        assert forest.union(3, 4)
        assert not forest.union(1, 0)
        assert forest.count == 3
        assert forest.find(0) == forest.find(1)
        assert forest.find(2) != forest.find(3)

    def test_roots_are_compressed(self) -> None:
        """Test that roots() maps every element straight to its root."""
        forest = DisjointSet(6)
        for a, b in [(0, 1), (1, 2), (2, 3), (4, 5)]:
            forest.union(a, b)

        roots = forest.roots()

        assert len(set(roots[:4].tolist())) == 1
        assert roots[4] == roots[5]
        assert (forest.parents[roots] == roots).all()


class TestModes:
    """Test mode names."""

    def test_aliases(self) -> None:
        """Test the short aliases."""
        assert resolve_mode("raw") == "raw-sequences"
        assert resolve_mode("collapsed") == "collapsed-rotations"
        assert resolve_mode("collapsed-rotations") == "collapsed-rotations"

    def test_unknown_mode(self) -> None:
        """Test that an unknown mode lists the available ones."""
        with pytest.raises(ConfigurationError, match="Available modes"):
            resolve_mode("rotations")


class TestFindClusters:
    """Test find_clusters()."""

    def test_length_three_raw(self, census_l3: CensusResult) -> None:
        """Test six isolated genomes at L = 3."""
        clusters = find_clusters(census_l3, "raw-sequences")

        assert clusters.count == 6
        assert [c.size for c in clusters.components] == [1] * 6
        assert [c.id for c in clusters.components] == sorted(census_l3.viable_ranks.tolist())
        assert clusters.largest_fraction == pytest.approx(1 / 6)

    def test_length_three_collapsed(self, census_l3: CensusResult) -> None:
        """Test that collapsing rotations leaves two isolated classes."""
        clusters = find_clusters(census_l3, "collapsed")

        assert clusters.mode == "collapsed-rotations"
        assert clusters.count == 2
        assert [c.genomes.size for c in clusters.components] == [3, 3]
        assert [c.representative for c in clusters.components] == [156, 163]

    def test_raw_matches_breadth_first_search(self, census_l5: CensusResult) -> None:
        """Test union-find components against BFS over pairwise distances."""
        clusters = find_clusters(census_l5, "raw-sequences")

        expected = set(bfs_components(census_l5))
        actual = {frozenset(c.genomes.tolist()) for c in clusters.components}

        assert actual == expected

    def test_component_fields(self, census_l5: CensusResult) -> None:
        """Test ids, ordering, representatives and edge counts."""
        values = robustness_all(census_l5)
        clusters = find_clusters(census_l5, robustness=values)

        sizes = [c.size for c in clusters.components]
        assert sizes == sorted(sizes, reverse=True)
        assert clusters.vertex_count == census_l5.viable_count
        assert sum(c.edge_count for c in clusters.components) == len(viable_edges(census_l5))
        for component in clusters.components:
            assert component.id == int(component.genomes.min())
            indices = [census_l5.require_viable(int(r)) for r in component.genomes]
            best = max(values[i] for i in indices)
            assert values[census_l5.require_viable(component.representative)] == best

    def test_collapsed_never_splits(self, census_l5: CensusResult) -> None:
        """Test that collapsing rotations only merges raw components."""
        raw = find_clusters(census_l5, "raw")
        collapsed = find_clusters(census_l5, "collapsed")

        assert collapsed.count <= raw.count
        assert sum(c.genomes.size for c in collapsed.components) == census_l5.viable_count
        for component in raw.components:
            owners = [c for c in collapsed.components if component.id in c.genomes]
            assert len(owners) == 1
            assert set(component.genomes.tolist()) <= set(owners[0].genomes.tolist())

    def test_lookup(self, census_l5: CensusResult) -> None:
        """Test get() by id and the error for unknown ids."""
        clusters = find_clusters(census_l5)
        first = clusters.components[0]

        assert clusters.get(first.id) is first
        with pytest.raises(ComponentNotFoundError, match="smallest member rank"):
            clusters.get(-1)
        with pytest.raises(KeyError):
            clusters.get(-1)


class TestClusterGraph:
    """Test export_cluster_graph()."""

    def test_graph_of_largest_component(self, census_l5: CensusResult) -> None:
        """Test node and edge counts of an exported component."""
        clusters = find_clusters(census_l5)
        largest = clusters.components[0]

        graph = export_cluster_graph(largest.id, clusters, census_l5)

        assert graph.node_count == largest.size
        assert graph.edge_count == largest.edge_count
        document = graph.to_document()
        assert document["component"] == largest.id
        assert document["mode"] == "raw-sequences"
        assert len(document["nodes"]) == largest.size  # type: ignore[arg-type]

    def test_dot_output(self, census_l3: CensusResult) -> None:
        """Test the DOT text of a single-vertex component."""
        clusters = find_clusters(census_l3)

        dot = export_cluster_graph(156, clusters, census_l3).to_dot()

        assert dot == 'graph component_156 {\n  156 [label="cde", robustness=0];\n}\n'

    def test_unknown_component(self, census_l3: CensusResult) -> None:
        """Test that exporting a missing id fails."""
        with pytest.raises(ComponentNotFoundError):
            export_cluster_graph(0, find_clusters(census_l3), census_l3)
