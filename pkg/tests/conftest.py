"""Pytest fixtures for gpmap tests.

This module provides reusable censuses for the analysis and command-line
tests. The L = 4 and L = 5 censuses over the default 8-letter ISA are small
enough to compute once per session and cross-check against brute force.
"""

import logging
import sys
from collections.abc import Iterator
from pathlib import Path

import pytest

# Add src to path for testing
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from gpmap import CensusConfig, CensusResult, run_census
from gpmap.storage import write_census


@pytest.fixture(autouse=True)
def _reset_gpmap_logger() -> Iterator[None]:
    """Undo the handler the CLI installs so caplog keeps seeing gpmap records."""
    yield
    root = logging.getLogger("gpmap")
    root.handlers.clear()
    root.propagate = True
    root.setLevel(logging.NOTSET)


@pytest.fixture(scope="session")
def census_l3() -> CensusResult:
    """Census of L = 3: exactly the six orderings of alloc, copy and divide.

    Returns:
        CensusResult with bitmap
    """
    return run_census(CensusConfig(length=3, shard_count=4))


@pytest.fixture(scope="session")
def census_l4() -> CensusResult:
    """Census of L = 4 over default-v1, computed in-process.

    Returns:
        CensusResult with bitmap
    """
    return run_census(CensusConfig(length=4, shard_count=8))


@pytest.fixture(scope="session")
def census_l5() -> CensusResult:
    """Census of L = 5 over default-v1, computed in-process.

    Returns:
        CensusResult with bitmap
    """
    return run_census(CensusConfig(length=5, shard_count=16))


@pytest.fixture(scope="session")
def census_l5_no_bitmap(census_l5: CensusResult) -> CensusResult:
    """The L = 5 census without its bitmap, to exercise the sorted-rank paths."""
    return CensusResult(
        length=census_l5.length,
        alphabet_size=census_l5.alphabet_size,
        isa_id=census_l5.isa_id,
        pad_nops=census_l5.pad_nops,
        step_limit=census_l5.step_limit,
        offspring_cap=census_l5.offspring_cap,
        chain_depth=census_l5.chain_depth,
        chain_width=census_l5.chain_width,
        viable_ranks=census_l5.viable_ranks,
        self_replicator_count=census_l5.self_replicator_count,
        shard_count=census_l5.shard_count,
    )


@pytest.fixture(scope="session")
def census_l5_on_disk(
    census_l5: CensusResult, tmp_path_factory: pytest.TempPathFactory
) -> Path:
    """The L = 5 census written to a session temp directory.

    Returns:
        Census path prefix
    """
    prefix = tmp_path_factory.mktemp("censuses") / "l5"
    write_census(census_l5, prefix)
    return prefix


@pytest.fixture(scope="session")
def census_l6_on_disk(tmp_path_factory: pytest.TempPathFactory) -> Path:
    """Full L = 6 census over default-v1, written once per session.

    Only the slow tests use it.

    Returns:
        Census path prefix
    """
    prefix = tmp_path_factory.mktemp("censuses") / "l6"
    run_census(CensusConfig(length=6, workers=4, output=prefix))
    return prefix
