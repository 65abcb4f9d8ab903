"""Rotation equivalence classes of the viable set."""

import logging
from dataclasses import dataclass

import numpy as np

from ..ranking import RankArray, rank_array
from ..storage import CensusResult
from .neighbors import viable_mask

logger = logging.getLogger("gpmap.analysis.rotations")


@dataclass(frozen=True, eq=False)
class RotationClasses:
    """Partition of the viable set under cyclic rotation.

    Ranks order sequences lexicographically, so the smallest viable rotation
    is also the smallest rank among a class's members.

    Attributes:
        representative_of: Class representative rank per viable genome,
            aligned with ``census.viable_ranks``
        representatives: Distinct representative ranks, ascending
        class_of: Class index per viable genome (into ``representatives``)
        sizes: Member count per class
    """

    representative_of: RankArray
    representatives: RankArray
    class_of: RankArray
    sizes: RankArray

    @property
    def class_count(self) -> int:
        return int(self.representatives.size)

    def members(self, class_index: int, census: CensusResult) -> RankArray:
        """Viable ranks of one class, ascending."""
        return census.viable_ranks[self.class_of == class_index]


def rotation_classes(census: CensusResult) -> RotationClasses:
    """Group viable genomes by rotation; rotations outside the viable set never count.

    Example:
        ```python
        classes = rotation_classes(census)
        classes.class_count <= census.viable_count  # True
        ```
    """
    representative = census.viable_ranks.copy()
    symbols = census.symbols
    for shift in range(1, census.length):
        rotated = rank_array(np.roll(symbols, -shift, axis=1), census.alphabet_size)
        present = viable_mask(census, rotated)
        representative = np.where(present, np.minimum(representative, rotated), representative)

    representatives, class_of, sizes = np.unique(
        representative, return_inverse=True, return_counts=True
    )
    logger.debug(
        f"{census.viable_count} viable genomes fall into {representatives.size} rotation classes"
    )
    return RotationClasses(
        representative_of=representative,
        representatives=representatives.astype(np.int64),
        class_of=class_of.astype(np.int64).reshape(-1),
        sizes=sizes.astype(np.int64),
    )
