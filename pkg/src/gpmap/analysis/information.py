"""Functional information, binomial shells and the two reference baselines.

All information quantities are in mers: logarithms taken to the base of the
alphabet size D, so a fully specified sequence of length L carries L mers.
"""

import math

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from ..base import DomainError
from ..ranking import space_size


class InfoContent(BaseModel):
    """Functional information of a viable set.

    ``value`` is None and ``defined`` False when the viable set is empty: the
    information is then unbounded and never reported as a number.

    Attributes:
        length: Sequence length L
        alphabet_size: Alphabet size D
        viable_count: N, the number of functional sequences
        value: I = L - log_D N in mers, or None when N = 0
        defined: False exactly when N = 0

    Example:
        ```python
        info = functional_information(914, 8, 26)
        round(info.value, 3)  # 5.907
        ```
    """

    model_config = ConfigDict(frozen=True)

    length: int = Field(..., ge=1)
    alphabet_size: int = Field(..., ge=2)
    viable_count: int = Field(..., ge=0)
    value: float | None = Field(None, description="Information in mers (None if undefined)")
    defined: bool = True

    @property
    def entropy(self) -> float | None:
        """log_D N in mers; I + entropy = L."""
        if not self.defined:
            return None
        return math.log(self.viable_count) / math.log(self.alphabet_size)

    @property
    def fraction(self) -> float:
        """F = N / D^L."""
        return self.viable_count / space_size(self.length, self.alphabet_size)


def functional_information(viable_count: int, length: int, alphabet_size: int) -> InfoContent:
    """Return I = L - log_D N for ``viable_count`` functional sequences.

    Raises:
        DomainError: If ``viable_count`` is negative or exceeds D^L
    """
    total = space_size(length, alphabet_size)
    if not 0 <= viable_count <= total:
        raise DomainError(f"Viable count {viable_count} outside [0, {alphabet_size}^{length}]")
    if viable_count == 0:
        return InfoContent(
            length=length, alphabet_size=alphabet_size, viable_count=0, value=None, defined=False
        )
    value = length - math.log(viable_count) / math.log(alphabet_size)
    return InfoContent(
        length=length,
        alphabet_size=alphabet_size,
        viable_count=viable_count,
        value=min(max(value, 0.0), float(length)),
    )


def shell_sizes(length: int, alphabet_size: int) -> list[int]:
    """Exact sequence counts at Hamming distance k = 0..L: C(L, k)(D-1)^k."""
    return [math.comb(length, k) * (alphabet_size - 1) ** k for k in range(length + 1)]


def cumulative_shells(length: int, alphabet_size: int) -> list[int]:
    """Exact counts of sequences within distance n, for n = 0..L (last equals D^L)."""
    totals: list[int] = []
    running = 0
    for size in shell_sizes(length, alphabet_size):
        running += size
        totals.append(running)
    return totals


def log_ratio(numerator: int, denominator: int, alphabet_size: int) -> float:
    """log_D(numerator / denominator) without forming the (possibly tiny) ratio."""
    return (math.log(numerator) - math.log(denominator)) / math.log(alphabet_size)


def compressed_baseline(length: int, alphabet_size: int) -> npt.NDArray[np.float64]:
    """phi_min(n): log-density of a sequence with no viable mutant at all.

    Example:
        ```python
        compressed_baseline(9, 26)[1]  # -log_26(226), about -1.664
        ```
    """
    if length < 1 or alphabet_size < 2:
        raise DomainError(f"Baseline needs L >= 1 and D >= 2, got L={length}, D={alphabet_size}")
    return np.array(
        [log_ratio(1, total, alphabet_size) for total in cumulative_shells(length, alphabet_size)],
        dtype=np.float64,
    )


def no_epistasis_baseline(length: int, information: float) -> npt.NDArray[np.float64]:
    """phi_ne(n) = -(n / L) * I: the straight line of independently acting sites.

    Raises:
        DomainError: If ``information`` lies outside [0, L]
    """
    if length < 1:
        raise DomainError(f"Baseline needs L >= 1, got {length}")
    if not 0.0 <= information <= length:
        raise DomainError(f"Information {information} mers outside [0, {length}]")
    return -np.arange(length + 1, dtype=np.float64) * (information / length)
