"""Base configuration models and exception hierarchy for gpmap.

This module provides the foundational pieces shared by every layer of the
workbench: the execution and reproduction budget models consumed by the
virtual machine, and the exception hierarchy used across the census,
analysis and command-line layers.
"""

from pydantic import BaseModel, ConfigDict, Field

# ============================================================================
# CONSTANTS
# ============================================================================

# Default offspring cap M per execution
DEFAULT_OFFSPRING_CAP = 4

# Default reproduction-chain depth budget G
DEFAULT_CHAIN_DEPTH = 16

# Default distinct-genotype budget B for the reproduction-graph walk
DEFAULT_CHAIN_WIDTH = 64


def default_step_limit(length: int) -> int:
    """Return the default step limit T = 4·L² + 64 for genomes of ``length``.

    The canonical copy loop copies one symbol per circular pass, so it needs
    on the order of L² steps to produce one offspring.

    Example:
        ```python
        default_step_limit(6)  # 208
        ```
    """
    return 4 * length * length + 64


# ============================================================================
# CONFIGURATION MODELS
# ============================================================================


class ExecutionLimits(BaseModel):
    """Bounds applied to a single virtual-machine execution.

    Attributes:
        step_limit: Maximum number of instructions executed (T)
        offspring_cap: Execution stops once this many offspring were emitted (M)

    Example:
        ```python
        limits = ExecutionLimits.for_length(6)
        limits.step_limit  # 208
        limits.offspring_cap  # 4
        ```
    """

    model_config = ConfigDict(frozen=True)

    step_limit: int = Field(
        ...,
        ge=1,
        description="Maximum executed instructions per run (T)"
    )
    offspring_cap: int = Field(
        DEFAULT_OFFSPRING_CAP,
        ge=1,
        description="Offspring emitted before a run stops (M)"
    )

    @classmethod
    def for_length(
        cls,
        length: int,
        step_limit: int | None = None,
        offspring_cap: int | None = None,
    ) -> "ExecutionLimits":
        """Build limits for genomes of ``length``, filling in defaults.

        Args:
            length: Genome length L
            step_limit: Explicit T; defaults to 4·L² + 64
            offspring_cap: Explicit M; defaults to 4

        Returns:
            ExecutionLimits instance
        """
        return cls(
            step_limit=step_limit if step_limit is not None else default_step_limit(length),
            offspring_cap=offspring_cap if offspring_cap is not None else DEFAULT_OFFSPRING_CAP,
        )


class ChainBudgets(BaseModel):
    """Budgets for the reproduction-graph walk performed by ``classify``.

    Attributes:
        max_depth: Longest reproduction chain followed (G)
        max_genotypes: Most distinct genotypes executed per classification (B)
    """

    model_config = ConfigDict(frozen=True)

    max_depth: int = Field(
        DEFAULT_CHAIN_DEPTH,
        ge=1,
        description="Maximum reproduction chain length (G)"
    )
    max_genotypes: int = Field(
        DEFAULT_CHAIN_WIDTH,
        ge=1,
        description="Maximum distinct genotypes explored (B)"
    )


# ============================================================================
# CUSTOM EXCEPTIONS
# ============================================================================


class GpmapError(Exception):
    """Base exception for all gpmap errors.

    Every error raised on purpose by the workbench inherits from this class,
    so callers (the CLI in particular) can handle them uniformly.

    Example:
        ```python
        try:
            curve = density_curve(rank, census)
        except GpmapError as e:
            logger.error(f"Analysis failed: {e}")
        ```
    """

    pass


class DomainError(GpmapError, ValueError):
    """Raised when an argument lies outside the domain of an operation.

    Examples are a symbol not below the alphabet size, a rank not below
    D^L, or a density curve requested for a non-viable genome.
    """

    pass


class ConfigurationError(GpmapError, ValueError):
    """Raised when a configuration is invalid or unsupported.

    This covers the 63-bit rank envelope, unknown ISA identifiers and
    malformed configuration files.
    """

    pass


class IntegrityError(GpmapError):
    """Raised when stored or merged data is inconsistent.

    Shard coverage gaps or overlaps, checksum mismatches and malformed
    census files all raise this error.
    """

    pass


class CheckpointMismatchError(IntegrityError):
    """Raised when a checkpoint was written under a different configuration."""

    pass


class OutputExistsError(GpmapError):
    """Raised when census outputs already exist and overwriting was not requested."""

    pass


class ComponentNotFoundError(GpmapError, KeyError):
    """Raised when a cluster component id is not part of a ClusterSet."""

    def __str__(self) -> str:
        # KeyError quotes its argument; keep the plain message
        return str(self.args[0]) if self.args else ""
