"""gpmap workbench: complete genotype-phenotype maps of a minimal self-replicator VM."""

__version__ = "0.1.0"

from .base import (  # noqa: E402
    ChainBudgets,
    CheckpointMismatchError,
    ComponentNotFoundError,
    ConfigurationError,
    DomainError,
    ExecutionLimits,
    GpmapError,
    IntegrityError,
    OutputExistsError,
)
from .census import CensusConfig, Shard, merge_shards, run_census  # noqa: E402
from .genome import Genome, rank, unrank  # noqa: E402
from .isa import Instruction, IsaSpec, decode  # noqa: E402
from .phenotype import Phenotype, classify  # noqa: E402
from .storage import CensusResult, read_census, write_census  # noqa: E402
from .vm import ExecutionOutcome, VmState, execute, step, trace  # noqa: E402

__all__ = [
    "CensusConfig",
    "CensusResult",
    "ChainBudgets",
    "CheckpointMismatchError",
    "ComponentNotFoundError",
    "ConfigurationError",
    "DomainError",
    "ExecutionLimits",
    "ExecutionOutcome",
    "Genome",
    "GpmapError",
    "Instruction",
    "IntegrityError",
    "IsaSpec",
    "OutputExistsError",
    "Phenotype",
    "Shard",
    "VmState",
    "__version__",
    "classify",
    "decode",
    "execute",
    "merge_shards",
    "rank",
    "read_census",
    "run_census",
    "step",
    "trace",
    "unrank",
    "write_census",
]
