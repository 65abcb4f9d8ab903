"""Configuration management for the gpmap workbench.

Settings come from three layers, highest priority first:

1. explicit command-line flags
2. a YAML or JSON config file (``--config``); a run manifest also works,
   its ``config`` mapping is used
3. environment defaults (``GPMAP_THREADS``, ``GPMAP_LOG_LEVEL``,
   ``GPMAP_SHARDS_PER_WORKER``, optionally from a ``.env`` file)
"""

import logging
import os
from pathlib import Path
from typing import Any, Literal

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from .analysis.density import DistanceMethod
from .base import ChainBudgets, ConfigurationError, ExecutionLimits
from .census import DEFAULT_SHARDS_PER_WORKER, CensusConfig
from .isa import DEFAULT_ISA, IsaSpec

logger = logging.getLogger("gpmap.config")

OutputFormat = Literal["csv", "json", "dot", "text"]


class Settings(BaseModel):
    """Environment-level defaults.

    Handles loading of defaults from environment variables and an optional
    ``.env`` file.
    """

    threads: int = Field(1, ge=1, description="Default worker process count")
    log_level: str = Field("INFO", description="Logging level")
    shards_per_worker: int = Field(
        DEFAULT_SHARDS_PER_WORKER,
        ge=1,
        description="Shards planned per worker when --shards is not given"
    )

    @classmethod
    def from_env(cls, env_file: Path | None = None) -> "Settings":
        """Load settings from environment variables.

        Args:
            env_file: Optional path to .env file

        Returns:
            Settings instance with loaded values

        Raises:
            ConfigurationError: If a variable holds an invalid value
        """
        if env_file and env_file.exists():
            load_dotenv(env_file)
        elif Path(".env").exists():
            load_dotenv(".env")

        try:
            return cls(
                threads=int(os.getenv("GPMAP_THREADS", "1")),
                log_level=os.getenv("GPMAP_LOG_LEVEL", "INFO").upper(),
                shards_per_worker=int(
                    os.getenv("GPMAP_SHARDS_PER_WORKER", str(DEFAULT_SHARDS_PER_WORKER))
                ),
            )
        except (ValueError, ValidationError) as e:
            raise ConfigurationError(f"Invalid environment setting: {e}") from e


class RunOptions(BaseModel):
    """Resolved options of one command, keyed like the long flags.

    Unset values stay None so commands can tell "not given" from a default.

    Example:
        ```python
        options = resolve_options({"length": 5, "shards": 8}, None, Settings())
        config = options.census_config()
        config.total  # 32768
        ```
    """

    length: int | None = Field(None, ge=1, description="Sequence length L")
    isa: str = Field(DEFAULT_ISA, description="ISA identifier")
    pad_nops: int = Field(0, ge=0, description="Extra no-op symbols")
    step_limit: int | None = Field(None, ge=1, description="Step limit T")
    offspring_cap: int | None = Field(None, ge=1, description="Offspring cap M")
    chain_depth: int | None = Field(None, ge=1, description="Chain depth G")
    chain_width: int | None = Field(None, ge=1, description="Genotype budget B")
    shards: int | None = Field(None, ge=1, description="Shard count")
    threads: int = Field(1, ge=1, description="Worker processes")
    out: Path | None = Field(None, description="Output path or prefix")
    force: bool = Field(False, description="Overwrite existing outputs")
    format: OutputFormat | None = Field(None, description="Output format")
    bitmap: bool | None = Field(None, description="Write the full-space bitmap")

    # Analysis commands
    census: Path | None = Field(None, description="Census path prefix to analyse")
    meta_only: bool | None = Field(None, description="Summarise from metadata alone")
    mode: str | None = Field(None, description="Cluster mode")
    component: int | None = Field(None, description="Cluster id exported as a graph")
    rank: list[int] | None = Field(None, description="Viable ranks to analyse")
    genome: str | None = Field(None, description="Viable genome as letters")
    most_robust: bool | None = Field(None, description="Select the most robust genome")
    most_fragile: bool | None = Field(None, description="Select the most fragile genome")
    all: bool | None = Field(None, description="Select every viable genome")
    mean: bool | None = Field(None, description="Add the mean curve")
    epistasis: bool | None = Field(None, description="Emit epistasis signs")
    distribution: bool | None = Field(None, description="Robustness histogram")
    method: DistanceMethod | None = Field(None, description="Distance counting method")
    alphabet: int | None = Field(None, ge=2, description="Alphabet size D")
    info: float | None = Field(None, ge=0, description="Functional information in mers")
    naive: bool | None = Field(None, description="Run the naive census oracle")

    @field_validator("rank", mode="before")
    @classmethod
    def _single_rank(cls, value: Any) -> Any:
        if isinstance(value, int):
            return [value]
        return value

    def isa_spec(self) -> IsaSpec:
        return IsaSpec.named(self.isa, self.pad_nops)

    def execution_limits(self, length: int) -> ExecutionLimits:
        try:
            return ExecutionLimits.for_length(length, self.step_limit, self.offspring_cap)
        except ValidationError as e:
            raise ConfigurationError(_first_error(e)) from e

    def chain_budgets(self) -> ChainBudgets:
        defaults = ChainBudgets()
        return ChainBudgets(
            max_depth=self.chain_depth or defaults.max_depth,
            max_genotypes=self.chain_width or defaults.max_genotypes,
        )

    def census_config(self, shards_per_worker: int = DEFAULT_SHARDS_PER_WORKER) -> CensusConfig:
        """Build the CensusConfig these options describe.

        Raises:
            ConfigurationError: If ``length`` is missing or the options are invalid
        """
        if self.length is None:
            raise ConfigurationError("A sequence length is required (--length/-L)")
        try:
            return CensusConfig(
                length=self.length,
                isa=self.isa_spec(),
                limits=self.execution_limits(self.length),
                budgets=self.chain_budgets(),
                workers=self.threads,
                shard_count=self.shards or shards_per_worker * self.threads,
                output=self.out,
                overwrite=self.force,
                bitmap=self.bitmap,
            )
        except ValidationError as e:
            raise ConfigurationError(_first_error(e)) from e

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready mapping, usable as a config file."""
        return self.model_dump(mode="json")


def _first_error(error: ValidationError) -> str:
    details = error.errors()
    if not details:
        return str(error)
    return str(details[0].get("msg", error))


def load_config_file(path: Path) -> dict[str, Any]:
    """Read a YAML/JSON config file or a run manifest into option values.

    Raises:
        ConfigurationError: If the file is missing, malformed or not a mapping
    """
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigurationError(f"Config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Malformed config file {path}: {e}") from e
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"Config file {path} must hold a mapping")
    if isinstance(raw.get("config"), dict):
        raw = raw["config"]
    values = {str(key).replace("-", "_"): value for key, value in raw.items()}
    unknown = sorted(set(values) - set(RunOptions.model_fields))
    if unknown:
        raise ConfigurationError(f"Unknown keys in config file {path}: {', '.join(unknown)}")
    return values


def resolve_options(
    flags: dict[str, Any],
    config_file: Path | None,
    settings: Settings,
) -> RunOptions:
    """Merge flags over config-file values over environment defaults.

    Args:
        flags: Flag values; None means "not given"
        config_file: Optional config file or run manifest
        settings: Environment defaults

    Raises:
        ConfigurationError: If the merged options are invalid
    """
    values: dict[str, Any] = {"threads": settings.threads}
    if config_file is not None:
        values.update(load_config_file(config_file))
        logger.debug(f"Loaded config file {config_file}")
    values.update({key: value for key, value in flags.items() if value is not None})
    try:
        return RunOptions(**values)
    except ValidationError as e:
        raise ConfigurationError(_first_error(e)) from e
