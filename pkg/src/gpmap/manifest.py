"""Run manifests: one JSON record per command that wrote output files."""

import json
import logging
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

from . import __version__
from .storage import atomic_write_bytes, sha256_file

UTC = timezone.utc

logger = logging.getLogger("gpmap.manifest")

MANIFEST_SUFFIX = ".manifest.json"


class RunManifest(BaseModel):
    """Record of a command run, sufficient to replay it.

    The ``config`` mapping uses config-file keys, so passing the manifest to
    ``--config`` reruns the command with the same resolved options.

    Attributes:
        subcommand: Command name (e.g. "census")
        config: Fully resolved options
        inputs: Input paths
        outputs: Output paths
        tool_version: gpmap-workbench version
        isa_id: ISA in effect
        duration_seconds: Wall-clock duration
        checksums: SHA-256 hex digest per output file name
        created_utc: Completion time, ISO 8601
    """

    subcommand: str
    config: dict[str, Any] = Field(default_factory=dict)
    inputs: list[str] = Field(default_factory=list)
    outputs: list[str] = Field(default_factory=list)
    tool_version: str = __version__
    isa_id: str | None = None
    duration_seconds: float = Field(0.0, ge=0)
    checksums: dict[str, str] = Field(default_factory=dict)
    created_utc: str = Field(
        default_factory=lambda: datetime.now(UTC).isoformat(timespec="seconds")
    )


def manifest_path(out: Path) -> Path:
    """Manifest path for an output path or prefix."""
    return Path(str(out) + MANIFEST_SUFFIX)


class ManifestRecorder:
    """Times a command and writes its manifest once outputs exist.

    Example:
        ```python
        recorder = ManifestRecorder("census", options.to_dict(), isa_id="default-v1")
        ...  # produce files
        recorder.write(Path("runs/l5"), outputs=[Path("runs/l5.meta.json")])
        ```
    """

    def __init__(
        self,
        subcommand: str,
        config: dict[str, Any],
        inputs: list[Path] | None = None,
        isa_id: str | None = None,
    ) -> None:
        self.subcommand = subcommand
        self.config = config
        self.inputs = [str(path) for path in inputs or []]
        self.isa_id = isa_id
        self._started = time.perf_counter()

    def write(self, out: Path, outputs: list[Path]) -> RunManifest:
        """Checksum ``outputs`` and write ``<out>.manifest.json``."""
        existing = [path for path in outputs if path.exists()]
        manifest = RunManifest(
            subcommand=self.subcommand,
            config=self.config,
            inputs=self.inputs,
            outputs=[str(path) for path in existing],
            isa_id=self.isa_id,
            duration_seconds=round(time.perf_counter() - self._started, 6),
            checksums={path.name: sha256_file(path) for path in existing},
        )
        target = manifest_path(out)
        text = json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
        atomic_write_bytes(target, text.encode("utf-8"))
        logger.info("manifest_written", extra={"path": str(target), "subcommand": self.subcommand})
        return manifest
