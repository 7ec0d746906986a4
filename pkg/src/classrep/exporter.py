"""Writing result tables and the run manifest.

Tables are pandas DataFrames written either as CSV (17 significant digits,
'\\n' line endings) or as JSON records. Every written file is listed in the
manifest with its SHA-256 checksum so that a later run can verify it.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Literal

import pandas as pd
from pydantic import BaseModel, Field

from . import __version__
from .errors import ConfigurationError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
FLOAT_FORMAT = "%.17g"


class ManifestFile(BaseModel):
    """One output file and its checksum."""

    path: str = Field(..., description="Path relative to the output directory")
    sha256: str
    rows: int = Field(..., ge=0)


class TaskFailure(BaseModel):
    """A task that did not produce output; the run continued without it."""

    m: int | str
    n: int | None = None
    stage: str
    error_type: str
    message: str
    expected: bool = Field(default=False, description="True when the failure is the documented behaviour")


class ResultManifest(BaseModel):
    """Record of a run: what was asked, what was written, what failed."""

    command: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    files: list[ManifestFile] = Field(default_factory=list)
    summary: list[dict[str, Any]] = Field(default_factory=list)
    failures: list[TaskFailure] = Field(default_factory=list)
    tool_version: str


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _json_ready(frame: pd.DataFrame) -> list[dict[str, Any]]:
    records = []
    for row in frame.to_dict(orient="records"):
        records.append({key: (value.item() if hasattr(value, "item") else value) for key, value in row.items()})
    return records


class ResultExporter:
    """Writes tables into one output directory and keeps the manifest entries."""

    def __init__(self, output_dir: Path, fmt: Literal["csv", "json"] = "csv"):
        """Initialize the exporter.

        Args:
            output_dir: Directory for all files of the run (created if missing)
            fmt: Table format, "csv" or "json"

        Raises:
            ConfigurationError: If the directory cannot be created
        """
        self.output_dir = Path(output_dir)
        self.fmt = fmt
        self.files: list[ManifestFile] = []
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigurationError(f"Cannot create output directory {self.output_dir}: {e}") from e

    def write_table(self, name: str, frame: pd.DataFrame) -> Path:
        """Write a table as <name>.csv or <name>.json and record it.

        Args:
            name: File stem, may contain subdirectories
            frame: Table to write

        Returns:
            Path of the written file
        """
        path = self.output_dir / f"{name}.{self.fmt}"
        path.parent.mkdir(parents=True, exist_ok=True)
        if self.fmt == "csv":
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        else:
            # json floats are written with their shortest round-trip repr
            path.write_text(json.dumps(_json_ready(frame), indent=1) + "\n", encoding="utf-8")
        self._record(path, len(frame))
        logger.info(f"Wrote {path} ({len(frame)} rows)")
        return path

    def write_json(self, name: str, payload: Any) -> Path:
        """Write an arbitrary JSON document (reports) and record it."""
        path = self.output_dir / f"{name}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self._record(path, 0)
        logger.info(f"Wrote {path}")
        return path

    def _record(self, path: Path, rows: int) -> None:
        relative = path.relative_to(self.output_dir).as_posix()
        self.files = [f for f in self.files if f.path != relative]
        self.files.append(ManifestFile(path=relative, sha256=sha256_file(path), rows=rows))

    def write_manifest(
        self,
        command: str,
        parameters: dict[str, Any],
        summary: list[dict[str, Any]] | None = None,
        failures: list[TaskFailure] | None = None,
    ) -> Path:
        """Write manifest.json listing every file recorded so far."""
        manifest = ResultManifest(
            command=command,
            parameters=parameters,
            files=sorted(self.files, key=lambda f: f.path),
            summary=summary or [],
            failures=failures or [],
            tool_version=__version__,
        )
        path = self.output_dir / MANIFEST_NAME
        path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"Wrote manifest with {len(manifest.files)} files to {path}")
        return path


def load_manifest(path: Path) -> ResultManifest:
    """Read a manifest written by :meth:`ResultExporter.write_manifest`.

    Raises:
        ConfigurationError: If the file is missing or malformed
    """
    try:
        return ResultManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigurationError(f"Cannot read manifest {path}: {e}") from e
    except ValueError as e:
        raise ConfigurationError(f"Manifest {path} is malformed: {e}") from e


def verify_manifest(path: Path) -> list[str]:
    """Re-check every file listed in a manifest.

    Returns:
        Problems found (missing files, checksum mismatches); empty when all match
    """
    path = Path(path)
    manifest = load_manifest(path)
    problems = []
    for entry in manifest.files:
        target = path.parent / entry.path
        if not target.exists():
            problems.append(f"{entry.path}: missing")
        elif sha256_file(target) != entry.sha256:
            problems.append(f"{entry.path}: checksum mismatch")
    if problems:
        logger.warning(f"Manifest {path}: {len(problems)} problem(s)")
    else:
        logger.info(f"Manifest {path}: all {len(manifest.files)} files verified")
    return problems
