"""Atomic writers for JSON, CSV and manifest artifacts."""

import json
import logging
import os
import platform
import tempfile
from pathlib import Path
from typing import TypeVar

import matplotlib
import numpy as np
import pydantic
import scipy
from numpy.typing import NDArray
from pydantic import BaseModel, ValidationError

from src import __version__
from src.errors import InputError
from src.models import RunManifest

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

MANIFEST_NAME = "manifest.json"


def atomic_write_text(path: Path, text: str) -> Path:
    """Write through a temporary file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except Exception as e:
        logger.error("Failed to write artifact", extra={"path": str(path), "error": str(e)})
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.debug("Wrote artifact", extra={"path": str(path), "bytes": len(text)})
    return path


def write_json(path: Path, document: BaseModel) -> Path:
    return atomic_write_text(path, document.model_dump_json(indent=2, by_alias=True) + "\n")


def read_json(path: Path, model: type[ModelT]) -> ModelT:
    """Parse a JSON file into the given model.

    Raises:
        InputError: If the file is missing, not JSON or fails validation.
    """
    try:
        raw = Path(path).read_text(encoding="utf-8")
        return model.model_validate(json.loads(raw))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        logger.error("Unreadable input file", extra={"path": str(path), "error": str(e)})
        raise InputError(f"cannot read {path}: {e}") from e


def format_number(value: float) -> str:
    return f"{value:.17g}"


def write_csv(path: Path, header: list[str], rows: NDArray) -> Path:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[1] != len(header):
        raise ValueError(f"{len(header)} columns in the header but {rows.shape[1]} in the data")
    lines = [",".join(header)]
    lines.extend(",".join(format_number(v) for v in row) for row in rows)
    return atomic_write_text(path, "\n".join(lines) + "\n")


def versions() -> dict[str, str]:
    return {
        "sb-curves": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "matplotlib": matplotlib.__version__,
        "pydantic": pydantic.VERSION,
    }


def write_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    if not manifest.versions:
        manifest = manifest.model_copy(update={"versions": versions()})
    return write_json(Path(out_dir) / MANIFEST_NAME, manifest)
