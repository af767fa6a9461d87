"""Result files: atomic writes, provenance headers and JSON dataclasses."""

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd
from mashumaro import DataClassDictMixin

from hilbert_lab import const


class JSONSerializable(DataClassDictMixin):
    """Serializable datatype."""

    @classmethod
    def load(cls: "JSONSerializable", path: Path) -> "JSONSerializable":
        """Load the object from a JSON file.

        Parameters
        ----------
        path : Path
            The path to the file.

        Returns
        -------
        Serializable
            The loaded object.

        """
        with path.open("r") as f:
            return cls.from_dict(json.load(f))

    def dump(self, path: Path) -> None:
        """Dump the object to a JSON file, atomically.

        Parameters
        ----------
        path : Path
            The path to the file.

        """
        write_json(path, self.to_dict())


def _default(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    msg = f"Object of type {type(obj).__name__} is not JSON serializable"
    raise TypeError(msg)


def canonical_json(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, fixed separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def config_hash(document: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON of a configuration document."""
    return hashlib.sha256(canonical_json(document).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Provenance:
    """What every output file records about the run that produced it."""

    config_hash: str
    seed: int
    version: str
    command: str

    def lines(self) -> List[str]:
        return [
            f"config_hash={self.config_hash}",
            f"seed={self.seed}",
            f"version={self.version}",
            f"command={self.command}",
        ]


####################################################################################################
# WRITERS
####################################################################################################


def atomic_write_text(path: Path, text: str) -> None:
    """Write through a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile("w", dir=path.parent, prefix=f".{path.name}.", delete=False) as tmp:
        tmp.write(text)
    try:
        os.replace(tmp.name, path)
    except OSError:
        Path(tmp.name).unlink(missing_ok=True)
        raise


def write_json(path: Path, data: Dict[str, Any]) -> None:
    atomic_write_text(path, json.dumps(data, indent=2, sort_keys=True, default=_default) + "\n")


def write_csv(path: Path, frame: pd.DataFrame, provenance: Provenance) -> None:
    """Write a table with ``#`` provenance lines above the header row.

    ``pandas.read_csv(path, comment="#")`` reads it back.
    """
    header = "".join(f"{const.CSV_COMMENT} {line}\n" for line in provenance.lines())
    atomic_write_text(path, header + frame.to_csv(index=False, float_format="%.12g"))


def write_svg(path: Path, svg: str, provenance: Provenance) -> None:
    comment = "<!-- " + " ".join(provenance.lines()) + " -->\n"
    head, sep, body = svg.partition("\n")
    atomic_write_text(path, head + sep + comment + body if head.startswith("<?xml") else comment + svg)


def write_metadata(path: Path, provenance: Provenance, config: Dict[str, Any], results: Dict[str, Any]) -> None:
    """Write ``metadata.json`` for a run."""
    write_json(
        path,
        {
            "command": provenance.command,
            "config_hash": provenance.config_hash,
            "seed": provenance.seed,
            "version": provenance.version,
            "config": config,
            "results": results,
        },
    )
