"""Experiment configuration: the single document that reproduces a run."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from mashumaro.config import BaseConfig as MashumaroConfig
from mashumaro.exceptions import ExtraKeysError, InvalidFieldValue, MissingField
from mashumaro.mixins.dict import DataClassDictMixin

from hilbert_lab import const
from hilbert_lab.config.base import BaseConfig, RunConfig
from hilbert_lab.group.families import FAMILIES
from hilbert_lab.utils.errors import ConfigError


@dataclass
class ExperimentSection(DataClassDictMixin):
    """Per-command parameters.

    Points and vectors are given in the reference chart of the domain.
    """

    x: Optional[List[float]] = None
    y: Optional[List[float]] = None
    direction: Optional[List[float]] = None
    vector: Optional[List[float]] = None
    t: float = 1.0

    horizon: float = 20.0
    steps: int = 200
    periods: int = 20

    # Command defaults: 1000 states, MC_SAMPLES_PER_BALL ball samples, BETA_PAIRS pairs.
    samples: Optional[int] = None
    r_max: float = 10.0
    radii: int = 16
    # Fit log vol = h r + p log r + c; for polytopes, whose balls grow polynomially.
    polynomial_correction: bool = False

    max_len: int = 8
    words: Optional[List[str]] = None

    xplus: Optional[List[float]] = None
    xminus: Optional[List[float]] = None
    scales: Optional[List[float]] = None

    class Config(MashumaroConfig):
        forbid_extra_keys = True


@dataclass
class ExperimentConfig(BaseConfig):
    """Configuration of one laboratory run.

    The config document has three sections: ``domain`` (a domain
    description for ``make_domain``), ``group`` (a family name with
    parameters, or literal generator matrices) and ``experiment``
    (command parameters). An optional ``run`` section carries the seed and
    thread count.
    """

    domain: Dict[str, Any] = field(default_factory=lambda: {"kind": "ellipsoid", "n": 2})
    group: Dict[str, Any] = field(default_factory=dict)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)

    @classmethod
    def from_file(cls, path: Path) -> "ExperimentConfig":
        """Load an experiment configuration from a YAML or JSON document.

        Parameters
        ----------
        path : Path
            The path to the config file.

        Returns
        -------
        ExperimentConfig
            The parsed configuration, with environment overrides applied.

        Raises
        ------
        ConfigError
            If the file is missing, malformed, or has unknown keys.

        """
        if not path.exists():
            msg = f"Config file not found: {path}"
            raise ConfigError(msg)

        try:
            with path.open("r") as file:
                data = yaml.safe_load(file)
        except yaml.YAMLError as e:
            msg = f"Config file does not parse: {path}"
            raise ConfigError(msg, {"reason": str(e)}) from e

        return cls.from_document(data or {})

    @classmethod
    def from_document(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """Build a configuration from an already parsed document."""
        if not isinstance(data, dict):
            msg = "Config document must be a mapping"
            raise ConfigError(msg)

        unknown = set(data) - {"domain", "group", "experiment", "run"}
        if unknown:
            msg = f"Unknown config sections: {sorted(unknown)}"
            raise ConfigError(msg)

        config = cls.from_env()
        try:
            if "domain" in data:
                config.domain = dict(data["domain"])
            if "group" in data:
                config.group = dict(data["group"] or {})
            if "experiment" in data:
                config.experiment = ExperimentSection.from_dict(data["experiment"] or {})
            if "run" in data:
                config.run = RunConfig.from_dict({**config.run.to_dict(), **(data["run"] or {})})
        except (ExtraKeysError, InvalidFieldValue, MissingField, TypeError, ValueError) as e:
            msg = "Invalid config section"
            raise ConfigError(msg, {"reason": str(e)}) from e

        return config

    def document(self) -> Dict[str, Any]:
        """Return the canonical document used for the config hash."""
        return {
            "domain": self.domain,
            "group": self.group,
            "experiment": self.experiment.to_dict(),
            "run": {"seed": self.run.seed},
        }

    def validate(self) -> List[str]:
        """Validate experiment configuration.

        Returns
        -------
        List[str]
            List of validation errors

        """
        errors = super().validate()

        kind = self.domain.get("kind")
        if kind not in const.domain_kinds:
            errors.append(f"Unknown domain kind: {kind}")

        if self.group and self.group.get("family") not in FAMILIES:
            errors.append(f"Unknown group family: {self.group.get('family')}")

        exp = self.experiment
        if exp.horizon <= 0:
            errors.append("horizon must be positive")

        if exp.steps <= 0:
            errors.append("steps must be positive")

        if exp.periods <= 0:
            errors.append("periods must be positive")

        if exp.samples is not None and exp.samples <= 0:
            errors.append("samples must be positive")

        if exp.radii < 6:
            errors.append("radii must be at least 6")

        if exp.r_max < const.MIN_VOLUME_RADIUS:
            errors.append(f"r_max must be at least {const.MIN_VOLUME_RADIUS}")

        if not 0 <= exp.max_len <= const.MAX_WORD_LENGTH:
            errors.append(f"max_len must be between 0 and {const.MAX_WORD_LENGTH}")

        if exp.scales is not None and any(s <= 0 for s in exp.scales):
            errors.append("scales must be positive")

        return errors
