"""Reading and writing experiment configs.

Configs are YAML documents validated into ``ExperimentConfig``. Values may carry units
(parsed by pint); ``dump_config`` always writes plain SI numbers, so a dumped config
loads back to an identical object.
"""

import logging
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from src.config.settings import BUNDLED_CONFIG_DIR
from src.model.config import SCHEMA_VERSION, ExperimentConfig
from src.model.errors import ConfigError, ConfigValidationError

logger = logging.getLogger(__name__)


def bundled_config(name: str) -> Path:
    """Path of a config shipped with the package (``prysoA``, ``prysoB``, ``erYSO``)."""
    path = BUNDLED_CONFIG_DIR / f"{name}.yaml"
    if not path.exists():
        available = sorted(p.stem for p in BUNDLED_CONFIG_DIR.glob("*.yaml"))
        raise ConfigError(f"No bundled config '{name}' (available: {', '.join(available)})")
    return path


def parse_config(data: Any, source: str = "<memory>") -> ExperimentConfig:
    """Validate an already-parsed mapping.

    Args:
        data: Mapping produced by the YAML parser
        source: Name used in log and error messages

    Returns:
        Validated configuration

    Raises:
        ConfigError: If the document is not a mapping
        ConfigValidationError: If any field violates the schema
    """
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping, got {type(data).__name__}")

    version = data.get("schema_version")
    if version is None:
        raise ConfigValidationError("schema_version", "missing")
    if version != SCHEMA_VERSION:
        raise ConfigValidationError(
            "schema_version", f"unsupported version {version!r} (expected {SCHEMA_VERSION})"
        )

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ConfigValidationError(field, first["msg"]) from e


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate an experiment config file.

    Args:
        path: YAML file path

    Returns:
        Fully validated ``ExperimentConfig``

    Raises:
        ConfigError: If the file is missing or is not valid YAML
        ConfigValidationError: If a value violates the schema (names the field)

    Example:
        >>> cfg = load_config(bundled_config("prysoA"))
        >>> cfg.resonator.quality_factor
        1800000.0
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e

    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"Malformed config {path}: {e}") from e

    config = parse_config(data, source=str(path))
    logger.info(f"Loaded config '{config.name}' from {path}")
    return config


def config_snapshot(config: ExperimentConfig) -> dict:
    """JSON-compatible SI snapshot of a config, as embedded in reports."""
    return config.model_dump(mode="json")


def dump_config(config: ExperimentConfig, path: str | Path | None = None) -> str:
    """Serialize a config to YAML with SI numbers.

    Args:
        config: Configuration to write
        path: Optional destination file

    Returns:
        The YAML text
    """
    text = yaml.safe_dump(config_snapshot(config), sort_keys=False, allow_unicode=True)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
