"""
Tracker configuration files.

    # comment
    variant = pso_social
    particles = 6

Keys are `TrackerConfig` field names, matched case-insensitively.
"""
import enum
import pathlib
import typing
from typing import Any, Union

from .._config import FIELD_TYPES, TrackerConfig
from .._exceptions import ConfigError, ConfigErrors

PathLike = Union[str, pathlib.Path]

NONE_SPELLINGS = {"none", "null", ""}


def _convert(key: str, raw: str, lineno: int) -> Any:
    annotation = FIELD_TYPES[key]

    args = typing.get_args(annotation)
    if typing.get_origin(annotation) is Union and type(None) in args:
        if raw.lower() in NONE_SPELLINGS:
            return None
        (annotation,) = [arg for arg in args if arg is not type(None)]

    if isinstance(annotation, type) and issubclass(annotation, enum.Enum):
        try:
            return annotation(raw.lower())
        except ValueError:
            choices = ", ".join(member.value for member in annotation)
            message = f"unknown value {raw!r} (expected one of: {choices})"
            raise ConfigError(key, message, lineno=lineno)

    try:
        if annotation is int:
            return int(raw)
        return float(raw)
    except ValueError:
        message = f"expected {annotation.__name__}, got {raw!r}"
        raise ConfigError(key, message, lineno=lineno)


def parse_config(source: str) -> TrackerConfig:
    values: dict[str, Any] = {}
    linenos: dict[str, int] = {}
    errors: list[ConfigError] = []

    for lineno, line in enumerate(source.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue

        key, sep, raw = line.partition("=")
        key = key.strip().lower()
        if not sep or not key:
            errors.append(ConfigError(line, "expected 'key = value'", lineno=lineno))
            continue
        if key not in FIELD_TYPES:
            errors.append(ConfigError(key, "unknown key", lineno=lineno))
            continue
        if key in values:
            errors.append(ConfigError(key, "duplicate key", lineno=lineno))
            continue

        try:
            values[key] = _convert(key, raw.strip(), lineno)
        except ConfigError as exc:
            errors.append(exc)
            continue
        linenos[key] = lineno

    if errors:
        raise ConfigErrors(errors)

    cfg = TrackerConfig(**values)
    try:
        cfg.validate()
    except ConfigErrors as exc:
        for error in exc.errors:
            if error.lineno is None:
                error.lineno = linenos.get(error.key)
        raise

    return cfg


def read_config(path: PathLike) -> TrackerConfig:
    return parse_config(pathlib.Path(path).read_text())
