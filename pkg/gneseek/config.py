"""Parse and validate YAML run configurations."""

from __future__ import annotations

from dataclasses import MISSING, fields
import logging
from pathlib import Path
from typing import Any

import voluptuous as vol
import yaml

from .const import (
    CONF_EDGES,
    CONF_GAME,
    CONF_GEOMETRY,
    CONF_GRAPH,
    CONF_HORIZON,
    CONF_KIND,
    CONF_RUN,
    GAME_KIND_SIMPLEX_TEST,
    GEOMETRY_KIND_ENTROPY,
    GRAPH_KIND_EDGES,
    SIMPLEX_GAME_KEYS,
)
from .exceptions import ParseError, ValidationError
from .types import SECTION_TYPES, RunConfig

_LOGGER = logging.getLogger(__name__)

EXTRA_KEY_MESSAGE = "extra keys not allowed"


def schema_from_config_class(config_class: type) -> vol.Schema:
    """Create a voluptuous schema from a config dataclass.

    Fields without a default that are not marked optional become required keys; keys
    not declared by the class are rejected.
    """
    schema_dict = {}
    for field_info in fields(config_class):
        schema = field_info.metadata["schema"]
        optional = field_info.metadata.get("optional", False)
        has_default = field_info.default is not MISSING and field_info.default is not None
        if optional or has_default or field_info.default_factory is not MISSING:
            schema_dict[vol.Optional(field_info.name)] = vol.Any(None, schema) if optional else schema
        else:
            schema_dict[vol.Required(field_info.name)] = schema
    return vol.Schema(schema_dict, extra=vol.PREVENT_EXTRA)


def _key_lines(text: str) -> dict[str, int]:
    """Map section names and dotted keys to their 1-based line in the YAML source."""
    lines: dict[str, int] = {}
    root = yaml.compose(text, Loader=yaml.SafeLoader)
    if not isinstance(root, yaml.MappingNode):
        return lines
    for key_node, value_node in root.value:
        section = str(key_node.value)
        lines[section] = key_node.start_mark.line + 1
        if isinstance(value_node, yaml.MappingNode):
            for child_key, _ in value_node.value:
                lines[f"{section}.{child_key.value}"] = child_key.start_mark.line + 1
    return lines


def _section_error(section: str, error: vol.Invalid, lines: dict[str, int]) -> ParseError | ValidationError:
    key = ".".join([section, *(str(part) for part in error.path[:1])])
    line = lines.get(key, lines.get(section))
    if isinstance(error, vol.RequiredFieldInvalid):
        return ParseError(f"Missing required key {key}", key=key, line=line)
    if error.error_message == EXTRA_KEY_MESSAGE:
        return ValidationError(f"Unknown key {key}", key=key, line=line)
    return ValidationError(f"Invalid value for {key}: {error.error_message}", key=key, line=line)


def _load_mapping(text: str) -> dict[str, Any]:
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as ex:
        mark = ex.problem_mark or ex.context_mark
        line = mark.line + 1 if mark is not None else None
        msg = f"Invalid YAML: {ex.problem or ex}"
        raise ParseError(msg, line=line) from ex
    except yaml.YAMLError as ex:
        msg = f"Invalid YAML: {ex}"
        raise ParseError(msg) from ex

    if data is None:
        return {}
    if not isinstance(data, dict):
        msg = "The configuration must be a mapping of sections"
        raise ParseError(msg, line=1)
    return data


def _check_cross_fields(config: RunConfig, data: dict[str, Any], lines: dict[str, int]) -> None:
    """Check constraints that span several keys."""
    game, graph, run = config.game, config.graph, config.run

    if game.horizon is not None and game.horizon != run.horizon:
        key = f"{CONF_GAME}.{CONF_HORIZON}"
        msg = f"{key} = {game.horizon} differs from {CONF_RUN}.{CONF_HORIZON} = {run.horizon}"
        raise ValidationError(msg, key=key, line=lines.get(key))

    if game.kind != GAME_KIND_SIMPLEX_TEST:
        for name in SIMPLEX_GAME_KEYS:
            if name in data.get(CONF_GAME, {}):
                key = f"{CONF_GAME}.{name}"
                msg = f"{key} only applies to the {GAME_KIND_SIMPLEX_TEST} game"
                raise ValidationError(msg, key=key, line=lines.get(key))

    edges_key = f"{CONF_GRAPH}.{CONF_EDGES}"
    if graph.kind == GRAPH_KIND_EDGES:
        if not graph.edges:
            msg = f"{edges_key} is required when {CONF_GRAPH}.{CONF_KIND} is {GRAPH_KIND_EDGES}"
            raise ParseError(msg, key=edges_key, line=lines.get(f"{CONF_GRAPH}.{CONF_KIND}"))
        for u, v in graph.edges:
            if not (1 <= u <= game.n_players and 1 <= v <= game.n_players):
                msg = f"Edge [{u}, {v}] in {edges_key} references a vertex outside [1, {game.n_players}]"
                raise ValidationError(msg, key=edges_key, line=lines.get(edges_key))
    elif graph.edges is not None:
        msg = f"{edges_key} only applies when {CONF_GRAPH}.{CONF_KIND} is {GRAPH_KIND_EDGES}"
        raise ValidationError(msg, key=edges_key, line=lines.get(edges_key))

    if config.geometry.kind == GEOMETRY_KIND_ENTROPY and game.kind != GAME_KIND_SIMPLEX_TEST:
        key = f"{CONF_GEOMETRY}.{CONF_KIND}"
        msg = f"{key} {GEOMETRY_KIND_ENTROPY} needs simplex feasible sets, which the {game.kind} game does not have"
        raise ValidationError(msg, key=key, line=lines.get(key))


def parse_config_text(text: str, *, source: Path | None = None) -> RunConfig:
    """Parse a configuration from YAML text.

    Raises:
        ParseError: On YAML syntax errors or missing required keys
        ValidationError: On unknown keys, out of range values or inconsistent keys

    """
    data = _load_mapping(text)
    lines = _key_lines(text)

    for section in data:
        if section not in SECTION_TYPES:
            msg = f"Unknown section {section}"
            raise ValidationError(msg, key=str(section), line=lines.get(str(section)))

    sections: dict[str, Any] = {}
    for section, config_class in SECTION_TYPES.items():
        raw = data.get(section)
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            msg = f"Section {section} must be a mapping"
            raise ParseError(msg, key=section, line=lines.get(section))
        try:
            validated = schema_from_config_class(config_class)(raw)
        except vol.MultipleInvalid as ex:
            raise _section_error(section, ex.errors[0], lines) from ex
        sections[section] = config_class(**validated)

    config = RunConfig(**sections, source=source, text=text)
    _check_cross_fields(config, data, lines)
    return config


def parse_config(path: str | Path) -> RunConfig:
    """Read and validate the configuration file at path.

    Raises:
        ParseError: If the file cannot be read or is not valid YAML, or a required key is missing
        ValidationError: If a value is out of range or a key is unknown

    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as ex:
        msg = f"Cannot read configuration {path}: {ex.strerror}"
        raise ParseError(msg) from ex

    config = parse_config_text(text, source=path)
    _LOGGER.debug("Parsed configuration %s: %s", path, config)
    return config
