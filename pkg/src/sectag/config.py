"""``key = value`` configuration files with sections.

Values are parsed against the field types of the dataclass they configure,
so a typo in a key or a malformed number fails loudly.
"""

from __future__ import annotations

import configparser
import dataclasses
from pathlib import Path
from typing import Any, Mapping, Union

from .errors import ConfigurationError, InputError, ParseError


def read_config(path: Union[str, Path]) -> dict[str, dict[str, str]]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), str(path))


def parse_config(text: str, source: str = "<config>") -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keep key case
    try:
        parser.read_string(text, source)
    except configparser.Error as exc:
        raise ParseError(f"{source}: {exc}") from exc
    return {name: dict(parser[name]) for name in parser.sections()}


def _coerce(value: str, kind: Any, key: str):
    kind = kind if isinstance(kind, type) else {"int": int, "float": float, "bool": bool, "str": str}.get(str(kind), str)
    try:
        if kind is bool:
            low = value.strip().lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(value)
            return low in ("true", "yes", "1")
        return kind(value.strip())
    except ValueError as exc:
        raise ConfigurationError(f"{key}: cannot read {value!r} as {kind.__name__}") from exc


def build(cls, section: Mapping[str, str], **overrides):
    """Instantiate dataclass ``cls`` from string values, rejecting unknown keys."""
    fields = {f.name: f.type for f in dataclasses.fields(cls)}
    unknown = sorted(set(section) - set(fields))
    if unknown:
        raise ConfigurationError(f"unknown {cls.__name__} keys: {', '.join(unknown)}")
    values = {k: _coerce(v, fields[k], k) for k, v in section.items()}
    values.update(overrides)
    return cls(**values)


def format_config(sections: Mapping[str, Mapping[str, Any]]) -> str:
    lines = []
    for name, values in sections.items():
        lines.append(f"[{name}]")
        lines += [f"{k} = {v}" for k, v in values.items()]
        lines.append("")
    return "\n".join(lines)


def dataclass_values(obj) -> dict[str, Any]:
    return {f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)}
