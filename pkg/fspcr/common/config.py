"""
Configuration files are HOCON (plain JSON included) and are parsed with pyhocon. Configurable
dataclasses read their block through ``from_config(ConfigTree)`` using the typed getters of
the tree, and reject keys they do not know.
"""
from contextlib import contextmanager
from typing import Any, Dict, Iterable, Iterator, Optional, Union
import hashlib
import json
import logging
import os

from pyhocon import ConfigFactory, ConfigTree
from pyhocon.exceptions import ConfigException

from fspcr.common.checks import ConfigurationError, MissingFileError

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

ConfigLike = Union[None, Dict[str, Any], ConfigTree]


def load_config(path: str) -> ConfigTree:
    if not os.path.exists(path):
        raise MissingFileError("configuration file not found: {}".format(path))
    try:
        return ConfigFactory.parse_file(path)
    except Exception as error:  # pyhocon lets pyparsing errors through
        raise ConfigurationError("cannot parse configuration file {}: {}".format(path, error))


def as_config(value: ConfigLike) -> ConfigTree:
    """``value`` as a ``ConfigTree``; ``None`` becomes the empty tree."""
    if isinstance(value, ConfigTree):
        return value
    return ConfigFactory.from_dict(dict(value or {}))


def to_dict(config: ConfigLike) -> Dict[str, Any]:
    """Plain nested ``dict`` form of a configuration, lists and all."""
    if isinstance(config, ConfigTree):
        config = config.as_plain_ordered_dict()
    return json.loads(json.dumps(config or {}))


def check_keys(config: ConfigTree, allowed: Iterable[str], owner: str) -> None:
    unknown = sorted(set(config.keys()) - set(allowed))
    if unknown:
        raise ConfigurationError("unknown keys for {}: {}".format(owner, ", ".join(unknown)))


def sub_config(config: ConfigTree, key: str) -> Optional[ConfigTree]:
    """The nested block under ``key``, or ``None`` when it is absent or null."""
    value = config.get(key, None)
    if value is None:
        return None
    if not isinstance(value, ConfigTree):
        raise ConfigurationError("{} must be a configuration block, got {!r}".format(key, value))
    return value


@contextmanager
def reading(owner: str) -> Iterator[None]:
    """Turns pyhocon's missing-key and type errors into ``ConfigurationError``."""
    try:
        yield
    except ConfigException as error:
        raise ConfigurationError("invalid configuration for {}: {}".format(owner, error))


def config_hash(config: ConfigLike) -> str:
    """SHA-256 of the canonical JSON form of a configuration."""
    canonical = json.dumps(to_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
