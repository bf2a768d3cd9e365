"""
The fitting methods by the name configuration files and the command line use for them.
"""
from typing import Dict, List, Type

from fspcr.common.checks import ConfigurationError
from fspcr.common.config import ConfigLike, as_config, to_dict
from fspcr.models.baselines import Superpc, Upcr
from fspcr.models.model import Method
from fspcr.models.spcr import SmoothedSpcr, Spcr, SpcrA, UnpenalizedSpcr

DEFAULT_METHOD = "spcr"

METHODS: Dict[str, Type[Method]] = {
        "spcr": Spcr,
        "spcr-smoothing": SmoothedSpcr,
        "spcr-nopen": UnpenalizedSpcr,
        "spcr-a": SpcrA,
        "upcr": Upcr,
        "superpc": Superpc,
}


def available_methods() -> List[str]:
    """Method names, the default first."""
    return [DEFAULT_METHOD] + sorted(name for name in METHODS if name != DEFAULT_METHOD)


def method_class(name: str) -> Type[Method]:
    if name not in METHODS:
        raise ConfigurationError("{} is not a known method; choose from {}".format(name, available_methods()))
    return METHODS[name]


def method_from_config(config: ConfigLike) -> Method:
    """Builds the method a block selects with its ``type`` key (default ``spcr``)."""
    settings = to_dict(config)
    choice = settings.pop("type", DEFAULT_METHOD)
    return method_class(choice).from_config(as_config(settings))


def method_from_name(name: str, config: ConfigLike = None) -> Method:
    return method_from_config({**to_dict(config), "type": name})
