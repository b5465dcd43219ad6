"""
Run configuration for the command line front end.

A RunConfig is a plain dict validated against RUN_CONFIG_SCHEMA. Values are resolved with the precedence
command line flags > config file > DEFAULTS. A config file ending in ``.json`` holds one JSON object;
any other file is the flat ``key = value`` format read by rmt_linstats.util.read_flat_config. Both go
through the same schema.
"""
from __future__ import division

import copy
import json
import logging

import jsonschema

from rmt_linstats.ensembles.spec import EnsembleSpec
from rmt_linstats.errors import ConfigError, DomainError
from rmt_linstats.operator.statistic import FAMILIES, TestFunction
from rmt_linstats.util import DotDict, read_flat_config

logger = logging.getLogger(__name__)

DEFAULTS = {
    "family": "gaussian",
    "beta": 2,
    "N": [4],
    "alpha": 1.0,
    "stat": "gaussian",
    "amplitude": 1.0,
    "center": 0.0,
    "scale": 1.0,
    "lambdas": [0.3],
    "grid_nodes": None,
    "method": "auto",
    "seed": 0,
    "samples": 1000,
    "mc_method": "tridiagonal",
    "format": "json",
    "out": None,
    "suite": "all",
    "kernel": "cd",
    "points": None,
    "with_mc": False,
}

LIST_FIELDS = ("N", "lambdas", "points")

_number = {"type": "number"}

RUN_CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-04/schema#",
    "title": "RunConfig",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "family": {"enum": ["gaussian", "laguerre"]},
        "beta": {"enum": [1, 2, 4]},
        "N": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "alpha": {"type": ["number", "null"]},
        "stat": {"enum": list(FAMILIES)},
        "amplitude": _number,
        "center": _number,
        "scale": {"type": "number", "minimum": 0, "exclusiveMinimum": True},
        "lambdas": {"type": "array", "minItems": 1, "items": _number},
        "grid_nodes": {"type": ["integer", "null"], "minimum": 2},
        "method": {"enum": ["auto", "nystrom", "projected"]},
        "seed": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "mc_method": {"enum": ["tridiagonal", "mcmc"]},
        "format": {"enum": ["json", "csv"]},
        "out": {"type": ["string", "null"]},
        "suite": {"enum": ["lemmas", "kernels", "determinants", "asymptotics", "all"]},
        "kernel": {"enum": ["cd", "k22", "limit"]},
        "points": {"type": ["array", "null"], "minItems": 1, "items": _number},
        "with_mc": {"type": "boolean"},
    },
    "required": list(DEFAULTS.keys()),
}


def _normalize(values):
    normalized = {}
    for key, value in values.items():
        if key in LIST_FIELDS and value is not None and not isinstance(value, (list, tuple)):
            value = [value]
        elif key in LIST_FIELDS and isinstance(value, tuple):
            value = list(value)
        normalized[key] = value
    return normalized


def validate_config(config):
    """Check a RunConfig against the schema and the ensemble rules.

    Raises:
        ConfigError: with the first violation found
    """
    try:
        jsonschema.Draft4Validator(RUN_CONFIG_SCHEMA).validate(config)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path)
        raise ConfigError("invalid configuration%s: %s" % (" at %s" % path if path else "", e.message))
    try:
        for spec in ensemble_specs(config):
            logger.debug("validated %r" % (spec,))
        statistic(config)
    except DomainError as e:
        raise ConfigError("invalid configuration: %s" % e.message)
    return config


def read_config_file(path):
    """The values of a config file: a JSON object for ``*.json``, flat ``key = value`` lines otherwise.

    Raises:
        ValueError: when the file does not parse, or the JSON is not an object
    """
    if not path.lower().endswith(".json"):
        return read_flat_config(path)
    with open(path) as f:
        values = json.load(f)
    if not isinstance(values, dict):
        raise ValueError("expected a JSON object, got %s" % type(values).__name__)
    return values


def resolve_config(cli_values=None, config_path=None):
    """Merge defaults, the config file and command line values, then validate.

    Args:
        cli_values (dict): values given on the command line; None means "not given"
        config_path (str): optional path to a JSON or flat key = value config file

    Returns:
        DotDict RunConfig
    """
    config = copy.deepcopy(DEFAULTS)
    if config_path is not None:
        try:
            from_file = read_config_file(config_path)
        except (IOError, OSError) as e:
            raise ConfigError("cannot read config file %s: %s" % (config_path, e))
        except ValueError as e:
            raise ConfigError("cannot parse config file %s: %s" % (config_path, e))
        config.update(_normalize(from_file))
    if cli_values:
        config.update(_normalize(dict((k, v) for k, v in cli_values.items() if v is not None)))
    return DotDict(validate_config(config))


def ensemble_specs(config):
    alpha = config["alpha"] if config["family"] == "laguerre" else None
    return [EnsembleSpec(config["family"], config["beta"], N, alpha) for N in config["N"]]


def statistic(config):
    return TestFunction(config["stat"], config["amplitude"], config["center"], config["scale"])
