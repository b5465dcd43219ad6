# Utility methods shared by the computational modules and the command line front end

from __future__ import division

import copy
import json
import logging
import os
from fractions import Fraction

import numpy as np
import pandas as pd
from six import string_types, integer_types

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "RMT_LINSTATS_THREADS"


class DotDict(dict):
    """dot.notation access to dictionary attributes"""

    def __getattr__(self, attr):
        return self.get(attr)

    __setattr__ = dict.__setitem__
    __delattr__ = dict.__delitem__

    def __dir__(self):
        return self.keys()

    def __deepcopy__(self, memo):
        return DotDict([(copy.deepcopy(k, memo), copy.deepcopy(v, memo)) for k, v in self.items()])


def recursively_convert_to_json_serializable(test_obj):
    """
    Helper function to convert a report object to one that is serializable

    Args:
        test_obj: an object to attempt to convert a corresponding json-serializable object

    Returns:
        (dict) A converted test_object

    Notes:
        Floats are never rounded: json renders them with the shortest representation that
        round-trips, which never needs more than 17 significant digits. NaN and infinities
        become None.
    """
    if isinstance(test_obj, bool) or isinstance(test_obj, np.bool_):
        return bool(test_obj)

    if isinstance(test_obj, (string_types, integer_types)):
        return test_obj

    if isinstance(test_obj, float):
        if not np.isfinite(test_obj):
            return None
        return test_obj

    elif isinstance(test_obj, Fraction):
        return "%d/%d" % (test_obj.numerator, test_obj.denominator)

    elif isinstance(test_obj, dict):
        new_dict = {}
        for key in test_obj:
            # A json key must be a string
            new_dict[str(key)] = recursively_convert_to_json_serializable(test_obj[key])
        return new_dict

    elif isinstance(test_obj, (list, tuple, set)):
        return [recursively_convert_to_json_serializable(val) for val in test_obj]

    elif isinstance(test_obj, np.ndarray):
        return [recursively_convert_to_json_serializable(x) for x in test_obj.tolist()]

    elif test_obj is None:
        return test_obj

    elif isinstance(test_obj, pd.DataFrame):
        return recursively_convert_to_json_serializable(test_obj.to_dict(orient='records'))

    elif isinstance(test_obj, np.integer):
        return int(test_obj)

    elif isinstance(test_obj, np.floating):
        return recursively_convert_to_json_serializable(float(test_obj))

    else:
        raise TypeError('%s is of type %s which cannot be serialized.' % (str(test_obj), type(test_obj).__name__))


def to_json(obj):
    """Render a report as deterministic, indented JSON."""
    return json.dumps(recursively_convert_to_json_serializable(obj), indent=2, sort_keys=True)


def frame_to_csv(frame, path=None):
    """Write a DataFrame as CSV with round-trip float formatting; return the text when no path is given."""
    return frame.to_csv(path, index=False, float_format='%.17g')


def _coerce_scalar(raw):
    text = raw.strip()
    lowered = text.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    if lowered in ("none", "null", ""):
        return None
    if len(text) >= 2 and text[0] == text[-1] and text[0] in ("'", '"'):
        return text[1:-1]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_flat_config(text):
    """Parse the flat ``key = value`` configuration format.

    Blank lines and ``#`` comments are ignored, a value containing commas becomes a list,
    and numbers and booleans are coerced.

    Args:
        text (string): contents of the configuration file

    Returns:
        dict of parsed values

    Raises:
        ValueError: for a line without ``=`` or without a key
    """
    config = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError("line %d of configuration is not of the form key = value: %r" % (lineno, line))
        key, raw = stripped.split("=", 1)
        key = key.strip().replace("-", "_")
        if not key:
            raise ValueError("line %d of configuration has no key: %r" % (lineno, line))
        if "," in raw:
            config[key] = [_coerce_scalar(item) for item in raw.split(",") if item.strip()]
        else:
            config[key] = _coerce_scalar(raw)
    return config


def read_flat_config(filename):
    with open(filename) as f:
        return parse_flat_config(f.read())


def get_thread_count(default=1):
    """Number of worker threads allowed by the environment."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r" % (THREADS_ENV_VAR, raw))
        return default
    if value < 1:
        logger.warning("Ignoring non-positive %s=%r" % (THREADS_ENV_VAR, raw))
        return default
    return value


def moment_report(method, mean, variance, **extra):
    """A MomentReport: mean and variance of a linear statistic with the method that produced them.

    method is one of "finite-N determinant", "asymptotic formula" or "Monte Carlo".
    """
    report = DotDict(method=method, mean=mean, variance=variance)
    report.update(extra)
    return report
