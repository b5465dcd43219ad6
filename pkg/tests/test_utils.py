from __future__ import division

import numpy as np
import pytest

import rmt_linstats.errors as errors
from rmt_linstats.ensembles import EnsembleSpec
from rmt_linstats.ensembles.determinant import trace_log_mgf
from rmt_linstats.ensembles.identities import vandermonde4_det_check
from rmt_linstats.ensembles.psi import canonical_M
from rmt_linstats.operator.statistic import ScaledStatistic, TestFunction
from rmt_linstats.orthopoly import hermite_phi, sine_kernel
from rmt_linstats.specfun import (
    bessel_j,
    hyp2f1_lemma22,
    lemma23_lhs,
    log_gamma,
    log_stirling_gamma,
    sine_integral,
    stirling_gamma,
)
from rmt_linstats.util import recursively_convert_to_json_serializable


# Taken from the following stackoverflow:
# https://stackoverflow.com/questions/23549419/assert-that-two-dictionaries-are-almost-equal
def assertDeepAlmostEqual(expected, actual, *args, **kwargs):
    """
    Assert that two complex structures have almost equal contents.

    Compares lists, dicts and tuples recursively. Checks numeric values
    using pyteset.approx and checks all other values with an assertion equality statement
    Accepts additional positional and keyword arguments and pass those
    intact to pytest.approx() (that's how you specify comparison
    precision).

    """
    is_root = '__trace' not in kwargs
    trace = kwargs.pop('__trace', 'ROOT')
    try:
        if isinstance(expected, bool):
            assert expected == actual
        elif isinstance(expected, (int, float, complex)):
            assert expected == pytest.approx(actual, *args, **kwargs)
        elif isinstance(expected, (list, tuple, np.ndarray)):
            assert len(expected) == len(actual)
            for index in range(len(expected)):
                v1, v2 = expected[index], actual[index]
                assertDeepAlmostEqual(v1, v2,
                                      __trace=repr(index), *args, **kwargs)
        elif isinstance(expected, dict):
            assert set(expected) == set(actual)
            for key in expected:
                assertDeepAlmostEqual(expected[key], actual[key],
                                      __trace=repr(key), *args, **kwargs)
        else:
            assert expected == actual
    except AssertionError as exc:
        exc.__dict__.setdefault('traces', []).append(trace)
        if is_root:
            trace = ' -> '.join(reversed(exc.traces))
            exc = AssertionError("%s\nTRACE: %s" % (str(exc), trace))
        raise exc


def gaussian_statistic(amplitude=1.0, center=0.0, scale=1.0):
    return TestFunction("gaussian", amplitude, center, scale)


def sech_statistic(amplitude=1.0, center=0.0, scale=1.0):
    return TestFunction("sech", amplitude, center, scale)


def bump_statistic(amplitude=1.0, center=0.0, scale=1.0):
    return TestFunction("bump", amplitude, center, scale)


def scaled_statistic(spec, family="gaussian", amplitude=1.0, center=0.0, scale=1.0):
    """The statistic F(s(x)) with s the ensemble's scaling rule."""
    return ScaledStatistic(TestFunction(family, amplitude, center, scale), spec.scaling)


def make_spec(ensemble):
    """EnsembleSpec from the JSON form {"family", "beta", "N", "alpha"}."""
    return EnsembleSpec(ensemble["family"], ensemble["beta"], ensemble["N"], ensemble.get("alpha"))


def _moment(ensemble, j):
    return make_spec(ensemble).moment(j)


def _trace_log(lam, mean, variance):
    return trace_log_mgf(lam, mean, variance)


def _canonical(size):
    return canonical_M(size)


def _vandermonde(points):
    return list(vandermonde4_det_check(points))


def _sine_kernel(x, y):
    return sine_kernel(x, y)


def _spec_name(ensemble):
    return make_spec(ensemble).name


def _scaling(ensemble, x):
    return make_spec(ensemble).scaling(x)


def _statistic(family, amplitude, center, scale, x):
    return TestFunction(family, amplitude, center, scale)(x)


# operation name in a test definition -> callable taking the "in" arguments
OPERATIONS = {
    "log_gamma": log_gamma,
    "log_stirling_gamma": log_stirling_gamma,
    "stirling_gamma": stirling_gamma,
    "bessel_j": bessel_j,
    "sine_integral": sine_integral,
    "hyp2f1_lemma22": hyp2f1_lemma22,
    "lemma23_lhs": lemma23_lhs,
    "hermite_phi": hermite_phi,
    "sine_kernel": _sine_kernel,
    "ensemble_moment": _moment,
    "ensemble_name": _spec_name,
    "scaling_rule": _scaling,
    "statistic": _statistic,
    "trace_log_mgf": _trace_log,
    "canonical_M": _canonical,
    "vandermonde4_det_check": _vandermonde,
}


def evaluate_json_test(operation, test):
    """
    This method will evaluate the result of a test built using the rmt_linstats json test format.

    :param operation: (string) a key of OPERATIONS
    :param test: (dict) a dictionary containing information for the test to be run. The dictionary must include:
        - title: (string) the name of the test
        - in: (dict or list) keyword arguments, or a list of positional arguments, for the operation
        - out: the expected value, or {"raises": "<exception class in rmt_linstats.errors>"}
        - exactly one of exact_match_out (boolean, compare the serialized result with out) and
          tolerance (relative tolerance for the numbers in out; "abs" may give an absolute tolerance)
    :return: None. asserts correctness of results.
    """
    if 'title' not in test:
        raise ValueError(
            "Invalid test configuration detected: 'title' is required.")

    if 'in' not in test:
        raise ValueError(
            "Invalid test configuration detected: 'in' is required.")

    if 'out' not in test:
        raise ValueError(
            "Invalid test configuration detected: 'out' is required.")

    if 'exact_match_out' not in test and 'tolerance' not in test:
        raise ValueError(
            "Invalid test configuration detected: 'exact_match_out' or 'tolerance' is required.")

    func = OPERATIONS[operation]

    if isinstance(test['out'], dict) and 'raises' in test['out']:
        exception_class = getattr(errors, test['out']['raises'])
        with pytest.raises(exception_class):
            if isinstance(test['in'], list):
                func(*test['in'])
            else:
                func(**test['in'])
        return

    # Support tests with positional arguments
    if isinstance(test['in'], list):
        result = func(*test['in'])
    # As well as keyword arguments
    else:
        result = func(**test['in'])

    result = recursively_convert_to_json_serializable(result)

    if test.get('exact_match_out') is True:
        assert test['out'] == result
    else:
        assertDeepAlmostEqual(test['out'], result, rel=test['tolerance'], abs=test.get('abs', 0.0))
