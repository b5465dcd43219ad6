from __future__ import division

import copy
import inspect
import logging
import traceback
from collections import namedtuple
from functools import wraps

from six import PY3

from rmt_linstats.util import DotDict, recursively_convert_to_json_serializable

logger = logging.getLogger(__name__)


class VerificationSuite(object):
    """A named collection of numerical checks.

    Subclasses decorate their check methods with ``VerificationSuite.check`` and list the calls to make in
    ``plan``, a list of ``(check_name, kwargs)`` pairs. ``run`` executes the plan and summarizes it the same
    way for every suite.
    """

    name = None
    plan = []

    def __init__(self, catch_exceptions=True):
        self.catch_exceptions = catch_exceptions

    def __repr__(self):
        return "<%s %r: %d checks>" % (self.__class__.__name__, self.name, len(self.plan))

    @classmethod
    def check(cls, func):
        """Manages the bookkeeping common to every check.

        The decorated method returns a dict with at least ``success``; ``measured`` and ``tolerance`` are
        expected whenever the check compares a number with a bound. The decorator:

        * records the check name and the keyword arguments it was called with,
        * catches exceptions into ``exception_info`` when ``catch_exceptions`` is set (a raised exception
          counts as a failure),
        * converts the result to a JSON-serializable DotDict.
        """
        check_name = func.__name__

        @wraps(func)
        def wrapper(self, *args, **kwargs):
            if PY3:
                argspec = inspect.getfullargspec(func)[0][1:]
            else:
                argspec = inspect.getargspec(func)[0][1:]

            all_args = dict(zip(argspec, args))
            all_args.update(kwargs)

            if "catch_exceptions" in all_args:
                catch_exceptions = all_args.pop("catch_exceptions")
            else:
                catch_exceptions = self.catch_exceptions

            check_args = recursively_convert_to_json_serializable(copy.deepcopy(all_args))

            raised_exception = False
            exception_traceback = None
            exception_message = None

            try:
                return_obj = dict(func(self, **all_args))

            except Exception as err:
                if catch_exceptions:
                    raised_exception = True
                    exception_traceback = traceback.format_exc()
                    exception_message = str(err)

                    return_obj = {
                        "success": False
                    }

                else:
                    raise(err)

            return_obj["success"] = bool(return_obj["success"])
            return_obj["check"] = check_name
            return_obj["kwargs"] = check_args

            if catch_exceptions:
                return_obj["exception_info"] = {
                    "raised_exception": raised_exception,
                    "exception_message": exception_message,
                    "exception_traceback": exception_traceback
                }

            logger.debug("%s.%s(%r): %s" % (self.name, check_name, check_args,
                                             "passed" if return_obj["success"] else "FAILED"))
            return DotDict(recursively_convert_to_json_serializable(return_obj))

        wrapper.is_check = True
        return wrapper

    def list_checks(self):
        return sorted(name for name in dir(self) if getattr(getattr(self, name), "is_check", False))

    def run(self, only_return_failures=False):
        """Runs every planned check and returns the suite report.

        Returns:
            A DotDict::

            {
              "suite": "lemmas",
              "results": [{"check": ..., "kwargs": {...}, "success": true, "measured": ..., ...}, ...],
              "success": true,
              "statistics": {
                "evaluated_checks": n,
                "successful_checks": m,
                "unsuccessful_checks": n - m,
                "success_percent": 100 * m / n
              }
            }
        """
        results = []
        for check_name, kwargs in self.plan:
            logger.info("%s: %s %r" % (self.name, check_name, kwargs))
            results.append(getattr(self, check_name)(**kwargs))

        statistics = calc_check_statistics(results)

        if only_return_failures:
            results = [result for result in results if not result["success"]]

        return DotDict({
            "suite": self.name,
            "results": results,
            "success": statistics.success,
            "statistics": {
                "evaluated_checks": statistics.evaluated_checks,
                "successful_checks": statistics.successful_checks,
                "unsuccessful_checks": statistics.unsuccessful_checks,
                "success_percent": statistics.success_percent,
            }
        })


def bounded(measured, tolerance, **extra):
    """The usual check outcome: ``measured <= tolerance``."""
    result = {"success": measured <= tolerance, "measured": measured, "tolerance": tolerance}
    result.update(extra)
    return result


CheckStatistics = namedtuple("CheckStatistics", [
    "evaluated_checks",
    "successful_checks",
    "unsuccessful_checks",
    "success_percent",
    "success",
])


def calc_check_statistics(results):
    successful_checks = sum(result["success"] for result in results)
    evaluated_checks = len(results)
    unsuccessful_checks = evaluated_checks - successful_checks
    success = successful_checks == evaluated_checks
    try:
        success_percent = successful_checks / evaluated_checks * 100
    except ZeroDivisionError:
        success_percent = float("nan")

    return CheckStatistics(
        evaluated_checks=evaluated_checks,
        successful_checks=successful_checks,
        unsuccessful_checks=unsuccessful_checks,
        success_percent=success_percent,
        success=success,
    )


def merge_reports(reports):
    """Combines several suite reports (``verify all``) into one with pooled statistics."""
    results = [result for report in reports for result in report["results"]]
    evaluated = sum(report["statistics"]["evaluated_checks"] for report in reports)
    successful = sum(report["statistics"]["successful_checks"] for report in reports)
    try:
        success_percent = successful / evaluated * 100
    except ZeroDivisionError:
        success_percent = float("nan")
    return DotDict({
        "suite": "all",
        "suites": [report["suite"] for report in reports],
        "results": results,
        "success": all(report["success"] for report in reports),
        "statistics": {
            "evaluated_checks": evaluated,
            "successful_checks": successful,
            "unsuccessful_checks": evaluated - successful,
            "success_percent": success_percent,
        }
    })
