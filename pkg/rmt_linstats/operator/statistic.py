"""
Smooth statistics F for linear eigenvalue statistics sum_j F(x_j).
"""
from __future__ import division

import logging
import math

import numpy as np

from rmt_linstats.errors import DomainError

logger = logging.getLogger(__name__)

FAMILIES = ("gaussian", "sech", "bump", "exponential")
HALF_LINE_FAMILIES = ("exponential",)


class TestFunction(object):
    """One of the built-in statistic families, with u = (x - c)/s:

        gaussian:    a exp(-u^2/2)
        sech:        a sech(u)^2
        bump:        a u^2 exp(1 - u^2)
        exponential: a exp(-x/s)      (half line only; the center must be 0)
    """

    __test__ = False

    def __init__(self, family="gaussian", amplitude=1.0, center=0.0, scale=1.0):
        if family not in FAMILIES:
            raise DomainError("Unknown statistic family %r" % (family,))
        if not scale > 0:
            raise DomainError("the statistic scale must be positive, got %r" % (scale,))
        if family == "exponential" and center != 0:
            raise DomainError("the exponential statistic has no center parameter")
        self.family = family
        self.amplitude = float(amplitude)
        self.center = float(center)
        self.scale = float(scale)

    def __repr__(self):
        return "TestFunction(%r, amplitude=%r, center=%r, scale=%r)" % (
            self.family, self.amplitude, self.center, self.scale)

    @property
    def half_line_only(self):
        return self.family in HALF_LINE_FAMILIES

    @property
    def is_zero(self):
        return self.amplitude == 0

    def to_dict(self):
        return {"family": self.family, "amplitude": self.amplitude, "center": self.center, "scale": self.scale}

    def _u(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.scale

    def __call__(self, x):
        a = self.amplitude
        u = self._u(x)
        if self.family == "gaussian":
            return a * np.exp(-0.5 * u * u)
        elif self.family == "sech":
            return a / np.cosh(u) ** 2
        elif self.family == "bump":
            return a * u * u * np.exp(1.0 - u * u)
        return a * np.exp(-np.asarray(x, dtype=float) / self.scale)

    def derivative(self, x):
        a, s = self.amplitude, self.scale
        u = self._u(x)
        if self.family == "gaussian":
            return -a * u / s * np.exp(-0.5 * u * u)
        elif self.family == "sech":
            return -2.0 * a / s * np.tanh(u) / np.cosh(u) ** 2
        elif self.family == "bump":
            return a / s * (2.0 * u - 2.0 * u ** 3) * np.exp(1.0 - u * u)
        return -self(x) / s

    def radius(self, tol=1e-16):
        """Distance (in u) beyond which |F| < tol |a|."""
        log_tol = -math.log(tol)
        if self.family == "gaussian":
            return math.sqrt(2.0 * log_tol)
        elif self.family == "sech":
            return 0.5 * (log_tol + math.log(4.0))
        elif self.family == "bump":
            r2 = 1.0 + log_tol
            for _ in range(20):
                r2 = 1.0 + log_tol + math.log(r2)
            return math.sqrt(r2)
        return log_tol

    def support(self, tol=1e-16):
        """(lo, hi) outside of which |F| < tol |a|."""
        if self.family == "exponential":
            return (0.0, self.scale * self.radius(tol))
        r = self.scale * self.radius(tol)
        return (self.center - r, self.center + r)

    def total(self):
        """int F dx over the real line (over [0, inf) for the exponential family)."""
        a, s = self.amplitude, self.scale
        if self.family == "gaussian":
            return a * s * math.sqrt(2.0 * math.pi)
        elif self.family == "sech":
            return 2.0 * a * s
        elif self.family == "bump":
            return a * s * math.e * math.sqrt(math.pi) / 2.0
        return a * s


class ScaledStatistic(object):
    """x -> F(rule(x)) with derivative F'(rule(x)) rule'(x), for a ScalingRule-like map."""

    def __init__(self, statistic, rule):
        self.statistic = statistic
        self.rule = rule

    def __repr__(self):
        return "ScaledStatistic(%r, %r)" % (self.statistic, self.rule)

    @property
    def is_zero(self):
        return self.statistic.is_zero

    @property
    def half_line_only(self):
        return self.statistic.half_line_only

    def __call__(self, x):
        return self.statistic(self.rule(x))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            values = self.statistic.derivative(self.rule(x)) * self.rule.derivative(x)
        return np.where(np.isfinite(values), values, 0.0)

    def support(self, tol=1e-16):
        lo, hi = self.statistic.support(tol)
        return self.rule.inverse_interval(lo, hi)

    def to_dict(self):
        d = self.statistic.to_dict()
        d["scaling"] = self.rule.to_dict()
        return d

