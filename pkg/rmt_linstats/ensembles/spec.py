"""
Ensemble parameters: family, beta, matrix size and Laguerre parameter, with the weight, support,
weight moments and the scaling rule of the linear statistic attached to each ensemble.
"""
from __future__ import division

import logging
import math

import numpy as np
from scipy import special

from rmt_linstats.errors import DomainError, UnsupportedEnsembleError

logger = logging.getLogger(__name__)

NAMES = {
    ("gaussian", 1): "GOE",
    ("gaussian", 2): "GUE",
    ("gaussian", 4): "GSE",
    ("laguerre", 1): "LOE",
    ("laguerre", 2): "LUE",
    ("laguerre", 4): "LSE",
}

# lower bound on alpha for each Laguerre ensemble
ALPHA_BOUNDS = {1: -2.0, 2: -1.0, 4: 0.0}


class EnsembleSpec(object):
    """A beta-ensemble with jpdf proportional to prod |x_j - x_k|^beta prod w(x_j).

    Weights: GUE and GSE use exp(-x^2), GOE exp(-x^2/2), LUE and LSE x^alpha exp(-x), and LOE
    x^(alpha/2) exp(-x/2).
    """

    def __init__(self, family, beta, N, alpha=None):
        family = str(family).lower()
        if family not in ("gaussian", "laguerre"):
            raise UnsupportedEnsembleError("Unknown ensemble family %r" % (family,))
        if beta not in (1, 2, 4):
            raise UnsupportedEnsembleError("beta must be 1, 2 or 4, got %r" % (beta,))
        if int(N) != N or N < 1:
            raise DomainError("N must be a positive integer, got %r" % (N,))
        if beta == 1 and N % 2:
            raise DomainError("beta=1 ensembles are only supported for even N, got N=%d" % N)
        if family == "laguerre":
            alpha = 0.0 if alpha is None and beta != 4 else alpha
            if alpha is None or not alpha > ALPHA_BOUNDS[beta]:
                raise DomainError("%s requires alpha > %g, got %r" % (NAMES[(family, beta)], ALPHA_BOUNDS[beta], alpha))
            alpha = float(alpha)
        elif alpha not in (None, 0, 0.0):
            logger.debug("Ignoring alpha=%r for a Gaussian ensemble" % (alpha,))
            alpha = None
        else:
            alpha = None
        self.family = family
        self.beta = int(beta)
        self.N = int(N)
        self.alpha = alpha

    def __repr__(self):
        if self.alpha is None:
            return "EnsembleSpec(%r, beta=%d, N=%d)" % (self.family, self.beta, self.N)
        return "EnsembleSpec(%r, beta=%d, N=%d, alpha=%r)" % (self.family, self.beta, self.N, self.alpha)

    def __eq__(self, other):
        return isinstance(other, EnsembleSpec) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.family, self.beta, self.N, self.alpha))

    def with_N(self, N):
        return EnsembleSpec(self.family, self.beta, N, self.alpha)

    @property
    def name(self):
        return NAMES[(self.family, self.beta)]

    @property
    def power(self):
        """The determinant formulas give G^power: 2 for beta = 1, 4 and 1 for beta = 2."""
        return 1 if self.beta == 2 else 2

    @property
    def support(self):
        if self.family == "gaussian":
            return (-np.inf, np.inf)
        return (0.0, np.inf)

    def _weight_parameters(self):
        """(exponent of x, decay rate) so that w = x^exponent exp(-rate x^k), k = 2 or 1."""
        if self.family == "gaussian":
            return 0.0, (0.5 if self.beta == 1 else 1.0)
        if self.beta == 1:
            return 0.5 * self.alpha, 0.5
        return self.alpha, 1.0

    def log_weight(self, x):
        x = np.asarray(x, dtype=float)
        exponent, rate = self._weight_parameters()
        if self.family == "gaussian":
            return -rate * x * x
        with np.errstate(divide='ignore', invalid='ignore'):
            values = exponent * np.log(x) - rate * x
        if exponent == 0:
            values = np.where(x == 0, 0.0, values)
        return np.where(x < 0, -np.inf, values)

    def weight(self, x):
        return np.exp(self.log_weight(x))

    def moment(self, j):
        """s_j = int x^j w(x) dx in closed form."""
        if j < 0 or int(j) != j:
            raise DomainError("moment order must be a nonnegative integer, got %r" % (j,))
        exponent, rate = self._weight_parameters()
        if self.family == "gaussian":
            if j % 2:
                return 0.0
            return math.exp(special.gammaln((j + 1) / 2.0) - (j + 1) / 2.0 * math.log(rate))
        return math.exp(special.gammaln(j + exponent + 1.0) - (j + exponent + 1.0) * math.log(rate))

    @property
    def scaling(self):
        return ScalingRule.for_spec(self)

    def to_dict(self):
        return {"family": self.family, "beta": self.beta, "N": self.N, "alpha": self.alpha, "name": self.name}


class ScalingRule(object):
    """The map from a raw eigenvalue to the argument of the statistic.

    "linear": x -> sqrt(c) x (bulk); "sqrt": x -> sqrt(c x) (hard edge). The constant is c = 2N for
    GOE/GUE, 4N for GSE, LUE and LOE, and 8N for LSE.
    """

    def __init__(self, kind, c):
        if kind not in ("linear", "sqrt"):
            raise DomainError("Unknown scaling kind %r" % (kind,))
        if not c > 0:
            raise DomainError("scaling constant must be positive, got %r" % (c,))
        self.kind = kind
        self.c = float(c)

    @classmethod
    def for_spec(cls, spec):
        if spec.family == "gaussian":
            return cls("linear", 4.0 * spec.N if spec.beta == 4 else 2.0 * spec.N)
        return cls("sqrt", 8.0 * spec.N if spec.beta == 4 else 4.0 * spec.N)

    def __repr__(self):
        return "ScalingRule(%r, %r)" % (self.kind, self.c)

    def __eq__(self, other):
        return isinstance(other, ScalingRule) and (self.kind, self.c) == (other.kind, other.c)

    def __ne__(self, other):
        return not self == other

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "linear":
            return math.sqrt(self.c) * x
        return np.sqrt(self.c * np.maximum(x, 0.0))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "linear":
            return np.full_like(x, math.sqrt(self.c))
        with np.errstate(divide='ignore'):
            return 0.5 * self.c / np.sqrt(self.c * x)

    def inverse(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "linear":
            return u / math.sqrt(self.c)
        return u * u / self.c

    def inverse_interval(self, lo, hi):
        """Preimage of [lo, hi] under the rule."""
        if self.kind == "linear":
            root = math.sqrt(self.c)
            return (lo / root, hi / root)
        lo, hi = max(lo, 0.0), max(hi, 0.0)
        return (lo * lo / self.c, hi * hi / self.c)

    def to_dict(self):
        return {"kind": self.kind, "c": self.c}
