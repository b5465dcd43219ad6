"""
Scalar special functions: log-gamma and the Stirling estimate, Bessel functions of real
order, the sine integral, and two exact identities used to validate the kernel
asymptotics (a terminating 2F1 value and a binomial alternating sum).

All functions are pure and accept numpy arrays where noted.
"""
from __future__ import division

import logging
import math
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy import special

from rmt_linstats.errors import DomainError

logger = logging.getLogger(__name__)


def log_gamma(x):
    """Natural logarithm of the gamma function for x > 0."""
    if x <= 0:
        raise DomainError("log_gamma requires x > 0, got %r" % (x,))
    return float(special.gammaln(x))


def log_stirling_gamma(n):
    """Logarithm of the leading Stirling estimate sqrt(2 pi) n^(n - 1/2) e^(-n) of Gamma(n)."""
    if n <= 0:
        raise DomainError("the Stirling estimate requires n > 0, got %r" % (n,))
    return 0.5 * math.log(2 * math.pi) + (n - 0.5) * math.log(n) - n


def stirling_gamma(n):
    return math.exp(log_stirling_gamma(n))


def _check_bessel_args(nu, x):
    if nu < -1:
        raise DomainError("bessel_j requires order >= -1, got %r" % (nu,))
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("bessel_j requires x >= 0")
    return x


def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x) for real order nu >= -1 and x >= 0.

    Args:
        nu (float): order, at least -1
        x (float or array): argument(s), nonnegative

    Returns:
        float for scalar input, otherwise an array of the same shape
    """
    xa = _check_bessel_args(nu, x)
    values = special.jv(nu, xa)
    if values.ndim == 0:
        return float(values)
    return values


def bessel_j_prime(nu, x):
    """Derivative J_nu'(x) = (J_{nu-1}(x) - J_{nu+1}(x)) / 2."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("bessel_j_prime requires x >= 0")
    values = 0.5 * (special.jv(nu - 1, xa) - special.jv(nu + 1, xa))
    if values.ndim == 0:
        return float(values)
    return values


def bessel_j_integral(nu, x):
    """Running integral of J_nu from 0 to x, for nu > -1.

    Uses the Neumann series 2 * sum_k J_{nu+2k+1}(x), summed from the highest order down;
    the series is cut where J_{nu+2k+1}(x) is below double precision for every x.
    """
    if nu <= -1:
        raise DomainError("the running Bessel integral requires order > -1, got %r" % (nu,))
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("bessel_j_integral requires x >= 0")
    x_max = float(np.max(xa)) if xa.size else 0.0
    highest = x_max + 14.0 * (x_max + 1.0) ** (1.0 / 3.0) + 20.0
    n_terms = max(1, int(math.ceil((highest - nu) / 2.0)))
    total = np.zeros_like(xa)
    for k in range(n_terms - 1, -1, -1):
        total = total + special.jv(nu + 2 * k + 1, xa)
    values = 2.0 * total
    if values.ndim == 0:
        return float(values)
    return values


def sine_integral(x):
    """Si(x), the integral of sin(t)/t from 0 to x; odd in x to machine precision."""
    xa = np.asarray(x, dtype=float)
    values = np.sign(xa) * special.sici(np.abs(xa))[0]
    if values.ndim == 0:
        return float(values)
    return values


def hyp2f1_lemma22(N, exact=False, method="recurrence"):
    """The terminating value 2F1(-N, 1; 3/2; 2) = integral_0^1 (2x^2 - 1)^N dx.

    Args:
        N (int): nonnegative integer
        exact (bool): return a Fraction instead of a float
        method (string): "recurrence" (default) or "quadrature"

    Returns:
        float, or Fraction when exact is True

    Notes:
        Integrating d/dx [x u^N] with u = 2x^2 - 1 over [0, 1] gives
        (2N+1) I_N + 2N I_{N-1} = 1 with I_0 = 1. Run forward, the recurrence damps errors
        by the factor 2N/(2N+1) per step. "quadrature" applies an (N+1)-point Gauss-Legendre
        rule, which is exact for the degree 2N integrand.
    """
    if N < 0 or int(N) != N:
        raise DomainError("hyp2f1_lemma22 requires a nonnegative integer, got %r" % (N,))
    N = int(N)
    if method == "quadrature":
        if exact:
            raise DomainError("exact evaluation is only available with the recurrence")
        nodes, weights = special.roots_legendre(N + 1)
        t = 0.5 * (nodes + 1.0)
        return float(0.5 * np.sum(weights * (2.0 * t * t - 1.0) ** N))
    elif method != "recurrence":
        raise DomainError("unknown method %r" % (method,))

    value = Fraction(1) if exact else 1.0
    for n in range(1, N + 1):
        value = (1 - 2 * n * value) / (2 * n + 1)
    return value


def _binomial(z, k):
    """C(z, k) for a real (or rational) upper argument via the falling-factorial product."""
    numerator = 1
    for i in range(k):
        numerator = numerator * (z - i)
    return numerator / math.factorial(k)


def lemma23_lhs(n, alpha):
    """Evaluate sum_{m=0}^{2n} (-1)^m / (m! prod_{l=m}^{2n} (alpha + 2l)) * C(2n + alpha, 2n - m + 1).

    The sum equals 1/(2n+1)! for every alpha > 0. Integers, Fractions and strings such as
    "7/3" are evaluated in exact rational arithmetic and return a Fraction; a float alpha
    is evaluated in floating point and returns a float.

    Args:
        n (int): nonnegative integer
        alpha: positive int, Fraction, rational string or float

    Returns:
        Fraction or float
    """
    if n < 0 or int(n) != n:
        raise DomainError("lemma23_lhs requires a nonnegative integer n, got %r" % (n,))
    n = int(n)
    if isinstance(alpha, float):
        a = alpha
        exact = False
    elif isinstance(alpha, (Rational, str)):
        a = Fraction(alpha)
        exact = True
    else:
        raise DomainError("alpha must be rational or float, got %r" % (alpha,))
    if a <= 0:
        raise DomainError("lemma23_lhs requires alpha > 0, got %r" % (alpha,))

    terms = []
    for m in range(2 * n + 1):
        denominator = math.factorial(m)
        for l in range(m, 2 * n + 1):
            denominator = denominator * (a + 2 * l)
        sign = -1 if m % 2 else 1
        terms.append(sign * _binomial(2 * n + a, 2 * n - m + 1) / denominator)

    if exact:
        return sum(terms, Fraction(0))
    return math.fsum(terms)
