"""
Brute-force evaluation of G_N(f) from its definition as a ratio of N-dimensional integrals,

    G_N(f) = int prod |x_j - x_k|^beta prod w(x_j) (1 + f(x_j)) dx / (same with f = 0),

for N <= 3. This is the oracle every determinant formula is checked against.
"""
from __future__ import division

import itertools
import logging
import math

import numpy as np
from scipy import special

from rmt_linstats.errors import DomainError, UnsupportedEnsembleError
from rmt_linstats.operator.grid import make_grid

logger = logging.getLogger(__name__)

MAX_DIRECT_N = 3
RULES = ("composite", "natural")
DEFAULT_NODES = 40


def direct_domain(spec):
    """Truncation of the ensemble's support beyond which the integrand of the normalization is
    below exp(-80) relative to its peak."""
    exponent, rate = spec._weight_parameters()
    degree = spec.beta * (spec.N - 1)
    if spec.family == "gaussian":
        R = math.sqrt((80.0 + 2.0 * degree) / rate)
        return (-R, R)
    X = (80.0 + 4.0 * (abs(exponent) + degree)) / rate
    return (0.0, X)


def _composite_grid(spec, stat, nodes):
    lo, hi = direct_domain(spec)
    transform = "square" if spec.family == "laguerre" else None
    ref_lo, ref_hi = (math.sqrt(lo), math.sqrt(hi)) if transform else (lo, hi)
    width = 1.0 if transform else 2.0
    panels = max(1, int(math.ceil((ref_hi - ref_lo) / width)))
    ref_breaks = list(np.linspace(ref_lo, ref_hi, panels + 1)[1:-1])
    breaks = [t * t for t in ref_breaks] if transform else ref_breaks
    if not stat.is_zero:
        s_lo, s_hi = stat.support(1e-16)
        breaks.extend(b for b in (s_lo, s_hi) if lo < b < hi)
    return make_grid((lo, hi), nodes, breakpoints=sorted(breaks), transform=transform)


def _ordered_integral(grid, g, beta, N):
    """int over x_1 < ... < x_N of prod_{j<k} (x_k - x_j)^beta prod g(x_j), by nested cumulative
    integration on a composite grid (the ordered Vandermonde factor is a polynomial)."""
    w = grid.weights
    if N == 1:
        return float(np.dot(w, g))
    upper = w[None, :] - grid.cumulative_matrix()
    x = grid.nodes
    P = (x[None, :] - x[:, None]) ** int(beta)
    inner = upper * P
    if N == 2:
        return float(np.dot(w * g, inner.dot(g)))
    # inner3[j, i] = int_{x_k > x_j} (x_k - x_j)^beta (x_k - x_i)^beta g(x_k) dx_k
    inner3 = inner.dot(g[:, None] * P.T)
    return float(np.sum((w * g)[:, None] * inner * g[None, :] * inner3.T))


def _composite(spec, stat, lam, nodes):
    grid = _composite_grid(spec, stat, nodes)
    x = grid.nodes
    log_w = spec.log_weight(x)
    base = np.exp(log_w - np.max(log_w))
    denominator = _ordered_integral(grid, base, spec.beta, spec.N)
    numerator = _ordered_integral(grid, base * np.exp(-lam * stat(x)), spec.beta, spec.N)
    return numerator / denominator


def _natural_rule(spec, n):
    """Gauss rule of the ensemble's own weight: sum_i w_i h(x_i) ~ int h(x) w(x) dx."""
    exponent, rate = spec._weight_parameters()
    if spec.family == "gaussian":
        x, w = special.roots_hermite(n)
        return x / math.sqrt(rate), w
    x, w = special.roots_genlaguerre(n, exponent)
    return x / rate, w


def _natural(spec, stat, lam, nodes):
    x, w = _natural_rule(spec, nodes)
    points = np.meshgrid(*([x] * spec.N), indexing="ij")
    weights = np.ones_like(points[0])
    damp = np.ones_like(points[0])
    for k, weight_k in enumerate(np.meshgrid(*([w] * spec.N), indexing="ij")):
        weights = weights * weight_k
        damp = damp * np.exp(-lam * stat(points[k]))
    vandermonde = np.ones_like(points[0])
    for j, k in itertools.combinations(range(spec.N), 2):
        vandermonde = vandermonde * np.abs(points[k] - points[j]) ** spec.beta
    base = weights * vandermonde
    return float(np.sum(base * damp)) / float(np.sum(base))


def mgf_direct_with_error(spec, stat, lam, rule="composite", nodes=DEFAULT_NODES):
    """G_N(f) by direct N-dimensional quadrature, with an error estimate from doubling the resolution.

    Args:
        spec (EnsembleSpec): N must be at most 3
        stat: statistic as a function of the raw eigenvalue
        lam (float): real parameter
        rule (str): "composite" (ordered simplex, composite Gauss-Legendre panels; all beta) or
            "natural" (tensor-product Gauss rule of the ensemble weight; beta = 2, 4 only)
        nodes (int): nodes per panel (composite) or per dimension (natural) at the coarse level

    Returns:
        (value, error): the value at doubled resolution and its change from the coarse level
    """
    if spec.N > MAX_DIRECT_N:
        raise DomainError("direct quadrature is limited to N <= %d, got N=%d" % (MAX_DIRECT_N, spec.N))
    if rule not in RULES:
        raise DomainError("Unknown direct quadrature rule %r" % (rule,))
    if spec.family == "gaussian" and stat.half_line_only:
        raise DomainError("a half-line statistic cannot be used with %s" % spec.name)
    if rule == "natural" and spec.beta == 1:
        raise UnsupportedEnsembleError("the natural Gauss rule cannot integrate |x - y| exactly; "
                                       "use the composite rule for %s" % spec.name)
    if stat.is_zero or lam == 0:
        return 1.0, 0.0
    evaluate = _composite if rule == "composite" else _natural
    coarse = evaluate(spec, stat, lam, int(nodes))
    fine = evaluate(spec, stat, lam, 2 * int(nodes))
    error = abs(fine - coarse)
    logger.debug("direct %s G for %r at lambda=%r: %r (change %.3g)" % (rule, spec, lam, fine, error))
    return fine, error


def mgf_direct(spec, stat, lam, rule="composite", nodes=DEFAULT_NODES):
    return mgf_direct_with_error(spec, stat, lam, rule, nodes)[0]
