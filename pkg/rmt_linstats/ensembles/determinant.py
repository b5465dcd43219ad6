"""
Finite-N moment generating functions as Fredholm determinants.

    beta = 2:  G            = det(I + K f)
    beta = 4:  G^2          = det(I + 2 K22 f - K22 eps f')
    beta = 1:  G^2          = det(I + K22 (f^2 + 2f) - K22 eps f' - K22 f eps f')

with f = exp(-lambda F) - 1. On the LOE half line f is zero for x < 0, so f' carries the point mass
f(0) delta_0 wherever F(0) does not vanish. Two discretizations are available:

    nystrom    the kernel matrix on a composite grid covering the kernel's support (beta = 1, 4) or the
               statistic's support (beta = 2)
    projected  K = sum_k L_k (x) R_k has finite rank, so det(I + K P) = det(I_r + B) with
               B_kl = <R_k, P L_l>; every integral is supported where F is, and eps terms acting on the
               kernel side use <R, eps h> = -<eps R, h> with eps R in closed form
"""
from __future__ import division

import logging
import math
import warnings

import numpy as np

from rmt_linstats.errors import DomainError, NumericalError, ResolutionError, UnsupportedEnsembleError
from rmt_linstats.ensembles.psi import edge_factors, finite_rank_factors, k22_kernel
from rmt_linstats.operator.grid import make_grid
from rmt_linstats.operator.kernel import KernelMatrix, Symbol, TBuilder, cumulants_from_T, fredholm_det
from rmt_linstats.orthopoly import cd_degree, cd_kernel, laguerre_parameter
from rmt_linstats.util import moment_report

logger = logging.getLogger(__name__)

METHODS = ("auto", "nystrom", "projected")
NYSTROM_MAX_N = 16
RESOLUTION_TOLERANCE = 1e-5
REFINEMENT = 1.5
MIN_PANEL_NODES = 48
MIN_LOCAL_NODES = 120
SUPPORT_TOLERANCE = 1e-16


def max_degree(spec):
    return cd_degree(spec) + 1


def kernel_domain(spec, maxdeg=None):
    """A finite interval outside of which every function in the kernels is negligible.

    Gaussian: [-R, R] with R = max(10, sqrt(2 maxdeg) + 6). Laguerre: [0, X] with X past the turning
    point 4 maxdeg by a margin that grows like the Airy scale of the largest degree.
    """
    maxdeg = max_degree(spec) if maxdeg is None else maxdeg
    if spec.family == "gaussian":
        R = max(10.0, math.sqrt(2.0 * maxdeg) + 6.0)
        return (-R, R)
    a = abs(laguerre_parameter(spec))
    X = 4.0 * maxdeg + 2.0 * a + 60.0 + 30.0 * (maxdeg + 1.0) ** (1.0 / 3.0)
    return (0.0, X)


def oscillation(spec, maxdeg=None):
    """Largest local frequency of the basis functions in the grid's reference variable."""
    maxdeg = max_degree(spec) if maxdeg is None else maxdeg
    if spec.family == "gaussian":
        return math.sqrt(2.0 * maxdeg + 1.0)
    return 2.0 * math.sqrt(maxdeg + 1.0)


def _to_reference(spec, x):
    return math.sqrt(max(x, 0.0)) if spec.family == "laguerre" else x


def _from_reference(spec, t):
    return t * t if spec.family == "laguerre" else t


def statistic_support(spec, stat):
    """The statistic's support in x, clipped to the kernel domain."""
    if spec.family == "gaussian" and stat.half_line_only:
        raise DomainError("a half-line statistic cannot be used with %s" % spec.name)
    lo, hi = stat.support(SUPPORT_TOLERANCE)
    dom_lo, dom_hi = kernel_domain(spec)
    lo, hi = max(lo, dom_lo), min(hi, dom_hi)
    if not lo < hi:
        raise DomainError("the statistic is negligible on the support of %s" % spec.name)
    return lo, hi


def _plan(spec, edges, nodes, refine, minimum_total):
    """Split the reference-variable edges into panels and assign node counts."""
    density = 4.0 + 1.2 * oscillation(spec)
    max_width = 96.0 / density
    panel_edges = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        pieces = max(1, int(math.ceil((b - a) / max_width)))
        for k in range(1, pieces + 1):
            panel_edges.append(a + (b - a) * k / pieces)
    counts = []
    for a, b in zip(panel_edges[:-1], panel_edges[1:]):
        count = max(MIN_PANEL_NODES, int(math.ceil((b - a) * density)))
        if nodes is not None:
            count = max(count, int(nodes))
        counts.append(int(math.ceil(count * refine)))
    total = sum(counts)
    if total < minimum_total:
        factor = minimum_total / total
        counts = [int(math.ceil(c * factor)) for c in counts]
    return panel_edges, counts


def _grid_from_edges(spec, edges, counts):
    breakpoints = [_from_reference(spec, t) for t in edges[1:-1]]
    domain = (_from_reference(spec, edges[0]), _from_reference(spec, edges[-1]))
    transform = "square" if spec.family == "laguerre" else None
    return make_grid(domain, counts, breakpoints=breakpoints, transform=transform)


def _clean_edges(values):
    edges = []
    for value in values:
        if not edges or value - edges[-1] > 1e-9 * max(1.0, abs(value)):
            edges.append(value)
    return edges


def full_grid(spec, stat, nodes=None, refine=1.0):
    """A composite grid over the whole kernel domain with panel breaks at the statistic's support."""
    lo, hi = statistic_support(spec, stat)
    dom_lo, dom_hi = kernel_domain(spec)
    edges = _clean_edges(sorted(_to_reference(spec, v) for v in (dom_lo, lo, hi, dom_hi)))
    panel_edges, counts = _plan(spec, edges, nodes, refine, 0)
    grid = _grid_from_edges(spec, panel_edges, counts)
    logger.debug("full grid for %r: %d nodes in %d panels" % (spec, len(grid), len(grid.panels)))
    return grid


def local_grid(spec, stat, nodes=None, refine=1.0):
    """A composite grid covering only the statistic's support."""
    lo, hi = statistic_support(spec, stat)
    edges = _clean_edges([_to_reference(spec, lo), _to_reference(spec, hi)])
    panel_edges, counts = _plan(spec, edges, nodes, refine, MIN_LOCAL_NODES)
    grid = _grid_from_edges(spec, panel_edges, counts)
    logger.debug("local grid for %r: %d nodes in %d panels" % (spec, len(grid), len(grid.panels)))
    return grid


def has_edge_mass(spec):
    """Whether f' carries a point mass at x = 0 in the determinant formula.

    The LOE formula is the full-line one applied to f restricted to [0, inf), whose derivative has the
    mass f(0) at the hard edge. For LSE every psi_j vanishes at 0 and the mass drops out.
    """
    return spec.family == "laguerre" and spec.beta == 1


def edge_value(spec, stat):
    if not has_edge_mass(spec):
        return None
    return float(stat(np.zeros(1))[0])


def ensemble_symbols(spec):
    """(linear, quadratic) parts of the operator P(f, f') in the determinant formula of the ensemble."""
    if spec.beta == 2:
        return (lambda f, fp: Symbol(f)), None

    def linear(f, fp, edge=None):
        edge_terms = [] if edge is None else [(1.0, None, edge)]
        return Symbol(2.0 * f, [(1.0, None, fp)], edge_terms)

    if spec.beta == 4:
        return linear, None

    def quadratic(f, fp, edge=None):
        edge_terms = [] if edge is None else [(1.0, f, edge)]
        return Symbol(f * f, [(1.0, f, fp)], edge_terms)

    return linear, quadratic


def _nystrom_apply(grid, K_op, edge_row=None):
    def apply_kernel(symbol):
        P = symbol.on_grid(grid)
        column = symbol.edge_column()
        if column is None:
            return KernelMatrix(grid, K_op.dot(P))
        # one extra collocation point at the edge carries h(0)
        rows = np.vstack([K_op, edge_row[None, :]])
        return KernelMatrix(None, np.hstack([rows.dot(P), rows.dot(column)[:, None]]))
    return apply_kernel


def nystrom_builder(spec, stat, grid=None, nodes=None, refine=1.0):
    if grid is None:
        grid = local_grid(spec, stat, nodes, refine) if spec.beta == 2 else full_grid(spec, stat, nodes, refine)
    x = grid.nodes
    kernel = cd_kernel(spec) if spec.beta == 2 else k22_kernel(spec)
    K_op = kernel.matrix(x) * grid.weights[None, :]
    F_edge = edge_value(spec, stat)
    edge_row = None
    if F_edge is not None:
        edge_row = kernel.matrix(np.zeros(1), x)[0] * grid.weights
    linear, quadratic = ensemble_symbols(spec)
    return TBuilder(_nystrom_apply(grid, K_op, edge_row), linear, quadratic, stat(x), stat.derivative(x),
                    F_edge=F_edge)


def projected_builder(spec, stat, nodes=None, refine=1.0):
    grid = local_grid(spec, stat, nodes, refine)
    x, w = grid.nodes, grid.weights
    L, R, eps_R = finite_rank_factors(spec, x)
    Rw = R * w[None, :]
    F_edge = edge_value(spec, stat)
    if F_edge is not None:
        L_edge, R_total = edge_factors(spec)

    def apply_kernel(symbol):
        B = (Rw * symbol.multiplier[None, :]).dot(L.T)
        if symbol.eps_terms:
            E = grid.eps_matrix()
            for c, q, p in symbol.eps_terms:
                if q is None:
                    B = B + c * (eps_R * (w * p)[None, :]).dot(L.T)
                else:
                    B = B - c * (Rw * q[None, :]).dot(E).dot((L * p[None, :]).T)
        for c, q, mass in symbol.edge_terms:
            integral = R_total if q is None else Rw.dot(q)
            B = B - 0.5 * c * mass * np.outer(integral, L_edge)
        return KernelMatrix(None, B)

    linear, quadratic = ensemble_symbols(spec)
    return TBuilder(apply_kernel, linear, quadratic, stat(x), stat.derivative(x), F_edge=F_edge)


def resolve_method(spec, method):
    if method not in METHODS:
        raise DomainError("Unknown determinant method %r" % (method,))
    if method == "auto":
        return "nystrom" if spec.N <= NYSTROM_MAX_N else "projected"
    return method


def make_builder(spec, stat, method="auto", grid=None, nodes=None, refine=1.0):
    method = resolve_method(spec, method)
    if grid is not None:
        if method != "nystrom":
            raise DomainError("an explicit grid is only used by the nystrom method")
        return nystrom_builder(spec, stat, grid=grid)
    if method == "nystrom":
        return nystrom_builder(spec, stat, nodes=nodes, refine=refine)
    return projected_builder(spec, stat, nodes=nodes, refine=refine)


def _report_unresolved(message, on_unresolved):
    if on_unresolved == "raise":
        raise ResolutionError(message)
    elif on_unresolved == "warn":
        warnings.warn(message)
    else:
        logger.info(message)


def _determinant(spec, stat, lam, method, grid, nodes, refine):
    value = fredholm_det(make_builder(spec, stat, method, grid, nodes, refine)(lam))
    if not np.isfinite(value):
        raise NumericalError("determinant for %s at lambda=%r is not finite" % (spec.name, lam))
    return value


def _checked_determinant(spec, stat, lam, method="auto", grid=None, nodes=None, check=True,
                         on_unresolved="warn"):
    if stat.is_zero or lam == 0:
        return 1.0
    value = _determinant(spec, stat, lam, method, grid, nodes, 1.0)
    if check and grid is None:
        refined = _determinant(spec, stat, lam, method, None, nodes, REFINEMENT)
        discrepancy = abs(refined - value)
        if discrepancy > RESOLUTION_TOLERANCE * max(1.0, abs(refined)):
            _report_unresolved("determinant for %s at lambda=%r changed by %.3g under grid refinement"
                               % (spec.name, lam, discrepancy), on_unresolved)
        value = refined
    return value


def mgf_squared(spec, stat, lam, grid=None, method="auto", nodes=None, check=True, on_unresolved="warn"):
    """[G_N(f)]^2 for a beta = 1, 4 ensemble, f = exp(-lam F) - 1.

    Args:
        spec (EnsembleSpec): beta must be 1 or 4
        stat: the statistic as a function of the raw eigenvalue (TestFunction or ScaledStatistic)
        lam (float): real parameter
        grid (QuadratureGrid): optional explicit Nystrom grid (disables the refinement check)
        method (str): "auto", "nystrom" or "projected"
        nodes (int): minimum nodes per panel
        check (bool): compare against a grid refined by a factor 1.5
        on_unresolved (str): "warn", "raise" or "log" when the refinement check fails
    """
    if spec.beta not in (1, 4):
        raise UnsupportedEnsembleError("mgf_squared needs beta = 1 or 4; use mgf_beta2 for %s" % spec.name)
    return _checked_determinant(spec, stat, lam, method, grid, nodes, check, on_unresolved)


def mgf_beta2(spec, stat, lam, grid=None, method="auto", nodes=None, check=True, on_unresolved="warn"):
    """G_N(f) = det(I + K_N f) for a beta = 2 ensemble."""
    if spec.beta != 2:
        raise UnsupportedEnsembleError("mgf_beta2 needs beta = 2, got %s" % spec.name)
    return _checked_determinant(spec, stat, lam, method, grid, nodes, check, on_unresolved)


def mgf(spec, stat, lam, **kwargs):
    """G_N(f) itself: the determinant, with the positive square root taken for beta = 1, 4."""
    if spec.beta == 2:
        return mgf_beta2(spec, stat, lam, **kwargs)
    value = mgf_squared(spec, stat, lam, **kwargs)
    if value < 0:
        if value > -RESOLUTION_TOLERANCE:
            return 0.0
        raise NumericalError("[G]^2 = %r is negative for %s at lambda=%r" % (value, spec.name, lam))
    return math.sqrt(value)


def _cumulants(spec, stat, method, nodes, refine):
    c1, c2 = cumulants_from_T(make_builder(spec, stat, method, nodes=nodes, refine=refine))
    p = spec.power
    return -c1 / p, 2.0 * c2 / p


def finite_moments(spec, stat, method="auto", nodes=None, check=True):
    """Mean and variance of sum_j F(x_j) from the lambda and lambda^2 coefficients of Tr T - 1/2 Tr T^2.

    Returns:
        MomentReport with method "finite-N determinant"; mean_error and variance_error are the changes
        under grid refinement (None when check is False)
    """
    resolved = resolve_method(spec, method)
    if stat.is_zero:
        return moment_report("finite-N determinant", 0.0, 0.0, ensemble=spec.to_dict(),
                             discretization=resolved, mean_error=0.0, variance_error=0.0)
    mean, variance = _cumulants(spec, stat, resolved, nodes, 1.0)
    mean_error = variance_error = None
    if check:
        fine_mean, fine_variance = _cumulants(spec, stat, resolved, nodes, REFINEMENT)
        mean_error = abs(fine_mean - mean)
        variance_error = abs(fine_variance - variance)
        mean, variance = fine_mean, fine_variance
    logger.debug("finite moments for %r: mean %r, variance %r" % (spec, mean, variance))
    return moment_report("finite-N determinant", mean, variance, ensemble=spec.to_dict(),
                         discretization=resolved, mean_error=mean_error, variance_error=variance_error)


def trace_log_mgf(lam, mean, variance):
    """G from the two-term trace-log expansion, exp(-lam mean + lam^2 variance / 2)."""
    return math.exp(-lam * mean + 0.5 * lam * lam * variance)
