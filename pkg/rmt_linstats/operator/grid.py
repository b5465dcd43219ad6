"""
Quadrature grids and the grid forms of the operators eps (integration against 1/2 sgn(x - y)) and
D (differentiation).

Legendre grids are composite: the interval is cut at breakpoints into panels, each carrying its own
Gauss-Legendre rule, optionally in the variable t with x = t^2 (which removes square-root endpoint
behaviour on the half line). Hermite and Laguerre grids are the classical Gauss rules with the weight
divided back out, so that every grid integrates plain dx.
"""
from __future__ import division

import logging
import math

import numpy as np
from scipy import special

from rmt_linstats.errors import DomainError

logger = logging.getLogger(__name__)

SCHEMES = ("legendre", "hermite", "laguerre")


class Panel(object):
    """A Gauss-Legendre panel [lo, hi] in the reference variable, owning nodes start:stop."""

    def __init__(self, lo, hi, start, stop):
        self.lo = lo
        self.hi = hi
        self.start = start
        self.stop = stop

    @property
    def half_width(self):
        return 0.5 * (self.hi - self.lo)

    def __repr__(self):
        return "Panel(%r, %r, %d:%d)" % (self.lo, self.hi, self.start, self.stop)


class QuadratureGrid(object):
    """Nodes and positive weights integrating dx over a (possibly truncated) domain.

    Attributes:
        nodes (ndarray): strictly increasing nodes in x
        weights (ndarray): weights for plain dx
        domain (tuple): the interval covered
        scheme (str): "legendre", "hermite" or "laguerre"
        panels (list): Panel objects (Legendre grids only)
        transform (str or None): None, or "square" when x = t^2
        reference_nodes (ndarray): nodes in the panel variable (t for the square map, else x)
    """

    def __init__(self, nodes, weights, domain, scheme, panels=None, transform=None,
                 reference_nodes=None, reference_weights=None, unit_nodes=None, unit_weights=None):
        self.nodes = np.asarray(nodes, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.domain = tuple(domain)
        self.scheme = scheme
        self.panels = panels or []
        self.transform = transform
        self.reference_nodes = self.nodes if reference_nodes is None else reference_nodes
        self.reference_weights = self.weights if reference_weights is None else reference_weights
        self._unit_nodes = unit_nodes or []
        self._unit_weights = unit_weights or []
        self._cache = {}

    def __len__(self):
        return self.nodes.size

    def __repr__(self):
        return "QuadratureGrid(scheme=%r, domain=%r, size=%d, panels=%d)" % (
            self.scheme, self.domain, self.nodes.size, len(self.panels))

    def integrate(self, values):
        return float(np.dot(self.weights, values))

    def same_as(self, other):
        return other is self or (other is not None and self.nodes.shape == other.nodes.shape and
                                 np.array_equal(self.nodes, other.nodes))

    def _require_panels(self, what):
        if self.scheme != "legendre":
            raise DomainError("%s needs a composite Legendre grid, not a %s grid" % (what, self.scheme))

    def cumulative_matrix(self):
        """C with (C g)_i = int_{domain start}^{x_i} g dx, exact for piecewise polynomials of degree < m."""
        if "cumulative" in self._cache:
            return self._cache["cumulative"]
        self._require_panels("the cumulative integral")
        size = self.nodes.size
        ref_w = self.reference_weights
        C = np.zeros((size, size))
        for index, panel in enumerate(self.panels):
            s = self._unit_nodes[index]
            w = self._unit_weights[index]
            m = s.size
            degrees = np.arange(m + 1)[:, None]
            P = special.eval_legendre(degrees, s[None, :])
            local = np.tile(0.5 * (s + 1.0)[:, None], (1, m))
            for k in range(1, m):
                local += 0.5 * np.outer(P[k + 1] - P[k - 1], P[k])
            local *= w[None, :] * panel.half_width
            C[panel.start:panel.stop, panel.start:panel.stop] = local
            C[panel.start:panel.stop, :panel.start] = ref_w[None, :panel.start]
        if self.transform == "square":
            C = C * (2.0 * self.reference_nodes)[None, :]
        self._cache["cumulative"] = C
        return C

    def eps_kernel(self, rule="spectral"):
        """Values e_ij with (eps g)(x_i) = sum_j e_ij w_j g_j; e is exactly antisymmetric."""
        key = ("eps_kernel", rule)
        if key in self._cache:
            return self._cache[key]
        w = self.weights
        if rule == "sign":
            kernel = 0.5 * np.sign(self.nodes[:, None] - self.nodes[None, :])
        elif rule == "spectral":
            E = self.cumulative_matrix() - 0.5 * w[None, :]
            A = w[:, None] * E
            A = 0.5 * (A - A.T)
            kernel = A / np.outer(w, w)
        else:
            raise DomainError("unknown eps rule %r" % (rule,))
        self._cache[key] = kernel
        return kernel

    def eps_matrix(self, rule=None):
        """The operator eps on grid values, weights on the right.

        The default rule is "spectral" on Legendre grids: the panel-wise cumulative integral, made
        exactly antisymmetric in the weighted inner product. "sign" uses 1/2 sgn(x_i - x_j) w_j with the
        self-node excluded, which is first-order accurate only; it is the default for the classical
        Hermite and Laguerre rules, which carry no panel structure.
        """
        if rule is None:
            rule = "spectral" if self.scheme == "legendre" else "sign"
        return self.eps_kernel(rule) * self.weights[None, :]

    def deriv_matrix(self):
        """Block-diagonal barycentric differentiation matrix (one block per panel)."""
        if "deriv" in self._cache:
            return self._cache["deriv"]
        self._require_panels("differentiation")
        size = self.nodes.size
        D = np.zeros((size, size))
        for index, panel in enumerate(self.panels):
            s = self._unit_nodes[index]
            w = self._unit_weights[index]
            bary = (-1.0) ** np.arange(s.size) * np.sqrt((1.0 - s * s) * w)
            diff = s[:, None] - s[None, :]
            np.fill_diagonal(diff, 1.0)
            local = (bary[None, :] / bary[:, None]) / diff
            np.fill_diagonal(local, 0.0)
            np.fill_diagonal(local, -local.sum(axis=1))
            D[panel.start:panel.stop, panel.start:panel.stop] = local / panel.half_width
        if self.transform == "square":
            D = D / (2.0 * self.reference_nodes)[:, None]
        self._cache["deriv"] = D
        return D


def _panel_edges(lo, hi, breakpoints):
    edges = [lo]
    for point in sorted(set(breakpoints or [])):
        if lo < point < hi and point - edges[-1] > 1e-12 * max(1.0, abs(point)):
            edges.append(float(point))
    if hi - edges[-1] <= 1e-12 * max(1.0, abs(hi)):
        edges.pop()
    edges.append(hi)
    return edges


def _legendre_grid(domain, n_nodes, breakpoints, transform):
    lo, hi = float(domain[0]), float(domain[1])
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise DomainError("a Legendre grid needs a finite (truncated) domain, got %r" % (domain,))
    if not lo < hi:
        raise DomainError("invalid domain %r" % (domain,))
    if transform == "square":
        if lo < 0:
            raise DomainError("the square map needs a domain inside [0, inf), got %r" % (domain,))
        ref_lo, ref_hi = math.sqrt(lo), math.sqrt(hi)
        ref_breaks = [math.sqrt(b) for b in (breakpoints or []) if b > 0]
    elif transform is None:
        ref_lo, ref_hi = lo, hi
        ref_breaks = breakpoints
    else:
        raise DomainError("unknown grid transform %r" % (transform,))

    edges = _panel_edges(ref_lo, ref_hi, ref_breaks)
    counts = n_nodes if isinstance(n_nodes, (list, tuple)) else [n_nodes] * (len(edges) - 1)
    if len(counts) != len(edges) - 1:
        raise DomainError("got %d node counts for %d panels" % (len(counts), len(edges) - 1))

    ref_nodes, ref_weights, panels, unit_nodes, unit_weights = [], [], [], [], []
    start = 0
    for (a, b), m in zip(zip(edges[:-1], edges[1:]), counts):
        m = int(m)
        if m < 2:
            raise DomainError("every panel needs at least 2 nodes, got %r" % (m,))
        s, w = special.roots_legendre(m)
        half = 0.5 * (b - a)
        ref_nodes.append(a + half * (s + 1.0))
        ref_weights.append(half * w)
        unit_nodes.append(s)
        unit_weights.append(w)
        panels.append(Panel(a, b, start, start + m))
        start += m
    t = np.concatenate(ref_nodes)
    wt = np.concatenate(ref_weights)
    if transform == "square":
        nodes, weights = t * t, 2.0 * t * wt
    else:
        nodes, weights = t, wt
    return QuadratureGrid(nodes, weights, (lo, hi), "legendre", panels=panels, transform=transform,
                          reference_nodes=t, reference_weights=wt,
                          unit_nodes=unit_nodes, unit_weights=unit_weights)


def make_grid(domain, n_nodes, scheme="legendre", breakpoints=None, transform=None):
    """Build a quadrature grid.

    Args:
        domain (tuple): (a, b); must be finite for the Legendre scheme
        n_nodes (int or list): nodes per panel (Legendre) or total nodes (Hermite, Laguerre)
        scheme (str): "legendre", "hermite" or "laguerre"
        breakpoints (list): interior panel boundaries in x (Legendre only)
        transform (str): None or "square" (Legendre only)

    Returns:
        QuadratureGrid
    """
    if scheme == "legendre":
        return _legendre_grid(domain, n_nodes, breakpoints, transform)
    if breakpoints or transform:
        raise DomainError("breakpoints and transforms apply to Legendre grids only")
    if int(n_nodes) < 2:
        raise DomainError("a grid needs at least 2 nodes, got %r" % (n_nodes,))
    if scheme == "hermite":
        x, w = special.roots_hermite(int(n_nodes))
        weights = np.exp(np.log(w) + x * x)
        return QuadratureGrid(x, weights, (-np.inf, np.inf), "hermite")
    elif scheme == "laguerre":
        x, w = special.roots_genlaguerre(int(n_nodes), 0.0)
        weights = np.exp(np.log(w) + x)
        return QuadratureGrid(x, weights, (0.0, np.inf), "laguerre")
    raise DomainError("Unknown quadrature scheme %r" % (scheme,))
