"""
The psi bases of the beta = 1, 4 ensembles, their skew Gram matrices M, and the 2,2 entry of the matrix
kernel, both as a Christoffel-Darboux closed form with a rank-one correction and as the finite sum over
the basis with coefficients mu = M^{-1}.

Bases, with phi, phi_tilde from the ensemble's orthonormal system:

    GSE  psi_{2j+1} = phi_{2j+1} / sqrt(2)   psi_{2j} = -eps(phi_{2j+1}) / sqrt(2)
    LSE  psi_{2j+1} = phi_{2j+1} / sqrt(2)   psi_{2j} = -eps(phi_tilde_{2j+1}) / sqrt(2)
    GOE  psi_{2n} = phi_{2n}                 psi_{2n+1} = phi_{2n}'
    LOE  psi_{2n} = phi_tilde_{2n}           psi_{2n+1} = phi_{2n}'
"""
from __future__ import division

import logging
import math

import numpy as np
from scipy import special

from rmt_linstats.errors import ResolutionError, UnsupportedEnsembleError
from rmt_linstats.operator.grid import QuadratureGrid, make_grid
from rmt_linstats.orthopoly import cd_kernel, system_for

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-6
_ROOT_HALF = math.sqrt(0.5)


def _require_skew_beta(spec):
    if spec.beta not in (1, 4):
        raise UnsupportedEnsembleError("%s has no psi basis; beta must be 1 or 4" % spec.name)


class PsiBasis(object):
    """Evaluators for psi_j, psi_j' (and eps psi_j for beta = 1), j = 0 .. size-1."""

    def __init__(self, spec):
        _require_skew_beta(spec)
        self.spec = spec
        self.size = 2 * spec.N if spec.beta == 4 else spec.N
        self.system = system_for(spec, self.size + 1)

    def __repr__(self):
        return "PsiBasis(%r)" % (self.spec,)

    def tables(self, x):
        """(psi, psi', eps psi) rows at the points x; eps psi is None for beta = 4."""
        spec, system = self.spec, self.system
        x = np.atleast_1d(np.asarray(x, dtype=float))
        size = self.size
        values = np.empty((size, x.size))
        derivs = np.empty((size, x.size))
        if spec.beta == 4:
            top = size - 1
            phi = system.phi_table(x, size)
            deriv = system.deriv_table(x, top, phi=phi) if spec.family == "gaussian" else system.deriv_table(x, top)
            if spec.family == "gaussian":
                eps_odd = system.eps_table(x, top, phi=phi)
                partner = phi
            else:
                eps_odd = system.eps_tilde_table(x, top, phi=phi)
                partner = system.phi_tilde_table(x, top)
            odd = np.arange(1, size, 2)
            values[odd] = _ROOT_HALF * phi[odd]
            values[odd - 1] = -_ROOT_HALF * eps_odd[odd]
            derivs[odd] = _ROOT_HALF * deriv[odd]
            derivs[odd - 1] = -_ROOT_HALF * partner[odd]
            return values, derivs, None

        top = size - 2
        even = np.arange(0, size, 2)
        phi = system.phi_table(x, top + 1)
        eps = np.empty((size, x.size))
        if spec.family == "gaussian":
            deriv = system.deriv_table(x, top, phi=phi)
            second = system.second_deriv_table(x, top, phi=phi)
            values[even] = phi[even]
            derivs[even] = deriv[even]
            eps[even] = system.eps_table(x, top, phi=phi)[even]
        else:
            deriv = system.deriv_table(x, top)
            second = system.second_deriv_table(x, top)
            values[even] = system.phi_tilde_table(x, top)[even]
            derivs[even] = system.tilde_deriv_table(x, top)[even]
            eps[even] = system.eps_tilde_table(x, top, phi=phi)[even]
        values[even + 1] = deriv[even]
        derivs[even + 1] = second[even]
        eps[even + 1] = phi[even]
        return values, derivs, eps

    def psi(self, j, x):
        return self.tables(x)[0][j]

    def psi_deriv(self, j, x):
        return self.tables(x)[1][j]


def build_psi(spec):
    return PsiBasis(spec)


def _gram_grid(spec, size):
    """A quadrature rule for the Gram integrals of the psi basis."""
    n = size + 8
    if spec.beta == 4:
        if spec.family == "gaussian":
            return make_grid(None, n, scheme="hermite")
        gamma = spec.alpha - 1.0
        x, w = special.roots_genlaguerre(n, gamma)
        weights = np.exp(np.log(w) - gamma * np.log(x) + x)
        return QuadratureGrid(x, weights, (0.0, np.inf), "laguerre")
    maxdeg = size + 1
    if spec.family == "gaussian":
        R = max(10.0, math.sqrt(2.0 * maxdeg) + 6.0)
        panels = int(math.ceil(2.0 * R / 3.0))
        return make_grid((-R, R), 48, breakpoints=list(np.linspace(-R, R, panels + 1)[1:-1]))
    a = spec.alpha + 1.0
    T = math.sqrt(4.0 * maxdeg + 2.0 * abs(a) + 60.0)
    panels = int(math.ceil(T / 1.5))
    breaks = [t * t for t in np.linspace(0.0, T, panels + 1)[1:-1]]
    return make_grid((0.0, T * T), 48, breakpoints=breaks, transform="square")


def build_M(spec):
    """The skew Gram matrix of the psi basis.

    beta = 4: M_jk = int (psi_j psi_k' - psi_j' psi_k) dx, by Gauss-Hermite or generalized
    Gauss-Laguerre rules exact for the polynomial parts. beta = 1: M_jk = int psi_j eps(psi_k) dx on a
    composite Legendre grid.

    Raises:
        ResolutionError: when M deviates from antisymmetry by more than 1e-6
    """
    basis = build_psi(spec)
    grid = _gram_grid(spec, basis.size)
    values, derivs, eps = basis.tables(grid.nodes)
    w = grid.weights
    if spec.beta == 4:
        M = (values * w).dot(derivs.T) - (derivs * w).dot(values.T)
    else:
        M = (values * w).dot(eps.T)
    violation = float(np.max(np.abs(M + M.T))) if M.size else 0.0
    logger.debug("M for %r: size %d, symmetry violation %.3g" % (spec, M.shape[0], violation))
    if violation > SYMMETRY_TOLERANCE:
        raise ResolutionError("M for %s is not antisymmetric (violation %.3g); quadrature is under-resolved"
                              % (spec.name, violation))
    return M


def canonical_M(size):
    """Block-diagonal antisymmetric matrix with blocks [[0, 1], [-1, 0]]."""
    M = np.zeros((size, size))
    for i in range(0, size - 1, 2):
        M[i, i + 1] = 1.0
        M[i + 1, i] = -1.0
    return M


class K22Kernel(object):
    """scale * S_N(x, y) + coefficient * u(x) v(y).

    Attributes:
        cd: the KernelClosure for S_N
        scale (float): 1/2 for beta = 4, 1 for beta = 1
        correction (tuple): (u, v, coefficient) with u, v callables on arrays of points
    """

    def __init__(self, spec, cd, scale, u, v, coefficient):
        self.spec = spec
        self.cd = cd
        self.scale = scale
        self.correction = (u, v, coefficient)

    def __repr__(self):
        return "K22Kernel(%r)" % (self.spec,)

    def rank_one_part(self, x, y):
        u, v, coefficient = self.correction
        return coefficient * u(x) * v(y)

    def __call__(self, x, y):
        x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        xf, yf = x_arr.ravel(), y_arr.ravel()
        values = self.scale * self.cd(xf, yf) + self.rank_one_part(xf, yf)
        if not x_arr.shape:
            return float(values[0])
        return values.reshape(x_arr.shape)

    def matrix(self, x, y=None):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = x if y is None else np.atleast_1d(np.asarray(y, dtype=float))
        u, v, coefficient = self.correction
        return self.scale * self.cd.matrix(x, y) + coefficient * np.outer(u(x), v(y))


def k22_kernel(spec):
    """The closed form of the 2,2 kernel entry for a beta = 1, 4 ensemble.

    GSE: 1/2 [S_N + sqrt(N + 1/2) eps(phi_{2N+1}) (x) phi_{2N}]
    LSE: 1/2 S_N - 1/2 sqrt((N + 1/2)(N + alpha/2)) eps(phi_tilde_{2N+1}) (x) phi_tilde_{2N}
    GOE: S_N + sqrt(N/2) eps(phi_N) (x) phi_{N-1}
    LOE: S_N - 1/2 sqrt(N (N + alpha + 1)) eps(phi_tilde_N) (x) phi_tilde_{N-1}
    """
    _require_skew_beta(spec)
    N = spec.N
    cd = cd_kernel(spec)
    if spec.beta == 4:
        top, scale = 2 * N + 1, 0.5
    else:
        top, scale = N, 1.0
    system = system_for(spec, top + 1)

    if spec.family == "gaussian":
        coefficient = 0.5 * math.sqrt(N + 0.5) if spec.beta == 4 else math.sqrt(N / 2.0)

        def u(points):
            return system.eps_table(points, top)[top]

        def v(points):
            return system.phi_table(points, top - 1)[top - 1]
    else:
        if spec.beta == 4:
            coefficient = -0.5 * math.sqrt((N + 0.5) * (N + 0.5 * spec.alpha))
        else:
            coefficient = -0.5 * math.sqrt(N * (N + spec.alpha + 1.0))

        def u(points):
            return system.eps_tilde_table(points, top)[top]

        def v(points):
            return system.phi_tilde_table(points, top - 1)[top - 1]

    return K22Kernel(spec, cd, scale, u, v, coefficient)


def mu_sum_kernel(spec, M=None):
    """The 2,2 kernel entry from the basis: -sum psi_j mu_jk psi_k' (beta = 4) or
    sum mu_jk eps(psi_j) psi_k (beta = 1), with mu = M^{-1}.

    Returns:
        callable(x, y) -> matrix of kernel values on the outer grid of x and y
    """
    basis = build_psi(spec)
    if M is None:
        M = build_M(spec)
    mu = np.linalg.inv(M)

    def matrix(x, y):
        px, dx, ex = basis.tables(x)
        py, dy, _ = basis.tables(y)
        if spec.beta == 4:
            return -px.T.dot(mu).dot(dy)
        return ex.T.dot(mu).dot(py)

    return matrix


def finite_rank_factors(spec, points):
    """Factors of K = sum_k L_k (x) R_k with canonical M, and eps R_k.

    Returns:
        (L, R, eps_R) arrays of shape (rank, len(points)); eps_R is None for beta = 2
    """
    points = np.atleast_1d(np.asarray(points, dtype=float))
    N = spec.N
    if spec.beta == 2:
        system = system_for(spec, N)
        if spec.family == "gaussian":
            table = system.phi_table(points, N - 1)
        else:
            table = system.chi_table(points, N - 1)
        return table, table, None

    if spec.beta == 4:
        top = 2 * N - 1
        index = np.arange(1, 2 * N, 2)
        half = 0.5
    else:
        top = N - 2
        index = np.arange(0, N, 2)
        half = 1.0
    system = system_for(spec, top + 2)
    phi = system.phi_table(points, top + 1)
    if spec.family == "gaussian":
        deriv = system.deriv_table(points, top, phi=phi)
        eps = system.eps_table(points, top, phi=phi)
        partner = phi
    else:
        deriv = system.deriv_table(points, top)
        eps = system.eps_tilde_table(points, top, phi=phi)
        partner = system.phi_tilde_table(points, top)

    L = np.vstack([half * phi[index], -half * eps[index]])
    R = np.vstack([partner[index], deriv[index]])
    eps_R = np.vstack([eps[index], phi[index]])
    return L, R, eps_R


def edge_factors(spec):
    """L_k(0) and int_0^inf R_k for the LOE factors of finite_rank_factors.

    int phi_j' vanishes because phi_j is zero at both ends; int phi_tilde_j = -2 eps(phi_tilde_j)(0).
    """
    if spec.family != "laguerre" or spec.beta != 1:
        raise UnsupportedEnsembleError("edge factors are only needed for LOE, got %s" % spec.name)
    top = spec.N - 2
    index = np.arange(0, spec.N, 2)
    system = system_for(spec, top + 2)
    zero = np.zeros(1)
    phi = system.phi_table(zero, top + 1)
    eps = system.eps_tilde_table(zero, top, phi=phi)
    L_edge = np.concatenate([phi[index, 0], -eps[index, 0]])
    R_total = np.concatenate([-2.0 * eps[index, 0], np.zeros(index.size)])
    return L_edge, R_total
