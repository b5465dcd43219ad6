"""
Numerical checks of the determinant identities behind the finite-N formulas: the confluent
Vandermonde determinant and the two de Bruijn integration formulas.
"""
from __future__ import division

import itertools
import logging
import math

import numpy as np

from rmt_linstats.errors import DomainError
from rmt_linstats.operator.grid import make_grid

logger = logging.getLogger(__name__)

MAX_VANDERMONDE_N = 6
MAX_DEBRUIJN_N = 2
KINDS = ("quaternion", "orthogonal")


def vandermonde4_det_check(points):
    """(det(x_k^j, j x_k^(j-1)), prod_{j<k} (x_j - x_k)^4) for the 2N x 2N confluent Vandermonde matrix,
    rows j = 0 .. 2N-1 and the column pairs (x_k^j, j x_k^(j-1)) for each point."""
    x = np.asarray(points, dtype=float).ravel()
    N = x.size
    if N < 1 or N > MAX_VANDERMONDE_N:
        raise DomainError("vandermonde4_det_check needs 1 <= N <= %d points, got %d" % (MAX_VANDERMONDE_N, N))
    j = np.arange(2 * N)[:, None]
    A = np.empty((2 * N, 2 * N))
    A[:, 0::2] = x[None, :] ** j
    with np.errstate(divide='ignore', invalid='ignore'):
        A[:, 1::2] = np.where(j > 0, j * x[None, :] ** np.maximum(j - 1, 0), 0.0)
    lhs = float(np.linalg.det(A))
    rhs = 1.0
    for a, b in itertools.combinations(range(N), 2):
        rhs *= (x[a] - x[b]) ** 4
    return lhs, float(rhs)


def default_grid(domain=(-12.0, 12.0), panels=12, nodes=40):
    """A composite Legendre grid for rapidly decaying integrands on the real line."""
    lo, hi = domain
    breaks = list(np.linspace(lo, hi, panels + 1)[1:-1])
    return make_grid(domain, nodes, breakpoints=breaks)


def _evaluate(functions, x):
    return np.array([np.broadcast_to(np.asarray(func(x), dtype=float), np.shape(x)) for func in functions])


def _quaternion(N, p, q, grid):
    if len(p) != 2 * N or len(q) != 2 * N:
        raise DomainError("the quaternion identity needs 2N = %d functions p_j and q_j, got %d and %d"
                          % (2 * N, len(p), len(q)))
    x, w = grid.nodes, grid.weights
    P, Q = _evaluate(p, x), _evaluate(q, x)
    antisym = (P * w).dot(Q.T) - (Q * w).dot(P.T)
    rhs = math.factorial(N) ** 2 * float(np.linalg.det(antisym))

    # integrand det(p_j(x_k), q_j(x_k)) on the N-fold tensor grid
    mesh = np.meshgrid(*([np.arange(x.size)] * N), indexing="ij")
    index = [m.ravel() for m in mesh]
    columns = []
    for k in range(N):
        columns.append(P[:, index[k]])
        columns.append(Q[:, index[k]])
    matrices = np.stack(columns, axis=1).transpose(2, 0, 1)
    weights = np.prod([w[i] for i in index], axis=0)
    lhs = float(np.dot(weights, np.linalg.det(matrices))) ** 2
    return lhs, rhs


def _orthogonal(N, p, grid):
    if N % 2:
        raise DomainError("the orthogonal identity needs an even N, got %d" % N)
    if len(p) != N:
        raise DomainError("the orthogonal identity needs N = %d functions p_j, got %d" % (N, len(p)))
    if grid.scheme != "legendre":
        raise DomainError("the orthogonal identity needs a composite Legendre grid")
    x, w = grid.nodes, grid.weights
    P = _evaluate(p, x)
    # int int sgn(y - x) p_j(x) p_k(y) dx dy = 2 int p_k eps(p_j)
    eps_P = grid.eps_matrix().dot(P.T).T
    rhs = float(np.linalg.det(2.0 * (eps_P * w).dot(P.T)))

    # ordered simplex x_1 < x_2 (N = 2) by cumulative integration
    upper = w[None, :] - grid.cumulative_matrix()
    ordered = P[0][:, None] * P[1][None, :] - P[1][:, None] * P[0][None, :]
    lhs = float(np.dot(w, np.sum(upper * ordered, axis=1))) ** 2
    return lhs, rhs


def debruijn_check(kind, N, p, q=None, grid=None):
    """Both sides of one of de Bruijn's integration identities.

    quaternion: (int det(p_j(x_k), q_j(x_k)) dx)^2 = (N!)^2 det(int (p_j q_k - p_k q_j) dx), with
        2N functions in each of p and q
    orthogonal: (int_{x_1 < .. < x_N} det(p_j(x_k)) dx)^2 = det(int int sgn(y - x) p_j(x) p_k(y) dx dy),
        with N functions in p and N even

    Args:
        kind (str): "quaternion" or "orthogonal"
        N (int): at most 2
        p, q (list): callables on arrays of points
        grid (QuadratureGrid): the one-dimensional rule (default: composite Legendre on [-12, 12])

    Returns:
        (lhs, rhs)
    """
    if kind not in KINDS:
        raise DomainError("Unknown de Bruijn identity %r" % (kind,))
    if int(N) != N or N < 1 or N > MAX_DEBRUIJN_N:
        raise DomainError("debruijn_check needs 1 <= N <= %d, got %r" % (MAX_DEBRUIJN_N, N))
    grid = default_grid() if grid is None else grid
    if kind == "quaternion":
        if q is None:
            raise DomainError("the quaternion identity needs the functions q_j")
        lhs, rhs = _quaternion(int(N), list(p), list(q), grid)
    else:
        lhs, rhs = _orthogonal(int(N), list(p), grid)
    logger.debug("de Bruijn %s identity, N=%d: lhs %r, rhs %r" % (kind, N, lhs, rhs))
    return lhs, rhs
