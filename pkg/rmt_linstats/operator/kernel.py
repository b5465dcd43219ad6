"""
Discretized integral operators.

A KernelMatrix stores the Nystrom operator: entries K(x_i, x_j) w_j, weights on the right, so that
det(I + T) and Tr T read literally. A KernelMatrix without a grid lives in coefficient space (a plain
r x r matrix, as produced by finite-rank reductions).
"""
from __future__ import division

import logging
import warnings

import numpy as np
from scipy import linalg

from rmt_linstats.errors import DomainError, NumericalError

logger = logging.getLogger(__name__)

SINGULAR_DET = 1e-300


def _check_same_grid(a, b):
    if a is None and b is None:
        return
    if a is None or b is None or not a.same_as(b):
        raise DomainError("operands live on different grids")


class GridFunction(object):
    """Values of a function at the nodes of a grid, optionally with its exact derivative values."""

    def __init__(self, grid, values, derivative=None):
        values = np.asarray(values, dtype=float)
        if values.shape != (len(grid),):
            raise DomainError("expected %d values, got shape %r" % (len(grid), values.shape))
        self.grid = grid
        self.values = values
        self.derivative = None if derivative is None else np.asarray(derivative, dtype=float)

    @classmethod
    def from_callable(cls, grid, func, derivative=None):
        values = func(grid.nodes)
        deriv = None if derivative is None else derivative(grid.nodes)
        return cls(grid, values, deriv)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            _check_same_grid(self.grid, other.grid)
            deriv = None
            if self.derivative is not None and other.derivative is not None:
                deriv = self.derivative * other.values + self.values * other.derivative
            return GridFunction(self.grid, self.values * other.values, deriv)
        deriv = None if self.derivative is None else other * self.derivative
        return GridFunction(self.grid, other * self.values, deriv)

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        deriv = None
        if self.derivative is not None and other.derivative is not None:
            deriv = self.derivative + other.derivative
        return GridFunction(self.grid, self.values + other.values, deriv)

    def __sub__(self, other):
        return self + (-1.0) * other

    def integral(self):
        return self.grid.integrate(self.values)


def apply_eps(g, rule=None):
    """(eps g)(x_i) = 1/2 (int_{x < x_i} g - int_{x > x_i} g); the result's derivative is g itself."""
    values = g.grid.eps_matrix(rule).dot(g.values)
    return GridFunction(g.grid, values, derivative=g.values)


def apply_deriv(g):
    """Derivative on the grid: the exact derivative when g carries one, otherwise spectral."""
    if g.derivative is not None:
        return GridFunction(g.grid, g.derivative)
    return GridFunction(g.grid, g.grid.deriv_matrix().dot(g.values))


class KernelMatrix(object):
    """Operator matrix T with entries K(x_i, x_j) w_j (or a plain matrix when grid is None)."""

    def __init__(self, grid, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DomainError("a kernel matrix must be square, got shape %r" % (matrix.shape,))
        if grid is not None and matrix.shape[0] != len(grid):
            raise DomainError("matrix of size %d does not match grid of size %d" % (matrix.shape[0], len(grid)))
        if not np.all(np.isfinite(matrix)):
            raise NumericalError("kernel matrix has non-finite entries")
        self.grid = grid
        self.matrix = matrix

    @classmethod
    def from_kernel(cls, grid, kernel_values):
        """Wrap kernel values K(x_i, x_j) by attaching the weights on the right."""
        return cls(grid, np.asarray(kernel_values, dtype=float) * grid.weights[None, :])

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((len(grid), len(grid))))

    @property
    def kernel_values(self):
        if self.grid is None:
            return self.matrix
        return self.matrix / self.grid.weights[None, :]

    @property
    def size(self):
        return self.matrix.shape[0]

    def __repr__(self):
        return "KernelMatrix(size=%d, grid=%r)" % (self.size, self.grid)

    def dot(self, other):
        """Composition (self other)(x, y) = int self(x, z) other(z, y) dz."""
        _check_same_grid(self.grid, other.grid)
        return KernelMatrix(self.grid, self.matrix.dot(other.matrix))

    def __matmul__(self, other):
        return self.dot(other)

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        return KernelMatrix(self.grid, self.matrix + other.matrix)

    def __sub__(self, other):
        _check_same_grid(self.grid, other.grid)
        return KernelMatrix(self.grid, self.matrix - other.matrix)

    def __mul__(self, scalar):
        return KernelMatrix(self.grid, scalar * self.matrix)

    __rmul__ = __mul__

    def apply(self, g):
        _check_same_grid(self.grid, g.grid)
        return GridFunction(g.grid, self.matrix.dot(g.values))

    def transpose(self):
        """The operator with kernel K(y, x)."""
        if self.grid is None:
            return KernelMatrix(None, self.matrix.T)
        w = self.grid.weights
        return KernelMatrix(self.grid, self.matrix.T * w[None, :] / w[:, None])

    def trace(self):
        return float(np.trace(self.matrix))

    def fredholm_det(self):
        return fredholm_det(self)


def rank_one(u, v):
    """The operator with kernel u(x) v(y)."""
    _check_same_grid(u.grid, v.grid)
    return KernelMatrix(u.grid, np.outer(u.values, v.values * u.grid.weights))


def fredholm_det(T):
    """det(I + T) by pivoted LU factorization.

    Warns when |det| < 1e-300 and raises NumericalError when the determinant is not finite.
    """
    matrix = T.matrix if isinstance(T, KernelMatrix) else np.asarray(T, dtype=float)
    size = matrix.shape[0]
    if size == 0:
        return 1.0
    lu, piv = linalg.lu_factor(np.eye(size) + matrix, check_finite=True)
    diagonal = np.diag(lu)
    swaps = np.count_nonzero(piv != np.arange(size))
    sign = -1.0 if swaps % 2 else 1.0
    with np.errstate(divide='ignore'):
        log_abs = float(np.sum(np.log(np.abs(diagonal))))
    sign *= np.prod(np.sign(diagonal))
    if log_abs > 700:
        raise NumericalError("Fredholm determinant overflowed (log |det| = %r)" % log_abs)
    det = float(sign * np.exp(log_abs))
    if abs(det) < SINGULAR_DET:
        warnings.warn("Fredholm determinant %r is singular to working precision" % det)
    return det


class Symbol(object):
    """The multiplication-plus-eps operator P = m - sum_k c_k q_k eps p_k.

    q_k = None stands for the identity, so that the term reads c_k eps p_k. An edge term (c, q, mass)
    is eps acting on a point mass at the left end of a half-line support: it adds
    -c q(y) mass h(edge) / 2 to (P h)(y), because eps(y, edge) = 1/2 for every y past the edge.

    Args:
        multiplier (ndarray): m at the grid nodes
        eps_terms (list): (c, q or None, p) triples with q, p at the grid nodes
        edge_terms (list): (c, q or None, mass) triples with q at the grid nodes and a scalar mass
    """

    def __init__(self, multiplier, eps_terms=None, edge_terms=None):
        self.multiplier = np.asarray(multiplier, dtype=float)
        self.eps_terms = list(eps_terms or [])
        self.edge_terms = list(edge_terms or [])

    def __add__(self, other):
        if other is None:
            return self
        return Symbol(self.multiplier + other.multiplier, self.eps_terms + other.eps_terms,
                      self.edge_terms + other.edge_terms)

    __radd__ = __add__

    def on_grid(self, grid, rule=None):
        """Dense n x n matrix of P on the grid."""
        P = np.diag(self.multiplier)
        if self.eps_terms:
            E = grid.eps_matrix(rule)
            for c, q, p in self.eps_terms:
                term = E * p[None, :]
                if q is not None:
                    term = q[:, None] * term
                P = P - c * term
        return P

    def edge_column(self):
        """The function multiplying h(edge) in P h, or None without edge terms."""
        if not self.edge_terms:
            return None
        column = np.zeros_like(self.multiplier)
        for c, q, mass in self.edge_terms:
            column = column - 0.5 * c * mass * (1.0 if q is None else q)
        return column


class TBuilder(object):
    """lambda -> T(lambda) = K P(f_lambda, f_lambda') with f_lambda = exp(-lambda F) - 1.

    On a half line where F does not vanish at the edge, f' carries the point mass f(edge) delta_edge.
    Giving F_edge switches it on; the symbol callables then receive the mass as a third argument.

    Args:
        apply_kernel: callable(Symbol) -> KernelMatrix, the map P -> K P
        linear: callable(f, fp[, edge]) -> Symbol, the part of P linear in f
        quadratic: callable(f, fp[, edge]) -> Symbol or None, the part quadratic in f (or None)
        F, Fp (ndarray): the statistic and its derivative at the nodes the symbols are built on
        F_edge (float): the statistic at the edge of a half-line support, or None
    """

    def __init__(self, apply_kernel, linear, quadratic, F, Fp, F_edge=None):
        self.apply_kernel = apply_kernel
        self.linear = linear
        self.quadratic = quadratic
        self.F = np.asarray(F, dtype=float)
        self.Fp = np.asarray(Fp, dtype=float)
        self.F_edge = None if F_edge is None else float(F_edge)

    def _part(self, part, f, fp, edge):
        if self.F_edge is None:
            return part(f, fp)
        return part(f, fp, edge)

    def symbol(self, lam):
        damp = np.exp(-lam * self.F)
        f = np.expm1(-lam * self.F)
        fp = -lam * self.Fp * damp
        edge = None if self.F_edge is None else float(np.expm1(-lam * self.F_edge))
        symbol = self._part(self.linear, f, fp, edge)
        if self.quadratic is not None:
            symbol = symbol + self._part(self.quadratic, f, fp, edge)
        return symbol

    def __call__(self, lam):
        return self.apply_kernel(self.symbol(lam))

    def coefficients(self):
        """(T1, T2) with T(lambda) = lambda T1 + lambda^2 T2 + O(lambda^3).

        f = -lambda F + lambda^2 F^2 / 2 and f' = -lambda F' + lambda^2 F F' to second order; the edge
        mass f(edge) expands like f.
        """
        F, Fp = self.F, self.Fp
        F0 = 0.0 if self.F_edge is None else self.F_edge
        T1 = self.apply_kernel(self._part(self.linear, -F, -Fp, -F0))
        second = self._part(self.linear, 0.5 * F * F, F * Fp, 0.5 * F0 * F0)
        if self.quadratic is not None:
            second = second + self._part(self.quadratic, F, Fp, F0)
        T2 = self.apply_kernel(second)
        return T1, T2


def cumulants_from_T(builder, order=2):
    """lambda and lambda^2 coefficients of Tr T - 1/2 Tr T^2.

    Returns:
        (c1, c2): c1 = Tr T1 and c2 = Tr T2 - 1/2 Tr T1^2 (None when order is 1)
    """
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2, got %r" % (order,))
    T1, T2 = builder.coefficients()
    c1 = T1.trace()
    if order == 1:
        return c1, None
    c2 = T2.trace() - 0.5 * float(np.sum(T1.matrix * T1.matrix.T))
    return c1, c2
