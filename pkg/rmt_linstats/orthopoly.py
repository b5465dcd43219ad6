"""
Weighted orthonormal function systems and the kernels built from them.

HermiteSystem evaluates phi_j(x) = H_j(x) e^{-x^2/2} / (pi^{1/4} 2^{j/2} sqrt(j!)) and LaguerreSystem
evaluates, for a parameter a > -1,

    chi_j(x)        = L_j^{(a)}(x) x^{a/2} e^{-x/2} / sqrt(Gamma(j+a+1)/j!)
    phi_j(x)        = sqrt(x) chi_j(x)
    phi_tilde_j(x)  = chi_j(x) / sqrt(x)

so that int phi_j phi_tilde_k dx = delta_jk. The square root of the weight is folded into the start of
the three-term recurrence, and the recurrence is carried in a mantissa/log-scale pair so that degrees in
the thousands neither overflow nor underflow.
"""
from __future__ import division

import logging
import math

import numpy as np
from scipy import special

from rmt_linstats.errors import DomainError, UnsupportedEnsembleError

logger = logging.getLogger(__name__)

RESCALE_THRESHOLD = 1e150
LOG_RESCALE = math.log(RESCALE_THRESHOLD)
DIAGONAL_THRESHOLD = 1e-7

_PI_MINUS_QUARTER = math.pi ** -0.25


def _as_points(x):
    return np.atleast_1d(np.asarray(x, dtype=float)).ravel()


def _rescale(prev, cur, log_scale):
    big = np.abs(cur) > RESCALE_THRESHOLD
    if np.any(big):
        prev[big] /= RESCALE_THRESHOLD
        cur[big] /= RESCALE_THRESHOLD
        log_scale[big] += LOG_RESCALE


def _log_power(x, exponent):
    """exponent * log(x) with the conventions 0 * log 0 = 0 and +-inf otherwise at x = 0."""
    with np.errstate(divide='ignore', invalid='ignore'):
        values = exponent * np.log(x)
    if exponent == 0:
        values = np.where(x == 0, 0.0, values)
    return values


class HermiteSystem(object):
    """Hermite functions phi_0 .. phi_max_degree, orthonormal on the real line."""

    family = "gaussian"
    support = (-np.inf, np.inf)

    def __init__(self, max_degree):
        if max_degree < 0 or int(max_degree) != max_degree:
            raise DomainError("max_degree must be a nonnegative integer, got %r" % (max_degree,))
        self.max_degree = int(max_degree)

    def __repr__(self):
        return "HermiteSystem(max_degree=%d)" % self.max_degree

    def _check_degree(self, j, limit=None):
        limit = self.max_degree if limit is None else limit
        if j < 0 or j > limit or int(j) != j:
            raise DomainError("degree %r out of range [0, %d]" % (j, limit))

    def phi_table(self, x, degree):
        """Rows phi_0 .. phi_degree evaluated at the points x; shape (degree + 1, len(x))."""
        x = _as_points(x)
        table = np.empty((degree + 1, x.size))
        half_square = 0.5 * x * x
        log_scale = np.zeros_like(x)
        prev = np.zeros_like(x)
        cur = np.full_like(x, _PI_MINUS_QUARTER)
        table[0] = cur * np.exp(-half_square)
        for j in range(degree):
            nxt = math.sqrt(2.0 / (j + 1)) * x * cur - math.sqrt(j / (j + 1)) * prev
            prev, cur = cur, nxt
            _rescale(prev, cur, log_scale)
            table[j + 1] = cur * np.exp(log_scale - half_square)
        return table

    def deriv_table(self, x, degree, phi=None):
        """Rows phi_0' .. phi_degree' from phi_j' = sqrt(j/2) phi_{j-1} - sqrt((j+1)/2) phi_{j+1}."""
        if phi is None or phi.shape[0] < degree + 2:
            phi = self.phi_table(x, degree + 1)
        table = np.empty((degree + 1, phi.shape[1]))
        for j in range(degree + 1):
            value = -math.sqrt((j + 1) / 2.0) * phi[j + 1]
            if j > 0:
                value = value + math.sqrt(j / 2.0) * phi[j - 1]
            table[j] = value
        return table

    def second_deriv_table(self, x, degree, phi=None):
        """Rows phi_j'' = (x^2 - 2j - 1) phi_j."""
        x = _as_points(x)
        if phi is None:
            phi = self.phi_table(x, degree)
        j = np.arange(degree + 1)[:, None]
        return (x[None, :] ** 2 - 2 * j - 1) * phi[:degree + 1]

    def eps_table(self, x, degree, variant="plain", phi=None):
        """Rows eps(phi_j)(x) = 1/2 (int_{-inf}^x - int_x^inf) phi_j, j = 0 .. degree.

        eps(phi_0) is an error function, eps(phi_1) = -sqrt(2) phi_0, and the rest follow from applying
        eps to the derivative identity, which needs only the phi table.
        """
        if variant != "plain":
            raise DomainError("the Hermite system has no %r eps variant" % (variant,))
        x = _as_points(x)
        if phi is None or phi.shape[0] < degree + 1:
            phi = self.phi_table(x, degree)
        table = np.empty((degree + 1, x.size))
        table[0] = _PI_MINUS_QUARTER * math.sqrt(math.pi / 2.0) * special.erf(x / math.sqrt(2.0))
        if degree >= 1:
            table[1] = -math.sqrt(2.0) * phi[0]
        for j in range(1, degree):
            table[j + 1] = (math.sqrt(j / 2.0) * table[j - 1] - phi[j]) / math.sqrt((j + 1) / 2.0)
        return table

    def phi(self, j, x):
        self._check_degree(j)
        return _unwrap(self.phi_table(x, j)[j], x)

    def phi_deriv(self, j, x):
        self._check_degree(j, self.max_degree - 1)
        return _unwrap(self.deriv_table(x, j)[j], x)

    def eps(self, j, x, variant="plain"):
        self._check_degree(j)
        return _unwrap(self.eps_table(x, j, variant)[j], x)


class LaguerreSystem(object):
    """Laguerre functions for the parameter a > -1.

    Instantiated with a = alpha - 1 for the symplectic Laguerre ensemble, a = alpha + 1 for the
    orthogonal one and a = alpha for the unitary one.
    """

    family = "laguerre"
    support = (0.0, np.inf)

    def __init__(self, parameter, max_degree):
        if not parameter > -1:
            raise DomainError("the Laguerre parameter must exceed -1, got %r" % (parameter,))
        if max_degree < 0 or int(max_degree) != max_degree:
            raise DomainError("max_degree must be a nonnegative integer, got %r" % (max_degree,))
        self.parameter = float(parameter)
        self.max_degree = int(max_degree)
        self._log_norm0 = -0.5 * special.gammaln(self.parameter + 1.0)

    def __repr__(self):
        return "LaguerreSystem(parameter=%r, max_degree=%d)" % (self.parameter, self.max_degree)

    def _check_degree(self, j, limit=None):
        limit = self.max_degree if limit is None else limit
        if j < 0 or j > limit or int(j) != j:
            raise DomainError("degree %r out of range [0, %d]" % (j, limit))

    def _check_points(self, x):
        x = _as_points(x)
        if np.any(x < 0):
            raise DomainError("Laguerre functions are defined on x >= 0")
        return x

    def _polynomial_table(self, x, degree):
        """Mantissas and log-scales of the normalized polynomial parts."""
        a = self.parameter
        mantissa = np.empty((degree + 1, x.size))
        scales = np.empty((degree + 1, x.size))
        log_scale = np.zeros_like(x)
        prev = np.zeros_like(x)
        cur = np.ones_like(x)
        mantissa[0] = cur
        scales[0] = log_scale
        for j in range(degree):
            nxt = ((2 * j + a + 1 - x) * cur - math.sqrt(j * (j + a)) * prev) / math.sqrt((j + 1) * (j + a + 1))
            prev, cur = cur, nxt
            _rescale(prev, cur, log_scale)
            mantissa[j + 1] = cur
            scales[j + 1] = log_scale
        return mantissa, scales

    def _table(self, x, degree, shift):
        """Rows x^shift chi_j(x) for j = 0 .. degree."""
        x = self._check_points(x)
        mantissa, scales = self._polynomial_table(x, degree)
        log_envelope = _log_power(x, 0.5 * self.parameter + shift) - 0.5 * x + self._log_norm0
        with np.errstate(over='ignore', invalid='ignore'):
            table = mantissa * np.exp(scales + log_envelope[None, :])
        return table

    def chi_table(self, x, degree):
        return self._table(x, degree, 0.0)

    def phi_table(self, x, degree):
        return self._table(x, degree, 0.5)

    def phi_tilde_table(self, x, degree):
        return self._table(x, degree, -0.5)

    def _ladder(self, table, degree):
        """Rows 1/2 sqrt((j+1)(j+a+1)) t_{j+1} - 1/2 sqrt(j(j+a)) t_{j-1}."""
        a = self.parameter
        out = np.empty((degree + 1, table.shape[1]))
        for j in range(degree + 1):
            value = 0.5 * math.sqrt((j + 1) * (j + a + 1)) * table[j + 1]
            if j > 0:
                value = value - 0.5 * math.sqrt(j * (j + a)) * table[j - 1]
            out[j] = value
        return out

    def deriv_table(self, x, degree):
        """Rows phi_j' = 1/2 sqrt((j+1)(j+a+1)) phi_tilde_{j+1} - 1/2 sqrt(j(j+a)) phi_tilde_{j-1}."""
        return self._ladder(self.phi_tilde_table(x, degree + 1), degree)

    def chi_deriv_table(self, x, degree, chi=None):
        x = self._check_points(x)
        if chi is None or chi.shape[0] < degree + 2:
            chi = self.chi_table(x, degree + 1)
        with np.errstate(divide='ignore', invalid='ignore'):
            return (self._ladder(chi, degree) - 0.5 * chi[:degree + 1]) / x[None, :]

    def tilde_deriv_table(self, x, degree):
        """Rows phi_tilde_j' = chi_j' / sqrt(x) - chi_j / (2 x^{3/2})."""
        x = self._check_points(x)
        chi = self.chi_table(x, degree + 1)
        chi_prime = self.chi_deriv_table(x, degree, chi)
        with np.errstate(divide='ignore', invalid='ignore'):
            root = np.sqrt(x)[None, :]
            return chi_prime / root - 0.5 * chi[:degree + 1] / (root ** 3)

    def second_deriv_table(self, x, degree):
        """Rows phi_j'' obtained by differentiating the ladder form of phi_j'."""
        a = self.parameter
        tilde_prime = self.tilde_deriv_table(x, degree + 1)
        out = np.empty((degree + 1, tilde_prime.shape[1]))
        for j in range(degree + 1):
            value = 0.5 * math.sqrt((j + 1) * (j + a + 1)) * tilde_prime[j + 1]
            if j > 0:
                value = value - 0.5 * math.sqrt(j * (j + a)) * tilde_prime[j - 1]
            out[j] = value
        return out

    def eps_tilde_table(self, x, degree, phi=None):
        """Rows eps(phi_tilde_j)(x) = int_0^x phi_tilde_j - 1/2 int_0^inf phi_tilde_j.

        The j = 0 row is a regularized incomplete gamma function; the rest follow from applying eps to
        the derivative identity, which vanishes at both endpoints because a > -1.
        """
        a = self.parameter
        x = self._check_points(x)
        if phi is None or phi.shape[0] < degree + 1:
            phi = self.phi_table(x, degree)
        s = 0.5 * (a + 1.0)
        total = math.exp(s * math.log(2.0) + special.gammaln(s) + self._log_norm0)
        table = np.empty((degree + 1, x.size))
        table[0] = total * (special.gammainc(s, 0.5 * x) - 0.5)
        if degree >= 1:
            table[1] = 2.0 * phi[0] / math.sqrt(a + 1.0)
        for j in range(1, degree):
            table[j + 1] = (2.0 * phi[j] + math.sqrt(j * (j + a)) * table[j - 1]) / math.sqrt((j + 1) * (j + a + 1))
        return table

    def phi_total(self, degree):
        """int_0^inf phi_j for j = 0 .. degree by generalized Gauss-Laguerre quadrature in u = x/2."""
        a = self.parameter
        gamma = 0.5 * (a + 1.0)
        n_nodes = degree + 20
        nodes, weights = special.roots_genlaguerre(n_nodes, gamma)
        x = 2.0 * nodes
        mantissa, scales = self._polynomial_table(x, degree)
        with np.errstate(divide='ignore'):
            log_w = np.log(weights)
        log_factor = (gamma + 1.0) * math.log(2.0) + self._log_norm0
        return np.sum(mantissa * np.exp(scales + log_w[None, :] + log_factor), axis=1)

    def eps_plain_table(self, x, degree, n_nodes=None):
        """Rows eps(phi_j)(x) = int_0^x phi_j - 1/2 int_0^inf phi_j.

        No closed recurrence exists for this variant; the partial integrals use a Gauss-Legendre rule
        in t = sqrt(x), which absorbs the endpoint behaviour of sqrt(x) chi_j.
        """
        x = self._check_points(x)
        n_nodes = n_nodes or (2 * degree + 40)
        t, w = special.roots_legendre(n_nodes)
        root = np.sqrt(x)
        u = 0.5 * (t + 1.0)
        inner_t = root[:, None] * u[None, :]
        inner_w = (0.5 * w)[None, :] * root[:, None] * 2.0 * inner_t
        values = self.phi_table(inner_t.ravel() ** 2, degree).reshape(degree + 1, x.size, n_nodes)
        partial = np.sum(values * inner_w[None, :, :], axis=2)
        return partial - 0.5 * self.phi_total(degree)[:, None]

    def eps_table(self, x, degree, variant="plain", phi=None):
        if variant == "tilde":
            return self.eps_tilde_table(x, degree, phi)
        elif variant == "plain":
            return self.eps_plain_table(x, degree)
        raise DomainError("unknown eps variant %r" % (variant,))

    def phi(self, j, x):
        self._check_degree(j)
        return _unwrap(self.phi_table(x, j)[j], x)

    def phi_tilde(self, j, x):
        self._check_degree(j)
        return _unwrap(self.phi_tilde_table(x, j)[j], x)

    def chi(self, j, x):
        self._check_degree(j)
        return _unwrap(self.chi_table(x, j)[j], x)

    def phi_deriv(self, j, x):
        self._check_degree(j, self.max_degree - 1)
        return _unwrap(self.deriv_table(x, j)[j], x)

    def eps(self, j, x, variant="tilde"):
        self._check_degree(j)
        return _unwrap(self.eps_table(x, j, variant)[j], x)


def _unwrap(values, like):
    if np.ndim(like) == 0:
        return float(values[0])
    return values.reshape(np.shape(like))


def hermite_phi(j, x):
    """phi_j(x) for the Hermite system."""
    return HermiteSystem(j).phi(j, x)


def hermite_phi_deriv(j, x):
    return HermiteSystem(j + 1).phi_deriv(j, x)


def eps_transform(system, j, variant, x):
    """eps applied to phi_j (variant "plain") or phi_tilde_j (variant "tilde") of the given system."""
    return system.eps(j, x, variant)


class KernelClosure(object):
    """A Christoffel-Darboux kernel in closed form.

    The off-diagonal value is coefficient * (p_n(x) p_{n-1}(y) - p_{n-1}(x) p_n(y)) / (x - y), optionally
    times sqrt(x/y); within DIAGONAL_THRESHOLD of the diagonal the derivative (L'Hopital) form is used.

    Args:
        basis: callable(points) -> (p_n, p_{n-1}) rows at the points
        basis_deriv: callable(points) -> (p_n', p_{n-1}') rows at the points
        coefficient (float): the recurrence coefficient in front of the quotient
        ratio (bool): multiply by sqrt(x/y)
        fallback: optional callable(points) -> diagonal values, used where basis_deriv is not finite
    """

    def __init__(self, basis, basis_deriv, coefficient, ratio=False, fallback=None,
                 ensemble=None, N=None, symmetric=True):
        self._basis = basis
        self._basis_deriv = basis_deriv
        self.coefficient = coefficient
        self.ratio = ratio
        self._fallback = fallback
        self.ensemble = ensemble
        self.N = N
        self.symmetric = symmetric and not ratio

    def __repr__(self):
        return "KernelClosure(ensemble=%r, N=%r)" % (self.ensemble, self.N)

    def diagonal(self, x):
        x = _as_points(x)
        d_n, d_m = self._basis_deriv(x)
        p_n, p_m = self._basis(x)
        values = self.coefficient * (d_n * p_m - d_m * p_n)
        bad = ~np.isfinite(values)
        if self._fallback is not None and np.any(bad):
            values[bad] = self._fallback(x[bad])
        return values

    def _combine(self, x, y, px, py):
        with np.errstate(divide='ignore', invalid='ignore'):
            values = self.coefficient * (px[0] * py[1] - px[1] * py[0]) / (x - y)
            if self.ratio:
                values = values * np.sqrt(x / y)
        return values

    def __call__(self, x, y):
        x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        shape = x_arr.shape
        xf, yf = x_arr.ravel(), y_arr.ravel()
        values = self._combine(xf, yf, self._basis(xf), self._basis(yf))
        near = np.abs(xf - yf) < DIAGONAL_THRESHOLD
        if np.any(near):
            values[near] = self.diagonal(xf[near])
        if not shape:
            return float(values[0])
        return values.reshape(shape)

    def matrix(self, x, y=None):
        """Matrix of kernel values K(x_i, y_j)."""
        x = _as_points(x)
        y = x if y is None else _as_points(y)
        px = [row[:, None] for row in self._basis(x)]
        py = [row[None, :] for row in self._basis(y)]
        values = self._combine(x[:, None], y[None, :], px, py)
        near = np.abs(x[:, None] - y[None, :]) < DIAGONAL_THRESHOLD
        if np.any(near):
            rows, cols = np.nonzero(near)
            values[rows, cols] = self.diagonal(x[rows])
        return values


def cd_degree(spec):
    """Index n of the closed form, so that the kernel sums degrees 0 .. n-1."""
    if spec.beta == 4:
        return 2 * spec.N + 1
    return spec.N


def laguerre_parameter(spec):
    """Parameter of the Laguerre system attached to the ensemble."""
    if spec.beta == 4:
        return spec.alpha - 1.0
    elif spec.beta == 1:
        return spec.alpha + 1.0
    return spec.alpha


def system_for(spec, max_degree):
    if spec.family == "gaussian":
        return HermiteSystem(max_degree)
    elif spec.family == "laguerre":
        return LaguerreSystem(laguerre_parameter(spec), max_degree)
    raise UnsupportedEnsembleError("Unknown ensemble family %r" % (spec.family,))


def cd_kernel(spec):
    """The Christoffel-Darboux kernel S_N attached to the ensemble.

    Gaussian ensembles sum phi_j(x) phi_j(y); Laguerre beta=1,4 sum phi_j(x) phi_tilde_j(y) and the
    Laguerre unitary ensemble sums chi_j(x) chi_j(y). The number of terms is 2N+1 for beta=4 and N
    otherwise.
    """
    n = cd_degree(spec)
    system = system_for(spec, n + 1)
    label = getattr(spec, "name", None)

    if spec.family == "gaussian":
        def basis(points):
            table = system.phi_table(points, n)
            return table[n], table[n - 1]

        def basis_deriv(points):
            table = system.phi_table(points, n + 1)
            deriv = system.deriv_table(points, n, phi=table)
            return deriv[n], deriv[n - 1]

        return KernelClosure(basis, basis_deriv, math.sqrt(n / 2.0), ensemble=label, N=spec.N)

    a = system.parameter

    def basis(points):
        table = system.chi_table(points, n)
        return table[n], table[n - 1]

    def basis_deriv(points):
        chi = system.chi_table(points, n + 1)
        deriv = system.chi_deriv_table(points, n, chi)
        return deriv[n], deriv[n - 1]

    def fallback(points):
        return np.sum(system.chi_table(points, n - 1) ** 2, axis=0)

    return KernelClosure(basis, basis_deriv, -math.sqrt(n * (n + a)), ratio=(spec.beta != 2),
                         fallback=fallback, ensemble=label, N=spec.N)


def cd_sum(spec, x, y):
    """The kernel S_N(x, y) as the direct spectral sum, evaluated elementwise."""
    n = cd_degree(spec)
    system = system_for(spec, n)
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    xf, yf = x_arr.ravel(), y_arr.ravel()
    if spec.family == "gaussian":
        values = np.sum(system.phi_table(xf, n - 1) * system.phi_table(yf, n - 1), axis=0)
    elif spec.beta == 2:
        values = np.sum(system.chi_table(xf, n - 1) * system.chi_table(yf, n - 1), axis=0)
    else:
        values = np.sum(system.phi_table(xf, n - 1) * system.phi_tilde_table(yf, n - 1), axis=0)
    if not x_arr.shape:
        return float(values[0])
    return values.reshape(x_arr.shape)


def sine_kernel(x, y):
    """sin(x - y) / (pi (x - y)), equal to 1/pi on the diagonal."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return np.sinc(d / math.pi) / math.pi


def bessel_kernel(nu, x, y):
    """B(x, y) = x (J(x) y J'(y) - J(y) x J'(x)) / (x^2 - y^2) for J = J_nu.

    Taken literally the kernel is not symmetric: B(y, x) = (y / x) B(x, y). On the diagonal it equals
    x (J(x)^2 - J_{nu-1}(x) J_{nu+1}(x)) / 2.
    """
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(x_arr < 0) or np.any(y_arr < 0):
        raise DomainError("the Bessel kernel is defined for x, y >= 0")
    j_x = special.jv(nu, x_arr)
    j_y = special.jv(nu, y_arr)
    jp_x = 0.5 * (special.jv(nu - 1, x_arr) - special.jv(nu + 1, x_arr))
    jp_y = 0.5 * (special.jv(nu - 1, y_arr) - special.jv(nu + 1, y_arr))
    with np.errstate(divide='ignore', invalid='ignore'):
        values = x_arr * (j_x * y_arr * jp_y - j_y * x_arr * jp_x) / (x_arr ** 2 - y_arr ** 2)
    near = np.abs(x_arr - y_arr) < DIAGONAL_THRESHOLD * np.maximum(1.0, x_arr)
    if np.any(near):
        values = np.where(near, bessel_kernel_diagonal(nu, x_arr), values)
    if not x_arr.shape:
        return float(values)
    return values


def bessel_kernel_diagonal(nu, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid='ignore'):
        values = 0.5 * x * (special.jv(nu, x) ** 2 - special.jv(nu - 1, x) * special.jv(nu + 1, x))
    values = np.where(x == 0, 0.0, values)
    if not values.shape:
        return float(values)
    return values


def limit_order(spec):
    """Order of the Bessel function in the hard-edge limit of the Laguerre kernel."""
    return laguerre_parameter(spec)


def scaled_cd_kernel(spec, x, y):
    """S_N in the variables of the scaling rule, which converges to the sine or Bessel kernel.

    Gaussian: (1/sqrt(c)) S_N(x/sqrt(c), y/sqrt(c)) with c = 4N (beta=4) or 2N.
    Laguerre: s'(y) S_N(s(x), s(y)) with s(x) = x^2/c; for the symmetric unitary kernel the factor is
    s'(x) so that the limit is B(x, y) in every case.
    """
    kernel = cd_kernel(spec)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if spec.family == "gaussian":
        c = 4.0 * spec.N if spec.beta == 4 else 2.0 * spec.N
        root = math.sqrt(c)
        return kernel(x / root, y / root) / root
    c = 8.0 * spec.N if spec.beta == 4 else 4.0 * spec.N
    jacobian = (2.0 * x / c) if spec.beta == 2 else (2.0 * y / c)
    return jacobian * kernel(x * x / c, y * y / c)


def limit_kernel(spec, x, y):
    """The N -> infinity limit of scaled_cd_kernel."""
    if spec.family == "gaussian":
        return sine_kernel(x, y)
    return bessel_kernel(limit_order(spec), x, y)
