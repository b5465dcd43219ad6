"""
Large-N means and variances of linear statistics, with the leading corrections, evaluated by quadrature
over the sine kernel (Gaussian ensembles) and the Bessel kernel (Laguerre ensembles).

Each statistic is taken in the scaled variable of its ensemble: sum_j F(sqrt(2N) x_j) for GUE and GOE,
F(sqrt(4N) x_j) for GSE, F(sqrt(4N x_j)) for LUE and LOE, and F(sqrt(8N x_j)) for LSE.
"""
from __future__ import division

import logging
import math
import warnings

import numpy as np

from rmt_linstats.ensembles.determinant import finite_moments
from rmt_linstats.errors import DomainError
from rmt_linstats.operator.grid import make_grid
from rmt_linstats.operator.statistic import ScaledStatistic
from rmt_linstats.orthopoly import bessel_kernel, bessel_kernel_diagonal
from rmt_linstats.specfun import bessel_j, bessel_j_integral, sine_integral
from rmt_linstats.util import DotDict, moment_report

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 12
SUPPORT_TOLERANCE = 1e-12
AGREEMENT_TOLERANCE = 1e-6
PANEL_WIDTH = 2.0
TAIL_PANEL = 40.0
GRADED_EDGES = (0.0, 0.125, 0.25, 0.5, 1.0)


def _panel_counts(edges, resolution):
    return [max(8, int(math.ceil((b - a) * resolution))) for a, b in zip(edges[:-1], edges[1:])]


def _uniform_edges(lo, hi, width=PANEL_WIDTH):
    pieces = max(1, int(math.ceil((hi - lo) / width)))
    return list(np.linspace(lo, hi, pieces + 1))


def _composite(edges, resolution):
    return make_grid((edges[0], edges[-1]), _panel_counts(edges, resolution), breakpoints=edges[1:-1])


class SineQuadrature(object):
    """Tensor Gauss-Legendre quadrature over the support of F on the real line, with the sine-kernel
    matrices sin(x - y)/(x - y) and Si(x - y) tabulated on it."""

    def __init__(self, F, resolution=DEFAULT_RESOLUTION):
        if F.half_line_only:
            raise DomainError("a half-line statistic has no bulk limit")
        lo, hi = F.support(SUPPORT_TOLERANCE)
        self.grid = _composite(_uniform_edges(lo, hi), resolution)
        x = self.grid.nodes
        self.x, self.w = x, self.grid.weights
        self.F, self.Fp = F(x), F.derivative(x)
        d = x[:, None] - x[None, :]
        self.sinc = np.sinc(d / math.pi)
        self.si = sine_integral(d)

    def integral(self, values):
        return float(np.dot(self.w, values))

    def double(self, matrix, left, right):
        """sum_ij w_i w_j matrix_ij left_i right_j."""
        return float(np.dot(self.w * left, matrix.dot(self.w * right)))

    def one_sided(self, values):
        """g(x_i) = int_{x_i}^inf sinc(x_i - y) v(y) dy - int_{-inf}^{x_i} sinc(x_i - y) v(y) dy."""
        H = self.sinc * values[None, :]
        lower = np.sum(self.grid.cumulative_matrix() * H, axis=1)
        return H.dot(self.w) - 2.0 * lower


class BesselQuadrature(object):
    """Quadrature on [0, L] for the hard-edge terms of order nu.

    Besides J, its running integral and the kernel B(x_i, x_j), it tabulates the one-sided integrals
    side2[i, k] = int_{x_i}^inf B(x_k, z) dz - int_0^{x_i} B(x_k, z) dz. The z-integral runs over the grid,
    an extra panel [L, L + 40] and a tail beyond it approximated by y J(y) J(Z) / Z.
    """

    def __init__(self, F, nu, resolution=DEFAULT_RESOLUTION):
        if nu <= -1:
            raise DomainError("the Bessel kernel needs order > -1, got %r" % (nu,))
        hi = F.support(SUPPORT_TOLERANCE)[1]
        L = max(hi, GRADED_EDGES[-1] + PANEL_WIDTH)
        edges = list(GRADED_EDGES[:-1]) + _uniform_edges(GRADED_EDGES[-1], L)
        self.nu = nu
        self.grid = _composite(edges, resolution)
        x = self.grid.nodes
        self.x, self.w = x, self.grid.weights
        self.F, self.Fp = F(x), F.derivative(x)
        self.J = bessel_j(nu, x)
        self.IJ = bessel_j_integral(nu, x)
        self.B = bessel_kernel(nu, x[:, None], x[None, :])
        self.Bd = bessel_kernel_diagonal(nu, x)

        C = self.grid.cumulative_matrix()
        self.C = C
        extension = _composite(_uniform_edges(L, L + TAIL_PANEL), resolution)
        Z = L + TAIL_PANEL
        tail = x * self.J * bessel_j(nu, Z) / Z
        self.tail_bound = float(np.max(np.abs(tail))) if tail.size else 0.0
        B_ext = bessel_kernel(nu, x[:, None], extension.nodes[None, :])
        total = self.B.dot(self.w) + B_ext.dot(extension.weights) + tail
        cumulative = self.B.dot(C.T)
        self.side2 = total[None, :] - 2.0 * cumulative.T
        self.side = np.diag(self.side2).copy()
        logger.debug("Bessel quadrature nu=%r: %d nodes on [0, %r], tail bound %.3g"
                     % (nu, x.size, L, self.tail_bound))

    def integral(self, values):
        return float(np.dot(self.w, values))

    def double(self, matrix, left, right):
        return float(np.dot(self.w * left, matrix.dot(self.w * right)))

    def side_weighted(self, values):
        """int_x^inf B(x, y) v(y) dy - int_0^x B(x, y) v(y) dy at each node x."""
        H = self.B * values[None, :]
        return H.dot(self.w) - 2.0 * np.sum(self.C * H, axis=1)

    def j_side(self, values):
        """int_0^x J v - int_x^inf J v at each node x."""
        Jv = self.J * values
        return 2.0 * self.C.dot(Jv) - self.integral(Jv)


class TermList(object):
    """Labeled contributions to a mean or variance."""

    def __init__(self):
        self.terms = []

    def add(self, quantity, label, order, value):
        self.terms.append(DotDict(quantity=quantity, label=label, order=order, value=float(value)))

    def total(self, quantity):
        return float(sum(term.value for term in self.terms if term.quantity == quantity))


def asymptotic_report(ensemble, N, terms, **extra):
    """An AsymptoticReport: the mean, the variance and the labeled terms they sum.

    A negative variance is reported as is, flagged and warned about. limit_variance is the sum of the
    "limit variance" terms, or None when the expansion has none.
    """
    mean, variance = terms.total("mean"), terms.total("variance")
    limit_variance = None
    if any(term.quantity == "limit variance" for term in terms.terms):
        limit_variance = terms.total("limit variance")
    report = moment_report("asymptotic formula", mean, variance, ensemble=ensemble, N=N,
                           terms=terms.terms, negative_variance=variance < 0, limit_variance=limit_variance)
    report.update(extra)
    if variance < 0:
        warnings.warn("asymptotic variance for %s at N=%r is negative (%r); the correction terms dominate"
                      % (ensemble, N, variance))
    return report


def _zero_report(ensemble, N):
    return asymptotic_report(ensemble, N, TermList())


def _require_even(N, name):
    if int(N) != N or N < 2 or N % 2:
        raise DomainError("%s expansions need an even N, got %r" % (name, N))


def _sine_limits(q):
    mean = q.integral(q.F) / math.pi
    variance = q.integral(q.F * q.F) / math.pi - q.double(q.sinc ** 2, q.F, q.F) / math.pi ** 2
    return mean, variance


def _bessel_limits(q):
    mean = q.integral(q.Bd * q.F)
    variance = q.integral(q.Bd * q.F * q.F) - q.double(q.B * q.B.T, q.F, q.F)
    return mean, variance


def gue_limits(F, resolution=DEFAULT_RESOLUTION):
    """(mean, variance) of sum_j F(sqrt(2N) x_j) in the GUE as N -> infinity.

    mean = (1/pi) int F; variance = (1/pi) int F^2 - int int [sin(x - y) / (pi (x - y))]^2 F(x) F(y).
    """
    if F.is_zero:
        return 0.0, 0.0
    return _sine_limits(SineQuadrature(F, resolution))


def lue_limits(F, alpha, resolution=DEFAULT_RESOLUTION):
    """(mean, variance) of sum_j F(sqrt(4N x_j)) in the LUE with parameter alpha as N -> infinity.

    mean = int B(x, x) F; variance = int B(x, x) F^2 - int int B(x, y) B(y, x) F(x) F(y).
    """
    if not alpha > -1:
        raise DomainError("lue_limits requires alpha > -1, got %r" % (alpha,))
    if F.is_zero:
        return 0.0, 0.0
    return _bessel_limits(BesselQuadrature(F, alpha, resolution))


def gse_expansion(F, N, resolution=DEFAULT_RESOLUTION):
    """Mean and variance of sum_j F(sqrt(4N) x_j) in the GSE through O(N^-1/2).

    The "variance" terms are the displayed expansion. Its sinc Si term is an eps f' contribution, and
    eps f' is unchanged by the scaling x -> sqrt(4N) x, so it enters the N -> infinity limit at full
    weight; the "limit variance" terms carry that limit.
    """
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer, got %r" % (N,))
    if F.is_zero:
        return _zero_report("GSE", N)
    q = SineQuadrature(F, resolution)
    gue_mean, gue_variance = _sine_limits(q)
    sign = (-1) ** int(N)
    root = math.sqrt(2.0 * math.pi * N)
    cos_x = np.cos(q.x)

    terms = TermList()
    terms.add("mean", "half GUE mean", "1", 0.5 * gue_mean)
    terms.add("mean", "cos x F", "N^-1/2", -sign / (4.0 * root) * q.integral(cos_x * q.F))
    terms.add("variance", "half GUE variance", "1", 0.5 * gue_variance)
    terms.add("variance", "sinc Si F' F", "N^-1/2",
              -q.double(q.sinc * q.si, q.Fp, q.F) / (4.0 * math.pi ** 2 * math.sqrt(N)))
    oscillating = q.integral(cos_x * q.F * q.F) - 2.0 / math.pi * q.double(q.sinc, cos_x * q.F, q.F)
    terms.add("variance", "cos x F^2 - sinc cos x F F", "N^-1/2", -sign / (4.0 * root) * oscillating)
    terms.add("limit variance", "half GUE variance", "1", 0.5 * gue_variance)
    terms.add("limit variance", "sinc Si F' F", "1", -q.double(q.sinc * q.si, q.Fp, q.F) / (4.0 * math.pi ** 2))
    return asymptotic_report("GSE", N, terms)


def goe_expansion(F, N, resolution=DEFAULT_RESOLUTION):
    """Mean and variance of sum_j F(sqrt(2N) x_j) in the GOE (even N): mean through O(N^-1),
    variance through O(N^-1/2).

    As for the GSE, the two eps f' integrals of the displayed variance do not decay; with their limit
    coefficients the "limit variance" terms sum to

        (1/pi) int F^2 - int int F(x) F(y) [S^2 - S' (Si / pi - sgn / 2)](x - y),   S = sin(x) / (pi x),

    the variance under the orthogonal two-point cluster function of the sine process.
    """
    _require_even(N, "GOE")
    if F.is_zero:
        return _zero_report("GOE", N)
    q = SineQuadrature(F, resolution)
    gue_mean, gue_variance = _sine_limits(q)
    sign = (-1) ** (int(N) // 2)
    sin_x = np.sin(q.x)

    terms = TermList()
    terms.add("mean", "GUE mean", "1", gue_mean)
    terms.add("mean", "sin^2 x F", "N^-1", -q.integral(sin_x ** 2 * q.F) / (2.0 * math.pi * N))
    terms.add("mean", "sin x F'", "N^-1",
              -sign / (4.0 * math.sqrt(2.0 * math.pi) * N) * q.integral(sin_x * q.Fp))
    terms.add("variance", "twice GUE variance", "1", 2.0 * gue_variance)
    root = math.sqrt(2.0 * N)
    terms.add("variance", "one-sided sinc F, F'", "N^-1/2",
              -q.integral(q.one_sided(q.F) * q.Fp) / (2.0 * math.pi * root))
    terms.add("variance", "sinc Si F' F", "N^-1/2",
              -2.0 * q.double(q.sinc * q.si, q.Fp, q.F) / (math.pi ** 2 * root))
    terms.add("limit variance", "twice GUE variance", "1", 2.0 * gue_variance)
    terms.add("limit variance", "one-sided sinc F, F'", "1", -q.integral(q.one_sided(q.F) * q.Fp) / (2.0 * math.pi))
    terms.add("limit variance", "sinc Si F' F", "1", -q.double(q.sinc * q.si, q.Fp, q.F) / math.pi ** 2)
    return asymptotic_report("GOE", N, terms)


def lse_expansion(F, alpha, N, resolution=DEFAULT_RESOLUTION):
    """Mean and variance of sum_j F(sqrt(8N x_j)) in the LSE through O(N^-1); Bessel order alpha - 1."""
    if not alpha > 0:
        raise DomainError("LSE requires alpha > 0, got %r" % (alpha,))
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer, got %r" % (N,))
    if F.is_zero:
        return _zero_report("LSE", N)
    q = BesselQuadrature(F, alpha - 1.0, resolution)
    lue_mean, lue_variance = _bessel_limits(q)
    x, F_, Fp, J, IJ = q.x, q.F, q.Fp, q.J, q.IJ
    ij_j_f = q.integral(IJ * J * F_)
    ij_ij1_xfp = q.integral(IJ * (IJ - 1.0) * x * Fp)

    terms = TermList()
    terms.add("mean", "half LUE mean", "1", 0.5 * lue_mean)
    terms.add("mean", "IJ J F", "1", -0.25 * ij_j_f)
    terms.add("mean", "one-sided B, x F'", "N^-1", -q.integral(q.side * x * Fp) / (32.0 * N))
    terms.add("mean", "IJ (IJ - 1) x F'", "N^-1", -ij_ij1_xfp / (32.0 * N))

    terms.add("variance", "half LUE variance", "1", 0.5 * lue_variance)
    terms.add("variance", "IJ J F^2", "1", -0.25 * q.integral(IJ * J * F_ * F_))
    terms.add("variance", "B J IJ F F", "1", 0.5 * q.double(q.B, J * F_, IJ * F_))
    terms.add("variance", "IJ J F squared", "1", -0.125 * ij_j_f ** 2)
    terms.add("variance", "one-sided B, x F F'", "N^-1", -q.integral(q.side * x * F_ * Fp) / (16.0 * N))
    terms.add("variance", "IJ (IJ - 1) x F F'", "N^-1", -q.integral(IJ * (IJ - 1.0) * x * F_ * Fp) / (16.0 * N))
    terms.add("variance", "B one-sided B, x F' F", "N^-1", q.double(q.B * q.side2, x * Fp, F_) / (16.0 * N))
    terms.add("variance", "B (IJ - 1) IJ, x F' F", "N^-1",
              q.double(q.B, (IJ - 1.0) * x * Fp, IJ * F_) / (16.0 * N))
    terms.add("variance", "one-sided B IJ J, x F' F", "N^-1",
              -q.double(q.side2, IJ * x * Fp, J * F_) / (32.0 * N))
    terms.add("variance", "IJ (IJ - 1) x F', IJ J F", "N^-1", -ij_ij1_xfp * ij_j_f / (32.0 * N))
    return asymptotic_report("LSE", N, terms, tail_bound=q.tail_bound)


def loe_expansion(F, alpha, N, resolution=DEFAULT_RESOLUTION):
    """Mean and variance of sum_j F(sqrt(4N x_j)) in the LOE (even N) through O(N^-1); Bessel order
    alpha + 1."""
    if not alpha > -2:
        raise DomainError("LOE requires alpha > -2, got %r" % (alpha,))
    _require_even(N, "LOE")
    if F.is_zero:
        return _zero_report("LOE", N)
    q = BesselQuadrature(F, alpha + 1.0, resolution)
    lue_mean, lue_variance = _bessel_limits(q)
    x, F_, Fp, J, IJ = q.x, q.F, q.Fp, q.J, q.IJ
    ij1 = IJ - 1.0
    ij1_j_f = q.integral(ij1 * J * F_)
    ij1_ij_xfp = q.integral(ij1 * IJ * x * Fp)

    terms = TermList()
    terms.add("mean", "LUE mean", "1", lue_mean)
    terms.add("mean", "(IJ - 1) J F", "1", -0.5 * ij1_j_f)
    terms.add("mean", "one-sided B, x F'", "N^-1", -q.integral(q.side * x * Fp) / (8.0 * N))
    terms.add("mean", "(IJ - 1) IJ x F'", "N^-1", -ij1_ij_xfp / (8.0 * N))

    terms.add("variance", "twice LUE variance", "1", 2.0 * lue_variance)
    terms.add("variance", "(IJ - 1) J F^2", "1", -q.integral(ij1 * J * F_ * F_))
    terms.add("variance", "B J (IJ - 1) F F", "1", 2.0 * q.double(q.B, J * F_, ij1 * F_))
    terms.add("variance", "(IJ - 1) J F squared", "1", -0.5 * ij1_j_f ** 2)
    terms.add("variance", "one-sided B, x F F'", "N^-1", -q.integral(q.side * x * F_ * Fp) / (4.0 * N))
    terms.add("variance", "one-sided B F, x F'", "N^-1", -q.integral(q.side_weighted(F_) * x * Fp) / (4.0 * N))
    terms.add("variance", "(IJ - 1) IJ x F F'", "N^-1", -q.integral(ij1 * IJ * x * F_ * Fp) / (4.0 * N))
    terms.add("variance", "(IJ - 1) one-sided J F, x F'", "N^-1",
              -q.integral(ij1 * q.j_side(F_) * x * Fp) / (8.0 * N))
    terms.add("variance", "B one-sided B, x F' F", "N^-1", q.double(q.B * q.side2, x * Fp, F_) / (2.0 * N))
    terms.add("variance", "B IJ (IJ - 1), x F' F", "N^-1", q.double(q.B, IJ * x * Fp, ij1 * F_) / (2.0 * N))
    terms.add("variance", "one-sided B (IJ - 1) J, x F' F", "N^-1",
              -q.double(q.side2, ij1 * x * Fp, J * F_) / (4.0 * N))
    terms.add("variance", "(IJ - 1) IJ x F', (IJ - 1) J F", "N^-1", -ij1_ij_xfp * ij1_j_f / (4.0 * N))
    return asymptotic_report("LOE", N, terms, tail_bound=q.tail_bound)


def limits_report(name, F, alpha=None, N=None, resolution=DEFAULT_RESOLUTION):
    """The N -> infinity GUE or LUE values as an AsymptoticReport."""
    if name == "GUE":
        mean, variance = gue_limits(F, resolution)
    else:
        mean, variance = lue_limits(F, alpha, resolution)
    terms = TermList()
    if not F.is_zero:
        terms.add("mean", "%s mean" % name, "1", mean)
        terms.add("variance", "%s variance" % name, "1", variance)
    return asymptotic_report(name, N, terms)


def expansion(spec, F, resolution=DEFAULT_RESOLUTION):
    """The asymptotic report for any of the six ensembles at spec.N."""
    name = spec.name
    if name in ("GUE", "LUE"):
        return limits_report(name, F, spec.alpha, spec.N, resolution)
    elif name == "GSE":
        return gse_expansion(F, spec.N, resolution)
    elif name == "GOE":
        return goe_expansion(F, spec.N, resolution)
    elif name == "LSE":
        return lse_expansion(F, spec.alpha, spec.N, resolution)
    return loe_expansion(F, spec.alpha, spec.N, resolution)


def check_resolution(spec, F, resolution=DEFAULT_RESOLUTION, rtol=AGREEMENT_TOLERANCE):
    """Evaluate the expansion at two resolutions (nodes per unit length r and 2r) and compare.

    Returns:
        DotDict with the coarse and fine reports, the largest relative change and whether it is within rtol
    """
    coarse = expansion(spec, F, resolution)
    fine = expansion(spec, F, 2 * resolution)
    change = 0.0
    for key in ("mean", "variance"):
        change = max(change, abs(fine[key] - coarse[key]) / max(1.0, abs(fine[key])))
    logger.info("asymptotic %s values changed by %.3g under refinement" % (spec.name, change))
    return DotDict(coarse=coarse, fine=fine, relative_change=change, agreed=change <= rtol)


def cross_validate(spec, F, Ns=(40, 80, 160), method="projected"):
    """Compare the asymptotic mean and variance with the finite-N determinant cumulants.

    Returns:
        list of DotDicts with N, both means and variances and their absolute differences. When the
        expansion carries a limit variance, limit_variance and limit_variance_difference hold it and
        its distance to the finite-N variance; otherwise both are None.
    """
    rows = []
    for N in Ns:
        spec_N = spec.with_N(N)
        asymptotic = expansion(spec_N, F)
        finite = finite_moments(spec_N, ScaledStatistic(F, spec_N.scaling), method=method)
        limit_variance = asymptotic.get("limit_variance")
        rows.append(DotDict(N=N, asymptotic_mean=asymptotic.mean, finite_mean=finite.mean,
                            asymptotic_variance=asymptotic.variance, finite_variance=finite.variance,
                            mean_difference=abs(asymptotic.mean - finite.mean),
                            variance_difference=abs(asymptotic.variance - finite.variance),
                            limit_variance=limit_variance,
                            limit_variance_difference=(None if limit_variance is None
                                                       else abs(limit_variance - finite.variance))))
        logger.info("cross-validation %s N=%d: mean difference %.3g, variance difference %.3g"
                    % (spec.name, N, rows[-1].mean_difference, rows[-1].variance_difference))
    return rows


def mean_convergence(rows):
    """Whether the mean differences of cross_validate rows fall off like 1/N.

    C is the largest N * difference over all rows but the last; the last row passes when its difference
    is at most 2 C / N.

    Returns:
        DotDict with decreasing, constant, bound and success
    """
    if len(rows) < 2:
        raise DomainError("mean_convergence needs at least two sizes, got %d" % len(rows))
    differences = [row.mean_difference for row in rows]
    decreasing = all(b < a for a, b in zip(differences[:-1], differences[1:]))
    constant = max(row.N * row.mean_difference for row in rows[:-1])
    bound = 2.0 * constant / rows[-1].N
    return DotDict(decreasing=decreasing, constant=constant, bound=bound,
                   success=decreasing and differences[-1] <= bound)
