"""
The verification suites run by ``rmt_linstats verify``.

Each suite is a VerificationSuite whose plan lists the checks with their arguments; the tolerances are the
acceptance bounds for the identity being checked.
"""
from __future__ import division

import logging
import math
from fractions import Fraction

import numpy as np
from scipy import special

from rmt_linstats import asympt
from rmt_linstats.ensembles.determinant import mgf_beta2, mgf_squared
from rmt_linstats.ensembles.direct import mgf_direct
from rmt_linstats.ensembles.identities import debruijn_check, vandermonde4_det_check
from rmt_linstats.ensembles.psi import build_M, canonical_M
from rmt_linstats.ensembles.spec import EnsembleSpec
from rmt_linstats.errors import DomainError
from rmt_linstats.operator import GridFunction, apply_deriv, fredholm_det, make_grid
from rmt_linstats.operator.statistic import TestFunction
from rmt_linstats.orthopoly import (
    HermiteSystem,
    LaguerreSystem,
    cd_kernel,
    cd_sum,
    limit_kernel,
    scaled_cd_kernel,
)
from rmt_linstats.specfun import (
    bessel_j,
    hyp2f1_lemma22,
    lemma23_lhs,
    log_gamma,
    log_stirling_gamma,
    sine_integral,
)
from rmt_linstats.verify.base import VerificationSuite, bounded, merge_reports

logger = logging.getLogger(__name__)

SUITE_NAMES = ("lemmas", "kernels", "determinants", "asymptotics", "all")


def _ensemble(name, N, alpha=None):
    family = "laguerre" if name.startswith("L") else "gaussian"
    beta = {"O": 1, "U": 2, "S": 4}[name[1]]
    return EnsembleSpec(family, beta, N, alpha)


def _relative(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


class LemmaSuite(VerificationSuite):
    """Exact and asymptotic identities of the scalar special functions."""

    name = "lemmas"
    plan = [("binomial_sum_exact", {"alpha": alpha, "max_n": 12}) for alpha in ("1/2", 1, 2, "7/3")] + [
        ("hyp2f1_asymptotic", {"Ns": [100, 1000, 10000], "tolerance": 0.05}),
        ("stirling_correction", {"ns": [10, 100, 1000], "tolerance": 1e-3}),
        ("sine_integral_odd", {"tolerance": 1e-15}),
        ("sine_integral_limit", {"xs": [100.0, 1000.0, 10000.0], "tolerance": 1.05}),
        ("bessel_recurrence", {"orders": [0.5, 1.0, 2.5, 3.0], "tolerance": 1e-12}),
    ] + [("vandermonde4", {"N": N, "seed": 0, "tolerance": 1e-10}) for N in (1, 2, 3, 4)]

    @VerificationSuite.check
    def binomial_sum_exact(self, alpha, max_n=12):
        """The alternating binomial sum equals 1/(2n+1)! in rational arithmetic for n = 0 .. max_n."""
        mismatches = [n for n in range(max_n + 1)
                      if lemma23_lhs(n, alpha) != Fraction(1, math.factorial(2 * n + 1))]
        return {"success": not mismatches, "measured": len(mismatches), "tolerance": 0,
                "mismatched_n": mismatches}

    @VerificationSuite.check
    def hyp2f1_asymptotic(self, Ns, tolerance):
        """(-1)^N sqrt(8N/pi) 2F1(-N, 1; 3/2; 2) -> 1, monotonically over Ns."""
        errors = [abs(hyp2f1_lemma22(N) * (-1) ** N * math.sqrt(8.0 * N / math.pi) - 1.0) for N in Ns]
        decreasing = all(b < a for a, b in zip(errors, errors[1:]))
        return {"success": decreasing and errors[-1] <= tolerance, "measured": errors[-1],
                "tolerance": tolerance, "errors": errors, "decreasing": decreasing}

    @VerificationSuite.check
    def stirling_correction(self, ns, tolerance):
        """log Gamma(n) - log Stirling(n) = 1/(12 n) + O(n^-3)."""
        deviations = [abs(12.0 * n * (log_gamma(n) - log_stirling_gamma(n)) - 1.0) for n in ns]
        return bounded(max(deviations), tolerance, deviations=deviations)

    @VerificationSuite.check
    def sine_integral_odd(self, tolerance):
        x = np.linspace(0.0, 50.0, 501)
        return bounded(float(np.max(np.abs(sine_integral(x) + sine_integral(-x)))), tolerance)

    @VerificationSuite.check
    def sine_integral_limit(self, xs, tolerance):
        """x |Si(x) - pi/2| stays bounded by about 1 (the Dirichlet integral)."""
        scaled = [x * abs(sine_integral(x) - math.pi / 2.0) for x in xs]
        return bounded(max(scaled), tolerance, scaled_errors=scaled)

    @VerificationSuite.check
    def bessel_recurrence(self, orders, tolerance):
        """J_{nu-1}(x) + J_{nu+1}(x) = (2 nu / x) J_nu(x)."""
        x = np.linspace(0.5, 30.0, 60)
        worst = 0.0
        for nu in orders:
            lhs = bessel_j(nu - 1.0, x) + bessel_j(nu + 1.0, x)
            rhs = 2.0 * nu / x * bessel_j(nu, x)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return bounded(worst, tolerance)

    @VerificationSuite.check
    def vandermonde4(self, N, seed, tolerance):
        points = np.random.default_rng(seed).uniform(-1.0, 1.0, N)
        lhs, rhs = vandermonde4_det_check(points)
        return bounded(_relative(lhs, rhs), tolerance, lhs=lhs, rhs=rhs)


class KernelSuite(VerificationSuite):
    """Orthonormal systems, Christoffel-Darboux kernels and their scaling limits."""

    name = "kernels"
    plan = [
        ("orthonormality", {"family": "gaussian", "parameter": None, "degree": 60, "tolerance": 1e-10}),
        ("orthonormality", {"family": "laguerre", "parameter": 0.5, "degree": 40, "tolerance": 1e-10}),
        ("orthonormality", {"family": "laguerre", "parameter": 2.5, "degree": 40, "tolerance": 1e-10}),
    ] + [
        ("christoffel_darboux", {"ensemble": name, "N": N, "alpha": alpha, "tolerance": 1e-8})
        for name, N, alpha in (("GUE", 12, None), ("GSE", 6, None), ("GOE", 12, None),
                               ("LUE", 10, 1.0), ("LSE", 5, 2.0), ("LOE", 10, 1.5))
    ] + [
        ("sine_diagonal", {"ensemble": name, "Ns": [50, 200, 800], "tolerance": 0.01})
        for name in ("GUE", "GSE", "GOE")
    ] + [
        ("sine_limit", {"ensemble": name, "N": 400, "reference_N": 100, "tolerance": 0.02})
        for name in ("GSE", "GOE")
    ] + [
        ("bessel_limit", {"ensemble": name, "alpha": alpha, "N": 400, "reference_N": 100, "tolerance": 0.03})
        for name, alpha in (("LSE", 2.0), ("LOE", 1.0))
    ]

    @VerificationSuite.check
    def orthonormality(self, family, parameter, degree, tolerance):
        """max |int phi_j phi_k - delta_jk| for j, k <= degree, by a Gauss rule exact for the products."""
        n = degree + 10
        if family == "gaussian":
            x, w = special.roots_hermite(n)
            table = HermiteSystem(degree).phi_table(x, degree)
            weights = np.exp(np.log(w) + x * x)
        else:
            x, w = special.roots_genlaguerre(n, parameter)
            table = LaguerreSystem(parameter, degree).chi_table(x, degree)
            weights = np.exp(np.log(w) + x - parameter * np.log(x))
        gram = (table * weights).dot(table.T)
        return bounded(float(np.max(np.abs(gram - np.eye(degree + 1)))), tolerance)

    @VerificationSuite.check
    def christoffel_darboux(self, ensemble, N, alpha, tolerance):
        """The closed form against the spectral sum, relative to the largest kernel value."""
        spec = _ensemble(ensemble, N, alpha)
        if spec.family == "gaussian":
            points = np.linspace(-4.0, 4.0, 33)
        else:
            points = np.linspace(0.05, 4.0 * N, 33)
        closed = cd_kernel(spec).matrix(points)
        summed = cd_sum(spec, points[:, None], points[None, :])
        scale = float(np.max(np.abs(summed)))
        return bounded(float(np.max(np.abs(closed - summed))) / scale, tolerance)

    @VerificationSuite.check
    def sine_diagonal(self, ensemble, Ns, tolerance):
        """The scaled kernel at the origin tends to 1/pi."""
        errors = [abs(float(scaled_cd_kernel(_ensemble(ensemble, N), 0.0, 0.0)) - 1.0 / math.pi) for N in Ns]
        return {"success": errors[-1] <= tolerance and errors[-1] < errors[0], "measured": errors[-1],
                "tolerance": tolerance, "errors": errors}

    def _limit_error(self, spec, points):
        x, y = np.meshgrid(points, points, indexing="ij")
        return float(np.max(np.abs(scaled_cd_kernel(spec, x, y) - limit_kernel(spec, x, y))))

    @VerificationSuite.check
    def sine_limit(self, ensemble, N, reference_N, tolerance):
        """sup over [-3, 3]^2 of |scaled S_N - sine kernel|, smaller at N than at reference_N."""
        points = np.linspace(-3.0, 3.0, 25)
        error = self._limit_error(_ensemble(ensemble, N), points)
        reference = self._limit_error(_ensemble(ensemble, reference_N), points)
        return {"success": error <= tolerance and error < reference, "measured": error,
                "tolerance": tolerance, "reference_error": reference}

    @VerificationSuite.check
    def bessel_limit(self, ensemble, alpha, N, reference_N, tolerance):
        """sup over [0.2, 4]^2 of |scaled S_N - Bessel kernel|, smaller at N than at reference_N."""
        points = np.linspace(0.2, 4.0, 20)
        error = self._limit_error(_ensemble(ensemble, N, alpha), points)
        reference = self._limit_error(_ensemble(ensemble, reference_N, alpha), points)
        return {"success": error <= tolerance and error < reference, "measured": error,
                "tolerance": tolerance, "reference_error": reference}


def _debruijn_functions(kind, N):
    def g(x):
        return np.exp(-0.5 * x * x)

    if kind == "orthogonal":
        return [g, lambda x: x * g(x)], None
    if N == 1:
        p = [lambda x: np.exp(-x * x), lambda x: x * np.exp(-x * x)]
        q = [lambda x: x * g(x), lambda x: (1.0 + x * x) * g(x)]
        return p, q
    p = [(lambda j: lambda x: x ** j * g(x))(j) for j in range(2 * N)]
    q = [(lambda j: lambda x: x ** (2 * j) * g(x))(j) for j in range(2 * N)]
    return p, q


class DeterminantSuite(VerificationSuite):
    """Operator calculus, the skew Gram matrices and the determinant formulas against brute force."""

    name = "determinants"
    plan = [
        ("sylvester", {"instances": 20, "seed": 0, "tolerance": 1e-9}),
        ("eps_inverts_deriv", {"panels": 10, "nodes": 40, "tolerance": 1e-6}),
        ("eps_antisymmetric", {"panels": 10, "nodes": 40}),
        ("deriv_commutator", {"panels": 10, "nodes": 40, "tolerance": 1e-6}),
    ] + [
        ("canonical_form", {"ensemble": name, "N": N, "alpha": alpha, "tolerance": 1e-7})
        for name, N, alpha in (("GSE", 8, None), ("GOE", 8, None),
                               ("LSE", 6, 0.7), ("LSE", 6, 2.5), ("LOE", 6, 0.7), ("LOE", 6, 2.5))
    ] + [
        ("determinant_oracle", {"ensemble": name, "N": N, "alpha": alpha, "lambdas": [0.1, 0.3, 0.7],
                                "tolerance": 1e-5})
        for name, N, alpha in (("GSE", 2, None), ("LSE", 2, 2.0), ("GOE", 2, None), ("LOE", 2, 1.5),
                               ("GUE", 2, None), ("GUE", 3, None), ("LUE", 2, 1.0), ("LUE", 3, 1.0))
    ] + [
        ("debruijn", {"kind": kind, "N": N, "tolerance": 1e-5})
        for kind, N in (("quaternion", 1), ("quaternion", 2), ("orthogonal", 2))
    ]

    @VerificationSuite.check
    def sylvester(self, instances, seed, tolerance):
        """det(I + AB) = det(I + BA) for random rectangular A, B."""
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(instances):
            n, m = rng.integers(2, 12, size=2)
            A = rng.normal(size=(n, m)) / math.sqrt(n * m)
            B = rng.normal(size=(m, n))
            worst = max(worst, _relative(fredholm_det(A.dot(B)), fredholm_det(B.dot(A))))
        return bounded(worst, tolerance)

    def _grid_function(self, panels, nodes, shift=0.3):
        breaks = list(np.linspace(-12.0, 12.0, panels + 1)[1:-1])
        grid = make_grid((-12.0, 12.0), nodes, breakpoints=breaks)
        return GridFunction(grid, np.exp(-(grid.nodes - shift) ** 2))

    @VerificationSuite.check
    def eps_inverts_deriv(self, panels, nodes, tolerance):
        """D eps g = g and eps D g = g in the sup norm for a Gaussian g."""
        g = self._grid_function(panels, nodes)
        D = g.grid.deriv_matrix()
        eps = g.grid.eps_matrix()
        d_eps = float(np.max(np.abs(D.dot(eps.dot(g.values)) - g.values)))
        eps_d = float(np.max(np.abs(eps.dot(D.dot(g.values)) - g.values)))
        return bounded(max(d_eps, eps_d), tolerance, d_eps=d_eps, eps_d=eps_d)

    @VerificationSuite.check
    def eps_antisymmetric(self, panels, nodes):
        kernel = self._grid_function(panels, nodes).grid.eps_kernel()
        return bounded(float(np.max(np.abs(kernel + kernel.T))), 0.0)

    @VerificationSuite.check
    def deriv_commutator(self, panels, nodes, tolerance):
        """[D, f] g = f' g for f = sech^2."""
        g = self._grid_function(panels, nodes)
        x = g.grid.nodes
        f = TestFunction("sech", 1.0, 0.5, 1.5)
        fg = GridFunction(g.grid, f(x) * g.values)
        commutator = apply_deriv(fg).values - f(x) * apply_deriv(g).values
        deviation = float(np.max(np.abs(commutator - f.derivative(x) * g.values)))
        return bounded(deviation, tolerance)

    @VerificationSuite.check
    def canonical_form(self, ensemble, N, alpha, tolerance):
        """The skew Gram matrix of the psi basis is block diagonal with blocks [[0, 1], [-1, 0]]."""
        M = build_M(_ensemble(ensemble, N, alpha))
        return bounded(float(np.max(np.abs(M - canonical_M(M.shape[0])))), tolerance, size=M.shape[0])

    @VerificationSuite.check
    def determinant_oracle(self, ensemble, N, alpha, lambdas, tolerance):
        """The determinant formula against N-dimensional quadrature of the definition."""
        spec = _ensemble(ensemble, N, alpha)
        if spec.family == "gaussian":
            stat = TestFunction("gaussian", 1.0, 0.0, 1.0)
        else:
            stat = TestFunction("gaussian", 1.0, 1.5, 1.0)
        errors = []
        for lam in lambdas:
            oracle = mgf_direct(spec, stat, lam) ** spec.power
            value = mgf_beta2(spec, stat, lam) if spec.beta == 2 else mgf_squared(spec, stat, lam)
            errors.append(_relative(value, oracle))
        return bounded(max(errors), tolerance, errors=errors)

    @VerificationSuite.check
    def debruijn(self, kind, N, tolerance):
        p, q = _debruijn_functions(kind, N)
        lhs, rhs = debruijn_check(kind, N, p, q)
        return bounded(_relative(lhs, rhs), tolerance, lhs=lhs, rhs=rhs)


def _asymptotic_statistic(spec):
    if spec.family == "gaussian":
        return TestFunction("gaussian", 1.0, 0.0, 1.0)
    return TestFunction("gaussian", 1.0, 2.0, 1.0)


class AsymptoticSuite(VerificationSuite):
    """Large-N expansions against the finite-N determinant cumulants of the beta = 1, 4 ensembles.

    The displayed variance expansions of these ensembles keep eps f' terms at order N^-1/2 that in fact
    survive the limit. The bulk checks compare the finite-N variance with the corrected limit; the hard-edge
    checks report the gap to the displayed expansion as discrepant and only require the finite-N variance
    to settle.
    """

    name = "asymptotics"
    plan = [
        ("mean_convergence", {"ensemble": name, "alpha": alpha, "Ns": [40, 80, 160]})
        for name, alpha in (("GOE", None), ("GSE", None), ("LOE", 1.0), ("LSE", 2.0))
    ] + [
        ("bulk_variance_limit", {"ensemble": name, "Ns": [40, 80, 160], "tolerance": 0.01})
        for name in ("GOE", "GSE")
    ] + [
        ("hard_edge_variance_gap", {"ensemble": name, "alpha": alpha, "Ns": [40, 80, 160], "tolerance": 0.01})
        for name, alpha in (("LOE", 1.0), ("LSE", 2.0))
    ]

    def _rows(self, ensemble, alpha, Ns):
        spec = _ensemble(ensemble, Ns[0], alpha)
        return asympt.cross_validate(spec, _asymptotic_statistic(spec), Ns=tuple(Ns))

    @VerificationSuite.check
    def mean_convergence(self, ensemble, alpha, Ns):
        """|asymptotic - finite| mean decreases over Ns and ends below 2 C / N, C fitted on the smaller N."""
        rows = self._rows(ensemble, alpha, Ns)
        fit = asympt.mean_convergence(rows)
        return {"success": fit.success, "measured": rows[-1].mean_difference, "tolerance": fit.bound,
                "mean_differences": [row.mean_difference for row in rows], "decreasing": fit.decreasing}

    @VerificationSuite.check
    def bulk_variance_limit(self, ensemble, Ns, tolerance):
        """The finite-N variance at the largest N against the limit variance; the displayed expansion's gaps
        are reported alongside."""
        rows = self._rows(ensemble, None, Ns)
        return {"success": rows[-1].limit_variance_difference <= tolerance,
                "measured": rows[-1].limit_variance_difference, "tolerance": tolerance,
                "limit_variance": rows[-1].limit_variance,
                "finite_variances": [row.finite_variance for row in rows],
                "displayed_variance_gaps": [row.variance_difference for row in rows]}

    @VerificationSuite.check
    def hard_edge_variance_gap(self, ensemble, alpha, Ns, tolerance):
        """The displayed hard-edge variance gap, reported as discrepant; the finite-N variance must settle
        to within tolerance between the two largest N."""
        rows = self._rows(ensemble, alpha, Ns)
        settling = abs(rows[-1].finite_variance - rows[-2].finite_variance)
        return {"success": settling <= tolerance, "measured": settling, "tolerance": tolerance,
                "discrepant": True, "finite_variances": [row.finite_variance for row in rows],
                "displayed_variance_gaps": [row.variance_difference for row in rows]}


SUITES = {
    "lemmas": LemmaSuite,
    "kernels": KernelSuite,
    "determinants": DeterminantSuite,
    "asymptotics": AsymptoticSuite,
}


def run_suite(name, only_return_failures=False, catch_exceptions=True):
    """Run one suite, or every suite for "all"."""
    if name == "all":
        return merge_reports([SUITES[key](catch_exceptions).run(only_return_failures)
                              for key in SUITE_NAMES if key != "all"])
    if name not in SUITES:
        raise DomainError("Unknown verification suite %r" % (name,))
    return SUITES[name](catch_exceptions).run(only_return_failures)
