from __future__ import division

import math

import numpy as np
import pytest
from scipy import integrate, special

from rmt_linstats.ensembles import (
    EnsembleSpec,
    ScalingRule,
    build_M,
    build_psi,
    canonical_M,
    finite_moments,
    k22_kernel,
    mgf,
    mgf_beta2,
    mgf_direct,
    mgf_squared,
    mu_sum_kernel,
    trace_log_mgf,
)
from rmt_linstats.ensembles.determinant import kernel_domain, resolve_method
from rmt_linstats.errors import DomainError, UnsupportedEnsembleError
from rmt_linstats.operator import make_grid

from .test_utils import gaussian_statistic, scaled_statistic, sech_statistic

SKEW_ENSEMBLES = [
    EnsembleSpec("gaussian", 4, 3),
    EnsembleSpec("gaussian", 1, 4),
    EnsembleSpec("laguerre", 4, 3, 2.0),
    EnsembleSpec("laguerre", 1, 4, 1.0),
]

ORACLE_ENSEMBLES = [
    EnsembleSpec("gaussian", 4, 2),
    EnsembleSpec("gaussian", 1, 2),
    EnsembleSpec("gaussian", 2, 3),
    EnsembleSpec("laguerre", 4, 2, 2.0),
    EnsembleSpec("laguerre", 1, 2, 1.5),
    EnsembleSpec("laguerre", 2, 2, 1.0),
]


def _oracle_statistic(spec):
    if spec.family == "gaussian":
        return gaussian_statistic()
    return gaussian_statistic(center=1.5)


def _ids(specs):
    return ["%s%d" % (spec.name, spec.N) for spec in specs]


class TestEnsembleSpec(object):

    def test_names_and_power(self):
        assert EnsembleSpec("gaussian", 1, 2).name == "GOE"
        assert EnsembleSpec("Laguerre", 4, 2, 1.0).name == "LSE"
        assert EnsembleSpec("gaussian", 2, 2).power == 1
        assert EnsembleSpec("laguerre", 1, 2).power == 2

    def test_laguerre_alpha_defaults_and_gaussian_alpha_is_dropped(self):
        assert EnsembleSpec("laguerre", 2, 3).alpha == 0.0
        assert EnsembleSpec("gaussian", 2, 3, 1.5).alpha is None
        # beta = 1 allows -2 < alpha <= -1
        assert EnsembleSpec("laguerre", 1, 2, -1.5).alpha == -1.5

    @pytest.mark.parametrize("args,error", [
        (("jacobi", 2, 3), UnsupportedEnsembleError),
        (("gaussian", 3, 3), UnsupportedEnsembleError),
        (("gaussian", 2, 0), DomainError),
        (("gaussian", 2, 2.5), DomainError),
        (("gaussian", 1, 3), DomainError),
        (("laguerre", 4, 2), DomainError),
        (("laguerre", 4, 2, 0.0), DomainError),
        (("laguerre", 2, 2, -1.0), DomainError),
        (("laguerre", 1, 2, -2.0), DomainError),
    ])
    def test_rejects(self, args, error):
        with pytest.raises(error):
            EnsembleSpec(*args)

    def test_equality_and_with_N(self):
        spec = EnsembleSpec("laguerre", 2, 3, 1.0)
        assert spec == EnsembleSpec("laguerre", 2, 3, 1)
        assert spec != spec.with_N(4)
        assert spec.with_N(4).alpha == 1.0
        assert len({spec, EnsembleSpec("laguerre", 2, 3, 1.0)}) == 1
        assert spec.to_dict() == {"family": "laguerre", "beta": 2, "N": 3, "alpha": 1.0, "name": "LUE"}

    def test_weight_moments(self):
        # GOE weight exp(-x^2/2): second moment sqrt(2 pi)
        assert EnsembleSpec("gaussian", 1, 2).moment(2) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)
        assert EnsembleSpec("gaussian", 2, 2).moment(3) == 0.0
        # LOE weight x^(alpha/2) exp(-x/2)
        spec = EnsembleSpec("laguerre", 1, 2, 1.0)
        expected = integrate.quad(lambda x: x ** 2 * spec.weight(x), 0, np.inf)[0]
        assert spec.moment(2) == pytest.approx(expected, rel=1e-9)

    def test_log_weight_at_the_hard_edge(self):
        assert EnsembleSpec("laguerre", 2, 2, 0.0).log_weight(np.array([0.0]))[0] == 0.0
        assert EnsembleSpec("laguerre", 2, 2, 1.0).log_weight(np.array([0.0]))[0] == -np.inf

    def test_scaling_rules(self):
        assert EnsembleSpec("gaussian", 4, 5).scaling == ScalingRule("linear", 20.0)
        assert EnsembleSpec("gaussian", 1, 6).scaling == ScalingRule("linear", 12.0)
        assert EnsembleSpec("laguerre", 4, 5, 1.0).scaling == ScalingRule("sqrt", 40.0)
        assert EnsembleSpec("laguerre", 1, 6, 1.0).scaling == ScalingRule("sqrt", 24.0)
        rule = ScalingRule("sqrt", 8.0)
        assert rule(2.0) == pytest.approx(4.0)
        assert rule.inverse(4.0) == pytest.approx(2.0)
        assert rule(-1.0) == 0.0
        assert rule.inverse_interval(-3.0, 4.0) == (0.0, 2.0)
        with pytest.raises(DomainError):
            ScalingRule("log", 1.0)
        with pytest.raises(DomainError):
            ScalingRule("linear", 0.0)


class TestPsiBasis(object):

    @pytest.mark.parametrize("spec", SKEW_ENSEMBLES, ids=_ids(SKEW_ENSEMBLES))
    def test_skew_gram_matrix_is_canonical(self, spec):
        M = build_M(spec)
        size = 2 * spec.N if spec.beta == 4 else spec.N
        assert M.shape == (size, size)
        assert np.max(np.abs(M - canonical_M(M.shape[0]))) < 1e-7

    def test_canonical_M(self):
        M = canonical_M(4)
        assert np.array_equal(M, [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
        assert not canonical_M(3)[2].any()

    def test_psi_derivatives(self):
        basis = build_psi(EnsembleSpec("gaussian", 1, 4))
        x = np.linspace(-3.0, 3.0, 13)
        h = 1e-5
        values, derivs, eps = basis.tables(x)
        numeric = (basis.tables(x + h)[0] - basis.tables(x - h)[0]) / (2 * h)
        assert np.allclose(derivs, numeric, atol=1e-7)
        numeric_eps = (basis.tables(x + h)[2] - basis.tables(x - h)[2]) / (2 * h)
        assert np.allclose(numeric_eps, values, atol=1e-7)
        assert np.array_equal(basis.psi(2, x), values[2])
        assert np.array_equal(basis.psi_deriv(2, x), derivs[2])

    @pytest.mark.parametrize("spec", SKEW_ENSEMBLES, ids=_ids(SKEW_ENSEMBLES))
    def test_closed_form_k22_matches_basis_sum(self, spec):
        if spec.family == "gaussian":
            points = np.linspace(-4.0, 4.0, 15)
        else:
            points = np.linspace(0.2, 20.0, 15)
        closed = k22_kernel(spec).matrix(points)
        summed = mu_sum_kernel(spec)(points, points)
        assert np.max(np.abs(closed - summed)) <= 1e-7 * np.max(np.abs(summed))
        # pointwise evaluation agrees with the matrix form
        assert np.allclose(k22_kernel(spec)(points, points[::-1]), np.diag(closed[:, ::-1]), atol=1e-12)

    def test_beta2_has_no_psi_basis(self):
        with pytest.raises(UnsupportedEnsembleError):
            build_psi(EnsembleSpec("gaussian", 2, 3))
        with pytest.raises(UnsupportedEnsembleError):
            k22_kernel(EnsembleSpec("laguerre", 2, 3, 1.0))


class TestDeterminants(object):

    def test_single_eigenvalue_gue(self):
        spec = EnsembleSpec("gaussian", 2, 1)
        stat = sech_statistic(0.8, 0.3, 0.9)
        for lam in (0.4, -0.6, 2.0):
            expected = integrate.quad(lambda x: math.exp(-x * x - lam * stat(x)) / math.sqrt(math.pi),
                                      -np.inf, np.inf, epsabs=1e-13)[0]
            assert mgf_beta2(spec, stat, lam) == pytest.approx(expected, rel=1e-8)

    def test_single_eigenvalue_lue(self):
        spec = EnsembleSpec("laguerre", 2, 1, 1.5)
        stat = gaussian_statistic(1.0, 2.0, 1.0)
        norm = special.gamma(2.5)
        for lam in (0.5, 1.5):
            expected = integrate.quad(lambda x: x ** 1.5 * math.exp(-x - lam * stat(x)) / norm,
                                      0, np.inf, epsabs=1e-13)[0]
            for method in ("nystrom", "projected"):
                assert mgf_beta2(spec, stat, lam, method=method) == pytest.approx(expected, rel=1e-8)

    @pytest.mark.parametrize("spec", ORACLE_ENSEMBLES, ids=_ids(ORACLE_ENSEMBLES))
    @pytest.mark.parametrize("method", ["nystrom", "projected"])
    def test_determinant_matches_direct_quadrature(self, spec, method):
        stat = _oracle_statistic(spec)
        for lam in (0.1, 0.7):
            oracle = mgf_direct(spec, stat, lam) ** spec.power
            if spec.beta == 2:
                value = mgf_beta2(spec, stat, lam, method=method)
            else:
                value = mgf_squared(spec, stat, lam, method=method)
            assert value == pytest.approx(oracle, rel=1e-5)

    @pytest.mark.parametrize("alpha", [0.0, 1.5, 3.0])
    @pytest.mark.parametrize("method", ["nystrom", "projected"])
    def test_loe_statistic_alive_at_the_hard_edge(self, alpha, method):
        # F(0) ~ 0.32, so f' carries a point mass at x = 0
        spec = EnsembleSpec("laguerre", 1, 2, alpha)
        stat = gaussian_statistic(center=1.5)
        assert stat(np.zeros(1))[0] > 0.3
        for lam in (0.7, -0.4):
            oracle = mgf_direct(spec, stat, lam) ** 2
            assert mgf_squared(spec, stat, lam, method=method) == pytest.approx(oracle, rel=1e-5)

    def test_mgf_is_the_positive_square_root(self):
        spec = EnsembleSpec("gaussian", 4, 2)
        stat = gaussian_statistic()
        assert mgf(spec, stat, 0.5) ** 2 == pytest.approx(mgf_squared(spec, stat, 0.5), rel=1e-12)
        assert mgf(spec, stat, 0.5) == pytest.approx(mgf_direct(spec, stat, 0.5), rel=1e-5)

    def test_trivial_arguments(self):
        for spec in ORACLE_ENSEMBLES:
            assert mgf(spec, _oracle_statistic(spec), 0.0) == 1.0
            assert mgf(spec, gaussian_statistic(amplitude=0.0), 1.3) == 1.0

    def test_wrong_beta(self):
        with pytest.raises(UnsupportedEnsembleError):
            mgf_squared(EnsembleSpec("gaussian", 2, 2), gaussian_statistic(), 0.5)
        with pytest.raises(UnsupportedEnsembleError):
            mgf_beta2(EnsembleSpec("gaussian", 1, 2), gaussian_statistic(), 0.5)

    def test_method_selection(self):
        small, large = EnsembleSpec("gaussian", 2, 4), EnsembleSpec("gaussian", 2, 40)
        assert resolve_method(small, "auto") == "nystrom"
        assert resolve_method(large, "auto") == "projected"
        with pytest.raises(DomainError):
            resolve_method(small, "monte-carlo")
        grid = make_grid(kernel_domain(small), 40)
        with pytest.raises(DomainError):
            mgf(small, gaussian_statistic(), 0.5, grid=grid, method="projected")

    def test_explicit_grid(self):
        spec = EnsembleSpec("gaussian", 2, 3)
        lo, hi = kernel_domain(spec)
        grid = make_grid((lo, hi), 40, breakpoints=list(np.linspace(lo, hi, 11)[1:-1]))
        stat = gaussian_statistic()
        assert mgf_beta2(spec, stat, 0.5, grid=grid) == pytest.approx(mgf_beta2(spec, stat, 0.5), rel=1e-8)


class TestFiniteMoments(object):

    def test_single_eigenvalue_gue(self):
        spec = EnsembleSpec("gaussian", 2, 1)
        report = finite_moments(spec, gaussian_statistic())
        assert report.method == "finite-N determinant"
        assert report.mean == pytest.approx(1.0 / math.sqrt(1.5), rel=1e-10)
        assert report.variance == pytest.approx(1.0 / math.sqrt(2.0) - 2.0 / 3.0, rel=1e-9)
        assert report.mean_error < 1e-8

    @pytest.mark.parametrize("spec", ORACLE_ENSEMBLES, ids=_ids(ORACLE_ENSEMBLES))
    def test_moments_match_derivatives_of_the_mgf(self, spec):
        stat = _oracle_statistic(spec)
        report = finite_moments(spec, stat)
        h = 1e-2
        log_plus = math.log(mgf(spec, stat, h))
        log_minus = math.log(mgf(spec, stat, -h))
        mean = -(log_plus - log_minus) / (2 * h)
        variance = (log_plus + log_minus) / h ** 2
        assert report.mean == pytest.approx(mean, rel=1e-4)
        assert report.variance == pytest.approx(variance, rel=1e-3)

    @pytest.mark.parametrize("spec", [EnsembleSpec("gaussian", 1, 6), EnsembleSpec("laguerre", 1, 6, 1.0)],
                             ids=["GOE6", "LOE6"])
    def test_both_discretizations_agree(self, spec):
        stat = scaled_statistic(spec, "sech")
        nystrom = finite_moments(spec, stat, method="nystrom")
        projected = finite_moments(spec, stat, method="projected")
        assert nystrom.mean == pytest.approx(projected.mean, rel=1e-6)
        assert nystrom.variance == pytest.approx(projected.variance, rel=1e-5)
        assert projected.discretization == "projected"

    @pytest.mark.parametrize("alpha", [0.0, 1.5])
    def test_loe_variance_matches_direct_integration(self, alpha):
        spec = EnsembleSpec("laguerre", 1, 2, alpha)
        stat = gaussian_statistic(center=1.5)
        h = 2e-2
        log_plus = math.log(mgf_direct(spec, stat, h))
        log_minus = math.log(mgf_direct(spec, stat, -h))
        report = finite_moments(spec, stat)
        assert report.mean == pytest.approx(-(log_plus - log_minus) / (2 * h), rel=1e-4)
        assert report.variance == pytest.approx((log_plus + log_minus) / h ** 2, rel=1e-3)

    def test_zero_statistic(self):
        report = finite_moments(EnsembleSpec("laguerre", 4, 3, 1.0), gaussian_statistic(amplitude=0.0))
        assert (report.mean, report.variance) == (0.0, 0.0)

    def test_unchecked_moments_have_no_error_estimate(self):
        report = finite_moments(EnsembleSpec("gaussian", 2, 2), gaussian_statistic(), check=False)
        assert report.mean_error is None
        assert report.variance_error is None


def test_trace_log_mgf():
    assert trace_log_mgf(0.0, 3.0, 2.0) == 1.0
    assert trace_log_mgf(0.5, 1.0, 2.0) == pytest.approx(math.exp(-0.25), rel=1e-15)
