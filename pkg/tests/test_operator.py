from __future__ import division

import math

import numpy as np
import pytest
from scipy import integrate

from rmt_linstats.ensembles import EnsembleSpec
from rmt_linstats.errors import DomainError, NumericalError
from rmt_linstats.operator import (
    GridFunction,
    KernelMatrix,
    ScaledStatistic,
    Symbol,
    TBuilder,
    TestFunction,
    apply_deriv,
    apply_eps,
    cumulants_from_T,
    fredholm_det,
    make_grid,
    rank_one,
)
from rmt_linstats.orthopoly import hermite_phi


@pytest.fixture
def panel_grid():
    breaks = list(np.linspace(-12.0, 12.0, 11)[1:-1])
    return make_grid((-12.0, 12.0), 40, breakpoints=breaks)


@pytest.fixture
def gaussian_values(panel_grid):
    return np.exp(-(panel_grid.nodes - 0.3) ** 2)


def test_legendre_grid_panels_and_weights():
    grid = make_grid((-2.0, 3.0), [6, 8, 5], breakpoints=[0.0, 1.0])
    assert len(grid) == 19
    assert len(grid.panels) == 3
    assert np.all(np.diff(grid.nodes) > 0)
    assert grid.integrate(grid.nodes ** 4) == pytest.approx((3.0 ** 5 + 2.0 ** 5) / 5.0, rel=1e-13)


def test_breakpoints_outside_the_domain_are_ignored():
    grid = make_grid((0.0, 1.0), 4, breakpoints=[-1.0, 0.5, 2.0, 1.0])
    assert len(grid.panels) == 2


def test_cumulative_matrix_is_exact_for_polynomials():
    grid = make_grid((-2.0, 3.0), 8, breakpoints=[-0.5, 1.0])
    x = grid.nodes
    C = grid.cumulative_matrix()
    assert np.allclose(C.dot(x * x), (x ** 3 + 8.0) / 3.0, atol=1e-12)


def test_square_transform_grid():
    grid = make_grid((0.0, 40.0), 30, breakpoints=[1.0, 9.0], transform="square")
    x = grid.nodes
    assert grid.integrate(np.sqrt(x) * np.exp(-x)) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-10)
    assert np.allclose(grid.cumulative_matrix().dot(np.ones_like(x)), x, atol=1e-11)
    D = grid.deriv_matrix()
    assert np.allclose(D.dot(x ** 2), 2.0 * x, atol=1e-8)


def test_classical_grids_integrate_dx():
    hermite = make_grid(None, 40, scheme="hermite")
    assert hermite.integrate(np.exp(-hermite.nodes ** 2)) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    laguerre = make_grid(None, 40, scheme="laguerre")
    assert laguerre.integrate(np.exp(-laguerre.nodes)) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(DomainError):
        hermite.deriv_matrix()
    # classical rules fall back to the sign rule for eps
    sign = hermite.eps_kernel("sign")
    assert np.array_equal(hermite.eps_matrix(), sign * hermite.weights[None, :])


@pytest.mark.parametrize("kwargs", [
    {"domain": (-np.inf, 1.0), "n_nodes": 10},
    {"domain": (1.0, 1.0), "n_nodes": 10},
    {"domain": (0.0, 1.0), "n_nodes": 1},
    {"domain": (-1.0, 1.0), "n_nodes": 10, "transform": "square"},
    {"domain": (0.0, 1.0), "n_nodes": 10, "transform": "cube"},
    {"domain": (0.0, 1.0), "n_nodes": [4, 4], "breakpoints": [0.2, 0.6]},
    {"domain": (0.0, 1.0), "n_nodes": 10, "scheme": "chebyshev"},
    {"domain": None, "n_nodes": 10, "scheme": "hermite", "breakpoints": [0.0]},
])
def test_make_grid_rejects(kwargs):
    with pytest.raises(DomainError):
        make_grid(**kwargs)


def test_eps_inverts_deriv(panel_grid, gaussian_values):
    D = panel_grid.deriv_matrix()
    eps = panel_grid.eps_matrix()
    assert np.max(np.abs(D.dot(eps.dot(gaussian_values)) - gaussian_values)) < 1e-6
    assert np.max(np.abs(eps.dot(D.dot(gaussian_values)) - gaussian_values)) < 1e-6


def test_eps_kernel_is_exactly_antisymmetric(panel_grid):
    for rule in ("spectral", "sign"):
        kernel = panel_grid.eps_kernel(rule)
        assert np.max(np.abs(kernel + kernel.T)) == 0.0
    with pytest.raises(DomainError):
        panel_grid.eps_kernel("trapezoid")


def test_eps_of_a_gaussian_is_an_error_function(panel_grid, gaussian_values):
    g = GridFunction(panel_grid, gaussian_values)
    expected = 0.5 * math.sqrt(math.pi) * np.vectorize(math.erf)(panel_grid.nodes - 0.3)
    result = apply_eps(g)
    assert np.allclose(result.values, expected, atol=1e-8)
    assert np.array_equal(result.derivative, gaussian_values)
    # the first-order sign rule agrees only roughly
    assert np.allclose(apply_eps(g, rule="sign").values, expected, atol=0.1)


def test_deriv_commutator(panel_grid, gaussian_values):
    x = panel_grid.nodes
    f = TestFunction("sech", 1.0, 0.5, 1.5)
    g = GridFunction(panel_grid, gaussian_values)
    fg = GridFunction(panel_grid, f(x) * gaussian_values)
    commutator = apply_deriv(fg).values - f(x) * apply_deriv(g).values
    assert np.max(np.abs(commutator - f.derivative(x) * gaussian_values)) < 1e-6


def test_grid_function_arithmetic(panel_grid):
    x = panel_grid.nodes
    f = GridFunction(panel_grid, np.sin(x), np.cos(x))
    g = GridFunction(panel_grid, x, np.ones_like(x))
    product = f * g
    same = GridFunction.from_callable(panel_grid, np.sin, np.cos)
    assert np.array_equal(same.values, f.values)
    assert np.array_equal(same.derivative, f.derivative)
    assert np.allclose(product.derivative, np.cos(x) * x + np.sin(x))
    assert np.array_equal(apply_deriv(product).values, product.derivative)
    assert np.array_equal((2.0 * f).derivative, 2.0 * np.cos(x))
    assert (f - f).integral() == 0.0
    assert (f + g).derivative is not None
    assert (f + GridFunction(panel_grid, x)).derivative is None


def test_grid_function_checks(panel_grid):
    with pytest.raises(DomainError):
        GridFunction(panel_grid, np.zeros(3))
    other = make_grid((0.0, 1.0), 5)
    with pytest.raises(DomainError):
        GridFunction(panel_grid, panel_grid.nodes) + GridFunction(other, other.nodes)


def test_fredholm_det_matches_numpy():
    rng = np.random.default_rng(3)
    matrix = 0.2 * rng.normal(size=(12, 12))
    assert fredholm_det(matrix) == pytest.approx(np.linalg.det(np.eye(12) + matrix), rel=1e-12)
    assert fredholm_det(KernelMatrix(None, matrix)) == pytest.approx(fredholm_det(matrix), rel=1e-15)
    assert fredholm_det(np.zeros((0, 0))) == 1.0


def test_sylvester_identity():
    rng = np.random.default_rng(0)
    for n, m in ((3, 7), (9, 2), (5, 5)):
        A = rng.normal(size=(n, m)) / math.sqrt(n * m)
        B = rng.normal(size=(m, n))
        assert fredholm_det(A.dot(B)) == pytest.approx(fredholm_det(B.dot(A)), rel=1e-9)


def test_fredholm_det_failure_modes():
    with pytest.raises(NumericalError):
        fredholm_det(1e10 * np.eye(100))
    with pytest.warns(UserWarning):
        assert fredholm_det(-np.eye(4)) == 0.0
    with pytest.raises(NumericalError):
        KernelMatrix(None, np.array([[np.nan]]))
    with pytest.raises(DomainError):
        KernelMatrix(None, np.zeros((2, 3)))


def test_kernel_matrix_operations(panel_grid):
    x = panel_grid.nodes
    u = GridFunction(panel_grid, hermite_phi(0, x))
    v = GridFunction(panel_grid, x * hermite_phi(0, x))
    T = rank_one(u, v)
    assert T.trace() == pytest.approx(0.0, abs=1e-14)
    # rank one: det(I + u v) = 1 + int u v
    assert T.fredholm_det() == pytest.approx(1.0, abs=1e-12)
    T = rank_one(u, u)
    assert T.trace() == pytest.approx(1.0, rel=1e-12)
    assert (T @ T).trace() == pytest.approx(1.0, rel=1e-12)
    assert T.apply(u).values == pytest.approx(u.values, abs=1e-12)
    assert np.allclose(rank_one(u, v).transpose().kernel_values, rank_one(v, u).kernel_values)
    assert (T - T).trace() == 0.0
    assert (2 * T + KernelMatrix.zeros(panel_grid)).trace() == pytest.approx(2.0, rel=1e-12)


def test_symbol_on_grid(panel_grid):
    m = np.cos(panel_grid.nodes)
    p = np.exp(-panel_grid.nodes ** 2)
    q = np.sin(panel_grid.nodes)
    E = panel_grid.eps_matrix()
    assert np.array_equal(Symbol(m).on_grid(panel_grid), np.diag(m))
    P = (Symbol(m, [(2.0, None, p)]) + Symbol(np.zeros_like(m), [(0.5, q, p)])).on_grid(panel_grid)
    expected = np.diag(m) - 2.0 * E * p[None, :] - 0.5 * q[:, None] * E * p[None, :]
    assert np.allclose(P, expected)
    assert (Symbol(m) + None).multiplier is m


def test_symbol_edge_column(panel_grid):
    m = np.cos(panel_grid.nodes)
    q = np.sin(panel_grid.nodes)
    assert Symbol(m).edge_column() is None
    symbol = Symbol(m, edge_terms=[(1.0, None, 0.4)]) + Symbol(np.zeros_like(m), edge_terms=[(2.0, q, -0.5)])
    assert len(symbol.edge_terms) == 2
    assert np.allclose(symbol.edge_column(), -0.2 + 0.5 * q)
    assert np.array_equal(symbol.on_grid(panel_grid), np.diag(m))


def test_tbuilder_expands_the_edge_mass():
    F = np.array([0.3, 0.1])
    Fp = np.array([0.0, -0.2])

    def apply_kernel(symbol):
        total = sum(mass * (1.0 if q is None else q[0]) for _, q, mass in symbol.edge_terms)
        return KernelMatrix(None, np.array([[total]]))

    def linear(f, fp, edge):
        return Symbol(f, edge_terms=[(1.0, None, edge)])

    def quadratic(f, fp, edge):
        return Symbol(f * f, edge_terms=[(1.0, f, edge)])

    builder = TBuilder(apply_kernel, linear, quadratic, F, Fp, F_edge=0.8)
    # f(0) (1 + f(x_0)) = expm1(-0.8 lam) exp(-0.3 lam)
    assert builder(0.5).trace() == pytest.approx(math.expm1(-0.4) * math.exp(-0.15), rel=1e-14)
    T1, T2 = builder.coefficients()
    assert T1.trace() == pytest.approx(-0.8, rel=1e-14)
    assert T2.trace() == pytest.approx(0.32 + 0.24, rel=1e-14)


def _projection_builder(grid, F, Fp):
    phi0 = hermite_phi(0, grid.nodes)
    kernel = np.outer(phi0, phi0)

    def apply_kernel(symbol):
        return KernelMatrix.from_kernel(grid, kernel * symbol.multiplier[None, :])

    def linear(f, fp):
        return Symbol(f)

    return TBuilder(apply_kernel, linear, None, F, Fp)


def test_tbuilder_reproduces_the_one_point_mgf(panel_grid):
    x = panel_grid.nodes
    stat = TestFunction("gaussian", 1.0, 0.2, 0.8)
    builder = _projection_builder(panel_grid, stat(x), stat.derivative(x))
    density = hermite_phi(0, x) ** 2
    for lam in (0.3, -0.5, 1.7):
        expected = panel_grid.integrate(density * np.exp(-lam * stat(x)))
        assert builder(lam).fredholm_det() == pytest.approx(expected, rel=1e-12)


def test_cumulants_from_T(panel_grid):
    x = panel_grid.nodes
    stat = TestFunction("sech", 2.0, -0.4, 1.0)
    builder = _projection_builder(panel_grid, stat(x), stat.derivative(x))
    density = hermite_phi(0, x) ** 2
    mean = panel_grid.integrate(density * stat(x))
    second = panel_grid.integrate(density * stat(x) ** 2)
    c1, c2 = cumulants_from_T(builder)
    assert c1 == pytest.approx(-mean, rel=1e-12)
    assert c2 == pytest.approx(0.5 * (second - mean ** 2), rel=1e-10)
    assert cumulants_from_T(builder, order=1) == (c1, None)
    with pytest.raises(DomainError):
        cumulants_from_T(builder, order=3)


@pytest.mark.parametrize("family", ["gaussian", "sech", "bump", "exponential"])
def test_statistic_families(family):
    stat = TestFunction(family, 1.5, 0.0 if family == "exponential" else 0.4, 0.7)
    x = np.linspace(0.1, 4.0, 30)
    h = 1e-6
    numeric = (stat(x + h) - stat(x - h)) / (2 * h)
    assert np.allclose(stat.derivative(x), numeric, atol=1e-7)
    lo = 0.0 if family == "exponential" else -np.inf
    assert stat.total() == pytest.approx(integrate.quad(stat, lo, np.inf)[0], rel=1e-9)
    support = stat.support(1e-12)
    assert abs(stat(support[1])) <= 1.5e-12 * 1.0001
    assert stat.half_line_only == (family == "exponential")
    assert stat.to_dict()["family"] == family


@pytest.mark.parametrize("args", [("cosine",), ("gaussian", 1.0, 0.0, 0.0), ("exponential", 1.0, 1.0, 1.0)])
def test_statistic_rejects(args):
    with pytest.raises(DomainError):
        TestFunction(*args)


def test_zero_statistic():
    assert TestFunction("bump", 0.0).is_zero
    assert not TestFunction("bump", 1.0).is_zero


def test_scaled_statistic():
    spec = EnsembleSpec("laguerre", 2, 5, 1.0)
    stat = TestFunction("gaussian", 1.0, 2.0, 0.5)
    scaled = ScaledStatistic(stat, spec.scaling)
    x = np.array([0.05, 0.2, 0.45, 1.0])
    assert np.allclose(scaled(x), stat(np.sqrt(20.0 * x)))
    h = 1e-7
    assert np.allclose(scaled.derivative(x), (scaled(x + h) - scaled(x - h)) / (2 * h), atol=1e-5)
    # the hard-edge rule has an infinite derivative at 0, which is masked
    assert scaled.derivative(np.array([0.0]))[0] == 0.0
    lo, hi = scaled.support()
    assert spec.scaling(hi) == pytest.approx(stat.support()[1], rel=1e-12)
    assert scaled.to_dict()["scaling"] == {"kind": "sqrt", "c": 20.0}
