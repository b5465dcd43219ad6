from __future__ import division

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, special

from rmt_linstats.errors import DomainError
from rmt_linstats.specfun import (
    bessel_j,
    bessel_j_integral,
    bessel_j_prime,
    hyp2f1_lemma22,
    lemma23_lhs,
    log_gamma,
    log_stirling_gamma,
    sine_integral,
)


@pytest.mark.parametrize("alpha", ["1/2", 1, 2, "7/3"])
def test_binomial_sum_is_exact_through_n_12(alpha):
    for n in range(13):
        assert lemma23_lhs(n, alpha) == Fraction(1, math.factorial(2 * n + 1))


def test_binomial_sum_accepts_fractions():
    assert lemma23_lhs(4, Fraction(3, 5)) == Fraction(1, math.factorial(9))


def test_binomial_sum_rejects_non_rational_alpha():
    with pytest.raises(DomainError):
        lemma23_lhs(1, complex(1, 1))


def test_hyp2f1_asymptotic_trend():
    errors = [abs(hyp2f1_lemma22(N) * (-1) ** N * math.sqrt(8.0 * N / math.pi) - 1.0)
              for N in (100, 1000, 10000)]
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] <= 0.05


def test_hyp2f1_recurrence_matches_exact_and_quadrature():
    for N in (5, 17, 40):
        exact = hyp2f1_lemma22(N, exact=True)
        assert isinstance(exact, Fraction)
        assert hyp2f1_lemma22(N) == pytest.approx(float(exact), rel=1e-12)
        assert hyp2f1_lemma22(N, method="quadrature") == pytest.approx(float(exact), rel=1e-10)


def test_hyp2f1_sign_alternates():
    values = [hyp2f1_lemma22(N) for N in range(1, 12)]
    assert all(v * (-1) ** N > 0 for N, v in enumerate(values, 1))


def test_stirling_correction_term():
    for n in (10, 100, 1000):
        assert 12 * n * (log_gamma(n) - log_stirling_gamma(n)) == pytest.approx(1.0, abs=1e-3)


def test_log_gamma_agrees_with_factorials():
    for n in range(1, 20):
        assert log_gamma(n) == pytest.approx(math.log(math.factorial(n - 1)), rel=1e-12, abs=1e-14)


def test_bessel_j_preserves_shape():
    x = np.linspace(0.0, 10.0, 12).reshape(3, 4)
    values = bessel_j(1.5, x)
    assert values.shape == (3, 4)
    assert np.allclose(values, special.jv(1.5, x), rtol=1e-14, atol=1e-16)


def test_bessel_j_prime_against_finite_differences():
    x = np.linspace(0.5, 20.0, 40)
    h = 1e-6
    for nu in (0.0, 0.5, 2.3):
        numeric = (bessel_j(nu, x + h) - bessel_j(nu, x - h)) / (2 * h)
        assert np.allclose(bessel_j_prime(nu, x), numeric, atol=1e-8)


@pytest.mark.parametrize("nu", [-0.5, 0.0, 1.0, 2.5])
def test_bessel_j_integral_against_adaptive_quadrature(nu):
    for x in (0.5, 3.0, 17.0, 60.0):
        expected = integrate.quad(lambda t: special.jv(nu, t), 0.0, x, limit=400, epsabs=1e-13)[0]
        assert bessel_j_integral(nu, x) == pytest.approx(expected, abs=1e-9)


def test_bessel_j_integral_tends_to_one():
    assert bessel_j_integral(1.0, 2000.0) == pytest.approx(1.0, abs=0.05)


def test_bessel_j_integral_domain():
    with pytest.raises(DomainError):
        bessel_j_integral(-1.0, 1.0)
    with pytest.raises(DomainError):
        bessel_j_integral(0.0, -1.0)
    with pytest.raises(DomainError):
        bessel_j_prime(0.0, -1.0)


def test_sine_integral_is_odd_and_tends_to_half_pi():
    x = np.linspace(0.0, 50.0, 101)
    assert np.array_equal(sine_integral(-x), -sine_integral(x))
    for big in (1e2, 1e3, 1e4):
        assert abs(sine_integral(big) - math.pi / 2) <= 1.05 / big
