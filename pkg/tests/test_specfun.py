import math

import numpy as np
import pytest
from scipy.special import eval_jacobi, jv

from gpswf import specfun
from gpswf.errors import DomainError


def series_bessel(nu, x, terms=120):
    """Independent ascending-series oracle for J_nu(x)."""
    acc = 0.0
    lg = math.lgamma
    for m in range(terms):
        t = ((-1.0) ** m) * math.exp((2 * m + nu) * math.log(x / 2.0)
                                     - lg(m + 1) - lg(m + nu + 1))
        acc += t
        if m > 0 and abs(t) <= 1e-20 * abs(acc):
            break
    return acc


class TestLnGamma:
    def test_factorial_points(self):
        assert specfun.ln_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
        assert specfun.ln_gamma(3.0) == pytest.approx(math.log(2.0), rel=1e-14)

    def test_half(self):
        # Gamma(1/2) = sqrt(pi)
        assert specfun.ln_gamma(0.5) == pytest.approx(0.57236494292470008707,
                                                      rel=1e-14)

    def test_against_stdlib(self):
        for x in [1e-3, 0.1, 0.7, 1.5, 6.0, 41.25, 500.0, 2000.0]:
            assert specfun.ln_gamma(x) == pytest.approx(math.lgamma(x),
                                                        rel=2e-14, abs=2e-14)

    def test_bracket_dense_grid(self):
        # sqrt(2e)((x+1/2)/e)^(x+1/2) <= G(x+1) <= sqrt(2pi)((x+1/2)/e)^(x+1/2)
        for x in np.linspace(0.01, 100.0, 500):
            lo, hi = specfun.gamma_bracket(float(x))
            val = math.exp(specfun.ln_gamma(float(x) + 1.0))
            assert lo <= val * (1 + 1e-13)
            assert val <= hi * (1 + 1e-13)

    def test_bracket_at_two(self):
        lo, hi = specfun.gamma_bracket(2.0)
        assert lo <= 2.0 <= hi  # Gamma(3) = 2

    def test_domain(self):
        with pytest.raises(DomainError):
            specfun.ln_gamma(0.0)
        with pytest.raises(DomainError):
            specfun.ln_gamma(-1.0)
        with pytest.raises(DomainError):
            specfun.ln_gamma(float("nan"))


class TestBesselJ:
    def test_half_order_closed_form(self):
        # J_{1/2}(x) = sqrt(2/(pi x)) sin x
        x = math.pi / 2.0
        assert specfun.bessel_j(0.5, x) == pytest.approx(2.0 / math.pi, rel=1e-13)

    def test_origin(self):
        assert specfun.bessel_j(0.0, 0.0) == 1.0
        assert specfun.bessel_j(2.5, 0.0) == 0.0

    def test_series_oracle_value(self):
        # frozen from the ascending-series oracle
        val = specfun.bessel_j(2.5, 5.0)
        assert val == pytest.approx(0.24037720111131735285, rel=1e-12)
        assert val == pytest.approx(series_bessel(2.5, 5.0), rel=1e-12)

    @pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5, 1.0, 3.25, 10.5, 30.0])
    @pytest.mark.parametrize("x", [0.05, 1.0, 4.0, 6.0])
    def test_series_oracle_sweep(self, nu, x):
        # the alternating oracle itself loses ~e^x/x digits, so keep x modest
        ref = series_bessel(nu, x)
        assert specfun.bessel_j(nu, x) == pytest.approx(ref, rel=1e-12,
                                                        abs=1e-280)

    def test_against_scipy_wide(self):
        # relative to the oscillation envelope: near zeros of J neither
        # implementation carries relative accuracy
        rng = np.random.default_rng(7)
        for _ in range(200):
            nu = rng.uniform(-0.5, 60.0)
            x = rng.uniform(0.0, 900.0)
            ref = jv(nu, x)
            mine = specfun.bessel_j(nu, x)
            envelope = math.sqrt(2.0 / (math.pi * max(x, 1.0)))
            assert abs(mine - ref) <= 5e-11 * max(abs(ref), 1e-2 * envelope)

    def test_large_argument(self):
        # the asymptotic branch with exact phase reduction
        for nu, x in [(0.5, 1e5), (2.5, 4096.0), (1.25, 2.0 ** 30)]:
            assert specfun.bessel_j(nu, x) == pytest.approx(
                jv(nu, x), rel=1e-9, abs=1e-13)

    def test_magnitude_bound(self):
        # |J_nu(x)| <= |x|^nu / (2^nu Gamma(nu+1))
        rng = np.random.default_rng(11)
        for _ in range(400):
            nu = rng.uniform(-0.5, 50.0)
            x = rng.uniform(0.0, 100.0)
            val = abs(specfun.bessel_j(nu, x))
            log_bound = (nu * math.log(max(x, 1e-300)) - nu * math.log(2.0)
                         - math.lgamma(nu + 1.0)) if x > 0 else 0.0
            if x == 0.0:
                assert val <= 1.0
            else:
                assert math.log(max(val, 1e-300)) <= log_bound + 1e-10

    def test_ladder_matches_scalar(self):
        lad = specfun.bessel_j_ladder(1.5, 30, 12.3)
        for j in [0, 3, 17, 30]:
            assert lad[j] == pytest.approx(jv(1.5 + j, 12.3), rel=1e-11,
                                           abs=1e-280)

    def test_domain(self):
        with pytest.raises(DomainError):
            specfun.bessel_j(-0.75, 1.0)
        with pytest.raises(DomainError):
            specfun.bessel_j(1.0, -2.0)


class TestJacobiNormalized:
    def test_degree_zero(self):
        for alpha in [0.0, 0.5, 1.5]:
            h0 = (2.0 ** (2 * alpha + 1) * math.gamma(alpha + 1) ** 2
                  / ((2 * alpha + 1) * math.gamma(2 * alpha + 1)))
            assert specfun.jacobi_normalized(0, alpha, 0.3) == pytest.approx(
                1.0 / math.sqrt(h0), rel=1e-14)

    def test_legendre_endpoint(self):
        # alpha = 0, k = 3 at x = 1: sqrt((2k+1)/2)
        assert specfun.jacobi_normalized(3, 0.0, 1.0) == pytest.approx(
            1.8708286933869706928, rel=1e-13)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.5])
    def test_orthonormality(self, alpha):
        rule = specfun.gauss_jacobi(alpha, 40)
        table = specfun.jacobi_table(alpha, 20, rule.nodes)
        gram = table @ (rule.weights[:, None] * table.T)
        assert np.max(np.abs(gram - np.eye(21))) < 1e-12

    def test_matches_scipy(self):
        alpha = 0.8
        x = np.linspace(-1.0, 1.0, 9)
        for k in range(8):
            hk = (2.0 ** (2 * alpha + 1) * math.gamma(k + alpha + 1) ** 2
                  / (math.factorial(k) * (2 * k + 2 * alpha + 1)
                     * math.gamma(k + 2 * alpha + 1)))
            ref = eval_jacobi(k, alpha, alpha, x) / math.sqrt(hk)
            mine = specfun.jacobi_normalized(k, alpha, x)
            np.testing.assert_allclose(mine, ref, rtol=1e-12, atol=1e-12)

    def test_derivative_recurrence(self):
        # derivative from the recurrence, checked against central differences
        alpha, k, x, h = 0.6, 7, 0.37, 1e-6
        d1 = specfun.jacobi_normalized(k, alpha, x, derivative=1)
        fd = (specfun.jacobi_normalized(k, alpha, x + h)
              - specfun.jacobi_normalized(k, alpha, x - h)) / (2 * h)
        assert d1 == pytest.approx(fd, rel=1e-8)

    def test_recurrence_stability_high_degree(self):
        vals = specfun.jacobi_table(0.5, 2000, np.array([-1.0, -0.5, 0.0, 0.7, 1.0]))
        assert np.all(np.isfinite(vals))

    def test_domain(self):
        with pytest.raises(DomainError):
            specfun.jacobi_normalized(2, 0.5, 1.5)
        with pytest.raises(DomainError):
            specfun.JacobiParams(-1.5)


class TestGaussJacobi:
    def test_single_node_legendre(self):
        rule = specfun.gauss_jacobi(0.0, 1)
        assert rule.nodes[0] == 0.0
        assert rule.weights[0] == pytest.approx(2.0, rel=1e-14)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.5, 3.2])
    @pytest.mark.parametrize("m", [1, 2, 7, 40])
    def test_weight_sum(self, alpha, m):
        rule = specfun.gauss_jacobi(alpha, m)
        assert rule.weights.sum() == pytest.approx(specfun.weight_mass(alpha),
                                                   rel=1e-12)

    def test_even_moment_beta_function(self):
        # int x^8 w_{1/2} dx = B(4.5, 1.5), via the log-gamma oracle
        rule = specfun.gauss_jacobi(0.5, 10)
        ref = math.exp(specfun.ln_beta(4.5, 1.5))
        assert ref == pytest.approx(0.085902924121595908864, rel=1e-13)
        assert rule.integrate(rule.nodes ** 8) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 2.5])
    def test_random_polynomial_exactness(self, alpha):
        rng = np.random.default_rng(5)
        m = 12
        rule = specfun.gauss_jacobi(alpha, m)
        coef = rng.normal(size=2 * m)  # degree 2m-1
        exact = 0.0
        for p in range(0, 2 * m, 2):
            exact += coef[p] * math.exp(specfun.ln_beta(p / 2.0 + 0.5,
                                                        alpha + 1.0))
        quad = rule.integrate(np.polynomial.polynomial.polyval(rule.nodes, coef))
        assert quad == pytest.approx(exact, rel=1e-12)

    def test_node_symmetry(self):
        for m in (9, 10):
            rule = specfun.gauss_jacobi(0.75, m)
            np.testing.assert_array_equal(rule.nodes, -rule.nodes[::-1])
            np.testing.assert_array_equal(rule.weights, rule.weights[::-1])
            assert np.all(np.diff(rule.nodes) > 0)
            assert np.all(rule.weights > 0)

    def test_domain(self):
        with pytest.raises(DomainError):
            specfun.gauss_jacobi(0.5, 0)
