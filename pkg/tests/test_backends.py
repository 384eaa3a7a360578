"""Parity between the compiled kernels and the pure-NumPy fallback."""

import os

import numpy as np
import pytest

from gpswf import _kernels_py, backend, specfun

_kernels = pytest.importorskip("gpswf._kernels",
                               reason="compiled extension not built")


def test_active_backend_reported():
    assert backend.backend_name() in ("cython", "python")
    if not os.environ.get("GPSWF_PURE_PYTHON"):
        assert backend.HAVE_EXTENSION


@pytest.mark.parametrize("n", [1, 2, 17, 120])
def test_tridiag_parity(n):
    rng = np.random.default_rng(n)
    d = rng.normal(size=n)
    e = rng.normal(size=n - 1)
    w1, z1 = _kernels.tridiag_eig(d, e)
    w2, z2 = _kernels_py.tridiag_eig(d, e)
    scale = np.max(np.abs(w2)) if n > 0 else 1.0
    np.testing.assert_allclose(w1, w2, atol=1e-13 * max(scale, 1.0))
    np.testing.assert_allclose(np.abs(z1), np.abs(z2), atol=1e-10)


@pytest.mark.parametrize("nderiv", [0, 1, 2])
def test_jacobi_series_parity(nderiv):
    alpha = 0.75
    m = 80
    rng = np.random.default_rng(0)
    coef = rng.normal(size=m)
    coef /= np.linalg.norm(coef)
    rec = specfun.jacobi_recurrence(alpha, m + 2)
    p0 = specfun.jacobi_norm0(alpha)
    x = np.linspace(-1.0, 1.0, 301)
    out1 = _kernels.jacobi_series(coef, rec, p0, x, nderiv)
    out2 = _kernels_py.jacobi_series(coef, rec, p0, x, nderiv)
    np.testing.assert_allclose(out1, out2, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("x", [0.0, 0.05, 1.0, 15.7, 120.0, 369.0, 500.0,
                               4096.0, 2.0 ** 25])
@pytest.mark.parametrize("nu0", [-0.5, 0.0, 0.25])
def test_bessel_ladder_parity(nu0, x):
    l1 = _kernels.bessel_ladder(nu0, 64, x)
    l2 = _kernels_py.bessel_ladder(nu0, 64, x)
    np.testing.assert_allclose(l1, l2, rtol=5e-13, atol=1e-300)
