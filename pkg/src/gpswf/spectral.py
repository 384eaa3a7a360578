"""Eigenvalues of the weighted finite Fourier transform and decay bounds.

The transform F_c f(x) = int_{-1}^{1} e^{i c x y} f(y) w_a(y) dy maps the
orthonormal Jacobi polynomial Jt_k to a closed-form Bessel expression with
phase i^k.  mu_n comes from the boundary identity at x = 0 (only the lowest
Jacobi mode survives there), and the expansion summed over a coefficient
vector gives F_c psi_n exactly, which verifies mu_n as the ratio
(F_c psi_n)(x*) / psi_n(x*) at probe points.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from .errors import ConsistencyError, DomainError

__all__ = [
    "SpectrumEntry",
    "DecayVerdict",
    "fc_on_jacobi",
    "fourier_series_value",
    "transform_of_psi",
    "compute_spectrum",
    "decay_bound_check",
    "mu_decay_constant",
    "lambda_decay_constant",
    "concentration_kernel",
    "apply_concentration",
    "kernel_trace",
    "lambda_bound_tail",
    "dchi_dc",
]


@lru_cache(maxsize=64)
def _gammas(alpha, kmax):
    """gamma_k = Gamma(k+a+1) / (Gamma(k+1) sqrt(h_k)) for k = 0..kmax."""
    k = np.arange(kmax + 1, dtype=float)
    lg = np.vectorize(math.lgamma)
    out = np.exp(-(alpha + 0.5) * math.log(2.0)
                 + 0.5 * (np.log(2.0 * k + 2.0 * alpha + 1.0)
                          + lg(k + 2.0 * alpha + 1.0) - lg(k + 1.0)))
    out.setflags(write=False)
    return out


def _fc_series(alpha, coef, parity, u):
    """Transform sum and its conditioning scale (largest term magnitude).

    The terms alternate in sign and their peak can tower over the sum, so the
    reduction uses exactly rounded summation; the remaining error is the
    roundoff of the terms themselves, about eps * scale.
    """
    coef = np.asarray(coef, dtype=float)
    kmax = coef.size - 1
    ladder = specfun.bessel_j_ladder(alpha + 0.5, kmax, u)
    terms = coef * _gammas(alpha, kmax)[: kmax + 1] * ladder
    pref = math.sqrt(math.pi) * (2.0 / u) ** (alpha + 0.5)
    scale = pref * float(np.max(np.abs(terms)))
    k = np.arange(kmax + 1)
    if parity == 0:
        signs = np.where(k % 4 == 0, 1.0, np.where(k % 4 == 2, -1.0, 0.0))
        return complex(pref * math.fsum(signs * terms), 0.0), scale
    signs = np.where(k % 4 == 1, 1.0, np.where(k % 4 == 3, -1.0, 0.0))
    return 1j * (pref * math.fsum(signs * terms)), scale


def fourier_series_value(alpha, coef, parity, u):
    """sqrt(pi) (2/u)^(a+1/2) sum_k coef_k i^k gamma_k J_{k+a+1/2}(u).

    This is int e^{iuy} (sum_k coef_k Jt_k)(y) w_a(y) dy for a coefficient
    vector supported on Jacobi indices of the given parity; u > 0.
    """
    return _fc_series(alpha, coef, parity, u)[0]


def fc_on_jacobi(alpha, c, k, x):
    """(F_c Jt_k)(x) = i^k sqrt(pi) (2/(c|x|))^(a+1/2) G(k+a+1)/(G(k+1) sqrt(h_k))
    J_{k+a+1/2}(c|x|), extended to x < 0 by parity and to x = 0 by the
    small-argument limit."""
    if not math.isfinite(c) or c <= 0.0:
        raise DomainError(f"bandwidth c must be > 0, got {c!r}")
    if abs(x) > 1.0 + 8.0 * np.finfo(float).eps:
        raise DomainError("transform evaluation requires |x| <= 1")
    if x == 0.0:
        if k == 0:
            val = (math.sqrt(math.pi) * float(_gammas(alpha, 0)[0])
                   * math.exp(-specfun.ln_gamma(alpha + 1.5)))
            return complex(val)
        return 0.0j
    coef = np.zeros(k + 1)
    coef[k] = 1.0
    val = fourier_series_value(alpha, coef, k % 2, c * abs(x))
    # parity: (F_c Jt_k)(-x) = (-1)^k (F_c Jt_k)(x)
    if x < 0.0 and k % 2 == 1:
        val = -val
    return val


def transform_of_psi(basis, n, x):
    """(F_c psi_n)(x) as a complex number, by the exact Bessel expansion."""
    if x == 0.0:
        if n % 2 == 1:
            return 0.0j
        coef = basis.full_coefficients(n)
        return complex(coef[0]) * fc_on_jacobi(basis.alpha, basis.c, 0, 0.0)
    coef = basis.full_coefficients(n)
    out = fourier_series_value(basis.alpha, coef, n % 2, basis.c * abs(x))
    if x < 0.0 and n % 2 == 1:
        out = -out
    return out


@dataclass(frozen=True)
class DecayVerdict:
    n: int
    applicable: bool
    log_mu_bound: float
    log_lambda_bound: float
    margin_mu: float
    margin_lambda: float

    @property
    def ok(self):
        return (not self.applicable) or (self.margin_mu >= 0.0
                                         and self.margin_lambda >= 0.0)


def mu_decay_constant(alpha):
    """k_a = (2/e)^(1 + a/2) pi sqrt(Gamma(a+1))."""
    return ((2.0 / math.e) ** (1.0 + 0.5 * alpha) * math.pi
            * math.exp(0.5 * specfun.ln_gamma(alpha + 1.0)))


def lambda_decay_constant(alpha):
    """K_a = (pi/2) (2/e)^(a+2) Gamma(a+1); equals k_a^2 / (2 pi)."""
    return (0.5 * math.pi * (2.0 / math.e) ** (alpha + 2.0)
            * math.exp(specfun.ln_gamma(alpha + 1.0)))


def decay_bound_check(entry, alpha, c):
    """Super-exponential decay bounds on |mu_n| and lambda_n, in log space.

    Applicable for n > (e c + 1)/2; inapplicable entries return a flagged
    verdict with infinite margins.
    """
    n = entry.n
    applicable = n > (math.e * c + 1.0) / 2.0
    if not applicable:
        return DecayVerdict(n=n, applicable=False, log_mu_bound=math.inf,
                            log_lambda_bound=math.inf, margin_mu=math.inf,
                            margin_lambda=math.inf)
    big_l = math.log((2.0 * n - 1.0) / (math.e * c))
    log_mu_bound = (math.log(mu_decay_constant(alpha))
                    - (0.5 * alpha + 1.0) * math.log(c)
                    - math.log(big_l) - (n + 0.5 * alpha) * big_l)
    log_lambda_bound = (math.log(lambda_decay_constant(alpha))
                        - (alpha + 1.0) * math.log(c)
                        - 2.0 * math.log(big_l) - (2.0 * n + alpha) * big_l)
    log_mu = math.log(entry.mu_abs) if entry.mu_abs > 0.0 else -math.inf
    log_lam = math.log(entry.lam) if entry.lam > 0.0 else -math.inf
    return DecayVerdict(n=n, applicable=True, log_mu_bound=log_mu_bound,
                        log_lambda_bound=log_lambda_bound,
                        margin_mu=log_mu_bound - log_mu,
                        margin_lambda=log_lambda_bound - log_lam)


@dataclass(frozen=True)
class SpectrumEntry:
    """Transform eigenvalue record: lambda = (c / 2 pi) |mu|^2 by construction."""

    n: int
    chi: float
    mu_abs: float
    mu_phase: complex
    lam: float
    bound: DecayVerdict | None = None
    probe_spread: float = 0.0


def _probe_points(basis, n, count):
    # Chebyshev candidates in (0, 1) where |psi_n| is a sizable fraction of
    # its peak; prefer the smallest such x, where the Bessel expansion of the
    # transform is best conditioned.  The grid must be dense enough to catch
    # oscillation tops near x = 0 for moderately large n.
    npts = max(256, 8 * basis.nmax)
    grid = np.cos(math.pi * (2.0 * np.arange(npts) + 1.0) / (4.0 * npts))
    vals = basis.psi(n, grid, 0)[0]
    peak = float(np.max(np.abs(vals)))
    idx = np.nonzero(np.abs(vals) > 0.1 * peak)[0]
    if idx.size < count:
        idx = np.argsort(-np.abs(vals))[:count]
    xs = np.sort(grid[idx])
    return xs[:count]


def _bottom_coefficient(basis, n):
    """First expansion coefficient of psi_n, refined for deep eigenvectors.

    Below its peak an eigenvector of the tridiagonal system is the solution
    that grows in the upward direction, so marching the three-term recurrence
    up from row 0 and matching at the peak entry recovers the tiny bottom
    entries with full relative accuracy (the raw eigensolver output only
    carries absolute accuracy there).
    """
    from .basis import assemble_eigensystem

    beta = basis.beta[n]
    i_pk = int(np.argmax(np.abs(beta)))
    if i_pk == 0 or abs(beta[0]) > 1e-8:
        return float(beta[0])
    tri = assemble_eigensystem(basis.alpha, basis.c, basis.trunc, n % 2)
    d, e = tri.diag, tri.offdiag
    chi = float(basis.chi[n])
    w_prev = 1.0
    w_cur = (chi - d[0]) / e[0]
    log_scale = 0.0
    for i in range(1, i_pk):
        w_next = ((chi - d[i]) * w_cur - e[i - 1] * w_prev) / e[i]
        w_prev, w_cur = w_cur, w_next
        if abs(w_cur) > 1e250:
            w_prev /= 1e250
            w_cur /= 1e250
            log_scale += 250.0 * math.log(10.0)
    if w_cur == 0.0:
        return float(beta[0])
    t = math.log(abs(beta[i_pk])) - math.log(abs(w_cur)) - log_scale
    if t < -745.0:
        return 0.0
    return math.copysign(math.exp(t), beta[i_pk] * w_cur)


def _mu_from_boundary(basis, n):
    """mu_n from the x = 0 identities: only the k = 0 (resp. k = 1) Jacobi
    mode contributes to (F_c psi_n)(0) (resp. its derivative), so

        even n:  mu_n psi_n(0)  = beta_0 sqrt(m0)
        odd n:   mu_n psi_n'(0) = i c a_1 beta_1 sqrt(m0)

    with m0 the weight mass and a_1 the first recurrence coefficient.
    """
    sqrt_m0 = math.sqrt(specfun.weight_mass(basis.alpha))
    bottom = _bottom_coefficient(basis, n)
    at0 = basis.psi(n, np.array([0.0]), 1)
    if n % 2 == 0:
        return complex(bottom * sqrt_m0 / float(at0[0, 0]))
    a1 = float(specfun.jacobi_recurrence(basis.alpha, 2)[1])
    return 1j * basis.c * a1 * bottom * sqrt_m0 / float(at0[1, 0])


def _validate_phase(basis, tol=1e-8):
    # one-off check of the i^k phase convention against direct quadrature
    rule = specfun.gauss_jacobi(basis.alpha, 80 + int(basis.c))
    for k in (0, 1):
        for x0 in (0.37, 0.61):
            direct = np.dot(rule.weights,
                            np.exp(1j * basis.c * x0 * rule.nodes)
                            * specfun.jacobi_table(basis.alpha, k, rule.nodes)[k])
            closed = fc_on_jacobi(basis.alpha, basis.c, k, x0)
            if abs(direct - closed) > tol * max(1.0, abs(direct)):
                raise ConsistencyError(
                    f"transform phase validation failed at k={k}: "
                    f"quadrature {direct:.3e} vs closed form {closed:.3e}")


def compute_spectrum(basis, nmax=None, n_probes=5, rel_tol=1e-8,
                     validate_phase=True, bound_checks=True):
    """Eigenvalues mu_n (complex) and lambda_n for n < nmax.

    The primary value comes from the exact boundary identity at x = 0, which
    stays fully accurate however small mu_n gets.  It is then checked against
    the ratios (F_c psi_n)(x*) / psi_n(x*) at probe points where |psi_n| is a
    sizable fraction of its maximum; the ratios must agree with mu to
    ``rel_tol`` relative plus the roundoff floor of the alternating Bessel
    sum (its largest term over |psi(x*)| times machine epsilon), otherwise a
    consistency error is raised.
    """
    nmax = basis.nmax if nmax is None else min(nmax, basis.nmax)
    if validate_phase:
        _validate_phase(basis)
    eps = np.finfo(float).eps
    entries = []
    prev_lam = None
    for n in range(nmax):
        mu = _mu_from_boundary(basis, n)
        mu_abs = abs(mu)
        probes = _probe_points(basis, n, n_probes)
        psi_vals = basis.psi(n, probes, 0)[0]
        spread = 0.0
        for x, v in zip(probes, psi_vals):
            val, scale = _fc_series(basis.alpha, basis.full_coefficients(n),
                                    n % 2, basis.c * float(x))
            ratio = val / v
            floor = 1024.0 * eps * scale / abs(v)
            dev = abs(ratio - mu)
            if dev > rel_tol * mu_abs + floor:
                raise ConsistencyError(
                    f"mu probe spread {dev / max(mu_abs, 1e-300):.3e} exceeds "
                    f"{rel_tol:.1e} at n={n} (insufficient truncation?)")
            spread = max(spread, dev)
        lam = basis.c / (2.0 * math.pi) * mu_abs ** 2
        if lam > 1.0 + 1e-9:
            raise ConsistencyError(f"lambda_{n} = {lam!r} exceeds 1")
        if prev_lam is not None and lam > prev_lam * (1.0 + 1e-12):
            raise ConsistencyError(f"lambda sequence not decreasing at n={n}")
        prev_lam = lam
        phase = mu / mu_abs if mu_abs > 0.0 else complex(1.0)
        bound = decay_bound_check(
            SpectrumEntry(n=n, chi=float(basis.chi[n]), mu_abs=mu_abs,
                          mu_phase=phase, lam=lam),
            basis.alpha, basis.c) if bound_checks else None
        entries.append(SpectrumEntry(n=n, chi=float(basis.chi[n]), mu_abs=mu_abs,
                                     mu_phase=phase, lam=lam, bound=bound,
                                     probe_spread=spread))
    return entries


# ---------------------------------------------------------------------------
# Concentration operator (c / 2 pi) F* F applied by quadrature.
# ---------------------------------------------------------------------------

def concentration_kernel(alpha, u):
    """K_a(u) = sqrt(pi) 2^(a+1/2) Gamma(a+1) J_{a+1/2}(u) / u^(a+1/2).

    Even and entire in u; the removable singularity at u = 0 is evaluated by
    the ascending series.
    """
    u = np.abs(np.atleast_1d(np.asarray(u, dtype=float)))
    out = np.empty_like(u)
    pref = math.sqrt(math.pi) * math.exp((alpha + 0.5) * math.log(2.0)
                                         + specfun.ln_gamma(alpha + 1.0))
    small = u <= 12.0
    if np.any(small):
        us = u[small]
        # J_nu(u)/u^nu = sum_m (-1)^m u^(2m) / (2^(2m+nu) m! Gamma(m+nu+1))
        term = np.full(us.shape,
                       math.exp(-(alpha + 0.5) * math.log(2.0)
                                - specfun.ln_gamma(alpha + 1.5)))
        acc = term.copy()
        u2 = us * us
        for m in range(1, 60):
            term = -term * u2 / (4.0 * m * (m + alpha + 0.5))
            acc += term
            if np.max(np.abs(term)) < 1e-18:
                break
        out[small] = pref * acc
    if np.any(~small):
        idx = np.nonzero(~small)[0]
        nu = alpha + 0.5
        for i in idx:
            out[i] = pref * specfun.bessel_j(nu, u[i]) / u[i] ** nu
    return out


def kernel_trace(alpha, c):
    """Trace of the concentration operator: (c/2) (Gamma(a+1)/Gamma(a+3/2))^2."""
    return 0.5 * c * math.exp(2.0 * (specfun.ln_gamma(alpha + 1.0)
                                     - specfun.ln_gamma(alpha + 1.5)))


def lambda_bound_tail(alpha, c, n_from, max_terms=20000):
    """Upper bound on sum_{n >= n_from} lambda_n from the decay estimate."""
    n0 = int(max(n_from, math.floor((math.e * c + 1.0) / 2.0) + 1))
    if n0 > n_from:
        raise DomainError(f"tail bound needs n_from > (ec+1)/2; got {n_from}")
    total = 0.0
    for n in range(n0, n0 + max_terms):
        entry = SpectrumEntry(n=n, chi=0.0, mu_abs=0.0, mu_phase=1.0, lam=0.0)
        v = decay_bound_check(entry, alpha, c)
        term = math.exp(min(v.log_lambda_bound, 700.0))
        total += term
        if term < 1e-30 * max(total, 1e-300):
            break
    return total


def apply_concentration(alpha, c, rule, values):
    """Apply (c/2pi) * the kernel integral operator to samples on a rule."""
    diff = c * (rule.nodes[:, None] - rule.nodes[None, :])
    kmat = concentration_kernel(alpha, diff.ravel()).reshape(diff.shape)
    return (c / (2.0 * math.pi)) * kmat @ (rule.weights * values)


@dataclass(frozen=True)
class DchiDcRecord:
    analytic: float
    finite_diff: float


def dchi_dc(alpha, c, n, h=None, nmax=None):
    """d chi_n / dc: analytic moment value 2c * int x^2 psi_n^2 w_a dx versus
    a central finite difference of chi_n(c +/- h) from fresh bases."""
    from .basis import build_basis, moment_b

    if h is None:
        h = 1e-4 * c
    if nmax is None:
        nmax = n + 1
    b0 = build_basis(alpha, c, nmax)
    analytic = 2.0 * c * moment_b(b0, n)
    bp = build_basis(alpha, c + h, nmax)
    bm = build_basis(alpha, c - h, nmax)
    fd = (float(bp.chi[n]) - float(bm.chi[n])) / (2.0 * h)
    return DchiDcRecord(analytic=analytic, finite_diff=fd)
