"""Wave-function bases for the weighted finite Fourier transform.

For fixed (alpha, c) the basis functions expand in orthonormal symmetric
Jacobi polynomials, psi_n = sum_k beta_k^n Jt_k, where the coefficient
vectors solve a symmetric tridiagonal eigensystem coupling k to k +/- 2.
Even and odd k decouple, so the two parities are solved separately and the
spectra merged.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend, specfun
from .eigensolver import SymTridiag, eig_symtridiag
from .errors import ConsistencyError, DomainError, TruncationError

__all__ = [
    "GpswfBasis",
    "LocalEstimateReport",
    "ChiBoundVerdict",
    "BetaBoundVerdict",
    "assemble_eigensystem",
    "build_basis",
    "chi_bracket",
    "chi_lower_bound_check",
    "improved_chi_constant",
    "beta_bound_constant",
    "decay_regime_multiplier",
    "beta_bound_check",
    "local_estimate",
]

_PARITIES = {"even": 0, "odd": 1, 0: 0, 1: 1}


def assemble_eigensystem(alpha, c, M, parity):
    """Tridiagonal matrix of the coefficient eigensystem for one parity.

    Row i corresponds to Jacobi index k = 2*i + parity, i = 0..M-1.  The
    diagonal is k(k + 2a + 1) + c^2 (a_k^2 + a_{k+1}^2) and the coupling of k
    to k+2 is c^2 a_{k+1} a_{k+2}, with a_k the orthonormal-Jacobi recurrence
    coefficients; these products equal the usual closed-form rational
    expressions in k and alpha but stay finite at the removable singularity
    k = 0, alpha = 1/2.
    """
    if not math.isfinite(alpha) or alpha <= -1.0:
        raise DomainError(f"alpha must be > -1, got {alpha!r}")
    if not math.isfinite(c) or c < 0.0:
        raise DomainError(f"bandwidth c must be >= 0, got {c!r}")
    if M < 2:
        raise DomainError(f"truncation order must be >= 2, got {M!r}")
    p = _PARITIES.get(parity)
    if p is None:
        raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}")
    k = 2.0 * np.arange(M) + p
    a = specfun.jacobi_recurrence(alpha, 2 * M + p + 2)
    c2 = c * c
    diag = k * (k + 2.0 * alpha + 1.0) + c2 * (a[k.astype(int)] ** 2
                                               + a[k.astype(int) + 1] ** 2)
    ki = k.astype(int)[:-1]
    offdiag = c2 * a[ki + 1] * a[ki + 2]
    return SymTridiag(diag, offdiag)


@dataclass(frozen=True)
class GpswfBasis:
    """Eigenpairs (chi_n, beta^n) of a fixed (alpha, c) family.

    ``beta[n]`` holds the coefficients over Jacobi indices of parity n mod 2,
    i.e. k = (n mod 2), (n mod 2) + 2, ..., length ``trunc``; each vector has
    unit Euclidean norm, which equals the weighted L2 normalization of psi_n.
    """

    alpha: float
    c: float
    trunc: int
    nmax: int
    chi: np.ndarray = field(repr=False)
    beta: tuple = field(repr=False)

    def full_coefficients(self, n):
        """Coefficient vector over all Jacobi indices k = 0..2*trunc-1."""
        full = np.zeros(2 * self.trunc)
        full[n % 2::2] = self.beta[n]
        return full

    def psi(self, n, x, nderiv=0):
        """psi_n and derivatives on an array of points; shape (nderiv+1, len(x))."""
        if not 0 <= n < self.nmax:
            raise IndexError(f"basis index {n} out of range (nmax={self.nmax})")
        coef = self.full_coefficients(n)
        rec = specfun.jacobi_recurrence(self.alpha, coef.size + 2)
        return backend.jacobi_series(coef, rec, specfun.jacobi_norm0(self.alpha),
                                     np.asarray(x, dtype=float), nderiv)

    def psi_table(self, x, n_list=None, nderiv=0):
        """Values (and derivatives) of many psi_n on a node array at once."""
        if n_list is None:
            n_list = range(self.nmax)
        kmax = 2 * self.trunc - 1
        table = specfun.jacobi_table(self.alpha, kmax, x, nderiv)
        b = np.stack([self.full_coefficients(n) for n in n_list])
        if nderiv == 0:
            return b @ table
        return np.stack([b @ table[d] for d in range(nderiv + 1)])


def eval_psi(basis, n, x, derivative=0):
    """Single-point (or array) evaluation of psi_n or its derivative."""
    if derivative not in (0, 1):
        raise DomainError("derivative must be 0 or 1")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xa) > 1.0 + 8.0 * np.finfo(float).eps):
        raise DomainError("evaluation requires |x| <= 1")
    vals = basis.psi(n, xa, derivative)[derivative]
    return float(vals[0]) if np.asarray(x).ndim == 0 else vals


def _merge_parities(dec_even, dec_odd, nmax):
    chi = np.concatenate([dec_even.values, dec_odd.values])
    parity = np.concatenate([np.zeros(dec_even.values.size, dtype=int),
                             np.ones(dec_odd.values.size, dtype=int)])
    cols = np.concatenate([np.arange(dec_even.values.size),
                           np.arange(dec_odd.values.size)])
    order = np.argsort(chi, kind="stable")
    chi, parity, cols = chi[order], parity[order], cols[order]
    if np.any(parity[:nmax] != np.arange(nmax) % 2):
        raise ConsistencyError("even/odd spectra failed to interleave")
    scale = np.maximum(1.0, np.abs(chi[1:nmax]))
    if np.any(np.diff(chi[:nmax]) <= 1e-12 * scale):
        raise ConsistencyError("merged eigenvalues are not strictly increasing")
    return chi[:nmax], parity[:nmax], cols[:nmax]


def _tail_mass(vec, buffer):
    return float(np.sum(vec[-buffer:] ** 2))


def build_basis(alpha, c, nmax, m_start=None, m_cap=8192, tail_tol=1e-24,
                tail_buffer=8):
    """Build a basis with nmax eigenpairs, choosing the truncation adaptively.

    The per-parity truncation starts at ``nmax + ceil(c) + 40`` and doubles
    until the squared mass in the last ``tail_buffer`` coefficients of every
    retained eigenvector is below ``tail_tol``.
    """
    if not math.isfinite(alpha) or alpha < 0.0:
        raise DomainError(f"basis construction requires alpha >= 0, got {alpha!r}")
    if not math.isfinite(c) or c <= 0.0:
        raise DomainError(f"basis construction requires c > 0, got {c!r}")
    if nmax < 1:
        raise DomainError(f"nmax must be >= 1, got {nmax!r}")
    M = m_start if m_start is not None else nmax + math.ceil(c) + 40
    M = max(M, nmax // 2 + 8, tail_buffer + 4)
    while True:
        dec_even = eig_symtridiag(assemble_eigensystem(alpha, c, M, "even"))
        dec_odd = eig_symtridiag(assemble_eigensystem(alpha, c, M, "odd"))
        chi, parity, cols = _merge_parities(dec_even, dec_odd, nmax)
        beta = []
        worst = (0, 0.0)
        for n in range(nmax):
            dec = dec_even if parity[n] == 0 else dec_odd
            vec = dec.vectors[:, cols[n]].copy()
            tail = _tail_mass(vec, tail_buffer)
            if tail > worst[1]:
                worst = (n, tail)
            beta.append(vec)
        if worst[1] <= tail_tol:
            break
        if 2 * M > m_cap:
            raise TruncationError(
                f"coefficient tail mass {worst[1]:.3e} at n={worst[0]} still "
                f"above {tail_tol:.1e} at truncation cap {m_cap}",
                n=worst[0], tail_mass=worst[1])
        M *= 2
    _apply_sign_convention(alpha, M, beta)
    chi = np.array(chi)
    chi.setflags(write=False)
    return GpswfBasis(alpha=float(alpha), c=float(c), trunc=M, nmax=int(nmax),
                      chi=chi, beta=tuple(beta))


def _apply_sign_convention(alpha, M, beta):
    # even n: psi_n(0) > 0; odd n: psi_n'(0) > 0; if the value at 0 is
    # numerically nil, fall back to the largest-|beta| coefficient positive
    table = specfun.jacobi_table(alpha, 2 * M - 1, np.array([0.0]), nderiv=1)
    j0 = table[0, :, 0]
    j0p = table[1, :, 0]
    for n, vec in enumerate(beta):
        ref = j0[n % 2::2] if n % 2 == 0 else j0p[n % 2::2]
        s = float(np.dot(vec, ref))
        if abs(s) < 1e-13:
            s = vec[int(np.argmax(np.abs(vec)))]
        if s < 0.0:
            vec *= -1.0


def chi_bracket(alpha, c, n):
    """Two-sided bracket n(n+2a+1) <= chi_n <= n(n+2a+1) + c^2."""
    base = n * (n + 2.0 * alpha + 1.0)
    return base, base + c * c


def improved_chi_constant(alpha):
    """C_a = 2(2a+1)^2 + 1 - 2(2a+1) sqrt(1 + (2a+1)^2)."""
    t = 2.0 * alpha + 1.0
    return 2.0 * t * t + 1.0 - 2.0 * t * math.sqrt(1.0 + t * t)


@dataclass(frozen=True)
class ChiBoundVerdict:
    n: int
    chi: float
    q: float
    applicable: bool
    c_alpha: float
    lower: float
    upper: float
    margin_lower: float
    margin_upper: float

    @property
    def ok(self):
        return (not self.applicable) or (self.margin_lower >= 0.0
                                         and self.margin_upper >= 0.0)


def chi_lower_bound_check(basis, n):
    """Improved lower bound check, applicable for alpha <= 1/4 and q < 3/17."""
    chi = float(basis.chi[n])
    q = basis.c ** 2 / chi
    applicable = basis.alpha <= 0.25 and q < 3.0 / 17.0
    c_alpha = improved_chi_constant(basis.alpha)
    base = n * (n + 2.0 * basis.alpha + 1.0)
    lower = base + c_alpha * basis.c ** 2
    upper = base + basis.c ** 2
    return ChiBoundVerdict(n=n, chi=chi, q=q, applicable=applicable,
                           c_alpha=c_alpha, lower=lower, upper=upper,
                           margin_lower=chi - lower, margin_upper=upper - chi)


@dataclass(frozen=True)
class LocalEstimateReport:
    """Pointwise amplitude diagnostic for one basis function.

    sup_value  = sup over sampled x in [0,1] of
                 sqrt((1-x^2)(1-q x^2)) * w_a(x) * psi_n(x)^2
    a_squared  = psi_n(0)^2 + psi_n'(0)^2 / chi_n
    b_moment   = int x^2 psi_n^2 w_a dx
    The bound sup <= A^2 <= 2a+1 (and 1 - B <= 2 A^2) applies when
    alpha <= 1/4 and q = c^2/chi_n < 3/17.
    """

    n: int
    q: float
    sup_value: float
    a_squared: float
    b_moment: float
    bound_applicable: bool


def local_estimate(basis, n, grid_size=400):
    if grid_size < 100:
        raise DomainError("grid_size must be >= 100")
    chi = float(basis.chi[n])
    q = basis.c ** 2 / chi
    # Chebyshev-style clustering toward x = 1 where the envelope varies fastest
    x = np.sin(0.5 * math.pi * np.linspace(0.0, 1.0, grid_size))
    psi = basis.psi(n, x, 0)[0]
    envelope = np.sqrt(np.maximum((1.0 - x ** 2) * (1.0 - q * x ** 2), 0.0))
    w = (1.0 - x ** 2) ** basis.alpha
    sup_value = float(np.max(envelope * w * psi ** 2))
    at0 = basis.psi(n, np.array([0.0]), 1)
    a_squared = float(at0[0, 0] ** 2 + at0[1, 0] ** 2 / chi)
    b_moment = moment_b(basis, n)
    applicable = basis.alpha <= 0.25 and q < 3.0 / 17.0
    return LocalEstimateReport(n=n, q=q, sup_value=sup_value,
                               a_squared=a_squared, b_moment=b_moment,
                               bound_applicable=applicable)


def moment_b(basis, n, extra_order=8):
    """B = int x^2 psi_n(x)^2 w_a(x) dx via an exact Gauss rule."""
    rule = specfun.gauss_jacobi(basis.alpha, 2 * basis.trunc + 2 + extra_order)
    vals = basis.psi(n, rule.nodes, 0)[0]
    return float(rule.integrate(rule.nodes ** 2 * vals ** 2))


def beta_bound_constant(alpha):
    """C_a = 2^a (3/2)^(3/4) (3/2 + 2a)^(3/4 + a) / e^(2a + 3/2)."""
    return math.exp(alpha * math.log(2.0) + 0.75 * math.log(1.5)
                    + (0.75 + alpha) * math.log(1.5 + 2.0 * alpha)
                    - (2.0 * alpha + 1.5))


def decay_regime_multiplier(alpha):
    """m_a = 4.13 (1.28 + (2a+1)/1.9)^0.55, the N/c threshold for the
    exponential coefficient-decay regime."""
    return 4.13 * (1.28 + (2.0 * alpha + 1.0) / 1.9) ** 0.55


@dataclass(frozen=True)
class BetaBoundVerdict:
    n: int
    k: int
    q: float
    c_alpha: float
    log_bound: float
    log_beta: float
    margin: float
    applicable_q: bool
    condition_value: float
    condition_ok: bool | None
    regime: bool

    @property
    def holds(self):
        return self.margin >= 0.0


def beta_bound_check(basis, n, k, mu_abs, c_prime=None):
    """Check |beta_k^n| <= C_a (2 sqrt(chi_n)/c)^k |mu_n| (log space).

    The applicability condition k(k+2a+1) + C'_a c^2 <= chi_n involves an
    unspecified constant C'_a; pass ``c_prime`` to evaluate it, otherwise the
    condition value k(k+2a+1) is only reported.  Also flags the regime
    k <= n/1.9 and n >= m_a c of the exponential decay estimate.
    """
    chi = float(basis.chi[n])
    q = basis.c ** 2 / chi
    coefs = basis.full_coefficients(n)
    beta_k = abs(float(coefs[k])) if k < coefs.size else 0.0
    c_alpha = beta_bound_constant(basis.alpha)
    log_bound = (math.log(c_alpha) + k * (math.log(2.0 * math.sqrt(chi)) - math.log(basis.c))
                 + math.log(mu_abs)) if mu_abs > 0.0 else -math.inf
    log_beta = math.log(beta_k) if beta_k > 0.0 else -math.inf
    condition_value = k * (k + 2.0 * basis.alpha + 1.0)
    condition_ok = None
    if c_prime is not None:
        condition_ok = condition_value + c_prime * basis.c ** 2 <= chi
    regime = (k <= n / 1.9) and (n >= decay_regime_multiplier(basis.alpha) * basis.c)
    margin = log_bound - log_beta  # +inf when beta_k is exactly zero
    return BetaBoundVerdict(n=n, k=k, q=q, c_alpha=c_alpha, log_bound=log_bound,
                            log_beta=log_beta, margin=margin,
                            applicable_q=q < 1.0, condition_value=condition_value,
                            condition_ok=condition_ok, regime=regime)
