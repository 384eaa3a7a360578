"""Spectral projection onto the wave-function basis, test-function corpus,
weighted Sobolev norms, and approximation-rate checkers."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .basis import decay_regime_multiplier
from .errors import DomainError
from .spectral import _gammas as _spectral_gammas
from .spectral import fourier_series_value

__all__ = [
    "TargetFunction",
    "ProjectionResult",
    "SobolevNorm",
    "GAUSSIAN_GENERATOR",
    "brownian",
    "brownian_from_coefficients",
    "weierstrass_mandelbrot",
    "periodic_exponential",
    "user_sampled",
    "target_from_config",
    "project",
    "evaluate_partial_sum",
    "wm_coefficients_closed_form",
    "wm_all_coefficients",
    "wm_l2_norm_squared",
    "wm_projection_error",
    "cosine_transform_table",
    "cosine_series_norm2",
    "cosine_series_projection",
    "periodic_coefficient",
    "sobolev_norm",
    "derivative_sobolev_norm",
    "chi_tail_error_check",
    "projection_rate_check",
]

GAUSSIAN_GENERATOR = "philox4x64-boxmuller"


@dataclass(frozen=True)
class TargetFunction:
    """A function on [-1, 1] with an evaluator and optional derivatives.

    ``derivative(x, order)`` must return the order-th derivative when
    available (order 0 = the function itself).
    """

    kind: str
    params: dict = field(repr=False)
    evaluator: object = field(repr=False)
    derivative: object = field(default=None, repr=False)
    complex_valued: bool = False

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))


def _gaussian_samples(seed, count):
    # Box-Muller on top of the counter-based Philox stream; recorded in
    # reports as GAUSSIAN_GENERATOR so runs are reproducible by name+seed.
    gen = np.random.Generator(np.random.Philox(key=int(seed)))
    u1 = 1.0 - gen.random(count)
    u2 = gen.random(count)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


def _cos_series_eval(coefs):
    k = np.arange(1, coefs.size + 1, dtype=float)

    def evaluator(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(x.size)
        for lo in range(0, coefs.size, 512):
            hi = min(lo + 512, coefs.size)
            out += coefs[lo:hi] @ np.cos(math.pi * np.outer(k[lo:hi], x))
        return out

    def derivative(x, order):
        if order == 0:
            return evaluator(x)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(x.size)
        for lo in range(0, coefs.size, 512):
            hi = min(lo + 512, coefs.size)
            kk = k[lo:hi]
            out += (coefs[lo:hi] * (math.pi * kk) ** order) @ np.cos(
                math.pi * np.outer(kk, x) + 0.5 * math.pi * order)
        return out

    return evaluator, derivative


def brownian_from_coefficients(s, coefs):
    """Random-cosine-series path with explicitly supplied amplitudes X_k."""
    coefs = np.asarray(coefs, dtype=float)
    if coefs.size < 1:
        raise DomainError("need at least one coefficient")
    k = np.arange(1, coefs.size + 1, dtype=float)
    scaled = coefs / k ** s
    evaluator, derivative = _cos_series_eval(scaled)
    return TargetFunction(kind="brownian", evaluator=evaluator,
                          derivative=derivative,
                          params={"s": s, "K": coefs.size, "seed": None,
                                  "amplitudes": coefs})


def brownian(s, seed, K=4000):
    """B_s(x) = sum_{k=1}^{K} X_k k^{-s} cos(k pi x) with standard Gaussian X_k.

    Deterministic in ``seed``; the generator is GAUSSIAN_GENERATOR.  The
    dropped tail has expected sup norm about 0.8 K^(1-s)/(s-1) (a soft bound;
    the realized per-seed tail depends on the draw), roughly 2.5e-2 at the
    default K = 4000 with s = 1.5.
    """
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K!r}")
    if s <= 0.5:
        raise DomainError(f"brownian requires s > 1/2, got {s!r}")
    f = brownian_from_coefficients(s, _gaussian_samples(seed, K))
    f.params.update({"seed": int(seed), "generator": GAUSSIAN_GENERATOR})
    return f


def wm_truncation(s, lam, tol=1e-12):
    """Smallest K with geometric-tail bound lam^(-K(2-s)) / (1 - lam^(-(2-s))) <= tol."""
    r = lam ** (-(2.0 - s))
    return max(1, int(math.ceil(math.log(tol * (1.0 - r)) / math.log(r))))


def weierstrass_mandelbrot(s, lam, K=None):
    """M_{s,lam}(x) = sum_{k=0}^{K-1} sin(lam^k x) / lam^(k(2-s)); lam > 1, s <= 1."""
    if not lam > 1.0:
        raise DomainError(f"lambda must be > 1, got {lam!r}")
    if s > 1.0:
        raise DomainError(f"s must be <= 1, got {s!r}")
    if K is None:
        K = wm_truncation(s, lam)
    freqs = lam ** np.arange(K)
    amps = lam ** (-(2.0 - s) * np.arange(K))

    def evaluator(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.sin(np.outer(x, freqs)) @ amps

    return TargetFunction(kind="weierstrass_mandelbrot", evaluator=evaluator,
                          params={"s": s, "lambda": lam, "K": K})


def periodic_exponential(k):
    """f(x) = e^{i k pi x}; single-mode periodic test function (complex)."""
    kpi = math.pi * k

    def evaluator(x):
        return np.exp(1j * kpi * np.asarray(x, dtype=float))

    def derivative(x, order):
        return (1j * kpi) ** order * evaluator(x)

    return TargetFunction(kind="periodic_exponential", evaluator=evaluator,
                          derivative=derivative, params={"k": int(k)},
                          complex_valued=True)


def user_sampled(grid, values):
    """Piecewise-linear interpolant of samples on a grid covering [-1, 1]."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.size != values.size or grid.size < 2:
        raise DomainError("grid and values must be 1-D arrays of equal length >= 2")
    if not np.all(np.isfinite(values)):
        raise DomainError("sampled values must be finite")

    def evaluator(x):
        return np.interp(np.asarray(x, dtype=float), grid, values)

    return TargetFunction(kind="user_sampled", evaluator=evaluator,
                          params={"npoints": grid.size})


def target_from_config(cfg):
    """Build a corpus function from a declarative record (kind + parameters)."""
    kind = cfg.get("kind")
    if kind == "brownian":
        return brownian(float(cfg["s"]), int(cfg.get("seed", 0)),
                        int(cfg.get("K", 4000)))
    if kind in ("weierstrass_mandelbrot", "wm"):
        K = cfg.get("K")
        return weierstrass_mandelbrot(float(cfg["s"]), float(cfg["lambda"]),
                                      None if K is None else int(K))
    if kind in ("periodic_exponential", "periodic"):
        return periodic_exponential(int(cfg["k"]))
    if kind == "user_sampled":
        return user_sampled(np.asarray(cfg["grid"]), np.asarray(cfg["values"]))
    raise DomainError(f"unknown target kind {kind!r}")


# ---------------------------------------------------------------------------
# Projection S_N f = sum_{n<N} <f, psi_n> psi_n.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectionResult:
    N: int
    coefficients: np.ndarray = field(repr=False)
    l2w_error: float = math.nan
    sup_error: float = math.nan


def project(basis, f, N, quad_order=None, sup_grid=2001):
    """Coefficients <f, psi_n> for n < N plus weighted-L2 and sup errors.

    Coefficients use a Gauss rule with ``quad_order`` nodes (at least
    trunc + 32); the residual norm uses at least trunc + 64 nodes.  The sup
    error is approximated on ``sup_grid`` equispaced points of the open
    interval: the weight (1-x^2)^a vanishes at the endpoints, so the method
    does not control pointwise values exactly there.
    """
    if N > basis.nmax:
        raise DomainError(f"N={N} exceeds the available nmax={basis.nmax}")
    floor = basis.trunc + 32
    if quad_order is None:
        quad_order = basis.trunc + 64
    if quad_order < floor:
        raise DomainError(f"quad_order must be >= trunc + 32 = {floor}")
    rule = specfun.gauss_jacobi(basis.alpha, quad_order)
    fvals = f(rule.nodes)
    tab = basis.psi_table(rule.nodes, range(N))
    coeffs = tab @ (rule.weights * fvals)
    res_order = max(quad_order, basis.trunc + 64)
    if res_order == quad_order:
        res_rule, res_f, res_tab = rule, fvals, tab
    else:
        res_rule = specfun.gauss_jacobi(basis.alpha, res_order)
        res_f = f(res_rule.nodes)
        res_tab = basis.psi_table(res_rule.nodes, range(N))
    resid = res_f - coeffs @ res_tab
    l2w = math.sqrt(max(float(np.real(np.dot(res_rule.weights,
                                             np.abs(resid) ** 2))), 0.0))
    xg = np.linspace(-1.0, 1.0, sup_grid + 2)[1:-1]
    sup = float(np.max(np.abs(f(xg) - coeffs @ basis.psi_table(xg, range(N)))))
    return ProjectionResult(N=N, coefficients=coeffs, l2w_error=l2w, sup_error=sup)


def evaluate_partial_sum(basis, coefficients, x):
    """Evaluate sum_n coefficients[n] psi_n at the given points."""
    n = len(coefficients)
    return np.asarray(coefficients) @ basis.psi_table(np.asarray(x, float), range(n))


# ---------------------------------------------------------------------------
# Closed-form coefficients of the Weierstrass-Mandelbrot corpus.
# ---------------------------------------------------------------------------

def _wm_powers(basis, s, lam, K):
    if K is not None:
        return np.arange(K)
    # truncate once the scale-k contribution (amplitude times the decayed
    # transform envelope) is negligible
    ks = []
    k = 0
    while k < 400:
        u = lam ** k
        weight = lam ** (k * (s - basis.alpha - 2.5))
        envelope = min(1.0, math.sqrt(2.0 / (math.pi * u)))
        ks.append(k)
        if weight * envelope <= 1e-16:
            break
        k += 1
    return np.asarray(ks)


def wm_all_coefficients(basis, s, lam, N, K=None):
    """<M_{s,lam}, psi_n> for n < N; exact Bessel form, zero at even n."""
    out = np.zeros(N)
    odd = [n for n in range(N) if n % 2 == 1]
    if not odd:
        return out
    coefs = np.stack([basis.full_coefficients(n) for n in odd])
    kmax = coefs.shape[1] - 1
    idx = np.arange(kmax + 1)
    signs = np.where(idx % 4 == 1, 1.0, np.where(idx % 4 == 3, -1.0, 0.0))
    gam = _spectral_gammas(basis.alpha, kmax)
    for k in _wm_powers(basis, s, lam, K):
        u = float(lam ** k)
        amp = float(lam ** (-(2.0 - s) * k))
        ladder = specfun.bessel_j_ladder(basis.alpha + 0.5, kmax, u)
        pref = math.sqrt(math.pi) * (2.0 / u) ** (basis.alpha + 0.5)
        # Im of the transform value for odd-parity coefficient vectors
        out[odd] += amp * pref * (coefs @ (signs * gam * ladder))
    return out


def wm_coefficients_closed_form(basis, s, lam, n, K=None):
    """Single coefficient <M_{s,lam}, psi_n>; exactly zero for even n."""
    if n % 2 == 0:
        return 0.0
    return float(wm_all_coefficients(basis, s, lam, n + 1, K)[n])


def _cos_transform(alpha, u):
    """int cos(u x) w_a(x) dx = sqrt(pi) (2/u)^(a+1/2) Gamma(a+1) J_{a+1/2}(u)."""
    if u == 0.0:
        return specfun.weight_mass(alpha)
    return (math.sqrt(math.pi) * (2.0 / u) ** (alpha + 0.5)
            * math.exp(specfun.ln_gamma(alpha + 1.0))
            * specfun.bessel_j(alpha + 0.5, u))


def wm_l2_norm_squared(alpha, s, lam, K):
    """Exact ||M_{s,lam}||^2 in L2(w_a) for the K-term truncation."""
    freqs = lam ** np.arange(K)
    amps = lam ** (-(2.0 - s) * np.arange(K))
    total = 0.0
    for i in range(K):
        for j in range(i, K):
            # int sin(ax) sin(bx) w = (cosT(|a-b|) - cosT(a+b)) / 2
            val = 0.5 * (_cos_transform(alpha, abs(freqs[i] - freqs[j]))
                         - _cos_transform(alpha, freqs[i] + freqs[j]))
            total += (1.0 if i == j else 2.0) * amps[i] * amps[j] * val
    return total


def wm_projection_error(basis, s, lam, N, K=None):
    """||M - S_N M||_{L2(w_a)} via Parseval in the orthonormal basis."""
    if K is None:
        K = wm_truncation(s, lam)
    norm2 = wm_l2_norm_squared(basis.alpha, s, lam, K)
    coeffs = wm_all_coefficients(basis, s, lam, N, K=K)
    return math.sqrt(max(norm2 - float(np.sum(coeffs ** 2)), 0.0))


def cosine_transform_table(basis, k_max, N):
    """Matrix T[k-1, n] = <cos(k pi x), psi_n> for k = 1..k_max, n < N.

    Exact Bessel form, one ladder per frequency; odd-n columns vanish by
    parity.  Seed-independent, so random cosine-series projections reduce to
    a matrix-vector product with exact coefficients (a quadrature rule of
    practical size cannot resolve thousands of cosine modes, and aliasing
    noise gets amplified by the endpoint growth of psi_n).
    """
    even = [n for n in range(N) if n % 2 == 0]
    coefs = np.stack([basis.full_coefficients(n) for n in even])
    kmax = coefs.shape[1] - 1
    idx = np.arange(kmax + 1)
    signs = np.where(idx % 4 == 0, 1.0, np.where(idx % 4 == 2, -1.0, 0.0))
    gam = _spectral_gammas(basis.alpha, kmax)
    proj = coefs * (signs * gam)
    table = np.zeros((k_max, N))
    for k in range(1, k_max + 1):
        u = k * math.pi
        ladder = specfun.bessel_j_ladder(basis.alpha + 0.5, kmax, u)
        pref = math.sqrt(math.pi) * (2.0 / u) ** (basis.alpha + 0.5)
        table[k - 1, even] = pref * (proj @ ladder)
    return table


def cosine_series_norm2(alpha, weighted_amplitudes):
    """||sum_k y_k cos(k pi x)||^2 in L2(w_a), via exact cosine transforms:
    <cos(j pi .), cos(k pi .)>_w = (W(|j-k| pi) + W((j+k) pi)) / 2."""
    y = np.asarray(weighted_amplitudes, dtype=float)
    K = y.size
    auto = np.correlate(y, y, mode="full")  # lags -(K-1)..K-1
    w_diff = np.array([_cos_transform(alpha, d * math.pi) for d in range(K)])
    norm2 = 0.5 * float(auto[K - 1] * w_diff[0]
                        + 2.0 * np.dot(auto[K:], w_diff[1:]))
    w_sum = np.array([_cos_transform(alpha, s * math.pi)
                      for s in range(2, 2 * K + 1)])
    pair = np.convolve(y, y, mode="full")  # index d holds sum_{j+k=d+2} y y
    norm2 += 0.5 * float(np.dot(pair, w_sum))
    return norm2


def cosine_series_projection(basis, weighted_amplitudes, N, table=None):
    """Exact projection data for f = sum_k y_k cos(k pi x).

    Returns (coefficients, l2w_error).  ``weighted_amplitudes`` are the y_k
    (amplitude over k^s already applied).  The error uses Parseval in the
    orthonormal basis with ||f||^2 from :func:`cosine_series_norm2`.
    """
    y = np.asarray(weighted_amplitudes, dtype=float)
    if table is None:
        table = cosine_transform_table(basis, y.size, N)
    coeffs = y @ table[:, :N]
    err2 = cosine_series_norm2(basis.alpha, y) - float(np.sum(coeffs ** 2))
    return coeffs, math.sqrt(max(err2, 0.0))


def periodic_coefficient(basis, k, n):
    """<e^{i k pi x}, psi_n> in L2(w_a), via the exact transform expansion."""
    if not 0 <= n < basis.nmax:
        raise DomainError(f"basis index {n} out of range")
    coef = basis.full_coefficients(n)
    if k == 0:
        if n % 2 == 1:
            return 0.0j
        return complex(coef[0] * math.sqrt(specfun.weight_mass(basis.alpha)))
    val = fourier_series_value(basis.alpha, coef, n % 2, abs(k) * math.pi)
    if k < 0:
        val = val.conjugate()
    return val


# ---------------------------------------------------------------------------
# Weighted Sobolev norms (coefficient characterizations).
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SobolevNorm:
    """Value of the displayed coefficient sum (a squared-norm style quantity)."""

    s: float
    value: float
    style: str


def sobolev_norm(coeffs, s, style="jacobi_coefficient", alpha=None, k_values=None):
    """Coefficient-weighted Sobolev sum.

    jacobi_coefficient: sum_n (1 + (n(n+2a+1))^(2s)) |v_n|^2   (0^0 := 1)
    periodic_fourier:   sum_k (1 + (k pi)^2)^s |b_k|^2
    """
    if s < 0.0:
        raise DomainError("smoothness exponent must be >= 0")
    coeffs = np.asarray(coeffs)
    with np.errstate(over="ignore"):  # overflow handled by the finite check
        mags = np.abs(coeffs) ** 2
    if style == "jacobi_coefficient":
        if alpha is None:
            raise DomainError("jacobi_coefficient style requires alpha")
        n = np.arange(coeffs.size, dtype=float)
        base = n * (n + 2.0 * alpha + 1.0)
        weights = 1.0 + base ** (2.0 * s)
    elif style == "periodic_fourier":
        if k_values is None:
            raise DomainError("periodic_fourier style requires k_values")
        k = np.asarray(k_values, dtype=float)
        if k.size != coeffs.size:
            raise DomainError("k_values must match coefficient count")
        weights = (1.0 + (math.pi * k) ** 2) ** s
    else:
        raise DomainError(f"unknown Sobolev style {style!r}")
    value = float(np.dot(weights, mags))
    if not math.isfinite(value):
        raise DomainError("weighted Sobolev sum overflowed")
    return SobolevNorm(s=float(s), value=value, style=style)


def derivative_sobolev_norm(f, r, alpha, quad_order=500):
    """sum_{j=0}^{r} ||f^(j)||^2 in L2(w_a); needs analytic derivatives."""
    if f.derivative is None:
        raise DomainError(f"corpus function {f.kind!r} has no derivatives")
    rule = specfun.gauss_jacobi(alpha, quad_order)
    total = 0.0
    for j in range(r + 1):
        vals = f.derivative(rule.nodes, j)
        total += float(np.real(rule.integrate(np.abs(vals) ** 2)))
    return total


# ---------------------------------------------------------------------------
# Approximation-rate checkers.  The generic constants in the underlying
# estimates are never asserted numerically; the checks are structural
# (bounded ratios, negative fitted exponents).
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailRatioReport:
    N_list: tuple
    errors: tuple
    tail_factors: tuple
    ratios: tuple
    slope: float
    norm_squared: float

    @property
    def max_ratio(self):
        return max(self.ratios)


def _chi_tail_factor(basis, N, m):
    # sum_{n > N} chi_n^(-2m), extending past nmax with the lower bound
    # chi_n >= n(n+2a+1)
    acc = 0.0
    for n in range(N + 1, basis.nmax):
        acc += math.exp(-2.0 * m * math.log(float(basis.chi[n])))
    n = max(basis.nmax, N + 1)
    while True:
        term = math.exp(-2.0 * m * math.log(n * (n + 2.0 * basis.alpha + 1.0)))
        acc += term
        if term < 1e-14 * acc or n > 10 ** 6:
            break
        n += 1
    return acc


def chi_tail_error_check(basis, f, m, N_list, quad_order=None):
    """Ratio ||f - S_N f||^2 / (sum_{n>N} chi_n^(-2m) * ||f||^2_{m+2}) over N.

    A bounded, non-exploding ratio (and a log-log error slope <= -2m) is the
    checkable content; the constant in the estimate is generic.
    """
    N_list = sorted(N_list)
    n_top = N_list[-1]
    proj = project(basis, f, n_top, quad_order)
    norm2 = derivative_sobolev_norm(f, m + 2, basis.alpha)
    errors, tails, ratios = [], [], []
    err2_top = proj.l2w_error ** 2
    for N in N_list:
        err2 = err2_top + float(np.sum(np.abs(proj.coefficients[N:n_top]) ** 2))
        tail = _chi_tail_factor(basis, N, m)
        errors.append(math.sqrt(max(err2, 0.0)))
        tails.append(tail)
        ratios.append(err2 / (tail * norm2))
    logs = np.log(np.maximum(errors, 1e-300))
    slope = float(np.polyfit(np.log(N_list), logs, 1)[0]) if len(N_list) > 1 else math.nan
    return TailRatioReport(N_list=tuple(N_list), errors=tuple(errors),
                           tail_factors=tuple(tails), ratios=tuple(ratios),
                           slope=slope, norm_squared=norm2)


@dataclass(frozen=True)
class RateReport:
    N_list: tuple
    errors: tuple
    algebraic: tuple
    applicable: tuple
    fitted_amplitude: float
    fitted_rate: float

    @property
    def rate_positive(self):
        return self.fitted_rate > 0.0

    @property
    def holds(self):
        return all(
            (not app) or err <= alg + self.fitted_amplitude
            * math.exp(-min(self.fitted_rate * n, 700.0)) + 1e-12
            for n, err, alg, app in zip(self.N_list, self.errors,
                                        self.algebraic, self.applicable))


def projection_rate_check(basis, f, s, N_list, hs_norm, quad_order=None):
    """Check err_N <= (1 + (N/2)^2)^(-s/2) ||f||_{H^s} + A e^{-aN}.

    ``hs_norm`` is the (unsquared) smoothness norm of f.  The exponential
    part has generic constants, so (A, a) are fitted to the residuals above
    the algebraic term; the verdict is that the fitted rate is positive.
    Entries with N <= m_a c are flagged inapplicable.
    """
    N_list = sorted(N_list)
    threshold = decay_regime_multiplier(basis.alpha) * basis.c
    n_top = N_list[-1]
    proj = project(basis, f, n_top, quad_order)
    err2_top = proj.l2w_error ** 2
    errors, algebraic, applicable = [], [], []
    for N in N_list:
        err2 = err2_top + float(np.sum(np.abs(proj.coefficients[N:n_top]) ** 2))
        errors.append(math.sqrt(max(err2, 0.0)))
        algebraic.append((1.0 + (N / 2.0) ** 2) ** (-0.5 * s) * hs_norm)
        applicable.append(N > threshold)
    resid = [(n, e - a) for n, e, a, app in zip(N_list, errors, algebraic,
                                                applicable) if app and e > a]
    if len(resid) >= 2:
        ns = np.array([r[0] for r in resid], dtype=float)
        ls = np.log([r[1] for r in resid])
        slope = np.polyfit(ns, ls, 1)[0]
        a_rate = -float(slope)
        amp = float(np.max(np.exp(ls + a_rate * ns)))
    elif len(resid) == 1:
        # one point cannot pin a rate; report it flat so the caller sees it
        a_rate, amp = 0.0, resid[0][1]
    else:
        a_rate, amp = math.inf, 0.0
    return RateReport(N_list=tuple(N_list), errors=tuple(errors),
                      algebraic=tuple(algebraic), applicable=tuple(applicable),
                      fitted_amplitude=amp, fitted_rate=a_rate)
