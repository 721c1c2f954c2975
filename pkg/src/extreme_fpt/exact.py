"""Exact (quadrature) distributions and moments of extreme passage times.

P(T_{k,N} > t) follows from the binomial identity over N iid searchers;
moments integrate m t^(m-1) P(T_{k,N} > t) over a domain split into a head
(mapped by u = C/t, where the integrand is doubly-exponentially close to its
limit), a body around b_N, and a tail handled per declared tail class.
Also the figure-style diagnostics: rescaled densities, a grid KS distance to
the Gumbel limit, relative-error tables for the three mean approximants, and
the large-N regime check.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import evt_core, specfun
from .errors import DomainError, InfiniteMomentError

__all__ = [
    "OrderStatSpec",
    "ErrorTableRow",
    "RegimeDiagnostic",
    "survival_TN",
    "survival_TkN",
    "moment_TkN",
    "rescaled_TN_pdf",
    "ks_distance_to_gumbel",
    "error_table",
    "regime_diagnostic",
]


@dataclass(frozen=True)
class OrderStatSpec:
    """Which extreme is queried: the k-th fastest of N searchers."""

    k: int
    N: int

    def __post_init__(self):
        if self.k != int(self.k) or self.N != int(self.N):
            raise DomainError("k and N must be integers")
        if not 1 <= self.k <= self.N:
            raise DomainError(f"need 1 <= k <= N, got k={self.k}, N={self.N}")


@dataclass(frozen=True)
class ErrorTableRow:
    N: int
    exact_mean: float
    err_baseline: float
    err_elementary: float
    err_lambertw: float


@dataclass(frozen=True)
class RegimeDiagnostic:
    dimensionless_mean: float
    log_ratio: float
    in_regime: bool


def _ln_survival(model, t):
    # ln S(t); complement path while S is near 1, direct log of the model's
    # survival once S itself is small (models keep small S relatively exact).
    q = model.one_minus_survival(t)
    if q <= 0.0:
        return 0.0
    if q < 0.5:
        return math.log1p(-q)
    s = model.survival(t)
    if s <= 0.0:
        return -math.inf
    return math.log(s)


def survival_TN(model, N, t):
    """P(T_N > t) = S(t)^N, evaluated as exp(N ln S)."""
    if N != int(N) or N < 1:
        raise DomainError(f"N must be an integer >= 1, got {N!r}")
    if t < 0.0:
        raise DomainError("t must be >= 0")
    ls = _ln_survival(model, t)
    if ls == -math.inf:
        return 0.0
    return math.exp(N * ls)


def survival_TkN(model, spec, t):
    """P(T_{k,N} > t) = sum_{j<k} C(N,j) (1-S)^j S^(N-j), in the log domain."""
    if t < 0.0:
        raise DomainError("t must be >= 0")
    k, N = spec.k, spec.N
    q = model.one_minus_survival(t)
    if q <= 0.0:
        return 1.0
    ls = _ln_survival(model, t)
    if ls == -math.inf:
        return 0.0
    ln_q = math.log(q)
    total = 0.0
    for j in range(k):
        total += math.exp(specfun.ln_binomial(N, j) + j * ln_q + (N - j) * ls)
    return min(total, 1.0)


def _binom_upper_tail(model, spec, t):
    # P(T_{k,N} <= t) = P(Bin(N, q) >= k), summed directly so it stays
    # relatively accurate when it is tiny; only valid while N q is small.
    k, N = spec.k, spec.N
    q = model.one_minus_survival(t)
    if q <= 0.0:
        return 0.0
    ls = _ln_survival(model, t)
    ln_q = math.log(q)
    total = 0.0
    for j in range(k, min(N, k + 200) + 1):
        term = math.exp(specfun.ln_binomial(N, j) + j * ln_q + (N - j) * ls)
        total += term
        if term < 1e-17 * total:
            break
    return total


def _find_t_hi(model, spec, t_lo):
    # March out to where the order-statistic survival is negligible.
    t = t_lo
    for _ in range(600):
        t *= 1.3
        if survival_TkN(model, spec, t) < 1e-13:
            return t
    raise InfiniteMomentError(
        "survival did not decay; tail class is likely misdeclared")


def moment_TkN(model, spec, m):
    """E[T_{k,N}^m] by adaptive quadrature on the split domain.

    Refuses (InfiniteMomentError) when the declared power tail makes the
    moment diverge: needs m < alpha (N - k + 1).
    """
    m = float(m)
    if not (m > 0.0 and math.isfinite(m)):
        raise DomainError(f"moment order must be positive, got {m!r}")
    tail = model.tail_class
    if tail.kind == "power" and m >= tail.alpha * (spec.N - spec.k + 1):
        raise InfiniteMomentError(
            f"E[T^{m:g}] diverges: tail exponent alpha (N - k + 1) = "
            f"{tail.alpha * (spec.N - spec.k + 1):g} must exceed m")

    C = model.short_time.C
    t_lo = C / (2.0 * math.log(spec.N) + 20.0)
    u_lo = C / t_lo

    # Head [0, t_lo]: survival is 1 there up to a doubly-exponentially small
    # deficit, so integrate the deficit under u = C/t and subtract.
    def head_deficit(u):
        t = C / u
        return m * t ** (m - 1.0) * _binom_upper_tail(model, spec, t) * C / (u * u)

    head_scale = t_lo ** m
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        corr, _ = quad(head_deficit, u_lo, u_lo + 750.0,
                       epsabs=1e-12 * head_scale, epsrel=1e-9, limit=200)
    head = head_scale - corr

    try:
        b_hint = evt_core.rescaling_elementary(model.short_time, max(spec.N, 3)).b_N
    except DomainError:
        b_hint = None

    # Body end: for power tails a fixed multiple of the concentration scale
    # (the reciprocal substitution covers everything beyond, including the
    # slowly decaying mass at small N); for exponential tails march out to
    # where the order-statistic survival is negligible.
    if tail.kind == "power":
        t_hi = max(20.0 * C, 20.0 * (b_hint or 0.0), 4.0 * t_lo)
    else:
        t_hi = _find_t_hi(model, spec, t_lo)

    def integrand(t):
        return m * t ** (m - 1.0) * survival_TkN(model, spec, t)

    pts = [b_hint] if b_hint is not None and t_lo < b_hint < t_hi else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        body, _ = quad(integrand, t_lo, t_hi, points=pts,
                       epsabs=1e-13 * head_scale, epsrel=1e-10, limit=300)

        if tail.kind == "power":
            v_hi = 1.0 / t_hi

            def tail_integrand(v):
                return m * v ** (-m - 1.0) * survival_TkN(model, spec, 1.0 / v)

            tail_part, _ = quad(tail_integrand, 0.0, v_hi,
                                epsabs=1e-12 * (head + body), epsrel=1e-9,
                                limit=300)
        else:
            # everything past ~60 single-searcher e-folds beyond t_hi is
            # below double precision
            ls1 = _ln_survival(model, t_hi)
            ls2 = _ln_survival(model, 2.0 * t_hi)
            rate = max((ls1 - ls2) / t_hi, 1e-300)
            t_end = t_hi + 60.0 / rate
            tail_part, _ = quad(integrand, t_hi, t_end,
                                epsabs=1e-12 * (head + body), epsrel=1e-9,
                                limit=300)

    return head + body + tail_part


def rescaled_TN_pdf(model, N, r, x):
    """Density of (T_N - b_N)/a_N at x; zero where a_N x + b_N <= 0."""
    t = r.a_N * x + r.b_N
    if t <= 0.0:
        return 0.0
    if model.survival_derivative is not None:
        ds = model.survival_derivative(t)
    else:
        h = 1e-6 * t
        ds = (model.survival(t + h) - model.survival(t - h)) / (2.0 * h)
    ls = _ln_survival(model, t)
    if ls == -math.inf:
        return 0.0
    return -r.a_N * N * math.exp((N - 1) * ls) * ds


def ks_distance_to_gumbel(model, N, r, grid_points=2001, span=10.0):
    """sup_x |P(T_N > a_N x + b_N) - exp(-e^x)| over a uniform x grid."""
    if N < 2:
        raise DomainError("need N >= 2")
    worst = 0.0
    for x in np.linspace(-span, span, grid_points):
        t = r.a_N * float(x) + r.b_N
        emp = survival_TN(model, N, t) if t > 0.0 else 1.0
        ref = math.exp(-math.exp(float(x)))
        worst = max(worst, abs(emp - ref))
    return worst


def error_table(model, Ns, k=1):
    """Relative errors of the three mean approximants against quadrature.

    Approximants for E[T_{k,N}]: the k-independent baseline C/ln N, the
    elementary b' + psi(k) a', and the LambertW b + psi(k) a.
    """
    stp = model.short_time
    psi_k = specfun.digamma(k)
    rows = []
    for N in Ns:
        N = int(N)
        exact = moment_TkN(model, OrderStatSpec(k=k, N=N), 1.0)
        baseline = stp.C / math.log(N)
        r_el = evt_core.rescaling_elementary(stp, N)
        r_lw = evt_core.rescaling_lambertw(stp, N)
        rows.append(ErrorTableRow(
            N=N,
            exact_mean=exact,
            err_baseline=abs(exact - baseline) / exact,
            err_elementary=abs(exact - (r_el.b_N + psi_k * r_el.a_N)) / exact,
            err_lambertw=abs(exact - (r_lw.b_N + psi_k * r_lw.a_N)) / exact,
        ))
    return rows


def regime_diagnostic(model, N):
    """Is N large enough for the short-time-driven approximation to bite?

    Reports the approximate mean in units of the diffusion time 4C = L^2/D,
    the competing-logs ratio |ln(A C^p)| / ln N, and the indicator that the
    ratio is below 1/2.
    """
    if N != int(N) or N < 3:
        raise DomainError(f"N must be an integer >= 3, got {N!r}")
    stp = model.short_time
    r = evt_core.rescaling_elementary(stp, int(N))
    mean = r.b_N - specfun.EULER_GAMMA * r.a_N
    log_ratio = abs(math.log(stp.A * stp.C ** stp.p)) / math.log(N)
    return RegimeDiagnostic(
        dimensionless_mean=mean / (4.0 * stp.C),
        log_ratio=log_ratio,
        in_regime=log_ratio < 0.5,
    )
