"""Gumbel limit law, k-th order-statistic limits, and normalizing sequences.

Three constructions of the centering/scaling pair (a_N, b_N) for the fastest
first passage time out of N searchers:

* ``lambertw``    -- exact inversion of the short-time law via LambertW,
* ``elementary``  -- iterated-logarithm formulas avoiding LambertW,
* ``numeric``     -- direct root-finding on the short-time survival.

All functions are pure.
"""

import math
from dataclasses import dataclass

from . import specfun
from .errors import DomainError, RescalingUndefinedError, SolverError
from .models import ShortTimeParams

__all__ = [
    "GumbelParams",
    "RescalingPair",
    "MomentApprox",
    "gumbel_survival",
    "gumbel_pdf",
    "gumbel_mean",
    "gumbel_variance",
    "gumbel_median",
    "gumbel_mode",
    "gumbel_mgf",
    "rescaling_lambertw",
    "rescaling_elementary",
    "rescaling_numeric",
    "xk_pdf",
    "xk_mean",
    "xk_variance",
    "xk_joint_pdf",
    "approx_moments",
]


@dataclass(frozen=True)
class GumbelParams:
    """Location/scale pair of the limit law P(X > x) = exp(-exp((x-b)/a))."""

    location: float
    scale: float

    def __post_init__(self):
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise DomainError(f"scale must be positive, got {self.scale!r}")


@dataclass(frozen=True)
class RescalingPair:
    """Normalizers (a_N, b_N) for one N, tagged with their construction."""

    a_N: float
    b_N: float
    N: int
    variant: str

    def gumbel(self):
        return GumbelParams(location=self.b_N, scale=self.a_N)


@dataclass(frozen=True)
class MomentApprox:
    mean: float
    variance: float


# ---------------------------------------------------------------------------
# Gumbel basics (minimum convention: survival exp(-exp((x-b)/a)))

def gumbel_survival(g, x):
    z = (x - g.location) / g.scale
    if z > 710.0:
        return 0.0
    return math.exp(-math.exp(z))


def gumbel_pdf(g, x):
    z = (x - g.location) / g.scale
    if z > 710.0:
        return 0.0
    return math.exp(z - math.exp(z)) / g.scale


def gumbel_mean(g):
    return g.location - specfun.EULER_GAMMA * g.scale


def gumbel_variance(g):
    return (math.pi ** 2 / 6.0) * g.scale ** 2


def gumbel_median(g):
    return g.location + g.scale * math.log(math.log(2.0))


def gumbel_mode(g):
    return g.location


def gumbel_mgf(g, t):
    """E[exp(t X)] = Gamma(1 + a t) exp(b t); needs 1 + a t > 0."""
    s = 1.0 + g.scale * t
    if s <= 0.0:
        raise DomainError(f"mgf pole: need 1 + a t > 0, got {s!r}")
    return math.gamma(s) * math.exp(g.location * t)


# ---------------------------------------------------------------------------
# Normalizing sequences

def _check_n(N, minimum):
    if N != int(N) or N < minimum:
        raise DomainError(f"N must be an integer >= {minimum}, got {N!r}")
    return int(N)


def _w0_from_log(ln_z):
    # Principal branch from ln z, solving w + ln w = ln z; used when z itself
    # would overflow a double.  Newton on the concave form converges globally.
    w = max(ln_z - math.log(ln_z), 1.0)
    for _ in range(60):
        dw = (w + math.log(w) - ln_z) / (1.0 + 1.0 / w)
        w -= dw
        if abs(dw) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


def _wm1_from_log(ln_neg_z):
    # Lower branch from ln(-z), solving v - ln v = -ln(-z) with W = -v;
    # used when -z underflows a double.
    target = -ln_neg_z
    v = target + math.log(max(target, 2.0))
    for _ in range(60):
        dv = (v - math.log(v) - target) / (1.0 - 1.0 / v)
        v -= dv
        if abs(dv) <= 1e-16 * (1.0 + abs(v)):
            break
    return -v


_LOG_DOUBLE_MAX = 700.0


def _min_valid_n_lambertw(stp):
    # Smallest N >= 2 with (C/p)(AN)^(1/p) inside the W_-1 domain (p < 0).
    q = abs(stp.p)
    n = max(2, math.ceil((math.e * stp.C / q) ** q / stp.A))
    while math.log(stp.A * n) < q * (1.0 + math.log(stp.C / q)):
        n += 1
    return n


def rescaling_lambertw(stp, N):
    """Normalizers from the LambertW inversion of the short-time law.

    p = 0:  b = C/ln(AN), a = b/ln(AN).
    p != 0: W = W0((C/p)(AN)^(1/p)) for p > 0, W-1(same) for p < 0;
            b = C/(pW), a = b/(p(1+W)).
    """
    N = _check_n(N, 2)
    A, p, C = stp.A, stp.p, stp.C

    if p == 0.0:
        ln_an = math.log(A) + math.log(N)
        if ln_an <= 0.0:
            raise RescalingUndefinedError(
                f"p = 0 needs AN > 1; minimal valid N is {max(2, math.floor(1.0 / A) + 1)}",
                min_valid_n=max(2, math.floor(1.0 / A) + 1))
        b = C / ln_an
        return RescalingPair(a_N=b / ln_an, b_N=b, N=N, variant="lambertw")

    ln_abs_arg = math.log(C / abs(p)) + (math.log(A) + math.log(N)) / p
    if p > 0.0:
        if ln_abs_arg > _LOG_DOUBLE_MAX:
            w = _w0_from_log(ln_abs_arg)
        else:
            w = specfun.lambert_w(specfun.PRINCIPAL, math.exp(ln_abs_arg))
        if w <= 0.0:
            raise SolverError(
                f"LambertW argument underflows at N = {N}; A is too small "
                "for a representable normalizer")
    else:
        if ln_abs_arg > -1.0:
            n_min = _min_valid_n_lambertw(stp)
            raise RescalingUndefinedError(
                f"LambertW lower-branch argument out of domain at N = {N}; "
                f"minimal valid N is {n_min}", min_valid_n=n_min)
        if ln_abs_arg < -_LOG_DOUBLE_MAX:
            w = _wm1_from_log(ln_abs_arg)
        else:
            w = specfun.lambert_w(specfun.LOWER, -math.exp(ln_abs_arg))
        if w >= -1.0:
            n_min = _min_valid_n_lambertw(stp)
            raise RescalingUndefinedError(
                f"degenerate normalizers at N = {N} (branch point); "
                f"minimal valid N is {n_min}", min_valid_n=n_min)
    b = C / (p * w)
    a = b / (p * (1.0 + w))
    return RescalingPair(a_N=a, b_N=b, N=N, variant="lambertw")


def rescaling_elementary(stp, N):
    """LambertW-free normalizers built from ln N and ln ln N alone."""
    N = _check_n(N, 3)
    A, p, C = stp.A, stp.p, stp.C
    ln_n = math.log(N)
    a = C / ln_n ** 2
    b = C / ln_n + C * p * math.log(ln_n) / ln_n ** 2 \
        - C * math.log(A * C ** p) / ln_n ** 2
    return RescalingPair(a_N=a, b_N=b, N=N, variant="elementary")


def rescaling_numeric(model, N):
    """Normalizers by inverting the short-time survival numerically.

    b_N solves S0(b_N) = 1 - 1/N for S0(t) = 1 - A t^p exp(-C/t), by
    bisection to a 1e-3 relative bracket followed by Newton in the log
    domain; a_N = -1/(N S0'(b_N)) with the analytic derivative.
    """
    N = _check_n(N, 2)
    stp = getattr(model, "short_time", model)
    if not isinstance(stp, ShortTimeParams):
        raise DomainError("model must carry ShortTimeParams")
    A, p, C = stp.A, stp.p, stp.C

    # log-domain residual: h(t) = ln(A t^p e^(-C/t)) + ln N, increasing while
    # t < C/|p| (always, for p >= 0)
    ln_an = math.log(A) + math.log(N)

    def h(t):
        return ln_an + p * math.log(t) - C / t

    t_peak = math.inf if p >= 0.0 else C / (-p)
    lo = C / (10.0 * math.log(N))
    hi = min(10.0 * C / math.log(N), 0.999 * t_peak)
    for _ in range(200):
        if h(lo) < 0.0:
            break
        lo *= 0.5
    else:
        raise SolverError("could not bracket b_N from below")
    for _ in range(200):
        if h(hi) > 0.0:
            break
        hi = min(hi * 2.0, 0.5 * (hi + t_peak))
        if t_peak - hi < 1e-12 * t_peak:
            raise SolverError(
                f"short-time survival never reaches 1 - 1/N for N = {N}")
    else:
        raise SolverError("could not bracket b_N from above")

    while (hi - lo) > 1e-3 * lo:
        mid = 0.5 * (lo + hi)
        if h(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(60):
        resid = h(t)
        t -= resid / (p / t + C / (t * t))
        if abs(resid) < 1e-13:
            break
    else:
        raise SolverError("Newton refinement of b_N did not converge")

    one_minus = A * t ** p * math.exp(-C / t)
    ds0 = -one_minus * (p / t + C / (t * t))
    a = -1.0 / (N * ds0)
    return RescalingPair(a_N=a, b_N=t, N=N, variant="numeric")


# ---------------------------------------------------------------------------
# k-th order-statistic limit law

def _check_k(k):
    if k != int(k) or k < 1:
        raise DomainError(f"k must be an integer >= 1, got {k!r}")
    return int(k)


def xk_pdf(k, x):
    """Density exp(kx - e^x)/(k-1)! of the k-th rescaled extreme limit."""
    k = _check_k(k)
    x = float(x)
    if x > 700.0:
        return 0.0
    return math.exp(k * x - math.exp(x) - math.lgamma(k))


def xk_mean(k):
    return specfun.digamma(_check_k(k))


def xk_variance(k):
    return specfun.trigamma(_check_k(k))


def xk_joint_pdf(xs):
    """Joint density of the k smallest rescaled extremes at (x_1 <= ... <= x_k)."""
    xs = [float(x) for x in xs]
    if not xs:
        raise DomainError("xk_joint_pdf needs at least one coordinate")
    if any(b < a for a, b in zip(xs, xs[1:])):
        return 0.0
    xk = xs[-1]
    if xk > 700.0:
        return 0.0
    return math.exp(math.fsum(xs) - math.exp(xk))


def approx_moments(r, k=1):
    """Large-N approximation: mean b + psi(k) a, variance psi'(k) a^2."""
    k = _check_k(k)
    return MomentApprox(
        mean=r.b_N + specfun.digamma(k) * r.a_N,
        variance=specfun.trigamma(k) * r.a_N ** 2,
    )
