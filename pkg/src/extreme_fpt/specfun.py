"""Scalar special functions used throughout the package.

Implemented from scratch so the accuracy contracts stay testable:
complementary error functions (plain and scaled), both real branches of
the LambertW function with its iterated-logarithm asymptotic series,
digamma/trigamma, harmonic numbers, and log-binomial coefficients.

All functions are pure and reentrant.  The only module state is the
Stirling-number triangle, which is built once at import time and never
mutated afterwards.
"""

import math

from .errors import DomainError

__all__ = [
    "PRINCIPAL",
    "LOWER",
    "EULER_GAMMA",
    "erf",
    "erfc",
    "erfcx",
    "exp_minus_sq",
    "lambert_w",
    "lambert_w_asymptotic",
    "digamma",
    "trigamma",
    "harmonic",
    "ln_binomial",
]

# LambertW branch identifiers: the principal branch W0 lives on [-1/e, inf)
# with W >= -1, the lower branch W-1 on [-1/e, 0) with W <= -1.
PRINCIPAL = "principal"
LOWER = "lower"

EULER_GAMMA = 0.5772156649015328606065120900824024

_SQRT_PI = 1.7724538509055160272981674833411452
_TWO_OVER_SQRT_PI = 2.0 / _SQRT_PI
_INV_E = math.exp(-1.0)

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker split constant


def _require_finite(x, name):
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")


def exp_minus_sq(x):
    """exp(-x*x) with the argument split so its rounding error stays O(eps).

    A naive exp(-x*x) is off by ~x^2 * eps relatively (1.6e-13 at x = 27);
    splitting x*x into an exactly representable head plus a small tail keeps
    the result within a few ulp.
    """
    t = _SPLITTER * x
    hi = t - (t - x)
    lo = x - hi
    return math.exp(-hi * hi) * math.exp(-(2.0 * hi + lo) * lo)


def _exp_plus_sq(x):
    # exp(+x*x), same splitting; overflows to inf for x*x > ~709.
    t = _SPLITTER * x
    hi = t - (t - x)
    lo = x - hi
    try:
        return math.exp(hi * hi) * math.exp((2.0 * hi + lo) * lo)
    except OverflowError:
        return math.inf


def _erf_series(x):
    # Maclaurin series for erf on |x| < 1; terms funneled through fsum,
    # so the summation itself is exact to the final rounding.
    terms = []
    t = x
    xx = x * x
    n = 0
    while abs(t) > 1e-22:
        terms.append(t)
        n += 1
        t *= -xx * (2 * n - 1) / (n * (2 * n + 1))
    return _TWO_OVER_SQRT_PI * math.fsum(terms)


def _erfcx_cf(x):
    # Laplace continued fraction for erfcx, x >= 1, via modified Lentz.
    # Stopping at |delta - 1| < 1e-17 both converges (<= ~200 iterations at
    # x = 1, a handful for large x) and avoids post-convergence noise.
    c = 1e308
    d = 1.0 / x
    h = d
    for i in range(1, 400):
        a = 0.5 * i
        d = 1.0 / (x + a * d)
        c = x + a / c
        if c == 0.0:
            c = 1e-300
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return h / _SQRT_PI


def erfc(x):
    """Complementary error function."""
    x = float(x)
    _require_finite(x, "x")
    if x < 0.0:
        return 2.0 - erfc(-x)
    if x < 1.0:
        return 1.0 - _erf_series(x)
    return _erfcx_cf(x) * exp_minus_sq(x)


def erf(x):
    """Error function, relatively accurate also when the result is tiny."""
    x = float(x)
    _require_finite(x, "x")
    if x < 0.0:
        return -erf(-x)
    if x < 1.0:
        return _erf_series(x)
    return 1.0 - erfc(x)


def erfcx(x):
    """Scaled complementary error function exp(x^2) * erfc(x).

    Stays O(1/x) for large positive x where erfc itself underflows;
    overflows to inf for x <= -27ish, where the true value exceeds the
    double range.
    """
    x = float(x)
    _require_finite(x, "x")
    if x >= 1.0:
        return _erfcx_cf(x)
    if x >= 0.0:
        return (1.0 - _erf_series(x)) * _exp_plus_sq(x)
    return 2.0 * _exp_plus_sq(x) - erfcx(-x)


# ---------------------------------------------------------------------------
# LambertW

def _branch_point_series(p):
    # Expansion of W about z = -1/e in p = +/- sqrt(2 (1 + e z)); the p^6
    # truncation is far below double rounding for |p| < 2.4e-3.
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (
        -43.0 / 540.0 + p * (769.0 / 17280.0 + p * (-221.0 / 8505.0))))))


def _halley(w, z):
    # Halley iteration on w e^w = z; stops on tolerance or when the step
    # stops shrinking (last-ulp oscillation).
    prev = math.inf
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - z
        if f == 0.0:
            break
        wp1 = w + 1.0
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        adw = abs(dw)
        if adw <= 1e-16 * (2.0 + abs(w)) or adw >= prev:
            break
        prev = adw
    return w


def lambert_w(branch, z):
    """Real LambertW: the W with W e^W = z on the requested branch.

    branch is "principal" (W0, z >= -1/e, W >= -1) or "lower"
    (W-1, -1/e <= z < 0, W <= -1).
    """
    z = float(z)
    _require_finite(z, "z")
    # 1/e is not a double, so z == -float(1/e) sits ~5e-18 outside the true
    # domain; treat everything within a few ulp of the branch point as on it.
    q = z + _INV_E
    if q < 0.0:
        if q > -1e-15:
            q = 0.0
        else:
            raise DomainError(f"z = {z!r} below the branch point -1/e")

    if branch == PRINCIPAL:
        if z == 0.0:
            return 0.0
        if q < 1e-6:
            # Halley's denominator degenerates at the branch point; the
            # series alone is already below double rounding here.
            return _branch_point_series(math.sqrt(2.0 * math.e * q))
        if z < -0.25:
            w = _branch_point_series(math.sqrt(2.0 * math.e * q))
        elif z < 1.0:
            w = z * (1.0 - z * (1.0 - 1.5 * z))
        else:
            l1 = math.log(z)
            if l1 > 1.0:
                l2 = math.log(l1)
                w = l1 - l2 + l2 / l1
            else:
                w = 0.5
        return _halley(w, z)

    if branch == LOWER:
        if z >= 0.0:
            raise DomainError(f"lower branch needs z < 0, got {z!r}")
        if q < 1e-6:
            return _branch_point_series(-math.sqrt(2.0 * math.e * q))
        if z < -0.25:
            w = _branch_point_series(-math.sqrt(2.0 * math.e * q))
        else:
            l1 = math.log(-z)
            l2 = math.log(-l1)
            w = l1 - l2 + l2 / l1
        return _halley(w, z)

    raise DomainError(f"unknown branch {branch!r}")


def _stirling_triangle(n_max):
    # Unsigned Stirling numbers of the first kind, exact integers:
    # s(n, k) = s(n-1, k-1) + (n-1) s(n-1, k).
    rows = [[1]]
    for n in range(1, n_max + 1):
        prev = rows[-1]
        row = [0] * (n + 1)
        for k in range(1, n + 1):
            row[k] = prev[k - 1] + (n - 1) * (prev[k] if k < n else 0)
        rows.append(row)
    return rows

_STIRLING_CACHE_ORDER = 8
_STIRLING = _stirling_triangle(_STIRLING_CACHE_ORDER)


def _stirling1u(n, k):
    if n <= _STIRLING_CACHE_ORDER:
        return _STIRLING[n][k]
    return _stirling_triangle(n)[n][k]


def lambert_w_asymptotic(branch, z, order):
    """Iterated-logarithm expansion of LambertW, truncated at i + j <= order.

    Returns L1 - L2 + sum c_ij L1^(-i-j) L2^j with c_ij built from unsigned
    Stirling numbers of the first kind, c_ij = (-1)^i / j! * s1(i+j, i+1).
    L1 = ln z, L2 = ln ln z on the principal branch; L1 = ln(-z),
    L2 = ln(-ln(-z)) on the lower branch.  Valid asymptotically (z >> 1,
    respectively z -> 0-); accuracy off that regime is the caller's problem.
    """
    z = float(z)
    _require_finite(z, "z")
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")
    if branch == PRINCIPAL:
        if z <= 1.0:
            raise DomainError("principal-branch expansion needs z > 1")
        l1 = math.log(z)
    elif branch == LOWER:
        if not -_INV_E <= z < 0.0:
            raise DomainError("lower-branch expansion needs -1/e <= z < 0")
        l1 = math.log(-z)
    else:
        raise DomainError(f"unknown branch {branch!r}")
    l2 = math.log(l1) if branch == PRINCIPAL else math.log(-l1)

    total = l1 - l2
    for j in range(1, order + 1):
        fj = math.factorial(j)
        for i in range(0, order - j + 1):
            cij = (-1) ** i / fj * _stirling1u(i + j, i + 1)
            total += cij * l1 ** (-i - j) * l2 ** j
    return total


# ---------------------------------------------------------------------------
# Gamma-family helpers

# Asymptotic tail coefficients: B_2k / (2k) for digamma, B_2k for trigamma.
_DIGAMMA_TAIL = (
    1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
    1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0,
)
_TRIGAMMA_TAIL = (
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0,
)
_SHIFT = 10.0


def digamma(x):
    """Digamma psi(x) for x > 0."""
    x = float(x)
    _require_finite(x, "x")
    if x <= 0.0:
        raise DomainError(f"digamma needs x > 0, got {x!r}")
    acc = 0.0
    while x < _SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    for c in reversed(_DIGAMMA_TAIL):
        tail = (tail + c) * inv2
    return acc + math.log(x) - 0.5 / x - tail


def trigamma(x):
    """Trigamma psi'(x) for x > 0."""
    x = float(x)
    _require_finite(x, "x")
    if x <= 0.0:
        raise DomainError(f"trigamma needs x > 0, got {x!r}")
    acc = 0.0
    while x < _SHIFT:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = 0.0
    for c in reversed(_TRIGAMMA_TAIL):
        tail = (tail + c) * inv2
    return acc + inv * (1.0 + 0.5 * inv + tail)


def harmonic(k):
    """Harmonic number H_k = sum_{r<=k} 1/r, with H_0 = 0."""
    if k != int(k) or k < 0:
        raise DomainError(f"harmonic needs an integer k >= 0, got {k!r}")
    return math.fsum(1.0 / r for r in range(1, int(k) + 1))


def ln_binomial(n, j):
    """log of the binomial coefficient C(n, j), good up to n ~ 1e9."""
    if n != int(n) or j != int(j):
        raise DomainError("ln_binomial needs integer arguments")
    n, j = int(n), int(j)
    if not 0 <= j <= n:
        raise DomainError(f"need 0 <= j <= n, got n={n}, j={j}")
    if j == 0 or j == n:
        return 0.0
    return math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)
