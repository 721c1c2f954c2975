"""Single-searcher survival models S(t) and their short-time parameters.

Three closed-form models (1d absorbing point, 1d partially absorbing point,
exit from a 3d sphere) plus an interpolating model for user-tabulated data.
Each model evaluates S(t), the complement 1 - S(t) on a dedicated path that
never forms "1 minus a float near 1", and optionally S'(t).

Models are immutable after construction; every evaluation is pure.
"""

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

from scipy.interpolate import PchipInterpolator

from . import specfun
from .errors import DomainError, ValidationError

__all__ = [
    "ShortTimeParams",
    "TailClass",
    "SurvivalModel",
    "model_1d_point",
    "model_1d_robin",
    "model_3d_sphere",
    "model_tabulated",
    "load_tabulated_csv",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class ShortTimeParams:
    """Constants (A, p, C) of the short-time law 1 - S(t) ~ A t^p exp(-C/t)."""

    A: float
    p: float
    C: float

    def __post_init__(self):
        if not (self.A > 0.0 and math.isfinite(self.A)):
            raise DomainError(f"A must be positive and finite, got {self.A!r}")
        if not (self.C > 0.0 and math.isfinite(self.C)):
            raise DomainError(f"C must be positive and finite, got {self.C!r}")
        if not math.isfinite(self.p):
            raise DomainError(f"p must be finite, got {self.p!r}")

    def one_minus_survival(self, t):
        """The reference short-time law A t^p exp(-C/t) itself."""
        if t <= 0.0:
            return 0.0
        return self.A * t ** self.p * math.exp(-self.C / t)


@dataclass(frozen=True)
class TailClass:
    """Large-t behavior of S: exponential decay or a power law t^(-alpha)."""

    kind: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind == "power":
            if self.alpha is None or not self.alpha > 0.0:
                raise ValidationError("power tail needs alpha > 0")
        elif self.kind == "exponential":
            if self.alpha is not None:
                raise ValidationError("exponential tail takes no alpha")
        else:
            raise ValidationError(f"unknown tail kind {self.kind!r}")

    @classmethod
    def exponential(cls):
        return cls("exponential")

    @classmethod
    def power(cls, alpha):
        return cls("power", float(alpha))


@dataclass(frozen=True)
class SurvivalModel:
    """A survival function with its short-time and tail metadata.

    survival and one_minus_survival are scalar callables of t >= 0;
    one_minus_survival keeps full relative accuracy deep in the short-time
    regime where S rounds to 1.  survival_derivative, when present, is the
    analytic S'(t) <= 0.  levy_exact carries (L, D) for models admitting the
    exact reciprocal-squared-normal sampler.
    """

    survival: Callable[[float], float]
    one_minus_survival: Callable[[float], float]
    short_time: ShortTimeParams
    tail_class: TailClass
    label: str
    survival_derivative: Optional[Callable[[float], float]] = None
    levy_exact: Optional[tuple] = None


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not (value > 0.0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive and finite, got {value!r}")


def model_1d_point(L, D):
    """Searcher started a distance L from a perfectly absorbing point, 1d.

    S(t) = 1 - erfc(L / sqrt(4 D t)) = erf(L / sqrt(4 D t)).
    """
    L, D = float(L), float(D)
    _check_positive(L=L, D=D)
    half_width = L / (2.0 * math.sqrt(D))  # eta = half_width / sqrt(t)

    def survival(t):
        if t <= 0.0:
            return 1.0
        return specfun.erf(half_width / math.sqrt(t))

    def one_minus(t):
        if t <= 0.0:
            return 0.0
        return specfun.erfc(half_width / math.sqrt(t))

    def derivative(t):
        if t <= 0.0:
            return 0.0
        eta = half_width / math.sqrt(t)
        return -eta * specfun.exp_minus_sq(eta) / (_SQRT_PI * t)

    stp = ShortTimeParams(A=math.sqrt(4.0 * D / (math.pi * L * L)), p=0.5,
                          C=L * L / (4.0 * D))
    return SurvivalModel(
        survival=survival,
        one_minus_survival=one_minus,
        survival_derivative=derivative,
        short_time=stp,
        tail_class=TailClass.power(0.5),
        label=f"point1d(L={L:g}, D={D:g})",
        levy_exact=(L, D),
    )


def model_1d_robin(L, D, kappa):
    """1d searcher with a partially absorbing (Robin) target of reactivity kappa.

    The textbook survival
        S = 1 - erfc(eta) + exp(kappa (kappa t + L) / D) erfc(beta),
    with eta = L/sqrt(4 D t) and beta = (2 kappa t + L)/sqrt(4 D t), overflows
    once kappa^2 t / D exceeds ~700.  Completing the square gives the exact
    rewriting used here:
        S = 1 - erfc(eta) + erfcx(beta) exp(-eta^2),
        1 - S = exp(-eta^2) (erfcx(eta) - erfcx(beta)).
    """
    L, D, kappa = float(L), float(D), float(kappa)
    _check_positive(L=L, D=D, kappa=kappa)
    half_width = L / (2.0 * math.sqrt(D))
    kd = kappa / math.sqrt(D)  # beta = eta + kd sqrt(t)

    def _eta_beta(t):
        rt = math.sqrt(t)
        eta = half_width / rt
        return eta, eta + kd * rt

    def one_minus(t):
        if t <= 0.0:
            return 0.0
        eta, beta = _eta_beta(t)
        diff = specfun.erfcx(eta) - specfun.erfcx(beta)
        return specfun.exp_minus_sq(eta) * diff

    def survival(t):
        if t <= 0.0:
            return 1.0
        q = one_minus(t)
        if q < 0.5:
            # 1 - q rounds monotonically, avoiding last-ulp wobble near 1
            # that the direct two-term sum exhibits
            return 1.0 - q
        eta, beta = _eta_beta(t)
        return specfun.erf(eta) + specfun.erfcx(beta) * specfun.exp_minus_sq(eta)

    def derivative(t):
        if t <= 0.0:
            return 0.0
        eta, beta = _eta_beta(t)
        gap = beta - eta
        bracket = specfun.erfcx(beta) * gap - 1.0 / _SQRT_PI
        return specfun.exp_minus_sq(eta) * gap * bracket / t

    stp = ShortTimeParams(
        A=(4.0 / _SQRT_PI) * (kappa * L / D) * (D / (L * L)) ** 1.5,
        p=1.5,
        C=L * L / (4.0 * D),
    )
    return SurvivalModel(
        survival=survival,
        one_minus_survival=one_minus,
        survival_derivative=derivative,
        short_time=stp,
        tail_class=TailClass.power(0.5),
        label=f"robin1d(L={L:g}, D={D:g}, kappa={kappa:g})",
    )


_SERIES_REL_TOL = 1e-16
_SPHERE_SWITCH = 0.25  # image series below Dt/L^2 = 0.25, eigenfunctions above


def model_3d_sphere(L, D):
    """First exit of a 3d searcher from a sphere of radius L around its start.

    Dual series for the same S(t), exchanged by the Jacobi theta transform:
    a Gaussian-image sum that converges for small t and an eigenfunction sum
    that converges for large t.  Both are truncated once a term drops below
    1e-16 of the running sum; at the switch point each needs <= 10 terms.
    """
    L, D = float(L), float(D)
    _check_positive(L=L, D=D)
    tau_scale = L * L / D  # diffusion time scale
    lam = math.pi * math.pi * D / (L * L)  # slowest eigenrate

    def _image_sum(t):
        # sum_j exp(-(j+1/2)^2 L^2/(D t)), доминated by j = 0
        x = tau_scale / t
        total = 0.0
        j = 0
        while True:
            term = math.exp(-((j + 0.5) ** 2) * x)
            total += term
            if term < _SERIES_REL_TOL * total or j > 200:
                break
            j += 1
        return total

    def _one_minus_image(t):
        return 2.0 * math.sqrt(tau_scale / (math.pi * t)) * _image_sum(t)

    def _survival_eigen(t):
        total = 0.0
        n = 1
        while True:
            term = 2.0 * (-1.0) ** (n + 1) * math.exp(-(n * n) * lam * t)
            total += term
            if abs(term) < _SERIES_REL_TOL * abs(total) or n > 200:
                break
            n += 1
        return total

    def survival(t):
        if t <= 0.0:
            return 1.0
        if t < _SPHERE_SWITCH * tau_scale:
            return 1.0 - _one_minus_image(t)
        return _survival_eigen(t)

    def one_minus(t):
        if t <= 0.0:
            return 0.0
        if t < _SPHERE_SWITCH * tau_scale:
            return _one_minus_image(t)
        return 1.0 - _survival_eigen(t)

    def derivative(t):
        if t <= 0.0:
            return 0.0
        if t < _SPHERE_SWITCH * tau_scale:
            # d/dt of -2 sqrt(tau/(pi t)) sum_j exp(-c_j/t)
            pref = 2.0 * math.sqrt(tau_scale / (math.pi * t))
            x = tau_scale / t
            total = 0.0
            j = 0
            while True:
                cj = (j + 0.5) ** 2 * x  # c_j / t
                term = math.exp(-cj) * (cj - 0.5)
                total += term
                if abs(term) < _SERIES_REL_TOL * abs(total) or j > 200:
                    break
                j += 1
            return -pref * total / t
        total = 0.0
        n = 1
        while True:
            term = 2.0 * (-1.0) ** (n + 1) * (n * n) * math.exp(-(n * n) * lam * t)
            total += term
            if abs(term) < _SERIES_REL_TOL * abs(total) or n > 200:
                break
            n += 1
        return -lam * total

    stp = ShortTimeParams(A=2.0 * math.sqrt(tau_scale / math.pi), p=-0.5,
                          C=L * L / (4.0 * D))
    return SurvivalModel(
        survival=survival,
        one_minus_survival=one_minus,
        survival_derivative=derivative,
        short_time=stp,
        tail_class=TailClass.exponential(),
        label=f"sphere3d(L={L:g}, D={D:g})",
    )


def model_tabulated(ts, Ss, short_time, tail_class, label="tabulated"):
    """Monotone interpolation of user-supplied (t, S) samples.

    Below min(ts) the declared short-time law 1 - A t^p exp(-C/t) takes over;
    above max(ts) the declared tail class extrapolates from the last nodes.
    The short-time parameters are taken on trust, they are not fitted.
    """
    ts = [float(t) for t in ts]
    Ss = [float(s) for s in Ss]
    if len(ts) != len(Ss):
        raise ValidationError("ts and Ss must have equal length")
    if len(ts) < 4:
        raise ValidationError("need at least 4 tabulated points")
    if any(t <= 0.0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValidationError("ts must be positive and strictly increasing")
    if any(not 0.0 < s <= 1.0 for s in Ss):
        raise ValidationError("Ss must lie in (0, 1]")
    if any(b > a for a, b in zip(Ss, Ss[1:])):
        raise ValidationError("Ss must be nonincreasing")
    if not isinstance(short_time, ShortTimeParams):
        raise ValidationError("short_time must be a ShortTimeParams")
    if not isinstance(tail_class, TailClass):
        raise ValidationError("tail_class must be a TailClass")

    log_ts = [math.log(t) for t in ts]
    interp = PchipInterpolator(log_ts, Ss, extrapolate=False)
    dinterp = interp.derivative()
    t_lo, t_hi = ts[0], ts[-1]
    s_lo, s_hi = Ss[0], Ss[-1]

    if tail_class.kind == "exponential":
        # rate fitted to the last two nodes
        if Ss[-1] >= Ss[-2]:
            raise ValidationError("exponential tail needs strictly decreasing final nodes")
        rate = math.log(Ss[-2] / Ss[-1]) / (ts[-1] - ts[-2])

        def tail_s(t):
            return s_hi * math.exp(-rate * (t - t_hi))

        def tail_ds(t):
            return -rate * tail_s(t)
    else:
        alpha = tail_class.alpha

        def tail_s(t):
            return s_hi * (t / t_hi) ** (-alpha)

        def tail_ds(t):
            return -alpha * tail_s(t) / t

    def survival(t):
        if t <= 0.0:
            return 1.0
        if t < t_lo:
            return 1.0 - short_time.one_minus_survival(t)
        if t > t_hi:
            return min(1.0, tail_s(t))
        return min(1.0, max(0.0, float(interp(math.log(t)))))

    def one_minus(t):
        if t <= 0.0:
            return 0.0
        if t < t_lo:
            return short_time.one_minus_survival(t)
        return 1.0 - survival(t)

    def derivative(t):
        if t <= 0.0:
            return 0.0
        if t < t_lo:
            q = short_time.one_minus_survival(t)
            return -q * (short_time.p / t + short_time.C / (t * t))
        if t > t_hi:
            return tail_ds(t)
        return float(dinterp(math.log(t))) / t

    return SurvivalModel(
        survival=survival,
        one_minus_survival=one_minus,
        survival_derivative=derivative,
        short_time=short_time,
        tail_class=tail_class,
        label=label,
    )


def load_tabulated_csv(path, short_time, tail_class, label=None):
    """Build a tabulated model from a two-column CSV with header ``t,S``."""
    ts, Ss = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["t", "S"]:
            raise ValidationError(f"{path}: expected header 't,S'")
        for row in reader:
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                ts.append(float(row[0]))
                Ss.append(float(row[1]))
            except (ValueError, IndexError) as exc:
                raise ValidationError(f"{path}: bad row {row!r}") from exc
    return model_tabulated(ts, Ss, short_time, tail_class,
                           label=label or f"tabulated({path})")
