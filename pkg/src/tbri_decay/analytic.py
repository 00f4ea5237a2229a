"""Closed-form strength functions and decay laws, and fits of W(t).

Three strength-function shapes are provided: Breit-Wigner (Lorentzian),
Gaussian, and the hybrid Gaussian-enveloped Lorentzian

    P(E) = B exp(-(E-E0)^2 / 2 sigma^2) / ((E-E0)^2 + gamma^2/4),

whose normalisation B and variance have closed forms in terms of
erfcx(z) = exp(z^2) erfc(z) with z = gamma / (sigma sqrt(8)).  Working with
erfcx keeps everything finite for any gamma/sigma.

The return amplitude of the hybrid shape is computed by quadrature of its
Fourier integral.  The default route integrates along the steepest-descent
line Im E = -sigma^2 t, where the integrand is a plain Gaussian times a
rational function, and adds the Lorentzian pole residue once the line has
passed it.  No cancellation occurs, so W(t) stays accurate far below the
1e-16 floor that limits real-axis quadrature.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate
from scipy.special import erfcx

from .dynamics import SurvivalSeries, TimeGrid
from .exceptions import InsufficientRange, NoIntersection, QuadratureAccuracyLoss, SaturationDominates

SQRT2PI = math.sqrt(2 * math.pi)


# ----------------------------------------------------------------------------
# strength-function models


@dataclass(frozen=True)
class BreitWigner:
    gamma: float
    center: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def density(self, E):
        x = np.asarray(E, dtype=float) - self.center
        return self.gamma / (2 * np.pi) / (x**2 + 0.25 * self.gamma**2)


@dataclass(frozen=True)
class Gaussian:
    sigma: float
    center: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def density(self, E):
        x = np.asarray(E, dtype=float) - self.center
        return np.exp(-0.5 * (x / self.sigma) ** 2) / (SQRT2PI * self.sigma)


@dataclass(frozen=True)
class Hybrid:
    """Gaussian-enveloped Lorentzian; `norm` is filled in from (gamma, sigma)."""

    gamma: float
    sigma: float
    center: float = 0.0
    norm: float = field(default=float("nan"))
    validate: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if not (self.gamma > 0 and self.sigma > 0):
            raise ValueError("gamma and sigma must be positive")
        B = hybrid_normalization(self.gamma, self.sigma)
        if not math.isnan(self.norm) and abs(self.norm - B) > 1e-10 * B:
            raise ValueError(f"norm {self.norm} inconsistent with closed form {B}")
        object.__setattr__(self, "norm", B)
        if self.validate:
            q = 1.0 / quadrature_moments(self.gamma, self.sigma)[0]
            if abs(q - B) > 1e-6 * B:
                raise QuadratureAccuracyLoss(f"closed-form B={B} vs quadrature {q}")

    def density(self, E):
        x = np.asarray(E, dtype=float) - self.center
        return self.norm * np.exp(-0.5 * (x / self.sigma) ** 2) / (x**2 + 0.25 * self.gamma**2)

    @property
    def variance(self) -> float:
        return hybrid_variance(self.gamma, self.sigma)


StrengthFunctionModel = Union[BreitWigner, Gaussian, Hybrid]


def evaluate_sf(model: StrengthFunctionModel, E):
    """Density of `model` at energies `E`."""
    return model.density(E)


def golden_rule_gamma(mean_v_sq: float, rho_f_at_E: float) -> float:
    """Spreading width 2 pi <|V_if|^2> rho_f."""
    if mean_v_sq < 0 or rho_f_at_E < 0:
        raise ValueError("inputs must be nonnegative")
    return 2 * math.pi * mean_v_sq * rho_f_at_E


def _z(gamma, sigma):
    return gamma / (sigma * math.sqrt(8.0))


def hybrid_normalization(gamma: float, sigma: float) -> float:
    """B such that the hybrid density integrates to one.

    1/B = 2 [1 - erf(z)] (pi/gamma) exp(z^2) = 2 pi erfcx(z) / gamma.
    """
    if not (gamma > 0 and sigma > 0):
        raise ValueError("gamma and sigma must be positive")
    return gamma / (2 * math.pi * float(erfcx(_z(gamma, sigma))))


def _one_minus_z_erfcx(z: float) -> float:
    # 1 - sqrt(pi) z erfcx(z); asymptotic series once the direct form cancels
    if z < 8.0:
        return 1.0 - math.sqrt(math.pi) * z * float(erfcx(z))
    u = 1.0 / (2.0 * z * z)
    term, total, k = 1.0, 0.0, 1
    while k < 30:
        term *= -(2 * k - 1) * u
        if abs(term) < 1e-18:
            break
        total += term
        k += 1
    return -total


def hybrid_variance(gamma: float, sigma: float) -> float:
    """Second central moment of the hybrid density.

    Delta^2 = B {sigma sqrt(2 pi) - (pi gamma / 2) erfcx(z)}.  For large z
    the bracket is evaluated from the asymptotic expansion of erfcx to avoid
    cancellation.
    """
    B = hybrid_normalization(gamma, sigma)
    return B * sigma * SQRT2PI * _one_minus_z_erfcx(_z(gamma, sigma))


def quadrature_moments(gamma: float, sigma: float, epsrel: float = 1e-12):
    """(integral of exp(-x^2/2s^2)/(x^2+a^2), and of x^2 times it) by adaptive quadrature."""
    a = 0.5 * gamma
    L = 40.0 * sigma
    marks = sorted({x for x in (a, 4 * a, 16 * a, 64 * a, sigma, 4 * sigma, 10 * sigma) if 0 < x < L})
    edges = [0.0] + marks + [L]

    def piece(f):
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            val, _ = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=epsrel, limit=200)
            total += val
        return 2.0 * total

    g = lambda x: math.exp(-0.5 * (x / sigma) ** 2) / (x * x + a * a)
    g2 = lambda x: x * x * math.exp(-0.5 * (x / sigma) ** 2) / (x * x + a * a)
    return piece(g), piece(g2)


# ----------------------------------------------------------------------------
# return amplitude of the hybrid strength function


def hybrid_amplitude_exact(gamma: float, sigma: float, t) -> np.ndarray:
    """Closed form of the hybrid return amplitude (real, E0 phase removed).

    A(t) = [g erfcx(u-) + g erfcx(u+)] / (2 erfcx(z)),  g = exp(-sigma^2 t^2/2),
    u(+/-) = (a/sigma +/- sigma t)/sqrt(2), a = gamma/2, with the branch
    u- < 0 rewritten through erfc(u) = 2 - erfc(-u) so that the Lorentzian
    pole term 2 exp(a^2/2sigma^2 - a t) appears explicitly.
    """
    t = np.abs(np.atleast_1d(np.asarray(t, dtype=float)))
    a = 0.5 * gamma
    s = sigma
    z = _z(gamma, sigma)
    up = (a / s + s * t) / math.sqrt(2)
    um = (a / s - s * t) / math.sqrt(2)
    g = np.exp(-0.5 * (s * t) ** 2)
    out = np.empty_like(t)
    pos = um >= 0
    out[pos] = g[pos] * (erfcx(um[pos]) + erfcx(up[pos]))
    neg = ~pos
    pole = 2.0 * np.exp(a * a / (2 * s * s) - a * t[neg])
    out[neg] = pole + g[neg] * (erfcx(up[neg]) - erfcx(-um[neg]))
    return out / (2.0 * float(erfcx(z)))


def _contour_point(gamma, sigma, B, t, epsrel=1e-12):
    a = 0.5 * gamma
    s2 = sigma * sigma
    c = s2 * t
    if abs(c - a) < 0.05 * a:
        c = 1.1 * a if c >= a else 0.9 * a
    omega = c / s2 - t
    scale = math.exp(c * c / (2 * s2) - c * t)

    def f(y):
        d = complex(y * y - c * c + a * a, -2.0 * c * y)
        return math.exp(-0.5 * y * y / s2) * (complex(math.cos(omega * y), math.sin(omega * y)) / d).real

    L = 40.0 * sigma
    marks = sorted({x for x in (abs(c - a), a, c, 4 * a, sigma, 4 * sigma, 10 * sigma) if 0 < x < L})
    edges = [0.0] + marks + [L]
    line, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=epsrel, limit=400)
        line += v
        err += e
    value = 2.0 * scale * line
    error = 2.0 * scale * err
    if c > a:
        value += (math.pi / a) * math.exp(a * a / (2 * s2) - a * t)
    return B * value, B * error


_GL = {n: np.polynomial.legendre.leggauss(n) for n in (16, 32)}


def _panel_point(gamma, sigma, B, t, max_panels=2_000_000):
    a = 0.5 * gamma
    L = max(40.0 * sigma, 40.0 * gamma)
    # graded breakpoints resolve the Lorentzian core; uniform ones the oscillation
    core = a * np.geomspace(1.0 / 64, 64.0, 25)
    pts = [np.array([0.0, L]), core[core < L]]
    width = min(math.pi / (4 * t) if t > 0 else L, sigma / 2)
    if L / width > max_panels:
        raise QuadratureAccuracyLoss(f"t={t:g} needs more than {max_panels} panels")
    pts.append(np.arange(0.0, L, width))
    edges = np.unique(np.concatenate(pts))
    lo, hi = edges[:-1], edges[1:]
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
    res = {}
    absint = 0.0
    for n, (x, w) in _GL.items():
        X = mid[:, None] + half[:, None] * x[None, :]
        F = np.exp(-0.5 * (X / sigma) ** 2) * np.cos(X * t) / (X * X + a * a)
        res[n] = float(np.sum(half * (F @ w)))
        if n == 32:
            absint = float(np.sum(half * (np.abs(F) @ w)))
    value = 2.0 * B * res[32]
    error = 2.0 * B * (abs(res[32] - res[16]) + 64 * np.finfo(float).eps * absint)
    return value, error


def hybrid_amplitude(
    model: Hybrid,
    grid: Union[TimeGrid, Sequence[float], np.ndarray],
    method: str = "contour",
    raise_on_loss: bool = False,
) -> SurvivalSeries:
    """Return amplitude of the hybrid strength function by numerical quadrature.

    Parameters
    ----------
    model : Hybrid
    grid : TimeGrid or array of times
    method : {'contour', 'panels'}
        'contour' integrates along the steepest-descent line (plus pole
        residue); 'panels' integrates along the real axis over
        +/- max(40 sigma, 40 gamma) with Gauss-Legendre panels no wider than
        pi/(4t), comparing 16- and 32-point rules for the error estimate.
    raise_on_loss : bool
        Raise QuadratureAccuracyLoss instead of flagging points whose error
        estimate exceeds 1e-10 + 1e-6 |A|.

    Returns
    -------
    SurvivalSeries
        Provenance 'hybrid-fourier'; ``amplitude`` holds the real A(t) with
        the E0 phase removed, ``meta['abs_error']`` the per-point error
        estimates and ``meta['accuracy_loss']`` the boolean flags.
    """
    if not isinstance(grid, TimeGrid):
        grid = TimeGrid(np.asarray(grid, dtype=float))
    point = {"contour": _contour_point, "panels": _panel_point}[method]
    B = model.norm
    A = np.empty(len(grid))
    err = np.empty(len(grid))
    for k, t in enumerate(grid.t_values):
        if t == 0.0:
            # normalisation integral itself
            g0, _ = quadrature_moments(model.gamma, model.sigma)
            A[k], err[k] = B * g0, 0.0
            continue
        A[k], err[k] = point(model.gamma, model.sigma, B, float(t))
    loss = err > 1e-10 + 1e-6 * np.abs(A)
    if raise_on_loss and np.any(loss):
        bad = grid.t_values[loss]
        raise QuadratureAccuracyLoss(f"{loss.sum()} points lost accuracy, first at t={bad[0]:g}")
    meta = {
        "gamma": model.gamma,
        "sigma": model.sigma,
        "delta_e_sq": model.variance,
        "method": method,
        "abs_error": err,
        "accuracy_loss": loss,
    }
    return SurvivalSeries(grid, A * A, "hybrid-fourier", meta, A)


def short_time_series(gamma: float, sigma: float, t):
    """Three-term small-t series of |A(t)| for the hybrid shape with gamma << sigma.

    |A| = 1 - (gamma sigma / sqrt(2 pi)) t^2 / 2 + (gamma sigma^3 / sqrt(2 pi)) t^4 / 24.
    """
    if gamma > 0.2 * sigma:
        warnings.warn("short-time series assumes gamma << sigma", stacklevel=2)
    t = np.asarray(t, dtype=float)
    if np.any(sigma * np.abs(t) >= 1.0):
        warnings.warn("short-time series assumes sigma * t < 1", stacklevel=2)
    c = gamma * sigma / SQRT2PI
    return 1.0 - 0.5 * c * t**2 + c * sigma**2 * t**4 / 24.0


# ----------------------------------------------------------------------------
# closed-form decay laws

LAWS = ("gaussian", "exponential", "interpolation", "asymptotic_tail", "weak_tail")


def asymptotic_tail_prefactor(gamma: float, delta_e: float) -> float:
    """Prefactor (pi^2 gamma^2 / 8 Delta^2) exp(gamma^2 / 4 Delta^2) of the strong-coupling tail."""
    r2 = (gamma / delta_e) ** 2
    return math.pi**2 * r2 / 8.0 * math.exp(0.25 * r2)


def weak_tail_prefactor(gamma: float, delta_e: float) -> float:
    """exp(gamma^2 / (pi Delta^2)), the weak-coupling tail prefactor."""
    return math.exp((gamma / delta_e) ** 2 / math.pi)


def exact_tail_prefactor(gamma: float, sigma: float) -> float:
    """Pole-term prefactor of the hybrid shape: exp(gamma^2/4 sigma^2) / erfcx(z)^2.

    W(t) -> this * exp(-gamma t) once the Gaussian part of the amplitude
    has died out; follows from :func:`hybrid_amplitude_exact`.
    """
    z = _z(gamma, sigma)
    return math.exp(0.25 * (gamma / sigma) ** 2) / float(erfcx(z)) ** 2


def closed_form_w(law: str, t, *, gamma: Optional[float] = None, delta_e: Optional[float] = None,
                  prefactor: Optional[float] = None):
    """Evaluate one of the closed-form decay laws at times `t`.

    ``gaussian``         exp(-Delta^2 t^2)
    ``exponential``      C exp(-gamma t)
    ``interpolation``    exp(gamma^2/2Delta^2 - sqrt(gamma^4/4Delta^4 + gamma^2 t^2))
    ``asymptotic_tail``  (pi^2 gamma^2/8Delta^2) exp(gamma^2/4Delta^2 - gamma t)
    ``weak_tail``        exp(gamma^2/(pi Delta^2) - gamma t)
    """
    t = np.asarray(t, dtype=float)
    if law == "gaussian":
        return np.exp(-((delta_e * t) ** 2))
    if law == "exponential":
        C = 1.0 if prefactor is None else prefactor
        return C * np.exp(-gamma * t)
    if law == "interpolation":
        r = gamma**2 / (2 * delta_e**2)
        return np.exp(r - np.sqrt(r * r + (gamma * t) ** 2))
    if law == "asymptotic_tail":
        return asymptotic_tail_prefactor(gamma, delta_e) * np.exp(-gamma * t)
    if law == "weak_tail":
        return weak_tail_prefactor(gamma, delta_e) * np.exp(-gamma * t)
    raise ValueError(f"unknown law {law!r}; expected one of {LAWS}")


def bw_strength_function(E, gamma: float, center: float = 0.0):
    """Breit-Wigner strength function (gamma/2pi) / ((E-center)^2 + gamma^2/4)."""
    return evaluate_sf(BreitWigner(gamma), np.asarray(E, dtype=float) - center)


def hybrid_strength_function(E, gamma: float, sigma: float, center: float = 0.0):
    """Normalised Gaussian times Breit-Wigner strength function."""
    return evaluate_sf(Hybrid(gamma, sigma), np.asarray(E, dtype=float) - center)


def short_time_law(t, delta_e: float):
    """Leading short-time behaviour 1 - Delta_E^2 t^2 of W(t)."""
    return 1.0 - (delta_e * np.asarray(t, dtype=float)) ** 2


def gaussian_decay(t, delta_e: float):
    """W(t) = exp(-Delta_E^2 t^2) for a Gaussian strength function of width Delta_E."""
    return closed_form_w("gaussian", t, delta_e=delta_e)


def interpolation_w(t, gamma: float, delta_e: float):
    """Interpolation between Gaussian decay at short times and exp(-gamma t) at long times."""
    return closed_form_w("interpolation", t, gamma=gamma, delta_e=delta_e)


@dataclass
class CrossoverTimes:
    """Crossover estimates between the Gaussian and exponential regimes.

    ``t_ratio`` is gamma/Delta^2; ``t_half`` is gamma/(2 Delta^2), the value
    that the conventional schematic figure (gamma=0.5, Delta=1.2, t_c~0.17)
    matches.  The two differ by a factor of two and both are reported.
    ``t_intersection`` is where exp(-Delta^2 t^2) meets C exp(-gamma t).
    """

    t_ratio: float
    t_half: float
    t_intersection: Optional[float] = None
    roots: tuple = ()
    note: str = ""


T_C_NOTE = (
    "t_c = gamma/Delta^2 (order-of-magnitude definition) and t_c = gamma/(2 Delta^2) "
    "(matches the schematic-figure value 0.17 for gamma=0.5, Delta=1.2) differ by a factor 2"
)


def intersection_time(gamma: float, delta_e: float, prefactor: float,
                      t_range: Optional[Sequence[float]] = None) -> tuple:
    """Positive roots of Delta^2 t^2 - gamma t + ln C = 0 inside `t_range`.

    Raises NoIntersection when the tail lies above the Gaussian throughout.
    """
    d2 = delta_e**2
    disc = gamma**2 - 4 * d2 * math.log(prefactor)
    if disc < 0:
        raise NoIntersection("tail C exp(-gamma t) lies above exp(-Delta^2 t^2) for all t")
    sq = math.sqrt(disc)
    roots = sorted(r for r in ((gamma - sq) / (2 * d2), (gamma + sq) / (2 * d2)) if r > 0)
    if t_range is not None:
        roots = [r for r in roots if t_range[0] <= r <= t_range[1]]
    if not roots:
        raise NoIntersection("no crossing inside the scan range")
    return tuple(roots)


def crossover_time(gamma: float, delta_e: float, prefactor: Optional[float] = None,
                   t_range: Optional[Sequence[float]] = None, strict: bool = True) -> CrossoverTimes:
    """Both conventional crossover estimates and, given C, the exact crossing time.

    The crossing reported is the last root, after which the exponential tail
    stays above the Gaussian.  With `strict` false a missing crossing is
    recorded in ``note`` instead of raising NoIntersection.
    """
    if not (gamma > 0 and delta_e > 0):
        raise ValueError("gamma and delta_e must be positive")
    out = CrossoverTimes(gamma / delta_e**2, gamma / (2 * delta_e**2), note=T_C_NOTE)
    if prefactor is not None:
        try:
            roots = intersection_time(gamma, delta_e, prefactor, t_range)
            out.roots = roots
            out.t_intersection = roots[-1]
        except NoIntersection as exc:
            if strict:
                raise
            out.note += f"; {exc}"
    return out


# ----------------------------------------------------------------------------
# fitting


@dataclass
class DecayFit:
    gamma_fit: float
    delta_sq_fit: float
    prefactor_fit: float
    t_c: float
    early_window: tuple
    late_window: tuple
    residuals: tuple
    n_early: int = 0
    n_late: int = 0
    crossover: Optional[CrossoverTimes] = None

    def as_dict(self) -> dict:
        return {
            "gamma_fit": self.gamma_fit,
            "delta_sq_fit": self.delta_sq_fit,
            "prefactor_fit": self.prefactor_fit,
            "t_c": self.t_c,
            "early_window": list(self.early_window),
            "late_window": list(self.late_window),
            "residual_early": self.residuals[0],
            "residual_late": self.residuals[1],
            "n_early": self.n_early,
            "n_late": self.n_late,
        }


def _rms(x):
    return float(np.sqrt(np.mean(np.square(x)))) if len(x) else float("nan")


def fit_gaussian_rate(t: np.ndarray, W: np.ndarray):
    """Least-squares slope of -ln W against t^2 through the origin; returns (slope, rms residual)."""
    x = t**2
    y = -np.log(W)
    denom = float(np.dot(x, x))
    if denom == 0:
        raise InsufficientRange("early window has no positive times")
    slope = float(np.dot(x, y) / denom)
    return slope, _rms(y - slope * x)


def fit_exponential_tail(t: np.ndarray, W: np.ndarray):
    """Linear regression of ln W on t; returns (rate, prefactor, rms residual)."""
    if len(t) < 3:
        raise SaturationDominates(f"only {len(t)} usable points in the tail window")
    y = np.log(W)
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    return float(-slope), float(math.exp(intercept)), _rms(resid)


def fit_decay(
    series: SurvivalSeries,
    *,
    gamma: Optional[float] = None,
    delta_e: Optional[float] = None,
    early_window: Optional[Sequence[float]] = None,
    late_window: Optional[Sequence[float]] = None,
    w_inf: Optional[float] = None,
    saturation_factor: float = 10.0,
    check_range: bool = True,
    require_tail: bool = True,
) -> DecayFit:
    """Fit the Gaussian rate on early times and C exp(-gamma t) on late times.

    Default windows are [0, t_c/2] and [2 t_c, end] with t_c = gamma/Delta^2.
    `gamma` and `delta_e` default to ``series.meta`` entries, and otherwise
    to estimates from the series itself.  For exact-spectral series, tail
    points with W below `saturation_factor` times the saturation level are
    dropped.

    Raises
    ------
    InsufficientRange
        If the series does not cover both regimes.
    SaturationDominates
        If fewer than three tail points survive the saturation guard and
        `require_tail` is set; otherwise the tail entries are NaN.
    """
    t = series.t
    W = series.w
    meta = series.meta
    if delta_e is None:
        if "delta_e_sq" in meta:
            delta_e = math.sqrt(meta["delta_e_sq"])
        elif "delta_e" in meta:
            delta_e = meta["delta_e"]
        else:
            k = int(np.argmax(t > 0))
            delta_e = math.sqrt(max((1.0 - W[k]) / t[k] ** 2, 1e-300))
    positive = W > 0
    if gamma is None:
        gamma = meta.get("gamma")
    if gamma is None:
        tail = np.flatnonzero(positive)[-max(3, len(t) // 5):]
        gamma = max(-np.polyfit(t[tail], np.log(W[tail]), 1)[0], 1e-300)
    if check_range:
        tmin = t[t > 0].min() if np.any(t > 0) else float("inf")
        if t.max() * gamma <= 5 or tmin >= 0.3 / delta_e:
            raise InsufficientRange(
                f"need max(t)*gamma > 5 and min t < 0.3/Delta (got {t.max() * gamma:.3g}, "
                f"{tmin * delta_e:.3g}/Delta)"
            )
    cross = crossover_time(gamma, delta_e)
    t_c = cross.t_ratio
    ew = tuple(early_window) if early_window is not None else (0.0, 0.5 * t_c)
    lw = tuple(late_window) if late_window is not None else (2.0 * t_c, float(t.max()))
    if ew[1] > lw[0]:
        raise InsufficientRange("early and late windows overlap")

    sel_e = (t > ew[0]) & (t > 0) & (t <= ew[1]) & positive
    if sel_e.sum() < 2:
        raise InsufficientRange("fewer than two points in the early window")
    d2, res_e = fit_gaussian_rate(t[sel_e], W[sel_e])

    sel_l = (t >= lw[0]) & (t <= lw[1]) & positive
    if series.provenance == "exact-spectral":
        if w_inf is None:
            w_inf = meta.get("W_inf")
        if w_inf is None:
            w_inf = float(np.mean(W[-max(1, len(W) // 5):]))
        sel_l &= W > saturation_factor * w_inf
    try:
        g, C, res_l = fit_exponential_tail(t[sel_l], W[sel_l])
    except SaturationDominates:
        if require_tail:
            raise
        g = C = res_l = float("nan")
    if d2 > 0 and g > 0:
        cross = crossover_time(g, math.sqrt(d2), C, strict=False)
    return DecayFit(g, d2, C, t_c, ew, lw, (res_e, res_l), int(sel_e.sum()), int(sel_l.sum()), cross)
