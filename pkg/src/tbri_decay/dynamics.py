"""Exact time evolution of an initial basis state (hbar = 1).

The return amplitude is evaluated as the finite spectral sum

    A_i(t) = sum_k |C_i^(k)|^2 exp(-i E^(k) t),

with energies measured from the strength-function centroid; the global
phase this removes does not affect W_i = |A_i|^2 and keeps the phases small
at short times.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.ndimage import uniform_filter1d
from scipy.signal import find_peaks

from .exceptions import NoOscillationsDetected, WindowTooShort
from .spectral import EigenDecomposition

PROVENANCES = ("exact-spectral", "hybrid-fourier", "closed-form")


@dataclass(frozen=True)
class TimeGrid:
    t_values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t_values, dtype=float)
        if t.ndim != 1 or len(t) == 0:
            raise ValueError("time grid must be a non-empty 1-D array")
        if t[0] < 0:
            raise ValueError("times must be nonnegative")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "t_values", t)

    def __len__(self):
        return len(self.t_values)

    @classmethod
    def linear(cls, t_max: float, points: int, t_min: float = 0.0) -> "TimeGrid":
        return cls(np.linspace(t_min, t_max, points))

    @classmethod
    def default(cls, delta_e: float, gamma: float, log_points: int = 200,
                sat_span: Optional[float] = None, sat_points: int = 2000) -> "TimeGrid":
        """t=0, a log grid from 1e-3/delta_e to 10*gamma/delta_e^2, then a linear window.

        The linear saturation window starts where the log grid stops and spans
        `sat_span` (default 200/delta_e).
        """
        t_stop = max(10.0 * gamma / delta_e**2, 10.0 / delta_e)
        logs = np.geomspace(1e-3 / delta_e, t_stop, log_points)
        span = sat_span if sat_span is not None else 200.0 / delta_e
        lin = np.linspace(t_stop, t_stop + span, sat_points + 1)[1:]
        return cls(np.concatenate([[0.0], logs, lin]))


@dataclass
class SurvivalSeries:
    grid: TimeGrid
    w: np.ndarray
    provenance: str
    meta: dict = field(default_factory=dict)
    amplitude: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        self.w = np.asarray(self.w, dtype=float)
        if self.w.shape != self.grid.t_values.shape:
            raise ValueError("w and grid differ in length")

    @property
    def t(self) -> np.ndarray:
        return self.grid.t_values

    def window(self, t_lo: float, t_hi: float) -> np.ndarray:
        return (self.t >= t_lo) & (self.t <= t_hi)


@dataclass
class ShellStats:
    """Finite-size characteristics of the decay of one state (or an ensemble).

    ``N_pc`` is the number of principal components after local energy
    averaging of the strengths (see ``spectral.smoothed_participation_number``);
    the raw inverse participation ratio is kept as ``N_pc_raw``.
    """

    Delta: float
    W_inf: float
    N_pc: float
    n_c: int
    D: float
    N_pc_raw: float = float("nan")
    window: tuple = (0.0, 0.0)

    @property
    def ratio(self) -> float:
        """W_inf * N_pc / 3; close to one when W_inf ~ 3 / N_pc."""
        return self.W_inf * self.N_pc / 3.0


def _centered_phases(decomp: EigenDecomposition, i: int):
    w = decomp.weights(i)
    E0 = float(np.dot(w, decomp.energies))
    return w, decomp.energies - E0


def return_amplitude(decomp: EigenDecomposition, i: int, t, chunk: int = 512) -> np.ndarray:
    """Complex A_i(t) with the centroid phase removed; accepts negative times."""
    w, dE = _centered_phases(decomp, i)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(len(t), dtype=complex)
    for s in range(0, len(t), chunk):
        tt = t[s:s + chunk]
        out[s:s + chunk] = np.exp(-1j * np.outer(tt, dE)) @ w
    return out


def survival_probability(decomp: EigenDecomposition, i: int, grid: TimeGrid,
                         meta: Optional[dict] = None) -> SurvivalSeries:
    """Exact W_i(t) = |A_i(t)|^2 on `grid`."""
    A = return_amplitude(decomp, i, grid.t_values)
    W = np.abs(A) ** 2
    md = {"i": i}
    if meta:
        md.update(meta)
    return SurvivalSeries(grid, W, "exact-spectral", md, A)


@dataclass
class Populations:
    t: float
    w: np.ndarray
    npc: float


def component_populations(decomp: EigenDecomposition, i: int, t: float) -> Populations:
    """Basis populations |<f|Psi(t)>|^2 of the evolved state and their participation number."""
    ci = decomp.components[i]
    psi = decomp.components @ (ci * np.exp(-1j * decomp.energies * t))
    w = np.abs(psi) ** 2
    return Populations(float(t), w, float(1.0 / np.sum(w**2)))


def population_participation(decomp: EigenDecomposition, i: int, times) -> np.ndarray:
    """N_pc(t) = 1 / sum_f w_f(t)^2 over an array of times."""
    C = decomp.components
    ci = C[i]
    times = np.asarray(times, dtype=float)
    out = np.empty(len(times))
    chunk = 256
    for s in range(0, len(times), chunk):
        ph = np.outer(decomp.energies, times[s:s + chunk])
        re = C @ (np.cos(ph) * ci[:, None])
        im = C @ (np.sin(ph) * ci[:, None])
        w = re**2 + im**2
        out[s:s + chunk] = 1.0 / np.sum(w**2, axis=0)
    return out


def long_time_populations(decomp: EigenDecomposition, i: int) -> np.ndarray:
    """Infinite-time average of w_f(t), assuming a non-degenerate spectrum."""
    C = decomp.components
    return (C**2) @ (C[i] ** 2)


def time_average(t: np.ndarray, y: np.ndarray) -> float:
    if len(t) < 2:
        return float(y[0])
    return float(trapezoid(y, t) / (t[-1] - t[0]))


def saturation_value(
    series: SurvivalSeries,
    window: Sequence[float],
    *,
    N_pc: Optional[float] = None,
    Delta: Optional[float] = None,
    n_c: Optional[int] = None,
    D: Optional[float] = None,
    N_pc_raw: Optional[float] = None,
    min_samples: int = 20,
) -> ShellStats:
    """Long-time average of W over `window` and the finite-size context.

    Missing keyword values are taken from ``series.meta`` (keys ``N_pc``,
    ``Delta``, ``n_c``, ``D``, ``N_pc_raw``).  When ``Delta`` and ``n_c`` are
    known the window must span at least ten oscillation periods ``n_c/Delta``.

    Raises
    ------
    WindowTooShort
        If the window holds fewer than `min_samples` points or fewer than
        ten expected oscillation periods.
    """
    t_lo, t_hi = float(window[0]), float(window[1])
    sel = series.window(t_lo, t_hi)
    if sel.sum() < min_samples:
        raise WindowTooShort(f"{int(sel.sum())} samples in [{t_lo:g}, {t_hi:g}]")
    meta = series.meta
    N_pc = N_pc if N_pc is not None else meta.get("N_pc", float("nan"))
    Delta = Delta if Delta is not None else meta.get("Delta", float("nan"))
    n_c = n_c if n_c is not None else meta.get("n_c", 1)
    D = D if D is not None else meta.get("D", float("nan"))
    N_pc_raw = N_pc_raw if N_pc_raw is not None else meta.get("N_pc_raw", float("nan"))
    if np.isfinite(Delta) and Delta > 0:
        period = n_c / Delta
        if (t_hi - t_lo) < 10 * period:
            raise WindowTooShort(
                f"window length {t_hi - t_lo:g} is shorter than 10 periods of {period:g}"
            )
    t = series.t[sel]
    W_inf = time_average(t, series.w[sel])
    return ShellStats(float(Delta), W_inf, float(N_pc), int(n_c), float(D), float(N_pc_raw), (t_lo, t_hi))


@dataclass
class OscillationResult:
    """Outcome of peak analysis; ``status`` is 'ok' or 'no-oscillations'."""

    status: str
    period: float = float("nan")
    ratio: float = float("nan")
    peaks: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _refine_peaks(t: np.ndarray, y: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Parabolic interpolation of peak positions on a uniform grid."""
    out = t[idx].astype(float)
    dt = np.diff(t)
    for j, k in enumerate(idx):
        if 0 < k < len(y) - 1:
            y0, y1, y2 = y[k - 1], y[k], y[k + 1]
            den = y0 - 2 * y1 + y2
            if den != 0:
                out[j] = t[k] + 0.5 * (y0 - y2) / den * dt[k]
    return out


def oscillation_analysis(
    t: np.ndarray,
    values: np.ndarray,
    shell: Optional[ShellStats] = None,
    detrend_window: Optional[int] = None,
    min_peaks: int = 3,
    prominence: Optional[float] = None,
    raise_on_failure: bool = False,
) -> OscillationResult:
    """Oscillation period of a uniformly sampled series (typically N_pc(t)).

    The series is detrended by subtracting a centred moving average of
    `detrend_window` samples (default: a tenth of the series, or no
    detrending when None and the series is short), peaks are located with
    parabolic refinement, and the period is the mean spacing of successive
    maxima.  ``ratio`` is period * Delta / n_c when `shell` is given.

    A damped signal may show no usable maxima; that is returned as status
    'no-oscillations' unless `raise_on_failure` is set.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=float)
    if detrend_window is None:
        detrend_window = max(3, len(y) // 10)
    if detrend_window > 1:
        y = y - uniform_filter1d(y, detrend_window, mode="nearest")
    if prominence is None:
        prominence = 0.1 * float(np.std(y)) if np.std(y) > 0 else None
    idx, _ = find_peaks(y, prominence=prominence)
    if len(idx) < min_peaks:
        if raise_on_failure:
            raise NoOscillationsDetected(f"found {len(idx)} maxima, need {min_peaks}")
        return OscillationResult("no-oscillations", peaks=t[idx])
    tp = _refine_peaks(t, y, idx)
    period = float(np.mean(np.diff(tp)))
    ratio = float("nan")
    if shell is not None and shell.n_c > 0 and np.isfinite(shell.Delta):
        ratio = period * shell.Delta / shell.n_c
    return OscillationResult("ok", period, ratio, tp)


def class_count(basis, i: int, energies: np.ndarray, E0: float, half_width: float) -> int:
    """Largest number of two-body steps from state i to any basis state in the shell.

    The shell is ``|E0 - energies[f]| <= half_width`` with `energies` the
    unperturbed (diagonal) energies of the basis.
    """
    mask_i = int(basis.masks[i])
    sel = np.flatnonzero(np.abs(np.asarray(energies) - E0) <= half_width)
    if len(sel) == 0:
        return 1
    best = 0
    for f in sel:
        d = (mask_i & ~int(basis.masks[f])).bit_count()
        best = max(best, -(-d // 2))
    return max(best, 1)
