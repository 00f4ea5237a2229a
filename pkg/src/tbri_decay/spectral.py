"""Exact eigendecomposition and the statistics built from it.

Moments of the strength function are always computed from the exact sums
over eigenstates; binned or kernel-smoothed curves are only used for shapes
(plotting, Gaussian fits, participation counts).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.optimize import curve_fit

from .exceptions import ConvergenceFailure, IndexOutOfRange


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues ascending; ``components[f, k]`` is C_f^(k)."""

    energies: np.ndarray
    components: np.ndarray

    @property
    def N(self) -> int:
        return len(self.energies)

    def weights(self, i: int) -> np.ndarray:
        """|C_i^(k)|^2 over k: the strength of basis state i on each eigenstate."""
        if not 0 <= i < self.N:
            raise IndexOutOfRange(f"state index {i} outside [0, {self.N})")
        return self.components[i] ** 2

    def reconstruct(self) -> np.ndarray:
        C = self.components
        return (C * self.energies) @ C.T


def diagonalize(H) -> EigenDecomposition:
    """Full symmetric eigendecomposition with a fixed eigenvector sign.

    Each eigenvector is flipped so that its largest-magnitude component is
    positive (first such component on ties).
    """
    A = getattr(H, "matrix", H)
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("need a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    try:
        E, C = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    lead = np.argmax(np.abs(C), axis=0)
    signs = np.sign(C[lead, np.arange(C.shape[1])])
    signs[signs == 0] = 1.0
    C = C * signs
    E.setflags(write=False)
    C.setflags(write=False)
    return EigenDecomposition(E, C)


def local_spacing(energies: np.ndarray, E: float, half_window: Optional[int] = None) -> float:
    """Mean level spacing from the eigenvalues nearest to E."""
    N = len(energies)
    if N < 2:
        return 1.0
    if half_window is None:
        half_window = max(1, N // 20)
    k = int(np.searchsorted(energies, E))
    lo = max(0, k - half_window)
    hi = min(N - 1, k + half_window)
    if hi - lo < 1:
        lo, hi = 0, N - 1
    D = (energies[hi] - energies[lo]) / (hi - lo)
    return float(D) if D > 0 else float((energies[-1] - energies[0]) / (N - 1) or 1.0)


def _gauss(E, amp, center, sigma):
    return amp * np.exp(-0.5 * ((E - center) / sigma) ** 2)


@dataclass
class GaussianFit:
    amplitude: float
    center: float
    sigma: float
    r_squared: float
    ok: bool = True

    def __call__(self, E):
        return _gauss(np.asarray(E, dtype=float), self.amplitude, self.center, self.sigma)


def fit_gaussian(x: np.ndarray, y: np.ndarray, p0=None) -> GaussianFit:
    """Least-squares Gaussian fit; R^2 is computed on the supplied points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if p0 is None:
        w = np.clip(y, 0, None)
        tot = w.sum() or 1.0
        mu = float(np.sum(w * x) / tot)
        sd = float(np.sqrt(np.sum(w * (x - mu) ** 2) / tot)) or float(np.ptp(x) / 4 or 1.0)
        p0 = (float(y.max()), mu, sd)
    ok = True
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            popt, _ = curve_fit(_gauss, x, y, p0=p0, maxfev=20000)
    except (RuntimeError, ValueError):
        popt, ok = np.asarray(p0, dtype=float), False
    amp, mu, sd = popt
    resid = y - _gauss(x, *popt)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    return GaussianFit(float(amp), float(mu), abs(float(sd)), r2, ok)


@dataclass
class StrengthFunctionEstimate:
    """Binned strength function of one basis state plus its exact moments.

    ``shift`` is centroid minus H_ii.  The centroid of the strength function
    equals <i|H|i> identically, so this is zero up to rounding; the physical
    level shift of the dominant peak is ``peak_shift`` (energy of the
    eigenstate carrying the largest weight, minus H_ii).
    """

    i: int
    energies: np.ndarray
    density: np.ndarray
    centroid: float
    variance: float
    H_ii: float
    shift: float
    peak_shift: float
    bandwidth: float
    bin_edges: np.ndarray = field(repr=False)

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.energies, self.density])

    @property
    def delta_e(self) -> float:
        return float(np.sqrt(self.variance))

    def fit_gaussian(self) -> GaussianFit:
        return fit_gaussian(self.energies, self.density)


def strength_function(
    decomp: EigenDecomposition,
    i: int,
    bandwidth: Optional[float] = None,
    H_ii: Optional[float] = None,
) -> StrengthFunctionEstimate:
    """Strength function P_i(E) of basis state `i`.

    The density is a histogram of the eigenvalues weighted by |C_i^(k)|^2 with
    bins of width `bandwidth` (default five local level spacings around the
    centroid), so it integrates to one.  Centroid and variance come from the
    exact sums and do not depend on the bandwidth.
    """
    w = decomp.weights(i)
    E = decomp.energies
    centroid = float(np.dot(w, E))
    variance = float(np.dot(w, (E - centroid) ** 2))
    if H_ii is None:
        H_ii = centroid
    if bandwidth is None:
        bandwidth = 5.0 * local_spacing(E, centroid)
    lo = np.floor((E[0] - centroid) / bandwidth - 0.5)
    hi = np.ceil((E[-1] - centroid) / bandwidth + 0.5)
    edges = centroid + (np.arange(lo, hi + 1) + 0.5) * bandwidth
    hist, _ = np.histogram(E, edges, weights=w)
    dens = hist / bandwidth
    peak = float(E[np.argmax(w)])
    return StrengthFunctionEstimate(
        i=i,
        energies=0.5 * (edges[1:] + edges[:-1]),
        density=dens,
        centroid=centroid,
        variance=max(variance, 0.0),
        H_ii=float(H_ii),
        shift=centroid - float(H_ii),
        peak_shift=peak - float(H_ii),
        bandwidth=float(bandwidth),
        bin_edges=edges,
    )


@dataclass
class SpectralSummary:
    bin_edges: np.ndarray
    rho: np.ndarray
    sigma: float
    E_center: float
    amplitude: float
    D: float
    N: int
    fit_r_squared: float

    @property
    def energies(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    def rho_model(self, E):
        return _gauss(np.asarray(E, dtype=float), self.amplitude, self.E_center, self.sigma)


def density_of_states(
    decomp: EigenDecomposition, bins: Union[int, np.ndarray] = 40, central_fraction: float = 0.8
) -> SpectralSummary:
    """Histogram density of states with a Gaussian fit to its central part.

    The fit uses only bins whose centres fall between the eigenvalue
    quantiles bounding `central_fraction` of the spectrum, since the edges
    are distorted.  ``D`` is the inverse fitted density at the fitted centre.
    """
    E = decomp.energies
    N = len(E)
    if np.ndim(bins) == 0:
        span = E[-1] - E[0]
        pad = 1e-9 * max(span, 1.0)
        edges = np.linspace(E[0] - pad, E[-1] + pad, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    counts, _ = np.histogram(E, edges)
    rho = counts / np.diff(edges)
    centers = 0.5 * (edges[1:] + edges[:-1])
    tail = 0.5 * (1.0 - central_fraction)
    lo, hi = np.quantile(E, [tail, 1.0 - tail])
    sel = (centers >= lo) & (centers <= hi)
    if sel.sum() < 3:
        sel = np.ones_like(sel)
    mu = float(E.mean())
    sd = float(E.std()) or 1.0
    fit = fit_gaussian(centers[sel], rho[sel], p0=(N / np.sqrt(2 * np.pi * sd**2), mu, sd))
    rho_c = fit.amplitude
    D = 1.0 / rho_c if rho_c > 0 else float("inf")
    return SpectralSummary(edges, rho, fit.sigma, fit.center, fit.amplitude, D, N, fit.r_squared)


def participation_number(decomp: EigenDecomposition, i: int) -> float:
    """Inverse participation ratio 1 / sum_k |C_i^(k)|^4."""
    w = decomp.weights(i)
    return float(1.0 / np.sum(w**2))


def eigenstate_participation(decomp: EigenDecomposition) -> np.ndarray:
    """1 / sum_f |C_f^(k)|^4 for every eigenstate k."""
    return 1.0 / np.sum(decomp.components**4, axis=0)


def smoothed_weights(decomp: EigenDecomposition, i: int, bandwidth: Optional[float] = None) -> np.ndarray:
    """Local energy average of |C_i^(k)|^2 over neighbouring eigenstates.

    Gaussian kernel in energy with standard deviation `bandwidth` (default
    five local level spacings).  Removes the level-to-level fluctuations of
    individual components while keeping the strength-function envelope;
    the result still sums to one.
    """
    w = decomp.weights(i)
    E = decomp.energies
    if bandwidth is None:
        bandwidth = 5.0 * local_spacing(E, float(np.dot(w, E)))
    K = np.exp(-0.5 * ((E[:, None] - E[None, :]) / bandwidth) ** 2)
    avg = (K @ w) / K.sum(axis=1)
    return avg / avg.sum()


def smoothed_participation_number(
    decomp: EigenDecomposition, i: int, bandwidth: Optional[float] = None
) -> float:
    """Number of principal components from the locally averaged strengths.

    Unlike :func:`participation_number` this is insensitive to the
    component-to-component fluctuations, which for Gaussian-distributed
    components lower the raw count by a factor close to 3.
    """
    avg = smoothed_weights(decomp, i, bandwidth)
    return float(1.0 / np.sum(avg**2))
