"""Two-body random interaction (TBRI) Hamiltonian on a Fock basis.

H = H0 + V with H0 = sum_s eps_s n_s and

    V = sum_{p<q, r<s} v_{pq,rs} a+_p a+_q a_s a_r ,

where the real amplitudes are symmetric, v_{pq,rs} = v_{rs,pq}, and each
independent one is Gaussian with zero mean and variance v0**2.  Because the
sum runs over all ordered pairs of pairs, V is Hermitian as written.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import DegenerateDenominator, DimensionMismatch, IndexOutOfRange, InvalidDimensions
from .fock_basis import FockBasis, enumerate_basis, pair_index_table, two_body_transitions

SPECTRUM_KINDS = ("equal", "jittered")


@dataclass(frozen=True)
class ModelConfig:
    n: int
    m: int
    v0: float
    d0: float = 1.0
    seed: int = 0
    spectrum_kind: str = "equal"
    jitter: float = 0.0

    def __post_init__(self):
        if not 0 < self.n <= self.m:
            raise InvalidDimensions(f"need 0 < n <= m, got n={self.n}, m={self.m}")
        if self.v0 < 0:
            raise ValueError("v0 must be nonnegative")
        if self.d0 <= 0:
            raise ValueError("d0 must be positive")
        if self.spectrum_kind not in SPECTRUM_KINDS:
            raise ValueError(f"spectrum_kind must be one of {SPECTRUM_KINDS}")
        if self.jitter < 0:
            raise ValueError("jitter must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def n_pairs(self) -> int:
        return self.m * (self.m - 1) // 2


@dataclass(frozen=True)
class SingleParticleSpectrum:
    eps: np.ndarray

    @property
    def m(self) -> int:
        return len(self.eps)

    @property
    def mean_spacing(self) -> float:
        return float((self.eps[-1] - self.eps[0]) / (len(self.eps) - 1)) if len(self.eps) > 1 else 0.0


@dataclass(frozen=True)
class TwoBodyAmplitudes:
    """Symmetric matrix of v_{pq,rs} indexed by lex pair positions."""

    v: np.ndarray
    m: int

    def __getitem__(self, key) -> float:
        (p, q), (r, s) = key
        table = pair_index_table(self.m)
        sign = 1.0
        if p > q:
            p, q, sign = q, p, -sign
        if r > s:
            r, s, sign = s, r, -sign
        if p == q or r == s:
            return 0.0
        return sign * float(self.v[table[p, q], table[r, s]])


@dataclass
class HamiltonianMatrix:
    matrix: np.ndarray
    basis: FockBasis
    config: Optional[ModelConfig] = None
    h0: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).copy()


def realization_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Independent, reproducible stream for realization `index` of an ensemble."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(index,))


def sample_model(config: ModelConfig, realization: int = 0):
    """Draw (SingleParticleSpectrum, TwoBodyAmplitudes) for one realization.

    Deterministic in ``(config.seed, realization)``.  Only the upper triangle
    of the amplitude matrix is drawn (row-major order) and then mirrored.
    """
    spec_ss, amp_ss = realization_seed(config.seed, realization).spawn(2)
    eps = np.arange(config.m, dtype=float) * config.d0
    if config.spectrum_kind == "jittered" and config.jitter > 0:
        rng = np.random.default_rng(spec_ss)
        eps = np.sort(eps + config.d0 * config.jitter * rng.uniform(-1.0, 1.0, config.m))

    M = config.n_pairs
    v = np.zeros((M, M))
    if config.v0 > 0:
        rng = np.random.default_rng(amp_ss)
        iu = np.triu_indices(M)
        v[iu] = config.v0 * rng.standard_normal(len(iu[0]))
        v = v + np.triu(v, 1).T
    return SingleParticleSpectrum(eps), TwoBodyAmplitudes(v, config.m)


def unperturbed_energies(basis: FockBasis, spectrum: SingleParticleSpectrum) -> np.ndarray:
    return basis.occupations() @ spectrum.eps


def build_hamiltonian(
    basis: FockBasis,
    spectrum: SingleParticleSpectrum,
    amplitudes: TwoBodyAmplitudes,
    config: Optional[ModelConfig] = None,
) -> HamiltonianMatrix:
    """Dense H = H0 + V on `basis`.

    Only matrix elements with row <= column are accumulated; the lower
    triangle is the mirror image, so H is symmetric bit for bit.
    """
    if spectrum.m != basis.m or amplitudes.m != basis.m:
        raise DimensionMismatch(
            f"basis has m={basis.m}, spectrum m={spectrum.m}, amplitudes m={amplitudes.m}"
        )
    N = len(basis)
    h0 = unperturbed_energies(basis, spectrum)
    upper = np.zeros(N * N)
    if basis.n >= 2 and np.any(amplitudes.v):
        tr = two_body_transitions(basis.n, basis.m)
        keep = tr["row"] <= tr["col"]
        vals = tr["sign"][keep] * amplitudes.v[tr["create"][keep], tr["annihilate"][keep]]
        upper = np.bincount(tr["row"][keep] * N + tr["col"][keep], weights=vals, minlength=N * N)
    upper = upper.reshape(N, N)
    H = upper + np.triu(upper, 1).T
    H[np.diag_indices(N)] += h0
    return HamiltonianMatrix(H, basis, config, h0)


def build_realization(config: ModelConfig, realization: int = 0, basis: Optional[FockBasis] = None):
    """Convenience: sample one realization and assemble its Hamiltonian."""
    if basis is None:
        basis = enumerate_basis(config.n, config.m)
    spectrum, amps = sample_model(config, realization)
    return build_hamiltonian(basis, spectrum, amps, config)


@dataclass
class CouplingStats:
    """Direct-coupling statistics of one basis state ``i``.

    ``rho_f`` is a count density (states per unit energy) of the basis states
    coupled to ``i``, histogrammed over their diagonal energies ``H_ff``.
    ``gamma_of_E`` is the golden-rule width per bin and ``gamma0`` uses the
    overall mean squared coupling with ``rho_f`` taken at ``E_i``.
    """

    i: int
    E_i: float
    sum_sq: float
    coupled: np.ndarray
    energies: np.ndarray
    couplings: np.ndarray
    bin_edges: np.ndarray
    rho_f: np.ndarray
    gamma_of_E: np.ndarray
    mean_v_sq: float
    rho_f_at_Ei: float
    gamma0: float
    delta_i: Optional[float]
    delta_note: str = ""

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


def _bins_around(E_i: float, energies: np.ndarray, width: float) -> np.ndarray:
    lo = math.floor((energies.min() - E_i) / width - 0.5)
    hi = math.ceil((energies.max() - E_i) / width + 0.5)
    k = np.arange(lo, hi + 1)
    return E_i + (k + 0.5) * width


def second_order_shift(H: HamiltonianMatrix, i: int, floor: Optional[float] = None) -> float:
    """Perturbative level shift sum_{f != i} H_if^2 / (H_ii - H_ff).

    Raises DegenerateDenominator if a coupled state lies within `floor` of
    ``H_ii`` (default ``1e-9 * d0``).
    """
    A = H.matrix
    if floor is None:
        floor = 1e-9 * (H.config.d0 if H.config is not None else 1.0)
    row = A[i].copy()
    row[i] = 0.0
    f = np.flatnonzero(row)
    denom = A[i, i] - A[f, f]
    bad = np.abs(denom) < floor
    if np.any(bad):
        raise DegenerateDenominator(
            f"{int(bad.sum())} coupled states within {floor:g} of H_ii for state {i}"
        )
    return float(np.sum(row[f] ** 2 / denom))


def direct_coupling_stats(
    H: HamiltonianMatrix,
    i: int,
    bins: Union[None, float, Sequence[float], np.ndarray] = None,
    floor: Optional[float] = None,
) -> CouplingStats:
    """Golden-rule ingredients for basis state `i`.

    Parameters
    ----------
    H : HamiltonianMatrix
    i : int
        Basis index of the initial state.
    bins : float or array, optional
        Bin width (scalar) or explicit bin edges for ``rho_f``.  The default
        width is half the standard deviation of the coupled energies, with a
        bin centred on ``H_ii``.
    floor : float, optional
        Denominator floor for the second-order shift.
    """
    A = H.matrix
    N = A.shape[0]
    if not 0 <= i < N:
        raise IndexOutOfRange(f"state index {i} outside [0, {N})")
    row = A[i].copy()
    row[i] = 0.0
    coupled = np.flatnonzero(row)
    E_i = float(A[i, i])
    sum_sq = float(np.sum(row**2))
    if len(coupled) == 0:
        empty = np.zeros(0)
        return CouplingStats(i, E_i, 0.0, coupled, empty, empty, np.array([E_i, E_i]),
                             np.zeros(1), np.zeros(1), 0.0, 0.0, 0.0, 0.0, "no coupled states")
    energies = np.diag(A)[coupled]
    v = row[coupled]
    if bins is None:
        width = 0.5 * float(np.std(energies))
        if width <= 0:
            width = 1.0
        edges = _bins_around(E_i, energies, width)
    elif np.ndim(bins) == 0:
        edges = _bins_around(E_i, energies, float(bins))
    else:
        edges = np.asarray(bins, dtype=float)
    widths = np.diff(edges)
    counts, _ = np.histogram(energies, edges)
    vsq_sum, _ = np.histogram(energies, edges, weights=v**2)
    rho_f = counts / widths
    gamma_of_E = 2 * np.pi * vsq_sum / widths
    mean_v_sq = sum_sq / len(coupled)
    k = np.searchsorted(edges, E_i, side="right") - 1
    rho_at = float(rho_f[k]) if 0 <= k < len(rho_f) else 0.0
    gamma0 = 2 * np.pi * mean_v_sq * rho_at

    delta, note = None, ""
    try:
        delta = second_order_shift(H, i, floor)
    except DegenerateDenominator as exc:
        note = str(exc)
    return CouplingStats(i, E_i, sum_sq, coupled, energies, v, edges, rho_f, gamma_of_E,
                         mean_v_sq, rho_at, gamma0, delta, note)


def delta_e_squared_theory(config: ModelConfig) -> float:
    """Ensemble second moment of the off-diagonal row: v0^2 n(n-1)(m-n)(m-n+3)/4."""
    n, m = config.n, config.m
    return 0.25 * config.v0**2 * n * (n - 1) * (m - n) * (m - n + 3)


def dump_hamiltonian(H: HamiltonianMatrix, path, binary: bool = False) -> Path:
    """Write H row-major with a one-line header ``# TBRI n=.. m=.. v0=.. seed=.. N=..``.

    Text files carry one matrix row per line (``%.17g``).  Binary files put
    the header line (newline-terminated ASCII) before raw little-endian
    float64 data.
    """
    path = Path(path)
    cfg = H.config
    header = "# TBRI n={} m={} v0={!r} seed={} N={}".format(
        H.basis.n, H.basis.m, cfg.v0 if cfg else float("nan"), cfg.seed if cfg else -1, H.N
    )
    if binary:
        with open(path, "wb") as fh:
            fh.write((header + "\n").encode("ascii"))
            fh.write(np.ascontiguousarray(H.matrix, dtype="<f8").tobytes())
    else:
        np.savetxt(path, H.matrix, fmt="%.17g", header=header[2:], comments="# ")
    return path


def load_hamiltonian_dump(path, binary: bool = False):
    """Inverse of :func:`dump_hamiltonian`; returns (header dict, matrix)."""
    path = Path(path)
    if binary:
        raw = path.read_bytes()
        nl = raw.index(b"\n")
        header = raw[:nl].decode("ascii")
        body = raw[nl + 1:]
    else:
        header = path.read_text().splitlines()[0]
    meta = dict(tok.split("=", 1) for tok in header.split()[2:])
    N = int(meta["N"])
    if binary:
        mat = np.frombuffer(body, dtype="<f8").reshape(N, N)
    else:
        mat = np.loadtxt(path, ndmin=2)
    return meta, mat
