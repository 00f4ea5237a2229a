import numpy as np
import pytest
from scipy.linalg import hadamard
from scipy.stats import kurtosis

from tbri_decay.exceptions import IndexOutOfRange
from tbri_decay.fock_basis import enumerate_basis
from tbri_decay.spectral import (
    EigenDecomposition,
    density_of_states,
    diagonalize,
    eigenstate_participation,
    fit_gaussian,
    local_spacing,
    participation_number,
    smoothed_participation_number,
    smoothed_weights,
    strength_function,
)
from tbri_decay.tbri_model import ModelConfig, build_realization, direct_coupling_stats, second_order_shift


def mid_states(H, k=10):
    return np.argsort(np.abs(H.h0 - H.h0.mean()), kind="stable")[:k]


def test_zero_interaction_permutation():
    H = build_realization(ModelConfig(3, 7, 0.0))
    d = diagonalize(H)
    np.testing.assert_array_equal(d.energies, np.sort(H.h0))
    C = np.abs(d.components)
    assert set(np.unique(C)) <= {0.0, 1.0}
    assert np.all(C.sum(axis=0) == 1) and np.all(C.sum(axis=1) == 1)


@pytest.mark.parametrize("v,dd", [(1.0, 0.0), (0.3, 2.0), (-2.0, -1.0)])
def test_two_by_two(v, dd):
    d = diagonalize(np.array([[0.0, v], [v, dd]]))
    r = np.sqrt(dd**2 + 4 * v**2)
    np.testing.assert_allclose(d.energies, [(dd - r) / 2, (dd + r) / 2], atol=1e-14)


def test_invariants_six_in_twelve(strong_realization):
    H, d = strong_realization
    C = d.components
    assert np.max(np.abs(C.T @ C - np.eye(d.N))) < 1e-8
    assert np.max(np.abs(H.matrix - d.reconstruct())) < 1e-8 * np.max(np.abs(H.matrix))
    np.testing.assert_allclose((C**2).sum(axis=1), 1.0, atol=1e-8)
    np.testing.assert_allclose((C**2).sum(axis=0), 1.0, atol=1e-8)


def test_sign_convention_deterministic(strong_realization):
    H, d = strong_realization
    d2 = diagonalize(H)
    assert np.array_equal(d.energies, d2.energies)
    assert np.array_equal(d.components, d2.components)
    lead = np.argmax(np.abs(d.components), axis=0)
    assert np.all(d.components[lead, np.arange(d.N)] > 0)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        diagonalize(np.ones((2, 3)))
    with pytest.raises(ValueError):
        diagonalize(np.array([[np.nan, 0], [0, 1.0]]))


def test_strength_function_point_mass():
    H = build_realization(ModelConfig(3, 7, 0.0))
    d = diagonalize(H)
    sf = strength_function(d, 5, H_ii=H.matrix[5, 5])
    assert sf.variance == 0.0
    assert sf.centroid == H.matrix[5, 5]
    assert np.sum(sf.density * sf.bandwidth) == pytest.approx(1.0)


def test_strength_function_normalised_and_bandwidth_free(weak_realization):
    _, d = weak_realization
    a = strength_function(d, 300, bandwidth=0.05)
    b = strength_function(d, 300, bandwidth=0.7)
    assert np.sum(a.density) * a.bandwidth == pytest.approx(1.0, abs=1e-6)
    assert np.sum(b.density) * b.bandwidth == pytest.approx(1.0, abs=1e-6)
    assert a.centroid == b.centroid and a.variance == b.variance
    assert a.samples.shape == (len(a.energies), 2)


def test_variance_identity_exhaustive(weak_realization):
    H, d = weak_realization
    A = H.matrix
    w = d.components**2
    centroid = w @ d.energies
    var = w @ d.energies**2 - centroid**2
    row_sq = np.sum(A * A, axis=1) - np.diag(A) ** 2
    np.testing.assert_allclose(var, row_sq, rtol=1e-8)
    # centroid equals the diagonal element: the exact centroid shift vanishes
    np.testing.assert_allclose(centroid, np.diag(A), atol=1e-9)


def test_variance_matches_coupling_sum(strong_realization):
    H, d = strong_realization
    for i in mid_states(H):
        sf = strength_function(d, int(i), H_ii=H.matrix[i, i])
        cs = direct_coupling_stats(H, int(i))
        assert sf.variance == pytest.approx(cs.sum_sq, rel=1e-8)
        assert abs(sf.shift) < 1e-9


def test_peak_shift_follows_second_order():
    # weak coupling on a jittered spectrum: the level carrying most of the
    # strength moves by the perturbative sum, except where its terms cancel
    checked = 0
    for seed in (5, 6):
        H = build_realization(ModelConfig(3, 8, 0.02, spectrum_kind="jittered", jitter=0.3, seed=seed))
        d = diagonalize(H)
        A = H.matrix
        for i in range(H.N):
            row = A[i].copy()
            row[i] = 0
            f = np.flatnonzero(row)
            terms = row[f] ** 2 / (A[i, i] - A[f, f])
            if np.max(np.abs(row[f] / (A[i, i] - A[f, f]))) > 0.1:
                continue
            delta = second_order_shift(H, i)
            if abs(delta) < 0.3 * np.sum(np.abs(terms)):
                continue
            sf = strength_function(d, i, H_ii=A[i, i])
            assert sf.peak_shift == pytest.approx(delta, rel=0.2)
            checked += 1
    assert checked >= 5


def test_strong_coupling_average_is_gaussian(strong_realization):
    H, d = strong_realization
    mids = mid_states(H)
    bw = 0.2
    edges = (np.arange(-100, 102) - 0.5) * bw
    acc = np.zeros(len(edges) - 1)
    for i in mids:
        h, _ = np.histogram(d.energies - H.matrix[i, i], edges, weights=d.components[i] ** 2)
        acc += h / bw / len(mids)
    fit = fit_gaussian(0.5 * (edges[1:] + edges[:-1]), acc)
    assert fit.r_squared > 0.95
    assert abs(fit.center) < 0.5


def test_dos_uniform_single_particle():
    H = build_realization(ModelConfig(1, 9, 0.0))
    s = density_of_states(diagonalize(H), bins=np.arange(-0.5, 9.5, 1.0))
    np.testing.assert_array_equal(s.rho, np.ones(9))


def test_dos_normalisation_and_spacing(strong_realization):
    _, d = strong_realization
    s = density_of_states(d)
    assert np.sum(s.rho * np.diff(s.bin_edges)) == pytest.approx(924)
    assert s.D * s.rho_model(s.E_center) == pytest.approx(1.0, abs=1e-6)
    assert s.fit_r_squared > 0.9


def test_dos_is_platykurtic(basis_6_12):
    # the finite TBRI spectrum is flatter than a Gaussian, which biases
    # Gaussian fits of its centre towards larger widths
    H = build_realization(ModelConfig(6, 12, 0.1, seed=1), 0, basis_6_12)
    assert kurtosis(diagonalize(H).energies) < -0.2


@pytest.mark.xfail(strict=True, reason="finite-n spectrum has excess kurtosis ~ -0.35; fitted sigma^2 is 1.1-1.25x the variance")
def test_dos_fit_width_matches_variance(basis_6_12):
    H = build_realization(ModelConfig(6, 12, 0.1, seed=1), 0, basis_6_12)
    d = diagonalize(H)
    s = density_of_states(d)
    assert s.sigma**2 == pytest.approx(np.var(d.energies), rel=0.1)


def test_local_spacing():
    E = np.arange(100.0) * 0.5
    assert local_spacing(E, 25.0) == pytest.approx(0.5)


def test_participation_limits():
    H = build_realization(ModelConfig(3, 7, 0.0))
    d = diagonalize(H)
    assert participation_number(d, 4) == 1.0
    N = 16
    M = hadamard(N) / np.sqrt(N)  # every component has |C|^2 = 1/N
    dec = EigenDecomposition(np.arange(N, dtype=float), M)
    assert participation_number(dec, 0) == pytest.approx(N)
    with pytest.raises(IndexOutOfRange):
        participation_number(dec, N)


def test_participation_tracks_shell_width(strong_realization):
    H, d = strong_realization
    for i in mid_states(H):
        cs = direct_coupling_stats(H, int(i))
        shell = min(cs.gamma0, np.sqrt(cs.sum_sq))
        ratio = participation_number(d, int(i)) / (shell / local_spacing(d.energies, H.matrix[i, i]))
        assert 1 / 3 < ratio < 3


def test_smoothed_participation(strong_realization):
    H, d = strong_realization
    i = int(mid_states(H)[0])
    avg = smoothed_weights(d, i)
    assert avg.sum() == pytest.approx(1.0)
    assert smoothed_participation_number(d, i) > participation_number(d, i)


def test_eigenstate_participation_bounds(weak_realization):
    _, d = weak_realization
    p = eigenstate_participation(d)
    assert np.all(p >= 1 - 1e-9) and np.all(p <= d.N + 1e-9)
