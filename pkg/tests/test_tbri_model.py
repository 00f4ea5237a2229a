import itertools
import math

import numpy as np
import pytest

from tbri_decay.exceptions import DegenerateDenominator, DimensionMismatch, IndexOutOfRange, InvalidDimensions
from tbri_decay.fock_basis import enumerate_basis, orbital_distance
from tbri_decay.tbri_model import (
    ModelConfig,
    build_hamiltonian,
    build_realization,
    delta_e_squared_theory,
    direct_coupling_stats,
    dump_hamiltonian,
    load_hamiltonian_dump,
    sample_model,
    second_order_shift,
)

from _oracles import brute_force_coupling_count, brute_force_hamiltonian


def test_config_validation():
    with pytest.raises(InvalidDimensions):
        ModelConfig(0, 4, 1.0)
    with pytest.raises(InvalidDimensions):
        ModelConfig(5, 4, 1.0)
    with pytest.raises(ValueError):
        ModelConfig(2, 4, -1.0)
    with pytest.raises(ValueError):
        ModelConfig(2, 4, 1.0, d0=0.0)
    with pytest.raises(ValueError):
        ModelConfig(2, 4, 1.0, seed=2**64)


def test_equal_spectrum_spacing():
    eps, _ = sample_model(ModelConfig(3, 9, 0.1, d0=0.7))
    assert abs(eps.mean_spacing - 0.7) < 1e-12
    assert np.all(np.diff(eps.eps) > 0)


def test_jittered_spectrum_sorted_and_seeded():
    cfg = ModelConfig(3, 9, 0.1, spectrum_kind="jittered", jitter=0.4, seed=3)
    a, _ = sample_model(cfg)
    b, _ = sample_model(cfg)
    assert np.all(np.diff(a.eps) >= 0)
    np.testing.assert_array_equal(a.eps, b.eps)
    assert np.max(np.abs(a.eps - np.arange(9))) <= 0.4


def test_zero_interaction_gives_diagonal_h0():
    cfg = ModelConfig(3, 7, 0.0)
    _, amps = sample_model(cfg)
    assert not np.any(amps.v)
    H = build_realization(cfg)
    np.testing.assert_array_equal(H.matrix, np.diag(H.h0))


def test_amplitudes_symmetric_and_deterministic():
    cfg = ModelConfig(3, 7, 0.3, seed=99)
    _, a = sample_model(cfg, 4)
    _, b = sample_model(cfg, 4)
    _, c = sample_model(cfg, 5)
    np.testing.assert_array_equal(a.v, a.v.T)
    np.testing.assert_array_equal(a.v, b.v)
    assert not np.array_equal(a.v, c.v)
    # antisymmetric access in each pair
    assert a[(1, 0), (2, 3)] == -a[(0, 1), (2, 3)]
    assert a[(0, 1), (2, 3)] == a[(2, 3), (0, 1)]


def test_single_amplitude_variance():
    # m = 2 has exactly one pair, so each realization draws one amplitude
    v0 = 0.8
    cfg = ModelConfig(2, 2, v0, seed=7)
    x = np.array([sample_model(cfg, r)[1].v[0, 0] for r in range(10_000)])
    s2 = x.var(ddof=1)
    se = v0**2 * math.sqrt(2.0 / (len(x) - 1))
    assert abs(s2 - v0**2) < 3 * se
    assert abs(x.mean()) < 3 * v0 / math.sqrt(len(x))


def test_one_particle_has_no_interaction():
    cfg = ModelConfig(1, 6, 1.0, seed=2)
    H = build_realization(cfg)
    np.testing.assert_array_equal(H.matrix, np.diag(H.h0))


@pytest.mark.parametrize("n,m,seed", [(2, 4, 0), (2, 5, 11), (3, 6, 5), (4, 6, 1)])
def test_hamiltonian_matches_jordan_wigner_oracle(n, m, seed):
    cfg = ModelConfig(n, m, 1.0, seed=seed)
    basis = enumerate_basis(n, m)
    eps, amps = sample_model(cfg)
    H = build_hamiltonian(basis, eps, amps, cfg).matrix
    ref = brute_force_hamiltonian(eps.eps, amps, basis.masks, m)
    np.testing.assert_allclose(H, ref, atol=1e-13)


def test_hand_evaluated_element():
    # <{2,3}| V |{0,1}> = v_{23,01} a+_2 a+_3 a_1 a_0 acting on a+_0 a+_1|0>, sign +1
    cfg = ModelConfig(2, 4, 1.0, seed=0)
    basis = enumerate_basis(2, 4)
    eps, amps = sample_model(cfg)
    H = build_hamiltonian(basis, eps, amps, cfg)
    i = basis.index_of(0b0011)
    f = basis.index_of(0b1100)
    assert H.matrix[f, i] == amps[(2, 3), (0, 1)]
    # {0,1} -> {0,2} moves orbital 1 to 2 with spectator 0: only a+_0 a+_2 a_1 a_0 contributes
    g = basis.index_of(0b0101)
    assert H.matrix[g, i] == amps[(0, 2), (0, 1)]


def test_symmetry_exact(strong_realization):
    H, _ = strong_realization
    assert np.array_equal(H.matrix, H.matrix.T)


def test_selection_rule_exhaustive():
    cfg = ModelConfig(4, 9, 1.0, seed=8)
    basis = enumerate_basis(4, 9)
    H = build_realization(cfg, 0, basis).matrix
    states = basis.states
    for a, b in itertools.combinations(range(len(basis)), 2):
        if orbital_distance(states[a], states[b]) > 2:
            assert H[a, b] == 0.0


def test_dimension_mismatch():
    basis = enumerate_basis(2, 5)
    eps, amps = sample_model(ModelConfig(2, 4, 1.0))
    with pytest.raises(DimensionMismatch):
        build_hamiltonian(basis, eps, amps)


def test_trace_identity():
    cfg = ModelConfig(3, 7, 0.5, seed=4)
    basis = enumerate_basis(3, 7)
    eps, amps = sample_model(cfg)
    H = build_hamiltonian(basis, eps, amps, cfg)
    diag_two_body = 0.0
    for s in basis:
        diag_two_body += sum(amps[pq, pq] for pq in itertools.combinations(s.orbitals, 2))
    assert np.trace(H.matrix) == pytest.approx(H.h0.sum() + diag_two_body, rel=1e-12)


@pytest.mark.parametrize("n,m,v0,expected", [(2, 4, 1.0, 5.0), (1, 6, 1.0, 0.0), (4, 4, 1.0, 0.0)])
def test_delta_e_squared_theory(n, m, v0, expected):
    assert delta_e_squared_theory(ModelConfig(n, m, v0)) == expected


def test_delta_e_squared_counts_moves():
    # mean sum_f H_if^2 = v0^2 * (two-particle moves + (n-1) * one-particle moves)
    for n, m in [(2, 4), (3, 7), (6, 12)]:
        two, one = brute_force_coupling_count(n, m)
        assert delta_e_squared_theory(ModelConfig(n, m, 1.0)) == two + (n - 1) * one


def test_ensemble_mean_matches_theory(basis_6_12):
    cfg = ModelConfig(6, 12, 0.1, seed=2024)
    mid = None
    vals = []
    for r in range(20):
        H = build_realization(cfg, r, basis_6_12)
        if mid is None:
            mid = np.argsort(np.abs(H.h0 - H.h0.mean()), kind="stable")[:10]
        vals += [direct_coupling_stats(H, int(i)).sum_sq for i in mid]
    assert np.mean(vals) / delta_e_squared_theory(cfg) == pytest.approx(1.0, abs=0.05)


def test_v0_scaling_is_quadratic(basis_6_12):
    a = build_realization(ModelConfig(6, 12, 0.1, seed=3), 0, basis_6_12)
    b = build_realization(ModelConfig(6, 12, 0.2, seed=3), 0, basis_6_12)
    i = 400
    ra = direct_coupling_stats(a, i).sum_sq
    rb = direct_coupling_stats(b, i).sum_sq
    assert rb / ra == pytest.approx(4.0, rel=1e-12)


def test_coupling_stats_properties(strong_realization):
    H, _ = strong_realization
    i = 461
    cs = direct_coupling_stats(H, i)
    row = H.matrix[i].copy()
    row[i] = 0
    assert cs.sum_sq == pytest.approx(np.sum(row**2))
    assert len(cs.coupled) == np.count_nonzero(row)
    assert cs.gamma0 > 0 and np.isfinite(cs.gamma0)
    assert cs.rho_f.sum() * np.diff(cs.bin_edges)[0] == pytest.approx(len(cs.coupled))
    # golden-rule width per bin: 2 pi * sum of |V|^2 in bin / width
    assert np.sum(cs.gamma_of_E * np.diff(cs.bin_edges)) == pytest.approx(2 * np.pi * cs.sum_sq)


def test_coupling_stats_zero_interaction():
    H = build_realization(ModelConfig(3, 7, 0.0))
    cs = direct_coupling_stats(H, 3)
    assert cs.sum_sq == 0.0 and cs.gamma0 == 0.0
    assert not np.any(cs.gamma_of_E)


def test_coupling_stats_bad_index(strong_realization):
    with pytest.raises(IndexOutOfRange):
        direct_coupling_stats(strong_realization[0], 924)


def test_degenerate_denominator_reported(strong_realization):
    # equally spaced levels make many H_ff coincide with H_ii up to the diagonal interaction;
    # a huge floor forces the degenerate branch
    H, _ = strong_realization
    with pytest.raises(DegenerateDenominator):
        second_order_shift(H, 461, floor=1e3)
    cs = direct_coupling_stats(H, 461, floor=1e3)
    assert cs.delta_i is None and cs.delta_note


@pytest.mark.parametrize("binary", [False, True])
def test_dump_round_trip(tmp_path, binary):
    cfg = ModelConfig(2, 5, 0.3, seed=6)
    H = build_realization(cfg)
    path = dump_hamiltonian(H, tmp_path / "h.dat", binary=binary)
    meta, mat = load_hamiltonian_dump(path, binary=binary)
    assert meta["n"] == "2" and meta["m"] == "5" and meta["seed"] == "6" and meta["N"] == "10"
    np.testing.assert_array_equal(mat, H.matrix)
