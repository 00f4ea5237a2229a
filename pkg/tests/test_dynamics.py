import math

import numpy as np
import pytest

from tbri_decay.dynamics import (
    ShellStats,
    SurvivalSeries,
    TimeGrid,
    class_count,
    component_populations,
    long_time_populations,
    oscillation_analysis,
    population_participation,
    return_amplitude,
    saturation_value,
    survival_probability,
    time_average,
)
from tbri_decay.exceptions import NoOscillationsDetected, WindowTooShort
from tbri_decay.spectral import EigenDecomposition, diagonalize, local_spacing
from tbri_decay.tbri_model import ModelConfig, build_realization, direct_coupling_stats


def two_level(split=1.3):
    c = 1 / math.sqrt(2)
    return EigenDecomposition(np.array([0.0, split]), np.array([[c, c], [c, -c]]))


def test_time_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        TimeGrid(np.array([-1.0, 0.0]))
    with pytest.raises(ValueError):
        TimeGrid(np.array([]))
    g = TimeGrid.default(1.0, 0.5)
    assert g.t_values[0] == 0.0 and np.all(np.diff(g.t_values) > 0)


def test_series_validation():
    g = TimeGrid.linear(1.0, 5)
    with pytest.raises(ValueError):
        SurvivalSeries(g, np.ones(5), "made-up")
    with pytest.raises(ValueError):
        SurvivalSeries(g, np.ones(4), "closed-form")


def test_initial_value_and_bounds(strong_realization):
    H, d = strong_realization
    s = survival_probability(d, 461, TimeGrid.default(4.0, 6.0))
    assert abs(s.w[0] - 1.0) < 1e-10
    assert np.all(s.w <= 1 + 1e-10) and np.all(s.w >= 0)
    assert s.provenance == "exact-spectral"


def test_no_interaction_no_decay():
    d = diagonalize(build_realization(ModelConfig(3, 7, 0.0)))
    s = survival_probability(d, 10, TimeGrid.linear(50.0, 101))
    np.testing.assert_allclose(s.w, 1.0, atol=1e-12)


def test_two_level_closed_form():
    split = 1.3
    t = np.linspace(0, 20, 201)
    s = survival_probability(two_level(split), 0, TimeGrid(t))
    np.testing.assert_allclose(s.w, np.cos(split * t / 2) ** 2, atol=1e-14)


def test_time_reversal(weak_realization):
    _, d = weak_realization
    t = np.linspace(0.1, 30, 50)
    np.testing.assert_allclose(np.abs(return_amplitude(d, 7, -t)) ** 2, np.abs(return_amplitude(d, 7, t)) ** 2,
                               atol=1e-13)


@pytest.mark.parametrize("fixture", ["strong_realization", "weak_realization"])
def test_short_time_universality(fixture, request):
    H, d = request.getfixturevalue(fixture)
    for i in (100, 461, 800):
        d2 = direct_coupling_stats(H, i).sum_sq
        t = 0.01 / math.sqrt(d2)
        W = survival_probability(d, i, TimeGrid(np.array([t]))).w[0]
        assert (1 - W) / t**2 == pytest.approx(d2, rel=1e-3)


def test_quartic_coefficient_finite(strong_realization):
    H, d = strong_realization
    i = 461
    d2 = direct_coupling_stats(H, i).sum_sq
    t = np.array([0.02, 0.04, 0.08]) / math.sqrt(d2)
    W = np.abs(return_amplitude(d, i, t)) ** 2
    c4 = (1 - W - d2 * t**2) / t**4
    assert np.all(np.isfinite(c4))
    # nearly constant: the series 1 - W = Delta^2 t^2 + c4 t^4 + ... has a finite quartic term
    assert np.ptp(c4) < 0.05 * np.max(np.abs(c4))


def test_populations(weak_realization):
    _, d = weak_realization
    p0 = component_populations(d, 12, 0.0)
    assert p0.w[12] == pytest.approx(1.0) and p0.npc == pytest.approx(1.0)
    for t in (0.3, 2.0, 17.0):
        p = component_populations(d, 12, t)
        assert p.w.sum() == pytest.approx(1.0, abs=1e-8)
        W = survival_probability(d, 12, TimeGrid(np.array([t]))).w[0]
        assert p.w[12] == pytest.approx(W, abs=1e-12)
        assert population_participation(d, 12, [t])[0] == pytest.approx(p.npc, rel=1e-10)


def test_long_time_initial_state_dominates(strong_realization):
    _, d = strong_realization
    for i in (100, 461):
        w_inf = long_time_populations(d, i)
        assert w_inf.sum() == pytest.approx(1.0)
        assert np.all(w_inf[i] >= np.delete(w_inf, i))


def test_saturation_two_level():
    split = 1.0
    t = np.linspace(0, 2000, 200001)
    s = survival_probability(two_level(split), 0, TimeGrid(t))
    sh = saturation_value(s, (0, 2000), N_pc=2, Delta=split, n_c=1)
    assert sh.W_inf == pytest.approx(0.5, abs=1e-3)


def test_saturation_two_level_cos4():
    # time average of cos^4 is 3/8
    t = np.linspace(0, 2000 * np.pi, 400001)
    s = SurvivalSeries(TimeGrid(t), np.cos(t) ** 4, "closed-form")
    sh = saturation_value(s, (0, t[-1]))
    assert sh.W_inf == pytest.approx(3 / 8, abs=1e-6)


def test_saturation_no_interaction():
    d = diagonalize(build_realization(ModelConfig(3, 7, 0.0)))
    s = survival_probability(d, 3, TimeGrid.linear(100.0, 201))
    assert saturation_value(s, (10, 100)).W_inf == pytest.approx(1.0)


def test_window_too_short():
    s = survival_probability(two_level(), 0, TimeGrid.linear(10.0, 1001))
    with pytest.raises(WindowTooShort):
        saturation_value(s, (0, 10), Delta=0.1, n_c=1)
    with pytest.raises(WindowTooShort):
        saturation_value(s, (0, 0.05))


def test_shell_ratio():
    assert ShellStats(1.0, 0.03, 100.0, 3, 0.01).ratio == pytest.approx(1.0)


def test_oscillation_two_level_survival():
    split = 0.8
    t = np.linspace(0, 100, 5001)
    W = np.cos(split * t / 2) ** 2
    res = oscillation_analysis(t, W, detrend_window=1)
    assert res.ok
    assert res.period == pytest.approx(2 * np.pi / split, rel=1e-4)


def test_oscillation_two_level_participation():
    # N_pc(t) of a two-level system repeats twice per Rabi cycle
    split = 0.8
    d = two_level(split)
    t = np.linspace(0, 100, 5001)
    res = oscillation_analysis(t, population_participation(d, 0, t), detrend_window=1)
    assert res.period == pytest.approx(np.pi / split, rel=1e-4)


def test_no_oscillations_status():
    t = np.linspace(0, 10, 500)
    res = oscillation_analysis(t, np.exp(-t))
    assert res.status == "no-oscillations"
    with pytest.raises(NoOscillationsDetected):
        oscillation_analysis(t, np.exp(-t), raise_on_failure=True)


def test_six_in_twelve_class_count(basis_6_12, strong_realization):
    H, _ = strong_realization
    diag = np.diag(H.matrix)
    assert class_count(basis_6_12, 461, diag, diag[461], 1e9) == 3


def test_six_in_twelve_oscillation_period(strong_realization, basis_6_12):
    H, d = strong_realization
    i = int(np.argsort(np.abs(H.h0 - H.h0.mean()), kind="stable")[0])
    cs = direct_coupling_stats(H, i)
    shell = min(cs.gamma0, math.sqrt(cs.sum_sq))
    diag = np.diag(H.matrix)
    n_c = class_count(basis_6_12, i, diag, diag[i], shell)
    t = np.linspace(0.5 / shell, 30 / shell, 600)
    sh = ShellStats(shell, 0.0, 0.0, n_c, local_spacing(d.energies, diag[i]))
    res = oscillation_analysis(t, population_participation(d, i, t), sh)
    assert res.ok
    assert 0.2 <= res.ratio <= 5


def test_time_average_constant():
    t = np.linspace(0, 3, 7)
    assert time_average(t, np.full(7, 0.25)) == pytest.approx(0.25)
