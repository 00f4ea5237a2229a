"""Exact survival probability: short-time universality, Gaussian decay and saturation.

Run: python3 demos/03_survival_probability.py
"""
import numpy as np

from tbri_decay import ModelConfig, TimeGrid, build_realization, diagonalize, fit_decay, survival_probability
from tbri_decay import saturation_value, strength_function
from tbri_decay.spectral import smoothed_participation_number

H = build_realization(ModelConfig(n=6, m=12, v0=0.2, seed=1))
dec = diagonalize(H)
i = int(np.argsort(np.diag(H.matrix))[len(dec.energies) // 2])
d2 = strength_function(dec, i).variance
de = np.sqrt(d2)
series = survival_probability(dec, i, TimeGrid.default(de, 1.5 * de))

t = 1e-2 / de
w = survival_probability(dec, i, TimeGrid(np.array([t]))).w[0]
print(f"Delta_E^2 = {d2:.4f};  (1 - W(t))/t^2 at t = 0.01/Delta_E: {(1 - w) / t**2:.4f}")

for tt in (0.5 / de, 1 / de, 2 / de, 5 / de, 50 / de):
    k = np.searchsorted(series.t, tt)
    print(f"  t={series.t[k]:7.3f}  W={series.w[k]:.4e}  exp(-Delta_E^2 t^2)={np.exp(-d2 * series.t[k]**2):.4e}")

fit = fit_decay(series, gamma=1.5 * de, delta_e=de, check_range=False, require_tail=False)
print(f"early-time Gaussian fit: Delta^2 = {fit.delta_sq_fit:.4f} (spectral {d2:.4f})")
# average over the last three quarters of the linear saturation window
t_end = series.t[-1]
n_pc = smoothed_participation_number(dec, i)
sat = saturation_value(series, (t_end - 150 / de, t_end), N_pc=n_pc)
print(f"saturation: W_inf = {sat.W_inf:.4g}, N_pc = {sat.N_pc:.1f}, W_inf*N_pc/3 = {sat.ratio:.3f}")
