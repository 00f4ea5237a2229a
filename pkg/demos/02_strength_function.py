"""Strength function of mid-spectrum basis states compared with Gaussian and Breit-Wigner shapes.

Run: python3 demos/02_strength_function.py
"""
import numpy as np

from tbri_decay import BreitWigner, Gaussian, ModelConfig, build_realization, diagonalize, direct_coupling_stats
from tbri_decay import strength_function
from tbri_decay.analytic import evaluate_sf

for v0 in (0.05, 0.2):
    H = build_realization(ModelConfig(n=6, m=12, v0=v0, seed=1))
    dec = diagonalize(H)
    mid = np.argsort(np.diag(H.matrix))[len(dec.energies) // 2 - 5:][:10]
    # average over ten central states on a common grid relative to H_ii
    edges = np.arange(-3.0, 3.0 + 1e-9, 0.2)
    x = 0.5 * (edges[1:] + edges[:-1])
    P = np.zeros(len(x))
    var = g0 = 0.0
    for i in mid:
        w = dec.weights(int(i))
        P += np.histogram(dec.energies - H.matrix[i, i], edges, weights=w)[0] / 0.2
        var += strength_function(dec, int(i)).variance
        g0 += direct_coupling_stats(H, int(i)).gamma0
    P, var, g0 = P / len(mid), var / len(mid), g0 / len(mid)
    gauss = evaluate_sf(Gaussian(np.sqrt(var)), x)
    bw = evaluate_sf(BreitWigner(g0), x)
    print(f"v0={v0}: Delta_E={np.sqrt(var):.3f}, Gamma_0={g0:.3f}, Gamma_0/Delta_E={g0 / np.sqrt(var):.2f}")
    print("   E-H_ii   P_exact  Gaussian  Breit-Wigner")
    for k in range(0, len(x), 3):
        print(f"  {x[k]:6.2f}  {P[k]:8.4f}  {gauss[k]:8.4f}  {bw[k]:8.4f}")
