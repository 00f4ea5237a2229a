"""The hybrid (Gaussian times Breit-Wigner) strength function and its exponential tail.

Run: python3 demos/04_hybrid_tail.py
"""
import numpy as np

from tbri_decay import Hybrid, hybrid_amplitude
from tbri_decay.analytic import asymptotic_tail_prefactor, exact_tail_prefactor, hybrid_variance

sigma = 1.0
print(" gamma/sigma  fitted C     exact C    large-gamma closed form")
for r in (0.05, 0.5, 1.0, 3.0, 5.0):
    g = r * sigma
    t0 = max(3 * g, 5 / g) if r < 1 else 3 * g
    t = np.linspace(t0, t0 + 20 / g, 100)
    W = hybrid_amplitude(Hybrid(g, sigma), t).w
    slope, icpt = np.polyfit(t, np.log(W), 1)
    closed = asymptotic_tail_prefactor(g, np.sqrt(hybrid_variance(g, sigma)))
    print(f"  {r:8.2f}  {np.exp(icpt):10.4g}  {exact_tail_prefactor(g, sigma):10.4g}  {closed:10.4g}"
          f"   (rate/gamma = {-slope / g:.5f})")
