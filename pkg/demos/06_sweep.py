"""Sweep the interaction strength across the Breit-Wigner to Gaussian crossover.

Run: python3 demos/06_sweep.py   (writes ./sweep_demo/)
"""
from tbri_decay.cli import DEFAULT_CONFIG
from tbri_decay.experiment import parse_config, run_sweep, with_overrides

cfg = with_overrides(parse_config(DEFAULT_CONFIG), out="sweep_demo", realizations=5)
res = run_sweep(cfg, [0.02, 0.05, 0.1, 0.2, 0.4])
for row in res.points:
    print(f"v0={row['v0']:<5g} Gamma_0/Delta_E={row['gamma0_over_delta_e']:6.3f}  regime={row['regime']:<13s}"
          f" gamma_fit={row['gamma_fit']:.4g}  status={row['status']}")
print("table:", res.aggregate)
