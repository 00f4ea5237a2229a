"""Build the Fock basis and one random TBRI Hamiltonian, then look at its structure.

Run: python3 demos/01_basis_and_model.py
"""
import numpy as np

from tbri_decay import ModelConfig, build_realization, direct_coupling_stats, enumerate_basis
from tbri_decay.tbri_model import delta_e_squared_theory

cfg = ModelConfig(n=6, m=12, v0=0.2, seed=1)
basis = enumerate_basis(cfg.n, cfg.m)
print(f"n={cfg.n} fermions in m={cfg.m} orbitals: N = {len(basis)} determinants")

H = build_realization(cfg, realization=0, basis=basis)
A = H.matrix
print(f"Hermitian: {np.allclose(A, A.T)}; nonzero off-diagonal fraction: "
      f"{np.count_nonzero(A - np.diag(np.diag(A))) / A.size:.3f}")

# a basis state near the middle of the unperturbed spectrum
i = int(np.argsort(np.diag(A))[len(basis) // 2])
cs = direct_coupling_stats(H, i)
print(f"state {i}: {len(cs.coupled)} directly coupled states")
print(f"  sum_f H_if^2 = {cs.sum_sq:.4f}  (ensemble mean {delta_e_squared_theory(cfg):.4f})")
print(f"  golden-rule width Gamma_0 = {cs.gamma0:.4f}")
