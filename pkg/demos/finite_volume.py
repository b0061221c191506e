"""
Finite boxes and the renewal correction
=======================================

On the lattice the partition function obeys a renewal recurrence, and
log Xi_L approaches p L - log mu exponentially fast.
"""
import numpy as np

from hardrods import (ActivityModel, FiniteList, packing_distribution, packing_fraction,
                      renewal_asymptotics_check)

m = ActivityModel("discrete", FiniteList(((1, 1.0), (2, 0.5))))
Ls = [5, 10, 20, 40, 80, 160]
rep = renewal_asymptotics_check(m, Ls)
print(f"p = {rep.p:.12f}, renewal constant mu = {rep.mu:.12f}")
for L, eps in zip(rep.L, rep.epsilon):
    print(f"L = {L:4d}  eps = {eps:.3e}")
print(f"fitted decay rate {rep.decay_rate:.4f}")

#%%
# The packing fraction concentrates around its limit.

sigma = packing_fraction(m)
for L in (50, 100, 200, 400):
    h = packing_distribution(m, L)
    mass = np.array(h.mass)
    print(f"L = {L:3d}  mean {h.mean():.5f}  (limit {sigma:.5f})  "
          f"P(|s - sigma| > 0.05) = {h.mass_outside(sigma, 0.05):.4f}  peak bin {h.sigma[mass.argmax()]:.3f}")
