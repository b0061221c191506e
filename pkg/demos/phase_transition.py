"""
Close packing in a polydisperse rod gas
=======================================

Rods of every integer length k carry activity z_k = exp(k mu - sqrt(k)).
For small mu the gas is a fluid; past mu* = sum_k exp(-sqrt(k)) the pressure
locks onto p = mu and the line is completely covered.
"""
import numpy as np

from hardrods import ActivityModel, StretchedExp, eval_g, packing_fraction, pressure

tb = eval_g(ActivityModel("continuous", StretchedExp(0.0)), 0.0)
mu_star = tb.mid
print(f"mu* = {mu_star:.12f}  (tail bound {tb.bound:.1e})")

#%%
# Sweep mu through the transition.  Below mu* the slope dp/dmu equals the
# packing fraction and stays below 1; above it both are exactly 1.

print(f"{'mu':>6} {'regime':>14} {'p':>10} {'sigma':>8}")
for mu in np.linspace(1.0, 2.2, 13):
    m = ActivityModel("continuous", StretchedExp(mu))
    sol = pressure(m)
    print(f"{mu:6.2f} {sol.regime.kind.value:>14} {sol.p:10.6f} {packing_fraction(m):8.5f}")

#%%
# The kink is first order: the packing fraction jumps from sigma(mu*-) < 1 to 1.

left = packing_fraction(ActivityModel("continuous", StretchedExp(mu_star - 1e-9)))
print(f"sigma just below mu*: {left:.6f}")
