"""
Expansion coefficients, trees and formal power series
=====================================================

Coefficients of the pressure in the activities have closed forms.  Two
independent checks: a sum over colored rooted trees, and plugging the series
back into the fixed point equation with exact rational arithmetic.
"""
from fractions import Fraction

from hardrods import (ActivityModel, FiniteList, MultiIndex, activity_coefficient,
                      fps_fixed_point_residual, iter_multi_indices, pressure,
                      tree_weight_sum, truncated_pressure)

lengths = [1, 2, Fraction(1, 2)]
for n in iter_multi_indices([1, 2, 3], 3):
    c = activity_coefficient("continuous", lengths, n)
    t = tree_weight_sum(n, lengths) / n.factorial()
    print(f"{str(n):>12}  coefficient {str(c):>8}  trees {str(t):>8}")

print("continuous residual zero:", fps_fixed_point_residual("continuous", lengths, [1, 2, 3], 5).is_zero())
print("lattice residual zero:   ", fps_fixed_point_residual("discrete", None, [1, 2, 3], 5, flipped=False).is_zero())

#%%
# Partial sums close in on the solver value inside the convergence domain.

m = ActivityModel("continuous", FiniteList(((1.0, 0.2),)))
p = pressure(m).p
for D in (5, 10, 15, 20, 25):
    v, _ = truncated_pressure(m, D=D)
    print(f"D = {D:2d}  partial sum {v:.12f}  error {abs(v - p):.2e}")
