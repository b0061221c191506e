"""
Virial series can outlive the activity series
=============================================

Take rods with densities rho_k = c / k^3 on lengths k.  As long as
sum_k k rho_k < 1 the virial relation gives a finite pressure, and the
activities follow from the inverse map.  For c = 0.5 those activities grow
so fast that the activity expansion no longer converges.
"""
from hardrods import ActivityModel, FiniteList, corollary2_report, exact_criterion, sufficient_criteria

for c in (0.1, 0.5):
    rep = corollary2_report(c, K=200)
    print(f"c = {c}: sum k rho_k = {rep.sum_k_rho:.6f}, p = {rep.p:.7f}")
    print(f"  activity series converges: {rep.criterion.holds}  (margin {rep.criterion.margin:.3g})")
    for k in (1, 10, 50, 200):
        print(f"  log(z_{k})/{k} = {rep.growth(k):.4f}")

#%%
# Exact and sufficient criteria side by side for a small mixture.

m = ActivityModel("continuous", FiniteList(((1.0, 0.15), (2.0, 0.02))))
for r in [exact_criterion(m)] + sufficient_criteria(m):
    print(f"{r.criterion_id:>16}: holds={r.holds} margin={r.margin:+.4f} a={r.witness_a}")
