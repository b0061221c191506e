"""The thirteen acceptance criteria, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py`` (or ``python tests/test_acceptance.py``);
one PASS/FAIL line per criterion is printed at the end.  Criteria that do not
hold as stated are marked ``xfail(strict=True)``: they still run the literal
check, and the suite errors if one of them starts passing.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from hardrods import (ActivityModel, EnsembleKind, FiniteList, MultiIndex, StretchedExp,
                      activities_from_densities, activity_coefficient, corollary2_report,
                      degree_partial_sums, eval_g, exact_criterion, fps_fixed_point_residual,
                      iter_multi_indices, packing_distribution, packing_fraction, pressure,
                      rate_function, renewal_asymptotics_check, sufficient_criteria,
                      tree_weight_sum, truncated_pressure, virial_pressure, xi_discrete,
                      xi_discrete_bruteforce)
from hardrods.cli import scan_rows

from conftest import cont, disc, record


def best_time(fn, repeat=20):
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t)
    return min(out)


def test_c01_monomer_closed_forms():
    m = disc((1, 1.0))
    err_p = abs(pressure(m).p - math.log(2))
    err_rho = abs(virial_pressure("discrete", {1: 0.5}) - math.log(2))
    err_z = abs(activities_from_densities("discrete", {1: 0.5})[1] - 1.0)
    t = best_time(lambda: (pressure(m), activities_from_densities("discrete", {1: 0.5})))
    ok = max(err_p, err_rho, err_z) < 1e-10 and t < 1e-3
    assert record(1, ok, f"max err {max(err_p, err_rho, err_z):.1e}, runtime {t * 1e3:.3f} ms")


def random_finite(rng, kind):
    s = int(rng.integers(1, 7))
    if kind == "continuous":
        lengths = rng.uniform(0.05, 8.0, s)
    else:
        lengths = rng.integers(1, 9, s).astype(float)
    z = rng.uniform(0.0, 2.0, s)
    return ActivityModel(kind, FiniteList(tuple(zip(lengths, z))))


def test_c02_fixed_point_residuals():
    rng = np.random.default_rng(2)
    models = [random_finite(rng, kind) for kind in ("continuous", "discrete") for _ in range(50)]
    t = time.perf_counter()
    worst = 0.0
    for m in models:
        p = pressure(m).p
        rhs = math.fsum(z * math.exp(-p * l) for l, z in m.entries())
        lhs = p if m.kind is EnsembleKind.CONTINUOUS else -math.expm1(-p)
        worst = max(worst, abs(lhs - rhs))
    elapsed = time.perf_counter() - t
    assert record(2, worst < 1e-10 and elapsed < 1.0,
                  f"100 models, worst residual {worst:.1e}, runtime {elapsed:.3f} s")


@pytest.mark.xfail(strict=True, reason="degree-25 truncation error is ~3e-10, above 1e-10")
def test_c03_series_vs_solver():
    e_cont = abs(truncated_pressure(cont((1.0, 0.2)), D=25)[0] - pressure(cont((1.0, 0.2))).p)
    e_disc = abs(truncated_pressure(disc((1, 0.5)), D=25)[0] - math.log(1.5))
    assert record(3, max(e_cont, e_disc) < 1e-10,
                  f"continuous err {e_cont:.2e}, discrete err {e_disc:.2e} (need < 1e-10)")


def test_c04_tree_oracle():
    t = time.perf_counter()
    cases = 0
    bad = 0
    for lengths in ([1, 2, 3, Fraction(1, 2)], [Fraction(1, 2), 3, 2, 1]):
        for n in iter_multi_indices([1, 2, 3, 4], 5):
            c = activity_coefficient("continuous", lengths, n)
            bad += tree_weight_sum(n, lengths) / n.factorial() != abs(c)
            cases += 1
    elapsed = time.perf_counter() - t
    assert record(4, bad == 0 and elapsed < 10,
                  f"{cases} multi-indices, {bad} mismatches, runtime {elapsed:.2f} s")


def test_c05_fps_residuals():
    rng = np.random.default_rng(5)
    nonzero = 0
    runs = 0
    for _ in range(20):
        s = int(rng.integers(1, 4))
        species = list(range(1, s + 1))
        cl = [Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 5))) for _ in species]
        dl = {k: int(rng.integers(1, 6)) for k in species}
        for kind, lengths in (("continuous", cl), ("discrete", dl)):
            r = fps_fixed_point_residual(kind, lengths, species, 6, flipped=False)
            nonzero += not r.is_zero()
            runs += 1
    assert record(5, nonzero == 0, f"{runs} residual series through degree 6, {nonzero} nonzero")


def locate_threshold(make, crit_id, lo, hi):
    def holds(z):
        reps = [exact_criterion(make(z))] + sufficient_criteria(make(z))
        return next(r for r in reps if r.criterion_id == crit_id).holds

    assert holds(lo) and not holds(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo


def test_c06_criteria_thresholds():
    cases = [
        (lambda z: disc((2, z)), "ExactDiscrete", 0.25),
        (lambda z: disc((2, z)), "GruberKunz", 0.125),
        (lambda z: cont((1.0, z)), "ExactContinuous", math.exp(-1)),
        (lambda z: cont((1.0, z)), "KP", math.exp(-1) / 2),
    ]
    errs = [abs(locate_threshold(make, cid, 0.01, 1.0) - want) for make, cid, want in cases]
    assert record(6, max(errs) < 1e-8, f"threshold errors {', '.join(f'{e:.1e}' for e in errs)}")


@pytest.mark.xfail(strict=True, reason="at z = 0.4 the |terms| partial sum is ~3.4 at degree 60")
def test_c07_divergence_certificate():
    sums = degree_partial_sums(cont((1.0, 0.4)), D=60, absolute=True, degree_cap=60)
    first = next((d + 1 for d, s in enumerate(sums) if s > 1e3), None)
    assert record(7, first is not None,
                  f"partial sum at degree 60 = {sums[-1]:.3f} (need > 1e3)")


def test_c08_renewal_convergence():
    m = disc((1, 1.0), (2, 0.5))
    t = time.perf_counter()
    rep = renewal_asymptotics_check(m, [2000], digits=50)
    elapsed = time.perf_counter() - t
    eps = rep.epsilon[-1]
    assert record(8, eps < 1e-8 and elapsed < 5,
                  f"eps(2000) = {eps:.1e}, runtime {elapsed:.3f} s")


def test_c09_oracle_equality():
    rng = np.random.default_rng(9)
    mismatches = 0
    checks = 0
    for _ in range(50):
        s = int(rng.integers(1, 5))
        lengths = rng.integers(1, 6, s)
        z = rng.integers(1, 16, s) / 8.0
        m = disc(*zip(lengths.tolist(), z.tolist()))
        for L in range(15):
            mismatches += xi_discrete(m, L, exact=True).value != xi_discrete_bruteforce(m, L).value
            checks += 1
    assert record(9, mismatches == 0, f"{checks} (model, L) pairs, {mismatches} mismatches")


def test_c10_packing_concentration():
    m = disc((1, 1.0), (2, 0.5))
    sigma = packing_fraction(m)
    hists = {L: packing_distribution(m, L) for L in (100, 200, 400)}
    mean_err = abs(hists[400].mean() - sigma)
    tails = [hists[L].mass_outside(sigma, 0.05) for L in (100, 200, 400)]
    ok = mean_err < 0.01 and tails[0] > tails[1] > tails[2]
    assert record(10, ok, f"|mean - sigma| = {mean_err:.1e}, tails "
                          f"{', '.join(f'{t:.3g}' for t in tails)}")


def test_c11_phase_diagram():
    base = ActivityModel("continuous", StretchedExp(0.0))
    tb = eval_g(base, 0.0)
    mu_star = tb.mid
    rows = scan_rows(base, 0.0, 3.0, 300)
    below = [r for r in rows if r["mu"] < mu_star]
    above = [r for r in rows if r["mu"] > mu_star]
    equal = max(abs(r["p"] - r["mu"]) for r in above)
    slopes = [(b["p"] - a["p"]) / (b["mu"] - a["mu"]) for a, b in zip(below, below[1:])]
    last_fluid = max(r["mu"] for r in rows if r["regime"] == "fluid")
    first_cp = min(r["mu"] for r in rows if r["regime"] != "fluid")
    ok = (tb.bound < 1e-8 and equal < 1e-12 and max(slopes) < 1
          and last_fluid < mu_star < first_cp and first_cp - last_fluid <= 0.01 + 1e-12)
    assert record(11, ok, f"mu* = {mu_star:.10f} (+/- {tb.bound:.0e}), max slope below "
                          f"{max(slopes):.4f}, kink in [{last_fluid:.2f}, {first_cp:.2f}]")


@pytest.mark.xfail(strict=True, reason="log(z_k)/k - p is -0.21 at k = 50 and -0.07 at k = 200")
def test_c12_corollary_report():
    rep = corollary2_report(0.5, K=200)
    worst = max(abs(rep.growth(k) - rep.p) for k in range(50, 201))
    ok = rep.in_D_vir and rep.criterion.margin > 0 and worst < 1e-3
    assert record(12, ok, f"in_D_vir {rep.in_D_vir}, margin {rep.criterion.margin:.2e}, "
                          f"max |log(z_k)/k - p| over k >= 50 = {worst:.3f} (need < 1e-3)")


def refined_min(f, lo=1e-4, hi=1 - 1e-4, points=201, rounds=4):
    best = lo
    for _ in range(rounds):
        grid = np.linspace(lo, hi, points)
        vals = [f(s) for s in grid]
        i = int(np.argmin(vals))
        best = grid[i]
        step = grid[1] - grid[0]
        lo, hi = max(1e-9, best - step), min(1 - 1e-9, best + step)
    return min(vals)


def test_c13_rate_function_minimum():
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(10):
        s = int(rng.integers(1, 5))
        m = cont(*zip(rng.uniform(0.2, 3.0, s).tolist(), rng.uniform(0.05, 1.5, s).tolist()))
        gap = abs(refined_min(lambda sig: rate_function(m, sig)) + pressure(m).p)
        worst = max(worst, gap)
    assert record(13, worst < 1e-6, f"10 models, worst |min I + p| = {worst:.1e}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
