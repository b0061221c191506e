"""Exact finite-volume partition functions and packing-fraction laws.

Lattice: ``Xi_0 = 1`` and, conditioning on the content of site 0,

    Xi_L = (1 + z_1) Xi_{L-1} + sum_{k=2..L} z_k Xi_{L-k}.

Continuous: the canonical weight of ``N`` rods in ``[0, L]`` is
``(L - sum_k N_k l_k)^M / prod_k N_k!`` with ``M = sum_k N_k``, so the grand
sum over feasible ``N`` is finite once every length is positive.
"""
from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import mpmath
import numpy as np

from .errors import CapExceeded, DomainError, NotFluid, ZeroLengthSpecies
from .expansions import MultiIndex
from .model import ActivityModel, EnsembleKind
from .regime import pressure

__all__ = [
    "PartitionValue",
    "PackingHistogram",
    "RenewalReport",
    "xi_discrete",
    "xi_discrete_sequence",
    "xi_discrete_bruteforce",
    "canonical_Z_continuous",
    "xi_continuous",
    "packing_distribution",
    "renewal_asymptotics_check",
    "write_xi_csv",
    "write_histogram_csv",
    "XI_CSV_COLUMNS",
    "HISTOGRAM_CSV_COLUMNS",
]

DEFAULT_DIGITS = 50
BRUTEFORCE_CAP = 22

Number = Union[Fraction, mpmath.mpf]


@dataclass(frozen=True)
class PartitionValue:
    L: float
    value: Number
    truncation_bound: float = 0.0

    @property
    def log(self) -> float:
        return float(mpmath.log(mpmath.mpf(self.value) if isinstance(self.value, Fraction)
                                else self.value))


@dataclass(frozen=True)
class PackingHistogram:
    """Grand-canonical law of the covered fraction at volume ``L``."""

    L: float
    sigma: tuple[float, ...]
    mass: tuple[float, ...]

    def mean(self) -> float:
        return math.fsum(s * m for s, m in zip(self.sigma, self.mass))

    def mass_outside(self, center: float, eps: float) -> float:
        return math.fsum(m for s, m in zip(self.sigma, self.mass) if abs(s - center) > eps)

    def mass_below(self, level: float) -> float:
        return math.fsum(m for s, m in zip(self.sigma, self.mass) if s < level)


def _lattice_activities(model: ActivityModel, exact: bool = False) -> dict[int, Number]:
    if model.kind is not EnsembleKind.DISCRETE:
        raise DomainError("lattice partition functions need a discrete model")
    if not model.is_finite:
        raise DomainError("use model.truncated(K) for infinite families")
    acts: dict[int, Number] = defaultdict(lambda: Fraction(0) if exact else mpmath.mpf(0))
    for length, z in model.entries():
        acts[int(length)] += Fraction(z) if exact else mpmath.mpf(z)
    return dict(acts)


def xi_discrete_sequence(model: ActivityModel, L: int, exact: bool = False,
                         digits: int = DEFAULT_DIGITS) -> list[Number]:
    """``[Xi_0, ..., Xi_L]`` by the renewal recurrence."""
    if L < 0:
        raise DomainError("L must be >= 0")
    with mpmath.workdps(digits):
        acts = _lattice_activities(model, exact)
        one = Fraction(1) if exact else mpmath.mpf(1)
        xi = [one]
        for n in range(1, L + 1):
            total = xi[n - 1]  # site 0 empty
            for k, z in acts.items():
                if k <= n:
                    total += z * xi[n - k]
            xi.append(total)
        return xi


def xi_discrete(model: ActivityModel, L: int, exact: bool = False,
                digits: int = DEFAULT_DIGITS) -> PartitionValue:
    return PartitionValue(L, xi_discrete_sequence(model, L, exact, digits)[L])


def xi_discrete_bruteforce(model: ActivityModel, L: int) -> PartitionValue:
    """Sum of ``prod z`` over every explicit non-overlapping placement (exact).

    Each configuration (a set of rod positions) is visited once; species of
    equal length share placements, so their activities are added first.
    Weights are kept as integers over a common denominator.
    """
    if L > BRUTEFORCE_CAP:
        raise CapExceeded(f"L = {L} exceeds the brute-force cap {BRUTEFORCE_CAP}")
    acts = _lattice_activities(model, exact=True)
    den = math.lcm(*(z.denominator for z in acts.values())) if acts else 1
    rods = [(k, int(z * den)) for k, z in sorted(acts.items()) if z]
    by_count: dict[int, int] = defaultdict(int)

    def visit(start, occupied, weight, count):
        by_count[count] += weight
        for x in range(start, L):
            for length, a in rods:
                mask = ((1 << length) - 1) << x
                if x + length > L or occupied & mask:
                    continue
                visit(x + length, occupied | mask, weight * a, count + 1)

    visit(0, 0, 1, 0)
    total = sum((Fraction(w, den ** m) for m, w in by_count.items()), Fraction(0))
    return PartitionValue(L, total)


def canonical_Z_continuous(n: MultiIndex, lengths, L) -> Fraction:
    """Canonical partition function ``(L - S)^M / n!`` (0 when ``S >= L``)."""
    if not isinstance(n, MultiIndex):
        n = MultiIndex(n)
    L = Fraction(L)
    if L <= 0:
        raise DomainError("L must be positive")
    lm = lengths if isinstance(lengths, dict) else {
        i + 1: v for i, v in enumerate(lengths)}
    S = sum((Fraction(lm[k]) * c for k, c in n.counts), Fraction(0))
    if S >= L:
        return Fraction(0)
    return (L - S) ** n.order / n.factorial()


def _continuous_species(model):
    if model.kind is not EnsembleKind.CONTINUOUS or not model.is_finite:
        raise DomainError("needs a continuous FiniteList model")
    entries = model.entries()
    if any(l == 0 for l, _ in entries):
        raise ZeroLengthSpecies("a zero-length species makes Xi_L infinite")
    return entries


def _feasible(entries, L, degree_cap):
    """Yield count tuples N with sum N_k l_k <= L and sum N_k <= degree_cap."""
    s = len(entries)

    def rec(i, remaining, used, prefix):
        if i == s:
            yield prefix
            return
        length = entries[i][0]
        top = int(math.floor(remaining / length + 1e-12))
        top = min(top, degree_cap - used)
        for c in range(top + 1):
            yield from rec(i + 1, remaining - c * length, used + c, prefix + (c,))

    yield from rec(0, L, 0, ())


def _continuous_terms(entries, L, degree_cap):
    """(S, log weight) for every feasible nonempty N; weights exclude the empty term."""
    logz = [math.log(z) for _, z in entries]
    for counts in _feasible(entries, L, degree_cap):
        M = sum(counts)
        if M == 0:
            continue
        S = math.fsum(c * l for c, (l, _) in zip(counts, entries))
        free = L - S
        if free <= 0:
            yield S, -math.inf
            continue
        logw = (M * math.log(free) + sum(c * lz for c, lz in zip(counts, logz))
                - sum(math.lgamma(c + 1) for c in counts))
        yield S, logw


def xi_continuous(model: ActivityModel, L: float, degree_cap: int | None = None,
                  digits: int = DEFAULT_DIGITS) -> PartitionValue:
    """Grand partition function in ``[0, L]``.

    The sum is finite; with ``degree_cap`` below ``floor(L / l_min)`` the
    omitted orders are bounded by the tail of ``exp(L sum_k z_k)``.
    """
    if not L > 0:
        raise DomainError("L must be positive")
    entries = _continuous_species(model)
    if not entries:
        return PartitionValue(L, mpmath.mpf(1))
    lmin = min(l for l, _ in entries)
    full = int(math.floor(L / lmin + 1e-12))
    cap = full if degree_cap is None else min(degree_cap, full)
    with mpmath.workdps(digits):
        total = mpmath.mpf(1)
        for _, logw in _continuous_terms(entries, L, cap):
            if logw > -math.inf:
                total += mpmath.exp(logw)
        bound = 0.0
        if cap < full:
            x = mpmath.mpf(L) * sum(z for _, z in entries)
            tail = mpmath.exp(x) - sum(x ** m / mpmath.factorial(m) for m in range(cap + 1))
            bound = float(tail)
        return PartitionValue(L, +total, bound)


def packing_distribution(model: ActivityModel, L) -> PackingHistogram:
    """Exact law of ``sum_k N_k l_k / L`` in the grand-canonical ensemble."""
    if model.kind is EnsembleKind.DISCRETE:
        return _lattice_packing(model, int(L))
    entries = _continuous_species(model)
    buckets: dict[float, list[float]] = defaultdict(list)
    buckets[0.0].append(0.0)
    for S, logw in _continuous_terms(entries, L, 10 ** 9):
        if logw > -math.inf:
            buckets[round(S, 12)].append(logw)
    keys = sorted(buckets)
    logs = [float(mpmath.log(sum(mpmath.exp(w) for w in buckets[s]))) for s in keys]
    top = max(logs)
    weights = np.exp(np.array(logs) - top)
    mass = weights / weights.sum()
    return PackingHistogram(L, tuple(s / L for s in keys), tuple(float(m) for m in mass))


def _lattice_packing(model, L):
    if L < 0:
        raise DomainError("L must be >= 0")
    acts = {k: float(z) for k, z in _lattice_activities(model).items()}
    # rows[n][S]: weight of configurations on n sites covering S sites,
    # stored as exp(logscale[n]) * rows[n]
    rows = [np.zeros(1)]
    rows[0][0] = 1.0
    logscale = [0.0]
    for n in range(1, L + 1):
        sources = [(n - 1, 0, 1.0)] + [(n - k, k, z) for k, z in acts.items() if k <= n]
        ref = max(logscale[m] for m, _, _ in sources)
        row = np.zeros(n + 1)
        for m, shift, w in sources:
            prev = rows[m]
            row[shift:shift + len(prev)] += w * math.exp(logscale[m] - ref) * prev
        total = row.sum()
        rows.append(row / total)
        logscale.append(ref + math.log(total))
    final = rows[L]
    mass = final / final.sum()
    sigma = tuple(S / L for S in range(L + 1)) if L else (0.0,)
    return PackingHistogram(L, sigma, tuple(float(m) for m in mass))


@dataclass(frozen=True)
class RenewalReport:
    """``epsilon(L) = |log Xi_L - p L + log mu|`` for each requested L."""

    L: tuple[int, ...]
    log_xi: tuple[float, ...]
    epsilon: tuple[float, ...]
    p: float
    mu: float
    xi: float
    decay_rate: float | None
    sup_tail: float


def _renewal_root(acts, p_guess, digits):
    """High precision xi in (0, 1] with (1+z_1) xi + sum_{k>=2} z_k xi^k = 1."""
    with mpmath.workdps(digits + 10):
        z1 = acts.get(1, mpmath.mpf(0))

        def lifetime(x):
            return (1 + z1) * x + sum(z * x ** k for k, z in acts.items() if k >= 2) - 1

        xi = mpmath.findroot(lifetime, mpmath.mpf(math.exp(-p_guess)))
        mu = (1 + z1) * xi + sum(k * z * xi ** k for k, z in acts.items() if k >= 2)
        return xi, mu


def renewal_asymptotics_check(model: ActivityModel, L_list: Sequence[int],
                              digits: int = DEFAULT_DIGITS) -> RenewalReport:
    """Compare ``log Xi_L`` with ``p L - log mu`` from renewal theory."""
    sol = pressure(model)
    if not sol.regime.is_fluid:
        raise NotFluid("renewal asymptotics need the fluid regime")
    L_list = sorted(int(L) for L in L_list)
    with mpmath.workdps(digits):
        acts = _lattice_activities(model)
        xi, mu = _renewal_root(acts, sol.p, digits)
        p = -mpmath.log(xi)
        seq = xi_discrete_sequence(model, L_list[-1], digits=digits)
        log_xi, eps = [], []
        for L in L_list:
            lx = mpmath.log(seq[L])
            log_xi.append(float(lx))
            eps.append(float(abs(lx - p * L + mpmath.log(mu))))
    floor = 10.0 ** (-digits + 5)
    pts = [(L, math.log(e)) for L, e in zip(L_list, eps) if e > floor]
    decay = None
    if len(pts) >= 2:
        xs, ys = np.array(pts).T
        decay = float(-np.polyfit(xs, ys, 1)[0])
    half = eps[len(eps) // 2:]
    return RenewalReport(tuple(L_list), tuple(log_xi), tuple(eps), float(p), float(mu),
                         float(xi), decay, max(half) if half else 0.0)


# -- CSV ------------------------------------------------------------------------

XI_CSV_COLUMNS = ("L", "Xi", "log_Xi", "log_Xi_over_L", "p_infinity", "epsilon_renewal")
HISTOGRAM_CSV_COLUMNS = ("L", "sigma_bin", "mass")


def write_xi_csv(fh, rows) -> None:
    writer = csv.DictWriter(fh, fieldnames=XI_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def write_histogram_csv(fh, hist: PackingHistogram) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(HISTOGRAM_CSV_COLUMNS)
    for s, m in zip(hist.sigma, hist.mass):
        writer.writerow([hist.L, repr(s), repr(m)])
