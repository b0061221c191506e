"""Activity expansion of the pressure and its convergence domain.

Coefficients are exact rationals.  For a multi-index ``n`` with order
``M = sum n_k`` and total length ``N = sum n_k l_k``:

* continuous:  ``(-N)^(M-1) / n!``
* lattice:     ``(-1)^(M-1) (N-1)! / ((N-M)! n!)``

The magnitudes are the coefficients of ``F(z) = -p(-z)``, which solves
``F = sum_k z_k exp(l_k F)`` (continuous) or
``exp(F) = 1 + sum_k z_k exp(k F)`` (lattice) as formal power series.
"""
from __future__ import annotations

import csv
import heapq
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from ._roots import expand_up, solve_increasing
from .errors import CapExceeded, DivergentSeries, InvalidIndex
from .model import ActivityModel, EnsembleKind, abscissa, eval_g

__all__ = [
    "MultiIndex",
    "GradedSeries",
    "CriterionReport",
    "activity_coefficient",
    "iter_multi_indices",
    "truncated_pressure",
    "degree_partial_sums",
    "exact_criterion",
    "sufficient_criteria",
    "tree_weight_sum",
    "fps_fixed_point_residual",
    "write_coefficient_csv",
    "COEFFICIENT_CSV_COLUMNS",
]

DEGREE_CAP = 30
SPECIES_CAP = 12
TERM_CAP = 2_000_000
TREE_VERTEX_CAP = 7
CRITERION_TOL = 1e-12


class MultiIndex:
    """Sparse species -> count map with positive counts.

    ``MultiIndex({1: 2, 3: 1})`` is the monomial ``z_1^2 z_3``.
    """

    __slots__ = ("counts", "_hash")

    def __init__(self, counts: Mapping[int, int] | Iterable[tuple[int, int]]):
        items = counts.items() if isinstance(counts, Mapping) else counts
        merged: dict[int, int] = {}
        for k, c in items:
            if int(c) != c or c < 0:
                raise InvalidIndex(f"count for species {k} must be a nonnegative integer")
            if c:
                merged[int(k)] = merged.get(int(k), 0) + int(c)
        if not merged:
            raise InvalidIndex("multi-index must have at least one positive count")
        self.counts = tuple(sorted(merged.items()))
        self._hash = hash(self.counts)

    @classmethod
    def unit(cls, k: int) -> "MultiIndex":
        return cls({k: 1})

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, MultiIndex) and self.counts == other.counts

    def __lt__(self, other):
        return (self.order, self.counts) < (other.order, other.counts)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        d = dict(self.counts)
        for k, c in other.counts:
            d[k] = d.get(k, 0) + c
        return MultiIndex(d)

    def __repr__(self):
        return f"MultiIndex({dict(self.counts)})"

    def __str__(self):
        return ";".join(f"{k}:{c}" for k, c in self.counts)

    @classmethod
    def parse(cls, text: str) -> "MultiIndex":
        pairs = []
        for part in text.split(";"):
            k, c = part.split(":")
            pairs.append((int(k), int(c)))
        return cls(pairs)

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)

    @property
    def species(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.counts)

    @property
    def order(self) -> int:
        return sum(c for _, c in self.counts)

    def total_length(self, lengths: Mapping[int, Fraction]) -> Fraction:
        return sum((lengths[k] * c for k, c in self.counts), Fraction(0))

    def factorial(self) -> int:
        out = 1
        for _, c in self.counts:
            out *= math.factorial(c)
        return out

    def colors(self) -> list[int]:
        """Species label of each of the ``order`` vertices, sorted."""
        return [k for k, c in self.counts for _ in range(c)]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def length_map(kind, lengths=None, species: Iterable[int] | None = None) -> dict[int, Fraction]:
    """Normalise ``lengths`` to ``{species: Fraction}``.

    A sequence is read as 1-based species; ``None`` means ``l_k = k`` and
    needs ``species`` (lattice only).
    """
    kind = EnsembleKind(kind)
    if lengths is None:
        if kind is not EnsembleKind.DISCRETE:
            raise ValueError("continuous coefficients need explicit lengths")
        if species is None:
            raise ValueError("lengths=None needs the list of species")
        out = {int(k): Fraction(int(k)) for k in species}
    elif isinstance(lengths, Mapping):
        out = {int(k): _as_fraction(v) for k, v in lengths.items()}
    else:
        out = {i + 1: _as_fraction(v) for i, v in enumerate(lengths)}
    for k, v in out.items():
        if v < 0:
            raise ValueError(f"negative length for species {k}")
        if kind is EnsembleKind.DISCRETE and (v.denominator != 1 or v < 1):
            raise ValueError(f"lattice rods need integer lengths >= 1 (species {k}: {v})")
    return out


def _lengths_for(kind, lengths, n: MultiIndex):
    if isinstance(lengths, dict) and all(isinstance(v, Fraction) for v in lengths.values()):
        return lengths
    return length_map(kind, lengths, n.species)


def activity_coefficient(kind, lengths, n: MultiIndex) -> Fraction:
    """Signed coefficient of ``z^n`` in the pressure."""
    if not isinstance(n, MultiIndex):
        n = MultiIndex(n)
    kind = EnsembleKind(kind)
    lm = _lengths_for(kind, lengths, n)
    M = n.order
    N = n.total_length(lm)
    if kind is EnsembleKind.CONTINUOUS:
        return Fraction(-N) ** (M - 1) / n.factorial()
    N = int(N)
    mag = Fraction(math.factorial(N - 1), math.factorial(N - M) * n.factorial())
    return mag if M % 2 == 1 else -mag


def iter_multi_indices(species: Iterable[int], D: int) -> Iterator[MultiIndex]:
    """All multi-indices over ``species`` with order 1..D, graded lexicographic."""
    species = sorted(species)
    s = len(species)

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    if s == 0:
        return
    for M in range(1, D + 1):
        for counts in compositions(M, s):
            yield MultiIndex(zip(species, counts))


def _model_species(model: ActivityModel, active_species):
    if model.is_finite:
        table = model.species()
        keys = sorted(table) if active_species is None else sorted(active_species)
        return {k: table[k] for k in keys}
    if active_species is None:
        raise ValueError("infinite families need an explicit active_species set")
    return {int(k): (float(k), model.activity(int(k))) for k in active_species}


def _check_caps(n_species, D, degree_cap, species_cap, term_cap):
    if D > degree_cap:
        raise CapExceeded(f"degree {D} exceeds the cap {degree_cap}")
    if n_species > species_cap:
        raise CapExceeded(f"{n_species} active species exceed the cap {species_cap}")
    n_terms = math.comb(D + n_species, n_species) - 1
    if n_terms > term_cap:
        raise CapExceeded(f"{n_terms} multi-indices exceed the cap {term_cap}")


def _log_abs(c: Fraction) -> float:
    return math.log(abs(c.numerator)) - math.log(c.denominator)


def _series_terms(model, active_species, D, degree_cap, species_cap, term_cap):
    table = _model_species(model, active_species)
    _check_caps(len(table), D, degree_cap, species_cap, term_cap)
    lm = length_map(model.kind, {k: l for k, (l, _) in table.items()})
    logz = {k: math.log(z) for k, (_, z) in table.items() if z > 0}
    for n in iter_multi_indices(logz, D):
        c = activity_coefficient(model.kind, lm, n)
        if c == 0:
            continue
        mag = math.exp(_log_abs(c) + sum(logz[k] * m for k, m in n.counts))
        yield n, (mag if c > 0 else -mag)


def truncated_pressure(model: ActivityModel, active_species=None, D: int = 10, *,
                       degree_cap=DEGREE_CAP, species_cap=SPECIES_CAP,
                       term_cap=TERM_CAP) -> tuple[float, int]:
    """Partial sum of the activity expansion over orders ``1..D``.

    Returns ``(value, number_of_monomials)``.
    """
    if D < 1:
        raise ValueError("D must be >= 1")
    terms = [t for _, t in _series_terms(model, active_species, D,
                                         degree_cap, species_cap, term_cap)]
    return math.fsum(terms), len(terms)


def degree_partial_sums(model: ActivityModel, active_species=None, D: int = 10, *,
                        absolute: bool = False, degree_cap=DEGREE_CAP,
                        species_cap=SPECIES_CAP, term_cap=TERM_CAP) -> list[float]:
    """Partial sums ``S_1, ..., S_D`` by total order (|terms| if ``absolute``)."""
    by_degree = [[] for _ in range(D + 1)]
    for n, t in _series_terms(model, active_species, D, degree_cap, species_cap, term_cap):
        by_degree[n.order].append(abs(t) if absolute else t)
    out, acc = [], []
    for d in range(1, D + 1):
        acc.extend(by_degree[d])
        out.append(math.fsum(acc))
    return out


# -- convergence criteria ---------------------------------------------------------

@dataclass(frozen=True)
class CriterionReport:
    """Verdict of one convergence criterion.

    ``margin`` is the infimum over admissible ``a > 0`` of the defining gap
    (the inequality holds where the gap is <= 0).  ``boundary`` marks a
    verdict that rests on equality, which is enough for the pressure series
    but not for the density series.
    """

    criterion_id: str
    holds: bool
    witness_a: float | None
    margin: float
    boundary: bool = False


def _g(model, a, order=0):
    try:
        tb = eval_g(model, a, order)
    except DivergentSeries:
        return math.inf
    return tb.mid


def _minimize_gap(model, cid, gap, dgap) -> CriterionReport:
    """Infimum over a in (0, theta*] of a gap that decreases then increases."""
    if model.is_zero:
        return CriterionReport(cid, True, 1.0, -math.inf)
    theta_star = abscissa(model)
    if theta_star <= 0:
        return CriterionReport(cid, False, None, math.inf)

    if dgap(0.0) >= 0:
        return _report(cid, 0.0, gap(0.0))
    if math.isfinite(theta_star):
        if dgap(theta_star) <= 0:
            return _report(cid, theta_star, gap(theta_star))
        hi = theta_star
    else:
        hi = expand_up(dgap, 0.0)
        if hi is None:
            return CriterionReport(cid, True, 1.0, -math.inf)
    a, _, _ = solve_increasing(dgap, 0.0, hi)
    return _report(cid, a, gap(a))


def _report(cid, a, margin):
    holds = margin <= CRITERION_TOL and a > 0
    return CriterionReport(cid, holds, a if holds else None, margin,
                           boundary=holds and margin > -CRITERION_TOL)


def exact_criterion(model: ActivityModel) -> CriterionReport:
    """Necessary and sufficient test for absolute convergence of the series.

    Continuous: exists a > 0 with ``g(a) <= a``.
    Lattice:    exists a > 0 with ``g(a) <= exp(a) - 1``.
    """
    if model.kind is EnsembleKind.CONTINUOUS:
        return _minimize_gap(
            model, "ExactContinuous",
            lambda a: _g(model, a) - a,
            lambda a: _g(model, a, 1) - 1.0)
    return _minimize_gap(
        model, "ExactDiscrete",
        lambda a: _g(model, a) - math.expm1(a),
        lambda a: _g(model, a, 1) - math.exp(a))


def _min_length(model):
    if model.is_finite:
        return min(l for l, _ in model.entries())
    return 1.0


def sufficient_criteria(model: ActivityModel) -> list[CriterionReport]:
    """Classical sufficient conditions applicable to the model's ensemble.

    Continuous: Kotecky-Preiss type ``sum_j (l_j + l_k) z_j e^(a l_j) <= a l_k``
    for every species k, i.e. ``g'(a)/l_min + g(a) - a <= 0``.
    Lattice: Gruber-Kunz ``sum_k k e^(ak) z_k <= e^a - 1`` and the loss
    network condition ``sum_j j^2 z_j < 1``.
    """
    if model.kind is EnsembleKind.CONTINUOUS:
        if model.is_zero:
            return [CriterionReport("KP", True, 1.0, -math.inf)]
        lmin = _min_length(model)
        if lmin == 0:
            return [CriterionReport("KP", False, None, math.inf)]
        return [_minimize_gap(
            model, "KP",
            lambda a: _g(model, a, 1) / lmin + _g(model, a) - a,
            lambda a: _g(model, a, 2) / lmin + _g(model, a, 1) - 1.0)]

    gk = _minimize_gap(
        model, "GruberKunz",
        lambda a: _g(model, a, 1) - math.expm1(a),
        lambda a: _g(model, a, 2) - math.exp(a))
    second = 0.0 if model.is_zero else _g(model, 0.0, 2) if abscissa(model) >= 0 else math.inf
    loss = CriterionReport("LossNetwork", second < 1, None, second - 1)
    return [gk, loss]


# -- colored tree oracle ------------------------------------------------------------

def _prufer_edges(seq, m):
    degree = [1] * m
    for v in seq:
        degree[v] += 1
    leaves = [v for v in range(m) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return edges


@lru_cache(maxsize=None)
def _rooted_child_profiles(m: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Multiset of child-count vectors over all m^(m-1) rooted labelled trees."""
    if m == 1:
        return (((0,), 1),)
    profiles: Counter = Counter()
    for seq in itertools.product(range(m), repeat=m - 2):
        adj = [[] for _ in range(m)]
        for u, v in _prufer_edges(seq, m):
            adj[u].append(v)
            adj[v].append(u)
        for root in range(m):
            children = [0] * m
            seen = [False] * m
            seen[root] = True
            stack = [root]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        children[u] += 1
                        stack.append(v)
            profiles[tuple(children)] += 1
    return tuple(profiles.items())


def tree_weight_sum(n: MultiIndex, lengths, cap: int = TREE_VERTEX_CAP) -> Fraction:
    """Sum over rooted trees on the colored vertex set of ``n`` of the edge weights.

    Every edge weighs the length of its father's species.  Trees are
    enumerated explicitly (Pruefer sequences times roots), so this is an
    independent check on the closed-form coefficients.
    """
    if not isinstance(n, MultiIndex):
        n = MultiIndex(n)
    m = n.order
    if m > cap:
        raise CapExceeded(f"{m} vertices exceed the enumeration cap {cap}")
    lm = {k: _as_fraction(v) for k, v in (
        lengths.items() if isinstance(lengths, Mapping)
        else enumerate(lengths, start=1))}
    vertex_len = [lm[c] for c in n.colors()]
    total = Fraction(0)
    for children, count in _rooted_child_profiles(m):
        w = Fraction(count)
        for length, ch in zip(vertex_len, children):
            if ch:
                w *= length ** ch
        total += w
    return total


# -- graded formal power series -----------------------------------------------------

class GradedSeries:
    """Multivariate power series truncated at total degree ``D``.

    Coefficients are exact rationals stored sparsely; a missing index means
    zero.  The constant term is kept apart from the ``MultiIndex`` map.
    """

    def __init__(self, D: int, coeffs: Mapping[MultiIndex, Fraction] | None = None,
                 constant=0):
        self.D = D
        self.constant = Fraction(constant)
        self.coeffs: dict[MultiIndex, Fraction] = {}
        for n, c in (coeffs or {}).items():
            if n.order <= D and c != 0:
                self.coeffs[n] = Fraction(c)

    @classmethod
    def variable(cls, k: int, D: int) -> "GradedSeries":
        return cls(D, {MultiIndex.unit(k): Fraction(1)})

    def __getitem__(self, n: MultiIndex) -> Fraction:
        return self.coeffs.get(n, Fraction(0))

    def __add__(self, other):
        if not isinstance(other, GradedSeries):
            return GradedSeries(self.D, self.coeffs, self.constant + other)
        D = min(self.D, other.D)
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out.get(n, 0) + c
        return GradedSeries(D, out, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self):
        return GradedSeries(self.D, {n: -c for n, c in self.coeffs.items()}, -self.constant)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "GradedSeries":
        c = Fraction(c)
        return GradedSeries(self.D, {n: c * v for n, v in self.coeffs.items()},
                            c * self.constant)

    def __mul__(self, other):
        if not isinstance(other, GradedSeries):
            return self.scale(other)
        D = min(self.D, other.D)
        out: dict[MultiIndex, Fraction] = {}
        if other.constant:
            for n, c in self.coeffs.items():
                out[n] = out.get(n, 0) + c * other.constant
        if self.constant:
            for n, c in other.coeffs.items():
                out[n] = out.get(n, 0) + c * self.constant
        for n1, c1 in self.coeffs.items():
            o1 = n1.order
            for n2, c2 in other.coeffs.items():
                if o1 + n2.order <= D:
                    n = n1 + n2
                    out[n] = out.get(n, 0) + c1 * c2
        return GradedSeries(D, out, self.constant * other.constant)

    __rmul__ = __mul__

    def homogeneous(self, d: int) -> "GradedSeries":
        if d == 0:
            return GradedSeries(self.D, constant=self.constant)
        return GradedSeries(self.D, {n: c for n, c in self.coeffs.items() if n.order == d})

    def exp(self) -> "GradedSeries":
        """exp of a series without constant term.

        Uses the grading identity ``deg(E) = deg(A) * E`` which gives
        ``E_d = (1/d) sum_{j=1..d} j A_j E_{d-j}``.
        """
        if self.constant != 0:
            raise ValueError("exp() needs a series with zero constant term")
        parts = [self.homogeneous(j) for j in range(self.D + 1)]
        E = [GradedSeries(self.D, constant=1)]
        for d in range(1, self.D + 1):
            acc = GradedSeries(self.D)
            for j in range(1, d + 1):
                if parts[j].coeffs and (E[d - j].coeffs or E[d - j].constant):
                    acc = acc + (parts[j] * E[d - j]).scale(j)
            E.append(acc.scale(Fraction(1, d)))
        out = GradedSeries(self.D, constant=1)
        for e in E[1:]:
            out = out + e
        return out

    def is_zero(self) -> bool:
        return self.constant == 0 and not self.coeffs

    def __repr__(self):
        return f"GradedSeries(D={self.D}, terms={len(self.coeffs)}, constant={self.constant})"


def fps_fixed_point_residual(kind, lengths, active_species, D: int,
                             flipped: bool = True) -> GradedSeries:
    """Residual of the fixed point equation for the closed-form coefficients.

    With ``flipped=True`` the all-positive series F is checked against
    ``F = sum z_k e^(l_k F)`` (continuous) or ``e^F = 1 + sum z_k e^(k F)``
    (lattice).  With ``flipped=False`` the signed pressure series p is checked
    against ``p = sum z_k e^(-l_k p)`` or ``1 - e^(-p) = sum z_k e^(-k p)``.
    An exact zero series means every coefficient through degree D is right.
    """
    if D < 1:
        raise ValueError("D must be >= 1")
    kind = EnsembleKind(kind)
    species = sorted(active_species)
    lm = length_map(kind, lengths, species)
    lm = {k: lm[k] for k in species}
    sign = 1 if flipped else -1
    coeffs = {}
    for n in iter_multi_indices(species, D):
        c = activity_coefficient(kind, lm, n)
        coeffs[n] = abs(c) if flipped else c
    F = GradedSeries(D, coeffs)
    rhs = GradedSeries(D)
    for k in species:
        rhs = rhs + GradedSeries.variable(k, D) * F.scale(sign * lm[k]).exp()
    if kind is EnsembleKind.CONTINUOUS:
        return F - rhs
    if flipped:
        return F.exp() - 1 - rhs
    return 1 - (-F).exp() - rhs


# -- CSV export -------------------------------------------------------------------

COEFFICIENT_CSV_COLUMNS = ("n", "M", "N_l", "numerator", "denominator", "sign")


def coefficient_rows(kind, lengths, species, D):
    lm = length_map(kind, lengths, species)
    for n in iter_multi_indices(species, D):
        c = activity_coefficient(kind, lm, n)
        yield {
            "n": str(n),
            "M": n.order,
            "N_l": str(n.total_length(lm)),
            "numerator": abs(c.numerator),
            "denominator": c.denominator,
            "sign": (c > 0) - (c < 0),
        }


def write_coefficient_csv(fh, kind, lengths, species, D) -> int:
    """Write the coefficient table to an open text file; returns the row count."""
    writer = csv.DictWriter(fh, fieldnames=COEFFICIENT_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    count = 0
    for row in coefficient_rows(kind, lengths, species, D):
        writer.writerow(row)
        count += 1
    return count
