"""Densities, the pressure-density relation and its inverse.

Continuous ensemble, with ``sigma = sum_k l_k rho_k``::

    rho_j = z_j e^(-p l_j) / (1 + sum_k l_k z_k e^(-p l_k))
    p     = sum_k rho_k / (1 - sigma)
    z_k   = rho_k e^(l_k p) / (1 - sigma)

Lattice (``l_k = k``)::

    rho_j = z_j e^(-j p) / (e^(-p) + sum_k k z_k e^(-k p))
    p     = log(1 + sum_k rho_k / (1 - sigma))
    z_k   = rho_k e^((k - 1) p) / (1 - sigma)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import DomainError, NotFluid, OverPacked
from .expansions import CriterionReport, exact_criterion
from .model import (ActivityModel, EnsembleKind, FiniteList, PowerLawExp,
                    eval_g)
from .regime import classify, pressure

__all__ = [
    "DensityVector",
    "densities",
    "virial_pressure",
    "activities_from_densities",
    "Corollary2Report",
    "corollary2_report",
]


@dataclass(frozen=True)
class DensityVector:
    """Number densities per species together with the rod lengths.

    ``total`` and ``packing`` default to the sums over ``rho``; for infinite
    families they hold the full sums (the map itself is truncated).
    """

    rho: Mapping[int, float]
    lengths: Mapping[int, float]
    total: float = field(default=math.nan)
    packing: float = field(default=math.nan)

    def __post_init__(self):
        for k, r in self.rho.items():
            if r < 0:
                raise DomainError(f"negative density for species {k}")
            if k not in self.lengths:
                raise DomainError(f"no length for species {k}")
        if math.isnan(self.total):
            object.__setattr__(self, "total", math.fsum(self.rho.values()))
        if math.isnan(self.packing):
            object.__setattr__(self, "packing", math.fsum(
                self.lengths[k] * r for k, r in self.rho.items()))


def _lattice_species(model, K):
    return {k: (float(k), model.activity(k)) for k in range(1, K + 1)}


def densities(model: ActivityModel, K: int = 200) -> DensityVector:
    """Species densities ``rho_k = z_k dp/dz_k`` in the fluid regime.

    For lattice families only species ``k <= K`` are listed, while
    ``total``/``packing`` are the certified full sums.
    """
    regime = classify(model)
    if not regime.is_fluid:
        raise NotFluid(f"densities need the fluid regime, model is {regime.kind.value}")
    if model.is_zero:
        return DensityVector({}, {}, 0.0, 0.0)
    p = pressure(model).p
    continuous = model.kind is EnsembleKind.CONTINUOUS
    u = eval_g(model, -p, 1).mid
    denom = (1.0 if continuous else math.exp(-p)) + u
    table = model.species() if model.is_finite else _lattice_species(model, K)
    rho = {k: z * math.exp(-p * l) / denom for k, (l, z) in table.items()}
    lengths = {k: l for k, (l, _) in table.items()}
    if model.is_finite:
        return DensityVector(rho, lengths)
    g0 = eval_g(model, -p, 0).mid
    return DensityVector(rho, lengths, g0 / denom, u / denom)


def _coerce(kind, rho, lengths):
    if isinstance(rho, DensityVector):
        return rho
    if lengths is None:
        if EnsembleKind(kind) is not EnsembleKind.DISCRETE:
            raise DomainError("continuous densities need explicit lengths")
        lengths = {k: float(k) for k in rho}
    elif not isinstance(lengths, Mapping):
        lengths = {i + 1: float(v) for i, v in enumerate(lengths)}
    return DensityVector(dict(rho), dict(lengths))


def virial_pressure(kind, rho, lengths=None) -> float:
    """Pressure as a function of the densities (closed form)."""
    dv = _coerce(kind, rho, lengths)
    if dv.packing >= 1:
        raise OverPacked(f"sum_k l_k rho_k = {dv.packing} >= 1")
    ratio = dv.total / (1 - dv.packing)
    if EnsembleKind(kind) is EnsembleKind.CONTINUOUS:
        return ratio
    return math.log1p(ratio)


def activities_from_densities(kind, rho, lengths=None) -> dict[int, float]:
    """Invert the density-activity relation; returns ``{species: z_k}``."""
    dv = _coerce(kind, rho, lengths)
    p = virial_pressure(kind, dv)
    free = 1 - dv.packing
    if EnsembleKind(kind) is EnsembleKind.CONTINUOUS:
        return {k: r * math.exp(dv.lengths[k] * p) / free for k, r in dv.rho.items()}
    return {k: r * math.exp((dv.lengths[k] - 1) * p) / free for k, r in dv.rho.items()}


def model_from_activities(kind, activities: Mapping[int, float],
                          lengths: Mapping[int, float] | None = None) -> ActivityModel:
    """FiniteList model with species in key order."""
    keys = sorted(activities)
    if lengths is None:
        lengths = {k: float(k) for k in keys}
    return ActivityModel(kind, FiniteList(tuple((lengths[k], activities[k]) for k in keys)))


@dataclass(frozen=True)
class Corollary2Report:
    """Activities built from ``rho_k = c / k^3`` on rods of length ``k``.

    ``sum_rho``/``sum_k_rho`` are the full (infinite) sums, certified to
    ``sum_tail_bound``; the truncated sums over ``k <= K`` are kept next to
    them.  ``log_z`` lists ``log z_k`` for ``k = 1..K``.
    """

    c: float
    K: int
    sum_rho: float
    sum_k_rho: float
    sum_tail_bound: float
    truncated_sum_rho: float
    truncated_sum_k_rho: float
    p: float
    log_z: tuple[float, ...]
    in_D_vir: bool
    criterion: CriterionReport

    def growth(self, k: int) -> float:
        """``log(z_k) / k``."""
        return self.log_z[k - 1] / k

    def ratio_growth(self, k: int) -> float:
        """``log(z_{k+1} / z_k)``; tends to p with an O(1/k) correction."""
        return self.log_z[k] - self.log_z[k - 1]


def corollary2_report(c: float, K: int = 200) -> Corollary2Report:
    """Densities in the virial domain whose activities leave the series domain.

    The density family ``c / k^3`` is summed exactly (with a certified tail)
    to get ``p``; the activities ``z_k = rho_k e^(k p) / (1 - sum_j j rho_j)``
    for ``k <= K`` then feed the exact convergence criterion of the activity
    expansion.
    """
    if not c > 0:
        raise DomainError("c must be positive")
    # rho_k = c k^-3 is the power_law_exp family with beta = 3, kappa = 0
    family = ActivityModel(EnsembleKind.CONTINUOUS, PowerLawExp(c, 3.0, 0.0))
    s0 = eval_g(family, 0.0, 0)
    s1 = eval_g(family, 0.0, 1)
    sum_rho, sum_k_rho = s0.mid, s1.mid
    if sum_k_rho + 0.5 * s1.bound >= 1:
        raise DomainError(f"c * zeta(2) = {sum_k_rho} >= 1")
    p = sum_rho / (1 - sum_k_rho)
    log_free = math.log1p(-sum_k_rho)
    log_z = tuple(math.log(c) - 3 * math.log(k) + k * p - log_free for k in range(1, K + 1))
    truncated = ActivityModel(EnsembleKind.CONTINUOUS, FiniteList(
        tuple((float(k), math.exp(lz)) for k, lz in enumerate(log_z, start=1))))
    crit = exact_criterion(truncated)
    rho_trunc = [c / k ** 3 for k in range(1, K + 1)]
    return Corollary2Report(
        c=c, K=K,
        sum_rho=sum_rho, sum_k_rho=sum_k_rho,
        sum_tail_bound=max(s0.bound, s1.bound),
        truncated_sum_rho=math.fsum(rho_trunc),
        truncated_sum_k_rho=math.fsum(k * r for k, r in enumerate(rho_trunc, start=1)),
        p=p, log_z=log_z,
        in_D_vir=sum_k_rho < 1,
        criterion=crit,
    )
