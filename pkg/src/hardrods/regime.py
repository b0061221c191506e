"""Regime classification, pressure, packing fraction and the rate function.

In the continuous ensemble the pressure is the root ``p > -theta*`` of

    p = sum_k z_k exp(-p l_k)                        (fluid)

and ``p = -theta*`` when that equation has no such root (close packing /
transition).  On the lattice the fixed point equation reads

    1 - exp(-p) = sum_k z_k exp(-k p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from ._roots import expand_down, expand_up, solve_increasing
from .errors import DivergentSeries, DomainError, Unstable
from .model import ActivityModel, EnsembleKind, abscissa, eval_g

__all__ = [
    "RegimeKind",
    "Regime",
    "FixedPointSolution",
    "classify",
    "pressure",
    "packing_fraction",
    "legendre_phi",
    "rate_function",
]

TRANSITION_WIDTH = 1e-10


class RegimeKind(str, Enum):
    FLUID = "fluid"
    CLOSE_PACKING = "close_packing"
    TRANSITION = "transition"


@dataclass(frozen=True)
class Regime:
    """Outcome of ``classify``.

    ``gap`` encloses g(theta*) + theta* (continuous) or
    g(theta*) - 1 + exp(theta*) (discrete); its sign decides the regime.
    ``indeterminate`` is set for a Transition whose enclosure is not the
    single point 0, i.e. the tie could not be certified exactly.
    """

    kind: RegimeKind
    theta_star: float
    boundary_g: float
    gap: tuple[float, float]
    indeterminate: bool = False

    @property
    def is_fluid(self) -> bool:
        return self.kind is RegimeKind.FLUID


@dataclass(frozen=True)
class FixedPointSolution:
    p: float
    residual: float
    bracket: tuple[float, float]
    iterations: int
    regime: Regime


def _g_or_inf(model, theta, order=0):
    try:
        return eval_g(model, theta, order)
    except DivergentSeries:
        return None


def classify(model: ActivityModel, width: float = TRANSITION_WIDTH) -> Regime:
    theta_star = abscissa(model)
    if theta_star == -math.inf:
        raise Unstable("g(theta) is infinite for every theta")
    if math.isinf(theta_star):
        limit = 0.0 if model.is_zero else math.inf
        return Regime(RegimeKind.FLUID, theta_star, limit, (math.inf, math.inf))

    tb = _g_or_inf(model, theta_star)
    if tb is None or tb.is_infinite:
        return Regime(RegimeKind.FLUID, theta_star, math.inf, (math.inf, math.inf))
    if model.kind is EnsembleKind.CONTINUOUS:
        shift = theta_star
    else:
        shift = math.expm1(theta_star)  # g - (1 - e^theta) = g + (e^theta - 1)
    lo, hi = tb.value + shift, tb.upper + shift
    if lo > width:
        kind = RegimeKind.FLUID
    elif hi < -width:
        kind = RegimeKind.CLOSE_PACKING
    else:
        kind = RegimeKind.TRANSITION
    indeterminate = kind is RegimeKind.TRANSITION and not (lo == 0 == hi)
    return Regime(kind, theta_star, tb.value, (lo, hi), indeterminate)


def _fixed_point_map(model):
    """phi(p) (nondecreasing) and phi'(p) whose root is the fluid pressure."""
    continuous = model.kind is EnsembleKind.CONTINUOUS

    def phi(p):
        tb = _g_or_inf(model, -p)
        if tb is None:
            return -math.inf
        lhs = p if continuous else -math.expm1(-p)
        return lhs - tb.mid

    def dphi(p):
        tb = _g_or_inf(model, -p, 1)
        if tb is None:
            return math.inf
        return (1.0 if continuous else math.exp(-p)) + tb.mid

    return phi, dphi


def pressure(model: ActivityModel) -> FixedPointSolution:
    """Pressure from the fixed point equation of the model's ensemble.

    The smallest admissible pressure is ``max(0, -theta*)``; from there the
    bracket is widened by doubling until the map changes sign, then bisected.
    """
    regime = classify(model)
    if not regime.is_fluid:
        p = -regime.theta_star
        return FixedPointSolution(p, 0.0, (p, p), 0, regime)

    phi, dphi = _fixed_point_map(model)
    p_lo = max(0.0, -regime.theta_star)
    f_lo = phi(p_lo)
    if f_lo == 0:
        return FixedPointSolution(p_lo, 0.0, (p_lo, p_lo), 0, regime)
    p_hi = expand_up(phi, p_lo)
    if p_hi is None:
        raise Unstable("could not bracket the pressure")
    p, bracket, it = solve_increasing(phi, p_lo, p_hi, dphi)
    return FixedPointSolution(p, phi(p), bracket, it, regime)


def packing_fraction(model: ActivityModel) -> float:
    """Limiting fraction of the volume covered by rods.

    Fluid: ``u / (1 + u)`` (continuous) or ``u / (exp(-p) + u)`` (lattice)
    with ``u = g'(-p)``.  Close packing gives 1.  In the transition regime the
    value returned is the saturation fraction sigma* of the fluid branch; the
    grand-canonical law may put mass anywhere in [sigma*, 1] there.
    """
    if model.is_zero:
        return 0.0
    sol = pressure(model)
    kind = sol.regime.kind
    if kind is RegimeKind.CLOSE_PACKING:
        return 1.0
    if kind is RegimeKind.FLUID:
        theta = -sol.p
        tb = eval_g(model, theta, 1)
        u = tb.mid
    else:
        theta = sol.regime.theta_star
        tb = _g_or_inf(model, theta, 1)
        if tb is None or tb.is_infinite:
            return 1.0
        u = tb.mid
    free = 1.0 if model.kind is EnsembleKind.CONTINUOUS else math.exp(theta)
    return u / (free + u)


def legendre_phi(model: ActivityModel, u: float) -> float:
    """Convex conjugate ``sup_theta [theta u - g(theta)]``.

    Below ``u* = g'(theta*)`` the supremum sits at the root of
    ``g'(theta) = u``; above it the conjugate is affine with slope theta*.
    Returns ``inf`` when g' vanishes identically (no rod has positive length
    and activity).
    """
    if not u > 0:
        raise DomainError(f"legendre_phi needs u > 0, got {u}")
    if model.is_zero:
        return math.inf
    if model.is_finite and all(l == 0 for l, _ in model.entries()):
        return math.inf

    theta_star = abscissa(model)
    if math.isfinite(theta_star):
        d_star = _g_or_inf(model, theta_star, 1)
        u_star = math.inf if d_star is None else d_star.mid
        if u >= u_star:
            return theta_star * u - eval_g(model, theta_star).mid

    def psi(theta):
        tb = _g_or_inf(model, theta, 1)
        return math.inf if tb is None else tb.mid - u

    def dpsi(theta):
        return eval_g(model, theta, 2).mid

    if math.isfinite(theta_star):
        hi = theta_star
    else:
        hi = expand_up(psi, 0.0)
        if hi is None:
            return math.inf
    lo = expand_down(psi, min(hi, 0.0))
    theta, _, _ = solve_increasing(psi, lo, hi, dpsi)
    return theta * u - eval_g(model, theta).mid


def rate_function(model: ActivityModel, sigma: float) -> float:
    """Large-deviation function ``I(sigma) = (1 - sigma) phi(sigma / (1 - sigma))``.

    Its minimum over (0, 1) is ``-p``.  Only the continuous ensemble is
    covered.
    """
    if not 0 < sigma < 1:
        raise DomainError(f"sigma must lie in (0, 1), got {sigma}")
    if model.kind is not EnsembleKind.CONTINUOUS:
        raise DomainError("the rate function is implemented for the continuous ensemble")
    return (1 - sigma) * legendre_phi(model, sigma / (1 - sigma))
