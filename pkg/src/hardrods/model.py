"""Activity families and the Dirichlet-type series g(theta).

Every model is a (kind, family) pair.  The family fixes the rod lengths
``l_k`` and activities ``z_k``; the kind says whether rods live on the
real line or on the integer lattice.  The central object is

    g(theta) = sum_k z_k exp(theta * l_k)

together with its derivatives and its abscissa of convergence
``theta* = sup{theta : g(theta) < inf}``.  Infinite families are summed with
a certified remainder so that ``eval_g`` returns an enclosure rather than a
bare float.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np

from .errors import DivergentSeries, InfiniteAbscissa, SchemaError

__all__ = [
    "EnsembleKind",
    "FiniteList",
    "PowerLawExp",
    "StretchedExp",
    "Scaled",
    "ActivityModel",
    "TailBound",
    "eval_g",
    "abscissa",
    "boundary_values",
    "model_from_dict",
    "model_to_dict",
    "load_model",
]

DEFAULT_TOL = 1e-12
MAX_TERMS = 1 << 22


class EnsembleKind(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class FiniteList:
    """Finitely many species given as ``(length, z)`` pairs.

    Entries with ``z == 0`` are dropped on construction.
    """

    entries: tuple = ()

    def __post_init__(self):
        cleaned = []
        for length, z in self.entries:
            length = float(length)
            z = float(z)
            if not (math.isfinite(length) and length >= 0):
                raise SchemaError(f"rod length must be finite and >= 0, got {length}")
            if not (math.isfinite(z) and z >= 0):
                raise SchemaError(f"activity must be finite and >= 0, got {z}")
            if z > 0:
                cleaned.append((length, z))
        object.__setattr__(self, "entries", tuple(cleaned))


@dataclass(frozen=True)
class PowerLawExp:
    """Lattice lengths ``l_k = k`` with ``z_k = C k^-beta exp(-kappa k)``."""

    C: float = 1.0
    beta: float = 0.0
    kappa: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.C) and self.C >= 0):
            raise SchemaError("C must be finite and >= 0")
        if not (math.isfinite(self.beta) and math.isfinite(self.kappa)):
            raise SchemaError("beta and kappa must be finite")


@dataclass(frozen=True)
class StretchedExp:
    """Lattice lengths ``l_k = k`` with ``z_k = exp(k mu - sqrt(k))``."""

    mu: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise SchemaError("mu must be finite")


@dataclass(frozen=True)
class Scaled:
    """Multiply every activity of ``base`` by ``t``."""

    t: float
    base: "Family"

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0):
            raise SchemaError("scale factor t must be finite and >= 0")
        if not isinstance(self.base, (FiniteList, PowerLawExp, StretchedExp, Scaled)):
            raise SchemaError("Scaled.base must be an activity family")


Family = Union[FiniteList, PowerLawExp, StretchedExp, Scaled]


def _unwrap(family):
    t = 1.0
    while isinstance(family, Scaled):
        t *= family.t
        family = family.base
    return t, family


@dataclass(frozen=True)
class ActivityModel:
    kind: EnsembleKind
    family: Family

    def __post_init__(self):
        object.__setattr__(self, "kind", EnsembleKind(self.kind))
        if not isinstance(self.family, (FiniteList, PowerLawExp, StretchedExp, Scaled)):
            raise SchemaError(f"unknown activity family {self.family!r}")
        _, base = _unwrap(self.family)
        if self.kind is EnsembleKind.DISCRETE and isinstance(base, FiniteList):
            for length, _ in base.entries:
                if length < 1 or length != int(length):
                    raise SchemaError(
                        f"discrete rods need integer lengths >= 1, got {length}")

    @property
    def is_finite(self) -> bool:
        return isinstance(_unwrap(self.family)[1], FiniteList)

    @property
    def scale(self) -> float:
        return _unwrap(self.family)[0]

    @property
    def base(self):
        return _unwrap(self.family)[1]

    def entries(self) -> list[tuple[float, float]]:
        """(length, z) pairs of a finite model with the scale applied."""
        t, base = _unwrap(self.family)
        if not isinstance(base, FiniteList):
            raise TypeError("entries() needs a FiniteList model; use truncated(K)")
        if t == 0:
            return []
        return [(length, t * z) for length, z in base.entries]

    def species(self) -> dict[int, tuple[float, float]]:
        """Map species key -> (length, z); keys are 1-based entry positions."""
        return {i + 1: e for i, e in enumerate(self.entries())}

    def activity(self, k: int) -> float:
        """Activity of species ``k`` of a lattice family (``l_k = k``)."""
        t, base = _unwrap(self.family)
        if isinstance(base, FiniteList):
            raise TypeError("activity(k) is for lattice families")
        if t == 0 or not _lattice_nonzero(base):
            return 0.0
        return math.exp(math.log(t) + float(_lattice_logz(base, np.array([float(k)]))[0]))

    def truncated(self, K: int) -> "ActivityModel":
        """FiniteList stand-in keeping species ``k <= K`` of a lattice family."""
        if self.is_finite:
            return self
        return ActivityModel(self.kind, FiniteList(
            tuple((float(k), self.activity(k)) for k in range(1, K + 1))))

    @property
    def is_zero(self) -> bool:
        t, base = _unwrap(self.family)
        if t == 0:
            return True
        if isinstance(base, FiniteList):
            return not base.entries
        return not _lattice_nonzero(base)


@dataclass(frozen=True)
class TailBound:
    """Enclosure ``[value, value + bound]`` of a (possibly infinite) sum."""

    value: float
    bound: float = 0.0
    terms_used: int = 0

    @property
    def upper(self) -> float:
        return self.value + self.bound

    @property
    def mid(self) -> float:
        return self.value + 0.5 * self.bound

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


def _lattice_nonzero(base) -> bool:
    return not (isinstance(base, PowerLawExp) and base.C == 0)


def _lattice_logz(base, k: np.ndarray) -> np.ndarray:
    if isinstance(base, PowerLawExp):
        return math.log(base.C) - base.beta * np.log(k) - base.kappa * k
    return base.mu * k - np.sqrt(k)


def abscissa(model: ActivityModel) -> float:
    """Abscissa of convergence theta* (``math.inf`` when g is entire)."""
    t, base = _unwrap(model.family)
    if model.is_zero or isinstance(base, FiniteList):
        return math.inf
    if isinstance(base, PowerLawExp):
        return float(base.kappa)
    return -float(base.mu)


def _boundary_converges(base, order: int) -> bool:
    if isinstance(base, PowerLawExp):
        # terms C k^(order - beta): p-series test
        return order - base.beta < -1
    return True  # k^m exp(-sqrt k) is summable for every m


def _stretched_tail(K: float, m: int) -> float:
    """Upper bound of sum_{k>K} k^m exp(-sqrt k); valid for K >= (2m)^2."""
    u = math.sqrt(K)
    n = 2 * m + 1
    poly = math.fsum(u ** j / math.factorial(j) for j in range(n + 1))
    return 2.0 * math.factorial(n) * math.exp(-u) * poly


def _lattice_sum(logterm: Callable[[np.ndarray], np.ndarray],
                 tail: Callable[[int], float], tol: float,
                 max_terms: int) -> TailBound:
    parts = []
    K = 0
    chunk = 256
    bound = math.inf
    while True:
        k = np.arange(K + 1, K + chunk + 1, dtype=float)
        with np.errstate(over="ignore"):
            parts.append(float(np.sum(np.exp(logterm(k)))))
        K += chunk
        bound = tail(K)
        if bound < tol or K >= max_terms:
            break
        chunk = min(2 * chunk, max_terms - K)
    return TailBound(math.fsum(parts), bound, K)


def _eval_finite(model: ActivityModel, theta: float, order: int) -> TailBound:
    terms = []
    for length, z in model.entries():
        if order and length == 0:
            continue
        try:
            terms.append(z * length ** order * math.exp(theta * length))
        except OverflowError:
            return TailBound(math.inf, 0.0, len(terms))
    return TailBound(math.fsum(terms), 0.0, len(terms))


def eval_g(model: ActivityModel, theta: float, order: int = 0,
           tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS) -> TailBound:
    """Enclose ``g^(order)(theta) = sum_k l_k^order z_k exp(theta l_k)``.

    Finite models are summed exactly (``bound == 0``).  Lattice families are
    summed until the certified remainder drops below ``tol``, or until
    ``max_terms`` species have been used, in which case the larger bound is
    returned as is.

    Raises
    ------
    DivergentSeries
        If ``theta > theta*``, or ``theta == theta*`` and the boundary series
        diverges.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    if model.is_zero:
        return TailBound(0.0, 0.0, 0)
    if model.is_finite:
        return _eval_finite(model, theta, order)

    t, base = _unwrap(model.family)
    theta_star = abscissa(model)
    if theta > theta_star:
        raise DivergentSeries(f"theta={theta} exceeds the abscissa {theta_star}")
    s = theta - theta_star
    log_t = math.log(t)
    m = order

    def logterm(k):
        return log_t + m * np.log(k) + theta * k + _lattice_logz(base, k)

    if s == 0 and not _boundary_converges(base, order):
        raise DivergentSeries(f"g^({order}) diverges at the abscissa {theta_star}")

    if isinstance(base, PowerLawExp):
        gamma = m - base.beta
        pref = t * base.C
        r = math.exp(s)

        def tail(K):
            best = math.inf
            if s < 0:
                q = r * ((K + 2) / (K + 1)) ** max(gamma, 0.0)
                if q < 1:
                    t_next = math.exp(math.log(pref) + gamma * math.log(K + 1) + s * (K + 1))
                    best = t_next / (1 - q)
            if gamma < -1:
                best = min(best, pref * K ** (gamma + 1) / -(gamma + 1))
            return best

        if s == 0:
            # sandwich the p-series tail between the two integrals
            c = pref / -(gamma + 1)

            def tail_width(K):
                return c * (K ** (gamma + 1) - (K + 1) ** (gamma + 1))

            tb = _lattice_sum(logterm, tail_width, tol, max_terms)
            lower = c * (tb.terms_used + 1) ** (gamma + 1)
            return TailBound(tb.value + lower, tb.bound, tb.terms_used)
        return _lattice_sum(logterm, tail, tol, max_terms)

    # StretchedExp
    k_mono = 4 * m * m
    r = math.exp(s)

    def tail(K):
        best = math.inf
        if K >= k_mono:
            best = t * _stretched_tail(K, m)
        if s < 0:
            q = r * ((K + 2) / (K + 1)) ** m
            if q < 1:
                t_next = math.exp(logterm(np.array([K + 1.0]))[0])
                best = min(best, t_next / (1 - q))
        return best

    return _lattice_sum(logterm, tail, tol, max_terms)


def boundary_values(model: ActivityModel, tol: float = DEFAULT_TOL):
    """``(g(theta*), g'(theta*))`` as TailBounds; a divergent limit has value inf.

    Convergence at the boundary is decided per family by a p-series test, not
    numerically.
    """
    theta_star = abscissa(model)
    if math.isinf(theta_star):
        raise InfiniteAbscissa("theta* = +inf; the model is fluid for every activity scale")
    out = []
    for order in (0, 1):
        try:
            out.append(eval_g(model, theta_star, order, tol=tol))
        except DivergentSeries:
            out.append(TailBound(math.inf, 0.0, 0))
    return tuple(out)


# -- JSON schema ---------------------------------------------------------------

def _family_from_dict(d):
    if not isinstance(d, dict) or "type" not in d:
        raise SchemaError("family must be an object with a 'type' field")
    kind = d["type"]
    try:
        if kind == "finite":
            entries = d.get("entries", [])
            if not isinstance(entries, list):
                raise SchemaError("'entries' must be a list")
            return FiniteList(tuple((float(e["length"]), float(e["z"])) for e in entries))
        if kind == "power_law_exp":
            return PowerLawExp(float(d["C"]), float(d["beta"]), float(d["kappa"]))
        if kind == "stretched_exp":
            return StretchedExp(float(d["mu"]))
        if kind == "scaled":
            return Scaled(float(d["t"]), _family_from_dict(d["base"]))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed {kind!r} family: missing or bad field {exc}") from exc
    raise SchemaError(f"unknown family type {kind!r}")


def model_from_dict(d) -> ActivityModel:
    """Build a model from the JSON object used by the command line."""
    if not isinstance(d, dict):
        raise SchemaError("model must be a JSON object")
    kind = d.get("kind")
    if kind not in ("continuous", "discrete"):
        raise SchemaError("'kind' must be 'continuous' or 'discrete'")
    if "family" not in d:
        raise SchemaError("missing 'family'")
    return ActivityModel(EnsembleKind(kind), _family_from_dict(d["family"]))


def _family_to_dict(f):
    if isinstance(f, FiniteList):
        return {"type": "finite",
                "entries": [{"length": l, "z": z} for l, z in f.entries]}
    if isinstance(f, PowerLawExp):
        return {"type": "power_law_exp", "C": f.C, "beta": f.beta, "kappa": f.kappa}
    if isinstance(f, StretchedExp):
        return {"type": "stretched_exp", "mu": f.mu}
    return {"type": "scaled", "t": f.t, "base": _family_to_dict(f.base)}


def model_to_dict(model: ActivityModel) -> dict:
    return {"kind": model.kind.value, "family": _family_to_dict(model.family)}


def load_model(path) -> ActivityModel:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    return model_from_dict(data)
