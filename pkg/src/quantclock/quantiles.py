"""Quantile functions: the deterministic kernels that clocks are built from.

A quantile function here is a nondecreasing map from [0, 1] to the
nonnegative reals with finite mean.  Closed forms are provided for the
catalog families; anything with only a cdf goes through bracketed
bisection (``invert_cdf``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special as sp

from . import laws
from .errors import DivergenceError, DomainError, InvalidInputError

__all__ = [
    "QuantileFunction",
    "std_quantile",
    "quantile_function",
    "from_law",
    "invert_cdf",
    "shift_decompose",
]

_MEAN_GRID = 20_001


@dataclass(frozen=True)
class QuantileFunction:
    """A nondecreasing kernel u -> Q(u) >= 0 on [0, 1].

    ``lower`` is Q(0) (the shift part of the clock), ``mean`` the integral
    of Q over [0, 1], i.e. the mean of the underlying variable.
    """

    eval: Callable
    lower: float
    mean: float
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, u):
        return self.eval(u)

    def scaled(self, c: float) -> "QuantileFunction":
        if c <= 0:
            raise DomainError("scale must be positive")
        f = self.eval
        return QuantileFunction(
            lambda u: c * f(u), c * self.lower, c * self.mean,
            family=self.family, params={**self.params, "scale": c},
        )


def _check_u(u):
    u = np.asarray(u, float)
    if np.any(u < 0.0) or np.any(u > 1.0):
        raise DomainError("quantile argument must lie in [0, 1]")
    return u


def std_quantile(family: str, params: dict, u):
    """Closed-form quantile of a catalog family, evaluated at u in [0, 1].

    Families: ``power`` (u**(1/delta)), ``arcsine`` (sin^2(pi u/2)),
    ``arcsine_power`` (sin^(2/b)), ``kumaraswamy``, ``stable_ratio``,
    ``occupation``, ``affine_uniform``, ``identity``.  Unbounded families
    return +inf at u = 1; clock simulation never evaluates there because
    jumps land strictly inside the horizon.
    """
    u = _check_u(u)
    if family == "power":
        delta = params["delta"]
        if delta <= 0:
            raise DomainError("power family needs delta > 0")
        return u ** (1.0 / delta)
    if family == "identity":
        return u
    if family == "arcsine":
        return np.sin(math.pi * u / 2.0) ** 2
    if family == "arcsine_power":
        return np.sin(math.pi * u / 2.0) ** (2.0 / params["b"])
    if family == "kumaraswamy":
        return laws.KumaraswamyLaw(params["alpha"], params["b"]).quantile(u)
    if family == "stable_ratio":
        return laws.StableRatioLaw(params["alpha"]).quantile(u)
    if family == "occupation":
        return laws.OccupationLaw(params["alpha"]).quantile(u)
    if family == "affine_uniform":
        return laws.AffineUniformLaw(params["p"]).quantile(u)
    raise DomainError(f"unknown quantile family {family!r}")


def _grid_mean(f) -> float:
    u = np.linspace(0.0, 1.0, _MEAN_GRID)
    vals = np.asarray(f(u), float)
    if not np.all(np.isfinite(vals[:-1])):
        raise InvalidInputError("quantile function is not finite on [0, 1)")
    if np.any(np.diff(vals[:-1]) < -1e-12):
        raise InvalidInputError("quantile function must be nondecreasing")
    if not math.isfinite(vals[-1]):
        # open upper endpoint: integrate the interior trapezoid only
        vals = vals[:-1]
        return float(np.trapezoid(vals, dx=1.0 / (_MEAN_GRID - 1)))
    return float(np.trapezoid(vals, dx=1.0 / (_MEAN_GRID - 1)))


_FAMILY_MEANS = {
    "power": lambda p: p["delta"] / (1.0 + p["delta"]),
    "identity": lambda p: 0.5,
    "arcsine": lambda p: 0.5,
    "arcsine_power": lambda p: float(
        sp.beta(0.5 + 1.0 / p["b"], 0.5) / sp.beta(0.5, 0.5)
    ),
    "kumaraswamy": lambda p: laws.KumaraswamyLaw(p["alpha"], p["b"]).mean,
    "occupation": lambda p: 0.5,
    "affine_uniform": lambda p: 1.0 - p["p"] / 2.0,
}


def quantile_function(family: str, params: dict | None = None) -> QuantileFunction:
    """Catalog quantile as a ``QuantileFunction`` with exact mean and shift."""
    params = dict(params or {})
    f = lambda u, _fam=family, _p=params: std_quantile(_fam, _p, u)
    lower = float(std_quantile(family, params, 0.0))
    if family in _FAMILY_MEANS:
        mean = float(_FAMILY_MEANS[family](params))
    else:
        mean = _grid_mean(f)
    if not math.isfinite(mean):
        raise InvalidInputError("clock kernels need a finite-mean quantile")
    return QuantileFunction(f, lower, mean, family=family, params=params)


def from_law(law: laws.Law, family: str = "law") -> QuantileFunction:
    """Wrap a law exposing a closed-form quantile as a clock kernel."""
    if law.quantile is None:
        raise InvalidInputError("law has no quantile; use invert_cdf instead")
    f = lambda u: np.asarray(law.quantile(_check_u(u)), float)
    mean = law.mean if law.mean is not None else _grid_mean(f)
    if not math.isfinite(mean):
        raise InvalidInputError("clock kernels need a finite-mean quantile")
    return QuantileFunction(f, float(law.quantile(0.0)), float(mean), family=family)


def from_callable(f: Callable, family: str = "custom") -> QuantileFunction:
    """Wrap a raw callable, deriving shift and mean from a dense grid."""
    return QuantileFunction(
        lambda u: np.asarray(f(_check_u(u)), float),
        float(f(0.0)),
        _grid_mean(f),
        family=family,
    )


def invert_cdf(cdf: Callable, u: float, tol: float = 1e-10) -> float:
    """Generalized inverse of a continuous strictly increasing cdf.

    Bracket grown geometrically from [0, 1]; bisection afterwards.  A
    detected non-monotonicity raises, as does bracket growth past 1e12.
    """
    if not 0.0 < u < 1.0:
        raise DomainError("target probability must lie in (0, 1)")
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    lo, hi = 0.0, 1.0
    flo, fhi = cdf(lo), cdf(hi)
    if flo > fhi + 1e-12:
        raise InvalidInputError("cdf is not monotone on the initial bracket")
    while fhi < u:
        lo, flo = hi, fhi
        hi *= 2.0
        if hi > 1e12:
            raise DivergenceError("cdf bracket grew beyond 1e12 without covering u")
        fhi = cdf(hi)
        if fhi < flo - 1e-12:
            raise InvalidInputError("cdf decreased while growing the bracket")
    if flo > u:
        raise InvalidInputError("cdf(0) already exceeds the target probability")
    # bisection: cdf continuity makes |cdf(mid) - u| <= tol achievable
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = cdf(mid)
        if abs(fm - u) <= tol:
            return mid
        if fm < u:
            lo = mid
        else:
            hi = mid
    raise DivergenceError("bisection failed to reach tolerance", achieved=abs(fm - u))


def shift_decompose(q: QuantileFunction) -> tuple[QuantileFunction, float]:
    """Split Q into (Q - Q(0), Q(0)).

    The shifted kernel starts at zero, so the clock it drives decomposes as
    the shifted clock plus ``Q(0)`` times the driving subordinator.
    """
    a = q.lower
    if a == 0.0:
        return q, 0.0
    f = q.eval
    shifted = QuantileFunction(
        lambda u: f(u) - a, 0.0, q.mean - a,
        family=q.family, params={**q.params, "shift_removed": a},
    )
    return shifted, a
