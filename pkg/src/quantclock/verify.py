"""Statistical machinery for the distributional identities.

Two instruments: empirical Laplace transforms compared against analytic
exponents (with per-frequency standard errors), and the two-sample
Kolmogorov-Smirnov test with the asymptotic tail probability.  Acceptance
thresholds sit at p > 0.001 so that, with the identities exact, only
gross implementation errors trip the battery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

__all__ = [
    "empirical_lt",
    "LTReport",
    "lt_match",
    "KS2Result",
    "ks2",
    "kolmogorov_sf",
    "DEFAULT_OMEGA_GRID",
]

DEFAULT_OMEGA_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)


def empirical_lt(samples, omega_grid=DEFAULT_OMEGA_GRID):
    """Mean of exp(-w X) per frequency, with standard errors.

    A single sample yields SE = nan (undefined), not zero.
    """
    x = np.asarray(samples, float)
    if x.size == 0:
        raise DomainError("empty sample")
    if np.any(x < 0):
        raise DomainError("Laplace transforms need nonnegative samples")
    w = np.asarray(omega_grid, float)
    vals = np.empty(w.size)
    ses = np.empty(w.size)
    for i, wi in enumerate(w):
        e = np.exp(-wi * x)
        vals[i] = e.mean()
        ses[i] = e.std(ddof=1) / math.sqrt(x.size) if x.size > 1 else math.nan
    return vals, ses


@dataclass(frozen=True)
class LTReport:
    """Empirical-vs-analytic transform comparison.

    Passes iff the worst relative error is below ``tol`` and every
    deviation sits within 4 standard errors.
    """

    omega: np.ndarray
    empirical: np.ndarray
    se: np.ndarray
    analytic: np.ndarray
    tol: float

    @property
    def rel_err(self) -> np.ndarray:
        return np.abs(self.empirical - self.analytic) / np.abs(self.analytic)

    @property
    def max_rel_err(self) -> float:
        return float(self.rel_err.max())

    @property
    def passed(self) -> bool:
        dev_ok = np.all(
            np.abs(self.empirical - self.analytic)
            <= 4.0 * np.where(np.isnan(self.se), np.inf, self.se) + 1e-15
        )
        return bool(self.max_rel_err <= self.tol and dev_ok)

    def to_dict(self) -> dict:
        return {
            "omega": [float(v) for v in self.omega],
            "empirical": [float(v) for v in self.empirical],
            "se": [float(v) for v in self.se],
            "analytic": [float(v) for v in self.analytic],
            "max_rel_err": self.max_rel_err,
            "tol": self.tol,
            "passed": self.passed,
        }


def lt_match(samples, psi, t: float, omega_grid=DEFAULT_OMEGA_GRID, tol: float = 0.02) -> LTReport:
    """Compare the empirical transform of samples against exp(-t psi(w)).

    ``psi`` may be a LaplaceExponent or any callable on frequencies.
    """
    if np.asarray(samples).size < 1000:
        raise DomainError("transform matching needs at least 1000 samples")
    w = np.asarray(omega_grid, float)
    emp, ses = empirical_lt(samples, w)
    fn = psi.eval if hasattr(psi, "eval") else psi
    ana = np.array([math.exp(-t * float(fn(wi))) for wi in w])
    return LTReport(w, emp, ses, ana, tol)


def kolmogorov_sf(lam: float, terms: int = 25) -> float:
    """Tail of the Kolmogorov distribution, Q(lam) = P(K > lam).

    Alternating tail sum for lam >= 1; Jacobi-theta dual series below,
    where the direct sum converges too slowly.  ``terms`` >= 20 keeps the
    truncation error far below any threshold used here.
    """
    if lam <= 0:
        return 1.0
    if lam >= 1.0:
        k = np.arange(1, terms + 1)
        return float(np.clip(2.0 * np.sum((-1.0) ** (k - 1) * np.exp(-2.0 * k * k * lam * lam)), 0.0, 1.0))
    j = np.arange(1, 2 * terms, 2)  # odd indices
    s = np.sum(np.exp(-(j * j) * math.pi * math.pi / (8.0 * lam * lam)))
    return float(np.clip(1.0 - math.sqrt(2.0 * math.pi) / lam * s, 0.0, 1.0))


class KS2Result(NamedTuple):
    statistic: float
    p_value: float
    tie_warning: bool


def ks2(a, b) -> KS2Result:
    """Two-sample Kolmogorov-Smirnov statistic with asymptotic p-value.

    Flags (rather than fails) heavily tied data, where the asymptotic
    distribution is a poor reference.
    """
    a = np.sort(np.asarray(a, float))
    b = np.sort(np.asarray(b, float))
    m, n = a.size, b.size
    if m < 100 or n < 100:
        raise DomainError("each sample needs at least 100 points")
    pooled = np.concatenate([a, b])
    _, counts = np.unique(pooled, return_counts=True)
    tie_frac = counts[counts > 1].sum() / pooled.size
    grid = np.sort(pooled, kind="mergesort")
    cdf_a = np.searchsorted(a, grid, side="right") / m
    cdf_b = np.searchsorted(b, grid, side="right") / n
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = math.sqrt(m * n / (m + n))
    return KS2Result(d, kolmogorov_sf(en * d), tie_frac > 0.5)
