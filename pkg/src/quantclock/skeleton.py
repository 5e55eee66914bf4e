"""Jump skeletons: simulated realizations of driving subordinators.

Strategy per family:

* infinite-activity laws are cut at a truncation level; jumps above it
  form a compound Poisson process sampled exactly (Poisson count with the
  tail mass as rate, sizes from the normalized tail density), jumps below
  it are replaced by their exact mean as a deterministic drift;
* gamma and inverse-Gaussian driving laws also offer an exact-increment
  grid mode (their increments are exactly samplable), with the kernel
  later evaluated at cell midpoints;
* GGC(theta, R) jumps are gamma jumps carrying an independent R mark,
  and designed laws built by marking reuse the base skeleton with scaled
  sizes.

Everything here is batch-first: the generators take a vector of per-path
horizons and return flat ``(path_id, time, size)`` triples, which is what
keeps 1e5-path Monte Carlo runs in numpy instead of Python loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import DomainError, SamplerStuckError, UnsupportedLawError
from .levy import SubordinatorSpec, quad_checked

__all__ = [
    "JumpSkeleton",
    "sample_jumps",
    "component_jumps",
    "component_drift",
    "component_rate",
]

_CELLS_PER_UNIT = 4096


@dataclass(frozen=True)
class JumpSkeleton:
    """One simulated driving path: jump (time, size) pairs plus drift.

    In grid mode the pairs are (cell midpoint, exact cell increment) and
    ``trunc_level`` is zero.  ``drift`` is the small-jump compensator per
    unit time.
    """

    horizon: float
    times: np.ndarray
    sizes: np.ndarray
    drift: float
    trunc_level: float
    mode: str = "jumps"

    def total(self, t: float) -> float:
        """Value of the driving subordinator itself at time t."""
        if t < 0 or t > self.horizon * (1 + 1e-12):
            raise DomainError("time outside the simulated horizon")
        return float(self.sizes[self.times <= t].sum() + self.drift * t)


# ---------------------------------------------------------------------------
# tail samplers


def _gamma_tail(rng, eps: float, size: int) -> np.ndarray:
    """Sizes from the density ~ s^-1 e^-s on (eps, inf)."""
    out = np.empty(size)
    filled = 0
    if eps >= 1.0:
        while filled < size:
            m = max(2 * (size - filled), 64)
            s = eps + rng.standard_exponential(m)
            acc = s[rng.random(m) < eps / s]
            take = min(size - filled, acc.size)
            out[filled : filled + take] = acc[:take]
            filled += take
        return out
    m1 = math.log(1.0 / eps)
    w1 = m1 / (m1 + math.exp(-1.0))
    while filled < size:
        m = max(int(1.3 * (size - filled)) + 16, 64)
        pick1 = rng.random(m) < w1
        s = np.empty(m)
        k1 = int(pick1.sum())
        s[pick1] = eps ** (1.0 - rng.random(k1))  # log-uniform on (eps, 1)
        s[~pick1] = 1.0 + rng.standard_exponential(m - k1)
        ratio = np.where(pick1, np.exp(-s), 1.0 / s)
        acc = s[rng.random(m) < ratio]
        take = min(size - filled, acc.size)
        out[filled : filled + take] = acc[:take]
        filled += take
    return out


def _gengamma_tail(rng, alpha: float, b: float, eps: float, size: int) -> np.ndarray:
    """Sizes from the density ~ s^(-alpha-1) e^(-b s) on (eps, inf)."""
    out = np.empty(size)
    filled = 0
    guard = 0
    while filled < size:
        m = max(int(1.5 * (size - filled)) + 16, 64)
        s = eps * rng.random(m) ** (-1.0 / alpha)  # Pareto(alpha) above eps
        if b > 0.0:
            with np.errstate(over="ignore"):
                keep = rng.random(m) < np.exp(-b * (s - eps))
            s = s[keep]
        take = min(size - filled, s.size)
        out[filled : filled + take] = s[:take]
        filled += take
        guard += m
        if guard > 200 * (size + 64):
            raise SamplerStuckError("tempered tail rejection stalled")
    return out


def _gamma_tail_mass(eps: float) -> float:
    return float(sp.exp1(eps))


_STRADDLE_SPLIT = 0.5


def _straddle_rate(lt, eps: float) -> float:
    """Mass of s^-1 e^-s (1 - lt(s)) above eps.

    The inner piece is integrated after the substitution u = log(1/s),
    which keeps the quadrature honest even for truncation levels around
    1e-300 (the Cauchy-fraction mixing law needs them: its mass diverges
    only log-log slowly).
    """
    # the transform is often interpolation-backed (~1e-9 noise), so the
    # rate is certified in absolute terms only
    s0 = max(eps, _STRADDLE_SPLIT)
    upper = quad_checked(
        lambda s: math.exp(-s) / s * (1.0 - float(lt(s))), s0, 60.0,
        rel=1e-7, abs_tol=1e-9,
    )
    if eps >= _STRADDLE_SPLIT:
        return upper
    u0, u1 = math.log(1.0 / _STRADDLE_SPLIT), math.log(1.0 / eps)
    mid = quad_checked(
        lambda u: math.exp(-math.exp(-u)) * (1.0 - float(lt(math.exp(-u)))),
        u0,
        u1,
        rel=1e-7,
        abs_tol=1e-9,
    )
    return upper + mid


def _straddle_tail(lt, eps: float, size: int, rng) -> np.ndarray:
    """Sizes from the density ~ s^-1 e^-s (1 - lt(s)) on (eps, inf).

    Two-piece envelope: a log-log-uniform proposal below 1/2 (where the
    bounded combination e^-s (1-lt(s)) log(1/s) makes the acceptance rate
    truncation-independent) and thinned gamma-tail proposals above.
    """
    out = np.empty(size)
    if size == 0:
        return out
    if eps >= _STRADDLE_SPLIT:
        filled = 0
        while filled < size:
            m = max(2 * (size - filled), 64)
            s = _gamma_tail(rng, eps, m)
            acc = s[rng.random(m) < (1.0 - np.asarray(lt(s), float))]
            take = min(size - filled, acc.size)
            out[filled : filled + take] = acc[:take]
            filled += take
        return out
    # piece A: s in (eps, 1/2) via v = log(log(1/s)) uniform
    v0 = math.log(math.log(1.0 / _STRADDLE_SPLIT))
    v1 = math.log(math.log(1.0 / eps))
    vg = np.linspace(v0, v1, 1025)
    sg = np.exp(-np.exp(vg))
    fg = np.exp(-sg) * (1.0 - np.asarray(lt(sg), float)) * np.log(1.0 / sg)
    k_env = 1.25 * float(np.nanmax(fg)) + 1e-12
    mass_a = k_env * (v1 - v0)
    mass_b = _gamma_tail_mass(_STRADDLE_SPLIT)
    w_a = mass_a / (mass_a + mass_b)
    filled = 0
    guard = 0
    while filled < size:
        m = max(2 * (size - filled), 64)
        guard += m
        if guard > 500 * (size + 64):
            raise SamplerStuckError("straddle tail rejection stalled")
        pick_a = rng.random(m) < w_a
        ka = int(pick_a.sum())
        s = np.empty(m)
        ratio = np.empty(m)
        if ka:
            v = v0 + (v1 - v0) * rng.random(ka)
            sa = np.exp(-np.exp(v))
            fa = np.exp(-sa) * (1.0 - np.asarray(lt(sa), float)) * np.log(1.0 / sa)
            if np.any(fa > k_env):
                raise SamplerStuckError("straddle envelope violated")
            s[pick_a] = sa
            ratio[pick_a] = fa / k_env
        if ka < m:
            sb = _gamma_tail(rng, _STRADDLE_SPLIT, m - ka)
            s[~pick_a] = sb
            ratio[~pick_a] = 1.0 - np.asarray(lt(sb), float)
        acc = s[rng.random(m) < ratio]
        take = min(size - filled, acc.size)
        out[filled : filled + take] = acc[:take]
        filled += take
    return out


def _gengamma_tail_mass(alpha: float, b: float, eps: float) -> float:
    # integral of s^(-alpha-1) e^(-bs) over (eps, inf)
    if b == 0.0:
        return eps ** (-alpha) / alpha
    x = b * eps
    upper = (x**-alpha) * math.exp(-x) - sp.gamma(1.0 - alpha) * sp.gammaincc(
        1.0 - alpha, x
    )
    return float(b**alpha * upper / alpha)


# ---------------------------------------------------------------------------
# per-family batch generation


def component_drift(spec: SubordinatorSpec, trunc: float) -> float:
    """Exact mean of the dropped small jumps, per unit time."""
    fam = spec.family
    if fam == "gamma":
        return spec.params["theta"] * -math.expm1(-trunc)
    if fam == "gen_gamma":
        C, a, b = spec.params["C"], spec.params["alpha"], spec.params["b"]
        if b == 0.0:
            return C * trunc ** (1.0 - a) / (1.0 - a)
        return float(
            C * b ** (a - 1.0) * sp.gamma(1.0 - a) * sp.gammainc(1.0 - a, b * trunc)
        )
    if fam == "compound_poisson":
        return 0.0
    if fam == "ggc":
        g = spec.params["ggc"]
        mean_r = g.r_law.mean
        if mean_r is None or not math.isfinite(mean_r):
            raise UnsupportedLawError(
                "GGC jump simulation needs a finite-mean mixing variable"
            )
        return g.theta * mean_r * -math.expm1(-trunc)
    if fam == "straddle":
        lt = spec.params["lt_x"]
        if trunc <= 1e-30:
            return 0.0  # dropped mean is below eps/log(1/eps), numerically zero
        return quad_checked(
            lambda s: math.exp(-s) * (1.0 - float(lt(s))), 0.0, trunc, rel=1e-10
        )
    if fam == "scaled_jumps":
        y = spec.params["y_law"]
        if y.mean is None:
            raise UnsupportedLawError("mark law needs a known mean for the drift")
        return component_drift(spec.components[0], trunc) * y.mean
    if fam == "rate_scaled":
        return spec.params["factor"] * component_drift(spec.components[0], trunc)
    if fam == "sum":
        return sum(component_drift(c, trunc) for c in spec.components)
    raise UnsupportedLawError(f"no simulation route for family {spec.family!r}")


def component_rate(spec: SubordinatorSpec, trunc: float) -> float:
    """Expected jumps per unit time above the truncation level."""
    fam = spec.family
    if fam == "gamma":
        return spec.params["theta"] * _gamma_tail_mass(trunc)
    if fam == "gen_gamma":
        p = spec.params
        return p["C"] * _gengamma_tail_mass(p["alpha"], p["b"], trunc)
    if fam == "compound_poisson":
        return spec.params["rate"]
    if fam == "ggc":
        return spec.params["ggc"].theta * _gamma_tail_mass(trunc)
    if fam == "straddle":
        return _straddle_rate(spec.params["lt_x"], trunc)
    if fam == "scaled_jumps":
        return component_rate(spec.components[0], trunc)
    if fam == "rate_scaled":
        return spec.params["factor"] * component_rate(spec.components[0], trunc)
    if fam == "sum":
        return sum(component_rate(c, trunc) for c in spec.components)
    raise UnsupportedLawError(f"no simulation route for family {spec.family!r}")


def component_jumps(spec: SubordinatorSpec, horizons: np.ndarray, trunc: float, rng):
    """Flat (path_id, time, size) triples for jumps above the truncation level.

    ``horizons`` holds one horizon per path; times are uniform inside
    (0, horizon] as befits a homogeneous Poisson spray.
    """
    horizons = np.asarray(horizons, float)
    fam = spec.family

    if fam == "sum":
        parts = [component_jumps(c, horizons, trunc, rng) for c in spec.components]
        pid = np.concatenate([p[0] for p in parts])
        t = np.concatenate([p[1] for p in parts])
        x = np.concatenate([p[2] for p in parts])
        return pid, t, x

    if fam == "rate_scaled":
        f = spec.params["factor"]
        pid, t, x = component_jumps(spec.components[0], horizons * f, trunc, rng)
        return pid, t / f, x

    if fam == "scaled_jumps":
        pid, t, x = component_jumps(spec.components[0], horizons, trunc, rng)
        marks = np.asarray(spec.params["y_law"].sample(rng, x.size), float)
        return pid, t, x * marks

    if fam == "gamma":
        lam = spec.params["theta"] * _gamma_tail_mass(trunc)
        counts = rng.poisson(lam * horizons)
        total = int(counts.sum())
        pid = np.repeat(np.arange(horizons.size), counts)
        t = horizons[pid] * (1.0 - rng.random(total))
        return pid, t, _gamma_tail(rng, trunc, total)

    if fam == "gen_gamma":
        C, a, b = spec.params["C"], spec.params["alpha"], spec.params["b"]
        lam = C * _gengamma_tail_mass(a, b, trunc)
        counts = rng.poisson(lam * horizons)
        total = int(counts.sum())
        pid = np.repeat(np.arange(horizons.size), counts)
        t = horizons[pid] * (1.0 - rng.random(total))
        return pid, t, _gengamma_tail(rng, a, b, trunc, total)

    if fam == "compound_poisson":
        rate = spec.params["rate"]
        counts = rng.poisson(rate * horizons)
        total = int(counts.sum())
        pid = np.repeat(np.arange(horizons.size), counts)
        t = horizons[pid] * (1.0 - rng.random(total))
        x = np.asarray(spec.params["jump_law"].sample(rng, total), float)
        return pid, t, x

    if fam == "ggc":
        g = spec.params["ggc"]
        lam = g.theta * _gamma_tail_mass(trunc)
        counts = rng.poisson(lam * horizons)
        total = int(counts.sum())
        pid = np.repeat(np.arange(horizons.size), counts)
        t = horizons[pid] * (1.0 - rng.random(total))
        base = _gamma_tail(rng, trunc, total)
        marks = np.asarray(g.r_law.sample(rng, total), float)
        return pid, t, base * marks

    if fam == "straddle":
        lt = spec.params["lt_x"]
        lam = _straddle_rate(lt, trunc)
        counts = rng.poisson(lam * horizons)
        total = int(counts.sum())
        pid = np.repeat(np.arange(horizons.size), counts)
        t = horizons[pid] * (1.0 - rng.random(total))
        return pid, t, _straddle_tail(lt, trunc, total, rng)

    raise UnsupportedLawError(f"no simulation route for family {spec.family!r}")


def _is_ig_family(spec: SubordinatorSpec) -> bool:
    return (
        spec.family == "gen_gamma"
        and spec.params["alpha"] == 0.5
        and spec.params["b"] > 0.0
    )


def _grid_increments(spec: SubordinatorSpec, horizon: float, rng, cells_per_unit: int):
    cells = max(8, int(math.ceil(horizon * cells_per_unit)))
    h = horizon / cells
    mid = (np.arange(cells) + 0.5) * h
    if spec.family == "gamma":
        inc = rng.gamma(spec.params["theta"] * h, 1.0, cells)
        return mid, inc
    if _is_ig_family(spec):
        # rho = C s^{-3/2} e^{-bs}: increments are inverse Gaussian
        C, b = spec.params["C"], spec.params["b"]
        kappa = 2.0 * math.sqrt(math.pi) * C * math.sqrt(b)
        te = kappa * h
        inc = rng.wald(te / 2.0, te * te / 2.0, cells) / b
        return mid, inc
    raise UnsupportedLawError("grid increments exist only for gamma and IG laws")


def sample_jumps(
    spec: SubordinatorSpec,
    horizon: float,
    trunc: float = 1e-6,
    rng=None,
    mode: str = "auto",
    cells_per_unit: int = _CELLS_PER_UNIT,
) -> JumpSkeleton:
    """Simulate one driving path on [0, horizon].

    ``mode`` is ``jumps`` (truncated compound Poisson + drift), ``grid``
    (exact increments; gamma and inverse-Gaussian only) or ``auto``.
    """
    if horizon <= 0:
        raise DomainError("horizon must be positive")
    if rng is None:
        raise DomainError("an explicit rng is required")
    if mode == "auto":
        mode = "grid" if (spec.family == "gamma" or _is_ig_family(spec)) else "jumps"
    if mode == "grid":
        times, sizes = _grid_increments(spec, horizon, rng, cells_per_unit)
        return JumpSkeleton(horizon, times, sizes, 0.0, 0.0, mode="grid")
    if mode != "jumps":
        raise DomainError(f"unknown skeleton mode {mode!r}")
    if trunc <= 0 and spec.rho.infinite_activity:
        raise DomainError("infinite-activity laws need a positive truncation level")
    pid, t, x = component_jumps(spec, np.array([horizon]), trunc, rng)
    order = np.argsort(t, kind="stable")
    drift = component_drift(spec, trunc)
    level = trunc if spec.rho.infinite_activity else 0.0
    return JumpSkeleton(horizon, t[order], x[order], drift, level, mode="jumps")
