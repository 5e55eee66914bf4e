"""Clock evaluation: kernels applied to jump skeletons, paths and prices.

A quantile clock weighs every driving jump at time s by the kernel
Q((1 - s/t)+); one skeleton therefore serves every output time t up to
its horizon, which is what makes the clock a genuine path.  The module
also covers the short-memory kernel min(1, (t-s)+/eps), clock
composition, time-changed Brownian price paths, and the batch terminal
samplers used by the distributional test batteries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError
from .levy import SubordinatorSpec
from .quantiles import QuantileFunction
from .skeleton import (
    JumpSkeleton,
    component_drift,
    component_jumps,
    component_rate,
    sample_jumps,
)

__all__ = [
    "ClockPath",
    "PricePath",
    "clock_value",
    "clock_path",
    "short_memory_value",
    "compose",
    "log_price_path",
    "sample_clock_terminal",
    "sample_subordinator_terminal",
    "sample_short_memory_terminal",
    "sample_compose_terminal",
]

_BLOCK_ROWS = 4_000_000


@dataclass(frozen=True)
class ClockPath:
    """Clock values on an increasing grid; value at time 0 is 0."""

    times: np.ndarray
    values: np.ndarray
    kernel: QuantileFunction
    spec: SubordinatorSpec | None = None

    def __post_init__(self):
        if np.any(np.diff(self.values) < -1e-12):
            raise InvalidInputError("clock path must be nondecreasing")

    def to_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("time,value\n")
            for t, v in zip(self.times, self.values):
                fh.write(f"{t:.17g},{v:.17g}\n")

    def summary(self) -> dict:
        v = self.values
        return {
            "n": int(v.size),
            "terminal": float(v[-1]),
            "mean": float(v.mean()),
            "variance": float(v.var(ddof=1)) if v.size > 1 else 0.0,
        }


@dataclass(frozen=True)
class PricePath:
    """Log prices on a grid under the risk-neutral time-changed model."""

    times: np.ndarray
    log_prices: np.ndarray
    mu: float
    sigma: float
    rate: float
    spot: float

    @property
    def prices(self) -> np.ndarray:
        return np.exp(self.log_prices)

    def to_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("time,value\n")
            for t, v in zip(self.times, self.prices):
                fh.write(f"{t:.17g},{v:.17g}\n")


def clock_value(q: QuantileFunction, skel: JumpSkeleton, t: float) -> float:
    """Clock at time t: sum of Q((1-s/t)+) weighted jumps plus drift part.

    The drift compensator integrates the kernel exactly: its contribution
    is drift * t * mean(Q), because the kernel's time average is E[R].
    """
    if t < 0 or t > skel.horizon * (1 + 1e-12):
        raise DomainError("clock time must lie within the skeleton horizon")
    if t == 0:
        return 0.0
    u = 1.0 - skel.times / t
    mask = u > 0.0
    val = float(np.sum(np.asarray(q.eval(u[mask]), float) * skel.sizes[mask]))
    return val + skel.drift * t * q.mean


def clock_path(q: QuantileFunction, skel: JumpSkeleton, grid) -> ClockPath:
    """Clock values along an increasing grid inside (0, horizon]."""
    grid = np.asarray(grid, float)
    if grid.ndim == 0:
        grid = grid[None]
    if np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    vals = np.array([clock_value(q, skel, float(t)) for t in grid])
    return ClockPath(grid, vals, q)


def short_memory_value(eps: float, skel: JumpSkeleton, t: float) -> float:
    """Convoluted subordinator with kernel min(1, (t-s)+/eps).

    The drift part uses the exact kernel integral: t^2/(2 eps) for
    t <= eps and t - eps/2 beyond.
    """
    if eps <= 0:
        raise DomainError("memory width must be positive")
    if t < 0 or t > skel.horizon * (1 + 1e-12):
        raise DomainError("time must lie within the skeleton horizon")
    if t == 0:
        return 0.0
    w = np.minimum(1.0, np.maximum(t - skel.times, 0.0) / eps)
    kernel_area = t * t / (2.0 * eps) if t <= eps else t - eps / 2.0
    return float(np.sum(w * skel.sizes)) + skel.drift * kernel_area


def log_price_path(
    clock: ClockPath, mu: float, sigma: float, rate: float, spot: float, rng
) -> PricePath:
    """Risk-neutral price S(t) = spot * exp(r t + W_mu(sigma^2 T(t))).

    W_mu is Brownian motion with drift mu run on the business time scale;
    mu = -1/2 makes the discounted price a martingale.
    """
    if sigma <= 0:
        raise DomainError("volatility scale must be positive")
    dT = np.diff(np.concatenate([[0.0], clock.values]))
    if np.any(dT < -1e-12):
        raise InvalidInputError("clock path must be nondecreasing")
    dT = np.maximum(dT, 0.0)
    var = sigma * sigma * dT
    dW = rng.standard_normal(dT.size) * np.sqrt(var) + mu * var
    logs = math.log(spot) + rate * clock.times + np.cumsum(dW)
    return PricePath(clock.times, logs, mu, sigma, rate, spot)


def compose(
    outer: tuple[QuantileFunction, SubordinatorSpec],
    inner: tuple[QuantileFunction, SubordinatorSpec],
    t: float,
    rng,
    trunc: float = 1e-6,
) -> float:
    """One draw of the composed clock: outer run up to the inner clock's value.

    The outer skeleton is re-simulated on the realized inner horizon, which
    is exactly the conditioning the composition law rests on.
    """
    q_in, spec_in = inner
    skel_in = sample_jumps(spec_in, t, trunc=trunc, rng=rng, mode="jumps")
    tau = clock_value(q_in, skel_in, t)
    if tau <= 0.0:
        return 0.0
    q_out, spec_out = outer
    skel_out = sample_jumps(spec_out, tau, trunc=trunc, rng=rng, mode="jumps")
    return clock_value(q_out, skel_out, tau)


# ---------------------------------------------------------------------------
# batch terminal samplers


def _block_size(horizons: np.ndarray, rate: float) -> int:
    mean_rows = max(float(np.mean(horizons)) * max(rate, 1e-12), 1e-9)
    return max(64, min(int(_BLOCK_ROWS / mean_rows), horizons.size))


def _terminal_weighted(spec, horizons, rng, trunc, weight_fn, kernel_area_fn):
    """Shared engine: sum of weight(s_i, horizon) * jump + drift * area."""
    horizons = np.asarray(horizons, float)
    n = horizons.size
    out = np.zeros(n)
    drift = component_drift(spec, trunc)
    if drift:
        out += drift * kernel_area_fn(horizons)
    block = _block_size(horizons, component_rate(spec, trunc))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        pid, times, sizes = component_jumps(spec, horizons[lo:hi], trunc, rng)
        if pid.size:
            w = weight_fn(times, horizons[lo:hi][pid])
            out[lo:hi] += np.bincount(pid, weights=w * sizes, minlength=hi - lo)
    return out


def sample_clock_terminal(
    q: QuantileFunction, spec: SubordinatorSpec, t, n: int | None, rng, trunc: float = 1e-6
) -> np.ndarray:
    """n terminal clock values T(t); ``t`` may be a per-path horizon vector."""
    horizons = np.full(n, float(t)) if np.isscalar(t) else np.asarray(t, float)
    if np.any(horizons < 0):
        raise DomainError("horizons must be nonnegative")
    pos = horizons > 0
    out = np.zeros(horizons.size)
    if not np.any(pos):
        return out

    def weight(times, hs):
        u = 1.0 - times / hs
        np.maximum(u, 0.0, out=u)
        return np.asarray(q.eval(u), float)

    out[pos] = _terminal_weighted(
        spec, horizons[pos], rng, trunc, weight, lambda h: h * q.mean
    )
    return out


def sample_subordinator_terminal(
    spec: SubordinatorSpec, t: float, n: int, rng, trunc: float = 1e-6
) -> np.ndarray:
    """n draws of the driving subordinator itself at time t (kernel = 1)."""
    if t <= 0:
        raise DomainError("time must be positive")
    horizons = np.full(n, float(t))
    return _terminal_weighted(
        spec, horizons, rng, trunc, lambda times, hs: np.ones(times.size), lambda h: h
    )


def sample_short_memory_terminal(
    eps: float, spec: SubordinatorSpec, t: float, n: int, rng, trunc: float = 1e-6
) -> np.ndarray:
    """n terminal values of the short-memory convoluted subordinator."""
    if eps <= 0 or t <= 0:
        raise DomainError("memory width and time must be positive")
    horizons = np.full(n, float(t))
    area = t * t / (2.0 * eps) if t <= eps else t - eps / 2.0

    def weight(times, hs):
        return np.minimum(1.0, np.maximum(hs - times, 0.0) / eps)

    return _terminal_weighted(
        spec, horizons, rng, trunc, weight, lambda h: np.full(h.size, area)
    )


def sample_compose_terminal(
    outer: tuple[QuantileFunction, SubordinatorSpec],
    inner: tuple[QuantileFunction, SubordinatorSpec],
    t: float,
    n: int,
    rng,
    trunc: float = 1e-6,
) -> np.ndarray:
    """n draws of the composed clock at time t (vectorized two-stage run)."""
    q_in, spec_in = inner
    tau = sample_clock_terminal(q_in, spec_in, t, n, rng, trunc=trunc)
    q_out, spec_out = outer
    return sample_clock_terminal(q_out, spec_out, tau, None, rng, trunc=trunc)


def terminal_summary_json(samples: np.ndarray, path: str, meta: dict | None = None) -> None:
    """JSON summary of terminal draws: moments plus the samples themselves."""
    samples = np.asarray(samples, float)
    payload = {
        "n": int(samples.size),
        "mean": float(samples.mean()),
        "variance": float(samples.var(ddof=1)) if samples.size > 1 else 0.0,
        "min": float(samples.min()),
        "max": float(samples.max()),
        "samples": [float(s) for s in samples],
    }
    if meta:
        payload.update(meta)
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")
