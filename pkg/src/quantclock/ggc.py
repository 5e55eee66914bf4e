"""Exact sampling of GGC(theta, R) marginals via Dirichlet means.

A GGC(theta, R) variable factors as gamma(theta) times a Dirichlet mean.
For Thorin mass p <= 1 the mean solves the fixed point
M = U*M + (1-U)*D with D = R*Bernoulli(p), admits the closed
sine/log-moment density, and can be sampled two ways:

* rejection against that density (needs the cdf and log-moment of R), or
* the Double CFTP coupling-from-the-past routine, which needs nothing
  beyond a bound on D and an exact sampler for it.

Larger Thorin masses are segmented into unit pieces and summed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import (
    DegenerateDError,
    DomainError,
    EnvelopeFailureError,
    SamplerStuckError,
    UnsupportedLawError,
)
from .laws import Law, ThinnedLaw
from .levy import GGCSpec, quad_checked

__all__ = [
    "DirichletMeanLaw",
    "psi_r",
    "m1_density",
    "occupation_mean_density",
    "sample_m1",
    "double_cftp",
    "ggc_sample",
    "m_theta_series",
]

_BACKWARD_CAP = 10_000_000
_FORWARD_CAP = 10_000_000


@dataclass(frozen=True)
class DirichletMeanLaw:
    """Law of the unit-mass Dirichlet mean with mixing D = R * Bernoulli(p).

    ``p`` is the effective Thorin mass of the piece; ``r_law`` the law of
    the non-thinned factor (possibly already a product such as R*Y).
    ``density`` optionally overrides the generic sine/log-moment density
    with a closed form (used by presets and by the rejection sampler).
    """

    p: float
    r_law: Law
    density: object = None

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise DomainError("piece mass p must lie in (0, 1]")

    @property
    def d_bound(self) -> float | None:
        return self.r_law.bound

    @property
    def d_law(self) -> Law:
        return ThinnedLaw(self.r_law, self.p)

    def sample_d(self, rng, size=None):
        if self.p == 1.0:
            return self.r_law.sample(rng, size)
        vals = self.r_law.sample(rng, size)
        keep = rng.random(size) < self.p
        if size is None:
            return vals if keep else 0.0
        return np.where(keep, vals, 0.0)

    def d_cdf(self, x):
        if self.r_law.cdf is None:
            raise UnsupportedLawError("mixing law exposes no cdf")
        x = np.asarray(x, float)
        return np.where(x >= 0, (1.0 - self.p) + self.p * self.r_law.cdf(x), 0.0)

    def density_at(self, x) -> np.ndarray:
        """Vectorized density: the closed-form override when present."""
        if self.density is not None:
            return np.asarray(self.density(np.asarray(x, float)), float)
        return np.array([m1_density(float(xi), self) for xi in np.atleast_1d(x)])

    @property
    def d_is_constant(self) -> bool:
        # the thinned variable is a.s. constant only when nothing is thinned
        return self.p == 1.0 and self.r_law.is_constant


def psi_r(x: float, r_law: Law) -> float:
    """Log-moment E[log|x - R|; R != x].

    The quadrature splits at the logarithmic singularity r = x and
    integrates each side under the substitution r = x -+ e^(-v), which
    turns the singular factor into a smooth exponentially damped one.
    """
    if x <= 0:
        raise DomainError("log-moment argument must be positive")
    total = 0.0
    for a, w in r_law.atoms:
        if a != x:
            total += w * math.log(abs(x - a))
    atom_mass = sum(w for _, w in r_law.atoms)
    if atom_mass >= 1.0 - 1e-14:
        return total
    if r_law.pdf is None:
        raise UnsupportedLawError("log-moment needs a density for the continuous part")
    pdf = r_law.pdf
    lo, hi = r_law.support
    hi_eff = min(hi, 1e10)

    def add_piece(a, b):
        nonlocal total
        if b <= a:
            return
        if x <= a or x >= b:
            total += quad_checked(lambda r: math.log(abs(x - r)) * float(pdf(r)), a, b)
            return
        # left side: r = x - e^{-v}
        v0 = -math.log(x - a)
        total += quad_checked(
            lambda v: -v * float(pdf(x - math.exp(-v))) * math.exp(-v), v0, v0 + 40.0
        )
        # right side: r = x + e^{-v}
        v1 = -math.log(b - x)
        total += quad_checked(
            lambda v: -v * float(pdf(x + math.exp(-v))) * math.exp(-v), v1, v1 + 40.0
        )

    add_piece(lo, hi_eff)
    return total


def m1_density(x: float, law: DirichletMeanLaw) -> float:
    """Pointwise sine/log-moment density of the unit-mass Dirichlet mean.

    f(x) = x^(p-1)/pi * sin(pi F_D(x)) * exp(-p * PsiR(x)) on the support
    (0, bound); the Bernoulli atom of D enters through
    F_D(x) = (1-p) + p F_R(x).
    """
    if x <= 0:
        return 0.0
    c = law.d_bound
    if c is not None and x >= c:
        return 0.0
    fd = float(law.d_cdf(x))
    s = math.sin(math.pi * fd)
    if s <= 0.0:
        return 0.0
    return x ** (law.p - 1.0) / math.pi * s * math.exp(-law.p * psi_r(x, law.r_law))


def occupation_mean_density(y, alpha: float, p: float):
    """Closed-form density of the occupation-time Dirichlet mean on (0, 1).

    This is the GGC(1, occupation * Bernoulli(p)) mean; used both as a
    preset and as a cross-check of the generic sine/log-moment form.
    """
    if not 0.0 < alpha < 1.0 or not 0.0 < p <= 1.0:
        raise DomainError("need 0 < alpha < 1 and 0 < p <= 1")
    y = np.asarray(y, float)
    a = alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        ya = y**a
        za = (1.0 - y) ** a
        ang = np.arctan2(za * math.sin(math.pi * a), za * math.cos(math.pi * a) + ya)
        out = (
            2.0 ** (p / a)
            / math.pi
            * y ** (p - 1.0)
            * np.sin(p / a * ang)
            * (ya**2 + 2.0 * ya * za * math.cos(a * math.pi) + za**2) ** (-p / (2.0 * a))
        )
    return np.where((y > 0) & (y < 1), out, 0.0)


def sample_m1(law: DirichletMeanLaw, rng, size=None, max_proposals=10_000_000):
    """Rejection draws of the unit-mass Dirichlet mean.

    Envelope: const * x^(p-1) * (c-x)^(-p), a rescaled beta(p, 1-p), whose
    constant is probed on a fine grid with a safety factor.  Returns
    ``(draws, acceptance_rate)``; a collapsing acceptance rate or an
    envelope violation raises and recommends the CFTP path instead.
    """
    c = law.d_bound
    if c is None or not math.isfinite(c):
        raise UnsupportedLawError("rejection path needs a bounded mixing variable")
    p = law.p
    if law.d_is_constant:
        vals = np.full(1 if size is None else size, law.r_law.constant_value)
        return (float(vals[0]) if size is None else vals), 1.0

    scalar = size is None
    n = 1 if scalar else int(np.prod(size))

    if p == 1.0:
        # no edge singularities: flat envelope over (0, c)
        grid = np.linspace(c * 1e-6, c * (1.0 - 1e-6), 2049)
        dens = law.density_at(grid)
        top = 1.5 * float(np.nanmax(dens))
        draws = np.empty(n)
        filled = proposed = 0
        while filled < n:
            m = max(2 * (n - filled), 64)
            proposed += m
            if proposed > max_proposals:
                raise EnvelopeFailureError(
                    "rejection acceptance collapsed; use the CFTP path",
                    acceptance_rate=filled / proposed,
                )
            x = c * rng.random(m)
            f = law.density_at(x)
            if np.any(f > top):
                raise EnvelopeFailureError("envelope violated; use the CFTP path")
            acc = x[rng.random(m) * top < f]
            take = min(n - filled, acc.size)
            draws[filled : filled + take] = acc[:take]
            filled += take
        rate = filled / proposed
        return (float(draws[0]) if scalar else draws.reshape(size)), rate

    # probe the bounded ratio h(x) = pi f(x) x^(1-p) (c-x)^p
    grid = c * np.linspace(1e-9, 1.0 - 1e-9, 4097)
    h = law.density_at(grid) * math.pi * grid ** (1.0 - p) * (c - grid) ** p
    a_const = 1.5 * float(np.nanmax(h))
    if not math.isfinite(a_const) or a_const <= 0:
        raise EnvelopeFailureError("could not build a finite envelope; use CFTP")
    # envelope total mass: (A/pi) * Beta(p, 1-p) on (0, c)
    draws = np.empty(n)
    filled = proposed = 0
    while filled < n:
        m = max(2 * (n - filled), 64)
        proposed += m
        if proposed > max_proposals and filled / proposed < 1e-4:
            raise EnvelopeFailureError(
                "rejection acceptance below 1e-4; use the CFTP path",
                acceptance_rate=filled / proposed,
            )
        if proposed > 10 * max_proposals:
            raise SamplerStuckError("rejection loop exceeded its cap")
        x = c * rng.beta(p, 1.0 - p, m)
        x = np.clip(x, c * 1e-14, c * (1.0 - 1e-14))
        f = law.density_at(x)
        env = a_const / math.pi * x ** (p - 1.0) * (c - x) ** (-p)
        ratio = f / env
        if np.any(ratio > 1.0 + 1e-9):
            raise EnvelopeFailureError("envelope violated; use the CFTP path")
        acc = x[rng.random(m) < ratio]
        take = min(n - filled, acc.size)
        draws[filled : filled + take] = acc[:take]
        filled += take
    rate = filled / proposed
    return (float(draws[0]) if scalar else draws.reshape(size)), rate


class _CftpBuffers:
    """Block-buffered uniforms and mixing draws; cuts per-call rng overhead."""

    def __init__(self, law: DirichletMeanLaw, rng, block: int = 4096):
        self.law, self.rng, self.block = law, rng, block
        self._u = np.empty(0)
        self._iu = 0
        self._d = np.empty(0)
        self._id = 0

    def uniform(self) -> float:
        if self._iu >= self._u.size:
            self._u = self.rng.random(self.block)
            self._iu = 0
        v = self._u[self._iu]
        self._iu += 1
        return float(v)

    def mixing(self) -> float:
        if self._id >= self._d.size:
            vals = np.asarray(self.law.r_law.sample(self.rng, self.block), float)
            if self.law.p < 1.0:
                vals = np.where(self.rng.random(self.block) < self.law.p, vals, 0.0)
            self._d = vals
            self._id = 0
        v = self._d[self._id]
        self._id += 1
        return float(v)


def double_cftp(law: DirichletMeanLaw, rng, _buf: "_CftpBuffers | None" = None):
    """One perfect draw of the unit-mass Dirichlet mean by Double CFTP.

    Backward phase: generate (U_i, D_i, D'_i) for i = -1, -2, ... until
    U_T <= |D_T - D'_T| / (2c); the chain regenerates there, uniformly on
    [min(D,D'), min(D,D') + 2c U_T].  Forward phase: replay the stored
    steps i = T+1, ..., -1, drawing each transition from the residual
    kernel by rejection: propose X = (1-U)M + U*(D or D' with equal odds)
    and repeat until

        U' * [ I(0<=(X-M)/(D-M)<=1)/|D-M| + I(0<=(X-M)/(D'-M)<=1)/|D'-M| ] > 1/c
        or X < D and D'  or  X > D or D' componentwise extremes.

    Requires D bounded by a constant c and exactly samplable; no density
    evaluations are involved.
    """
    c = law.d_bound
    if c is None or not math.isfinite(c):
        raise UnsupportedLawError("CFTP needs a declared bound on the mixing variable")
    if law.d_is_constant:
        return law.r_law.constant_value
    if c <= 0:
        return 0.0
    buf = _buf if _buf is not None else _CftpBuffers(law, rng, block=256)
    bound_tol = c * (1.0 + 1e-12)

    pairs = []
    steps = 0
    while True:
        steps += 1
        if steps > _BACKWARD_CAP:
            raise DegenerateDError(
                "backward phase failed to coalesce; mixing variable may be "
                "a.s. constant or the declared bound far too large"
            )
        u = buf.uniform()
        d = buf.mixing()
        dp = buf.mixing()
        if d > bound_tol or dp > bound_tol:
            raise DomainError("mixing draw exceeded the declared bound c")
        pairs.append((d, dp))
        if u <= abs(d - dp) / (2.0 * c):
            break
    m = min(pairs[-1]) + 2.0 * c * u

    inv_c = 1.0 / c
    for d, dp in reversed(pairs[:-1]):
        lo, hi = (d, dp) if d <= dp else (dp, d)
        tries = 0
        while True:
            tries += 1
            if tries > _FORWARD_CAP:
                raise SamplerStuckError("forward-phase rejection exceeded its cap")
            up = buf.uniform()
            pick = d if buf.uniform() < 0.5 else dp
            uu = buf.uniform()
            x = (1.0 - uu) * m + uu * pick
            dens = 0.0
            for dd in (d, dp):
                gap = dd - m
                if gap == 0.0:
                    if x == m:
                        dens = math.inf
                    continue
                r = (x - m) / gap
                if 0.0 <= r <= 1.0:
                    dens += 1.0 / abs(gap)
            if up * dens > inv_c or x < lo or x > hi:
                m = x
                break
    return m


def double_cftp_many(law: DirichletMeanLaw, rng, n: int) -> np.ndarray:
    """n independent perfect draws sharing one buffered stream."""
    if law.d_is_constant:
        return np.full(n, law.r_law.constant_value)
    buf = _CftpBuffers(law, rng)
    return np.array([double_cftp(law, rng, _buf=buf) for _ in range(n)])


def ggc_sample(g: GGCSpec, t: float, rng, size=None, method: str = "auto"):
    """Draws of the GGC(theta, R) subordinator marginal at time t.

    Writes theta*t = n*p with n = ceil(theta*t) unit pieces of mass
    p = theta*t/n <= 1 and returns the sum of gamma(1) times a perfect
    Dirichlet-mean draw per piece.  ``method`` picks the per-piece
    sampler: ``cftp`` (default when R is bounded) or ``rejection``.
    """
    if t <= 0:
        raise DomainError("time must be positive")
    tot = g.theta * t
    n_pieces = max(1, math.ceil(tot - 1e-12))
    p = tot / n_pieces
    law = DirichletMeanLaw(p, g.r_law)
    if method == "auto":
        method = "cftp" if (law.d_bound is not None and math.isfinite(law.d_bound)) else "rejection"

    scalar = size is None
    n = 1 if scalar else int(np.prod(size))
    out = np.zeros(n)
    for _ in range(n_pieces):
        if law.d_is_constant:
            means = np.full(n, law.r_law.constant_value)
        elif method == "cftp":
            means = double_cftp_many(law, rng, n)
        elif method == "rejection":
            means, _ = sample_m1(law, rng, n)
        else:
            raise DomainError(f"unknown GGC sampling method {method!r}")
        out += rng.gamma(1.0, size=n) * means
    if scalar:
        return float(out[0])
    return out.reshape(size)


def m_theta_series(theta: float, r_law: Law, rng, size, terms: int = 60) -> np.ndarray:
    """Brute-force Dirichlet-mean reference via the truncated perpetuity.

    M = sum_k (1 - B_k) R_k prod_{j<k} B_j with B_j i.i.d. beta(theta, 1).
    Truncation error decays like exp(-terms/theta); used only as an
    independent oracle in tests, never in the samplers themselves.
    """
    n = int(np.prod(size)) if not np.isscalar(size) else size
    betas = rng.beta(theta, 1.0, (terms, n))
    rs = np.asarray(r_law.sample(rng, (terms, n)), float)
    prefix = np.ones(n)
    out = np.zeros(n)
    for k in range(terms):
        out += prefix * (1.0 - betas[k]) * rs[k]
        prefix *= betas[k]
    return out
