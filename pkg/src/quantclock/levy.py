"""Analytic representations of subordinator laws.

A subordinator with zero drift is specified by its Laplace exponent
psi(w) = int (1 - exp(-w s)) rho(s) ds and Levy density rho.  The module
holds the built-in catalog (gamma, stable, tilted stable, generalized
gamma, compound Poisson, GGC mixtures and sums/marked variants of these),
the mixture identities tying a clock marginal to a single subordinator,
and the tolerance-checked quadrature everything runs on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy import special as sp

from .errors import ConfigError, DomainError, NumericsError, UnsupportedLawError
from .laws import DegenerateLaw, GammaLaw, Law
from .quantiles import QuantileFunction

__all__ = [
    "LaplaceExponent",
    "LevyDensity",
    "SubordinatorSpec",
    "GGCSpec",
    "laplace_exponent",
    "gamma_subordinator",
    "stable_subordinator",
    "tilted_stable_subordinator",
    "generalized_gamma_subordinator",
    "compound_poisson_subordinator",
    "ggc_subordinator",
    "sum_specs",
    "scaled_jump_spec",
    "rate_scaled_spec",
    "psi_eval",
    "psi_from_rho",
    "ggc_psi",
    "clock_psi",
    "mixed_rho",
    "quad_checked",
    "law_laplace",
]

QUAD_REL = 1e-8
QUAD_ABS = 1e-12


def quad_checked(f, a, b, rel=QUAD_REL, abs_tol=QUAD_ABS, points=None) -> float:
    """Adaptive Gauss-Kronrod integral that raises when the tolerance is missed."""
    kwargs = {"epsabs": abs_tol, "epsrel": rel, "limit": 200}
    if points is not None and math.isfinite(a) and math.isfinite(b):
        kwargs["points"] = [p for p in points if a < p < b]
    val, err = integrate.quad(f, a, b, **kwargs)
    if err > abs_tol + rel * abs(val) + 1e-300:
        # one retry with a finer subdivision budget before giving up; the
        # final gate is loose because QUADPACK's estimate is conservative
        # near roundoff, while genuine divergence overshoots by orders
        kwargs["limit"] = 800
        val, err = integrate.quad(f, a, b, **kwargs)
        if err > 100 * (abs_tol + rel * abs(val)):
            raise NumericsError(
                f"quadrature did not converge (error estimate {err:.3e})",
                achieved=err,
            )
    return val


def _fd_deriv(f, h_rel=1e-6):
    def deriv(w):
        w = np.asarray(w, float)
        h = np.maximum(h_rel, h_rel * w)
        lo = np.maximum(w - h, w * 1e-12)
        return (f(w + h) - f(lo)) / (w + h - lo)

    return deriv


@dataclass(frozen=True)
class LaplaceExponent:
    """psi and psi' as vectorized callables on (0, inf), with psi(0+) = 0."""

    eval: Callable
    deriv: Callable

    def __call__(self, w):
        return self.eval(w)


def laplace_exponent(eval: Callable, deriv: Callable | None = None) -> LaplaceExponent:
    """Wrap psi; derivative defaults to a relative-step central difference."""
    return LaplaceExponent(eval, deriv if deriv is not None else _fd_deriv(eval))


@dataclass(frozen=True)
class LevyDensity:
    """rho(s) for s > 0; ``total_mass`` is math.inf for infinite activity."""

    eval: Callable
    total_mass: float
    deriv: Callable | None = None

    def __call__(self, s):
        return self.eval(s)

    @property
    def infinite_activity(self) -> bool:
        return math.isinf(self.total_mass)


@dataclass(frozen=True)
class GGCSpec:
    """A GGC(theta, R) law: Thorin mass theta and the mixing variable R."""

    theta: float
    r_law: Law
    r_bound: float | None = None

    def __post_init__(self):
        if self.theta <= 0:
            raise DomainError("Thorin mass must be positive")
        if self.r_bound is None:
            object.__setattr__(self, "r_bound", self.r_law.bound)

    def validate(self, rng, n: int = 10_000) -> None:
        """Sanity Monte Carlo: draws respect the bound and E[log(1+R)] is finite."""
        draws = np.asarray(self.r_law.sample(rng, n), float)
        if np.any(draws < 0):
            raise DomainError("mixing variable produced negative draws")
        if self.r_bound is not None and np.any(draws > self.r_bound * (1 + 1e-12)):
            raise DomainError("mixing variable exceeded its declared bound")
        m = float(np.mean(np.log1p(draws)))
        if not math.isfinite(m):
            raise DomainError("E[log(1+R)] diverges; not a valid GGC mixing law")


@dataclass(frozen=True)
class SubordinatorSpec:
    """A driving Levy law: analytic psi and rho plus a simulation tag.

    ``family`` is one of gamma | gen_gamma | compound_poisson | ggc |
    scaled_jumps | rate_scaled | sum; ``params`` carries the family's
    parameters and ``components`` the parts of a sum.  All values are
    immutable after construction and safe to share across threads.
    """

    family: str
    params: dict
    psi: LaplaceExponent
    rho: LevyDensity
    components: tuple = ()
    jump_sampler: Callable | None = None

    @property
    def activity(self) -> str:
        return "infinite" if self.rho.infinite_activity else "finite"

    @property
    def mean_rate(self) -> float:
        """psi'(0+), the expected increase per unit time."""
        return float(self.psi.deriv(1e-9))


def psi_eval(spec: SubordinatorSpec, w: float):
    """Evaluate the Laplace exponent at frequency w > 0."""
    w_arr = np.asarray(w, float)
    if np.any(w_arr <= 0.0):
        raise DomainError("Laplace exponent frequency must be positive")
    return spec.psi.eval(w_arr) if w_arr.ndim else float(spec.psi.eval(w_arr))


def law_laplace(law: Law, w, rng=None, n: int = 200_000):
    """E[exp(-w X)] for a catalog law: closed form, quadrature, or Monte Carlo."""
    w = np.asarray(w, float)
    if hasattr(law, "laplace"):
        out = law.laplace(w if w.ndim else float(w))
        return np.asarray(out, float) if w.ndim else float(out)
    if isinstance(law, DegenerateLaw):
        return np.exp(-w * law.c)
    if isinstance(law, GammaLaw):
        return (1.0 + law.scale * w) ** (-law.shape)
    if law.quantile is not None:
        vals = [
            quad_checked(lambda u, _w=wi: math.exp(-_w * law.quantile(u)), 0.0, 1.0)
            for wi in np.atleast_1d(w)
        ]
        out = np.array(vals)
        return float(out[0]) if w.ndim == 0 else out
    if law.pdf is not None:
        lo, hi = law.support
        hi = min(hi, 1e8)
        out = np.array(
            [
                quad_checked(lambda s, _w=wi: math.exp(-_w * s) * law.pdf(s), lo, hi)
                for wi in np.atleast_1d(w)
            ]
        )
        atom = sum(wt * np.exp(-np.atleast_1d(w) * x) for x, wt in law.atoms)
        out = out + (atom if law.atoms else 0.0)
        return float(out[0]) if w.ndim == 0 else out
    if rng is None:
        raise UnsupportedLawError("law has no cdf/pdf/quantile; pass an rng for MC")
    draws = np.asarray(law.sample(rng, n), float)
    out = np.mean(np.exp(-np.atleast_1d(w)[:, None] * draws[None, :]), axis=1)
    return float(out[0]) if w.ndim == 0 else out


def _expect_over_law(law: Law, f: Callable, points=None, abs_tol=QUAD_ABS) -> float:
    """E[f(R)] by quadrature; prefers the quantile transform, falls back to pdf.

    Products of independent laws are integrated as nested expectations.
    """
    from .laws import ProductLaw

    if isinstance(law, ProductLaw):
        return _expect_over_law(
            law.first,
            lambda a: _expect_over_law(law.second, lambda b: f(a * b), abs_tol=abs_tol),
            abs_tol=abs_tol,
        )
    total = sum(wt * f(x) for x, wt in law.atoms)
    atom_mass = sum(wt for _, wt in law.atoms)
    if atom_mass >= 1.0 - 1e-14:
        return total
    if law.quantile is not None and not law.atoms:
        return quad_checked(lambda u: f(law.quantile(u)), 0.0, 1.0, abs_tol=abs_tol)
    if law.pdf is not None:
        lo, hi = law.support
        hi_eff = min(hi, 1e10)
        total += quad_checked(
            lambda r: f(r) * law.pdf(r), lo, hi_eff, points=points, abs_tol=abs_tol
        )
        return total
    raise UnsupportedLawError("law exposes neither quantile nor density")


# ---------------------------------------------------------------------------
# built-in families


def gamma_subordinator(theta: float) -> SubordinatorSpec:
    """Gamma subordinator: psi(w) = theta*log(1+w), rho(s) = theta*exp(-s)/s."""
    if theta <= 0:
        raise DomainError("gamma rate must be positive")
    psi = LaplaceExponent(
        lambda w: theta * np.log1p(w), lambda w: theta / (1.0 + np.asarray(w, float))
    )
    rho = LevyDensity(
        lambda s: theta * np.exp(-np.asarray(s, float)) / np.asarray(s, float),
        math.inf,
        deriv=lambda s: -theta
        * np.exp(-np.asarray(s, float))
        * (1.0 + np.asarray(s, float))
        / np.asarray(s, float) ** 2,
    )
    return SubordinatorSpec("gamma", {"theta": theta}, psi, rho)


def generalized_gamma_subordinator(C: float, alpha: float, b: float) -> SubordinatorSpec:
    """rho(s) = C s^(-alpha-1) e^(-bs); the stable/tilted-stable/gamma family."""
    if C <= 0 or not 0.0 < alpha < 1.0 or b < 0:
        raise DomainError("need C > 0, 0 < alpha < 1, b >= 0")
    g1a = sp.gamma(1.0 - alpha)

    def psi(w):
        w = np.asarray(w, float)
        return C * g1a / alpha * ((b + w) ** alpha - b**alpha)

    def dpsi(w):
        w = np.asarray(w, float)
        return C * g1a * (b + w) ** (alpha - 1.0)

    def rho(s):
        s = np.asarray(s, float)
        return C * s ** (-alpha - 1.0) * np.exp(-b * s)

    def drho(s):
        s = np.asarray(s, float)
        return -C * s ** (-alpha - 2.0) * np.exp(-b * s) * (alpha + 1.0 + b * s)

    return SubordinatorSpec(
        "gen_gamma",
        {"C": C, "alpha": alpha, "b": b},
        LaplaceExponent(psi, dpsi),
        LevyDensity(rho, math.inf, deriv=drho),
    )


def stable_subordinator(alpha: float) -> SubordinatorSpec:
    """Positive stable: psi(w) = w**alpha."""
    return generalized_gamma_subordinator(alpha / sp.gamma(1.0 - alpha), alpha, 0.0)


def tilted_stable_subordinator(alpha: float) -> SubordinatorSpec:
    """Exponentially tilted stable: psi(w) = (1+w)**alpha - 1."""
    return generalized_gamma_subordinator(alpha / sp.gamma(1.0 - alpha), alpha, 1.0)


def compound_poisson_subordinator(rate: float, jump_law: Law) -> SubordinatorSpec:
    """Finite-activity spec: Poisson(rate) arrivals with i.i.d. jumps."""
    if rate <= 0:
        raise DomainError("arrival rate must be positive")

    def psi(w):
        return rate * (1.0 - law_laplace(jump_law, w))

    if jump_law.pdf is not None:
        rho = LevyDensity(lambda s: rate * jump_law.pdf(s), rate)
    else:
        rho = LevyDensity(lambda s: np.nan * np.asarray(s, float), rate)
    return SubordinatorSpec(
        "compound_poisson",
        {"rate": rate, "jump_law": jump_law},
        laplace_exponent(psi),
        rho,
        jump_sampler=jump_law.sample,
    )


def ggc_subordinator(g: GGCSpec) -> SubordinatorSpec:
    """GGC(theta, R) subordinator: rho(s) = theta/s * E[exp(-s/R)]."""
    theta, law = g.theta, g.r_law

    def psi(w):
        w = np.atleast_1d(np.asarray(w, float))
        out = np.array([ggc_psi(g, wi) for wi in w])
        return out if out.size > 1 else float(out[0])

    def dpsi(w):
        w = np.atleast_1d(np.asarray(w, float))
        out = np.array(
            [theta * _expect_over_law(law, lambda r, _w=wi: r / (1.0 + _w * r)) for wi in w]
        )
        return out if out.size > 1 else float(out[0])

    def rho(s):
        s = np.atleast_1d(np.asarray(s, float))
        vals = []
        for si in s:
            vals.append(
                theta
                / si
                * _expect_over_law(law, lambda r, _s=si: math.exp(-_s / r) if r > 0 else 0.0)
            )
        out = np.array(vals)
        return out if out.size > 1 else float(out[0])

    return SubordinatorSpec(
        "ggc", {"ggc": g}, LaplaceExponent(psi, dpsi), LevyDensity(rho, math.inf)
    )


def sum_specs(*specs: SubordinatorSpec) -> SubordinatorSpec:
    """Independent sum: Laplace exponents and Levy densities add."""
    if not specs:
        raise DomainError("sum needs at least one component")
    flat: list[SubordinatorSpec] = []
    for s in specs:
        flat.extend(s.components if s.family == "sum" else (s,))
    parts = tuple(flat)

    def psi(w):
        return sum(p.psi.eval(w) for p in parts)

    def dpsi(w):
        return sum(p.psi.deriv(w) for p in parts)

    def rho(s):
        return sum(p.rho.eval(s) for p in parts)

    mass = sum(p.rho.total_mass for p in parts)
    derivs = [p.rho.deriv for p in parts]
    drho = None
    if all(d is not None for d in derivs):
        drho = lambda s: sum(d(s) for d in derivs)
    return SubordinatorSpec(
        "sum",
        {},
        LaplaceExponent(psi, dpsi),
        LevyDensity(rho, mass, deriv=drho),
        components=parts,
    )


def scaled_jump_spec(base: SubordinatorSpec, y_law: Law, tag: str = "scaled_jumps") -> SubordinatorSpec:
    """Mark every jump of ``base`` with an independent Y factor.

    psi(w) = E[psi_base(w Y)] and rho(x) = E[rho_base(x/Y)/Y]; Y must be
    bounded for the designs that use this construction.
    """
    if y_law.is_constant:
        c = y_law.constant_value
        if c == 1.0:
            return base
        psi = laplace_exponent(
            lambda w: base.psi.eval(np.asarray(w, float) * c),
            lambda w: c * base.psi.deriv(np.asarray(w, float) * c),
        )
        rho = LevyDensity(
            lambda s: base.rho.eval(np.asarray(s, float) / c) / c, base.rho.total_mass
        )
        return SubordinatorSpec(tag, {"base": base, "y_law": y_law}, psi, rho,
                                components=(base,))

    def psi(w):
        w = np.atleast_1d(np.asarray(w, float))
        out = np.array(
            [_expect_over_law(y_law, lambda y, _w=wi: float(base.psi.eval(_w * y))) for wi in w]
        )
        return out if out.size > 1 else float(out[0])

    def dpsi(w):
        w = np.atleast_1d(np.asarray(w, float))
        out = np.array(
            [
                _expect_over_law(y_law, lambda y, _w=wi: y * float(base.psi.deriv(_w * y)))
                for wi in w
            ]
        )
        return out if out.size > 1 else float(out[0])

    def rho(s):
        s = np.atleast_1d(np.asarray(s, float))
        out = np.array(
            [
                _expect_over_law(
                    y_law, lambda y, _s=si: float(base.rho.eval(_s / y)) / y if y > 0 else 0.0
                )
                for si in s
            ]
        )
        return out if out.size > 1 else float(out[0])

    return SubordinatorSpec(
        tag,
        {"base": base, "y_law": y_law},
        LaplaceExponent(psi, dpsi),
        LevyDensity(rho, base.rho.total_mass),
        components=(base,),
    )


def rate_scaled_spec(base: SubordinatorSpec, factor: float) -> SubordinatorSpec:
    """Run ``base`` at a different speed: psi -> factor*psi, rho -> factor*rho."""
    if factor <= 0:
        raise DomainError("rate factor must be positive")
    psi = LaplaceExponent(
        lambda w: factor * base.psi.eval(w), lambda w: factor * base.psi.deriv(w)
    )
    drho = None
    if base.rho.deriv is not None:
        drho = lambda s: factor * base.rho.deriv(s)
    rho = LevyDensity(lambda s: factor * base.rho.eval(s), factor * base.rho.total_mass, deriv=drho)
    return SubordinatorSpec(
        "rate_scaled", {"base": base, "factor": factor}, psi, rho, components=(base,)
    )


# ---------------------------------------------------------------------------
# mixture identities


def ggc_psi(g: GGCSpec, w: float, rng=None, n: int = 100_000):
    """theta * E[log(1 + w R)].

    Quadrature when R has a quantile or density; otherwise Monte Carlo with
    the standard error reported as a second return value.
    """
    if w <= 0:
        raise DomainError("frequency must be positive")
    try:
        return g.theta * _expect_over_law(g.r_law, lambda r: math.log1p(w * r))
    except UnsupportedLawError:
        if rng is None:
            raise
    if n < 1000:
        raise ConfigError("Monte Carlo evaluation needs at least 1000 draws")
    vals = g.theta * np.log1p(w * np.asarray(g.r_law.sample(rng, n), float))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n))


def clock_psi(q: QuantileFunction, psi_l: LaplaceExponent, t: float, w: float) -> float:
    """Exact Laplace exponent of a quantile clock at time t.

    t * int_0^1 psi_L(w Q(u)) du; this is the single-subordinator marginal
    that every distributional test compares against.
    """
    if t <= 0 or w <= 0:
        raise DomainError("clock time and frequency must be positive")
    return t * quad_checked(lambda u: float(psi_l.eval(w * float(q.eval(u)))), 0.0, 1.0)


def mixed_rho(rho_l: LevyDensity, r_law: Law, s: float) -> float:
    """Levy density of the clock's marginal subordinator.

    int rho_L(s/r) r^(-1) F_R(dr); needs a density or quantile (or atoms)
    for R.
    """
    if s <= 0:
        raise DomainError("jump size must be positive")
    return _expect_over_law(
        r_law, lambda r: float(rho_l.eval(s / r)) / r if r > 0 else 0.0
    )


def psi_from_rho(spec: SubordinatorSpec, w: float, upper: float = math.inf) -> float:
    """Numeric check value: int (1 - e^(-w s)) rho(s) ds."""
    if w <= 0:
        raise DomainError("frequency must be positive")

    def f(s):
        return -math.expm1(-w * s) * float(spec.rho.eval(s))

    return quad_checked(f, 0.0, 1.0, rel=1e-9) + quad_checked(f, 1.0, upper, rel=1e-9)
