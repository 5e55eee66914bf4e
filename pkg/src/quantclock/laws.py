"""Catalog of positive random-variable laws used as clock ingredients.

Every law exposes a seeded ``sample`` and, where available, ``cdf`` /
``pdf`` / ``quantile`` plus structural metadata: an upper ``bound``
(essential supremum, ``None`` when unbounded), the ``mean``, known
``atoms`` as ``(location, weight)`` pairs, and a degeneracy flag.  The
metadata is what lets downstream samplers pick exact shortcuts (point
masses), rejection envelopes (bounded supports) or quadrature paths
(densities).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as sp

from .errors import DomainError, SamplerStuckError

__all__ = [
    "Law",
    "DegenerateLaw",
    "UniformLaw",
    "BetaLaw",
    "GammaLaw",
    "PowerOfLaw",
    "ScaledLaw",
    "ProductLaw",
    "ThinnedLaw",
    "KumaraswamyLaw",
    "AffineUniformLaw",
    "GeometricExponentLaw",
    "ExpNegGammaLaw",
    "StableRatioLaw",
    "OccupationLaw",
    "GFractionLaw",
    "DFractionLaw",
    "StraddleLaw",
    "TiltedStableLaw",
    "stable_positive",
    "sample_special",
]

_REJECTION_CAP = 10_000_000


class Law:
    """Base class: a positive random variable with optional analytics.

    Subclasses fill in ``sample`` and whichever of ``cdf``, ``pdf``,
    ``quantile`` exist in closed form; the rest stay ``None``-returning.
    """

    #: essential supremum, None if unbounded/unknown, math.inf if infinite
    bound: float | None = None
    #: exact mean when known
    mean: float | None = None
    #: known point masses [(x, weight)]; empty for continuous laws
    atoms: tuple = ()
    #: (lo, hi) support interval of the continuous part
    support: tuple = (0.0, math.inf)

    cdf = None
    pdf = None
    quantile = None

    def sample(self, rng, size=None):
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return len(self.atoms) == 1 and self.atoms[0][1] == 1.0

    @property
    def constant_value(self) -> float:
        if not self.is_constant:
            raise DomainError("law is not a point mass")
        return self.atoms[0][0]


class DegenerateLaw(Law):
    """Point mass at ``c``.  The bridge case for every trivial identity."""

    def __init__(self, c: float):
        if c < 0:
            raise DomainError("point mass must be nonnegative")
        self.c = float(c)
        self.bound = self.c
        self.mean = self.c
        self.atoms = ((self.c, 1.0),)
        self.support = (self.c, self.c)

    def sample(self, rng, size=None):
        return self.c if size is None else np.full(size, self.c)

    def cdf(self, x):
        return np.where(np.asarray(x, float) >= self.c, 1.0, 0.0)

    def quantile(self, u):
        return self.c if np.isscalar(u) else np.full(np.shape(u), self.c)


class UniformLaw(Law):
    """Uniform on [0, 1]."""

    bound = 1.0
    mean = 0.5
    support = (0.0, 1.0)

    def sample(self, rng, size=None):
        return rng.random() if size is None else rng.random(size)

    def cdf(self, x):
        return np.clip(np.asarray(x, float), 0.0, 1.0)

    def pdf(self, x):
        x = np.asarray(x, float)
        return np.where((x >= 0) & (x <= 1), 1.0, 0.0)

    def quantile(self, u):
        return np.asarray(u, float)


class BetaLaw(Law):
    def __init__(self, a: float, b: float):
        if a <= 0 or b <= 0:
            raise DomainError("beta parameters must be positive")
        self.a, self.b = float(a), float(b)
        self.bound = 1.0
        self.mean = self.a / (self.a + self.b)
        self.support = (0.0, 1.0)

    def sample(self, rng, size=None):
        return rng.beta(self.a, self.b, size=size)

    def cdf(self, x):
        return sp.betainc(self.a, self.b, np.clip(np.asarray(x, float), 0.0, 1.0))

    def pdf(self, x):
        x = np.asarray(x, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (
                x ** (self.a - 1.0)
                * (1.0 - x) ** (self.b - 1.0)
                / sp.beta(self.a, self.b)
            )
        return np.where((x > 0) & (x < 1), out, 0.0)

    def quantile(self, u):
        return sp.betaincinv(self.a, self.b, np.asarray(u, float))


class GammaLaw(Law):
    def __init__(self, shape: float, scale: float = 1.0):
        if shape <= 0 or scale <= 0:
            raise DomainError("gamma shape and scale must be positive")
        self.shape, self.scale = float(shape), float(scale)
        self.bound = None
        self.mean = self.shape * self.scale

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, self.scale, size=size)

    def cdf(self, x):
        return sp.gammainc(self.shape, np.maximum(np.asarray(x, float), 0.0) / self.scale)

    def pdf(self, x):
        x = np.asarray(x, float)
        z = x / self.scale
        with np.errstate(divide="ignore", invalid="ignore"):
            out = z ** (self.shape - 1.0) * np.exp(-z) / (sp.gamma(self.shape) * self.scale)
        return np.where(x > 0, out, 0.0)

    def quantile(self, u):
        return self.scale * sp.gammaincinv(self.shape, np.asarray(u, float))


class ScaledLaw(Law):
    """``c`` times a base law."""

    def __init__(self, base: Law, c: float):
        if c <= 0:
            raise DomainError("scale must be positive")
        self.base, self.c = base, float(c)
        self.bound = None if base.bound is None else c * base.bound
        self.mean = None if base.mean is None else c * base.mean
        self.atoms = tuple((c * x, w) for x, w in base.atoms)
        lo, hi = base.support
        self.support = (c * lo, c * hi)
        if base.cdf is not None:
            self.cdf = lambda x: base.cdf(np.asarray(x, float) / c)
        if base.pdf is not None:
            self.pdf = lambda x: base.pdf(np.asarray(x, float) / c) / c
        if base.quantile is not None:
            self.quantile = lambda u: c * base.quantile(u)

    def sample(self, rng, size=None):
        return self.c * self.base.sample(rng, size)


class PowerOfLaw(Law):
    """``base ** q`` for q > 0; keeps cdf/quantile when the base has them."""

    def __init__(self, base: Law, q: float):
        if q <= 0:
            raise DomainError("exponent must be positive")
        self.base, self.q = base, float(q)
        self.bound = None if base.bound is None else base.bound**q
        self.atoms = tuple((x**q, w) for x, w in base.atoms)
        lo, hi = base.support
        self.support = (lo**q, hi**q if math.isfinite(hi) else math.inf)
        if base.cdf is not None:
            self.cdf = lambda x: base.cdf(np.maximum(np.asarray(x, float), 0.0) ** (1.0 / q))
        if base.pdf is not None:
            def _pdf(x, _b=base, _q=q):
                x = np.asarray(x, float)
                with np.errstate(divide="ignore", invalid="ignore"):
                    y = x ** (1.0 / _q)
                    out = _b.pdf(y) * y / (_q * x)
                return np.where(x > 0, out, 0.0)

            self.pdf = _pdf
        if base.quantile is not None:
            self.quantile = lambda u: np.asarray(base.quantile(u), float) ** q
            if math.isfinite(self.support[1]):
                from scipy import integrate

                val, _ = integrate.quad(
                    lambda u: float(np.asarray(base.quantile(u), float)) ** q, 0.0, 1.0
                )
                self.mean = float(val)

    def sample(self, rng, size=None):
        return self.base.sample(rng, size) ** self.q


class ProductLaw(Law):
    """Product of two independent laws."""

    def __init__(self, first: Law, second: Law):
        self.first, self.second = first, second
        if first.bound is not None and second.bound is not None:
            self.bound = first.bound * second.bound
        if first.mean is not None and second.mean is not None:
            self.mean = first.mean * second.mean

    def sample(self, rng, size=None):
        return self.first.sample(rng, size) * self.second.sample(rng, size)


class ThinnedLaw(Law):
    """``base`` with probability p, zero otherwise (i.e. base times a Bernoulli)."""

    def __init__(self, base: Law, p: float):
        if not 0.0 < p <= 1.0:
            raise DomainError("thinning probability must be in (0, 1]")
        self.base, self.p = base, float(p)
        self.bound = base.bound
        self.mean = None if base.mean is None else p * base.mean
        at = tuple((x, p * w) for x, w in base.atoms)
        self.atoms = at if p == 1.0 else ((0.0, 1.0 - p),) + at
        self.support = base.support
        if base.cdf is not None:
            def _cdf(x, _b=base, _p=p):
                x = np.asarray(x, float)
                return np.where(x >= 0, (1.0 - _p) + _p * _b.cdf(x), 0.0)

            self.cdf = _cdf

    def sample(self, rng, size=None):
        vals = self.base.sample(rng, size)
        if self.p == 1.0:
            return vals
        keep = rng.random(size) < self.p
        if size is None:
            return vals if keep else 0.0
        return np.where(keep, vals, 0.0)


class KumaraswamyLaw(Law):
    """Kumaraswamy-type variable ``(1 - (1-U)**(1/alpha)) ** (1/b)``.

    Pairs with ``PowerOfLaw(BetaLaw(alpha, 1-alpha), 1/b)`` to rebuild a
    power of a uniform: their product has the ``U**(1/(alpha*b))`` law.
    """

    def __init__(self, alpha: float, b: float):
        if not 0.0 < alpha < 1.0 or b <= 0:
            raise DomainError("need 0 < alpha < 1 and b > 0")
        self.alpha, self.b = float(alpha), float(b)
        self.bound = 1.0
        self.mean = alpha * sp.beta(1.0 + 1.0 / b, alpha)
        self.support = (0.0, 1.0)

    def quantile(self, u):
        u = np.asarray(u, float)
        return (1.0 - (1.0 - u) ** (1.0 / self.alpha)) ** (1.0 / self.b)

    def cdf(self, x):
        x = np.clip(np.asarray(x, float), 0.0, 1.0)
        return 1.0 - (1.0 - x**self.b) ** self.alpha

    def pdf(self, x):
        x = np.asarray(x, float)
        a, b = self.alpha, self.b
        with np.errstate(divide="ignore", invalid="ignore"):
            out = a * b * x ** (b - 1.0) * (1.0 - x**b) ** (a - 1.0)
        return np.where((x > 0) & (x < 1), out, 0.0)

    def sample(self, rng, size=None):
        return self.quantile(rng.random(size))


class AffineUniformLaw(Law):
    """``U*p + (1-p)``: uniform squeezed onto [1-p, 1]."""

    def __init__(self, p: float):
        if not 0.0 < p <= 1.0:
            raise DomainError("p must be in (0, 1]")
        self.p = float(p)
        self.bound = 1.0
        self.mean = 1.0 - p / 2.0
        self.support = (1.0 - p, 1.0)

    def sample(self, rng, size=None):
        u = rng.random() if size is None else rng.random(size)
        return u * self.p + (1.0 - self.p)

    def cdf(self, x):
        return np.clip((np.asarray(x, float) - (1.0 - self.p)) / self.p, 0.0, 1.0)

    def pdf(self, x):
        x = np.asarray(x, float)
        return np.where((x >= 1.0 - self.p) & (x <= 1.0), 1.0 / self.p, 0.0)

    def quantile(self, u):
        return np.asarray(u, float) * self.p + (1.0 - self.p)


class GeometricExponentLaw(Law):
    """``exp(-lam * X)`` for X geometric(p) on {0, 1, 2, ...} and lam = -log(1-p).

    The companion of the affine-uniform law: their independent product is
    uniform on [0, 1].  Success probability convention: P(X=0) = p.
    """

    def __init__(self, p: float):
        if not 0.0 < p <= 1.0:
            raise DomainError("p must be in (0, 1]")
        self.p = float(p)
        self.bound = 1.0
        self.mean = 1.0 / (2.0 - p)
        self.support = (0.0, 1.0)
        if p == 1.0:
            self.atoms = ((1.0, 1.0),)
        else:
            # explicit pmf, truncated where the tail weight drops below 1e-15
            kmax = int(math.ceil(math.log(1e-15) / math.log1p(-p)))
            w = p * (1.0 - p) ** np.arange(kmax)
            at = [((1.0 - p) ** k, w[k]) for k in range(kmax)]
            at.append(((1.0 - p) ** kmax, (1.0 - p) ** kmax))
            self.atoms = tuple(at)

    def sample(self, rng, size=None):
        if self.p == 1.0:
            return 1.0 if size is None else np.ones(size)
        # numpy's geometric counts trials >= 1; shift to {0, 1, ...}
        k = rng.geometric(self.p, size=size) - 1
        return (1.0 - self.p) ** k


class ExpNegGammaLaw(Law):
    """``exp(-G)`` for G gamma(a): support (0, 1], density (-log x)^(a-1)/Gamma(a)."""

    def __init__(self, a: float):
        if a <= 0:
            raise DomainError("shape must be positive")
        self.a = float(a)
        self.bound = 1.0
        self.mean = 2.0**-a
        self.support = (0.0, 1.0)

    def sample(self, rng, size=None):
        return np.exp(-rng.gamma(self.a, size=size))

    def cdf(self, x):
        x = np.clip(np.asarray(x, float), 1e-300, 1.0)
        return sp.gammaincc(self.a, -np.log(x))

    def pdf(self, x):
        x = np.asarray(x, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (-np.log(x)) ** (self.a - 1.0) / sp.gamma(self.a)
        return np.where((x > 0) & (x < 1), out, 0.0)

    def quantile(self, u):
        return np.exp(-sp.gammaincinv(self.a, 1.0 - np.asarray(u, float)))


def stable_positive(alpha: float, rng, size=None):
    """Positive stable variate(s) with Laplace transform exp(-w**alpha).

    Kanter's exact two-uniform transform; no series truncation involved,
    which matters because everything downstream is tested distributionally.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("stable index must lie in (0, 1)")
    scalar = size is None
    n = 1 if scalar else size
    u = rng.random(n)
    np.clip(u, 1e-16, 1.0 - 1e-16, out=u)
    e = rng.standard_exponential(n)
    x = math.pi * u
    a = (1.0 - alpha) / alpha
    val = (
        np.sin(alpha * x)
        * np.sin((1.0 - alpha) * x) ** a
        / (np.sin(x) ** (1.0 / alpha) * e**a)
    )
    return val[0] if scalar else val


class StableRatioLaw(Law):
    """Ratio of two i.i.d. positive stable variables of index alpha.

    Heavy tailed (infinite mean); closed-form quantile and cdf via the
    Lamperti trigonometric identity.
    """

    def __init__(self, alpha: float):
        if not 0.0 < alpha < 1.0:
            raise DomainError("stable index must lie in (0, 1)")
        self.alpha = float(alpha)
        self.bound = None
        self.mean = math.inf

    def sample(self, rng, size=None):
        return stable_positive(self.alpha, rng, size) / stable_positive(
            self.alpha, rng, size
        )

    def quantile(self, u):
        u = np.asarray(u, float)
        a = self.alpha
        with np.errstate(divide="ignore"):
            out = (np.sin(math.pi * a * u) / np.sin(math.pi * a * (1.0 - u))) ** (
                1.0 / a
            )
        return out

    def cdf(self, x):
        x = np.asarray(x, float)
        a = self.alpha
        w = np.maximum(x, 0.0) ** a
        ang = np.arctan2(w * math.sin(math.pi * a), 1.0 + w * math.cos(math.pi * a))
        return np.where(x > 0, ang / (math.pi * a), 0.0)

    def pdf(self, x):
        x = np.asarray(x, float)
        a = self.alpha
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (
                math.sin(math.pi * a)
                / math.pi
                * x ** (a - 1.0)
                / (x ** (2 * a) + 2.0 * x**a * math.cos(math.pi * a) + 1.0)
            )
        return np.where(x > 0, out, 0.0)


class OccupationLaw(Law):
    """Occupation-time variable on [0, 1]: X/(1+X) for X a stable ratio.

    The alpha = 1/2 case is the arcsine law beta(1/2, 1/2).
    """

    def __init__(self, alpha: float):
        self.ratio = StableRatioLaw(alpha)
        self.alpha = self.ratio.alpha
        self.bound = 1.0
        self.mean = 0.5  # symmetry: X and 1/X share a law
        self.support = (0.0, 1.0)

    def sample(self, rng, size=None):
        x = self.ratio.sample(rng, size)
        return x / (1.0 + x)

    def quantile(self, u):
        q = self.ratio.quantile(u)
        with np.errstate(invalid="ignore"):
            return np.where(np.isinf(q), 1.0, q / (1.0 + q))

    def cdf(self, x):
        x = np.clip(np.asarray(x, float), 0.0, 1.0)
        with np.errstate(divide="ignore"):
            w = x / (1.0 - x)
        return np.where(x >= 1.0, 1.0, self.ratio.cdf(w))

    def pdf(self, x):
        x = np.asarray(x, float)
        a = self.alpha
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (
                math.sin(math.pi * a)
                / math.pi
                * x ** (a - 1.0)
                * (1.0 - x) ** (a - 1.0)
                / (
                    x ** (2 * a)
                    + 2.0 * (x * (1.0 - x)) ** a * math.cos(math.pi * a)
                    + (1.0 - x) ** (2 * a)
                )
            )
        return np.where((x > 0) & (x < 1), out, 0.0)


class GFractionLaw(Law):
    """The [0, 1]-valued fraction family indexed by alpha in [0, 1].

    alpha = 1 is uniform, alpha = 1/2 is arcsine, and alpha = 0 is
    1/(1 + exp(pi * Cauchy)); strictly between, W/(1+W) for
    W = (stable ratio of index 1-alpha) ** ((1-alpha)/alpha).
    """

    def __init__(self, alpha: float):
        if not 0.0 <= alpha <= 1.0:
            raise DomainError("alpha must lie in [0, 1]")
        self.alpha = float(alpha)
        self.bound = 1.0
        self.mean = 0.5
        self.support = (0.0, 1.0)
        if 0.0 < alpha < 1.0:
            self._ratio = StableRatioLaw(1.0 - alpha)
            self._pw = (1.0 - alpha) / alpha

    def sample(self, rng, size=None):
        a = self.alpha
        if a == 1.0:
            return rng.random() if size is None else rng.random(size)
        if a == 0.0:
            eta = rng.standard_cauchy(size)
            return 1.0 / (1.0 + np.exp(np.clip(math.pi * eta, -700, 700)))
        w = self._ratio.sample(rng, size) ** self._pw
        return w / (1.0 + w)

    def quantile(self, u):
        u = np.asarray(u, float)
        a = self.alpha
        if a == 1.0:
            return u
        if a == 0.0:
            # the Cauchy enters through a decreasing map; flip the tail
            eta = np.tan(math.pi * (0.5 - np.clip(u, 1e-16, 1.0 - 1e-16)))
            return 1.0 / (1.0 + np.exp(np.clip(math.pi * eta, -700.0, 700.0)))
        w = self._ratio.quantile(u) ** self._pw
        return np.where(np.isinf(w), 1.0, w / (1.0 + w))

    def cdf(self, x):
        x = np.clip(np.asarray(x, float), 0.0, 1.0)
        a = self.alpha
        if a == 1.0:
            return x
        with np.errstate(divide="ignore"):
            odds = x / (1.0 - x)
        if a == 0.0:
            with np.errstate(divide="ignore"):
                val = 0.5 + np.arctan(np.log(odds) / math.pi) / math.pi
            return np.where(x >= 1.0, 1.0, np.where(x <= 0.0, 0.0, val))
        return np.where(x >= 1.0, 1.0, self._ratio.cdf(odds ** (1.0 / self._pw)))

    def pdf(self, x):
        x = np.asarray(x, float)
        a = self.alpha
        if a == 1.0:
            return np.where((x >= 0) & (x <= 1), 1.0, 0.0)
        if a == 0.0:
            with np.errstate(divide="ignore", invalid="ignore"):
                lg = np.log((1.0 - x) / x)
                out = 1.0 / (x * (1.0 - x) * (math.pi**2 + lg**2))
            return np.where((x > 0) & (x < 1), out, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            odds = x / (1.0 - x)
            w = odds ** (1.0 / self._pw)
            out = self._ratio.pdf(w) * w / (self._pw * odds * (1.0 - x) ** 2)
        return np.where((x > 0) & (x < 1), out, 0.0)


class DFractionLaw(Law):
    """1/(1 + G) for G the fraction family above; support [1/2, 1]."""

    def __init__(self, alpha: float):
        self.g = GFractionLaw(alpha)
        self.alpha = self.g.alpha
        self.bound = 1.0
        self.support = (0.5, 1.0)

    def sample(self, rng, size=None):
        return 1.0 / (1.0 + self.g.sample(rng, size))

    def cdf(self, x):
        x = np.asarray(x, float)
        # D <= x  <=>  G >= 1/x - 1
        with np.errstate(divide="ignore"):
            g = 1.0 / np.maximum(x, 1e-300) - 1.0
        return np.where(x >= 1.0, 1.0, np.where(x < 0.5, 0.0, 1.0 - self.g.cdf(g)))

    def quantile(self, u):
        return 1.0 / (1.0 + np.asarray(self.g.quantile(1.0 - np.asarray(u, float)), float))


class StraddleLaw(Law):
    """Excursion-length variable with density a*x^(-a-1)*e^(-x)*(1-e^(-x))/norm.

    ``norm = (2**a - 1) * Gamma(1 - a)``.  Sampled by two-piece rejection
    under the envelope x^(-a-1)*e^(-x)*min(1, x), whose acceptance ratio is
    bounded away from zero uniformly in a.
    """

    def __init__(self, alpha: float):
        if not 0.0 < alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        self.alpha = float(alpha)
        self.bound = None
        self.norm = (2.0**alpha - 1.0) * sp.gamma(1.0 - alpha) / alpha

    def pdf(self, x):
        x = np.asarray(x, float)
        a = self.alpha
        with np.errstate(divide="ignore", invalid="ignore"):
            out = x ** (-a - 1.0) * np.exp(-x) * (1.0 - np.exp(-x)) / self.norm
        return np.where(x > 0, out, 0.0)

    def sample(self, rng, size=None):
        scalar = size is None
        n = 1 if scalar else int(np.prod(size))
        out = np.empty(n)
        filled = 0
        proposed = 0
        a = self.alpha
        # envelope piece masses: x^-a on (0,1] and e^-x on (1,inf)
        m1 = 1.0 / (1.0 - a)
        m2 = math.exp(-1.0)
        w1 = m1 / (m1 + m2)
        while filled < n:
            m = max(2 * (n - filled), 64)
            proposed += m
            if proposed > _REJECTION_CAP:
                raise SamplerStuckError(
                    "straddle-length rejection exceeded iteration cap",
                    acceptance_rate=filled / proposed,
                )
            pick1 = rng.random(m) < w1
            x = np.empty(m)
            k1 = int(pick1.sum())
            x[pick1] = rng.random(k1) ** (1.0 / (1.0 - a))
            x[~pick1] = 1.0 + rng.standard_exponential(m - k1)
            # first stage: thin envelope pieces down to x^(-a-1) e^(-x) min(1,x)
            ratio = np.where(pick1, np.exp(-x), x ** (-a - 1.0))
            # second stage: min(1,x) -> (1 - e^(-x))
            ratio *= -np.expm1(-x) / np.minimum(1.0, x)
            acc = x[rng.random(m) < ratio]
            take = min(n - filled, acc.size)
            out[filled : filled + take] = acc[:take]
            filled += take
        if scalar:
            return out[0]
        return out.reshape(size)


class TiltedStableLaw(Law):
    """Marginal at time t of the exponentially tilted stable subordinator.

    Laplace transform exp(-t*((1+w)**alpha - 1)).  Exact sampling by
    rejection from a (scaled) positive stable proposal, with the horizon
    split into pieces so the e^{-x} thinning keeps a workable acceptance
    rate at large t.
    """

    def __init__(self, alpha: float, t: float = 1.0):
        if not 0.0 < alpha < 1.0:
            raise DomainError("stable index must lie in (0, 1)")
        if t <= 0:
            raise DomainError("time must be positive")
        self.alpha, self.t = float(alpha), float(t)
        self.mean = alpha * t  # psi'(0+)

    def sample(self, rng, size=None):
        scalar = size is None
        n = 1 if scalar else int(np.prod(size))
        pieces = max(1, math.ceil(self.t / 2.0))
        h = self.t / pieces
        scale = h ** (1.0 / self.alpha)
        total = np.zeros(n)
        for _ in range(pieces):
            vals = np.empty(n)
            todo = np.arange(n)
            proposed = 0
            while todo.size:
                cand = scale * stable_positive(self.alpha, rng, todo.size)
                keep = rng.random(todo.size) < np.exp(-cand)
                vals[todo[keep]] = cand[keep]
                todo = todo[~keep]
                proposed += cand.size
                if proposed > _REJECTION_CAP:
                    raise SamplerStuckError(
                        "tilted-stable rejection exceeded iteration cap",
                        acceptance_rate=1.0 - todo.size / proposed,
                    )
            total += vals
        if scalar:
            return total[0]
        return total.reshape(size)


_SPECIAL = {
    "stable_ratio": lambda p: StableRatioLaw(p["alpha"]),
    "occupation": lambda p: OccupationLaw(p["alpha"]),
    "g_fraction": lambda p: GFractionLaw(p["alpha"]),
    "d_fraction": lambda p: DFractionLaw(p["alpha"]),
    "straddle": lambda p: StraddleLaw(p["alpha"]),
    "kumaraswamy": lambda p: KumaraswamyLaw(p["alpha"], p["b"]),
    "affine_uniform": lambda p: AffineUniformLaw(p["p"]),
    "geometric_exponent": lambda p: GeometricExponentLaw(p["p"]),
    "uniform": lambda p: UniformLaw(),
    "beta": lambda p: BetaLaw(p["a"], p["b"]),
    "exp_neg_gamma": lambda p: ExpNegGammaLaw(p["a"]),
    "degenerate": lambda p: DegenerateLaw(p["c"]),
}


def make_law(family: str, **params) -> Law:
    """Build a catalog law from its family name and parameters."""
    try:
        ctor = _SPECIAL[family]
    except KeyError:
        raise DomainError(f"unknown law family {family!r}") from None
    return ctor(params)


def sample_special(family: str, params: dict, rng, size=None):
    """One draw (or an array) from a named special variable."""
    return make_law(family, **params).sample(rng, size)
