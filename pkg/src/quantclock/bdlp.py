"""Inverse design of driving laws: choose L so the clock has a target marginal.

Given a clock kernel paired with a bounded Y so that R*Y has the
``U**(1/delta)`` law, the driving subordinator that produces a prescribed
marginal class is

    psi_Z(w)   = psi(w) + (1/delta) * w * psi'(w)          (the BDLP)
    psi_L(w)   = E[psi_Z(w Y)]                             (mark Z's jumps by Y)

with sharper forms down the class hierarchy: for self-decomposable
targets rho_Z = rho + rho_OU/delta with rho_OU(x) = -rho(x) - x rho'(x);
for GGC targets everything reduces to gamma parts plus compound Poisson
parts, which is what makes the designs exactly simulable.  The module
also houses the gamma-subordinator split into a straddling compound
Poisson piece plus a GGC remainder, and the named model presets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate
from scipy import special as sp

from .errors import (
    DegenerateSplitError,
    DomainError,
    NotSelfDecomposableError,
    PreconditionError,
    UnsupportedLawError,
)
from .laws import DegenerateLaw, GammaLaw, Law, ProductLaw
from .levy import (
    GGCSpec,
    LaplaceExponent,
    LevyDensity,
    SubordinatorSpec,
    _expect_over_law,
    compound_poisson_subordinator,
    gamma_subordinator,
    generalized_gamma_subordinator,
    ggc_subordinator,
    laplace_exponent,
    quad_checked,
    rate_scaled_spec,
    scaled_jump_spec,
    sum_specs,
)

__all__ = [
    "TargetLaw",
    "DesignOutput",
    "target_gamma",
    "target_tilted_stable",
    "target_generalized_gamma",
    "target_stable",
    "target_thorin_atoms",
    "target_ggc_plus",
    "u_delta_Z",
    "thorin_bdlp_psi",
    "sd_bdlp",
    "ou_bdlp_spec",
    "u_delta_z_spec",
    "driving_L",
    "gplus_L",
    "straddle_subordinator",
    "gamma_split",
    "preset_L",
    "cgmy_levy_density",
    "cgmy_subordinator_density",
]

_SD_GRID = np.geomspace(1e-6, 50.0, 200)


@dataclass(frozen=True)
class TargetLaw:
    """A marginal law the clock should have, with its class tag.

    ``class_tag``: ``u_delta`` (generic), ``self_decomposable``,
    ``ggc_nu`` (discrete Thorin measure) or ``ggc_plus``.
    """

    class_tag: str
    spec: SubordinatorSpec
    ggc: GGCSpec | None = None
    nu_atoms: tuple = ()

    @property
    def psi(self) -> LaplaceExponent:
        return self.spec.psi

    @property
    def rho(self) -> LevyDensity:
        return self.spec.rho


@dataclass(frozen=True)
class DesignOutput:
    """A constructed driving law plus provenance.

    ``l_spec`` always carries analytic psi (and rho where available); when
    the construction reduces to gamma/compound-Poisson parts it is also
    exactly simulable through the skeleton machinery.  ``notes`` records
    construction diagnostics (e.g. which CGMY variant was requested).
    """

    l_spec: SubordinatorSpec
    construction: str
    z_spec: SubordinatorSpec | None = None
    notes: dict = field(default_factory=dict)


def _check_self_dec(spec: SubordinatorSpec) -> None:
    h = _SD_GRID * np.asarray(spec.rho.eval(_SD_GRID), float)
    if np.any(np.diff(h) > 1e-10 * np.maximum(h[:-1], 1e-300)):
        raise NotSelfDecomposableError(
            "s * rho(s) increases somewhere; target is not self-decomposable"
        )


def target_gamma(theta: float) -> TargetLaw:
    return TargetLaw("self_decomposable", gamma_subordinator(theta))


def target_tilted_stable(alpha: float) -> TargetLaw:
    return TargetLaw(
        "self_decomposable",
        generalized_gamma_subordinator(alpha / sp.gamma(1.0 - alpha), alpha, 1.0),
    )


def target_generalized_gamma(C: float, alpha: float, b: float) -> TargetLaw:
    return TargetLaw("self_decomposable", generalized_gamma_subordinator(C, alpha, b))


def target_stable(alpha: float) -> TargetLaw:
    return TargetLaw(
        "self_decomposable",
        generalized_gamma_subordinator(alpha / sp.gamma(1.0 - alpha), alpha, 0.0),
    )


def target_thorin_atoms(atoms) -> TargetLaw:
    """GGC target with a discrete Thorin measure: atoms ((y, weight), ...)."""
    atoms = tuple((float(y), float(w)) for y, w in atoms)
    if not atoms or any(y <= 0 or w <= 0 for y, w in atoms):
        raise DomainError("Thorin atoms need positive locations and weights")
    parts = [
        scaled_jump_spec(gamma_subordinator(w), DegenerateLaw(1.0 / y))
        for y, w in atoms
    ]
    spec = sum_specs(*parts) if len(parts) > 1 else parts[0]
    return TargetLaw("ggc_nu", spec, nu_atoms=atoms)


def target_ggc_plus(g: GGCSpec) -> TargetLaw:
    return TargetLaw("ggc_plus", ggc_subordinator(g), ggc=g)


# ---------------------------------------------------------------------------
# BDLP relations


def _fd(f, h_rel=1e-6):
    def d(w):
        w = np.asarray(w, float)
        h = np.maximum(h_rel, h_rel * np.abs(w))
        return (f(w + h) - f(np.maximum(w - h, 1e-12))) / (
            w + h - np.maximum(w - h, 1e-12)
        )

    return d


def u_delta_Z(target: TargetLaw, delta: float) -> LaplaceExponent:
    """Laplace exponent of the BDLP: psi_Z(w) = psi(w) + (w/delta) psi'(w)."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    psi, dpsi = target.psi.eval, target.psi.deriv
    ddpsi = _fd(dpsi)

    def ev(w):
        w = np.asarray(w, float)
        return psi(w) + w * dpsi(w) / delta

    def dv(w):
        w = np.asarray(w, float)
        return dpsi(w) * (1.0 + 1.0 / delta) + w * ddpsi(w) / delta

    return LaplaceExponent(ev, dv)


def thorin_bdlp_psi(atoms, delta: float):
    """Direct BDLP exponent for a discrete Thorin measure.

    psi_Z(w) = sum w_i [log(1 + w/y_i) + (1/delta) * w/(y_i + w)].
    """

    def ev(w):
        w = np.asarray(w, float)
        return sum(
            wt * (np.log1p(w / y) + w / (delta * (y + w))) for y, wt in atoms
        )

    return laplace_exponent(ev)


def sd_bdlp(target: TargetLaw, delta: float) -> tuple[LevyDensity, LevyDensity]:
    """OU-style densities for a self-decomposable target.

    rho_OU(x) = -rho(x) - x rho'(x) and
    rho_Z(x) = (1 - 1/delta) rho(x) - (x/delta) rho'(x) = rho + rho_OU/delta.
    Detected negativity of rho_OU on a grid raises.
    """
    if delta <= 0:
        raise DomainError("delta must be positive")
    rho, drho = target.rho.eval, target.rho.deriv
    if drho is None:
        raise UnsupportedLawError("target needs an analytic Levy-density derivative")
    _check_self_dec(target.spec)

    def rho_ou(x):
        x = np.asarray(x, float)
        return -np.asarray(rho(x), float) - x * np.asarray(drho(x), float)

    vals = rho_ou(_SD_GRID)
    if np.any(np.asarray(vals) < -1e-12):
        raise NotSelfDecomposableError("rho_OU takes negative values on the grid")

    def rho_z(x):
        x = np.asarray(x, float)
        return np.asarray(rho(x), float) + np.asarray(rho_ou(x), float) / delta

    return (
        LevyDensity(rho_ou, target.rho.total_mass),
        LevyDensity(rho_z, target.rho.total_mass),
    )


def ou_bdlp_spec(target: TargetLaw) -> SubordinatorSpec:
    """Samplable OU BDLP for catalog targets.

    gamma(theta) gives a compound Poisson process with exponential jumps
    at rate theta; the generalized-gamma family gives a rate-alpha copy of
    itself plus gamma(1-alpha)-jump compound Poisson; discrete-Thorin GGC
    targets give sums of exponential-jump compound Poisson parts.
    """
    spec = target.spec
    return _ou_bdlp_of(spec)


def _ou_bdlp_of(spec: SubordinatorSpec) -> SubordinatorSpec:
    if spec.family == "gamma":
        th = spec.params["theta"]
        return compound_poisson_subordinator(th, GammaLaw(1.0, 1.0))
    if spec.family == "gen_gamma":
        C, a, b = spec.params["C"], spec.params["alpha"], spec.params["b"]
        stable_part = generalized_gamma_subordinator(C * a, a, b)
        if b == 0.0:
            return stable_part
        rate = C * b**a * sp.gamma(1.0 - a)
        return sum_specs(
            stable_part, compound_poisson_subordinator(rate, GammaLaw(1.0 - a, 1.0 / b))
        )
    if spec.family == "ggc":
        # -rho - x rho' = theta E[exp(-x/R)/R]: exponential jumps scaled by R
        g = spec.params["ggc"]
        return compound_poisson_subordinator(
            g.theta, _GammaMarkJumpLaw(g.r_law, DegenerateLaw(1.0))
        )
    if spec.family == "scaled_jumps":
        y = spec.params["y_law"]
        return scaled_jump_spec(_ou_bdlp_of(spec.components[0]), y)
    if spec.family == "sum":
        return sum_specs(*[_ou_bdlp_of(c) for c in spec.components])
    raise UnsupportedLawError(
        f"no samplable OU BDLP construction for family {spec.family!r}"
    )


def u_delta_z_spec(target: TargetLaw, delta: float) -> SubordinatorSpec:
    """Samplable BDLP: Z = target-part + OU-part run at speed 1/delta."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    return sum_specs(target.spec, rate_scaled_spec(ou_bdlp_spec(target), 1.0 / delta))


def _require_bounded(y_law: Law) -> None:
    if y_law.bound is None or not math.isfinite(y_law.bound):
        raise PreconditionError("the pairing variable Y must be bounded")


def driving_L(target: TargetLaw, delta: float, y_law: Law) -> DesignOutput:
    """Driving law for a kernel paired as R*Y ~ U**(1/delta).

    psi_L(w) = E[psi(w Y)] + (w/delta) E[Y psi'(w Y)]; realized by marking
    every jump of the BDLP Z with an independent copy of Y, so the output
    stays exactly simulable whenever Z is.
    """
    _require_bounded(y_law)
    z = u_delta_z_spec(target, delta)
    l_spec = scaled_jump_spec(z, y_law, tag="scaled_jumps")
    return DesignOutput(l_spec, "u_delta_mark", z_spec=z, notes={"delta": delta})


def gplus_L(theta: float, v_law: Law, y_law: Law, delta: float) -> DesignOutput:
    """Driving law for a GGC(theta, V) target marginal.

    L = GGC(theta, V*Y) subordinator plus compound Poisson at rate
    theta/delta with jumps gamma(1) * V * Y; V = 1 recovers the gamma
    target and the variance-gamma preset.
    """
    if theta <= 0 or delta <= 0:
        raise DomainError("theta and delta must be positive")
    _require_bounded(y_law)
    if v_law.bound is None or not math.isfinite(v_law.bound):
        raise PreconditionError("gplus design needs a bounded V")
    mix = _simplify_product(v_law, y_law)
    ggc_part = ggc_subordinator(GGCSpec(theta, mix))
    cp_part = compound_poisson_subordinator(
        theta / delta, _GammaMarkJumpLaw(v_law, y_law)
    )
    l_spec = sum_specs(ggc_part, cp_part)
    return DesignOutput(
        l_spec, "gplus", notes={"theta": theta, "delta": delta}
    )


def _simplify_product(a: Law, b: Law) -> Law:
    if a.is_constant and a.constant_value == 1.0:
        return b
    if b.is_constant and b.constant_value == 1.0:
        return a
    return ProductLaw(a, b)


class _GammaMarkJumpLaw(Law):
    """Jump law gamma(1) * V * Y for the gplus compound Poisson part."""

    def __init__(self, v_law: Law, y_law: Law):
        self.v_law, self.y_law = v_law, y_law
        if v_law.mean is not None and y_law.mean is not None:
            self.mean = v_law.mean * y_law.mean
        self.bound = None

    def sample(self, rng, size=None):
        return (
            rng.gamma(1.0, size=size)
            * self.v_law.sample(rng, size)
            * self.y_law.sample(rng, size)
        )

    def laplace(self, w):
        w = np.atleast_1d(np.asarray(w, float))
        out = np.array(
            [
                _expect_over_law(
                    self.v_law,
                    lambda v, _w=wi: _expect_over_law(
                        self.y_law, lambda y: 1.0 / (1.0 + _w * v * y)
                    ),
                )
                for wi in w
            ]
        )
        return out if out.size > 1 else float(out[0])


# ---------------------------------------------------------------------------
# gamma decompositions


def _lt_of_x(v_law: Law):
    """Vectorized s -> E[exp(-s (1-V)/V)] built from the law of V."""
    if v_law.is_constant:
        lam = (1.0 - v_law.constant_value) / v_law.constant_value
        return lambda s: np.exp(-lam * np.asarray(s, float))
    from .laws import GFractionLaw

    if isinstance(v_law, GFractionLaw) and v_law.alpha == 0.0:
        # X = exp(pi * Cauchy); the log substitution tames both tails, and
        # the grid reaches 1e-300 because this law's straddle mass diverges
        # so slowly that simulation needs truncation levels that deep
        grid = np.geomspace(1e-300, 80.0, 1400)

        def pointwise(s):
            a = -30.0
            head = 0.5 + math.atan(a / math.pi) / math.pi
            b = max(math.log(80.0 / s), a + 1.0)
            body = quad_checked(
                lambda u: math.exp(-s * math.exp(u)) / (math.pi**2 + u * u),
                a,
                b,
                rel=1e-9,
                points=[math.log(1.0 / s)] if s < 1.0 else None,
            )
            return head + body

        vals = [pointwise(float(s)) for s in grid]
    else:
        grid = np.geomspace(1e-12, 80.0, 500)
        vals = [
            # transform values live in [0, 1]: an absolute target is the
            # right frame, and boundary-layer integrands need the slack
            _expect_over_law(
                v_law,
                lambda v, _s=s: math.exp(-_s * (1.0 - v) / v) if v > 0 else 0.0,
                abs_tol=1e-9,
            )
            for s in grid
        ]
    vals = np.clip(np.asarray(vals), 0.0, 1.0)
    itp = interpolate.PchipInterpolator(np.log(grid), vals, extrapolate=True)
    lo, hi = math.log(grid[0]), math.log(grid[-1])

    def lt(s):
        s = np.asarray(s, float)
        out = itp(np.clip(np.log(np.maximum(s, 1e-320)), lo, hi))
        return np.clip(out, 0.0, 1.0)

    return lt


def straddle_subordinator(v_law: Law | None = None, lt_x=None) -> SubordinatorSpec:
    """Subordinator with Levy density s^-1 e^-s (1 - E[exp(-s X)]).

    X = (1-V)/V; pass either the law of V or a vectorized Laplace
    transform of X directly.  Total mass is E[-log V], possibly infinite
    (the law is then of infinite activity and only the truncated-jump
    simulation route applies).
    """
    if lt_x is None:
        if v_law is None:
            raise DomainError("need either v_law or lt_x")
        lt_x = _lt_of_x(v_law)

    def rho(s):
        s = np.asarray(s, float)
        with np.errstate(divide="ignore"):
            return np.exp(-s) / s * (1.0 - np.asarray(lt_x(s), float))

    # psi(w) = log(1+w) - E[log(1+wV)] when V is known; else numeric
    if v_law is not None:
        def psi(w):
            w = np.atleast_1d(np.asarray(w, float))
            out = np.array(
                [
                    math.log1p(wi)
                    - _expect_over_law(v_law, lambda v, _w=wi: math.log1p(_w * v))
                    for wi in w
                ]
            )
            return out if out.size > 1 else float(out[0])

        psi_le = laplace_exponent(psi)
        # total mass E[-log V]: computed from the truncated straddle mass,
        # declared infinite when it is still growing as the cutoff shrinks
        from .skeleton import _straddle_rate

        m_coarse = _straddle_rate(lt_x, 1e-6)
        m_fine = _straddle_rate(lt_x, 1e-12)
        growing = m_fine - m_coarse > 0.01 * max(m_fine, 1e-9)
        mass = math.inf if (not math.isfinite(m_fine) or growing) else float(m_fine)
    else:
        def psi(w):
            w = np.atleast_1d(np.asarray(w, float))
            out = np.array(
                [
                    quad_checked(
                        lambda s, _w=wi: -math.expm1(-_w * s) * float(rho(s)),
                        0.0,
                        60.0,
                        rel=1e-9,
                    )
                    for wi in w
                ]
            )
            return out if out.size > 1 else float(out[0])

        psi_le = laplace_exponent(psi)
        mass = math.inf
    return SubordinatorSpec(
        "straddle", {"lt_x": lt_x, "v_law": v_law}, psi_le, LevyDensity(rho, mass)
    )


def gamma_split(v_law: Law) -> tuple[SubordinatorSpec, GGCSpec]:
    """Split gamma(theta) as Sigma_theta(V) + gamma(theta) * M_theta.

    Returns the compound-Poisson straddling part (rate E[-log V], jump
    density s^-1 e^-s (1 - E[e^-sX]) / rate) and the complementary
    GGC(1, V) specification; the caller evaluates both at Thorin mass
    theta.  V identically one degenerates; E[-log V] = inf is refused
    (use ``straddle_subordinator`` directly for those laws).
    """
    if v_law.bound is None or v_law.bound > 1.0 + 1e-12:
        raise DomainError("the split needs V supported in (0, 1]")
    if v_law.is_constant and v_law.constant_value == 1.0:
        raise DegenerateSplitError("V = 1 leaves nothing to split off")
    sigma = straddle_subordinator(v_law)
    if not math.isfinite(sigma.rho.total_mass):
        raise UnsupportedLawError(
            "E[-log V] is infinite; the straddling part is not compound Poisson"
        )
    if sigma.rho.total_mass <= 1e-12:
        raise DegenerateSplitError("V = 1 a.s.; degenerate split")
    return sigma, GGCSpec(1.0, v_law)


# ---------------------------------------------------------------------------
# CGMY machinery and presets


def _w_mix_expect(f, alpha: float) -> float:
    """E[f(W)] for W = gamma(alpha)/gamma(1/2), the beta-prime(alpha, 1/2) mix."""
    lnb = sp.betaln(alpha, 0.5)

    def dens(w):
        return math.exp(
            (alpha - 1.0) * math.log(w) - (alpha + 0.5) * math.log1p(w) - lnb
        )

    return quad_checked(lambda w: f(w) * dens(w), 0.0, np.inf, rel=1e-9)


def cgmy_v_laplace(s: float, alpha: float, G: float, M: float, variant: str) -> float:
    """E[exp(-s V)] for the CGMY tempering mixture V.

    ``variant='paper'`` uses V = (4MG + B^2 W)/2 as printed in the source
    construction; ``variant='tilt'`` uses V = (GM + B^2 W)/2, the choice
    implied by the exponential tilt exp(-GM s / 2).  Both are kept and the
    verification battery reports which one reproduces the canonical
    tempered density.
    """
    B = (G + M) / 2.0
    gm = {"paper": 4.0 * M * G, "tilt": G * M}[variant]
    return math.exp(-s * gm / 2.0) * _w_mix_expect(
        lambda w: math.exp(-s * B * B * w / 2.0), alpha
    )


def cgmy_v_mean_laplace(s: float, alpha: float, G: float, M: float, variant: str) -> float:
    """E[V exp(-s V)] for the same mixture."""
    B = (G + M) / 2.0
    gm = {"paper": 4.0 * M * G, "tilt": G * M}[variant]
    tiltf = math.exp(-s * gm / 2.0)
    first = gm / 2.0 * cgmy_v_laplace(s, alpha, G, M, variant)
    second = (
        tiltf
        * B
        * B
        / 2.0
        * _w_mix_expect(lambda w: w * math.exp(-s * B * B * w / 2.0), alpha)
    )
    return first + second


def cgmy_subordinator_density(s, alpha: float, G: float, M: float, variant: str = "tilt"):
    """Levy density of the CGMY time change: C0 s^(-alpha-1) E[e^(-sV)]."""
    c0 = 2.0**alpha * sp.gamma(alpha) / sp.gamma(2.0 * alpha)
    s_arr = np.atleast_1d(np.asarray(s, float))
    out = np.array(
        [c0 * si ** (-alpha - 1.0) * cgmy_v_laplace(si, alpha, G, M, variant) for si in s_arr]
    )
    return out if out.size > 1 else float(out[0])


def cgmy_canonical_density(s, alpha: float, G: float, M: float):
    """The tilt form: C0 e^(-GM s/2) s^(-alpha-1) E[exp(-s B^2 W / 2)]."""
    c0 = 2.0**alpha * sp.gamma(alpha) / sp.gamma(2.0 * alpha)
    B = (G + M) / 2.0
    s_arr = np.atleast_1d(np.asarray(s, float))
    out = np.array(
        [
            c0
            * math.exp(-G * M * si / 2.0)
            * si ** (-alpha - 1.0)
            * _w_mix_expect(lambda w, _s=si: math.exp(-_s * B * B * w / 2.0), alpha)
            for si in s_arr
        ]
    )
    return out if out.size > 1 else float(out[0])


def cgmy_levy_density(
    s,
    alpha: float,
    G: float,
    M: float,
    delta: float,
    y_law: Law | None = None,
    variant: str = "tilt",
):
    """Driving-law Levy density for the CGMY design.

    rho_L(s) = (1+alpha/delta) C0 s^(-alpha-1) E[Y^alpha e^(-sV/Y)]
             + (C0/delta) s^(-alpha) E[Y^(alpha-1) V e^(-sV/Y)],
    normalized so Y = 1 collapses to the BDLP density.  The second term
    is compound Poisson only for alpha < 1/2 (the V mixture then has a
    finite alpha-moment); otherwise it is treated as a general
    infinite-mass component.
    """
    c0 = 2.0**alpha * sp.gamma(alpha) / sp.gamma(2.0 * alpha)
    s_arr = np.atleast_1d(np.asarray(s, float))

    def at(si):
        if y_law is None or (y_law.is_constant and y_law.constant_value == 1.0):
            e0 = cgmy_v_laplace(si, alpha, G, M, variant)
            e1 = cgmy_v_mean_laplace(si, alpha, G, M, variant)
        else:
            _require_bounded(y_law)
            e0 = _expect_over_law(
                y_law,
                lambda y, _s=si: y**alpha * cgmy_v_laplace(_s / y, alpha, G, M, variant),
            )
            e1 = _expect_over_law(
                y_law,
                lambda y, _s=si: y ** (alpha - 1.0)
                * cgmy_v_mean_laplace(_s / y, alpha, G, M, variant),
            )
        return (
            (1.0 + alpha / delta) * c0 * si ** (-alpha - 1.0) * e0
            + c0 / delta * si ** (-alpha) * e1
        )

    out = np.array([at(si) for si in s_arr])
    return out if out.size > 1 else float(out[0])


def _cgmy_design(params: dict, delta: float, y_law: Law | None) -> DesignOutput:
    alpha = params["alpha"]
    G, M = params["G"], params["M"]
    variant = params.get("variant", "tilt")
    if variant not in ("paper", "tilt"):
        raise DomainError("cgmy variant must be 'paper' or 'tilt'")
    if not 0.0 < alpha < 1.0:
        raise DomainError("CGMY needs 0 < alpha < 1 (alpha = d/2)")
    notes = {"variant": variant, "delta": delta}
    if alpha >= 0.5:
        notes["warning"] = (
            "alpha >= 1/2: E[V^alpha] is infinite, the s^-alpha term is not "
            "compound Poisson and is treated as a general Levy component"
        )

    def rho(s):
        return cgmy_levy_density(s, alpha, G, M, delta, y_law, variant)

    c0 = 2.0**alpha * sp.gamma(alpha) / sp.gamma(2.0 * alpha)
    g1a = sp.gamma(1.0 - alpha)

    def psi_target(w):
        # C0 Gamma(1-alpha)/alpha * E[(V+w)^alpha - V^alpha]
        w_arr = np.atleast_1d(np.asarray(w, float))
        B = (G + M) / 2.0
        gm = {"paper": 4.0 * M * G, "tilt": G * M}[variant]
        out = np.array(
            [
                c0
                * g1a
                / alpha
                * _w_mix_expect(
                    lambda v, _w=wi: ((gm + B * B * v) / 2.0 + _w) ** alpha
                    - ((gm + B * B * v) / 2.0) ** alpha,
                    alpha,
                )
                for wi in w_arr
            ]
        )
        return out if out.size > 1 else float(out[0])

    def dpsi_target(w):
        w_arr = np.atleast_1d(np.asarray(w, float))
        B = (G + M) / 2.0
        gm = {"paper": 4.0 * M * G, "tilt": G * M}[variant]
        out = np.array(
            [
                c0
                * g1a
                * _w_mix_expect(
                    lambda v, _w=wi: ((gm + B * B * v) / 2.0 + _w) ** (alpha - 1.0),
                    alpha,
                )
                for wi in w_arr
            ]
        )
        return out if out.size > 1 else float(out[0])

    target_psi = LaplaceExponent(psi_target, dpsi_target)

    def psi_l(w):
        w_arr = np.atleast_1d(np.asarray(w, float))

        def one(wi):
            if y_law is None or (y_law.is_constant and y_law.constant_value == 1.0):
                return float(target_psi.eval(wi)) + wi / delta * float(
                    target_psi.deriv(wi)
                )
            return _expect_over_law(
                y_law, lambda y: float(target_psi.eval(wi * y))
            ) + wi / delta * _expect_over_law(
                y_law, lambda y: y * float(target_psi.deriv(wi * y))
            )

        out = np.array([one(wi) for wi in w_arr])
        return out if out.size > 1 else float(out[0])

    l_spec = SubordinatorSpec(
        "cgmy_design",
        {"alpha": alpha, "G": G, "M": M, "delta": delta, "variant": variant},
        laplace_exponent(psi_l),
        LevyDensity(rho, math.inf),
    )
    return DesignOutput(l_spec, "cgmy", notes=notes)


def preset_L(model: str, params: dict, delta: float = 1.0, y_law: Law | None = None) -> DesignOutput:
    """Named driving-law presets.

    ``vg``: gamma(theta) marginal -> variance-gamma prices.
    ``nig``: tilted-stable(alpha) marginal (alpha = 1/2 is the NIG case):
    L = tilted-stable sped up by (1 + alpha/delta) plus gamma(1-alpha)
    jumps at rate alpha/delta, all marked by Y.
    ``cgmy``: the tempered-stable mixture design (V-variant switch).
    ``short_memory``: BDLP with rho_Z(x) = -x rho'(x) for the target, the
    law the short-memory kernel must be driven by.
    """
    if delta <= 0:
        raise DomainError("delta must be positive")
    y = y_law if y_law is not None else DegenerateLaw(1.0)
    if model == "vg":
        out = gplus_L(params["theta"], DegenerateLaw(1.0), y, delta)
        return DesignOutput(out.l_spec, "vg", notes=out.notes)
    if model == "nig":
        alpha = params.get("alpha", 0.5)
        target = target_tilted_stable(alpha)
        des = driving_L(target, delta, y)
        return DesignOutput(des.l_spec, "nig", z_spec=des.z_spec, notes=des.notes)
    if model == "cgmy":
        return _cgmy_design(params, delta, y_law)
    if model == "short_memory":
        target = params["target"]
        z = u_delta_z_spec(target, 1.0)
        return DesignOutput(z, "short_memory", z_spec=z)
    raise DomainError(f"unknown preset {model!r}")
