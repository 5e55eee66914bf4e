import math

import mpmath
import numpy as np
import pytest
from scipy import stats

from quantclock import rng as qrng
from quantclock.errors import (
    DegenerateDError,
    DomainError,
    UnsupportedLawError,
)
from quantclock.ggc import (
    DirichletMeanLaw,
    double_cftp,
    double_cftp_many,
    ggc_sample,
    m1_density,
    m_theta_series,
    occupation_mean_density,
    psi_r,
    sample_m1,
)
from quantclock.laws import (
    BetaLaw,
    DegenerateLaw,
    Law,
    OccupationLaw,
    UniformLaw,
)
from quantclock.levy import GGCSpec, clock_psi, gamma_subordinator
from quantclock.quantiles import quantile_function
from quantclock.verify import ks2, lt_match


# ---------------------------------------------------------------------------
# log-moment Psi_R


def test_psi_r_point_mass():
    assert psi_r(3.0, DegenerateLaw(1.0)) == pytest.approx(math.log(2.0), rel=1e-12)
    # the indicator removes the atom exactly at x
    assert psi_r(1.0, DegenerateLaw(1.0)) == 0.0


def test_psi_r_uniform_at_singular_point():
    # oracle: int_0^1 log(1-r) dr = -1 exactly
    assert psi_r(1.0, UniformLaw()) == pytest.approx(-1.0, rel=1e-8)


def test_psi_r_uniform_interior_against_mpmath():
    x = 0.4
    oracle = float(
        mpmath.quad(lambda r: mpmath.log(abs(x - r)), [0, x, 1])
    )
    assert psi_r(x, UniformLaw()) == pytest.approx(oracle, rel=1e-8)


def test_psi_r_beta_against_mpmath():
    law = BetaLaw(2.0, 3.0)
    x = 0.55
    oracle = float(
        mpmath.quad(
            lambda r: mpmath.log(abs(x - r))
            * r
            * (1 - r) ** 2
            / mpmath.beta(2, 3),
            [0, x, 1],
        )
    )
    assert psi_r(x, law) == pytest.approx(oracle, rel=1e-7)


# ---------------------------------------------------------------------------
# the sine/log-moment density


def test_m1_density_point_mass_is_arcsine():
    law = DirichletMeanLaw(0.5, DegenerateLaw(1.0))
    for x in (0.1, 0.35, 0.8):
        target = 1.0 / (math.pi * math.sqrt(x * (1.0 - x)))
        assert m1_density(x, law) == pytest.approx(target, rel=1e-12)
    assert m1_density(1.2, law) == 0.0


@pytest.mark.parametrize(
    "law",
    [
        DirichletMeanLaw(0.5, DegenerateLaw(1.0)),
        DirichletMeanLaw(0.7, UniformLaw()),
        DirichletMeanLaw(0.4, BetaLaw(2.0, 1.0)),
    ],
)
def test_m1_density_normalizes(law):
    val = float(
        mpmath.quad(lambda x: m1_density(float(x), law), [0, 0.25, 0.5, 0.75, 1])
    )
    assert val == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("alpha,p", [(0.5, 0.5), (0.3, 0.6)])
def test_occupation_mean_density_matches_generic_form(alpha, p):
    law = DirichletMeanLaw(p, OccupationLaw(alpha))
    for y in (0.15, 0.5, 0.85):
        closed = float(occupation_mean_density(y, alpha, p))
        generic = m1_density(y, law)
        assert closed == pytest.approx(generic, rel=1e-6)


def test_occupation_mean_density_printed_value():
    # alpha = 1/2, p = 1/2 collapses to (2/pi) y^(-1/2) (1-y)^(1/2)
    y = 0.5
    assert float(occupation_mean_density(y, 0.5, 0.5)) == pytest.approx(
        2.0 / math.pi * y**-0.5 * (1.0 - y) ** 0.5, rel=1e-12
    )


def test_occupation_mean_density_normalizes():
    val = float(
        mpmath.quad(lambda y: float(occupation_mean_density(float(y), 0.3, 0.6)), [0, 0.5, 1])
    )
    assert val == pytest.approx(1.0, abs=1e-8)


# ---------------------------------------------------------------------------
# rejection sampler


def test_sample_m1_point_mass_matches_arcsine(rng, assert_ks):
    law = DirichletMeanLaw(0.5, DegenerateLaw(1.0))
    draws, rate = sample_m1(law, rng, 100_000)
    assert rate > 0.2
    assert_ks(ks2(draws, rng.beta(0.5, 0.5, 100_000)))


def test_sample_m1_degenerate_full_mass(rng):
    # p = 1 with constant mixing: the mean is that constant
    law = DirichletMeanLaw(1.0, DegenerateLaw(2.0))
    draws, rate = sample_m1(law, rng, 500)
    assert rate == 1.0
    assert np.all(draws <= 2.0) and np.all(draws == 2.0)


def test_sample_m1_occupation_preset_chi_square(rng):
    alpha = p = 0.5
    law = DirichletMeanLaw(
        p,
        OccupationLaw(alpha),
        density=lambda y: occupation_mean_density(y, alpha, p),
    )
    draws, _ = sample_m1(law, rng, 60_000)
    edges = np.linspace(0.0, 1.0, 51)
    probs = np.array(
        [
            float(
                mpmath.quad(
                    lambda y: float(occupation_mean_density(float(y), alpha, p)), [a, b]
                )
            )
            for a, b in zip(edges[:-1], edges[1:])
        ]
    )
    probs /= probs.sum()
    counts, _ = np.histogram(draws, edges)
    chi2 = float(np.sum((counts - draws.size * probs) ** 2 / (draws.size * probs)))
    assert stats.chi2.sf(chi2, 49) > 1e-3


# ---------------------------------------------------------------------------
# Double CFTP


def test_cftp_bernoulli_piece_gives_gamma_half(rng, assert_ks):
    law = DirichletMeanLaw(0.5, DegenerateLaw(1.0))
    m = double_cftp_many(law, rng, 30_000)
    prod = rng.gamma(1.0, size=m.size) * m
    assert_ks(ks2(prod, rng.gamma(0.5, size=m.size)))


def _uniform_mean_density(x):
    # closed form for the p = 1, uniform-mixing Dirichlet mean:
    # (e/pi) sin(pi x) x^-x (1-x)^-(1-x)
    x = np.asarray(x, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            math.e
            / math.pi
            * np.sin(math.pi * x)
            * x**-x
            * (1.0 - x) ** -(1.0 - x)
        )
    return np.where((x > 0) & (x < 1), out, 0.0)


def test_generic_density_matches_uniform_closed_form():
    law = DirichletMeanLaw(1.0, UniformLaw())
    for x in (0.1, 0.3, 0.5, 0.77, 0.95):
        assert m1_density(x, law) == pytest.approx(
            float(_uniform_mean_density(x)), rel=1e-8
        )


def test_cftp_matches_rejection_path(rng, assert_ks):
    # p = 1 with uniform mixing: both exact samplers target the same law
    law = DirichletMeanLaw(1.0, UniformLaw(), density=_uniform_mean_density)
    via_cftp = double_cftp_many(law, rng, 30_000)
    via_rej, _ = sample_m1(law, rng, 30_000)
    assert_ks(ks2(via_cftp, via_rej))


def test_cftp_fixed_point_property(rng, assert_ks):
    law = DirichletMeanLaw(0.6, BetaLaw(0.5, 0.5))
    m = double_cftp_many(law, rng, 50_000)
    u = rng.random(m.size)
    d = law.sample_d(rng, m.size)
    assert_ks(ks2(u * m + (1.0 - u) * d, m))


def test_cftp_misdeclared_bound_raises(rng):
    class LyingBound(Law):
        bound = 0.4

        def sample(self, rng, size=None):
            return rng.random(size)

    law = DirichletMeanLaw(0.9, LyingBound())
    with pytest.raises(DomainError):
        double_cftp_many(law, rng, 2_000)


def test_cftp_degenerate_mixing_detected(rng):
    class HiddenConstant(Law):
        bound = 1.0

        def sample(self, rng, size=None):
            return 1.0 if size is None else np.ones(size)

    law = DirichletMeanLaw(1.0, HiddenConstant())
    import quantclock.ggc as ggc_mod

    old = ggc_mod._BACKWARD_CAP
    ggc_mod._BACKWARD_CAP = 5_000
    try:
        with pytest.raises(DegenerateDError):
            double_cftp(law, rng)
    finally:
        ggc_mod._BACKWARD_CAP = old


def test_cftp_declared_constant_shortcut(rng):
    law = DirichletMeanLaw(1.0, DegenerateLaw(0.7))
    assert double_cftp(law, rng) == 0.7


# ---------------------------------------------------------------------------
# GGC marginal sampling


def test_ggc_sample_integer_mass_is_gamma(rng, assert_ks):
    g = GGCSpec(2.0, DegenerateLaw(1.0))
    draws = ggc_sample(g, 1.0, rng, size=100_000)
    assert_ks(ks2(draws, rng.gamma(2.0, size=100_000)))


def test_ggc_sample_half_mass_is_gamma_half(rng, assert_ks):
    g = GGCSpec(0.5, DegenerateLaw(1.0))
    draws = ggc_sample(g, 1.0, rng, size=60_000)
    assert_ks(ks2(draws, rng.gamma(0.5, size=60_000)))


def test_ggc_sample_segmentation_consistency(rng, assert_ks):
    # one piece of mass 1 vs two pieces of mass 1/2 each
    g1 = GGCSpec(1.0, UniformLaw())
    one = ggc_sample(g1, 1.0, rng, size=50_000)
    g2 = GGCSpec(2.0, UniformLaw())
    two = ggc_sample(g2, 0.5, rng, size=50_000)
    assert_ks(ks2(one, two))


def test_ggc_sample_matches_perpetuity_oracle(rng, assert_ks):
    # brute-force reference: 60-term truncation of the mean perpetuity
    g = GGCSpec(1.0, UniformLaw())
    exact = ggc_sample(g, 1.0, rng, size=50_000)
    oracle = rng.gamma(1.0, size=50_000) * m_theta_series(1.0, UniformLaw(), rng, 50_000)
    assert_ks(ks2(exact, oracle))


def test_ggc_sample_clock_marginal_transform(rng):
    # GGC(theta t, R) with R the arcsine variable must match the arcsine
    # clock's exact exponent
    theta, t = 1.0, 0.8
    g = GGCSpec(theta, BetaLaw(0.5, 0.5))
    draws = ggc_sample(g, t, rng, size=100_000)
    q = quantile_function("arcsine")
    spec = gamma_subordinator(theta)
    rep = lt_match(draws, lambda w: clock_psi(q, spec.psi, 1.0, w), t, tol=0.02)
    assert rep.passed, rep.to_dict()


def test_ggc_sample_rejection_route(rng, assert_ks):
    g = GGCSpec(0.5, DegenerateLaw(1.0))
    draws = ggc_sample(g, 1.0, rng, size=40_000, method="rejection")
    assert_ks(ks2(draws, rng.gamma(0.5, size=40_000)))


def test_ggc_sample_rejects_bad_time(rng):
    with pytest.raises(DomainError):
        ggc_sample(GGCSpec(1.0, UniformLaw()), 0.0, rng)


def test_dirichlet_mean_law_validation():
    with pytest.raises(DomainError):
        DirichletMeanLaw(0.0, UniformLaw())
    with pytest.raises(DomainError):
        DirichletMeanLaw(1.2, UniformLaw())
    with pytest.raises(UnsupportedLawError):
        law = DirichletMeanLaw(0.5, type("S", (Law,), {"sample": lambda s, r, n=None: 0.5})())
        law.d_cdf(0.3)
