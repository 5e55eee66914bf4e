import math

import mpmath
import numpy as np
import pytest
from scipy import special as sp

from quantclock.errors import UnsupportedLawError
from quantclock.laws import BetaLaw, DegenerateLaw, GammaLaw, UniformLaw
from quantclock.levy import (
    GGCSpec,
    compound_poisson_subordinator,
    gamma_subordinator,
    generalized_gamma_subordinator,
    ggc_subordinator,
    rate_scaled_spec,
    scaled_jump_spec,
    sum_specs,
)
from quantclock.skeleton import (
    _gamma_tail,
    _gengamma_tail,
    _gamma_tail_mass,
    _gengamma_tail_mass,
    component_drift,
    component_jumps,
    component_rate,
    sample_jumps,
)
from quantclock.verify import ks2


def test_gamma_tail_mass_is_exponential_integral():
    for eps in (1e-8, 1e-4, 0.3, 2.0):
        oracle = float(mpmath.e1(eps))
        assert _gamma_tail_mass(eps) == pytest.approx(oracle, rel=1e-12)


def test_gengamma_tail_mass_oracle():
    for (a, b, eps) in [(0.5, 1.0, 1e-6), (0.3, 2.0, 1e-4), (0.7, 0.0, 1e-5)]:
        oracle = float(
            mpmath.quad(
                lambda s: s ** (-a - 1) * mpmath.exp(-b * s), [eps, 1, 50, mpmath.inf]
            )
        )
        assert _gengamma_tail_mass(a, b, eps) == pytest.approx(oracle, rel=1e-9)


def test_gamma_tail_sampler_density(rng, assert_ks):
    eps = 1e-4
    draws = _gamma_tail(rng, eps, 100_000)
    assert np.all(draws >= eps)
    # numeric inverse-cdf reference on the same density
    grid = np.geomspace(eps, 40.0, 4000)
    pdf = np.exp(-grid) / grid
    cdf = np.concatenate([[0.0], np.cumsum((pdf[1:] + pdf[:-1]) / 2 * np.diff(grid))])
    cdf /= cdf[-1]
    ref = np.interp(rng.random(100_000), cdf, grid)
    assert_ks(ks2(draws, ref))


def test_gengamma_tail_sampler_density(rng, assert_ks):
    a, b, eps = 0.5, 1.0, 1e-4
    draws = _gengamma_tail(rng, a, b, eps, 100_000)
    grid = np.geomspace(eps, 40.0, 4000)
    pdf = grid ** (-a - 1) * np.exp(-b * grid)
    cdf = np.concatenate([[0.0], np.cumsum((pdf[1:] + pdf[:-1]) / 2 * np.diff(grid))])
    cdf /= cdf[-1]
    ref = np.interp(rng.random(100_000), cdf, grid)
    assert_ks(ks2(draws, ref))


def test_component_drift_formulas():
    eps = 1e-3
    g = gamma_subordinator(1.5)
    oracle = 1.5 * float(mpmath.quad(lambda s: mpmath.exp(-s), [0, eps]))
    assert component_drift(g, eps) == pytest.approx(oracle, rel=1e-12)
    gg = generalized_gamma_subordinator(0.8, 0.4, 2.0)
    oracle = 0.8 * float(
        mpmath.quad(lambda s: s ** (-0.4) * mpmath.exp(-2.0 * s), [0, eps])
    )
    assert component_drift(gg, eps) == pytest.approx(oracle, rel=1e-9)
    cp = compound_poisson_subordinator(2.0, GammaLaw(1.0))
    assert component_drift(cp, eps) == 0.0


def test_component_rate_scaled_and_sum():
    eps = 1e-5
    g = gamma_subordinator(1.0)
    assert component_rate(rate_scaled_spec(g, 0.5), eps) == pytest.approx(
        0.5 * component_rate(g, eps)
    )
    s = sum_specs(g, compound_poisson_subordinator(2.0, GammaLaw(1.0)))
    assert component_rate(s, eps) == pytest.approx(component_rate(g, eps) + 2.0)
    marked = scaled_jump_spec(g, BetaLaw(2.0, 1.0))
    assert component_rate(marked, eps) == pytest.approx(component_rate(g, eps))
    assert component_drift(marked, eps) == pytest.approx(
        component_drift(g, eps) * (2.0 / 3.0)
    )


def test_ggc_component_terminal_law(rng, assert_ks):
    # GGC(theta, c) jumps are gamma jumps scaled by c
    spec = ggc_subordinator(GGCSpec(1.0, DegenerateLaw(2.0)))
    from quantclock.clock import sample_subordinator_terminal

    vals = sample_subordinator_terminal(spec, 1.0, 100_000, rng, trunc=1e-7)
    assert_ks(ks2(vals, 2.0 * rng.gamma(1.0, size=100_000)))


def test_ggc_component_requires_finite_mean():
    from quantclock.laws import StableRatioLaw

    spec = ggc_subordinator(GGCSpec(1.0, StableRatioLaw(0.5)))
    with pytest.raises(UnsupportedLawError):
        component_drift(spec, 1e-6)


def test_rate_scaled_jumps_have_rescaled_times(rng):
    base = compound_poisson_subordinator(50.0, DegenerateLaw(1.0))
    spec = rate_scaled_spec(base, 0.5)
    pid, t, x = component_jumps(spec, np.array([2.0]), 1e-6, rng)
    assert np.all(t <= 2.0) and np.all(t > 0.0)
    # expected count: rate * factor * horizon = 50
    counts = [
        component_jumps(spec, np.array([2.0]), 1e-6, rng)[1].size for _ in range(200)
    ]
    assert abs(np.mean(counts) - 50.0) < 3.0 * np.std(counts) / math.sqrt(200)


def test_skeleton_total_matches_increments(rng):
    spec = gamma_subordinator(1.0)
    sk = sample_jumps(spec, 1.0, rng=rng, mode="grid", cells_per_unit=128)
    assert sk.total(1.0) == pytest.approx(sk.sizes.sum(), rel=1e-12)
    assert sk.trunc_level == 0.0
    assert sk.mode == "grid"
