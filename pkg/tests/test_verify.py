import math

import numpy as np
import pytest
from scipy import special as sp

from quantclock import rng as qrng
from quantclock.errors import DomainError
from quantclock.verify import (
    DEFAULT_OMEGA_GRID,
    empirical_lt,
    kolmogorov_sf,
    ks2,
    lt_match,
)


def test_empirical_lt_all_zero_samples():
    vals, ses = empirical_lt(np.zeros(500))
    assert np.allclose(vals, 1.0)
    assert np.allclose(ses, 0.0)


def test_empirical_lt_gamma_reference(rng):
    x = rng.gamma(1.0, size=100_000)
    vals, ses = empirical_lt(x, [1.0])
    assert abs(vals[0] - 0.5) < 3 * ses[0]


def test_empirical_lt_single_sample_flags_se():
    vals, ses = empirical_lt(np.array([2.0]), [1.0])
    assert vals[0] == pytest.approx(math.exp(-2.0))
    assert math.isnan(ses[0])  # undefined, not zero


def test_empirical_lt_rejects_bad_input():
    with pytest.raises(DomainError):
        empirical_lt(np.array([]))
    with pytest.raises(DomainError):
        empirical_lt(np.array([-1.0, 1.0]))


def test_lt_match_self_consistency(rng):
    t = 1.3
    x = rng.gamma(t, size=100_000)
    rep = lt_match(x, lambda w: math.log1p(w), t, tol=0.02)
    assert rep.passed
    assert rep.max_rel_err < 0.02


def test_lt_match_power(rng):
    # gamma(2) samples against the gamma(1) exponent must fail
    x = rng.gamma(2.0, size=100_000)
    rep = lt_match(x, lambda w: math.log1p(w), 1.0, tol=0.02)
    assert not rep.passed


def test_lt_match_needs_enough_samples(rng):
    with pytest.raises(DomainError):
        lt_match(rng.gamma(1.0, size=100), lambda w: w, 1.0)


def test_lt_report_serializes(rng):
    rep = lt_match(rng.gamma(1.0, size=5000), lambda w: math.log1p(w), 1.0)
    d = rep.to_dict()
    assert set(d) >= {"omega", "empirical", "analytic", "max_rel_err", "passed"}
    assert len(d["omega"]) == len(DEFAULT_OMEGA_GRID)


# ---------------------------------------------------------------------------
# two-sample KS


def test_ks2_identical_arrays():
    x = np.linspace(0, 1, 500)
    res = ks2(x, x)
    assert res.statistic == 0.0
    assert res.p_value == 1.0
    assert res.tie_warning  # every point tied


def test_ks2_disjoint_shift_power(rng):
    a = rng.random(10_000)
    b = rng.random(10_000) + 0.5
    res = ks2(a, b)
    assert res.p_value < 1e-10


def test_ks2_minimum_sizes(rng):
    with pytest.raises(DomainError):
        ks2(rng.random(50), rng.random(500))


def test_ks2_null_p_values_roughly_uniform():
    ps = []
    for seed in range(50):
        r = qrng.substream(seed, 77)
        ps.append(ks2(r.gamma(1.0, size=20_000), r.gamma(1.0, size=20_000)).p_value)
    med = float(np.median(ps))
    assert 0.2 <= med <= 0.8


def test_ks2_matches_scipy(rng):
    from scipy.stats import ks_2samp

    a = rng.standard_normal(5000)
    b = rng.standard_normal(6000) * 1.05
    ours = ks2(a, b)
    ref = ks_2samp(a, b, method="asymp")
    assert ours.statistic == pytest.approx(ref.statistic, abs=1e-12)
    # p-value oracle: the asymptotic Kolmogorov tail itself
    en = math.sqrt(5000 * 6000 / 11000)
    assert ours.p_value == pytest.approx(
        float(sp.kolmogorov(en * ours.statistic)), rel=1e-9
    )


def test_kolmogorov_sf_against_scipy():
    for lam in (0.3, 0.7, 1.0, 1.5, 2.5):
        assert kolmogorov_sf(lam) == pytest.approx(float(sp.kolmogorov(lam)), abs=1e-10)
    assert kolmogorov_sf(0.0) == 1.0
    assert kolmogorov_sf(10.0) == pytest.approx(0.0, abs=1e-12)


def test_null_calibration_rejection_rate():
    fails = 0
    runs = 200
    for seed in range(runs):
        r = qrng.substream(seed, 19, seed)
        if ks2(r.gamma(1.0, size=20_000), r.gamma(1.0, size=20_000)).p_value <= 1e-3:
            fails += 1
    assert fails / runs < 0.01


def test_lt_match_se_coverage():
    # |empirical - analytic| < 4 SE everywhere in at least 99% of runs
    hits = 0
    runs = 100
    for seed in range(runs):
        r = qrng.substream(seed, 78)
        x = r.gamma(1.0, size=20_000)
        emp, ses = empirical_lt(x)
        ana = np.array([(1.0 + w) ** -1.0 for w in DEFAULT_OMEGA_GRID])
        if np.all(np.abs(emp - ana) < 4 * ses):
            hits += 1
    assert hits >= 99
