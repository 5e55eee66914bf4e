import math

import numpy as np
import pytest
import sympy as sym

from quantclock import rng as qrng
from quantclock.bdlp import (
    DesignOutput,
    cgmy_canonical_density,
    cgmy_levy_density,
    cgmy_subordinator_density,
    driving_L,
    gamma_split,
    gplus_L,
    ou_bdlp_spec,
    preset_L,
    sd_bdlp,
    straddle_subordinator,
    target_gamma,
    target_generalized_gamma,
    target_ggc_plus,
    target_thorin_atoms,
    target_tilted_stable,
    thorin_bdlp_psi,
    u_delta_Z,
    u_delta_z_spec,
)
from quantclock.clock import sample_clock_terminal, sample_subordinator_terminal
from quantclock.errors import (
    DegenerateSplitError,
    DomainError,
    NotSelfDecomposableError,
    PreconditionError,
    UnsupportedLawError,
)
from quantclock.laws import (
    BetaLaw,
    DegenerateLaw,
    GammaLaw,
    GFractionLaw,
    KumaraswamyLaw,
    PowerOfLaw,
    UniformLaw,
)
from quantclock.levy import (
    GGCSpec,
    LevyDensity,
    LaplaceExponent,
    SubordinatorSpec,
    clock_psi,
    psi_eval,
    psi_from_rho,
)
from quantclock.quantiles import from_law, quantile_function
from quantclock.verify import ks2, lt_match

GRID = np.array([0.3, 1.0, 2.7, 6.0])


# ---------------------------------------------------------------------------
# BDLP exponent: symbolic-differentiation oracles


def _sym_bdlp(psi_expr, w, delta):
    return psi_expr + w * sym.diff(psi_expr, w) / delta


def test_u_delta_z_gamma_symbolic():
    w = sym.symbols("w", positive=True)
    theta = 1.3
    oracle = sym.lambdify(w, _sym_bdlp(theta * sym.log(1 + w), w, 1.0))
    z = u_delta_Z(target_gamma(theta), 1.0)
    got = np.asarray(z.eval(GRID))
    ref = np.array([oracle(wi) for wi in GRID])
    assert np.max(np.abs(got - ref) / ref) < 1e-6


def test_u_delta_z_tilted_symbolic():
    w = sym.symbols("w", positive=True)
    a, delta = 0.6, 2.0
    oracle = sym.lambdify(w, _sym_bdlp((1 + w) ** a - 1, w, delta))
    z = u_delta_Z(target_tilted_stable(a), delta)
    got = np.asarray(z.eval(GRID))
    ref = np.array([oracle(wi) for wi in GRID])
    assert np.max(np.abs(got - ref) / ref) < 1e-6


def test_u_delta_z_small_frequency_limit():
    z = u_delta_Z(target_gamma(2.0), 0.7)
    assert float(z.eval(1e-10)) == pytest.approx(0.0, abs=1e-8)


def test_samplable_bdlp_matches_formula():
    target = target_gamma(1.3)
    z_direct = u_delta_Z(target, 1.5)
    z_spec = u_delta_z_spec(target, 1.5)
    got = np.array([psi_eval(z_spec, w) for w in GRID])
    ref = np.asarray(z_direct.eval(GRID))
    assert np.allclose(got, ref, rtol=1e-10)


# ---------------------------------------------------------------------------
# self-decomposable route


def test_sd_bdlp_gamma_symbolic():
    x = sym.symbols("x", positive=True)
    theta = 1.3
    rho = theta * sym.exp(-x) / x
    ou_expr = sym.lambdify(x, -rho - x * sym.diff(rho, x))
    rho_ou, rho_z = sd_bdlp(target_gamma(theta), 1.0)
    xs = np.array([0.2, 1.0, 3.0])
    assert np.allclose(rho_ou.eval(xs), [ou_expr(v) for v in xs], rtol=1e-9)
    # rho_OU for the gamma target is theta * exp(-x): compound Poisson
    assert np.allclose(rho_ou.eval(xs), theta * np.exp(-xs), rtol=1e-12)
    # rho_Z = rho + rho_OU at delta = 1
    assert np.allclose(
        rho_z.eval(xs), theta * np.exp(-xs) / xs + theta * np.exp(-xs), rtol=1e-12
    )


def test_sd_bdlp_generalized_gamma_symbolic():
    x = sym.symbols("x", positive=True)
    C, a, b = 0.9, 0.35, 1.7
    rho = C * x ** (-a - 1) * sym.exp(-b * x)
    ou_expr = sym.lambdify(x, -rho - x * sym.diff(rho, x))
    rho_ou, _ = sd_bdlp(target_generalized_gamma(C, a, b), 2.0)
    xs = np.array([0.1, 0.8, 2.5])
    assert np.allclose(rho_ou.eval(xs), [ou_expr(v) for v in xs], rtol=1e-9)
    # closed form C x^(-a-1) e^(-bx) (a + bx)
    assert np.allclose(
        rho_ou.eval(xs), C * xs ** (-a - 1) * np.exp(-b * xs) * (a + b * xs), rtol=1e-12
    )


def test_sd_bdlp_large_delta_limit():
    target = target_gamma(1.0)
    _, rho_z = sd_bdlp(target, 1e9)
    xs = np.array([0.5, 1.0, 2.0])
    assert np.allclose(rho_z.eval(xs), target.rho.eval(xs), rtol=1e-6)


def test_sd_bdlp_rejects_non_self_decomposable():
    # rho(s) = s e^-s has increasing s*rho near zero
    bad = SubordinatorSpec(
        "custom",
        {},
        LaplaceExponent(lambda w: np.asarray(w, float), lambda w: 1.0),
        LevyDensity(
            lambda s: np.asarray(s, float) * np.exp(-np.asarray(s, float)),
            1.0,
            deriv=lambda s: np.exp(-np.asarray(s, float))
            * (1.0 - np.asarray(s, float)),
        ),
    )
    from quantclock.bdlp import TargetLaw

    with pytest.raises(NotSelfDecomposableError):
        sd_bdlp(TargetLaw("self_decomposable", bad), 1.0)


def test_ou_bdlp_spec_consistency():
    # the samplable OU construction must satisfy psi_OU(w) = w * psi'(w)
    for target in (target_gamma(1.2), target_tilted_stable(0.6)):
        ou = ou_bdlp_spec(target)
        for w in GRID:
            assert psi_eval(ou, w) == pytest.approx(
                w * float(target.psi.deriv(w)), rel=1e-9
            )


# ---------------------------------------------------------------------------
# discrete Thorin measures


def test_thorin_bdlp_identity():
    atoms = ((0.5, 0.7), (1.5, 0.2), (4.0, 1.1))
    target = target_thorin_atoms(atoms)
    direct = thorin_bdlp_psi(atoms, 1.7)
    via = u_delta_Z(target, 1.7)
    got = np.asarray(via.eval(GRID))
    ref = np.asarray(direct.eval(GRID))
    assert np.max(np.abs(got - ref) / ref) < 1e-6


def test_thorin_atoms_validation():
    with pytest.raises(DomainError):
        target_thorin_atoms(())
    with pytest.raises(DomainError):
        target_thorin_atoms(((0.0, 1.0),))


# ---------------------------------------------------------------------------
# driving-law designs


def test_driving_l_unit_mark_is_bdlp():
    target = target_gamma(1.0)
    des = driving_L(target, 1.0, DegenerateLaw(1.0))
    z = u_delta_Z(target, 1.0)
    for w in GRID:
        assert psi_eval(des.l_spec, w) == pytest.approx(float(z.eval(w)), rel=1e-9)


def test_driving_l_requires_bounded_mark():
    with pytest.raises(PreconditionError):
        driving_L(target_gamma(1.0), 1.0, GammaLaw(1.0))


def test_design_round_trip_exponents():
    # the design's central claim: the clock exponent equals the target's,
    # for different kernels realizing the same delta
    delta = 1.0
    target = target_gamma(0.8)
    cases = [
        (quantile_function("identity"), DegenerateLaw(1.0)),
        (
            quantile_function("affine_uniform", {"p": 0.6}),
            __import__("quantclock").laws.GeometricExponentLaw(0.6),
        ),
        (from_law(__import__("quantclock").laws.ExpNegGammaLaw(0.35)),
         __import__("quantclock").laws.ExpNegGammaLaw(0.65)),
    ]
    for q, y_law in cases:
        des = driving_L(target, delta, y_law)
        for w in (0.5, 1.0, 2.0):
            lhs = clock_psi(q, des.l_spec.psi, 1.0, w)
            rhs = psi_eval(target.spec, w)
            assert lhs == pytest.approx(rhs, rel=1e-4)


def test_design_round_trip_kumaraswamy_delta():
    a, b = 0.4, 2.0
    delta = a * b
    target = target_tilted_stable(0.6)
    q = quantile_function("kumaraswamy", {"alpha": a, "b": b})
    y_law = PowerOfLaw(BetaLaw(a, 1.0 - a), 1.0 / b)
    des = driving_L(target, delta, y_law)
    for w in (0.5, 1.0, 2.0):
        assert clock_psi(q, des.l_spec.psi, 1.0, w) == pytest.approx(
            psi_eval(target.spec, w), rel=1e-4
        )


def test_design_output_rho_psi_consistency():
    des = driving_L(target_gamma(1.0), 1.0, DegenerateLaw(1.0))
    for w in (0.5, 1.0, 2.0):
        assert psi_from_rho(des.l_spec, w) == pytest.approx(
            psi_eval(des.l_spec, w), rel=1e-3
        )


def test_gamma_design_end_to_end(rng):
    theta = 1.0
    des = gplus_L(theta, DegenerateLaw(1.0), DegenerateLaw(1.0), 1.0)
    q = quantile_function("identity")
    draws = sample_clock_terminal(q, des.l_spec, 1.0, 40_000, rng)
    rep = lt_match(draws, lambda w: theta * math.log1p(w), 1.0, tol=0.02)
    assert rep.passed, rep.to_dict()


def test_tilted_design_with_kumaraswamy_kernel(rng):
    a, b = 0.5, 2.0
    target = target_tilted_stable(0.6)
    q = quantile_function("kumaraswamy", {"alpha": a, "b": b})
    y_law = PowerOfLaw(BetaLaw(a, 1.0 - a), 1.0 / b)
    des = driving_L(target, a * b, y_law)
    draws = sample_clock_terminal(q, des.l_spec, 1.0, 30_000, rng, trunc=1e-5)
    rep = lt_match(draws, target.psi, 1.0, tol=0.02)
    assert rep.passed, rep.to_dict()


def test_gplus_mean_identity(rng):
    theta, delta = 1.4, 2.0
    v_law, y_law = BetaLaw(2.0, 1.0), DegenerateLaw(0.8)
    des = gplus_L(theta, v_law, y_law, delta)
    vals = sample_subordinator_terminal(des.l_spec, 1.0, 30_000, rng)
    expect = theta * v_law.mean * y_law.mean * (1.0 + 1.0 / delta)
    se = vals.std() / math.sqrt(vals.size)
    assert abs(vals.mean() - expect) < 3 * se
    # analytic mean rate agrees too
    assert des.l_spec.mean_rate == pytest.approx(expect, rel=1e-5)


def test_vg_preset_is_gplus():
    vg = preset_L("vg", {"theta": 1.2}, delta=2.0)
    direct = gplus_L(1.2, DegenerateLaw(1.0), DegenerateLaw(1.0), 2.0)
    assert vg.construction == "vg"
    for w in GRID:
        assert psi_eval(vg.l_spec, w) == pytest.approx(
            psi_eval(direct.l_spec, w), rel=1e-12
        )


def test_gplus_rejects_unbounded_parts():
    with pytest.raises(PreconditionError):
        gplus_L(1.0, GammaLaw(1.0), DegenerateLaw(1.0), 1.0)
    with pytest.raises(PreconditionError):
        gplus_L(1.0, DegenerateLaw(1.0), GammaLaw(1.0), 1.0)


# ---------------------------------------------------------------------------
# gamma split


def test_gamma_split_constant_values():
    sigma, ggc_part = gamma_split(DegenerateLaw(0.3))
    # arrival rate -log p, straddle transform e^(-s(1-p)/p)
    lam = (1.0 - 0.3) / 0.3
    lt = sigma.params["lt_x"]
    s = np.array([0.5, 1.0, 2.0])
    assert np.allclose(lt(s), np.exp(-lam * s), rtol=1e-10)
    assert sigma.rho.total_mass == pytest.approx(-math.log(0.3), rel=1e-9)
    assert ggc_part.theta == 1.0


def test_gamma_split_psi_complementarity():
    # psi_gamma = psi_straddle + psi_GGC(1,V) exactly
    from quantclock.levy import gamma_subordinator, ggc_psi

    v = BetaLaw(2.0, 1.0)
    sigma, ggc_part = gamma_split(v)
    for w in (0.5, 1.0, 3.0):
        assert psi_eval(sigma, w) + ggc_psi(ggc_part, w) == pytest.approx(
            math.log1p(w), rel=1e-7
        )


def test_gamma_split_degenerate_and_unsupported():
    with pytest.raises(DegenerateSplitError):
        gamma_split(DegenerateLaw(1.0))
    with pytest.raises(UnsupportedLawError):
        gamma_split(GFractionLaw(0.0))  # E[-log V] = inf
    with pytest.raises(DomainError):
        gamma_split(GammaLaw(2.0))  # support beyond (0, 1]


def test_prop_uniform_power_identity(rng, assert_ks):
    # U^p * exp(-Sigma_1(p)) is uniform
    p = 0.4
    sigma, _ = gamma_split(DegenerateLaw(p))
    n = 60_000
    s1 = sample_subordinator_terminal(sigma, 1.0, n, rng, trunc=1e-9)
    vals = rng.random(n) ** p * np.exp(-s1)
    assert_ks(ks2(vals, rng.random(n)))


# ---------------------------------------------------------------------------
# presets


def test_nig_preset_structure():
    des = preset_L("nig", {"alpha": 0.5}, delta=1.0)
    # analytic check: psi_L(w) = psi(w) + w psi'(w) for the tilted target
    for w in GRID:
        ref = ((1 + w) ** 0.5 - 1.0) + w * 0.5 * (1 + w) ** -0.5
        assert psi_eval(des.l_spec, w) == pytest.approx(ref, rel=1e-9)


def test_short_memory_preset_density():
    x = sym.symbols("x", positive=True)
    theta = 1.0
    rho = theta * sym.exp(-x) / x
    oracle = sym.lambdify(x, -x * sym.diff(rho, x))
    des = preset_L("short_memory", {"target": target_gamma(theta)})
    xs = np.array([0.2, 1.0, 3.0])
    got = np.asarray(des.l_spec.rho.eval(xs))
    assert np.allclose(got, [oracle(v) for v in xs], rtol=1e-9)
    assert np.allclose(got, theta * np.exp(-xs) / xs + theta * np.exp(-xs), rtol=1e-12)


def test_cgmy_mixture_identity_own_variant():
    alpha, G, M = 0.35, 3.0, 5.0
    from quantclock.levy import quad_checked

    for variant in ("tilt", "paper"):
        for s in (0.1, 0.5, 1.0, 2.0):
            mix = quad_checked(
                lambda u, _s=s: float(
                    cgmy_levy_density(_s / u, alpha, G, M, 1.0, None, variant)
                )
                / u,
                1e-9,
                1.0,
                rel=1e-7,
            )
            direct = float(cgmy_subordinator_density(s, alpha, G, M, variant))
            assert mix == pytest.approx(direct, rel=1e-2)


def test_cgmy_variant_report():
    alpha, G, M = 0.35, 3.0, 5.0
    s = 0.7
    tilt = float(cgmy_subordinator_density(s, alpha, G, M, "tilt"))
    paper = float(cgmy_subordinator_density(s, alpha, G, M, "paper"))
    canon = float(cgmy_canonical_density(s, alpha, G, M))
    assert tilt == pytest.approx(canon, rel=1e-10)
    assert abs(paper - canon) / canon > 0.5  # the printed variant differs


def test_cgmy_alpha_above_half_warns_in_notes():
    des = preset_L("cgmy", {"alpha": 0.6, "G": 3.0, "M": 5.0, "variant": "tilt"})
    assert "warning" in des.notes
    low = preset_L("cgmy", {"alpha": 0.3, "G": 3.0, "M": 5.0, "variant": "tilt"})
    assert "warning" not in low.notes


def test_cgmy_psi_consistent_with_rho():
    des = preset_L("cgmy", {"alpha": 0.35, "G": 3.0, "M": 5.0, "variant": "tilt"})
    for w in (0.5, 2.0):
        assert psi_from_rho(des.l_spec, w) == pytest.approx(
            psi_eval(des.l_spec, w), rel=1e-3
        )


def test_ggc_plus_target_round_trip():
    g = GGCSpec(1.1, BetaLaw(2.0, 2.0))
    target = target_ggc_plus(g)
    des = driving_L(target, 1.0, DegenerateLaw(1.0))
    q = quantile_function("identity")
    for w in (0.5, 1.5):
        assert clock_psi(q, des.l_spec.psi, 1.0, w) == pytest.approx(
            psi_eval(target.spec, w), rel=1e-4
        )


def test_preset_unknown():
    with pytest.raises(DomainError):
        preset_L("bogus", {})
