"""Density, CDF, quantiles, tail behavior, Asian prices."""
import math

import numpy as np
import pytest

from expolevy import (G2, JumpTerm, LevyModel, build_vectors, cdf, density,
                      density_asymptotic, density_best, density_reliable,
                      leading_tail_coefficient, moment, normalization_check,
                      params_from_model, price_asian, quantiles, tail_exponent)
from expolevy.errors import (BreakpointError, DomainError, InfinitePriceError,
                             PreconditionError)

from _fixtures import (ASIAN_PRICE, CDF, DENSITY, DENSITY_NEAR_BP, DUFRESNE,
                       FIXTURES, GRID50, ROOTS)


@pytest.fixture(scope="module")
def dufresne_params():
    model, q = DUFRESNE
    return params_from_model(model, q)


def test_dufresne_density_closed_form(dufresne_params):
    for x in (0.2, 0.5, 1.0, 2.0, 10.0):
        want = x ** -2 * math.exp(-1.0 / x)
        se = density(dufresne_params, x)
        assert abs(se.value.real - want) <= 1e-10 * want


def test_dufresne_small_x_branch_vanishes(dufresne_params):
    gv = build_vectors(dufresne_params)
    se = G2(dufresne_params, gv, 0.5)
    assert se.mode == "identically_zero"
    assert se.value == 0


@pytest.mark.parametrize("name", sorted(DENSITY))
def test_frozen_density_values(name, params_for):
    p = params_for(name)
    for x, want in DENSITY[name].items():
        se = density_best(p, x)
        assert abs(se.value.real - want) <= max(se.abs_err, 1e-10 * want), x


def test_series_claims_cover_true_error(params_for):
    # reported abs_err must bound the distance to the reference value
    for name in sorted(DENSITY):
        p = params_for(name)
        for x, want in DENSITY[name].items():
            se = density(p, x)
            assert abs(se.value.real - want) <= se.abs_err + 1e-13 * want


@pytest.mark.parametrize("name", ("drift_neg", "drift_pos"))
def test_breakpoint_window_honesty(name, params_for):
    p = params_for(name)
    for x, want in DENSITY_NEAR_BP[name].items():
        v, err = density_reliable(p, x)
        assert abs(v - want) <= err, (name, x)
        assert err < 1e-4  # claims must stay useful inside the window


def test_breakpoint_value_drift_neg(params_for):
    # both one-sided limits coincide; the window estimator must land on
    # the common value within its claim
    se = density_best(params_for("drift_neg"), 1.0)
    assert se.mode == "extrapolated"
    assert abs(se.value.real - 0.6248150619099409) <= se.abs_err
    assert se.abs_err < 1e-4


def test_series_refuses_exact_breakpoint(params_for):
    with pytest.raises(BreakpointError):
        density(params_for("drift_neg"), 1.0)


def test_unbounded_breakpoint_detected():
    # (q + lambda)/|mu| - 1 < 0: density blows up at x = 1/|mu|
    m = LevyModel(0.0, -1.0, (JumpTerm(3.2, (0.5,)),),
                  (JumpTerm(1.6, (0.3,)),))
    p = params_from_model(m, 0.2)
    with pytest.raises(BreakpointError, match="unbounded"):
        density_best(p, 1.0)
    se = density_best(p, 1.0001)  # one-sided values stay finite
    assert se.value.real > 1.0
    assert se.abs_err < 0.01 * se.value.real


def test_domain_errors(params_for):
    p = params_for("kou")
    for x in (0.0, -2.0):
        with pytest.raises(DomainError):
            density(p, x)


def test_density_nonnegative_on_grids(params_for):
    for name, xs in GRID50.items():
        p = params_for(name)
        for x in xs[::5]:
            assert density_best(p, float(x)).value.real >= 0.0


def test_normalization(params_for):
    for name in ("kou", "pure_jump"):
        assert normalization_check(params_for(name)) == pytest.approx(
            1.0, abs=1e-9)


@pytest.mark.parametrize("name", sorted(CDF))
def test_frozen_cdf_values(name, params_for):
    p = params_for(name)
    for x, want in CDF[name].items():
        assert cdf(p, x) == pytest.approx(want, abs=5e-9)


def test_cdf_monotone_and_bounded(params_for):
    p = params_for("mult2")
    xs = np.geomspace(0.05, 60, 24)
    vals = [cdf(p, float(x)) for x in xs]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert 0.0 <= vals[0] and vals[-1] <= 1.0 + 1e-9


def test_quantiles_invert_cdf(params_for):
    # quantiles() documents ~1e-5 accuracy in probability
    p = params_for("kou")
    probs = [0.05, 0.3, 0.5, 0.9, 0.99]
    xs = quantiles(p, probs)
    assert np.all(np.diff(xs) > 0)
    for prob, x in zip(probs, xs):
        assert cdf(p, float(x)) == pytest.approx(prob, abs=1e-5)


def test_asian_price_frozen(params_for):
    p = params_for("kou")
    for k, want in ASIAN_PRICE["kou"].items():
        assert price_asian(p, k) == pytest.approx(want, rel=1e-8)


def test_asian_price_structure(params_for):
    p = params_for("kou")
    e_i = moment(p, 1)
    strikes = [0.0, 0.5, 1.0, 2.0, 5.0]
    prices = [price_asian(p, k) for k in strikes]
    assert prices[0] == pytest.approx(e_i, rel=1e-9)  # zero strike pays E[I]
    assert all(b < a for a, b in zip(prices, prices[1:]))
    for k, v in zip(strikes, prices):
        assert v >= max(e_i - k, 0.0) - 1e-9  # convexity floor


def test_price_requires_finite_mean():
    m = LevyModel(0.3, 0.0, (JumpTerm(0.9, (0.5,)),),
                  (JumpTerm(2.1, (0.5,)),))
    p = params_from_model(m, 1.0)
    with pytest.raises(InfinitePriceError, match="zeta_1"):
        price_asian(p, 1.0)


def test_tail_exponent_matches_roots(params_for):
    for name in sorted(FIXTURES):
        zeta1 = min(z.real for z in (complex(z) for z in ROOTS[name][0]))
        assert tail_exponent(params_for(name)) == pytest.approx(1 + zeta1,
                                                                rel=1e-12)


def test_power_tail_with_leading_coefficient(params_for):
    # p(x) -> C x^{-(1+zeta_1)}: check the constant, not just the slope
    for name in ("kou", "pure_jump"):
        p = params_for(name)
        c = leading_tail_coefficient(p)
        alpha = tail_exponent(p)
        for x in (150.0, 400.0):
            se = density_best(p, x)
            assert se.value.real == pytest.approx(c * x ** -alpha, rel=0.05)


def test_asymptotic_zero_regime_honest(params_for):
    # sigma > 0: small-x branch must agree with the reference route
    # within the sum of the reported errors
    for name in ("kou", "mult2", "cpair"):
        p = params_for(name)
        x = float(quantiles(p, [0.1])[0])
        asym = density_asymptotic(p, x, "zero")
        exact = density_best(p, x)
        tol = asym.abs_err + exact.abs_err
        assert abs(asym.value.real - exact.value.real) <= tol, name


def test_asymptotic_infinity_regime_honest(params_for):
    p = params_for("pure_jump")
    x = float(quantiles(p, [0.9])[0])
    asym = density_asymptotic(p, x, "infinity")
    exact = density_best(p, x)
    assert abs(asym.value.real - exact.value.real) <= (asym.abs_err
                                                       + exact.abs_err)


def test_asymptotic_regime_mismatch_raises(params_for):
    with pytest.raises(DomainError):
        density_asymptotic(params_for("kou"), 0.1, "infinity")
    with pytest.raises(DomainError):
        density_asymptotic(params_for("pure_jump"), 0.1, "zero")


def test_best_branch_modes(params_for):
    p = params_for("kou")
    assert density_best(p, 0.01).mode == "quadrature"  # series unhealthy here
    assert density_best(p, 5.0).mode == "convergent"
    dn = params_for("drift_neg")
    assert density_best(dn, 1.0).mode == "extrapolated"
