"""Contour-quadrature route: inversion, recovered transform, cross-checks."""
import math

import pytest

from expolevy import (density, density_via_inversion, mellin_transform,
                      params_from_model, recovered_mellin)

from _fixtures import DENSITY, DUFRESNE, FIXTURES


def test_inversion_matches_closed_form():
    p = params_from_model(*DUFRESNE)
    for x in (0.3, 1.0, 4.0):
        want = x ** -2 * math.exp(-1.0 / x)
        assert density_via_inversion(p, x) == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("name", sorted(DENSITY))
def test_inversion_matches_frozen_values(name, params_for):
    p = params_for(name)
    for x, want in DENSITY[name].items():
        assert density_via_inversion(p, x) == pytest.approx(want, rel=1e-8)


def test_contour_independence(params_for):
    # the integral cannot depend on the abscissa inside the strip
    p = params_for("kou")
    vals = [density_via_inversion(p, 3.0, c=c) for c in (0.6, 1.0, 1.8)]
    for v in vals[1:]:
        assert v == pytest.approx(vals[0], rel=1e-9)


def test_series_and_inversion_agree_spot_checks(params_for):
    for name in sorted(FIXTURES):
        p = params_for(name)
        for x in DENSITY.get(name, {}):
            se = density(p, x)
            vi = density_via_inversion(p, x)
            assert se.value.real == pytest.approx(vi, rel=1e-8), (name, x)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_recovered_transform(name, params_for):
    # integrate x^{s-1} p(x) numerically and compare with the product form
    p = params_for(name)
    for s in (0.3, 1 + 0.5 * p.theta):
        rec = recovered_mellin(p, s)
        want = mellin_transform(p, s).real
        assert abs(rec - want) < 1e-7 * max(1.0, abs(want))
