import math

import pytest
from scipy.special import erf

from rgd import partition as pt
from rgd.products import EnsembleSpec


@pytest.mark.parametrize("sigma2", [0.1, 0.5, 1.7])
def test_z2_small_m(sigma2):
    assert pt.z2_closed_form(1, sigma2).log() == pytest.approx(0.0, abs=1e-15)
    assert pt.z2_andreief(1, sigma2).log() == pytest.approx(0.0, abs=1e-14)
    assert pt.z2_closed_form(2, sigma2).to_real() == pytest.approx(math.expm1(sigma2 / 2), rel=1e-13)


@pytest.mark.parametrize("m,sigma2", [(5, 1.0), (8, 1.5), (12, 0.1), (12, 2.0)])
def test_z2_routes_agree(m, sigma2):
    a, b = pt.z2_closed_form(m, sigma2), pt.z2_andreief(m, sigma2)
    assert a.log() == pytest.approx(b.log(), abs=1e-9)


def closed_z1(m, sigma2):
    s = math.sqrt(sigma2)
    if m == 2:
        return 2 * math.exp(sigma2 / 4) * erf(s / 2)
    if m == 3:
        return 4 * (math.exp(-1.25 * sigma2) * (1 + math.exp(2 * sigma2)) * erf(s / 2) - erf(s))
    return 4 * math.exp(2.5 * sigma2) * (erf(s / 2) ** 2 - erf(s) ** 2 + erf(s / 2) * erf(1.5 * s))


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("sigma2", [0.5, 1.0, 2.0])
def test_z1_erf_forms(m, sigma2):
    border = "paper" if m == 3 else "exact"
    assert pt.z1_pfaffian(m, sigma2, border).to_real() == pytest.approx(closed_z1(m, sigma2), rel=1e-10)


def test_z1_m1_and_odd_border():
    assert pt.z1_pfaffian(1, 0.4).to_real() == pytest.approx(math.sqrt(2), rel=1e-14)
    exact, literal = pt.z1_pfaffian(3, 0.7), pt.z1_pfaffian(3, 0.7, "paper")
    # only the exact border reproduces the 3D quadrature value
    assert exact.to_real() == pytest.approx(0.7318889135, rel=1e-9)
    assert abs(literal.log() - exact.log()) > 1e-2


def test_odd_border_validation():
    with pytest.raises(ValueError):
        pt.z1_pfaffian(3, 0.7, "other")


@pytest.mark.parametrize("m,sigma2,expected,tol", [(2, 0.1, -0.680, 1e-3), (5, 1.0, 16.930, 1e-3),
                                                   (12, 2.4, 231.790, 5e-3)])
def test_zeta_anchors(m, sigma2, expected, tol):
    border = "paper" if m % 2 else "exact"
    assert pt.zeta(m, sigma2, border).log() == pytest.approx(expected, abs=tol)


def test_z4():
    assert pt.z4_pfaffian(1, 0.3).to_real() == pytest.approx(1.0, abs=1e-15)
    for s2 in (0.1, 0.8):
        closed = math.exp(2 * s2) - 4 * math.exp(s2 / 2) + 3
        assert pt.z4_pfaffian(2, s2).to_real() == pytest.approx(closed, rel=1e-10)
        assert pt.z4_closed_form_m2(s2).to_real() == pytest.approx(closed, rel=1e-12)
    # z4 vanishes like 3 sigma^4 / 2 as the eigenvalues are squeezed together
    assert pt.z4_closed_form_m2(1e-6).to_real() == pytest.approx(1.5e-12, rel=1e-5)


@pytest.mark.parametrize("sigma2", [0.3, 1.0])
def test_so_sp_m1(sigma2):
    assert pt.zso_pfaffian(1, sigma2).to_real() == pytest.approx(math.sqrt(2) / 2, rel=1e-13)
    expected = math.sqrt(2) * math.exp(sigma2 / 2) * erf(math.sqrt(sigma2 / 2))
    assert pt.zsp_pfaffian(1, sigma2).to_real() == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("beta,m", [(1, 4), (2, 3), (4, 3)])
def test_small_sigma_power(beta, m):
    slope = pt.small_sigma_slope(beta, m)
    assert slope == pytest.approx(beta * m * (m - 1) / 2, rel=1e-2)


def test_small_sigma_limit_constant_m1():
    assert pt.small_sigma_limit(2, 1)(0.01).log() == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("beta,m", [(1, 8), (2, 6), (2, 8)])
def test_baxter(beta, m):
    exact = pt.partition(EnsembleSpec("A", beta, m, 40.0)).log_value
    assert pt.baxter_large_sigma(beta, m, 40.0) == pytest.approx(exact, rel=5e-2)
    assert pt.baxter_large_sigma(beta, 1, 40.0) == pytest.approx(beta / 8 * math.log(40.0))


def test_planar_shape():
    assert pt.planar_limit_shape(2, 1, 0.5, 0.0) == pytest.approx(-0.5 * math.log(math.pi * 0.5))
    f = pt.planar_free_energy(6, 0.4)
    assert pt.planar_limit_shape(2, 6, 0.4, f) == pytest.approx(pt.z2_closed_form(6, 0.4).log())


def test_variance_convention():
    spec = EnsembleSpec("A", 4, 1, 0.02)
    assert pt.partition(spec, "variance").log_value == pytest.approx(-math.log(2.0), abs=1e-12)
    spec = EnsembleSpec("A", 2, 3, 0.6)
    # beta=2 rescales sigma2 only through the measure
    assert pt.partition(spec, "variance").log_value == pytest.approx(
        pt.z2_closed_form(3, 0.6).log() - 1.5 * math.log(2.0), abs=1e-12)
    with pytest.raises(ValueError):
        pt.partition(spec, "other")


@pytest.mark.parametrize("family,route", [("A", "deBruijnPf"), ("SO", "deBruijnPf")])
def test_dispatch(family, route):
    assert pt.partition(EnsembleSpec(family, 1, 2, 0.5)).route == route
    assert pt.partition(EnsembleSpec("A", 2, 2, 0.5)).route == "closedForm"
