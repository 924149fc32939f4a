import math

import numpy as np
import pytest
from scipy import integrate as sint
from scipy.special import erf

from rgd import density as dn
from rgd import skewortho as so
from rgd.oracle import rho_oracle
from rgd.products import EnsembleSpec


def test_rho2_m1_is_gaussian():
    r = np.linspace(-2, 2, 9)
    expected = np.exp(-r * r / 0.5) / math.sqrt(math.pi * 0.5)
    np.testing.assert_allclose(dn.rho2(1, 0.5, r), expected, rtol=1e-13)


@pytest.mark.parametrize("beta,m,sigma2,r", [(2, 2, 0.5, 0.3), (2, 3, 1.0, -0.4), (1, 2, 0.8, 0.6), (4, 2, 0.5, 0.7)])
def test_against_oracle(beta, m, sigma2, r):
    spec = EnsembleSpec("A", beta, m, sigma2)
    got = dn.density_curve(spec, np.array([r])).values[0]
    assert got == pytest.approx(rho_oracle(spec, r).value.to_real(), rel=1e-8)


def rho1_m2_closed(sigma2, r):
    root = math.sqrt(2 * sigma2)
    bracket = (math.exp(r / 2) * erf((r + sigma2 / 2) / root)
               - math.exp(-r / 2) * erf((r - sigma2 / 2) / root))
    pref = math.exp(-sigma2 / 8) / erf(math.sqrt(sigma2) / 2)
    return pref * math.exp(-r * r / (2 * sigma2)) / math.sqrt(2 * math.pi * sigma2) * bracket


@pytest.mark.parametrize("r", [-1.0, 0.0, 0.45, 2.0])
def test_rho1_m2_closed_form(r):
    fam = so.build_family(0.9, 1)
    assert dn.rho1(fam, 2, 0.9, r)[0] == pytest.approx(rho1_m2_closed(0.9, r), rel=1e-10)


@pytest.mark.parametrize("beta,m,sigma2", [(2, 1, 0.4), (2, 7, 1.0), (2, 25, 0.2), (1, 4, 0.5), (1, 6, 1.5), (4, 2, 1.0)])
def test_mass(beta, m, sigma2):
    curve = dn.density_curve(EnsembleSpec("A", beta, m, sigma2))
    assert dn.mass(curve) == pytest.approx(m, rel=1e-6)


@pytest.mark.parametrize("m", [2, 5, 9])
def test_mixture_matches_cd(m):
    r = np.linspace(-2, 2, 17)
    terms = dn.rho2_mixture(m, 0.6)
    assert len(terms) == 2 * m - 1
    assert [t.sign for _, t in terms] == [(-1) ** k for k in range(2 * m - 1)]
    np.testing.assert_allclose(dn._mixture_eval(m, 0.6, r), dn.rho2(m, 0.6, r), rtol=1e-9)


def test_mixture_direct_sum_small_m():
    terms = dn.rho2_mixture(2, 1.0)
    r = 0.37
    direct = sum(c.to_real() * math.exp(-(r - rk) ** 2 / 1.0) for rk, c in terms)
    assert direct == pytest.approx(dn.rho2(2, 1.0, r)[0], rel=1e-12)


def test_m_peaks():
    curve = dn.density_curve(EnsembleSpec("A", 2, 20, 0.2))
    assert dn.count_maxima(curve.values) == 20


def test_cd_kernel_diagonal_trace():
    m, s2 = 3, 0.5
    # the diagonal in x integrates to m
    f = lambda u: dn.cd_kernel(m, s2, math.exp(u), math.exp(u)) * math.exp(u)  # noqa: E731
    assert sint.quad(f, -8, 10, limit=200)[0] == pytest.approx(m, rel=1e-8)
    assert dn.cd_kernel(m, s2, 1.3, 0.7) == pytest.approx(dn.cd_kernel(m, s2, 0.7, 1.3), rel=1e-14)


@pytest.mark.parametrize(
    "spec,error",
    [(EnsembleSpec("A", 1, 3, 1.0), dn.OddM), (EnsembleSpec("A", 4, 3, 1.0), dn.UnsupportedDensity),
     (EnsembleSpec("SO", 1, 2, 1.0), dn.UnsupportedDensity)],
)
def test_unsupported(spec, error):
    with pytest.raises(error):
        dn.density_curve(spec)
