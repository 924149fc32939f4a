import math

import pytest
from scipy import integrate as sint
from scipy.special import erf

from rgd import products as pr


@pytest.mark.parametrize("sigma2", [0.2, 1.3])
def test_inner_sw(sigma2):
    assert pr.inner_sw(0, 0, sigma2).to_real() == pytest.approx(math.exp(sigma2 / 4), rel=1e-14)
    assert pr.inner_sw(1, 2, sigma2).to_real() == pytest.approx(math.exp(4 * sigma2), rel=1e-14)


@pytest.mark.parametrize("sigma2", [0.2, 1.3])
def test_skew_moments(sigma2):
    s = math.sqrt(sigma2)
    assert pr.skew4(2, 2, sigma2).is_zero
    assert pr.skew1(3, 3, sigma2).is_zero
    assert pr.skew4(0, 1, sigma2).to_real() == pytest.approx(math.exp(sigma2 / 4) / 2, rel=1e-14)
    assert pr.skew1(0, 1, sigma2).to_real() == pytest.approx(math.exp(2.5 * sigma2) * erf(s / 2), rel=1e-13)
    assert pr.skew1(3, 1, sigma2).to_real() == pytest.approx(-math.exp(10 * sigma2) * erf(s), rel=1e-13)
    assert pr.skew1(1, 0, sigma2) == -pr.skew1(0, 1, sigma2)


def test_skew1_against_double_integral():
    """<x^k, x^l>_1 = 1/2 iint w(x) w(y) x^k y^l sgn(y - x), w the beta=1 weight."""
    sigma2, k, l = 0.5, 0, 2
    w = lambda u: math.exp(-u * u / (2 * sigma2)) / math.sqrt(math.pi * sigma2)  # noqa: E731
    lim = 10 * math.sqrt(sigma2) + 4

    def inner(u):
        above = sint.quad(lambda v: w(v) * math.exp((l + 1) * v), u, lim)[0]
        below = sint.quad(lambda v: w(v) * math.exp((l + 1) * v), -lim, u)[0]
        return w(u) * math.exp((k + 1) * u) * (above - below)

    value = 0.5 * sint.quad(inner, -lim, lim, limit=200)[0]
    assert pr.skew1(k, l, sigma2).to_real() == pytest.approx(value, rel=1e-8)


@pytest.mark.parametrize("i,expected", [(1, lambda s2: math.sqrt(2) * math.exp(s2 / 2)),
                                        (2, lambda s2: math.sqrt(2) * math.exp(2 * s2))])
def test_border_moment(i, expected):
    assert pr.border_moment1(i, 0.7).to_real() == pytest.approx(expected(0.7), rel=1e-14)


def test_inner_so():
    s2 = 1.0
    assert pr.inner_so(1, s2).to_real() == pytest.approx(0.5)
    assert pr.inner_so(2, s2).to_real() == pytest.approx(math.exp(s2 / 4) / 2, rel=1e-14)
    f = lambda r: math.exp(-r * r / s2) * math.cosh(r) ** 2 / math.sqrt(math.pi * s2)  # noqa: E731
    assert pr.inner_so(3, s2).to_real() == pytest.approx(sint.quad(f, 0, 30)[0], rel=1e-10)


@pytest.mark.parametrize("fn", [pr.skew_so, pr.skew_sp])
def test_so_sp_antisymmetry(fn):
    """Each product is the negative of its transpose."""
    assert fn(2, 2, 0.5).is_zero
    assert fn(1, 2, 0.5).to_real() == pytest.approx(-fn(2, 1, 0.5).to_real(), rel=1e-14)


@pytest.mark.parametrize(
    "kwargs",
    [dict(family="B", beta=1, m=2, sigma2=1.0), dict(family="A", beta=3, m=2, sigma2=1.0),
     dict(family="SO", beta=2, m=2, sigma2=1.0), dict(family="A", beta=1, m=0, sigma2=1.0),
     dict(family="A", beta=1, m=2, sigma2=0.0)],
)
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        pr.EnsembleSpec(**kwargs)


def test_spec_normalises_family():
    spec = pr.EnsembleSpec("so", 1, 2, 0.5)
    assert spec.family == "SO"
    assert pr.EnsembleSpec("A", 1, 2, 0.5).c_beta == 0.5


@pytest.mark.parametrize("odd,fn,s2", [(False, pr.skew_so, 0.5), (True, pr.skew_sp, 0.4)])
def test_so_sp_skew_against_double_integral(odd, fn, s2):
    i, j = 1, 2
    w = lambda r: math.exp(-r * r / (2 * s2)) / math.sqrt(math.pi * s2)  # noqa: E731

    def mono(r, k):
        return (math.sinh(r) if odd else 1.0) * math.cosh(r) ** (k - 1)

    lim = 12 * math.sqrt(s2) + 4
    above = sint.dblquad(lambda r2, r1: w(r1) * w(r2) * mono(r1, i) * mono(r2, j), 0, lim, lambda r1: r1, lim)[0]
    below = sint.dblquad(lambda r2, r1: w(r1) * w(r2) * mono(r1, i) * mono(r2, j), 0, lim, 0, lambda r1: r1)[0]
    assert fn(i, j, s2).to_real() == pytest.approx(0.5 * (above - below), rel=1e-8)
