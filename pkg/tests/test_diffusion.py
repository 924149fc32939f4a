import math

import numpy as np
import pytest

from rgd import diffusion as df
from rgd.numerics import LogSigned


def gauss(x, t):
    return math.exp(-x * x / (2 * t)) / math.sqrt(2 * math.pi * t)


def test_m1_kernels():
    cfg = df.WalkerConfig((0.5,), (0.0,), 1.0)
    assert df.km_kernel_a(cfg).to_real() == pytest.approx(gauss(0.5, 1.0), rel=1e-14)
    cfg = df.WalkerConfig((0.5,), (1.2,), 0.7, "B")
    assert df.km_kernel_b(cfg).to_real() == pytest.approx(gauss(-0.7, 0.7) - gauss(1.7, 0.7), rel=1e-13)


def test_two_by_two_direct():
    cfg = df.WalkerConfig((1.0, 0.0), (1.0, 0.0), 0.5)
    g = lambda a, b: gauss(a - b, 0.5)  # noqa: E731
    expected = g(1, 1) * g(0, 0) - g(1, 0) * g(0, 1)
    assert df.km_kernel_a(cfg).to_real() == pytest.approx(expected, rel=1e-13)


def test_equal_rows_vanish():
    assert df.km_determinant_a((0.3, 0.3), (1.0, 0.0), 1.0).is_zero
    assert df.km_equal_spacing_reduction((0.3, 0.3), 1.0).is_zero


@pytest.mark.parametrize("m", [1, 2, 3, 5])
@pytest.mark.parametrize("t", [0.3, 1.0])
def test_equal_spacing(rng, m, t):
    x = np.sort(rng.uniform(-2, 2, size=m))[::-1]
    eta = [float(m - j) for j in range(1, m + 1)]
    a = df.km_determinant_a(x, eta, t)
    b = df.km_equal_spacing_reduction(x, t)
    assert a.sign == b.sign == 1
    assert a.lnmag == pytest.approx(b.lnmag, abs=1e-12)


def test_b_kernel_vanishes_at_wall():
    near = df.km_kernel_b(df.WalkerConfig((1.0, 1e-9), (2.0, 0.5), 1.0, "B"))
    far = df.km_kernel_b(df.WalkerConfig((1.0, 0.4), (2.0, 0.5), 1.0, "B"))
    assert near.to_real() < 1e-8 * far.to_real()


def test_jacobian_b():
    assert df.jacobian_b([0.8]).to_real() == pytest.approx(2 * math.sinh(0.4), rel=1e-14)
    assert df.jacobian_b([0.8, 0.8]).is_zero
    lam = [1.3, 0.4]
    expected = 4 * math.sinh(0.45) * math.sinh(0.85) * 2 * math.sinh(0.65) * 2 * math.sinh(0.2)
    assert df.jacobian_b(lam).to_real() == pytest.approx(expected, rel=1e-13)


def test_schur_trivial_shapes():
    x, t = (0.7, 0.1, -0.5), 1.0
    z = [math.exp(v) for v in x]
    assert df.schur_weight((2, 1, 0), x, t).to_real() == pytest.approx(1.0, rel=1e-13)
    assert df.schur_weight((3, 1, 0), x, t).to_real() == pytest.approx(sum(z), rel=1e-13)


@pytest.mark.parametrize("eta", [(3, 1), (4, 0), (5, 2, 0), (4, 3, 1, 0)])
def test_schur_against_tableaux(eta):
    m = len(eta)
    x = tuple(np.linspace(0.6, -0.4, m))
    lam = [e - m + j for j, e in enumerate(eta, start=1)]
    got = df.schur_weight(eta, x, 1.0).to_real()
    assert got == pytest.approx(df.schur_tableaux(lam, [math.exp(v) for v in x]), rel=1e-12)


def test_vandermonde_schur_factorisation():
    x, eta, t = (0.9, 0.2, -0.6), (5.0, 2.0, 0.0), 0.8
    m = len(x)
    strip = lambda e: LogSigned(1, -df._log_prefactor(x, e, t))  # noqa: E731
    km = df.km_determinant_a(x, eta, t) * strip(eta)
    vander = df.km_equal_spacing_reduction(x, t) * strip([m - j for j in range(1, m + 1)])
    prod = vander * df.schur_weight([int(e) for e in eta], x, t)
    assert km.lnmag == pytest.approx(prod.lnmag, abs=1e-12)


def test_schur_degenerate():
    with pytest.raises(df.DegenerateArguments):
        df.schur_weight((2, 0), (0.3, 0.3), 1.0)


@pytest.mark.parametrize("eta,x,s,t", [((0.3,), (1.1,), 0.4, 0.7), ((1.0, 0.0), (1.2, -0.3), 0.5, 0.5)])
def test_chapman_kolmogorov(eta, x, s, t):
    _, _, rel = df.chapman_kolmogorov_check(eta, x, s, t)
    assert rel <= 1e-6


def test_chapman_kolmogorov_short_first_step():
    lhs, _, _ = df.chapman_kolmogorov_check((1.0, 0.0), (1.2, -0.3), 1e-3, 0.5)
    direct = df.km_determinant_a((1.2, -0.3), (1.0, 0.0), 0.5).to_real()
    assert lhs == pytest.approx(direct, rel=1e-2)


@pytest.mark.parametrize(
    "kwargs",
    [dict(x=(0.0, 1.0), eta=(1.0, 0.0), t=1.0), dict(x=(1.0,), eta=(1.0, 0.0), t=1.0),
     dict(x=(1.0,), eta=(0.0,), t=0.0), dict(x=(1.0, -0.5), eta=(2.0, 1.0), t=1.0, family="B")],
)
def test_walker_validation(kwargs):
    with pytest.raises(ValueError):
        df.WalkerConfig(**kwargs)
