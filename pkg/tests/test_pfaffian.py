import math

import numpy as np
import pytest

from rgd.numerics import LogSigned
from rgd.pfaffian import (
    OddDimension,
    SkewMatrix,
    pfaffian,
    pfaffian_bordered,
    pfaffian_minors_last_column,
)


def random_skew(rng, n, spread=0.0):
    a = rng.normal(size=(n, n)) * np.exp(spread * rng.uniform(-1, 1, size=(n, n)))
    return np.triu(a, 1) - np.triu(a, 1).T


def test_two_by_two():
    a = np.array([[0.0, 1.7], [-1.7, 0.0]])
    assert pfaffian(SkewMatrix.from_array(a)).to_real() == pytest.approx(1.7)


def test_empty_is_one():
    assert pfaffian(SkewMatrix.from_array(np.zeros((0, 0)))) == LogSigned.one()


def test_four_by_four_expansion(rng):
    a = random_skew(rng, 4)
    expected = a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
    assert pfaffian(SkewMatrix.from_array(a)).to_real() == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10, 12])
def test_square_is_determinant(rng, n):
    a = random_skew(rng, n, spread=30.0)
    pf = pfaffian(SkewMatrix.from_array(a))
    sign, logdet = np.linalg.slogdet(a)
    assert sign == 1.0
    assert 2 * pf.lnmag == pytest.approx(logdet, abs=1e-8)


def test_scaling_covariance(rng):
    a = random_skew(rng, 8, spread=5.0)
    d = np.exp(rng.uniform(-5, 5, size=8))
    pf = pfaffian(SkewMatrix.from_array(a))
    pf_dad = pfaffian(SkewMatrix.from_array(d[:, None] * a * d[None, :]))
    assert pf_dad.sign == pf.sign
    assert pf_dad.lnmag == pytest.approx(pf.lnmag + np.log(d).sum(), abs=1e-12)


def test_odd_dimension_raises():
    with pytest.raises(OddDimension):
        pfaffian(SkewMatrix.from_array(np.zeros((3, 3))))


def test_bordered(rng):
    core = random_skew(rng, 3)
    border = rng.normal(size=3)
    full = np.zeros((4, 4))
    full[:3, :3] = core
    full[:3, 3], full[3, :3] = border, -border
    got = pfaffian_bordered(SkewMatrix.from_array(core), [LogSigned.from_real(b) for b in border])
    assert got.to_real() == pytest.approx(pfaffian(SkewMatrix.from_array(full)).to_real(), rel=1e-13)
    zero = pfaffian_bordered(SkewMatrix.from_array(core), [LogSigned.zero()] * 3)
    assert zero.is_zero


def test_bordered_one_by_one():
    got = pfaffian_bordered(SkewMatrix.from_array(np.zeros((1, 1))), [LogSigned.from_real(2.5)])
    assert got.to_real() == pytest.approx(2.5)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_minor_expansion(rng, n):
    a = random_skew(rng, n)
    minors = pfaffian_minors_last_column(SkewMatrix.from_array(a))
    total = math.fsum(c.to_real() * a[k, n - 1] for k, c in enumerate(minors))
    assert total == pytest.approx(pfaffian(SkewMatrix.from_array(a)).to_real(), rel=1e-12)
    if n == 2:
        assert minors[0] == LogSigned.one()
