import math

import numpy as np
import pytest

from rgd import partition as pt
from rgd import skewortho as so


@pytest.fixture(scope="module")
def family():
    return so.build_family(1.0, 7)


def block_j(n):
    j = np.zeros((n, n))
    for k in range(0, n, 2):
        j[k, k + 1], j[k + 1, k] = 1.0, -1.0
    return j


def test_monic(family):
    for n, p in enumerate(family.polys):
        assert p.degree == n
        assert p.exact[-1] == 1


@pytest.mark.parametrize("sigma2", [0.3, 2.0])
def test_skew_orthogonality(sigma2):
    fam = so.build_family(sigma2, 9)
    gram = np.array(so.skew_gram(fam))
    np.testing.assert_allclose(gram, block_j(gram.shape[0]), atol=1e-9)


def test_norms_are_ratios_of_partition_values(family):
    for k, h in enumerate(family.norms):
        ratio = family.stripped_z[2 * k + 2] / family.stripped_z[2 * k]
        assert ratio.log() - h.log() == pytest.approx(math.log(2.0), abs=1e-12)


def test_stripped_partition_values_match_zeta(family):
    # z^{(n)} = e^{sigma2 n (n+1)^2/8} z_1(n)
    for n in (2, 3, 4):
        expected = pt.z1_pfaffian(n, 1.0).log() + 1.0 * n * (n + 1) ** 2 / 8
        assert family.stripped_z[n].log() == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("sigma2", [0.3, 0.8, 2.0])
def test_reference_polynomials(sigma2):
    fam = so.build_family(sigma2, 3, odd_gauge="bordered")
    for got, ref in zip(fam.polys, so.reference_polys(sigma2)):
        np.testing.assert_allclose([float(c) for c in got.exact], ref, rtol=1e-10)


def test_low_degrees_gauge_independent():
    a = so.build_family(0.8, 2)
    b = so.build_family(0.8, 2, odd_gauge="bordered")
    for p, q in zip(a.polys, b.polys):
        assert [float(c) for c in p.exact] == pytest.approx([float(c) for c in q.exact], rel=1e-14)


@pytest.mark.parametrize("n", [0, 1, 3])
@pytest.mark.parametrize("u", [-0.4, 0.9, 2.2])
def test_reference_phi(n, u):
    fam = so.build_family(1.0, 3, odd_gauge="bordered")
    assert so.phi_tilde(fam, n, u) == pytest.approx(so.reference_phi(n, 1.0, u), rel=1e-10)


def test_phi_limits(family):
    # phi_n(e^u) -> +-(1/2) int w p_n / sqrt(pi sigma2) as u -> +-inf
    hi, lo = so.phi_tilde(family, 0, 40.0), so.phi_tilde(family, 0, -40.0)
    assert hi == pytest.approx(-lo, rel=1e-12)
    assert hi == pytest.approx(math.exp(0.5) / math.sqrt(2), rel=1e-12)


def test_validation():
    with pytest.raises(ValueError):
        so.build_family(1.0, -1)
    with pytest.raises(ValueError):
        so.build_family(1.0, 3, odd_gauge="other")
    with pytest.raises(ValueError):
        so.phi_tilde(so.build_family(1.0, 1), 2, 0.0)
