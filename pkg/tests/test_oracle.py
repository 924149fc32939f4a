import math

import pytest
from scipy.special import erf

from rgd import partition as pt
from rgd.oracle import InsufficientSamples, rho_oracle, z_oracle_mc, z_oracle_quadrature
from rgd.products import EnsembleSpec


@pytest.mark.parametrize(
    "family,beta,m,sigma2",
    [("A", 1, 2, 0.5), ("A", 1, 3, 1.0), ("A", 2, 3, 0.5), ("A", 4, 2, 0.1), ("A", 4, 3, 0.5),
     ("SO", 1, 2, 0.5), ("SP", 1, 2, 0.4), ("SO", 1, 3, 0.7)],
)
def test_quadrature_matches_routes(family, beta, m, sigma2):
    spec = EnsembleSpec(family, beta, m, sigma2)
    oracle = z_oracle_quadrature(spec)
    assert oracle.method == "quadrature"
    assert oracle.log_value == pytest.approx(pt.partition(spec).log_value, abs=1e-8)


def test_quadrature_trivial_cases():
    assert z_oracle_quadrature(EnsembleSpec("A", 2, 1, 0.9)).log_value == pytest.approx(0.0, abs=1e-12)
    got = z_oracle_quadrature(EnsembleSpec("A", 1, 2, 1.0)).value.to_real()
    assert got == pytest.approx(2 * math.exp(0.25) * erf(0.5), rel=1e-8)


def test_quadrature_rank_limit():
    with pytest.raises(ValueError):
        z_oracle_quadrature(EnsembleSpec("A", 2, 4, 0.5))


def test_mc_beta2_m2():
    spec = EnsembleSpec("A", 2, 2, 0.5)
    res = z_oracle_mc(spec, seed=3, samples=10**6)
    assert res.samples == 10**6 // 32 * 32
    assert abs(res.log_value - math.log(math.expm1(0.25))) < 3 * res.error_bound


def test_mc_beta1_m6():
    spec = EnsembleSpec("A", 1, 6, 0.5)
    res = z_oracle_mc(spec, seed=5, samples=2 * 10**6)
    assert abs(res.log_value - pt.z1_pfaffian(6, 0.5).log()) < 3 * res.error_bound


def test_mc_is_deterministic():
    spec = EnsembleSpec("A", 4, 3, 0.5)
    a = z_oracle_mc(spec, seed=9, samples=64_000)
    b = z_oracle_mc(spec, seed=9, samples=64_000)
    assert a == b


def test_mc_guards():
    with pytest.raises(ValueError):
        z_oracle_mc(EnsembleSpec("A", 2, 3, 0.5), batches=10)
    with pytest.raises(InsufficientSamples):
        z_oracle_mc(EnsembleSpec("A", 4, 8, 3.0), samples=3200, max_rel_se=1e-6)


def test_rho_oracle_gaussian():
    spec = EnsembleSpec("A", 2, 1, 0.5)
    got = rho_oracle(spec, 0.3).value.to_real()
    assert got == pytest.approx(math.exp(-0.09 / 0.5) / math.sqrt(math.pi * 0.5), rel=1e-12)
