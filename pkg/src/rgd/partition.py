"""Partition functions and normalisation constants.

The A-series partition function is

    z_beta = 1/m! int prod_{i<j} [2 sinh(|r_i - r_j|/2)]^beta
             prod_i e^{-c_beta r_i^2 / sigma2} dr_i / sqrt(pi sigma2)

with c_1 = 1/2 and c_2 = c_4 = 1 (the ``paper`` convention).  Pfaffian and
determinant routes are evaluated in extended precision because the
underlying moment matrices lose roughly m^2 log10(1/sigma) digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath
from mpmath import mp

from . import products as pr
from .numerics import LogSigned, multivariate_gamma
from .pfaffian import pfaffian_mp
from .precision import adaptive, scaled_det

__all__ = [
    "PartitionResult",
    "NumericalFailure",
    "z2_closed_form",
    "z2_andreief",
    "z1_pfaffian",
    "zeta",
    "log_zeta_offset",
    "z4_pfaffian",
    "z4_closed_form_m2",
    "zso_pfaffian",
    "zsp_pfaffian",
    "small_sigma_limit",
    "small_sigma_slope",
    "baxter_large_sigma",
    "planar_limit_shape",
    "planar_free_energy",
    "to_variance_convention",
    "partition",
]

ODD_BORDERS = ("exact", "paper")


class NumericalFailure(ArithmeticError):
    """A partition function came out non-positive."""


@dataclass(frozen=True)
class PartitionResult:
    value: LogSigned
    route: str
    spec: pr.EnsembleSpec
    convention: str = "paper"

    @property
    def log_value(self) -> float:
        return self.value.log()


def _positive(v: LogSigned, what: str) -> LogSigned:
    if v.sign != 1:
        raise NumericalFailure(f"{what} evaluated to a non-positive value {v!r}")
    return v


def _check(m: int, sigma2: float) -> None:
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")


def _check_border(odd_border: str) -> None:
    if odd_border not in ODD_BORDERS:
        raise ValueError(f"odd_border must be one of {ODD_BORDERS}")


# ---------------------------------------------------------------------------
# beta = 2


def z2_closed_form(m: int, sigma2: float) -> LogSigned:
    """Product formula for z_2.

    z_2 = e^{sigma2 m (m^2-1)/24} prod_{j=1}^{m-1} [2 sinh(sigma2 j / 4)]^{m-j},
    equivalently e^{sigma2 m(m^2-1)/12} (1-q)^{m(m-1)/2} prod_j Gamma_q(j+1).
    """
    _check(m, sigma2)
    total = sigma2 * m * (m * m - 1) / 24
    for j in range(1, m):
        x = sigma2 * j / 4
        # log(2 sinh x) = x + log(1 - e^{-2x})
        total += (m - j) * (x + math.log(-math.expm1(-2 * x)))
    return LogSigned(1, total)


def z2_andreief(m: int, sigma2: float) -> LogSigned:
    """z_2 = e^{-sigma2 m^3/4} det[(x^i, x^j)_2]_{i,j<m} by the Andreief identity."""
    _check(m, sigma2)

    def run():
        s2 = mpmath.mpf(sigma2)
        a = [[pr.inner_sw_mp(i, j, s2) for j in range(m)] for i in range(m)]
        d, lost = scaled_det(a)
        return d * mpmath.exp(-s2 * m**3 / 4), lost

    return _positive(LogSigned.from_mpf(adaptive(run)), "z2 (Andreief)")


# ---------------------------------------------------------------------------
# beta = 1


def _bordered(core: list, border: list) -> list:
    n = len(core)
    out = [row[:] + [border[i]] for i, row in enumerate(core)]
    out.append([-b for b in border] + [mpmath.mpf(0)])
    assert len(out) == n + 1
    return out


def _skew_matrix(m: int, entry: Callable[[int, int], mpmath.mpf]) -> list:
    a = [[mpmath.mpf(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            v = entry(i, j)
            a[i][j] = v
            a[j][i] = -v
    return a


def _a1_matrix(m: int, sigma2, odd_border: str) -> list:
    s2 = mpmath.mpf(sigma2)
    core = _skew_matrix(m, lambda i, j: 2 * pr.skew1_mp(i, j, s2))
    if m % 2 == 0:
        return core
    if odd_border == "exact":
        border = [pr.border_moment1_mp(i, s2) for i in range(1, m + 1)]
    else:
        border = [2 * pr.inner_sw_mp(0, i - 1, s2) for i in range(1, m + 1)]
    return _bordered(core, border)


def z1_pfaffian(m: int, sigma2: float, odd_border: str = "exact") -> LogSigned:
    """z_1 by the de Bruijn identity.

    Parameters
    ----------
    m, sigma2 : int, float
        Rank and variance parameter.
    odd_border : {"exact", "paper"}
        Border column used for odd ``m``.  ``"exact"`` integrates x^{i-1}
        against the beta=1 weight itself, giving the true partition
        function.  ``"paper"`` uses 2 (1, x^{i-1})_2, which reproduces the
        published odd-m erf closed form and table rows but not the
        defining integral.

    Returns
    -------
    LogSigned
        e^{-sigma2 m (m+1)^2 / 8} Pf[...]
    """
    _check(m, sigma2)
    _check_border(odd_border)

    def build():
        return _a1_matrix(m, sigma2, odd_border)

    pf = pfaffian_mp(build)
    value = LogSigned.from_mpf(pf) * LogSigned(1, -sigma2 * m * (m + 1) ** 2 / 8)
    return _positive(value, "z1 (Pfaffian)")


def log_zeta_offset(m: int, sigma2: float) -> float:
    """log(zeta / z_1) = log[2^{m(m-1)/4} pi^{m(m+1)/2} sigma^m / Gamma_m(m/2)]."""
    return (
        m * (m - 1) / 4 * math.log(2.0)
        + m * (m + 1) / 2 * math.log(math.pi)
        + 0.5 * m * math.log(sigma2)
        - multivariate_gamma(m, m / 2).log()
    )


def zeta(m: int, sigma2: float, odd_border: str = "exact") -> LogSigned:
    """Normalising constant of the Riemannian Gaussian on m x m SPD matrices."""
    return z1_pfaffian(m, sigma2, odd_border) * LogSigned(1, log_zeta_offset(m, sigma2))


# ---------------------------------------------------------------------------
# beta = 4


def z4_pfaffian(m: int, sigma2: float) -> LogSigned:
    """z_4 = e^{-sigma2 m (m - 1/2)^2} Pf[2 <x^i, x^j>_4]_{2m x 2m}."""
    _check(m, sigma2)

    def build():
        s2 = mpmath.mpf(sigma2)
        return _skew_matrix(2 * m, lambda i, j: 2 * pr.skew4_mp(i, j, s2))

    pf = pfaffian_mp(build)
    value = LogSigned.from_mpf(pf) * LogSigned(1, -sigma2 * m * (m - 0.5) ** 2)
    return _positive(value, "z4 (Pfaffian)")


def z4_closed_form_m2(sigma2: float) -> LogSigned:
    """z_4 at m=2: e^{2 sigma2} - 4 e^{sigma2/2} + 3 (vanishes as sigma -> 0)."""
    with mp.workdps(40):
        s2 = mpmath.mpf(sigma2)
        # written via expm1 so the O(sigma^8) result keeps its digits
        v = mpmath.expm1(2 * s2) - 4 * mpmath.expm1(s2 / 2)
    return _positive(LogSigned.from_mpf(v), "z4 closed form")


# ---------------------------------------------------------------------------
# so(2m) and sp(2m)


def _weyl_factor(m: int) -> float:
    """log of 2^m m! / (2m)!: chamber integral -> integral over R^m with 1/(2m)!."""
    return m * math.log(2.0) + math.lgamma(m + 1) - math.lgamma(2 * m + 1)


def _cosh_family(m, sigma2, odd_border, skew, inner, border, extra_power):
    _check(m, sigma2)
    _check_border(odd_border)

    def build():
        s2 = mpmath.mpf(sigma2)
        core = _skew_matrix(m, lambda i, j: 2 * skew(i + 1, j + 1, s2))
        if m % 2 == 0:
            return core
        if odd_border == "exact":
            b = [border(j, s2) for j in range(1, m + 1)]
        else:
            b = [2 * inner(j, s2) for j in range(1, m + 1)]
        return _bordered(core, b)

    pf = pfaffian_mp(build)
    logpref = (m * (m - 1) / 2 + extra_power) * math.log(2.0) + _weyl_factor(m)
    return LogSigned.from_mpf(pf) * LogSigned(1, logpref)


def zso_pfaffian(m: int, sigma2: float, odd_border: str = "exact") -> LogSigned:
    """so(2m), beta=1 partition function with the 1/(2m)! normalisation."""
    v = _cosh_family(m, sigma2, odd_border, pr.skew_so_mp, pr.inner_so_mp, pr.border_so_mp, 0)
    return _positive(v, "z_so (Pfaffian)")


def zsp_pfaffian(m: int, sigma2: float, odd_border: str = "exact") -> LogSigned:
    """sp(2m), beta=1 partition function with the 1/(2m)! normalisation."""
    v = _cosh_family(m, sigma2, odd_border, pr.skew_sp_mp, pr.inner_sp_mp, pr.border_sp_mp, m)
    return _positive(v, "z_sp (Pfaffian)")


# ---------------------------------------------------------------------------
# asymptotic regimes


def small_sigma_limit(beta: int, m: int) -> Callable[[float], LogSigned]:
    """Leading small-sigma behaviour of z_beta as a function of sigma.

    Only the power of sigma is reliable; the constants carry the same
    normalisation ambiguity as the Gaussian beta-ensemble reference.  For
    beta=1 and odd m only the power law is returned.
    """
    if beta == 1:
        power = m * (m - 1) / 2
        if m % 2 == 0:
            const = 0.5 * m * math.log(2.0) + sum(
                math.lgamma(2 * j + 1) - 2 * j * math.log(2.0) for j in range(m // 2)
            )
        else:
            const = 0.0
    elif beta == 2:
        power = m * (m - 1)
        const = -math.lgamma(m + 1) + sum(
            math.lgamma(j + 1) - (j - 1) * math.log(2.0) for j in range(1, m + 1)
        )
    elif beta == 4:
        power = 2 * m * (m - 1)
        const = -math.lgamma(m + 1) + sum(
            math.lgamma(2 * j + 1) - (2 * j + 1) * math.log(2.0) for j in range(1, m + 1)
        )
    else:
        raise ValueError("beta must be 1, 2 or 4")

    def limit(sigma: float) -> LogSigned:
        return LogSigned(1, const + power * math.log(sigma))

    return limit


def small_sigma_slope(beta: int, m: int, sigma2: float = 1e-6, ratio: float = 1.01) -> float:
    """Finite-difference slope d log z_beta / d log sigma at small sigma."""
    f = {1: z1_pfaffian, 2: z2_andreief, 4: z4_pfaffian}[beta]
    lo = f(m, sigma2).log()
    hi = f(m, sigma2 * ratio * ratio).log()
    return (hi - lo) / math.log(ratio)


def baxter_large_sigma(beta: int, m: int, sigma2: float) -> float:
    """Large-sigma approximation to log z_beta."""
    return beta / 24 * sigma2 * m * (m * m - 1) + beta / 8 * m * math.log(sigma2)


def planar_limit_shape(beta: int, m: int, sigma2: float, F: float) -> float:
    """-log m! - (m/2) log(pi sigma2) + (beta/2) F for a supplied F(t)."""
    return -math.lgamma(m + 1) - 0.5 * m * math.log(math.pi * sigma2) + 0.5 * beta * F


def planar_free_energy(m: int, sigma2: float) -> float:
    """F(t) at t = m sigma2 read off from the exact z_2 (inverse of the planar shape)."""
    return planar_limit_shape(2, m, sigma2, 0.0) * -1 + z2_closed_form(m, sigma2).log()


# ---------------------------------------------------------------------------
# conventions and dispatch


def _paper_c(beta: int) -> float:
    return 0.5 if beta == 1 else 1.0


def to_variance_convention(beta: int, m: int, sigma2: float, evaluate: Callable[[float], LogSigned]) -> LogSigned:
    """Re-express a partition function in the variance convention.

    The variance convention uses c_beta = beta/2 and the measure
    dr / sqrt(2 pi sigma2).  Rescaling r shows

        z_var(sigma2) = (c / (2 c_var))^{m/2} z_paper(sigma2 c / c_var),

    where ``evaluate`` computes z_paper at a given sigma2.
    """
    c, cv = _paper_c(beta), beta / 2
    return evaluate(sigma2 * c / cv) * LogSigned(1, 0.5 * m * math.log(c / (2 * cv)))


def _route(spec: pr.EnsembleSpec, odd_border: str) -> tuple[Callable[[float], LogSigned], str]:
    m = spec.m
    if spec.family == "SO":
        return (lambda s2: zso_pfaffian(m, s2, odd_border)), "deBruijnPf"
    if spec.family == "SP":
        return (lambda s2: zsp_pfaffian(m, s2, odd_border)), "deBruijnPf"
    if spec.beta == 1:
        return (lambda s2: z1_pfaffian(m, s2, odd_border)), "deBruijnPf"
    if spec.beta == 2:
        return (lambda s2: z2_closed_form(m, s2)), "closedForm"
    return (lambda s2: z4_pfaffian(m, s2)), "deBruijnPf"


def partition(spec: pr.EnsembleSpec, convention: str = "paper", odd_border: str = "exact") -> PartitionResult:
    """Evaluate z for an :class:`EnsembleSpec` in the requested convention."""
    if convention not in ("paper", "variance"):
        raise ValueError("convention must be 'paper' or 'variance'")
    evaluate, route = _route(spec, odd_border)
    if convention == "paper":
        value = evaluate(spec.sigma2)
    else:
        value = to_variance_convention(spec.beta, spec.m, spec.sigma2, evaluate)
    return PartitionResult(value, route, spec, convention)
