"""Eigenvalue densities and the Christoffel-Darboux kernel.

Densities are normalised to total mass m and expressed in the eigenvalue
variable r.  The polynomial variable x is related to r by the
completed-square shift x = e^{r + s} with s = sigma2 m / 2 for beta=2 and
s = sigma2 (m+1) / 2 for beta=1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from mpmath import mp

from .numerics import LogSigned
from .partition import z4_closed_form_m2
from .products import EnsembleSpec
from .qseries import Poly, sw_monic_coeffs_mp, sw_norm_mp
from .skewortho import SkewFamily, build_family

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

__all__ = [
    "DensityCurve",
    "OddM",
    "UnsupportedDensity",
    "rho2",
    "rho2_mixture",
    "rho1",
    "rho4_m2",
    "cd_kernel",
    "density_curve",
    "mass",
    "count_maxima",
    "default_window",
]


class OddM(ValueError):
    """The beta=1 density is only available for even m."""


class UnsupportedDensity(ValueError):
    """No density formula for this (family, beta, m)."""


@dataclass(frozen=True)
class DensityCurve:
    spec: EnsembleSpec
    grid: np.ndarray
    values: np.ndarray
    mixture: tuple | None = field(default=None)


def _dps(m: int, sigma2: float) -> int:
    # coefficient products reach e^{sigma2 m^2}; keep 30 digits after cancellation
    return 40 + int(1.2 * sigma2 * (m + 1) ** 2 / math.log(10))


# ---------------------------------------------------------------------------
# beta = 2


@lru_cache(maxsize=64)
def _cd_bracket(m: int, sigma2: float, dps: int):
    """Coefficients of a_{m-1}^2 [p_{m-1} p_m' - p_m p_{m-1}'] at ``dps`` digits."""
    with mp.workdps(dps):
        lo = Poly(sw_monic_coeffs_mp(m - 1, sigma2))
        hi = Poly(sw_monic_coeffs_mp(m, sigma2))
        dlo, dhi = lo.derivative(), hi.derivative()
        b = [mpmath.mpf(0)] * (2 * m - 1)
        for i, a in enumerate(lo.exact):
            for j, c in enumerate(dhi.exact):
                b[i + j] += a * c
        for i, a in enumerate(hi.exact):
            for j, c in enumerate(dlo.exact):
                if i + j < len(b):
                    b[i + j] -= a * c
        a2 = 1 / sw_norm_mp(m - 1, sigma2)
        return tuple(a2 * v for v in b), lo, hi, dlo, dhi, a2


def rho2_mixture(m: int, sigma2: float) -> list[tuple[float, LogSigned]]:
    """Gaussian-mixture form of the beta=2 density.

    Returns 2m-1 pairs (r_k, c_k) with r_k = sigma2 (k + 1 - m) / 2 such
    that rho_2(r) = sum_k c_k e^{-(r - r_k)^2 / sigma2}.  The c_k
    alternate in sign.
    """
    _check(m, sigma2)
    dps = _dps(m, sigma2)
    b = _cd_bracket(m, sigma2, dps)[0]
    with mp.workdps(dps):
        s2 = mpmath.mpf(sigma2)
        norm = 1 / mpmath.sqrt(mpmath.pi * s2)
        return [
            (float(s2 * (n + 1 - m) / 2), LogSigned.from_mpf(bn * mpmath.exp(s2 * (n + 1) ** 2 / 4) * norm))
            for n, bn in enumerate(b)
        ]


def _mixture_eval(m: int, sigma2: float, r: np.ndarray) -> np.ndarray:
    """Evaluate the mixture in extended precision (its terms cancel heavily)."""
    dps = _dps(m, sigma2)
    b = _cd_bracket(m, sigma2, dps)[0]
    out = np.empty(len(r))
    with mp.workdps(dps):
        s2 = mpmath.mpf(sigma2)
        norm = 1 / mpmath.sqrt(mpmath.pi * s2)
        # c_n e^{-(r-r_n)^2/s2} = e^{-r^2/s2} y^{n+1-m} c_n e^{-r_n^2/s2}, y = e^r
        d = [bn * mpmath.exp(s2 * (n + 1) ** 2 / 4 - s2 * (n + 1 - m) ** 2 / 4) * norm for n, bn in enumerate(b)]
        for i, ri in enumerate(r):
            ri = mpmath.mpf(float(ri))
            y = mpmath.exp(ri)
            acc = mpmath.mpf(0)
            for c in reversed(d):
                acc = acc * y + c
            out[i] = float(acc * y ** (1 - m) * mpmath.exp(-ri * ri / s2))
    return out


def rho2(m: int, sigma2: float, r) -> np.ndarray:
    """beta=2 density by the Christoffel-Darboux formula.

    rho(x) = a_{m-1}^2 w(x) [p_{m-1}(x) p_m'(x) - p_m(x) p_{m-1}'(x)] with
    monic Stieltjes-Wigert polynomials and exact derivatives, mapped to r
    through x = e^{r + sigma2 m / 2}.
    """
    _check(m, sigma2)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    dps = _dps(m, sigma2)
    _, lo, hi, dlo, dhi, a2 = _cd_bracket(m, sigma2, dps)
    out = np.empty(len(r))
    with mp.workdps(dps):
        s2 = mpmath.mpf(sigma2)
        shift = s2 * m / 2
        norm = 1 / mpmath.sqrt(mpmath.pi * s2)
        for i, ri in enumerate(r):
            u = mpmath.mpf(float(ri)) + shift
            x = mpmath.exp(u)
            bracket = lo(x) * dhi(x) - hi(x) * dlo(x)
            out[i] = float(a2 * bracket * mpmath.exp(-u * u / s2) * norm * x)
    return out


def cd_kernel(m: int, sigma2: float, x: float, y: float) -> float:
    """K_m(x, y) = sqrt(w(x) w(y)) sum_{k<m} P_k(x) P_k(y), orthonormal P_k."""
    _check(m, sigma2)
    if not (x > 0 and y > 0):
        raise ValueError("kernel arguments must be positive")
    dps = _dps(m, sigma2)
    with mp.workdps(dps):
        s2 = mpmath.mpf(sigma2)
        x, y = mpmath.mpf(x), mpmath.mpf(y)
        total = mpmath.mpf(0)
        for k in range(m):
            p = Poly(sw_monic_coeffs_mp(k, s2))
            total += p(x) * p(y) / sw_norm_mp(k, s2)
        w = lambda t: mpmath.exp(-mpmath.log(t) ** 2 / s2) / mpmath.sqrt(mpmath.pi * s2)  # noqa: E731
        return float(mpmath.sqrt(w(x) * w(y)) * total)


# ---------------------------------------------------------------------------
# beta = 1


def rho1(family: SkewFamily, m: int, sigma2: float, r) -> np.ndarray:
    """beta=1 density for even m from skew-orthogonal polynomials.

    rho(x) = w_1(x)/sqrt(pi sigma2) sum_{k<m/2} [phi~_{2k} p~_{2k+1} -
    phi~_{2k+1} p~_{2k}](x) / h~_k, mapped through x = e^{r + sigma2 (m+1)/2}.
    """
    if m % 2:
        raise OddM("the beta=1 density is implemented for even m only")
    _check(m, sigma2)
    if family.max_degree < m - 1:
        raise ValueError(f"family has degree {family.max_degree}, need {m - 1}")
    if not math.isclose(family.sigma2, sigma2, rel_tol=0, abs_tol=0):
        raise ValueError("family was built for a different sigma2")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty(len(r))
    with mp.workdps(family.dps):
        s2 = mpmath.mpf(sigma2)
        shift = s2 * (m + 1) / 2
        norm = 1 / mpmath.sqrt(mpmath.pi * s2)
        root = mpmath.sqrt(2 * s2)
        # phi~_n is a combination of the same m erf terms for every n
        growth = [mpmath.exp(s2 * (k + 1) ** 2 / 2) / mpmath.sqrt(2) for k in range(m)]
        pairs = [(family.polys[2 * k], family.polys[2 * k + 1], family.exact_norms[k]) for k in range(m // 2)]
        for i, ri in enumerate(r):
            u = mpmath.mpf(float(ri)) + shift
            x = mpmath.exp(u)
            terms = [g * mpmath.erf((u - (k + 1) * s2) / root) for k, g in enumerate(growth)]
            phi = lambda p: mpmath.fsum(a * t for a, t in zip(p.exact, terms))  # noqa: E731
            total = mpmath.fsum((phi(pe) * po(x) - phi(po) * pe(x)) / h for pe, po, h in pairs)
            out[i] = float(mpmath.exp(-u * u / (2 * s2)) * norm * total * x)
    return out


# ---------------------------------------------------------------------------
# beta = 4


def rho4_m2(sigma2: float, r) -> np.ndarray:
    """beta=4 density at m=2.

    (2 / z_4) e^{-r^2/sigma2} / sqrt(pi sigma2)
        [e^{sigma2} cosh 2r - 4 e^{sigma2/4} cosh r + 3].
    """
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    z = z4_closed_form_m2(sigma2).to_mpf()
    out = np.empty(len(r))
    with mp.workdps(40):
        s2 = mpmath.mpf(sigma2)
        for i, ri in enumerate(r):
            ri = mpmath.mpf(float(ri))
            # expm1 forms keep the O(sigma^8) bracket accurate at small sigma
            # cosh 2r - 4 cosh r + 3 = 8 sinh^4(r/2)
            bracket = (
                mpmath.expm1(s2) * mpmath.cosh(2 * ri)
                - 4 * mpmath.expm1(s2 / 4) * mpmath.cosh(ri)
                + 8 * mpmath.sinh(ri / 2) ** 4
            )
            out[i] = float(2 / z * mpmath.exp(-ri * ri / s2) / mpmath.sqrt(mpmath.pi * s2) * bracket)
    return out


# ---------------------------------------------------------------------------
# curves


def _check(m: int, sigma2: float) -> None:
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")


def default_window(m: int, sigma2: float) -> tuple[float, float]:
    half = m * sigma2 / 2 + 8 * math.sqrt(sigma2)
    return -half, half


def density_curve(spec: EnsembleSpec, grid=None, family: SkewFamily | None = None) -> DensityCurve:
    """Sample the density of ``spec`` on ``grid`` (default: 801 points on the mass window)."""
    if grid is None:
        lo, hi = default_window(spec.m, spec.sigma2)
        grid = np.linspace(lo, hi, 801)
    grid = np.asarray(grid, dtype=float)
    if spec.family != "A":
        raise UnsupportedDensity("densities are available for the A family only")
    mixture = None
    if spec.beta == 2:
        values = rho2(spec.m, spec.sigma2, grid)
        mixture = tuple(rho2_mixture(spec.m, spec.sigma2))
    elif spec.beta == 1:
        if spec.m % 2:
            raise OddM("the beta=1 density is implemented for even m only")
        family = family or build_family(spec.sigma2, spec.m - 1)
        values = rho1(family, spec.m, spec.sigma2, grid)
    else:
        if spec.m != 2:
            raise UnsupportedDensity("the beta=4 density is implemented for m=2 only")
        values = rho4_m2(spec.sigma2, grid)
    return DensityCurve(spec, grid, values, mixture)


def mass(curve: DensityCurve) -> float:
    """Trapezoidal integral of the sampled density."""
    return float(_trapezoid(curve.values, curve.grid))


def count_maxima(values: np.ndarray) -> int:
    """Number of strict interior local maxima."""
    v = np.asarray(values)
    return int(np.sum((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])))
