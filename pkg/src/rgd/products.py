"""Moment functionals of the log-normal weights.

Symmetric products ``(f, g)_2`` and skew products ``<f, g>_beta`` of
monomials for the A series, plus their so(2m) and sp(2m) analogues in the
variable ``x = cosh r``.  Functions without suffix return
:class:`~rgd.numerics.LogSigned` in double precision.  The ``*_mp``
variants return mpmath numbers at the caller's working precision and feed
the extended-precision Pfaffians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .numerics import LogSigned, QuadratureSpec, erf, integrate

__all__ = [
    "EnsembleSpec",
    "inner_sw",
    "skew4",
    "skew1",
    "border_moment1",
    "inner_so",
    "inner_sp",
    "skew_so",
    "skew_sp",
    "border_so",
    "border_sp",
]

FAMILIES = ("A", "SO", "SP")


@dataclass(frozen=True)
class EnsembleSpec:
    """One model instance: root family, Dyson index, rank and sigma^2."""

    family: str
    beta: int
    m: int
    sigma2: float

    def __post_init__(self):
        fam = self.family.upper()
        object.__setattr__(self, "family", fam)
        if fam not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.beta not in (1, 2, 4):
            raise ValueError("beta must be 1, 2 or 4")
        if fam != "A" and self.beta != 1:
            raise ValueError("so/sp families are only defined for beta = 1")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def c_beta(self) -> float:
        return 0.5 if self.beta == 1 else 1.0


def _sigma(sigma2: float) -> float:
    return math.sqrt(sigma2)


# ---------------------------------------------------------------------------
# A series


def inner_sw(k: int, l: int, sigma2: float) -> LogSigned:
    """(x^k, x^l)_2 = e^{sigma2 (k+l+1)^2 / 4}."""
    return LogSigned(1, 0.25 * sigma2 * (k + l + 1) ** 2)


def skew4(k: int, l: int, sigma2: float) -> LogSigned:
    """<x^k, x^l>_4 = e^{sigma2 (k+l)^2 / 4} (l - k) / 2."""
    if k == l:
        return LogSigned.zero()
    return LogSigned(1 if l > k else -1, 0.25 * sigma2 * (k + l) ** 2 + math.log(abs(l - k) / 2))


def skew1(k: int, l: int, sigma2: float) -> LogSigned:
    """<x^k, x^l>_1 = e^{sigma2 [(k+1)^2 + (l+1)^2] / 2} erf(sigma (l - k) / 2)."""
    if k == l:
        return LogSigned.zero()
    e = erf(_sigma(sigma2) * abs(l - k) / 2)
    return LogSigned(1 if l > k else -1, 0.5 * sigma2 * ((k + 1) ** 2 + (l + 1) ** 2) + math.log(e))


def border_moment1(i: int, sigma2: float) -> LogSigned:
    """Integral of x^{i-1} against the beta=1 weight: sqrt(2) e^{sigma2 i^2 / 2}."""
    return LogSigned(1, 0.5 * math.log(2.0) + 0.5 * sigma2 * i * i)


def inner_sw_mp(k, l, sigma2):
    return mpmath.exp(mpmath.mpf(sigma2) * (k + l + 1) ** 2 / 4)


def skew4_mp(k, l, sigma2):
    return mpmath.exp(mpmath.mpf(sigma2) * (k + l) ** 2 / 4) * mpmath.mpf(l - k) / 2


def skew1_mp(k, l, sigma2):
    s2 = mpmath.mpf(sigma2)
    return mpmath.exp(s2 * ((k + 1) ** 2 + (l + 1) ** 2) / 2) * mpmath.erf(mpmath.sqrt(s2) * (l - k) / 2)


def border_moment1_mp(i, sigma2):
    return mpmath.sqrt(2) * mpmath.exp(mpmath.mpf(sigma2) * i * i / 2)


# ---------------------------------------------------------------------------
# so(2m) and sp(2m), variable x = cosh r on the half line


def inner_so(j: int, sigma2: float) -> LogSigned:
    """(1, x^{j-1})_2 for so(2m): the integral of cosh^{j-1} r against e^{-r^2/sigma2} on r > 0."""
    terms = [
        LogSigned(1, math.log(math.comb(j - 1, l)) + 0.25 * sigma2 * (j - 1 - 2 * l) ** 2)
        for l in range(j)
    ]
    total = LogSigned.zero()
    for t in terms:
        total = total + t
    return total * LogSigned(1, -j * math.log(2.0))


def inner_sp(j: int, sigma2: float) -> LogSigned:
    """(1, x^{j-1})_2 for sp(2m): sinh r cosh^{j-1} r against e^{-r^2/sigma2} on r > 0."""
    s = _sigma(sigma2)
    total = 0.0
    # terms are combined in a common scale to keep doubles in range
    shift = 0.25 * sigma2 * j * j
    for l in range(j):
        a, b = j - 2 * l, j - 2 * l - 2
        total += math.comb(j - 1, l) * (
            math.exp(0.25 * sigma2 * a * a - shift) * (1 + erf(s * a / 2))
            - math.exp(0.25 * sigma2 * b * b - shift) * (1 + erf(s * b / 2))
        )
    v = LogSigned.from_real(total)
    return v * LogSigned(1, shift - (j + 1) * math.log(2.0))


def inner_so_mp(j, sigma2):
    s2 = mpmath.mpf(sigma2)
    return mpmath.fsum(mpmath.binomial(j - 1, l) * mpmath.exp(s2 * (j - 1 - 2 * l) ** 2 / 4) for l in range(j)) / 2**j


def inner_sp_mp(j, sigma2):
    s2 = mpmath.mpf(sigma2)
    s = mpmath.sqrt(s2)

    def piece(a):
        return mpmath.exp(s2 * a * a / 4) * (1 + mpmath.erf(s * a / 2))

    return mpmath.fsum(
        mpmath.binomial(j - 1, l) * (piece(j - 2 * l) - piece(j - 2 * l - 2)) for l in range(j)
    ) / 2 ** (j + 1)


def border_so(j: int, sigma2: float) -> LogSigned:
    """Integral of x^{j-1} against the beta=1 so weight e^{-r^2/2sigma2} on r > 0."""
    return inner_so(j, 2 * sigma2) * LogSigned(1, 0.5 * math.log(2.0))


def border_sp(j: int, sigma2: float) -> LogSigned:
    return inner_sp(j, 2 * sigma2) * LogSigned(1, 0.5 * math.log(2.0))


def border_so_mp(j, sigma2):
    return mpmath.sqrt(2) * inner_so_mp(j, 2 * mpmath.mpf(sigma2))


def border_sp_mp(j, sigma2):
    return mpmath.sqrt(2) * inner_sp_mp(j, 2 * mpmath.mpf(sigma2))


def _exponents(j: int, odd: bool) -> list[tuple[int, int]]:
    """(binomial weight, exponent) pairs expanding cosh^{j-1} or sinh cosh^{j-1}.

    cosh^{j-1} r = 2^{-(j-1)} sum_l C(j-1,l) e^{(j-1-2l) r}
    sinh r cosh^{j-1} r = 2^{-j} sum_l C(j-1,l) (e^{(j-2l) r} - e^{(j-2l-2) r})
    """
    out = []
    for l in range(j):
        c = math.comb(j - 1, l)
        if odd:
            out.append((c, j - 2 * l))
            out.append((-c, j - 2 * l - 2))
        else:
            out.append((c, j - 1 - 2 * l))
    return out


def _skew_double(i: int, j: int, sigma2: float, odd: bool) -> LogSigned:
    if i == j:
        return LogSigned.zero()
    if i > j:
        return -_skew_double(j, i, sigma2, odd)
    f = _skew_integrand_np(i, j, sigma2, odd)
    # the integrand peaks near r = sigma2 * (largest exponent); scale it to O(1)
    center = sigma2 * (i + j) / 2
    scale = math.exp(0.5 * sigma2 * ((i + int(odd)) ** 2 + (j + int(odd)) ** 2))
    spec = QuadratureSpec(
        abs_tol=1e-12, rel_tol=1e-13, max_subdivisions=14, domain=(0.0, math.inf),
        scale=max(center, math.sqrt(sigma2)),
    )
    value, _ = integrate(lambda r: f(r) / scale, spec)
    return LogSigned.from_real(value) * LogSigned(1, math.log(scale))


def _skew_integrand_np(i, j, sigma2, odd):
    # orientation sign(r2 - r1), the same as the A-series product, so that
    # Pf[2 <.,.>] is positive on the chamber
    # the r2 integral is analytic:
    # int_0^inf e^{-r^2/2s2 + b r} sign(r1 - r) dr / sqrt(pi s2)
    #   = e^{s2 b^2/2} / sqrt(2) [2 erf((r1 - s2 b)/sqrt(2 s2)) + erf(b sqrt(s2/2)) - 1]
    s2 = float(sigma2)
    root = math.sqrt(2 * s2)
    norm = 1 / math.sqrt(math.pi * s2)
    pref = 2.0 ** (-(j if odd else j - 1))
    half_root = math.sqrt(s2 / 2)
    consts = [(c * math.exp(s2 * b * b / 2) / math.sqrt(2), b, erf(b * half_root)) for c, b in _exponents(j, odd)]

    def f(r):
        r = np.asarray(r, dtype=float)
        inner = np.zeros_like(r)
        for c, b, e0 in consts:
            inner = inner + c * (2 * erf((r - s2 * b) / root) + e0 - 1)
        with np.errstate(over="ignore", invalid="ignore"):
            outer = np.sinh(r) * np.cosh(r) ** (i - 1) if odd else np.cosh(r) ** (i - 1)
            val = -0.5 * norm * np.exp(-r * r / (2 * s2)) * outer * pref * inner
        # inf * 0 far in the tail, where the Gaussian has underflowed
        return np.where(np.isfinite(val), val, 0.0)

    return f


def _skew_integrand_mp(i, j, sigma2, odd):
    s2 = mpmath.mpf(sigma2)
    root = mpmath.sqrt(2 * s2)
    norm = 1 / mpmath.sqrt(mpmath.pi * s2)
    pref = mpmath.mpf(2) ** (-(j if odd else j - 1))
    half_root = mpmath.sqrt(s2 / 2)
    consts = [
        (c * mpmath.exp(s2 * b * b / 2) / mpmath.sqrt(2), b, mpmath.erf(b * half_root))
        for c, b in _exponents(j, odd)
    ]

    def f(r):
        inner = mpmath.fsum(c * (2 * mpmath.erf((r - s2 * b) / root) + e0 - 1) for c, b, e0 in consts)
        outer = mpmath.sinh(r) * mpmath.cosh(r) ** (i - 1) if odd else mpmath.cosh(r) ** (i - 1)
        return -norm * mpmath.exp(-r * r / (2 * s2)) * outer * pref * inner / 2

    return f


def _skew_mp(i, j, sigma2, odd):
    if i == j:
        return mpmath.mpf(0)
    if i > j:
        return -_skew_mp(j, i, sigma2, odd)
    f = _skew_integrand_mp(i, j, sigma2, odd)
    s2 = mpmath.mpf(sigma2)
    s = mpmath.sqrt(s2)
    # break points around the Gaussian bulk help tanh-sinh converge
    pts = [0] + [p for p in (s2 * (i + j) / 2, s2 * (i + j) / 2 + 6 * s) if p > 0] + [mpmath.inf]
    return mpmath.quad(f, sorted(set(pts)))


def skew_so(i: int, j: int, sigma2: float) -> LogSigned:
    """<x^{i-1}, x^{j-1}>_1 for so(2m), exactly antisymmetric."""
    return _skew_double(i, j, sigma2, odd=False)


def skew_sp(i: int, j: int, sigma2: float) -> LogSigned:
    """<x^{i-1}, x^{j-1}>_1 for sp(2m), exactly antisymmetric."""
    return _skew_double(i, j, sigma2, odd=True)


def skew_so_mp(i, j, sigma2):
    return _skew_mp(i, j, sigma2, odd=False)


def skew_sp_mp(i, j, sigma2):
    return _skew_mp(i, j, sigma2, odd=True)
