"""q-deformed combinatorics and the Stieltjes-Wigert polynomials.

With ``q = exp(-sigma2/2)`` the monic Stieltjes-Wigert polynomials are
orthogonal for the log-normal weight ``exp(-(log x)^2/sigma2)/sqrt(pi sigma2)``
on the half line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import mpmath
from mpmath import mp

from .numerics import LogSigned

__all__ = [
    "QParam",
    "DomainError",
    "Poly",
    "q_number",
    "q_binomial",
    "q_gamma",
    "sw_monic",
    "sw_polynomial",
    "sw_monic_coeffs_mp",
    "sw_norm_mp",
]


class DomainError(ValueError):
    """Argument outside the domain of a q-series function."""


@dataclass(frozen=True)
class QParam:
    """Deformation parameter.

    ``origin`` is ``"sw"`` for q = e^{-sigma2/2} (Stieltjes-Wigert) or
    ``"sinh"`` for the hyperbolic deformation q = e^{-sigma}.
    """

    q: float
    origin: str = "sw"

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise DomainError(f"q must lie in (0, 1), got {self.q!r}")
        if self.origin not in ("sw", "sinh"):
            raise ValueError("origin must be 'sw' or 'sinh'")

    @classmethod
    def from_sigma2(cls, sigma2: float) -> "QParam":
        return cls(math.exp(-0.5 * sigma2), "sw")

    @classmethod
    def sinh(cls, sigma: float) -> "QParam":
        return cls(math.exp(-sigma), "sinh")

    @property
    def log_q(self) -> float:
        return math.log(self.q)

    @property
    def sigma(self) -> float:
        if self.origin == "sw":
            return math.sqrt(-2.0 * self.log_q)
        return -self.log_q


def q_number(x: float, qp: QParam) -> float:
    """Symmetric q-number (q^{-x/2} - q^{x/2}) / (q^{-1/2} - q^{1/2})."""
    h = -0.5 * qp.log_q
    return math.sinh(x * h) / math.sinh(h)


def _log_one_minus_qpow(k: int, log_q: float) -> float:
    # log(1 - q^k) without cancellation as q -> 1
    return math.log(-math.expm1(k * log_q))


def q_binomial(n: int, nu: int, qp: QParam) -> LogSigned:
    """Gaussian binomial coefficient [n choose nu]_q."""
    if not 0 <= nu <= n:
        raise DomainError(f"nu={nu} outside [0, {n}]")
    lq = qp.log_q
    total = 0.0
    for j in range(1, nu + 1):
        total += _log_one_minus_qpow(n - j + 1, lq) - _log_one_minus_qpow(j, lq)
    return LogSigned(1, total)


def q_gamma(j: int, qp: QParam) -> LogSigned:
    """Gamma_q(j+1) = prod_{n=1}^{j} (1 - q^n)/(1 - q)."""
    if j < 0:
        raise DomainError("j must be non-negative")
    lq = qp.log_q
    base = _log_one_minus_qpow(1, lq)
    return LogSigned(1, sum(_log_one_minus_qpow(n, lq) - base for n in range(1, j + 1)))


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Polynomial in the monomial basis with extended-precision coefficients.

    ``coeffs`` gives LogSigned views; ``exact`` holds the mpmath values
    the object was built from.
    """

    __slots__ = ("exact",)

    def __init__(self, coefficients: Iterable):
        c = [mpmath.mpf(v) for v in coefficients]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.exact = tuple(c) if c else (mpmath.mpf(0),)

    @property
    def degree(self) -> int:
        if len(self.exact) == 1 and self.exact[0] == 0:
            return -1
        return len(self.exact) - 1

    @property
    def coeffs(self) -> tuple[LogSigned, ...]:
        return tuple(LogSigned.from_mpf(c) for c in self.exact)

    def __call__(self, x):
        acc = mpmath.mpf(0)
        for c in reversed(self.exact):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.exact)][1:] or [0])

    def scaled(self, factor) -> "Poly":
        return Poly([factor * c for c in self.exact])

    def __len__(self) -> int:
        return len(self.exact)

    def __repr__(self) -> str:
        terms = ", ".join(mpmath.nstr(c, 8) for c in self.exact)
        return f"Poly([{terms}])"


def _check_sw(qp: QParam) -> float:
    if qp.origin != "sw":
        raise DomainError("Stieltjes-Wigert polynomials need the 'sw' parameter")
    return -2.0 * qp.log_q


def _default_dps(n: int, sigma2: float) -> int:
    # coefficient magnitudes span q^{-(n^2 + n/2)}
    return 30 + int(0.5 * sigma2 * (n * n + n) / math.log(10))


def sw_monic_coeffs_mp(n: int, sigma2) -> list:
    """Coefficients of the monic SW polynomial p_n at the current precision.

    p_n(x) = sum_nu (-1)^{n-nu} [n nu]_q q^{nu^2 + nu/2 - n^2 - n/2} x^nu.
    """
    s2 = mpmath.mpf(sigma2)
    h = s2 / 2  # q = e^{-h}
    one_minus = [None] + [-mpmath.expm1(-j * h) for j in range(1, n + 1)]
    out = []
    binom = mpmath.mpf(1)
    for nu in range(n + 1):
        if nu:
            binom = binom * one_minus[n - nu + 1] / one_minus[nu]
        expo = nu * nu + mpmath.mpf(nu) / 2 - n * n - mpmath.mpf(n) / 2
        out.append((-1) ** (n - nu) * binom * mpmath.exp(-h * expo))
    return out


def sw_norm_mp(n: int, sigma2):
    """a_n^{-2} = (q;q)_n / q^{2n^2 + 2n + 1/2} at the current precision."""
    h = mpmath.mpf(sigma2) / 2
    poch = mpmath.fprod(-mpmath.expm1(-j * h) for j in range(1, n + 1))
    return poch * mpmath.exp(h * (2 * n * n + 2 * n + mpmath.mpf(1) / 2))


def sw_monic(n: int, qp: QParam) -> tuple[Poly, LogSigned]:
    """Monic Stieltjes-Wigert polynomial p_n and its squared norm a_n^{-2}."""
    if n < 0:
        raise DomainError("degree must be non-negative")
    s2 = _check_sw(qp)
    with mp.workdps(_default_dps(n, s2)):
        poly = Poly(sw_monic_coeffs_mp(n, s2))
        norm = sw_norm_mp(n, s2)
    return poly, LogSigned.from_mpf(norm)


def sw_polynomial(n: int, qp: QParam) -> Poly:
    """Orthonormal Stieltjes-Wigert polynomial P_n = a_n p_n (positive leading coefficient)."""
    if n < 0:
        raise DomainError("degree must be non-negative")
    s2 = _check_sw(qp)
    with mp.workdps(_default_dps(n, s2)):
        a = 1 / mpmath.sqrt(sw_norm_mp(n, s2))
        return Poly([a * c for c in sw_monic_coeffs_mp(n, s2)])
