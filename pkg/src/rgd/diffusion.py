"""Non-colliding Brownian motions in Weyl chambers.

N_t denotes the centred Gaussian density of variance t.  The A-type
kernel is the Karlin-McGregor determinant det[N_t(x_i - eta_j)]; the
B-type kernel adds an absorbing wall at the origin by the method of images.
Determinants of e^{x_i eta_j / t} span many orders of magnitude and are
evaluated in extended precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import mpmath
import numpy as np

from .numerics import LogSigned, ToleranceNotMet
from .precision import adaptive, scaled_det

__all__ = [
    "WalkerConfig",
    "DegenerateArguments",
    "km_kernel_a",
    "km_determinant_a",
    "km_equal_spacing_reduction",
    "km_kernel_b",
    "jacobian_b",
    "schur_weight",
    "schur_tableaux",
    "chapman_kolmogorov_check",
]


class DegenerateArguments(ValueError):
    """Two arguments of a bialternant coincide, so the ratio is indeterminate."""


def _strictly_decreasing(v: Sequence[float]) -> bool:
    return all(a > b for a, b in zip(v, v[1:]))


@dataclass(frozen=True)
class WalkerConfig:
    """Start points ``eta``, end points ``x`` and time ``t`` for m walkers."""

    x: tuple
    eta: tuple
    t: float
    family: str = "A"

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "eta", tuple(float(v) for v in self.eta))
        fam = self.family.upper()
        object.__setattr__(self, "family", fam)
        if fam not in ("A", "B"):
            raise ValueError("family must be 'A' or 'B'")
        if len(self.x) != len(self.eta) or not self.x:
            raise ValueError("x and eta must be non-empty and of equal length")
        if not self.t > 0:
            raise ValueError("t must be positive")
        if not (_strictly_decreasing(self.x) and _strictly_decreasing(self.eta)):
            raise ValueError("x and eta must be strictly decreasing")
        if fam == "B" and not (self.x[-1] > 0 and self.eta[-1] > 0):
            raise ValueError("the B chamber needs positive coordinates")

    @property
    def m(self) -> int:
        return len(self.x)


def _log_prefactor(x, eta, t) -> float:
    m = len(x)
    sq = sum(v * v for v in x) + sum(v * v for v in eta)
    return -0.5 * m * math.log(2 * math.pi * t) - sq / (2 * t)


def _det_logsigned(build) -> LogSigned:
    value = adaptive(lambda: scaled_det(build()))
    return LogSigned.from_mpf(value)


def km_determinant_a(x: Sequence[float], eta: Sequence[float], t: float) -> LogSigned:
    """det[N_t(x_i - eta_j)] for arbitrary (not necessarily ordered) points.

    Repeated points give two equal rows or columns and an exact zero.
    """
    if len(set(x)) < len(x) or len(set(eta)) < len(eta):
        return LogSigned.zero()

    def build():
        xt = [mpmath.mpf(v) / t for v in x]
        return [[mpmath.exp(xi * e) for e in eta] for xi in xt]

    return _det_logsigned(build) * LogSigned(1, _log_prefactor(x, eta, t))


def km_kernel_a(cfg: WalkerConfig) -> LogSigned:
    """Transition density of m non-colliding walkers in the A chamber.

    (2 pi t)^{-m/2} e^{-(|x|^2 + |eta|^2) / 2t} det[e^{x_i eta_j / t}].
    """
    if cfg.family != "A":
        raise ValueError("km_kernel_a needs an A-family configuration")
    return km_determinant_a(cfg.x, cfg.eta, cfg.t)


def km_equal_spacing_reduction(x: Sequence[float], t: float) -> LogSigned:
    """Kernel for start points eta_j = m - j, where the determinant is a Vandermonde.

    With z_i = e^{x_i/t} the result is
    (2 pi t)^{-m/2} e^{-(|x|^2 + |eta|^2)/2t} prod_{i<j} (z_i - z_j),
    and |eta|^2 = (m-1) m (2m-1) / 6.
    """
    m = len(x)
    eta = [m - j for j in range(1, m + 1)]
    total = LogSigned(1, _log_prefactor(x, eta, t))
    for i in range(m):
        for j in range(i + 1, m):
            d = (x[j] - x[i]) / t
            if d == 0:
                return LogSigned.zero()
            # z_i - z_j = e^{x_i/t} (1 - e^{(x_j - x_i)/t})
            sign = 1 if d < 0 else -1
            total = total * LogSigned(sign, x[i] / t + math.log(abs(math.expm1(d))))
    return total


def km_kernel_b(cfg: WalkerConfig) -> LogSigned:
    """Walkers that neither collide nor touch 0.

    (2 pi t)^{-m/2} e^{-(|x|^2 + |eta|^2)/2t} det[e^{x_i eta_j/t} - e^{-x_i eta_j/t}].
    """
    if cfg.family != "B":
        raise ValueError("km_kernel_b needs a B-family configuration")

    def build():
        return [[2 * mpmath.sinh(mpmath.mpf(xi) * e / cfg.t) for e in cfg.eta] for xi in cfg.x]

    return _det_logsigned(build) * LogSigned(1, _log_prefactor(cfg.x, cfg.eta, cfg.t))


def jacobian_b(lam: Sequence[float]) -> LogSigned:
    """prod_{i<j} 4 sinh(|l_i - l_j|/2) sinh(|l_i + l_j|/2) prod_i 2 sinh(|l_i|/2)."""

    def log2sinh(v):
        v = abs(v)
        if v == 0:
            return -math.inf
        return v + math.log(-math.expm1(-2 * v))

    total = 0.0
    m = len(lam)
    for i in range(m):
        total += log2sinh(lam[i] / 2)
        for j in range(i + 1, m):
            total += log2sinh((lam[i] - lam[j]) / 2) + log2sinh((lam[i] + lam[j]) / 2)
    if total == -math.inf:
        return LogSigned.zero()
    return LogSigned(1, total)


def schur_weight(eta: Sequence[int], x: Sequence[float], t: float) -> LogSigned:
    """Schur function s_lambda(z) with z_i = e^{x_i/t}, lambda_j = eta_j - m + j.

    Computed as the bialternant det[z_i^{eta_j}] / det[z_i^{m-j}].
    """
    m = len(eta)
    if len(x) != m:
        raise ValueError("eta and x must have equal length")
    if any(int(e) != e or e < 0 for e in eta) or not _strictly_decreasing(eta):
        raise ValueError("eta must be strictly decreasing non-negative integers")
    z = [math.exp(v / t) for v in x]
    for i in range(m):
        for j in range(i + 1, m):
            if abs(z[i] - z[j]) <= 1e-13 * max(abs(z[i]), abs(z[j])):
                raise DegenerateArguments(f"z_{i} and z_{j} coincide")

    def ratio():
        zz = [mpmath.exp(mpmath.mpf(v) / t) for v in x]
        num, lost_n = scaled_det([[zi ** int(e) for e in eta] for zi in zz])
        den, lost_d = scaled_det([[zi ** (m - j) for j in range(1, m + 1)] for zi in zz])
        return num / den, max(lost_n, lost_d)

    return LogSigned.from_mpf(adaptive(ratio))


def schur_tableaux(lam: Sequence[int], z: Sequence[float]) -> float:
    """s_lambda(z) by brute-force enumeration of semistandard tableaux.

    Only practical for small shapes; used as an independent check.
    """
    lam = [p for p in lam if p > 0]
    cells = [(r, c) for r, row in enumerate(lam) for c in range(row)]
    n = len(z)
    total = 0.0
    for fill in product(range(n), repeat=len(cells)):
        t = dict(zip(cells, fill))
        ok = all(
            (c == 0 or t[(r, c - 1)] <= v) and (r == 0 or t[(r - 1, c)] < v)
            for (r, c), v in t.items()
        )
        if ok:
            total += math.prod(z[v] for v in fill)
    return total


# ---------------------------------------------------------------------------
# Chapman-Kolmogorov


def _kernel_vec(x: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
    """det[N_t(x_i - y_j)] for batches: x shape (m,), y shape (N, m)."""
    g = np.exp(-((x[None, :, None] - y[:, None, :]) ** 2) / (2 * t)) / math.sqrt(2 * math.pi * t)
    return np.linalg.det(g)


def chapman_kolmogorov_check(eta_start: Sequence[float], x_end: Sequence[float], s: float, t: float,
                             rel_tol: float = 1e-11) -> tuple[float, float, float]:
    """Compare int_chamber b_s(y, eta) b_t(x, y) dy with b_{s+t}(x, eta).

    The chamber integral uses tensor Gauss-Legendre rules in gap
    coordinates (y_m, y_{m-1} - y_m, ...), refined until two rules agree.

    Returns
    -------
    lhs, rhs, rel_error : float
    """
    eta = np.asarray(eta_start, dtype=float)
    x = np.asarray(x_end, dtype=float)
    m = len(eta)
    if m not in (1, 2) or len(x) != m:
        raise ValueError("the quadrature check supports m = 1 or 2")
    rhs = float(_kernel_vec(x, eta[None, :], s + t)[0])
    # the midpoint measure concentrates near the s-weighted interpolation of eta and x
    centre = (t * eta + s * x) / (s + t)
    half = 12 * math.sqrt(s * t / (s + t)) + float(np.ptp(np.concatenate([eta, x]))) + 1.0
    lo = float(centre.min()) - half

    def run(n):
        nodes, w = np.polynomial.legendre.leggauss(n)
        # lowest walker in [lo, lo + 2 half], gap to the next one in [0, 2 half]
        a, wa = lo + half * (nodes + 1), half * w
        if m == 1:
            y, ww = a[:, None], wa
        else:
            g, wg = half * (nodes + 1), half * w
            A, G = np.meshgrid(a, g, indexing="ij")
            y = np.stack([(A + G).ravel(), A.ravel()], axis=-1)
            ww = np.outer(wa, wg).ravel()
        vals = _kernel_vec(eta, y, s) * _kernel_vec(x, y, t)
        return float(np.sum(ww * vals))

    n = 40
    prev = run(n)
    while True:
        n = int(n * 1.5)
        cur = run(n)
        if abs(cur - prev) <= rel_tol * abs(cur):
            break
        if n > 2000:
            raise ToleranceNotMet("Chapman-Kolmogorov quadrature did not converge", cur, abs(cur - prev))
        prev = cur
    return cur, rhs, abs(cur - rhs) / abs(rhs)
