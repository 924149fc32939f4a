"""Extended-precision kernels on top of mpmath.

Moment matrices of the log-normal weight are extremely ill-conditioned:
a 12x12 Pfaffian at sigma2=0.1 cancels more digits than a double holds.
The helpers here evaluate such quantities at a working precision that is
raised until the estimated cancellation leaves enough digits.
"""

from __future__ import annotations

from typing import Callable, Sequence

import mpmath
from mpmath import mp

from .numerics import LogSigned

GUARD_DIGITS = 20
MAX_DPS = 4000


class NumericallySingular(ArithmeticError):
    """A Pfaffian or determinant vanished to working precision."""


class PrecisionExhausted(ArithmeticError):
    """Raised when the required precision exceeds :data:`MAX_DPS`."""


def pf_mp(a: Sequence[Sequence]) -> mpmath.mpf:
    """Pfaffian by Parlett-Reid elimination with partial pivoting.

    Works on a copy at the current mpmath precision.  ``a`` must be
    skew-symmetric of even order.
    """
    n = len(a)
    if n % 2:
        raise ValueError("Pfaffian requires an even dimension")
    a = [list(row) for row in a]
    res = mp.mpf(1)
    for k in range(0, n - 1, 2):
        p = max(range(k + 1, n), key=lambda i: abs(a[k][i]))
        if p != k + 1:
            a[k + 1], a[p] = a[p], a[k + 1]
            for row in a:
                row[k + 1], row[p] = row[p], row[k + 1]
            res = -res
        piv = a[k][k + 1]
        if piv == 0:
            return mp.mpf(0)
        res *= piv
        rk, rk1 = a[k], a[k + 1]
        for i in range(k + 2, n):
            ci = rk1[i] / piv
            di = rk[i] / piv
            ai = a[i]
            for j in range(k + 2, n):
                ai[j] += ci * rk[j] - di * rk1[j]
    return res


def det_mp(a: Sequence[Sequence]) -> mpmath.mpf:
    """Determinant by Gaussian elimination with partial pivoting."""
    n = len(a)
    a = [list(row) for row in a]
    res = mp.mpf(1)
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[p][k] == 0:
            return mp.mpf(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            res = -res
        piv = a[k][k]
        res *= piv
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                ai, ak = a[i], a[k]
                for j in range(k + 1, n):
                    ai[j] -= f * ak[j]
    return res


def _row_scales(a) -> list:
    """Half of each row's max log-magnitude (zero rows get scale 0)."""
    scales = []
    for row in a:
        big = max((abs(v) for v in row), default=mp.mpf(0))
        scales.append(mpmath.log(big) / 2 if big else mp.mpf(0))
    return scales


def scaled_pf(a) -> tuple[mpmath.mpf, float]:
    """Pfaffian together with the number of decimal digits lost.

    The matrix is rescaled as ``B_ij = A_ij e^{-s_i - s_j}`` so that all
    entries are at most 1; ``-log10|Pf(B)|`` then measures cancellation.
    """
    s = _row_scales(a)
    n = len(a)
    b = [[a[i][j] * mpmath.exp(-s[i] - s[j]) for j in range(n)] for i in range(n)]
    pb = pf_mp(b)
    if pb == 0:
        return mp.mpf(0), float("inf")
    lost = max(0.0, -float(mpmath.log10(abs(pb))))
    return pb * mpmath.exp(mpmath.fsum(s)), lost


def scaled_det(a) -> tuple[mpmath.mpf, float]:
    """Determinant with row/column equilibration and digits-lost estimate."""
    n = len(a)
    r = []
    for row in a:
        big = max(abs(v) for v in row)
        r.append(big if big else mp.mpf(1))
    b = [[a[i][j] / r[i] for j in range(n)] for i in range(n)]
    c = []
    for j in range(n):
        big = max(abs(b[i][j]) for i in range(n))
        c.append(big if big else mp.mpf(1))
    b = [[b[i][j] / c[j] for j in range(n)] for i in range(n)]
    db = det_mp(b)
    if db == 0:
        return mp.mpf(0), float("inf")
    lost = max(0.0, -float(mpmath.log10(abs(db))))
    return db * mpmath.fprod(r) * mpmath.fprod(c), lost


def adaptive(evaluate: Callable[[], tuple[mpmath.mpf, float]], dps: int = 30) -> mpmath.mpf:
    """Run ``evaluate`` at increasing precision until few digits are lost.

    ``evaluate`` is called inside an ``mp.workdps`` block and returns a
    value together with its estimated loss of decimal digits.  The value
    is accepted once ``lost < dps - GUARD_DIGITS``.
    """
    zeros = 0
    while True:
        with mp.workdps(dps):
            value, lost = evaluate()
            if lost < dps - GUARD_DIGITS:
                return +value
        if lost == float("inf"):
            zeros += 1
            if zeros >= 2:
                raise NumericallySingular("exact zero at two working precisions")
        if dps >= MAX_DPS:
            raise PrecisionExhausted(f"more than {MAX_DPS} digits required")
        # the loss estimate saturates near dps when noise dominates, so at least double
        nxt = 2 * dps if lost == float("inf") else max(2 * dps, int(lost) + 2 * GUARD_DIGITS)
        dps = min(MAX_DPS, nxt)


def to_logsigned(value) -> LogSigned:
    return LogSigned.from_mpf(value)
