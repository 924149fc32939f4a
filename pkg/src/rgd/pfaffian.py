"""Pfaffians of ill-scaled skew-symmetric matrices.

Two evaluation paths are provided.  :func:`pfaffian` works on a
:class:`SkewMatrix` of LogSigned entries in double precision after
diagonal rescaling.  :func:`pfaffian_mp` and :func:`minors_last_column_mp`
operate on mpmath matrices at adaptive precision and are what the
partition and skew-orthogonal routes use.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import mpmath
import numpy as np

from .numerics import LogSigned
from .precision import NumericallySingular, adaptive, pf_mp, scaled_pf

__all__ = [
    "SkewMatrix",
    "OddDimension",
    "NumericallySingular",
    "pfaffian",
    "pfaffian_bordered",
    "pfaffian_minors_last_column",
    "pfaffian_mp",
    "minors_last_column_mp",
]

_UNDERFLOW = 1e-300


class OddDimension(ValueError):
    """A Pfaffian was requested for an odd-dimensional matrix."""


class SkewMatrix:
    """Dense skew-symmetric matrix with entries stored as sign and log-magnitude.

    Only the strict upper triangle is read from the inputs; the lower
    triangle and diagonal are filled in so the matrix is skew by
    construction.
    """

    def __init__(self, sign: np.ndarray, lnmag: np.ndarray):
        sign = np.asarray(sign, dtype=np.int8)
        lnmag = np.asarray(lnmag, dtype=float)
        n = sign.shape[0]
        if sign.shape != (n, n) or lnmag.shape != (n, n):
            raise ValueError("sign and lnmag must be square arrays of the same shape")
        iu = np.triu_indices(n, 1)
        s = np.zeros((n, n), dtype=np.int8)
        l = np.full((n, n), -np.inf)
        s[iu] = sign[iu]
        l[iu] = np.where(sign[iu] != 0, lnmag[iu], -np.inf)
        s.T[iu] = -s[iu]
        l.T[iu] = l[iu]
        self.sign = s
        self.lnmag = l

    @property
    def n(self) -> int:
        return self.sign.shape[0]

    @classmethod
    def from_entries(cls, n: int, entry: Callable[[int, int], LogSigned]) -> "SkewMatrix":
        """Build from a function giving the (i, j) entry for i < j."""
        sign = np.zeros((n, n), dtype=np.int8)
        lnmag = np.full((n, n), -np.inf)
        for i in range(n):
            for j in range(i + 1, n):
                v = entry(i, j)
                sign[i, j] = v.sign
                lnmag[i, j] = v.lnmag
        return cls(sign, lnmag)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "SkewMatrix":
        a = np.asarray(a, dtype=float)
        with np.errstate(divide="ignore"):
            return cls(np.sign(a).astype(np.int8), np.log(np.abs(a)))

    def entry(self, i: int, j: int) -> LogSigned:
        return LogSigned(int(self.sign[i, j]), float(self.lnmag[i, j]))

    def to_array(self) -> np.ndarray:
        """Plain float view; overflows for large entries."""
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.lnmag)

    def bordered(self, border: Sequence[LogSigned]) -> "SkewMatrix":
        """Append ``border`` as a last column (and its negative as last row)."""
        n = self.n
        if len(border) != n:
            raise ValueError("border length must match matrix size")
        sign = np.zeros((n + 1, n + 1), dtype=np.int8)
        lnmag = np.full((n + 1, n + 1), -np.inf)
        sign[:n, :n] = self.sign
        lnmag[:n, :n] = self.lnmag
        for i, b in enumerate(border):
            sign[i, n] = b.sign
            lnmag[i, n] = b.lnmag
        return SkewMatrix(sign, lnmag)

    def without(self, rows: Sequence[int]) -> "SkewMatrix":
        keep = [i for i in range(self.n) if i not in set(rows)]
        idx = np.ix_(keep, keep)
        return SkewMatrix(self.sign[idx], self.lnmag[idx])


def _scaled(a: SkewMatrix) -> tuple[np.ndarray, np.ndarray]:
    finite = np.where(a.sign != 0, a.lnmag, -np.inf)
    rowmax = finite.max(axis=1)
    s = np.where(np.isfinite(rowmax), rowmax / 2, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        b = np.where(a.sign != 0, a.sign * np.exp(a.lnmag - s[:, None] - s[None, :]), 0.0)
    return b, s


def _pf_real(b: np.ndarray) -> tuple[int, float]:
    """Parlett-Reid with full pivoting on a well-scaled real matrix.

    Returns (sign, log|Pf|); sign 0 if a pivot underflows.
    """
    b = b.copy()
    n = b.shape[0]
    sign = 1
    logabs = 0.0
    for k in range(0, n - 1, 2):
        sub = np.abs(b[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        i, j = i + k, j + k
        if i > j:
            i, j = j, i
        # bring the pivot to position (k, k+1); each symmetric swap flips the sign
        if i != k:
            b[[k, i]] = b[[i, k]]
            b[:, [k, i]] = b[:, [i, k]]
            sign = -sign
            if j == k:
                j = i
        if j != k + 1:
            b[[k + 1, j]] = b[[j, k + 1]]
            b[:, [k + 1, j]] = b[:, [j, k + 1]]
            sign = -sign
        piv = b[k, k + 1]
        if abs(piv) < _UNDERFLOW:
            return 0, -math.inf
        if piv < 0:
            sign = -sign
        logabs += math.log(abs(piv))
        if k + 2 < n:
            rk = b[k, k + 2 :]
            rk1 = b[k + 1, k + 2 :]
            b[k + 2 :, k + 2 :] += (np.outer(rk1, rk) - np.outer(rk, rk1)) / piv
    return sign, logabs


def pfaffian(a: SkewMatrix) -> LogSigned:
    """Pfaffian of a LogSigned skew matrix in double precision.

    Rows and columns are rescaled by ``e^{-s_i}`` with ``s_i`` half the
    row's largest log-magnitude, the scaled matrix is reduced by
    Parlett-Reid elimination, and the scales are restored in log space.
    An empty matrix has Pfaffian 1.  A vanishing pivot returns zero.
    """
    n = a.n
    if n % 2:
        raise OddDimension(f"Pfaffian of a {n}x{n} matrix")
    if n == 0:
        return LogSigned.one()
    b, s = _scaled(a)
    sign, logabs = _pf_real(b)
    if sign == 0:
        return LogSigned.zero()
    return LogSigned(sign, logabs + float(np.sum(s)))


def pfaffian_bordered(core: SkewMatrix, border: Sequence[LogSigned]) -> LogSigned:
    """Pfaffian of ``core`` (odd order) bordered by a last column."""
    if core.n % 2 == 0:
        raise OddDimension("bordered Pfaffian needs an odd core")
    return pfaffian(core.bordered(border))


def _expansion_sign(k: int, n: int) -> int:
    # Pf(A) = sum_k (-1)^{k+n} A[k, n-1] Pf(A without k, n-1), 0-based
    return 1 if (k + n) % 2 == 0 else -1


def pfaffian_minors_last_column(a: SkewMatrix) -> list[LogSigned]:
    """Signed Pfaffian minors for the expansion along the last column.

    Returns ``c`` with ``Pf(A) = sum_k c[k] * A[k, n-1]``.
    """
    n = a.n
    if n % 2:
        raise OddDimension(f"minor expansion of a {n}x{n} matrix")
    out = []
    for k in range(n - 1):
        minor = pfaffian(a.without([k, n - 1]))
        out.append(minor * _expansion_sign(k, n))
    return out


# ---------------------------------------------------------------------------
# extended precision


def pfaffian_mp(build: Callable[[], list], dps: int = 30) -> mpmath.mpf:
    """Adaptive-precision Pfaffian of the matrix returned by ``build``.

    ``build`` is re-invoked at each working precision so that entries are
    always computed as accurately as the elimination.
    """
    return adaptive(lambda: scaled_pf(build()), dps)


def minors_last_column_mp(a: list) -> list:
    """Extended-precision analogue of :func:`pfaffian_minors_last_column`.

    Evaluated at the caller's current mpmath precision.
    """
    n = len(a)
    if n % 2:
        raise OddDimension(f"minor expansion of a {n}x{n} matrix")
    out = []
    for k in range(n - 1):
        idx = [i for i in range(n - 1) if i != k]
        sub = [[a[i][j] for j in idx] for i in idx]
        out.append(_expansion_sign(k, n) * (pf_mp(sub) if sub else mpmath.mpf(1)))
    return out
