"""Skew-orthogonal polynomials for the beta=1 log-normal weight.

The monic polynomials p~_n satisfy

    <p~_{2k}, p~_{2l+1}>_1 = h~_k delta_{kl},
    <p~_{2k}, p~_{2l}>_1 = <p~_{2k+1}, p~_{2l+1}>_1 = 0,

and are built from Pfaffian minors of the moment matrix 2<x^i, x^j>_1.
Odd degrees are only defined up to p~_{2l+1} -> p~_{2l+1} + c p~_{2l}.
The ``"standard"`` gauge takes the Pfaffian over monomials
{0, ..., 2l-1, 2l+1}, so p~_{2l+1} has no x^{2l} term.  The ``"bordered"``
gauge (degrees 3 and up) uses a matrix bordered by the symmetric moments 2(1, x^j)_2; it
reproduces the closed forms in :func:`reference_polys` but is not
skew-orthogonal to the lower even polynomials.

Everything is computed in mpmath at a precision chosen from the
conditioning of the largest Pfaffian involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp

from . import products as pr
from .numerics import LogSigned
from .pfaffian import minors_last_column_mp
from .precision import GUARD_DIGITS, MAX_DPS, PrecisionExhausted, pf_mp, scaled_pf
from .qseries import Poly

__all__ = [
    "SkewFamily",
    "build_family",
    "phi_tilde",
    "skew_product",
    "skew_gram",
    "reference_polys",
    "reference_phi",
    "ODD_GAUGES",
]

ODD_GAUGES = ("standard", "bordered")


@dataclass(frozen=True)
class SkewFamily:
    """Monic skew-orthogonal polynomials p~_0 ... p~_{max_degree}.

    Attributes
    ----------
    sigma2 : float
    max_degree : int
    polys : tuple of Poly
        Extended-precision coefficients, ``polys[n].exact[n] == 1``.
    norms : tuple of LogSigned
        h~_k = <p~_{2k}, p~_{2k+1}>_1 for every complete pair.
    stripped_z : tuple of LogSigned
        z^{(n)} = e^{sigma2 n (n+1)^2 / 8} z_1(n) for n = 0 ... max_degree + 1.
    odd_gauge : str
    dps : int
        Working precision used for the construction.
    """

    sigma2: float
    max_degree: int
    polys: tuple
    norms: tuple
    stripped_z: tuple
    odd_gauge: str
    dps: int
    exact_norms: tuple = ()


def _moment_matrix(n: int, s2) -> list:
    a = [[mpmath.mpf(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = 2 * pr.skew1_mp(i, j, s2)
            a[i][j], a[j][i] = v, -v
    return a


def _bordered(core: list, border: list) -> list:
    out = [row[:] + [border[i]] for i, row in enumerate(core)]
    out.append([-b for b in border] + [mpmath.mpf(0)])
    return out


def _working_dps(size: int, sigma2: float) -> int:
    """Precision at which the size x size moment Pfaffian keeps GUARD_DIGITS."""
    n = size + size % 2
    dps = 30
    while True:
        with mp.workdps(dps):
            _, lost = scaled_pf(_moment_matrix(n, mpmath.mpf(sigma2)))
        if lost < dps - GUARD_DIGITS:
            # the minors and the skew-product checks cancel a little further
            return dps + 2 * GUARD_DIGITS
        if dps >= MAX_DPS:
            raise PrecisionExhausted("skew-orthogonal construction needs too many digits")
        dps = min(MAX_DPS, max(2 * dps, int(lost) + 2 * GUARD_DIGITS))


def _monic(coeffs: list) -> list:
    lead = coeffs[-1]
    return [c / lead for c in coeffs]


def _even_poly(ell: int, s: list) -> list:
    n = 2 * ell + 1
    core = [row[:n] for row in s[:n]]
    return _monic(minors_last_column_mp(_bordered(core, [mpmath.mpf(1)] * n)))


def _odd_standard(ell: int, s: list) -> list:
    idx = list(range(2 * ell)) + [2 * ell + 1]
    core = [[s[i][j] for j in idx] for i in idx]
    minors = minors_last_column_mp(_bordered(core, [mpmath.mpf(1)] * len(idx)))
    coeffs = [mpmath.mpf(0)] * (2 * ell + 2)
    for t, i in enumerate(idx):
        coeffs[i] = minors[t]
    return _monic(coeffs)


def _odd_bordered(ell: int, s: list, s2) -> list:
    n = 2 * ell + 2
    size = n + 2
    a = [[mpmath.mpf(0)] * size for _ in range(size)]
    for j in range(n):
        b = 2 * pr.inner_sw_mp(0, j, s2)
        a[0][j + 1], a[j + 1][0] = b, -b
        for i in range(n):
            a[i + 1][j + 1] = s[i][j]
    for i in range(n):
        a[i + 1][size - 1], a[size - 1][i + 1] = mpmath.mpf(1), mpmath.mpf(-1)
    # the first row has a zero in the last column and carries no monomial
    return _monic(minors_last_column_mp(a)[1:])


def _bilinear(p: Poly, q: Poly, s2) -> tuple:
    """<p, q>_1 and the sum of absolute terms, for cancellation diagnostics."""
    total, scale = [], mpmath.mpf(0)
    for i, a in enumerate(p.exact):
        for j, b in enumerate(q.exact):
            if i == j or a == 0 or b == 0:
                continue
            t = a * b * pr.skew1_mp(i, j, s2)
            total.append(t)
            scale += abs(t)
    return mpmath.fsum(total), scale


def build_family(sigma2: float, max_degree: int, odd_gauge: str = "standard") -> SkewFamily:
    """Construct p~_0 ... p~_{max_degree} with their norms.

    Raises
    ------
    ValueError
        For a negative degree or an unknown gauge.
    rgd.precision.NumericallySingular
        If a stripped partition value vanishes at working precision.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    if odd_gauge not in ODD_GAUGES:
        raise ValueError(f"odd_gauge must be one of {ODD_GAUGES}")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    dps = _working_dps(max_degree + 2, sigma2)
    with mp.workdps(dps):
        s2 = mpmath.mpf(sigma2)
        s = _moment_matrix(max_degree + 2, s2)
        polys = []
        for n in range(max_degree + 1):
            if n == 0:
                c = [mpmath.mpf(1)]
            elif n % 2 == 0:
                c = _even_poly(n // 2, s)
            elif odd_gauge == "standard" or n == 1:
                # at degree 1 the bordered matrix would give x - e^{3 sigma2/4}
                c = _odd_standard(n // 2, s)
            else:
                c = _odd_bordered(n // 2, s, s2)
            polys.append(Poly(c))
        exact_norms = tuple(
            _bilinear(polys[2 * k], polys[2 * k + 1], s2)[0] for k in range((max_degree + 1) // 2)
        )
        stripped = []
        for n in range(max_degree + 2):
            if n % 2 == 0:
                v = pf_mp([row[:n] for row in s[:n]]) if n else mpmath.mpf(1)
            else:
                core = [row[:n] for row in s[:n]]
                v = pf_mp(_bordered(core, [pr.border_moment1_mp(i, s2) for i in range(1, n + 1)]))
            stripped.append(LogSigned.from_mpf(v))
    return SkewFamily(
        sigma2=float(sigma2),
        max_degree=max_degree,
        polys=tuple(polys),
        norms=tuple(LogSigned.from_mpf(h) for h in exact_norms),
        stripped_z=tuple(stripped),
        odd_gauge=odd_gauge,
        dps=dps,
        exact_norms=exact_norms,
    )


def skew_product(family: SkewFamily, i: int, j: int):
    """<p~_i, p~_j>_1 at the family's precision, as an mpmath number."""
    with mp.workdps(family.dps):
        return _bilinear(family.polys[i], family.polys[j], family.sigma2)[0]


def skew_gram(family: SkewFamily) -> list[list[float]]:
    """Skew Gram matrix normalised by sqrt(|h~_{i//2} h~_{j//2}|).

    For a skew-orthogonal family this is the block matrix with entries
    +1 at (2k, 2k+1), -1 at (2k+1, 2k) and zero elsewhere.
    """
    n = 2 * len(family.exact_norms)
    with mp.workdps(family.dps):
        h = [abs(v) for v in family.exact_norms]
        return [
            [float(skew_product(family, i, j) / mpmath.sqrt(h[i // 2] * h[j // 2])) for j in range(n)]
            for i in range(n)
        ]


def _phi_mp(poly: Poly, s2, u):
    root = mpmath.sqrt(2 * s2)
    return mpmath.fsum(
        a * mpmath.exp(s2 * (k + 1) ** 2 / 2) * mpmath.erf((u - (k + 1) * s2) / root)
        for k, a in enumerate(poly.exact)
    ) / mpmath.sqrt(2)


def phi_tilde(family: SkewFamily, n: int, u: float) -> float:
    """phi~_n(e^u) = 1/2 int w_1(y) p~_n(y) sgn(e^u - y) dy / sqrt(pi sigma2).

    Term by term this is (1/sqrt 2) sum_k alpha_{n;k} e^{sigma2 (k+1)^2/2}
    erf((u - (k+1) sigma2) / sqrt(2 sigma2)).
    """
    if not 0 <= n <= family.max_degree:
        raise ValueError(f"degree {n} outside 0..{family.max_degree}")
    with mp.workdps(family.dps):
        return float(_phi_mp(family.polys[n], mpmath.mpf(family.sigma2), mpmath.mpf(u)))


# ---------------------------------------------------------------------------
# closed forms for the lowest degrees


def reference_polys(sigma2: float) -> list[list[float]]:
    """Closed-form coefficients of p~_0 ... p~_3 (bordered odd gauge)."""
    with mp.workdps(40):
        s2 = mpmath.mpf(sigma2)
        s = mpmath.sqrt(s2)
        e = lambda a: mpmath.exp(a * s2)  # noqa: E731
        e1, e2, e3 = mpmath.erf(s / 2), mpmath.erf(s), mpmath.erf(3 * s / 2)
        den = (e(2) + 1) * e1 - e(1.25) * e2
        p2 = [e(4), -e(2.5) * e2 / e1, 1]
        p3 = [
            ((-e(5.75) - e(8.75)) * e1 + e(7.5) * e2) / den,
            (e(8) * e1 + e(4.25) * e2 - e(6) * e3) / den,
            (-e(1.75) * e1 - e(5.5) * e2 + e(4.75) * e3) / den,
            1,
        ]
        return [[1.0], [0.0, 1.0], [float(c) for c in p2], [float(c) for c in p3]]


def reference_phi(n: int, sigma2: float, u: float) -> float:
    """Closed-form phi~_0 ... phi~_3 at x = e^u, as printed alongside the polynomials.

    The degree-2 expression carries unit weight on its middle term.
    """
    with mp.workdps(40):
        s2 = mpmath.mpf(sigma2)
        root = mpmath.sqrt(2 * s2)
        E = lambda k: mpmath.erf((u - k * s2) / root)  # noqa: E731
        if n == 0:
            v = mpmath.exp(s2 / 2) * E(1)
        elif n == 1:
            v = mpmath.exp(2 * s2) * E(2)
        elif n == 2:
            v = mpmath.exp(4.5 * s2) * (E(3) - E(2) + E(1))
        elif n == 3:
            a0, a1, a2, _ = reference_polys(sigma2)[3]
            v = (
                mpmath.exp(8 * s2) * E(4)
                + mpmath.exp(4.5 * s2) * E(3) * a2
                + mpmath.exp(2 * s2) * E(2) * a1
                + mpmath.exp(s2 / 2) * E(1) * a0
            )
        else:
            raise ValueError("closed forms exist for n <= 3 only")
        return float(v / mpmath.sqrt(2))
