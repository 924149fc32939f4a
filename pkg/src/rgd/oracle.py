"""Brute-force evaluators of the defining integrals.

Nothing here uses the moment products, Pfaffians or closed forms, so
agreement with those routes is an independent check.  Quadrature works
in ordered-chamber gap coordinates, where the integrand is smooth; it
uses tensor Gauss-Legendre rules refined until two successive rules agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import LogSigned, Rng, ToleranceNotMet
from .products import EnsembleSpec

__all__ = [
    "OracleResult",
    "InsufficientSamples",
    "z_oracle_quadrature",
    "z_oracle_mc",
    "rho_oracle",
    "log_integrand",
]


class InsufficientSamples(ArithmeticError):
    """Monte Carlo relative standard error exceeded the allowed level."""


@dataclass(frozen=True)
class OracleResult:
    value: LogSigned
    method: str
    error_bound: float
    samples: int = 0

    @property
    def log_value(self) -> float:
        return self.value.log()


def _c(spec: EnsembleSpec) -> float:
    return spec.c_beta if spec.family == "A" else 0.5


def log_integrand(spec: EnsembleSpec, r: np.ndarray) -> np.ndarray:
    """Log of the unsymmetrised integrand at points ``r`` (shape (..., m)).

    Includes the Gaussian measure e^{-c r^2/sigma2}/sqrt(pi sigma2) but not
    the 1/m! or 1/(2m)! symmetry factor.
    """
    m = r.shape[-1]
    s2 = spec.sigma2
    out = np.sum(-_c(spec) * r * r / s2, axis=-1) - 0.5 * m * math.log(math.pi * s2)

    def log2sinh(x):
        x = np.abs(x)
        with np.errstate(divide="ignore"):
            return x + np.log(-np.expm1(-2 * x))

    for i in range(m):
        for j in range(i + 1, m):
            d = log2sinh((r[..., i] - r[..., j]) / 2)
            if spec.family == "A":
                out = out + spec.beta * d
            else:
                out = out + d + log2sinh((r[..., i] + r[..., j]) / 2)
    if spec.family == "SP":
        out = out + np.sum(log2sinh(r), axis=-1)
    return out


def _scales(spec: EnsembleSpec) -> tuple[float, float]:
    """(width of one coordinate, spread of the eigenvalue cloud)."""
    c = _c(spec)
    tau = math.sqrt(spec.sigma2 / (2 * c))
    if spec.family == "A":
        drift = spec.sigma2 * spec.beta * (spec.m - 1) / (2 * c)
    else:
        drift = spec.sigma2 * (spec.m + 1) / (2 * c)
    return tau, drift


def _tensor_rule(lims: list[tuple[float, float]], n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    pts, wts = [], []
    for lo, hi in lims:
        half = 0.5 * (hi - lo)
        pts.append(lo + half * (x + 1))
        wts.append(half * w)
    grids = np.meshgrid(*pts, indexing="ij")
    wgrid = np.ones_like(grids[0])
    for k, g in enumerate(np.meshgrid(*wts, indexing="ij")):
        wgrid = wgrid * g
    return [g.ravel() for g in grids], wgrid.ravel()


def _log_sum(logs: np.ndarray, weights: np.ndarray) -> tuple[float, float]:
    """log sum(w e^{l}) returned as (max, scaled sum) to avoid overflow."""
    mx = float(np.max(logs))
    return mx, float(np.sum(weights * np.exp(logs - mx)))


def _chamber_integral(spec: EnsembleSpec, n: int) -> tuple[float, float]:
    """Integral of the integrand over the ordered chamber, as (log-offset, value)."""
    m = spec.m
    tau, drift = _scales(spec)
    span = 12 * tau + drift
    if spec.family == "A":
        lims = [(-span, span)] + [(0.0, 2 * span)] * (m - 1)
    else:
        lims = [(0.0, span)] + [(0.0, span)] * (m - 1)
    (anchor, *gaps), w = _tensor_rule(lims, n)
    # r_m = anchor, r_{k} = anchor + sum of gaps above it
    cols = [anchor]
    acc = anchor
    for g in gaps:
        acc = acc + g
        cols.append(acc)
    r = np.stack(cols[::-1], axis=-1)
    return _log_sum(log_integrand(spec, r), w)


def _refine(run, n0: int, rel_tol: float, n_max: int):
    n = n0
    mx, prev = run(n)
    while True:
        n2 = int(n * 1.5)
        mx2, cur = run(n2)
        cur_in_prev = cur * math.exp(mx2 - mx)
        err = abs(cur_in_prev - prev)
        if err <= rel_tol * abs(cur_in_prev):
            return mx, cur_in_prev, err
        if n2 > n_max:
            raise ToleranceNotMet("oracle quadrature did not converge", cur_in_prev * math.exp(mx), err * math.exp(mx))
        n, mx, prev = n2, mx2, cur


def z_oracle_quadrature(spec: EnsembleSpec, rel_tol: float = 1e-11) -> OracleResult:
    """Partition function by tensor Gauss-Legendre quadrature, m <= 3."""
    if spec.m > 3:
        raise ValueError("quadrature oracle supports m <= 3")
    n0, n_max = {1: (40, 2000), 2: (40, 1200), 3: (30, 200)}[spec.m]
    mx, val, err = _refine(lambda n: _chamber_integral(spec, n), n0, rel_tol, n_max)
    log_val = mx + math.log(val)
    if spec.family != "A":
        # chamber r_1 > ... > r_m > 0 covers R^m / (2^m m!) of the 1/(2m)! integral
        log_val += spec.m * math.log(2.0) + math.lgamma(spec.m + 1) - math.lgamma(2 * spec.m + 1)
    return OracleResult(LogSigned(1, log_val), "quadrature", max(err / val, 1e-16) * math.exp(log_val))


def z_oracle_mc(spec: EnsembleSpec, seed: int = 1, samples: int = 10**6, batches: int = 32,
                chunk: int = 2**14, max_rel_se: float = 0.1) -> OracleResult:
    """Importance-sampling Monte Carlo for family A with 2 <= m <= 8.

    Samples each coordinate from a centred Gaussian whose variance covers
    both the Gaussian factor of the integrand and the spread induced by the
    sinh repulsion, and averages the importance weights in log space.  ``error_bound`` is the standard error of the log estimate
    from ``batches`` batch means.
    """
    if spec.family != "A":
        raise ValueError("Monte Carlo oracle covers the A family")
    if not 2 <= spec.m <= 8:
        raise ValueError("Monte Carlo oracle supports 2 <= m <= 8")
    if batches < 30:
        raise ValueError("at least 30 batches are required")
    m, c, s2, beta = spec.m, _c(spec), spec.sigma2, spec.beta
    tau2 = s2 / (2 * c)
    # widen the proposal to the spread of the eigenvalue cloud: the
    # Gaussian beta-ensemble second moment at small sigma, plus the linear
    # spacing beta sigma2 / (2c) that the sinh repulsion imposes at large sigma
    var = tau2 * (1 + beta * (m - 1) / 2) + (beta * s2 / (4 * c)) ** 2 * (m * m - 1) / 3
    sd = math.sqrt(var)
    log_norm = 0.5 * m * math.log(2 * math.pi * var) - 0.5 * m * math.log(math.pi * s2)
    per = samples // batches
    rng = Rng(seed)
    batch_logs = []
    for b in range(batches):
        stream = rng.spawn(b)
        mx, acc, done = -math.inf, 0.0, 0
        while done < per:
            k = min(chunk, per - done)
            r = stream.gaussian(k * m).reshape(k, m) * sd
            sq = np.sum(r * r, axis=1)
            # sum_{i<j} |r_i - r_j| from the sorted sample: sum_k (2k - m + 1) r_(k)
            rs = np.sort(r, axis=1)
            spread = rs @ (2.0 * np.arange(m) - m + 1)
            # prod 2 sinh(|d|/2) = e^{sum |d|/2} prod (1 - e^{-|d|}); with the
            # sample sorted, e^{-|d|} is a ratio of the exponentials e^{r_(k)}
            ex = np.exp(rs - rs[:, -1:]).T.copy()
            inv = 1.0 / ex
            prod = np.ones(k)
            tmp = np.empty(k)
            for j in range(1, m):
                for i in range(j):
                    np.multiply(ex[i], inv[j], out=tmp)
                    np.subtract(1.0, tmp, out=tmp)
                    prod *= tmp
            with np.errstate(divide="ignore"):
                lw = sq * (0.5 / var - c / s2) + beta * (0.5 * spread + np.log(prod))
            cm = float(lw.max())
            if cm > mx:
                acc = acc * math.exp(mx - cm) if mx > -math.inf else 0.0
                mx = cm
            acc += float(np.sum(np.exp(lw - mx)))
            done += k
        batch_logs.append(mx + math.log(acc / per))
    bl = np.array(batch_logs)
    top = bl.max()
    means = np.exp(bl - top)
    mean = means.mean()
    rel_se = means.std(ddof=1) / math.sqrt(batches) / mean
    if not rel_se <= max_rel_se:
        raise InsufficientSamples(f"relative standard error {rel_se:.3g} exceeds {max_rel_se}")
    log_val = top + math.log(mean) + log_norm - math.lgamma(m + 1)
    return OracleResult(LogSigned(1, log_val), "monteCarlo", rel_se, per * batches)


def _density_integral(spec: EnsembleSpec, r: float, n: int) -> tuple[float, float]:
    """Integral over r_2 > ... > r_m of the integrand with r_1 = r pinned."""
    m = spec.m
    tau, drift = _scales(spec)
    span = 12 * tau + drift
    total_mx, parts = -math.inf, []
    for above in range(m):  # number of free points above r
        below = m - 1 - above
        lims = [(0.0, 2 * span)] * (m - 1)
        gaps, w = _tensor_rule(lims, n)
        cols = []
        acc = np.full_like(w, r)
        for g in gaps[:above]:
            acc = acc + g
            cols.append(acc)
        acc = np.full_like(w, r)
        for g in gaps[above:]:
            acc = acc - g
            cols.append(acc)
        pts = np.stack([np.full_like(w, r)] + cols, axis=-1)
        mx, val = _log_sum(log_integrand(spec, pts), w)
        parts.append((mx, val))
        total_mx = max(total_mx, mx)
    return total_mx, sum(v * math.exp(mx - total_mx) for mx, v in parts)


def rho_oracle(spec: EnsembleSpec, r: float, rel_tol: float = 1e-10) -> OracleResult:
    """Eigenvalue density at ``r`` by (m-1)-dimensional quadrature, m <= 3.

    Normalised by the quadrature oracle for z, giving total mass m.
    """
    if spec.family != "A" or spec.m > 3:
        raise ValueError("density oracle covers family A with m <= 3")
    z = z_oracle_quadrature(spec)
    if spec.m == 1:
        lv = -_c(spec) * r * r / spec.sigma2 - 0.5 * math.log(math.pi * spec.sigma2) - z.log_value
        return OracleResult(LogSigned(1, lv), "quadrature", 1e-16 * math.exp(lv))
    n0 = 60 if spec.m == 2 else 40
    mx, val, err = _refine(lambda n: _density_integral(spec, r, n), n0, rel_tol, 1500 if spec.m == 2 else 300)
    lv = mx + math.log(val) - z.log_value
    rel = err / val + z.error_bound / math.exp(z.log_value)
    return OracleResult(LogSigned(1, lv), "quadrature", max(rel, 1e-16) * math.exp(lv))
