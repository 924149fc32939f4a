"""Certification suite comparing every route against independent evaluations.

Each criterion yields :class:`Check` rows.  ``status`` is ``"pass"``,
``"fail"`` or ``"info"``; info rows record findings (such as reference
values that no convention reproduces) without a pass/fail verdict.
All random inputs come from fixed seeds, so the report is identical
from run to run.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

import mpmath
import numpy as np
from mpmath import mp

from . import density as dn
from . import diffusion as df
from . import partition as pt
from . import skewortho as so
from . import tables
from .numerics import LogSigned, Rng
from .oracle import rho_oracle, z_oracle_mc, z_oracle_quadrature
from .pfaffian import SkewMatrix, pfaffian
from .precision import det_mp
from .products import EnsembleSpec

__all__ = ["Check", "CRITERIA", "run_suite", "first_failure", "DEFAULT_SEED"]

DEFAULT_SEED = 20240611
MC_SAMPLES = 10**7


@dataclass(frozen=True)
class Check:
    check_id: str
    status: str
    observed: float | str
    expected: float | str
    tolerance: float | str

    @property
    def criterion(self) -> int:
        return int(self.check_id.split(".")[0][2:])


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else abs(a)


def _close(cid: str, observed: float, expected: float, tol: float, relative: bool = True) -> Check:
    dev = _rel(observed, expected) if relative else abs(observed - expected)
    return Check(cid, "pass" if dev <= tol else "fail", observed, expected, tol)


def _log_rel(a: LogSigned, b: LogSigned) -> float:
    """Relative difference of two positive LogSigned values."""
    return abs(math.expm1(a.log() - b.log()))


# ---------------------------------------------------------------------------
# 1-3: beta=1 tables and closed forms


def ac1(seed: int) -> list[Check]:
    out = []
    start = time.perf_counter()
    worst = {}
    for m, row in tables.LOG_ZETA.items():
        border = "paper" if m % 2 else "exact"
        cells = [(abs(v - printed), s2, v, printed)
                 for s2, printed in zip(tables.SIGMA2_GRID, row)
                 for v in [pt.zeta(m, s2, border).log()]]
        worst[m] = max(cells)
    elapsed = time.perf_counter() - start
    for m, (dev, s2, v, printed) in worst.items():
        out.append(Check(f"ac1.table1.m{m}.worst_sigma2_{s2}", "pass" if dev <= 2e-3 else "fail", v, printed, 2e-3))
    for m, s2, printed in ((2, 0.1, -0.680), (5, 1.0, 16.930), (12, 2.4, 231.790)):
        v = pt.zeta(m, s2, "paper" if m % 2 else "exact").log()
        out.append(_close(f"ac1.anchor.m{m}.sigma2_{s2}", v, printed, 2e-3, relative=False))
    out.append(Check("ac1.runtime_seconds", "pass" if elapsed <= 5 else "fail", round(elapsed, 3), "<=5", 5.0))
    return out


def ac2(seed: int) -> list[Check]:
    out = []
    s2 = tables.NEG_LOG_ZETA_SMALL_SIGMA2
    for m, printed in tables.NEG_LOG_ZETA_SMALL.items():
        out.append(_close(f"ac2.table2.m{m}", -pt.zeta(m, s2).log(), printed, 2e-3, relative=False))
    z1 = -pt.z1_pfaffian(2, s2).log()
    out.append(Check("ac2.caption.neg_log_z1_m2", "info", z1, 4.150,
                     "caption names -log z_1; the entries are -log zeta"))
    return out


def _z1_closed(m: int, sigma2: float):
    s2 = mpmath.mpf(sigma2)
    s, e = mpmath.sqrt(s2), mpmath.erf
    if m == 2:
        return 2 * mpmath.exp(s2 / 4) * e(s / 2)
    if m == 3:
        return 4 * (mpmath.exp(-5 * s2 / 4) * (1 + mpmath.exp(2 * s2)) * e(s / 2) - e(s))
    return 4 * mpmath.exp(5 * s2 / 2) * (e(s / 2) ** 2 - e(s) ** 2 + e(s / 2) * e(3 * s / 2))


def ac3(seed: int) -> list[Check]:
    out = []
    for m in (2, 3, 4):
        border = "paper" if m == 3 else "exact"
        for s2 in (0.1, 0.5, 1.0, 2.0, 4.0):
            with mp.workdps(50):
                ref = LogSigned.from_mpf(_z1_closed(m, s2))
            got = pt.z1_pfaffian(m, s2, border)
            out.append(Check(f"ac3.closed_form.m{m}.sigma2_{s2}", "pass" if _log_rel(got, ref) <= 1e-10 else "fail",
                             got.log(), ref.log(), 1e-10))
    return out


# ---------------------------------------------------------------------------
# 4-6: oracles, z2, beta=4

ORACLE_SIGMA2 = (0.5, 1.5)
# each m from 4 to 8 once, cycling through beta, plus beta=4 at the largest m
MC_PLAN = ((1, 4), (2, 5), (4, 6), (1, 7), (2, 8), (4, 8))
MC_SIGMA2 = 0.5


def ac4(seed: int) -> list[Check]:
    out = []
    specs = [("A", b) for b in (1, 2, 4)] + [("SO", 1), ("SP", 1)]
    for fam, beta in specs:
        for m in (1, 2, 3):
            for s2 in ORACLE_SIGMA2:
                spec = EnsembleSpec(fam, beta, m, s2)
                route = pt.partition(spec).value
                ref = z_oracle_quadrature(spec, rel_tol=1e-9).value
                out.append(Check(f"ac4.quadrature.{fam.lower()}.beta{beta}.m{m}.sigma2_{s2}",
                                 "pass" if _log_rel(route, ref) <= 1e-6 else "fail", route.log(), ref.log(), 1e-6))
    for beta, m in MC_PLAN:
        spec = EnsembleSpec("A", beta, m, MC_SIGMA2)
        route = pt.partition(spec).log_value
        mc = z_oracle_mc(spec, seed=seed, samples=MC_SAMPLES)
        z = (route - mc.log_value) / mc.error_bound
        out.append(Check(f"ac4.montecarlo.a.beta{beta}.m{m}.sigma2_{MC_SIGMA2}",
                         "pass" if abs(z) <= 3 else "fail", mc.log_value, route, round(3 * mc.error_bound, 8)))
    return out


def ac5(seed: int) -> list[Check]:
    out = []
    for m in range(1, 13):
        for s2 in (0.1, 1.0, 2.0):
            a, b = pt.z2_closed_form(m, s2), pt.z2_andreief(m, s2)
            out.append(Check(f"ac5.z2.m{m}.sigma2_{s2}", "pass" if _log_rel(a, b) <= 1e-9 else "fail",
                             a.log(), b.log(), 1e-9))
    return out


def ac6(seed: int) -> list[Check]:
    out = []
    one = pt.z4_pfaffian(1, 0.7)
    out.append(Check("ac6.z4.m1_equals_one", "pass" if one.sign == 1 and abs(one.lnmag) < 1e-15 else "fail",
                     one.to_real(), 1.0, 0.0))
    for s2 in (0.1, 0.5, 1.0):
        spec = EnsembleSpec("A", 4, 2, s2)
        got = pt.z4_pfaffian(2, s2)
        ref = z_oracle_quadrature(spec, rel_tol=1e-11).value
        out.append(Check(f"ac6.z4.m2.sigma2_{s2}", "pass" if _log_rel(got, ref) <= 1e-8 else "fail",
                         got.log(), ref.log(), 1e-8))
    s2 = tables.NEG_LOG_Z4_SMALL_SIGMA2
    printed1 = tables.NEG_LOG_Z4_SMALL[1]
    paper = -pt.z4_pfaffian(1, s2).log()
    variance = -pt.partition(EnsembleSpec("A", 4, 1, s2), convention="variance").log_value
    out.append(Check("ac6.table4.m1.paper_convention", "info", paper, printed1, "not reproduced"))
    out.append(_close("ac6.table4.m1.variance_convention", variance, math.log(2.0), 1e-12))
    out.append(Check("ac6.table4.m1.printed_is_log2", "pass" if abs(printed1 - math.log(2)) <= 5e-4 else "fail",
                     printed1, math.log(2.0), 5e-4))
    s2, printed = tables.SIGMA2_GRID[0], tables.LOG_Z4[2][0]
    paper = pt.z4_pfaffian(2, s2).log()
    variance = pt.partition(EnsembleSpec("A", 4, 2, s2), convention="variance").log_value
    out.append(Check("ac6.table3.m2.sigma2_0.1.paper_convention", "info", paper, printed, "not reproduced"))
    out.append(Check("ac6.table3.m2.sigma2_0.1.variance_convention", "info", variance, printed, "not reproduced"))
    return out


# ---------------------------------------------------------------------------
# 7-8: densities and skew-orthogonal polynomials


def _mass_check(cid: str, spec: EnsembleSpec, family=None) -> Check:
    curve = dn.density_curve(spec, family=family)
    return _close(cid, dn.mass(curve), float(spec.m), 1e-6)


def ac7(seed: int) -> list[Check]:
    out = []
    for m in (1, 2, 5, 12, 25):
        for s2 in (0.2, 1.5):
            out.append(_mass_check(f"ac7.mass.beta2.m{m}.sigma2_{s2}", EnsembleSpec("A", 2, m, s2)))
    family = so.build_family(1.0, 7)
    for m in (2, 4, 6, 8):
        out.append(_mass_check(f"ac7.mass.beta1.m{m}.sigma2_1.0", EnsembleSpec("A", 1, m, 1.0), family))
    for s2 in (0.3, 1.0):
        out.append(_mass_check(f"ac7.mass.beta4.m2.sigma2_{s2}", EnsembleSpec("A", 4, 2, s2)))
    # pointwise against the oracle's direct integration
    for beta, m in ((2, 3), (1, 2), (4, 2)):
        spec = EnsembleSpec("A", beta, m, 0.8)
        curve = dn.density_curve(spec, np.array([0.3]))
        ref = rho_oracle(spec, 0.3).value.to_real()
        out.append(_close(f"ac7.pointwise_oracle.beta{beta}.m{m}", float(curve.values[0]), ref, 1e-8))
    for m in (2, 6, 12):
        s2 = 0.7
        r = np.linspace(*dn.default_window(m, s2), 41)
        cd = dn.rho2(m, s2, r)
        mix = dn._mixture_eval(m, s2, r)
        dev = float(np.max(np.abs(mix - cd) / np.abs(cd)))
        out.append(Check(f"ac7.mixture_vs_cd.m{m}", "pass" if dev <= 1e-9 else "fail", dev, 0.0, 1e-9))
    curve = dn.density_curve(EnsembleSpec("A", 2, 20, 0.2))
    peaks = dn.count_maxima(curve.values)
    out.append(Check("ac7.peaks.m20.sigma2_0.2", "pass" if peaks == 20 else "fail", peaks, 20, 0))
    return out


def ac8(seed: int) -> list[Check]:
    out = []
    for s2 in (0.3, 1.0, 2.0):
        family = so.build_family(s2, 11)
        gram = np.array(so.skew_gram(family))
        n = gram.shape[0]
        target = np.zeros((n, n))
        for k in range(0, n, 2):
            target[k, k + 1], target[k + 1, k] = 1.0, -1.0
        dev = float(np.max(np.abs(gram - target)))
        out.append(Check(f"ac8.skew_orthogonality.deg11.sigma2_{s2}", "pass" if dev <= 1e-9 else "fail", dev, 0.0, 1e-9))
        ratios = [(family.stripped_z[2 * k + 2] / family.stripped_z[2 * k]).log() - family.norms[k].log()
                  for k in range(len(family.norms))]
        dev = max(abs(v - math.log(2.0)) for v in ratios)
        out.append(Check(f"ac8.norm_ratio.sigma2_{s2}", "pass" if dev <= 1e-9 else "fail", dev, 0.0, 1e-9))
    for s2 in (0.3, 0.8, 1.0, 2.0):
        bordered = so.build_family(s2, 3, odd_gauge="bordered")
        ref = so.reference_polys(s2)
        for n in range(4):
            got = [float(c) for c in bordered.polys[n].exact]
            dev = max(_rel(a, b) for a, b in zip(got, ref[n]))
            out.append(Check(f"ac8.poly.p{n}.sigma2_{s2}", "pass" if dev <= 1e-10 else "fail", dev, 0.0, 1e-10))
        for n in range(4):
            dev = 0.0
            for u in (-0.5, 0.4, 1.3, 2.5):
                dev = max(dev, _rel(so.phi_tilde(bordered, n, u), so.reference_phi(n, s2, u)))
            out.append(Check(f"ac8.phi.phi{n}.sigma2_{s2}", "pass" if dev <= 1e-10 else "fail", dev, 0.0, 1e-10))
    return out


# ---------------------------------------------------------------------------
# 9-11: asymptotics, Pfaffian kernel, diffusion


def ac9(seed: int) -> list[Check]:
    out = []
    for beta in (1, 2, 4):
        for m in range(2, 7):
            slope = pt.small_sigma_slope(beta, m, 1e-6)
            expected = beta * m * (m - 1) / 2
            out.append(_close(f"ac9.small_sigma_slope.beta{beta}.m{m}", slope, expected, 1e-2))
    for beta in (1, 2):
        exact = pt.partition(EnsembleSpec("A", beta, 8, 40.0)).log_value
        out.append(_close(f"ac9.baxter.beta{beta}.m8.sigma2_40", pt.baxter_large_sigma(beta, 8, 40.0), exact, 5e-2))
    return out


def _random_skew(rng: Rng, n: int) -> np.ndarray:
    a = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            u, v = rng.uniform(2)
            a[i, j] = (1 if u < 0.5 else -1) * math.exp(60 * v - 30)
            a[j, i] = -a[i, j]
    return a


def ac10(seed: int) -> list[Check]:
    rng = Rng(seed)
    worst_sq, worst_dad = 0.0, 0.0
    for n in range(2, 13, 2):
        for _ in range(5):
            a = _random_skew(rng, n)
            pf = pfaffian(SkewMatrix.from_array(a))
            with mp.workdps(60):
                det = LogSigned.from_mpf(det_mp([[mpmath.mpf(v) for v in row] for row in a]))
            sq = pf * pf
            worst_sq = max(worst_sq, 0.0 if sq.sign == det.sign == 0 else
                           (abs(math.expm1(sq.lnmag - det.lnmag)) if sq.sign == det.sign else math.inf))
            d = np.exp(10 * rng.uniform(n) - 5)
            pf_dad = pfaffian(SkewMatrix.from_array(d[:, None] * a * d[None, :]))
            scaled = pf * LogSigned(1, float(np.sum(np.log(d))))
            worst_dad = max(worst_dad, abs(math.expm1(pf_dad.lnmag - scaled.lnmag)) if pf_dad.sign == scaled.sign
                            else math.inf)
    return [
        Check("ac10.pf_squared_vs_det", "pass" if worst_sq <= 1e-8 else "fail", worst_sq, 0.0, 1e-8),
        Check("ac10.dad_covariance", "pass" if worst_dad <= 1e-12 else "fail", worst_dad, 0.0, 1e-12),
    ]


def ac11(seed: int) -> list[Check]:
    out = []
    cases = (((0.3,), (1.1,), 0.4, 0.7), ((1.0, 0.0), (1.2, -0.3), 0.5, 0.5), ((0.5, -0.8), (0.9, 0.1), 0.3, 1.1))
    for k, (eta, x, s, t) in enumerate(cases):
        lhs, rhs, rel = df.chapman_kolmogorov_check(eta, x, s, t)
        out.append(Check(f"ac11.chapman_kolmogorov.m{len(eta)}.case{k}", "pass" if rel <= 1e-6 else "fail", lhs, rhs, 1e-6))
    rng = Rng(seed + 1)
    worst = 0.0
    for m in range(1, 6):
        for t in (0.5, 1.0, 2.0):
            x = tuple(sorted((4 * rng.uniform(m) - 2).tolist(), reverse=True))
            eta = tuple(float(m - j) for j in range(1, m + 1))
            a = df.km_determinant_a(x, eta, t)
            b = df.km_equal_spacing_reduction(x, t)
            worst = max(worst, abs(math.expm1(a.lnmag - b.lnmag)) if a.sign == b.sign else math.inf)
    out.append(Check("ac11.equal_spacing", "pass" if worst <= 1e-12 else "fail", worst, 0.0, 1e-12))
    worst_fact, worst_tab = 0.0, 0.0
    for m in range(1, 5):
        for eta in ([m + 1 - j + (2 if j == 1 else 0) for j in range(1, m + 1)],
                    [2 * (m - j) + 1 for j in range(1, m + 1)]):
            x = tuple(sorted((2 * rng.uniform(m) - 1).tolist(), reverse=True))
            t = 1.0
            # det[e^{x_i eta_j/t}] = Vandermonde(z) s_lambda(z)
            km = df.km_determinant_a(x, [float(e) for e in eta], t)
            km = km * LogSigned(1, -df._log_prefactor(x, eta, t))
            vander = df.km_equal_spacing_reduction(x, t)
            vander = vander * LogSigned(1, -df._log_prefactor(x, [m - j for j in range(1, m + 1)], t))
            schur = df.schur_weight(eta, x, t)
            prod = vander * schur
            worst_fact = max(worst_fact, abs(math.expm1(km.lnmag - prod.lnmag)) if km.sign == prod.sign else math.inf)
            lam = [e - m + j for j, e in enumerate(eta, start=1)]
            tab = df.schur_tableaux(lam, [math.exp(v / t) for v in x])
            worst_tab = max(worst_tab, _rel(schur.to_real(), tab))
    out.append(Check("ac11.vandermonde_schur_factorization", "pass" if worst_fact <= 1e-9 else "fail", worst_fact, 0.0, 1e-9))
    out.append(Check("ac11.schur_vs_tableaux", "pass" if worst_tab <= 1e-9 else "fail", worst_tab, 0.0, 1e-9))
    return out


CRITERIA: dict[int, Callable[[int], list[Check]]] = {
    1: ac1, 2: ac2, 3: ac3, 4: ac4, 5: ac5, 6: ac6,
    7: ac7, 8: ac8, 9: ac9, 10: ac10, 11: ac11,
}

RUNTIME_BUDGET = 60.0


def _run_one(args: tuple[int, int]) -> list[Check]:
    criterion, seed = args
    return CRITERIA[criterion](seed)


def run_suite(seed: int = DEFAULT_SEED, criteria: Iterable[int] | None = None, threads: int = 1) -> list[Check]:
    """Run the selected criteria (all by default) and append the runtime check.

    With ``threads > 1`` criteria run in separate processes; every check
    depends only on ``seed``, so the rows are the same either way.
    """
    chosen = sorted(CRITERIA) if criteria is None else sorted(set(criteria) - {12})
    unknown = [c for c in chosen if c not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown criteria {unknown}")
    start = time.perf_counter()
    jobs = [(c, seed) for c in chosen]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    elapsed = time.perf_counter() - start
    rows = [row for block in results for row in block]
    if criteria is None or 12 in set(criteria):
        full = criteria is None or set(CRITERIA) <= set(criteria)
        status = "pass" if elapsed <= RUNTIME_BUDGET else "fail"
        if not full or threads > 1:
            status = "info"
        rows.append(Check("ac12.runtime_seconds", status, round(elapsed, 2), f"<={RUNTIME_BUDGET:g}", RUNTIME_BUDGET))
    return rows


def first_failure(rows: Iterable[Check]) -> Check | None:
    return next((r for r in rows if r.status == "fail"), None)
