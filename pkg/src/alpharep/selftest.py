"""Oracle-equivalence and invariant checks bundled for ``alpharep selftest``.

Each check returns a :class:`CheckResult`; :func:`run_selftest` runs them in
order. ``inject_fault=True`` perturbs one expansion coefficient before the
oracle comparison so the harness itself can be tested.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import alpha as arep
from . import fock
from .figures import ALPHA_GRID, DELTA_GRID, R_GRID
from .gates import apd_ratio_curve


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def alpha_grid_5x5(radius: float = 2.0) -> list[complex]:
    """25 complex amplitudes on a square grid inscribed in ``|alpha| <= radius``."""
    side = radius / math.sqrt(2)
    axis = np.linspace(-side, side, 5)
    return [complex(x, y) for x in axis for y in axis]


def check_oracles(l_max: int = 10, tol: float = 1e-9, inject_fault: bool = False) -> CheckResult:
    """exp(-|a|^2/2) c_ln(a) against the Laguerre form and against expm(D)."""
    worst_lag = worst_exp = 0.0
    for a in alpha_grid_5x5():
        c = arep.coeff_matrix(l_max + 1, l_max + 1, a) * math.exp(-0.5 * abs(a) ** 2)
        if inject_fault:
            c = c.copy()
            c[3, 2] += 1e-6
        lag = np.array([[np.conj(fock.matrix_element_oracle(l, n, a)) for n in range(l_max + 1)]
                        for l in range(l_max + 1)])
        dim = arep.displaced_cutoff(l_max, a) + fock.GUARD
        D = fock.displacement_operator(a, dim).matrix[: l_max + 1, : l_max + 1]
        worst_lag = max(worst_lag, float(np.max(np.abs(c - lag))))
        worst_exp = max(worst_exp, float(np.max(np.abs(c - D.conj()))))
    ok = worst_lag < tol and worst_exp < tol
    return CheckResult("oracle equivalence", ok, f"laguerre {worst_lag:.1e}, expm {worst_exp:.1e} (tol {tol:g})")


def check_unitarity(alphas=(0.5, 1.5), cutoff: int = 40, tol: float = 1e-8) -> CheckResult:
    res = [arep.alpha_matrix(a, cutoff).unitarity_residual() for a in alphas]
    return CheckResult("alpha-matrix unitarity", max(res) < tol, f"max residual {max(res):.1e} at cutoff {cutoff}")


def check_normalizations(tol: float = 1e-6) -> CheckResult:
    deficits = []
    for a in ALPHA_GRID:
        for l in (1, 3):
            deficits.append(1 - arep.prob_row(l, a, arep.displaced_cutoff(l, a)).sum())
        for sign in (1, -1):
            deficits.append(1 - arep.superpos_alpha_repr(sign, a).probs.sum())
    for d in DELTA_GRID:
        for r in R_GRID:
            deficits.append(1 - arep.tmsv_probabilities(d, r, arep.tmsv_nmax(d, r)).sum())
    worst = max(deficits)
    return CheckResult("normalizations", worst < tol, f"worst deficit {worst:.1e} over {len(deficits)} sums")


def check_symmetries(tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        for r in R_GRID:
            d = arep.tmsv_delta(a, r)
            worst = max(worst, float(np.max(np.abs(arep.tmsv_probabilities(d, r, 40) - arep.tmsv_probabilities(-d, r, 40)))))
        n = np.arange(31)
        # amplitude parity: f_n^(+)(alpha) = (-1)^n f_n^(-)(-alpha) for real alpha
        lhs = arep.superpos_amplitudes(1, a, 30)
        rhs = (-1.0) ** n * arep.superpos_amplitudes(-1, -a, 30)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        diff = arep.superpos_probabilities(1, a, 30) - arep.superpos_probabilities(-1, -a, 30)
        worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult("symmetries", worst < tol, f"worst violation {worst:.1e}")


def check_tmsv(tol: float = 1e-8) -> CheckResult:
    worst_f = 0.0
    worst_amp = 0.0
    for a in (0.5, 1.0, 1.5):
        for r in (0.3, 0.8):
            for n in range(7):
                worst_f = max(worst_f, 1 - arep.psi_n_check(n, a, r))
            brute = arep.tmsv_pair_amplitudes(4, a, r)
            closed = arep.tmsv_alpha_repr(a, r).amps[:5]
            worst_amp = max(worst_amp, float(np.max(np.abs(np.abs(brute) - closed))))
    ok = worst_f < tol and worst_amp < tol
    return CheckResult("squeezed-pair closed form", ok, f"1-F {worst_f:.1e}, |p_n| error {worst_amp:.1e}")


def check_peaks(alpha: float = 2.5, n_max: int = 30) -> CheckResult:
    p1 = arep.count_peaks(arep.prob_row(1, alpha, n_max))
    p3 = arep.count_peaks(arep.prob_row(3, alpha, n_max))
    return CheckResult("figure peak counts", (p1, p3) == (2, 4), f"l=1: {p1} peaks, l=3: {p3} peaks at alpha={alpha}")


def check_ratio_curves(delta: float = 1.0, k_max: int = 7) -> CheckResult:
    s = np.round(np.arange(1, 51) * 0.02, 10)
    rows = apd_ratio_curve(delta, s, k_max)[:, 1:]
    finite = bool(np.all(np.isfinite(rows)) and np.all(rows > 0))
    decreasing = bool(np.all(np.diff(rows, axis=0) < 0))
    low = float(apd_ratio_curve(delta, [0.03], 2)[0, 1])
    ok = finite and decreasing and low > 1e3
    cross = brentq(lambda x: apd_ratio_curve(delta, [x], 2)[0, 1] - 1e3, 1e-3, 0.5)
    return CheckResult(
        "detector ratio curves",
        ok,
        f"finite/positive {finite}, decreasing {decreasing}, P1/P2(s=0.03) = {low:.4g} "
        f"(needs > 1e3; crosses 1e3 at s = {cross:.4f})",
    )


CHECKS = (
    check_oracles,
    check_unitarity,
    check_normalizations,
    check_symmetries,
    check_tmsv,
    check_peaks,
    check_ratio_curves,
)


def run_selftest(inject_fault: bool = False) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        t0 = time.perf_counter()
        res = check(inject_fault=True) if inject_fault and check is check_oracles else check()
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  status  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}")
    return "\n".join(lines)
