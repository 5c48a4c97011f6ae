"""Acceptance suite: ten numbered end-to-end checks, each printing one
PASS/FAIL line with its measured quantities.

Each criterion is asserted exactly as stated, at its stated tolerance; the
detail string carries the observed values so a failure is directly
actionable.
"""

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import dynamics, normalform
from .divisors import certify_range, difference_gap_floor
from .legendre import (derivative_bound_margins, legendre_coeffs,
                       legendre_derivative_coeffs)
from .quartic import (alpha_coeffs, build_p_table, c_limit, closed_form_p,
                      closed_form_q1, decay_check, quartic_integral_oracle)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.number:2d} ({self.name}): "
                f"{self.detail} [{self.seconds:.2f}s]")


def _c01_exact_constants():
    errs = []
    checks = [
        ("g11", normalform.g_entry(1, 1), Fraction(18, 5)),
        ("g12", normalform.g_entry(1, 2), Fraction(92, 15)),
        ("g22", normalform.g_entry(2, 2), Fraction(3374, 715)),
        ("det_g", normalform.det_g(), Fraction(-663764, 32175)),
    ]
    seq = c_limit(3)
    for name, got, want in checks + [
        ("c0", seq.values[0], Fraction(1)),
        ("c1", seq.values[1], Fraction(1, 2)),
        ("c2", seq.values[2], Fraction(11, 32)),
        ("c3", seq.values[3], Fraction(17, 64)),
        ("C1", seq.diffs[1], Fraction(-5, 32)),
        ("C2", seq.diffs[2], Fraction(-5, 64)),
    ]:
        if got != want:
            errs.append(f"{name}: got {got}, want {want}")
    for n in range(1, 21):
        if closed_form_q1(n) != quartic_integral_oracle(0, 2, n, n):
            errs.append(f"Q(1,{n}) closed form != oracle")
    if errs:
        return False, "; ".join(errs)
    return True, "g-matrix, det g, c(0..3), C(1..2), Q(1,1..20) all exact"


def _c02_table_vs_oracle():
    table = build_p_table(20, 40)
    bad = 0
    first = None
    for m in range(21):
        for n in range(41):
            if table.rows[m][n] != quartic_integral_oracle(m, m, n, n):
                bad += 1
                first = first or (m, n)
    row3 = all(table.rows[3][n] == closed_form_p(3, n) for n in range(41))
    ok = bad == 0 and row3
    return ok, (f"861 recursion entries vs oracle: {bad} mismatches"
                + ("" if first is None else f" (first at {first})")
                + f"; row 3 closed form {'ok' if row3 else 'MISMATCH'}")


def _c03_alpha_identity():
    bad = []
    for m in range(2, 51):
        for n in range(m + 1, 101):
            if alpha_coeffs(m, n).alternating_sum() != 1:
                bad.append((m, n))
    if bad:
        return False, f"{len(bad)} alternating sums != 1, first {bad[0]}"
    return True, "alternating alpha sum == 1 exactly on 2<=m<=50, m+1<=n<=100"


def _c04_climit_and_decay():
    seq = c_limit(200)
    mono = seq.is_strictly_decreasing()
    bound = seq.satisfies_upper_bound()
    rng = seq.within_unit_range()
    sup_small = decay_check(build_p_table(20, 40))
    sup_large = decay_check(build_p_table(40, 80))
    finite = math.isfinite(sup_small) and math.isfinite(sup_large)
    nonincreasing = sup_large <= sup_small
    ok = mono and bound and rng and finite and nonincreasing
    return ok, (f"c(m) m<=200: decreasing={mono}, bound={bound}, range={rng}; "
                f"sup m*n*P: (20,40)->{sup_small:.6f}, "
                f"(40,80)->{sup_large:.6f}, non-increasing={nonincreasing}")


def _c05_nondegeneracy_sweep():
    grid = normalform.mass_grid(100)
    single = normalform.min_single_mode_margin(500, grid)
    pair = normalform.min_mode_pair_margin(200, grid)
    ok_single = single.straddles(normalform.SINGLE_MODE_LOWER,
                                 normalform.SINGLE_MODE_UPPER)
    ok_pair = pair.straddles(normalform.PAIR_BOUND, normalform.PAIR_BOUND)
    ok = ok_single and ok_pair and single.min_margin > 0 and pair.min_margin > 0
    return ok, (f"single-mode: first>{618} min={single.min_first:.3f}, "
                f"second<{441} max={single.max_second:.3f}; "
                f"pair: first>27 min={pair.min_first:.3f}, "
                f"second<27 max={pair.max_second:.3f}")


def _c06_divisor_certificates():
    masses = (0.1, 0.2, 0.3, 1.0, 2.0, 5.0, 8.0, 10.0)
    pos_fail = []
    unstable = []
    notes = []
    for m in masses:
        cert = certify_range(30, m)
        if not cert.min_abs_divisor > 0:
            pos_fail.append(m)
        if m > 0.25:
            ratios = {n: certify_range(n, m).min_ratio for n in (20, 30, 40)}
            ref = ratios[30]
            dev = max(abs(ratios[20] / ref - 1), abs(ratios[40] / ref - 1))
            if dev > 0.10:
                unstable.append((m, dev))
                notes.append(f"m={m}: ratios {ratios[20]:.3e}/{ratios[30]:.3e}"
                             f"/{ratios[40]:.3e} dev={dev:.0%}")
    ok = not pos_fail and not unstable
    detail = f"all |delta|>0 for 8 masses at N=30: {not pos_fail}"
    if unstable:
        detail += ("; ratio NOT stable +-10% under N 20->40 at "
                   + "; ".join(notes))
    else:
        detail += "; min ratio stable +-10% under N 20->40 for m>1/4"
    return ok, detail


def _c07_difference_gap():
    rng = np.random.default_rng(20260815)
    count = 10_000
    i = rng.integers(1, 61, count)
    d_outer = rng.integers(0, 11, count)         # l - k
    r = rng.integers(1, 9, count)
    j = i + d_outer + 2 * r                      # ensures j-i > l-k, parity
    k = j + rng.integers(0, 16, count)
    l = k + d_outer
    m = rng.uniform(0.2501, 10.2499, count)

    def lam(n):
        return np.sqrt(n * (n + 1.0) + m)

    gap = (lam(j) - lam(i)) - (lam(l) - lam(k))
    floor = 2 - (m - 0.25) / (np.sqrt(i * (i + 1.0) + m) + i + 0.5)
    sample_ok = np.allclose(
        floor[:5],
        [difference_gap_floor(int(a), float(b)) for a, b in zip(i[:5], m[:5])],
        rtol=0, atol=0)
    viol = int((gap < floor - 1e-12).sum())
    worst = float((gap - floor).min())
    return viol == 0 and sample_ok, (
        f"{count} random admissible quadruples: {viol} below floor, "
        f"worst gap-floor={worst:.3e}")


def _poly_shift(coeffs, k):
    return [Fraction(0)] * k + list(coeffs)


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _c08_legendre_identities():
    errs = []
    for n in range(1, 51):
        pn = legendre_coeffs(n)
        dn = legendre_derivative_coeffs(n)
        dn1 = legendre_derivative_coeffs(n - 1)
        lhs = _poly_sub(_poly_shift(dn, 1), dn1)
        rhs = [n * c for c in pn]
        if any(_poly_sub(lhs, rhs)):
            errs.append(f"re1 fails at n={n}")
        lhs2 = _poly_sub(dn, _poly_shift(dn, 2))
        pn1 = legendre_coeffs(n - 1)
        rhs2 = [n * c for c in _poly_sub(pn1, _poly_shift(pn, 1))]
        if any(_poly_sub(lhs2, rhs2)):
            errs.append(f"re2 fails at n={n}")
    margins = derivative_bound_margins(100, 100_000)
    min_margin = float(margins.min())
    if min_margin < -1e-10:
        errs.append(f"derivative bound margin {min_margin:.3e} < -1e-10")
    for m in range(1, 21):
        for n in range(1, 21):
            a = quartic_integral_oracle(m, m, n - 1, n + 1)
            b = quartic_integral_oracle(n, n, m - 1, m + 1)
            if a != b:
                errs.append(f"neighbor symmetry fails at ({m},{n})")
    if errs:
        return False, "; ".join(errs[:4])
    return True, (f"re1/re2 exact n<=50; min derivative margin "
                  f"{min_margin:.3e} on 1e5 grids j<=100; neighbor product "
                  f"symmetry exact m,n<=20")


def _c09_simulation():
    errs = []
    details = []

    linear_cfg = dynamics.SimConfig(dim=8, mass=2.0, dt=1e-3, steps=8192,
                                    initial_action=(0.01, 0.01),
                                    tail_amplitude=0.05, seed=7,
                                    include_coupling=False)
    traj = dynamics.integrate(linear_cfg)
    freqs = dynamics.extract_frequencies(traj)
    rel = np.abs(freqs - traj.lambdas) / traj.lambdas
    details.append(f"linear freq rel err {rel.max():.2e}")
    if not (rel <= 1e-6).all():
        errs.append(f"linear-limit frequency error {rel.max():.2e} > 1e-6")

    drift_cfg = dynamics.SimConfig(dim=8, mass=2.0, dt=1e-3, steps=100_000,
                                   initial_action=(0.04, 0.04),
                                   tail_amplitude=0.02, seed=3,
                                   include_coupling=True, save_stride=4)
    traj = dynamics.integrate(drift_cfg)
    drift = float(np.max(np.abs(traj.energies - traj.energies[0])
                         / abs(traj.energies[0])))
    details.append(f"energy drift {drift:.2e}")
    if drift >= 1e-5:
        errs.append(f"energy drift {drift:.2e} >= 1e-5")

    from .galerkin import build_tensor
    tensor = build_tensor(8, 2.0)
    shift_pred = normalform.power_shift_matrix(8, 2.0)[:2, :2] @ np.ones(2)
    scales = np.array([1e-4, 2e-4, 4e-4])
    shifts = np.empty((scales.size, 2))
    residuals = []
    for row, s in enumerate(scales):
        cfg = dynamics.SimConfig(dim=8, mass=2.0, dt=1e-3, steps=1 << 16,
                                 initial_action=(s, s), tail_amplitude=0.0,
                                 include_coupling=True)
        traj = dynamics.integrate(cfg, tensor=tensor)
        freqs = dynamics.extract_frequencies(traj, (1, 2))
        shifts[row] = freqs - traj.lambdas[:2]
        residuals.append(dynamics.torus_residual(traj))
    slope_meas = (scales @ shifts) / (scales @ scales)
    slope_err = np.abs(slope_meas - shift_pred) / np.abs(shift_pred)
    details.append(f"slope err {slope_err.max():.1%}")
    if not (slope_err < 0.15).all():
        errs.append(f"frequency-shift slope error {slope_err.max():.1%} "
                    f">= 15%")
    worst_res = max(residuals)
    details.append(f"tail residual {worst_res:.2e}")
    if worst_res >= 0.01:
        errs.append(f"tail residual {worst_res:.2e} >= 0.01")

    if errs:
        return False, "; ".join(errs)
    return True, ", ".join(details)


def _c10_conventions():
    j = np.arange(1, 1001)
    worst = 0.0
    for m in (0.1, 1.0, 5.0, 10.0):
        orig = np.sqrt(2.0 * j * (2 * j - 1) + m)
        renum = np.sqrt((2 * j - 1) * (2.0 * j) + m)
        worst = max(worst, float(np.abs(orig - renum).max()))
    return worst <= 1e-12, (f"max |lambda_orig(j) - lambda_renum(2j-1)| = "
                            f"{worst:.2e} over j<=1000, 4 masses")


_CRITERIA = [
    (1, "exact constants", _c01_exact_constants),
    (2, "table vs oracle", _c02_table_vs_oracle),
    (3, "alpha identity", _c03_alpha_identity),
    (4, "c-limit and decay", _c04_climit_and_decay),
    (5, "nondegeneracy sweep", _c05_nondegeneracy_sweep),
    (6, "divisor certificates", _c06_divisor_certificates),
    (7, "difference gap", _c07_difference_gap),
    (8, "legendre identities", _c08_legendre_identities),
    (9, "simulation", _c09_simulation),
    (10, "index conventions", _c10_conventions),
]


def run_criterion(number: int) -> CriterionResult:
    for num, name, fn in _CRITERIA:
        if num == number:
            start = time.perf_counter()
            passed, detail = fn()
            return CriterionResult(number=num, name=name, passed=passed,
                                   detail=detail,
                                   seconds=time.perf_counter() - start)
    raise ValueError(f"no criterion {number}")


def run_all(numbers=None) -> list:
    if numbers is None:
        numbers = [num for num, _, _ in _CRITERIA]
    return [run_criterion(n) for n in numbers]
