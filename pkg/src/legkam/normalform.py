"""Normal-form data for the two distinguished modes: exact g-matrix,
frequency matrices, transformation coefficients, and the nondegeneracy
sweeps with their integer thresholds (618, 441, 27).

All rational building blocks (g entries, det g, the linear-in-m forms gg1
and gg2) are kept exact; floats enter only through the eigenvalues.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .divisors import divisor, is_resonant, _exact_abs_divisor
from .quartic import QuarticTable, closed_form_p, quartic_integral_oracle

MASS_UPPER = Fraction(41, 4)

DET_G = Fraction(-663764, 32175)
SINGLE_MODE_LOWER = 618   # |det g| * lambda_j^2 exceeds this for j >= 3
SINGLE_MODE_UPPER = 441   # |g_j1 gg1 + g_j2 gg2| stays below this
PAIR_BOUND = 27           # difference-quotient version of the same straddle


def _p_any(deg_a: int, deg_b: int, table: QuarticTable = None) -> Fraction:
    """P(deg_a, deg_b) = int P_a^2 P_b^2 from the cheapest exact source."""
    a, b = min(deg_a, deg_b), max(deg_a, deg_b)
    if a <= 3:
        return closed_form_p(a, b)
    if table is not None and a <= table.max_m and b <= table.max_n:
        return table.value(a, b)
    return quartic_integral_oracle(a, a, b, b)


def g_entry(i: int, j: int, table: QuarticTable = None) -> Fraction:
    """Exact g_ij = lambda_i lambda_j Gbar_ij = (2 - delta_ij)(4i-1)(4j-1)
    P(2i-1, 2j-1). Mass-independent."""
    if i < 1 or j < 1:
        raise ValueError(f"mode indices must be >= 1, got ({i}, {j})")
    factor = 1 if i == j else 2
    return factor * (4 * i - 1) * (4 * j - 1) * _p_any(2 * i - 1, 2 * j - 1,
                                                       table)


def averaged_coupling(i: int, j: int, mass: float,
                      table: QuarticTable = None) -> float:
    """Gbar_ij, the resonant average of the quartic coupling."""
    lam_i = math.sqrt(2 * i * (2 * i - 1) + mass)
    lam_j = math.sqrt(2 * j * (2 * j - 1) + mass)
    return float(g_entry(i, j, table)) / (lam_i * lam_j)


def det_g(table: QuarticTable = None) -> Fraction:
    g11 = g_entry(1, 1, table)
    g12 = g_entry(1, 2, table)
    g22 = g_entry(2, 2, table)
    return g11 * g22 - g12 * g12


def gg1(mass) -> Fraction:
    """g22 lambda_1^2 - g12 lambda_2^2 as an exact linear form in m."""
    m = Fraction(mass)
    return g_entry(2, 2) * (2 + m) - g_entry(1, 2) * (12 + m)


def gg2(mass) -> Fraction:
    """g11 lambda_2^2 - g12 lambda_1^2 as an exact linear form in m."""
    m = Fraction(mass)
    return g_entry(1, 1) * (12 + m) - g_entry(1, 2) * (2 + m)


def g_j1(j: int) -> Fraction:
    """Closed form of g_{j,1} = 2*3*(4j-1) P(1, 2j-1) for j >= 2."""
    if j < 2:
        raise ValueError(f"closed form valid for j >= 2, got {j}")
    return Fraction(12 * (8 * j * j - 4 * j - 1),
                    (4 * j - 3) * (4 * j + 1))


def g_j2(j: int) -> Fraction:
    """Closed form of g_{j,2} = 2*7*(4j-1) P(3, 2j-1) for j >= 3."""
    if j < 3:
        raise ValueError(f"closed form valid for j >= 3, got {j}")
    num = (((((1088 * j - 1632) * j - 2440) * j + 3120) * j + 1406) * j
           - 1110) * j - 225
    den = ((4 * j - 7) * (4 * j - 5) * (4 * j - 3)
           * (4 * j + 1) * (4 * j + 3) * (4 * j + 5))
    return Fraction(28 * num, den)


def _g_j1_float(j: np.ndarray) -> np.ndarray:
    return 12.0 * (8 * j * j - 4 * j - 1) / ((4 * j - 3.0) * (4 * j + 1))


def _g_j2_float(j: np.ndarray) -> np.ndarray:
    num = (((((1088.0 * j - 1632) * j - 2440) * j + 3120) * j + 1406) * j
           - 1110) * j - 225
    den = ((4 * j - 7.0) * (4 * j - 5) * (4 * j - 3)
           * (4 * j + 1) * (4 * j + 3) * (4 * j + 5))
    return 28.0 * num / den


@dataclass(frozen=True, eq=False)
class NormalFormData:
    """Frequency data of the resonant normal form around the 2-torus."""

    dim: int
    mass: float
    alpha: np.ndarray   # (lambda_1, lambda_2)
    beta: np.ndarray    # lambda_j for j = 3..dim
    A: np.ndarray       # 2 x 2, Gbar on modes 1,2
    B: np.ndarray       # (dim-2) x 2, Gbar tail rows
    g: tuple            # ((g11, g12), (g21, g22)) exact
    det_g: Fraction


def build_normal_form(dim: int, mass: float,
                      table: QuarticTable = None) -> NormalFormData:
    if dim < 3:
        raise ValueError(f"dim must be >= 3, got {dim}")
    mq = Fraction(mass)
    if not 0 < mq < MASS_UPPER or mq == Fraction(1, 4):
        raise ValueError(f"mass {mass} not admissible")
    j = np.arange(1, dim + 1)
    lam = np.sqrt(2.0 * j * (2 * j - 1) + mass)
    gm = [[g_entry(1, 1, table), g_entry(1, 2, table)],
          [g_entry(2, 1, table), g_entry(2, 2, table)]]
    A = np.array([[float(gm[a][b]) / (lam[a] * lam[b]) for b in range(2)]
                  for a in range(2)])
    B = np.empty((dim - 2, 2))
    for row, mode in enumerate(range(3, dim + 1)):
        for k in (1, 2):
            B[row, k - 1] = float(g_entry(mode, k, table)) / (
                lam[mode - 1] * lam[k - 1])
    return NormalFormData(
        dim=dim,
        mass=mass,
        alpha=lam[:2].copy(),
        beta=lam[2:].copy(),
        A=A,
        B=B,
        g=((gm[0][0], gm[0][1]), (gm[1][0], gm[1][1])),
        det_g=gm[0][0] * gm[1][1] - gm[0][1] * gm[1][0],
    )


def det_a(data: NormalFormData) -> float:
    return float(data.det_g) / (data.alpha[0] ** 2 * data.alpha[1] ** 2)


def check_twist_nondegenerate(data: NormalFormData) -> bool:
    """Twist condition: det A != 0, certified through the exact det g."""
    return data.det_g != 0


def check_tail_frequencies(data: NormalFormData) -> bool:
    """No tail frequency or pairwise combination lambda_i +- lambda_j
    (i != j) vanishes. Strict positivity and monotonicity give all cases
    with at most two nonzero integer coefficients."""
    beta = data.beta
    if beta.size == 0:
        return True
    return bool((beta > 0).all() and (np.diff(beta) > 0).all()
                and beta[0] > data.alpha[1] > data.alpha[0] > 0)


@dataclass(frozen=True)
class SweepResult:
    """Extremes of a nondegeneracy sweep over mode indices and masses."""

    min_margin: float   # min of (first term - second term)
    min_first: float
    max_second: float
    argmin_margin: tuple
    n_points: int

    def straddles(self, lower: float, upper: float) -> bool:
        return self.min_first > lower and self.max_second < upper


def mass_grid(count: int = 100, exclusion: float = 1e-3) -> np.ndarray:
    """Admissible masses: (0, 41/4) with punctured neighborhoods of the
    endpoints and of 1/4 removed."""
    lo, hi = exclusion, float(MASS_UPPER) - exclusion
    grid = np.linspace(lo, hi, count)
    return grid[np.abs(grid - 0.25) > exclusion]


def single_mode_terms(j: int, mass: float):
    """(|det g| lambda_j^2, |g_j1 gg1 + g_j2 gg2|) for one tail mode."""
    if j < 3:
        raise ValueError(f"tail modes start at 3, got {j}")
    first = abs(float(DET_G)) * (2 * j * (2 * j - 1) + mass)
    second = abs(float(g_j1(j) * gg1(mass) + g_j2(j) * gg2(mass)))
    return first, second


def min_single_mode_margin(j_max: int = 500,
                           masses: np.ndarray = None) -> SweepResult:
    """Sweep the single-tail-mode nondegeneracy straddle over j in [3, j_max]
    and a mass grid; the contract is first > 618 > 441 > second."""
    if j_max < 3:
        raise ValueError(f"j_max must be >= 3, got {j_max}")
    if masses is None:
        masses = mass_grid()
    j = np.arange(3, j_max + 1, dtype=float)
    absdetg = abs(float(DET_G))
    gj1 = _g_j1_float(j)
    gj2 = _g_j2_float(j)
    best = None
    for m in np.asarray(masses, dtype=float):
        first = absdetg * (2 * j * (2 * j - 1) + m)
        second = np.abs(gj1 * float(gg1(m)) + gj2 * float(gg2(m)))
        margin = first - second
        i = int(np.argmin(margin))
        cand = (margin[i], first.min(), second.max(), (int(j[i]), m))
        if best is None:
            best = list(cand)
        else:
            best[0] = min(best[0], cand[0])
            best[1] = min(best[1], cand[1])
            best[2] = max(best[2], cand[2])
            if cand[0] <= best[0]:
                best[3] = cand[3]
    return SweepResult(min_margin=float(best[0]), min_first=float(best[1]),
                       max_second=float(best[2]), argmin_margin=best[3],
                       n_points=j.size * len(masses))


def mode_pair_terms(i: int, j: int, mass: float):
    """Difference-quotient straddle terms for a tail mode pair i != j:
    first = |det g| (4(i+j) - 2)/(lambda_i + lambda_j),
    second = |gg1 dv1 + gg2 dv2| with v_t = g_jt / lambda_j."""
    if i < 3 or j < 3 or i == j:
        raise ValueError(f"need distinct tail modes >= 3, got ({i}, {j})")
    lam_i = math.sqrt(2 * i * (2 * i - 1) + mass)
    lam_j = math.sqrt(2 * j * (2 * j - 1) + mass)
    first = abs(float(DET_G)) * (4 * (i + j) - 2) / (lam_i + lam_j)
    dv1 = (float(g_j1(i)) / lam_i - float(g_j1(j)) / lam_j) / (i - j)
    dv2 = (float(g_j2(i)) / lam_i - float(g_j2(j)) / lam_j) / (i - j)
    second = abs(float(gg1(mass)) * dv1 + float(gg2(mass)) * dv2)
    return first, second


def min_mode_pair_margin(n_max: int = 200,
                         masses: np.ndarray = None) -> SweepResult:
    """Sweep the pair straddle (both terms against 27) over distinct tail
    modes 3 <= i != j <= n_max and a mass grid."""
    if n_max < 4:
        raise ValueError(f"n_max must be >= 4, got {n_max}")
    if masses is None:
        masses = mass_grid()
    j = np.arange(3, n_max + 1, dtype=float)
    absdetg = abs(float(DET_G))
    gj1 = _g_j1_float(j)
    gj2 = _g_j2_float(j)
    idx_diff = np.subtract.outer(j, j)
    np.fill_diagonal(idx_diff, 1.0)  # placeholder, masked below
    off = ~np.eye(j.size, dtype=bool)
    sum_idx = np.add.outer(j, j)
    best = None
    for m in np.asarray(masses, dtype=float):
        lam = np.sqrt(2 * j * (2 * j - 1) + m)
        first = absdetg * (4 * sum_idx - 2) / np.add.outer(lam, lam)
        v1 = gj1 / lam
        v2 = gj2 / lam
        dv1 = np.subtract.outer(v1, v1) / idx_diff
        dv2 = np.subtract.outer(v2, v2) / idx_diff
        second = np.abs(float(gg1(m)) * dv1 + float(gg2(m)) * dv2)
        margin = np.where(off, first - second, np.inf)
        flat = int(np.argmin(margin))
        a, b = divmod(flat, j.size)
        cand = (margin[a, b], first[off].min(), second[off].max(),
                (int(j[a]), int(j[b]), m))
        if best is None:
            best = list(cand)
        else:
            if cand[0] < best[0]:
                best[0], best[3] = cand[0], cand[3]
            best[1] = min(best[1], cand[1])
            best[2] = max(best[2], cand[2])
    return SweepResult(min_margin=float(best[0]), min_first=float(best[1]),
                       max_second=float(best[2]), argmin_margin=best[3],
                       n_points=j.size * j.size * len(masses))


@dataclass(frozen=True, eq=False)
class FrequencyMaps:
    """Affine frequency maps of the normal form."""

    alpha: np.ndarray
    beta: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def omega(self, action) -> np.ndarray:
        return self.alpha + self.A @ np.asarray(action, dtype=float)

    def Omega(self, action) -> np.ndarray:
        return self.beta + self.B @ np.asarray(action, dtype=float)

    def tail_ratio(self, i: int, j: int, action) -> float:
        """(Omega_i - Omega_j)/(i - j) for tail modes i != j >= 3; tends to 1
        with an O(j^-2) deviation."""
        om = self.Omega(action)
        return float((om[i - 3] - om[j - 3]) / (i - j))


def frequency_maps(data: NormalFormData) -> FrequencyMaps:
    return FrequencyMaps(alpha=data.alpha, beta=data.beta, A=data.A, B=data.B)


def generator_coefficient(i: int, j: int, k: int, l: int, mass: float,
                          tensor) -> complex:
    """Coefficient F of the averaging transformation for one signed mode
    quadruple: G/(i delta) on the admissible non-resonant set, else 0."""
    quad = (i, j, k, l)
    if any(v == 0 for v in quad):
        raise ValueError("indices must be nonzero")
    if min(abs(v) for v in quad) > 2:
        return 0j
    if is_resonant(*quad):
        return 0j
    delta = divisor(*quad, mass=mass, convention="original")
    if abs(delta) < 1e-9:
        refined = _exact_abs_divisor(quad, mass, "original")
        if refined == 0.0:
            raise ArithmeticError(
                f"vanishing divisor for non-resonant quadruple {quad} "
                f"at mass {mass}")
    g_val = tensor.value(*(abs(v) for v in quad))
    return g_val / (1j * delta)


def power_shift_matrix(dim: int, mass: float,
                       table: QuarticTable = None) -> np.ndarray:
    """First-order frequency response d omega_i / d S_j to mode power
    S_j = q_j^2 + p_j^2.

    Averaging the quartic term (1/4) sum G qqqq over the linear flow leaves
    (3/8) G_iiii S_i^2/4-type contributions whose action gradient is
    (3/8) G_iiii on the diagonal and (3/4) G_iijj off it; both equal
    (3/32) Gbar_ij. The 2x2 block is therefore (3/32) A, which is what a
    frequency measurement against mode power validates.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    j = np.arange(1, dim + 1)
    lam = np.sqrt(2.0 * j * (2 * j - 1) + mass)
    out = np.empty((dim, dim))
    for a in range(1, dim + 1):
        for b in range(a, dim + 1):
            val = float(g_entry(a, b, table)) / (lam[a - 1] * lam[b - 1])
            out[a - 1, b - 1] = out[b - 1, a - 1] = val
    return 3.0 / 32.0 * out


def normal_form_summary(data: NormalFormData) -> dict:
    """JSON-ready summary with exact constants as strings."""
    return {
        "dim": data.dim,
        "mass": data.mass,
        "alpha": data.alpha.tolist(),
        "beta": data.beta.tolist(),
        "A": data.A.tolist(),
        "B": data.B.tolist(),
        "g": [[str(data.g[0][0]), str(data.g[0][1])],
              [str(data.g[1][0]), str(data.g[1][1])]],
        "det_g": str(data.det_g),
        "det_A": det_a(data),
        "twist_nondegenerate": check_twist_nondegenerate(data),
        "tail_frequencies_ok": check_tail_frequencies(data),
    }
