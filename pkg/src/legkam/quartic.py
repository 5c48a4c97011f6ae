"""Exact quartic Legendre integral tables.

Central objects: the sequence table P(m,n) = integral of P_m^2 P_n^2 over
[-1, 1], its companion Q(m,n) = integral of P_{m-1} P_{m+1} P_n^2, the limit
sequence c(m) = lim_n n*P(m,n), and a brute-force oracle used to certify the
recursion-built tables entry by entry.
"""

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .legendre import scaled_int_coeffs

__all__ = [
    "quartic_integral_oracle",
    "closed_form_p",
    "closed_form_q1",
    "AlphaCoeffs",
    "alpha_coeffs",
    "QuarticTable",
    "build_p_table",
    "q_value",
    "CLimitSeq",
    "c_limit",
    "decay_check",
    "read_table_csv",
]


def _check_index(v, name, minimum=0):
    if v != int(v) or v < minimum:
        raise ValueError("%s must be an integer >= %d, got %r" % (name, minimum, v))
    return int(v)


# ------------------------------------------------------------------ oracle

@lru_cache(maxsize=None)
def _pair_coeffs(a, b):
    """Integer coefficients of 2^(a+b) * P_a * P_b, lowest degree first."""
    ca = scaled_int_coeffs(a)
    cb = scaled_int_coeffs(b)
    out = [0] * (a + b + 1)
    for i, x in enumerate(ca):
        if x:
            for j, y in enumerate(cb):
                if y:
                    out[i + j] += x * y
    return tuple(out)


def quartic_integral_oracle(a, b, c, d):
    """Exact integral of P_a P_b P_c P_d over [-1, 1].

    Works by convolving the integer-scaled coefficient vectors and
    integrating term by term; independent of every recursion in this module,
    which is what makes it usable as a certification oracle.
    """
    idx = sorted(_check_index(v, "degree") for v in (a, b, c, d))
    if sum(idx) % 2 or idx[0] + idx[1] + idx[2] < idx[3]:
        return Fraction(0)
    poly = _pair_coeffs(idx[0], idx[3])
    other = _pair_coeffs(idx[1], idx[2])
    total = Fraction(0)
    prod = [0] * (len(poly) + len(other) - 1)
    for i, x in enumerate(poly):
        if x:
            for j, y in enumerate(other):
                if y:
                    prod[i + j] += x * y
    for k in range(0, len(prod), 2):
        if prod[k]:
            total += Fraction(2 * prod[k], k + 1)
    return total / 2 ** sum(idx)


# ------------------------------------------------------- closed-form rows

def closed_form_p(m, n):
    """P(m,n) for rows m = 0..3 from the explicit rational closed forms."""
    m = _check_index(m, "m")
    n = _check_index(n, "n")
    if m > 3:
        raise ValueError("closed forms cover rows 0..3 only, got m=%d" % m)
    if m == 0:
        return Fraction(2, 2 * n + 1)
    if m == 1:
        return Fraction(
            2 * (2 * n * n + 2 * n - 1),
            (2 * n - 1) * (2 * n + 1) * (2 * n + 3),
        )
    if m == 2:
        num = ((11 * n + 22) * n - 31) * n * n - 42 * n + 18
        den = (2 * n - 3) * (2 * n - 1) * (2 * n + 1) * (2 * n + 3) * (2 * n + 5)
        return Fraction(num, den)
    num = (((((34 * n + 102) * n - 305) * n - 780) * n + 703) * n + 1110) * n - 450
    den = 1
    for off in (-5, -3, -1, 1, 3, 5, 7):
        den *= 2 * n + off
    return Fraction(num, den)


def closed_form_q1(n):
    """Q(1,n) = integral of P_0 P_2 P_n^2 = 2n(n+1)/((2n-1)(2n+1)(2n+3))."""
    n = _check_index(n, "n")
    return Fraction(2 * n * (n + 1), (2 * n - 1) * (2 * n + 1) * (2 * n + 3))


# ------------------------------------------------------ recursion weights

@dataclass(frozen=True)
class AlphaCoeffs:
    """The seven rational weights of the P(m+1,n) recursion at a given (m,n).

    Named by their source entry: m_nm1 multiplies P(m,n-1), mm1_np1
    multiplies P(m-1,n+1), mm2_n multiplies P(m-2,n), and so on. Their
    alternating sum (+ for row m and row m-2, - for row m-1) is exactly 1.
    """

    m: int
    n: int
    m_nm1: Fraction
    m_n: Fraction
    m_np1: Fraction
    mm1_nm1: Fraction
    mm1_n: Fraction
    mm1_np1: Fraction
    mm2_n: Fraction

    def alternating_sum(self):
        return (
            self.m_nm1 + self.m_n + self.m_np1
            - self.mm1_nm1 - self.mm1_n - self.mm1_np1
            + self.mm2_n
        )


def alpha_coeffs(m, n):
    """Recursion weights for computing P(m+1,n) from rows m, m-1, m-2.

    Requires m >= 2 and n >= m+1: inside that wedge every denominator,
    in particular (n^2+n-m^2+m) = (n-m+1)(n+m), is nonzero.
    """
    m = _check_index(m, "m", minimum=2)
    n = _check_index(n, "n")
    if n == m - 1:
        raise ValueError(
            "alpha coefficients are singular at n = m-1 (denominator "
            "(n-m+1)(n+m) vanishes)"
        )
    if n < m + 1:
        raise ValueError("alpha coefficients require n >= m+1, got (m,n)=(%d,%d)" % (m, n))
    e = n * (n + 1) - m * (m + 1)   # (n-m)(n+m+1)
    d = n * (n + 1) - m * m + m     # (n-m+1)(n+m)
    q = (2 * n + 1) ** 2
    cube = (m + 1) ** 3
    m_nm1 = Fraction((2 * m + 1) * n, (m + 1) * (2 * n + 1)) ** 2
    m_np1 = Fraction((2 * m + 1) * (n + 1), (m + 1) * (2 * n + 1)) ** 2
    m_n = Fraction(m * (2 * m + 1) * e, cube * (2 * m - 1)) * (
        Fraction((m - 1) * m, d) + Fraction(2, q)
    )
    mm1_nm1 = Fraction((m - 1) * (2 * m - 1) * (2 * m + 1) * e * n * n, cube * d * q)
    mm1_np1 = Fraction(
        (m - 1) * (2 * m - 1) * (2 * m + 1) * e * (n + 1) ** 2, cube * d * q
    )
    mm1_n = Fraction(2 * m * e, cube * q) + Fraction(m, m + 1) ** 2
    mm2_n = Fraction((m - 1) ** 3 * (2 * m + 1) * e, cube * (2 * m - 1) * d)
    return AlphaCoeffs(m, n, m_nm1, m_n, m_np1, mm1_nm1, mm1_n, mm1_np1, mm2_n)


# ------------------------------------------------------------------ table

@dataclass
class QuarticTable:
    """Dense exact table of P(m,n) for 0 <= m <= max_m, 0 <= n <= max_n."""

    max_m: int
    max_n: int
    method: str
    rows: tuple
    _q_prefix: dict = field(default_factory=dict, repr=False, compare=False)

    def value(self, m, n):
        m = _check_index(m, "m")
        n = _check_index(n, "n")
        if m > self.max_m or n > self.max_n:
            raise IndexError(
                "(m,n)=(%d,%d) outside table of size (%d,%d)"
                % (m, n, self.max_m, self.max_n)
            )
        return self.rows[m][n]

    def q_value(self, m, n):
        """Q(m,n) = integral of P_{m-1} P_{m+1} P_n^2, from cached prefix sums.

        Climbs the telescoping identity
        m(m+1)/(2m+1) Q(m,n) - (m-1)m/(2m-1) Q(m-1,n)
        = m^2/(2m-1) P(m,n) - m^2/(2m+1) P(m-1,n)
        upward from the closed-form seed Q(1,n); each column caches the whole
        prefix so repeated queries cost O(1).
        """
        m = _check_index(m, "m", minimum=1)
        n = _check_index(n, "n")
        if m > self.max_m or n > self.max_n:
            raise IndexError(
                "(m,n)=(%d,%d) outside table of size (%d,%d)"
                % (m, n, self.max_m, self.max_n)
            )
        prefix = self._q_prefix.setdefault(n, [Fraction(2, 3) * closed_form_q1(n)])
        while len(prefix) < m:
            i = len(prefix) + 1
            prefix.append(
                prefix[-1]
                + Fraction(i * i, 2 * i - 1) * self.rows[i][n]
                - Fraction(i * i, 2 * i + 1) * self.rows[i - 1][n]
            )
        return Fraction(2 * m + 1, m * (m + 1)) * prefix[m - 1]

    def float_snapshot(self):
        """One-rounding float copy for numeric consumers."""
        return np.array([[float(v) for v in row] for row in self.rows])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "n", "numerator", "denominator", "float_value"])
            for m, row in enumerate(self.rows):
                for n, v in enumerate(row):
                    writer.writerow([m, n, v.numerator, v.denominator, repr(float(v))])

    def to_json(self, path):
        entries = [
            {
                "m": m,
                "n": n,
                "numerator": str(v.numerator),
                "denominator": str(v.denominator),
                "float_value": float(v),
            }
            for m, row in enumerate(self.rows)
            for n, v in enumerate(row)
        ]
        doc = {
            "max_m": self.max_m,
            "max_n": self.max_n,
            "method": self.method,
            "entries": entries,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)


def read_table_csv(path):
    """Rebuild a QuarticTable from a CSV written by to_csv."""
    cells = {}
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            cells[(int(rec["m"]), int(rec["n"]))] = Fraction(
                int(rec["numerator"]), int(rec["denominator"])
            )
    max_m = max(k[0] for k in cells)
    max_n = max(k[1] for k in cells)
    rows = tuple(
        tuple(cells[(m, n)] for n in range(max_n + 1)) for m in range(max_m + 1)
    )
    return QuarticTable(max_m, max_n, "file", rows)


def build_p_table(max_m, max_n, method="recursion"):
    """Exact table of P(m,n) with the wedge-and-mirror fill.

    Rows 0..2 come from the closed forms. Each later row m+1 is produced by
    the seven-term recursion, but only on the wedge n >= m+1 where all its
    denominators are nonzero; entries below the diagonal are then mirrored
    through the symmetry P(m,n) = P(n,m). During the fill, row m extends to
    column max_n + (max_m - m) because computing row m+1 at column n consumes
    row m at column n+1. Row 3 is recomputed from its closed form and any
    mismatch aborts the build.
    """
    max_m = _check_index(max_m, "max_m", minimum=3)
    max_n = _check_index(max_n, "max_n")
    if max_n < max_m:
        raise ValueError("table requires max_n >= max_m")
    if method == "oracle":
        rows = tuple(
            tuple(quartic_integral_oracle(m, m, n, n) for n in range(max_n + 1))
            for m in range(max_m + 1)
        )
        return QuarticTable(max_m, max_n, "oracle", rows)
    if method != "recursion":
        raise ValueError("method must be 'recursion' or 'oracle'")

    cols = lambda m: max_n + (max_m - m)
    work = [
        [closed_form_p(m, n) for n in range(cols(m) + 1)] for m in range(min(3, max_m + 1))
    ]
    for m in range(2, max_m):
        row = [None] * (cols(m + 1) + 1)
        for n in range(m + 1, cols(m + 1) + 1):
            al = alpha_coeffs(m, n)
            row[n] = (
                al.m_nm1 * work[m][n - 1]
                + al.m_n * work[m][n]
                + al.m_np1 * work[m][n + 1]
                - al.mm1_nm1 * work[m - 1][n - 1]
                - al.mm1_n * work[m - 1][n]
                - al.mm1_np1 * work[m - 1][n + 1]
                + al.mm2_n * work[m - 2][n]
            )
        if m == 2:
            for n in range(3, cols(3) + 1):
                if row[n] != closed_form_p(3, n):
                    raise ArithmeticError(
                        "recursion row 3 disagrees with its closed form at n=%d" % n
                    )
        work.append(row)

    rows = []
    for m in range(max_m + 1):
        full = list(work[m][: max_n + 1])
        for n in range(min(m, max_n + 1)):
            full[n] = work[n][m]
        rows.append(tuple(full))
    return QuarticTable(max_m, max_n, "recursion", tuple(rows))


def q_value(m, n, table=None):
    """Exact Q(m,n) = integral of P_{m-1} P_{m+1} P_n^2 for m >= 1.

    Uses the given table's cached prefix sums when the indices fit; otherwise
    falls back to closed forms for rows 0..3 and the oracle beyond.
    """
    m = _check_index(m, "m", minimum=1)
    n = _check_index(n, "n")
    if table is not None and m <= table.max_m and n <= table.max_n:
        return table.q_value(m, n)

    def p_of(i):
        if min(i, n) <= 3:
            return closed_form_p(*((i, n) if i <= 3 else (n, i)))
        return quartic_integral_oracle(i, i, n, n)

    acc = Fraction(2, 3) * closed_form_q1(n)
    for i in range(2, m + 1):
        acc += Fraction(i * i, 2 * i - 1) * p_of(i) - Fraction(i * i, 2 * i + 1) * p_of(i - 1)
    return Fraction(2 * m + 1, m * (m + 1)) * acc


# ----------------------------------------------------------- limit values

@dataclass(frozen=True)
class CLimitSeq:
    """The limit sequence c(m) = lim_n n*P(m,n) and its difference sequence."""

    values: tuple
    diffs: tuple

    def is_strictly_decreasing(self):
        return all(b < a for a, b in zip(self.values, self.values[1:]))

    def within_unit_range(self):
        """0 <= c(m) <= 1/2 for every m >= 1."""
        half = Fraction(1, 2)
        return all(0 <= v <= half for v in self.values[1:])

    def satisfies_upper_bound(self):
        """c(m+1) <= 15/(16(m+2)) + 1/32 exactly, for every stored m."""
        return all(
            self.values[m + 1] <= Fraction(15, 16 * (m + 2)) + Fraction(1, 32)
            for m in range(len(self.values) - 1)
        )


def c_limit(max_m):
    """Exact c(0..max_m) from the three-term limit recursion.

    Seeds c(0)=1, c(1)=1/2, c(2)=11/32; the step to c(m+1) uses the limiting
    weights of the seven-term table recursion.
    """
    max_m = _check_index(max_m, "max_m", minimum=3)
    vals = [Fraction(1), Fraction(1, 2), Fraction(11, 32)]
    for m in range(2, max_m):
        cube = 2 * (m + 1) ** 3
        a_mid = Fraction(6 * m ** 3 - 2 * m * m + 1, cube)
        a_top = Fraction((2 * m + 1) * (6 * m ** 3 + 2 * m * m - 1), cube * (2 * m - 1))
        a_low = Fraction((m - 1) ** 3 * (2 * m + 1), (m + 1) ** 3 * (2 * m - 1))
        vals.append(a_top * vals[m] - a_mid * vals[m - 1] + a_low * vals[m - 2])
    diffs = tuple(b - a for a, b in zip(vals, vals[1:]))
    return CLimitSeq(tuple(vals), diffs)


def decay_check(table):
    """Empirical constant sup over entries (m,n >= 1) of m*n*P(m,n).

    Finite for any finite table; the value itself is reported, not asserted
    against a theoretical constant (none is available: the diagonal entries
    m^2*P(m,m) grow logarithmically).
    """
    best = 0.0
    for m in range(1, table.max_m + 1):
        row = table.rows[m]
        for n in range(1, table.max_n + 1):
            v = m * n * row[n]
            if v > best:
                best = v
    return float(best)
