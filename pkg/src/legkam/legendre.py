"""Legendre polynomial primitives on [-1, 1].

Exact rational coefficient vectors, stable float evaluation, moment and
product integrals. Everything downstream (quartic tables, coupling tensors,
normal-form constants) reduces to these.
"""

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

__all__ = [
    "MAX_DEGREE",
    "scaled_int_coeffs",
    "legendre_coeffs",
    "legendre_derivative_coeffs",
    "eval_legendre",
    "eval_legendre_exact",
    "poly_mul",
    "moment_integral",
    "a_coeff",
    "product_expansion",
    "triple_product_integral",
    "derivative_bound_margin",
    "derivative_bound_margins",
]

# Inputs are accepted up to this degree. Exact coefficient vectors are
# practical to roughly n ~ 500 (bit sizes grow like n log n); the float
# recurrence paths are cheap at any accepted degree.
MAX_DEGREE = 10_000

_EVAL_TOL = 1e-12


def _check_degree(n):
    if n != int(n) or n < 0:
        raise ValueError("degree must be a nonnegative integer, got %r" % (n,))
    if n > MAX_DEGREE:
        raise ValueError("degree %d exceeds the supported cap %d" % (n, MAX_DEGREE))
    return int(n)


@lru_cache(maxsize=None)
def scaled_int_coeffs(n):
    """Monomial coefficients of 2^n * P_n as ints, lowest degree first.

    Every coefficient of P_n has denominator dividing 2^n, so this integer
    form is exact and keeps product integrals in integer convolutions.
    """
    n = _check_degree(n)
    c = [0] * (n + 1)
    for k in range(n // 2 + 1):
        c[n - 2 * k] = (-1) ** k * (
            factorial(2 * n - 2 * k)
            // (factorial(k) * factorial(n - k) * factorial(n - 2 * k))
        )
    return tuple(c)


def legendre_coeffs(n):
    """Exact monomial coefficients of P_n, lowest degree first."""
    den = 2 ** _check_degree(n)
    return tuple(Fraction(c, den) for c in scaled_int_coeffs(n))


def legendre_derivative_coeffs(n):
    """Exact monomial coefficients of P_n', lowest degree first."""
    c = legendre_coeffs(n)
    if len(c) == 1:
        return (Fraction(0),)
    return tuple((k + 1) * c[k + 1] for k in range(len(c) - 1))


def poly_mul(a, b):
    """Convolution of two coefficient sequences (exact when inputs are)."""
    out = [a[0] * 0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def eval_legendre(n, x):
    """P_n(x) by the three-term recurrence.

    x may be a float or an ndarray; values outside [-1, 1] (beyond a small
    tolerance) are rejected.
    """
    n = _check_degree(n)
    arr = np.asarray(x, dtype=float)
    if arr.size and float(np.max(np.abs(arr))) > 1.0 + _EVAL_TOL:
        raise ValueError("evaluation point outside [-1, 1]")
    p_prev = np.ones_like(arr)
    if n == 0:
        return p_prev if arr.ndim else float(p_prev)
    p = arr.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * arr * p - k * p_prev) / (k + 1)
    return p if arr.ndim else float(p)


def eval_legendre_exact(n, x):
    """P_n(x) in exact rational arithmetic (Horner on the coefficient vector)."""
    x = Fraction(x)
    acc = Fraction(0)
    for c in reversed(legendre_coeffs(n)):
        acc = acc * x + c
    return acc


def moment_integral(k, n):
    """Exact integral of x^k * P_n(x) over [-1, 1].

    Zero for k < n and for odd k - n; otherwise
    2 * k! / (2^h * h! * (k+n+1)!!) with h = (k-n)/2, which at k = n equals
    2^{n+1} (n!)^2 / (2n+1)!.
    """
    k = _check_degree(k)
    n = _check_degree(n)
    if k < n or (k - n) % 2:
        return Fraction(0)
    h = (k - n) // 2
    s = (k + n) // 2
    odd_fact = factorial(k + n + 1) // (2 ** s * factorial(s))
    return Fraction(2 * factorial(k), 2 ** h * factorial(h) * odd_fact)


def a_coeff(n):
    """(2n)! / (2^n (n!)^2), the coefficient block of the product formula."""
    n = _check_degree(n)
    return Fraction(comb(2 * n, n), 2 ** n)


def _squared_threej(k, l, m):
    # A(s-k) A(s-l) A(s-m) / ((2s+1) A(s)) with s = (k+l+m)/2
    s = (k + l + m) // 2
    return a_coeff(s - k) * a_coeff(s - l) * a_coeff(s - m) / ((2 * s + 1) * a_coeff(s))


def product_expansion(k, l):
    """P_k * P_l as a list of (degree, coefficient) pairs.

    Degrees run from |k-l| to k+l in steps of two; the skipped parities have
    coefficient zero. Coefficients are exact rationals and sum to 1.
    """
    k = _check_degree(k)
    l = _check_degree(l)
    out = []
    for m in range(abs(k - l), k + l + 1, 2):
        out.append((m, (2 * m + 1) * _squared_threej(k, l, m)))
    return out


def triple_product_integral(k, l, m):
    """Exact integral of P_k P_l P_m over [-1, 1]."""
    k = _check_degree(k)
    l = _check_degree(l)
    m = _check_degree(m)
    if (k + l + m) % 2:
        return Fraction(0)
    if m < abs(k - l) or m > k + l:
        return Fraction(0)
    return 2 * _squared_threej(k, l, m)


def derivative_bound_margins(max_j, num_points):
    """min over a uniform grid of j(2j-1) - |P'_{2j-1}| for j = 1..max_j.

    Uses the coupled recurrences P_{n+1} = ((2n+1) x P_n - n P_{n-1})/(n+1)
    and P'_{n+1} = (2n+1) P_n + P'_{n-1}, which stay well conditioned on
    [-1, 1] (endpoint values are exact small integers in floats). Returns an
    array indexed by j-1.
    """
    if max_j < 1:
        raise ValueError("max_j must be >= 1")
    if num_points < 2:
        raise ValueError("need at least two grid points")
    x = np.linspace(-1.0, 1.0, num_points)
    p_prev = np.ones_like(x)
    p_cur = x.copy()
    d_prev = np.zeros_like(x)
    d_cur = np.ones_like(x)
    out = np.empty(max_j)
    out[0] = float(np.min(1.0 - np.abs(d_cur)))
    for n in range(1, 2 * max_j - 1):
        p_next = ((2 * n + 1) * x * p_cur - n * p_prev) / (n + 1)
        d_next = (2 * n + 1) * p_cur + d_prev
        p_prev, p_cur = p_cur, p_next
        d_prev, d_cur = d_cur, d_next
        deg = n + 1
        if deg % 2:
            j = (deg + 1) // 2
            out[j - 1] = float(np.min(j * (2 * j - 1) - np.abs(d_cur)))
    return out


def derivative_bound_margin(j, num_points):
    """Worst-case slack of |P'_{2j-1}| <= j(2j-1) on a uniform grid."""
    return float(derivative_bound_margins(j, num_points)[j - 1])
