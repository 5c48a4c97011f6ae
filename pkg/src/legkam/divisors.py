"""Small-divisor combinations of the modal frequencies and empirical
lower-bound certificates.

A signed index j (nonzero integer) contributes sgn(j) * lambda_|j| to the
divisor delta. Two index conventions are supported:

- "original":   lambda_j^2 = 2j(2j-1) + m  (mode numbering)
- "renumbered": lambda_n^2 = n(n+1) + m    (Legendre-degree numbering)

They agree under n = 2j - 1. The certificate enumerates the quadruple set
with min |index| <= 2, drops the identically-cancelling sign-paired classes
(p, -p, q, -q), applies the even-sum parity filter in the renumbered
convention (in the original convention the mapped degrees are all odd, so
the degree-sum parity holds automatically), and records the minimum |delta|
and minimum |delta| / sigma(m, n_min).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product

import numpy as np

MASS_UPPER = Fraction(41, 4)
MASS_SINGULAR = Fraction(1, 4)
NEAR_ZERO_RESCREEN = 1e-9   # exact-arithmetic recheck threshold for |delta|
RATIO_CLAMP = 1e-12         # floor used in |delta|/sigma when sigma <= 0

CONVENTIONS = ("original", "renumbered")


def _check_convention(convention):
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}, "
                         f"expected one of {CONVENTIONS}")


def _lambda_sq_int(n: int, convention: str) -> int:
    """Integer part of lambda^2 for index magnitude n."""
    if convention == "original":
        return 2 * n * (2 * n - 1)
    return n * (n + 1)


def lambda_value(j: int, mass: float, convention: str = "renumbered") -> float:
    _check_convention(convention)
    n = abs(j)
    if n == 0:
        raise ValueError("index must be nonzero")
    return math.sqrt(_lambda_sq_int(n, convention) + mass)


def divisor(i: int, j: int, k: int, l: int, mass: float,
            convention: str = "renumbered") -> float:
    """delta = sum of sgn(index) * lambda_|index| over the four indices."""
    _check_convention(convention)
    total = 0.0
    for v in (i, j, k, l):
        if v == 0:
            raise ValueError("indices must be nonzero")
        total += math.copysign(1.0, v) * math.sqrt(
            _lambda_sq_int(abs(v), convention) + mass)
    return total


def is_resonant(i: int, j: int, k: int, l: int) -> bool:
    """True when the signed values are a permutation of (p, -p, q, -q)."""
    vals = sorted((i, j, k, l))
    return vals[0] == -vals[3] and vals[1] == -vals[2]


def divisor_interval(indices, mass: Fraction, bits: int = 80):
    """Exact rational enclosure [lo, hi] of delta.

    Each lambda = sqrt(r) with rational r > 0 is enclosed via integer square
    roots: with r = p/q, isqrt(p*q*4^bits) / (q*2^bits) <= sqrt(r) and the
    next integer gives the upper bound.
    """
    mass = Fraction(mass)
    lo = Fraction(0)
    hi = Fraction(0)
    scale = 1 << bits
    for v, conv_sq in indices:
        r = conv_sq + mass
        p, q = r.numerator, r.denominator
        s = math.isqrt(p * q * scale * scale)
        root_lo = Fraction(s, q * scale)
        root_hi = Fraction(s + 1, q * scale)
        if v > 0:
            lo += root_lo
            hi += root_hi
        else:
            lo -= root_hi
            hi -= root_lo
    return lo, hi


def _exact_abs_divisor(quad, mass: float, convention: str) -> float:
    """Refine |delta| for a near-zero quadruple; returns 0.0 only if the
    enclosure still straddles zero at 512 fractional bits."""
    mfrac = Fraction(mass)
    items = [(v, Fraction(_lambda_sq_int(abs(v), convention))) for v in quad]
    for bits in (80, 160, 320, 512):
        lo, hi = divisor_interval(items, mfrac, bits)
        if lo > 0 or hi < 0:
            mid = (lo + hi) / 2
            return float(abs(mid))
    return 0.0


def sigma_floor(mass: float, n: int, convention: str = "renumbered") -> float:
    """Lower-bound scale sigma(m, n) = min(W, V) for quadruples whose least
    index magnitude is n.

    W has two branches split at m = 1/4; V is evaluated exactly as displayed,
    which makes it negative for m < 1/4 (the caller is expected to clamp and
    flag that regime).
    """
    _check_convention(convention)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    mq = Fraction(mass)
    if not 0 < mq < MASS_UPPER or mq == MASS_SINGULAR:
        raise ValueError(
            f"mass {mass} outside (0, 41/4) or equal to 1/4")
    if convention == "original":
        n = 2 * n - 1
    lam = math.sqrt(n * (n + 1) + mass)
    if mass < 0.25:
        w = (1 - 4 * mass) * (n + mass) / (2 * (lam + n) * (lam + n + 2 * mass))
    else:
        w = 2 - (4 * mass - 1) / (4 * lam + 4 * n + 2)
    v = min(mass / lam,
            n / math.sqrt(mass + 2),
            (4 * mass - 1) / (4 * (n * (n + 1) + mass) ** 1.5))
    return min(w, v)


def difference_gap_floor(i: int, mass: float) -> float:
    """Positive floor 2 - (m - 1/4)/(sqrt(i(i+1)+m) + i + 1/2) on the gap
    (lambda_j - lambda_i) - (lambda_l - lambda_k) for sorted quadruples with
    j - i > l - k (renumbered convention)."""
    if i < 1:
        raise ValueError(f"i must be >= 1, got {i}")
    if not 0.25 < mass < float(MASS_UPPER):
        raise ValueError(f"mass {mass} outside (1/4, 41/4)")
    return 2 - (mass - 0.25) / (math.sqrt(i * (i + 1) + mass) + i + 0.5)


@dataclass(frozen=True)
class DivisorCertificate:
    """Outcome of one exhaustive small-divisor sweep."""

    mass: float
    max_index: int
    convention: str
    min_abs_divisor: float
    min_abs_witness: tuple
    min_ratio: float
    min_ratio_witness: tuple
    sigma_clamped: bool
    n_evaluated: int
    resonant_skipped: int
    rescreened: int

    def to_dict(self) -> dict:
        return {
            "mass": self.mass,
            "max_index": self.max_index,
            "convention": self.convention,
            "min_abs_divisor": self.min_abs_divisor,
            "min_abs_witness": list(self.min_abs_witness),
            "min_ratio": self.min_ratio,
            "min_ratio_witness": list(self.min_ratio_witness),
            "sigma_clamped": self.sigma_clamped,
            "n_evaluated": self.n_evaluated,
            "resonant_skipped": self.resonant_skipped,
            "rescreened": self.rescreened,
        }


_SIGN_PATTERNS = np.array([(1,) + s for s in product((1, -1), repeat=3)],
                          dtype=np.int8)


@lru_cache(maxsize=16)
def _layout(max_index: int, parity_filter: bool, restrict: bool):
    """Mass-independent enumeration layout: sorted index rows with sign
    patterns, resonant classes removed. Global sign flips are quotiented out
    by fixing the first sign positive."""
    combos = []
    for c in combinations_with_replacement(range(1, max_index + 1), 4):
        if restrict and c[0] > 2:
            continue
        if parity_filter and (c[0] + c[1] + c[2] + c[3]) % 2:
            continue
        combos.append(c)
    if not combos:
        raise ValueError(f"empty enumeration for max_index={max_index}")
    idx = np.array(combos, dtype=np.int32)                     # (K, 4)
    k = idx.shape[0]
    idx_e = np.repeat(idx, len(_SIGN_PATTERNS), axis=0)        # (8K, 4)
    sg_e = np.tile(_SIGN_PATTERNS, (k, 1)).astype(np.int32)    # (8K, 4)
    signed = np.sort(idx_e * sg_e, axis=1)
    resonant = (signed[:, 0] == -signed[:, 3]) & (signed[:, 1] == -signed[:, 2])
    keep = ~resonant
    return {
        "idx": idx_e[keep],
        "signs": sg_e[keep],
        "n_min": idx_e[keep, 0],
        "resonant_skipped": int(resonant.sum()),
    }


def certify_range(max_index: int, mass: float,
                  convention: str = "renumbered",
                  include_all: bool = False) -> DivisorCertificate:
    """Enumerate every non-resonant admissible quadruple class with indices
    up to max_index and certify min |delta| and min |delta|/sigma."""
    _check_convention(convention)
    if max_index < 2:
        raise ValueError(f"max_index must be >= 2, got {max_index}")
    # validates the mass range as a side effect
    sigma_floor(mass, 1, convention)

    parity = convention == "renumbered"
    lay = _layout(max_index, parity, not include_all)

    n = np.arange(1, max_index + 1)
    lam = np.sqrt(_lambda_sq_int_vec(n, convention) + mass)
    delta = np.abs((lay["signs"] * lam[lay["idx"] - 1]).sum(axis=1))

    rescreened = 0
    near = np.flatnonzero(delta < NEAR_ZERO_RESCREEN)
    for row in near:
        quad = tuple(int(s * v) for s, v in zip(lay["signs"][row],
                                                lay["idx"][row]))
        delta[row] = _exact_abs_divisor(quad, mass, convention)
        rescreened += 1

    sig = np.array([sigma_floor(mass, int(v), convention)
                    for v in range(1, max_index + 1)])
    sig_used = sig[lay["n_min"] - 1]
    clamped = bool((sig_used <= RATIO_CLAMP).any())
    ratio = delta / np.maximum(sig_used, RATIO_CLAMP)

    i_abs = int(np.argmin(delta))
    i_rat = int(np.argmin(ratio))

    def witness(row):
        return tuple(int(s * v) for s, v in zip(lay["signs"][row],
                                                lay["idx"][row]))

    return DivisorCertificate(
        mass=mass,
        max_index=max_index,
        convention=convention,
        min_abs_divisor=float(delta[i_abs]),
        min_abs_witness=witness(i_abs),
        min_ratio=float(ratio[i_rat]),
        min_ratio_witness=witness(i_rat),
        sigma_clamped=clamped,
        n_evaluated=int(delta.size),
        resonant_skipped=lay["resonant_skipped"],
        rescreened=rescreened,
    )


def _lambda_sq_int_vec(n: np.ndarray, convention: str) -> np.ndarray:
    if convention == "original":
        return 2.0 * n * (2 * n - 1)
    return n * (n + 1.0)


def reevaluate_witness(cert: DivisorCertificate) -> float:
    """Recompute |delta| of the recorded minimizing quadruple."""
    return abs(divisor(*cert.min_abs_witness, mass=cert.mass,
                       convention=cert.convention))
