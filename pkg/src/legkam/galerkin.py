"""Truncated modal model on the interval: eigenpairs, quartic coupling tensor,
energy and gradient contractions.

Mode j (j = 1, 2, ...) carries the odd-degree eigenfunction
phi_j = sqrt(2j - 1/2) * P_{2j-1} with eigenvalue lambda_j^2 = 2j(2j-1) + m.
The quartic coupling is G[i,j,k,l] = int phi_i phi_j phi_k phi_l / sqrt(
lambda_i lambda_j lambda_k lambda_l); its Legendre part is kept as an exact
rational next to the float value.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .legendre import eval_legendre
from .quartic import quartic_integral_oracle

MASS_UPPER = Fraction(41, 4)
MASS_SINGULAR = Fraction(1, 4)


@dataclass(frozen=True)
class MassParam:
    """Mass parameter of the model. Positive; the full KAM range additionally
    excludes 1/4 and everything at or above 41/4."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value <= 0:
            raise ValueError(f"mass must be positive and finite, got {self.value}")

    @property
    def is_kam_admissible(self) -> bool:
        v = Fraction(self.value)
        return 0 < v < MASS_UPPER and v != MASS_SINGULAR

    def require_kam_admissible(self):
        if not self.is_kam_admissible:
            raise ValueError(
                f"mass {self.value} outside the admissible range "
                f"(0, 41/4) \\ {{1/4}}")
        return self


def as_mass(mass) -> MassParam:
    if isinstance(mass, MassParam):
        return mass
    return MassParam(float(mass))


def eigenvalue_sq(j: int, mass):
    """lambda_j^2 = 2j(2j-1) + m, exact when mass is a Fraction."""
    if j < 1:
        raise ValueError(f"mode index must be >= 1, got {j}")
    return 2 * j * (2 * j - 1) + mass


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """First `dim` eigenpairs of the linearized problem."""

    dim: int
    mass: float
    lambdas: np.ndarray       # lambda_j, entry j-1
    mode_degrees: np.ndarray  # Legendre degree 2j-1 of mode j
    norm_factors: np.ndarray  # sqrt(2j - 1/2)

    def lambda_of(self, j: int) -> float:
        if not 1 <= j <= self.dim:
            raise ValueError(f"mode index {j} outside 1..{self.dim}")
        return float(self.lambdas[j - 1])


def build_eigen_system(dim: int, mass) -> EigenSystem:
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    mp = as_mass(mass)
    j = np.arange(1, dim + 1)
    lambdas = np.sqrt(2.0 * j * (2 * j - 1) + mp.value)
    return EigenSystem(
        dim=dim,
        mass=mp.value,
        lambdas=lambdas,
        mode_degrees=2 * j - 1,
        norm_factors=np.sqrt(2.0 * j - 0.5),
    )


def eigenfunction_values(j: int, x, mass=None) -> np.ndarray:
    """phi_j(x) = sqrt(2j - 1/2) P_{2j-1}(x). Mass only fixes lambda, not phi."""
    if j < 1:
        raise ValueError(f"mode index must be >= 1, got {j}")
    return math.sqrt(2 * j - 0.5) * eval_legendre(2 * j - 1, x)


def selection_rule(i: int, j: int, k: int, l: int) -> bool:
    """Zero pattern of the coupling tensor in mode indices.

    The Legendre degrees 2t-1 are all odd, so their sum is automatically
    even; the integral int P_a P_b P_c P_d survives exactly when the sorted
    degrees satisfy the triangle condition a + b + c >= d.
    """
    for v in (i, j, k, l):
        if v < 1:
            raise ValueError(f"mode indices must be >= 1, got {(i, j, k, l)}")
    a, b, c, d = sorted(2 * t - 1 for t in (i, j, k, l))
    return a + b + c >= d


def _is_square(fr: Fraction) -> bool:
    if fr < 0:
        return False
    p, q = fr.numerator, fr.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    return rp * rp == p and rq * rq == q


@dataclass(frozen=True)
class TensorEntry:
    """One coupling entry, split into its exact and irrational factors.

    float_value = legendre_integral * sqrt(norm_radicand)
                  / sqrt(lambda_i lambda_j lambda_k lambda_l)
    """

    legendre_integral: Fraction  # int P_a P_b P_c P_d over the mode degrees
    norm_radicand: Fraction      # product of (2t - 1/2) over the four modes
    float_value: float

    def phi_integral(self) -> float:
        """int phi_i phi_j phi_k phi_l as a float."""
        return float(self.legendre_integral) * math.sqrt(float(self.norm_radicand))

    def phi_integral_exact(self) -> Fraction:
        """Exact phi integral; only defined when the radicand is a perfect
        square of a rational (for example paired indices)."""
        if not _is_square(self.norm_radicand):
            raise ValueError(
                f"radicand {self.norm_radicand} is not a rational square")
        root = Fraction(math.isqrt(self.norm_radicand.numerator),
                        math.isqrt(self.norm_radicand.denominator))
        return self.legendre_integral * root


@dataclass(eq=False)
class CouplingTensor:
    """Symmetric quartic coupling on the first `dim` modes.

    Entries are stored once per sorted index quadruple; `dense()` expands to
    the full (dim,)*4 float array used by the contractions.
    """

    dim: int
    mass: float
    entries: dict
    _dense: np.ndarray = field(default=None, repr=False, compare=False)

    def value(self, i: int, j: int, k: int, l: int) -> float:
        key = tuple(sorted((i, j, k, l)))
        if key[0] < 1 or key[3] > self.dim:
            raise ValueError(f"indices {key} outside 1..{self.dim}")
        e = self.entries.get(key)
        return 0.0 if e is None else e.float_value

    def exact_entry(self, i: int, j: int, k: int, l: int):
        return self.entries.get(tuple(sorted((i, j, k, l))))

    def dense(self) -> np.ndarray:
        if self._dense is None:
            J = self.dim
            g = np.zeros((J, J, J, J))
            for (i, j, k, l), e in self.entries.items():
                idx = (i - 1, j - 1, k - 1, l - 1)
                seen = set()
                for p in _permutations4(idx):
                    if p not in seen:
                        g[p] = e.float_value
                        seen.add(p)
            self._dense = g
        return self._dense

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["i", "j", "k", "l",
                        "int_numerator", "int_denominator", "float_value"])
            for key in sorted(self.entries):
                e = self.entries[key]
                w.writerow([*key, e.legendre_integral.numerator,
                            e.legendre_integral.denominator,
                            repr(e.float_value)])

    def to_json(self, path):
        payload = {
            "dim": self.dim,
            "mass": self.mass,
            "entries": [
                {"i": k[0], "j": k[1], "k": k[2], "l": k[3],
                 "int_numerator": e.legendre_integral.numerator,
                 "int_denominator": e.legendre_integral.denominator,
                 "norm_radicand": [e.norm_radicand.numerator,
                                   e.norm_radicand.denominator],
                 "float_value": e.float_value}
                for k, e in sorted(self.entries.items())
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)


def _permutations4(idx):
    a, b, c, d = idx
    return {
        (a, b, c, d), (a, b, d, c), (a, c, b, d), (a, c, d, b),
        (a, d, b, c), (a, d, c, b), (b, a, c, d), (b, a, d, c),
        (b, c, a, d), (b, c, d, a), (b, d, a, c), (b, d, c, a),
        (c, a, b, d), (c, a, d, b), (c, b, a, d), (c, b, d, a),
        (c, d, a, b), (c, d, b, a), (d, a, b, c), (d, a, c, b),
        (d, b, a, c), (d, b, c, a), (d, c, a, b), (d, c, b, a),
    }


def build_tensor(dim: int, mass) -> CouplingTensor:
    """Assemble all nonzero coupling entries for modes 1..dim."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    mp = as_mass(mass)
    sys = build_eigen_system(dim, mp)
    entries = {}
    for i in range(1, dim + 1):
        for j in range(i, dim + 1):
            for k in range(j, dim + 1):
                for l in range(k, dim + 1):
                    if not selection_rule(i, j, k, l):
                        continue
                    degs = (2 * i - 1, 2 * j - 1, 2 * k - 1, 2 * l - 1)
                    legint = quartic_integral_oracle(*degs)
                    if legint == 0:
                        continue
                    rad = Fraction(1)
                    lam4 = 1.0
                    for t in (i, j, k, l):
                        rad *= Fraction(4 * t - 1, 2)
                        lam4 *= sys.lambdas[t - 1]
                    val = float(legint) * math.sqrt(float(rad)) / math.sqrt(lam4)
                    entries[(i, j, k, l)] = TensorEntry(legint, rad, val)
    return CouplingTensor(dim=dim, mass=mp.value, entries=entries)


@dataclass
class PhaseState:
    """Canonical coordinates of the truncated model."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.q.shape != self.p.shape or self.q.ndim != 1:
            raise ValueError(
                f"q and p must be 1-d arrays of equal length, "
                f"got {self.q.shape} and {self.p.shape}")

    @property
    def dim(self) -> int:
        return self.q.size


def quartic_form(tensor: CouplingTensor, q: np.ndarray) -> float:
    """Full contraction sum_ijkl G[i,j,k,l] q_i q_j q_k q_l."""
    d = tensor.dense()
    J = q.size
    t = d.reshape(J * J * J, J) @ q
    t = t.reshape(J * J, J) @ q
    t = t.reshape(J, J) @ q
    return float(t @ q)


def gradient_g(q: np.ndarray, tensor: CouplingTensor) -> np.ndarray:
    """Gradient of (1/4) sum G qqqq, which is sum_jkl G[a,j,k,l] q_j q_k q_l."""
    q = np.asarray(q, dtype=float)
    if q.size != tensor.dim:
        raise ValueError(f"state length {q.size} != tensor dim {tensor.dim}")
    d = tensor.dense()
    J = q.size
    t = d.reshape(J * J * J, J) @ q
    t = t.reshape(J * J, J) @ q
    return t.reshape(J, J) @ q


def hamiltonian_energy(state: PhaseState, sys: EigenSystem,
                       tensor: CouplingTensor = None) -> float:
    """H = (1/2) sum lambda_j (p_j^2 + q_j^2) + (1/4) sum G qqqq."""
    if state.dim != sys.dim:
        raise ValueError(f"state dim {state.dim} != eigen system dim {sys.dim}")
    quad = 0.5 * float(np.dot(sys.lambdas, state.p ** 2 + state.q ** 2))
    if tensor is None:
        return quad
    if tensor.dim != sys.dim:
        raise ValueError(f"tensor dim {tensor.dim} != eigen system dim {sys.dim}")
    return quad + 0.25 * quartic_form(tensor, state.q)
