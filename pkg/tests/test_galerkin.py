"""Modal model tests: eigen data, selection rule, coupling tensor entries,
contractions and the Hamiltonian."""

import math
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from legkam import galerkin
from legkam.quartic import quartic_integral_oracle


def test_mass_param_validation():
    with pytest.raises(ValueError):
        galerkin.MassParam(0.0)
    with pytest.raises(ValueError):
        galerkin.MassParam(-1.0)
    with pytest.raises(ValueError):
        galerkin.MassParam(float("nan"))
    assert galerkin.MassParam(2.0).is_kam_admissible
    assert not galerkin.MassParam(0.25).is_kam_admissible
    assert not galerkin.MassParam(10.25).is_kam_admissible
    assert galerkin.MassParam(10.2).is_kam_admissible
    # masses above the KAM window are still valid model parameters
    assert galerkin.MassParam(50.0).value == 50.0
    with pytest.raises(ValueError):
        galerkin.MassParam(0.25).require_kam_admissible()


def test_eigenvalue_sq_exact():
    m = Fraction(1, 3)
    assert galerkin.eigenvalue_sq(1, m) == 2 + m
    assert galerkin.eigenvalue_sq(2, m) == 12 + m
    assert galerkin.eigenvalue_sq(3, m) == 30 + m
    with pytest.raises(ValueError):
        galerkin.eigenvalue_sq(0, m)


def test_eigen_system_arrays():
    sys = galerkin.build_eigen_system(5, 2.0)
    j = np.arange(1, 6)
    assert np.allclose(sys.lambdas ** 2, 2 * j * (2 * j - 1) + 2.0)
    assert (sys.mode_degrees == 2 * j - 1).all()
    assert np.allclose(sys.norm_factors ** 2, 2 * j - 0.5)
    assert sys.lambda_of(1) == sys.lambdas[0]
    with pytest.raises(ValueError):
        sys.lambda_of(6)


def test_eigenfunctions_orthonormal():
    # Gauss-Legendre quadrature is an independent check of the norm factors
    x, w = np.polynomial.legendre.leggauss(64)
    for i in range(1, 6):
        for j in range(i, 6):
            prod = galerkin.eigenfunction_values(i, x) * \
                galerkin.eigenfunction_values(j, x)
            integral = float(w @ prod)
            want = 1.0 if i == j else 0.0
            assert abs(integral - want) < 1e-12, (i, j)


def test_selection_rule_matches_oracle_zero_pattern():
    # the integral vanishes exactly where the degree triangle fails
    for quad in combinations_with_replacement(range(1, 9), 4):
        degs = tuple(2 * t - 1 for t in quad)
        nonzero = quartic_integral_oracle(*degs) != 0
        assert galerkin.selection_rule(*quad) == nonzero, quad


def test_selection_rule_validation():
    with pytest.raises(ValueError):
        galerkin.selection_rule(0, 1, 1, 1)


def test_tensor_entry_1111():
    tensor = galerkin.build_tensor(3, 1.0)
    entry = tensor.exact_entry(1, 1, 1, 1)
    assert entry.legendre_integral == Fraction(2, 5)
    assert entry.norm_radicand == Fraction(81, 16)
    assert entry.phi_integral_exact() == Fraction(9, 10)
    # float value divides by lambda_1^2 = 2 + m = 3
    assert math.isclose(entry.float_value, 0.3, rel_tol=1e-15)
    assert math.isclose(entry.phi_integral(), 0.9, rel_tol=1e-15)


def test_tensor_zero_entries_absent():
    tensor = galerkin.build_tensor(6, 2.0)
    assert tensor.value(1, 1, 1, 5) == 0.0
    assert tensor.exact_entry(1, 1, 1, 5) is None
    assert (1, 1, 1, 5) not in tensor.entries
    # triangle-allowed entry is present and positive
    assert tensor.value(1, 1, 2, 2) > 0


def test_tensor_value_permutation_invariant():
    tensor = galerkin.build_tensor(5, 0.7)
    v = tensor.value(1, 2, 2, 4)
    assert v != 0
    assert tensor.value(4, 2, 1, 2) == v
    assert tensor.value(2, 4, 2, 1) == v
    with pytest.raises(ValueError):
        tensor.value(1, 2, 3, 6)


def test_dense_symmetric_under_axis_permutations():
    tensor = galerkin.build_tensor(4, 2.0)
    d = tensor.dense()
    assert d.shape == (4, 4, 4, 4)
    for axes in ((1, 0, 2, 3), (0, 2, 1, 3), (3, 1, 2, 0), (2, 3, 0, 1)):
        assert (d == np.transpose(d, axes)).all(), axes


def test_dense_agrees_with_value():
    tensor = galerkin.build_tensor(4, 5.0)
    d = tensor.dense()
    for quad in combinations_with_replacement(range(1, 5), 4):
        i, j, k, l = quad
        assert d[i - 1, j - 1, k - 1, l - 1] == tensor.value(*quad)


def test_radicand_product_form():
    tensor = galerkin.build_tensor(5, 2.0)
    e = tensor.exact_entry(2, 3, 3, 5)
    want = Fraction(7, 2) * Fraction(11, 2) * Fraction(11, 2) * Fraction(19, 2)
    assert e.norm_radicand == want
    with pytest.raises(ValueError):
        e.phi_integral_exact()  # 7 * 11^2 * 19 / 16 is not a square


@given(st.floats(0.2, 2.0))
@settings(max_examples=40, deadline=None)
def test_quartic_form_homogeneous(scale):
    tensor = galerkin.build_tensor(4, 2.0)
    rng = np.random.default_rng(11)
    q = rng.standard_normal(4)
    base = galerkin.quartic_form(tensor, q)
    scaled = galerkin.quartic_form(tensor, scale * q)
    assert math.isclose(scaled, scale ** 4 * base, rel_tol=1e-10)


def test_quartic_form_positive():
    # G q^4 = int (sum q_j phi_j)^4 >= 0
    tensor = galerkin.build_tensor(5, 1.0)
    rng = np.random.default_rng(3)
    for _ in range(50):
        q = rng.standard_normal(5)
        assert galerkin.quartic_form(tensor, q) >= 0


def test_quartic_form_against_explicit_sum():
    tensor = galerkin.build_tensor(3, 2.0)
    rng = np.random.default_rng(5)
    q = rng.standard_normal(3)
    d = tensor.dense()
    brute = sum(
        d[i, j, k, l] * q[i] * q[j] * q[k] * q[l]
        for i in range(3) for j in range(3)
        for k in range(3) for l in range(3))
    assert math.isclose(galerkin.quartic_form(tensor, q), brute,
                        rel_tol=1e-12)


def test_gradient_matches_finite_differences():
    tensor = galerkin.build_tensor(5, 2.0)
    rng = np.random.default_rng(19)
    eps = 1e-6
    for _ in range(25):
        q = 0.5 * rng.standard_normal(5)
        grad = galerkin.gradient_g(q, tensor)
        for a in range(5):
            qp, qm = q.copy(), q.copy()
            qp[a] += eps
            qm[a] -= eps
            fd = (galerkin.quartic_form(tensor, qp)
                  - galerkin.quartic_form(tensor, qm)) / (2 * eps) / 4
            assert abs(grad[a] - fd) < 1e-6 * max(1.0, abs(fd)), a


def test_gradient_dimension_check():
    tensor = galerkin.build_tensor(4, 2.0)
    with pytest.raises(ValueError):
        galerkin.gradient_g(np.zeros(5), tensor)


def test_phase_state_validation():
    with pytest.raises(ValueError):
        galerkin.PhaseState(q=np.zeros(3), p=np.zeros(4))
    with pytest.raises(ValueError):
        galerkin.PhaseState(q=np.zeros((2, 2)), p=np.zeros((2, 2)))
    st8 = galerkin.PhaseState(q=[0.0, 1.0], p=[2.0, 3.0])
    assert st8.dim == 2


def test_hamiltonian_energy():
    sys = galerkin.build_eigen_system(3, 2.0)
    state = galerkin.PhaseState(q=np.array([1.0, 0.0, 0.0]),
                                p=np.array([0.0, 1.0, 0.0]))
    quad = 0.5 * (sys.lambdas[0] + sys.lambdas[1])
    assert math.isclose(galerkin.hamiltonian_energy(state, sys), quad,
                        rel_tol=1e-15)
    tensor = galerkin.build_tensor(3, 2.0)
    full = galerkin.hamiltonian_energy(state, sys, tensor)
    extra = 0.25 * galerkin.quartic_form(tensor, state.q)
    assert math.isclose(full, quad + extra, rel_tol=1e-13)
    with pytest.raises(ValueError):
        galerkin.hamiltonian_energy(
            galerkin.PhaseState(q=np.zeros(2), p=np.zeros(2)), sys)


def test_tensor_csv_and_json_export(tmp_path):
    import csv as csvmod
    import json
    tensor = galerkin.build_tensor(3, 1.0)
    cpath = tmp_path / "tensor.csv"
    jpath = tmp_path / "tensor.json"
    tensor.to_csv(cpath)
    tensor.to_json(jpath)
    with open(cpath, newline="") as fh:
        rows = list(csvmod.DictReader(fh))
    assert len(rows) == len(tensor.entries)
    first = rows[0]
    key = (int(first["i"]), int(first["j"]), int(first["k"]), int(first["l"]))
    entry = tensor.entries[key]
    assert Fraction(int(first["int_numerator"]),
                    int(first["int_denominator"])) == entry.legendre_integral
    assert float(first["float_value"]) == entry.float_value
    doc = json.load(open(jpath))
    assert doc["dim"] == 3
    assert len(doc["entries"]) == len(tensor.entries)
