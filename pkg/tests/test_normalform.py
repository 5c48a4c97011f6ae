"""Normal-form tests: exact g-matrix constants, closed-form tail columns,
frequency data, nondegeneracy sweeps and the averaging coefficients."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from legkam import normalform
from legkam.galerkin import build_tensor
from legkam.quartic import build_p_table, quartic_integral_oracle


def test_exact_g_constants():
    assert normalform.g_entry(1, 1) == Fraction(18, 5)
    assert normalform.g_entry(1, 2) == Fraction(92, 15)
    assert normalform.g_entry(2, 2) == Fraction(3374, 715)
    assert normalform.det_g() == normalform.DET_G == Fraction(-663764, 32175)


def test_g_entry_against_oracle():
    for i in range(1, 7):
        for j in range(1, 7):
            factor = 1 if i == j else 2
            want = factor * (4 * i - 1) * (4 * j - 1) * \
                quartic_integral_oracle(2 * i - 1, 2 * i - 1,
                                        2 * j - 1, 2 * j - 1)
            assert normalform.g_entry(i, j) == want, (i, j)
    with pytest.raises(ValueError):
        normalform.g_entry(0, 1)


def test_g_entry_uses_table():
    table = build_p_table(9, 11)
    assert normalform.g_entry(5, 6, table) == normalform.g_entry(5, 6)


def test_closed_form_tail_columns():
    for j in range(2, 13):
        assert normalform.g_j1(j) == normalform.g_entry(j, 1), j
    for j in range(3, 13):
        assert normalform.g_j2(j) == normalform.g_entry(j, 2), j
    with pytest.raises(ValueError):
        normalform.g_j1(1)
    with pytest.raises(ValueError):
        normalform.g_j2(2)


def test_float_tail_columns_match_exact():
    j = np.arange(3, 40, dtype=float)
    f1 = normalform._g_j1_float(j)
    f2 = normalform._g_j2_float(j)
    for pos, jj in enumerate(range(3, 40)):
        assert math.isclose(f1[pos], float(normalform.g_j1(jj)), rel_tol=1e-13)
        assert math.isclose(f2[pos], float(normalform.g_j2(jj)), rel_tol=1e-13)


def test_gg_forms():
    m = Fraction(3, 7)
    want1 = normalform.g_entry(2, 2) * (2 + m) - normalform.g_entry(1, 2) * (12 + m)
    want2 = normalform.g_entry(1, 1) * (12 + m) - normalform.g_entry(1, 2) * (2 + m)
    assert normalform.gg1(m) == want1
    assert normalform.gg2(m) == want2


def test_averaged_coupling_scaling():
    m = 2.0
    val = normalform.averaged_coupling(1, 2, m)
    want = float(Fraction(92, 15)) / (math.sqrt(2 + m) * math.sqrt(12 + m))
    assert math.isclose(val, want, rel_tol=1e-14)


def test_build_normal_form_structure():
    data = normalform.build_normal_form(6, 2.0)
    assert data.alpha.shape == (2,)
    assert data.beta.shape == (4,)
    assert data.A.shape == (2, 2)
    assert data.B.shape == (4, 2)
    assert np.allclose(data.A, data.A.T)
    assert math.isclose(data.alpha[0], 2.0, rel_tol=1e-15)  # sqrt(2 + 2)
    assert (np.diff(data.beta) > 0).all()
    assert data.det_g == normalform.DET_G
    # A entries are g / (lambda_i lambda_j)
    want = float(Fraction(18, 5)) / (2.0 * 2.0)
    assert math.isclose(data.A[0, 0], want, rel_tol=1e-14)
    # B rows follow the closed forms
    want_b = float(normalform.g_j1(3)) / (data.beta[0] * data.alpha[0])
    assert math.isclose(data.B[0, 0], want_b, rel_tol=1e-13)


def test_build_normal_form_validation():
    with pytest.raises(ValueError):
        normalform.build_normal_form(2, 2.0)
    with pytest.raises(ValueError):
        normalform.build_normal_form(6, 0.25)
    with pytest.raises(ValueError):
        normalform.build_normal_form(6, 10.3)


def test_det_a_and_checks():
    data = normalform.build_normal_form(8, 2.0)
    want = float(normalform.DET_G) / (4.0 * 14.0)  # lambda1^2 lambda2^2
    assert math.isclose(normalform.det_a(data), want, rel_tol=1e-13)
    assert normalform.check_twist_nondegenerate(data)
    assert normalform.check_tail_frequencies(data)


def test_single_mode_terms_straddle():
    for m in (0.5, 2.0, 10.0):
        for j in (3, 10, 100):
            first, second = normalform.single_mode_terms(j, m)
            assert first > normalform.SINGLE_MODE_LOWER, (j, m)
            assert second < normalform.SINGLE_MODE_UPPER, (j, m)
    with pytest.raises(ValueError):
        normalform.single_mode_terms(2, 1.0)


def test_single_mode_sweep():
    res = normalform.min_single_mode_margin(
        60, masses=np.array([0.5, 2.0, 9.0]))
    assert res.straddles(normalform.SINGLE_MODE_LOWER,
                         normalform.SINGLE_MODE_UPPER)
    assert res.min_margin > 0
    assert res.n_points == 58 * 3


def test_mode_pair_terms_symmetric_and_straddling():
    first_a, second_a = normalform.mode_pair_terms(3, 7, 2.0)
    first_b, second_b = normalform.mode_pair_terms(7, 3, 2.0)
    assert math.isclose(first_a, first_b, rel_tol=1e-15)
    assert math.isclose(second_a, second_b, rel_tol=1e-12)
    assert first_a > normalform.PAIR_BOUND > second_a
    with pytest.raises(ValueError):
        normalform.mode_pair_terms(3, 3, 2.0)


def test_mode_pair_sweep():
    res = normalform.min_mode_pair_margin(
        40, masses=np.array([0.5, 2.0, 9.0]))
    assert res.straddles(normalform.PAIR_BOUND, normalform.PAIR_BOUND)
    assert res.min_margin > 0


def test_mass_grid_exclusions():
    grid = normalform.mass_grid(200)
    assert grid.min() >= 1e-3
    assert grid.max() <= float(normalform.MASS_UPPER) - 1e-3
    assert (np.abs(grid - 0.25) > 1e-3).all()


def test_frequency_maps_affine():
    data = normalform.build_normal_form(6, 2.0)
    maps = normalform.frequency_maps(data)
    zero = maps.omega((0.0, 0.0))
    assert np.allclose(zero, data.alpha)
    action = np.array([1e-3, 2e-3])
    assert np.allclose(maps.omega(action), data.alpha + data.A @ action)
    assert np.allclose(maps.Omega(action), data.beta + data.B @ action)
    ratio = maps.tail_ratio(6, 3, (0.0, 0.0))
    # (lambda_6 - lambda_3)/3 tends to the asymptotic spacing 2
    assert abs(ratio / 2.0 - 1) < 0.1


def test_generator_coefficient_cases():
    tensor = build_tensor(6, 2.0)
    # resonant and deep-tail quadruples are excluded from the generator
    assert normalform.generator_coefficient(1, -1, 2, -2, 2.0, tensor) == 0j
    assert normalform.generator_coefficient(3, 4, -5, 6, 2.0, tensor) == 0j
    val = normalform.generator_coefficient(1, 1, 1, 1, 2.0, tensor)
    delta = 4 * math.sqrt(2 * 1 * 1 + 2.0)  # 4 lambda_1, original convention
    want = tensor.value(1, 1, 1, 1) / delta
    assert val.real == 0.0
    assert math.isclose(abs(val.imag), want, rel_tol=1e-13)
    with pytest.raises(ValueError):
        normalform.generator_coefficient(0, 1, 1, 1, 2.0, tensor)


def test_power_shift_matrix_block():
    data = normalform.build_normal_form(5, 2.0)
    shift = normalform.power_shift_matrix(5, 2.0)
    assert shift.shape == (5, 5)
    assert np.allclose(shift, shift.T)
    assert np.allclose(shift[:2, :2], 3.0 / 32.0 * data.A, rtol=1e-13)


def test_summary_serializable():
    data = normalform.build_normal_form(4, 5.0)
    summary = normalform.normal_form_summary(data)
    assert summary["det_g"] == "-663764/32175"
    assert summary["g"][0][0] == "18/5"
    assert summary["twist_nondegenerate"] is True
    assert summary["tail_frequencies_ok"] is True
    json.dumps(summary)  # must not raise
