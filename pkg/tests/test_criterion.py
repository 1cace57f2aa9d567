import numpy as np
import pytest

from src.sampling import multiplier as mult
from src.sampling.closed_forms import diffquot_family
from src.sampling.criterion import (
    Case,
    Verdict,
    build_matrix,
    classify_theorem1,
    classify_theorem2,
    decide_theorem2,
    det_profile,
    interval,
    matrix_field,
    periodization_check,
    product_determinant,
    vandermonde_determinant,
)
from src.sampling.errors import DomainError, InvalidArgumentError
from src.sampling.multiplier import OperatorFamily
from src.sampling.signals import combination, sinc_signal
from tests.conftest import FAST_PROFILE


def test_interval():
    assert interval(1) == (-0.5, 0.5)
    assert interval(3) == (0.5, 1.5)


def test_build_matrix_entries(vaaler_family):
    x = 0.3
    expected = 0.5 * np.array([[1.0, 2j * np.pi * (-x / 2)], [1.0, 2j * np.pi * (1 - x) / 2]])
    np.testing.assert_allclose(build_matrix(vaaler_family, x), expected, atol=1e-15)


def test_matrix_field_rejects_points_outside_the_interval(vaaler_family):
    with pytest.raises(DomainError):
        matrix_field(vaaler_family, [0.5, 1.0])
    assert matrix_field(vaaler_family, [0.0, 1.0], allow_boundary=True).shape == (2, 2, 2)


def test_shannon_is_case_1(shannon_family):
    report = classify_theorem1(det_profile(shannon_family, **FAST_PROFILE))
    assert report.case == Case.PositiveEssInf
    assert report.essinf_estimate == pytest.approx(1.0)
    assert report.exit_code == 0


def test_vaaler_has_constant_determinant(vaaler_family):
    field = det_profile(vaaler_family, **FAST_PROFILE)
    np.testing.assert_allclose(field.abs_dets, np.pi / 4, atol=1e-12)
    report = classify_theorem1(field)
    assert report.case == Case.PositiveEssInf
    assert report.essinf_estimate == pytest.approx(0.7854, abs=1e-4)
    assert report.zero_fraction == 0.0


def test_colliding_shifts_are_case_3():
    family = OperatorFamily(members=(mult.shift(0.0), mult.shift(2.0)))
    report = classify_theorem1(det_profile(family, **FAST_PROFILE))
    assert report.case == Case.PositiveMeasureZeroSet
    assert report.zero_fraction == pytest.approx(1.0)
    assert report.exit_code == 3


def test_integer_epsilon_vanishes_at_the_ends():
    field = det_profile(diffquot_family(1.0, 0.0, 0.0), **FAST_PROFILE)
    assert np.abs(field.boundary_dets).max() < 1e-12
    report = classify_theorem1(field)
    assert report.case == Case.NullZeroSet
    assert report.exit_code == 2


def test_odd_node_gap_vanishes_in_the_middle():
    report = classify_theorem1(det_profile(diffquot_family(0.3, 1.0, 0.0), **FAST_PROFILE))
    assert report.case == Case.NullZeroSet
    assert report.min_location == pytest.approx(0.5, abs=1e-6)
    assert report.essinf_estimate < 1e-10


def test_refinement_adds_points_near_small_determinants():
    family = diffquot_family(0.3, 1.0, 0.0)
    coarse = det_profile(family, initial_grid=64, refine_levels=0, polish=False)
    refined = det_profile(family, initial_grid=64, refine_levels=3, polish=False)
    assert coarse.grid.size == 64
    assert refined.grid.size > 64
    assert refined.abs_dets.min() < coarse.abs_dets.min()
    assert np.all(np.diff(refined.grid) > 0)
    assert refined.weights.sum() == pytest.approx(1.0)


def test_profile_argument_checks(vaaler_family):
    with pytest.raises(InvalidArgumentError):
        det_profile(vaaler_family, initial_grid=8)
    with pytest.raises(InvalidArgumentError):
        det_profile(vaaler_family, refine_levels=-1)


def test_theorem1_needs_rho_equal_to_n():
    family = OperatorFamily(members=(mult.identity(), mult.derivative()), rho=1.0)
    with pytest.raises(InvalidArgumentError):
        classify_theorem1(det_profile(family, **FAST_PROFILE))


@pytest.mark.parametrize(
    "case, rho_delta, expected",
    [
        (Case.PositiveEssInf, 1.0, (Verdict.yes, Verdict.no)),
        (Case.PositiveEssInf, 2.0, (Verdict.yes, Verdict.yes)),
        (Case.PositiveEssInf, 3.0, (Verdict.no, Verdict.yes)),
        (Case.NullZeroSet, 2.0, (Verdict.yes, Verdict.no)),
        (Case.NullZeroSet, 3.0, (Verdict.unknown, Verdict.unknown)),
        (Case.PositiveMeasureZeroSet, 1.0, (Verdict.unknown, Verdict.no)),
        (Case.PositiveMeasureZeroSet, 2.0, (Verdict.no, Verdict.no)),
        (Case.PositiveMeasureZeroSet, 3.0, (Verdict.no, Verdict.unknown)),
    ],
)
def test_theorem2_decision_table(case, rho_delta, expected):
    assert decide_theorem2(case, 2.0, rho_delta / 2.0, 2) == expected


def test_theorem2_for_vaaler(vaaler_family):
    field = det_profile(vaaler_family, **FAST_PROFILE)
    verdict = classify_theorem2(vaaler_family, 0.5, field=field)
    assert (verdict.stable_sampling, verdict.interpolation_set) == (Verdict.yes, Verdict.no)
    assert verdict.rho_delta == pytest.approx(1.0)
    verdict = classify_theorem2(vaaler_family, 1.5, field=field)
    assert (verdict.stable_sampling, verdict.interpolation_set) == (Verdict.no, Verdict.yes)
    with pytest.raises(InvalidArgumentError):
        classify_theorem2(vaaler_family, 0.0, field=field)


def test_theorem2_for_integer_epsilon():
    verdict = classify_theorem2(diffquot_family(1.0, 0.0, 0.0), 1.0, **FAST_PROFILE)
    assert verdict.case == Case.NullZeroSet
    assert (verdict.stable_sampling, verdict.interpolation_set) == (Verdict.yes, Verdict.no)


def test_product_determinant_matches_lu():
    for base in (mult.derivative(), mult.shift(0.5)):
        family = mult.power_family(base, 3)
        x = np.linspace(0.5, 1.5, 23)[1:-1]
        np.testing.assert_allclose(product_determinant(base, 3, x), np.linalg.det(matrix_field(family, x)), rtol=1e-10)


def test_vandermonde_determinant_matches_lu(shifted3_family):
    x = np.linspace(0.5, 1.5, 17)[1:-1]
    lu = np.linalg.det(matrix_field(shifted3_family, x))
    np.testing.assert_allclose(vandermonde_determinant((0.0, 0.7, 1.9), 3, x), lu, rtol=1e-10)
    assert isinstance(vandermonde_determinant((0.0, 0.7, 1.9), 3, 1.0), complex)


def test_periodization_identity(vaaler_family):
    f = combination([1.0, 0.5], [0.0, -0.7])
    coarse = periodization_check(vaaler_family, f, a=0.3, x=0.4, trunc=50)
    fine = periodization_check(vaaler_family, f, a=0.3, x=0.4, trunc=1000)
    assert fine < 1e-3
    assert fine < coarse
    derivative = periodization_check(vaaler_family, sinc_signal(0.2), a=-0.6, x=0.7, trunc=1000, n=2)
    assert derivative < 1e-3
    with pytest.raises(InvalidArgumentError):
        periodization_check(vaaler_family, f, a=0.0, x=0.4, trunc=10, n=3)


def test_dilated_family_has_the_same_matrices():
    oversampled = OperatorFamily(members=(mult.identity(), mult.derivative(1, 0.2)), rho=1.0)
    dilated = mult.dilate_family(oversampled, 2.0)
    x = np.linspace(0.0, 1.0, 9)[1:-1]
    np.testing.assert_allclose(matrix_field(oversampled, x), matrix_field(dilated, x), atol=1e-14)


def test_common_factor_multiplies_the_determinant(shifted3_family):
    factor = mult.derivative(1, 0.3)
    composed = mult.with_common_factor(shifted3_family, factor)
    x = np.linspace(0.5, 1.5, 11)[1:-1]
    xi = (np.arange(3)[None, :] - x[:, None]) / 3
    expected = np.prod(mult.eval_multiplier(factor, xi), axis=1) * np.linalg.det(matrix_field(shifted3_family, x))
    np.testing.assert_allclose(np.linalg.det(matrix_field(composed, x)), expected, rtol=1e-10, atol=1e-14)


def test_large_multipliers_are_still_case_1():
    family = OperatorFamily(members=(mult.identity(), mult.polynomial([0j, 1e11 + 0j])))
    report = classify_theorem1(det_profile(family, **FAST_PROFILE))
    assert report.case == Case.PositiveEssInf
    assert report.essinf_estimate == pytest.approx(1e11 * np.pi / 4, rel=1e-6)
    assert report.zero_fraction == 0.0
    assert report.singular_points > 0


def test_repeated_identity_is_degenerate():
    report = classify_theorem1(det_profile(mult.power_family(mult.identity(), 2), **FAST_PROFILE))
    assert report.case == Case.PositiveMeasureZeroSet
    assert report.exit_code == 3


def test_single_sample_periodization_is_exact(shannon_family, sinc_at_zero):
    assert periodization_check(shannon_family, sinc_at_zero, a=0.0, x=0.2, trunc=0) < 1e-14


@pytest.mark.parametrize(
    "members, signal, a, x, n",
    [
        ((mult.identity(), mult.derivative()), sinc_signal(), 0.0, 0.5, 2),
        ((mult.identity(), mult.shift(0.5)), sinc_signal(0.25), 0.0, 0.7, 2),
        ((mult.identity(), mult.derivative()), combination([1.0, 0.5], [0.0, -0.7]), 0.3, 0.4, 2),
        ((mult.shift(0.0), mult.shift(0.7), mult.shift(1.9)), combination([1.0, 0.5, -0.25], [0.0, 0.5, -1.3]), 0.2, 1.1, 2),
        ((mult.identity(), mult.derivative(), mult.derivative(2)), sinc_signal(), 0.0, 1.0, 3),
    ],
)
def test_periodization_over_the_corpus(members, signal, a, x, n):
    family = OperatorFamily(members=members)
    coarse = periodization_check(family, signal, a=a, x=x, trunc=50, n=n)
    fine = periodization_check(family, signal, a=a, x=x, trunc=1000, n=n)
    assert fine < 1e-3
    assert fine <= coarse + 1e-12
