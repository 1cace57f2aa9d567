import numpy as np
import pytest

from src.sampling import multiplier as mult
from src.sampling.closed_forms import (
    closed_form_kernels,
    diffquot_case,
    diffquot_kernels,
    dynamical_last_kernel,
    littmann_coeffs,
    littmann_kernel,
    littmann_kernels,
    littmann_spectrum,
    littmann_taylor_kernel,
    shifted_kernel,
    shifted_kernels,
    sinc_kernel,
    twonode_family,
    twonode_kernels,
)
from src.sampling.errors import FamilyMismatchError, InvalidArgumentError, InvalidNodesError, NoFormulaError
from src.sampling.family_io import load_family
from src.sampling.kernels import verify_biorthogonality
from src.utils.special import sinc
from tests.conftest import family_path


def test_sinc_kernel():
    g = sinc_kernel()
    assert g(0.0) == pytest.approx(1.0)
    np.testing.assert_allclose(g.spectrum(np.array([-0.5, 0.0, 0.3, 0.7])), [1, 1, 1, 0])


def test_littmann_coefficients():
    np.testing.assert_allclose(littmann_coeffs(1), [1.0])
    np.testing.assert_allclose(littmann_coeffs(2), [0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(littmann_coeffs(3), [np.pi ** 2 / 9, 0.0, 1.0], atol=1e-14)
    with pytest.raises(InvalidArgumentError):
        littmann_coeffs(0)


def test_littmann_order_two_is_vaaler():
    x = np.linspace(-7.0, 7.0, 29)
    np.testing.assert_allclose(littmann_kernel(2, 1)(x), sinc(x / 2) ** 2, atol=1e-14)
    np.testing.assert_allclose(littmann_kernel(2, 2)(x), x * sinc(x / 2) ** 2, atol=1e-14)


def test_littmann_forms_agree():
    x = np.linspace(-6.0, 6.0, 49)
    for m in (1, 2, 3):
        np.testing.assert_allclose(littmann_kernel(3, m)(x), littmann_taylor_kernel(3, m)(x), atol=1e-10)


def test_littmann_first_kernel_interpolates():
    j = np.arange(-3, 4)
    np.testing.assert_allclose(littmann_kernel(3, 1)(3.0 * j), (j == 0).astype(float), atol=1e-14)


def test_littmann_kernels_are_biorthogonal():
    family = mult.power_family(mult.derivative(), 3)
    assert verify_biorthogonality(family, littmann_kernels(3), 3) < 1e-8


def test_littmann_index_check():
    with pytest.raises(InvalidArgumentError):
        littmann_kernel(2, 3)


def test_shifted_kernels_interpolate():
    nodes = (0.0, 0.7, 1.9)
    kset = shifted_kernels(3, nodes)
    j = np.arange(-3, 4)
    for n in (1, 2, 3):
        for m in (1, 2, 3):
            target = ((j == 0) & (n == m)).astype(float)
            np.testing.assert_allclose(kset.evaluate(n, 3 * j + nodes[m - 1]), target, atol=1e-12)


def test_colliding_nodes_have_no_kernel():
    with pytest.raises(InvalidNodesError) as info:
        shifted_kernel(2, (0.0, 2.0), 1)
    assert info.value.case == "collision"
    assert isinstance(info.value, NoFormulaError)


def test_twonode_parity_exclusion():
    with pytest.raises(NoFormulaError) as info:
        twonode_kernels(1, 1.0, 0.0)
    assert info.value.case == "parity"
    twonode_kernels(2, 1.0, 0.0)


def test_twonode_first_kernel_values():
    g, _ = twonode_kernels(1, 0.0, 0.0)
    np.testing.assert_allclose(g(np.array([0.0, -2.0, 2.0])), [1.0, 0.0, 0.0], atol=1e-8)


@pytest.mark.parametrize(
    "params, expected",
    [
        ((0.3, 1.0, 0.0), 1),
        ((2.0, 1.0, 0.0), 1),
        ((1.0, 0.0, 0.0), 2),
        ((1.5, 0.0, 0.0), 3),
        ((0.5, 0.0, 0.0), None),
        ((1.5, 0.5, 0.0), None),
    ],
)
def test_diffquot_cases(params, expected):
    assert diffquot_case(*params) == expected


def test_diffquot_degenerate_parameters_raise():
    with pytest.raises(NoFormulaError) as info:
        diffquot_kernels(1.0, 0.0, 0.0)
    assert info.value.case == "case 2"
    with pytest.raises(InvalidArgumentError):
        diffquot_kernels(0.0, 0.0, 0.0)


def test_dynamical_last_kernel_for_derivatives():
    g = dynamical_last_kernel(mult.derivative(), 2)
    xi = np.array([-0.4, -0.1, 0.2, 0.45])
    np.testing.assert_allclose(g.spectrum(xi), littmann_spectrum(2, 2, xi), atol=1e-12)
    x = np.linspace(-4.0, 4.0, 17)
    np.testing.assert_allclose(g(x), x * sinc(x / 2) ** 2, atol=1e-8)


def test_closed_form_from_family(vaaler_family, shannon_family, shifted3_family):
    assert closed_form_kernels("littmann", vaaler_family).N == 2
    assert closed_form_kernels("sinc", shannon_family).N == 1
    kset = closed_form_kernels("shifted", shifted3_family)
    assert kset.evaluate(2, np.array([0.7]))[0] == pytest.approx(1.0)
    pair = closed_form_kernels("twonode", twonode_family(1, 0.0, 0.0))
    assert pair.N == 2
    dynamical = closed_form_kernels("dynamical", load_family(family_path("dynamical_shift.json")))
    assert dynamical.N == 3


def test_closed_form_mismatch(vaaler_family, shifted3_family):
    with pytest.raises(FamilyMismatchError):
        closed_form_kernels("shifted", vaaler_family)
    with pytest.raises(FamilyMismatchError):
        closed_form_kernels("littmann", shifted3_family)
    with pytest.raises(FamilyMismatchError):
        closed_form_kernels("sinc", vaaler_family)
    with pytest.raises(InvalidArgumentError):
        closed_form_kernels("hermite", vaaler_family)
