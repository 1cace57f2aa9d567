import numpy as np
import pytest

from src.sampling import multiplier as mult
from src.sampling.errors import InvalidArgumentError
from src.sampling.multiplier import OperatorFamily
from src.sampling.signals import (
    BandlimitedSignal,
    SampleSet,
    apply_operator,
    combination,
    l2_norm_sq,
    sample_family,
    sinc_signal,
)
from src.utils.special import sinc, sinc_derivative


def test_signal_evaluation_and_spectrum():
    f = combination([2.0, -1j], [0.0, 0.5])
    assert f(0.0) == pytest.approx(2.0 - 1j * 2 / np.pi)
    xi = np.array([-0.3, 0.1, 0.7])
    expected = 2.0 - 1j * np.exp(-1j * np.pi * xi)
    expected[2] = 0.0
    np.testing.assert_allclose(f.spectrum(xi), expected, atol=1e-15)


def test_signal_algebra():
    f = sinc_signal(0.0)
    g = f.translate(1.5).scale(2.0) + f
    assert g(1.5) == pytest.approx(2.0 + sinc(1.5))
    with pytest.raises(InvalidArgumentError):
        BandlimitedSignal(())


def test_apply_operator_examples(sinc_at_zero):
    assert apply_operator(mult.identity(), sinc_at_zero, 0.0) == pytest.approx(1.0)
    assert apply_operator(mult.derivative(), sinc_at_zero, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert apply_operator(mult.shift(0.5), sinc_at_zero, 0.25).real == pytest.approx(0.300105, abs=1e-6)


@pytest.mark.parametrize(
    "spec",
    [mult.shift(0.5), mult.derivative(1, 0.3), mult.derivative(2), mult.power(mult.derivative(), 2)],
)
def test_closed_form_and_quadrature_agree(spec, three_term_signal):
    x = np.linspace(-25.0, 25.0, 41)
    closed = apply_operator(spec, three_term_signal, x, method="closed")
    quadrature = apply_operator(spec, three_term_signal, x, method="quadrature")
    np.testing.assert_allclose(closed, quadrature, atol=1e-10)


def test_closed_method_needs_a_closed_form(sinc_at_zero):
    with pytest.raises(InvalidArgumentError):
        apply_operator(mult.diffquot(0.5), sinc_at_zero, 0.0, method="closed")
    with pytest.raises(InvalidArgumentError):
        apply_operator(mult.identity(), sinc_at_zero, 0.0, method="spline")


def test_linearity(three_term_signal):
    g = sinc_signal(0.8, 1j)
    spec = mult.diffquot(0.3, 0.1)
    x = np.array([-1.2, 0.0, 2.5])
    combined = apply_operator(spec, three_term_signal.scale(2.0) + g.scale(-0.5), x)
    separate = 2.0 * apply_operator(spec, three_term_signal, x) - 0.5 * apply_operator(spec, g, x)
    np.testing.assert_allclose(combined, separate, atol=1e-14)


def test_sample_family_shannon(shannon_family, sinc_at_zero):
    samples = sample_family(shannon_family, sinc_at_zero, 3)
    np.testing.assert_allclose(samples.data[0], [0, 0, 0, 1, 0, 0, 0], atol=1e-15)


def test_sample_family_vaaler(vaaler_family):
    f = sinc_signal(1.0)
    samples = sample_family(vaaler_family, f, 2)
    m = np.arange(-2, 3)
    np.testing.assert_allclose(samples.data[0], sinc(2 * m - 1.0), atol=1e-15)
    np.testing.assert_allclose(samples.data[1], sinc_derivative(2 * m - 1.0, 1), atol=1e-15)


def test_sample_family_shifted(sinc_at_zero):
    family = OperatorFamily(members=(mult.shift(0.0), mult.shift(1.0)))
    samples = sample_family(family, sinc_at_zero, 1)
    m = np.arange(-1, 2)
    np.testing.assert_allclose(samples.data[1], sinc(2 * m + 1.0), atol=1e-15)


def test_sample_set_shape_is_checked():
    with pytest.raises(InvalidArgumentError):
        SampleSet(N=2, M=1, rho=2.0, data=np.zeros((2, 4)))
    with pytest.raises(InvalidArgumentError):
        sample_family(OperatorFamily(members=(mult.identity(),)), sinc_signal(), -1)


def test_l2_norm_sq():
    assert l2_norm_sq(sinc_signal()) == pytest.approx(1.0)
    assert l2_norm_sq(combination([1, 1], [0, 1])) == pytest.approx(2.0)
    assert l2_norm_sq(combination([1, 1], [0, 0.5])) == pytest.approx(2 + 4 / np.pi)
    assert l2_norm_sq(combination([1, 1], [0, 0.5])) == pytest.approx(3.27324, abs=1e-5)


def test_plancherel_against_integer_samples(three_term_signal):
    m = np.arange(-4000, 4001)
    assert np.sum(np.abs(three_term_signal(m)) ** 2) == pytest.approx(l2_norm_sq(three_term_signal), rel=1e-4)
