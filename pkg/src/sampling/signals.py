"""PW_pi test signals, multiplier operators applied to them, and generalized samples."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.sampling.errors import InvalidArgumentError
from src.sampling.multiplier import MultiplierSpec, OperatorFamily, eval_multiplier
from src.utils.quadrature import DEFAULT_ORDER, DEFAULT_PERIODS_PER_PANEL, fourier_integral
from src.utils.special import sinc, sinc_derivative

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BandlimitedSignal:
    """f(x) = sum_k c_k sinc(x - x_k), a finite combination of sinc translates"""

    terms: Tuple[Tuple[complex, float], ...]

    def __post_init__(self):
        terms = tuple((complex(c), float(x0)) for c, x0 in self.terms)
        if not terms:
            raise InvalidArgumentError("a signal needs at least one term")
        object.__setattr__(self, "terms", terms)

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=complex)

    @property
    def centers(self) -> np.ndarray:
        return np.array([x0 for _, x0 in self.terms], dtype=float)

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        values = sinc(x_arr[..., None] - self.centers) @ self.coeffs
        return values if np.ndim(values) else complex(values)

    def spectrum(self, xi):
        """Fourier transform: sum_k c_k exp(-2 pi i x_k xi) on the band, zero outside"""
        xi_arr = np.asarray(xi, dtype=float)
        values = np.exp(-2j * np.pi * xi_arr[..., None] * self.centers) @ self.coeffs
        values = np.where(np.abs(xi_arr) <= 0.5, values, 0.0)
        return values if np.ndim(values) else complex(values)

    def translate(self, t: float) -> "BandlimitedSignal":
        """f(. - t)"""
        return BandlimitedSignal(tuple((c, x0 + t) for c, x0 in self.terms))

    def scale(self, alpha: complex) -> "BandlimitedSignal":
        return BandlimitedSignal(tuple((alpha * c, x0) for c, x0 in self.terms))

    def __add__(self, other: "BandlimitedSignal") -> "BandlimitedSignal":
        return BandlimitedSignal(self.terms + other.terms)


def sinc_signal(center: float = 0.0, coeff: complex = 1.0) -> BandlimitedSignal:
    """c * sinc(. - center)"""
    return BandlimitedSignal(((coeff, center),))


def combination(coeffs: Sequence[complex], centers: Sequence[float]) -> BandlimitedSignal:
    if len(coeffs) != len(centers):
        raise InvalidArgumentError("coefficient and center lists differ in length")
    return BandlimitedSignal(tuple(zip(coeffs, centers)))


@dataclass(frozen=True)
class SampleSet:
    """data[n - 1, m + M] = T_n(f)(rho m) for |m| <= M"""

    N: int
    M: int
    rho: float
    data: np.ndarray

    def __post_init__(self):
        if self.data.shape != (self.N, 2 * self.M + 1):
            raise InvalidArgumentError(
                f"sample data has shape {self.data.shape}, expected {(self.N, 2 * self.M + 1)}"
            )

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    @property
    def energy(self) -> float:
        """sum over n and m of |T_n(f)(rho m)|^2"""
        return float(np.sum(np.abs(self.data) ** 2))


def _closed_form_order(spec: MultiplierSpec) -> Optional[int]:
    """Derivative order of a pure scaled derivative/translation symbol, if sinc derivatives cover it"""
    if spec.is_tabulated or spec.sinc_factors:
        return None
    coeffs = spec.poly_coeffs
    if any(c != 0 for c in coeffs[:-1]):
        return None
    order = spec.degree
    return order if order <= 2 else None


def apply_operator(
    spec: MultiplierSpec,
    f: BandlimitedSignal,
    x,
    method: str = "auto",
    order: int = DEFAULT_ORDER,
    periods_per_panel: float = DEFAULT_PERIODS_PER_PANEL,
):
    """
    T(f)(x) = integral over the band of f^(xi) K(xi) exp(2 pi i x xi).

    Pure translations and derivatives of order at most 2 are evaluated
    through analytic sinc derivatives (method "auto" or "closed"); everything
    else goes through Gauss-Legendre quadrature (method "quadrature").
    """
    if method not in ("auto", "closed", "quadrature"):
        raise InvalidArgumentError(f"unknown method {method!r}")

    x_arr = np.asarray(x, dtype=float)
    u = x_arr.reshape(-1)[:, None] - f.centers[None, :]
    deriv = _closed_form_order(spec)

    if method == "closed" and deriv is None:
        raise InvalidArgumentError("no closed form for this multiplier")

    if deriv is not None and method != "quadrature":
        scale = spec.poly_coeffs[-1] ** spec.power
        values = scale * sinc_derivative(u + spec.power * spec.shift, deriv)
    else:
        values = fourier_integral(
            lambda xi: eval_multiplier(spec, xi),
            -0.5,
            0.5,
            u.ravel(),
            order=order,
            periods_per_panel=periods_per_panel,
        ).reshape(u.shape)

    out = (np.asarray(values, dtype=complex) @ f.coeffs).reshape(x_arr.shape)
    return out if out.ndim else complex(out)


def sample_family(family: OperatorFamily, f: BandlimitedSignal, M: int, **quad) -> SampleSet:
    """Generalized samples T_n(f)(rho m), n = 1..N, |m| <= M"""
    if M < 0:
        raise InvalidArgumentError(f"M must be nonnegative, got {M}")
    points = family.rho * np.arange(-M, M + 1)
    data = np.vstack([apply_operator(member, f, points, **quad) for member in family.members])
    logger.debug(f"Sampled {family.N} operators at {points.size} points (rho={family.rho})")
    return SampleSet(N=family.N, M=M, rho=family.rho, data=data)


def l2_norm_sq(f: BandlimitedSignal) -> float:
    """Squared L2 norm from the sinc-translate Gram matrix sinc(x_j - x_k)"""
    c = f.coeffs
    gram = sinc(f.centers[:, None] - f.centers[None, :])
    value = float(np.real(c @ gram @ np.conj(c)))
    return max(value, 0.0)
