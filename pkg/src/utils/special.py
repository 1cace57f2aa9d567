"""Special functions: the cardinal sine, its derivatives and related series."""

from math import factorial
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as P

ArrayLike = Union[float, np.ndarray]

# Below this |argument| sinc is evaluated from its Taylor series.
SINC_SERIES_CUTOFF = 1e-4
# Derivatives lose digits to cancellation much earlier than sinc itself.
DERIVATIVE_SERIES_CUTOFF = 0.15
_SERIES_TERMS = 12


def _sinc_series_coeffs(terms: int = _SERIES_TERMS) -> np.ndarray:
    """Power series coefficients of sinc(u) = sin(pi u)/(pi u), lowest degree first"""
    coeffs = np.zeros(2 * terms + 1)
    for k in range(terms + 1):
        coeffs[2 * k] = (-1) ** k * np.pi ** (2 * k) / factorial(2 * k + 1)
    return coeffs


_SINC_COEFFS = _sinc_series_coeffs()


def sinc(u: ArrayLike) -> ArrayLike:
    """Normalized cardinal sine sin(pi u)/(pi u) with sinc(0) = 1"""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, u)
    out = np.where(small, P.polyval(u, _SINC_COEFFS[:5]), np.sin(np.pi * safe) / (np.pi * safe))
    return out if out.ndim else float(out)


def sinc_derivative(u: ArrayLike, order: int = 1) -> ArrayLike:
    """Derivative of sinc of the given order (0, 1 or 2)"""
    if order == 0:
        return sinc(u)
    if order not in (1, 2):
        raise ValueError(f"sinc derivatives are available up to order 2, got {order}")

    u = np.asarray(u, dtype=float)
    small = np.abs(u) < DERIVATIVE_SERIES_CUTOFF
    series = P.polyval(u, P.polyder(_SINC_COEFFS, order))

    safe = np.where(small, 1.0, u)
    s = np.sin(np.pi * safe) / (np.pi * safe)
    first = (np.cos(np.pi * safe) - s) / safe
    direct = first if order == 1 else -np.pi ** 2 * s - 2.0 * first / safe

    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def x_over_sin_taylor(power: int, degree: int) -> np.ndarray:
    """
    Taylor coefficients of (y / sin y)^power around y = 0 up to `degree`
    (lowest degree first).
    """
    terms = degree // 2 + 2
    sin_over_x = np.zeros(2 * terms + 1)
    for k in range(terms + 1):
        sin_over_x[2 * k] = (-1) ** k / factorial(2 * k + 1)

    base = P.polypow(sin_over_x, power)[: degree + 1]
    base = np.pad(base, (0, max(0, degree + 1 - len(base))))

    # Reciprocal of a power series with unit constant term
    inverse = np.zeros(degree + 1)
    inverse[0] = 1.0 / base[0]
    for n in range(1, degree + 1):
        inverse[n] = -np.dot(base[1 : n + 1], inverse[n - 1 :: -1][:n]) / base[0]
    return inverse
