"""Gauss-Legendre panel rules for band-limited Fourier integrals."""

from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.special import roots_legendre

DEFAULT_ORDER = 64
DEFAULT_PERIODS_PER_PANEL = 4.0


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the `order`-point rule on [-1, 1]"""
    nodes, weights = roots_legendre(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_rule(a: float, b: float, panels: int = 1, order: int = DEFAULT_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [a, b] with equal panels"""
    t, w = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def panel_count(x: np.ndarray, width: float, periods_per_panel: float = DEFAULT_PERIODS_PER_PANEL) -> np.ndarray:
    """Panels needed so no panel spans more than `periods_per_panel` periods of exp(2 pi i x xi)"""
    x = np.abs(np.asarray(x, dtype=float))
    return np.maximum(1, np.ceil(x * width / periods_per_panel)).astype(int)


def fourier_integral(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    x: np.ndarray,
    order: int = DEFAULT_ORDER,
    periods_per_panel: float = DEFAULT_PERIODS_PER_PANEL,
) -> np.ndarray:
    """
    Integral of func(xi) * exp(2 pi i x xi) over [a, b] for every x.

    Points sharing a panel count are evaluated together; `func` is called
    once per distinct panel count.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.shape, dtype=complex)
    counts = panel_count(x, b - a, periods_per_panel)
    for panels in np.unique(counts):
        mask = counts == panels
        nodes, weights = panel_rule(a, b, int(panels), order)
        values = np.asarray(func(nodes), dtype=complex) * weights
        out[mask] = np.exp(2j * np.pi * np.outer(x[mask], nodes)) @ values
    return out


def oscillation_error_estimate(x: float, width: float, order: int, scale: float) -> float:
    """
    Heuristic error of a single-panel rule for exp(2 pi i x xi) on a panel of
    the given width: scale * (e * theta / (4 * order)) ** (2 * order) with
    theta the phase range, capped at scale.
    """
    theta = 2.0 * np.pi * abs(x) * width
    ratio = np.e * theta / (4.0 * order)
    if ratio >= 1.0:
        return float(scale)
    return float(scale * ratio ** (2 * order))
