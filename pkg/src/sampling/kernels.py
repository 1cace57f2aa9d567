"""
Reconstruction kernels g_n and their spectra.

Spectra are piecewise smooth on the band with breakpoints at -1/2 + j/N, so
every Fourier integral here is taken piece by piece. Kernel sets are either
synthesized by inverting M_T(x) on a source grid chosen so that the resulting
spectral samples sit on Gauss-Legendre nodes of each piece, or built from the
explicit formulas in `closed_forms`.
"""

import logging
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

from src.sampling.criterion import TOL_DET, interval, matrix_field
from src.sampling.errors import (
    FamilyMismatchError,
    InvalidArgumentError,
    KernelAccuracyWarning,
    NoFormulaError,
    SynthesisError,
)
from src.sampling.multiplier import TOL_ROOT, MultiplierSpec, OperatorFamily, eval_multiplier
from src.utils.quadrature import (
    DEFAULT_ORDER,
    DEFAULT_PERIODS_PER_PANEL,
    fourier_integral,
    oscillation_error_estimate,
    panel_count,
    panel_rule,
)

logger = logging.getLogger(__name__)

TOL_INV = 1e-9
J_DYN = 64
ACCURACY_TOLERANCE = 1e-8

SpectrumOracle = Callable[[int, np.ndarray], np.ndarray]


def breakpoints(N: int) -> np.ndarray:
    """-1/2 + j/N for j = 0..N"""
    return -0.5 + np.arange(N + 1) / N


def piece_of(xi: np.ndarray, N: int) -> np.ndarray:
    """0-based index of the piece (-1/2 + j/N, -1/2 + (j+1)/N) containing xi"""
    return np.clip(np.floor((np.asarray(xi) + 0.5) * N).astype(int), 0, N - 1)


class KernelSet(ABC):
    """N kernels g_1..g_N described through their spectra"""

    N: int
    label: str

    @abstractmethod
    def spectrum(self, n: int, xi) -> np.ndarray:
        """g_n^(xi), zero outside the band"""

    def _check_index(self, n: int):
        if not 1 <= n <= self.N:
            raise InvalidArgumentError(f"kernel index {n} outside 1..{self.N}")

    def apply(
        self,
        spec: Optional[MultiplierSpec],
        n: int,
        x,
        order: int = DEFAULT_ORDER,
        periods_per_panel: float = DEFAULT_PERIODS_PER_PANEL,
    ) -> np.ndarray:
        """T(g_n)(x) = integral of g_n^ K e^{2 pi i x xi}; spec None means the identity"""
        self._check_index(n)
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        if spec is None:
            func = lambda xi: self.spectrum(n, xi)
        else:
            func = lambda xi: self.spectrum(n, xi) * eval_multiplier(spec, xi)
        edges = breakpoints(self.N)
        total = np.zeros(x_arr.shape, dtype=complex)
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += fourier_integral(func, lo, hi, x_arr, order=order, periods_per_panel=periods_per_panel)
        return total

    def evaluate(self, n: int, x) -> np.ndarray:
        """g_n(x) for an array of points"""
        return self.apply(None, n, x)


@dataclass(frozen=True, eq=False)
class SpectralKernelSet(KernelSet):
    """
    Spectral samples values[n-1, j, k] = g_n^(nodes[j, k]) on Gauss-Legendre
    panels of each piece j. source_grid[k] is the point x with
    nodes[j, k] = (j - x)/N for every piece.
    """

    N: int
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    source_grid: np.ndarray
    panels: int = 1
    oracle: Optional[SpectrumOracle] = field(default=None, repr=False)
    label: str = ""
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def breakpoints(self) -> np.ndarray:
        return breakpoints(self.N)

    @property
    def nodes_per_piece(self) -> int:
        return self.nodes.shape[1]

    def spectrum(self, n: int, xi) -> np.ndarray:
        self._check_index(n)
        if self.oracle is None:
            raise InvalidArgumentError("this kernel set only knows its spectrum at its quadrature nodes")
        return self.oracle(n, np.asarray(xi, dtype=float))

    def apply(
        self,
        spec: Optional[MultiplierSpec],
        n: int,
        x,
        order: int = DEFAULT_ORDER,
        periods_per_panel: float = DEFAULT_PERIODS_PER_PANEL,
    ) -> np.ndarray:
        self._check_index(n)
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        # Points resolved by the stored panels use the stored samples directly
        resolved = panel_count(x_arr, 1.0 / self.N, periods_per_panel) <= self.panels
        out = np.empty(x_arr.shape, dtype=complex)

        if np.any(resolved):
            spectral = self.values[n - 1]
            if spec is not None:
                spectral = spectral * eval_multiplier(spec, self.nodes)
            phase = np.exp(2j * np.pi * np.multiply.outer(x_arr[resolved], self.nodes))
            out[resolved] = np.sum(phase * (spectral * self.weights), axis=(1, 2))

        if np.any(~resolved):
            rest = x_arr[~resolved]
            if self.oracle is not None:
                out[~resolved] = super().apply(spec, n, rest, order, periods_per_panel)
            else:
                phase = np.exp(2j * np.pi * np.multiply.outer(rest, self.nodes))
                spectral = self.values[n - 1]
                if spec is not None:
                    spectral = spectral * eval_multiplier(spec, self.nodes)
                out[~resolved] = np.sum(phase * (spectral * self.weights), axis=(1, 2))
                worst = float(np.max(np.abs(rest)))
                estimate = oscillation_error_estimate(
                    worst, 1.0 / (self.N * self.panels), self.nodes_per_piece // self.panels,
                    float(np.max(np.abs(self.values[n - 1]))),
                )
                if estimate > ACCURACY_TOLERANCE:
                    message = f"kernel quadrature under-resolved at |x|={worst:.4g}, estimated error {estimate:.2e}"
                    logger.warning(message)
                    warnings.warn(message, KernelAccuracyWarning, stacklevel=2)
        return out


def _source_rule(N: int, nodes_per_piece: int, panels: int = 1):
    """Source points x_k and the weights of the nodes (j - x_k)/N they produce"""
    first_nodes, first_weights = panel_rule(-0.5, -0.5 + 1.0 / N, panels, nodes_per_piece)
    source = -N * first_nodes
    nodes = (np.arange(N)[:, None] - source[None, :]) / N
    weights = np.tile(first_weights, (N, 1))
    return source, nodes, weights


def _inverse_oracle(family: OperatorFamily) -> SpectrumOracle:
    N = family.N
    lower, upper = interval(N)

    def oracle(n: int, xi: np.ndarray) -> np.ndarray:
        flat = np.atleast_1d(xi).ravel()
        piece = piece_of(flat, N)
        x = np.clip(piece - N * flat, lower, upper)
        try:
            inverses = np.linalg.inv(matrix_field(family, x, allow_boundary=True))
        except np.linalg.LinAlgError as e:
            raise SynthesisError(f"M_T is singular while evaluating the spectrum: {e}") from e
        out = inverses[np.arange(flat.size), n - 1, piece]
        out = np.where(np.abs(flat) <= 0.5, out, 0.0)
        return out.reshape(np.shape(xi))

    return oracle


def synthesize_spectral(
    family: OperatorFamily,
    grid_per_piece: int = DEFAULT_ORDER,
    tol_inv: float = TOL_INV,
    tol_det: float = TOL_DET,
) -> SpectralKernelSet:
    """
    Spectra of the kernels from the inverse of M_T: at each source point x,
    entry (n, j) of M_T(x)^-1 is g_n^((j-1-x)/N).
    """
    N = family.N
    if not np.isclose(family.rho, N):
        raise InvalidArgumentError(f"synthesis needs rho = N, family has rho={family.rho}")

    source, nodes, weights = _source_rule(N, grid_per_piece)
    matrices = matrix_field(family, source)
    dets = np.linalg.det(matrices)
    with np.errstate(all="ignore"):
        conds = np.array([np.linalg.cond(m, p=1) if abs(d) >= tol_det else np.inf for m, d in zip(matrices, dets)])
    bad = np.flatnonzero(~(conds <= 1.0 / tol_det))
    if bad.size:
        i = bad[0]
        raise SynthesisError(f"M_T is singular or ill-conditioned (|det|={abs(dets[i]):.3e}, cond={conds[i]:.3e})", x=source[i])

    inverses = np.linalg.inv(matrices)
    eye = np.eye(N)
    left = np.max(np.abs(inverses @ matrices - eye), axis=(1, 2))
    right = np.max(np.abs(matrices @ inverses - eye), axis=(1, 2))
    residual = np.maximum(left, right)
    if residual.max() > tol_inv:
        i = int(np.argmax(residual))
        raise SynthesisError(f"inverse residual {residual[i]:.3e} exceeds tol_inv={tol_inv:g}", x=source[i])

    kset = SpectralKernelSet(
        N=N,
        nodes=nodes,
        weights=weights,
        values=np.transpose(inverses, (1, 2, 0)),
        source_grid=source,
        oracle=_inverse_oracle(family),
        label=family.name or "synthesized",
        diagnostics={"inverse_residual": float(residual.max())},
    )
    logger.info(f"Synthesized {N} kernel spectra on {grid_per_piece} nodes per piece (residual {residual.max():.2e})")
    return kset


def eval_kernel(kset: KernelSet, n: int, x):
    """g_n(x) by piecewise Gauss-Legendre quadrature of the spectrum"""
    values = kset.evaluate(n, x)
    return values if np.ndim(x) else complex(values[0])


def kernel_values(kset: KernelSet, x) -> np.ndarray:
    """All kernels on a grid, shape (N, len(x))"""
    return np.vstack([np.atleast_1d(kset.evaluate(n, x)) for n in range(1, kset.N + 1)])


def inverse_residual(kset: SpectralKernelSet, family: OperatorFamily) -> float:
    """max |G(x) M_T(x) - I| and |M_T(x) G(x) - I| over the source grid, G[n, j] = g_n^((j-1-x)/N)"""
    matrices = matrix_field(family, kset.source_grid)
    G = np.transpose(kset.values, (2, 0, 1))
    eye = np.eye(kset.N)
    return float(max(np.max(np.abs(G @ matrices - eye)), np.max(np.abs(matrices @ G - eye))))


def verify_biorthogonality(family: OperatorFamily, kernels: KernelSet, j_range: int, **quad) -> float:
    """max over n, m, |j| <= j_range of |T_m(g_n)(Nj) - delta_{nm} delta_{j0}|"""
    if kernels.N != family.N:
        raise FamilyMismatchError(f"family has N={family.N} but kernels were built for N={kernels.N}")
    N = family.N
    j = np.arange(-j_range, j_range + 1)
    worst = 0.0
    for n in range(1, N + 1):
        for m, member in enumerate(family.members, start=1):
            values = kernels.apply(member, n, N * j, **quad)
            target = ((j == 0) & (n == m)).astype(float)
            worst = max(worst, float(np.max(np.abs(values - target))))
    logger.info(f"Biorthogonality residual for {kernels.label or 'kernels'}: {worst:.3e}")
    return worst


# ---------------------------------------------------------------------------
# Dynamical sampling: T_n = T^(n-1)


def check_injective(base: MultiplierSpec, N: int, grid_size: int = 2048, tol_root: float = TOL_ROOT):
    """K must take N distinct values on every coset xi + (1/N) Z inside the band"""
    if N == 1:
        return
    xi = np.linspace(-0.5, -0.5 + 1.0 / N, grid_size)
    values = np.asarray(eval_multiplier(base, xi[:, None] + np.arange(N)[None, :] / N))
    gaps = np.abs(values[:, :, None] - values[:, None, :])
    gaps[:, np.arange(N), np.arange(N)] = np.inf
    smallest = float(gaps.min())
    if smallest < tol_root:
        raise NoFormulaError(
            f"multiplier is not injective on cosets of (1/N)Z (min gap {smallest:.2e})", case="not injective"
        )


def _dynamical_inverse(
    base: MultiplierSpec,
    N: int,
    x: np.ndarray,
    correction: Optional[Callable[[int, np.ndarray, np.ndarray], np.ndarray]] = None,
) -> np.ndarray:
    """
    G[k, n-1, j] = g_n^((j-x_k)/N) for the power family of `base`.

    The last row is N / prod_{j != m}(K(xi_m) - K(xi_j)); the others follow
    from g_{n-1}^ = K g_n^ - c_n g_N^ with c_n constant on each coset. By
    default c_n = (1/N) sum_m g_n^(xi_m) K(xi_m)^N (periodization); a
    `correction(n, x, G_n)` callable may supply it instead.
    """
    xi = (np.arange(N)[None, :] - x[:, None]) / N
    z = np.atleast_2d(np.asarray(eval_multiplier(base, xi)))
    diff = z[:, :, None] - z[:, None, :]
    diff[:, np.arange(N), np.arange(N)] = 1.0
    G = np.empty((x.size, N, N), dtype=complex)
    G[:, N - 1, :] = N / np.prod(diff, axis=2)
    zN = z ** N
    for n in range(N, 1, -1):
        current = G[:, n - 1, :]
        if correction is None:
            c = np.sum(current * zN, axis=1) / N
        else:
            c = correction(n, x, current)
        G[:, n - 2, :] = z * current - c[:, None] * G[:, N - 1, :]
    return G


def _dynamical_oracle(base: MultiplierSpec, N: int, correction=None) -> SpectrumOracle:
    lower, upper = interval(N)

    def oracle(n: int, xi: np.ndarray) -> np.ndarray:
        flat = np.atleast_1d(xi).ravel()
        piece = piece_of(flat, N)
        x = np.clip(piece - N * flat, lower, upper)
        out = _dynamical_inverse(base, N, x, correction)[np.arange(flat.size), n - 1, piece]
        out = np.where(np.abs(flat) <= 0.5, out, 0.0)
        return out.reshape(np.shape(xi))

    return oracle


def dynamical_kernels(
    base: MultiplierSpec,
    N: int,
    grid_per_piece: int = DEFAULT_ORDER,
    method: str = "periodized",
    j_dyn: int = J_DYN,
    tol_root: float = TOL_ROOT,
    periods_per_panel: float = DEFAULT_PERIODS_PER_PANEL,
) -> SpectralKernelSet:
    """
    Kernels of the family (I, T, ..., T^(N-1)) from the explicit last kernel
    and the downward recursion.

    method "periodized" evaluates the correction sum_j T^N(g_n)(Nj) e^{-2 pi i N j xi}
    exactly through Poisson summation; "series" truncates it at |j| <= j_dyn
    with samples obtained by quadrature and reports the last-ring magnitude
    in diagnostics["tail"].
    """
    if N < 1:
        raise InvalidArgumentError(f"N must be positive, got {N}")
    if method not in ("periodized", "series"):
        raise InvalidArgumentError(f"unknown method {method!r}")
    check_injective(base, N, tol_root=tol_root)

    if method == "periodized":
        source, nodes, weights = _source_rule(N, grid_per_piece)
        G = _dynamical_inverse(base, N, source)
        kset = SpectralKernelSet(
            N=N,
            nodes=nodes,
            weights=weights,
            values=np.transpose(G, (1, 2, 0)),
            source_grid=source,
            oracle=_dynamical_oracle(base, N),
            label="dynamical",
        )
        logger.info(f"Dynamical kernels built for N={N} (periodized correction)")
        return kset

    # Truncated series: samples T^N(g_n)(Nj) need the j-th harmonic resolved on every piece
    panels = max(1, int(np.ceil(j_dyn / periods_per_panel)))
    source, nodes, weights = _source_rule(N, grid_per_piece, panels)
    zN = np.asarray(eval_multiplier(base, nodes)).T ** N
    harmonics = np.arange(-j_dyn, j_dyn + 1)
    phase = np.exp(2j * np.pi * N * np.multiply.outer(harmonics, nodes.T))
    samples: Dict[int, np.ndarray] = {}

    def correction(n, x, current):
        if n not in samples:
            samples[n] = np.sum(phase * (current * zN * weights.T), axis=(1, 2))
        return np.exp(2j * np.pi * np.outer(x, harmonics)) @ samples[n]

    G = _dynamical_inverse(base, N, source, correction)
    tail = max((abs(s[0]) + abs(s[-1]) for s in samples.values()), default=0.0)
    logger.warning(f"Dynamical correction truncated at |j| <= {j_dyn}; last-ring magnitude {tail:.3e}")

    def fixed_correction(n, x, current):
        return np.exp(2j * np.pi * np.outer(x, harmonics)) @ samples[n]

    return SpectralKernelSet(
        N=N,
        nodes=nodes,
        weights=weights,
        values=np.transpose(G, (1, 2, 0)),
        source_grid=source,
        panels=panels,
        oracle=_dynamical_oracle(base, N, fixed_correction),
        label="dynamical-series",
        diagnostics={"tail": float(tail), "j_dyn": j_dyn},
    )
