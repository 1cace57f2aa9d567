"""Reconstruction from generalized samples and empirical frame-bound diagnostics."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.integrate import trapezoid

from src.sampling.errors import FamilyMismatchError, InvalidArgumentError
from src.sampling.kernels import KernelSet
from src.sampling.multiplier import OperatorFamily
from src.sampling.signals import BandlimitedSignal, SampleSet, l2_norm_sq, sample_family, sinc_signal

logger = logging.getLogger(__name__)

TAIL_FACTOR = 10.0
DEFAULT_PROBES = 10
FAILURE_FACTOR = 10.0


@dataclass(frozen=True)
class ReconstructionResult:
    """Truncated reconstruction and its heuristic truncation-tail magnitude"""

    value: np.ndarray
    tail: np.ndarray


class FrameReport(BaseModel):
    ratio: float
    tail_fraction: float
    M: int
    energy: float
    norm_sq: float


class ResidualNorms(BaseModel):
    sup_err: float
    l2_err: float


class ReconstructionSummary(BaseModel):
    """What cmd_reconstruct reports for one run"""

    sup_err: float
    l2_err: float
    frame_ratio: float
    tail_fraction: float
    probe_ratio_min: float
    probe_ratio_max: float
    max_tail: float
    M: int
    N: int
    grid_points: int


def _ring_terms(samples: SampleSet, kernels: KernelSet, x: np.ndarray) -> np.ndarray:
    """terms[i, n-1, m+M] = data[n, m] g_n(x_i - N m)"""
    N = kernels.N
    shifts = N * samples.m_values
    points = (x[:, None] - shifts[None, :]).ravel()
    terms = np.empty((x.size, N, shifts.size), dtype=complex)
    for n in range(1, N + 1):
        values = np.asarray(kernels.evaluate(n, points)).reshape(x.size, shifts.size)
        terms[:, n - 1, :] = values * samples.data[n - 1][None, :]
    return terms


def reconstruct(samples: SampleSet, kernels: KernelSet, x) -> ReconstructionResult:
    """
    f(x) ~ sum_n sum_{|m| <= M} T_n(f)(Nm) g_n(x - Nm). The tail estimate is
    the magnitude of the outermost ring |m| = M times a fixed factor of 10.
    """
    if samples.N != kernels.N:
        raise FamilyMismatchError(f"samples have N={samples.N} but kernels have N={kernels.N}")
    if not np.isclose(samples.rho, samples.N):
        raise InvalidArgumentError(f"reconstruction needs samples on NZ, got rho={samples.rho}")

    x_arr = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x_arr).ravel()
    terms = _ring_terms(samples, kernels, flat)
    value = terms.sum(axis=(1, 2))
    ring = np.abs(terms[:, :, 0]).sum(axis=1)
    if samples.M > 0:
        ring = ring + np.abs(terms[:, :, -1]).sum(axis=1)
    tail = TAIL_FACTOR * ring
    return ReconstructionResult(value=value.reshape(x_arr.shape), tail=tail.reshape(x_arr.shape))


def frame_ratio(family: OperatorFamily, f: BandlimitedSignal, M: int, samples: Optional[SampleSet] = None) -> FrameReport:
    """
    sum_{n, |m| <= M} |T_n(f)(rho m)|^2 / ||f||^2. tail_fraction estimates the
    share of sample energy beyond the window from the outermost ring,
    assuming samples decay like 1/|m|.
    """
    norm_sq = l2_norm_sq(f)
    if norm_sq <= 1e-300:
        raise InvalidArgumentError("frame ratio is undefined for the zero signal")
    samples = sample_family(family, f, M) if samples is None else samples

    energy = samples.energy
    ring = float(np.sum(np.abs(samples.data[:, [0, -1]]) ** 2)) if M > 0 else 0.0
    tail_fraction = M * ring / energy if energy > 0 else 0.0
    if tail_fraction > 0.1:
        logger.warning(f"Frame ratio tail fraction {tail_fraction:.3f} exceeds 10%; increase M (currently {M})")
    return FrameReport(ratio=energy / norm_sq, tail_fraction=tail_fraction, M=M, energy=energy, norm_sq=norm_sq)


def probe_signals(N: int, count: int = DEFAULT_PROBES) -> List[BandlimitedSignal]:
    """sinc(. - t_k) with t_k = k N / count, covering one period of the sample grid"""
    if count < 1:
        raise InvalidArgumentError(f"probe count must be positive, got {count}")
    return [sinc_signal(center=k * N / count) for k in range(count)]


def frame_ratio_range(
    family: OperatorFamily, M: int, probes: Optional[Sequence[BandlimitedSignal]] = None
) -> Tuple[float, float, List[float]]:
    """(r_min, r_max, ratios) of frame_ratio over a probe set"""
    probes = probe_signals(family.N) if probes is None else probes
    ratios = [frame_ratio(family, f, M).ratio for f in probes]
    return min(ratios), max(ratios), ratios


def detect_frame_failure(
    family: OperatorFamily,
    references: Sequence[OperatorFamily],
    M: int,
    probes: Optional[Sequence[BandlimitedSignal]] = None,
    factor: float = FAILURE_FACTOR,
) -> bool:
    """
    True when the family's smallest probe ratio is more than `factor` times
    below the smallest probe ratio of every reference family.
    """
    if not references:
        raise InvalidArgumentError("at least one reference family is needed")
    r_min, _, _ = frame_ratio_range(family, M, probes)
    reference_minima = [frame_ratio_range(ref, M, probes)[0] for ref in references]
    failed = all(r_min * factor < ref_min for ref_min in reference_minima)
    logger.info(
        f"Probe minimum {r_min:.3e} vs reference minima {[f'{r:.3e}' for r in reference_minima]}: "
        f"{'frame failure' if failed else 'no failure detected'}"
    )
    return failed


def residual_norms(
    f: BandlimitedSignal, samples: SampleSet, kernels: KernelSet, grid: Sequence[float]
) -> ResidualNorms:
    """Sup and trapezoid-rule L2 norms of f - reconstruct(f) on the grid"""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise InvalidArgumentError("residual grid is empty")
    error = np.abs(f(grid) - reconstruct(samples, kernels, grid).value)
    l2 = float(np.sqrt(trapezoid(error ** 2, grid))) if grid.size > 1 else 0.0
    return ResidualNorms(sup_err=float(np.max(error)), l2_err=l2)
