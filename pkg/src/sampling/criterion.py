"""
Invertibility criterion for operator families.

Builds the matrix field M_T(x) (entries (1/N) K_n((m-1-x)/rho), row m,
column n) over the open interval ((N-2)/2, N/2), profiles its determinant on
an adaptive grid and classifies the family by the essential infimum and the
measure of the zero set of |det M_T|.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel
from scipy.optimize import least_squares

from src.sampling.errors import DomainError, InvalidArgumentError
from src.sampling.multiplier import MultiplierSpec, OperatorFamily, eval_multiplier
from src.sampling.signals import BandlimitedSignal, apply_operator

logger = logging.getLogger(__name__)

TOL_DET = 1e-10
DEFAULT_INITIAL_GRID = 4096
DEFAULT_REFINE_LEVELS = 3
POLISHED_MINIMA = 5


class Case(str, Enum):
    PositiveEssInf = "PositiveEssInf"
    NullZeroSet = "NullZeroSet"
    PositiveMeasureZeroSet = "PositiveMeasureZeroSet"

    @property
    def number(self) -> int:
        return {"PositiveEssInf": 1, "NullZeroSet": 2, "PositiveMeasureZeroSet": 3}[self.value]


class Verdict(str, Enum):
    yes = "yes"
    no = "no"
    unknown = "unknown"


class CriterionReport(BaseModel):
    """Outcome of the determinant criterion for one family"""

    essinf_estimate: float
    zero_fraction: float
    case: Case
    min_location: float
    N: int
    rho: float
    grid_size: int
    singular_points: int = 0
    tol_det: float = TOL_DET
    measure_threshold: float

    @property
    def exit_code(self) -> int:
        return 0 if self.case == Case.PositiveEssInf else self.case.number


class Theorem2Verdict(BaseModel):
    """Stable-sampling and interpolation-set verdicts for rho Z on PW with band delta"""

    stable_sampling: Verdict
    interpolation_set: Verdict
    case: Case
    N: int
    rho: float
    delta: float
    essinf_estimate: float

    @property
    def rho_delta(self) -> float:
        return self.rho * self.delta


@dataclass(frozen=True)
class MatrixField:
    """M_T(x) (or M^rho_T(x)) sampled on a sorted grid inside ((N-2)/2, N/2)"""

    N: int
    rho: float
    grid: np.ndarray
    matrices: np.ndarray
    dets: np.ndarray
    conds: np.ndarray
    weights: np.ndarray
    boundary_dets: Tuple[complex, complex]
    initial_grid: int
    tol_det: float = TOL_DET

    @property
    def abs_dets(self) -> np.ndarray:
        return np.abs(self.dets)

    @property
    def singular(self) -> np.ndarray:
        """Points whose matrix is numerically singular (1-norm condition above 1/tol_det)"""
        return ~(self.conds <= 1.0 / self.tol_det)

    @property
    def interval(self) -> Tuple[float, float]:
        return interval(self.N)

    @property
    def measure_threshold(self) -> float:
        return 2.0 / self.initial_grid


def interval(N: int) -> Tuple[float, float]:
    """The open interval ((N-2)/2, N/2) on which M_T is defined"""
    return (N - 2) / 2.0, N / 2.0


def _check_domain(family: OperatorFamily, x: np.ndarray, allow_boundary: bool):
    lower, upper = interval(family.N)
    if allow_boundary:
        bad = (x < lower) | (x > upper)
    else:
        bad = (x <= lower) | (x >= upper)
    if np.any(bad):
        raise DomainError(float(x[bad][0]), lower, upper)


def matrix_field(family: OperatorFamily, x, allow_boundary: bool = False) -> np.ndarray:
    """Stack of matrices M_T(x_i), shape (len(x), N, N)"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_domain(family, x, allow_boundary)
    N = family.N
    xi = (np.arange(N)[None, :] - x[:, None]) / family.rho
    values = family.evaluate(xi)
    return np.transpose(values, (1, 2, 0)) / N


def build_matrix(family: OperatorFamily, x: float, allow_boundary: bool = False) -> np.ndarray:
    """M_T(x) with entry [m-1, n-1] = (1/N) K_n((m-1-x)/rho)"""
    return matrix_field(family, x, allow_boundary=allow_boundary)[0]


def _condition_numbers(matrices: np.ndarray) -> np.ndarray:
    try:
        with np.errstate(all="ignore"):
            conds = np.linalg.cond(matrices, p=1)
    except np.linalg.LinAlgError:
        conds = np.empty(matrices.shape[0])
        for i, matrix in enumerate(matrices):
            try:
                conds[i] = np.linalg.cond(matrix, p=1)
            except np.linalg.LinAlgError:
                conds[i] = np.inf
    return np.where(np.isnan(conds), np.inf, conds)


def _cell_weights(grid: np.ndarray, lower: float, upper: float) -> np.ndarray:
    edges = np.concatenate([[lower], 0.5 * (grid[1:] + grid[:-1]), [upper]])
    return np.diff(edges)


def _polish_minima(
    family: OperatorFamily,
    grid: np.ndarray,
    abs_dets: np.ndarray,
    tol_det: float,
    count: int = POLISHED_MINIMA,
) -> np.ndarray:
    """Refine the smallest local minima of |det| by least squares on (Re det, Im det)"""
    lower, upper = interval(family.N)
    size = grid.size
    left = np.concatenate([[np.inf], abs_dets[:-1]])
    right = np.concatenate([abs_dets[1:], [np.inf]])
    minima = np.flatnonzero((abs_dets <= left) & (abs_dets <= right) & (abs_dets >= tol_det))
    minima = minima[np.argsort(abs_dets[minima])][:count]

    def residual(t):
        det = np.linalg.det(build_matrix(family, t[0], allow_boundary=True))
        return [det.real, det.imag]

    found = []
    for i in minima:
        lo = grid[i - 1] if i > 0 else lower
        hi = grid[i + 1] if i < size - 1 else upper
        try:
            result = least_squares(residual, x0=[grid[i]], bounds=([lo], [hi]), xtol=1e-15, ftol=1e-15, gtol=1e-15)
        except (ValueError, np.linalg.LinAlgError) as e:
            logger.debug(f"Polishing the minimum near x={grid[i]:.6g} failed: {e}")
            continue
        x_new = float(result.x[0])
        if not lower < x_new < upper or x_new == grid[i]:
            continue
        if np.hypot(*result.fun) < abs_dets[i]:
            found.append(x_new)
    return np.array(found)


def det_profile(
    family: OperatorFamily,
    initial_grid: int = DEFAULT_INITIAL_GRID,
    refine_levels: int = DEFAULT_REFINE_LEVELS,
    tol_det: float = TOL_DET,
    polish: bool = True,
) -> MatrixField:
    """
    Determinant profile of M^rho_T on an adaptive grid.

    The initial grid is uniform with a half-cell inset from both ends of the
    interval. At each refinement level the cells of points with |det| below
    max(10 * current minimum, tol_det) are bisected. The endpoint limits are
    stored in boundary_dets since the determinant extends continuously to
    the closed interval.
    """
    if initial_grid < 16:
        raise InvalidArgumentError(f"initial_grid must be at least 16, got {initial_grid}")
    if refine_levels < 0:
        raise InvalidArgumentError(f"refine_levels must be nonnegative, got {refine_levels}")
    if family.is_tabulated:
        logger.warning(f"Family {family.name or '<unnamed>'} has tabulated multipliers; the ess-inf estimate is heuristic")

    lower, upper = interval(family.N)
    grid = lower + (np.arange(initial_grid) + 0.5) / initial_grid
    matrices = matrix_field(family, grid)
    dets = np.linalg.det(matrices)

    def merge(points: np.ndarray):
        nonlocal grid, matrices, dets
        points = np.setdiff1d(points, grid)
        if points.size == 0:
            return
        new_matrices = matrix_field(family, points)
        grid = np.concatenate([grid, points])
        matrices = np.concatenate([matrices, new_matrices])
        dets = np.concatenate([dets, np.linalg.det(new_matrices)])
        order = np.argsort(grid)
        grid, matrices, dets = grid[order], matrices[order], dets[order]

    for level in range(refine_levels):
        abs_dets = np.abs(dets)
        threshold = max(10.0 * abs_dets.min(), tol_det)
        flagged = np.flatnonzero(abs_dets < threshold)
        previous = np.concatenate([[lower], grid[:-1]])[flagged]
        following = np.concatenate([grid[1:], [upper]])[flagged]
        points = np.concatenate([0.5 * (previous + grid[flagged]), 0.5 * (grid[flagged] + following)])
        merge(np.unique(points))
        logger.debug(f"Refinement level {level + 1}: {flagged.size} cells bisected, {grid.size} points")

    if polish:
        merge(_polish_minima(family, grid, np.abs(dets), tol_det))

    ends = np.linalg.det(matrix_field(family, [lower, upper], allow_boundary=True))
    field = MatrixField(
        N=family.N,
        rho=family.rho,
        grid=grid,
        matrices=matrices,
        dets=dets,
        conds=_condition_numbers(matrices),
        weights=_cell_weights(grid, lower, upper),
        boundary_dets=(complex(ends[0]), complex(ends[1])),
        initial_grid=initial_grid,
        tol_det=tol_det,
    )
    i = int(np.argmin(field.abs_dets))
    logger.info(
        f"Determinant profile built: {grid.size} points, min |det|={field.abs_dets[i]:.3e} at x={grid[i]:.6g}"
    )
    return field


def _classify_field(field: MatrixField, measure_threshold: Optional[float] = None) -> CriterionReport:
    lower, upper = field.interval
    threshold = field.measure_threshold if measure_threshold is None else measure_threshold

    abs_dets = field.abs_dets
    singular = field.singular
    zero = abs_dets < field.tol_det
    zero_fraction = float(np.sum(field.weights[zero]) / (upper - lower))

    candidates = np.concatenate([abs_dets, np.abs(field.boundary_dets)])
    locations = np.concatenate([field.grid, [lower, upper]])
    i = int(np.argmin(candidates))
    essinf = float(candidates[i])

    n_singular = int(np.count_nonzero(singular & (abs_dets >= field.tol_det)))
    if n_singular:
        logger.warning(f"{n_singular} grid points are numerically singular despite |det| >= tol_det")

    if essinf >= field.tol_det:
        case = Case.PositiveEssInf
    elif zero_fraction > threshold:
        case = Case.PositiveMeasureZeroSet
    else:
        case = Case.NullZeroSet

    return CriterionReport(
        essinf_estimate=essinf,
        zero_fraction=zero_fraction,
        case=case,
        min_location=float(locations[i]),
        N=field.N,
        rho=field.rho,
        grid_size=int(field.grid.size),
        singular_points=int(np.count_nonzero(singular)),
        tol_det=field.tol_det,
        measure_threshold=threshold,
    )


def classify_theorem1(field: MatrixField, measure_threshold: Optional[float] = None) -> CriterionReport:
    """
    Case 1 (PositiveEssInf) means an interpolation formula exists. Otherwise
    the zero set of det M_T is null (case 2) or has positive measure (case 3),
    decided by zero_fraction against measure_threshold (default 2/initial_grid).
    """
    if not np.isclose(field.rho, field.N):
        raise InvalidArgumentError(f"classification needs rho = N, field has rho={field.rho}, N={field.N}")
    report = _classify_field(field, measure_threshold)
    logger.info(f"Family classified as {report.case.value} (essinf ~ {report.essinf_estimate:.6g})")
    return report


def _at_most(a: float, b: float) -> bool:
    return a < b or bool(np.isclose(a, b))


def decide_theorem2(case: Case, rho: float, delta: float, N: int) -> Tuple[Verdict, Verdict]:
    """(stable sampling, interpolation set) verdicts for a determinant case and rho * delta"""
    product = rho * delta
    below = _at_most(product, N)
    above = _at_most(N, product)
    yes, no, unknown = Verdict.yes, Verdict.no, Verdict.unknown
    if case == Case.PositiveEssInf:
        return (yes if below else no), (yes if above else no)
    if case == Case.NullZeroSet:
        return (yes if below else unknown), (no if below else unknown)
    return (no if above else unknown), (no if below else unknown)


def classify_theorem2(
    family: OperatorFamily,
    delta: Optional[float] = None,
    field: Optional[MatrixField] = None,
    **profile_options,
) -> Theorem2Verdict:
    """
    Sampling on rho Z for PW with band [-delta/2, delta/2]. The case is read
    from |det M^rho_T|; combinations the theory leaves open are reported as
    unknown.
    """
    delta = family.delta if delta is None else delta
    if delta <= 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    if field is None:
        field = det_profile(family, **profile_options)
    elif not np.isclose(field.rho, family.rho):
        raise InvalidArgumentError("profile was built with a different sampling step")

    report = _classify_field(field)
    stable, interpolation = decide_theorem2(report.case, family.rho, delta, family.N)
    logger.info(
        f"rho*delta={family.rho * delta:.6g}, N={family.N}: stable sampling {stable.value}, "
        f"interpolation set {interpolation.value}"
    )
    return Theorem2Verdict(
        stable_sampling=stable,
        interpolation_set=interpolation,
        case=report.case,
        N=family.N,
        rho=family.rho,
        delta=delta,
        essinf_estimate=report.essinf_estimate,
    )


def periodization_check(
    family: OperatorFamily,
    signal: BandlimitedSignal,
    a: float,
    x: float,
    trunc: int,
    n: int = 1,
) -> float:
    """
    |sum_{|m|<=trunc} T(f)(Nm + a) e^{2 pi i m x}
      - (1/N) sum_{m=1}^N f^(xi_m) K(xi_m) e^{2 pi i a xi_m}|,  xi_m = (m-1-x)/N,

    for the n-th operator of the family (Poisson summation).
    """
    if not 1 <= n <= family.N:
        raise InvalidArgumentError(f"operator index {n} outside 1..{family.N}")
    _check_domain(family, np.array([x]), allow_boundary=False)
    N = family.N
    spec = family.members[n - 1]

    m = np.arange(-trunc, trunc + 1)
    samples = apply_operator(spec, signal, N * m + a)
    lhs = np.sum(samples * np.exp(2j * np.pi * m * x))

    xi = (np.arange(N) - x) / N
    rhs = np.sum(signal.spectrum(xi) * eval_multiplier(spec, xi) * np.exp(2j * np.pi * a * xi)) / N
    return float(abs(lhs - rhs))


def product_determinant(base: MultiplierSpec, N: int, x) -> Union[complex, np.ndarray]:
    """(1/N^N) prod_{n<m} (K(xi_m) - K(xi_n)) for the power family of K"""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    values = eval_multiplier(base, (np.arange(N)[None, :] - x_arr[:, None]) / N)
    values = np.atleast_2d(values)
    det = np.ones(x_arr.size, dtype=complex)
    for m in range(N):
        for n in range(m):
            det = det * (values[:, m] - values[:, n])
    det = det / N ** N
    return det if np.ndim(x) else complex(det[0])


def vandermonde_determinant(nodes, N: int, x) -> Union[complex, np.ndarray]:
    """
    det M_T for K_n = exp(2 pi i a_n xi): N^-N prod_n e^{-2 pi i a_n x / N}
    times the Vandermonde determinant of w_n = e^{2 pi i a_n / N}.
    """
    a = np.asarray(nodes, dtype=float)
    if a.size != N:
        raise InvalidArgumentError(f"expected {N} nodes, got {a.size}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    w = np.exp(2j * np.pi * a / N)
    vandermonde = 1.0 + 0j
    for m in range(N):
        for n in range(m):
            vandermonde *= w[m] - w[n]
    diagonal = np.exp(-2j * np.pi * np.outer(x_arr, a) / N).prod(axis=1)
    det = diagonal * vandermonde / N ** N
    return det if np.ndim(x) else complex(det[0])
