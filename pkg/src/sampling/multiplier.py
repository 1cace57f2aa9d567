"""
Bounded Fourier multipliers on the band [-1/2, 1/2] and operator families.

A multiplier is stored symbolically as

    K(xi) = [P(2 pi i xi) * exp(2 pi i a xi) * prod_j sinc(2 eps_j xi)] ** k

which covers translations, derivatives, differential polynomials and
symmetric difference quotients. Tabulated multipliers (uniform grid on the
band, linear interpolation) are accepted for symbols outside that algebra
but carry no closed-form cross-checks.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import least_squares

from src.sampling.errors import InvalidArgumentError
from src.utils.special import sinc

logger = logging.getLogger(__name__)

TOL_ROOT = 1e-10
BAND = (-0.5, 0.5)


@dataclass(frozen=True)
class MultiplierSpec:
    """Symbolic multiplier K; see the module docstring for the encoding"""

    poly_coeffs: Tuple[complex, ...] = (1 + 0j,)
    shift: float = 0.0
    sinc_factors: Tuple[float, ...] = ()
    power: int = 1
    table: Optional[Tuple[complex, ...]] = None

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.poly_coeffs)
        if not coeffs:
            raise InvalidArgumentError("poly_coeffs must contain at least one coefficient")
        # Trailing zeros carry no information and would break equality checks
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "poly_coeffs", coeffs)
        object.__setattr__(self, "shift", float(self.shift))

        factors = tuple(float(e) for e in self.sinc_factors)
        if any(e == 0 for e in factors):
            raise InvalidArgumentError("sinc factors must be nonzero")
        object.__setattr__(self, "sinc_factors", factors)

        if int(self.power) != self.power or self.power < 1:
            raise InvalidArgumentError(f"power must be a positive integer, got {self.power}")
        object.__setattr__(self, "power", int(self.power))

        if self.table is not None:
            table = tuple(complex(v) for v in self.table)
            if len(table) < 2:
                raise InvalidArgumentError("a tabulated multiplier needs at least two samples")
            object.__setattr__(self, "table", table)

    @property
    def is_tabulated(self) -> bool:
        return self.table is not None

    @property
    def is_identity(self) -> bool:
        return (
            not self.is_tabulated
            and self.poly_coeffs == (1 + 0j,)
            and self.shift == 0.0
            and not self.sinc_factors
        )

    @property
    def degree(self) -> int:
        """Degree of the expanded polynomial part"""
        return (len(self.poly_coeffs) - 1) * self.power

    def __call__(self, xi):
        return eval_multiplier(self, xi)


@dataclass(frozen=True)
class OperatorFamily:
    """
    The tuple T = (T_1, ..., T_N) together with the sampling step rho
    (defaults to N) and the band parameter delta used by the stable-sampling verdicts.
    """

    members: Tuple[MultiplierSpec, ...]
    N: Optional[int] = None
    rho: Optional[float] = None
    delta: float = 1.0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        N = len(members) if self.N is None else int(self.N)
        if N < 1:
            raise InvalidArgumentError(f"N must be positive, got {N}")
        if len(members) != N:
            raise InvalidArgumentError(f"family declares N={N} but has {len(members)} operators")
        object.__setattr__(self, "N", N)

        rho = float(N) if self.rho is None else float(self.rho)
        if rho <= 0:
            raise InvalidArgumentError(f"rho must be positive, got {rho}")
        object.__setattr__(self, "rho", rho)
        if self.delta <= 0:
            raise InvalidArgumentError(f"delta must be positive, got {self.delta}")
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def is_tabulated(self) -> bool:
        return any(member.is_tabulated for member in self.members)

    def evaluate(self, xi) -> np.ndarray:
        """Stack of K_n(xi), shape (N,) + shape(xi)"""
        return np.stack([np.asarray(eval_multiplier(member, xi)) for member in self.members])


def _eval_table(table: Tuple[complex, ...], xi: np.ndarray) -> np.ndarray:
    values = np.asarray(table, dtype=complex)
    grid = np.linspace(BAND[0], BAND[1], len(values))
    outside = (xi < BAND[0] - 1e-15) | (xi > BAND[1] + 1e-15)
    if np.any(outside):
        logger.warning(
            f"Tabulated multiplier evaluated at {int(np.count_nonzero(outside))} points outside the band; "
            "values are clamped to the band edges"
        )
    return np.interp(xi, grid, values.real) + 1j * np.interp(xi, grid, values.imag)


def eval_multiplier(spec: MultiplierSpec, xi):
    """
    Evaluate K(xi) for scalar or array xi.

    Returns a complex scalar for scalar input and a complex array otherwise.
    """
    xi_arr = np.asarray(xi, dtype=float)
    if spec.is_tabulated:
        value = _eval_table(spec.table, xi_arr)
    else:
        z = 2j * np.pi * xi_arr
        value = P.polyval(z, np.asarray(spec.poly_coeffs, dtype=complex))
        value = value * np.exp(2j * np.pi * spec.shift * xi_arr)
        for eps in spec.sinc_factors:
            value = value * sinc(2.0 * eps * xi_arr)
    value = np.asarray(value, dtype=complex) ** spec.power
    return value if value.ndim else complex(value)


# ---------------------------------------------------------------------------
# Constructors


def identity() -> MultiplierSpec:
    """K = 1"""
    return MultiplierSpec()


def shift(a: float) -> MultiplierSpec:
    """Translation f -> f(. + a), K = exp(2 pi i a xi)"""
    return MultiplierSpec(shift=a)


def derivative(order: int = 1, shift: float = 0.0) -> MultiplierSpec:
    """f -> f^(order)(. + shift)"""
    if order < 0:
        raise InvalidArgumentError(f"derivative order must be nonnegative, got {order}")
    coeffs = [0j] * order + [1 + 0j]
    return MultiplierSpec(poly_coeffs=tuple(coeffs), shift=shift)


def diffquot(epsilon: float, shift: float = 0.0) -> MultiplierSpec:
    """Symmetric difference quotient f -> (f(. + b + eps) - f(. + b - eps)) / (2 eps)"""
    if epsilon == 0:
        raise InvalidArgumentError("epsilon must be nonzero")
    return MultiplierSpec(poly_coeffs=(0j, 1 + 0j), shift=shift, sinc_factors=(epsilon,))


def polynomial(coeffs: Sequence[complex], shift: float = 0.0) -> MultiplierSpec:
    """Differential polynomial sum_j c_j D^j composed with a translation"""
    return MultiplierSpec(poly_coeffs=tuple(coeffs), shift=shift)


def power(base: MultiplierSpec, k: int) -> MultiplierSpec:
    """The operator base applied k times; k = 0 gives the identity"""
    if k < 0:
        raise InvalidArgumentError(f"power must be nonnegative, got {k}")
    if k == 0:
        return identity()
    return replace(base, power=base.power * k)


def tabulated(values: Sequence[complex]) -> MultiplierSpec:
    """Samples of K on a uniform grid over [-1/2, 1/2], endpoints included"""
    logger.warning("Tabulated multiplier: no closed-form cross-checks are available")
    return MultiplierSpec(table=tuple(values))


# ---------------------------------------------------------------------------
# Algebra


def normalize(spec: MultiplierSpec) -> MultiplierSpec:
    """Expand the power into a power-1 spec that evaluates identically"""
    if spec.power == 1 or spec.is_tabulated:
        return spec
    return MultiplierSpec(
        poly_coeffs=tuple(P.polypow(np.asarray(spec.poly_coeffs, dtype=complex), spec.power)),
        shift=spec.shift * spec.power,
        sinc_factors=spec.sinc_factors * spec.power,
    )


def compose(first: MultiplierSpec, second: MultiplierSpec) -> MultiplierSpec:
    """Multiplier of the composition of two operators (the product of their symbols)"""
    if first.is_tabulated or second.is_tabulated:
        raise InvalidArgumentError("tabulated multipliers cannot be composed symbolically")
    a, b = normalize(first), normalize(second)
    return MultiplierSpec(
        poly_coeffs=tuple(P.polymul(np.asarray(a.poly_coeffs), np.asarray(b.poly_coeffs))),
        shift=a.shift + b.shift,
        sinc_factors=a.sinc_factors + b.sinc_factors,
    )


def dilate(spec: MultiplierSpec, a: float) -> MultiplierSpec:
    """Multiplier xi -> K(a xi) of the dilated operator"""
    if a <= 0:
        raise InvalidArgumentError(f"dilation factor must be positive, got {a}")
    if spec.is_tabulated:
        raise InvalidArgumentError("tabulated multipliers are only defined on the band and cannot be dilated")
    scale = a ** np.arange(len(spec.poly_coeffs))
    return MultiplierSpec(
        poly_coeffs=tuple(np.asarray(spec.poly_coeffs) * scale),
        shift=a * spec.shift,
        sinc_factors=tuple(a * e for e in spec.sinc_factors),
        power=spec.power,
    )


def dilate_family(family: OperatorFamily, a: float) -> OperatorFamily:
    """Dilate every member; sampling step and band are left to the caller"""
    return OperatorFamily(
        members=tuple(dilate(member, a) for member in family.members),
        N=family.N,
        delta=family.delta,
        name=family.name,
    )


def with_common_factor(family: OperatorFamily, factor: MultiplierSpec) -> OperatorFamily:
    """Compose every member with the same factor operator"""
    return replace(family, members=tuple(compose(factor, member) for member in family.members))


# ---------------------------------------------------------------------------
# Families


def power_family(base: MultiplierSpec, N: int) -> OperatorFamily:
    """Dynamical-sampling family (I, T, T^2, ..., T^(N-1))"""
    if N < 1:
        raise InvalidArgumentError(f"N must be positive, got {N}")
    return OperatorFamily(members=tuple(power(base, n) for n in range(N)), N=N)


def _max_modulus(family: OperatorFamily, xi) -> np.ndarray:
    return np.max(np.abs(family.evaluate(xi)), axis=0)


def _stacked_parts(family: OperatorFamily, xi: float) -> np.ndarray:
    """Real and imaginary parts of every K_n(xi), for least-squares root polishing"""
    values = np.asarray(family.evaluate(xi), dtype=complex).ravel()
    return np.concatenate([values.real, values.imag])


def common_root_scan(family: OperatorFamily, grid_size: int, tol_root: float = TOL_ROOT) -> List[float]:
    """
    Frequencies in the band where every multiplier of the family vanishes.

    Grid points with max_n |K_n| < tol_root are returned; local minima of the
    grid profile are additionally polished by bounded least squares so
    that roots falling between grid points are not missed.
    """
    if grid_size < 2:
        raise InvalidArgumentError(f"grid_size must be at least 2, got {grid_size}")
    grid = np.linspace(BAND[0], BAND[1], grid_size)
    profile = _max_modulus(family, grid)
    roots = set(float(xi) for xi in grid[profile < tol_root])

    step = grid[1] - grid[0]
    interior = np.flatnonzero((profile[1:-1] <= profile[:-2]) & (profile[1:-1] <= profile[2:])) + 1
    candidates = list(interior)
    for end in (0, grid_size - 1):
        neighbour = 1 if end == 0 else grid_size - 2
        if profile[end] <= profile[neighbour]:
            candidates.append(end)

    for i in candidates:
        if profile[i] < tol_root:
            continue
        lo, hi = max(BAND[0], grid[i] - step), min(BAND[1], grid[i] + step)
        result = least_squares(
            lambda t: _stacked_parts(family, t[0]),
            x0=[grid[i]],
            bounds=([lo], [hi]),
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
        )
        x_new = float(result.x[0])
        if float(_max_modulus(family, x_new)) < tol_root and not any(abs(x_new - r) < step for r in roots):
            roots.add(x_new)

    found = sorted(roots)
    if found:
        logger.info(f"Common root scan found {len(found)} common root(s), first at xi={found[0]:.6g}")
    return found

