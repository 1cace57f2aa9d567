"""
Explicit kernels for the classical sampling schemes.

Each KernelClosedForm evaluates g(x) directly (sine products, sinc powers,
or one-dimensional integrals over (0, 1)) and exposes its spectrum, so the
same biorthogonality checks apply to closed forms and synthesized sets.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from math import factorial
from typing import Any, Callable, Dict, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from src.sampling import multiplier as mult
from src.sampling.errors import FamilyMismatchError, InvalidArgumentError, InvalidNodesError, NoFormulaError
from src.sampling.kernels import KernelSet, check_injective, dynamical_kernels, piece_of
from src.sampling.multiplier import MultiplierSpec, OperatorFamily, eval_multiplier
from src.utils.quadrature import fourier_integral
from src.utils.special import sinc, x_over_sin_taylor

logger = logging.getLogger(__name__)

# Integer tests on parameters read from files
INTEGER_TOLERANCE = 1e-12


class KernelKind(str, Enum):
    Sinc = "sinc"
    Littmann = "littmann"
    LittmannTaylor = "littmann-taylor"
    Shifted = "shifted"
    TwoNodeDerivative = "twonode"
    DiffQuotient = "diffquot"
    DynamicalLast = "dynamical-last"


@dataclass(frozen=True, eq=False)
class KernelClosedForm:
    """One explicit kernel g, with callables for g(x) and for its spectrum"""

    kind: KernelKind
    N: int
    index: int
    params: Dict[str, Any]
    value_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    spectrum_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        values = np.asarray(self.value_fn(np.atleast_1d(x_arr)), dtype=complex).reshape(x_arr.shape)
        return values if values.ndim else complex(values)

    def spectrum(self, xi):
        xi_arr = np.asarray(xi, dtype=float)
        flat = np.atleast_1d(xi_arr).ravel()
        inside = np.abs(flat) <= 0.5
        values = np.zeros(flat.shape, dtype=complex)
        if np.any(inside):
            values[inside] = self.spectrum_fn(flat[inside])
        values = values.reshape(xi_arr.shape)
        return values if values.ndim else complex(values)


@dataclass(frozen=True, eq=False)
class ClosedFormKernelSet(KernelSet):
    """A full set g_1..g_N of closed-form kernels"""

    N: int
    kernels: Tuple[KernelClosedForm, ...]
    label: str = ""

    def __post_init__(self):
        if len(self.kernels) != self.N:
            raise InvalidArgumentError(f"expected {self.N} kernels, got {len(self.kernels)}")

    def spectrum(self, n: int, xi) -> np.ndarray:
        self._check_index(n)
        return self.kernels[n - 1].spectrum(xi)

    def evaluate(self, n: int, x) -> np.ndarray:
        self._check_index(n)
        return np.atleast_1d(self.kernels[n - 1](x))


def _is_integer(value: float) -> bool:
    return abs(value - round(value)) < INTEGER_TOLERANCE


# ---------------------------------------------------------------------------
# Shannon


def sinc_kernel() -> KernelClosedForm:
    """g = sinc, the N = 1 identity kernel"""
    return KernelClosedForm(
        kind=KernelKind.Sinc,
        N=1,
        index=1,
        params={},
        value_fn=sinc,
        spectrum_fn=lambda xi: np.ones_like(xi, dtype=complex),
    )


# ---------------------------------------------------------------------------
# Derivative sampling (T_n = D^(n-1))


def littmann_coeffs(N: int) -> np.ndarray:
    """C_1..C_N with prod_{j=1}^{N-1} (y + pi i - 2 pi i j/N) = sum_m C_m y^(m-1)"""
    if N < 1:
        raise InvalidArgumentError(f"N must be positive, got {N}")
    roots = 2j * np.pi * np.arange(1, N) / N - 1j * np.pi
    return P.polyfromroots(roots).astype(complex) if N > 1 else np.array([1 + 0j])


def _elementary_symmetric(roots: np.ndarray, degree: int) -> np.ndarray:
    """e_degree of the roots along the last axis"""
    e = np.zeros(roots.shape[:-1] + (degree + 1,), dtype=complex)
    e[..., 0] = 1.0
    for k in range(roots.shape[-1]):
        r = roots[..., k]
        for d in range(degree, 0, -1):
            e[..., d] = e[..., d] + r * e[..., d - 1]
    return e[..., degree]


def littmann_piece(N: int, m: int, n: int, xi) -> np.ndarray:
    """
    Polynomial of the spectrum of g^N_m on the 0-based piece n, evaluated at
    any xi: with x = n - N xi it equals
    N (N/(2 pi i))^(N-1) (-1)^(N-1-n) / (n! (N-1-n)!) times the coefficient of
    y^(m-1) in prod_{j != n} (y - 2 pi i (j-x)/N).
    """
    _check_littmann_index(N, m)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    x = n - N * xi
    others = np.delete(np.arange(N), n)
    roots = 2j * np.pi * (others[None, :] - x[:, None]) / N
    coeff = (-1) ** (N - m) * _elementary_symmetric(roots, N - m)
    scale = N * (N / (2j * np.pi)) ** (N - 1) * (-1) ** (N - 1 - n) / (factorial(n) * factorial(N - 1 - n))
    return scale * coeff


def littmann_spectrum(N: int, m: int, xi) -> np.ndarray:
    """Spectrum of g^N_m, a polynomial of degree N-1 on each piece"""
    _check_littmann_index(N, m)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    piece = piece_of(xi, N)
    out = np.zeros(xi.shape, dtype=complex)
    for n in range(N):
        mask = piece == n
        if np.any(mask):
            out[mask] = littmann_piece(N, m, n, xi[mask])
    return np.where(np.abs(xi) <= 0.5, out, 0.0)


def littmann_jump(N: int, m: int, n: int) -> complex:
    """Jump of the spectrum of g^N_m at -1/2 + n/N (right limit minus left limit)"""
    C = littmann_coeffs(N)
    return complex(
        (N / (2j * np.pi)) ** (N - 1) * (-1) ** (N - n - 1) * N ** 2 / (factorial(n) * factorial(N - n)) * C[m - 1]
    )


def _check_littmann_index(N: int, m: int):
    if N < 1 or not 1 <= m <= N:
        raise InvalidArgumentError(f"kernel index m={m} outside 1..{N}")


def littmann_kernel(N: int, m: int) -> KernelClosedForm:
    """
    g^N_m(x) = (sum_{n=m}^N C_n (n-1)!/(N-1)! x^(N-n)) x^(m-1)/(m-1)! sinc(x/N)^N,
    the kernel of the m-th derivative sample in derivative sampling of order N.
    """
    _check_littmann_index(N, m)
    C = littmann_coeffs(N)
    # Coefficients of the bracket in increasing powers of x: x^(N-n) carries C_n (n-1)!/(N-1)!
    bracket = np.zeros(N - m + 1, dtype=complex)
    for n in range(m, N + 1):
        bracket[N - n] = C[n - 1] * factorial(n - 1) / factorial(N - 1)

    def value(x):
        return P.polyval(x, bracket) * x ** (m - 1) / factorial(m - 1) * sinc(x / N) ** N

    return KernelClosedForm(
        kind=KernelKind.Littmann,
        N=N,
        index=m,
        params={"coeffs": tuple(C)},
        value_fn=value,
        spectrum_fn=lambda xi: littmann_spectrum(N, m, xi),
    )


def littmann_taylor_kernel(N: int, m: int) -> KernelClosedForm:
    """g^N_m(x) = P_{N-m}(pi x/N) x^(m-1)/(m-1)! sinc(x/N)^N with P the Taylor polynomial of (y/sin y)^N"""
    _check_littmann_index(N, m)
    taylor = x_over_sin_taylor(N, N - m)

    def value(x):
        return P.polyval(np.pi * x / N, taylor) * x ** (m - 1) / factorial(m - 1) * sinc(x / N) ** N

    return KernelClosedForm(
        kind=KernelKind.LittmannTaylor,
        N=N,
        index=m,
        params={"taylor": tuple(taylor)},
        value_fn=value,
        spectrum_fn=lambda xi: littmann_spectrum(N, m, xi),
    )


def littmann_kernels(N: int) -> ClosedFormKernelSet:
    return ClosedFormKernelSet(N=N, kernels=tuple(littmann_kernel(N, m) for m in range(1, N + 1)), label=f"littmann-{N}")


# ---------------------------------------------------------------------------
# Shifted samples (T_n f = f(. + a_n))


def _check_nodes(N: int, nodes: np.ndarray):
    if nodes.size != N:
        raise InvalidArgumentError(f"expected {N} nodes, got {nodes.size}")
    for s in range(N):
        for t in range(s):
            if _is_integer((nodes[s] - nodes[t]) / N):
                raise InvalidNodesError(
                    f"nodes a_{t + 1}={nodes[t]:g} and a_{s + 1}={nodes[s]:g} coincide modulo N={N}", case="collision"
                )


def shifted_kernel(N: int, nodes: Sequence[float], n: int) -> KernelClosedForm:
    """g^a_n(x) = sinc((x-a_n)/N) prod_{s != n} sin(pi (x-a_s)/N) / sin(pi (a_n-a_s)/N)"""
    a = np.asarray(nodes, dtype=float)
    _check_nodes(N, a)
    if not 1 <= n <= N:
        raise InvalidArgumentError(f"kernel index {n} outside 1..{N}")
    others = np.delete(a, n - 1)
    a_n = a[n - 1]
    denominator = np.prod(np.sin(np.pi * (a_n - others) / N))

    def value(x):
        numerator = np.prod(np.sin(np.pi * (x[:, None] - others[None, :]) / N), axis=1)
        return sinc((x - a_n) / N) * numerator / denominator

    # M_T = (1/N) V D with V[m, s] = w_s^(m-1), w_s = e^{2 pi i a_s/N}; the spectrum is N e^{2 pi i a_n x/N} (V^-1)[n, j]
    V = np.exp(2j * np.pi * a[None, :] * np.arange(N)[:, None] / N)
    row = np.linalg.inv(V)[n - 1]

    def spectrum(xi):
        piece = piece_of(xi, N)
        x = piece - N * xi
        return N * np.exp(2j * np.pi * a_n * x / N) * row[piece]

    return KernelClosedForm(
        kind=KernelKind.Shifted,
        N=N,
        index=n,
        params={"nodes": tuple(a)},
        value_fn=value,
        spectrum_fn=spectrum,
    )


def shifted_kernels(N: int, nodes: Sequence[float]) -> ClosedFormKernelSet:
    return ClosedFormKernelSet(
        N=N, kernels=tuple(shifted_kernel(N, nodes, n) for n in range(1, N + 1)), label=f"shifted-{N}"
    )


# ---------------------------------------------------------------------------
# Two-operator families T_1 f = f(. + a), T_2 given; N = 2, pieces (-1/2, 0) and (0, 1/2)


def _unit_integral(func: Callable[[np.ndarray], np.ndarray], center: float, x: np.ndarray) -> np.ndarray:
    """integral over (0, 1) of func(s) e^{-(x - center) s pi i}"""
    return fourier_integral(func, 0.0, 1.0, -(x - center) / 2.0)


def _two_piece_spectrum(first: Callable, second: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Spectrum equal to first(-2 xi) on (-1/2, 0) and second(1 - 2 xi) on (0, 1/2)"""

    def spectrum(xi):
        out = np.empty(xi.shape, dtype=complex)
        negative = xi < 0
        out[negative] = first(-2.0 * xi[negative])
        out[~negative] = second(1.0 - 2.0 * xi[~negative])
        return out

    return spectrum


def twonode_kernels(order: int, a: float, b: float) -> Tuple[KernelClosedForm, KernelClosedForm]:
    """
    Kernels (g, h) for the samples f(2m + a) and f^(order)(2m + b):

      g(x) = int_0^1 [s^n e^{(x-b) pi i} - (s-1)^n] / [s^n e^{(a-b) pi i} - (s-1)^n] e^{-(x-a) s pi i} ds
      h(x) = (-pi i)^-n int_0^1 (1 - e^{(x-a) pi i}) / (s^n - (s-1)^n e^{(b-a) pi i}) e^{-(x-b) s pi i} ds

    No formula exists when a - b is an integer of the same parity as n.
    """
    n = int(order)
    if n < 0:
        raise InvalidArgumentError(f"derivative order must be nonnegative, got {order}")
    if _is_integer(a - b) and (round(a - b) - n) % 2 == 0:
        raise NoFormulaError(
            f"no interpolation formula for derivative order {n} with a-b={a - b:g} (same parity)", case="parity"
        )

    e_ab = np.exp(1j * np.pi * (a - b))
    e_ba = np.conj(e_ab)
    lead = 1.0 / (-1j * np.pi) ** n

    def g_value(x):
        denominator = lambda s: s ** n * e_ab - (s - 1) ** n
        first = _unit_integral(lambda s: s ** n / denominator(s), a, x)
        second = _unit_integral(lambda s: (s - 1) ** n / denominator(s), a, x)
        return np.exp(1j * np.pi * (x - b)) * first - second

    def h_value(x):
        integral = _unit_integral(lambda s: 1.0 / (s ** n - (s - 1) ** n * e_ba), b, x)
        return lead * (1.0 - np.exp(1j * np.pi * (x - a))) * integral

    # Explicit inverse of M_T(x); delta is the common denominator
    def delta(x):
        return np.exp(1j * np.pi * b) * (x - 1) ** n - np.exp(1j * np.pi * a) * x ** n

    g11 = lambda x: 2 * np.exp(1j * np.pi * b) * (x - 1) ** n * np.exp(1j * np.pi * a * x) / delta(x)
    g12 = lambda x: -2 * x ** n * np.exp(1j * np.pi * a * x) / delta(x)
    g21 = lambda x: -2 * np.exp(1j * np.pi * a) * np.exp(1j * np.pi * b * x) * lead / delta(x)
    g22 = lambda x: 2 * np.exp(1j * np.pi * b * x) * lead / delta(x)

    params = {"order": n, "a": a, "b": b}
    g = KernelClosedForm(KernelKind.TwoNodeDerivative, 2, 1, params, g_value, _two_piece_spectrum(g11, g12))
    h = KernelClosedForm(KernelKind.TwoNodeDerivative, 2, 2, params, h_value, _two_piece_spectrum(g21, g22))
    return g, h


def diffquot_case(epsilon: float, a: float, b: float):
    """Which degenerate case (1, 2 or 3) the parameters fall in, or None"""
    if _is_integer(a - b) and round(a - b) % 2 == 1:
        return 1
    if _is_integer(epsilon) and round(epsilon) != 0:
        return 2
    if _is_integer(a - b) and abs(epsilon) >= 1:
        return 3
    return None


def diffquot_kernels(epsilon: float, a: float, b: float) -> Tuple[KernelClosedForm, KernelClosedForm]:
    """
    Kernels (g, h) for the samples f(2m + a) and (f(2m + b + eps) - f(2m + b - eps))/(2 eps):

      g(x) = int_0^1 [(1-s) S(1-s) + e^{(x-b) pi i} s S(s)] / [(1-s) S(1-s) + e^{(a-b) pi i} s S(s)] e^{-(x-a) s pi i} ds
      h(x) = int_0^1 (e^{(x-a) pi i} - 1) / (pi i [e^{(b-a) pi i} (1-s) S(1-s) + s S(s)]) e^{-(x-b) s pi i} ds

    with S(s) = sinc(eps s). The denominator vanishes somewhere in [0, 1]
    exactly in the three degenerate cases: a-b odd (case 1), eps a nonzero
    integer (case 2), a-b even with |eps| >= 1 (case 3).
    """
    if epsilon == 0:
        raise InvalidArgumentError("epsilon must be nonzero")
    case = diffquot_case(epsilon, a, b)
    if case is not None:
        raise NoFormulaError(f"no interpolation formula for eps={epsilon:g}, a={a:g}, b={b:g}", case=f"case {case}")

    e_ab = np.exp(1j * np.pi * (a - b))
    e_ba = np.conj(e_ab)
    left = lambda s: (1 - s) * sinc(epsilon * (1 - s))
    right = lambda s: s * sinc(epsilon * s)

    def g_value(x):
        denominator = lambda s: left(s) + e_ab * right(s)
        first = _unit_integral(lambda s: left(s) / denominator(s), a, x)
        second = _unit_integral(lambda s: right(s) / denominator(s), a, x)
        return first + np.exp(1j * np.pi * (x - b)) * second

    def h_value(x):
        integral = _unit_integral(lambda s: 1.0 / (e_ba * left(s) + right(s)), b, x)
        return (np.exp(1j * np.pi * (x - a)) - 1.0) / (1j * np.pi) * integral

    def bracket(x):
        return np.exp(1j * np.pi * b) * left(x) + np.exp(1j * np.pi * a) * right(x)

    g11 = lambda x: 2 * left(x) * np.exp(1j * np.pi * b) * np.exp(1j * np.pi * a * x) / bracket(x)
    g12 = lambda x: 2 * right(x) * np.exp(1j * np.pi * a * x) / bracket(x)
    g21 = lambda x: -2 * np.exp(1j * np.pi * a) * np.exp(1j * np.pi * b * x) / (1j * np.pi * bracket(x))
    g22 = lambda x: 2 * np.exp(1j * np.pi * b * x) / (1j * np.pi * bracket(x))

    params = {"epsilon": epsilon, "a": a, "b": b}
    g = KernelClosedForm(KernelKind.DiffQuotient, 2, 1, params, g_value, _two_piece_spectrum(g11, g12))
    h = KernelClosedForm(KernelKind.DiffQuotient, 2, 2, params, h_value, _two_piece_spectrum(g21, g22))
    return g, h


def pair_kernels(pair: Tuple[KernelClosedForm, KernelClosedForm], label: str = "") -> ClosedFormKernelSet:
    return ClosedFormKernelSet(N=2, kernels=tuple(pair), label=label)


def twonode_family(order: int, a: float, b: float) -> OperatorFamily:
    """(f(. + a), f^(order)(. + b)) sampled on 2Z"""
    return OperatorFamily(members=(mult.shift(a), mult.derivative(order, b)), N=2, name=f"twonode-{order}")


def diffquot_family(epsilon: float, a: float, b: float) -> OperatorFamily:
    """(f(. + a), symmetric difference quotient at . + b) sampled on 2Z"""
    return OperatorFamily(members=(mult.shift(a), mult.diffquot(epsilon, b)), N=2, name="diffquot")


# ---------------------------------------------------------------------------
# Dynamical sampling


def dynamical_last_kernel(base: MultiplierSpec, N: int) -> KernelClosedForm:
    """g_N for the family (I, T, ..., T^(N-1)): spectrum N / prod_{j != m} (K(xi_m) - K(xi_j))"""
    check_injective(base, N)

    def spectrum(xi):
        piece = piece_of(xi, N)
        x = piece - N * xi
        z = np.atleast_2d(np.asarray(eval_multiplier(base, (np.arange(N)[None, :] - x[:, None]) / N)))
        rows = np.arange(xi.size)
        diff = z[rows, piece][:, None] - z
        diff[rows, piece] = 1.0
        return N / np.prod(diff, axis=1)

    edges = -0.5 + np.arange(N + 1) / N

    def value(x):
        total = np.zeros(x.shape, dtype=complex)
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += fourier_integral(spectrum, lo, hi, x)
        return total

    return KernelClosedForm(KernelKind.DynamicalLast, N, N, {"base": base}, value, spectrum)


# ---------------------------------------------------------------------------
# Closed forms recognized from a family

CLOSED_FORM_KINDS = ("sinc", "littmann", "shifted", "twonode", "diffquot", "dynamical")

_PROBE_XI = np.linspace(-0.5, 0.5, 41)


def _require(family: OperatorFamily, expected: Sequence[MultiplierSpec], kind: str):
    """The family's multipliers must agree with `expected` on the band"""
    if len(expected) != family.N or not np.isclose(family.rho, family.N):
        raise FamilyMismatchError(f"family {family.name!r} is not a {kind} family")
    actual = family.evaluate(_PROBE_XI)
    target = np.vstack([np.atleast_1d(eval_multiplier(spec, _PROBE_XI)) for spec in expected])
    if not np.allclose(actual, target, rtol=1e-10, atol=1e-12):
        raise FamilyMismatchError(f"family {family.name!r} does not match the {kind} operators")


def _pure_shift(spec: MultiplierSpec) -> float:
    if spec.is_tabulated or spec.sinc_factors or spec.poly_coeffs != (1 + 0j,):
        raise FamilyMismatchError("expected a pure translation operator")
    return spec.shift * spec.power


def closed_form_kernels(kind: str, family: OperatorFamily, **dynamical_options) -> KernelSet:
    """
    Kernel set of the named closed form, with its parameters read off the
    family. Raises FamilyMismatchError when the family is not of that kind.
    dynamical_options are passed to dynamical_kernels.
    """
    N = family.N
    members = family.members
    if kind == "sinc":
        _require(family, (mult.identity(),), kind)
        return ClosedFormKernelSet(N=1, kernels=(sinc_kernel(),), label="sinc")
    if kind == "littmann":
        _require(family, tuple(mult.derivative(n) for n in range(N)), kind)
        return littmann_kernels(N)
    if kind == "shifted":
        nodes = [_pure_shift(spec) for spec in members]
        _require(family, tuple(mult.shift(a) for a in nodes), kind)
        return shifted_kernels(N, nodes)
    if kind in ("twonode", "diffquot"):
        if N != 2:
            raise FamilyMismatchError(f"a {kind} family has two operators, got N={N}")
        a = _pure_shift(members[0])
        second = members[1]
        b = second.shift * second.power
        if kind == "twonode":
            order = second.degree
            _require(family, (mult.shift(a), mult.derivative(order, b)), kind)
            return pair_kernels(twonode_kernels(order, a, b), f"twonode-{order}")
        if len(second.sinc_factors) != 1 or second.power != 1:
            raise FamilyMismatchError("expected a single difference quotient as the second operator")
        epsilon = second.sinc_factors[0]
        _require(family, (mult.shift(a), mult.diffquot(epsilon, b)), kind)
        return pair_kernels(diffquot_kernels(epsilon, a, b), "diffquot")
    if kind == "dynamical":
        base = members[1] if N > 1 else mult.shift(0.0)
        _require(family, tuple(mult.power(base, n) for n in range(N)), kind)
        return dynamical_kernels(base, N, **dynamical_options)
    raise InvalidArgumentError(f"unknown closed form {kind!r}; choose from {', '.join(CLOSED_FORM_KINDS)}")
