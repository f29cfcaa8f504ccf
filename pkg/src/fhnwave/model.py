"""Vector fields, Jacobians and closed-form algebra of the FitzHugh-Nagumo
traveling-wave system.

The wave ODE in the fast time scale is

    x1' = x2
    x2' = (1/5) * (s*x2 - f(x1) + y - p)
    y'  = (eps/s) * (x1 - y)

with the cubic f(x1) = x1*(x1 - 1)*(1/10 - x1) and frozen constants
a = 1/10, gamma = 1, delta = 5.  The critical manifold is the graph
y = c(x1) = f(x1) + p in the plane x2 = 0.

Everything here is a pure function; no shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import ClassVar

import numpy as np
from scipy.optimize import brentq

SQRT91 = math.sqrt(91.0)

#: Fold abscissas of the cubic nullcline, roots of 30*x^2 - 22*x + 1 = 0.
X_MINUS = (11.0 - SQRT91) / 30.0
X_PLUS = (11.0 + SQRT91) / 30.0

#: Involution constant: p_- + p_+ = 2057/3375 (see symmetry_transform).
P_INVOLUTION = 2057.0 / 3375.0

#: Layer problem has three equilibria exactly for pbar in (PBAR_L, PBAR_R).
PBAR_L = -(X_PLUS * (X_PLUS - 1.0) * (0.1 - X_PLUS))
PBAR_R = -(X_MINUS * (X_MINUS - 1.0) * (0.1 - X_MINUS))

#: Midpoint of the involution in x1 (and y).
X_INVOLUTION = 11.0 / 15.0


class DomainError(ValueError):
    """Input outside the admissible domain of an operation."""


def cubic(x1):
    """The p-free cubic c0(x1) = x1*(x1 - 1)*(1/10 - x1)."""
    return x1 * (x1 - 1.0) * (0.1 - x1)


def cubic_prime(x1):
    """c0'(x1) = -3*x1^2 + 2.2*x1 - 0.1 = -(30*x1^2 - 22*x1 + 1)/10."""
    return -3.0 * x1 * x1 + 2.2 * x1 - 0.1


def cubic_second(x1):
    """c0''(x1) = -6*x1 + 2.2."""
    return -6.0 * x1 + 2.2


def cubic_third():
    """c0'''(x1) = -6 (constant)."""
    return -6.0


def nullcline(x1, p):
    """The critical-manifold graph c(x1; p) = c0(x1) + p."""
    return cubic(x1) + p


def equilibrium_p(x1):
    """Applied current p for which x1 is the full-system equilibrium.

    Solving x1 = c(x1; p) for p gives p = x1 - c0(x1)
    = x1^3 - 1.1*x1^2 + 1.1*x1.
    """
    return x1 - cubic(x1)


class CubicNullcline:
    """Function-object view of the cubic nullcline and its derivatives."""

    c0 = staticmethod(cubic)
    c0_prime = staticmethod(cubic_prime)
    c0_second = staticmethod(cubic_second)

    @staticmethod
    def c(x1, p):
        return nullcline(x1, p)


class EquilibriumKind(str, Enum):
    SADDLE = "saddle"
    SOURCE = "source"
    SINK = "sink"
    SADDLE_FOCUS = "saddle-focus"
    FOLD_DEGENERATE = "fold-degenerate"


class Branch(str, Enum):
    LEFT = "C_l"
    MIDDLE = "C_m"
    RIGHT = "C_r"


@dataclass(frozen=True)
class ModelParams:
    """Parameter triple (p, s, eps) with the frozen model constants."""

    p: float
    s: float
    eps: float

    a: ClassVar[float] = 0.1
    gamma: ClassVar[float] = 1.0
    delta: ClassVar[float] = 5.0

    def __post_init__(self):
        if self.eps < 0.0:
            raise DomainError(f"eps must be >= 0, got {self.eps}")
        if self.s < 0.0:
            raise DomainError(f"s must be >= 0, got {self.s}")


@dataclass(frozen=True)
class FoldPoints:
    """Fold abscissas x_{1,-} < x_{1,+} of the critical manifold."""

    x_minus: float = X_MINUS
    x_plus: float = X_PLUS


@dataclass
class EquilibriumInfo:
    """Fixed point of one of the subsystems with its linearization data."""

    state: np.ndarray
    eigenvalues: np.ndarray
    kind: EquilibriumKind
    branch: Branch

    @property
    def x1(self) -> float:
        return float(self.state[0])


def branch_of(x1: float) -> Branch:
    if x1 < X_MINUS:
        return Branch.LEFT
    if x1 <= X_PLUS:
        return Branch.MIDDLE
    return Branch.RIGHT


def _check_finite(state) -> np.ndarray:
    state = np.asarray(state, dtype=float)
    if not np.all(np.isfinite(state)):
        raise DomainError(f"non-finite state: {state}")
    return state


def full_field(state, params: ModelParams, timescale: str = "fast") -> np.ndarray:
    """Right-hand side of the three-dimensional wave ODE.

    The fast-time form is (x2, (s*x2 - f(x1) + y - p)/5, eps*(x1 - y)/s);
    the slow-time form is the same divided by eps (requires eps > 0).
    """
    state = _check_finite(state)
    if params.s == 0.0:
        raise DomainError("wave-speed division: s = 0")
    x1, x2, y = state
    rate = np.array(
        [
            x2,
            0.2 * (params.s * x2 - cubic(x1) + y - params.p),
            (params.eps / params.s) * (x1 - y),
        ]
    )
    if timescale == "fast":
        return rate
    if timescale == "slow":
        if params.eps <= 0.0:
            raise DomainError("slow time scale requires eps > 0")
        return rate / params.eps
    raise ValueError(f"unknown timescale {timescale!r}")


def full_jacobian(state, params: ModelParams) -> np.ndarray:
    """Exact Jacobian of the fast-time field at ``state``."""
    state = _check_finite(state)
    if params.s == 0.0:
        raise DomainError("wave-speed division: s = 0")
    x1 = state[0]
    es = params.eps / params.s
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [-0.2 * cubic_prime(x1), params.s / 5.0, 0.2],
            [es, 0.0, -es],
        ]
    )


def fast_field(state, pbar: float, s: float) -> np.ndarray:
    """Layer-problem right-hand side with frozen slow variable, pbar = p - y.

    Equilibria satisfy x1*(x1 - 1)*(1/10 - x1) + pbar = 0.  The divergence
    of the field is s/5 everywhere (the area-expansion argument needs only
    its positivity for s > 0).
    """
    x1, x2 = state
    return np.array([x2, 0.2 * (s * x2 - cubic(x1) - pbar)])


def fast_jacobian(x1: float, s: float) -> np.ndarray:
    """Layer-problem Jacobian A(x1); singular of rank 1 at the folds."""
    return np.array([[0.0, 1.0], [-0.2 * cubic_prime(x1), s / 5.0]])


def fold_points() -> FoldPoints:
    """Fold points x_{1,±} = (11 ∓ sqrt(91))/30 of the critical manifold."""
    return FoldPoints()


def slow_fold_params() -> tuple[float, float]:
    """Values (p_-, p_+) where the slow-flow equilibrium sits on a fold."""
    return equilibrium_p(X_MINUS), equilibrium_p(X_PLUS)


def fast_equilibria_x1(pbar: float) -> list[float]:
    """Sorted x1 abscissas of the layer-problem equilibria (1 to 3 roots).

    The cubic is monotone between its critical points X_MINUS < X_PLUS, so
    each of the three intervals carries at most one simple root; bracketed
    root-finding on them stays accurate arbitrarily close to the fold
    (double-root) configurations, where a uniform sign scan would fail.
    """
    func = lambda x: cubic(x) + pbar
    lo, hi = -2.0, 2.0
    while func(lo) < 0.0:
        lo *= 2.0
    while func(hi) > 0.0:
        hi *= 2.0
    roots: list[float] = []
    for a, b in ((lo, X_MINUS), (X_MINUS, X_PLUS), (X_PLUS, hi)):
        fa, fb = func(a), func(b)
        if fa == 0.0 and (not roots or roots[-1] != a):
            roots.append(a)
        if fa * fb < 0.0:
            roots.append(brentq(func, a, b, xtol=1e-15, rtol=1e-15))
    if func(hi) == 0.0:
        roots.append(hi)
    return roots


def classify_eigenvalues(eigenvalues, fold_tol: float = 1e-9) -> EquilibriumKind:
    """Equilibrium type from its eigenvalue signature."""
    ev = np.asarray(eigenvalues)
    re = ev.real
    if np.any(np.abs(re) < fold_tol) or np.any(np.abs(ev) < fold_tol):
        return EquilibriumKind.FOLD_DEGENERATE
    complex_pair = np.any(np.abs(ev.imag) > fold_tol)
    if np.all(re > 0):
        return EquilibriumKind.SOURCE
    if np.all(re < 0):
        return EquilibriumKind.SINK
    if complex_pair:
        return EquilibriumKind.SADDLE_FOCUS
    return EquilibriumKind.SADDLE


def fast_equilibrium_info(x1: float, s: float) -> EquilibriumInfo:
    """Layer-problem equilibrium (x1, 0) with its eigendata."""
    eigenvalues = np.linalg.eigvals(fast_jacobian(x1, s))
    return EquilibriumInfo(
        state=np.array([x1, 0.0]),
        eigenvalues=eigenvalues,
        kind=classify_eigenvalues(eigenvalues),
        branch=branch_of(x1),
    )


def equilibrium_x1(p: float) -> float:
    """The unique real root of x1 - c(x1; p) = 0."""
    func = lambda x: equilibrium_p(x) - p
    lo, hi = -2.0, 2.0
    while func(lo) > 0.0:
        lo *= 2.0
    while func(hi) < 0.0:
        hi *= 2.0
    return brentq(func, lo, hi, xtol=1e-15, rtol=1e-15)


def full_equilibrium(p: float, s: float = 1.0, eps: float = 0.01) -> EquilibriumInfo:
    """The unique equilibrium q = (x1*, 0, x1*) of the full system at p.

    Eigenvalues are those of the fast-time Jacobian at the requested (s, eps).
    """
    x1s = equilibrium_x1(p)
    state = np.array([x1s, 0.0, x1s])
    eigenvalues = np.linalg.eigvals(full_jacobian(state, ModelParams(p, s, eps)))
    return EquilibriumInfo(
        state=state,
        eigenvalues=eigenvalues,
        kind=classify_eigenvalues(eigenvalues),
        branch=branch_of(x1s),
    )


def symmetry_transform(state, p: float) -> tuple[np.ndarray, float]:
    """Involution of the wave ODE: applying it twice is the identity.

    Maps x1 -> 11/15 - x1, x2 -> -x2, y -> 11/15 - y, p -> 2057/3375 - p.
    Composed with time reversal and s -> -s this leaves the vector field
    invariant, which pairs the parameter values p and 2057/3375 - p (in
    particular p_- + p_+ = 2057/3375 exactly).
    """
    state = _check_finite(state)
    x1, x2, y = state
    return (
        np.array([X_INVOLUTION - x1, -x2, X_INVOLUTION - y]),
        P_INVOLUTION - p,
    )
