"""Phase-space primitives.

The whole library is built on three phase-space functions of N canonical
pairs (q, p),

    J- = sum_i q_i**2
    J+ = sum_i (p_i**2 + b_i / q_i**2)
    J3 = sum_i q_i * p_i,

which close the Poisson brackets {J3, J+} = 2 J+, {J3, J-} = -2 J-,
{J-, J+} = 4 J3.  A Hamiltonian is any smooth function H(J-, J+, J3); its
phase-space gradient is assembled exactly by the chain rule from the three
partials of H and the analytic gradients of the J's.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import DimensionMismatch, DomainError

# Below this |q_i| (with b_i != 0) the centrifugal term is treated as singular.
AXIS_GUARD_RADIUS = 1e-10


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be a 1-d real vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class PhasePoint:
    """Canonical state (q, p) with q.len == p.len == N."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _as_vector(self.q, "q"))
        object.__setattr__(self, "p", _as_vector(self.p, "p"))
        if self.q.shape != self.p.shape:
            raise DimensionMismatch(
                f"q and p must have equal length, got {self.q.size} and {self.p.size}"
            )
        if self.q.size < 1:
            raise DimensionMismatch("phase point needs at least one canonical pair")

    @property
    def n(self) -> int:
        return self.q.size


@dataclass(frozen=True)
class SL2Realization:
    """Centrifugal coefficients b = (b_1 ... b_N) of the realization."""

    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b", _as_vector(self.b, "b"))

    @property
    def n(self) -> int:
        return self.b.size

    def check_point(self, x: PhasePoint) -> None:
        if x.n != self.n:
            raise DimensionMismatch(
                f"realization has {self.n} sites but phase point has {x.n}"
            )
        guard_axes(self.b, x.q)


def guard_axes(b: np.ndarray, q: np.ndarray) -> None:
    """Raise DomainError if any q_i with b_i != 0 sits on its coordinate plane."""
    bad = (b != 0.0) & (np.abs(q) < AXIS_GUARD_RADIUS)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DomainError(
            f"q_{i + 1} = {q[i]!r} lies on a coordinate plane with b_{i + 1} != 0"
        )


@dataclass(frozen=True)
class SL2Values:
    """J-, J+, J3 and their analytic phase-space gradients.

    Gradient tuples are ordered (J-, J+, J3); each entry is a length-N array.
    """

    j_minus: float
    j_plus: float
    j3: float
    grad_q: tuple[np.ndarray, np.ndarray, np.ndarray]
    grad_p: tuple[np.ndarray, np.ndarray, np.ndarray]


def _sl2_scalars(b: np.ndarray, q: np.ndarray, p: np.ndarray) -> tuple[float, float, float]:
    guard_axes(b, q)
    j_minus = float(q @ q)
    j3 = float(q @ p)
    active = b != 0.0
    j_plus = float(p @ p)
    if np.any(active):
        j_plus += float(np.sum(b[active] / q[active] ** 2))
    return j_minus, j_plus, j3


def _sl2_raw(b, q, p):
    """Scalars plus gradients, on raw arrays (no validation beyond the guard)."""
    j_minus, j_plus, j3 = _sl2_scalars(b, q, p)
    n = q.size
    djp_dq = np.zeros(n)
    active = b != 0.0
    if np.any(active):
        djp_dq[active] = -2.0 * b[active] / q[active] ** 3
    grad_q = (2.0 * q, djp_dq, p.copy())
    grad_p = (np.zeros(n), 2.0 * p, q.copy())
    return j_minus, j_plus, j3, grad_q, grad_p


def evaluate_sl2(realization: SL2Realization, x: PhasePoint) -> SL2Values:
    """Evaluate J-, J+, J3 and all analytic gradients at a phase point.

    dJ-/dq_i = 2 q_i, dJ+/dq_i = -2 b_i / q_i**3, dJ+/dp_i = 2 p_i,
    dJ3/dq_i = p_i, dJ3/dp_i = q_i, dJ-/dp_i = 0.
    """
    realization.check_point(x)
    j_minus, j_plus, j3, grad_q, grad_p = _sl2_raw(realization.b, x.q, x.p)
    return SL2Values(j_minus, j_plus, j3, grad_q, grad_p)


@dataclass(frozen=True)
class Guard:
    """Named clearance function q -> float; dynamics halts when it dips
    below the guard radius."""

    label: str
    clearance: Callable[[np.ndarray], float]


@dataclass(frozen=True)
class HamiltonianSpec:
    """A Hamiltonian H = h(J-, J+, J3) over a fixed realization.

    `h` maps the three generator values to the energy; `h_partials` returns
    (dh/dxi-, dh/dxi+, dh/dxi3) at the same arguments.  Phase-space gradients
    are assembled by the chain rule, so they are exact whenever the partials
    are.
    """

    name: str
    realization: SL2Realization
    h: Callable[[float, float, float], float]
    h_partials: Callable[[float, float, float], tuple[float, float, float]]
    params: Mapping[str, float] = field(default_factory=dict)
    descriptor: Optional[object] = None
    guards: tuple[Guard, ...] = ()

    @property
    def n(self) -> int:
        return self.realization.n

    def value_qp(self, q: np.ndarray, p: np.ndarray) -> float:
        jm, jp, j3 = _sl2_scalars(self.realization.b, q, p)
        return float(self.h(jm, jp, j3))

    def gradient_qp(self, q: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        jm, jp, j3, gq, gp = _sl2_raw(self.realization.b, q, p)
        hm, hp, h3 = self.h_partials(jm, jp, j3)
        dq = hm * gq[0] + hp * gq[1] + h3 * gq[2]
        dp = hm * gp[0] + hp * gp[1] + h3 * gp[2]
        return dq, dp

    def value(self, x: PhasePoint) -> float:
        self.realization.check_point(x)
        return self.value_qp(x.q, x.p)

    def gradient(self, x: PhasePoint) -> tuple[np.ndarray, np.ndarray]:
        self.realization.check_point(x)
        return self.gradient_qp(x.q, x.p)


def hamiltonian_value(spec: HamiltonianSpec, x: PhasePoint) -> float:
    return spec.value(x)


def hamiltonian_gradient(spec: HamiltonianSpec, x: PhasePoint) -> tuple[np.ndarray, np.ndarray]:
    return spec.gradient(x)


@dataclass(frozen=True)
class ConservedQuantity:
    """An observable F(q, p) with its analytic gradient.

    `value_fn(q, p) -> float` and `gradient_fn(q, p) -> (dF/dq, dF/dp)`
    operate on raw arrays; the `value`/`gradient` methods take a PhasePoint.
    """

    name: str
    ndim: int
    value_fn: Callable[[np.ndarray, np.ndarray], float]
    gradient_fn: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]

    def value(self, x: PhasePoint) -> float:
        self._check(x)
        return float(self.value_fn(x.q, x.p))

    def gradient(self, x: PhasePoint) -> tuple[np.ndarray, np.ndarray]:
        self._check(x)
        return self.gradient_fn(x.q, x.p)

    def _check(self, x: PhasePoint) -> None:
        if x.n != self.ndim:
            raise DimensionMismatch(
                f"{self.name} is defined on {self.ndim} sites, phase point has {x.n}"
            )


def energy_quantity(spec: HamiltonianSpec, name: str = "H") -> ConservedQuantity:
    """Wrap a Hamiltonian as a ConservedQuantity (it conserves itself)."""
    return ConservedQuantity(name, spec.n, spec.value_qp, spec.gradient_qp)
