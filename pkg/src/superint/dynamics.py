"""Time integration of Hamilton's equations and orbit-closure detection.

The default method is the 2-stage Gauss-Legendre implicit Runge-Kutta
scheme (order 4).  It is symplectic for arbitrary smooth Hamiltonians,
which matters here because the curved kinetic terms couple q and p, so no
explicit splitting applies.  Stages are solved by fixed-point iteration
seeded with the previous step's stage values.  A classical RK4 is provided
as a non-symplectic reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import ConservedQuantity, HamiltonianSpec, PhasePoint
from .errors import DomainError, InsufficientData, NonConvergence, SingularApproach

_SQRT3 = math.sqrt(3.0)
_A11, _A12 = 0.25, 0.25 - _SQRT3 / 6.0
_A21, _A22 = 0.25 + _SQRT3 / 6.0, 0.25

METHODS = ("gl2", "rk4")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "gl2"
    step: float = 1e-3
    fixed_point_tol: float = 1e-13
    max_fixed_point_iters: int = 100
    guard_radius: float = 1e-6
    # A stage-iteration failure this close to a guarded set is reported as a
    # singular approach (the stiffness is the singularity), not NonConvergence.
    approach_horizon: float = 0.1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.step <= 0.0 or self.fixed_point_tol <= 0.0 or self.guard_radius <= 0.0:
            raise ValueError("step, fixed_point_tol and guard_radius must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Discrete trajectory with monitor time series and normalized drifts.

    drift[name] = max_t |F(t) - F(0)| / (1 + |F(0)|).
    """

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    monitors: dict[str, np.ndarray] = field(default_factory=dict)
    drift: dict[str, float] = field(default_factory=dict)

    @property
    def n_states(self) -> int:
        return self.times.size

    def state(self, i: int) -> PhasePoint:
        return PhasePoint(self.q[i], self.p[i])


def _min_clearance(spec: HamiltonianSpec, q: np.ndarray) -> float:
    clearance = math.inf
    b = spec.realization.b
    active = b != 0.0
    if np.any(active):
        clearance = float(np.min(np.abs(q[active])))
    for guard in spec.guards:
        clearance = min(clearance, guard.clearance(q))
    return clearance


def _check_guards(spec: HamiltonianSpec, q: np.ndarray, radius: float, t: float, last):
    b = spec.realization.b
    active = b != 0.0
    if np.any(active) and float(np.min(np.abs(q[active]))) <= radius:
        raise SingularApproach(
            f"coordinate-plane barrier reached at t = {t:.6g}", time=t, state=last
        )
    for guard in spec.guards:
        if guard.clearance(q) <= radius:
            raise SingularApproach(
                f"{guard.label} reached at t = {t:.6g}", time=t, state=last
            )


def _gl2_step(f, q, p, h, k_seed, tol, max_iters):
    k1q, k1p, k2q, k2p = k_seed
    for _ in range(max_iters):
        y1q = q + h * (_A11 * k1q + _A12 * k2q)
        y1p = p + h * (_A11 * k1p + _A12 * k2p)
        y2q = q + h * (_A21 * k1q + _A22 * k2q)
        y2p = p + h * (_A21 * k1p + _A22 * k2p)
        n1q, n1p = f(y1q, y1p)
        n2q, n2p = f(y2q, y2p)
        delta = max(
            float(np.max(np.abs(n1q - k1q))),
            float(np.max(np.abs(n1p - k1p))),
            float(np.max(np.abs(n2q - k2q))),
            float(np.max(np.abs(n2p - k2p))),
        )
        k1q, k1p, k2q, k2p = n1q, n1p, n2q, n2p
        if delta <= tol:
            qn = q + 0.5 * h * (k1q + k2q)
            pn = p + 0.5 * h * (k1p + k2p)
            return qn, pn, (k1q, k1p, k2q, k2p)
    raise NonConvergence(
        f"stage fixed point did not reach {tol:g} in {max_iters} iterations"
    )


def _rk4_step(f, q, p, h):
    k1q, k1p = f(q, p)
    k2q, k2p = f(q + 0.5 * h * k1q, p + 0.5 * h * k1p)
    k3q, k3p = f(q + 0.5 * h * k2q, p + 0.5 * h * k2p)
    k4q, k4p = f(q + h * k3q, p + h * k3p)
    qn = q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
    pn = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    return qn, pn


def integrate(
    spec: HamiltonianSpec,
    x0: PhasePoint,
    t_final: float,
    cfg: IntegratorConfig,
    monitors: Sequence[ConservedQuantity] = (),
) -> Trajectory:
    """Integrate Hamilton's equations qdot = dH/dp, pdot = -dH/dq.

    Runs ceil(t_final / step) fixed-size steps (none for t_final = 0) and
    records every accepted state.  Halts with SingularApproach if a guarded
    singularity comes within the guard radius.
    """
    if t_final < 0.0:
        raise ValueError("t_final must be nonnegative")
    spec.realization.check_point(x0)
    _check_guards(spec, x0.q, cfg.guard_radius, 0.0, x0)

    def f(q, p):
        dq, dp = spec.gradient_qp(q, p)
        return dp, -dq

    n_steps = int(math.ceil(t_final / cfg.step - 1e-12)) if t_final > 0.0 else 0
    h = cfg.step
    n = x0.n
    qs = np.empty((n_steps + 1, n))
    ps = np.empty((n_steps + 1, n))
    qs[0], ps[0] = x0.q, x0.p
    q, p = x0.q.copy(), x0.p.copy()

    k_seed = None
    if cfg.method == "gl2" and n_steps > 0:
        dq0, dp0 = f(q, p)
        k_seed = (dq0.copy(), dp0.copy(), dq0.copy(), dp0.copy())

    last_safe = x0
    for step_idx in range(1, n_steps + 1):
        t = step_idx * h
        try:
            if cfg.method == "gl2":
                q, p, k_seed = _gl2_step(
                    f, q, p, h, k_seed, cfg.fixed_point_tol, cfg.max_fixed_point_iters
                )
            else:
                q, p = _rk4_step(f, q, p, h)
        except DomainError as exc:
            err = SingularApproach(
                f"singular evaluation during step to t = {t:.6g}: {exc}",
                time=(step_idx - 1) * h,
                state=last_safe,
            )
            err.trajectory = _finish(
                qs[:step_idx], ps[:step_idx], h, monitors
            )
            raise err
        except NonConvergence as exc:
            if _min_clearance(spec, last_safe.q) >= cfg.approach_horizon:
                raise
            err = SingularApproach(
                f"stage iteration broke down near a guarded singularity "
                f"at t = {t:.6g}: {exc}",
                time=(step_idx - 1) * h,
                state=last_safe,
            )
            err.trajectory = _finish(qs[:step_idx], ps[:step_idx], h, monitors)
            raise err
        _check_state(q, p, t, last_safe)
        try:
            _check_guards(spec, q, cfg.guard_radius, t, last_safe)
        except SingularApproach as err:
            err.trajectory = _finish(qs[:step_idx], ps[:step_idx], h, monitors)
            raise
        qs[step_idx], ps[step_idx] = q, p
        last_safe = PhasePoint(q.copy(), p.copy())
    return _finish(qs, ps, h, monitors)


def _check_state(q, p, t, last_safe):
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise SingularApproach(
            f"state became non-finite at t = {t:.6g}", time=t, state=last_safe
        )


def _finish(qs, ps, h, monitors) -> Trajectory:
    n_states = qs.shape[0]
    times = h * np.arange(n_states)
    series: dict[str, np.ndarray] = {}
    drift: dict[str, float] = {}
    for mon in monitors:
        vals = np.empty(n_states)
        for i in range(n_states):
            vals[i] = mon.value_fn(qs[i], ps[i])
        series[mon.name] = vals
        f0 = vals[0]
        drift[mon.name] = float(np.max(np.abs(vals - f0)) / (1.0 + abs(f0)))
    return Trajectory(times, qs.copy(), ps.copy(), series, drift)


@dataclass(frozen=True)
class ClosureReport:
    """First-return analysis of a trajectory against its initial state."""

    period_estimate: Optional[float]
    closure_distance: float
    is_closed: bool


def detect_closure(traj: Trajectory, tol: float) -> ClosureReport:
    """Locate returns to the initial state after an excursion.

    Squared phase distances to the initial state are refined around each
    discrete local minimum by parabolic interpolation, so the reported
    closure distance is not limited by the sampling stride.  The period
    estimate is the time of the first return whose distance is comparable
    to the best one (None when the orbit does not close at `tol`).
    """
    if traj.n_states < 5:
        raise InsufficientData("trajectory too short for closure analysis")
    dq = traj.q - traj.q[0]
    dp = traj.p - traj.p[0]
    d2 = np.einsum("ij,ij->i", dq, dq) + np.einsum("ij,ij->i", dp, dp)
    d2max = float(np.max(d2))
    if d2max <= 0.0:
        raise InsufficientData("orbit never leaves the initial state")
    beyond = np.flatnonzero(d2 >= 0.25 * d2max)
    start = int(beyond[0])
    if start >= traj.n_states - 2:
        raise InsufficientData("no samples after the excursion")

    candidates = []
    for i in range(max(start, 1), traj.n_states - 1):
        if d2[i] <= d2[i - 1] and d2[i] <= d2[i + 1]:
            candidates.append(i)
    if d2[-1] < 0.25 * d2max:
        candidates.append(traj.n_states - 1)
    if not candidates:
        raise InsufficientData("no candidate return after the excursion")

    refined = []
    for i in candidates:
        if 0 < i < traj.n_states - 1:
            denom = d2[i + 1] - 2.0 * d2[i] + d2[i - 1]
            if denom > 0.0:
                off = 0.5 * (d2[i - 1] - d2[i + 1]) / denom
                off = float(np.clip(off, -1.0, 1.0))
                t_star = traj.times[i] + off * (traj.times[1] - traj.times[0])
                d2_star = d2[i] - 0.125 * (d2[i + 1] - d2[i - 1]) ** 2 / denom
                refined.append((t_star, max(float(d2_star), 0.0)))
                continue
        refined.append((float(traj.times[i]), float(d2[i])))

    best = min(r[1] for r in refined)
    best_dist = math.sqrt(best)
    is_closed = best_dist <= tol
    period = None
    if is_closed:
        for t_star, d2_star in refined:
            if math.sqrt(d2_star) <= max(2.0 * best_dist, tol):
                period = t_star
                break
    return ClosureReport(period, best_dist, is_closed)
