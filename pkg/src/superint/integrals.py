"""Conserved quantities.

Two families are universal: for any Hamiltonian of the form h(J-, J+, J3)
the window Casimirs

    C^(m)  = sum_{1 <= i < j <= m} { (q_i p_j - q_j p_i)^2
             + b_i q_j^2/q_i^2 + b_j q_i^2/q_j^2 } + sum_{i <= m} b_i
    C_(m)  = the same sum over the last m sites

Poisson-commute with it, and each family is in involution.  C^(N) and C_(N)
coincide, so there are 2N-3 distinct integrals.

The remaining ("lost") integral of the two maximally superintegrable
families does not come from this construction; the oscillator-with-barriers
system has one per axis,

    I_i = p_i^2 + 2 m w^2 q_i^2 + m bt_i / q_i^2,

and the Coulomb-with-barriers system has, for every axis with bt_i = 0, a
generalized Laplace-Runge-Lenz component

    L_i = sum_l p_l (q_l p_i - q_i p_l) + k m q_i/|q|
          - m sum_{l != i} bt_l q_i / q_l^2.

Their curved counterparts (Poincare and Beltrami charts) are provided as
well; all quantities carry hand-derived analytic gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConservedQuantity, SL2Realization, guard_axes
from .errors import ConfigError, DimensionMismatch, DomainError, RangeError

_CHARTS = ("poincare", "beltrami")


def _check_chart(chart: str) -> str:
    if chart not in _CHARTS:
        raise ConfigError(f"chart must be one of {_CHARTS}, got {chart!r}")
    return chart


# ---------------------------------------------------------------------------
# Universal window Casimirs
# ---------------------------------------------------------------------------

def _window_value(b, q, p, lo, hi) -> float:
    qw, pw, bw = q[lo:hi], p[lo:hi], b[lo:hi]
    guard_axes(bw, qw)
    L = np.outer(qw, pw) - np.outer(pw, qw)
    val = 0.5 * float(np.sum(L * L))
    active = bw != 0.0
    if np.any(active):
        s2 = float(qw @ qw)
        qa2 = qw[active] ** 2
        val += float(np.sum(bw[active] * (s2 - qa2) / qa2))
    return val + float(np.sum(bw))


def _window_gradient(b, q, p, lo, hi):
    qw, pw, bw = q[lo:hi], p[lo:hi], b[lo:hi]
    guard_axes(bw, qw)
    L = np.outer(qw, pw) - np.outer(pw, qw)
    dqw = 2.0 * (L @ pw)
    dpw = -2.0 * (L @ qw)
    active = bw != 0.0
    if np.any(active):
        s2 = float(qw @ qw)
        t = np.zeros_like(qw)
        t[active] = bw[active] / qw[active] ** 2
        bsum = float(np.sum(t))
        dqw += 2.0 * qw * (bsum - t)
        dqw[active] -= 2.0 * bw[active] * (s2 - qw[active] ** 2) / qw[active] ** 3
    dq = np.zeros_like(q)
    dp = np.zeros_like(p)
    dq[lo:hi] = dqw
    dp[lo:hi] = dpw
    return dq, dp


def _window_quantity(realization: SL2Realization, lo: int, hi: int, name: str) -> ConservedQuantity:
    b = realization.b

    def value(q, p, _b=b, _lo=lo, _hi=hi):
        return _window_value(_b, q, p, _lo, _hi)

    def gradient(q, p, _b=b, _lo=lo, _hi=hi):
        return _window_gradient(_b, q, p, _lo, _hi)

    return ConservedQuantity(name, realization.n, value, gradient)


def left_integral(realization: SL2Realization, m: int) -> ConservedQuantity:
    """C^(m), the Casimir of the first m sites (2 <= m <= N)."""
    n = realization.n
    if not 2 <= m <= n:
        raise RangeError(f"left integral needs 2 <= m <= {n}, got {m}")
    return _window_quantity(realization, 0, m, f"C^{m}")


def right_integral(realization: SL2Realization, m: int) -> ConservedQuantity:
    """C_(m), the Casimir of the last m sites; C_(N) coincides with C^(N)."""
    n = realization.n
    if not 2 <= m <= n:
        raise RangeError(f"right integral needs 2 <= m <= {n}, got {m}")
    return _window_quantity(realization, n - m, n, f"C_{m}")


@dataclass(frozen=True)
class IntegralSet:
    """The 2N-3 distinct universal integrals of one realization.

    `left` holds C^(2)..C^(N); `right` holds C_(2)..C_(N-1) (C_(N) is the
    same function as C^(N) and is stored once, in `left`).
    """

    left: tuple[ConservedQuantity, ...]
    right: tuple[ConservedQuantity, ...]
    realization: SL2Realization

    def __post_init__(self):
        n = self.realization.n
        if len(self.left) != n - 1 or len(self.right) != max(n - 2, 0):
            raise DimensionMismatch(
                f"expected {n - 1} left and {n - 2} right integrals, "
                f"got {len(self.left)} and {len(self.right)}"
            )

    @property
    def all(self) -> tuple[ConservedQuantity, ...]:
        return self.left + self.right

    @property
    def count(self) -> int:
        return len(self.left) + len(self.right)


def universal_set(realization: SL2Realization) -> IntegralSet:
    """Both families for sites 1..N; requires N >= 2."""
    n = realization.n
    if n < 2:
        raise RangeError(f"universal integrals need N >= 2, got N = {n}")
    left = tuple(left_integral(realization, m) for m in range(2, n + 1))
    right = tuple(right_integral(realization, m) for m in range(2, n))
    return IntegralSet(left, right, realization)


# ---------------------------------------------------------------------------
# Oscillator extras (one per axis)
# ---------------------------------------------------------------------------

def _check_axis(axis: int, n: int) -> None:
    if not 0 <= axis < n:
        raise RangeError(f"axis must be in [0, {n}), got {axis}")


def _axis_barrier_guard(axis: int, bt_i: float, q: np.ndarray) -> None:
    if bt_i != 0.0 and abs(q[axis]) < 1e-10:
        raise DomainError(f"q_{axis + 1} on its coordinate plane with bt_{axis + 1} != 0")


def sw_extra_integral(axis: int, *, mass: float, omega: float, b_tilde) -> ConservedQuantity:
    """Flat oscillator extra I_i = p_i^2 + 2 m w^2 q_i^2 + m bt_i / q_i^2."""
    bt = np.asarray(b_tilde, dtype=float)
    n = bt.size
    _check_axis(axis, n)
    m, w2, bti = float(mass), float(omega) ** 2, float(bt[axis])

    def value(q, p):
        _axis_barrier_guard(axis, bti, q)
        val = p[axis] ** 2 + 2.0 * m * w2 * q[axis] ** 2
        if bti != 0.0:
            val += m * bti / q[axis] ** 2
        return float(val)

    def gradient(q, p):
        _axis_barrier_guard(axis, bti, q)
        dq = np.zeros(n)
        dp = np.zeros(n)
        dq[axis] = 4.0 * m * w2 * q[axis]
        if bti != 0.0:
            dq[axis] -= 2.0 * m * bti / q[axis] ** 3
        dp[axis] = 2.0 * p[axis]
        return dq, dp

    return ConservedQuantity(f"I_{axis + 1}", n, value, gradient)


def curved_sw_extra_integral(
    axis: int, *, mass: float, omega: float, b_tilde, kappa: float, chart: str
) -> ConservedQuantity:
    """Curved oscillator extra on the chosen chart.

    Beltrami:  (p_i + kp (q.p) q_i)^2 + 2 m w^2 q_i^2 + m bt_i / q_i^2
    Poincare:  (p_i (1 - kp q^2) + 2 kp (q.p) q_i)^2
               + 8 m w^2 q_i^2 / (1 - kp q^2)^2
               + m bt_i (1 - kp q^2)^2 / q_i^2
    """
    _check_chart(chart)
    bt = np.asarray(b_tilde, dtype=float)
    n = bt.size
    _check_axis(axis, n)
    m, w2, bti, kp = float(mass), float(omega) ** 2, float(bt[axis]), float(kappa)
    i = axis

    if chart == "beltrami":

        def value(q, p):
            _axis_barrier_guard(i, bti, q)
            u = p[i] + kp * (q @ p) * q[i]
            val = u * u + 2.0 * m * w2 * q[i] ** 2
            if bti != 0.0:
                val += m * bti / q[i] ** 2
            return float(val)

        def gradient(q, p):
            _axis_barrier_guard(i, bti, q)
            d = float(q @ p)
            u = p[i] + kp * d * q[i]
            dq = 2.0 * u * kp * (p * q[i])
            dq[i] += 2.0 * u * kp * d + 4.0 * m * w2 * q[i]
            if bti != 0.0:
                dq[i] -= 2.0 * m * bti / q[i] ** 3
            dp = 2.0 * u * kp * q[i] * q
            dp[i] += 2.0 * u
            return dq, dp

    else:  # poincare

        def value(q, p):
            _axis_barrier_guard(i, bti, q)
            a = 1.0 - kp * float(q @ q)
            u = p[i] * a + 2.0 * kp * float(q @ p) * q[i]
            val = u * u + 8.0 * m * w2 * q[i] ** 2 / a ** 2
            if bti != 0.0:
                val += m * bti * a ** 2 / q[i] ** 2
            return float(val)

        def gradient(q, p):
            _axis_barrier_guard(i, bti, q)
            d = float(q @ p)
            a = 1.0 - kp * float(q @ q)
            u = p[i] * a + 2.0 * kp * d * q[i]
            # d(u)/dq_j = -2 kp q_j p_i + 2 kp (p_j q_i + d delta_ij)
            du_dq = -2.0 * kp * q * p[i] + 2.0 * kp * p * q[i]
            dq = 2.0 * u * du_dq
            dq[i] += 2.0 * u * 2.0 * kp * d
            dq += 8.0 * m * w2 * 4.0 * kp * q[i] ** 2 * q / a ** 3
            dq[i] += 8.0 * m * w2 * 2.0 * q[i] / a ** 2
            if bti != 0.0:
                dq += -4.0 * m * bti * kp * a * q / q[i] ** 2
                dq[i] += -2.0 * m * bti * a ** 2 / q[i] ** 3
            dp = 2.0 * u * 2.0 * kp * q[i] * q
            dp[i] += 2.0 * u * a
            return dq, dp

    return ConservedQuantity(f"I_{axis + 1}^{chart[0].upper()}", n, value, gradient)


# ---------------------------------------------------------------------------
# Coulomb extras (Laplace-Runge-Lenz type, valid only where bt_i = 0)
# ---------------------------------------------------------------------------

def _radius(q: np.ndarray) -> float:
    r = float(np.sqrt(q @ q))
    if r < 1e-10:
        raise DomainError("phase point at the origin of the attractive center")
    return r


def _barrier_sum(bt, q, axis):
    """sum_{l != axis} bt_l / q_l^2 plus the bt_l / q_l^3 terms it needs.

    Returns (tsum, cube) with cube_l = bt_l / q_l^3 for active l != axis and
    zero elsewhere, so callers never divide by an inactive q_l.
    """
    mask = bt != 0.0
    mask[axis] = False
    cube = np.zeros_like(q)
    tsum = 0.0
    if np.any(mask):
        guard_axes(np.where(mask, bt, 0.0), q)
        tsum = float(np.sum(bt[mask] / q[mask] ** 2))
        cube[mask] = bt[mask] / q[mask] ** 3
    return tsum, cube


def kc_extra_integral(axis: int, *, mass: float, k: float, b_tilde) -> ConservedQuantity:
    """Flat Coulomb extra L_i; requires bt_i = 0 on the chosen axis."""
    bt = np.asarray(b_tilde, dtype=float)
    _check_axis(axis, bt.size)
    if bt[axis] != 0.0:
        raise ConfigError(
            f"L_{axis + 1} is conserved only when bt_{axis + 1} = 0, got {bt[axis]}"
        )
    return _kc_extra_unchecked(axis, mass=mass, k=k, b_tilde=bt)


def _kc_extra_unchecked(axis: int, *, mass: float, k: float, b_tilde) -> ConservedQuantity:
    """L_i built from the formula regardless of bt_i (testing/mutation path)."""
    bt = np.asarray(b_tilde, dtype=float)
    n = bt.size
    _check_axis(axis, n)
    m, kc = float(mass), float(k)
    i = axis

    def value(q, p):
        r = _radius(q)
        tsum, _ = _barrier_sum(bt, q, i)
        s = float(q @ p) * p[i] - q[i] * float(p @ p)
        return float(s + kc * m * q[i] / r - m * q[i] * tsum)

    def gradient(q, p):
        r = _radius(q)
        tsum, cube = _barrier_sum(bt, q, i)
        dq = p * p[i] + kc * m * (-q[i] * q / r ** 3)
        dq[i] += -float(p @ p) + kc * m / r - m * tsum
        dq += 2.0 * m * q[i] * cube
        dp = q * p[i] - 2.0 * q[i] * p
        dp[i] += float(q @ p)
        return dq, dp

    return ConservedQuantity(f"L_{axis + 1}", n, value, gradient)


def curved_kc_extra_integral(
    axis: int, *, mass: float, k: float, b_tilde, kappa: float, chart: str
) -> ConservedQuantity:
    """Curved Coulomb extra on the chosen chart; requires bt_i = 0."""
    _check_chart(chart)
    bt = np.asarray(b_tilde, dtype=float)
    _check_axis(axis, bt.size)
    if bt[axis] != 0.0:
        raise ConfigError(
            f"L_{axis + 1} is conserved only when bt_{axis + 1} = 0, got {bt[axis]}"
        )
    return _curved_kc_extra_unchecked(
        axis, mass=mass, k=k, b_tilde=bt, kappa=kappa, chart=chart
    )


def _curved_kc_extra_unchecked(axis, *, mass, k, b_tilde, kappa, chart):
    bt = np.asarray(b_tilde, dtype=float)
    n = bt.size
    _check_axis(axis, n)
    m, kc, kp = float(mass), float(k), float(kappa)
    i = axis

    if chart == "beltrami":

        def value(q, p):
            r = _radius(q)
            tsum, _ = _barrier_sum(bt, q, i)
            dd = float(q @ p)
            qq = float(q @ q)
            pp = float(p @ p)
            s = dd * p[i] * (1.0 + kp * qq) - q[i] * (pp + kp * dd * dd)
            return float(s + kc * m * q[i] / r - m * q[i] * tsum)

        def gradient(q, p):
            r = _radius(q)
            tsum, cube = _barrier_sum(bt, q, i)
            dd = float(q @ p)
            qq = float(q @ q)
            pp = float(p @ p)
            one = 1.0 + kp * qq
            dq = p * p[i] * one + 2.0 * kp * dd * p[i] * q - 2.0 * kp * dd * q[i] * p
            dq[i] += -(pp + kp * dd * dd)
            dq += kc * m * (-q[i] * q / r ** 3)
            dq[i] += kc * m / r - m * tsum
            dq += 2.0 * m * q[i] * cube
            dp = q * p[i] * one - q[i] * (2.0 * p + 2.0 * kp * dd * q)
            dp[i] += dd * one
            return dq, dp

    else:  # poincare

        def value(q, p):
            r = _radius(q)
            tsum, _ = _barrier_sum(bt, q, i)
            dd = float(q @ p)
            qq = float(q @ q)
            pp = float(p @ p)
            a = 1.0 - kp * qq
            s = a * (dd * p[i] - q[i] * pp) + 2.0 * kp * dd * (qq * p[i] - q[i] * dd)
            return float(s + 0.5 * kc * m * q[i] / r - m * q[i] * a * tsum)

        def gradient(q, p):
            r = _radius(q)
            tsum, cube = _barrier_sum(bt, q, i)
            dd = float(q @ p)
            qq = float(q @ q)
            pp = float(p @ p)
            a = 1.0 - kp * qq
            dq = (
                -2.0 * kp * q * (dd * p[i] - q[i] * pp)
                + a * p * p[i]
                + 2.0 * kp * p * (qq * p[i] - q[i] * dd)
                + 2.0 * kp * dd * (2.0 * q * p[i] - q[i] * p)
            )
            dq[i] += -a * pp - 2.0 * kp * dd * dd
            dq += 0.5 * kc * m * (-q[i] * q / r ** 3)
            dq[i] += 0.5 * kc * m / r - m * a * tsum
            dq += 2.0 * m * kp * q[i] * q * tsum + 2.0 * m * q[i] * a * cube
            dp = (
                a * (q * p[i] - 2.0 * q[i] * p)
                + 2.0 * kp * (q * (qq * p[i] - q[i] * dd) + dd * (-q[i] * q))
            )
            dp[i] += a * dd + 2.0 * kp * dd * qq
            return dq, dp

    return ConservedQuantity(f"L_{axis + 1}^{chart[0].upper()}", n, value, gradient)
