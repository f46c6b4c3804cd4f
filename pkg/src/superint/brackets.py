"""Numerical Poisson brackets, involution tables, and independence ranks.

The canonical bracket {f, g} = sum_i (df/dq_i dg/dp_i - dg/dq_i df/dp_i) is
evaluated from analytic gradients only, which keeps residual thresholds at
1e-9 meaningful.  Residuals are reported raw and normalized by
1 + |grad f| |grad g| so that large-coordinate samples do not fail spuriously.

Functional independence is certified by the numerical rank of the stacked
gradient rows at sampled points: independence is a generic-point property,
so the certificate takes the maximum rank over the sample.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ConservedQuantity, HamiltonianSpec, PhasePoint, energy_quantity
from .errors import DimensionMismatch, SamplingError
from .integrals import IntegralSet

Q_LOW, Q_HIGH = 0.2, 1.5
P_HIGH = 1.5
CHART_FILL = 0.8  # fraction of the squared chart radius the sampler may fill


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def poisson_bracket(f: ConservedQuantity, g: ConservedQuantity, x: PhasePoint) -> float:
    """{f, g} at x; antisymmetric by construction (computed once)."""
    fq, fp = f.gradient(x)
    gq, gp = g.gradient(x)
    return float(fq @ gp - gq @ fp)


def bracket_with_scale(f: ConservedQuantity, g: ConservedQuantity, x: PhasePoint):
    """(raw, normalized) bracket residual magnitudes at one point."""
    fq, fp = f.gradient(x)
    gq, gp = g.gradient(x)
    raw = abs(float(fq @ gp - gq @ fp))
    scale = np.sqrt(fq @ fq + fp @ fp) * np.sqrt(gq @ gq + gp @ gp)
    return raw, raw / (1.0 + scale)


def max_bracket_residual(f, g, points: Sequence[PhasePoint]):
    """Max raw and normalized |{f, g}| over a sample."""
    raw_max = norm_max = 0.0
    for x in points:
        raw, norm = bracket_with_scale(f, g, x)
        raw_max = max(raw_max, raw)
        norm_max = max(norm_max, norm)
    return raw_max, norm_max


def sample_regular_points(
    n_points: int,
    ndim: int,
    rng=0,
    *,
    kappa: float = 0.0,
    space: str = "euclidean",
    max_draws: int = 1000,
) -> list[PhasePoint]:
    """Random phase points away from coordinate planes and chart boundaries.

    |q_i| is uniform in [0.2, 1.5] (rescaled to fit inside a bounded chart)
    with random sign, p_i uniform in [-1.5, 1.5].
    """
    gen = _rng(rng)
    q2_limit = None
    if space == "poincare" and kappa > 0.0:
        q2_limit = 1.0 / kappa
    elif space in ("poincare", "beltrami") and kappa < 0.0:
        q2_limit = 1.0 / (-kappa)
    scale = 1.0
    if q2_limit is not None:
        scale = min(1.0, np.sqrt(CHART_FILL * q2_limit / (ndim * Q_HIGH ** 2)))
    points: list[PhasePoint] = []
    draws = 0
    while len(points) < n_points:
        if draws >= max_draws:
            raise SamplingError(
                f"no regular sample found in {max_draws} draws "
                f"(got {len(points)}/{n_points})"
            )
        draws += 1
        mag = gen.uniform(Q_LOW * scale, Q_HIGH * scale, size=ndim)
        sign = gen.choice([-1.0, 1.0], size=ndim)
        q = mag * sign
        p = gen.uniform(-P_HIGH, P_HIGH, size=ndim)
        if q2_limit is not None and float(q @ q) > 0.9 * q2_limit:
            continue
        points.append(PhasePoint(q, p))
    return points


def sample_for_spec(spec: HamiltonianSpec, n_points: int, rng=0) -> list[PhasePoint]:
    """Regular sample respecting the spec's space and curvature."""
    space = "euclidean"
    if spec.descriptor is not None:
        space = spec.descriptor.space
    kappa = float(spec.params.get("kappa", 0.0))
    return sample_regular_points(n_points, spec.n, rng, kappa=kappa, space=space)


@dataclass(frozen=True)
class PairResidual:
    name_a: str
    name_b: str
    max_raw: float
    max_normalized: float


@dataclass(frozen=True)
class BracketResidualTable:
    """Max |{A, B}| over a sample, for every asserted pair."""

    pairs: tuple[PairResidual, ...]
    samples: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(p.max_normalized < self.tolerance for p in self.pairs)

    @property
    def worst(self) -> PairResidual:
        return max(self.pairs, key=lambda p: p.max_normalized)


def involution_table(
    spec: HamiltonianSpec,
    integrals: IntegralSet,
    sample_points: int,
    *,
    rng=0,
    tolerance: float = 1e-9,
    threads: int = 1,
) -> BracketResidualTable:
    """Residuals of every asserted bracket: H against each universal
    integral, and all pairs within the left and within the right family.

    Cross-family pairs are not asserted (they need not vanish) and are not
    tabulated.
    """
    if sample_points < 1:
        raise SamplingError("sample_points must be >= 1")
    points = sample_for_spec(spec, sample_points, rng)
    h = energy_quantity(spec)
    left = list(integrals.left)
    # C_(N) coincides with C^(N): the right family in involution includes it.
    right = list(integrals.right) + [integrals.left[-1]]
    jobs: list[tuple[ConservedQuantity, ConservedQuantity]] = []
    for c in integrals.all:
        jobs.append((h, c))
    for fam in (left, right):
        for i in range(len(fam)):
            for j in range(i + 1, len(fam)):
                jobs.append((fam[i], fam[j]))

    def run(job):
        f, g = job
        raw, norm = max_bracket_residual(f, g, points)
        return PairResidual(f.name, g.name, raw, norm)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            pairs = tuple(ex.map(run, jobs))
    else:
        pairs = tuple(run(job) for job in jobs)
    return BracketResidualTable(pairs, sample_points, tolerance)


@dataclass(frozen=True)
class IndependenceCertificate:
    """Numerical rank of the stacked gradients at sampled points."""

    functions: tuple[str, ...]
    num_points: int
    singular_values: tuple[np.ndarray, ...]
    numerical_rank: int
    rank_tolerance: float

    @property
    def passed(self) -> bool:
        return self.numerical_rank == len(self.functions)


def independence_rank(
    functions: Sequence[ConservedQuantity],
    num_points: int,
    *,
    rng=0,
    rank_tolerance: float = 1e-8,
    kappa: float = 0.0,
    space: str = "euclidean",
    points: Optional[Sequence[PhasePoint]] = None,
    threads: int = 1,
) -> IndependenceCertificate:
    """Certify functional independence of a set of observables.

    The per-point rank counts singular values above rank_tolerance * sigma_max;
    the certificate takes the maximum over the sample (a single full-rank
    point establishes generic independence).
    """
    ndims = {f.ndim for f in functions}
    if len(ndims) != 1:
        raise DimensionMismatch(f"functions live on different dimensions: {ndims}")
    ndim = ndims.pop()
    if points is None:
        if num_points < 1:
            raise SamplingError("num_points must be >= 1")
        points = sample_regular_points(num_points, ndim, rng, kappa=kappa, space=space)

    def run(x: PhasePoint) -> np.ndarray:
        rows = np.empty((len(functions), 2 * ndim))
        for i, f in enumerate(functions):
            dq, dp = f.gradient(x)
            rows[i, :ndim] = dq
            rows[i, ndim:] = dp
        return np.linalg.svd(rows, compute_uv=False)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            sigmas = tuple(ex.map(run, points))
    else:
        sigmas = tuple(run(x) for x in points)
    rank = 0
    for s in sigmas:
        if s.size and s[0] > 0.0:
            rank = max(rank, int(np.sum(s > rank_tolerance * s[0])))
    return IndependenceCertificate(
        tuple(f.name for f in functions), len(points), sigmas, rank, rank_tolerance
    )
