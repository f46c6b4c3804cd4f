import numpy as np
import pytest

from superint import (
    ConservedQuantity,
    DimensionMismatch,
    PhasePoint,
    SamplingError,
    SL2Realization,
    energy_quantity,
    independence_rank,
    involution_table,
    left_integral,
    make_garnier,
    make_sw,
    poisson_bracket,
    sample_regular_points,
    sw_extra_integral,
    universal_set,
)
from superint.integrals import _window_gradient, _window_value
from conftest import central_gradient

RNG = np.random.default_rng(31)


def coordinate(kind, index, n):
    def value(q, p):
        return (q if kind == "q" else p)[index]

    def gradient(q, p):
        dq, dp = np.zeros(n), np.zeros(n)
        (dq if kind == "q" else dp)[index] = 1.0
        return dq, dp

    return ConservedQuantity(f"{kind}{index}", n, value, gradient)


def test_canonical_pairs():
    x = PhasePoint(RNG.uniform(0.5, 1.0, 3), RNG.uniform(-1.0, 1.0, 3))
    q1, p1 = coordinate("q", 0, 3), coordinate("p", 0, 3)
    q2 = coordinate("q", 1, 3)
    assert poisson_bracket(q1, p1, x) == 1.0
    assert poisson_bracket(q1, q2, x) == 0.0
    assert poisson_bracket(p1, q1, x) == -1.0


def test_antisymmetry_is_exact():
    realization = SL2Realization([0.4, -0.2, 0.7])
    c2 = left_integral(realization, 2)
    c3 = left_integral(realization, 3)
    for x in sample_regular_points(10, 3, RNG):
        assert poisson_bracket(c2, c3, x) == -poisson_bracket(c3, c2, x)


def test_generator_scaling_bracket():
    realization = SL2Realization([0.4, -0.2, 0.7])

    def quantity(index, name):
        from superint import evaluate_sl2

        def value(q, p):
            v = evaluate_sl2(realization, PhasePoint(q, p))
            return (v.j_minus, v.j_plus, v.j3)[index]

        def gradient(q, p):
            v = evaluate_sl2(realization, PhasePoint(q, p))
            return v.grad_q[index], v.grad_p[index]

        return ConservedQuantity(name, 3, value, gradient)

    jp, j3 = quantity(1, "J+"), quantity(2, "J3")
    for x in sample_regular_points(20, 3, RNG):
        assert abs(poisson_bracket(j3, jp, x) - 2.0 * jp.value(x)) < 1e-9


def test_jacobi_identity_with_difference_gradients():
    """{F,{G,H}} + {G,{H,F}} + {H,{F,G}} via finite differences of the
    inner brackets stays at the finite-difference noise floor."""
    realization = SL2Realization([0.5, 0.3, -0.2])
    c2 = left_integral(realization, 2)
    c3 = left_integral(realization, 3)
    h = energy_quantity(make_sw("euclidean", mass=1.0, omega=0.8,
                                b_tilde=[0.5, 0.3, -0.2]))

    def outer(f, inner_pair, x):
        def inner_value(q, p):
            return poisson_bracket(inner_pair[0], inner_pair[1], PhasePoint(q, p))

        fq, fp = f.gradient(x)
        bq, bp = central_gradient(inner_value, x.q, x.p)
        return float(fq @ bp - bq @ fp)

    for x in sample_regular_points(5, 3, RNG):
        total = outer(c2, (c3, h), x) + outer(c3, (h, c2), x) + outer(h, (c2, c3), x)
        assert abs(total) < 1e-7


def test_involution_table_passes_for_oscillator():
    bt = RNG.uniform(0.0, 1.0, 4)
    spec = make_sw("euclidean", mass=1.2, omega=0.9, b_tilde=bt)
    table = involution_table(spec, universal_set(spec.realization), 20, rng=RNG)
    assert table.passed
    assert table.samples == 20
    # H against 5 integrals; {C^2,C^3,C^4} pairs; {C_2,C_3,C_4=C^4} pairs
    assert len(table.pairs) == 5 + 3 + 3


def test_involution_table_catches_corruption():
    bt = np.array([0.5, 0.8, 0.3])
    spec = make_sw("euclidean", mass=1.0, omega=1.0, b_tilde=bt)
    uni = universal_set(spec.realization)
    flipped = bt.copy()
    flipped[0] = -flipped[0]
    bad_b = spec.realization.b.copy()
    bad_b[0] = -bad_b[0]

    def value(q, p):
        return _window_value(bad_b, q, p, 0, 2)

    def gradient(q, p):
        return _window_gradient(bad_b, q, p, 0, 2)

    corrupted = ConservedQuantity("C^2", 3, value, gradient)
    bad_set = type(uni)((corrupted,) + uni.left[1:], uni.right, spec.realization)
    table = involution_table(spec, bad_set, 20, rng=RNG)
    assert not table.passed
    assert table.worst.max_normalized > 1e-3


def test_involution_table_minimal_dimension():
    spec = make_sw("euclidean", mass=1.0, omega=1.0, b_tilde=[0.4, 0.6])
    table = involution_table(spec, universal_set(spec.realization), 5, rng=RNG)
    assert len(table.pairs) == 1
    only = table.pairs[0]
    assert {only.name_a, only.name_b} == {"H", "C^2"}
    assert table.passed


def test_involution_table_threads_match_serial():
    spec = make_garnier("beltrami", mass=1.0, omega=0.8, delta=0.2,
                        b_tilde=[0.3, 0.5, 0.2], kappa=-0.5)
    uni = universal_set(spec.realization)
    serial = involution_table(spec, uni, 10, rng=123)
    threaded = involution_table(spec, uni, 10, rng=123, threads=3)
    assert serial == threaded


def test_independence_full_rank():
    bt = RNG.uniform(0.1, 1.0, 4)
    spec = make_sw("euclidean", mass=1.0, omega=1.0, b_tilde=bt)
    functions = [energy_quantity(spec), *universal_set(spec.realization).all]
    cert = independence_rank(functions, 20, rng=RNG)
    assert cert.numerical_rank == 6  # 2N - 2 for N = 4
    assert cert.passed


def test_independence_detects_duplicates():
    bt = RNG.uniform(0.1, 1.0, 4)
    spec = make_sw("euclidean", mass=1.0, omega=1.0, b_tilde=bt)
    uni = universal_set(spec.realization)
    functions = [energy_quantity(spec), *uni.all, uni.left[0]]
    cert = independence_rank(functions, 20, rng=RNG)
    assert cert.numerical_rank == len(functions) - 1
    assert not cert.passed


def test_independence_with_extra_reaches_ceiling():
    bt = np.array([0.4, 0.2, 0.6])
    spec = make_sw("euclidean", mass=1.0, omega=1.0, b_tilde=bt)
    uni = universal_set(spec.realization)
    h = energy_quantity(spec)
    extra1 = sw_extra_integral(0, mass=1.0, omega=1.0, b_tilde=bt)
    extra2 = sw_extra_integral(1, mass=1.0, omega=1.0, b_tilde=bt)
    cert = independence_rank([h, *uni.all, extra1], 20, rng=RNG)
    assert cert.numerical_rank == 5  # 2N - 1 for N = 3
    # the ceiling: one more conserved quantity cannot raise the rank further
    cert2 = independence_rank([h, *uni.all, extra1, extra2], 20, rng=RNG)
    assert cert2.numerical_rank == 5


def test_independence_rejects_mixed_dimensions():
    a = coordinate("q", 0, 2)
    b = coordinate("q", 0, 3)
    with pytest.raises(DimensionMismatch):
        independence_rank([a, b], 5, rng=RNG)


def test_sampling_respects_bounds_and_charts():
    pts = sample_regular_points(50, 3, RNG)
    for x in pts:
        assert np.all(np.abs(x.q) >= 0.2) and np.all(np.abs(x.q) <= 1.5)
        assert np.all(np.abs(x.p) <= 1.5)
    pts = sample_regular_points(50, 4, RNG, kappa=1.0, space="poincare")
    for x in pts:
        assert float(x.q @ x.q) < 1.0
    pts = sample_regular_points(50, 4, RNG, kappa=-0.5, space="beltrami")
    for x in pts:
        assert 1.0 - 0.5 * float(x.q @ x.q) > 0.0


def test_sampling_error_when_budget_exhausted():
    with pytest.raises(SamplingError):
        sample_regular_points(100, 3, RNG, max_draws=5)
    spec = make_sw("euclidean", mass=1.0, omega=1.0, b_tilde=[0.1, 0.1])
    with pytest.raises(SamplingError):
        involution_table(spec, universal_set(spec.realization), 0, rng=RNG)
