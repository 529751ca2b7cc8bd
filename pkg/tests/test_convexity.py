import numpy as np
import pytest

from condgeo.convexity import (
    CONVEX,
    VIOLATED,
    ScalarTrace,
    check_discrete_convexity,
    log_alpha_second_derivative,
    log_alpha_trace,
    sd2_lower_bound_check,
    sd2_lower_bound_margins,
    sd2_upper,
    verify_selfconvexity,
)
from condgeo.errors import GridTooIrregularError, InputError, NotConvergedError, SingularInputError
from condgeo.geodesic import GeodesicOptions, minimize_path
from condgeo.matcore import alpha, log_alpha, random_endpoint_pair, random_matrix


def _trace(f, n=41):
    t = np.linspace(-1, 1, n)
    return ScalarTrace(t, f(t))


def test_parabola_is_convex_with_second_difference_two():
    rep = check_discrete_convexity(_trace(lambda t: t**2))
    assert rep.verdict == CONVEX and rep.convex
    assert rep.min_second_difference == pytest.approx(2.0, rel=1e-9)


def test_negative_parabola_is_violated():
    rep = check_discrete_convexity(_trace(lambda t: -(t**2)))
    assert rep.verdict == VIOLATED
    assert rep.min_second_difference == pytest.approx(-2.0, rel=1e-9)


def test_reversed_trace_has_same_minimum():
    rng = np.random.default_rng(1)
    v = np.cumsum(rng.standard_normal(30))
    t = np.linspace(0, 3, 30)
    fwd = check_discrete_convexity(ScalarTrace(t, v))
    bwd = check_discrete_convexity(ScalarTrace(t, v[::-1]))
    assert fwd.min_second_difference == pytest.approx(bwd.min_second_difference, rel=1e-12)


def test_tolerance_scales_with_trace_values():
    rep = check_discrete_convexity(_trace(lambda t: 100 + t**2), tol=1e-4)
    assert rep.tol == pytest.approx(1e-4 * (1 + 101))
    assert rep.tol_requested == 1e-4


def test_irregular_grid_is_rejected():
    t = np.array([0.0, 1.0, 2.1, 3.0])
    with pytest.raises(GridTooIrregularError):
        check_discrete_convexity(ScalarTrace(t, t**2))


def test_trace_validation():
    with pytest.raises(InputError):
        ScalarTrace([0.0, 0.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(InputError):
        check_discrete_convexity(ScalarTrace([0.0, 1.0], [0.0, 1.0]))


# sd2_upper


def test_sd2_of_square_is_two():
    est = sd2_upper(lambda x: x * x, 0.7)
    assert est.value == pytest.approx(2.0, rel=1e-6)
    assert np.allclose(est.quotients, 2.0, rtol=1e-6)
    assert not est.diverging


def test_sd2_of_linear_function_is_zero():
    est = sd2_upper(lambda x: 3 * x - 1, 0.2)
    assert abs(est.value) <= 1e-6
    assert not est.diverging


def test_sd2_of_absolute_value_diverges_at_kink():
    hs = [0.1 * 2.0**-j for j in range(13)]
    est = sd2_upper(abs, 0.0, hs)
    assert est.value == pytest.approx(2 / hs[-1])
    assert est.diverging


def test_sd2_rejects_bad_ladder():
    with pytest.raises(InputError):
        sd2_upper(abs, 0.0, [0.1, 0.2])


@pytest.mark.parametrize("field", ["real", "complex"])
def test_sd2_of_log_alpha_matches_analytic_second_derivative(field):
    rng = np.random.default_rng(2)
    for _ in range(5):
        A = random_matrix(rng, 3, 4, field)
        E = random_matrix(rng, 3, 4, field)
        exact = log_alpha_second_derivative(A, E)
        est = sd2_upper(lambda t: log_alpha(A + t * E), 0.0, [1e-3, 5e-4, 2.5e-4])
        assert abs(est.quotients[-1] - exact) <= 1e-4 * max(1.0, abs(exact))


# inequality behind the lower bound


def test_margin_vanishes_at_zero_step():
    rng = np.random.default_rng(3)
    A, B = random_matrix(rng, 3, 3, "complex"), random_matrix(rng, 3, 3, "complex")
    m = sd2_lower_bound_margins(A, B, [0.0])
    assert abs(m[0]) <= 1e-12 * alpha(A)


def test_margin_for_identity_and_unit_entry():
    h = 0.1
    A, B = np.eye(2), np.diag([1.0, 0.0])
    # A +- hB and A A^* + h^2 B B^* are diagonal, so everything is explicit
    direct = 1 / min(1 + h, 1) ** 2 + 1 / min(1 - h, 1) ** 2 - 2 / min(1 + h * h, 1)
    m = sd2_lower_bound_margins(A, B, [h])[0]
    assert m == pytest.approx(direct, rel=1e-12)
    assert m > 0
    assert sd2_lower_bound_check(A, B, [h])


def test_inequality_holds_on_random_draws():
    rng = np.random.default_rng(4)
    for k in range(200):
        field = "real" if k % 2 else "complex"
        n = int(rng.integers(1, 4))
        m = n + int(rng.integers(0, 3))
        A, B = random_matrix(rng, n, m, field), random_matrix(rng, n, m, field)
        assert sd2_lower_bound_check(A, B, rng.uniform(0, 0.5, 3))


def test_singular_evaluation_point_is_reported():
    with pytest.raises(SingularInputError):
        sd2_lower_bound_margins(np.eye(2), np.diag([0.0, 1.0]), [1.0])


# verdicts on geodesics


def test_exponential_geodesic_has_linear_trace():
    res = minimize_path(np.array([[1.0]]), np.array([[np.e]]), 64)
    rep = verify_selfconvexity(res)
    assert rep.convex
    assert abs(rep.min_second_difference) <= 1e-6
    tr = log_alpha_trace(res.path)
    # times are trapezoid lengths, which carry the quadrature error
    assert np.allclose(tr.values, -2 * tr.times, atol=1e-4)


def test_diagonal_geodesic_is_convex():
    res = minimize_path(np.diag([3.0, 0.5]), np.diag([0.7, 2.0]), 64)
    assert verify_selfconvexity(res).convex


def test_seeded_wide_geodesic_is_convex():
    A, B = random_endpoint_pair(np.random.default_rng(7), 2, 3, "real")
    res = minimize_path(A, B, 64)
    assert verify_selfconvexity(res, 1e-4).convex


def test_verdict_ignores_constant_rescaling_of_alpha():
    A, B = random_endpoint_pair(np.random.default_rng(7), 2, 3, "real")
    tr = log_alpha_trace(minimize_path(A, B, 64).path)
    base = check_discrete_convexity(tr)
    for c in (1e-3, 5.0):
        shifted = check_discrete_convexity(ScalarTrace(tr.times, tr.values + np.log(c)))
        assert shifted.verdict == base.verdict
        assert shifted.min_second_difference == pytest.approx(base.min_second_difference, abs=1e-9)


def test_unconverged_result_is_refused():
    rng = np.random.default_rng(5)
    A, B = random_endpoint_pair(rng, 3, 3, "real")
    res = minimize_path(A, B, 32, GeodesicOptions(max_iter=1))
    assert not res.converged
    with pytest.raises(NotConvergedError):
        verify_selfconvexity(res)
