import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vstdeconv.core import ConfigurationError, ConvergenceWarning, DimensionError, NumericalError
from vstdeconv.dictionary import make_dictionary
from vstdeconv.prox import (
    ABS,
    InnerLoopConfig,
    Penalty,
    project_C_prime,
    project_positive,
    prox_f2,
    prox_weighted_penalty,
    reflect,
    scalar_prox,
)

TIGHT = InnerLoopConfig(max_inner_iters=20000, tol=1e-13)

# psi(a) = a^2 / 2 + |a|: prox is (|b| - d) / (1 + d) past the dead zone
ELASTIC = Penalty("generic", psi=lambda a: 0.5 * a * a + a, dpsi=lambda a: a + 1.0, dpsi0=1.0)


def soft(b, d):
    return np.sign(b) * np.maximum(np.abs(b) - d, 0.0)


def dense_synthesis(D):
    return np.stack([D.synthesize(e).ravel() for e in np.eye(D.L)], axis=1)


def dual_gradient_oracle(alpha, delta, D, iters=40000):
    """min delta*|u|_1 + 1/2|u - alpha|^2 s.t. Phi u >= 0, by projected dual ascent on a dense Phi."""
    Phi = dense_synthesis(D)
    nu = np.zeros(Phi.shape[0])
    step = 1.0 / D.A
    for _ in range(iters):
        u = soft(alpha + Phi.T @ nu, delta)
        nu = np.maximum(nu - step * (Phi @ u), 0.0)
    return soft(alpha + Phi.T @ nu, delta)


def projected_coordinate_descent(alpha, delta, sweeps=50):
    """Coordinatewise minimization of delta*|u| + 1/2 (u - a)^2 over u >= 0 on a fine grid."""
    u = np.maximum(alpha, 0.0)
    for _ in range(sweeps):
        for i in range(u.size):
            lo, hi = 0.0, max(alpha[i], 0.0) + 1.0
            for _ in range(80):  # ternary search on a convex 1-D function
                m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
                f1 = delta * m1 + 0.5 * (m1 - alpha[i]) ** 2
                f2 = delta * m2 + 0.5 * (m2 - alpha[i]) ** 2
                if f1 <= f2:
                    hi = m2
                else:
                    lo = m1
            u[i] = 0.5 * (lo + hi)
    return u


def J(p, alpha, delta):
    return delta * np.sum(np.abs(p)) + 0.5 * np.sum((p - alpha) ** 2)


# scalar prox -------------------------------------------------------------


def test_scalar_prox_examples():
    assert scalar_prox(0.3, 0.5) == 0.0
    assert scalar_prox(-2.0, 0.5) == -1.5
    assert scalar_prox(7.0, 1e-12) == pytest.approx(7.0, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(1e-6, 10))
def test_scalar_prox_abs_is_soft_threshold(beta, delta):
    assert scalar_prox(beta, delta) == float(np.sign(beta) * max(abs(beta) - delta, 0.0))


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(1e-3, 10))
def test_scalar_prox_monotone_and_shrinking(b1, b2, delta):
    for psi in (ABS, ELASTIC):
        p1, p2 = scalar_prox(b1, delta, psi), scalar_prox(b2, delta, psi)
        assert abs(p1) <= abs(b1) + 1e-12
        if b1 <= b2:
            assert p1 <= p2 + 1e-12


def test_generic_penalty_closed_form(rng):
    b = rng.uniform(-10, 10, 200)
    d = 0.7
    expected = np.sign(b) * np.maximum(np.abs(b) - d, 0.0) / (1 + d)
    np.testing.assert_allclose(prox_weighted_penalty(b, d, ELASTIC), expected, atol=1e-12)


def test_generic_penalty_bracket_failure():
    bad = Penalty("generic", psi=lambda a: a, dpsi=lambda a: 1.0 - 10.0 * a, dpsi0=1.0)
    with pytest.raises(NumericalError):
        scalar_prox(5.0, 1.0, bad)


def test_penalty_validation():
    with pytest.raises(ConfigurationError):
        Penalty("huber")
    with pytest.raises(ConfigurationError):
        Penalty("generic", psi=abs, dpsi=abs, dpsi0=0.0)
    with pytest.raises(ConfigurationError):
        scalar_prox(1.0, 0.0)


def test_penalty_properties():
    a = np.linspace(0, 5, 50)
    for psi in (ABS, ELASTIC):
        assert psi(0.0) == 0.0
        np.testing.assert_array_equal(psi(a), psi(-a))
        assert np.all(np.diff(psi(a)) >= 0)


# coordinatewise prox ---------------------------------------------------------


def test_weighted_prox_examples(backend):
    np.testing.assert_array_equal(prox_weighted_penalty(np.zeros(5), 0.8), np.zeros(5))
    np.testing.assert_array_equal(prox_weighted_penalty(np.array([0.3, -2.0, 7.0]), 0.5), [0.0, -1.5, 6.5])


def test_weighted_prox_grid_search(backend, rng):
    alpha = rng.uniform(-3, 3, 20)
    delta = 0.6
    grid = np.linspace(-4, 4, 80001)
    out = prox_weighted_penalty(alpha, delta)
    for a, p in zip(alpha, out):
        g = grid[np.argmin(delta * np.abs(grid) + 0.5 * (grid - a) ** 2)]
        assert abs(p - g) <= 1e-4


def test_weights_exempt_coordinates(backend):
    out = prox_weighted_penalty(np.array([0.3, 0.3, -4.0]), 1.0, weights=np.array([0.0, 1.0, 0.5]))
    np.testing.assert_array_equal(out, [0.3, 0.0, -3.5])


# projections -------------------------------------------------------------------


def test_project_positive(rng):
    x = np.abs(rng.standard_normal((4, 4)))
    np.testing.assert_array_equal(project_positive(x), x)
    np.testing.assert_array_equal(project_positive(np.array([-1.0, 2.0])), [0.0, 2.0])
    y = rng.standard_normal((4, 4))
    np.testing.assert_array_equal(project_positive(project_positive(y)), project_positive(y))


def test_project_C_prime_feasible_fixed_point(backend, rng):
    D = make_dictionary("haar", (8, 8), 2)
    alpha = D.analyze(rng.random((8, 8)))
    np.testing.assert_array_equal(project_C_prime(alpha, D), alpha)


def test_project_C_prime_identity_is_positive_part(rng):
    D = make_dictionary("identity", (4, 4))
    alpha = rng.standard_normal(16)
    np.testing.assert_array_equal(project_C_prime(alpha, D), np.maximum(alpha, 0))


@pytest.mark.parametrize("name,levels", [("haar", 2), ("db4", 1), ("uwt-haar", 2)])
def test_project_C_prime_feasible_idempotent(backend, name, levels, rng):
    D = make_dictionary(name, (16, 16), levels)
    for _ in range(5):
        p = project_C_prime(rng.standard_normal(D.L), D)
        assert D.synthesize(p).min() >= -1e-10
        np.testing.assert_allclose(project_C_prime(p, D), p, atol=1e-9)


def test_project_C_prime_length_check():
    with pytest.raises(DimensionError):
        project_C_prime(np.zeros(3), make_dictionary("haar", (4, 4)))


def test_reflect_examples(rng):
    x = rng.standard_normal(6)
    np.testing.assert_array_equal(reflect(x, x), x)
    np.testing.assert_array_equal(reflect(np.zeros(6), x), -x)
    assert reflect(np.array([scalar_prox(3.0, 0.4)]), np.array([3.0]))[0] == pytest.approx(3.0 - 0.8)
    with pytest.raises(DimensionError):
        reflect(np.zeros(2), np.zeros(3))


# composite prox ---------------------------------------------------------------


def test_prox_f2_feasible_input_is_soft_threshold(backend, rng):
    for name in ("identity", "haar"):
        D = make_dictionary(name, (8, 8), None if name == "identity" else 1)
        alpha = D.analyze(1.0 + rng.random((8, 8)))
        p, info = prox_f2(alpha, 0.05, ABS, D, full_output=True)
        if D.synthesize(soft(alpha, 0.05)).min() >= 0:
            assert info.fast_path
            np.testing.assert_array_equal(p, soft(alpha, 0.05))


def test_prox_f2_scalar_negative():
    D = make_dictionary("identity", (1, 1))
    p = prox_f2(np.array([-3.0]), 1.0, ABS, D, TIGHT)
    grid = np.linspace(0, 5, 500001)
    g = grid[np.argmin(np.abs(grid) + 0.5 * (grid + 3) ** 2)]
    assert g == 0.0
    assert abs(p[0]) <= 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_prox_f2_identity_matches_coordinate_descent(seed):
    rng = np.random.default_rng(seed)
    D = make_dictionary("identity", (4, 4))
    alpha = rng.uniform(-3, 3, 16)
    oracle = projected_coordinate_descent(alpha, 0.7)
    inner = prox_f2(alpha, 0.7, ABS, D, TIGHT, force_inner=True)
    np.testing.assert_allclose(inner, oracle, atol=1e-6)
    np.testing.assert_allclose(prox_f2(alpha, 0.7, ABS, D, TIGHT), oracle, atol=1e-6)


@pytest.mark.parametrize("name,levels", [("haar", 2), ("uwt-haar", 1)])
def test_prox_f2_frame_matches_dual_oracle(backend, name, levels, rng):
    D = make_dictionary(name, (4, 4), levels)
    x = rng.standard_normal((4, 4)) + 0.3
    alpha = D.analyze(x) / D.A
    oracle = dual_gradient_oracle(alpha, 0.2, D)
    p = prox_f2(alpha, 0.2, ABS, D, TIGHT, force_inner=True)
    np.testing.assert_allclose(p, oracle, atol=1e-6)


def test_fast_path_equals_inner_loop_identity(rng):
    D = make_dictionary("identity", (4, 4))
    for _ in range(20):
        alpha = rng.uniform(0, 3, 16)
        fast, info = prox_f2(alpha, 0.5, ABS, D, TIGHT, full_output=True)
        assert info.fast_path
        np.testing.assert_allclose(fast, prox_f2(alpha, 0.5, ABS, D, TIGHT, force_inner=True), atol=1e-6)


def test_fast_path_equals_inner_loop_when_guard_holds(backend, rng):
    D = make_dictionary("haar", (8, 8), 2)
    for _ in range(10):
        alpha = D.analyze(5.0 + rng.random((8, 8)))
        fast, info = prox_f2(alpha, 0.1, ABS, D, TIGHT, full_output=True)
        assert info.fast_path
        np.testing.assert_allclose(fast, prox_f2(alpha, 0.1, ABS, D, TIGHT, force_inner=True), atol=1e-6)


def test_soft_threshold_alone_can_leave_feasible_set(backend):
    D = make_dictionary("haar", (4, 4), 2)
    x = np.zeros((4, 4))
    x[0, 1] = 2.0
    alpha = D.analyze(x)
    assert D.synthesize(soft(alpha, 0.1)).min() < -0.04
    p, info = prox_f2(alpha, 0.1, ABS, D, TIGHT, full_output=True)
    assert not info.fast_path
    assert D.synthesize(p).min() >= -1e-10
    np.testing.assert_allclose(p, dual_gradient_oracle(alpha, 0.1, D), atol=1e-6)


def test_prox_characterization(backend, rng):
    D = make_dictionary("uwt-haar", (8, 8), 1)
    alpha = rng.standard_normal(D.L)
    delta = 0.3
    p = prox_f2(alpha, delta, ABS, D, TIGHT)
    assert D.synthesize(p).min() >= -1e-9
    base = J(p, alpha, delta)
    for _ in range(50):
        q = project_C_prime(p + 1e-4 * rng.standard_normal(D.L), D)
        assert base <= J(q, alpha, delta) + 1e-10


def test_prox_nonexpansive(backend, rng):
    D = make_dictionary("haar", (8, 8), 2)
    for _ in range(10):
        a, b = rng.standard_normal(D.L), rng.standard_normal(D.L)
        pa = prox_f2(a, 0.2, ABS, D, TIGHT)
        pb = prox_f2(b, 0.2, ABS, D, TIGHT)
        assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) + 1e-8


def test_prox_f2_warns_on_budget(rng):
    D = make_dictionary("uwt-haar", (8, 8), 1)
    alpha = rng.standard_normal(D.L)
    with pytest.warns(ConvergenceWarning):
        prox_f2(alpha, 0.2, ABS, D, InnerLoopConfig(max_inner_iters=2))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        _, info = prox_f2(alpha, 0.2, ABS, D, InnerLoopConfig(max_inner_iters=2), full_output=True, warn=False)
    assert not info.converged and info.iterations == 2


def test_prox_f2_warm_start_same_answer(rng):
    D = make_dictionary("uwt-haar", (8, 8), 1)
    alpha = rng.standard_normal(D.L)
    cold = prox_f2(alpha, 0.2, ABS, D, TIGHT)
    warm = prox_f2(alpha, 0.2, ABS, D, TIGHT, gamma0=alpha + 0.1 * rng.standard_normal(D.L))
    np.testing.assert_allclose(warm, cold, atol=1e-8)


def test_prox_f2_argument_checks():
    D = make_dictionary("haar", (4, 4), 1)
    with pytest.raises(ConfigurationError):
        prox_f2(np.zeros(16), 0.0, ABS, D)
    with pytest.raises(ConfigurationError):
        prox_f2(np.zeros(16), 1.0, ABS, None)
    with pytest.raises(DimensionError):
        prox_f2(np.zeros(15), 1.0, ABS, D)


def test_inner_config_validation():
    for kw in ({"nu": 0.0}, {"nu": 1.0}, {"max_inner_iters": 0}, {"tol": -1.0}):
        with pytest.raises(ConfigurationError):
            InnerLoopConfig(**kw)
