import numpy as np
import pytest

from qmele import (
    DomainError,
    InnovationDist,
    ModelOrders,
    NumericOverflowError,
    ParamVector,
    SeriesData,
    filter_series,
    log_return_transform,
    simulate,
    simulate_with_innovations,
)

from conftest import AR1_GARCH11, make_theta


def test_filter_constant_model():
    orders = ModelOrders(0, 0, 0, 0)
    theta = ParamVector.from_parts(orders, mu=0.0, alpha0=1.0)
    out = filter_series(theta, [3.0, -2.0])
    np.testing.assert_allclose(out.eps, [3.0, -2.0])
    np.testing.assert_allclose(out.h, [1.0, 1.0])


def test_filter_hand_recursion():
    orders = ModelOrders(1, 0, 1, 1)
    theta = ParamVector.from_parts(orders, mu=0.0, phi=[0.5], alpha0=1.0, alpha=[0.2], beta=[0.3])
    out = filter_series(theta, [1.0, 2.0])
    np.testing.assert_allclose(out.eps, [1.0, 1.5])
    # presample h = 1/0.7; h1 = 1 + 0.3/0.7; h2 = 1 + 0.2*1 + 0.3*h1
    np.testing.assert_allclose(out.h, [1.0 + 0.3 / 0.7, 1.2 + 0.3 * (1.0 + 0.3 / 0.7)])


def test_filter_zero_input_fixed_point():
    orders = ModelOrders(1, 1, 1, 1)
    theta = ParamVector.from_parts(
        orders, mu=0.0, phi=[0.3], psi=[0.2], alpha0=0.7, alpha=[0.1], beta=[0.5]
    )
    out = filter_series(theta, np.zeros(50))
    np.testing.assert_allclose(out.eps, 0.0)
    np.testing.assert_allclose(out.h, 0.7 / 0.5, rtol=1e-14)


def test_filter_linear_in_data():
    theta = make_theta([0.0, 0.4, 0.2, 0.1, 0.5])
    y = np.random.default_rng(0).standard_normal(100)
    a = 3.7
    out1 = filter_series(theta, y)
    out2 = filter_series(theta, a * y)
    np.testing.assert_allclose(out2.eps, a * out1.eps, rtol=1e-12)


@pytest.mark.parametrize("point_seed", range(5))
def test_filter_derivatives_match_finite_differences(point_seed):
    orders = ModelOrders(1, 1, 1, 1)
    rng = np.random.default_rng(100 + point_seed)
    theta = ParamVector.from_parts(
        orders,
        mu=rng.uniform(-0.5, 0.5),
        phi=[rng.uniform(-0.7, 0.7)],
        psi=[rng.uniform(-0.7, 0.7)],
        alpha0=rng.uniform(0.1, 1.5),
        alpha=[rng.uniform(0.02, 0.4)],
        beta=[rng.uniform(0.05, 0.8)],
    )
    dist = InnovationDist("laplace")
    y = simulate(make_theta([0.0, 0.5, 0.1, 0.18, 0.4]), dist, 200, seed=point_seed).values
    base = filter_series(theta, y)
    fd_deps = np.zeros_like(base.deps)
    fd_dh = np.zeros_like(base.dh)
    for j in range(orders.m):
        step = 1e-6 * max(1.0, abs(theta.theta[j]))
        tp, tm = theta.theta.copy(), theta.theta.copy()
        tp[j] += step
        tm[j] -= step
        op = filter_series(ParamVector.from_theta(orders, tp), y)
        om = filter_series(ParamVector.from_theta(orders, tm), y)
        fd_deps[:, j] = (op.eps - om.eps) / (2 * step)
        fd_dh[:, j] = (op.h - om.h) / (2 * step)
    assert np.max(np.abs(base.deps - fd_deps)) / np.max(np.abs(base.deps)) < 1e-6
    assert np.max(np.abs(base.dh - fd_dh)) / np.max(np.abs(base.dh)) < 1e-6


def test_filter_delta_columns_of_deps_are_zero():
    theta = make_theta([0.1, 0.4, 0.3, 0.2, 0.3])
    y = simulate(theta, InnovationDist("laplace"), 100, seed=1).values
    out = filter_series(theta, y)
    np.testing.assert_array_equal(out.deps[:, 2:], 0.0)
    assert np.all(out.h >= theta.alpha0)


def test_filter_rejects_invalid_params():
    with pytest.raises(DomainError):
        filter_series(make_theta([0.0, 0.5, -0.1, 0.18, 0.4]), [1.0, 2.0])
    with pytest.raises(DomainError):
        filter_series(make_theta([0.0, 0.5, 0.1, 0.18, 1.0]), [1.0, 2.0])


def test_filter_overflow_names_index():
    # explosive MA start: |psi| > 1 makes the residual recursion blow up
    orders = ModelOrders(0, 1, 0, 0)
    theta = ParamVector.from_parts(orders, mu=0.0, psi=[3.0], alpha0=1.0)
    y = np.ones(1000)
    with pytest.raises(NumericOverflowError) as err:
        filter_series(theta, y)
    assert err.value.t is not None and err.value.t > 1


def test_simulate_deterministic():
    theta = make_theta([0.0, 0.5, 0.1, 0.18, 0.4])
    dist = InnovationDist("laplace")
    a = simulate(theta, dist, 500, seed=7).values
    b = simulate(theta, dist, 500, seed=7).values
    np.testing.assert_array_equal(a, b)
    c = simulate(theta, dist, 500, seed=8).values
    assert not np.array_equal(a, c)


def test_sampler_abs_mean_one_law_of_large_numbers():
    rng = np.random.default_rng(12)
    eta = InnovationDist("laplace", "abs_mean_one").sample(rng, 100_000)
    assert 0.99 <= np.mean(np.abs(eta)) <= 1.01


def test_t3_standardization_constant():
    dist = InnovationDist("student_t3", "abs_mean_one")
    assert np.isclose(dist.scale_factor(), np.pi / (2 * np.sqrt(3.0)), rtol=1e-14)
    rng = np.random.default_rng(3)
    eta = dist.sample(rng, 200_000)
    assert abs(np.mean(np.abs(eta)) - 1.0) < 0.01


def test_var_one_standardization():
    for kind in ("laplace", "normal", "student_t3"):
        dist = InnovationDist(kind, "var_one")
        rng = np.random.default_rng(5)
        eta = dist.sample(rng, 200_000)
        tol = 0.15 if kind == "student_t3" else 0.02  # t3 second moments converge slowly
        assert abs(np.mean(eta**2) - 1.0) < tol
    assert InnovationDist("laplace", "var_one").eta2() == pytest.approx(1.0)
    assert InnovationDist("laplace", "abs_mean_one").eta2() == pytest.approx(2.0)


def test_mixture_sampler_moments():
    dist = InnovationDist("mixture", "abs_mean_one", epsilon=0.3, tau=2.0)
    rng = np.random.default_rng(9)
    eta = dist.sample(rng, 400_000)
    assert abs(np.mean(np.abs(eta)) - 1.0) < 0.01
    assert abs(np.mean(eta**2) - dist.eta2()) < 0.03


def test_simulate_filter_roundtrip_recovers_innovations():
    theta = make_theta([0.0, 0.5, 0.1, 0.18, 0.4])
    y, eta = simulate_with_innovations(theta, InnovationDist("laplace"), 800, burn_in=500, seed=21)
    out = filter_series(theta, y)
    rec = out.eps / np.sqrt(out.h)
    assert np.max(np.abs(rec[50:] - eta[50:])) < 1e-3


def test_log_return_transform():
    np.testing.assert_allclose(log_return_transform([1.0, np.e]).values, [100.0])
    np.testing.assert_allclose(log_return_transform(np.full(10, 3.3)).values, 0.0)
    np.testing.assert_allclose(
        log_return_transform([100.0, 110.0]).values, [100.0 * np.log(1.1)], rtol=1e-12
    )
    with pytest.raises(DomainError):
        log_return_transform([1.0, -2.0])
    with pytest.raises(DomainError):
        log_return_transform([5.0])


def test_series_data_validation():
    with pytest.raises(DomainError):
        SeriesData(np.array([1.0, np.nan]))
    with pytest.raises(DomainError):
        SeriesData(np.empty(0))


def test_param_vector_accessors():
    theta = ParamVector.from_parts(
        ModelOrders(2, 1, 1, 2),
        mu=0.5,
        phi=[0.3, -0.1],
        psi=[0.2],
        alpha0=0.4,
        alpha=[0.1],
        beta=[0.2, 0.3],
    )
    assert theta.m == 8
    assert theta.mu == 0.5
    np.testing.assert_array_equal(theta.phi, [0.3, -0.1])
    np.testing.assert_array_equal(theta.psi, [0.2])
    np.testing.assert_array_equal(theta.beta, [0.2, 0.3])
    assert theta.h_presample == pytest.approx(0.4 / 0.5)
    rebuilt = ParamVector.from_theta(theta.orders, theta.theta)
    np.testing.assert_array_equal(rebuilt.gamma, theta.gamma)
    np.testing.assert_array_equal(rebuilt.delta, theta.delta)
