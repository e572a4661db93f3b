import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from clobserver.diagnostics import ResidualHistory, accumulated_error_discrete, uub_radius_discrete
from clobserver.numerics import DiagonalGain
from clobserver.observers import (
    DivergenceError, InfeasibleBoundsError, ObserverConfig, central_difference, continuous_lower_bound,
    continuous_rhs, continuous_step, conventional_step, discrete_step, new_observer, stack_bounds,
    theorem1_condition, zeta_continuous, zeta_discrete,
)
from clobserver.systems import SISModel, sis_gain, sis_regular, sis_step, sis_vector_field

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


def scalar_cfg(**kw):
    base = dict(kappa=100.0, lam=DiagonalGain([-1.0]), h=0.01, omega=5.0)
    base.update(kw)
    return ObserverConfig(**base)


def with_aggregates(state, S, X):
    state.stack._S = np.asarray(S, dtype=float)
    state.stack._X = np.asarray(X, dtype=float)
    return state


# -- difference terms --------------------------------------------------------

def test_zeta_discrete_zero_without_disturbance():
    model = SISModel(SWAP, [1.0, 1.0], 0.1)
    sys = sis_regular(model)
    x = np.array([0.3, 0.6])
    x_next = sis_step(x, model.curing_baseline, [0.0, 0.0], model)
    np.testing.assert_allclose(zeta_discrete(x, x_next, model.curing_baseline, sys, 0.1), 0.0, atol=1e-16)


def test_zeta_discrete_sis_example():
    model = SISModel(SWAP, [0.0, 0.0], 0.1)
    sys = sis_regular(model)
    x = np.array([0.5, 0.5])
    x_next = sis_step(x, [0.0, 0.0], [1.0, 1.0], model)
    zeta = zeta_discrete(x, x_next, np.zeros(2), sys, 0.1)
    np.testing.assert_allclose(zeta, [0.025, 0.025], atol=1e-15)
    np.testing.assert_allclose(zeta, 0.1 * sis_gain(x, SWAP) @ [1.0, 1.0], atol=1e-15)


def test_zeta_discrete_dimension_mismatch():
    sys = sis_regular(SISModel(SWAP, [0.0, 0.0], 0.1))
    with pytest.raises(ValueError):
        zeta_discrete(np.zeros(3), np.zeros(2), np.zeros(2), sys, 0.1)


def test_zeta_continuous_examples():
    sys = sis_regular(SISModel(SWAP, [0.0, 0.0], 0.1))
    x = np.array([0.5, 0.5])
    assert np.all(zeta_continuous(x, sis_vector_field(x, [0, 0], [0, 0], SWAP), [0, 0], sys) == 0)
    x_dot = sis_vector_field(x, [0.0, 0.0], [1.0, 1.0], SWAP)
    np.testing.assert_allclose(zeta_continuous(x, x_dot, [0.0, 0.0], sys), [0.25, 0.25])


def test_central_difference_is_second_order():
    # x(t) = sin t: error of the central difference should shrink 4x when h halves
    errs = [abs(central_difference(np.sin(1 - h), np.sin(1 + h), h) - np.cos(1)) for h in (0.1, 0.05)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.01)


def test_finite_difference_zeta_is_first_order():
    sys = sis_regular(SISModel(SWAP, [0.5, 0.5], 0.1))
    x_of = lambda t: np.array([0.3 + 0.1 * np.sin(t), 0.4 + 0.1 * np.cos(t)])
    x_dot = np.array([0.1 * np.cos(1.0), -0.1 * np.sin(1.0)])
    u = np.array([0.5, 0.5])
    truth = zeta_continuous(x_of(1.0), x_dot, u, sys)
    errs = [np.linalg.norm(zeta_continuous(x_of(1.0), (x_of(1.0 + h) - x_of(1.0)) / h, u, sys) - truth)
            for h in (1e-2, 5e-3)]
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.05)


# -- bounds ------------------------------------------------------------------

def test_stack_bounds_spot_values():
    S_L, S_U = stack_bounds(scalar_cfg(), p=1)
    e = math.exp(-0.01)
    assert S_L[0, 0] == pytest.approx((e - 0.5 - math.sqrt(0.2)), rel=1e-12)
    assert S_L[0, 0] == pytest.approx(0.04284, abs=1e-4)
    assert S_U[0, 0] == pytest.approx(0.93726, abs=1e-4)


def test_stack_bounds_collapse_at_quarter():
    S_L, S_U = stack_bounds(scalar_cfg(h=0.05, omega=5.0))
    np.testing.assert_allclose(S_L, S_U)


def test_stack_bounds_infeasible():
    with pytest.raises(InfeasibleBoundsError):
        stack_bounds(scalar_cfg(h=0.06))


def test_observer_config_validation():
    with pytest.raises(ValueError):
        scalar_cfg(kappa=0.0)
    with pytest.raises(ValueError):
        scalar_cfg(mode="fancy")
    assert scalar_cfg(lam=[-1.0, -2.0]).p == 2


# -- discrete update ---------------------------------------------------------

def test_discrete_step_empty_stack_decays():
    cfg = scalar_cfg(lam=DiagonalGain([-1.0, -2.0]), h=0.1)
    state = new_observer(cfg)
    state.d_hat = np.array([1.0, 2.0])
    np.testing.assert_allclose(discrete_step(state, cfg), [math.exp(-0.1), 2 * math.exp(-0.2)])
    assert state.step == 1


def test_discrete_step_scalar_example():
    cfg = scalar_cfg(kappa=1.0, h=0.1)
    state = with_aggregates(new_observer(cfg), [[2.0]], [3.0])
    state.d_hat = np.array([1.0])
    assert discrete_step(state, cfg)[0] == pytest.approx(math.exp(-0.1) - 0.2 + 3.0, abs=1e-12)
    assert state.d_hat[0] == pytest.approx(3.704837, abs=1e-6)


def test_discrete_step_divergence_carries_step():
    cfg = scalar_cfg(kappa=1.0, h=0.1)
    state = with_aggregates(new_observer(cfg), [[0.0]], [np.inf])
    state.step = 17
    with pytest.raises(DivergenceError) as info:
        discrete_step(state, cfg)
    assert info.value.step == 17


def test_conventional_requires_depth_one():
    cfg = scalar_cfg()
    state = new_observer(cfg)
    with pytest.raises(ValueError):
        conventional_step(state, cfg)
    conv = new_observer(scalar_cfg(mode="conventional"))
    assert conv.stack.max_age == 1


@settings(max_examples=40)
@given(arrays(np.float64, 2, elements=st.floats(-3, 3)),
       arrays(np.float64, (2, 2), elements=st.floats(-1, 1)),
       arrays(np.float64, 2, elements=st.floats(-1, 1)))
def test_conventional_equals_discrete_on_depth_one_stack(d_hat, L, zeta):
    cfg = ObserverConfig(100.0, DiagonalGain([-1.0, -2.0]), 1e-3, 5.0, mode="conventional")
    a, b = new_observer(cfg), new_observer(cfg)
    for state in (a, b):
        state.d_hat = d_hat.copy()
        state.stack.advance_and_add(L, zeta)
    np.testing.assert_allclose(conventional_step(a, cfg), discrete_step(b, cfg), atol=1e-12, rtol=0)


def _constant_disturbance_run(gain: float):
    h, p = 1e-3, 2
    cfg = ObserverConfig(100.0, DiagonalGain.uniform(-1.0, p), h, 5.0)
    S_L, S_U = stack_bounds(cfg)
    state = new_observer(cfg)
    d = np.array([1.0, 2.0])
    L = gain * np.eye(p)
    residuals = ResidualHistory.from_disturbance(np.tile(d, (10_002, 1)), cfg.lam, h)
    xi_bar = 0.0
    for _ in range(10_000):
        discrete_step(state, cfg)
        state.stack.advance_and_add(L, h * L @ d)
        state.stack.select_samples(S_L, S_U)
        xi_bar = max(xi_bar, np.linalg.norm(accumulated_error_discrete(state.stack, residuals)))
    return cfg, float(np.linalg.norm(d - state.d_hat)), xi_bar


@pytest.mark.xfail(strict=True, reason="the discrete radius scales the O(h) residual sum as if it "
                                       "were a rate; the error is about 8x the radius for L = I")
def test_constant_disturbance_within_discrete_radius():
    cfg, err, xi_bar = _constant_disturbance_run(1.0)
    assert err <= uub_radius_discrete(cfg.omega, cfg.h, xi_bar, 1.0)


@pytest.mark.parametrize("gain", [1.0, 2.0, 3.0])
def test_constant_disturbance_within_rate_scaled_radius(gain):
    cfg, err, xi_bar = _constant_disturbance_run(gain)
    assert err <= uub_radius_discrete(cfg.omega, cfg.h, xi_bar / cfg.h, 1.0)
    assert err < 0.05


# -- continuous update -------------------------------------------------------

def test_continuous_euler_on_empty_stack():
    cfg = scalar_cfg(lam=DiagonalGain([-1.0, -2.0]), h=0.1)
    state = new_observer(cfg)
    state.d_hat = np.array([1.0, 1.0])
    np.testing.assert_allclose(continuous_step(state, cfg), [1 - 0.1, 1 - 0.2])


@pytest.mark.parametrize("integrator", ["euler", "rk4"])
def test_continuous_stationary_point_is_fixed(integrator):
    cfg = scalar_cfg(lam=DiagonalGain([-1.0, -2.0]), h=0.1, kappa=2.0)
    S = np.array([[1.0, 0.2], [0.2, 0.5]])
    X = np.array([0.3, -0.4])
    state = with_aggregates(new_observer(cfg), S, X)
    star = np.linalg.solve(cfg.kappa * S - np.diag(cfg.lam.lam), cfg.kappa * X)
    state.d_hat = star.copy()
    np.testing.assert_allclose(continuous_step(state, cfg, integrator=integrator), star, atol=1e-14)


def test_continuous_euler_is_first_order():
    cfg = scalar_cfg(lam=DiagonalGain([-1.0]), h=0.2, kappa=1.0)
    S, X = np.array([[2.0]]), np.array([1.0])
    a = -(cfg.kappa * S[0, 0] - cfg.lam.lam[0])
    exact = lambda t: X[0] / -a * (1 - math.exp(a * t))  # d_hat(0) = 0
    errs = []
    for dt in (0.02, 0.01):
        state = with_aggregates(new_observer(cfg), S, X)
        for _ in range(int(round(0.2 / dt))):
            continuous_step(state, cfg, dt=dt)
        errs.append(abs(state.d_hat[0] - exact(0.2)))
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.1)


def test_continuous_step_rejects_large_substep_and_unknown_integrator():
    cfg = scalar_cfg()
    state = new_observer(cfg)
    with pytest.raises(ValueError):
        continuous_step(state, cfg, dt=0.02)
    with pytest.raises(ValueError):
        continuous_step(state, cfg, integrator="heun")


def test_continuous_rhs_matches_formula():
    cfg = scalar_cfg(lam=DiagonalGain([-1.0, -3.0]), kappa=2.0)
    S, X, d = np.eye(2), np.array([1.0, 0.0]), np.array([0.5, 0.5])
    np.testing.assert_allclose(continuous_rhs(d, S, X, cfg), [-0.5 - 1.0 + 2.0, -1.5 - 1.0])


def test_theorem1_condition_examples():
    cfg = ObserverConfig(100.0, DiagonalGain([-5.0]), 0.01, 5.0)
    assert not theorem1_condition(np.zeros((1, 1)), cfg)
    cfg = scalar_cfg()
    assert continuous_lower_bound(cfg)[0, 0] == pytest.approx(0.04)
    assert theorem1_condition(np.array([[0.05]]), cfg)
    assert not theorem1_condition(np.array([[0.03]]), cfg)
