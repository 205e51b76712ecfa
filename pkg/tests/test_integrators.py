import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from lpmhd.algebra import SO3, random_su
from lpmhd.diagnostics import spectrum
from lpmhd.errors import ConfigError, DomainError, StageConvergenceError
from lpmhd.integrators import (IntegratorConfig, block_embedding_step, block_matrix,
                               fixed_point_solve, hazeltine_midpoint_step,
                               isospectral_midpoint_step, magnetic_midpoint_step,
                               rk4_baseline_step)
from lpmhd.models import make_model, preset, random_state

CFG = IntegratorConfig(h=0.1)


def mhd5():
    return make_model("mhd", 5)


def test_config_validation():
    for kwargs in ({"h": 0.0}, {"h": np.nan}, {"h": 0.1, "fp_tol": 0.0},
                   {"h": 0.1, "fp_max_iters": 0}, {"h": 0.1, "fp_max_iters": 2.5}):
        with pytest.raises(ConfigError):
            IntegratorConfig(**kwargs)


def test_fixed_point_identity():
    x0 = (np.arange(4.0),)
    x, rep = fixed_point_solve(lambda x: x, x0, CFG)
    assert rep.iterations == 1 and rep.residual == 0.0 and rep.converged
    assert np.array_equal(x[0], x0[0])


def test_fixed_point_affine():
    c = np.array([1.0, -2.0, 0.5])
    x, rep = fixed_point_solve(lambda x: (0.5 * x[0] + c,), (np.zeros(3),), CFG)
    assert np.allclose(x[0], 2 * c, atol=1e-12)
    assert rep.converged and rep.residual <= CFG.fp_tol


def test_fixed_point_failure_carries_report():
    cfg = IntegratorConfig(h=0.1, fp_max_iters=5)
    with pytest.raises(StageConvergenceError) as exc:
        fixed_point_solve(lambda x: (2 * x[0] + 1,), (np.ones(2),), cfg)
    assert exc.value.report.iterations == 5 and not exc.value.report.converged


def test_fixed_point_nonfinite_stops_early():
    cfg = IntegratorConfig(h=0.1, fp_max_iters=50)
    with pytest.raises(StageConvergenceError) as exc:
        fixed_point_solve(lambda x: (x[0] * 1e200,), (np.ones(2),), cfg)
    assert exc.value.report.iterations < 50


def test_free_dynamics(rng):
    V = random_su(5, rng)
    zero = lambda V: np.zeros_like(V)
    V1, _ = isospectral_midpoint_step(V, zero, CFG)
    assert np.allclose(V1, V, atol=1e-15)
    state = (random_su(5, rng), random_su(5, rng))
    out, _ = magnetic_midpoint_step(state, lambda W, T: (0 * W, 0 * T), CFG)
    assert all(np.allclose(a, b, atol=1e-15) for a, b in zip(out, state))


def test_isospectral_consistency():
    model = make_model("euler", 5)
    (V,) = random_state(model, seed=1)
    exact = V @ model.M(V) - model.M(V) @ V
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        V1, _ = isospectral_midpoint_step(V, model.M, IntegratorConfig(h=h))
        errs.append(np.linalg.norm((V1 - V) / h - exact))
    assert 1.8 < errs[0] / errs[1] < 2.2 and 1.8 < errs[1] / errs[2] < 2.2


def test_theta_zero_is_euler():
    mhd = mhd5()
    euler = make_model("euler", 5)
    (W,) = random_state(euler, seed=2)
    state = (W, np.zeros_like(W))
    V = W
    for _ in range(20):
        state, _ = magnetic_midpoint_step(state, mhd.M, CFG)
        V, _ = isospectral_midpoint_step(V, euler.M, CFG)
        assert np.all(state[1] == 0)
        assert np.array_equal(state[0], V)


def test_magnetic_equals_block_embedding():
    mhd = mhd5()
    state = random_state(mhd, seed=3)
    for _ in range(100):
        a, _ = magnetic_midpoint_step(state, mhd.M, CFG)
        b, _ = block_embedding_step(state, mhd.M, CFG)
        assert max(np.linalg.norm(x - y) for x, y in zip(a, b)) < 1e-12
        state = a


def test_block_embedding_zero_steps_and_traces():
    mhd = mhd5()
    W, T = random_state(mhd, seed=4)
    V = block_matrix(T, W)
    n = W.shape[0]
    assert np.array_equal(V[n:, :n], W) and np.array_equal(V[:n, :n], T)
    state = (W, T)
    ref = [np.trace(np.linalg.matrix_power(V, k)) for k in range(1, 5)]
    for _ in range(100):
        state, _ = block_embedding_step(state, mhd.M, CFG)
    V = block_matrix(state[1], state[0])
    got = [np.trace(np.linalg.matrix_power(V, k)) for k in range(1, 5)]
    assert np.max(np.abs(np.subtract(got, ref))) < 1e-12


def test_hazeltine_alpha_zero_decouples():
    mhd = mhd5()
    W, T = random_state(mhd, seed=5)
    chi = random_state(mhd, seed=6)[0]
    a = (W, T)
    b = (W, T, chi)
    for _ in range(50):
        a, _ = magnetic_midpoint_step(a, mhd.M, CFG)
        b, _ = hazeltine_midpoint_step(b, 0.0, mhd.M, CFG)
        assert max(np.linalg.norm(a[0] - b[0]), np.linalg.norm(a[1] - b[1])) < 1e-12


def test_hazeltine_zero_state():
    mhd = mhd5()
    z = np.zeros((5, 5), dtype=complex)
    out, rep = hazeltine_midpoint_step((z, z, z), 2.0, mhd.M, CFG)
    assert all(np.all(x == 0) for x in out) and rep.iterations == 1


def test_hazeltine_short_run_casimirs():
    model = make_model("hazeltine", 5, alpha=2.0)
    W, T, C = random_state(model, seed=7, amplitude=0.3)
    s_psi, s_t = spectrum(W - C), spectrum(T)
    x0 = np.trace(C @ T)
    state = (W, T, C)
    for _ in range(200):
        state, _ = hazeltine_midpoint_step(state, 2.0, model.M, CFG)
    W, T, C = state
    assert np.max(np.abs(spectrum(W - C) - s_psi)) < 1e-12
    assert np.max(np.abs(spectrum(T) - s_t)) < 1e-12
    assert abs(np.trace(C @ T) - x0) < 1e-12


@settings(max_examples=10, deadline=None)
@given(st.floats(0.01, 0.2), st.integers(0, 2**31 - 1))
def test_magnetic_step_preserves_casimirs(h, seed):
    mhd = mhd5()
    W, T = random_state(mhd, seed=seed, amplitude=0.5)
    (W1, T1), rep = magnetic_midpoint_step((W, T), mhd.M, IntegratorConfig(h=h))
    assert rep.converged
    assert np.max(np.abs(spectrum(T1) - spectrum(T))) < 1e-13
    assert abs(np.trace(W1 @ T1) - np.trace(W @ T)) < 1e-13


def test_kirchhoff_so3_step():
    model = make_model("kirchhoff", params=preset("kirchhoff"))
    m, p = random_state(model, seed=8)
    (m1, p1), _ = magnetic_midpoint_step((m, p), model.M, CFG, SO3)
    assert m1.dtype == float and np.allclose(m1, -m1.T, atol=0)
    assert np.sum(p1 * p1) == pytest.approx(np.sum(p * p), abs=1e-13)


def test_step_leaving_algebra_is_an_error(rng):
    V = random_su(4, rng)
    H = 1j * random_su(4, rng)  # Hermitian, so [V, H] is Hermitian too
    with pytest.raises(DomainError):
        isospectral_midpoint_step(V, lambda V: H, CFG)


def test_rk4_zero_and_linear(rng):
    x = (rng.standard_normal(4),)
    assert np.array_equal(rk4_baseline_step(x, lambda s: (0 * s[0],), 0.3)[0], x[0])
    A = rng.standard_normal((4, 4))
    h = 0.05
    (y,) = rk4_baseline_step(x, lambda s: (A @ s[0],), h)
    taylor = sum(np.linalg.matrix_power(h * A, k) / np.prod(range(1, k + 1)) for k in range(5))
    assert np.allclose(y, taylor @ x[0], atol=1e-14)
    # and its local error against the exact flow is O(h^5)
    assert np.linalg.norm(y - expm(h * A) @ x[0]) < 1e-6
