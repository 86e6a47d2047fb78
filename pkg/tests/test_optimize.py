import io

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize

from qgnn_lab.optimize import (AdamState, OptimizationError, Trace, adam_step,
                               finite_diff_gradient, minimize_adam, nelder_mead)


def rosenbrock(x):
    return float((1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2)


def test_first_adam_step_moves_by_lr_times_sign():
    state = AdamState(3, lr=0.1)
    state, x = adam_step(state, [1.0, 1.0, 1.0], [2.0, -0.5, 0.0])
    np.testing.assert_allclose(x, [0.9, 1.1, 1.0], rtol=1e-8)
    assert state.t == 1
    np.testing.assert_allclose(state.m, [0.2, -0.05, 0.0])
    np.testing.assert_allclose(state.v, [0.004, 0.00025, 0.0])


def test_second_adam_step_frozen():
    state = AdamState(1, lr=0.1)
    state, x = adam_step(state, [1.0], [2.0])
    state, x = adam_step(state, x, [1.0])
    # m_hat = (0.9*0.2 + 0.1)/(1-0.81), v_hat = (0.999*0.004 + 0.001)/(1-0.998001)
    m_hat = 0.28 / 0.19
    v_hat = 0.004996 / 0.001999
    x1 = 1.0 - 0.1 * 1.0 / (1.0 + 0.5e-8)
    assert x[0] == pytest.approx(x1 - 0.1 * m_hat / (np.sqrt(v_hat) + 1e-8), rel=1e-12)


def test_adam_shape_check():
    with pytest.raises(ValueError):
        adam_step(AdamState(2), [1.0], [1.0])


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5))
def test_central_difference_exact_on_quadratics(x):
    x = np.array(x)
    a = np.arange(1, x.size + 1, dtype=float)
    f = lambda p: float(np.sum(a * p ** 2) + p.sum())  # noqa: E731
    np.testing.assert_allclose(finite_diff_gradient(f, x, 1e-3), 2 * a * x + 1, atol=1e-7)


def test_finite_difference_rejects_nonfinite():
    with pytest.raises(OptimizationError):
        finite_diff_gradient(lambda p: np.nan, [0.0])
    with pytest.raises(ValueError):
        finite_diff_gradient(lambda p: 0.0, [0.0], eps=0.0)


def test_adam_minimises_quadratic():
    res = minimize_adam(lambda p, _s: float(np.sum((p - 3) ** 2)), [0.0, 1.0], 400, lr=0.1)
    np.testing.assert_allclose(res.x, 3.0, atol=1e-2)
    assert len(res.trace) == 401
    assert res.trace.losses[-1] == res.fun


def test_adam_passes_step_index():
    seen = []
    minimize_adam(lambda p, s: seen.append(s) or 0.0, [0.0], 3)
    assert sorted(set(seen)) == [0, 1, 2, 3]


def test_nelder_mead_agrees_with_scipy_on_rosenbrock():
    ours = nelder_mead(rosenbrock, [-1.2, 1.0], max_evals=2000, tol=1e-8)
    ref = minimize(rosenbrock, [-1.2, 1.0], method="Nelder-Mead",
                   options={"xatol": 1e-8, "fatol": 1e-12, "maxfev": 2000})
    assert ours.converged
    np.testing.assert_allclose(ours.x, ref.x, atol=1e-5)
    np.testing.assert_allclose(ours.x, [1.0, 1.0], atol=1e-5)


def test_nelder_mead_budget_and_constant_objective():
    res = nelder_mead(rosenbrock, [-1.2, 1.0], max_evals=20)
    assert not res.converged and res.n_evals >= 20
    flat = nelder_mead(lambda p: 1.0, [0.3, -0.2, 0.0], max_evals=5000)
    assert flat.converged


def test_nelder_mead_initial_simplex_steps():
    calls = []
    nelder_mead(lambda p: calls.append(p.copy()) or 0.0, [2.0, 0.0], max_evals=3)
    np.testing.assert_allclose(calls[1], [2.2, 0.0])
    np.testing.assert_allclose(calls[2], [2.0, 0.00025])
    calls.clear()
    nelder_mead(lambda p: calls.append(p.copy()) or 0.0, [2.0, 0.0], max_evals=3, abs_step=0.5)
    np.testing.assert_allclose(calls[1:3], [[2.5, 0.0], [2.0, 0.5]])


def test_trace_csv():
    tr = Trace()
    tr.record(0, 1.5, [0.25, -1.0])
    tr.record(1, 0.5, [0.5, -1.0])
    buf = io.StringIO()
    tr.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "iteration,loss,wall_ms,p0,p1"
    cells = lines[2].split(",")
    assert cells[0] == "1" and cells[1] == "0.5" and cells[3:] == ["0.5", "-1.0"]
