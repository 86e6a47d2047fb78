"""Finite-difference Adam and Nelder-Mead."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

Objective = Callable[[np.ndarray], float]
MapFn = Callable[[Callable, Iterable], Iterable]


class OptimizationError(ArithmeticError):
    pass


def _finite(value: float, where: str) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise OptimizationError(f"objective returned {value} at {where}")
    return value


class Trace:
    """Accepted iterates: (iteration, loss, wall_ms, params)."""

    def __init__(self):
        self.rows: list[tuple[int, float, float, np.ndarray]] = []
        self._t0 = time.perf_counter()

    def record(self, iteration: int, loss: float, params) -> None:
        wall = (time.perf_counter() - self._t0) * 1e3
        self.rows.append((iteration, float(loss), wall, np.array(params, dtype=float)))

    @property
    def losses(self) -> list[float]:
        return [r[1] for r in self.rows]

    def write_csv(self, fh) -> None:
        dim = len(self.rows[0][3]) if self.rows else 0
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "loss", "wall_ms"] + [f"p{i}" for i in range(dim)])
        for it, loss, wall, params in self.rows:
            w.writerow([it, repr(loss), f"{wall:.3f}"] + [repr(float(x)) for x in params])

    def __len__(self):
        return len(self.rows)


def finite_diff_gradient(f: Objective, params, eps: float = 1e-4, map_fn: MapFn = map) -> np.ndarray:
    """Central differences, ``2 * dim`` evaluations (``map_fn`` may parallelise them)."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    params = np.asarray(params, dtype=float)
    shifted = []
    for i in range(params.size):
        for sign in (1.0, -1.0):
            x = params.copy()
            x[i] += sign * eps
            shifted.append(x)
    vals = [_finite(v, "finite-difference probe") for v in map_fn(f, shifted)]
    vals = np.asarray(vals).reshape(params.size, 2)
    return (vals[:, 0] - vals[:, 1]) / (2 * eps)


@dataclass
class AdamState:
    dim: int
    lr: float = 0.02
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: np.ndarray = field(default=None)
    v: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.m is None:
            self.m = np.zeros(self.dim)
        if self.v is None:
            self.v = np.zeros(self.dim)


def adam_step(state: AdamState, params, grad) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update; returns a new state and new params."""
    params = np.asarray(params, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if params.shape != (state.dim,) or grad.shape != (state.dim,):
        raise ValueError(f"expected vectors of length {state.dim}")
    t = state.t + 1
    m = state.beta1 * state.m + (1 - state.beta1) * grad
    v = state.beta2 * state.v + (1 - state.beta2) * grad ** 2
    m_hat = m / (1 - state.beta1 ** t)
    v_hat = v / (1 - state.beta2 ** t)
    new = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    nxt = AdamState(state.dim, state.lr, state.beta1, state.beta2, state.eps, t, m, v)
    return nxt, new


@dataclass
class AdamResult:
    x: np.ndarray
    fun: float
    trace: Trace


def minimize_adam(loss: Callable[[np.ndarray, int], float], x0, steps: int, lr: float = 0.02,
                  fd_eps: float = 1e-4, beta1: float = 0.9, beta2: float = 0.999,
                  adam_eps: float = 1e-8, map_fn: MapFn = map) -> AdamResult:
    """Finite-difference Adam.

    ``loss(x, step)`` receives the step index so stochastic objectives can
    draw a fresh batch per step while every probe of one step sees the same
    batch.
    """
    x = np.array(x0, dtype=float)
    state = AdamState(x.size, lr, beta1, beta2, adam_eps)
    trace = Trace()
    for step in range(steps):
        f = lambda p, _s=step: loss(p, _s)  # noqa: E731
        current = _finite(f(x), f"step {step}")
        trace.record(step, current, x)
        grad = finite_diff_gradient(f, x, fd_eps, map_fn)
        state, x = adam_step(state, x, grad)
        if not np.all(np.isfinite(x)):
            raise OptimizationError(f"Adam produced non-finite parameters at step {step}")
    final = _finite(loss(x, steps), "final iterate")
    trace.record(steps, final, x)
    return AdamResult(x, final, trace)


@dataclass
class NelderMeadResult:
    x: np.ndarray
    fun: float
    converged: bool
    n_evals: int
    trace: Trace


def nelder_mead(f: Objective, x0, max_evals: int = 1000, tol: float = 1e-6,
                rel_step: float = 0.1, zero_step: float = 0.00025,
                abs_step: float | None = None, alpha: float = 1.0, gamma: float = 2.0,
                rho: float = 0.5, sigma: float = 0.5) -> NelderMeadResult:
    """Downhill simplex.

    The initial simplex perturbs each coordinate by ``rel_step`` relative to
    its value, or by ``zero_step`` when it is zero; ``abs_step`` overrides both
    with a fixed offset (useful on piecewise-constant objectives). Stops when the simplex
    diameter (largest vertex distance from the best vertex) drops below
    ``tol`` or after ``max_evals`` evaluations; ``converged`` tells which.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    dim = x0.size
    if dim < 1:
        raise ValueError("need at least one parameter")
    evals = 0
    trace = Trace()

    def fx(x):
        nonlocal evals
        evals += 1
        return _finite(f(x), "simplex vertex")

    simplex = [x0.copy()]
    for i in range(dim):
        x = x0.copy()
        if abs_step is not None:
            x[i] += abs_step
        else:
            x[i] = x[i] * (1 + rel_step) if x[i] != 0 else zero_step
        simplex.append(x)
    simplex = np.array(simplex)
    values = np.array([fx(x) for x in simplex])

    iteration = 0
    converged = False
    while True:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        trace.record(iteration, values[0], simplex[0])
        if np.max(np.linalg.norm(simplex[1:] - simplex[0], axis=1)) < tol:
            converged = True
            break
        if evals >= max_evals:
            break
        iteration += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = fx(xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = fx(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = fx(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + rho * (worst - centroid)
            fc = fx(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue
        for i in range(1, dim + 1):
            simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
            values[i] = fx(simplex[i])
    return NelderMeadResult(simplex[0].copy(), float(values[0]), converged, evals, trace)
