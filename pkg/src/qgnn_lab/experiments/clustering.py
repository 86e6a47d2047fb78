"""Unsupervised graph clustering with the spectral convolution schedule."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._util import mapper, rng_for
from ..ansatz import apply_qgnn, qsgcnn_layer_schedule, quartic
from ..graph import Graph, bridged_triangles
from ..hamiltonians import coupling_hamiltonian_1q
from ..optimize import minimize_adam
from ..sim import PositionRegister, StateVector, position_coupling, position_potential, sample_bitstrings
from .common import AdamConfig, ExperimentResult, GraphSpec
from .stats import energy_distribution

_INIT, _SHOTS = 1, 2

MODES = ("single", "multi")


@dataclass
class ClusterConfig:
    graph: GraphSpec = field(default_factory=lambda: GraphSpec("bridged_triangles", 6))
    mode: str = field(default="single", metadata={"choices": MODES})
    m: int = field(default=5, metadata={"min": 1})
    half_width: float = field(default=2.0, metadata={"gt": 0.0})
    mu: float = 0.0
    omega: float = 1.0
    depth: int = field(default=4, metadata={"min": 1})
    shots: int = field(default=0, metadata={"min": 0})
    init_scale: float = field(default=0.5, metadata={"gt": 0.0})
    top_k: int = field(default=8, metadata={"min": 1})
    optimizer: AdamConfig = field(default_factory=lambda: AdamConfig(steps=500, lr=0.05))


@dataclass
class ClusterProblem:
    """Program, start state and the diagonal cost the loss averages."""

    program: object
    start: StateVector
    cost: np.ndarray
    register: PositionRegister | None = None


def cluster_problem(g: Graph, config: ClusterConfig) -> ClusterProblem:
    if config.mode == "single":
        # x -> |1><1|, p^2 -> X, anharmonic term -> identity (dropped: constant shift)
        program = qsgcnn_layer_schedule(g, None, config.depth)
        cost = coupling_hamiltonian_1q(g).diagonal
        return ClusterProblem(program, StateVector.plus(g.n), cost)
    if config.mode != "multi":
        raise ValueError(f"mode must be one of {MODES}, got {config.mode!r}")
    reg = PositionRegister.spanning(config.m, g.n, config.half_width)
    program = qsgcnn_layer_schedule(g, reg, config.depth, config.mu, config.omega)
    cost = position_coupling(reg, g) + position_potential(reg, quartic(config.mu, config.omega))
    return ClusterProblem(program, StateVector.plus(reg.n_qubits), cost, reg)


def node_values(index: int, g: Graph, reg: PositionRegister | None) -> list[float]:
    """Per-node value of a basis configuration: bit in single mode, position otherwise."""
    if reg is None:
        return [float((index >> v) & 1) for v in range(g.n)]
    return [float(reg.grid[(index >> (v * reg.m)) & (reg.size - 1)]) for v in range(g.n)]


def is_constant(values) -> bool:
    return len(set(values)) <= 1


def run_spectral_clustering(g: Graph, config: ClusterConfig, seed: int = 0,
                            threads: int = 1) -> ExperimentResult:
    prob = cluster_problem(g, config)
    program, cost = prob.program, prob.cost
    x0 = rng_for(seed, _INIT).uniform(0, config.init_scale, program.n_params)

    def loss(eta, _step=None):
        return float(apply_qgnn(program, eta, prob.start).probabilities @ cost)

    opt = config.optimizer
    with mapper(threads) as map_fn:
        res = minimize_adam(loss, x0, opt.steps, opt.lr, opt.fd_eps, opt.beta1, opt.beta2,
                            opt.eps, map_fn=map_fn)
    state = apply_qgnn(program, res.x, prob.start)

    if config.shots:
        record = sample_bitstrings(state, config.shots, rng_for(seed, _SHOTS))
        probs = np.bincount(record.bitstrings, minlength=cost.size) / config.shots
    else:
        probs = state.probabilities
    levels, mass = energy_distribution(probs, cost)

    order = np.argsort(-probs, kind="stable")
    rows = (_config_row(int(i), probs, cost, g, prob.register) for i in order)
    top = [_config_row(int(i), probs, cost, g, prob.register) for i in order[: config.top_k]]
    best_split = next((r for r in rows if not is_constant(r["values"])), None)

    metrics = {"final_loss": res.fun, "initial_loss": res.trace.losses[0],
               "top_nonconstant": best_split}
    details = {"graph": g.to_dict(), "params": res.x.tolist(), "program": program.describe(),
               "top_configurations": top}
    if prob.register is not None:
        details["grid"] = prob.register.grid.tolist()
        details["marginals"] = [prob.register.marginal(state, j).tolist() for j in range(g.n)]
    table = (["energy", "probability"], [[float(e), float(p)] for e, p in zip(levels, mass)])
    return ExperimentResult("cluster", metrics, details, res.trace, {"histogram.csv": table},
                            artifacts={"state": state, "params": res.x, "levels": levels,
                                       "mass": mass, "probabilities": probs,
                                       "register": prob.register})


def _config_row(idx, probs, cost, g, reg):
    return {"index": idx, "probability": float(probs[idx]), "energy": float(cost[idx]),
            "values": node_values(idx, g, reg)}


def lowest_cut_configurations(g: Graph | None = None) -> set[int]:
    """Non-constant bitstrings minimising ``b^T L b`` by exhaustive enumeration."""
    g = bridged_triangles() if g is None else g
    energies = coupling_hamiltonian_1q(g).diagonal
    full = 2 ** g.n - 1
    candidates = [i for i in range(2 ** g.n) if i not in (0, full)]
    low = min(energies[i] for i in candidates)
    return {i for i in candidates if abs(energies[i] - low) < 1e-9}
