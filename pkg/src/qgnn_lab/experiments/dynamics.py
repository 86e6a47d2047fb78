"""Learning transverse-field Ising dynamics with a temporally tied ansatz."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._util import mapper, rng_for
from ..ansatz import AnsatzProgram, diagonal_slot, mixer_slot, qgrnn_program, trotter_evolve
from ..graph import Graph, complete_graph
from ..hamiltonians import IsingParams, ising_hamiltonian, ising_zz_z
from ..optimize import minimize_adam
from ..sim import (DENSE_CAP, SimulationError, StateVector, evolve_dense, fidelity,
                   ground_state, swap_test_estimate)
from .common import AdamConfig, ExperimentResult, GraphSpec

# stream ids under the master seed
_INIT, _BATCH, _SWAP, _EVAL = 1, 2, 3, 4


@dataclass
class DynamicsConfig:
    graph: GraphSpec = field(default_factory=lambda: GraphSpec("ring", 4))
    hidden_j: float = 1.0
    hidden_q: float = 0.5
    delta: float = field(default=0.05, metadata={"gt": 0.0})
    t_max: float = field(default=1.0, metadata={"gt": 0.0})
    batch: int = field(default=15, metadata={"min": 1})
    fresh_batch: bool = True
    init_range: float = field(default=1.0, metadata={"gt": 0.0})
    swap_shots: int = field(default=0, metadata={"min": 0})
    optimizer: AdamConfig = field(default_factory=lambda: AdamConfig(steps=500, lr=0.02))


@dataclass
class DynamicsDataset:
    psi0: StateVector
    pairs: list[tuple[float, StateVector]]
    t_max: float


def make_dynamics_dataset(h_target, psi0: StateVector, times, t_max: float) -> DynamicsDataset:
    times = [float(t) for t in times]
    if any(t < 0 or t > t_max for t in times):
        raise ValueError("sample times must lie in [0, t_max]")
    return DynamicsDataset(psi0, [(t, evolve_dense(psi0, h_target, t)) for t in times], t_max)


def ising_qgrnn(g: Graph, template) -> AnsatzProgram:
    """Temporally tied program over ``g`` with Ising coefficients as parameters."""

    def slots_for(theta):
        return (diagonal_slot(ising_zz_z(g, IsingParams.from_vector(g, theta)), "zz+z"),
                mixer_slot(g.n, label="x-field"))

    return qgrnn_program(slots_for, g.num_edges + g.n, template)


def average_infidelity(program: AnsatzProgram, theta, data: DynamicsDataset, delta: float,
                       swap_shots: int = 0, rng_seed=None) -> float:
    bound = program.bind(theta)
    fids = []
    for j, (t, target) in enumerate(data.pairs):
        out = trotter_evolve(bound, data.psi0, t, delta)
        if swap_shots:
            fids.append(swap_test_estimate(target, out, swap_shots, rng_for(*rng_seed, j)))
        else:
            fids.append(fidelity(target, out))
    return 1.0 - float(np.mean(fids))


def run_dynamics_learning(g_true: Graph, hidden: IsingParams, config: DynamicsConfig,
                          seed: int = 0, threads: int = 1) -> ExperimentResult:
    n = g_true.n
    if n > DENSE_CAP:
        raise SimulationError(f"dataset generation needs dense evolution; {n} > cap {DENSE_CAP}")
    model = complete_graph(n)
    rng = rng_for(seed, _INIT)
    theta0 = rng.uniform(-config.init_range, config.init_range, model.num_edges + n)
    psi0 = ground_state(ising_hamiltonian(model, IsingParams.from_vector(model, theta0)))
    h_target = ising_hamiltonian(g_true, hidden)
    program = ising_qgrnn(model, theta0)

    batches: dict[int, DynamicsDataset] = {}

    def batch_for(step: int) -> DynamicsDataset:
        key = step if config.fresh_batch else 0
        if key not in batches:
            times = rng_for(seed, _BATCH, key).uniform(0, config.t_max, config.batch)
            batches.clear()
            batches[key] = make_dynamics_dataset(h_target, psi0, times, config.t_max)
        return batches[key]

    def loss(theta, step):
        return average_infidelity(program, theta, batch_for(step), config.delta,
                                  config.swap_shots, (seed, _SWAP, step))

    opt = config.optimizer
    with mapper(threads) as map_fn:
        res = minimize_adam(loss, theta0, opt.steps, opt.lr, opt.fd_eps, opt.beta1, opt.beta2,
                            opt.eps, map_fn=map_fn)

    eval_times = rng_for(seed, _EVAL).uniform(0, config.t_max, config.batch)
    eval_data = make_dynamics_dataset(h_target, psi0, eval_times, config.t_max)
    final = average_infidelity(program, res.x, eval_data, config.delta)
    initial = average_infidelity(program, theta0, eval_data, config.delta)
    truth = _true_vector(model, hidden)
    oracle = average_infidelity(program, truth, eval_data, config.delta)

    learned = IsingParams.from_vector(model, res.x)
    names = [f"J{j}-{k}" for j, k in model.edges] + [f"Q{v}" for v in range(n)]
    errors = dict(zip(names, (res.x - truth).tolist()))
    non_edges = [abs(learned.couplings[e]) for e in model.edges if not g_true.has_edge(*e)]
    metrics = {
        "final_infidelity": final,
        "initial_infidelity": initial,
        "trotter_floor_infidelity": oracle,
        "max_param_error": max(abs(v) for v in errors.values()),
        "max_non_edge_coupling": max(non_edges) if non_edges else 0.0,
    }
    details = {
        "true_graph": g_true.to_dict(),
        "learned_couplings": [[j, k, c] for (j, k), c in learned.couplings.items()],
        "learned_biases": [learned.biases[v] for v in range(n)],
        "initial_guess": theta0.tolist(),
        "param_errors": errors,
    }
    return ExperimentResult("dynamics", metrics, details, res.trace,
                            artifacts={"params": res.x, "learned": learned, "psi0": psi0})


def _true_vector(model: Graph, hidden: IsingParams) -> np.ndarray:
    couplings = {(min(j, k), max(j, k)): c for (j, k), c in hidden.couplings.items()}
    return np.array([couplings.get(e, 0.0) for e in model.edges]
                    + [hidden.biases[v] for v in range(model.n)])
