"""GHZ-state preparation on a network and the phase-kickback check."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._util import mapper, rng_for
from ..ansatz import AnsatzProgram, Tying, apply_qgnn, diagonal_slot, mixer_slot
from ..graph import Graph
from ..hamiltonians import expectation, ghz_stabilizer_sum, zz_edge_hamiltonian
from ..optimize import minimize_adam
from ..pauli import PauliSum
from ..sim import StateVector, apply_cnot, apply_z_rotations, fidelity
from .common import AdamConfig, ExperimentResult, GraphSpec

_INIT = 1


@dataclass
class GhzConfig:
    graph: GraphSpec = field(default_factory=lambda: GraphSpec("path", 6))
    depth: int = field(default=6, metadata={"min": 1})
    init: str = field(default="ramp", metadata={"choices": ("ramp", "uniform")})
    ramp_time: float = field(default=0.7, metadata={"gt": 0.0})
    init_jitter: float = field(default=0.05, metadata={"min": 0.0})
    init_scale: float = field(default=0.5, metadata={"gt": 0.0})
    kickback_points: int = field(default=256, metadata={"min": 2})
    collector: int = field(default=0, metadata={"min": 0})
    optimizer: AdamConfig = field(default_factory=lambda: AdamConfig(steps=1000, lr=0.05))


def ghz_program(g: Graph, depth: int) -> AnsatzProgram:
    """Alternating ``sum_E ZZ`` and ``sum_V X`` with free times per layer."""
    return AnsatzProgram((diagonal_slot(zz_edge_hamiltonian(g), "zz"), mixer_slot(g.n)),
                         depth, Tying.FREE)


def initial_times(depth: int, config: GhzConfig, rng: np.random.Generator) -> np.ndarray:
    """Starting times, layer-major ``(zz, x)`` pairs.

    ``ramp`` discretises an anneal from ``-sum X`` (ground state ``|+>^n``) to
    ``-sum ZZ``: layer ``p`` gets ``-tau s_p`` on the ZZ slot and
    ``-tau (1 - s_p)`` on the mixer, ``s_p = (p + 1/2) / depth``, plus uniform
    jitter. ``uniform`` draws every time from ``U(0, init_scale)``.
    """
    if config.init == "uniform":
        return rng.uniform(0, config.init_scale, 2 * depth)
    s = (np.arange(depth) + 0.5) / depth
    ramp = -config.ramp_time * np.stack([s, 1 - s], axis=1).reshape(-1)
    return ramp + rng.uniform(-config.init_jitter, config.init_jitter, 2 * depth)


def ghz_loss(state: StateVector) -> float:
    return -expectation(state, ghz_stabilizer_sum(state.n_qubits))


def kickback_signal(state: StateVector, collector: int, phis, order=None) -> np.ndarray:
    """``<X_collector>`` after global Z phases and a CNOT cascade onto the collector.

    ``order`` is a spanning path starting at the collector (default: the
    collector followed by the other qubits ascending). CNOTs run from the far
    end of the path back to the collector, so a GHZ state collapses onto a
    single-qubit superposition carrying the summed phase.
    """
    n = state.n_qubits
    if order is None:
        order = [collector] + [q for q in range(n) if q != collector]
    order = list(order)
    if order[0] != collector or sorted(order) != list(range(n)):
        raise ValueError("order must be a spanning path of all qubits starting at the collector")
    x_c = PauliSum(n, ((1.0, ((collector, "X"),)),))
    out = []
    for phi in phis:
        s = apply_z_rotations(state, phi)
        for i in range(n - 1, 0, -1):
            s = apply_cnot(s, order[i - 1], order[i])
        out.append(expectation(s, x_c))
    return np.array(out)


def dominant_frequency(signal) -> int:
    """Index of the largest non-constant DFT bin (cycles per sweep)."""
    spectrum = np.abs(np.fft.rfft(np.asarray(signal, float) - np.mean(signal)))
    return int(np.argmax(spectrum[1:]) + 1)


def kickback_phis(points: int) -> np.ndarray:
    return 2 * np.pi * np.arange(points) / points


def phase_kickback_test(state: StateVector, collector: int, phis, order=None) -> float:
    """Frequency of the collector signal relative to the one-qubit reference ``cos(2 phi)``."""
    phis = np.asarray(phis, dtype=float)
    n = state.n_qubits
    # highest expected component is cos(2 n phi): 2n cycles per sweep
    if phis.size < 4 * n + 2:
        raise ValueError(f"need at least {4 * n + 2} phase points for {n} qubits")
    if not np.allclose(phis, kickback_phis(phis.size), atol=1e-12):
        raise ValueError("phis must be uniformly spaced over [0, 2*pi) starting at 0")
    signal = kickback_signal(state, collector, phis, order)
    return dominant_frequency(signal) / dominant_frequency(np.cos(2 * phis))


def run_ghz_preparation(g: Graph, depth: int, config: GhzConfig, seed: int = 0,
                        threads: int = 1) -> ExperimentResult:
    n = g.n
    if n < 2:
        raise ValueError("GHZ preparation needs n >= 2")
    program = ghz_program(g, depth)
    start = StateVector.plus(n)
    x0 = initial_times(depth, config, rng_for(seed, _INIT))

    def loss(eta, _step=None):
        return ghz_loss(apply_qgnn(program, eta, start))

    opt = config.optimizer
    with mapper(threads) as map_fn:
        res = minimize_adam(loss, x0, opt.steps, opt.lr, opt.fd_eps, opt.beta1, opt.beta2,
                            opt.eps, map_fn=map_fn)
    final_state = apply_qgnn(program, res.x, start)
    fid = fidelity(StateVector.ghz(n), final_state)
    ratio = None
    if config.kickback_points >= 4 * n + 2:
        ratio = phase_kickback_test(final_state, config.collector,
                                    kickback_phis(config.kickback_points))
    metrics = {"final_loss": res.fun, "fidelity": fid, "kickback_ratio": ratio,
               "optimal_loss": -float(n)}
    details = {"graph": g.to_dict(), "params": res.x.tolist(), "program": program.describe()}
    return ExperimentResult("ghz", metrics, details, res.trace,
                            artifacts={"state": final_state, "params": res.x})
