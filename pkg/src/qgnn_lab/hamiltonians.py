"""Graph-parameterized Hamiltonians used by the QGNN ansatz family."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .graph import Graph, laplacian
from .pauli import PauliError, PauliSum
from .sim import StateVector


@dataclass(frozen=True)
class IsingParams:
    """ZZ couplings per edge and Z biases per node; the X field is fixed at 1."""

    couplings: Mapping[tuple[int, int], float]
    biases: Mapping[int, float]

    @classmethod
    def uniform(cls, g: Graph, j: float, q: float) -> "IsingParams":
        return cls({e: float(j) for e in g.edges}, {v: float(q) for v in range(g.n)})

    def vector(self, g: Graph) -> np.ndarray:
        """Flatten as couplings in ``g.edges`` order followed by biases by node."""
        return np.array([self.couplings[e] for e in g.edges] + [self.biases[v] for v in range(g.n)])

    @classmethod
    def from_vector(cls, g: Graph, values) -> "IsingParams":
        values = np.asarray(values, dtype=float)
        m = g.num_edges
        if values.shape != (m + g.n,):
            raise ValueError(f"expected {m + g.n} values, got {values.shape}")
        return cls(dict(zip(g.edges, values[:m].tolist())), dict(enumerate(values[m:].tolist())))


def _check_params(g: Graph, params: IsingParams):
    edges = {(min(j, k), max(j, k)) for j, k in params.couplings}
    if edges != set(g.edges) or len(edges) != len(params.couplings):
        raise ValueError("Ising couplings must be given on exactly the graph's edges")
    if set(params.biases) != set(range(g.n)):
        raise ValueError("Ising biases must be given on exactly the graph's nodes")


def ising_zz_z(g: Graph, params: IsingParams) -> PauliSum:
    """The diagonal part ``sum J_jk Z_j Z_k + sum Q_v Z_v``."""
    _check_params(g, params)
    couplings = {(min(j, k), max(j, k)): c for (j, k), c in params.couplings.items()}
    terms = [(couplings[e], ((e[0], "Z"), (e[1], "Z"))) for e in g.edges]
    terms += [(params.biases[v], ((v, "Z"),)) for v in range(g.n)]
    return PauliSum(g.n, tuple(terms))


def ising_hamiltonian(g: Graph, params: IsingParams) -> PauliSum:
    """Transverse-field Ising model: ZZ couplings, Z biases and unit X fields."""
    diag = ising_zz_z(g, params)
    field = mixer_hamiltonian(g)
    k = len(diag.terms)
    return PauliSum(g.n, diag.terms + field.terms,
                    groups=(tuple(range(k)), tuple(range(k, k + g.n))))


def coupling_hamiltonian_1q(g: Graph) -> PauliSum:
    """Single-qubit-precision coupling Hamiltonian ``sum_jk L_jk n_j n_k``.

    ``n_j = |1><1|_j = (I - Z_j)/2``. The expansion keeps its identity offset,
    so the eigenvalue on bitstring ``b`` is exactly ``b^T L b``.
    """
    lap = laplacian(g)
    n = g.n
    terms: list = [(0.5 * np.trace(lap), ())]  # diagonal j == k: n_j^2 = n_j
    terms += [(-0.5 * lap[j, j], ((j, "Z"),)) for j in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            if lap[j, k] == 0.0:
                continue
            # L_jk n_j n_k + L_kj n_k n_j
            c = 0.5 * lap[j, k]
            terms += [(c, ()), (-c, ((j, "Z"),)), (-c, ((k, "Z"),)), (c, ((j, "Z"), (k, "Z")))]
    return PauliSum(n, tuple(terms)).simplify()


def mixer_hamiltonian(g: Graph) -> PauliSum:
    return PauliSum(g.n, tuple((1.0, ((v, "X"),)) for v in range(g.n)))


def zz_edge_hamiltonian(g: Graph) -> PauliSum:
    return PauliSum(g.n, tuple((1.0, ((j, "Z"), (k, "Z"))) for j, k in g.edges))


def ghz_stabilizer_sum(n: int) -> PauliSum:
    """``X^{(x)n} + sum_j Z_j Z_{j+1}``: the GHZ stabilizer generators."""
    if n < 2:
        raise ValueError("GHZ stabilizers need n >= 2")
    terms = [(1.0, tuple((q, "X") for q in range(n)))]
    terms += [(1.0, ((j, "Z"), (j + 1, "Z"))) for j in range(n - 1)]
    return PauliSum(n, tuple(terms))


def graph_hamiltonian(g: Graph, edge_terms: Iterable[tuple[float, str, str]] = (),
                      node_terms: Iterable[tuple[float, str]] = (),
                      edge_coeffs: Mapping | None = None,
                      node_coeffs: Mapping | None = None) -> PauliSum:
    """General graph Hamiltonian with single-qubit Pauli choices.

    ``edge_terms`` lists ``(W, O, P)`` meaning ``W * O_j P_k`` on every edge,
    ``node_terms`` lists ``(B, R)`` meaning ``B * R_v`` on every node. Passing
    ``edge_coeffs[(r, (j, k))]`` or ``node_coeffs[(r, v)]`` overrides the tied
    coefficient of term ``r`` locally.
    """
    edge_terms, node_terms = list(edge_terms), list(node_terms)
    edge_coeffs, node_coeffs = edge_coeffs or {}, node_coeffs or {}
    terms = []
    for r, (w, o, p) in enumerate(edge_terms):
        for j, k in g.edges:
            terms.append((edge_coeffs.get((r, (j, k)), w), ((j, o), (k, p))))
    for r, (b, op) in enumerate(node_terms):
        for v in range(g.n):
            terms.append((node_coeffs.get((r, v), b), ((v, op),)))
    h = PauliSum(g.n, tuple(terms))
    if len(h.commuting_groups()) > 1:
        raise PauliError("terms of one layer Hamiltonian must commute")
    return h


def expectation(state: StateVector, h: PauliSum) -> float:
    """``<psi|H|psi>``; the imaginary residue must vanish."""
    if state.n_qubits != h.n_qubits:
        raise ValueError(f"state has {state.n_qubits} qubits, Hamiltonian {h.n_qubits}")
    if h.is_diagonal:
        return float(np.dot(state.probabilities, h.diagonal))
    val = np.vdot(state.amps, h.apply(state.amps))
    scale = max(1.0, sum(abs(c) for c, _ in h.terms))
    if abs(val.imag) > 1e-10 * scale:
        raise ValueError(f"expectation has imaginary part {val.imag}")
    return float(val.real)
