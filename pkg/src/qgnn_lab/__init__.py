"""Statevector simulation and layered graph-Hamiltonian ansatze."""
from .ansatz import AnsatzProgram, Tying, apply_qgnn, qsgcnn_layer_schedule, trotter_evolve
from .graph import Graph, are_isomorphic, erdos_renyi_connected, laplacian, permute
from .hamiltonians import IsingParams, coupling_hamiltonian_1q, expectation, ising_hamiltonian
from .pauli import PauliSum
from .sim import PositionRegister, StateVector

__version__ = "0.1.0"

__all__ = [
    "AnsatzProgram", "Graph", "IsingParams", "PauliSum", "PositionRegister", "StateVector",
    "Tying", "apply_qgnn", "are_isomorphic", "coupling_hamiltonian_1q", "erdos_renyi_connected",
    "expectation", "ising_hamiltonian", "laplacian", "permute", "qsgcnn_layer_schedule",
    "trotter_evolve",
]
