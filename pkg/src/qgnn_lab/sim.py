"""Dense statevector simulation.

Qubit 0 is the least significant bit of the basis index. Every evolution
returns a new :class:`StateVector`; inputs are never modified.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .graph import Graph
from .pauli import PauliSum

DENSE_CAP = 14
NORM_TOL = 1e-10


class SimulationError(ValueError):
    pass


class StateVector:
    """Normalised complex amplitudes over ``2**n_qubits`` basis states."""

    __slots__ = ("amps",)

    def __init__(self, amps, normalize: bool = False):
        amps = np.array(amps, dtype=complex).reshape(-1)
        dim = amps.size
        if dim < 2 or dim & (dim - 1):
            raise SimulationError(f"amplitude count {dim} is not a power of two >= 2")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise SimulationError("cannot normalise the zero vector")
            amps = amps / norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise SimulationError(f"state norm {norm} differs from 1")
        self.amps = amps

    @property
    def n_qubits(self) -> int:
        return self.amps.size.bit_length() - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        amps = np.zeros(2 ** n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def plus(cls, n_qubits: int) -> "StateVector":
        return cls(np.full(2 ** n_qubits, 2 ** (-n_qubits / 2), dtype=complex))

    @classmethod
    def ghz(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(2 ** n_qubits, dtype=complex)
        amps[0] = amps[-1] = 2 ** -0.5
        return cls(amps)

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


@dataclass(frozen=True)
class MeasurementRecord:
    bitstrings: np.ndarray

    @property
    def shots(self) -> int:
        return int(self.bitstrings.size)


@dataclass(frozen=True)
class PositionRegister:
    """Qubit emulation of one continuous position variable per node.

    Node ``j`` owns qubits ``j*m .. j*m+m-1``; its register value ``s``
    (read little-endian from those qubits) means position
    ``h * (s - (2**m - 1) / 2)``.
    """

    m: int
    h: float
    n_nodes: int

    def __post_init__(self):
        if self.m < 1 or self.n_nodes < 1:
            raise SimulationError("register needs m >= 1 and at least one node")
        if not self.h > 0:
            raise SimulationError(f"grid spacing must be positive, got {self.h}")

    @classmethod
    def spanning(cls, m: int, n_nodes: int, half_width: float) -> "PositionRegister":
        """Register whose grid runs exactly from -half_width to +half_width."""
        return cls(m, 2 * half_width / (2 ** m - 1), n_nodes)

    @property
    def size(self) -> int:
        return 2 ** self.m

    @property
    def n_qubits(self) -> int:
        return self.m * self.n_nodes

    @property
    def node_offsets(self) -> dict[int, int]:
        return {j: j * self.m for j in range(self.n_nodes)}

    @cached_property
    def grid(self) -> np.ndarray:
        return self.h * (np.arange(self.size) - (self.size - 1) / 2)

    @cached_property
    def momenta(self) -> np.ndarray:
        """Conjugate momentum of each DFT bin, spacing ``2*pi/(2**m * h)``."""
        return 2 * np.pi * np.fft.fftfreq(self.size, d=self.h)

    @cached_property
    def node_positions(self) -> np.ndarray:
        """Array ``(n_nodes, 2**n_qubits)`` of each node's position per basis index."""
        idx = np.arange(2 ** self.n_qubits, dtype=np.int64)
        return np.stack([self.grid[(idx >> (j * self.m)) & (self.size - 1)]
                         for j in range(self.n_nodes)])

    def as_tensor(self, amps: np.ndarray) -> np.ndarray:
        # C-order reshape puts the most significant node first.
        return amps.reshape([self.size] * self.n_nodes)

    def node_axis(self, j: int) -> int:
        return self.n_nodes - 1 - j

    def marginal(self, state: StateVector, j: int) -> np.ndarray:
        p = self.as_tensor(state.probabilities)
        other = tuple(a for a in range(self.n_nodes) if a != self.node_axis(j))
        return p.sum(axis=other) if other else p


# -- helpers ----------------------------------------------------------------

def _phase(state: StateVector, energies: np.ndarray, t: float) -> StateVector:
    return StateVector(state.amps * np.exp(-1j * t * energies))


def _check_dims(state: StateVector, n_qubits: int):
    if state.n_qubits != n_qubits:
        raise SimulationError(f"state has {state.n_qubits} qubits, operator expects {n_qubits}")


# -- evolutions -------------------------------------------------------------

def evolve_diagonal(state: StateVector, h: PauliSum, t: float) -> StateVector:
    """Exact ``exp(-i t H)`` for a Hamiltonian diagonal in the computational basis."""
    if not h.is_diagonal:
        raise SimulationError("evolve_diagonal requires a diagonal Hamiltonian")
    _check_dims(state, h.n_qubits)
    return _phase(state, h.diagonal, t)


def evolve_mixer(state: StateVector, qubits: Sequence[int], t: float) -> StateVector:
    """Apply ``exp(-i t X_q)`` to each listed qubit."""
    n = state.n_qubits
    for q in qubits:
        if not 0 <= q < n:
            raise SimulationError(f"qubit {q} out of range for {n} qubits")
    c, s = np.cos(t), -1j * np.sin(t)
    psi = state.amps.reshape([2] * n)
    for q in qubits:
        psi = c * psi + s * np.flip(psi, axis=n - 1 - q)
    return StateVector(psi.reshape(-1))


def evolve_dense(state: StateVector, h: PauliSum, t: float, cap: int = DENSE_CAP) -> StateVector:
    """Exact ``exp(-i t H)`` through the eigendecomposition of the dense matrix."""
    if h.n_qubits > cap:
        raise SimulationError(
            f"{h.n_qubits} qubits exceeds the dense cap of {cap}; "
            "use a Trotterized schedule of structured evolutions instead")
    _check_dims(state, h.n_qubits)
    w, v = h.eigh
    return StateVector(v @ (np.exp(-1j * t * w) * (v.conj().T @ state.amps)))


def ground_state(h: PauliSum, cap: int = DENSE_CAP, tol: float = 1e-9) -> StateVector:
    """Lowest-energy eigenvector.

    In a degenerate ground space the representative is the projection of the
    lowest-index basis state with non-zero overlap, so that amplitude is real
    and positive.
    """
    if h.n_qubits > cap:
        raise SimulationError(f"{h.n_qubits} qubits exceeds the dense cap of {cap}")
    w, v = h.eigh
    scale = max(1.0, float(np.max(np.abs(w))))
    ground = v[:, w <= w[0] + tol * scale]
    weight = np.sum(np.abs(ground) ** 2, axis=1)
    i = int(np.argmax(weight > 1e-12))
    vec = ground @ ground[i].conj()
    return StateVector(vec / np.linalg.norm(vec))


def evolve_position_kinetic(state: StateVector, reg: PositionRegister, t: float) -> StateVector:
    """``exp(-i t sum_j p_j^2 / 2)`` by per-node Fourier transform."""
    _check_dims(state, reg.n_qubits)
    phase = np.exp(-0.5j * t * reg.momenta ** 2)
    psi = reg.as_tensor(state.amps)
    for j in range(reg.n_nodes):
        ax = reg.node_axis(j)
        shape = [1] * reg.n_nodes
        shape[ax] = reg.size
        k = np.fft.fft(psi, axis=ax, norm="ortho")
        psi = np.fft.ifft(k * phase.reshape(shape), axis=ax, norm="ortho")
    return StateVector(psi.reshape(-1))


def position_potential(reg: PositionRegister, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Diagonal of ``sum_j f(x_j)`` on the register."""
    values = np.asarray(f(reg.grid), dtype=float)
    if values.shape != reg.grid.shape or not np.all(np.isfinite(values)):
        raise SimulationError("potential must be finite on every grid point")
    idx = np.arange(2 ** reg.n_qubits, dtype=np.int64)
    return sum(values[(idx >> (j * reg.m)) & (reg.size - 1)] for j in range(reg.n_nodes))


def position_coupling(reg: PositionRegister, g: Graph) -> np.ndarray:
    """Diagonal of ``1/2 sum_{jk in E} w_jk (x_j - x_k)^2``."""
    if g.n != reg.n_nodes:
        raise SimulationError("graph and register node counts differ")
    x = reg.node_positions
    out = np.zeros(x.shape[1])
    for (j, k), w in g.weights.items():
        out += 0.5 * w * (x[j] - x[k]) ** 2
    return out


def evolve_position_potential(state: StateVector, reg: PositionRegister,
                              f: Callable[[np.ndarray], np.ndarray], t: float) -> StateVector:
    _check_dims(state, reg.n_qubits)
    return _phase(state, position_potential(reg, f), t)


def evolve_position_coupling(state: StateVector, reg: PositionRegister, g: Graph,
                             t: float) -> StateVector:
    _check_dims(state, reg.n_qubits)
    return _phase(state, position_coupling(reg, g), t)


def evolve_energies(state: StateVector, energies: np.ndarray, t: float) -> StateVector:
    """Phase each basis amplitude by a precomputed diagonal energy."""
    if energies.shape != state.amps.shape:
        raise SimulationError("energy vector does not match the state")
    return _phase(state, energies, t)


# -- gates used by the phase-kickback test -----------------------------------

def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    n = state.n_qubits
    if control == target or not (0 <= control < n and 0 <= target < n):
        raise SimulationError(f"bad CNOT qubits ({control}, {target})")
    idx = np.arange(state.amps.size, dtype=np.int64)
    src = np.where((idx >> control) & 1, idx ^ (1 << target), idx)
    return StateVector(state.amps[src])


def apply_z_rotations(state: StateVector, phi: float) -> StateVector:
    """``prod_j exp(-i phi Z_j)`` on every qubit."""
    idx = np.arange(state.amps.size, dtype=np.int64)
    z_total = state.n_qubits - 2 * np.bitwise_count(idx).astype(float)
    return _phase(state, z_total, phi)


# -- measurement and comparison ---------------------------------------------

def overlap(a: StateVector, b: StateVector) -> complex:
    if a.amps.shape != b.amps.shape:
        raise SimulationError("states have different dimensions")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(overlap(a, b)) ** 2


def swap_test_estimate(a: StateVector, b: StateVector, shots: int,
                       rng: np.random.Generator) -> float:
    """Estimate ``|<a|b>|^2`` from simulated swap-test accept counts."""
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    p_accept = min(1.0, (1 + fidelity(a, b)) / 2)
    accepts = rng.binomial(shots, p_accept)
    return float(np.clip(2 * accepts / shots - 1, 0.0, 1.0))


def sample_bitstrings(state: StateVector, shots: int, rng: np.random.Generator) -> MeasurementRecord:
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    cdf = np.cumsum(state.probabilities)
    cdf /= cdf[-1]
    u = rng.random(shots)
    return MeasurementRecord(np.searchsorted(cdf, u, side="right").astype(np.int64))


# -- binary snapshot ----------------------------------------------------------

def dump_state(state: StateVector, path) -> None:
    """Write ``u32`` qubit count then little-endian interleaved (re, im) doubles."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", state.n_qubits))
        fh.write(state.amps.astype("<c16").tobytes())


def load_state(path) -> StateVector:
    with open(path, "rb") as fh:
        (n,) = struct.unpack("<I", fh.read(4))
        amps = np.frombuffer(fh.read(), dtype="<c16")
    if amps.size != 2 ** n:
        raise SimulationError(f"snapshot holds {amps.size} amplitudes, header says {n} qubits")
    return StateVector(amps.astype(complex))
