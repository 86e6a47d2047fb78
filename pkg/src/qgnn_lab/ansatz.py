"""Layered Hamiltonian-evolution ansatz (QGNN family).

A program is an ordered list of slots, each wrapping one Hamiltonian, repeated
``depth`` times. Parameters are a flat vector: evolution times first in
``(p, q)`` row-major order (layer-major, slot-minor), then any trainable
Hamiltonian coefficients.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .graph import Graph
from .hamiltonians import IsingParams, coupling_hamiltonian_1q
from .pauli import PauliSum
from .sim import (PositionRegister, StateVector, SimulationError, evolve_dense,
                  evolve_diagonal, evolve_energies, evolve_mixer, evolve_position_kinetic,
                  position_coupling, position_potential)


class AnsatzError(ValueError):
    pass


class Tying(str, enum.Enum):
    FREE = "free"
    TEMPORAL = "temporal"
    SPATIAL = "spatial"


@dataclass(frozen=True, eq=False)
class Slot:
    """One Hamiltonian of the layer and the simulator path that evolves it."""

    tag: str
    hamiltonian: PauliSum | None = None
    qubits: tuple[int, ...] = ()
    register: PositionRegister | None = None
    energies: np.ndarray | None = None
    label: str = ""

    def evolve(self, state: StateVector, t: float) -> StateVector:
        if self.tag == "diagonal":
            return evolve_diagonal(state, self.hamiltonian, t)
        if self.tag == "mixer":
            return evolve_mixer(state, self.qubits, t)
        if self.tag == "dense":
            return evolve_dense(state, self.hamiltonian, t)
        if self.tag == "position-kinetic":
            return evolve_position_kinetic(state, self.register, t)
        if self.tag == "position-potential":
            return evolve_energies(state, self.energies, t)
        raise AnsatzError(f"unknown slot tag {self.tag!r}")

    def describe(self) -> dict:
        return {"tag": self.tag, "label": self.label}


def diagonal_slot(h: PauliSum, label: str = "") -> Slot:
    if not h.is_diagonal:
        raise AnsatzError("diagonal slot needs a diagonal Hamiltonian")
    return Slot("diagonal", hamiltonian=h, label=label)


def mixer_slot(n_qubits: int, qubits: Sequence[int] | None = None, label: str = "mixer") -> Slot:
    qubits = tuple(range(n_qubits)) if qubits is None else tuple(qubits)
    h = PauliSum(n_qubits, tuple((1.0, ((q, "X"),)) for q in qubits))
    return Slot("mixer", hamiltonian=h, qubits=qubits, label=label)


def dense_slot(h: PauliSum, label: str = "") -> Slot:
    return Slot("dense", hamiltonian=h, label=label)


def slot_for(h: PauliSum, label: str = "") -> Slot:
    """Pick the cheapest exact path for ``h``: diagonal, X-field, or dense."""
    if h.is_diagonal:
        return diagonal_slot(h, label)
    if h.is_x_field and all(c == 1.0 for c, _ in h.terms):
        qubits = [ops[0][0] for _, ops in h.terms if ops]
        if len(set(qubits)) == len(qubits):
            return mixer_slot(h.n_qubits, qubits, label)
    return dense_slot(h, label)


@dataclass(frozen=True, eq=False)
class AnsatzProgram:
    slots: tuple[Slot, ...]
    depth: int
    tying: Tying = Tying.FREE
    n_coefficients: int = 0
    rebuild: Callable[[np.ndarray], tuple[Slot, ...]] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.depth < 1:
            raise AnsatzError(f"depth must be >= 1, got {self.depth}")
        if not self.slots:
            raise AnsatzError("program needs at least one slot")
        object.__setattr__(self, "tying", Tying(self.tying))
        if self.n_coefficients and self.rebuild is None:
            raise AnsatzError("trainable coefficients need a rebuild function")

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    @property
    def n_time_params(self) -> int:
        if self.tying is Tying.TEMPORAL:
            return self.n_slots
        return self.depth * self.n_slots

    @property
    def n_params(self) -> int:
        return self.n_time_params + self.n_coefficients

    @property
    def n_qubits(self) -> int:
        s = self.slots[0]
        if s.hamiltonian is not None:
            return s.hamiltonian.n_qubits
        if s.register is not None:
            return s.register.n_qubits
        return int(s.energies.size).bit_length() - 1

    def with_depth(self, depth: int) -> "AnsatzProgram":
        return replace(self, depth=depth)

    def bind(self, coefficients) -> "AnsatzProgram":
        """Fix the trainable coefficients, leaving only evolution times."""
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.size != self.n_coefficients:
            raise AnsatzError(f"expected {self.n_coefficients} coefficients")
        if not self.n_coefficients:
            return self
        slots = tuple(self.rebuild(coefficients))
        if len(slots) != self.n_slots:
            raise AnsatzError("rebuild returned the wrong number of slots")
        return replace(self, slots=slots, n_coefficients=0, rebuild=None)

    def times(self, params) -> np.ndarray:
        """Evolution times as a ``(depth, n_slots)`` array."""
        params = self._check(params)
        eta = params[: self.n_time_params]
        if self.tying is Tying.TEMPORAL:
            return np.tile(eta, (self.depth, 1))
        return eta.reshape(self.depth, self.n_slots)

    def coefficients(self, params) -> np.ndarray:
        return self._check(params)[self.n_time_params:]

    def bound_slots(self, params) -> tuple[Slot, ...]:
        if self.n_coefficients:
            slots = tuple(self.rebuild(self.coefficients(params)))
            if len(slots) != self.n_slots:
                raise AnsatzError("rebuild returned the wrong number of slots")
            return slots
        return self.slots

    def _check(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float).reshape(-1)
        if params.size != self.n_params:
            raise AnsatzError(f"expected {self.n_params} parameters, got {params.size}")
        if not np.all(np.isfinite(params)):
            raise AnsatzError("parameters must be finite")
        return params

    def describe(self) -> dict:
        layout = ([f"eta[{q}]" for q in range(self.n_slots)] if self.tying is Tying.TEMPORAL
                  else [f"eta[{p},{q}]" for p in range(self.depth) for q in range(self.n_slots)])
        layout += [f"theta[{r}]" for r in range(self.n_coefficients)]
        return {"tying": self.tying.value, "depth": self.depth,
                "slots": [s.describe() for s in self.slots], "layout": layout}


def apply_qgnn(program: AnsatzProgram, params, state: StateVector) -> StateVector:
    """Run every layer in time order: slot ``q`` inside layer ``p``."""
    if state.n_qubits != program.n_qubits:
        raise SimulationError(
            f"state has {state.n_qubits} qubits, program expects {program.n_qubits}")
    eta = program.times(params)
    slots = program.bound_slots(params)
    for p in range(program.depth):
        for q, slot in enumerate(slots):
            if eta[p, q] != 0.0:
                state = slot.evolve(state, eta[p, q])
    return state


def trotter_steps(total_time: float, step: float) -> list[float]:
    """Split ``total_time`` into ``round(total_time / step)`` steps of size ``step``,
    folding the leftover into the last one."""
    if total_time < 0 or not step > 0:
        raise AnsatzError("need total_time >= 0 and step > 0")
    if total_time == 0:
        return []
    count = int(round(total_time / step))
    if count <= 1:
        return [total_time]
    return [step] * (count - 1) + [total_time - (count - 1) * step]


def trotter_evolve(program: AnsatzProgram, state: StateVector, total_time: float,
                   step: float, coefficients=()) -> StateVector:
    """Run a temporally tied program for ``total_time`` with every slot time set
    to the current step size, so each layer approximates ``exp(-i step sum_q H_q)``."""
    if program.tying is not Tying.TEMPORAL:
        raise AnsatzError("time evolution needs a temporally tied program")
    steps = trotter_steps(total_time, step)
    if not steps:
        return state
    coefficients = list(np.asarray(coefficients, dtype=float))
    q = program.n_slots
    if len(steps) > 1:
        state = apply_qgnn(program.with_depth(len(steps) - 1), [steps[0]] * q + coefficients,
                           state)
    return apply_qgnn(program.with_depth(1), [steps[-1]] * q + coefficients, state)


def qgrnn_effective_hamiltonian(program: AnsatzProgram, params) -> tuple[PauliSum, float]:
    """``(sum_q eta_q H_q / Delta, Delta)`` with ``Delta = sum_q |eta_q|``."""
    if program.tying is not Tying.TEMPORAL:
        raise AnsatzError("effective Hamiltonian is defined for temporally tied programs")
    eta = program.times(params)[0]
    slots = program.bound_slots(params)
    if any(s.hamiltonian is None for s in slots):
        raise AnsatzError("every slot needs a Pauli-sum Hamiltonian")
    delta = float(np.sum(np.abs(eta)))
    if delta == 0.0:
        raise AnsatzError("all evolution times are zero")
    total = None
    for e, s in zip(eta, slots):
        part = s.hamiltonian * (e / delta)
        total = part if total is None else total + part
    return total.simplify(), delta


def qgrnn_program(slots_for: Callable[[np.ndarray], tuple[Slot, ...]], n_coefficients: int,
                  template, depth: int = 1) -> AnsatzProgram:
    """Temporally tied program whose Hamiltonians depend on trainable coefficients.

    ``template`` is any coefficient vector used to build the placeholder slots.
    """
    return AnsatzProgram(tuple(slots_for(np.asarray(template, dtype=float))), depth,
                         Tying.TEMPORAL, n_coefficients, slots_for)


def qsgcnn_layer_schedule(g: Graph, reg: PositionRegister | None, depth: int,
                          mu: float = 0.0, omega: float = 1.0) -> AnsatzProgram:
    """Spectral graph-convolution schedule.

    With ``reg=None`` (single-qubit precision) each layer is coupling then X
    mixer, two times per layer. With a position register each layer is
    coupling, kinetic, quartic, kinetic: times ``(alpha, gamma, delta, beta)``.
    """
    if depth < 1:
        raise AnsatzError(f"depth must be >= 1, got {depth}")
    if reg is None:
        slots = (diagonal_slot(coupling_hamiltonian_1q(g), "coupling"),
                 mixer_slot(g.n, label="kinetic"))
    else:
        if reg.n_nodes != g.n:
            raise AnsatzError("register and graph node counts differ")
        kinetic = Slot("position-kinetic", register=reg, label="kinetic")
        slots = (Slot("position-potential", register=reg, energies=position_coupling(reg, g),
                      label="coupling"),
                 kinetic,
                 Slot("position-potential", register=reg,
                      energies=position_potential(reg, quartic(mu, omega)), label="anharmonic"),
                 kinetic)
    return AnsatzProgram(slots, depth, Tying.FREE)


def quartic(mu: float, omega: float) -> Callable[[np.ndarray], np.ndarray]:
    """Double-well ``((x - mu)^2 - omega^2)^2``."""
    return lambda x: ((x - mu) ** 2 - omega ** 2) ** 2


def bind_spatial(g: Graph, tied) -> IsingParams:
    """Broadcast tied ``(W, B)`` to every edge and node of ``g``."""
    w, b = (float(v) for v in tied)
    return IsingParams.uniform(g, w, b)
