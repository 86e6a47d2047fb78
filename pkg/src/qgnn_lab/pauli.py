"""Real-coefficient sums of Pauli strings.

Basis index ``i`` encodes qubit ``q`` in bit ``q`` (qubit 0 is least significant).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

AXES = ("X", "Y", "Z")

Term = tuple[float, tuple[tuple[int, str], ...]]


class PauliError(ValueError):
    pass


def _normalize_term(n_qubits: int, coeff, ops) -> Term:
    coeff = float(coeff)
    if not np.isfinite(coeff):
        raise PauliError(f"non-finite coefficient {coeff}")
    seen = set()
    norm = []
    for q, axis in ops:
        q, axis = int(q), str(axis).upper()
        if axis not in AXES:
            raise PauliError(f"unknown Pauli axis {axis!r}")
        if not 0 <= q < n_qubits:
            raise PauliError(f"qubit {q} out of range for {n_qubits} qubits")
        if q in seen:
            raise PauliError(f"two operators on qubit {q} in one term")
        seen.add(q)
        norm.append((q, axis))
    return coeff, tuple(sorted(norm))


def _masks(ops) -> tuple[int, int, int]:
    """(flip mask, phase mask, number of Y factors) for a Pauli string."""
    x = z = ny = 0
    for q, axis in ops:
        if axis in "XY":
            x |= 1 << q
        if axis in "YZ":
            z |= 1 << q
        ny += axis == "Y"
    return x, z, ny


def _parity(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(values).astype(np.int64) & 1


def terms_commute(a: Sequence[tuple[int, str]], b: Sequence[tuple[int, str]]) -> bool:
    da = dict(a)
    clashes = sum(1 for q, axis in b if q in da and da[q] != axis)
    return clashes % 2 == 0


@dataclass(frozen=True, eq=False)
class PauliSum:
    """Sum of weighted Pauli strings on ``n_qubits`` qubits.

    ``terms`` is a sequence of ``(coeff, ops)`` with ``ops`` a sequence of
    ``(qubit, axis)``; an empty ``ops`` is an identity offset. ``groups``
    optionally declares a partition of term indices into commuting groups.
    """

    n_qubits: int
    terms: tuple[Term, ...] = ()
    groups: tuple[tuple[int, ...], ...] | None = field(default=None)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise PauliError("need at least one qubit")
        terms = tuple(_normalize_term(self.n_qubits, c, ops) for c, ops in self.terms)
        object.__setattr__(self, "terms", terms)
        if self.groups is not None:
            groups = tuple(tuple(int(i) for i in grp) for grp in self.groups)
            flat = sorted(i for grp in groups for i in grp)
            if flat != list(range(len(terms))):
                raise PauliError("groups must partition the term indices")
            object.__setattr__(self, "groups", groups)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise PauliError("qubit count mismatch")
        return PauliSum(self.n_qubits, self.terms + other.terms)

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum(self.n_qubits, tuple((c * float(scalar), ops) for c, ops in self.terms),
                        self.groups)

    __rmul__ = __mul__

    def simplify(self) -> "PauliSum":
        """Merge identical strings and drop zero coefficients."""
        merged: dict = {}
        for c, ops in self.terms:
            merged[ops] = merged.get(ops, 0.0) + c
        return PauliSum(self.n_qubits, tuple((c, ops) for ops, c in merged.items() if c != 0.0))

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self.terms == other.terms

    def __hash__(self):
        return hash((self.n_qubits, self.terms))

    # -- structure ---------------------------------------------------------

    @property
    def is_diagonal(self) -> bool:
        return all(axis == "Z" for _, ops in self.terms for _, axis in ops)

    @property
    def is_x_field(self) -> bool:
        """True if every term is a single-qubit X (or identity)."""
        return all(len(ops) <= 1 and all(a == "X" for _, a in ops) for _, ops in self.terms)

    def commuting_groups(self) -> tuple[tuple[int, ...], ...]:
        """Declared groups, or a greedy partition into pairwise-commuting sets."""
        if self.groups is not None:
            return self.groups
        groups: list[list[int]] = []
        for i, (_, ops) in enumerate(self.terms):
            for grp in groups:
                if all(terms_commute(ops, self.terms[j][1]) for j in grp):
                    grp.append(i)
                    break
            else:
                groups.append([i])
        return tuple(tuple(g) for g in groups)

    def group(self, index: int) -> "PauliSum":
        grp = self.commuting_groups()[index]
        return PauliSum(self.n_qubits, tuple(self.terms[i] for i in grp))

    # -- numerics ----------------------------------------------------------

    @cached_property
    def _basis(self) -> np.ndarray:
        return np.arange(2 ** self.n_qubits, dtype=np.int64)

    @cached_property
    def diagonal(self) -> np.ndarray:
        """Eigenvalue on every computational basis state (diagonal sums only)."""
        if not self.is_diagonal:
            raise PauliError("Hamiltonian has off-diagonal terms")
        idx = self._basis
        out = np.zeros(idx.size)
        for c, ops in self.terms:
            _, z, _ = _masks(ops)
            out += c * (1 - 2 * _parity(idx & z))
        return out

    def apply(self, amps: np.ndarray) -> np.ndarray:
        """Return ``H @ amps`` without materialising the matrix."""
        amps = np.asarray(amps)
        if amps.shape != (2 ** self.n_qubits,):
            raise PauliError(f"state length {amps.shape} does not match {self.n_qubits} qubits")
        idx = self._basis
        out = np.zeros(amps.shape, dtype=complex)
        for c, ops in self.terms:
            x, z, ny = _masks(ops)
            src = idx ^ x
            sign = 1 - 2 * _parity(src & z)
            out += (c * (1j) ** ny) * sign * amps[src]
        return out

    def to_matrix(self) -> np.ndarray:
        dim = 2 ** self.n_qubits
        idx = self._basis
        m = np.zeros((dim, dim), dtype=complex)
        for c, ops in self.terms:
            x, z, ny = _masks(ops)
            # P|i> = i^ny (-1)^{popcount(i & z)} |i ^ x>
            m[idx ^ x, idx] += (c * (1j) ** ny) * (1 - 2 * _parity(idx & z))
        return m

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        w, v = np.linalg.eigh(self.to_matrix())
        return w, v

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for c, ops in self.terms:
            body = " ".join(f"{a}{q}" for q, a in ops) if ops else "I"
            lines.append(f"{c!r} {body}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> "PauliSum":
        """Parse lines like ``0.5 Z0 Z3`` or ``-1.0 I``; ``#`` starts a comment."""
        terms = []
        max_q = -1
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                coeff = float(parts[0])
            except ValueError:
                raise PauliError(f"line {lineno}: bad coefficient {parts[0]!r}") from None
            ops = []
            for tok in parts[1:]:
                if tok.upper() == "I":
                    continue
                axis, digits = tok[0].upper(), tok[1:]
                if axis not in AXES or not digits.isdigit():
                    raise PauliError(f"line {lineno}: bad operator {tok!r}")
                ops.append((int(digits), axis))
                max_q = max(max_q, int(digits))
            terms.append((coeff, ops))
        if n_qubits is None:
            n_qubits = max(max_q + 1, 1)
        return cls(n_qubits, tuple(terms))

    def __repr__(self):
        return f"PauliSum(n_qubits={self.n_qubits}, terms={len(self.terms)})"


def pauli_sum(n_qubits: int, terms: Iterable[tuple[float, Iterable[tuple[int, str]]]],
              groups=None) -> PauliSum:
    return PauliSum(n_qubits, tuple((c, tuple(ops)) for c, ops in terms), groups)
