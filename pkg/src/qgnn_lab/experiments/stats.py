"""Energy samples and the two-sample Kolmogorov-Smirnov statistic."""
from __future__ import annotations

import numpy as np


class EnergySampleSet:
    """Measured coupling-Hamiltonian eigenvalues, one per shot."""

    __slots__ = ("energies",)

    def __init__(self, energies):
        self.energies = np.asarray(energies, dtype=float).reshape(-1)

    def __len__(self):
        return self.energies.size


def _values(x) -> np.ndarray:
    return x.energies if isinstance(x, EnergySampleSet) else np.asarray(x, dtype=float).reshape(-1)


def ks_statistic(a, b) -> float:
    """``sup_x |F_a(x) - F_b(x)|`` between the two empirical CDFs."""
    a, b = np.sort(_values(a)), np.sort(_values(b))
    if a.size == 0 or b.size == 0:
        raise ValueError("KS statistic needs two non-empty sample sets")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def distribution_ks(levels_a, probs_a, levels_b, probs_b) -> float:
    """KS distance between two discrete distributions given as (levels, masses)."""
    levels_a, probs_a = np.asarray(levels_a, float), np.asarray(probs_a, float)
    levels_b, probs_b = np.asarray(levels_b, float), np.asarray(probs_b, float)
    grid = np.union1d(levels_a, levels_b)
    ca = np.array([probs_a[levels_a <= x].sum() for x in grid])
    cb = np.array([probs_b[levels_b <= x].sum() for x in grid])
    return float(np.max(np.abs(ca - cb)))


def energy_distribution(probs, energies, decimals: int = 9) -> tuple[np.ndarray, np.ndarray]:
    """Probability mass per distinct energy level, levels ascending."""
    keys = np.round(np.asarray(energies, float), decimals)
    levels, inverse = np.unique(keys, return_inverse=True)
    mass = np.bincount(inverse, weights=np.asarray(probs, float), minlength=levels.size)
    return levels, mass


def iso_pair_loss(y: int, ks: float) -> float:
    """``(1 - y)(1 - ks) + y ks``: small when the KS value agrees with the label."""
    if y not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {y!r}")
    if not 0.0 <= ks <= 1.0:
        raise ValueError(f"KS statistic must lie in [0, 1], got {ks}")
    return (1 - y) * (1 - ks) + y * ks
