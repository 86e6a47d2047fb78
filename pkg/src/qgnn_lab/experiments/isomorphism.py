"""Graph-isomorphism classification from energy-sample KS statistics.

Both graphs of a pair run the single-qubit spectral schedule with the same
shared times; the two-sample KS statistic between their measured coupling
energies decides the label (non-isomorphic iff KS exceeds the threshold).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._util import mapper, rng_for
from ..ansatz import AnsatzProgram, apply_qgnn, qsgcnn_layer_schedule
from ..graph import Graph, are_isomorphic, erdos_renyi_connected, permute
from ..hamiltonians import coupling_hamiltonian_1q
from ..optimize import nelder_mead
from ..sim import StateVector
from .common import ExperimentResult, NelderMeadConfig
from .stats import distribution_ks, energy_distribution, iso_pair_loss, ks_statistic

_DATA, _INIT, _SHOTS = 1, 2, 3
SPLITS = ("train", "val", "test")


@dataclass
class IsoConfig:
    n: int = field(default=6, metadata={"min": 2})
    p: float = field(default=0.5, metadata={"gt": 0.0, "lt": 1.0})
    samples: int = field(default=50, metadata={"min": 0})
    depth: int = field(default=3, metadata={"min": 1})
    n_train: int = field(default=100, metadata={"min": 2})
    n_val: int = field(default=50, metadata={"min": 2})
    n_test: int = field(default=50, metadata={"min": 2})
    threshold: float = field(default=0.4, metadata={"min": 0.0, "max": 1.0})
    init_range: float = field(default=1.0, metadata={"gt": 0.0})
    val_every: int = field(default=10, metadata={"min": 1})
    optimizer: NelderMeadConfig = field(default_factory=NelderMeadConfig)


@dataclass(frozen=True)
class IsoPair:
    g1: Graph
    g2: Graph
    label: int  # 1 if isomorphic


@dataclass
class IsoPairDataset:
    train: list[IsoPair]
    val: list[IsoPair]
    test: list[IsoPair]

    def split(self, name: str) -> list[IsoPair]:
        return getattr(self, name)


def isomorphic_pair(n: int, p: float, rng: np.random.Generator) -> IsoPair:
    g = erdos_renyi_connected(n, p, rng)
    return IsoPair(g, permute(g, rng.permutation(n).tolist()), 1)


def non_isomorphic_pair(n: int, p: float, rng: np.random.Generator,
                        max_attempts: int = 10_000) -> IsoPair:
    g1 = erdos_renyi_connected(n, p, rng)
    for _ in range(max_attempts):
        g2 = erdos_renyi_connected(n, p, rng)
        if not are_isomorphic(g1, g2):
            return IsoPair(g1, g2, 0)
    raise RuntimeError(f"no non-isomorphic partner found in {max_attempts} draws")


def build_iso_dataset(n: int, p: float, sizes: tuple[int, int, int],
                      rng: np.random.Generator) -> IsoPairDataset:
    """Balanced splits: half relabelled copies, half independent non-isomorphic draws."""
    splits = []
    for size in sizes:
        if size % 2:
            raise ValueError(f"split sizes must be even to balance classes, got {size}")
        pairs = ([isomorphic_pair(n, p, rng) for _ in range(size // 2)]
                 + [non_isomorphic_pair(n, p, rng) for _ in range(size // 2)])
        splits.append([pairs[i] for i in rng.permutation(size)])
    return IsoPairDataset(*splits)


class PairEvaluator:
    """KS statistic per pair under shared parameters.

    Each graph owns a fixed sampling stream, recreated on every call, so the
    objective is a deterministic function of the parameters.
    """

    def __init__(self, dataset: IsoPairDataset, depth: int, samples: int, seed: int):
        self.depth = depth
        self.samples = samples
        self.seed = seed
        self.dataset = dataset
        self._programs: dict[Graph, tuple[AnsatzProgram, np.ndarray]] = {}

    def _program(self, g: Graph):
        if g not in self._programs:
            self._programs[g] = (qsgcnn_layer_schedule(g, None, self.depth),
                                 coupling_hamiltonian_1q(g).diagonal)
        return self._programs[g]

    def n_params(self) -> int:
        return 2 * self.depth

    def energies(self, g: Graph, params, key: tuple[int, ...]):
        program, cost = self._program(g)
        probs = apply_qgnn(program, params, StateVector.plus(g.n)).probabilities
        if not self.samples:
            return energy_distribution(probs, cost)
        cdf = np.cumsum(probs)
        cdf /= cdf[-1]
        u = rng_for(self.seed, _SHOTS, *key).random(self.samples)
        return cost[np.searchsorted(cdf, u, side="right")]

    def ks(self, split: str, i: int, params) -> float:
        pair = self.dataset.split(split)[i]
        s = SPLITS.index(split)
        a = self.energies(pair.g1, params, (s, i, 0))
        b = self.energies(pair.g2, params, (s, i, 1))
        if self.samples:
            return ks_statistic(a, b)
        return distribution_ks(*a, *b)

    def ks_all(self, split: str, params, map_fn=map) -> np.ndarray:
        idx = range(len(self.dataset.split(split)))
        return np.array(list(map_fn(lambda i: self.ks(split, i, params), idx)))


def classify(ks_values, threshold: float) -> np.ndarray:
    """Predicted labels: 0 (non-isomorphic) iff KS > threshold."""
    return np.where(np.asarray(ks_values) > threshold, 0, 1)


def accuracy(ks_values, labels, threshold: float) -> float:
    return float(np.mean(classify(ks_values, threshold) == np.asarray(labels)))


def mean_pair_loss(ks_values, labels) -> float:
    return float(np.mean([iso_pair_loss(int(y), float(min(max(k, 0.0), 1.0)))
                          for y, k in zip(labels, ks_values)]))


def run_graph_isomorphism(config: IsoConfig, seed: int = 0, threads: int = 1) -> ExperimentResult:
    sizes = (config.n_train, config.n_val, config.n_test)
    data = build_iso_dataset(config.n, config.p, sizes, rng_for(seed, _DATA))
    ev = PairEvaluator(data, config.depth, config.samples, seed)
    labels = {s: np.array([pr.label for pr in data.split(s)]) for s in SPLITS}
    opt = config.optimizer

    with mapper(threads) as map_fn:
        def objective(params):
            return mean_pair_loss(ev.ks_all("train", params, map_fn), labels["train"])

        best = None
        total_evals = 0
        for r in range(opt.restarts):
            x0 = rng_for(seed, _INIT, r).uniform(-config.init_range, config.init_range,
                                                 ev.n_params())
            res = nelder_mead(objective, x0, max_evals=opt.max_evals, tol=opt.tol,
                              abs_step=opt.initial_step or None)
            total_evals += res.n_evals
            if best is None or res.fun < best.fun:
                best = res

        ks = {s: ev.ks_all(s, best.x, map_fn) for s in SPLITS}
        curve = []
        for it, loss, _, params in best.trace.rows[:: config.val_every]:
            val_ks = ev.ks_all("val", params, map_fn)
            curve.append([it, loss, mean_pair_loss(val_ks, labels["val"]),
                          accuracy(val_ks, labels["val"], config.threshold)])

    acc = {s: accuracy(ks[s], labels[s], config.threshold) for s in SPLITS}
    metrics = {
        "train_accuracy": acc["train"],
        "val_accuracy": acc["val"],
        "test_accuracy": acc["test"],
        "final_loss": best.fun,
        "test_loss": mean_pair_loss(ks["test"], labels["test"]),
        "converged": best.converged,
        "evaluations": total_evals,
    }
    rows = []
    for s in SPLITS:
        pred = classify(ks[s], config.threshold)
        for i, pair in enumerate(data.split(s)):
            rows.append([s, i, int(pair.label), float(ks[s][i]), int(pred[i]),
                         pair.g1.to_json(), pair.g2.to_json()])
    details = {"params": best.x.tolist(),
               "val_curve": {"header": ["iteration", "train_loss", "val_loss", "val_accuracy"],
                             "rows": curve}}
    tables = {"pairs.csv": (["split", "index", "label", "ks", "predicted", "g1", "g2"], rows)}
    return ExperimentResult("isomorphism", metrics, details, best.trace, tables,
                            artifacts={"dataset": data, "ks": ks, "params": best.x})
