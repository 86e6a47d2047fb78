"""Settings and result containers shared by the experiment runners.

Field ``metadata`` carries the range checks the config loader enforces:
``min`` / ``gt`` / ``lt`` / ``max`` bounds and ``choices``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..graph import (Graph, bridged_triangles, complete_graph, erdos_renyi_connected,
                     path_graph, ring_graph)
from ..optimize import Trace

GRAPH_KINDS = ("path", "ring", "complete", "bridged_triangles", "edges", "erdos_renyi")


@dataclass
class GraphSpec:
    kind: str = field(default="ring", metadata={"choices": GRAPH_KINDS})
    n: int = field(default=4, metadata={"min": 1})
    p: float = field(default=0.5, metadata={"gt": 0.0, "lt": 1.0})
    edges: list = field(default_factory=list)

    def build(self, rng: np.random.Generator | None = None) -> Graph:
        if self.kind == "path":
            return path_graph(self.n)
        if self.kind == "ring":
            return ring_graph(self.n)
        if self.kind == "complete":
            return complete_graph(self.n)
        if self.kind == "bridged_triangles":
            return bridged_triangles()
        if self.kind == "edges":
            return Graph(self.n, [tuple(e) for e in self.edges])
        if rng is None:
            raise ValueError("random graph kinds need an rng")
        return erdos_renyi_connected(self.n, self.p, rng)


@dataclass
class AdamConfig:
    steps: int = field(default=500, metadata={"min": 0})
    lr: float = field(default=0.02, metadata={"gt": 0.0})
    beta1: float = field(default=0.9, metadata={"min": 0.0, "lt": 1.0})
    beta2: float = field(default=0.999, metadata={"min": 0.0, "lt": 1.0})
    eps: float = field(default=1e-8, metadata={"gt": 0.0})
    fd_eps: float = field(default=1e-4, metadata={"gt": 0.0})


@dataclass
class NelderMeadConfig:
    max_evals: int = field(default=300, metadata={"min": 1})
    tol: float = field(default=1e-6, metadata={"gt": 0.0})
    restarts: int = field(default=1, metadata={"min": 1})
    # absolute initial simplex offset; 0 means 10% of each coordinate
    initial_step: float = field(default=0.5, metadata={"min": 0.0})


@dataclass
class ExperimentResult:
    """Everything a run produces.

    ``metrics`` and ``details`` are JSON-ready; ``tables`` maps a CSV file
    name to ``(header, rows)``; ``artifacts`` holds in-memory objects only.
    """

    experiment: str
    metrics: dict[str, Any]
    details: dict[str, Any] = field(default_factory=dict)
    trace: Trace | None = None
    tables: dict[str, tuple[list[str], list[list]]] = field(default_factory=dict)
    artifacts: dict[str, Any] = field(default_factory=dict)


def jsonable(obj):
    """Convert numpy scalars/arrays and tuples into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj
