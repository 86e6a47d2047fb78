"""Weighted undirected graphs, Laplacians, random generation and isomorphism."""
from __future__ import annotations

import json
from collections import Counter
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    pass


class ConnectivityError(RuntimeError):
    """Raised when rejection sampling cannot produce a connected graph."""


class Graph:
    """Immutable weighted undirected graph on nodes ``0..n-1``.

    ``edges`` accepts pairs ``(j, k)`` (weight 1.0) or triples ``(j, k, w)``.
    Edges are stored canonically with ``j < k``.
    """

    __slots__ = ("_n", "_weights")

    def __init__(self, n: int, edges: Iterable[Sequence] = ()):
        if int(n) != n or n < 1:
            raise GraphError(f"node count must be a positive integer, got {n!r}")
        n = int(n)
        weights: dict[tuple[int, int], float] = {}
        for e in edges:
            if len(e) == 2:
                j, k, w = e[0], e[1], 1.0
            elif len(e) == 3:
                j, k, w = e
            else:
                raise GraphError(f"edge must be (j, k) or (j, k, w), got {e!r}")
            j, k, w = int(j), int(k), float(w)
            if j == k:
                raise GraphError(f"self-loop on node {j}")
            if not (0 <= j < n and 0 <= k < n):
                raise GraphError(f"edge ({j}, {k}) out of range for n={n}")
            if not np.isfinite(w) or w <= 0:
                raise GraphError(f"edge ({j}, {k}) weight must be positive, got {w}")
            key = (min(j, k), max(j, k))
            if key in weights:
                raise GraphError(f"duplicate edge {key}")
            weights[key] = w
        self._n = n
        self._weights = dict(sorted(weights.items()))

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(self._weights)

    @property
    def weights(self) -> dict[tuple[int, int], float]:
        return dict(self._weights)

    def weight(self, j: int, k: int) -> float:
        return self._weights.get((min(j, k), max(j, k)), 0.0)

    def has_edge(self, j: int, k: int) -> bool:
        return (min(j, k), max(j, k)) in self._weights

    @property
    def num_edges(self) -> int:
        return len(self._weights)

    def neighbors(self, v: int) -> list[int]:
        return [k if j == v else j for (j, k) in self._weights if v in (j, k)]

    def degrees(self) -> list[int]:
        deg = [0] * self._n
        for j, k in self._weights:
            deg[j] += 1
            deg[k] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self._n, self._n))
        for (j, k), w in self._weights.items():
            a[j, k] = a[k, j] = w
        return a

    def is_connected(self) -> bool:
        return len(connected_components(self)) == 1

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_dict(self) -> dict:
        return {"n": self._n, "edges": [[j, k, w] for (j, k), w in self._weights.items()]}

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        return cls(data["n"], [tuple(e) for e in data["edges"]])

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._weights == other._weights

    def __hash__(self):
        return hash((self._n, tuple(self._weights.items())))

    def __repr__(self):
        return f"Graph(n={self._n}, edges={[(j, k, w) for (j, k), w in self._weights.items()]})"


# -- constructors ---------------------------------------------------------

def path_graph(n: int) -> Graph:
    return Graph(n, [(j, j + 1) for j in range(n - 1)])


def ring_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a ring needs at least 3 nodes")
    return Graph(n, [(j, (j + 1) % n) for j in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, combinations(range(n), 2))


def bridged_triangles() -> Graph:
    """Two triangles {0,1,2} and {3,4,5} joined by the bridge 2-3."""
    return Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


# -- algebra --------------------------------------------------------------

def laplacian(g: Graph) -> np.ndarray:
    """Weighted graph Laplacian ``L_jk = delta_jk sum_v w_jv - w_jk``."""
    a = g.adjacency()
    return np.diag(a.sum(axis=1)) - a


def connected_components(g: Graph) -> list[list[int]]:
    adj = [[] for _ in range(g.n)]
    for j, k in g.edges:
        adj[j].append(k)
        adj[k].append(j)
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def erdos_renyi_connected(n: int, p: float, rng: np.random.Generator,
                          max_attempts: int = 10_000) -> Graph:
    """Sample G(n, p) conditioned on connectivity by rejection."""
    if n < 2:
        raise GraphError("need n >= 2")
    if not 0 < p < 1:
        raise GraphError(f"edge probability must lie in (0, 1), got {p}")
    pairs = list(combinations(range(n), 2))
    for _ in range(max_attempts):
        keep = rng.random(len(pairs)) < p
        g = Graph(n, [e for e, on in zip(pairs, keep) if on])
        if g.is_connected():
            return g
    raise ConnectivityError(
        f"no connected G({n}, {p}) sample within {max_attempts} attempts; "
        "raise p or the attempt cap")


def permute(g: Graph, perm: Sequence[int]) -> Graph:
    """Relabel node ``v`` as ``perm[v]``."""
    perm = [int(v) for v in perm]
    if len(perm) != g.n or sorted(perm) != list(range(g.n)):
        raise GraphError(f"perm must be a permutation of range({g.n})")
    return Graph(g.n, [(perm[j], perm[k], w) for (j, k), w in g.weights.items()])


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """Matrix with ``P[perm[v], v] = 1`` so that ``L' = P L P^T``."""
    n = len(perm)
    m = np.zeros((n, n))
    m[list(perm), list(range(n))] = 1.0
    return m


# -- isomorphism ----------------------------------------------------------

def _signature(adj: list[set[int]]) -> list[tuple]:
    deg = [len(a) for a in adj]
    return [(deg[v], tuple(sorted(deg[u] for u in adj[v]))) for v in range(len(adj))]


def are_isomorphic(g1: Graph, g2: Graph) -> bool:
    """Exact unweighted isomorphism test by backtracking.

    Candidates are pruned by degree and by the multiset of neighbour degrees,
    and every partial map is checked for adjacency consistency.
    """
    if g1.n != g2.n or g1.num_edges != g2.num_edges:
        return False
    n = g1.n
    adj1 = [set() for _ in range(n)]
    adj2 = [set() for _ in range(n)]
    for j, k in g1.edges:
        adj1[j].add(k)
        adj1[k].add(j)
    for j, k in g2.edges:
        adj2[j].add(k)
        adj2[k].add(j)
    sig1, sig2 = _signature(adj1), _signature(adj2)
    if Counter(sig1) != Counter(sig2):
        return False

    # Visit g1 nodes so each one (after the first of a component) touches an
    # already-mapped node; rarer signatures first to cut branching early.
    freq = Counter(sig1)
    order: list[int] = []
    placed = [False] * n
    while len(order) < n:
        rest = [v for v in range(n) if not placed[v]]
        root = min(rest, key=lambda v: (freq[sig1[v]], -len(adj1[v]), v))
        placed[root] = True
        order.append(root)
        frontier = [root]
        while frontier:
            nxt = []
            cand = sorted({u for v in frontier for u in adj1[v] if not placed[u]},
                          key=lambda u: (freq[sig1[u]], -len(adj1[u]), u))
            for u in cand:
                placed[u] = True
                order.append(u)
                nxt.append(u)
            frontier = nxt

    mapping = [-1] * n
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        v = order[i]
        mapped_nbrs = [mapping[u] for u in adj1[v] if mapping[u] >= 0]
        for w in range(n):
            if used[w] or sig2[w] != sig1[v]:
                continue
            if any(x not in adj2[w] for x in mapped_nbrs):
                continue
            # non-neighbours of v must map to non-neighbours of w
            n_mapped_adj = sum(1 for x in adj2[w] if used[x])
            if n_mapped_adj != len(mapped_nbrs):
                continue
            mapping[v] = w
            used[w] = True
            if extend(i + 1):
                return True
            mapping[v] = -1
            used[w] = False
        return False

    return extend(0)
