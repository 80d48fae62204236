"""Undirected simple graphs, random generation, and normalized operators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_CONNECTIVITY_ATTEMPTS = 1000


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with no self-loops.

    Edges are stored as a frozenset of unordered pairs (i, j) with i < j.
    The dense 0/1 adjacency matrix and neighbor lists are derived lazily
    and cached; the object is immutable after construction.
    """

    n: int
    edges: frozenset
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop ({i},{i}) not allowed")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i},{j}) out of range for n={self.n}")
            if i > j:
                raise ValueError(f"edge ({i},{j}) must be stored with i < j")

    @staticmethod
    def from_edges(n, edges):
        canon = frozenset((min(i, j), max(i, j)) for i, j in edges)
        return Graph(n, canon)

    @property
    def adjacency(self):
        if "A" not in self._cache:
            a = np.zeros((self.n, self.n))
            for i, j in self.edges:
                a[i, j] = a[j, i] = 1.0
            self._cache["A"] = a
        return self._cache["A"].copy()

    @property
    def neighbors(self):
        if "nbrs" not in self._cache:
            nbrs = [[] for _ in range(self.n)]
            for i, j in sorted(self.edges):
                nbrs[i].append(j)
                nbrs[j].append(i)
            self._cache["nbrs"] = [sorted(v) for v in nbrs]
        return self._cache["nbrs"]

    @property
    def degrees(self):
        return np.array([len(v) for v in self.neighbors], dtype=float)


def is_connected(g: Graph) -> bool:
    """BFS from node 0; true iff every node is reached."""
    seen = [False] * g.n
    seen[0] = True
    queue = [0]
    nbrs = g.neighbors
    while queue:
        u = queue.pop()
        for v in nbrs[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return all(seen)


def generate_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """Sample a connected G(n, p) graph by rejection.

    Each of the n(n-1)/2 candidate edges is drawn i.i.d. with probability p,
    scanning pairs in (i, j), i < j order; draws come from numpy's PCG64
    stream so regression values are stable. Disconnected samples are
    rejected and regenerated with fresh draws.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must be in (0, 1]")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_CONNECTIVITY_ATTEMPTS):
        edges = set()
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    edges.add((i, j))
        g = Graph(n, frozenset(edges))
        if is_connected(g):
            return g
    raise RuntimeError(
        f"connectivity unreachable: no connected G({n}, {p}) sample in "
        f"{MAX_CONNECTIVITY_ATTEMPTS} attempts"
    )


def _degree_checked(g: Graph):
    d = g.degrees
    if np.any(d < 1):
        bad = int(np.argmin(d))
        raise ValueError(f"isolated node {bad}: degree-zero nodes are not supported")
    return d


def normalized_adjacency(g: Graph) -> np.ndarray:
    """D^{-1/2} A D^{-1/2}; requires every degree >= 1."""
    d = _degree_checked(g)
    inv_sqrt = 1.0 / np.sqrt(d)
    return g.adjacency * np.outer(inv_sqrt, inv_sqrt)


def laplacian(g: Graph) -> np.ndarray:
    """Symmetric normalized Laplacian I - D^{-1/2} A D^{-1/2}."""
    return np.eye(g.n) - normalized_adjacency(g)


def save_edge_list(g: Graph, path) -> None:
    """Write the graph as 'n' on the first line, then one 'i j' per edge."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{g.n}\n")
        for i, j in sorted(g.edges):
            fh.write(f"{i} {j}\n")


def load_edge_list(path) -> Graph:
    """Inverse of save_edge_list; raises on malformed lines with the line number."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file, expected node count on line 1")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"{path}:1: expected node count, got {lines[0]!r}") from None
    edges = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        try:
            i, j = (int(x) for x in parts)
        except ValueError:
            raise ValueError(
                f"{path}:{lineno}: expected two integers, got {line!r}"
            ) from None
        edges.add((min(i, j), max(i, j)))
    return Graph(n, frozenset(edges))
