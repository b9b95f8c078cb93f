"""Undirected networks, their matrices, and monitor feasibility tests.

Vertices are numbered ``1..n`` everywhere in the public API.  Matrices are
indexed from zero, so vertex ``v`` lives at row ``v - 1``.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

WEIGHT_TOL = 1e-9


class GraphError(ValueError):
    """Invalid network description."""


class GraphFormatError(GraphError):
    """Malformed graph file; the message names the offending field."""


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] | None = None
    _adj: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not isinstance(self.n_vertices, int) or self.n_vertices < 1:
            raise GraphError(f"n_vertices must be a positive integer, got {self.n_vertices!r}")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for k, (i, j) in enumerate(edges):
            for v in (i, j):
                if not 1 <= v <= self.n_vertices:
                    raise GraphError(f"edge {k}: vertex {v} outside 1..{self.n_vertices}")
            if i == j:
                raise GraphError(f"edge {k}: self-loop at vertex {i}")
            key = frozenset((i, j))
            if key in seen:
                raise GraphError(f"edge {k}: duplicate edge ({i}, {j})")
            seen.add(key)
        if self.weights is not None:
            w = tuple(self.weights)
            if len(w) != len(edges):
                raise GraphError(f"{len(w)} weights given for {len(edges)} edges")
            for k, x in enumerate(w):
                if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0):
                    raise GraphError(f"weight {k} must be a positive finite number, got {x!r}")
            # all-ones weights collapse to the exact unit-weight case
            object.__setattr__(self, "weights", None if all(x == 1 for x in w) else w)
        adj = {v: [] for v in range(1, self.n_vertices + 1)}
        for i, j in edges:
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "_adj", {v: tuple(sorted(ns)) for v, ns in adj.items()})
        if not self.is_connected():
            comps = self.components()
            raise GraphError(
                f"graph is disconnected ({len(comps)} components, e.g. {sorted(comps[1])})"
            )

    @property
    def n(self) -> int:
        return self.n_vertices

    @property
    def unit_weight(self) -> bool:
        return self.weights is None

    @property
    def vertices(self) -> range:
        return range(1, self.n_vertices + 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check(v)
        return self._adj[v]

    def _check(self, v: int):
        if not (isinstance(v, (int, np.integer)) and 1 <= v <= self.n_vertices):
            raise GraphError(f"vertex {v!r} outside 1..{self.n_vertices}")

    def components(self) -> list[set[int]]:
        left = set(self.vertices)
        comps = []
        while left:
            start = min(left)
            comp = set(_bfs(self._adj, start))
            comps.append(comp)
            left -= comp
        return comps

    def is_connected(self) -> bool:
        return len(_bfs(self._adj, 1)) == self.n_vertices

    # -- matrices ---------------------------------------------------------
    @cached_property
    def adjacency(self) -> np.ndarray:
        """Symmetric adjacency; Python-int object array for unit weights."""
        n = self.n_vertices
        if self.unit_weight:
            a = np.zeros((n, n), dtype=object)
            a[:] = 0
            for i, j in self.edges:
                a[i - 1, j - 1] = a[j - 1, i - 1] = 1
            return a
        a = np.zeros((n, n))
        for (i, j), w in zip(self.edges, self.weights):
            a[i - 1, j - 1] = a[j - 1, i - 1] = w
        return a

    @cached_property
    def degree(self) -> np.ndarray:
        a = self.adjacency
        d = np.zeros_like(a)
        for i in range(self.n_vertices):
            d[i, i] = sum(a[i])
        return d

    @cached_property
    def laplacian(self) -> np.ndarray:
        return self.degree - self.adjacency

    def laplacian_float(self) -> np.ndarray:
        return np.asarray(self.laplacian, dtype=float)

    @cached_property
    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.laplacian_float())

    @property
    def algebraic_connectivity(self) -> float:
        return float(self.spectrum[1]) if self.n_vertices > 1 else 0.0

    @property
    def lambda_max(self) -> float:
        return float(self.spectrum[-1])

    # -- I/O ----------------------------------------------------------------
    def to_dict(self) -> dict:
        d = {"n": self.n_vertices, "edges": [list(e) for e in self.edges]}
        if self.weights is not None:
            d["weights"] = list(self.weights)
        return d

    @classmethod
    def from_dict(cls, data) -> Graph:
        if not isinstance(data, dict):
            raise GraphFormatError("top level: expected a JSON object")
        unknown = set(data) - {"n", "edges", "weights"}
        if unknown:
            raise GraphFormatError(f"unknown field(s): {', '.join(sorted(unknown))}")
        if "n" not in data:
            raise GraphFormatError("field 'n': missing")
        n = data["n"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise GraphFormatError(f"field 'n': expected positive integer, got {n!r}")
        edges = data.get("edges")
        if not isinstance(edges, list):
            raise GraphFormatError("field 'edges': expected a list of [i, j] pairs")
        for k, e in enumerate(edges):
            if not (isinstance(e, list) and len(e) == 2):
                raise GraphFormatError(f"field 'edges[{k}]': expected [i, j], got {e!r}")
            for side, v in enumerate(e):
                if isinstance(v, bool) or not isinstance(v, int):
                    raise GraphFormatError(f"field 'edges[{k}][{side}]': expected integer, got {v!r}")
                if not 1 <= v <= n:
                    raise GraphFormatError(f"field 'edges[{k}][{side}]': vertex {v} outside 1..{n}")
        weights = data.get("weights")
        if weights is not None:
            if not isinstance(weights, list) or len(weights) != len(edges):
                raise GraphFormatError("field 'weights': expected one number per edge")
            for k, w in enumerate(weights):
                if isinstance(w, bool) or not isinstance(w, (int, float)) or not w > 0:
                    raise GraphFormatError(f"field 'weights[{k}]': expected positive number, got {w!r}")
        try:
            return cls(n, tuple(tuple(e) for e in edges), tuple(weights) if weights else None)
        except GraphFormatError:
            raise
        except GraphError as exc:
            raise GraphFormatError(str(exc)) from None


def load_graph(path) -> Graph:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return Graph.from_dict(data)
    except GraphFormatError as exc:
        raise GraphFormatError(f"{path}: {exc}") from None


def save_graph(g: Graph, path) -> None:
    Path(path).write_text(json.dumps(g.to_dict()) + "\n")


# -- standard families ------------------------------------------------------
def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(1, n)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i % n + 1) for i in range(1, n + 1)))


def star_graph(n: int) -> Graph:
    """Center is vertex 1, leaves are 2..n."""
    return Graph(n, tuple((1, j) for j in range(2, n + 1)))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)))


def random_connected_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Random spanning tree plus independent extra edges with probability ``p``."""
    order = rng.permutation(n) + 1
    edges = set()
    for k in range(1, n):
        parent = order[rng.integers(0, k)]
        edges.add(frozenset((int(order[k]), int(parent))))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if rng.random() < p:
                edges.add(frozenset((i, j)))
    return Graph(n, tuple(sorted(tuple(sorted(e)) for e in edges)))


# -- distances and feasibility ------------------------------------------------
def _bfs(adj, start) -> dict[int, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def distances_from(g: Graph, u: int) -> dict[int, int]:
    g._check(u)
    return _bfs(g._adj, u)


def distance(g: Graph, u: int, v: int) -> int:
    """Hop count of a shortest path."""
    g._check(v)
    return distances_from(g, u)[v]


def distance_matrix(g: Graph) -> np.ndarray:
    """``D[u-1, v-1]`` is the hop distance between u and v."""
    n = g.n_vertices
    d = np.zeros((n, n), dtype=int)
    for u in g.vertices:
        for v, k in _bfs(g._adj, u).items():
            d[u - 1, v - 1] = k
    return d


def feasible_monitor_set(g: Graph, target: int) -> list[int]:
    """Monitors that are at least as close as the target to every attack vertex."""
    g._check(target)
    d = distance_matrix(g)
    t = target - 1
    attacks = [a for a in range(g.n) if a != t]
    return [
        m + 1
        for m in range(g.n)
        if m != t and all(d[a, m] <= d[a, t] for a in attacks)
    ]


def algebraic_monitor_condition(g: Graph, target: int, monitor: int) -> bool:
    """``e_t' A (I + A) e_m == e_t' A^2 e_t``.

    Integer arithmetic for unit weights; weighted graphs compare at
    ``WEIGHT_TOL`` relative to the right-hand side.
    """
    g._check(target)
    g._check(monitor)
    if monitor == target:
        raise GraphError("monitor must differ from the target")
    a = g.adjacency
    t, m = target - 1, monitor - 1
    row = a[t]
    a2_row = row.dot(a)
    lhs = row[m] + a2_row[m]
    rhs = a2_row[t]
    if g.unit_weight:
        return int(lhs) == int(rhs)
    return abs(float(lhs) - float(rhs)) <= WEIGHT_TOL * max(1.0, abs(float(rhs)))


def algebraic_monitor_set(g: Graph, target: int) -> list[int]:
    return [m for m in g.vertices if m != target and algebraic_monitor_condition(g, target, m)]
