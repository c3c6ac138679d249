"""Finite undirected graphs with an exact hop-count metric.

Everything downstream (horoballs, Cayley balls, convexity scans) sits on top
of this module.  Distances are exact nonnegative integers; there is no
floating point in the metric itself.  Unreachable pairs are reported with the
integer sentinel ``INF``, which is large enough that sums of two sentinels
never overflow an int64.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import InputError

# Sentinel for unreachable pairs.  Any real hop count is < 2**40 and the sum
# of two sentinels stays well inside int64.
INF: int = 2**40


def is_unreachable(d: int) -> bool:
    return d >= INF


class Graph:
    """Immutable undirected graph on dense vertex ids ``0..n-1``.

    No self-loops, no parallel edges.  Neighbor lists are sorted by vertex id,
    which fixes the traversal order of every deterministic algorithm built on
    top (geodesic enumeration, ball numbering, search witnesses).
    """

    __slots__ = ("_n", "_edges", "_indptr", "_indices", "labels", "metadata", "_csr")

    def __init__(
        self,
        num_vertices: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
        metadata: dict | None = None,
    ):
        if num_vertices < 0:
            raise InputError("num_vertices must be nonnegative")
        self._n = int(num_vertices)

        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise InputError("edges must be pairs of vertex ids")
        if e.size and (e.min() < 0 or e.max() >= self._n):
            raise InputError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise InputError("self-loops are not allowed")

        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        canon = np.stack([lo, hi], axis=1)
        if canon.shape[0]:
            canon = np.unique(canon, axis=0)
        self._edges = canon.astype(np.int32)
        self._edges.setflags(write=False)

        # CSR over the symmetrized edge set; rows sorted ascending.
        both = np.concatenate([self._edges, self._edges[:, ::-1]], axis=0)
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        counts = np.bincount(both[:, 0], minlength=self._n)
        self._indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self._indices = both[:, 1].astype(np.int32)
        self._indptr.setflags(write=False)
        self._indices.setflags(write=False)

        if labels is not None:
            labels = list(labels)
            if len(labels) != self._n:
                raise InputError("labels length must equal vertex count")
        self.labels = labels
        self.metadata = dict(metadata) if metadata else {}
        self._csr = None

    # -- basic queries -------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return self._n

    def __len__(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return int(self._edges.shape[0])

    @property
    def edges(self) -> np.ndarray:
        """Canonical edge list, shape (E, 2), each row (u, v) with u < v."""
        return self._edges

    def neighbors(self, v: int) -> np.ndarray:
        if not 0 <= v < self._n:
            raise InputError(f"unknown vertex id {v}")
        return self._indices[self._indptr[v] : self._indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self._indptr[v + 1] - self._indptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < len(row) and row[i] == v)

    def csr(self) -> csr_matrix:
        if self._csr is None:
            data = np.ones(len(self._indices), dtype=np.int8)
            self._csr = csr_matrix((data, self._indices, self._indptr), shape=(self._n, self._n))
        return self._csr

    def csr_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) of the sorted symmetric adjacency."""
        return self._indptr, self._indices

    def is_connected(self) -> bool:
        if self._n <= 1:
            return True
        return not np.any(bfs_distances(self, 0) >= INF)

    def __repr__(self) -> str:
        return f"Graph(|V|={self._n}, |E|={self.num_edges})"


@dataclass(frozen=True)
class Path:
    """A walk given by its vertex sequence; length is the edge count."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        if not self.vertices:
            raise InputError("a path needs at least one vertex")

    @classmethod
    def in_graph(cls, g: Graph, vertices: Sequence[int]) -> "Path":
        """Validate consecutive adjacency against ``g`` and build the path."""
        vs = tuple(int(v) for v in vertices)
        for v in vs:
            if not 0 <= v < g.num_vertices:
                raise InputError(f"unknown vertex id {v}")
        for a, b in zip(vs, vs[1:]):
            if not g.has_edge(a, b):
                raise InputError(f"vertices {a} and {b} are not adjacent")
        return cls(vs)

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Exact hop distances from ``source``; unreachable entries are ``INF``.

    Pure-Python reference implementation.  ``DistanceOracle`` produces the
    same rows through scipy and is cross-checked against this one in tests.
    """
    if not 0 <= source < g.num_vertices:
        raise InputError(f"unknown vertex id {source}")
    dist = np.full(g.num_vertices, INF, dtype=np.int64)
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u]
        for v in g.neighbors(u):
            if dist[v] >= INF:
                dist[v] = du + 1
                q.append(int(v))
    return dist


class DistanceOracle:
    """Per-source cached BFS rows.

    Single rows and batches are computed with scipy's C-level traversal and
    converted back to exact integers, so large carriers stay tractable while
    the metric remains exact.
    """

    def __init__(self, g: Graph):
        self.graph = g
        self._rows: dict[int, np.ndarray] = {}

    def row(self, source: int) -> np.ndarray:
        if not 0 <= source < self.graph.num_vertices:
            raise InputError(f"unknown vertex id {source}")
        cached = self._rows.get(source)
        if cached is None:
            cached = self._compute([source])[0]
            self._rows[source] = cached
        return cached

    def rows(self, sources: Sequence[int]) -> np.ndarray:
        missing = [s for s in sources if s not in self._rows]
        if missing:
            for s, r in zip(missing, self._compute(missing)):
                self._rows[s] = r
        return np.stack([self._rows[s] for s in sources])

    def distance(self, u: int, v: int) -> int:
        return int(self.row(u)[v])

    def matrix(self) -> np.ndarray:
        return self.rows(range(self.graph.num_vertices))

    def distance_to_set(self, sources: Sequence[int]) -> np.ndarray:
        """Row of distances to the nearest vertex of ``sources``."""
        if not len(sources):
            raise InputError("source set must be nonempty")
        d = dijkstra(self.graph.csr(), unweighted=True, indices=list(sources), min_only=True)
        return _to_int_row(d)

    def _compute(self, sources: list[int]) -> np.ndarray:
        if self.graph.num_vertices == 1:
            return np.zeros((len(sources), 1), dtype=np.int64)
        d = dijkstra(self.graph.csr(), unweighted=True, indices=sources)
        d = np.atleast_2d(d)
        return _to_int_row(d)


def _to_int_row(d: np.ndarray) -> np.ndarray:
    out = np.where(np.isinf(d), float(INF), d)
    return out.astype(np.int64)


def rips_graph(g: Graph, t: int) -> Graph:
    """Thicken ``g``: same vertices, edge (u, v) iff 0 < d_g(u, v) <= t."""
    if t < 1:
        raise InputError("rips scale t must be >= 1")
    if not g.is_connected():
        raise InputError("rips graph of a disconnected graph is undefined")
    if t == 1:
        return Graph(g.num_vertices, g.edges, labels=g.labels, metadata=g.metadata)
    d = DistanceOracle(g).matrix()
    iu, iv = np.nonzero(np.triu((d > 0) & (d <= t), k=1))
    return Graph(g.num_vertices, np.stack([iu, iv], axis=1), labels=g.labels, metadata=g.metadata)


def enumerate_geodesics(
    g: Graph, u: int, v: int, cap: int, dist_to_target: np.ndarray | None = None
) -> tuple[list[Path], bool]:
    """All geodesics from u to v in DFS order over id-sorted neighbor lists.

    Returns (paths, truncated).  ``truncated`` is set when ``cap`` stopped the
    enumeration early, in which case the list holds exactly ``cap`` paths.
    ``dist_to_target`` may carry a precomputed distance row of ``v``.
    """
    if cap < 1:
        raise InputError("cap must be >= 1")
    dist_to_v = bfs_distances(g, v) if dist_to_target is None else dist_to_target
    if is_unreachable(int(dist_to_v[u])):
        raise InputError("u and v are in different components")
    if u == v:
        return [Path((u,))], False

    out: list[Path] = []
    truncated = False
    stack: list[int] = [u]

    def dfs(x: int) -> bool:
        nonlocal truncated
        if x == v:
            out.append(Path(tuple(stack)))
            if len(out) >= cap:
                truncated = True
                return False
            return True
        dx = dist_to_v[x]
        for w in g.neighbors(x):
            if dist_to_v[w] == dx - 1:
                stack.append(int(w))
                keep_going = dfs(int(w))
                stack.pop()
                if not keep_going:
                    return False
        return True

    dfs(u)
    return out, truncated


def hausdorff_distance(g: Graph, a: Sequence[int], b: Sequence[int]) -> int:
    """max(sup_{x in A} d(x, B), sup_{y in B} d(y, A)) over one component."""
    a = list(dict.fromkeys(int(x) for x in a))
    b = list(dict.fromkeys(int(x) for x in b))
    if not a or not b:
        raise InputError("hausdorff distance needs two nonempty vertex sets")
    oracle = DistanceOracle(g)
    to_a = oracle.distance_to_set(a)
    to_b = oracle.distance_to_set(b)
    d_ab = int(max(to_b[x] for x in a))
    d_ba = int(max(to_a[y] for y in b))
    if is_unreachable(d_ab) or is_unreachable(d_ba):
        raise InputError("vertex sets do not lie in one component")
    return max(d_ab, d_ba)


def is_interior_pair(d_o_u: int, d_o_v: int, d_uv: int, radius: int) -> bool:
    """Ball-interior test for a pair inside a radius-``radius`` ball around o.

    If min(d(o,u), d(o,v)) + d(u,v) <= radius then every geodesic between u
    and v stays inside the ball, so ball-restricted distances are exact for
    the pair.  Applied with either endpoint as anchor; the min makes the
    predicate symmetric.
    """
    return min(d_o_u, d_o_v) + d_uv <= radius


# -- small builders used throughout tests and experiments ----------------


def path_graph(length: int, labels: bool = False) -> Graph:
    """Path with vertices 0..length (length + 1 vertices, length edges)."""
    if length < 0:
        raise InputError("path length must be >= 0")
    edges = [(i, i + 1) for i in range(length)]
    lab = [str(i) for i in range(length + 1)] if labels else None
    return Graph(length + 1, edges, labels=lab)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError("cycle needs >= 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def grid_graph(rows: int, cols: int) -> Graph:
    if rows < 1 or cols < 1:
        raise InputError("grid needs positive dimensions")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def binary_tree(depth: int) -> Graph:
    n = 2 ** (depth + 1) - 1
    return Graph(n, [(i, 2 * i + 1) for i in range((n - 1) // 2)] + [(i, 2 * i + 2) for i in range((n - 1) // 2)])


def random_connected_graph(n: int, extra_edges: int, rng) -> Graph:
    """Random spanning tree plus ``extra_edges`` uniform extra edges."""
    if n < 1:
        raise InputError("need at least one vertex")
    perm = list(range(n))
    rng.shuffle(perm)
    edges = set()
    for i in range(1, n):
        j = rng.randrange(i)
        edges.add((min(perm[i], perm[j]), max(perm[i], perm[j])))
    attempts = 0
    while len(edges) < n - 1 + extra_edges and attempts < 50 * (extra_edges + 1):
        u, v = rng.randrange(n), rng.randrange(n)
        attempts += 1
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return Graph(n, sorted(edges))
