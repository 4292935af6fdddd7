"""Metric probes on instantiated maps: balls, geodesics, interface
crossings, and time-away fractions.

All computations are exact on the given instance; randomness only enters
through instance sampling.  Instances are plain edge-list graphs (from
`gluedpeel.instantiate`, from finite glued maps, or from any PlanarMap);
BFS runs on a CSR adjacency built once per instance.
"""

from dataclasses import dataclass

import numpy as np

from peelkit import _kernels as K
from peelkit.boltzmann import CapacityError
from peelkit.mapcore import PlanarMap


@dataclass
class Graph:
    """CSR adjacency with optional vertex labels."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, n: int, u: np.ndarray, v: np.ndarray) -> "Graph":
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        deg = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        order = np.argsort(src, kind="stable")
        return cls(n, indptr, dst[order])

    @classmethod
    def from_map(cls, m: PlanarMap) -> "Graph":
        h = np.arange(m.n_half_edges)
        lower = h < m.twin
        return cls.from_map_edges(m, lower)

    @classmethod
    def from_map_edges(cls, m: PlanarMap, mask: np.ndarray) -> "Graph":
        u = m.origin[mask]
        v = m.origin[m.twin[np.nonzero(mask)[0]]]
        return cls.from_edges(m.n_vertices, u, v)

    def bfs(self, sources) -> np.ndarray:
        src = np.asarray(sources, dtype=np.int64)
        if len(src) == 0:
            raise ValueError("empty source set")
        return K.bfs_csr(self.indptr, self.indices, src, self.n)

    def bfs_parents(self, sources) -> tuple[np.ndarray, np.ndarray]:
        dist = self.bfs(sources)
        parent = K.min_parents(self.indptr, self.indices, dist)
        return dist, parent


@dataclass
class GeodesicRecord:
    path: list                   # vertex ids
    length: int
    crossing_times: list         # indices where the path changes side
    time_away: int = 0

    def __post_init__(self):
        assert self.length == len(self.path) - 1


def geodesic(graph: Graph, x: int, y: int) -> GeodesicRecord:
    """A shortest path with deterministic lowest-parent tie-breaking."""
    dist, parent = graph.bfs_parents([x])
    if dist[y] < 0:
        raise ValueError(f"vertices {x} and {y} are disconnected")
    path = [int(y)]
    v = int(y)
    while v != x:
        v = int(parent[v])
        path.append(v)
    path.reverse()
    return GeodesicRecord(path, int(dist[y]), [])


def side_labels(path: list, vertex_side: np.ndarray) -> np.ndarray:
    """Per-vertex labels along a path: -1 / +1 strictly one side, 0 on the
    interface."""
    return np.array([vertex_side[v] for v in path])


def crossing_count(record: GeodesicRecord, vertex_side: np.ndarray) -> int:
    """Side changes of the path: maximal strictly-one-side segments minus
    one, with interface vertices neutral."""
    labs = [int(vertex_side[v]) for v in record.path]
    strict = [s for s in labs if s != 0]
    if not strict:
        return 0
    changes = sum(1 for a, b in zip(strict, strict[1:]) if a != b)
    return changes


def time_away_fraction(record: GeodesicRecord, dist_to_interface: np.ndarray,
                       threshold: float) -> float:
    """Fraction of path vertices at distance >= threshold from the
    interface."""
    if threshold <= 0:
        return 1.0
    far = sum(1 for v in record.path if dist_to_interface[v] >= threshold)
    return far / len(record.path)


def certified_radius(graph: Graph, sources, unsafe) -> int:
    """Largest D such that BFS distances < D from `sources` are exact in
    the ambient map: the first distance at which an unsafe vertex (on the
    window frontier) is reached."""
    dist = graph.bfs(sources)
    u = [int(x) for x in unsafe if dist[int(x)] >= 0]
    if not u:
        return int(dist.max()) + 1
    return int(min(dist[v] for v in u))


def boundary_distance_profile(graph: Graph, lam: dict, xs: list, ys: list,
                              unsafe) -> list:
    """Exact distances d(lambda(x), lambda(y)) on a filled window.

    Raises CapacityError when the window is too shallow to certify a
    requested distance.
    """
    out = []
    for x in xs:
        dist = graph.bfs([lam[x]])
        ucap = min((int(dist[int(v)]) for v in unsafe if dist[int(v)] >= 0),
                   default=int(dist.max()) + 1)
        for y in ys:
            if y == x:
                out.append((0, 0))
                continue
            d = int(dist[lam[y]])
            if d < 0 or d >= ucap:
                raise CapacityError(
                    f"window too shallow: d(lambda({x}),lambda({y})) "
                    f">= certified radius {ucap}")
            out.append((abs(y - x), d))
    return out


def ball_containment_probe(graph: Graph, side_minus: Graph, side_plus: Graph,
                           e_verts: tuple, r: int, unsafe,
                           vertex_side: np.ndarray) -> int:
    """Smallest R with B_r(e; glued) inside the union of one-sided balls
    B_R(e; side graphs); exact, or CapacityError if uncertified."""
    dz = graph.bfs(list(e_verts))
    ucap = min((int(dz[int(v)]) for v in unsafe if dz[int(v)] >= 0),
               default=int(dz.max()) + 1)
    if r >= ucap:
        raise CapacityError(f"radius {r} not certified (cap {ucap})")
    dm = side_minus.bfs(list(e_verts))
    dp = side_plus.bfs(list(e_verts))
    big = 1 << 60
    need = 0
    for v in np.nonzero((dz >= 0) & (dz <= r))[0]:
        s = vertex_side[v]
        if s == 0:
            one = min(dm[v] if dm[v] >= 0 else big, dp[v] if dp[v] >= 0 else big)
        elif s < 0:
            one = dm[v] if dm[v] >= 0 else big
        else:
            one = dp[v] if dp[v] >= 0 else big
        if one >= big:
            raise CapacityError("one-sided window too shallow for the probe")
        need = max(need, int(one))
    return need
