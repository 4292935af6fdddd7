"""Half-edge combinatorial maps for quadrangulations with simple boundary.

A map is stored as three parallel arrays over half-edges: `twin` (a
fixed-point-free involution), `nxt` (the next half-edge around the face on
the left), and `origin` (the source vertex).  Faces are the orbits of
`nxt`; one face may be distinguished as the exterior.  Maps are immutable
once constructed; `MapBuilder` provides the mutable surgery used by the
samplers, the enumerator, and the gluing operations.

Conventions
-----------
* head(h) = origin(twin(h)).
* A rooted map carries a root half-edge lying on the exterior face, so
  the root's orientation is aligned with the boundary traversal.  Rooted
  maps are compared through the canonical order: a BFS over half-edges
  from the root, exploring next-around-face then twin.
* In the canonical numbering the exterior face is face 0 (it contains the
  root half-edge, which is canonical half-edge 0).
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np


class MapError(ValueError):
    pass


@dataclass(frozen=True)
class PlanarMap:
    twin: np.ndarray
    nxt: np.ndarray
    origin: np.ndarray
    exterior_face: int | None
    face: np.ndarray = field(default=None)
    nf: int = field(default=0)

    def __post_init__(self):
        if self.face is None:
            face, nf = _face_orbits(self.nxt)
            object.__setattr__(self, "face", face)
            object.__setattr__(self, "nf", nf)

    @property
    def n_half_edges(self) -> int:
        return len(self.twin)

    @property
    def n_edges(self) -> int:
        return len(self.twin) // 2

    @property
    def n_vertices(self) -> int:
        return int(self.origin.max()) + 1 if len(self.origin) else 0

    def head(self, h: int) -> int:
        return int(self.origin[self.twin[h]])

    def face_cycle(self, f: int) -> list:
        (idx,) = np.nonzero(self.face == f)
        if len(idx) == 0:
            return []
        h0 = int(idx[0])
        out = [h0]
        h = int(self.nxt[h0])
        while h != h0:
            out.append(h)
            h = int(self.nxt[h])
        return out

    def face_degrees(self) -> np.ndarray:
        return np.bincount(self.face, minlength=self.nf)

    def adjacency(self):
        """CSR adjacency (indptr, indices) over vertices."""
        u = self.origin
        v = self.origin[self.twin]
        nv = self.n_vertices
        deg = np.bincount(u, minlength=nv)
        indptr = np.zeros(nv + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        order = np.argsort(u, kind="stable")
        return indptr, v[order].astype(np.int64)


def _face_orbits(nxt: np.ndarray) -> tuple[np.ndarray, int]:
    n = len(nxt)
    face = np.full(n, -1, dtype=np.int64)
    nf = 0
    for h0 in range(n):
        if face[h0] >= 0:
            continue
        h = h0
        while face[h] < 0:
            face[h] = nf
            h = int(nxt[h])
        nf += 1
    return face, nf


def validate(m: PlanarMap, require_simple_boundary: bool = True) -> list[str]:
    """All violated invariants, empty when the map is a valid
    quadrangulation with boundary.

    Multi-edges and low-degree vertices are always allowed; exterior-face
    simplicity is enforced only under the simple-boundary flag.
    """
    issues = []
    n = m.n_half_edges
    if n % 2:
        return [f"odd number of half-edges ({n})"]
    for name, arr in (("twin", m.twin), ("next", m.nxt)):
        bad = np.nonzero((arr < 0) | (arr >= n))[0]
        if len(bad):
            return [f"{name} out of range at half-edge {int(bad[0])}"]
    if np.any(m.twin[m.twin] != np.arange(n)):
        h = int(np.nonzero(m.twin[m.twin] != np.arange(n))[0][0])
        issues.append(f"twin not involutive at half-edge {h}")
    if np.any(m.twin == np.arange(n)):
        h = int(np.nonzero(m.twin == np.arange(n))[0][0])
        issues.append(f"twin has fixed point at half-edge {h}")
    if len(np.unique(m.nxt)) != n:
        issues.append("next is not a permutation")
    if issues:
        return issues
    # connectivity under <next, twin>
    if n:
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            h = stack.pop()
            for g in (int(m.nxt[h]), int(m.twin[h])):
                if not seen[g]:
                    seen[g] = True
                    stack.append(g)
        if not seen.all():
            issues.append("map is not connected")
            return issues
    nv = m.n_vertices
    ne = m.n_edges
    nf = m.nf
    if nv - ne + nf != 2:
        issues.append(f"Euler relation fails: V-E+F = {nv - ne + nf}")
    degs = m.face_degrees()
    for f in range(nf):
        if m.exterior_face is not None and f == m.exterior_face:
            continue
        if degs[f] != 4:
            issues.append(f"inner face {f} has degree {int(degs[f])}, not 4")
    if require_simple_boundary and m.exterior_face is not None:
        cyc = m.face_cycle(m.exterior_face)
        verts = [int(m.origin[h]) for h in cyc]
        if len(set(verts)) != len(verts):
            issues.append("exterior face is not simple (revisits a vertex)")
    return issues


def bfs_distance(m: PlanarMap, sources) -> np.ndarray:
    """Graph distance per vertex from a set of vertices and/or edges.

    Edge sources follow the edge-to-set convention: both endpoints enter
    at distance 0.  `sources` holds vertex ids and/or ('edge', half_edge)
    tags.
    """
    src_vertices = set()
    for s in sources:
        if isinstance(s, tuple) and s[0] == "edge":
            h = s[1]
            src_vertices.add(int(m.origin[h]))
            src_vertices.add(m.head(h))
        else:
            src_vertices.add(int(s))
    if not src_vertices:
        raise ValueError("source set must be nonempty")
    nv = m.n_vertices
    for v in src_vertices:
        if not 0 <= v < nv:
            raise ValueError(f"source vertex {v} not in map")
    indptr, indices = m.adjacency()
    dist = np.full(nv, -1, dtype=np.int64)
    q = deque()
    for v in sorted(src_vertices):
        dist[v] = 0
        q.append(v)
    while q:
        v = q.popleft()
        for w in indices[indptr[v]:indptr[v + 1]]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                q.append(int(w))
    return dist


@dataclass(frozen=True)
class BallSubgraph:
    vertices: np.ndarray          # vertex ids with distance <= r
    edges: list                   # (u, v) pairs with both endpoints inside


def metric_ball(m: PlanarMap, sources, r: int) -> BallSubgraph:
    if r < 0:
        raise ValueError("radius must be nonnegative")
    dist = bfs_distance(m, sources)
    inside = (dist >= 0) & (dist <= r)
    verts = np.nonzero(inside)[0]
    edges = []
    for h in range(m.n_half_edges):
        if h < int(m.twin[h]):
            u, v = int(m.origin[h]), m.head(h)
            if inside[u] and inside[v]:
                edges.append((u, v))
    return BallSubgraph(verts, edges)


@dataclass(frozen=True)
class RootedQuad:
    map: PlanarMap
    root: int

    def __post_init__(self):
        if self.map.exterior_face is None:
            raise MapError("rooted quadrangulation needs an exterior face")
        if int(self.map.face[self.root]) != self.map.exterior_face:
            raise MapError("root half-edge must lie on the exterior face")

    @property
    def perimeter(self) -> int:
        return len(self.boundary_cycle())

    def boundary_cycle(self) -> list:
        out = [self.root]
        h = int(self.map.nxt[self.root])
        while h != self.root:
            out.append(h)
            h = int(self.map.nxt[h])
        return out


def canonical_order(m: PlanarMap, root: int) -> np.ndarray:
    """BFS order over half-edges from the root: next-around-face, then twin."""
    n = m.n_half_edges
    order = np.full(n, -1, dtype=np.int64)
    order[root] = 0
    cnt = 1
    q = deque([root])
    while q:
        h = q.popleft()
        for g in (int(m.nxt[h]), int(m.twin[h])):
            if order[g] < 0:
                order[g] = cnt
                cnt += 1
                q.append(g)
    if cnt != n:
        raise MapError("map is not connected; canonical order undefined")
    return order


def canonicalize(rq: RootedQuad) -> tuple:
    """Hashable canonical form of a rooted map (twin, next, origin classes)."""
    m, root = rq.map, rq.root
    order = canonical_order(m, root)
    inv = np.argsort(order)
    twin = order[m.twin[inv]]
    nxt = order[m.nxt[inv]]
    orig = m.origin[inv]
    # vertex classes by first appearance
    relab = {}
    out_orig = np.empty_like(orig)
    for i, v in enumerate(orig):
        out_orig[i] = relab.setdefault(int(v), len(relab))
    return tuple(twin.tolist()), tuple(nxt.tolist()), tuple(out_orig.tolist())


def serialize(rq: RootedQuad) -> str:
    """PLMAP v1 text; byte-deterministic via the canonical order."""
    m, root = rq.map, rq.root
    order = canonical_order(m, root)
    inv = np.argsort(order)
    twin = order[m.twin[inv]]
    nxt = order[m.nxt[inv]]
    orig = m.origin[inv]
    vrel: dict[int, int] = {}
    overts = [vrel.setdefault(int(v), len(vrel)) for v in orig]
    face_old = m.face[inv]
    frel: dict[int, int] = {}
    ofaces = [frel.setdefault(int(f), len(frel)) for f in face_old]
    if ofaces[0] != 0:
        raise MapError("canonical face numbering must put the exterior first")
    n = m.n_half_edges
    lines = [f"PLMAP v1 {len(vrel)} {n // 2} {len(frel)} 0"]
    for h in range(n):
        lines.append(f"{h} {int(twin[h])} {int(nxt[h])} {overts[h]} {ofaces[h]}")
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> RootedQuad:
    lines = text.splitlines()
    if not lines:
        raise MapError("line 1, col 1: empty PLMAP input")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "PLMAP" or head[1] != "v1":
        raise MapError("line 1, col 1: bad PLMAP header")
    try:
        nv, ne, nf, root = (int(x) for x in head[2:])
    except ValueError as e:
        raise MapError(f"line 1: bad header field ({e})") from None
    n = 2 * ne
    if len(lines) < 1 + n:
        raise MapError(f"line {len(lines) + 1}, col 1: expected {n} half-edge lines")
    twin = np.empty(n, dtype=np.int64)
    nxt = np.empty(n, dtype=np.int64)
    orig = np.empty(n, dtype=np.int64)
    face = np.empty(n, dtype=np.int64)
    for i in range(n):
        parts = lines[1 + i].split()
        if len(parts) != 5:
            raise MapError(f"line {i + 2}, col 1: expected 5 fields")
        vals = []
        for col, p in enumerate(parts):
            try:
                vals.append(int(p))
            except ValueError:
                raise MapError(f"line {i + 2}, col {col + 1}: not an integer") from None
        if vals[0] != i:
            raise MapError(f"line {i + 2}, col 1: half-edge ids must be sequential")
        twin[i], nxt[i], orig[i], face[i] = vals[1:]
    if np.any((twin < 0) | (twin >= n)) or np.any(twin[twin] != np.arange(n)):
        raise MapError("twin not involutive")
    m = PlanarMap(twin=twin, nxt=nxt, origin=orig, exterior_face=0)
    if m.nf != nf:
        raise MapError(f"face count mismatch: header {nf}, orbits {m.nf}")
    if np.any(m.face != face):
        raise MapError("face column inconsistent with next-orbits")
    if nv != m.n_vertices:
        raise MapError(f"vertex count mismatch: header {nv}, data {m.n_vertices}")
    return RootedQuad(map=m, root=root)


class MapBuilder:
    """Mutable half-edge surgery used by samplers, enumerator, and gluing.

    Half-edges come in twin pairs 2i, 2i+1.  Deleted half-edges (from
    2-gon collapses) are marked dead and compacted at finalize.
    """

    def __init__(self):
        self.twin: list[int] = []
        self.nxt: list[int] = []
        self.origin: list[int] = []
        self.alive: list[bool] = []
        self.nv = 0

    def new_vertex(self) -> int:
        self.nv += 1
        return self.nv - 1

    def new_edge(self, u: int, v: int) -> tuple[int, int]:
        h = len(self.twin)
        self.twin += [h + 1, h]
        self.nxt += [-1, -1]
        self.origin += [u, v]
        self.alive += [True, True]
        return h, h + 1

    def head(self, h: int) -> int:
        return self.origin[self.twin[h]]

    def cycle(self, hs: list):
        """Link nxt along the given half-edge sequence, closing the loop."""
        for a, b in zip(hs, hs[1:] + hs[:1]):
            self.nxt[a] = b

    def boundary_cycle(self, nverts: int) -> tuple[list, list]:
        """Fresh simple cycle; returns (outer half-edges cw, inner ccw).

        Outer side is the exterior face, inner side the initial hole; both
        are returned in their face cycle order, inner starting at the edge
        (v0, v1).
        """
        vs = [self.new_vertex() for _ in range(nverts)]
        inner, outer = [], []
        for i in range(nverts):
            h_in, h_out = self.new_edge(vs[i], vs[(i + 1) % nverts])
            inner.append(h_in)
            outer.append(h_out)
        self.cycle(inner)
        self.cycle(list(reversed(outer)))
        return outer, inner

    def collapse_2gon(self, h1: int, h2: int):
        """Edge-map fill of a 2-gon hole: identify its two edges.

        h1, h2 bound the hole (nxt(h1) = h2, nxt(h2) = h1); their outer
        twins become mutual twins and the pair (h1, h2) dies.
        """
        if self.nxt[h1] != h2 or self.nxt[h2] != h1:
            raise MapError("collapse_2gon needs a 2-cycle hole")
        o1, o2 = self.twin[h1], self.twin[h2]
        self.twin[o1] = o2
        self.twin[o2] = o1
        self.alive[h1] = self.alive[h2] = False

    def finalize(self, exterior_he: int | None) -> PlanarMap:
        alive_idx = [h for h, a in enumerate(self.alive) if a]
        relab = {h: i for i, h in enumerate(alive_idx)}
        n = len(alive_idx)
        twin = np.empty(n, dtype=np.int64)
        nxt = np.empty(n, dtype=np.int64)
        orig = np.empty(n, dtype=np.int64)
        for h, i in relab.items():
            twin[i] = relab[self.twin[h]]
            nxt[i] = relab[self.nxt[h]]
            orig[i] = self.origin[h]
        # drop unused vertex ids (collapses never orphan, but gluing can)
        used = np.unique(orig)
        vmap = np.full(self.nv if self.nv else 1, -1, dtype=np.int64)
        vmap[used] = np.arange(len(used))
        orig = vmap[orig]
        face, nf = _face_orbits(nxt)
        ext = None
        if exterior_he is not None:
            ext = int(face[relab[exterior_he]])
        return PlanarMap(twin=twin, nxt=nxt, origin=orig,
                         exterior_face=ext, face=face, nf=nf)


def single_quad() -> RootedQuad:
    """The unique perimeter-4 quadrangulation with no interior vertex."""
    b = MapBuilder()
    outer, _inner = b.boundary_cycle(4)
    m = b.finalize(outer[0])
    # builder ids survive finalize verbatim when nothing was collapsed
    return RootedQuad(map=m, root=outer[0])
