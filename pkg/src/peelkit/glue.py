"""Gluing constructions: SAW-decorated maps from disks and half-planes.

Finite gluings operate on real half-edge maps by twin rewiring: the
identified boundary edges keep one half-edge from each side, and vertex
classes are merged by union-find.  The infinite (lazy) zip gluing is the
configuration consumed by the glued peeling engine and is represented by
its gluing times; `glue_zip` validates them and reports the hole.
"""

from dataclasses import dataclass

import numpy as np

from peelkit.boltzmann import PartitionTable
from peelkit.gluedpeel import GluedPeelState
from peelkit.mapcore import MapBuilder, PlanarMap, RootedQuad, MapError


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class GluedMap:
    """A finite glued map with its interface path."""

    map: PlanarMap
    interface: tuple            # half-edge ids along the interface, in path order
    side_of_face: np.ndarray    # 0 = first input, 1 = second, -1 = exterior
    hole: tuple = (0, 0)        # (left, right) hole boundary lengths

    def interface_edges(self) -> set:
        out = set()
        for h in self.interface:
            out.add(h)
            out.add(int(self.map.twin[h]))
        return out


def glue_finite_arc(d1: RootedQuad, d2: RootedQuad, s: int) -> GluedMap:
    """Glue two disks along a boundary arc of 2s edges starting at the
    roots; the result is a SAW-decorated disk of perimeter p1 + p2 - 4s."""
    if s < 1:
        raise ValueError("arc half-length must be >= 1")
    p1, p2 = d1.perimeter, d2.perimeter
    if 2 * s >= min(p1, p2):
        raise ValueError(f"arc 2s={2 * s} must be shorter than both perimeters")
    m1, m2 = d1.map, d2.map
    cyc1 = d1.boundary_cycle()
    cyc2 = d2.boundary_cycle()
    n1 = m1.n_half_edges
    # walk the two exterior cycles in opposite senses so identified edges
    # are co-oriented in the glued surface
    pairs = [(cyc1[i], cyc2[-1 - i]) for i in range(2 * s)]

    total = n1 + m2.n_half_edges
    twin = np.concatenate([m1.twin, m2.twin + n1])
    nxt = np.concatenate([m1.nxt, m2.nxt + n1])
    orig = np.concatenate([m1.origin, m2.origin + m1.n_vertices])
    side = np.concatenate([np.zeros(n1, dtype=np.int64),
                           np.ones(m2.n_half_edges, dtype=np.int64)])
    uf = UnionFind(m1.n_vertices + m2.n_vertices)
    dead = np.zeros(total, dtype=bool)
    interface = []
    for h1, h2 in pairs:
        h2 += n1
        i1, i2 = int(twin[h1]), int(twin[h2])
        uf.union(int(orig[h1]), int(orig[i2]))
        uf.union(int(orig[i1]), int(orig[h2]))
        twin[i1] = i2
        twin[i2] = i1
        dead[h1] = dead[h2] = True
        interface.append(i1)
    # stitch the surviving exterior walk: around disk 1 from the far arc
    # end to the root corner, then around disk 2 back to the far arc end
    surv1 = cyc1[2 * s:]
    surv2 = cyc2[:p2 - 2 * s]
    nxt[surv1[-1]] = surv2[0] + n1
    nxt[surv2[-1] + n1] = surv1[0]
    keep = ~dead
    relab = np.cumsum(keep) - 1
    twin2 = relab[twin[keep]]
    nxt2 = relab[nxt[keep]]
    roots = np.array([uf.find(int(v)) for v in range(len(uf.parent))])
    _, compact = np.unique(roots, return_inverse=True)
    orig2 = np.array([compact[roots[int(v)]] for v in orig[keep]], dtype=np.int64)
    m = PlanarMap(twin=twin2.astype(np.int64), nxt=nxt2.astype(np.int64),
                  origin=orig2, exterior_face=None)
    ext = int(m.face[relab[surv1[0]]])
    m = PlanarMap(twin=m.twin, nxt=m.nxt, origin=m.origin,
                  exterior_face=ext, face=m.face, nf=m.nf)
    iface = tuple(int(relab[h]) for h in interface)
    side2 = side[keep]
    face_side = np.full(m.nf, -1, dtype=np.int64)
    for h in range(m.n_half_edges):
        f = int(m.face[h])
        if f != ext:
            face_side[f] = side2[h]
    return GluedMap(map=m, interface=iface, side_of_face=face_side)


def glue_full(d1: RootedQuad, d2: RootedQuad) -> GluedMap:
    """Identify the entire boundaries: a sphere quadrangulation carrying a
    self-avoiding loop of length equal to the common perimeter."""
    p1, p2 = d1.perimeter, d2.perimeter
    if p1 != p2:
        raise ValueError(f"perimeters differ: {p1} vs {p2}")
    m1, m2 = d1.map, d2.map
    n1 = m1.n_half_edges
    cyc1 = d1.boundary_cycle()
    cyc2 = d2.boundary_cycle()
    total = n1 + m2.n_half_edges
    twin = np.concatenate([m1.twin, m2.twin + n1])
    nxt = np.concatenate([m1.nxt, m2.nxt + n1])
    orig = np.concatenate([m1.origin, m2.origin + m1.n_vertices])
    side = np.concatenate([np.zeros(n1, dtype=np.int64),
                           np.ones(m2.n_half_edges, dtype=np.int64)])
    uf = UnionFind(m1.n_vertices + m2.n_vertices)
    dead = np.zeros(total, dtype=bool)
    interface = []
    for i in range(p1):
        h1 = cyc1[i]
        h2 = cyc2[(p1 - 1 - i) % p1] + n1
        i1, i2 = int(twin[h1]), int(twin[h2])
        uf.union(int(orig[h1]), int(orig[i2]))
        uf.union(int(orig[i1]), int(orig[h2]))
        twin[i1] = i2
        twin[i2] = i1
        dead[h1] = dead[h2] = True
        interface.append(i1)
    keep = ~dead
    relab = np.cumsum(keep) - 1
    twin2 = relab[twin[keep]].astype(np.int64)
    nxt2 = relab[nxt[keep]].astype(np.int64)
    roots = np.array([uf.find(int(v)) for v in range(len(uf.parent))])
    _, compact = np.unique(roots, return_inverse=True)
    orig2 = np.array([compact[roots[int(v)]] for v in orig[keep]], dtype=np.int64)
    m = PlanarMap(twin=twin2, nxt=nxt2, origin=orig2, exterior_face=None)
    side2 = side[keep]
    face_side = np.full(m.nf, -1, dtype=np.int64)
    for h in range(m.n_half_edges):
        face_side[int(m.face[h])] = side2[h]
    return GluedMap(map=m, interface=tuple(int(relab[h]) for h in interface),
                    side_of_face=face_side)


def glue_cone(d: RootedQuad) -> GluedMap:
    """Identify the two halves of one disk's boundary (fold at the root):
    a sphere quadrangulation with a self-avoiding path of length p/2."""
    p = d.perimeter
    if p % 2:
        raise ValueError("cone gluing needs even perimeter")
    m1 = d.map
    cyc = d.boundary_cycle()
    twin = m1.twin.copy()
    nxt = m1.nxt.copy()
    orig = m1.origin.copy()
    uf = UnionFind(m1.n_vertices)
    dead = np.zeros(m1.n_half_edges, dtype=bool)
    interface = []
    for i in range(p // 2):
        h1 = cyc[i]
        h2 = cyc[p - 1 - i]
        i1, i2 = int(twin[h1]), int(twin[h2])
        uf.union(int(orig[h1]), int(orig[i2]))
        uf.union(int(orig[i1]), int(orig[h2]))
        twin[i1] = i2
        twin[i2] = i1
        dead[h1] = dead[h2] = True
        interface.append(i1)
    keep = ~dead
    relab = np.cumsum(keep) - 1
    twin2 = relab[twin[keep]].astype(np.int64)
    nxt2 = relab[nxt[keep]].astype(np.int64)
    roots = np.array([uf.find(int(v)) for v in range(len(uf.parent))])
    _, compact = np.unique(roots, return_inverse=True)
    orig2 = np.array([compact[roots[int(v)]] for v in orig[keep]], dtype=np.int64)
    m = PlanarMap(twin=twin2, nxt=nxt2, origin=orig2, exterior_face=None)
    face_side = np.zeros(m.nf, dtype=np.int64)
    return GluedMap(map=m, interface=tuple(int(relab[h]) for h in interface),
                    side_of_face=face_side)


def glue_zip(a_edges_or_hole, table: PartitionTable | None = None,
             n_grid: tuple = ()) -> GluedPeelState:
    """Lazy zip gluing of two half-planes along their positive rays.

    Pass an int for pure positive-ray gluing with that many initial
    interface edges, or gluing times (xlo, x-, x+) which leave a hole with
    boundary lengths (x- - xlo, x+ - xlo); the initial edge set then
    contains the hole boundary, as the peeling process requires.
    """
    if isinstance(a_edges_or_hole, int):
        return GluedPeelState(a_edges=a_edges_or_hole, glued=True,
                              table=table, n_grid=n_grid)
    xlo, xm, xp = a_edges_or_hole
    return GluedPeelState(glued=True, hole=(xlo, xm, xp), table=table,
                          n_grid=n_grid)
