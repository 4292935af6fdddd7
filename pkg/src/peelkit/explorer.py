"""Peeling exploration: lazy half-planes and full free Boltzmann disks.

The surgery attaches one quadrilateral per peeling step to the unexplored
side of a frontier (the half-plane boundary or a disk hole), splitting off
bounded pockets that are either registered lazily as bubbles or filled
recursively by the disk sampler.

Frontier half-edges are oriented with the unexplored region on their
left, so the unexplored face's next-chain runs left to right along the
frontier; bounded pockets are next-cycles with the pocket on the left.
Boundary coordinates follow lambda(x) = edge from v_{x-1} to v_x, with
the root edge at x = 0.
"""

from dataclasses import dataclass

from peelkit.boltzmann import CapacityError, PartitionTable
from peelkit.mapcore import MapBuilder, PlanarMap, RootedQuad
from peelkit.peellaw import (
    HalfPlaneSampler, PeelIndicator, default_table, sample_disk_peel,
)


@dataclass
class Bubble:
    perimeter: int
    root: int          # half-edge on the bubble's hole cycle
    filled: bool = False


@dataclass
class PeelRecord:
    indicator: PeelIndicator
    covered_left: int           # covered frontier edges strictly left of the peeled edge
    covered_right: int
    covered_orig_left: list     # lambda coordinates of swallowed original edges
    covered_orig_right: list
    peeled_coord: int | None    # lambda coordinate of the peeled edge, if original
    new_edges: list             # frontier half-edges created by this step


class _Splice:
    """One quad attachment per peeling step on a next-chain."""

    def __init__(self, builder: MapBuilder):
        self.b = builder
        self.prev: dict[int, int] = {}

    def link(self, x: int, y: int):
        self.b.nxt[x] = y
        self.prev[y] = x

    def chain(self, hs: list, circular: bool = False):
        for p, q in zip(hs, hs[1:]):
            self.link(p, q)
        if circular and hs:
            self.link(hs[-1], hs[0])

    def quad(self, hs: list):
        # quad interiors never need prev links
        for p, q in zip(hs, hs[1:] + hs[:1]):
            self.b.nxt[p] = q

    def attach(self, h: int, left_arc: list, right_arc: list,
               split_right: int = -1, zero_side: str | None = None,
               ) -> tuple[list, list]:
        """Attach a quad at h, covering the given arcs of its chain.

        Arcs list the covered half-edges left to right.  `split_right`
        splits the right arc after that many edges into two pockets (the
        both-right two-sided case).  `zero_side` 'R'/'L' marks the
        one-sided outcome with a zero-edge component (a 2-gon pocket
        hanging at the peeled edge's endpoint), which covers no arc.
        Returns (pockets, new_edges) with pockets as (perimeter, root)
        pairs and new_edges the replacement chain, left to right.
        """
        b = self.b
        a, bb = b.origin[h], b.head(h)
        first = left_arc[0] if left_arc else h
        last = right_arc[-1] if right_arc else h
        prev_h = self.prev.get(first)
        after = b.nxt[last]
        wrapped = after == h  # disk hole covered entirely
        pockets = []
        if zero_side == "R":
            u = b.new_vertex()
            c2, c2t = b.new_edge(u, bb)
            c1, c1t = b.new_edge(bb, u)
            q3, t3 = b.new_edge(bb, a)
            self.quad([h, c2t, c1t, q3])
            pockets.append((2, c1, [c1, c2]))
            new = [t3]
        elif zero_side == "L":
            u = b.new_vertex()
            c2, c2t = b.new_edge(a, u)
            c1, c1t = b.new_edge(u, a)
            q1, t1 = b.new_edge(bb, a)
            self.quad([h, q1, c1t, c2t])
            pockets.append((2, c2, [c2, c1]))
            new = [t1]
        elif not left_arc and not right_arc:
            u, w = b.new_vertex(), b.new_vertex()
            q1, t1 = b.new_edge(bb, u)
            q2, t2 = b.new_edge(u, w)
            q3, t3 = b.new_edge(w, a)
            self.quad([h, q1, q2, q3])
            new = [t3, t2, t1]
        elif split_right >= 0:
            if left_arc:
                raise ValueError("split_right applies to all-right coverage")
            k1 = split_right
            arc1, arc2 = right_arc[:k1], right_arc[k1:]
            x = b.head(arc1[-1])
            y = b.head(arc2[-1])
            c1, c1t = b.new_edge(x, bb)
            c2, c2t = b.new_edge(y, x)
            q3, t3 = b.new_edge(y, a)
            self.quad([h, c1t, c2t, q3])
            pockets.append((k1 + 1, c1, arc1 + [c1]))
            pockets.append((len(arc2) + 1, c2, arc2 + [c2]))
            new = [t3]
        elif right_arc and not left_arc:
            k = len(right_arc)
            w = b.head(right_arc[-1])
            if k % 2 == 1:
                c1, c1t = b.new_edge(w, bb)
                u = b.new_vertex()
                q2, t2 = b.new_edge(w, u)
                q3, t3 = b.new_edge(u, a)
                self.quad([h, c1t, q2, q3])
                pockets.append((k + 1, c1, right_arc + [c1]))
                new = [t3, t2]
            else:
                u = b.new_vertex()
                c2, c2t = b.new_edge(u, bb)
                c1, c1t = b.new_edge(w, u)
                q3, t3 = b.new_edge(w, a)
                self.quad([h, c2t, c1t, q3])
                pockets.append((k + 2, c1, right_arc + [c1, c2]))
                new = [t3]
        elif left_arc and not right_arc:
            k = len(left_arc)
            z = b.origin[left_arc[0]]
            if k % 2 == 1:
                c1, c1t = b.new_edge(a, z)
                u = b.new_vertex()
                q1, t1 = b.new_edge(bb, u)
                q2, t2 = b.new_edge(u, z)
                self.quad([h, q1, q2, c1t])
                pockets.append((k + 1, c1, left_arc + [c1]))
                new = [t2, t1]
            else:
                u = b.new_vertex()
                c2, c2t = b.new_edge(a, u)
                c1, c1t = b.new_edge(u, z)
                q1, t1 = b.new_edge(bb, z)
                self.quad([h, q1, c1t, c2t])
                pockets.append((k + 2, c2, left_arc + [c2, c1]))
                new = [t1]
        else:
            # one pocket on each side of the peeled edge
            x = b.head(right_arc[-1])
            z = b.origin[left_arc[0]]
            c1, c1t = b.new_edge(x, bb)
            c2, c2t = b.new_edge(a, z)
            f, ft = b.new_edge(z, x)
            self.quad([h, c1t, ft, c2t])
            pockets.append((len(right_arc) + 1, c1, right_arc + [c1]))
            pockets.append((len(left_arc) + 1, c2, left_arc + [c2]))
            new = [f]
        for _per, _root, cyc in pockets:
            self.chain(cyc, circular=True)
        if wrapped:
            self.chain(new, circular=True)
        else:
            self.chain(new)
            if prev_h is not None:
                self.link(prev_h, new[0])
            if after != -1:
                self.link(new[-1], after)
            else:
                b.nxt[new[-1]] = -1
        return [(p, r) for p, r, _ in pockets], new

    def attach_both_left(self, h: int, far: int, near: int) -> tuple[list, list]:
        """Two pockets left of h: arcs of `far` then `near` covered edges."""
        b = self.b
        a, bb = b.origin[h], b.head(h)
        arc = self._walk_left(h, far + near)
        arc1, arc2 = arc[:far], arc[far:]
        z2 = b.origin[arc1[0]]
        y2 = b.origin[arc2[0]]
        prev_h = self.prev.get(arc1[0])
        after = b.nxt[h]
        wrapped = after == arc1[0]
        c2, c2t = b.new_edge(a, y2)
        c1, c1t = b.new_edge(y2, z2)
        q1, t1 = b.new_edge(bb, z2)
        self.quad([h, q1, c1t, c2t])
        self.chain(arc1 + [c1], circular=True)
        self.chain(arc2 + [c2], circular=True)
        new = [t1]
        if wrapped:
            self.chain(new, circular=True)
        else:
            if prev_h is not None:
                self.link(prev_h, new[0])
            if after != -1:
                self.link(new[0], after)
            else:
                b.nxt[new[0]] = -1
        return [(far + 1, c1), (near + 1, c2)], new

    def _walk_right(self, h: int, k: int) -> list:
        out = []
        g = self.b.nxt[h]
        for _ in range(k):
            out.append(g)
            g = self.b.nxt[g]
        return out

    def _walk_left(self, h: int, k: int) -> list:
        out = []
        g = h
        for _ in range(k):
            g = self.prev[g]
            out.append(g)
        return list(reversed(out))


# ---------------------------------------------------------------------------
# free Boltzmann disk sampler
# ---------------------------------------------------------------------------


def _fill_hole(sp: _Splice, root: int, perimeter: int, rng,
               table: PartitionTable, max_quads: int) -> int:
    """Fill one hole with a free Boltzmann interior; returns quads placed."""
    b = sp.b
    stack = [(root, perimeter)]
    quads = 0
    while stack:
        h, p = stack.pop()
        cell = sample_disk_peel(p, rng, table)
        if cell.is_atom:
            b.collapse_2gon(h, b.nxt[h])
            continue
        quads += 1
        if quads > max_quads:
            raise CapacityError(f"disk filling exceeded {max_quads} quadrilaterals")
        arcs = cell.arcs
        if len(arcs) == 1:
            _, new = sp.attach(h, [], [])
            stack.append((new[0], p + 2))
        elif len(arcs) == 2:
            a1, a2 = arcs
            covered = sp._walk_right(h, a1)
            pockets, new = sp.attach(h, [], covered,
                                     zero_side="R" if a1 == 0 else None)
            for per, r in pockets:
                stack.append((r, per))
            rem = a2 + (2 if a1 % 2 == 1 else 1)
            stack.append((new[0], rem))
        else:
            a1, a2, a3 = arcs
            covered = sp._walk_right(h, a1 + a2)
            pockets, new = sp.attach(h, [], covered, split_right=a1)
            for per, r in pockets:
                stack.append((r, per))
            stack.append((new[0], a3 + 1))
    return quads


def sample_fb_disk(perimeter: int, rng, table: PartitionTable | None = None,
                   max_quads: int = 2_000_000) -> RootedQuad:
    """Sample a free Boltzmann disk of the given even perimeter >= 2."""
    if perimeter % 2 or perimeter < 2:
        raise ValueError(f"perimeter must be even >= 2, got {perimeter}")
    table = table or default_table()
    b = MapBuilder()
    sp = _Splice(b)
    outer, inner = b.boundary_cycle(perimeter)
    sp.chain(inner, circular=True)
    _fill_hole(sp, inner[0], perimeter, rng, table, max_quads)
    alive_idx = [h for h, alv in enumerate(b.alive) if alv]
    relab = {h: i for i, h in enumerate(alive_idx)}
    m = b.finalize(outer[0])
    return RootedQuad(map=m, root=relab[outer[0]])


# ---------------------------------------------------------------------------
# lazy half-plane
# ---------------------------------------------------------------------------


@dataclass
class OneVertexRecord:
    terminal_time: int
    swallowed_left: list      # coordinates of original edges swallowed left of v
    swallowed_right: list
    quads_peeled: int


@dataclass
class LinearPeelRecord:
    increments: list          # O_L^i - O_L^{i-1} per step
    truncated: dict           # n -> X_L(n)
    steps: int


class LazyHalfPlane:
    """Lazily explored half-plane with simple boundary.

    The frontier is a bi-infinite chain of half-edges oriented rightward;
    original boundary edges carry lambda coordinates and more boundary is
    materialized on demand.  Bounded components split off by peeling are
    registered as bubbles and instantiated only by `fill_bubbles`.
    """

    def __init__(self, table: PartitionTable | None = None,
                 sampler: HalfPlaneSampler | None = None):
        self.table = table or default_table()
        self.sampler = sampler or _shared_sampler(self.table)
        self.builder = MapBuilder()
        self.splice = _Splice(self.builder)
        self.bubbles: list[Bubble] = []
        self.steps = 0
        b = self.builder
        vL = b.new_vertex()  # v_{-1}
        vR = b.new_vertex()  # v_0
        h, t = b.new_edge(vL, vR)
        b.nxt[h] = -1
        b.nxt[t] = -1
        self.orig_edges: dict[int, tuple[int, int]] = {0: (h, t)}
        self.coord: dict[int, int] = {h: 0}
        self.vcoord: dict[int, int] = {vL: -1, vR: 0}
        self._vert_at: dict[int, int] = {-1: vL, 0: vR}
        self._left_edge: dict[int, int] = {vR: h}    # frontier edge ending at v
        self._right_edge: dict[int, int] = {vL: h}   # frontier edge starting at v
        self._frontier: set[int] = {h}
        self._leftmost = h
        self._rightmost = h
        self.root_edge = h

    # -- boundary materialization -------------------------------------

    def _extend_right(self):
        b = self.builder
        h = self._rightmost
        x = self.coord[h]
        u = b.head(h)
        w = b.new_vertex()
        self.vcoord[w] = x + 1
        self._vert_at[x + 1] = w
        g, t = b.new_edge(u, w)
        b.nxt[t] = -1
        self.splice.link(h, g)
        b.nxt[g] = -1
        self.orig_edges[x + 1] = (g, t)
        self.coord[g] = x + 1
        self._frontier.add(g)
        self._left_edge[w] = g
        self._right_edge[u] = g
        self._rightmost = g

    def _extend_left(self):
        b = self.builder
        h = self._leftmost
        x = self.coord[h]
        u = b.origin[h]
        w = b.new_vertex()
        self.vcoord[w] = x - 2
        self._vert_at[x - 2] = w
        g, t = b.new_edge(w, u)
        b.nxt[t] = -1
        self.splice.link(g, h)
        self.orig_edges[x - 1] = (g, t)
        self.coord[g] = x - 1
        self._frontier.add(g)
        self._left_edge[u] = g
        self._right_edge[w] = g
        self._leftmost = g

    def materialize_to(self, x: int):
        while self.coord[self._rightmost] < x:
            self._extend_right()
        while self.coord[self._leftmost] > x:
            self._extend_left()

    def edge_at(self, x: int) -> int:
        """Frontier half-edge of the original boundary edge lambda(x)."""
        self.materialize_to(x)
        v = self._vert_at.get(x - 1)
        h = self._right_edge.get(v) if v is not None else None
        if h is None or self.coord.get(h) != x:
            raise ValueError(f"lambda({x}) is no longer on the frontier")
        return h

    def on_frontier(self, h: int) -> bool:
        return h in self._frontier

    def frontier_right_of(self, v: int) -> int | None:
        return self._right_edge.get(v)

    def frontier_left_of(self, v: int) -> int | None:
        return self._left_edge.get(v)

    def frontier_length_change(self) -> int:
        # net change vs. the initial boundary is Ex - Co summed over steps
        return len(self._frontier)

    # -- peeling --------------------------------------------------------

    def _ensure_materialized(self, h: int, left: int, right: int):
        # the covered arcs plus one surviving edge beyond each must exist;
        # nxt == -1 / missing prev happens only at the materialized extremes
        b = self.builder
        g = h
        for _ in range(right + 1):
            while b.nxt[g] == -1:
                self._extend_right()
            g = b.nxt[g]
        g = h
        for _ in range(left + 1):
            while g not in self.splice.prev:
                self._extend_left()
            g = self.splice.prev[g]

    def peel(self, h: int, rng=None,
             indicator: PeelIndicator | None = None) -> PeelRecord:
        """Peel the frontier at half-edge h.

        The indicator is sampled from the half-plane law unless one is
        supplied (deterministic replay).
        """
        if h not in self._frontier:
            raise ValueError(f"half-edge {h} is not on the frontier")
        ind = indicator if indicator is not None else self.sampler.sample(rng)
        fin = ind.finite_entries
        pos = ind.remainder_pos
        both_left = None
        split = -1
        zero_side = None
        if len(fin) == 0:
            left = right = 0
        elif len(fin) == 1:
            k = fin[0]
            if pos == 1:      # (k, REM): component right of the peeled edge
                left, right = 0, k
                zero_side = "R" if k == 0 else None
            else:             # (REM, k)
                left, right = k, 0
                zero_side = "L" if k == 0 else None
        else:
            k1, k2 = fin
            if pos == 2:      # (k1, k2, REM): both right, k1 adjacent
                left, right, split = 0, k1 + k2, k1
            elif pos == 1:    # (k1, REM, k2): k1 right, k2 left
                left, right = k2, k1
            else:             # (REM, k1, k2): k1 far left, k2 adjacent left
                left, right = k1 + k2, 0
                both_left = (k1, k2)
        self._ensure_materialized(h, left, right)
        b = self.builder
        arcL = self.splice._walk_left(h, left) if left else []
        arcR = self.splice._walk_right(h, right) if right else []
        covered = arcL + [h] + arcR
        rec_left = sorted(self.coord[g] for g in arcL if g in self.coord)
        rec_right = sorted(self.coord[g] for g in arcR if g in self.coord)
        peeled_coord = self.coord.get(h)
        for g in covered:
            self._frontier.discard(g)
            self._right_edge.pop(b.origin[g], None)
            self._left_edge.pop(b.head(g), None)
            self.coord.pop(g, None)
        if both_left is not None:
            pockets, new = self.splice.attach_both_left(h, *both_left)
        else:
            pockets, new = self.splice.attach(h, arcL, arcR, split_right=split,
                                              zero_side=zero_side)
        for per, root in pockets:
            self.bubbles.append(Bubble(per, root))
        for g in new:
            self._frontier.add(g)
            self._right_edge[b.origin[g]] = g
            self._left_edge[b.head(g)] = g
        self.steps += 1
        return PeelRecord(ind, left, right, rec_left, rec_right,
                          peeled_coord, new)

    # -- instantiation ----------------------------------------------------

    def fill_bubbles(self, rng, max_quads: int = 2_000_000):
        """Replace every registered bubble by a free Boltzmann disk."""
        for bub in self.bubbles:
            if not bub.filled:
                _fill_hole(self.splice, bub.root, bub.perimeter, rng,
                           self.table, max_quads)
                bub.filled = True

    def snapshot(self) -> tuple[PlanarMap, dict]:
        """Finalized copy of the explored region.

        The frontier and the underside of the materialized boundary are
        closed into a single exterior face (a revisiting, non-simple one:
        untouched boundary vertices appear on both sides).  Unfilled
        bubbles remain as non-quad faces, so run `fill_bubbles` first when
        a valid quadrangulation fragment is wanted.  Returns the map and
        the builder-to-map half-edge relabeling.
        """
        b = self.builder
        b2 = MapBuilder()
        b2.twin = list(b.twin)
        b2.nxt = list(b.nxt)
        b2.origin = list(b.origin)
        b2.alive = list(b.alive)
        b2.nv = b.nv
        xs = sorted(self.orig_edges)
        unders = [self.orig_edges[x][1] for x in xs]
        for t_right, t_left in zip(unders[1:][::-1], unders[:-1][::-1]):
            b2.nxt[t_right] = t_left
        b2.nxt[self._rightmost] = unders[-1]
        b2.nxt[unders[0]] = self._leftmost
        alive_idx = [hh for hh, alv in enumerate(b2.alive) if alv]
        relab = {hh: i for i, hh in enumerate(alive_idx)}
        m = b2.finalize(unders[0])
        return m, relab


_SAMPLER_CACHE: dict[int, HalfPlaneSampler] = {}


def _shared_sampler(table: PartitionTable) -> HalfPlaneSampler:
    key = id(table)
    if key not in _SAMPLER_CACHE:
        _SAMPLER_CACHE[key] = HalfPlaneSampler(table)
    return _SAMPLER_CACHE[key]


# ---------------------------------------------------------------------------
# peeling processes
# ---------------------------------------------------------------------------


def run_peeling_process(state: LazyHalfPlane, edge_selector, stop_rule, rng,
                        max_steps: int = 10_000_000) -> list[PeelRecord]:
    """Generic peeling process: selector and stop rule see the state and
    the trajectory so far (the filtration of step records)."""
    traj: list[PeelRecord] = []
    while not stop_rule(state, traj):
        h = edge_selector(state, traj)
        if not state.on_frontier(h):
            raise ValueError(f"edge selector returned non-frontier edge {h}")
        traj.append(state.peel(h, rng))
        if len(traj) >= max_steps:
            raise CapacityError("peeling step budget exceeded")
    return traj


def one_vertex_peel(state: LazyHalfPlane, v: int, side: str, rng) -> OneVertexRecord:
    """Peel the quadrilaterals incident to frontier vertex v from one side.

    side 'L' repeatedly peels the edge immediately left of v until a step
    covers boundary to the right of the peeled edge, which is exactly when
    v leaves the frontier; mirrored for side 'R'.
    """
    if side not in ("L", "R"):
        raise ValueError("side must be 'L' or 'R'")
    swL: list[int] = []
    swR: list[int] = []
    steps = 0
    if v in state.vcoord:
        state.materialize_to(state.vcoord[v] + 1)
        state.materialize_to(state.vcoord[v] - 1)
    while True:
        h = (state.frontier_left_of(v) if side == "L"
             else state.frontier_right_of(v))
        if h is None:
            raise RuntimeError("vertex left the frontier without a terminal step")
        rec = state.peel(h, rng)
        steps += 1
        swL.extend(rec.covered_orig_left)
        swR.extend(rec.covered_orig_right)
        if rec.peeled_coord is not None:
            (swL if side == "L" else swR).append(rec.peeled_coord)
        done = rec.covered_right >= 1 if side == "L" else rec.covered_left >= 1
        if done:
            return OneVertexRecord(steps, sorted(swL), sorted(swR), steps)


def linear_peel(state: LazyHalfPlane, budget: int, n_grid: list, rng,
                ) -> LinearPeelRecord:
    """Linear peeling: always peel just right of the rightmost frontier
    vertex that still lies on the original left boundary ray (coordinates
    <= -1).  Records the per-step counts of original right-ray edges
    (coordinates >= 1) swallowed, and their truncated sums."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    incs: list[int] = []
    vx = -1
    state.materialize_to(0)
    state.materialize_to(-1)
    for _ in range(budget):
        while True:
            state.materialize_to(vx)
            v = state._vert_at.get(vx)
            if v is not None and state.frontier_right_of(v) is not None:
                break
            vx -= 1
        h = state.frontier_right_of(v)
        rec = state.peel(h, rng)
        gained = sum(1 for c in rec.covered_orig_left if c >= 1)
        gained += sum(1 for c in rec.covered_orig_right if c >= 1)
        if rec.peeled_coord is not None and rec.peeled_coord >= 1:
            gained += 1
        incs.append(gained)
    trunc = {n: sum(min(i, n) for i in incs) for n in n_grid}
    return LinearPeelRecord(incs, trunc, len(incs))
