"""Glued peeling of two half-planes identified along boundary rays.

The cluster grows layer by layer: each step peels a frontier edge with an
endpoint among the previous layer's frontier vertices (the anchors), on
whichever side carries that edge, and absorbs the peeled quadrilateral
together with the components it disconnects.  Interface edges swallowed
from one side stay peelable from the other.  Layer time J_{r+1} is the
first step after which no anchor remains on the cluster frontier, which
forces B_r(A; Q_zip) inside the layer-r cluster.

Statistics per the trajectory contract:

    X_side   cluster-frontier edges not on the original boundaries
    Y_side   original side-boundary edges no longer on that side's
             frontier, plus #A
    Z = X - Y, with per-step increment exactly Ex - Co of the peel
    Yhat     original-boundary edges inside the cluster (each identified
             pair once); Yhat_n and K(n) track its truncated jumps

The selector is the anchor-first rule: anchors are listed by one
canonical counterclockwise scan of the layer's cluster frontier (side -
left to right, then side +), and each step peels a canonical incident
cluster edge of the first anchor still on the frontier.  This is a pure
function of the layer frontier, so a process restarted from the current
frontier composition is statistically indistinguishable from a fresh one.

`GluedPeelState` is the plain-python reference engine; the numba engine in
`_kernels.glued_engine` implements the same process for the volume
experiments, and `run_layers` / `instantiate` wrap it.
"""

from dataclasses import dataclass, field

import numpy as np

from peelkit import _kernels as K
from peelkit import _engine as E
from peelkit.boltzmann import CapacityError, PartitionTable
from peelkit.peellaw import (
    HalfPlaneSampler, PeelIndicator, cover_exposed, default_table,
    kernel_tables,
)

F_ALIVE, F_CLUST, F_ORIG, F_SIDE, F_YCNT = 1, 2, 4, 8, 16


@dataclass
class LayerStats:
    j: int
    yhat: int
    x: int
    y: int
    z: int
    frontier_edges: int
    max_frontier_edges: int
    yhat_n: dict
    k_n: dict


@dataclass
class PeelTrajectory:
    layers: list
    n_grid: tuple
    a_edges: int

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.layers])


class GluedPeelState:
    """Reference implementation of the glued peeling process.

    `a_edges` initial edges sit on the gluing interface starting at
    coordinate 0; `glued=False` runs the same layered exploration on a
    single half-plane (used by the boundary-window experiments).  General
    initial compositions arise through `restart()`.
    """

    def __init__(self, a_edges: int = 1, glued: bool = True,
                 hole: tuple | None = None,
                 table: PartitionTable | None = None,
                 sampler: HalfPlaneSampler | None = None,
                 n_grid: tuple = ()):
        if hole is None:
            if a_edges < 1:
                raise ValueError("initial edge set must be nonempty")
            xlo = xm = xp = a_edges - 1
        else:
            xlo, xm, xp = hole
            if not (0 <= xlo and xlo <= xm and xlo <= xp):
                raise ValueError("gluing times need 0 <= xlo <= x- and xlo <= x+")
            if not glued:
                raise ValueError("holes only arise in the glued setting")
        self.table = table or default_table()
        self.sampler = sampler or HalfPlaneSampler(self.table)
        self.glued = glued
        self.n_grid = tuple(n_grid)
        self.lv: list[int] = []
        self.rv: list[int] = []
        self.prev: list[int] = []
        self.nxt: list[int] = []
        self.part: list[int] = []
        self.flag: list[int] = []
        self.nv = 0
        self.cfe: dict[int, int] = {}
        self.vinc: dict[tuple, int] = {}
        self.v_gen: dict[int, int] = {}
        self.v_dead: dict[int, bool] = {}
        self.v_idx: dict[int, int] = {}
        self.anchors: list[int] = []
        self.alive = 0
        self.ptr = 0
        self.gen = 1
        self.end_r = [-1, -1]
        self.leftcell = [-1, -1]
        self.lv_last = [-1, -1]
        self.iv_last = -1
        self.xl = [-1, -1]
        self.rep = [-1, -1]
        # the initial edge set: the identified interface arc [0, xlo] plus
        # both sides of the hole boundary
        n_logical = (xlo + 1) + (xm - xlo) + (xp - xlo)
        if not glued:
            n_logical = xlo + 1
        self.a_edges = n_logical
        self.x_stat = [0, 0]
        self.y_stat = [0, 0]
        self.yhat = n_logical
        self.cf = n_logical
        self.max_cf = n_logical
        self.yn_acc = {n: 0 for n in self.n_grid}
        self.kn_acc = {n: 0 for n in self.n_grid}
        self.j = 0
        self.r = 0
        self.layers: list[LayerStats] = []
        self.last_delta_z = None
        self.last_co_ex = None

        seam = self._new_vertex()
        self.iv_last = seam
        self.lv_last = [seam, seam]
        nsides = 2 if glued else 1
        a_flag = F_ALIVE | F_ORIG | F_CLUST | F_YCNT

        def append(side, lvv, rvv, flag):
            cm = self._new_cell(lvv, rvv, flag | (F_SIDE if side else 0))
            self.prev[cm] = self.end_r[side]
            if self.end_r[side] >= 0:
                self.nxt[self.end_r[side]] = cm
            else:
                self.leftcell[side] = cm
            self.end_r[side] = cm
            self._slot_add(cm)
            if flag & F_CLUST:
                self._cfe_add(lvv)
                self._cfe_add(rvv)
                self.rep[side] = cm
            return cm

        for x in range(xlo + 1):
            w = self._new_vertex()
            cm = append(0, self.iv_last, w, a_flag)
            if glued:
                cp = append(1, self.iv_last, w, a_flag)
                self.part[cm] = cp
                self.part[cp] = cm
            self.iv_last = w
        if glued and (xm > xlo or xp > xlo):
            # unidentified hole arcs from u0, re-converging at one vertex
            u0 = self.iv_last
            p_end = self._new_vertex()
            vprev = u0
            for y in range(xm - xlo):
                w = p_end if y == xm - xlo - 1 else self._new_vertex()
                append(0, vprev, w, a_flag)
                vprev = w
            vprev = u0
            for y in range(xp - xlo):
                w = p_end if y == xp - xlo - 1 else self._new_vertex()
                append(1, vprev, w, a_flag)
                vprev = w
            self.iv_last = p_end
        self._rebuild_anchors()
        self._record_layer()

    # ----- low-level helpers ------------------------------------------------

    def _new_vertex(self) -> int:
        self.nv += 1
        return self.nv - 1

    def _new_cell(self, lv, rv, flag) -> int:
        self.lv.append(lv)
        self.rv.append(rv)
        self.prev.append(-1)
        self.nxt.append(-1)
        self.part.append(-1)
        self.flag.append(flag)
        return len(self.lv) - 1

    def _slot_add(self, c):
        side = 1 if self.flag[c] & F_SIDE else 0
        self.vinc[(self.lv[c], 2 * side)] = c
        self.vinc[(self.rv[c], 2 * side + 1)] = c

    def _slot_del(self, c):
        side = 1 if self.flag[c] & F_SIDE else 0
        if self.vinc.get((self.lv[c], 2 * side)) == c:
            del self.vinc[(self.lv[c], 2 * side)]
        if self.vinc.get((self.rv[c], 2 * side + 1)) == c:
            del self.vinc[(self.rv[c], 2 * side + 1)]

    def _cfe_add(self, v):
        self.cfe[v] = self.cfe.get(v, 0) + 1
        if self.v_gen.get(v) == self.gen and self.v_dead.get(v):
            self.v_dead[v] = False
            self.alive += 1
            self.ptr = min(self.ptr, self.v_idx[v])

    def _cfe_del(self, v):
        self.cfe[v] -= 1
        if self.cfe[v] == 0 and self.v_gen.get(v) == self.gen \
                and not self.v_dead.get(v, True):
            self.v_dead[v] = True
            self.alive -= 1

    def frontier_cells(self, side: int, cluster_only: bool = True) -> list:
        c = self.rep[side]
        if c < 0:
            return []
        req = F_ALIVE | (F_CLUST if cluster_only else 0)
        while self.prev[c] >= 0 and (self.flag[self.prev[c]] & req) == req:
            c = self.prev[c]
        out = []
        while c >= 0 and (self.flag[c] & req) == req:
            out.append(c)
            c = self.nxt[c]
        return out

    def _rebuild_anchors(self):
        self.anchors = []
        self.v_gen = {}
        self.v_dead = {}
        self.v_idx = {}
        self.alive = 0
        self.ptr = 0
        for side in range(2):
            for c in self.frontier_cells(side):
                for v in (self.lv[c], self.rv[c]):
                    if v not in self.v_gen:
                        self.v_gen[v] = self.gen
                        self.v_dead[v] = False
                        self.v_idx[v] = len(self.anchors)
                        self.anchors.append(v)
                        self.alive += 1

    def _record_layer(self):
        x = self.x_stat[0] + self.x_stat[1]
        y = self.y_stat[0] + self.y_stat[1] + 2 * self.a_edges
        self.layers.append(LayerStats(
            self.j, self.yhat, x, y, x - y, self.cf, self.max_cf,
            dict(self.yn_acc), dict(self.kn_acc)))

    # ----- materialization --------------------------------------------------

    def _extend_right(self):
        w = self._new_vertex()
        cpp = -1
        for side in range(2 if self.glued else 1):
            cm = self._new_cell(self.iv_last, w,
                                F_ALIVE | F_ORIG | (F_SIDE if side else 0))
            if side == 1:
                self.part[cm] = cpp
                self.part[cpp] = cm
            self.prev[cm] = self.end_r[side]
            self.nxt[self.end_r[side]] = cm
            self.end_r[side] = cm
            self._slot_add(cm)
            cpp = cm
        self.iv_last = w

    def _extend_left(self, side):
        w = self._new_vertex()
        cm = self._new_cell(w, self.lv_last[side],
                            F_ALIVE | F_ORIG | (F_SIDE if side else 0))
        self.nxt[cm] = self.leftcell[side]
        self.prev[self.leftcell[side]] = cm
        self.leftcell[side] = cm
        self.lv_last[side] = w
        self.xl[side] -= 1

    # ----- one peeling step -------------------------------------------------

    def select_edge(self) -> tuple[int, int]:
        """(cell, anchor vertex) per the anchor-first canonical rule."""
        while self.ptr < len(self.anchors) and \
                self.cfe.get(self.anchors[self.ptr], 0) == 0:
            self.ptr += 1
        if self.ptr >= len(self.anchors):
            raise RuntimeError("no anchored frontier edge; layer bookkeeping broken")
        v = self.anchors[self.ptr]
        for slot in range(4):
            c = self.vinc.get((v, slot))
            if c is not None and (self.flag[c] & (F_ALIVE | F_CLUST)) == (F_ALIVE | F_CLUST):
                return c, v
        raise RuntimeError("anchor lost its incident cluster edge")

    def step(self, rng, indicator: PeelIndicator | None = None) -> PeelIndicator:
        csel, _v = self.select_edge()
        side = 1 if self.flag[csel] & F_SIDE else 0
        ind = indicator if indicator is not None else self.sampler.sample(rng)
        co, ex = cover_exposed(ind)
        fin = ind.finite_entries
        pos = ind.remainder_pos
        if len(fin) == 0:
            left = right = 0
        elif len(fin) == 1:
            left, right = (0, fin[0]) if pos == 1 else (fin[0], 0)
        else:
            k1, k2 = fin
            left, right = (0, k1 + k2) if pos == 2 else \
                ((k2, k1) if pos == 1 else (k1 + k2, 0))
        # materialize the arc plus one edge beyond on each side
        g = csel
        for _ in range(right + 1):
            if self.nxt[g] < 0:
                self._extend_right()
            g = self.nxt[g]
        g = csel
        for _ in range(left + 1):
            if self.prev[g] < 0:
                self._extend_left(side)
            g = self.prev[g]
        gr = csel
        for _ in range(right):
            gr = self.nxt[gr]
        gl = csel
        for _ in range(left):
            gl = self.prev[gl]
        before, after = self.prev[gl], self.nxt[gr]
        a_v, b_v = self.lv[csel], self.rv[csel]
        zl_v, wr_v = self.lv[gl], self.rv[gr]
        # pass A: cover
        yhat_delta = 0
        c = gl
        while True:
            fl = self.flag[c]
            self.flag[c] = fl & ~F_ALIVE
            self._slot_del(c)
            p = self.part[c]
            p_ok = p >= 0 and (self.flag[p] & F_ALIVE)
            if fl & F_CLUST:
                self._cfe_del(self.lv[c])
                self._cfe_del(self.rv[c])
                if not (p_ok and (self.flag[p] & F_CLUST)):
                    self.cf -= 1
            if fl & F_ORIG:
                self.y_stat[side] += 1
                if not (fl & F_YCNT):
                    yhat_delta += 1
                    self.flag[c] |= F_YCNT
                    if p >= 0:
                        self.flag[p] |= F_YCNT
                if p_ok:
                    if not (self.flag[p] & F_CLUST):
                        self.flag[p] |= F_CLUST
                        self.cf += 1
                        self._cfe_add(self.lv[p])
                        self._cfe_add(self.rv[p])
                        self.rep[1 - side] = p
                    self.part[p] = -1
            else:
                self.x_stat[side] -= 1
            if c == gr:
                break
            c = self.nxt[c]
        # replacement chain
        sflag = F_ALIVE | F_CLUST | (F_SIDE if side else 0)
        if len(fin) == 0:
            w, u = self._new_vertex(), self._new_vertex()
            chain = [(a_v, w), (w, u), (u, b_v)]
        elif len(fin) == 1:
            k = fin[0]
            u = self._new_vertex()
            if k == 0:
                chain = [(a_v, b_v)]
            elif pos == 1:
                chain = [(a_v, u), (u, wr_v)] if k % 2 else [(a_v, wr_v)]
            else:
                chain = [(zl_v, u), (u, b_v)] if k % 2 else [(zl_v, b_v)]
        else:
            chain = [{0: (a_v, wr_v), 1: (zl_v, wr_v), 2: (zl_v, b_v)}[pos]]
        prevc = before
        first_new = None
        for (lvv, rvv) in chain:
            cc = self._new_cell(lvv, rvv, sflag)
            if first_new is None:
                first_new = cc
            self._slot_add(cc)
            self._cfe_add(lvv)
            self._cfe_add(rvv)
            self.prev[cc] = prevc
            if prevc >= 0:
                self.nxt[prevc] = cc
            prevc = cc
        self.nxt[prevc] = after
        if after >= 0:
            self.prev[after] = prevc
        self.rep[side] = first_new
        self.x_stat[side] += ex
        self.cf += ex
        self.max_cf = max(self.max_cf, self.cf)
        self.yhat += yhat_delta
        for n in self.n_grid:
            self.yn_acc[n] += min(yhat_delta, n)
            if yhat_delta >= n:
                self.kn_acc[n] += 1
        self.j += 1
        self.last_co_ex = (co, ex)
        self.last_delta_z = ex - co
        if self.alive == 0:
            self.r += 1
            self._record_layer()
            self.gen += 1
            self._rebuild_anchors()
        return ind

    def run_to_layer(self, r_target: int, rng, step_cap: int = 50_000_000,
                     ) -> PeelTrajectory:
        while self.r < r_target:
            self.step(rng)
            if self.j > step_cap:
                raise CapacityError("glued peeling step budget exceeded")
        return PeelTrajectory(list(self.layers), self.n_grid, self.a_edges)

    # ----- Markov restart ----------------------------------------------------

    def restart(self) -> "GluedPeelState":
        """Fresh process whose initial edge set is the current cluster
        frontier, with the unexplored parts resampled (Markov property)."""
        new = object.__new__(GluedPeelState)
        new.table = self.table
        new.sampler = self.sampler
        new.glued = self.glued
        new.n_grid = self.n_grid
        new.lv, new.rv = [], []
        new.prev, new.nxt, new.part, new.flag = [], [], [], []
        new.nv = 0
        new.cfe = {}
        new.vinc = {}
        new.end_r = [-1, -1]
        new.leftcell = [-1, -1]
        new.lv_last = [-1, -1]
        new.iv_last = -1
        new.xr = 0
        new.xl = [-1, -1]
        new.rep = [-1, -1]
        vmap: dict[int, int] = {}

        def remap(v):
            if v not in vmap:
                vmap[v] = new._new_vertex()
            return vmap[v]

        cmap: dict[int, int] = {}
        n_logical = 0
        for side in range(2):
            cells = self.frontier_cells(side, cluster_only=False)
            prevc = -1
            for c in cells:
                fl = self.flag[c]
                keep = F_ALIVE | (F_SIDE if side else 0)
                keep |= F_ORIG  # current frontiers are the new boundaries
                if fl & F_CLUST:
                    keep |= F_CLUST | F_YCNT
                cc = new._new_cell(remap(self.lv[c]), remap(self.rv[c]), keep)
                cmap[c] = cc
                new.prev[cc] = prevc
                if prevc >= 0:
                    new.nxt[prevc] = cc
                else:
                    new.leftcell[side] = cc
                prevc = cc
                new._slot_add(cc)
                if fl & F_CLUST:
                    new._cfe_add(new.lv[cc])
                    new._cfe_add(new.rv[cc])
                    new.rep[side] = cc
                    if not (fl & F_SIDE) or self.part[c] < 0:
                        n_logical += 1
            new.end_r[side] = prevc
            if cells:
                new.lv_last[side] = new.lv[cmap[cells[0]]]
        for c, cc in cmap.items():
            p = self.part[c]
            if p >= 0 and p in cmap:
                new.part[cc] = cmap[p]
        # the restart only peels cluster-anchored edges, so unexplored
        # boundary beyond the copied window is materialized through the
        # copied chain ends exactly as in a fresh state
        new.iv_last = new.rv[new.end_r[0]] if new.end_r[0] >= 0 else -1
        new.a_edges = n_logical
        new.x_stat = [0, 0]
        new.y_stat = [0, 0]
        new.yhat = n_logical
        new.cf = n_logical
        new.max_cf = n_logical
        new.yn_acc = {n: 0 for n in self.n_grid}
        new.kn_acc = {n: 0 for n in self.n_grid}
        new.j = 0
        new.r = 0
        new.layers = []
        new.last_delta_z = None
        new.last_co_ex = None
        new.gen = 1
        new._rebuild_anchors()
        new._record_layer()
        return new


def glued_peel_init(a_edges: int = 1, glued: bool = True,
                    hole: tuple = (0, 0, 0), n_grid: tuple = (),
                    table: PartitionTable | None = None) -> GluedPeelState:
    """Spec-facing constructor; validates the initial set and hole."""
    if a_edges < 1:
        raise ValueError("initial edge set must be nonempty and connected")
    return GluedPeelState(a_edges=a_edges, glued=glued, hole=hole,
                          n_grid=n_grid, table=table)


# ---------------------------------------------------------------------------
# numba-engine wrappers
# ---------------------------------------------------------------------------

_DUMMY_I = np.zeros(1, dtype=np.int64)
_DUMMY_2 = np.zeros((1, 4), dtype=np.int64)


def default_n_grid(r: int) -> np.ndarray:
    return np.array([r, r * r, 4 * r * r, 16 * r * r], dtype=np.int64)


def run_layers(seed: int, r_target: int, a_edges: int = 1, glued: bool = True,
               n_grid: np.ndarray | None = None,
               cell_cap: int = 1 << 20, step_cap: int = 1 << 26,
               table: PartitionTable | None = None):
    """One kernel replicate; returns (core, yn, kn) per-layer arrays.

    core columns: J, Yhat, X, Y, Z, frontier edges, max frontier edges.
    Capacity overflows retry with doubled workspaces (same seed, so the
    trajectory is reproduced exactly).
    """
    tabs = kernel_tables(table)
    if n_grid is None:
        n_grid = default_n_grid(r_target)
    cc = cell_cap
    for _attempt in range(12):
        core = np.zeros((r_target + 1, E.NCORE), dtype=np.int64)
        yn = np.zeros((r_target + 1, len(n_grid)), dtype=np.int64)
        kn = np.zeros((r_target + 1, len(n_grid)), dtype=np.int64)
        counts = np.zeros(6, dtype=np.int64)
        st = E.glued_engine(
            np.uint64(seed), r_target, a_edges, 1 if glued else 0, n_grid,
            cc, cc, step_cap, core, yn, kn, *tabs,
            0, _DUMMY_I, _DUMMY_I, _DUMMY_I, _DUMMY_I, _DUMMY_I,
            _DUMMY_I, _DUMMY_I, _DUMMY_I, _DUMMY_I,
            _DUMMY_I, _DUMMY_I, _DUMMY_I, _DUMMY_I,
            _DUMMY_2, _DUMMY_I, _DUMMY_I, counts)
        if st == K.ST_OK:
            return core, yn, kn
        if st == K.ST_STEPS:
            raise CapacityError("glued peeling exceeded the step budget")
        cc *= 2
    raise CapacityError("glued peeling workspace kept overflowing")


@dataclass
class GluedInstance:
    """Instantiated window of a glued (or single) exploration.

    Edges carry tags (bit0 original boundary, bit1 interface, bit2 side +)
    and the layer at which they joined the cluster; boundary vertices are
    indexed by lambda coordinate and side (2 = interface).
    """

    n_vertices: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_tag: np.ndarray
    edge_layer: np.ndarray
    edge_coord: np.ndarray
    v_join: np.ndarray
    bv_coord: np.ndarray
    bv_id: np.ndarray
    bv_side: np.ndarray
    snap_off: np.ndarray
    snap_lv: np.ndarray
    snap_rv: np.ndarray
    snap_side: np.ndarray
    r_target: int
    a_edges: int
    core: np.ndarray

    def boundary_vertex(self, coord: int, side: int = 2) -> int:
        hit = np.nonzero((self.bv_coord == coord) & (self.bv_side == side))[0]
        if len(hit) == 0:
            raise KeyError(f"no boundary vertex at coordinate {coord}")
        return int(self.bv_id[hit[0]])

    def lambda_map(self, side: int = 2) -> dict:
        sel = self.bv_side == side
        return dict(zip(self.bv_coord[sel].tolist(), self.bv_id[sel].tolist()))

    def unsafe_vertices(self) -> np.ndarray:
        """Vertices of the final cluster frontier (paths may leave here)."""
        lo, hi = self.snap_off[self.r_target], self.snap_off[self.r_target + 1]
        return np.unique(np.concatenate([self.snap_lv[lo:hi],
                                         self.snap_rv[lo:hi]]))


def instantiate(seed: int, r_target: int, a_edges: int = 1, glued: bool = True,
                cell_cap: int = 1 << 18, edge_cap: int = 1 << 20,
                step_cap: int = 1 << 26, max_quads: int = 1 << 26,
                table: PartitionTable | None = None) -> GluedInstance:
    """Run the exploration to layer J_{r_target} and fill all bubbles,
    producing a concrete graph window suitable for exact BFS."""
    tabs = kernel_tables(table)
    n_grid = default_n_grid(max(r_target, 1))
    cc, ec = cell_cap, edge_cap
    for _attempt in range(12):
        core = np.zeros((r_target + 1, E.NCORE), dtype=np.int64)
        yn = np.zeros((r_target + 1, len(n_grid)), dtype=np.int64)
        kn = np.zeros((r_target + 1, len(n_grid)), dtype=np.int64)
        counts = np.zeros(6, dtype=np.int64)
        e_u = np.empty(ec, dtype=np.int64)
        e_v = np.empty(ec, dtype=np.int64)
        e_tag = np.empty(ec, dtype=np.int64)
        e_layer = np.empty(ec, dtype=np.int64)
        e_coord = np.empty(ec, dtype=np.int64)
        v_join = np.full(cc, -1, dtype=np.int64)
        bv_coord = np.empty(cc, dtype=np.int64)
        bv_id = np.empty(cc, dtype=np.int64)
        bv_side = np.empty(cc, dtype=np.int64)
        snap_off = np.zeros(r_target + 2, dtype=np.int64)
        snap_lv = np.empty(ec, dtype=np.int64)
        snap_rv = np.empty(ec, dtype=np.int64)
        snap_side = np.empty(ec, dtype=np.int64)
        bub_stack = np.empty((cc, 4), dtype=np.int64)
        slot_v = np.empty(ec, dtype=np.int64)
        slot_nxt = np.empty(ec, dtype=np.int64)
        st = E.glued_engine(
            np.uint64(seed), r_target, a_edges, 1 if glued else 0, n_grid,
            cc, cc, step_cap, core, yn, kn, *tabs,
            1, e_u, e_v, e_tag, e_layer, e_coord,
            v_join, bv_coord, bv_id, bv_side,
            snap_off, snap_lv, snap_rv, snap_side,
            bub_stack, slot_v, slot_nxt, counts)
        if st != K.ST_OK:
            if st == K.ST_STEPS:
                raise CapacityError("exploration exceeded the step budget")
            cc *= 2
            ec *= 2
            continue
        n_verts, n_edges, n_bub, n_slots, n_bv, steps = counts
        state = np.empty(1, dtype=np.uint64)
        state[0] = np.uint64(seed) ^ np.uint64(0xD1B54A32D192ED03)
        fill = K._fill_disks(state, bub_stack, n_bub, slot_v, slot_nxt,
                             n_slots, v_join, n_verts, e_u, e_v, e_tag,
                             e_layer, e_coord, n_edges, tabs[4], max_quads)
        if fill[0] != K.ST_OK:
            if fill[0] == K.ST_STEPS:
                raise CapacityError("bubble filling exceeded the quad budget")
            cc *= 2
            ec *= 2
            continue
        n_verts, n_edges = int(fill[3]), int(fill[4])
        return GluedInstance(
            n_vertices=n_verts,
            edge_u=e_u[:n_edges].copy(), edge_v=e_v[:n_edges].copy(),
            edge_tag=e_tag[:n_edges].copy(),
            edge_layer=e_layer[:n_edges].copy(),
            edge_coord=e_coord[:n_edges].copy(),
            v_join=v_join[:n_verts].copy(),
            bv_coord=bv_coord[:n_bv].copy(), bv_id=bv_id[:n_bv].copy(),
            bv_side=bv_side[:n_bv].copy(),
            snap_off=snap_off.copy(), snap_lv=snap_lv[:snap_off[-1]].copy(),
            snap_rv=snap_rv[:snap_off[-1]].copy(),
            snap_side=snap_side[:snap_off[-1]].copy(),
            r_target=r_target, a_edges=a_edges, core=core)
    raise CapacityError("instantiation workspace kept overflowing")
