"""numba kernels for the volume Monte Carlo runs.

Everything here mirrors the Python reference implementations in
`peellaw`/`explorer`/`gluedpeel` but works on flat arrays: splitmix64
streams, inverse-CDF peeling draws from precomputed tables with lazy
tails, scalar-state loops for the one-vertex and linear processes, the
glued frontier engine (statistics mode and edge-emitting instantiation
mode), the free Boltzmann disk filler, and a CSR BFS.

Encoded peeling outcome: (typ, k1, k2, pos)
  typ 0: no bounded component
  typ 1: one bounded component, k1 covered edges; pos 0 right, 1 left
  typ 2: two components; pos 0 both right (k1 nearer), 1 k1 right / k2
         left, 2 both left (k1 farther).
"""

import math

import numpy as np
from numba import njit

U64 = np.uint64
GOLDEN = U64(0x9E3779B97F4A7C15)
LOG54 = math.log(54.0)
LOG12 = math.log(12.0)


@njit(inline="always", cache=True)
def _mix64(z):
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    return z ^ (z >> U64(31))


@njit(inline="always", cache=True)
def _next_u(state):
    # splitmix64 stream; state is a 1-element uint64 array
    state[0] += GOLDEN
    z = _mix64(state[0])
    return (z >> U64(11)) * 1.1102230246251565e-16


@njit(inline="always", cache=True)
def _logz(p, logz_tab):
    # log z(p) for even p >= 2
    l = p // 2
    if l < logz_tab.shape[0]:
        return logz_tab[l]
    return (l * 2.0794415416798357 + math.lgamma(3.0 * l - 3.0)
            - math.lgamma(l - 1.0) - math.lgamma(2.0 * l + 1.0))


@njit(inline="always", cache=True)
def _os_weight(k, logz_tab):
    # one-sided half-plane cell weight at entry k (either placement)
    if k % 2 == 1:
        return math.exp(-LOG12 + 0.5 * (1 - k) * LOG54 + _logz(k + 1, logz_tab))
    return math.exp(-LOG12 - 0.5 * k * LOG54 + _logz(k + 2, logz_tab))


@njit(inline="always", cache=True)
def _ts_weight(k1, k2, logz_tab):
    return math.exp(-0.5 * (k1 + k2) * LOG54 + _logz(k1 + 1, logz_tab)
                    + _logz(k2 + 1, logz_tab))


@njit(cache=True)
def _hp_draw(state, os_cdf, ts_cdf, ts_k1, ts_s, logz_tab):
    """One half-plane peeling indicator; returns (typ, k1, k2, pos)."""
    u = _next_u(state)
    if u < 0.375:
        return 0, 0, 0, 0
    if u < 0.875:
        v = u - 0.375
        n = os_cdf.shape[0]
        j = np.searchsorted(os_cdf, v)
        if j < n:
            base = os_cdf[j - 1] if j > 0 else 0.0
            k = j
            w = 0.5 * (os_cdf[j] - base)
        else:
            acc = os_cdf[n - 1]
            k = n - 1
            w = 0.0
            while True:
                k += 1
                w = _os_weight(k, logz_tab)
                acc += 2.0 * w
                if v < acc or k > 1_000_000_000:
                    break
            base = acc - 2.0 * w
        pos = 0 if (v - base) < w else 1
        return 1, k, 0, pos
    v = u - 0.875
    n = ts_cdf.shape[0]
    j = np.searchsorted(ts_cdf, v)
    if j < n:
        base = ts_cdf[j - 1] if j > 0 else 0.0
        k1 = ts_k1[j]
        k2 = ts_s[j] - k1
        w = (ts_cdf[j] - base) / 3.0
    else:
        acc = ts_cdf[n - 1]
        s = ts_s[n - 1]
        k1 = s - 1
        w = 0.0
        while True:
            if k1 + 2 < s:
                k1 += 2
            else:
                s += 2
                k1 = 1
            w = _ts_weight(k1, s - k1, logz_tab)
            acc += 3.0 * w
            if v < acc or s > 1_000_000_000:
                break
        base = acc - 3.0 * w
        k2 = s - k1
    r = v - base
    pos = 0 if r < w else (1 if r < 2.0 * w else 2)
    return 2, k1, k2, pos


@njit(inline="always", cache=True)
def _outcome_co_ex(typ, k1, k2):
    if typ == 0:
        return 1, 3
    if typ == 1:
        return 1 + k1, 2 if k1 % 2 == 1 else 1
    return 1 + k1 + k2, 1


# ---------------------------------------------------------------------------
# scalar-state processes
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def cover_draws(n, seed, os_cdf, ts_cdf, ts_k1, ts_s, logz_tab):
    """n i.i.d. draws of the covered-edge count Co."""
    out = np.empty(n, dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    for i in range(n):
        typ, k1, k2, pos = _hp_draw(state, os_cdf, ts_cdf, ts_k1, ts_s, logz_tab)
        co, ex = _outcome_co_ex(typ, k1, k2)
        out[i] = co
    return out


@njit(cache=True, nogil=True)
def ex_minus_co_draws(n, seed, os_cdf, ts_cdf, ts_k1, ts_s, logz_tab):
    out = np.empty(n, dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    for i in range(n):
        typ, k1, k2, pos = _hp_draw(state, os_cdf, ts_cdf, ts_k1, ts_s, logz_tab)
        co, ex = _outcome_co_ex(typ, k1, k2)
        out[i] = ex - co
    return out


@njit(inline="always", cache=True)
def _coverage_sides(typ, k1, k2, pos):
    """(left, right) covered-arc lengths for an encoded outcome."""
    if typ == 0:
        return 0, 0
    if typ == 1:
        if pos == 0:
            return 0, k1
        return k1, 0
    if pos == 0:
        return 0, k1 + k2
    if pos == 1:
        return k2, k1
    return k1 + k2, 0


@njit(cache=True, nogil=True)
def one_vertex_batch(n_runs, seed, os_cdf, ts_cdf, ts_k1, ts_s, logz_tab):
    """Left one-vertex peeling: terminal times and swallowed-edge counts.

    Only the size of the new-edge block adjacent to v matters: coverage
    past that block eats original boundary.  Returns (I, EvR, EvL) arrays.
    """
    out_i = np.empty(n_runs, dtype=np.int64)
    out_r = np.empty(n_runs, dtype=np.int64)
    out_l = np.empty(n_runs, dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    for i in range(n_runs):
        block = 0       # new edges immediately left of v
        ev_l = 0
        steps = 0
        while True:
            typ, k1, k2, pos = _hp_draw(state, os_cdf, ts_cdf, ts_k1, ts_s,
                                        logz_tab)
            left, right = _coverage_sides(typ, k1, k2, pos)
            co, ex = _outcome_co_ex(typ, k1, k2)
            steps += 1
            # covered: the peeled edge plus `left` edges beyond it, all on
            # the left frontier [originals | block]
            eaten = 1 + left
            from_block = min(eaten, block)
            ev_l += eaten - from_block
            block = block - from_block + ex
            if right >= 1:
                out_i[i] = steps
                out_r[i] = right       # all original: the right ray is untouched
                out_l[i] = ev_l
                break
    return out_i, out_r, out_l


@njit(cache=True, nogil=True)
def linear_peel_batch(n_runs, budget, n_grid, seed,
                      os_cdf, ts_cdf, ts_k1, ts_s, logz_tab):
    """Linear peeling: truncated sums X_L(n) of right-ray swallow counts.

    State collapses to the size M of the block of frontier edges between
    the cursor vertex (rightmost original-left vertex on the frontier) and
    the surviving right ray; M starts at 1 (the root edge lambda(0)).
    """
    out = np.zeros((n_runs, n_grid.shape[0]), dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    for i in range(n_runs):
        m_block = 1
        for _ in range(budget):
            typ, k1, k2, pos = _hp_draw(state, os_cdf, ts_cdf, ts_k1, ts_s,
                                        logz_tab)
            left, right = _coverage_sides(typ, k1, k2, pos)
            co, ex = _outcome_co_ex(typ, k1, k2)
            from_block = min(right, m_block - 1)
            gained = right - from_block
            m_block = m_block - 1 - from_block + ex
            if gained > 0:
                for g in range(n_grid.shape[0]):
                    n = n_grid[g]
                    out[i, g] += gained if gained < n else n
        # left coverage only moves the cursor; it never touches the right ray
    return out


# ---------------------------------------------------------------------------
# glued frontier engine
# ---------------------------------------------------------------------------
#
# Cell arrays (per live workspace, index = cell id):
#   c_lv, c_rv   endpoint vertex ids (left, right along the frontier)
#   c_prev/c_nxt chain links per side (-1 at lazy ends)
#   c_part       identified partner cell on the other frontier (-1 none)
#   c_flag       bit0 alive, bit1 cluster, bit2 original, bit3 side(+),
#                bit4 counted toward Yhat
# Vertex arrays:
#   v_gen        anchor generation stamp (layer index + 1, 0 = never)
#   v_dead       anchor already decremented from the alive counter
#   v_idx        position in the anchor list for the current generation
#   v_cfe        incident cluster frontier cell count
#   v_inc        (4,) incident frontier cells: slots side*2 + (0 right of
#                v / 1 left of v)
#
# The layer anchor set is the canonical scan of the cluster frontier:
# side - section left to right, then side +, first-seen vertex order.

F_ALIVE = 1
F_CLUST = 2
F_ORIG = 4
F_SIDE = 8
F_YCNT = 16

ST_OK = 0
ST_CELLS = 1
ST_VERTS = 2
ST_STEPS = 3
ST_EDGES = 4
ST_POOL = 5
ST_STACK = 6


@njit(inline="always", cache=True)
def _slot_set(v_inc, v, side, d, c):
    v_inc[v, 2 * side + d] = c


@njit(inline="always", cache=True)
def _anchor_gain(v, v_gen, v_dead, v_idx, gen, alive, ptr):
    # cluster-edge incidence appeared at v
    if v_gen[v] == gen and v_dead[v] == 1:
        v_dead[v] = 0
        alive += 1
        if v_idx[v] < ptr:
            ptr = v_idx[v]
    return alive, ptr


@njit(inline="always", cache=True)
def _anchor_drop(v, v_gen, v_dead, v_cfe, gen, alive):
    if v_cfe[v] == 0 and v_gen[v] == gen and v_dead[v] == 0:
        v_dead[v] = 1
        alive -= 1
    return alive


class GluedWorkspace:
    """Preallocated arrays for one engine run; reused across replicates."""

    def __init__(self, cell_cap: int, vert_cap: int):
        self.cell_cap = cell_cap
        self.vert_cap = vert_cap
        ii = np.int64
        self.c_lv = np.zeros(cell_cap, dtype=ii)
        self.c_rv = np.zeros(cell_cap, dtype=ii)
        self.c_prev = np.zeros(cell_cap, dtype=ii)
        self.c_nxt = np.zeros(cell_cap, dtype=ii)
        self.c_part = np.zeros(cell_cap, dtype=ii)
        self.c_flag = np.zeros(cell_cap, dtype=np.uint8)
        self.c_coord = np.zeros(cell_cap, dtype=ii)
        self.v_gen = np.zeros(vert_cap, dtype=ii)
        self.v_dead = np.zeros(vert_cap, dtype=np.uint8)
        self.v_idx = np.zeros(vert_cap, dtype=ii)
        self.v_cfe = np.zeros(vert_cap, dtype=ii)
        self.v_inc = np.zeros((vert_cap, 4), dtype=ii)
        self.anchors = np.zeros(vert_cap, dtype=ii)

    def arrays(self):
        return (self.c_lv, self.c_rv, self.c_prev, self.c_nxt, self.c_part,
                self.c_flag, self.c_coord, self.v_gen, self.v_dead,
                self.v_idx, self.v_cfe, self.v_inc, self.anchors)


@njit(cache=True, nogil=True)
def _disk_draw(state, p, logz_tab):
    """One disk peeling outcome at perimeter p, lazily enumerated.

    Returns (kind, a1, a2): kind 0 = edge-map atom, 1 = single component,
    2 = arc pair (a1, m - a1), 3 = arc triple (a1, a2, m - a1 - a2).
    """
    u = _next_u(state)
    m = p - 1
    lzp = _logz(p, logz_tab)
    acc = 0.0
    if p == 2:
        acc += 0.75
        if u < acc:
            return 0, 0, 0
    acc += math.exp(-2.0 * LOG12 + _logz(p + 2, logz_tab) - lzp)
    if u < acc:
        return 1, m, 0
    last_kind, last_a1, last_a2 = 1, m, 0
    for t in range(1, m + 2):
        a = t - 1
        if a <= (m - 1) // 2:
            b = m - a
            ah = a + 1 if a % 2 == 1 else a + 2
            bh = b + 1 if b % 2 == 1 else b + 2
            w = math.exp(-LOG12 + _logz(ah, logz_tab) + _logz(bh, logz_tab) - lzp)
            acc += w
            if u < acc:
                return 2, a, b
            acc += w
            if u < acc:
                return 2, b, a
            last_kind, last_a1, last_a2 = 2, b, a
        ms = 2 * t
        big = m - ms
        if big >= 1:
            lzbig = _logz(big + 1, logz_tab)
            for x in range(1, ms, 2):
                y = ms - x
                if big < x or big < y:
                    continue
                w = math.exp(_logz(x + 1, logz_tab) + _logz(y + 1, logz_tab)
                             + lzbig - lzp)
                acc += w
                if u < acc:
                    return 3, big, x
                if big > x:
                    acc += w
                    if u < acc:
                        return 3, x, big
                    if big > y:
                        acc += w
                        if u < acc:
                            return 3, x, y
                last_kind, last_a1, last_a2 = 3, x, y
    return last_kind, last_a1, last_a2


@njit(cache=True, nogil=True)
def _fill_disks(state, stack, n_stack, slot_v, slot_nxt, n_slots,
                v_join, n_verts, e_u, e_v, e_tag, e_layer, e_coord, n_edges,
                logz_tab, max_quads):
    """Fill every hole on the stack with free Boltzmann interiors.

    stack rows: (start slot, perimeter, layer tag).  Returns a packed
    (status, n_stack, n_slots, n_verts, n_edges, quads) signature through
    an int64 array to keep the signature small.
    """
    out = np.zeros(6, dtype=np.int64)
    quads = 0
    scap = stack.shape[0]
    slcap = slot_v.shape[0]
    vcap = v_join.shape[0]
    ecap = e_u.shape[0]
    while n_stack > 0:
        n_stack -= 1
        s0 = stack[n_stack, 0]
        p = stack[n_stack, 1]
        layer = stack[n_stack, 2]
        kind, a1, a2 = _disk_draw(state, p, logz_tab)
        if kind == 0:
            continue
        quads += 1
        if quads > max_quads:
            out[0] = ST_STEPS
            return out
        if n_slots + 8 > slcap or n_stack + 4 > scap or n_verts + 2 > vcap \
                or n_edges + 3 > ecap:
            out[0] = ST_POOL
            return out
        v0 = slot_v[s0]
        s1 = slot_nxt[s0]
        v1 = slot_v[s1]
        if kind == 1:
            u = n_verts
            w = n_verts + 1
            n_verts += 2
            v_join[u] = layer
            v_join[w] = layer
            e_u[n_edges] = v1
            e_v[n_edges] = u
            e_tag[n_edges] = 0
            e_layer[n_edges] = layer
            e_coord[n_edges] = -(1 << 60)
            e_u[n_edges + 1] = u
            e_v[n_edges + 1] = w
            e_tag[n_edges + 1] = 0
            e_layer[n_edges + 1] = layer
            e_coord[n_edges + 1] = -(1 << 60)
            e_u[n_edges + 2] = w
            e_v[n_edges + 2] = v0
            e_tag[n_edges + 2] = 0
            e_layer[n_edges + 2] = layer
            e_coord[n_edges + 2] = -(1 << 60)
            n_edges += 3
            sw = n_slots
            su = n_slots + 1
            n_slots += 2
            slot_v[sw] = w
            slot_v[su] = u
            slot_nxt[s0] = sw
            slot_nxt[sw] = su
            slot_nxt[su] = s1
            stack[n_stack, 0] = s0
            stack[n_stack, 1] = p + 2
            stack[n_stack, 2] = layer
            n_stack += 1
        elif kind == 2:
            # walk the covered arc: slots s1 .. s_{a1}, end vertex w
            send = s1
            for _ in range(a1):
                send = slot_nxt[send]
            wv = slot_v[send]
            if a1 % 2 == 1:
                # pocket = arc + closure (w, v1); fresh u on the remainder
                u = n_verts
                n_verts += 1
                v_join[u] = layer
                e_u[n_edges] = wv
                e_v[n_edges] = v1
                e_tag[n_edges] = 0
                e_layer[n_edges] = layer
                e_coord[n_edges] = -(1 << 60)
                e_u[n_edges + 1] = wv
                e_v[n_edges + 1] = u
                e_tag[n_edges + 1] = 0
                e_layer[n_edges + 1] = layer
                e_coord[n_edges + 1] = -(1 << 60)
                e_u[n_edges + 2] = u
                e_v[n_edges + 2] = v0
                e_tag[n_edges + 2] = 0
                e_layer[n_edges + 2] = layer
                e_coord[n_edges + 2] = -(1 << 60)
                n_edges += 3
                if a1 > 0:
                    spkt = n_slots
                    n_slots += 1
                    slot_v[spkt] = wv
                    tail = slot_nxt[send]  # not used; pocket closes on copies
                    # pocket cycle: s1 .. s_{a1-1} then copy of w
                    sprev = s1
                    for _ in range(a1 - 1):
                        sprev = slot_nxt[sprev]
                    slot_nxt[sprev] = spkt
                    slot_nxt[spkt] = s1
                    stack[n_stack, 0] = s1
                    stack[n_stack, 1] = a1 + 1
                    stack[n_stack, 2] = layer
                    n_stack += 1
                su = n_slots
                n_slots += 1
                slot_v[su] = u
                slot_nxt[s0] = su
                slot_nxt[su] = send
                rem = a2 + 2
            else:
                # pocket = arc + two closures through fresh apex u
                u = n_verts
                n_verts += 1
                v_join[u] = layer
                e_u[n_edges] = wv
                e_v[n_edges] = u
                e_tag[n_edges] = 0
                e_layer[n_edges] = layer
                e_coord[n_edges] = -(1 << 60)
                e_u[n_edges + 1] = u
                e_v[n_edges + 1] = v1
                e_tag[n_edges + 1] = 0
                e_layer[n_edges + 1] = layer
                e_coord[n_edges + 1] = -(1 << 60)
                e_u[n_edges + 2] = wv
                e_v[n_edges + 2] = v0
                e_tag[n_edges + 2] = 0
                e_layer[n_edges + 2] = layer
                e_coord[n_edges + 2] = -(1 << 60)
                n_edges += 3
                swc = n_slots
                suc = n_slots + 1
                n_slots += 2
                slot_v[swc] = wv
                slot_v[suc] = u
                if a1 > 0:
                    sprev = s1
                    for _ in range(a1 - 1):
                        sprev = slot_nxt[sprev]
                    slot_nxt[sprev] = swc
                    slot_nxt[swc] = suc
                    slot_nxt[suc] = s1
                    stack[n_stack, 0] = s1
                else:
                    # 2-gon pocket at v1: cycle (v1, u)
                    slot_v[swc] = v1
                    slot_nxt[swc] = suc
                    slot_nxt[suc] = swc
                    stack[n_stack, 0] = swc
                stack[n_stack, 1] = a1 + 2
                stack[n_stack, 2] = layer
                n_stack += 1
                slot_nxt[s0] = send
                rem = a2 + 1
            stack[n_stack, 0] = s0
            stack[n_stack, 1] = rem
            stack[n_stack, 2] = layer
            n_stack += 1
        else:
            # triple (a1, a2, a3): two pockets then the remainder
            sx = s1
            for _ in range(a1):
                sx = slot_nxt[sx]
            xv = slot_v[sx]
            sy = sx
            for _ in range(a2):
                sy = slot_nxt[sy]
            yv = slot_v[sy]
            e_u[n_edges] = xv
            e_v[n_edges] = v1
            e_tag[n_edges] = 0
            e_layer[n_edges] = layer
            e_coord[n_edges] = -(1 << 60)
            e_u[n_edges + 1] = yv
            e_v[n_edges + 1] = xv
            e_tag[n_edges + 1] = 0
            e_layer[n_edges + 1] = layer
            e_coord[n_edges + 1] = -(1 << 60)
            e_u[n_edges + 2] = yv
            e_v[n_edges + 2] = v0
            e_tag[n_edges + 2] = 0
            e_layer[n_edges + 2] = layer
            e_coord[n_edges + 2] = -(1 << 60)
            n_edges += 3
            # pocket 1: slots s1..s_{a1-1} + copy of x
            sxc = n_slots
            n_slots += 1
            slot_v[sxc] = xv
            sprev = s1
            for _ in range(a1 - 1):
                sprev = slot_nxt[sprev]
            slot_nxt[sprev] = sxc
            slot_nxt[sxc] = s1
            stack[n_stack, 0] = s1
            stack[n_stack, 1] = a1 + 1
            stack[n_stack, 2] = layer
            n_stack += 1
            # pocket 2: slots sx..(a2-1 onward) + copy of y
            syc = n_slots
            n_slots += 1
            slot_v[syc] = yv
            sprev = sx
            for _ in range(a2 - 1):
                sprev = slot_nxt[sprev]
            slot_nxt[sprev] = syc
            slot_nxt[syc] = sx
            stack[n_stack, 0] = sx
            stack[n_stack, 1] = a2 + 1
            stack[n_stack, 2] = layer
            n_stack += 1
            # remainder
            slot_nxt[s0] = sy
            stack[n_stack, 0] = s0
            stack[n_stack, 1] = (m_of(p) - a1 - a2) + 1
            stack[n_stack, 2] = layer
            n_stack += 1
    out[0] = ST_OK
    out[1] = n_stack
    out[2] = n_slots
    out[3] = n_verts
    out[4] = n_edges
    out[5] = quads
    return out


@njit(inline="always", cache=True)
def m_of(p):
    return p - 1



@njit(cache=True, nogil=True)
def bfs_csr(indptr, indices, sources, n):
    """Multi-source unweighted BFS; -1 marks unreachable vertices."""
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        d = dist[v] + 1
        for i in range(indptr[v], indptr[v + 1]):
            w = indices[i]
            if dist[w] < 0:
                dist[w] = d
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True, nogil=True)
def min_parents(indptr, indices, dist):
    """Deterministic BFS tree: parent of v is its lowest-id neighbour one
    step closer to the sources."""
    n = dist.shape[0]
    parent = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        if dist[v] <= 0:
            continue
        best = -1
        for i in range(indptr[v], indptr[v + 1]):
            w = indices[i]
            if dist[w] == dist[v] - 1 and (best < 0 or w < best):
                best = w
        parent[v] = best
    return parent
