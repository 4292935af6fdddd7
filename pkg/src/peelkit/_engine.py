"""The glued-peeling frontier engine, decomposed into small numba pieces.

All mutable scalars live in one int64 register array S so that helpers can
update them in place; the slot layout is given by the R_* constants.  Cell
and vertex records live in flat arrays handed around as a group:

    cells:  c_lv, c_rv, c_prev, c_nxt, c_part, c_coord, c_flag
    verts:  v_gen, v_dead, v_idx, v_cfe, v_inc(4), v_join
    layers: anchors plus the freelists (stats mode recycles ids; emission
            mode keeps them because ids are emitted)

The process itself is documented in `peelkit.gluedpeel`; this module is
its array-based twin.
"""

import numpy as np
from numba import njit

from peelkit._kernels import (
    F_ALIVE, F_CLUST, F_ORIG, F_SIDE, F_YCNT,
    ST_OK, ST_CELLS, ST_VERTS, ST_STEPS, ST_EDGES, ST_STACK,
    _hp_draw, _outcome_co_ex, _coverage_sides,
)

# register slots
R_NCELL, R_NVERT, R_NEDGE, R_NBUB, R_NSLOT, R_NBV, R_SNAPK = range(7)
R_IVLAST, R_XR, R_XL0, R_XL1 = 7, 8, 9, 10
R_FREEC, R_FREEV, R_PENDV = 11, 12, 13
R_CF, R_MAXCF, R_YHAT = 14, 15, 16
R_X0, R_X1, R_Y0, R_Y1 = 17, 18, 19, 20
R_GEN, R_NANCH, R_ALIVE, R_PTR = 21, 22, 23, 24
R_J, R_R = 25, 26
R_ENDR0, R_ENDR1, R_LEFT0, R_LEFT1, R_LVLAST0, R_LVLAST1 = 27, 28, 29, 30, 31, 32
R_REP0, R_REP1 = 33, 34
R_NSIDES, R_EMIT, R_RECYCLE, R_AEDGES = 35, 36, 37, 38
NREG = 40

NCORE = 7  # per-layer stats: J, Yhat, X, Y, Z, cf, max_cf


@njit(cache=True, nogil=True)
def _alloc_cell(S, free_c):
    if S[R_RECYCLE] != 0 and S[R_FREEC] > 0:
        S[R_FREEC] -= 1
        return free_c[S[R_FREEC]]
    c = S[R_NCELL]
    S[R_NCELL] += 1
    return c


@njit(cache=True, nogil=True)
def _alloc_vert(S, free_v, v_gen, v_dead, v_cfe, v_join, layer):
    if S[R_RECYCLE] != 0 and S[R_FREEV] > 0:
        S[R_FREEV] -= 1
        w = free_v[S[R_FREEV]]
        v_gen[w] = 0
        v_dead[w] = 0
        v_cfe[w] = 0
    else:
        w = S[R_NVERT]
        S[R_NVERT] += 1
    if S[R_EMIT] != 0:
        v_join[w] = layer
    return w


@njit(cache=True, nogil=True)
def _anchor_gain(S, v, v_gen, v_dead, v_idx):
    if v_gen[v] == S[R_GEN] and v_dead[v] == 1:
        v_dead[v] = 0
        S[R_ALIVE] += 1
        if v_idx[v] < S[R_PTR]:
            S[R_PTR] = v_idx[v]


@njit(cache=True, nogil=True)
def _anchor_drop(S, v, v_gen, v_dead, v_cfe):
    if v_cfe[v] == 0 and v_gen[v] == S[R_GEN] and v_dead[v] == 0:
        v_dead[v] = 1
        S[R_ALIVE] -= 1


@njit(cache=True, nogil=True)
def _extend_right(S, c_lv, c_rv, c_prev, c_nxt, c_part, c_coord, c_flag,
                  v_inc, free_c, free_v, v_gen, v_dead, v_cfe, v_join,
                  bv_coord, bv_id, bv_side):
    """Materialize the next identified boundary edge at the right end."""
    w = _alloc_vert(S, free_v, v_gen, v_dead, v_cfe, v_join, -1)
    if S[R_EMIT] != 0:
        bv_coord[S[R_NBV]] = S[R_XR]
        bv_id[S[R_NBV]] = w
        bv_side[S[R_NBV]] = 2 if S[R_NSIDES] == 2 else 0
        S[R_NBV] += 1
    cpp = -1
    for sd in range(S[R_NSIDES]):
        cm = _alloc_cell(S, free_c)
        c_lv[cm] = S[R_IVLAST]
        c_rv[cm] = w
        c_coord[cm] = S[R_XR]
        c_part[cm] = cpp
        if cpp >= 0:
            c_part[cpp] = cm
        c_flag[cm] = F_ALIVE | F_ORIG | (F_SIDE if sd == 1 else 0)
        endr = S[R_ENDR0 + sd]
        c_prev[cm] = endr
        c_nxt[cm] = -1
        c_nxt[endr] = cm
        S[R_ENDR0 + sd] = cm
        v_inc[S[R_IVLAST], 2 * sd + 0] = cm
        v_inc[w, 2 * sd + 1] = cm
        cpp = cm
    S[R_IVLAST] = w
    S[R_XR] += 1


@njit(cache=True, nogil=True)
def _extend_left(S, side, c_lv, c_rv, c_prev, c_nxt, c_part, c_coord, c_flag,
                 v_inc, free_c, free_v, v_gen, v_dead, v_cfe, v_join,
                 bv_coord, bv_id, bv_side):
    w = _alloc_vert(S, free_v, v_gen, v_dead, v_cfe, v_join, -1)
    if S[R_EMIT] != 0:
        bv_coord[S[R_NBV]] = S[R_XL0 + side] - 1
        bv_id[S[R_NBV]] = w
        bv_side[S[R_NBV]] = side
        S[R_NBV] += 1
    cm = _alloc_cell(S, free_c)
    lvl = S[R_LVLAST0 + side]
    c_lv[cm] = w
    c_rv[cm] = lvl
    c_coord[cm] = S[R_XL0 + side]
    c_part[cm] = -1
    c_flag[cm] = F_ALIVE | F_ORIG | (F_SIDE if side == 1 else 0)
    c_prev[cm] = -1
    lc = S[R_LEFT0 + side]
    c_nxt[cm] = lc
    c_prev[lc] = cm
    S[R_LEFT0 + side] = cm
    v_inc[w, 2 * side + 0] = cm
    v_inc[lvl, 2 * side + 1] = cm
    S[R_LVLAST0 + side] = w
    S[R_XL0 + side] -= 1


@njit(cache=True, nogil=True)
def _cover_arc(S, gl, gr, side, c_lv, c_rv, c_nxt, c_part, c_coord, c_flag,
               v_gen, v_dead, v_idx, v_cfe, v_inc, v_join, free_c, pend_v,
               e_u, e_v, e_tag, e_layer, e_coord):
    """Pass A: absorb the covered cells; returns the Yhat jump."""
    yhat_delta = 0
    lay = S[R_R] + 1
    c = gl
    while True:
        fl = c_flag[c]
        c_flag[c] = fl & ~F_ALIVE
        lv = c_lv[c]
        rv = c_rv[c]
        if v_inc[lv, 2 * side + 0] == c:
            v_inc[lv, 2 * side + 0] = -1
        if v_inc[rv, 2 * side + 1] == c:
            v_inc[rv, 2 * side + 1] = -1
        p = c_part[c]
        p_ok = p >= 0 and (c_flag[p] & F_ALIVE) != 0
        if (fl & F_CLUST) != 0:
            v_cfe[lv] -= 1
            _anchor_drop(S, lv, v_gen, v_dead, v_cfe)
            v_cfe[rv] -= 1
            _anchor_drop(S, rv, v_gen, v_dead, v_cfe)
            if not (p_ok and (c_flag[p] & F_CLUST) != 0):
                S[R_CF] -= 1
        if (fl & F_ORIG) != 0:
            S[R_Y0 + side] += 1
            if (fl & F_YCNT) == 0:
                yhat_delta += 1
                c_flag[c] |= F_YCNT
                if p >= 0:
                    c_flag[p] |= F_YCNT
                if S[R_EMIT] != 0:
                    ne = S[R_NEDGE]
                    e_u[ne] = lv
                    e_v[ne] = rv
                    e_tag[ne] = 1 | (2 if p >= 0 else 0) | (4 if side == 1 else 0)
                    e_layer[ne] = lay
                    e_coord[ne] = c_coord[c]
                    S[R_NEDGE] += 1
            if p_ok:
                if (c_flag[p] & F_CLUST) == 0:
                    c_flag[p] |= F_CLUST
                    S[R_CF] += 1
                    plv = c_lv[p]
                    prv = c_rv[p]
                    v_cfe[plv] += 1
                    _anchor_gain(S, plv, v_gen, v_dead, v_idx)
                    v_cfe[prv] += 1
                    _anchor_gain(S, prv, v_gen, v_dead, v_idx)
                    S[R_REP0 + (1 - side)] = p
                c_part[p] = -1
        else:
            S[R_X0 + side] -= 1
        if S[R_EMIT] != 0:
            if v_join[lv] < 0:
                v_join[lv] = lay
            if v_join[rv] < 0:
                v_join[rv] = lay
        if S[R_RECYCLE] != 0:
            free_c[S[R_FREEC]] = c
            S[R_FREEC] += 1
        if c == gr:
            break
        c = c_nxt[c]
    return yhat_delta


@njit(cache=True, nogil=True)
def _park_dead_vertices(S, gl, gr, c_lv, c_rv, c_nxt, v_gen, v_inc, pend_v):
    c = gl
    while True:
        for t in range(2):
            vv = c_lv[c] if t == 0 else c_rv[c]
            if v_gen[vv] >= 0 and v_inc[vv, 0] < 0 and v_inc[vv, 1] < 0 \
                    and v_inc[vv, 2] < 0 and v_inc[vv, 3] < 0:
                pend_v[S[R_PENDV]] = vv
                S[R_PENDV] += 1
                v_gen[vv] = -1
        if c == gr:
            break
        c = c_nxt[c]


@njit(cache=True, nogil=True)
def _new_chain(S, typ, k1, pos, side, a_v, b_v, zl_v, wr_v, before, after,
               c_lv, c_rv, c_prev, c_nxt, c_part, c_coord, c_flag,
               v_gen, v_dead, v_idx, v_cfe, v_inc, v_join,
               free_c, free_v):
    """Create the replacement frontier cells; returns (first, uv, nv2)."""
    lay = S[R_R] + 1
    sflag = F_ALIVE | F_CLUST | (F_SIDE if side == 1 else 0)
    uv = -1
    nv2 = -1
    n_new = 0
    e0 = e1 = e2 = -1
    if typ == 0:
        wv = _alloc_vert(S, free_v, v_gen, v_dead, v_cfe, v_join, lay)
        uu = _alloc_vert(S, free_v, v_gen, v_dead, v_cfe, v_join, lay)
        uv = wv
        nv2 = uu
        e0 = _alloc_cell(S, free_c)
        e1 = _alloc_cell(S, free_c)
        e2 = _alloc_cell(S, free_c)
        c_lv[e0] = a_v
        c_rv[e0] = wv
        c_lv[e1] = wv
        c_rv[e1] = uu
        c_lv[e2] = uu
        c_rv[e2] = b_v
        n_new = 3
    elif typ == 1:
        uv = _alloc_vert(S, free_v, v_gen, v_dead, v_cfe, v_join, lay)
        if k1 == 0:
            e0 = _alloc_cell(S, free_c)
            c_lv[e0] = a_v
            c_rv[e0] = b_v
            n_new = 1
        elif k1 % 2 == 1:
            e0 = _alloc_cell(S, free_c)
            e1 = _alloc_cell(S, free_c)
            if pos == 0:
                c_lv[e0] = a_v
                c_rv[e0] = uv
                c_lv[e1] = uv
                c_rv[e1] = wr_v
            else:
                c_lv[e0] = zl_v
                c_rv[e0] = uv
                c_lv[e1] = uv
                c_rv[e1] = b_v
            n_new = 2
        else:
            e0 = _alloc_cell(S, free_c)
            if pos == 0:
                c_lv[e0] = a_v
                c_rv[e0] = wr_v
            else:
                c_lv[e0] = zl_v
                c_rv[e0] = b_v
            n_new = 1
    else:
        e0 = _alloc_cell(S, free_c)
        if pos == 0:
            c_lv[e0] = a_v
            c_rv[e0] = wr_v
        elif pos == 1:
            c_lv[e0] = zl_v
            c_rv[e0] = wr_v
        else:
            c_lv[e0] = zl_v
            c_rv[e0] = b_v
        n_new = 1

    prevc = before
    for t in range(n_new):
        cc = e0 if t == 0 else (e1 if t == 1 else e2)
        c_flag[cc] = sflag
        c_part[cc] = -1
        c_coord[cc] = -(1 << 60)
        lv = c_lv[cc]
        rv = c_rv[cc]
        v_inc[lv, 2 * side + 0] = cc
        v_inc[rv, 2 * side + 1] = cc
        v_cfe[lv] += 1
        _anchor_gain(S, lv, v_gen, v_dead, v_idx)
        v_cfe[rv] += 1
        _anchor_gain(S, rv, v_gen, v_dead, v_idx)
        if S[R_EMIT] != 0:
            if v_join[lv] < 0:
                v_join[lv] = lay
            if v_join[rv] < 0:
                v_join[rv] = lay
        c_prev[cc] = prevc
        c_nxt[prevc] = cc
        prevc = cc
    c_nxt[prevc] = after
    c_prev[after] = prevc
    S[R_REP0 + side] = e0
    return e0, uv, nv2


@njit(cache=True, nogil=True)
def _emit_pocket(S, start_cell, n_arc, extra1, extra2,
                 c_lv, c_nxt, slot_v, slot_nxt, bub_stack, tagbits):
    """Write one pocket cycle: n_arc covered-cell left-vertices from
    start_cell, then up to two extra vertices; push it on the stack."""
    s0 = S[R_NSLOT]
    c = start_cell
    for _ in range(n_arc):
        slot_v[S[R_NSLOT]] = c_lv[c]
        slot_nxt[S[R_NSLOT]] = S[R_NSLOT] + 1
        S[R_NSLOT] += 1
        c = c_nxt[c]
    per = n_arc
    if extra1 >= 0:
        slot_v[S[R_NSLOT]] = extra1
        slot_nxt[S[R_NSLOT]] = S[R_NSLOT] + 1
        S[R_NSLOT] += 1
        per += 1
    if extra2 >= 0:
        slot_v[S[R_NSLOT]] = extra2
        slot_nxt[S[R_NSLOT]] = S[R_NSLOT] + 1
        S[R_NSLOT] += 1
        per += 1
    slot_nxt[S[R_NSLOT] - 1] = s0
    bub_stack[S[R_NBUB], 0] = s0
    bub_stack[S[R_NBUB], 1] = per
    bub_stack[S[R_NBUB], 2] = S[R_R] + 1
    bub_stack[S[R_NBUB], 3] = tagbits
    S[R_NBUB] += 1


@njit(cache=True, nogil=True)
def _emit_edge(S, u, v, tag, e_u, e_v, e_tag, e_layer, e_coord):
    ne = S[R_NEDGE]
    e_u[ne] = u
    e_v[ne] = v
    e_tag[ne] = tag
    e_layer[ne] = S[R_R] + 1
    e_coord[ne] = -(1 << 60)
    S[R_NEDGE] += 1


@njit(cache=True, nogil=True)
def _emit_step(S, typ, k1, k2, pos, side, csel, gl, a_v, b_v, zl_v, wr_v,
               uv, nv2, c_lv, c_nxt,
               e_u, e_v, e_tag, e_layer, e_coord,
               slot_v, slot_nxt, bub_stack, v_join):
    """Quad edges and pocket cycles for one peel (emission mode only)."""
    qt = 4 if side == 1 else 0
    if typ == 0:
        _emit_edge(S, a_v, uv, qt, e_u, e_v, e_tag, e_layer, e_coord)
        _emit_edge(S, uv, nv2, qt, e_u, e_v, e_tag, e_layer, e_coord)
        _emit_edge(S, nv2, b_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
        return
    if typ == 1:
        if v_join[uv] < 0:
            v_join[uv] = S[R_R] + 1
        if k1 == 0:
            at = b_v if pos == 0 else a_v
            _emit_edge(S, at, uv, qt, e_u, e_v, e_tag, e_layer, e_coord)
            _emit_edge(S, uv, at, qt, e_u, e_v, e_tag, e_layer, e_coord)
            _emit_edge(S, a_v, b_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
            slot_v[S[R_NSLOT]] = at
            slot_nxt[S[R_NSLOT]] = S[R_NSLOT] + 1
            slot_v[S[R_NSLOT] + 1] = uv
            slot_nxt[S[R_NSLOT] + 1] = S[R_NSLOT]
            bub_stack[S[R_NBUB], 0] = S[R_NSLOT]
            bub_stack[S[R_NBUB], 1] = 2
            bub_stack[S[R_NBUB], 2] = S[R_R] + 1
            bub_stack[S[R_NBUB], 3] = qt
            S[R_NSLOT] += 2
            S[R_NBUB] += 1
            return
        arc_start = c_nxt[csel] if pos == 0 else gl
        if k1 % 2 == 1:
            if pos == 0:
                _emit_edge(S, wr_v, b_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_edge(S, a_v, uv, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_edge(S, uv, wr_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_pocket(S, arc_start, k1, wr_v, -1,
                             c_lv, c_nxt, slot_v, slot_nxt, bub_stack, qt)
            else:
                _emit_edge(S, a_v, zl_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_edge(S, zl_v, uv, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_edge(S, uv, b_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_pocket(S, arc_start, k1, a_v, -1,
                             c_lv, c_nxt, slot_v, slot_nxt, bub_stack, qt)
        else:
            if pos == 0:
                _emit_edge(S, wr_v, uv, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_edge(S, uv, b_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_edge(S, a_v, wr_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_pocket(S, arc_start, k1, wr_v, uv,
                             c_lv, c_nxt, slot_v, slot_nxt, bub_stack, qt)
            else:
                _emit_edge(S, a_v, uv, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_edge(S, uv, zl_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_edge(S, zl_v, b_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
                _emit_pocket(S, arc_start, k1, a_v, uv,
                             c_lv, c_nxt, slot_v, slot_nxt, bub_stack, qt)
        return
    # two bounded components
    if pos == 0:
        c = c_nxt[csel]
        xstart = c
        for _ in range(k1):
            c = c_nxt[c]
        xm = c_lv[c]
        _emit_pocket(S, xstart, k1, xm, -1, c_lv, c_nxt, slot_v, slot_nxt,
                     bub_stack, qt)
        _emit_pocket(S, c, k2, wr_v, -1, c_lv, c_nxt, slot_v, slot_nxt,
                     bub_stack, qt)
        _emit_edge(S, xm, b_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
        _emit_edge(S, wr_v, xm, qt, e_u, e_v, e_tag, e_layer, e_coord)
        _emit_edge(S, a_v, wr_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
    elif pos == 1:
        _emit_pocket(S, c_nxt[csel], k1, wr_v, -1, c_lv, c_nxt,
                     slot_v, slot_nxt, bub_stack, qt)
        _emit_pocket(S, gl, k2, a_v, -1, c_lv, c_nxt,
                     slot_v, slot_nxt, bub_stack, qt)
        _emit_edge(S, wr_v, b_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
        _emit_edge(S, a_v, zl_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
        _emit_edge(S, zl_v, wr_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
    else:
        c = gl
        for _ in range(k1):
            c = c_nxt[c]
        y2 = c_lv[c]
        _emit_pocket(S, gl, k1, y2, -1, c_lv, c_nxt, slot_v, slot_nxt,
                     bub_stack, qt)
        _emit_pocket(S, c, k2, a_v, -1, c_lv, c_nxt, slot_v, slot_nxt,
                     bub_stack, qt)
        _emit_edge(S, y2, zl_v, qt, e_u, e_v, e_tag, e_layer, e_coord)
        _emit_edge(S, a_v, y2, qt, e_u, e_v, e_tag, e_layer, e_coord)
        _emit_edge(S, zl_v, b_v, qt, e_u, e_v, e_tag, e_layer, e_coord)


@njit(cache=True, nogil=True)
def _layer_scan(S, r_target, c_lv, c_rv, c_prev, c_nxt, c_flag,
                v_gen, v_dead, v_idx, anchors,
                snap_lv, snap_rv, snap_side, rebuild):
    """Canonical scan of the cluster frontier: optional anchor rebuild for
    the next layer plus, in emission mode, the frontier snapshot."""
    ok = F_ALIVE | F_CLUST
    for side in range(S[R_NSIDES]):
        c = S[R_REP0 + side]
        if c < 0:
            continue
        while c_prev[c] >= 0 and (c_flag[c_prev[c]] & ok) == ok:
            c = c_prev[c]
        while c >= 0 and (c_flag[c] & ok) == ok:
            if S[R_EMIT] != 0:
                snap_lv[S[R_SNAPK]] = c_lv[c]
                snap_rv[S[R_SNAPK]] = c_rv[c]
                snap_side[S[R_SNAPK]] = side
                S[R_SNAPK] += 1
            if rebuild:
                for t in range(2):
                    vv = c_lv[c] if t == 0 else c_rv[c]
                    if v_gen[vv] != S[R_GEN]:
                        v_gen[vv] = S[R_GEN]
                        v_dead[vv] = 0
                        v_idx[vv] = S[R_NANCH]
                        anchors[S[R_NANCH]] = vv
                        S[R_NANCH] += 1
                        S[R_ALIVE] += 1
            c = c_nxt[c]


@njit(cache=True, nogil=True)
def glued_engine(seed, r_target, a_edges, glued, n_grid,
                 cell_cap, vert_cap, step_cap,
                 out_core, out_yn, out_kn,
                 os_cdf, ts_cdf, ts_k1, ts_s, logz_tab,
                 emit,
                 e_u, e_v, e_tag, e_layer, e_coord,
                 v_join, bv_coord, bv_id, bv_side,
                 snap_off, snap_lv, snap_rv, snap_side,
                 bub_stack, slot_v, slot_nxt,
                 counts):
    """Layered glued (or single half-plane) peeling run; see gluedpeel."""
    c_lv = np.empty(cell_cap, dtype=np.int64)
    c_rv = np.empty(cell_cap, dtype=np.int64)
    c_prev = np.empty(cell_cap, dtype=np.int64)
    c_nxt = np.empty(cell_cap, dtype=np.int64)
    c_part = np.empty(cell_cap, dtype=np.int64)
    c_coord = np.empty(cell_cap, dtype=np.int64)
    c_flag = np.zeros(cell_cap, dtype=np.int64)
    v_gen = np.zeros(vert_cap, dtype=np.int64)
    v_dead = np.zeros(vert_cap, dtype=np.int64)
    v_idx = np.zeros(vert_cap, dtype=np.int64)
    v_cfe = np.zeros(vert_cap, dtype=np.int64)
    v_inc = np.full((vert_cap, 4), -1, dtype=np.int64)
    anchors = np.empty(vert_cap, dtype=np.int64)
    free_c = np.empty(cell_cap, dtype=np.int64)
    free_v = np.empty(vert_cap, dtype=np.int64)
    pend_v = np.empty(vert_cap, dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    yn_acc = np.zeros(n_grid.shape[0], dtype=np.int64)
    kn_acc = np.zeros(n_grid.shape[0], dtype=np.int64)

    S = np.zeros(NREG, dtype=np.int64)
    S[R_NSIDES] = 2 if glued != 0 else 1
    S[R_EMIT] = emit
    S[R_RECYCLE] = 1 if emit == 0 else 0
    S[R_AEDGES] = a_edges
    S[R_ENDR0] = -1
    S[R_ENDR1] = -1
    S[R_LEFT0] = -1
    S[R_LEFT1] = -1
    S[R_REP0] = -1
    S[R_REP1] = -1
    S[R_XL0] = -1
    S[R_XL1] = -1

    # seam vertex plus the initial interface arc
    seam = _alloc_vert(S, free_v, v_gen, v_dead, v_cfe, v_join, 0)
    if emit != 0:
        bv_coord[S[R_NBV]] = -1
        bv_id[S[R_NBV]] = seam
        bv_side[S[R_NBV]] = 2 if glued != 0 else 0
        S[R_NBV] += 1
    S[R_IVLAST] = seam
    S[R_LVLAST0] = seam
    S[R_LVLAST1] = seam
    for x in range(a_edges):
        w = _alloc_vert(S, free_v, v_gen, v_dead, v_cfe, v_join, 0)
        if emit != 0:
            bv_coord[S[R_NBV]] = x
            bv_id[S[R_NBV]] = w
            bv_side[S[R_NBV]] = 2 if glued != 0 else 0
            S[R_NBV] += 1
        cpp = -1
        for sd in range(S[R_NSIDES]):
            cm = _alloc_cell(S, free_c)
            c_lv[cm] = S[R_IVLAST]
            c_rv[cm] = w
            c_coord[cm] = x
            c_part[cm] = cpp
            if cpp >= 0:
                c_part[cpp] = cm
            c_flag[cm] = F_ALIVE | F_ORIG | F_CLUST | F_YCNT \
                | (F_SIDE if sd == 1 else 0)
            endr = S[R_ENDR0 + sd]
            c_prev[cm] = endr
            c_nxt[cm] = -1
            if endr >= 0:
                c_nxt[endr] = cm
            else:
                S[R_LEFT0 + sd] = cm
            S[R_ENDR0 + sd] = cm
            v_inc[S[R_IVLAST], 2 * sd + 0] = cm
            v_inc[w, 2 * sd + 1] = cm
            v_cfe[S[R_IVLAST]] += 1
            v_cfe[w] += 1
            S[R_REP0 + sd] = cm
            cpp = cm
        S[R_IVLAST] = w
        if emit != 0:
            _emit_edge(S, c_lv[S[R_ENDR0]], w,
                       1 | (2 if glued != 0 else 0),
                       e_u, e_v, e_tag, e_layer, e_coord)
            e_coord[S[R_NEDGE] - 1] = x
            e_layer[S[R_NEDGE] - 1] = 0
    S[R_XR] = a_edges
    S[R_YHAT] = a_edges
    S[R_CF] = a_edges
    S[R_MAXCF] = a_edges

    S[R_GEN] = 1
    if emit != 0:
        snap_off[0] = 0
    _layer_scan(S, r_target, c_lv, c_rv, c_prev, c_nxt, c_flag,
                v_gen, v_dead, v_idx, anchors, snap_lv, snap_rv, snap_side,
                True)
    if emit != 0:
        snap_off[1] = S[R_SNAPK]

    out_core[0, 0] = 0
    out_core[0, 1] = S[R_YHAT]
    out_core[0, 2] = 0
    out_core[0, 3] = 2 * a_edges
    out_core[0, 4] = -2 * a_edges
    out_core[0, 5] = S[R_CF]
    out_core[0, 6] = S[R_MAXCF]

    status = ST_OK
    while S[R_R] < r_target:
        S[R_J] += 1
        if S[R_J] > step_cap:
            status = ST_STEPS
            break
        while S[R_PTR] < S[R_NANCH] and v_cfe[anchors[S[R_PTR]]] == 0:
            S[R_PTR] += 1
        if S[R_PTR] >= S[R_NANCH]:
            status = ST_STACK
            break
        vsel = anchors[S[R_PTR]]
        csel = -1
        for slot in range(4):
            cc = v_inc[vsel, slot]
            if cc >= 0 and (c_flag[cc] & (F_ALIVE | F_CLUST)) == (F_ALIVE | F_CLUST):
                csel = cc
                break
        if csel < 0:
            status = ST_STACK
            break
        side = 1 if (c_flag[csel] & F_SIDE) != 0 else 0

        typ, k1, k2, pos = _hp_draw(state, os_cdf, ts_cdf, ts_k1, ts_s, logz_tab)
        left, right = _coverage_sides(typ, k1, k2, pos)
        co, ex = _outcome_co_ex(typ, k1, k2)

        need_c = 2 * (left + right + 2) + 8
        need_v = left + right + 8
        if S[R_NCELL] + need_c > cell_cap:
            status = ST_CELLS
            break
        if S[R_NVERT] + need_v > vert_cap:
            status = ST_VERTS
            break
        if emit != 0 and (S[R_NEDGE] + left + right + 8 > e_u.shape[0]
                          or S[R_NBV] + left + right + 8 > bv_coord.shape[0]
                          or S[R_NBUB] + 2 > bub_stack.shape[0]
                          or S[R_NSLOT] + left + right + 8 > slot_v.shape[0]
                          or S[R_SNAPK] + 2 * S[R_CF] + 8 > snap_lv.shape[0]):
            status = ST_EDGES
            break

        # materialize the arc plus one surviving edge on each flank
        g = csel
        for _ in range(right + 1):
            if c_nxt[g] < 0:
                _extend_right(S, c_lv, c_rv, c_prev, c_nxt, c_part, c_coord,
                              c_flag, v_inc, free_c, free_v, v_gen, v_dead,
                              v_cfe, v_join, bv_coord, bv_id, bv_side)
            g = c_nxt[g]
        g = csel
        for _ in range(left + 1):
            if c_prev[g] < 0:
                _extend_left(S, side, c_lv, c_rv, c_prev, c_nxt, c_part,
                             c_coord, c_flag, v_inc, free_c, free_v, v_gen,
                             v_dead, v_cfe, v_join, bv_coord, bv_id, bv_side)
            g = c_prev[g]
        gr = csel
        for _ in range(right):
            gr = c_nxt[gr]
        gl = csel
        for _ in range(left):
            gl = c_prev[gl]
        before = c_prev[gl]
        after = c_nxt[gr]
        a_v = c_lv[csel]
        b_v = c_rv[csel]
        zl_v = c_lv[gl]
        wr_v = c_rv[gr]

        yhat_delta = _cover_arc(S, gl, gr, side, c_lv, c_rv, c_nxt, c_part,
                                c_coord, c_flag, v_gen, v_dead, v_idx, v_cfe,
                                v_inc, v_join, free_c, pend_v,
                                e_u, e_v, e_tag, e_layer, e_coord)
        first_new, uv, nv2 = _new_chain(
            S, typ, k1, pos, side, a_v, b_v, zl_v, wr_v, before, after,
            c_lv, c_rv, c_prev, c_nxt, c_part, c_coord, c_flag,
            v_gen, v_dead, v_idx, v_cfe, v_inc, v_join, free_c, free_v)
        S[R_X0 + side] += ex
        S[R_CF] += ex
        if S[R_CF] > S[R_MAXCF]:
            S[R_MAXCF] = S[R_CF]
        if emit != 0:
            _emit_step(S, typ, k1, k2, pos, side, csel, gl, a_v, b_v, zl_v,
                       wr_v, uv, nv2, c_lv, c_nxt,
                       e_u, e_v, e_tag, e_layer, e_coord,
                       slot_v, slot_nxt, bub_stack, v_join)
        if S[R_RECYCLE] != 0:
            _park_dead_vertices(S, gl, gr, c_lv, c_rv, c_nxt, v_gen, v_inc,
                                pend_v)
        S[R_YHAT] += yhat_delta
        for gg in range(n_grid.shape[0]):
            n = n_grid[gg]
            yn_acc[gg] += yhat_delta if yhat_delta < n else n
            if yhat_delta >= n:
                kn_acc[gg] += 1

        if S[R_ALIVE] == 0:
            r = S[R_R] + 1
            S[R_R] = r
            out_core[r, 0] = S[R_J]
            out_core[r, 1] = S[R_YHAT]
            out_core[r, 2] = S[R_X0] + S[R_X1]
            out_core[r, 3] = S[R_Y0] + S[R_Y1] + 2 * a_edges
            out_core[r, 4] = out_core[r, 2] - out_core[r, 3]
            out_core[r, 5] = S[R_CF]
            out_core[r, 6] = S[R_MAXCF]
            for gg in range(n_grid.shape[0]):
                out_yn[r, gg] = yn_acc[gg]
                out_kn[r, gg] = kn_acc[gg]
            S[R_GEN] += 1
            S[R_NANCH] = 0
            S[R_ALIVE] = 0
            S[R_PTR] = 0
            if S[R_RECYCLE] != 0:
                for t in range(S[R_PENDV]):
                    free_v[S[R_FREEV]] = pend_v[t]
                    S[R_FREEV] += 1
                S[R_PENDV] = 0
            _layer_scan(S, r_target, c_lv, c_rv, c_prev, c_nxt, c_flag,
                        v_gen, v_dead, v_idx, anchors,
                        snap_lv, snap_rv, snap_side, r < r_target)
            if emit != 0:
                snap_off[r + 1] = S[R_SNAPK]

    counts[0] = S[R_NVERT]
    counts[1] = S[R_NEDGE]
    counts[2] = S[R_NBUB]
    counts[3] = S[R_NSLOT]
    counts[4] = S[R_NBV]
    counts[5] = S[R_J]
    return status
