"""Exact peeling laws for the half-plane and for free Boltzmann disks.

A peeling step at a boundary edge reveals the incident quadrilateral and
splits the map into at most three complementary components.  The peeling
indicator lists the component boundary-edge counts in counterclockwise
order starting from the peeled edge, with exactly one slot marked
REMAINDER (the infinite component in the half-plane, the component the
process keeps exploring in a disk).

Counterclockwise order is realized here as: the first listed component
sits immediately to the right of the peeled edge (increasing boundary
coordinate), later entries follow the cyclic sweep.

The half-plane law is the four closed forms

    P[inf]            = 3/8
    P[(k, inf)]       = 1/12 * 54^((1-k)/2) * z(k+1)   k odd
    P[(k, inf)]       = 1/12 * 54^(-k/2)   * z(k+2)   k even (incl. 0)
    P[(k1, k2, inf)]  = 54^(-(k1+k2)/2) * z(k1+1) * z(k2+1)   k1, k2 odd

with identical values for the mirrored / permuted remainder placements.
All four are reproduced by one pattern rule

    weight = 12^(-v_fresh) * R * prod_i z(component perimeter_i)

where v_fresh = 2 - (#finite components) counts the revealed quad's
corners not on the old boundary, R = 54^((Ex-Co)/2) in the half-plane and
R = z(2l + Ex - Co) / z(2l) for a disk of perimeter 2l.  A component
covering k old edges has perimeter k+1 (k odd, one quad side) or k+2
(k even, two quad sides around a fresh apex).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

import numpy as np

from peelkit.boltzmann import PartitionTable, log_fb_partition


class _Remainder:
    __slots__ = ()

    def __repr__(self):
        return "REM"


REMAINDER = _Remainder()

Entry = Union[int, _Remainder]


@dataclass(frozen=True)
class PeelIndicator:
    """Component boundary-edge counts, ccw from the peeled edge."""

    entries: tuple

    def __post_init__(self):
        ent = self.entries
        if not 1 <= len(ent) <= 3:
            raise ValueError(f"indicator must have 1-3 slots, got {len(ent)}")
        rems = [i for i, e in enumerate(ent) if isinstance(e, _Remainder)]
        if len(rems) != 1:
            raise ValueError("indicator needs exactly one REMAINDER slot")
        fin = self.finite_entries
        if any((not isinstance(k, int)) or k < 0 for k in fin):
            raise ValueError(f"finite entries must be integers >= 0: {ent}")
        if len(fin) == 2 and not all(k % 2 == 1 for k in fin):
            raise ValueError("two-sided indicators need both entries odd >= 1")

    @property
    def finite_entries(self) -> tuple:
        return tuple(e for e in self.entries if not isinstance(e, _Remainder))

    @property
    def remainder_pos(self) -> int:
        return next(i for i, e in enumerate(self.entries)
                    if isinstance(e, _Remainder))

    @property
    def v_fresh(self) -> int:
        return 2 - len(self.finite_entries)

    def component_perimeters(self) -> tuple:
        """Perimeters of the bounded (finite-entry) components."""
        return tuple(k + 1 if k % 2 == 1 else k + 2 for k in self.finite_entries)


INF = PeelIndicator((REMAINDER,))

HALF_PLANE = "half-plane"


@dataclass(frozen=True)
class Disk:
    """Peeling context: free Boltzmann disk of the given even perimeter."""

    perimeter: int

    def __post_init__(self):
        if self.perimeter % 2 or self.perimeter < 2:
            raise ValueError(f"disk perimeter must be even >= 2, got {self.perimeter}")


def cover_exposed(ind: PeelIndicator) -> tuple[int, int]:
    """(Co, Ex): covered old edges and exposed new frontier edges.

    Co = 1 + sum of finite entries.  Each odd-entry component absorbs one
    of the quad's three non-peeled sides, each even-entry component two;
    the rest face the remainder, so Ex = 3 - sum(absorbed).
    """
    fin = ind.finite_entries
    co = 1 + sum(fin)
    ex = 3 - sum(1 if k % 2 == 1 else 2 for k in fin)
    return co, ex


_TABLE = None


def default_table() -> PartitionTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = PartitionTable()
    return _TABLE


def _z(p, table, exact):
    if exact:
        return table.exact(p)
    return table.value(p)


def uihpq_peel_pmf(ind: PeelIndicator, table: PartitionTable | None = None,
                   exact: bool = True):
    """Half-plane peeling probability, a literal transcription of the four
    closed forms (placement-symmetric)."""
    table = table or default_table()
    fin = ind.finite_entries
    if len(fin) == 0:
        return Fraction(3, 8) if exact else 0.375
    if len(fin) == 1:
        k = fin[0]
        if k % 2 == 1:
            # 1/12 * 54^((1-k)/2) * z(k+1); (1-k)/2 <= 0 for k >= 1
            if exact:
                return Fraction(1, 12) * Fraction(1, 54 ** ((k - 1) // 2)) \
                    * table.exact(k + 1)
            return math.exp(-math.log(12.0) + 0.5 * (1 - k) * math.log(54.0)
                            + table.log_value(k + 1))
        if exact:
            return Fraction(1, 12) * Fraction(1, 54 ** (k // 2)) * table.exact(k + 2)
        return math.exp(-math.log(12.0) - 0.5 * k * math.log(54.0)
                        + table.log_value(k + 2))
    k1, k2 = fin
    if exact:
        return Fraction(1, 54 ** ((k1 + k2) // 2)) * table.exact(k1 + 1) \
            * table.exact(k2 + 1)
    return math.exp(-0.5 * (k1 + k2) * math.log(54.0)
                    + table.log_value(k1 + 1) + table.log_value(k2 + 1))


def remainder_perimeter(ind: PeelIndicator, context) -> int:
    """Perimeter of the remainder component in a disk context."""
    co, ex = cover_exposed(ind)
    rem = context.perimeter + ex - co
    return rem


def pattern_weight(ind: PeelIndicator, context=HALF_PLANE,
                   table: PartitionTable | None = None, exact: bool = True):
    """Unified peeling weight 12^(-v_fresh) * R * prod z(bounded perims)."""
    table = table or default_table()
    co, ex = cover_exposed(ind)
    v = ind.v_fresh
    if context == HALF_PLANE:
        if exact:
            w = Fraction(1, 12 ** v)
            d = ex - co
            w *= Fraction(54 ** (d // 2)) if d >= 0 else Fraction(1, 54 ** ((-d) // 2))
            for p in ind.component_perimeters():
                w *= table.exact(p)
            return w
        logw = -v * math.log(12.0) + 0.5 * (ex - co) * math.log(54.0)
        for p in ind.component_perimeters():
            logw += table.log_value(p)
        return math.exp(logw)
    if not isinstance(context, Disk):
        raise ValueError(f"unknown context {context!r}")
    if sum(ind.finite_entries) > context.perimeter - 1:
        raise ValueError("finite entries exceed the available boundary")
    rem = remainder_perimeter(ind, context)
    if rem < 2 or rem % 2:
        raise ValueError(f"inconsistent disk configuration: remainder perimeter {rem}")
    if exact:
        w = Fraction(1, 12 ** v) * table.exact(rem) / table.exact(context.perimeter)
        for p in ind.component_perimeters():
            w *= table.exact(p)
        return w
    logw = -v * math.log(12.0) + table.log_value(rem) \
        - table.log_value(context.perimeter)
    for p in ind.component_perimeters():
        logw += table.log_value(p)
    return math.exp(logw)


# ---------------------------------------------------------------------------
# half-plane cell enumeration (the fixed CDF order) and exact Co pmf
# ---------------------------------------------------------------------------

# exact block masses implied by the calibration (verified in tests):
# P[inf] = 3/8, all one-sided cells 1/2, all two-sided cells 1/8.
BLOCK_INF = Fraction(3, 8)
BLOCK_ONESIDED = Fraction(1, 2)
BLOCK_TWOSIDED = Fraction(1, 8)


def onesided_cells(kmax: int) -> Iterator[PeelIndicator]:
    """(k,REM),(REM,k) interleaved, k = 0..kmax."""
    for k in range(kmax + 1):
        yield PeelIndicator((k, REMAINDER))
        yield PeelIndicator((REMAINDER, k))


def twosided_cells(totmax: int) -> Iterator[PeelIndicator]:
    """Two-sided cells by total ascending, lexicographic, fixed placements."""
    for s in range(2, totmax + 1, 2):
        for k1 in range(1, s, 2):
            k2 = s - k1
            yield PeelIndicator((k1, k2, REMAINDER))
            yield PeelIndicator((k1, REMAINDER, k2))
            yield PeelIndicator((REMAINDER, k1, k2))


def hp_cells(max_entry: int) -> Iterator[PeelIndicator]:
    """All half-plane cells with entries <= max_entry, in CDF order."""
    yield INF
    yield from onesided_cells(max_entry)
    yield from twosided_cells(2 * max_entry)


def cover_pmf_exact(kmax: int, table: PartitionTable | None = None) -> list:
    """P[Co = k] for k = 1..kmax as exact rationals.

    Co = 1 + sum of finite entries: k = 1 is the inf cell; one-sided cells
    contribute at entry k-1 with both placements; two-sided cells at total
    k-1 with three placements.
    """
    table = table or default_table()
    out = [Fraction(0)] * (kmax + 1)
    out[1] = Fraction(3, 8)
    for k in range(2, kmax + 1):
        e = k - 1
        w = 2 * uihpq_peel_pmf(PeelIndicator((e, REMAINDER)), table)
        if e >= 2 and e % 2 == 0:
            for k1 in range(1, e, 2):
                w += 3 * uihpq_peel_pmf(
                    PeelIndicator((k1, e - k1, REMAINDER)), table)
        out[k] = w
    return out


def exposed_minus_covered_mean(table: PartitionTable | None = None,
                               lcut: int = 40_000) -> tuple[float, float]:
    """Certified brackets for E[Ex] - E[Co] under the half-plane law.

    E[Ex] = 9/8 + 27 T + 162 T^2 and E[Co] = 54 T1 with
    T = sum 54^(-l) z(2l) and T1 = sum l 54^(-l) z(2l); both weighted sums
    carry certified tail brackets from the monotone ratio bound.
    """
    table = table or default_table()
    t_lo, t_hi = table.weighted_sum_brackets(lcut=lcut, weight="one")
    t1_lo, t1_hi = table.weighted_sum_brackets(lcut=lcut, weight="l")
    ex_lo = 9.0 / 8.0 + 27.0 * t_lo + 162.0 * t_lo * t_lo
    ex_hi = 9.0 / 8.0 + 27.0 * t_hi + 162.0 * t_hi * t_hi
    co_lo, co_hi = 54.0 * t1_lo, 54.0 * t1_hi
    return ex_lo - co_hi, ex_hi - co_lo


# ---------------------------------------------------------------------------
# sampling tables (shared by the python samplers and the numba kernels)
# ---------------------------------------------------------------------------

K_TAB = 4096      # one-sided cells tabulated for k <= K_TAB
S_TAB = 512       # two-sided cells tabulated for totals <= S_TAB


class HalfPlaneSampler:
    """Exact inverse-CDF sampler for the half-plane peeling indicator.

    Cells follow the fixed enumeration order; the cumulative tables cover
    one-sided entries k <= K_TAB and two-sided totals <= S_TAB, and the
    residual tail (mass ~ 3e-7) is accumulated lazily, cell by exact cell.
    """

    def __init__(self, table: PartitionTable | None = None):
        self.table = table or default_table()
        t = self.table
        # one-sided: cdf over k after both placements of k
        w = np.array([float(uihpq_peel_pmf(PeelIndicator((k, REMAINDER)), t,
                                           exact=(k + 2 <= 2 * t.lmax_exact)))
                      for k in range(K_TAB + 1)])
        self.os_w = w
        self.os_cdf = np.cumsum(2.0 * w.astype(np.longdouble)).astype(np.float64)
        # two-sided: per-total pair weights; cdf over (total, k1) after all
        # three placements of the pair
        ws, idx_k1, idx_s = [], [], []
        for s in range(2, S_TAB + 1, 2):
            for k1 in range(1, s, 2):
                ws.append(float(uihpq_peel_pmf(
                    PeelIndicator((k1, s - k1, REMAINDER)), t,
                    exact=(s <= 2 * t.lmax_exact))))
                idx_k1.append(k1)
                idx_s.append(s)
        self.ts_w = np.array(ws)
        self.ts_k1 = np.array(idx_k1, dtype=np.int64)
        self.ts_s = np.array(idx_s, dtype=np.int64)
        self.ts_cdf = np.cumsum(3.0 * self.ts_w.astype(np.longdouble)).astype(np.float64)
        self.b_inf = float(BLOCK_INF)
        self.b_os = float(BLOCK_INF + BLOCK_ONESIDED)

    def _onesided_weight_float(self, k: int) -> float:
        if k % 2 == 1:
            return math.exp(-math.log(12.0) + 0.5 * (1 - k) * math.log(54.0)
                            + self.table.log_value(k + 1))
        return math.exp(-math.log(12.0) - 0.5 * k * math.log(54.0)
                        + self.table.log_value(k + 2))

    def sample(self, rng) -> PeelIndicator:
        u = rng.random()
        if u < self.b_inf:
            return INF
        if u < self.b_os:
            v = u - self.b_inf
            j = int(np.searchsorted(self.os_cdf, v, side="right"))
            if j <= K_TAB:
                base = self.os_cdf[j - 1] if j > 0 else 0.0
                k = j
            else:
                # lazy tail: continue the k-ascending accumulation
                acc = float(self.os_cdf[-1])
                k = K_TAB
                while True:
                    k += 1
                    acc += 2.0 * self._onesided_weight_float(k)
                    if v < acc or k > 10 ** 9:
                        break
                base = acc - 2.0 * self._onesided_weight_float(k)
            w = self._onesided_weight_float(k)
            first = (v - base) < w
            return PeelIndicator((k, REMAINDER) if first else (REMAINDER, k))
        v = u - self.b_os
        j = int(np.searchsorted(self.ts_cdf, v, side="right"))
        if j < len(self.ts_w):
            base = self.ts_cdf[j - 1] if j > 0 else 0.0
            k1, s, w = int(self.ts_k1[j]), int(self.ts_s[j]), float(self.ts_w[j])
        else:
            acc = float(self.ts_cdf[-1])
            s = S_TAB
            k1 = s - 1
            w = 0.0
            while True:
                if k1 + 2 < s:
                    k1 += 2
                else:
                    s += 2
                    k1 = 1
                w = float(uihpq_peel_pmf(
                    PeelIndicator((k1, s - k1, REMAINDER)), self.table,
                    exact=False))
                acc += 3.0 * w
                if v < acc or s > 10 ** 9:
                    break
            base = acc - 3.0 * w
        k2 = s - k1
        r = v - base
        if r < w:
            return PeelIndicator((k1, k2, REMAINDER))
        if r < 2.0 * w:
            return PeelIndicator((k1, REMAINDER, k2))
        return PeelIndicator((REMAINDER, k1, k2))


def sample_uihpq_peel(rng, sampler: HalfPlaneSampler | None = None) -> PeelIndicator:
    global _HP_SAMPLER
    if sampler is None:
        if _HP_SAMPLER is None:
            _HP_SAMPLER = HalfPlaneSampler()
        sampler = _HP_SAMPLER
    return sampler.sample(rng)


_HP_SAMPLER = None
_KERNEL_TABLES = None


def kernel_tables(table: PartitionTable | None = None, lmax_log: int = 200_000):
    """(os_cdf, ts_cdf, ts_k1, ts_s, logz_tab) consumed by the numba kernels."""
    global _KERNEL_TABLES
    if table is None and _KERNEL_TABLES is not None:
        return _KERNEL_TABLES
    t = table or default_table()
    s = HalfPlaneSampler(t)
    out = (s.os_cdf, s.ts_cdf, s.ts_k1, s.ts_s, t.log_table(lmax_log))
    if table is None:
        _KERNEL_TABLES = out
    return out


# ---------------------------------------------------------------------------
# disk peeling: arc compositions
# ---------------------------------------------------------------------------
#
# For a disk the remainder is a real bounded component, so the sample space
# is the set of counterclockwise arc compositions of the 2l-1 non-peeled
# boundary edges rather than (finite entries, placement) labels:
#
#   * one component:   all 2l-1 old edges plus three new sides, two fresh
#                      corners; weight 12^-2 z(2l+2)/z(2l)
#   * two components:  ordered pairs (a1, a2), a1 + a2 = 2l-1; weight
#                      12^-1 z(a1^)z(a2^)/z(2l), a^ = a+1 odd / a+2 even
#   * three components: ordered odd triples (a1, a2, a3) summing to 2l-1;
#                      weight z(a1+1)z(a2+1)z(a3+1)/z(2l)
#
# (Listing remainder placements separately would double/triple count: the
# placements of one arc composition are the same configuration.)  At
# perimeter 2 there is additionally the terminal edge-map atom with mass
# 1/z(2); for 2l >= 4 the composition weights alone sum to one exactly.


@dataclass(frozen=True)
class DiskCell:
    """One disk peeling outcome: ccw arcs; `rem_arc` marks the remainder."""

    arcs: tuple
    rem_arc: int  # index into arcs: the component the process continues in

    @property
    def is_atom(self) -> bool:
        return len(self.arcs) == 0


DISK_ATOM = DiskCell((), -1)


def _arc_perimeter(a: int) -> int:
    return a + 1 if a % 2 == 1 else a + 2


def cell_perimeters(cell: DiskCell) -> tuple:
    """Component perimeters of a disk cell's arcs.

    One arc: all three new quad sides face it (perimeter a+3, two fresh
    corners).  Two arcs: the odd arc is closed by one side, the even one
    by two sides around a fresh apex.  Three arcs: one side each.
    """
    if len(cell.arcs) == 1:
        return (cell.arcs[0] + 3,)
    return tuple(_arc_perimeter(a) for a in cell.arcs)


def disk_cell_weight(cell: DiskCell, perimeter: int,
                     table: PartitionTable | None = None, exact: bool = True):
    """Probability of one arc composition when peeling a disk."""
    table = table or default_table()
    if cell.is_atom:
        if perimeter != 2:
            raise ValueError("the edge-map atom exists only at perimeter 2")
        return 1 / table.exact(2) if exact else 0.75
    m = perimeter - 1
    if sum(cell.arcs) != m:
        raise ValueError(f"arcs must sum to {m}: {cell.arcs}")
    v = 2 - (len(cell.arcs) - 1)  # fresh corners: 2 / 1 / 0
    if exact:
        w = Fraction(1, 12 ** v) / table.exact(perimeter)
        for p in cell_perimeters(cell):
            w *= table.exact(p)
        return w
    logw = -v * math.log(12.0) - table.log_value(perimeter)
    for p in cell_perimeters(cell):
        logw += table.log_value(p)
    return math.exp(logw)


def disk_cells(perimeter: int) -> Iterator[DiskCell]:
    """Every outcome of one disk peeling step (finite enumeration)."""
    m = perimeter - 1
    if perimeter == 2:
        yield DISK_ATOM
    yield DiskCell((m,), 0)
    for a1 in range(0, m + 1):
        yield DiskCell((a1, m - a1), 1)  # remainder designation: second arc
    for a1 in range(1, m, 2):
        for a2 in range(1, m - a1, 2):
            a3 = m - a1 - a2
            if a3 >= 1 and a3 % 2 == 1:
                yield DiskCell((a1, a2, a3), 2)


def disk_pmf_total(perimeter: int, table: PartitionTable | None = None) -> Fraction:
    """Exact total mass of the disk peeling law (should be 1)."""
    table = table or default_table()
    tot = Fraction(0)
    for cell in disk_cells(perimeter):
        tot += disk_cell_weight(cell, perimeter, table)
    return tot


def disk_cells_sampling_order(perimeter: int) -> Iterator[DiskCell]:
    """Disk cells in the fixed lazy-CDF order.

    Atom (perimeter 2), the single-component cell, then rounds t=1,2,...
    interleaving pair cells with min arc t-1 and triple cells whose two
    smallest arcs sum to 2t, the big arc placed at each first-occurrence
    position of the maximum.  Masses decay geometrically in t, so
    inverse-CDF sampling touches O(1) cells in expectation regardless of
    the perimeter.
    """
    m = perimeter - 1
    if perimeter == 2:
        yield DISK_ATOM
    yield DiskCell((m,), 0)
    for t in range(1, m + 2):
        a = t - 1  # pair min arc
        if a <= (m - 1) // 2:
            yield DiskCell((a, m - a), 1)
            yield DiskCell((m - a, a), 0)
        ms = 2 * t  # two smallest odd arcs sum to ms
        big = m - ms
        if big >= 1:
            for x in range(1, ms, 2):
                y = ms - x
                if big < max(x, y):
                    continue
                yield DiskCell((big, x, y), 0)
                if big > x:
                    yield DiskCell((x, big, y), 1)
                    if big > y:
                        yield DiskCell((x, y, big), 2)


def sample_disk_peel(perimeter: int, rng,
                     table: PartitionTable | None = None) -> DiskCell:
    """Inverse-CDF draw of a disk peeling outcome (lazy accumulation)."""
    table = table or default_table()
    u = rng.random()
    acc = 0.0
    last = None
    for cell in disk_cells_sampling_order(perimeter):
        acc += disk_cell_weight(cell, perimeter, table, exact=False)
        last = cell
        if u < acc:
            return cell
    # float round-off can leave a ~1e-13 sliver; absorb it in the last cell
    return last
