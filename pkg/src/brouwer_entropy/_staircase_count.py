"""Word count for the staircase seeds of a glued system against the standard boxes.

With x on the 1/3 grid, a seed on a plateau or at the midpoint between two
last-level plateaus meets chart ``l`` in a block of one or two consecutive
times, and consecutive blocks start ``d_l`` apart.  Four seed kinds occur:

* ``P``   plateau, x = 0: every block single, ``d_l = k_l``
* ``P2``  plateau, x = 1/3 or 2/3: every block double
* ``G``   gap, x = 0: singles, the last block double, ``d_{L-1} = k``
* ``G2``  gap, x = 1/3 or 2/3: doubles, the last block single, ``d_{L-1} = k + 1``

A window shows a run of blocks ``i..j``; the first may lose its first hit and
the last may lose its second.  The visible word is fixed by ``(i, j)``, the
visible widths, the visible start differences and the position ``p`` of the
first visible hit.  For one reading of the visible part (seed kind plus the two
clip flags) every gap range grows with ``k1``, so the admissible ``p`` form the
interval of the largest compatible ``k1``; different readings are merged by an
interval union.  Seeds with ``k1 = 1`` can overlap and are left to brute force.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ._exact import floor_pow

BIG = 1 << 40
K1_MIN = 2


@dataclass(frozen=True)
class _Kind:
    name: str
    widths: tuple  # widths[l - 1] is the block width in chart l
    lo: tuple  # lo[l] / hi[l]: gap range at level l as arrays over k1
    hi: tuple
    k_min: int
    cap: int


def _kinds(spec, n: int) -> list[_Kind]:
    L = spec.L
    top = n + 2
    k = np.arange(top + 1, dtype=np.int64)
    kinds = []
    if L == 2:
        table = {
            "P": ((1, 1), k, k, n),
            "P2": ((2, 2), k, k, n),
            "G": ((1, 2), k, k, n - 1),
            "G2": ((2, 1), k + 1, k + 1, n - 1),
        }
        for name, (widths, lo, hi, cap) in table.items():
            kinds.append(_Kind(name, widths, (None, lo), (None, hi), K1_MIN, cap))
        return kinds
    m = np.array([floor_pow(int(v), spec.alpha_prime) for v in k], dtype=np.int64)
    last = {
        "P": ((1,) * L, k, k + m),
        "P2": ((2,) * L, k, k + m),
        "G": ((1,) * (L - 1) + (2,), k, k + m - 1),
        "G2": ((2,) * (L - 1) + (1,), k + 1, k + m),
    }
    for name, (widths, last_lo, last_hi) in last.items():
        lo = [None, k] + [k] * (L - 3) + [last_lo]
        hi = [None, k] + [2 * k] * (L - 3) + [last_hi]
        nonempty = np.nonzero(last_lo <= last_hi)[0]
        k_min = max(K1_MIN, int(nonempty[0])) if nonempty.size else top + 1
        kinds.append(_Kind(name, widths, tuple(lo), tuple(hi), k_min, n))
    return kinds


def _union_total(intervals) -> int:
    if not intervals:
        return 0
    lo = np.stack([a for a, _ in intervals])
    hi = np.stack([b for _, b in intervals])
    empty = lo > hi
    lo = np.where(empty, BIG, lo)
    hi = np.where(empty, -BIG, hi)
    order = np.argsort(lo, axis=0, kind="stable")
    lo = np.take_along_axis(lo, order, axis=0)
    hi = np.take_along_axis(hi, order, axis=0)
    total = np.zeros(lo.shape[1], dtype=np.int64)
    end = np.full(lo.shape[1], -BIG, dtype=np.int64)
    for r in range(lo.shape[0]):
        start = np.maximum(lo[r], end + 1)
        total += np.maximum(0, hi[r] - start + 1)
        end = np.maximum(end, hi[r])
    return int(total.sum())


class StaircaseWords:
    """Distinct non-empty words of the staircase seeds with ``k1 >= 2`` and ``k1 <= n``."""

    def __init__(self, spec, n: int):
        self.spec = spec
        self.n = n
        self.L = spec.L
        self.top = n + 2
        self.kinds = [kd for kd in _kinds(spec, n) if kd.k_min <= kd.cap]
        self.readings = self._readings()

    def _readings(self):
        L = self.L
        groups = defaultdict(list)
        for kd in self.kinds:
            w = kd.widths
            for i in range(1, L + 1):
                for j in range(i, L + 1):
                    for cl in (0, 1) if w[i - 1] == 2 else (0,):
                        for cr in (0, 1) if w[j - 1] == 2 else (0,):
                            if i == j:
                                vis = w[i - 1] - cl - cr
                                if vis < 1:
                                    continue
                                v = (vis,)
                            else:
                                v = (w[i - 1] - cl,) + w[i : j - 1] + (w[j - 1] - cr,)
                            groups[(i, j, v)].append((kd, cl, cr))
        return dict(groups)

    # -- interval of first-hit positions for one reading ----------------------
    def _interval(self, i: int, j: int, reading, deltas, size: int):
        kd, cl, cr = reading
        n, top = self.n, self.top
        k_lo = np.full(size, kd.k_min, dtype=np.int64)
        k_hi = np.full(size, kd.cap, dtype=np.int64)
        span = np.zeros(size, dtype=np.int64)
        for idx, level in enumerate(range(i, j)):
            d = deltas[idx] + (cl if level == i else 0)
            span = span + d
            k_lo = np.maximum(k_lo, np.searchsorted(kd.hi[level], d, side="left"))
            k_hi = np.minimum(k_hi, np.searchsorted(kd.lo[level], d, side="right") - 1)
        ok = k_lo <= k_hi
        ks = np.clip(k_hi, 0, top)
        w_j = kd.widths[j - 1]
        if cl:
            left = np.ones(size, dtype=np.int64)
        elif i > 1:
            left = -kd.hi[i - 1][ks] + kd.widths[i - 2]
        else:
            left = np.full(size, -BIG, dtype=np.int64)
        if cr:
            right_lo = span + 1 - n
            right_hi = right_lo
        else:
            right_lo = span + w_j - n
            right_hi = span + kd.hi[j][ks] - n if j < self.L else np.full(size, BIG, dtype=np.int64)
        a_lo = np.maximum(left, right_lo)
        a_hi = np.minimum(1 if cl else 0, right_hi)
        p_lo = cl - a_hi
        p_hi = np.where(ok, cl - a_lo, p_lo - 1)
        return p_lo, p_hi

    # -- enumeration of visible start differences ------------------------------
    def _bound(self, level: int, k_cap: int) -> int:
        k_cap = min(k_cap, self.top)
        return min(self.n - 1, max(int(kd.hi[level][k_cap]) for kd in self.kinds) + 1)

    def _cells(self, i: int, j: int):
        """Yield lists of arrays, one array per visible gap, covering all candidates."""
        g = j - i
        if g == 0:
            yield [], 1
            return
        levels = list(range(i, j))
        lead, trail = levels[: max(0, g - 2)], levels[max(0, g - 2) :]
        cap = max(kd.cap for kd in self.kinds)
        lead_ranges = [range(1, self._bound(lv, cap) + 1) for lv in lead]
        for head in itertools.product(*lead_ranges):
            used = sum(head)
            if used > self.n - 1:
                continue
            k_cap = min([cap] + [h + 1 for h in head])
            axes = [np.arange(1, self._bound(lv, k_cap) + 1, dtype=np.int64) for lv in trail]
            if len(axes) == 1:
                cells = [axes[0][axes[0] <= self.n - 1 - used]]
            else:
                a, b = np.meshgrid(axes[0], axes[1], indexing="ij")
                keep = a + b <= self.n - 1 - used
                cells = [a[keep], b[keep]]
            size = cells[0].size
            if size == 0:
                continue
            fixed = [np.full(size, h, dtype=np.int64) for h in head]
            yield fixed + cells, size

    def _count_from_first(self, j: int, readings) -> int:
        """Words whose first visible block is chart 1 and which show at least three blocks.

        Here k1 is pinned by the first visible gap, the other visible gaps range
        over a box and the position interval only depends on their sum, so each
        intersection of readings is counted by convolving the box sides.
        """
        n = self.n
        total = 0
        levels = range(2, j)
        for d1 in range(1, n):
            boxes, params = [], []
            for kd, cl, cr in readings:
                k1 = d1 + cl
                if not kd.k_min <= k1 <= kd.cap:
                    continue
                boxes.append([(int(kd.lo[lv][k1]), int(kd.hi[lv][k1])) for lv in levels])
                params.append((kd, cl, cr, k1))
            for size in range(1, len(boxes) + 1):
                sign = 1 if size % 2 else -1
                for subset in itertools.combinations(range(len(boxes)), size):
                    sides = [
                        (max(boxes[r][t][0] for r in subset), min(boxes[r][t][1] for r in subset))
                        for t in range(len(levels))
                    ]
                    if any(lo > hi for lo, hi in sides):
                        continue
                    ways = np.ones(1, dtype=np.int64)
                    for lo, hi in sides:
                        ways = np.convolve(ways, np.ones(hi - lo + 1, dtype=np.int64))
                    rest = sum(lo for lo, _ in sides) + np.arange(ways.size, dtype=np.int64)
                    keep = rest <= n - 1 - d1
                    ways, rest = ways[keep], rest[keep]
                    if ways.size == 0:
                        continue
                    p_lo = np.full(ways.size, -BIG, dtype=np.int64)
                    p_hi = np.full(ways.size, BIG, dtype=np.int64)
                    for r in subset:
                        kd, cl, cr, k1 = params[r]
                        span = k1 + rest
                        if cr:
                            a_lo = span + 1 - n
                            a_hi = a_lo
                        else:
                            a_lo = span + kd.widths[j - 1] - n
                            a_hi = span + int(kd.hi[j][k1]) - n if j < self.L else np.full(ways.size, BIG)
                        if cl:
                            a_lo = np.maximum(a_lo, 1)
                        a_hi = np.minimum(a_hi, 1 if cl else 0)
                        p_lo = np.maximum(p_lo, cl - a_hi)
                        p_hi = np.minimum(p_hi, cl - a_lo)
                    total += sign * int((ways * np.maximum(0, p_hi - p_lo + 1)).sum())
        return total

    def count(self) -> int:
        total = 0
        for (i, j, _v), readings in self.readings.items():
            if i == 1 and j >= 3:
                total += self._count_from_first(j, readings)
                continue
            for deltas, size in self._cells(i, j):
                intervals = [self._interval(i, j, r, deltas, size) for r in readings]
                total += _union_total(intervals)
        return total

    # -- membership of one sparse word -----------------------------------------
    def contains(self, word, chart_of) -> bool:
        """True when the sparse word ``((pos, name), ...)`` is already counted."""
        if not word:
            return False
        blocks = []
        last_pos = None
        for pos, name in word:
            chart = chart_of.get(name)
            if chart is None or pos == last_pos:
                return False
            last_pos = pos
            if blocks and blocks[-1][0] == chart and pos == blocks[-1][1] + blocks[-1][2]:
                blocks[-1][2] += 1
                continue
            blocks.append([chart, pos, 1])
        charts = [b[0] for b in blocks]
        i, j = charts[0], charts[-1]
        if charts != list(range(i, j + 1)) or any(b[2] > 2 for b in blocks):
            return False
        v = tuple(b[2] for b in blocks)
        readings = self.readings.get((i, j, v))
        if not readings:
            return False
        deltas = [np.array([blocks[t + 1][1] - blocks[t][1]], dtype=np.int64) for t in range(j - i)]
        p = blocks[0][1]
        for r in readings:
            lo, hi = self._interval(i, j, r, deltas, 1)
            if lo[0] <= p <= hi[0]:
                return True
        return False
