"""Charted plane built from L translated half-planes glued by staircase shears.

Chart ``k`` is a copy of the plane; its upper half ``y > 0`` is identified with
the upper half of chart ``k + 1`` through ``(x, y) -> (x + phi_k(y), y)``.  The
map acts as ``x -> x + 1`` in every chart, which commutes with the shears.

The staircase ``phi_k`` is constant and equal to ``-k_level`` on nested plateau
intervals.  Level-1 plateaus live in dyadic blocks
``B_k = ((2/3) 2**-k, (2/3) 2**-(k-1)]`` (the closed middle third of each block);
deeper plateaus split their parent plateau into equal sub-blocks and again keep
the middle third.  Between plateaus the staircase is linear.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from ._exact import (
    as_fraction,
    ceil_int,
    decimal_fraction,
    floor_int,
    floor_log2,
    floor_pow,
    fraction_str,
)
from .errors import ChartError, InvalidParameterError, LayoutBoundError, NonWanderingRegionError

FORMAT_VERSION = 1
LAYOUT_RULE = "dyadic-middle-third/v1"
TWO_THIRDS = Fraction(2, 3)
DEFAULT_DUMP_K1 = 8


@dataclass(frozen=True)
class ChartPoint:
    chart: int
    x: object
    y: object

    def as_list(self) -> list:
        return [self.chart, fraction_str(self.x), fraction_str(self.y)]

    @classmethod
    def from_list(cls, data) -> "ChartPoint":
        chart, x, y = data
        return cls(int(chart), as_fraction(x), as_fraction(y))


@dataclass(frozen=True)
class Region:
    """Closed axis-aligned box ``[x_lo, x_hi] x [y_lo, y_hi]`` in one chart."""

    chart: int
    x_lo: Fraction
    x_hi: Fraction
    y_lo: Fraction
    y_hi: Fraction

    def __post_init__(self):
        for name in ("x_lo", "x_hi", "y_lo", "y_hi"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            raise InvalidParameterError(f"empty box {self}")

    @classmethod
    def centered(cls, chart: int, x, y, half_width) -> "Region":
        x, y, h = as_fraction(x), as_fraction(y), as_fraction(half_width)
        return cls(chart, x - h, x + h, y - h, y + h)

    @property
    def width(self) -> Fraction:
        return self.x_hi - self.x_lo

    def contains_xy(self, x, y) -> bool:
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi


def standard_box(chart: int) -> Region:
    return Region(chart, -TWO_THIRDS, TWO_THIRDS, -TWO_THIRDS, TWO_THIRDS)


def _translation_hits(x, region: Region) -> range:
    x = as_fraction(x)
    return range(ceil_int(region.x_lo - x), floor_int(region.x_hi - x) + 1)


# ---------------------------------------------------------------------------
# staircase layout


@dataclass(frozen=True)
class GluingSpec:
    L: int
    alpha: object
    k_max: int
    alpha_prime: Fraction = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha_prime", decimal_fraction(self.alpha) - self.L + 1)

    # -- value ranges ------------------------------------------------------
    def last_level_extent(self, k1: int) -> int:
        """Number of last-level plateaus inside ``I_k1`` minus one, floor(k1**alpha')."""
        return floor_pow(k1, self.alpha_prime)

    def value_range(self, level: int, k1: int) -> tuple[int, int]:
        """Inclusive range of plateau values ``k`` (phi = -k) for ``level`` under ``k1``."""
        if level == 1:
            return (k1, k1)
        if level == self.L - 1:
            return (k1, k1 + self.last_level_extent(k1))
        return (k1, 2 * k1)

    # -- geometry of plateau paths -------------------------------------------
    def interval(self, path: Sequence[int]) -> tuple[Fraction, Fraction]:
        return _plateau_interval(self, tuple(path))

    @property
    def floor(self) -> Fraction:
        """Lowest materialized y; queries at or below it are refused."""
        return TWO_THIRDS / (1 << self.k_max)

    def block_index(self, y: Fraction) -> int:
        """k1 such that y lies in B_k1; 0 when y > 2/3."""
        t = Fraction(3, 2) * y
        return floor_log2(1 / t) + 1

    def paths(self, depth: int, k1_max: int, k1_min: int = 1) -> Iterator[tuple[int, ...]]:
        """Plateau paths of ``depth`` with k1_min <= k1 <= k1_max, k1 ascending then lexicographic."""
        for k1 in range(k1_min, k1_max + 1):
            yield from self._subpaths((k1,), depth)

    def _subpaths(self, prefix: tuple[int, ...], depth: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == depth:
            yield prefix
            return
        lo, hi = self.value_range(len(prefix) + 1, prefix[0])
        for k in range(lo, hi + 1):
            yield from self._subpaths(prefix + (k,), depth)

    def plateau_midpoints(self, k1_max: int, k1_min: int = 1) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        for path in self.paths(self.L - 1, k1_max, k1_min):
            lo, hi = self.interval(path)
            yield path, (lo + hi) / 2

    def gap_midpoints(self, k1_max: int, k1_min: int = 1) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        """Midpoints between consecutive last-level plateaus sharing a parent.

        Yields ``(path, y)``; ``path`` ends with the smaller of the two plateau
        values ``k`` and the last staircase equals ``-(k + 1/2)`` at ``y``.
        """
        if self.L == 2:
            for k in range(k1_min, k1_max):
                _, upper = self.interval((k + 1,))
                lower, _ = self.interval((k,))
                yield (k,), (upper + lower) / 2
            return
        for parent in self.paths(self.L - 2, k1_max, k1_min):
            lo, hi = self.value_range(self.L - 1, parent[0])
            for k in range(lo, hi):
                _, top_of_lower = self.interval(parent + (k + 1,))
                bottom_of_upper, _ = self.interval(parent + (k,))
                yield parent + (k,), (top_of_lower + bottom_of_upper) / 2

    # -- serialization -----------------------------------------------------
    def layout_entries(self, k1_limit: int) -> list[dict]:
        entries = []
        for depth in range(1, self.L):
            for path in self.paths(depth, k1_limit):
                lo, hi = self.interval(path)
                entries.append(
                    {"index": list(path), "lo": fraction_str(lo), "hi": fraction_str(hi), "value": -path[-1]}
                )
        entries.sort(key=lambda e: (e["index"][0], len(e["index"]), e["index"]))
        return entries

    def to_dict(self, dump_k1: int = DEFAULT_DUMP_K1) -> dict:
        limit = min(self.k_max, dump_k1)
        return {
            "version": FORMAT_VERSION,
            "L": self.L,
            "alpha": self.alpha,
            "k_max": self.k_max,
            "layout_rule": LAYOUT_RULE,
            "layout_k1_limit": limit,
            "layout": self.layout_entries(limit),
        }

    def to_json(self, dump_k1: int = DEFAULT_DUMP_K1) -> str:
        return json.dumps(self.to_dict(dump_k1), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "GluingSpec":
        if data.get("version") != FORMAT_VERSION:
            raise InvalidParameterError(f"unsupported gluing spec version {data.get('version')!r}")
        if data.get("layout_rule", LAYOUT_RULE) != LAYOUT_RULE:
            raise InvalidParameterError(f"unknown layout rule {data['layout_rule']!r}")
        spec = build_gluing(data["L"], data["alpha"], data["k_max"])
        stored = data.get("layout")
        if stored is not None:
            expected = spec.layout_entries(data.get("layout_k1_limit", min(spec.k_max, DEFAULT_DUMP_K1)))
            if stored != expected:
                raise InvalidParameterError("stored layout does not match the layout rule")
        return spec

    @classmethod
    def from_json(cls, text: str) -> "GluingSpec":
        return cls.from_dict(json.loads(text))


@lru_cache(maxsize=1 << 16)
def _plateau_interval(spec: GluingSpec, path: tuple[int, ...]) -> tuple[Fraction, Fraction]:
    if len(path) == 1:
        lo = TWO_THIRDS / (1 << (path[0] - 1)) / 2
        return lo + lo / 3, lo + 2 * lo / 3
    a, b = _plateau_interval(spec, path[:-1])
    kmin, kmax = spec.value_range(len(path), path[0])
    h = (b - a) / (kmax - kmin + 1)
    start = a + (kmax - path[-1]) * h
    return start + h / 3, start + 2 * h / 3


def build_gluing(L: int, alpha, k_max: int) -> GluingSpec:
    if not isinstance(L, int) or isinstance(L, bool) or L < 2:
        raise InvalidParameterError(f"L must be an integer >= 2, got {L!r}")
    if not isinstance(k_max, int) or k_max < 1:
        raise InvalidParameterError(f"k_max must be a positive integer, got {k_max!r}")
    a = decimal_fraction(alpha)
    if L == 2:
        if a != 2:
            raise InvalidParameterError("with L = 2 the only reachable exponent is alpha = 2")
    elif not (L - 1 < a <= L):
        raise InvalidParameterError(f"alpha must lie in ({L - 1}, {L}] for L = {L}, got {alpha}")
    return GluingSpec(L, alpha, k_max)


# ---------------------------------------------------------------------------
# staircase evaluation


def _extend(spec: GluingSpec, path: tuple[int, ...], depth: int, lowest: bool) -> tuple[int, ...]:
    while len(path) < depth:
        lo, hi = spec.value_range(len(path) + 1, path[0])
        path = path + ((hi if lowest else lo),)
    return path


def _pred(spec: GluingSpec, path: tuple[int, ...]) -> tuple[int, ...]:
    """Plateau of the same depth immediately below ``path``."""
    depth = len(path)
    for d in range(depth, 1, -1):
        _, hi = spec.value_range(d, path[0])
        if path[d - 1] < hi:
            return _extend(spec, path[: d - 1] + (path[d - 1] + 1,), depth, lowest=False)
    return _extend(spec, (path[0] + 1,), depth, lowest=False)


def _succ(spec: GluingSpec, path: tuple[int, ...]) -> tuple[int, ...] | None:
    depth = len(path)
    for d in range(depth, 1, -1):
        lo, _ = spec.value_range(d, path[0])
        if path[d - 1] > lo:
            return _extend(spec, path[: d - 1] + (path[d - 1] - 1,), depth, lowest=True)
    if path[0] == 1:
        return None
    return _extend(spec, (path[0] - 1,), depth, lowest=True)


def _bracket(spec: GluingSpec, level: int, y: Fraction):
    """Either ``(path, None)`` with y on plateau ``path`` or ``(below, above)`` neighbours."""
    k1 = spec.block_index(y)
    if k1 < 1:
        return _extend(spec, (1,), level, lowest=False), None, False
    lo, hi = spec.interval((k1,))
    if y < lo:
        above = _extend(spec, (k1,), level, lowest=True)
        return _pred(spec, above), above, False
    if y > hi:
        below = _extend(spec, (k1,), level, lowest=False)
        return below, _succ(spec, below), False
    prefix = (k1,)
    while len(prefix) < level:
        kmin, kmax = spec.value_range(len(prefix) + 1, k1)
        a, b = spec.interval(prefix)
        n = kmax - kmin + 1
        r = min(int((y - a) * n / (b - a)), n - 1)
        child = prefix + (kmax - r,)
        c_lo, c_hi = spec.interval(child)
        if c_lo <= y <= c_hi:
            prefix = child
            continue
        if y < c_lo:
            above = _extend(spec, child, level, lowest=True)
            return _pred(spec, above), above, False
        below = _extend(spec, child, level, lowest=False)
        return below, _succ(spec, below), False
    return prefix, None, True


def phi_eval(spec: GluingSpec, level: int, y) -> Fraction | int:
    """Value of the staircase between charts ``level`` and ``level + 1`` at height y.

    Exact integer on plateaus, exact rational on the linear pieces.
    """
    if not 1 <= level <= spec.L - 1:
        raise InvalidParameterError(f"level must be in [1, {spec.L - 1}], got {level}")
    y = as_fraction(y)
    if y <= 0:
        raise ChartError(f"staircase is only defined for y > 0, got y = {y}")
    if y <= spec.floor:
        raise LayoutBoundError(
            f"y = {float(y):.3g} lies below the materialized layout (k_max = {spec.k_max})",
            needed=spec.block_index(y),
            k_max=spec.k_max,
        )
    below, above, exact = _bracket(spec, level, y)
    if exact:
        return -below[-1]
    v_below = -below[-1]
    if above is None:
        return v_below
    _, hi_below = spec.interval(below)
    lo_above, _ = spec.interval(above)
    v_above = -above[-1]
    return v_below + (v_above - v_below) * (y - hi_below) / (lo_above - hi_below)


def chart_offset(spec: GluingSpec, y, source: int, target: int):
    """Amount added to x when moving a point at height y > 0 from ``source`` to ``target``."""
    total = 0
    if target > source:
        for level in range(source, target):
            total += phi_eval(spec, level, y)
    elif target < source:
        for level in range(target, source):
            total -= phi_eval(spec, level, y)
    return total


def to_chart(spec: GluingSpec | None, p: ChartPoint, k: int) -> ChartPoint:
    charts = 1 if spec is None else spec.L
    if not 1 <= k <= charts:
        raise ChartError(f"chart {k} outside [1, {charts}]")
    if k == p.chart:
        return p
    if p.y <= 0:
        raise ChartError(f"point with y = {p.y} exists only in chart {p.chart}")
    return ChartPoint(k, p.x + chart_offset(spec, p.y, p.chart, k), p.y)


def step(spec: GluingSpec | None, p: ChartPoint, n: int) -> ChartPoint:
    return ChartPoint(p.chart, p.x + n, p.y)


# ---------------------------------------------------------------------------
# systems sharing the orbit interface: apply / contains / hit_times


class TranslationSystem:
    """The unit translation of the plane; one chart."""

    charts = 1
    name = "translation"

    def apply(self, p: ChartPoint, n: int) -> ChartPoint:
        return step(None, p, n)

    def contains(self, region: Region, p: ChartPoint) -> bool:
        return region.contains_xy(p.x, p.y)

    def hit_times(self, p: ChartPoint, region: Region) -> range:
        if not region.y_lo <= p.y <= region.y_hi:
            return range(0)
        return _translation_hits(p.x, region)


class GluedSystem:
    """The Brouwer homeomorphism f_alpha obtained from a ``GluingSpec``."""

    name = "glued"

    def __init__(self, spec: GluingSpec):
        self.spec = spec
        self.charts = spec.L

    def apply(self, p: ChartPoint, n: int) -> ChartPoint:
        return step(self.spec, p, n)

    def contains(self, region: Region, p: ChartPoint) -> bool:
        if not region.y_lo <= p.y <= region.y_hi:
            return False
        if p.y <= 0 and region.chart != p.chart:
            return False
        q = to_chart(self.spec, p, region.chart)
        return region.x_lo <= q.x <= region.x_hi

    def hit_times(self, p: ChartPoint, region: Region) -> range:
        if not region.y_lo <= p.y <= region.y_hi:
            return range(0)
        if p.y <= 0 and region.chart != p.chart:
            return range(0)
        return _translation_hits(to_chart(self.spec, p, region.chart).x, region)


def _exponent_range(v: Fraction, lo: Fraction, hi: Fraction):
    """Integers k with lo <= 2**k v <= hi, for v > 0; None stands for an open end."""
    if hi <= 0:
        return 1, 0
    k_hi = floor_log2(hi / v)
    if lo <= 0:
        return None, k_hi
    r = lo / v
    e = floor_log2(r)
    k_lo = e if Fraction(2) ** e == r else e + 1
    return k_lo, k_hi


def _axis_times(v: Fraction, lo: Fraction, hi: Fraction):
    """Times k with ``2**k * v`` in [lo, hi]; (None, None) means every k."""
    if v == 0:
        return (None, None) if lo <= 0 <= hi else (1, 0)
    if v > 0:
        return _exponent_range(v, lo, hi)
    return _exponent_range(-v, -hi, -lo)


class LinearHyperbolic:
    """The saddle ``(x, y) -> (2x, y/2)`` with the origin collapsed to the point at infinity."""

    charts = 1
    name = "linear"

    def apply(self, p: ChartPoint, n: int) -> ChartPoint:
        scale = Fraction(2) ** n
        x, y = as_fraction(p.x) * scale, as_fraction(p.y) / scale
        if isinstance(p.x, float) or isinstance(p.y, float):
            return ChartPoint(p.chart, float(x), float(y))
        return ChartPoint(p.chart, x, y)

    def contains(self, region: Region, p: ChartPoint) -> bool:
        return region.contains_xy(as_fraction(p.x), as_fraction(p.y))

    def hit_times(self, p: ChartPoint, region: Region) -> range:
        x, y = as_fraction(p.x), as_fraction(p.y)
        if x == 0 and y == 0:
            raise NonWanderingRegionError("the origin is the non-wandering point")
        xa, xb = _axis_times(x, region.x_lo, region.x_hi)
        # y scales by 2**-k
        ya, yb = _axis_times(y, region.y_lo, region.y_hi)
        ya, yb = (None if yb is None else -yb), (None if ya is None else -ya)
        lo = _max_opt(xa, ya)
        hi = _min_opt(xb, yb)
        if lo is not None and hi is not None and lo > hi:
            return range(0)
        if lo is None or hi is None:
            raise NonWanderingRegionError(f"orbit of {p} stays in {region} for unboundedly many steps")
        return range(lo, hi + 1)


def _max_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _min_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def build_linear_example() -> LinearHyperbolic:
    return LinearHyperbolic()


def build_translation() -> TranslationSystem:
    return TranslationSystem()
