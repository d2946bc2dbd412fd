"""Coding orbit segments against finite families of boxes and counting the words."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._exact import as_fraction, ceil_pow, floor_int, floor_log2, floor_pow, fraction_str
from ._staircase_count import StaircaseWords
from .errors import FamilyError, InvalidParameterError, LayoutBoundError, NonWanderingRegionError
from .glued_plane import (
    ChartPoint,
    GluedSystem,
    LinearHyperbolic,
    Region,
    TranslationSystem,
    standard_box,
)
from .oracles import INF, DiscreteSystem, LabeledOrbit, count_words, sparse_words

STRATEGIES = ("exact", "plateau", "sample", "bound-lower", "bound-upper")


# ---------------------------------------------------------------------------
# families and words


@dataclass(frozen=True)
class Member:
    name: str
    region: Region


@dataclass(frozen=True)
class SetFamily:
    members: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        names = [m.name for m in self.members]
        if len(set(names)) != len(names):
            raise FamilyError(f"member names must be unique, got {names}")
        if INF in names:
            raise FamilyError(f"{INF!r} is reserved for the complement letter")

    @property
    def names(self) -> tuple:
        return tuple(m.name for m in self.members)

    def __len__(self):
        return len(self.members)

    def subfamily(self, names: Iterable[str]) -> "SetFamily":
        keep = set(names)
        return SetFamily(tuple(m for m in self.members if m.name in keep))

    def to_dict(self) -> dict:
        return {
            "members": [
                {
                    "name": m.name,
                    "chart": m.region.chart,
                    "box": [fraction_str(v) for v in (m.region.x_lo, m.region.x_hi, m.region.y_lo, m.region.y_hi)],
                }
                for m in self.members
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "SetFamily":
        members = []
        for entry in data["members"]:
            box = entry["box"]
            if len(box) != 4:
                raise FamilyError(f"box of {entry.get('name')!r} needs four numbers")
            members.append(Member(entry["name"], Region(int(entry.get("chart", 1)), *box)))
        return cls(tuple(members))

    @classmethod
    def from_json(cls, text: str) -> "SetFamily":
        return cls.from_dict(json.loads(text))


def standard_family(L: int) -> SetFamily:
    """U_i = [-2/3, 2/3]^2 in chart i, named U1..UL."""
    return SetFamily(tuple(Member(f"U{i}", standard_box(i)) for i in range(1, L + 1)))


def linear_family() -> SetFamily:
    """One box around (0, 1) on the contracting axis and one around (1, 0) on the expanding one."""
    q = Fraction(1, 4)
    return SetFamily(
        (
            Member("Y1", Region(1, -q, q, 1 - q, 1 + q)),
            Member("Y2", Region(1, 1 - q, 1 + q, -q, q)),
        )
    )


def is_standard(family: SetFamily, L: int) -> bool:
    return family == standard_family(L)


@dataclass(frozen=True)
class CodingWord:
    letters: tuple

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))

    def __len__(self):
        return len(self.letters)

    @classmethod
    def from_sparse(cls, n: int, hits: Iterable[tuple[int, str]]) -> "CodingWord":
        letters = [INF] * n
        for pos, name in hits:
            if not 0 <= pos < n:
                raise ValueError(f"position {pos} outside a window of length {n}")
            letters[pos] = name
        return cls(tuple(letters))

    @property
    def sparse(self) -> tuple:
        return tuple((k, a) for k, a in enumerate(self.letters) if a != INF)

    def __str__(self):
        return "(" + ", ".join(self.letters) + ")"


@dataclass(frozen=True)
class GrowthSeries:
    rows: tuple = ()

    def __post_init__(self):
        rows = tuple((int(n), int(c), str(s)) for n, c, s in self.rows)
        for (n0, _, _), (n1, _, _) in zip(rows, rows[1:]):
            if n1 <= n0:
                raise ValueError("n must be strictly increasing")
        for n, c, s in rows:
            if c < 1:
                raise ValueError(f"count at n={n} must be >= 1")
            if s not in STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}")
        object.__setattr__(self, "rows", rows)

    @property
    def ns(self) -> list[int]:
        return [r[0] for r in self.rows]

    @property
    def counts(self) -> list[int]:
        return [r[1] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "count", "strategy"])
        writer.writerows(self.rows)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GrowthSeries":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != ["n", "count", "strategy"]:
            raise ValueError(f"expected header n,count,strategy, got {reader.fieldnames}")
        return cls(tuple((r["n"], r["count"], r["strategy"]) for r in reader))


# ---------------------------------------------------------------------------
# coding single orbits


def code_orbit(system, start: ChartPoint, n: int, family: SetFamily) -> CodingWord:
    """Deterministic coding: the lowest-indexed member containing a point wins."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    letters = [INF] * n
    for member in family.members:
        for t in system.hit_times(start, member.region):
            if 0 <= t < n and letters[t] == INF:
                letters[t] = member.name
    return CodingWord(tuple(letters))


def orbit_hits(system, start: ChartPoint, family: SetFamily) -> LabeledOrbit:
    """Every time the full orbit of ``start`` meets a member, with all applicable names."""
    hits: dict[int, set] = {}
    for member in family.members:
        for t in system.hit_times(start, member.region):
            hits.setdefault(t, set()).add(member.name)
    return LabeledOrbit(hits)


def _as_discrete(system, family) -> DiscreteSystem:
    if not isinstance(system, DiscreteSystem):
        raise FamilyError("count_exact works on discrete oracles; build one with an oracle builder")
    if family is None:
        return system
    names = family.names if isinstance(family, SetFamily) else tuple(family)
    missing = set(names) - set(system.names)
    if missing:
        raise FamilyError(f"family names {sorted(missing)} are not labels of the oracle")
    return system.restrict(names)


def count_exact(system: DiscreteSystem, family=None, n: int = 1) -> int:
    """#A_n over all orbits of a discrete oracle, every coding of every window."""
    return count_words(_as_discrete(system, family), n)


# ---------------------------------------------------------------------------
# arithmetic counts for the glued systems


def count_plateau(spec, n: int, family: SetFamily | None = None) -> int:
    """Number of full-template words realized by plateau starts with k1 <= n / (2L).

    For each k1 the window can place the first hit at k1 offsets, the middle
    levels have k1 + 1 values each, the last level floor(k1**alpha') + 1, and
    every template comes in a single-hit and a double-hit variant.
    """
    if family is not None and not is_standard(family, spec.L):
        raise FamilyError("count_plateau needs the standard family")
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    L = spec.L
    top = n // (2 * L)
    if top > spec.k_max:
        raise LayoutBoundError(
            f"n = {n} needs plateaus up to k1 = {top} but k_max = {spec.k_max}", needed=top, k_max=spec.k_max
        )
    total = 0
    for k1 in range(1, top + 1):
        last = 1 if L == 2 else floor_pow(k1, spec.alpha_prime) + 1
        middle = (k1 + 1) ** max(0, L - 3)
        total += 2 * k1 * middle * last
    return total


def count_upper_bound(spec, n: int) -> int:
    """Partial-template term, full-template term and the all-infinity word."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    L = spec.L
    pairs = L * (L + 1) // 2 - 1
    partial = pairs * 2 ** (L - 1) * n ** (L - 1)
    full = n ** (L - 2) * sum(ceil_pow(k + 2, spec.alpha_prime) + 2 for k in range(1, n + 1))
    return 1 + partial + full


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class SamplingPlan:
    """Starting points for ``count_sample``.

    ``x_step`` spaces the x phases in [0, 1); the y seeds are the plateau
    midpoints with k1 <= ``k1_cap`` (default n) and, with ``gaps``, the
    midpoints between last-level plateaus.  ``random_fill`` extra starts are
    drawn from the seed.
    """

    x_step: Fraction = Fraction(1, 3)
    k1_cap: int | None = None
    gaps: bool = True
    random_fill: int = 0
    fast: bool = True

    def __post_init__(self):
        object.__setattr__(self, "x_step", as_fraction(self.x_step))
        if not 0 < self.x_step <= 1:
            raise InvalidParameterError("x_step must lie in (0, 1]")
        if self.random_fill < 0:
            raise InvalidParameterError("random_fill must be >= 0")

    @property
    def phases(self) -> list[Fraction]:
        return [k * self.x_step for k in range(floor_int(1 / self.x_step) + 1) if k * self.x_step < 1]

    def is_default_grid(self) -> bool:
        return self.x_step == Fraction(1, 3) and self.gaps


def _glued_y_seeds(spec, k1_cap: int, gaps: bool, k1_only: int | None = None):
    lo, hi = (1, k1_cap) if k1_only is None else (k1_only, min(k1_only, k1_cap))
    ys = [y for _, y in spec.plateau_midpoints(hi, lo)]
    if gaps:
        ys += [y for _, y in spec.gap_midpoints(hi, lo)]
    return ys


def _random_starts(system, n: int, count: int, seed: int) -> list[ChartPoint]:
    rng = np.random.default_rng(seed)
    starts = []
    denom = 1 << 30
    for _ in range(count):
        x = Fraction(int(rng.integers(0, denom)), denom)
        if isinstance(system, GluedSystem):
            k1 = int(rng.integers(1, min(n, system.spec.k_max) + 1))
            block_lo = Fraction(2, 3) / (1 << k1)
            y = block_lo + block_lo * Fraction(int(rng.integers(1, denom)), denom)
        elif isinstance(system, LinearHyperbolic):
            x = x * Fraction(1, 1 << int(rng.integers(0, n + 2)))
            y = Fraction(1) + Fraction(int(rng.integers(-denom, denom)), 4 * denom)
        else:
            y = Fraction(0)
        starts.append(ChartPoint(1, x, y))
    return starts


def sample_starts(system, n: int, plan: SamplingPlan, seed: int = 0, k1_only: int | None = None):
    """Deterministic list of starting points described by ``plan``."""
    phases = plan.phases
    if isinstance(system, GluedSystem):
        spec = system.spec
        cap = n if plan.k1_cap is None else plan.k1_cap
        if cap > spec.k_max:
            raise LayoutBoundError(
                f"n = {n} needs plateaus up to k1 = {cap} but k_max = {spec.k_max}", needed=cap, k_max=spec.k_max
            )
        ys = _glued_y_seeds(spec, cap, plan.gaps, k1_only)
        starts = [ChartPoint(1, x, y) for y in ys for x in phases]
    elif isinstance(system, LinearHyperbolic):
        starts = [ChartPoint(1, Fraction(0), Fraction(1)), ChartPoint(1, Fraction(1), Fraction(0))]
        for j in range(0, n + 3):
            for x in phases:
                starts.append(ChartPoint(1, (1 + x) / (1 << j), Fraction(1)))
    else:
        starts = [ChartPoint(1, x, Fraction(0)) for x in phases]
    if plan.random_fill:
        starts.extend(_random_starts(system, n, plan.random_fill, seed))
    return starts


def _coded_system(system, starts, family: SetFamily) -> DiscreteSystem:
    return DiscreteSystem(tuple(orbit_hits(system, p, family) for p in starts), family.names)


def count_sample(system, family: SetFamily, n: int, plan: SamplingPlan | None = None, seed: int = 0) -> int:
    """Distinct words over all starts of the sampling plan; a lower bound for #A_n."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    plan = plan or SamplingPlan()
    if not family.members:
        return 1
    if (
        plan.fast
        and isinstance(system, GluedSystem)
        and plan.is_default_grid()
        and (plan.k1_cap is None or plan.k1_cap == n)
        and is_standard(family, system.spec.L)
        and n >= 2
    ):
        return _count_sample_staircase(system, family, n, plan, seed)
    starts = sample_starts(system, n, plan, seed)
    return count_words(_coded_system(system, starts, family), n)


def _count_sample_staircase(system, family, n, plan, seed) -> int:
    spec = system.spec
    if n > spec.k_max:
        raise LayoutBoundError(f"n = {n} needs plateaus up to k1 = {n} but k_max = {spec.k_max}", needed=n, k_max=spec.k_max)
    counter = StaircaseWords(spec, n)
    total = 1 + counter.count()
    leftovers = sample_starts(system, n, SamplingPlan(gaps=plan.gaps), seed, k1_only=1)
    if plan.random_fill:
        leftovers += _random_starts(system, n, plan.random_fill, seed)
    chart_of = {m.name: m.region.chart for m in family.members}
    extra = {
        w
        for w in sparse_words(_coded_system(system, leftovers, family), n)
        if w and not counter.contains(w, chart_of)
    }
    return total + len(extra)


# ---------------------------------------------------------------------------
# M(Y)


def _lattice_max(intervals: Sequence[tuple[Fraction, Fraction]]) -> int:
    """max over x of #{t integer : x + t in the union of the intervals}."""
    candidates = {(-lo) % 1 for lo, _ in intervals} | {(-hi) % 1 for _, hi in intervals}
    best = 0
    for c in candidates:
        hits = set()
        for lo, hi in intervals:
            hits.update(range(-floor_int(-(lo - c)), floor_int(hi - c) + 1))
        best = max(best, len(hits))
    return best


def _log_span(lo: Fraction, hi: Fraction) -> int | None:
    """Max number of k with 2**k v in [lo, hi] over v; None when the range holds 0."""
    if lo <= 0 <= hi:
        return None
    a, b = (lo, hi) if lo > 0 else (-hi, -lo)
    return floor_log2(b / a) + 1


def max_hits(system, region) -> int:
    """M(Y): the largest number of orbit points inside ``region``.

    ``region`` may be a Region, a SetFamily (its union) or, for oracles, names.
    """
    if isinstance(system, DiscreteSystem):
        names = None
        if isinstance(region, SetFamily):
            names = region.names
        elif region is not None:
            names = [region] if isinstance(region, str) else list(region)
        return system.max_hits(names)
    regions = [m.region for m in region.members] if isinstance(region, SetFamily) else [region]
    if isinstance(system, LinearHyperbolic):
        total = 0
        for r in regions:
            spans = [s for s in (_log_span(r.x_lo, r.x_hi), _log_span(r.y_lo, r.y_hi)) if s is not None]
            if not spans:
                raise NonWanderingRegionError(f"{r} contains the non-wandering point")
            total += min(spans)
        return total
    by_chart: dict[int, list] = {}
    for r in regions:
        by_chart.setdefault(r.chart, []).append((r.x_lo, r.x_hi))
    # boxes in different charts are met in separate stretches of the orbit
    return sum(_lattice_max(v) for v in by_chart.values())


def resolve_threads(default: int = 1) -> int:
    value = os.environ.get("WE_THREADS")
    if not value:
        return default
    try:
        return max(1, int(value))
    except ValueError:
        return default
