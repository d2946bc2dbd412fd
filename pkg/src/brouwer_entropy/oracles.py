"""Exact discrete systems: finitely many labeled orbits with finitely many hits.

An orbit is stored only through the times at which it meets the named sets,
which is all the word counts depend on.  Two counting paths are provided:
``enumerate_words`` slides a dense window over every orbit, while
``count_words`` groups windows by the run of hits they see and measures the
admissible offsets arithmetically.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from .errors import FamilyError

INF = "∞"


@dataclass(frozen=True)
class LabeledOrbit:
    hits: Mapping[int, frozenset]
    sites: Mapping[int, str] | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "hits", {int(t): frozenset(v) for t, v in sorted(self.hits.items()) if v}
        )
        if self.sites is not None:
            object.__setattr__(self, "sites", {int(t): s for t, s in sorted(self.sites.items())})

    def restricted(self, names) -> "LabeledOrbit":
        names = frozenset(names)
        return LabeledOrbit({t: v & names for t, v in self.hits.items()}, self.sites)


@dataclass(frozen=True)
class DiscreteSystem:
    orbits: tuple
    names: tuple
    metric: Mapping[str, float] | None = None
    far: float = 1e6
    groups: Mapping[str, frozenset] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(self.orbits))
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise FamilyError("duplicate member names")
        known = set(self.names)
        for orbit in self.orbits:
            for letters in orbit.hits.values():
                unknown = letters - known
                if unknown:
                    raise FamilyError(f"hits reference unknown names {sorted(unknown)}")

    # -- derived systems ---------------------------------------------------
    def restrict(self, names: Iterable[str]) -> "DiscreteSystem":
        names = tuple(n for n in self.names if n in set(names))
        return DiscreteSystem(
            tuple(o.restricted(names) for o in self.orbits), names, self.metric, self.far
        )

    def with_hits(self, orbits: Sequence[LabeledOrbit], names: Sequence[str]) -> "DiscreteSystem":
        return DiscreteSystem(tuple(orbits), tuple(names), self.metric, self.far)

    def union(self, name: str = "U") -> "DiscreteSystem":
        orbits = [LabeledOrbit({t: {name} for t in o.hits}, o.sites) for o in self.orbits]
        return self.with_hits(orbits, (name,))

    def regroup(self, groups: Mapping[str, Iterable[str]]) -> "DiscreteSystem":
        """Recode site-labelled orbits against a new family of site groups."""
        if any(o.sites is None for o in self.orbits):
            raise FamilyError("regrouping needs site-labelled orbits")
        groups = {name: frozenset(sites) for name, sites in groups.items()}
        orbits = []
        for o in self.orbits:
            hits = {}
            for t, site in o.sites.items():
                letters = {name for name, members in groups.items() if site in members}
                if letters:
                    hits[t] = letters
            orbits.append(LabeledOrbit(hits, o.sites))
        return DiscreteSystem(tuple(orbits), tuple(groups), self.metric, self.far, groups)

    def max_hits(self, names: Iterable[str] | None = None) -> int:
        names = set(self.names if names is None else names)
        return max(
            (sum(1 for v in o.hits.values() if v & names) for o in self.orbits), default=0
        )

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        data = {
            "names": list(self.names),
            "orbits": [
                {"hits": {str(t): sorted(v) for t, v in o.hits.items()}}
                | ({"sites": {str(t): s for t, s in o.sites.items()}} if o.sites is not None else {})
                for o in self.orbits
            ],
        }
        if self.metric is not None:
            data["metric"] = {"sites": dict(self.metric), "far": self.far}
        if self.groups is not None:
            data["groups"] = {k: sorted(v) for k, v in self.groups.items()}
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteSystem":
        orbits = []
        for o in data["orbits"]:
            sites = o.get("sites")
            orbits.append(
                LabeledOrbit(
                    {int(t): frozenset(v) for t, v in o["hits"].items()},
                    None if sites is None else {int(t): s for t, s in sites.items()},
                )
            )
        names = data.get("names")
        if names is None:
            names = sorted({n for o in orbits for v in o.hits.values() for n in v})
        metric = data.get("metric")
        groups = data.get("groups")
        return cls(
            tuple(orbits),
            tuple(names),
            None if metric is None else dict(metric["sites"]),
            1e6 if metric is None else metric.get("far", 1e6),
            None if groups is None else {k: frozenset(v) for k, v in groups.items()},
        )

    @classmethod
    def from_json(cls, text: str) -> "DiscreteSystem":
        return cls.from_dict(json.loads(text))


def from_geometric_orbits(system, starts, family) -> DiscreteSystem:
    """Label the full orbits of ``starts`` under ``system`` against ``family``."""
    orbits = []
    for p in starts:
        hits = defaultdict(set)
        for member in family.members:
            for t in system.hit_times(p, member.region):
                hits[t].add(member.name)
        orbits.append(LabeledOrbit(dict(hits)))
    return DiscreteSystem(tuple(orbits), family.names)


# ---------------------------------------------------------------------------
# word enumeration


def _codings(letter_sets: Sequence[frozenset]):
    return itertools.product(*[sorted(s) for s in letter_sets])


def enumerate_words(sys: DiscreteSystem, n: int, names: Iterable[str] | None = None) -> set:
    """All length-n codings, as dense tuples over names and ``INF``."""
    if n < 1:
        raise ValueError("window length must be positive")
    if names is not None:
        sys = sys.restrict(names)
    words = {(INF,) * n}
    for orbit in sys.orbits:
        if not orbit.hits:
            continue
        times = list(orbit.hits)
        for a in range(times[0] - n + 1, times[-1] + 1):
            options = [orbit.hits.get(a + k, frozenset({INF})) for k in range(n)]
            words.update(_codings(options))
    return words


def _window_runs(orbit: LabeledOrbit, n: int):
    """Yield ``(run, lo, hi)``: hit runs visible in some window and the window starts showing them."""
    times = list(orbit.hits)
    m = len(times)
    for i in range(m):
        for j in range(i, m):
            if times[j] - times[i] >= n:
                break
            lo = times[j] - n + 1
            if i > 0:
                lo = max(lo, times[i - 1] + 1)
            hi = times[i]
            if j + 1 < m:
                hi = min(hi, times[j + 1] - n)
            if lo <= hi:
                yield times[i : j + 1], lo, hi


def _patterns(sys: DiscreteSystem, n: int):
    """Map coded hit pattern -> list of intervals of first-hit positions."""
    table = defaultdict(list)
    for orbit in sys.orbits:
        for run, lo, hi in _window_runs(orbit, n):
            base = run[0]
            rel = [t - base for t in run]
            for letters in _codings([orbit.hits[t] for t in run]):
                table[tuple(zip(rel, letters))].append((base - hi, base - lo))
    return table


def _union_length(intervals) -> int:
    total = 0
    end = None
    for lo, hi in sorted(intervals):
        if end is None or lo > end:
            total += hi - lo + 1
            end = hi
        elif hi > end:
            total += hi - end
            end = hi
    return total


def count_words(sys: DiscreteSystem, n: int, names: Iterable[str] | None = None) -> int:
    """Number of distinct length-n codings; the all-infinity word is always counted."""
    if n < 1:
        raise ValueError("window length must be positive")
    if names is not None:
        sys = sys.restrict(names)
    return 1 + sum(_union_length(iv) for iv in _patterns(sys, n).values())


def sparse_words(sys: DiscreteSystem, n: int, names: Iterable[str] | None = None) -> set:
    """Distinct codings as tuples of ``(position, name)``; ``()`` is the all-infinity word."""
    if names is not None:
        sys = sys.restrict(names)
    words = {()}
    for pattern, intervals in _patterns(sys, n).items():
        for lo, hi in intervals:
            for p in range(lo, hi + 1):
                words.add(tuple((p + r, name) for r, name in pattern))
    return words


# ---------------------------------------------------------------------------
# random systems


def random_system(
    seed: int,
    orbit_count: int,
    letters: int | Sequence[str],
    horizon: int,
    density: float = 0.25,
    disjoint: bool = False,
) -> DiscreteSystem:
    if orbit_count < 1 or horizon < 1:
        raise ValueError("orbit_count and horizon must be positive")
    names = [f"Y{i + 1}" for i in range(letters)] if isinstance(letters, int) else list(letters)
    if not names:
        raise ValueError("need at least one letter")
    rng = np.random.default_rng(seed)
    orbits = []
    for _ in range(orbit_count):
        hits = {}
        for t in range(-horizon, horizon + 1):
            if rng.random() >= density:
                continue
            if disjoint or len(names) == 1:
                hits[t] = {names[int(rng.integers(len(names)))]}
            else:
                mask = rng.random(len(names)) < 0.6
                if not mask.any():
                    mask[int(rng.integers(len(names)))] = True
                hits[t] = {nm for nm, keep in zip(names, mask) if keep}
        orbits.append(LabeledOrbit(hits))
    return DiscreteSystem(tuple(orbits), tuple(names))


def metric_system(
    orbit_sites: Sequence[Mapping[int, str]],
    coords: Mapping[str, float],
    groups: Mapping[str, Iterable[str]],
    far: float = 1e6,
) -> DiscreteSystem:
    """Orbits moving through named sites of the line; away from sites they sit near infinity."""
    base = DiscreteSystem(
        tuple(LabeledOrbit({}, dict(s)) for s in orbit_sites), (), dict(coords), far
    )
    return base.regroup(groups)


def random_metric_system(seed: int, max_sites: int = 12, orbit_count: int = 3, horizon: int = 4):
    """Random site oracle whose letter groups are wandering, plus a scale below the site gaps.

    Returns ``(system, eps)``.
    """
    rng = np.random.default_rng(seed)
    n_sites = int(rng.integers(2, max_sites + 1))
    positions = np.sort(rng.choice(np.arange(0, 10 * max_sites), size=n_sites, replace=False))
    coords = {f"s{i}": float(v) for i, v in enumerate(positions)}
    sites = list(coords)
    n_letters = int(rng.integers(1, min(4, n_sites) + 1))
    labels = rng.integers(-1, n_letters, size=n_sites)
    groups = {f"Y{g + 1}": [s for s, lab in zip(sites, labels) if lab == g] for g in range(n_letters)}
    groups = {k: v for k, v in groups.items() if v}
    if not groups:
        groups = {"Y1": [sites[0]]}
    owner = {s: name for name, members in groups.items() for s in members}
    orbit_sites = []
    for _ in range(orbit_count):
        used = set()
        path = {}
        for t in range(-horizon, horizon + 1):
            if rng.random() < 0.45:
                s = sites[int(rng.integers(n_sites))]
                letter = owner.get(s)
                if letter is not None and letter in used:
                    continue
                if letter is not None:
                    used.add(letter)
                path[t] = s
        orbit_sites.append(path)
    gap = float(np.min(np.diff(positions))) if n_sites > 1 else 1.0
    return metric_system(orbit_sites, coords, groups), gap / 2


# ---------------------------------------------------------------------------
# separated sets


def _location_sequences(sys: DiscreteSystem, n: int) -> set:
    seqs = {(None,) * n}
    for orbit in sys.orbits:
        if not orbit.sites:
            continue
        times = list(orbit.sites)
        for a in range(times[0] - n + 1, times[-1] + 1):
            seqs.add(tuple(orbit.sites.get(a + k) for k in range(n)))
    return seqs


def _distance(sys: DiscreteSystem, a, b) -> float:
    if a is None and b is None:
        return 0.0
    if a is None or b is None:
        return sys.far
    return abs(sys.metric[a] - sys.metric[b])


def separated_count(
    sys: DiscreteSystem, n: int, eps: float, exact_limit: int = 20, with_flag: bool = False
):
    """Largest (n, eps)-separated set among the represented points.

    Points whose location sequences coincide are never separated from one another,
    so they are merged first.  Above ``exact_limit`` merged points a greedy set is
    returned unless the separation graph is complete; ``with_flag`` reports which.
    """
    if sys.metric is None:
        raise FamilyError("separated_count needs a metric table")
    if eps <= 0:
        raise ValueError("eps must be positive")
    seqs = sorted(_location_sequences(sys, n), key=lambda s: tuple("" if v is None else v for v in s))
    graph = nx.Graph()
    graph.add_nodes_from(range(len(seqs)))
    for i, j in itertools.combinations(range(len(seqs)), 2):
        if any(_distance(sys, a, b) > eps for a, b in zip(seqs[i], seqs[j])):
            graph.add_edge(i, j)
    m = len(seqs)
    if graph.number_of_edges() == m * (m - 1) // 2:
        size, exact = m, True
    elif m <= exact_limit:
        clique, _ = nx.max_weight_clique(graph, weight=None)
        size, exact = len(clique), True
    else:
        chosen = []
        for v in sorted(graph.nodes, key=lambda v: -graph.degree[v]):
            if all(graph.has_edge(v, u) for u in chosen):
                chosen.append(v)
        size, exact = len(chosen), False
    return (size, exact) if with_flag else size
