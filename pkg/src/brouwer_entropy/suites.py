"""Exact finite-n inequalities between word counts, checked on random oracles.

Every check returns a list of ``Violation`` records; an empty list means the
inequality held for every window length tried.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .oracles import (
    DiscreteSystem,
    LabeledOrbit,
    count_words,
    enumerate_words,
    random_metric_system,
    random_system,
    separated_count,
    sparse_words,
)


@dataclass(frozen=True)
class Violation:
    check: str
    n: int
    lhs: int
    rhs: int
    system: DiscreteSystem


def _compare(check, system, ns, lhs_fn, rhs_fn) -> list[Violation]:
    out = []
    for n in ns:
        lhs, rhs = lhs_fn(n), rhs_fn(n)
        if lhs > rhs:
            out.append(Violation(check, n, lhs, rhs, system))
    return out


# -- the three inequalities behind monotonicity and additivity ----------------


def refine(system: DiscreteSystem, rng: np.random.Generator, children: int) -> tuple[DiscreteSystem, tuple]:
    """Add ``children`` new names, each hitting a random subset of one parent's hits."""
    parents = [system.names[int(rng.integers(len(system.names)))] for _ in range(children)]
    kids = tuple(f"Z{c + 1}" for c in range(children))
    orbits = []
    for o in system.orbits:
        hits = {t: set(v) for t, v in o.hits.items()}
        for kid, parent in zip(kids, parents):
            for t, v in o.hits.items():
                if parent in v and rng.random() < 0.5:
                    hits[t].add(kid)
        orbits.append(LabeledOrbit(hits))
    return system.with_hits(orbits, system.names + kids), kids


def check_monotonicity(system: DiscreteSystem, ns, rng) -> list[Violation]:
    combined, kids = refine(system, rng, int(rng.integers(1, 4)))
    M = system.max_hits()
    factor = (len(kids) + 1) ** M
    return _compare(
        "monotonicity",
        combined,
        ns,
        lambda n: count_words(combined, n, kids),
        lambda n: factor * count_words(combined, n, system.names),
    )


def check_additivity(system: DiscreteSystem, ns) -> list[Violation]:
    union = system.union("U")
    return _compare("additivity", system, ns, lambda n: count_words(union, n), lambda n: count_words(system, n))


def make_wandering(system: DiscreteSystem, pair, rng) -> DiscreteSystem:
    """Keep one visit to the union of ``pair`` per orbit."""
    pair = set(pair)
    orbits = []
    for o in system.orbits:
        visits = [t for t, v in o.hits.items() if v & pair]
        keep = visits[int(rng.integers(len(visits)))] if visits else None
        hits = {t: (v if t == keep else v - pair) for t, v in o.hits.items()}
        orbits.append(LabeledOrbit(hits))
    return system.with_hits(orbits, system.names)


def check_wandering_additivity(system: DiscreteSystem, ns, rng) -> list[Violation]:
    y1, y2 = (system.names[i] for i in rng.choice(len(system.names), size=2, replace=False))
    wand = make_wandering(system, (y1, y2), rng)
    without_1 = [nm for nm in wand.names if nm != y1]
    without_2 = [nm for nm in wand.names if nm != y2]
    return _compare(
        "wandering-additivity",
        wand,
        ns,
        lambda n: count_words(wand, n),
        lambda n: count_words(wand, n, without_2) + count_words(wand, n, without_1),
    )


# -- iterates and singular reduction ------------------------------------------


def shifted_pair(system: DiscreteSystem, name: str, shift: int) -> tuple[DiscreteSystem, DiscreteSystem]:
    """(original, shifted): hits of ``name`` moved by ``shift``, conflicting hits dropped first.

    Expects one name per hit time.
    """
    before, after = [], []
    for o in system.orbits:
        hits = {t: set(v) for t, v in o.hits.items()}
        for t in [t for t, v in hits.items() if name in v]:
            if t + shift in hits:
                del hits[t]
        moved = {t: v for t, v in hits.items() if name not in v}
        for t, v in hits.items():
            if name in v:
                moved[t + shift] = {name}
        before.append(LabeledOrbit(hits))
        after.append(LabeledOrbit(moved))
    return system.with_hits(before, system.names), system.with_hits(after, system.names)


def check_iterate_shift(system: DiscreteSystem, ns, rng) -> list[Violation]:
    name = system.names[int(rng.integers(len(system.names)))]
    shift = int(rng.choice([-3, -2, -1, 1, 2, 3]))
    base, moved = shifted_pair(system, name, shift)
    return _compare(
        "iterate-shift",
        base,
        ns,
        lambda n: count_words(moved, n),
        lambda n: count_words(base, n + abs(shift)),
    )


def make_once(system: DiscreteSystem, rng) -> DiscreteSystem:
    """Each name visited at most once per orbit, one name per time."""
    orbits = []
    for o in system.orbits:
        hits = {}
        for nm in system.names:
            times = [t for t, v in o.hits.items() if nm in v and t not in hits]
            if times:
                hits[times[int(rng.integers(len(times)))]] = {nm}
        orbits.append(LabeledOrbit(hits))
    return system.with_hits(orbits, system.names)


def gap_bound(system: DiscreteSystem) -> int:
    """Largest min-pairwise distance among orbits meeting every name once."""
    M = 0
    for o in system.orbits:
        first = {}
        for t, v in o.hits.items():
            for nm in v:
                first.setdefault(nm, t)
        if len(first) == len(system.names):
            M = max(M, min(abs(a - b) for a, b in combinations(first.values(), 2)))
    return M


def reduction_counts(system: DiscreteSystem, n: int, M: int):
    """Sizes of A_n, of each A_n(F; F') for F' a proper subset, and of each A_n({i, j})."""
    names = system.names
    words = sparse_words(system, n)
    by_letters: dict[frozenset, int] = {}
    full = []
    for w in words:
        letters = frozenset(nm for _, nm in w)
        if letters == frozenset(names):
            full.append({nm: p for p, nm in w})
        else:
            by_letters[letters] = by_letters.get(letters, 0) + 1
    pairs = {
        (a, b): sum(1 for pos in full if abs(pos[a] - pos[b]) <= M) for a, b in combinations(names, 2)
    }
    return len(words), by_letters, pairs


def check_singular_reduction(system: DiscreteSystem, ns, rng) -> list[Violation]:
    once = make_once(system, rng)
    L = len(once.names)
    C = (2**L - 1) + L * (L - 1) // 2
    M = gap_bound(once)
    out = []
    for n in ns:
        total, by_letters, pairs = reduction_counts(once, n, M)
        biggest = max(list(by_letters.values()) + list(pairs.values()) + [0])
        if total > C * biggest:
            out.append(Violation("singular-reduction", n, total, C * biggest, once))
        for (a, b), size in pairs.items():
            rest = [nm for nm in once.names if nm != a]
            bound = 2 * M * count_words(once, n, rest)
            if size > bound:
                out.append(Violation("singular-pair", n, size, bound, once))
    return out


# -- suites ------------------------------------------------------------------


def lemma_systems(seed: int, count: int = 200):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        sub = int(rng.integers(0, 2**31))
        yield sub, random_system(
            sub,
            orbit_count=int(rng.integers(1, 5)),
            letters=int(rng.integers(2, 5)),
            horizon=int(rng.integers(3, 9)),
            density=float(rng.uniform(0.15, 0.5)),
        ), random_system(
            sub + 1,
            orbit_count=int(rng.integers(1, 5)),
            letters=int(rng.integers(2, 5)),
            horizon=int(rng.integers(3, 9)),
            density=float(rng.uniform(0.15, 0.5)),
            disjoint=True,
        )


def run_lemma_suite(seed: int = 0, systems: int = 200, n_max: int = 32) -> list[Violation]:
    ns = range(1, n_max + 1)
    out = []
    for sub, free, disjoint in lemma_systems(seed, systems):
        rng = np.random.default_rng(sub)
        out += check_monotonicity(free, ns, rng)
        out += check_additivity(free, ns)
        out += check_wandering_additivity(free, ns, rng)
        out += check_iterate_shift(disjoint, ns, rng)
        out += check_singular_reduction(disjoint, ns, rng)
    return out


def sandwich_violations(system: DiscreteSystem, eps: float, ns) -> list[Violation]:
    """max_F' #A_n(F, F') <= S(n, eps) <= #A_n(sites as singletons)."""
    out = []
    singletons = system.regroup({s: [s] for s in system.metric})
    for n in ns:
        words = enumerate_words(system, n)
        by_letters: dict[frozenset, int] = {}
        for w in words:
            key = frozenset(a for a in w if a in system.names)
            by_letters[key] = by_letters.get(key, 0) + 1
        lower = max(by_letters.values())
        s, _ = separated_count(system, n, eps, with_flag=True)
        upper = len(enumerate_words(singletons, n))
        if lower > s:
            out.append(Violation("sandwich-lower", n, lower, s, system))
        if s > upper:
            out.append(Violation("sandwich-upper", n, s, upper, system))
    return out


def run_sandwich_suite(seed: int = 0, systems: int = 50, n_max: int = 8) -> list[Violation]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(systems):
        system, eps = random_metric_system(int(rng.integers(0, 2**31)))
        out += sandwich_violations(system, eps, range(1, n_max + 1))
    return out
