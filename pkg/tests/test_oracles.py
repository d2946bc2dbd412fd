import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brouwer_entropy import suites
from brouwer_entropy.errors import FamilyError
from brouwer_entropy.oracles import (
    INF,
    DiscreteSystem,
    LabeledOrbit,
    count_words,
    enumerate_words,
    metric_system,
    random_metric_system,
    random_system,
    separated_count,
    sparse_words,
)

NS = range(1, 33)

orbit_maps = st.dictionaries(
    st.integers(-8, 8),
    st.sets(st.sampled_from(["Y1", "Y2", "Y3"]), min_size=1, max_size=3),
    max_size=6,
)
systems = st.lists(orbit_maps, min_size=1, max_size=4).map(
    lambda maps: DiscreteSystem(tuple(LabeledOrbit(m) for m in maps), ("Y1", "Y2", "Y3"))
)
disjoint_systems = st.lists(
    st.dictionaries(st.integers(-8, 8), st.sampled_from(["Y1", "Y2", "Y3"]).map(lambda a: {a}), max_size=6),
    min_size=1,
    max_size=4,
).map(lambda maps: DiscreteSystem(tuple(LabeledOrbit(m) for m in maps), ("Y1", "Y2", "Y3")))


class TestEnumerate:
    def test_single_hit(self):
        sys = DiscreteSystem((LabeledOrbit({0: {"Y"}}),), ("Y",))
        assert enumerate_words(sys, 2) == {("Y", INF), (INF, "Y"), (INF, INF)}

    def test_overlap_expands(self):
        sys = DiscreteSystem((LabeledOrbit({0: {"Y1", "Y2"}}),), ("Y1", "Y2"))
        assert enumerate_words(sys, 1) == {("Y1",), ("Y2",), (INF,)}

    def test_unknown_names(self):
        with pytest.raises(FamilyError):
            DiscreteSystem((LabeledOrbit({0: {"Q"}}),), ("Y",))

    @settings(max_examples=150, deadline=None)
    @given(sys=systems, n=st.integers(1, 20))
    def test_two_counting_paths_agree(self, sys, n):
        dense = enumerate_words(sys, n)
        assert count_words(sys, n) == len(dense)
        rebuilt = set()
        for w in sparse_words(sys, n):
            letters = [INF] * n
            for pos, name in w:
                letters[pos] = name
            rebuilt.add(tuple(letters))
        assert rebuilt == dense


class TestRandomSystem:
    def test_reproducible(self):
        assert random_system(1, 1, 1, 5) == random_system(1, 1, 1, 5)
        assert random_system(1, 1, 1, 5).to_json() == random_system(1, 1, 1, 5).to_json()

    def test_seeds_differ(self):
        base = random_system(0, 2, 3, 6)
        differing = sum(random_system(s, 2, 3, 6) != base for s in range(1, 101))
        assert differing >= 95

    def test_hits_inside_horizon(self):
        sys = random_system(4, 3, 2, 5)
        assert all(-5 <= t <= 5 for o in sys.orbits for t in o.hits)

    def test_json_round_trip(self):
        sys, _ = random_metric_system(9)
        assert DiscreteSystem.from_json(sys.to_json()) == sys
        plain = random_system(2, 3, 4, 6)
        assert DiscreteSystem.from_json(plain.to_json()) == plain


class TestSeparated:
    coords = {"a": 0.0, "b": 5.0}

    def test_two_points(self):
        sys = metric_system([{0: "a"}, {0: "b"}], self.coords, {"Y": ["a"]})
        # the far point, a and b at time 0
        assert separated_count(sys, 1, 1.0) == 3

    def test_single_point(self):
        sys = metric_system([], self.coords, {"Y": ["a"]})
        assert separated_count(sys, 4, 1.0) == 1

    def test_close_points_merge(self):
        sys = metric_system([{0: "a"}, {0: "b"}], self.coords, {"Y": ["a"]})
        assert separated_count(sys, 1, 10.0) == 2

    def test_needs_metric(self):
        with pytest.raises(FamilyError):
            separated_count(random_system(0, 1, 1, 3), 2, 0.5)

    def test_greedy_flag(self):
        coords = {f"s{i}": float(i) for i in range(8)}
        sys = metric_system([{t: f"s{t}" for t in range(8)}], coords, {"Y": ["s0"]})
        size, exact = separated_count(sys, 3, 1.5, exact_limit=2, with_flag=True)
        assert not exact and size >= 1
        size_exact, flag = separated_count(sys, 3, 1.5, with_flag=True)
        assert flag and size <= size_exact


# finite-n inequalities, one property per statement


@settings(max_examples=60, deadline=None)
@given(sys=systems, seed=st.integers(0, 2**16))
def test_monotonicity(sys, seed):
    assert suites.check_monotonicity(sys, NS, np.random.default_rng(seed)) == []


@settings(max_examples=60, deadline=None)
@given(sys=systems)
def test_additivity(sys):
    assert suites.check_additivity(sys, NS) == []


@settings(max_examples=60, deadline=None)
@given(sys=systems, seed=st.integers(0, 2**16))
def test_wandering_additivity(sys, seed):
    assert suites.check_wandering_additivity(sys, NS, np.random.default_rng(seed)) == []


@settings(max_examples=60, deadline=None)
@given(sys=disjoint_systems, seed=st.integers(0, 2**16))
def test_iterate_shift(sys, seed):
    assert suites.check_iterate_shift(sys, NS, np.random.default_rng(seed)) == []


@settings(max_examples=40, deadline=None)
@given(sys=disjoint_systems, seed=st.integers(0, 2**16))
def test_singular_reduction(sys, seed):
    assert suites.check_singular_reduction(sys, range(1, 17), np.random.default_rng(seed)) == []


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_sandwich(seed):
    sys, eps = random_metric_system(seed)
    assert suites.sandwich_violations(sys, eps, range(1, 7)) == []


def test_checks_catch_a_false_inequality():
    """Reversing additivity must be caught on a system with a lone double hit."""
    sys = DiscreteSystem((LabeledOrbit({0: {"Y1"}, 1: {"Y2"}}),), ("Y1", "Y2"))
    union = sys.union()
    bad = suites._compare("reversed", sys, range(1, 4), lambda n: count_words(sys, n), lambda n: count_words(union, n))
    assert bad


def test_shift_preparation():
    sys = DiscreteSystem((LabeledOrbit({0: {"Y1"}, 2: {"Y2"}, 5: {"Y1"}}),), ("Y1", "Y2"))
    base, moved = suites.shifted_pair(sys, "Y1", 2)
    assert dict(base.orbits[0].hits) == {2: {"Y2"}, 5: {"Y1"}}
    assert dict(moved.orbits[0].hits) == {2: {"Y2"}, 7: {"Y1"}}


def test_once_and_gap_bound():
    sys = DiscreteSystem((LabeledOrbit({0: {"Y1"}, 3: {"Y2"}, 4: {"Y1"}}),), ("Y1", "Y2"))
    once = suites.make_once(sys, np.random.default_rng(0))
    assert sum(1 for v in once.orbits[0].hits.values() if "Y1" in v) == 1
    assert suites.gap_bound(once) in (1, 3)
